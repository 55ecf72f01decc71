//! Cohomology of a cochain complex: ranks, torsion, representative cocycles,
//! and the machinery to express an arbitrary cocycle in a chosen basis.

use std::collections::HashMap;

use crate::cochain::{Cochain, CochainComplex};
use crate::complex::SimplicialComplex;
use crate::error::InputError;
use crate::linalg::{
    smith_normal_form, smith_with_riders, CoeffRing, SparseMat, SparseVec, TransformFlags,
};

/// One degree of cohomology with representatives.
///
/// Free generators come first (ordered by kernel pivot), then torsion
/// generators ordered by invariant factor. The stored transforms allow any
/// cocycle of the same degree to be expressed in this basis.
pub struct CohomologyBasis<R: CoeffRing> {
    pub degree: i32,
    pub free: Vec<Cochain<R::Elem>>,
    /// (order, representative); order is a non-unit, non-zero ring element.
    pub torsion: Vec<(R::Elem, Cochain<R::Elem>)>,
    expr: Option<ExprContext<R>>,
}

struct ExprContext<R: CoeffRing> {
    /// V⁻¹ of the SNF of δ_q: cocycle -> kernel coordinates.
    vinv_b: SparseMat<R::Elem>,
    rank_b: usize,
    kernel_dim: usize,
    /// U of the SNF of the image-coordinate matrix C.
    u_c: SparseMat<R::Elem>,
    rank_c: usize,
    diag_c: Vec<R::Elem>,
    /// positions in 0..kernel_dim: free gens are rank_c.., torsion gens are
    /// the non-unit diagonal positions (stored ascending).
    torsion_pos: Vec<usize>,
}

/// Coordinates of a cocycle in a `CohomologyBasis`: free part exact, torsion
/// part reduced modulo the generator's order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCoords<E> {
    pub free: Vec<E>,
    pub torsion: Vec<E>,
}

impl<E: Clone + PartialEq> ClassCoords<E> {
    pub fn is_zero<R: CoeffRing<Elem = E>>(&self, ring: &R) -> bool {
        self.free.iter().all(|c| ring.is_zero(c)) && self.torsion.iter().all(|c| ring.is_zero(c))
    }
}

impl<R: CoeffRing> CohomologyBasis<R> {
    pub fn free_rank(&self) -> usize {
        self.free.len()
    }

    pub fn torsion_orders(&self) -> Vec<R::Elem> {
        self.torsion.iter().map(|(d, _)| d.clone()).collect()
    }

    pub fn num_generators(&self) -> usize {
        self.free.len() + self.torsion.len()
    }

    pub fn generator(&self, i: usize) -> &Cochain<R::Elem> {
        if i < self.free.len() {
            &self.free[i]
        } else {
            &self.torsion[i - self.free.len()].1
        }
    }

    /// Order of generator i: None for free generators.
    pub fn generator_order(&self, i: usize) -> Option<&R::Elem> {
        if i < self.free.len() {
            None
        } else {
            Some(&self.torsion[i - self.free.len()].0)
        }
    }

    /// Express a cocycle in this basis. Fails if `z` is not a cocycle of the
    /// right degree (top coordinates do not vanish).
    pub fn express(&self, ring: &R, z: &Cochain<R::Elem>) -> Result<ClassCoords<R::Elem>, InputError> {
        let ctx = self.expr.as_ref().expect("basis built without expression context");
        if z.degree != self.degree {
            return Err(InputError::Dimension(format!(
                "cocycle degree {} differs from basis degree {}",
                z.degree, self.degree
            )));
        }
        let coords = ctx.vinv_b.apply(ring, &z.vec);
        let mut w: Vec<R::Elem> = vec![ring.zero(); ctx.kernel_dim];
        for (i, val) in coords.iter() {
            if *i < ctx.rank_b {
                return Err(InputError::Dimension(
                    "not a cocycle: nonzero coordinate outside the kernel".into(),
                ));
            }
            w[*i - ctx.rank_b] = val.clone();
        }
        // t = U_c · w
        let mut t: Vec<R::Elem> = vec![ring.zero(); ctx.kernel_dim];
        for r in 0..ctx.kernel_dim {
            let mut acc = ring.zero();
            for (c, e) in ctx.u_c.row(r) {
                let val = &w[*c as usize];
                if !ring.is_zero(val) {
                    acc = ring.add(&acc, &ring.mul(e, val));
                }
            }
            t[r] = acc;
        }
        let free: Vec<R::Elem> = (ctx.rank_c..ctx.kernel_dim).map(|i| t[i].clone()).collect();
        let torsion: Vec<R::Elem> = ctx
            .torsion_pos
            .iter()
            .map(|&i| ring.rem_mod(&t[i], &ctx.diag_c[i]))
            .collect();
        Ok(ClassCoords { free, torsion })
    }

    /// Whether `z` is a coboundary (the zero class).
    pub fn is_zero_class(&self, ring: &R, z: &Cochain<R::Elem>) -> Result<bool, InputError> {
        Ok(self.express(ring, z)?.is_zero(ring))
    }
}

/// Compute the degree-q cohomology of `cx`, with representatives and an
/// expression context when `with_expr` is set.
pub fn cohomology_basis<R: CoeffRing>(
    cx: &CochainComplex<R>,
    q: i32,
    with_expr: bool,
) -> CohomologyBasis<R> {
    let ring = &cx.ring;
    let n = cx.num_cells(q);
    if n == 0 {
        return CohomologyBasis {
            degree: q,
            free: Vec::new(),
            torsion: Vec::new(),
            expr: with_expr.then(|| ExprContext {
                vinv_b: SparseMat::zero(0, 0),
                rank_b: 0,
                kernel_dim: 0,
                u_c: SparseMat::zero(0, 0),
                rank_c: 0,
                diag_c: Vec::new(),
                torsion_pos: Vec::new(),
            }),
        };
    }
    let b = cx.delta(q);
    let snf_b = smith_normal_form(ring, &b, TransformFlags { u: false, uinv: false, v: true, vinv: true });
    let rank_b = snf_b.rank;
    let k = n - rank_b;
    let v_b = snf_b.v.as_ref().unwrap();
    let vinv_b = snf_b.vinv.as_ref().unwrap();

    // image coordinates: rows rank_b.. of V⁻¹ · δ_{q-1}
    let a = cx.delta(q - 1);
    let w = vinv_b.matmul(ring, &a);
    let mut triplets: Vec<(usize, usize, R::Elem)> = Vec::new();
    for (r, c, e) in w.iter_entries() {
        debug_assert!(r >= rank_b, "coboundary escapes the kernel: δδ != 0");
        if r >= rank_b {
            triplets.push((r - rank_b, c, e.clone()));
        }
    }
    let c_mat = SparseMat::from_triplets(ring, k, a.ncols, triplets);
    let snf_c = smith_normal_form(
        ring,
        &c_mat,
        TransformFlags { u: true, uinv: true, v: false, vinv: false },
    );
    let rank_c = snf_c.rank;
    let uinv_c = snf_c.uinv.as_ref().unwrap();

    // kernel basis as cochain vectors: columns rank_b.. of V
    let kernel_vec = |j: usize| -> SparseVec<R::Elem> {
        let mut col: Vec<(usize, R::Elem)> = Vec::new();
        for r in 0..v_b.nrows {
            if let Some(e) = v_b.get(r, rank_b + j) {
                col.push((r, e.clone()));
            }
        }
        SparseVec::from_sorted(col)
    };

    let gen_cochain = |pos: usize| -> Cochain<R::Elem> {
        // generator = Σ_j UINV_c[j, pos] · kernel_j
        let mut acc = SparseVec::empty();
        for j in 0..k {
            if let Some(e) = uinv_c.get(j, pos) {
                acc = acc.add(ring, &kernel_vec(j).scale(ring, e));
            }
        }
        Cochain { degree: q, vec: acc }
    };

    let mut torsion_pos: Vec<usize> = Vec::new();
    for i in 0..rank_c {
        if !ring.is_unit(&snf_c.diagonal[i]) {
            torsion_pos.push(i);
        }
    }
    // invariant factors are chained, so ascending position = ascending order
    let torsion: Vec<(R::Elem, Cochain<R::Elem>)> = torsion_pos
        .iter()
        .map(|&i| (snf_c.diagonal[i].clone(), gen_cochain(i)))
        .collect();
    let free: Vec<Cochain<R::Elem>> = (rank_c..k).map(gen_cochain).collect();

    let expr = with_expr.then(|| ExprContext {
        vinv_b: vinv_b.clone(),
        rank_b,
        kernel_dim: k,
        u_c: snf_c.u.as_ref().unwrap().clone(),
        rank_c,
        diag_c: snf_c.diagonal.clone(),
        torsion_pos,
    });

    CohomologyBasis { degree: q, free, torsion, expr }
}

/// Reduced cohomology of a simplicial complex in one degree.
pub fn reduced_cohomology<R: CoeffRing>(
    ring: R,
    k: &SimplicialComplex,
    q: i32,
    with_expr: bool,
) -> CohomologyBasis<R> {
    let cx = CochainComplex::reduced(ring, k);
    cohomology_basis(&cx, q, with_expr)
}

/// Pull a cochain back along a simplicial map; degenerate image simplices
/// contribute zero, other images are read off with the sorting sign.
pub fn induced_map<R: CoeffRing>(
    ring: &R,
    f: &crate::complex::SimplicialMap,
    u: &Cochain<R::Elem>,
) -> Cochain<R::Elem> {
    let src = CochainComplex::reduced(ring.clone(), &f.source);
    let tgt = CochainComplex::reduced(ring.clone(), &f.target);
    crate::cochain::pullback(ring, &src, &tgt, |v| f.vertex_map[(v - 1) as usize] as u32, u)
}

/// Betti numbers (free ranks) and torsion orders per degree of a complex.
pub struct Cohomologies<E> {
    /// (degree, free rank, torsion orders)
    pub by_degree: Vec<(i32, usize, Vec<E>)>,
}

impl<E: Clone> Cohomologies<E> {
    pub fn rank_in(&self, degree: i32) -> usize {
        self.by_degree
            .iter()
            .find(|(d, _, _)| *d == degree)
            .map_or(0, |(_, r, _)| *r)
    }

    pub fn torsion_in(&self, degree: i32) -> Vec<E> {
        self.by_degree
            .iter()
            .find(|(d, _, _)| *d == degree)
            .map_or_else(Vec::new, |(_, _, t)| t.clone())
    }
}

/// All cohomology ranks/torsion of a cochain complex, via one SNF per degree
/// (no transforms; the cheap path used on large models).
pub fn cohomology_ranks<R: CoeffRing>(cx: &CochainComplex<R>) -> Cohomologies<R::Elem> {
    let ring = &cx.ring;
    let lo = cx.min_degree;
    let hi = cx.max_degree();
    // SNF of every delta once
    let mut rank: HashMap<i32, usize> = HashMap::new();
    let mut factors: HashMap<i32, Vec<R::Elem>> = HashMap::new();
    let results: Vec<(i32, usize, Vec<R::Elem>)> = (lo..hi)
        .map(|q| {
            let d = cx.delta_ref(q).expect("delta in range");
            let snf = smith_normal_form(ring, d, TransformFlags::NONE);
            let non_unit: Vec<R::Elem> =
                snf.diagonal.iter().filter(|x| !ring.is_unit(x)).cloned().collect();
            (q, snf.rank, non_unit)
        })
        .collect();
    for (q, r, f) in results {
        rank.insert(q, r);
        factors.insert(q, f);
    }
    let mut by_degree = Vec::new();
    for q in lo..=hi {
        let n = cx.num_cells(q);
        let r_out = rank.get(&q).copied().unwrap_or(0);
        let r_in = if q > lo { rank.get(&(q - 1)).copied().unwrap_or(0) } else { 0 };
        let betti = n - r_out - r_in;
        let tors = if q > lo { factors.get(&(q - 1)).cloned().unwrap_or_default() } else { Vec::new() };
        if betti > 0 || !tors.is_empty() {
            by_degree.push((q, betti, tors));
        }
    }
    Cohomologies { by_degree }
}

/// Express targets in the span of `gens` modulo the column space of `delta`:
/// for each target `z`, find coefficients `c` with `z - Σ c_i gens_i ∈ im δ`.
///
/// One elimination transports all riders; the remaining obstruction system is
/// small and solved exactly. Returns None for a target not in the span.
pub fn express_modulo_image<R: CoeffRing>(
    ring: &R,
    delta: &SparseMat<R::Elem>,
    gens: &[SparseVec<R::Elem>],
    targets: &[SparseVec<R::Elem>],
) -> Vec<Option<Vec<R::Elem>>> {
    if targets.is_empty() {
        return Vec::new();
    }
    let mut riders: Vec<SparseVec<R::Elem>> = gens.to_vec();
    riders.extend(targets.iter().cloned());
    let (snf, transported) = smith_with_riders(ring, delta, TransformFlags::NONE, &riders);
    let gen_t = &transported[..gens.len()];
    let tgt_t = &transported[gens.len()..];

    // Obstruction rows: for pivot rows i < rank, values matter modulo d_i;
    // for the rest, exactly. Collect the union of supports.
    let mut support: Vec<usize> = Vec::new();
    for t in transported.iter() {
        support.extend(t.iter().map(|(i, _)| *i));
    }
    support.sort_unstable();
    support.dedup();

    // Build the small system: columns = gens plus one slack column d_i·e_i per
    // torsion-pivot support row; solve gens·c + slack = target.
    let row_of: HashMap<usize, usize> =
        support.iter().enumerate().map(|(k, i)| (*i, k)).collect();
    let nrows = support.len();
    let mut cols: Vec<SparseVec<R::Elem>> = Vec::new();
    for g in gen_t {
        let entries: Vec<(usize, R::Elem)> =
            g.iter().map(|(i, e)| (row_of[i], e.clone())).collect();
        let mut entries = entries;
        entries.sort_by_key(|(i, _)| *i);
        cols.push(SparseVec::from_sorted(entries));
    }
    let mut slack_count = 0;
    for &i in &support {
        if i < snf.rank && !ring.is_zero(&snf.diagonal[i]) {
            cols.push(SparseVec::singleton(row_of[&i], snf.diagonal[i].clone()));
            slack_count += 1;
        }
    }
    let _ = slack_count;
    let ncols = cols.len();
    let mat = SparseMat::from_triplets(
        ring,
        nrows,
        ncols,
        cols.iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, e)| (*r, c, e.clone())).collect::<Vec<_>>()),
    );
    let solver = smith_normal_form(ring, &mat, TransformFlags::SOLVE);
    tgt_t
        .iter()
        .map(|t| {
            let entries: Vec<(usize, R::Elem)> = {
                let mut v: Vec<(usize, R::Elem)> =
                    t.iter().map(|(i, e)| (row_of[i], e.clone())).collect();
                v.sort_by_key(|(i, _)| *i);
                v
            };
            let b = SparseVec::from_sorted(entries);
            solver.solve(ring, &b).map(|x| {
                (0..gens.len())
                    .map(|i| x.get(i).cloned().unwrap_or_else(|| ring.zero()))
                    .collect()
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::cochain_from_cells;
    use crate::complex::{library, SimplicialComplex};
    use crate::linalg::{FpRing, Int, IntRing};

    #[test]
    fn two_points_h0() {
        let basis = reduced_cohomology(IntRing, &library::disjoint_points(2), 0, true);
        assert_eq!(basis.free_rank(), 1);
        assert!(basis.torsion.is_empty());
    }

    #[test]
    fn triangle_boundary_h1() {
        let basis = reduced_cohomology(IntRing, &library::cycle(3), 1, true);
        assert_eq!(basis.free_rank(), 1);
    }

    #[test]
    fn empty_complex_h_minus_one() {
        let k = SimplicialComplex::void_faces(2);
        let basis = reduced_cohomology(IntRing, &k, -1, false);
        assert_eq!(basis.free_rank(), 1);
    }

    #[test]
    fn projective_plane_torsion() {
        let k = library::projective_plane_six();
        let b2 = reduced_cohomology(IntRing, &k, 2, false);
        assert_eq!(b2.free_rank(), 0);
        assert_eq!(b2.torsion_orders(), vec![Int::from_i64(2)]);
        let b1 = reduced_cohomology(IntRing, &k, 1, false);
        assert_eq!(b1.free_rank(), 0);
        assert!(b1.torsion.is_empty());

        // universal coefficients over F2: ranks 1 in degrees 1 and 2
        let f2 = FpRing::new(2).unwrap();
        let b1 = reduced_cohomology(f2, &k, 1, false);
        assert_eq!(b1.free_rank(), 1);
        let b2 = reduced_cohomology(f2, &k, 2, false);
        assert_eq!(b2.free_rank(), 1);
    }

    #[test]
    fn torus_ranks() {
        let k = library::torus_seven();
        let b1 = reduced_cohomology(IntRing, &k, 1, false);
        assert_eq!(b1.free_rank(), 2);
        let b2 = reduced_cohomology(IntRing, &k, 2, false);
        assert_eq!(b2.free_rank(), 1);
        assert!(b2.torsion.is_empty());
    }

    #[test]
    fn representatives_are_cocycles() {
        let k = library::projective_plane_six();
        let cx = CochainComplex::reduced(IntRing, &k);
        for q in 0..=2 {
            let basis = cohomology_basis(&cx, q, true);
            for i in 0..basis.num_generators() {
                assert!(cx.is_cocycle(basis.generator(i)));
                // generators are nonzero in their own basis
                let coords = basis.express(&IntRing, basis.generator(i)).unwrap();
                assert!(!coords.is_zero(&IntRing));
            }
        }
    }

    #[test]
    fn expression_kills_coboundaries() {
        let k = library::cycle(4);
        let cx = CochainComplex::reduced(IntRing, &k);
        let basis = cohomology_basis(&cx, 1, true);
        let u = cochain_from_cells(&IntRing, &cx, 0, &[(&[1], 1), (&[3], -2)]);
        let db = cx.coboundary(&u);
        assert!(basis.is_zero_class(&IntRing, &db).unwrap());
    }

    #[test]
    fn euler_characteristic_consistency() {
        for k in [
            library::cycle(5),
            library::projective_plane_six(),
            library::torus_seven(),
            SimplicialComplex::simplex(4),
            library::disjoint_points(3),
        ] {
            let cx = CochainComplex::reduced(IntRing, &k);
            let ranks = cohomology_ranks(&cx);
            let chi_alg: i64 = ranks
                .by_degree
                .iter()
                .map(|(q, r, _)| if (q & 1) == 0 { *r as i64 } else { -(*r as i64) })
                .sum();
            // alternating sum over faces with the empty face at degree -1
            let chi_faces: i64 = k.reduced_euler();
            assert_eq!(chi_alg, chi_faces, "euler mismatch for {k:?}");
        }
    }

    #[test]
    fn projective_plane_cup_square_mod_two() {
        let f2 = FpRing::new(2).unwrap();
        let k = library::projective_plane_six();
        let cx = CochainComplex::reduced(f2, &k);
        let b1 = cohomology_basis(&cx, 1, false);
        let b2 = cohomology_basis(&cx, 2, true);
        assert_eq!(b1.free_rank(), 1);
        let u = b1.generator(0);
        let uu = cx.cup(u, u);
        let coords = b2.express(&f2, &uu).unwrap();
        assert_eq!(coords.free, vec![1], "u⌣u must generate H²(RP²; F₂)");
    }

    #[test]
    fn torus_cup_products() {
        let k = library::torus_seven();
        let cx = CochainComplex::reduced(IntRing, &k);
        let b1 = cohomology_basis(&cx, 1, false);
        let b2 = cohomology_basis(&cx, 2, true);
        let (u, v) = (b1.generator(0), b1.generator(1));
        let uv = cx.cup(u, v);
        let coords = b2.express(&IntRing, &uv).unwrap();
        assert!(IntRing.is_unit(&coords.free[0]), "u⌣v generates H²(T²), got {coords:?}");
        // anticommutativity in odd degree and vanishing squares, as classes
        let vu = cx.cup(v, u);
        let sum = uv.add(&IntRing, &vu);
        assert!(b2.is_zero_class(&IntRing, &sum).unwrap());
        let uu = cx.cup(u, u);
        assert!(b2.is_zero_class(&IntRing, &uu).unwrap());
    }

    #[test]
    fn induced_map_examples() {
        use crate::complex::{canonical_join_inclusion, SimplicialMap};
        // identity induces the identity
        let k = library::cycle(4);
        let cx = CochainComplex::reduced(IntRing, &k);
        let basis = cohomology_basis(&cx, 1, true);
        let id = SimplicialMap::identity(k.clone());
        let u = basis.generator(0);
        let pulled = induced_map(&IntRing, &id, u);
        assert_eq!(&pulled, u);
        // a constant map kills positive-degree classes
        let point = SimplicialComplex::simplex(1);
        let c = SimplicialMap::new(k.clone(), point, vec![1, 1, 1, 1]);
        // constant maps are simplicial only if K maps into a simplex; the
        // 4-cycle does collapse onto a point
        let c = c.unwrap();
        let cx_pt = CochainComplex::reduced(IntRing, &c.target);
        let _ = cx_pt;
        // positive-degree pullbacks vanish since the target has no 1-cells
        assert_eq!(induced_map(&IntRing, &c, u).degree, 1);
        // the join inclusion of the 5-cycle pulls the square class to zero
        let k5 = library::cycle(5);
        let j = crate::complex::IndexSet::new(&[1, 3], 5).unwrap();
        let l = crate::complex::IndexSet::new(&[2, 4], 5).unwrap();
        let f = canonical_join_inclusion(&k5, &j, &l).unwrap();
        let tgt_cx = CochainComplex::reduced(IntRing, &f.target);
        let tgt_b1 = cohomology_basis(&tgt_cx, 1, false);
        assert_eq!(tgt_b1.free_rank(), 1);
        let pulled = induced_map(&IntRing, &f, tgt_b1.generator(0));
        let src_cx = CochainComplex::reduced(IntRing, &f.source);
        let src_b1 = cohomology_basis(&src_cx, 1, true);
        assert_eq!(src_b1.num_generators(), 0);
        // the path is contractible: the pullback must be a coboundary
        assert!(src_cx.is_cocycle(&pulled));
        let delta = src_cx.delta(0);
        assert!(crate::linalg::solve_in_image(&IntRing, &delta, &pulled.vec).is_some());
    }

    #[test]
    fn quotient_of_whole_complex_is_zero() {
        let k = library::cycle(4);
        let cx = CochainComplex::relative(IntRing, &k, Some(&k));
        assert!(cx.cell_counts().iter().all(|(_, n)| *n == 0));
    }

    #[test]
    fn express_modulo_image_small() {
        // delta = [[2],[0]]: im = span{(2,0)}
        let ring = IntRing;
        let delta = SparseMat::from_triplets(&ring, 2, 1, vec![(0, 0, Int::from_i64(2))]);
        let g = SparseVec::from_sorted(vec![(1, Int::from_i64(1))]);
        // target (4, 3) = 3·g + (4,0) ∈ 3·g + im
        let t = SparseVec::from_sorted(vec![(0, Int::from_i64(4)), (1, Int::from_i64(3))]);
        let out = express_modulo_image(&ring, &delta, &[g.clone()], &[t]);
        assert_eq!(out[0].as_ref().unwrap(), &vec![Int::from_i64(3)]);
        // target (1, 0) is not expressible
        let t2 = SparseVec::from_sorted(vec![(0, Int::from_i64(1))]);
        let out2 = express_modulo_image(&ring, &delta, &[g], &[t2]);
        assert!(out2[0].is_none());
    }
}
