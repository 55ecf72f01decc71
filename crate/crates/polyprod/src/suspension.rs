//! Suspension isomorphisms, realized at cochain level.
//!
//! Two maps connect the combinatorial decomposition with the triangulated
//! smash models:
//!
//! * the flag lift: a reduced q-cocycle of the membership complex L becomes
//!   a relative (q+1)-cocycle of the edge-pair smash model of L, supported
//!   on chains ending at the top corner; such a chain is a flag of
//!   complements, and the value is read off the last-vertex images of that
//!   flag (an exact chain map, not just an equivalence up to homotopy);
//!
//! * the doubling suspension: doubling one vertex of L produces a complex
//!   homeomorphic to the suspension of L, and a Mayer–Vietoris connecting
//!   cocycle realizes the degree shift. Iterating it turns an L-cocycle into
//!   a cocycle of any vertex multiplication of L.

use crate::cochain::{Cochain, CochainComplex};
use crate::complex::SimplicialComplex;
use crate::linalg::{CoeffRing, SparseVec};
use crate::model::GridModel;

/// Sign (-1)^{q(q+1)/2} making the flag lift a chain map.
fn flag_sign(q: i32) -> i64 {
    let q = q.rem_euclid(4);
    // q(q+1)/2 mod 2 cycles with period 4: 0,1,1,0 wait: q=0:0, 1:1, 2:3, 3:6
    match q {
        0 | 3 => 1,
        _ => -1,
    }
}

/// Lift a reduced cocycle `c` of the membership complex onto the relative
/// cochain complex of the edge-pair smash model. Degree q goes to q+1.
///
/// All slots must be edge pairs (vertices {1,2}, basepoint 1). The support
/// of the lift is the set of chains ending at the all-2 corner; on such a
/// chain `t_0 < ... < t_{q+1}` the value is
/// `(-1)^{q(q+1)/2} · c(max T_1, ..., max T_{q+1})`,
/// where `T_j` is the set of slots still equal to 1 in `t_{q+1-j}`.
pub fn lift_to_smash<R: CoeffRing>(
    ring: &R,
    model: &GridModel<R>,
    link: &CochainComplex<R>,
    c: &Cochain<R::Elem>,
) -> Cochain<R::Elem> {
    assert!(model.relative, "the flag lift targets smash (relative) models");
    debug_assert!(model
        .slots
        .iter()
        .all(|s| s.x.m() == 2 && s.basepoint == 1));
    let q = c.degree;
    let d = q + 1;
    let s = model.slots.len();
    let sign = flag_sign(q);
    let mut out: Vec<(usize, R::Elem)> = Vec::new();
    'cells: for (idx, cell) in model.cx.cells_in(d).iter().enumerate() {
        let top = model.tuple(*cell.last().unwrap());
        if top.iter().any(|&v| v != 2) {
            continue;
        }
        // maxes of the complement flags, from the top of the chain downwards
        let mut verts: Vec<u32> = Vec::with_capacity(d as usize + 1);
        for j in 1..=(d as usize) {
            let t = model.tuple(cell[cell.len() - 1 - j]);
            let mut max_slot: Option<u32> = None;
            for i in (0..s).rev() {
                if t[i] == 1 {
                    max_slot = Some(i as u32 + 1);
                    break;
                }
            }
            let Some(v) = max_slot else { continue 'cells };
            if let Some(&last) = verts.last() {
                if last == v {
                    continue 'cells; // repeated last-vertex image
                }
                debug_assert!(v > last);
            }
            verts.push(v);
        }
        let Some(ci) = link.cell_index(q, &verts) else {
            continue;
        };
        let Some(val) = c.vec.get(ci) else {
            continue;
        };
        let val = if sign < 0 { ring.neg(val) } else { val.clone() };
        if !ring.is_zero(&val) {
            out.push((idx, val));
        }
    }
    Cochain { degree: d, vec: SparseVec::from_sorted(out) }
}

/// The complex with vertex `v` doubled: the copy becomes vertex `v+1`,
/// later vertices shift up. A subset is a face iff merging the two copies
/// (keeping `v` only when both copies are present) yields a face.
pub fn double_vertex(k: &SimplicialComplex, v: usize) -> SimplicialComplex {
    let m = k.m();
    assert!((1..=m).contains(&v));
    let merge = |mask: u32| -> u32 {
        let low = mask & ((1 << (v - 1)) - 1);
        let both = 1 << (v - 1) | 1 << v;
        let mid = if mask & both == both { 1 << (v - 1) } else { 0 };
        let high = (mask >> (v + 1)) << v;
        low | mid | high
    };
    let all = if m + 1 >= 32 { u32::MAX } else { (1u32 << (m + 1)) - 1 };
    let masks: Vec<u32> = (0..=all)
        .filter(|&t| t | all == all && k.has_face_mask(merge(t)))
        .collect();
    SimplicialComplex::from_face_masks(m + 1, masks)
}

/// Vertex multiplication: vertex `i` is replaced by `mult[i-1]` consecutive
/// copies (built by iterated doubling, highest vertex first).
pub fn inflate_by_doubling(k: &SimplicialComplex, mult: &[usize]) -> SimplicialComplex {
    let mut cur = k.clone();
    for i in (1..=k.m()).rev() {
        for _ in 1..mult[i - 1] {
            cur = double_vertex(&cur, i);
        }
    }
    cur
}

/// Cochain-level suspension along one doubling: a reduced q-cocycle of `k`
/// becomes a reduced (q+1)-cocycle of `double_vertex(k, v)` via the
/// Mayer–Vietoris connecting map for the two vertex stars.
pub fn doubling_suspension<R: CoeffRing>(
    ring: &R,
    k: &SimplicialComplex,
    k_cx: &CochainComplex<R>,
    v: usize,
    doubled: &SimplicialComplex,
    doubled_cx: &CochainComplex<R>,
    c: &Cochain<R::Elem>,
) -> Cochain<R::Elem> {
    let q = c.degree;
    let md = doubled.m();
    // μ: collapse the copy v+1 back onto v
    let mu = |w: u32| -> u32 {
        if w as usize <= v {
            w
        } else {
            w - 1
        }
    };
    let in_star_of_v = |mask: u32| -> bool { doubled.has_face_mask(mask | (1 << (v - 1))) };
    let in_star_of_copy = |mask: u32| -> bool { doubled.has_face_mask(mask | (1 << v)) };
    let _ = md;

    // ẽ = (μ^# c) extended by zero outside the equator, then restricted to
    // the star of v; ω = δẽ restricted to the star of v.
    // A doubled face is in the equator iff its μ-image is a face of k.
    let mut e_entries: Vec<(usize, R::Elem)> = Vec::new();
    for (idx, cell) in doubled_cx.cells_in(q).iter().enumerate() {
        let mask: u32 = cell.iter().map(|&w| 1u32 << (w - 1)).sum();
        if !in_star_of_v(mask) {
            continue; // extend by zero outside A
        }
        // μ-image: weakly monotone, so repeats are adjacent
        let mut image: Vec<u32> = Vec::with_capacity(cell.len());
        let mut degenerate = false;
        for &w in cell.iter() {
            let x = mu(w);
            if image.last() == Some(&x) {
                degenerate = true;
                break;
            }
            image.push(x);
        }
        if degenerate {
            continue;
        }
        let img_mask: u32 = image.iter().map(|&w| 1u32 << (w - 1)).sum();
        if !k.has_face_mask(img_mask) {
            continue; // outside the equator
        }
        let Some(ci) = k_cx.cell_index(q, &image) else {
            continue;
        };
        if let Some(val) = c.vec.get(ci) {
            if !ring.is_zero(val) {
                e_entries.push((idx, val.clone()));
            }
        }
    }
    let e_tilde = Cochain { degree: q, vec: SparseVec::from_sorted(e_entries) };
    let delta = doubled_cx.coboundary(&e_tilde);
    // restrict to the star of v (the MV connecting cocycle is zero on the
    // star of the copy)
    let mut out: Vec<(usize, R::Elem)> = Vec::new();
    for (idx, val) in delta.vec.iter() {
        let cell = &doubled_cx.cells_in(q + 1)[*idx];
        let mask: u32 = cell.iter().map(|&w| 1u32 << (w - 1)).sum();
        if in_star_of_v(mask) {
            out.push((*idx, val.clone()));
        } else {
            debug_assert!(in_star_of_copy(mask));
        }
    }
    Cochain { degree: q + 1, vec: SparseVec::from_sorted(out) }
}

/// Iterated doubling suspension: carry a reduced cocycle of `k` through the
/// vertex multiplication `mult`, returning the inflated complex and the
/// lifted cocycle (degree rises by Σ(mult_i - 1)).
pub fn inflate_cocycle<R: CoeffRing>(
    ring: &R,
    k: &SimplicialComplex,
    mult: &[usize],
    c: &Cochain<R::Elem>,
) -> (SimplicialComplex, Cochain<R::Elem>) {
    let mut cur_k = k.clone();
    let mut cur_cx = CochainComplex::reduced(ring.clone(), &cur_k);
    let mut cur_c = c.clone();
    for i in (1..=k.m()).rev() {
        for _ in 1..mult[i - 1] {
            let doubled = double_vertex(&cur_k, i);
            let doubled_cx = CochainComplex::reduced(ring.clone(), &doubled);
            cur_c = doubling_suspension(ring, &cur_k, &cur_cx, i, &doubled, &doubled_cx, &cur_c);
            cur_k = doubled;
            cur_cx = doubled_cx;
        }
    }
    (cur_k, cur_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{cohomology_basis, reduced_cohomology};
    use crate::complex::library;
    use crate::linalg::{Int, IntRing, SparseMat, TransformFlags};
    use crate::model::{build_grid, expand_slots};
    use crate::pairs::PairFamily;

    fn smash_model(k: &SimplicialComplex) -> GridModel<IntRing> {
        let fam = PairFamily::uniform_disk(k.m(), 1);
        let (membership, slots) = expand_slots(k, &fam).unwrap();
        assert_eq!(&membership, k);
        build_grid(IntRing, slots, membership, true, 10_000_000).unwrap()
    }

    /// δ ∘ lift = lift ∘ δ as matrices, for every degree.
    fn assert_lift_chain_map(k: &SimplicialComplex) {
        let ring = IntRing;
        let model = smash_model(k);
        let link = CochainComplex::reduced(ring, k);
        for q in -1..=k.dim() {
            let n = link.num_cells(q);
            for i in 0..n {
                let basis_cochain = Cochain {
                    degree: q,
                    vec: crate::linalg::SparseVec::singleton(i, Int::ONE),
                };
                let lifted = lift_to_smash(&ring, &model, &link, &basis_cochain);
                let lhs = model.cx.coboundary(&lifted);
                let rhs = lift_to_smash(&ring, &model, &link, &link.coboundary(&basis_cochain));
                assert_eq!(lhs, rhs, "chain map fails for {k:?} at degree {q}, cell {i}");
            }
        }
    }

    #[test]
    fn lift_is_chain_map() {
        assert_lift_chain_map(&library::disjoint_points(2));
        assert_lift_chain_map(&library::disjoint_points(3));
        assert_lift_chain_map(&library::cycle(4));
        assert_lift_chain_map(&library::cycle(5));
        assert_lift_chain_map(&SimplicialComplex::simplex(3));
        assert_lift_chain_map(&crate::complex::parse_complex("m=4; facets={1,2},{3}").unwrap());
        assert_lift_chain_map(&crate::complex::parse_complex("m=4; facets={1,2,3},{2,3,4}").unwrap());
        assert_lift_chain_map(&SimplicialComplex::void_faces(2));
    }

    #[test]
    fn lift_is_iso_on_cohomology() {
        // the lifted basis must generate the smash cohomology exactly
        for k in [
            library::disjoint_points(2),
            library::cycle(4),
            library::cycle(5),
            crate::complex::parse_complex("m=4; facets={1,2},{3},{4}").unwrap(),
        ] {
            let ring = IntRing;
            let model = smash_model(&k);
            let link = CochainComplex::reduced(ring, &k);
            for q in -1..=k.dim() {
                let link_basis = cohomology_basis(&link, q, false);
                let smash_basis = cohomology_basis(&model.cx, q + 1, true);
                assert_eq!(link_basis.free_rank(), smash_basis.free_rank(), "{k:?} q={q}");
                assert_eq!(
                    link_basis.torsion_orders(),
                    smash_basis.torsion_orders(),
                    "{k:?} q={q}"
                );
                let n = link_basis.num_generators();
                if n == 0 {
                    continue;
                }
                // expression matrix of lifted generators must be invertible:
                // for free parts over ℤ its determinant is ±1
                let exprs: Vec<Vec<Int>> = (0..n)
                    .map(|i| {
                        let lifted = lift_to_smash(&ring, &model, &link, link_basis.generator(i));
                        assert!(model.cx.is_cocycle(&lifted));
                        let coords = smash_basis.express(&ring, &lifted).unwrap();
                        coords.free.into_iter().chain(coords.torsion).collect()
                    })
                    .collect();
                let mat = SparseMat::from_triplets(
                    &ring,
                    n,
                    n,
                    exprs.iter().enumerate().flat_map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(move |(j, v)| (i, j, v.clone()))
                            .collect::<Vec<_>>()
                    }),
                );
                let snf = crate::linalg::smith_normal_form(&ring, &mat, TransformFlags::NONE);
                assert_eq!(snf.rank, n, "lift not injective for {k:?} q={q}");
                // all invariant factors units modulo the torsion orders
                for (i, d) in snf.diagonal.iter().enumerate() {
                    if i < link_basis.free_rank() {
                        assert!(ring.is_unit(d), "lift not surjective for {k:?} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn double_two_points_is_triangle_boundary() {
        let k = library::disjoint_points(2);
        let d = double_vertex(&k, 1);
        assert_eq!(d, library::cycle(3));
        let d2 = double_vertex(&k, 2);
        assert_eq!(d2, library::cycle(3).relabel(&[2, 1, 3]).relabel(&[1, 2, 3]));
    }

    #[test]
    fn doubling_preserves_cohomology_shifted() {
        for k in [
            library::disjoint_points(2),
            library::cycle(4),
            library::projective_plane_six(),
        ] {
            for v in 1..=k.m().min(3) {
                let d = double_vertex(&k, v);
                for q in -1..=k.dim() {
                    let a = reduced_cohomology(IntRing, &k, q, false);
                    let b = reduced_cohomology(IntRing, &d, q + 1, false);
                    assert_eq!(a.free_rank(), b.free_rank(), "{k:?} v={v} q={q}");
                    assert_eq!(a.torsion_orders(), b.torsion_orders(), "{k:?} v={v} q={q}");
                }
            }
        }
    }

    #[test]
    fn doubling_suspension_sends_generator_to_generator() {
        let ring = IntRing;
        let k = library::disjoint_points(2);
        let k_cx = CochainComplex::reduced(ring, &k);
        let basis = cohomology_basis(&k_cx, 0, false);
        let d = double_vertex(&k, 1);
        let d_cx = CochainComplex::reduced(ring, &d);
        let lifted = doubling_suspension(&ring, &k, &k_cx, 1, &d, &d_cx, basis.generator(0));
        assert!(d_cx.is_cocycle(&lifted));
        let d_basis = cohomology_basis(&d_cx, 1, true);
        let coords = d_basis.express(&ring, &lifted).unwrap();
        assert_eq!(coords.free.len(), 1);
        assert!(ring.is_unit(&coords.free[0]), "lift of a generator must generate, got {coords:?}");
    }

    #[test]
    fn doubling_suspension_keeps_torsion() {
        let ring = IntRing;
        let k = library::projective_plane_six();
        let k_cx = CochainComplex::reduced(ring, &k);
        let basis = cohomology_basis(&k_cx, 2, false);
        assert_eq!(basis.torsion.len(), 1);
        let d = double_vertex(&k, 3);
        let d_cx = CochainComplex::reduced(ring, &d);
        let lifted =
            doubling_suspension(&ring, &k, &k_cx, 3, &d, &d_cx, &basis.torsion[0].1);
        assert!(d_cx.is_cocycle(&lifted));
        let d_basis = cohomology_basis(&d_cx, 3, true);
        let coords = d_basis.express(&ring, &lifted).unwrap();
        assert_eq!(coords.torsion.len(), 1);
        assert_eq!(coords.torsion[0], Int::from_i64(1));
    }

    #[test]
    fn iterated_inflation_matches_bulk_inflation() {
        let k = library::cycle(4);
        let mult = [2usize, 1, 3, 2];
        let by_doubling = inflate_by_doubling(&k, &mult);
        let direct = k.inflate(&mult);
        assert_eq!(by_doubling, direct);
    }

    #[test]
    fn inflate_cocycle_reaches_generator() {
        let ring = IntRing;
        // 5-cycle: H̃¹ generator, inflated by 2 everywhere: degree 1+5 = 6
        let k = library::cycle(5);
        let basis = reduced_cohomology(ring, &k, 1, false);
        let (big, lifted) = inflate_cocycle(&ring, &k, &[2, 2, 2, 2, 2], basis.generator(0));
        assert_eq!(big, k.inflate(&[2, 2, 2, 2, 2]));
        let big_cx = CochainComplex::reduced(ring, &big);
        assert_eq!(lifted.degree, 6);
        assert!(big_cx.is_cocycle(&lifted));
        let big_basis = cohomology_basis(&big_cx, 6, true);
        let coords = big_basis.express(&ring, &lifted).unwrap();
        assert_eq!(coords.free.len(), 1);
        assert!(ring.is_unit(&coords.free[0]));
    }
}
