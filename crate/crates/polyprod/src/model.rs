//! Triangulated models of polyhedral products.
//!
//! The ambient product of factor complexes carries its staircase
//! triangulation: vertices are tuples of factor vertices, simplices are
//! chains in the componentwise partial order whose per-factor projections
//! are faces. A chain lies in the polyhedral product when the set of slots
//! whose projection leaves the subcomplex `A_i` is a face of the membership
//! complex. Coordinate projections and diagonals are simplicial for this
//! triangulation, which is what makes the cochain-level maps below exact.

use std::sync::Arc;

use crate::cochain::{Cochain, CochainComplex};
use crate::complex::{IndexSet, SimplicialComplex};
use crate::error::BudgetError;
use crate::linalg::{CoeffRing, SparseVec};
use crate::pairs::{PairDescriptor, PairFamily};

/// One slot of the ambient product: a pair `(X, A)` with a basepoint.
#[derive(Clone, Debug)]
pub struct Slot {
    pub x: SimplicialComplex,
    pub a: SimplicialComplex,
    /// 1-based vertex of `a`.
    pub basepoint: usize,
    /// Original complex vertex this slot models (1-based); disk pairs of
    /// dimension n occupy n consecutive slots of the same vertex.
    pub vertex: usize,
}

/// The edge pair `(D¹, S⁰)`: an edge on vertices {1, 2}, its endpoints, and
/// basepoint 1.
pub fn edge_slot(vertex: usize) -> Slot {
    Slot {
        x: SimplicialComplex::simplex(2),
        a: crate::complex::library::disjoint_points(2),
        basepoint: 1,
        vertex,
    }
}

/// Expand a pair family into slots plus the membership complex on slots.
/// A disk of dimension n becomes n edge slots (the cube model); the
/// membership complex is the corresponding inflation of `k`.
pub fn expand_slots(
    k: &SimplicialComplex,
    family: &PairFamily,
) -> Result<(SimplicialComplex, Vec<Slot>), crate::error::InputError> {
    let family = family.normalized()?;
    family.validate(k.m())?;
    if !family.is_simplicial() {
        return Err(crate::error::InputError::PairFamily(
            "cone pairs have no simplicial model".into(),
        ));
    }
    let mut mult = Vec::with_capacity(k.m());
    let mut slots = Vec::new();
    for (i, d) in family.per_vertex.iter().enumerate() {
        match d {
            PairDescriptor::DiskSphere(n) => {
                mult.push(*n as usize);
                for _ in 0..*n {
                    slots.push(edge_slot(i + 1));
                }
            }
            PairDescriptor::SimplicialPair { x, a, basepoint } => {
                mult.push(1);
                slots.push(Slot { x: x.clone(), a: a.clone(), basepoint: *basepoint, vertex: i + 1 });
            }
            PairDescriptor::Cone(_) => unreachable!(),
        }
    }
    let membership = k.inflate(&mult);
    Ok((membership, slots))
}

/// Slot positions modelling the vertices of `index` (ambient 1-based slots).
pub fn slots_of_index(slots: &[Slot], index: &IndexSet) -> Vec<usize> {
    slots
        .iter()
        .enumerate()
        .filter(|(_, s)| index.contains(s.vertex))
        .map(|(p, _)| p)
        .collect()
}

/// A staircase model of a polyhedral product (or of a smash quotient, when
/// built relative to the fat wedge).
pub struct GridModel<R: CoeffRing> {
    pub slots: Vec<Slot>,
    pub membership: SimplicialComplex,
    /// Quotient by the fat wedge: cells with some coordinate at the basepoint
    /// are excluded from the cochain basis.
    pub relative: bool,
    /// Grid vertices in lexicographic order; entries are 1-based factor
    /// vertices.
    pub tuples: Vec<Box<[u8]>>,
    pub cx: CochainComplex<R>,
}

impl<R: CoeffRing> GridModel<R> {
    /// Locate a tuple's vertex id.
    pub fn tuple_id(&self, t: &[u8]) -> Option<u32> {
        self.tuples
            .binary_search_by(|probe| probe.as_ref().cmp(t))
            .ok()
            .map(|i| i as u32)
    }

    pub fn tuple(&self, id: u32) -> &[u8] {
        &self.tuples[id as usize]
    }

    pub fn num_cells(&self) -> usize {
        self.cx.cells.iter().map(|c| c.len()).sum()
    }

    /// Vertex map that forgets all slots outside `positions` (which must be
    /// sorted). Returns None when the restricted tuple is not a vertex of
    /// `target` (cannot happen between compatible models).
    pub fn restrict_tuple(&self, id: u32, positions: &[usize]) -> Vec<u8> {
        let t = self.tuple(id);
        positions.iter().map(|&p| t[p]).collect()
    }
}

/// Build the staircase model of `Z(K_I; (X,A)_I)` over the given slots.
///
/// `positions` selects the slots (ascending); `membership` must be the full
/// subcomplex of the inflated complex on those slots, re-indexed. `relative`
/// marks the smash quotient (cochains vanishing on the fat wedge).
pub fn build_grid<R: CoeffRing>(
    ring: R,
    slots: Vec<Slot>,
    membership: SimplicialComplex,
    relative: bool,
    budget: usize,
) -> Result<GridModel<R>, BudgetError> {
    let s = slots.len();
    assert_eq!(membership.m(), s);
    // enumerate grid vertices in lex order
    let mut tuples: Vec<Box<[u8]>> = Vec::new();
    let mut cur: Vec<u8> = vec![1; s];
    'outer: loop {
        // membership of the singleton chain
        let mut f_mask = 0u32;
        let mut ok = true;
        for (i, slot) in slots.iter().enumerate() {
            let vmask = 1u32 << (cur[i] as usize - 1);
            if !slot.x.has_face_mask(vmask) {
                ok = false;
                break;
            }
            if !slot.a.has_face_mask(vmask) {
                f_mask |= 1 << i;
            }
        }
        if ok && membership.has_face_mask(f_mask) {
            tuples.push(cur.clone().into_boxed_slice());
        }
        // odometer (last slot fastest so tuples come out lex sorted)
        for i in (0..s).rev() {
            if (cur[i] as usize) < slots[i].x.m() {
                cur[i] += 1;
                continue 'outer;
            }
            cur[i] = 1;
        }
        break;
    }

    // strict product-order up-sets
    let n = tuples.len();
    let geq = |a: &[u8], b: &[u8]| a.iter().zip(b.iter()).all(|(x, y)| x >= y);
    let mut upset: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            // lex order refines the product order, so only j > i can dominate i
            if geq(&tuples[j], &tuples[i]) {
                upset[i].push(j as u32);
            }
        }
    }

    // DFS over chains
    struct Dfs<'a> {
        slots: &'a [Slot],
        membership: &'a SimplicialComplex,
        tuples: &'a [Box<[u8]>],
        upset: &'a [Vec<u32>],
        budget: usize,
        count: usize,
        /// cells by dimension
        cells: Vec<Vec<Box<[u32]>>>,
        chain: Vec<u32>,
        proj: Vec<u32>,
        exceeded: bool,
    }

    impl<'a> Dfs<'a> {
        fn record(&mut self) -> bool {
            self.count += 1;
            if self.count > self.budget {
                self.exceeded = true;
                return false;
            }
            let d = self.chain.len() - 1;
            if self.cells.len() <= d {
                self.cells.resize_with(d + 1, Vec::new);
            }
            self.cells[d].push(self.chain.clone().into_boxed_slice());
            true
        }

        fn extend(&mut self) -> bool {
            let top = *self.chain.last().unwrap() as usize;
            let candidates: &[u32] = &self.upset[top];
            for &cand in candidates {
                let t = &self.tuples[cand as usize];
                // update projections, check faces
                let mut new_proj = self.proj.clone();
                let mut ok = true;
                let mut f_mask = 0u32;
                for (i, slot) in self.slots.iter().enumerate() {
                    new_proj[i] |= 1u32 << (t[i] as usize - 1);
                    if new_proj[i] != self.proj[i] && !slot.x.has_face_mask(new_proj[i]) {
                        ok = false;
                        break;
                    }
                    if !slot.a.has_face_mask(new_proj[i]) {
                        f_mask |= 1 << i;
                    }
                }
                if !ok || !self.membership.has_face_mask(f_mask) {
                    continue;
                }
                self.chain.push(cand);
                let saved = std::mem::replace(&mut self.proj, new_proj);
                if !self.record() || !self.extend() {
                    return false;
                }
                self.proj = saved;
                self.chain.pop();
            }
            true
        }
    }

    let mut dfs = Dfs {
        slots: &slots,
        membership: &membership,
        tuples: &tuples,
        upset: &upset,
        budget,
        count: 0,
        cells: Vec::new(),
        chain: Vec::new(),
        proj: vec![0; s],
        exceeded: false,
    };
    for start in 0..n as u32 {
        dfs.chain.clear();
        dfs.chain.push(start);
        let t = &tuples[start as usize];
        for i in 0..s {
            dfs.proj[i] = 1u32 << (t[i] as usize - 1);
        }
        if !dfs.record() || !dfs.extend() {
            break;
        }
    }
    if dfs.exceeded {
        return Err(BudgetError { budget, context: format!("staircase model on {s} slots") });
    }
    let mut cells = dfs.cells;
    for list in &mut cells {
        list.sort();
    }

    // fat wedge filter for smash models
    if relative {
        let in_fat_wedge = |cell: &[u32]| -> bool {
            for (i, slot) in slots.iter().enumerate() {
                let bp = slot.basepoint as u8;
                if cell.iter().all(|&id| tuples[id as usize][i] == bp) {
                    return true;
                }
            }
            false
        };
        for list in &mut cells {
            list.retain(|cell| !in_fat_wedge(cell));
        }
    }

    let cx = CochainComplex::from_cells(ring, 0, cells);
    Ok(GridModel { slots, membership, relative, tuples, cx })
}

/// Shared handle to a smash model together with its slot positions in the
/// ambient model.
pub struct SmashModel<R: CoeffRing> {
    pub index: IndexSet,
    pub positions: Vec<usize>,
    pub model: Arc<GridModel<R>>,
}

/// Pull a cochain on the smash model of `I` back along the coordinate
/// projection of a larger model (the total model or a bigger smash model).
pub fn projection_pullback<R: CoeffRing>(
    ring: &R,
    ambient: &GridModel<R>,
    positions: &[usize],
    smash: &GridModel<R>,
    u: &Cochain<R::Elem>,
) -> Cochain<R::Elem> {
    let q = u.degree;
    let mut out: Vec<(usize, R::Elem)> = Vec::new();
    'cells: for (idx, cell) in ambient.cx.cells_in(q).iter().enumerate() {
        // image chain under slot restriction; adjacent repeats degenerate
        let mut image: Vec<u32> = Vec::with_capacity(cell.len());
        let mut prev: Option<Vec<u8>> = None;
        for &id in cell.iter() {
            let t = ambient.restrict_tuple(id, positions);
            if let Some(p) = &prev {
                if p == &t {
                    continue 'cells; // degenerate
                }
            }
            let Some(tid) = smash.tuple_id(&t) else {
                continue 'cells;
            };
            image.push(tid);
            prev = Some(t);
        }
        // weakly monotone projection of a chain: already ascending, no sign
        let Some(ci) = smash.cx.cell_index(q, &image) else {
            continue;
        };
        if let Some(val) = u.vec.get(ci) {
            if !ring.is_zero(val) {
                out.push((idx, val.clone()));
            }
        }
    }
    Cochain { degree: q, vec: SparseVec::from_sorted(out) }
}

/// Evaluate the cup product of the pullbacks of `u` (on the smash model of
/// `J`) and `v` (on the smash model of `L`) as a cochain on `ambient`.
/// Front faces read the `J` coordinates, back faces the `L` coordinates;
/// repeated coordinates degenerate to zero. For `ambient` the total model
/// this is the right side of the projection-diagonal identity; for `ambient`
/// the smash model of `J ∪ L` it is the star product itself.
pub fn cup_of_pullbacks<R: CoeffRing>(
    ring: &R,
    ambient: &GridModel<R>,
    j_positions: &[usize],
    u_model: &GridModel<R>,
    u: &Cochain<R::Elem>,
    l_positions: &[usize],
    v_model: &GridModel<R>,
    v: &Cochain<R::Elem>,
) -> Cochain<R::Elem> {
    let (p, q) = (u.degree, v.degree);
    debug_assert!(p >= 0 && q >= 0);
    let target = p + q;
    let mut out: Vec<(usize, R::Elem)> = Vec::new();
    for (idx, cell) in ambient.cx.cells_in(target).iter().enumerate() {
        let front = &cell[..=(p as usize)];
        let back = &cell[(p as usize)..];
        let Some(a) = eval_restricted(ring, ambient, j_positions, u_model, u, front) else {
            continue;
        };
        if ring.is_zero(&a) {
            continue;
        }
        let Some(b) = eval_restricted(ring, ambient, l_positions, v_model, v, back) else {
            continue;
        };
        let prod = ring.mul(&a, &b);
        if !ring.is_zero(&prod) {
            out.push((idx, prod));
        }
    }
    Cochain { degree: target, vec: SparseVec::from_sorted(out) }
}

/// Value of `u` on the restriction of `cell` to the given slot positions:
/// None/zero when degenerate or outside the basis.
fn eval_restricted<R: CoeffRing>(
    ring: &R,
    ambient: &GridModel<R>,
    positions: &[usize],
    model: &GridModel<R>,
    u: &Cochain<R::Elem>,
    cell: &[u32],
) -> Option<R::Elem> {
    let mut image: Vec<u32> = Vec::with_capacity(cell.len());
    let mut prev: Option<Vec<u8>> = None;
    for &id in cell {
        let t = ambient.restrict_tuple(id, positions);
        if let Some(p) = &prev {
            if p == &t {
                return None; // degenerate
            }
        }
        let tid = model.tuple_id(&t)?;
        image.push(tid);
        prev = Some(t);
    }
    let ci = model.cx.cell_index(u.degree, &image)?;
    Some(u.vec.get(ci).cloned().unwrap_or_else(|| ring.zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::cohomology_ranks;
    use crate::complex::library;
    use crate::linalg::IntRing;
    use crate::pairs::PairFamily;

    fn model_of(
        k: &SimplicialComplex,
        fam: &PairFamily,
        relative: bool,
    ) -> GridModel<IntRing> {
        let (membership, slots) = expand_slots(k, fam).unwrap();
        build_grid(IntRing, slots, membership, relative, 10_000_000).unwrap()
    }

    #[test]
    fn square_from_full_simplex() {
        // K = full simplex on 2 vertices, (D¹,S⁰): the square, staircase
        // triangulated: 4 vertices, 5 edges, 2 triangles.
        let k = SimplicialComplex::simplex(2);
        let m = model_of(&k, &PairFamily::uniform_disk(2, 1), false);
        assert_eq!(m.tuples.len(), 4);
        assert_eq!(m.cx.num_cells(0), 4);
        assert_eq!(m.cx.num_cells(1), 5);
        assert_eq!(m.cx.num_cells(2), 2);
    }

    #[test]
    fn circle_from_two_points() {
        // K = two points, (D¹,S⁰): the boundary of the square.
        let k = library::disjoint_points(2);
        let m = model_of(&k, &PairFamily::uniform_disk(2, 1), false);
        assert_eq!(m.cx.num_cells(0), 4);
        assert_eq!(m.cx.num_cells(1), 4);
        assert_eq!(m.cx.num_cells(2), 0);
        let ranks = cohomology_ranks(&m.cx);
        assert_eq!(ranks.rank_in(0), 1);
        assert_eq!(ranks.rank_in(1), 1);
    }

    #[test]
    fn three_sphere_from_two_points_disk2() {
        // K = two points, (D²,S¹): S³ = ∂(D²×D²).
        let k = library::disjoint_points(2);
        let m = model_of(&k, &PairFamily::uniform_disk(2, 2), false);
        let ranks = cohomology_ranks(&m.cx);
        assert_eq!(ranks.rank_in(0), 1);
        assert_eq!(ranks.rank_in(1), 0);
        assert_eq!(ranks.rank_in(2), 0);
        assert_eq!(ranks.rank_in(3), 1);
        assert!(ranks.torsion_in(3).is_empty());
    }

    #[test]
    fn smash_of_two_points_is_circle() {
        // K = two points, (D¹,S⁰), I = {1,2}: the smash quotient of the
        // square boundary by the two fat-wedge edges is Σ(S⁰) = S¹.
        let k = library::disjoint_points(2);
        let m = model_of(&k, &PairFamily::uniform_disk(2, 1), true);
        let ranks = cohomology_ranks(&m.cx);
        assert_eq!(ranks.rank_in(0), 0);
        assert_eq!(ranks.rank_in(1), 1);
        assert_eq!(ranks.rank_in(2), 0);
    }

    #[test]
    fn smash_of_two_points_disk2_is_three_sphere() {
        // Same complex with (D²,S¹): Σ³(S⁰) = S³.
        let k = library::disjoint_points(2);
        let m = model_of(&k, &PairFamily::uniform_disk(2, 2), true);
        let ranks = cohomology_ranks(&m.cx);
        assert_eq!(ranks.rank_in(1), 0);
        assert_eq!(ranks.rank_in(2), 0);
        assert_eq!(ranks.rank_in(3), 1);
    }

    #[test]
    fn torus_from_square_boundary() {
        // K = ∂(square), (D¹,S⁰): the real moment-angle complex of the
        // 4-cycle is the torus.
        let k = library::cycle(4);
        let m = model_of(&k, &PairFamily::uniform_disk(4, 1), false);
        let ranks = cohomology_ranks(&m.cx);
        assert_eq!(ranks.rank_in(0), 1);
        assert_eq!(ranks.rank_in(1), 2);
        assert_eq!(ranks.rank_in(2), 1);
    }

    #[test]
    fn staircase_top_count_is_multinomial() {
        // product of a 2-simplex and a 1-simplex: 3!/2! = 3 top cells
        let k = SimplicialComplex::simplex(2);
        let x = SimplicialComplex::simplex(3);
        let a = x.clone();
        let edge = SimplicialComplex::simplex(2);
        let fam = PairFamily {
            per_vertex: vec![
                PairDescriptor::SimplicialPair { x, a: a.clone(), basepoint: 1 },
                PairDescriptor::SimplicialPair { x: edge.clone(), a: edge, basepoint: 1 },
            ],
            suspension: vec![0, 0],
        };
        let m = model_of(&k, &fam, false);
        assert_eq!(m.cx.num_cells(3), 3);
        // and a square times an edge: 4!/(2!·2!)·... the full (D¹)³ cube: 3! = 6
        let k3 = SimplicialComplex::simplex(3);
        let m3 = model_of(&k3, &PairFamily::uniform_disk(3, 1), false);
        assert_eq!(m3.cx.num_cells(3), 6);
    }

    #[test]
    fn budget_is_enforced() {
        let k = SimplicialComplex::simplex(3);
        let (membership, slots) = expand_slots(&k, &PairFamily::uniform_disk(3, 1)).unwrap();
        let res = build_grid::<IntRing>(IntRing, slots, membership, false, 10);
        assert!(res.is_err());
    }

    #[test]
    fn empty_slot_model_is_a_point() {
        let k = SimplicialComplex::void_faces(0);
        let m = model_of(&k, &PairFamily { per_vertex: vec![], suspension: vec![] }, true);
        assert_eq!(m.cx.num_cells(0), 1);
    }
}
