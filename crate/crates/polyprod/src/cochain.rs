//! Cochain complexes over an ordered cell basis.
//!
//! Cells in degree q are (q+1)-element sorted vertex lists (the empty list is
//! the single (-1)-cell of an augmented complex). The coboundary, the
//! front/back-face cup product, and pullbacks along vertex maps all read
//! orientations off the ambient vertex order.

use std::collections::HashMap;

use crate::complex::SimplicialComplex;
use crate::linalg::{CoeffRing, SparseMat, SparseVec};

pub type Cell = Box<[u32]>;

/// A cochain: coefficients over the degree-q cell basis of some complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain<E> {
    pub degree: i32,
    pub vec: SparseVec<E>,
}

impl<E: Clone + PartialEq> Cochain<E> {
    pub fn zero(degree: i32) -> Self {
        Cochain { degree, vec: SparseVec::empty() }
    }

    pub fn is_zero(&self) -> bool {
        self.vec.is_empty()
    }

    pub fn add<R: CoeffRing<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        Cochain { degree: self.degree, vec: self.vec.add(ring, &other.vec) }
    }

    pub fn scale<R: CoeffRing<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        Cochain { degree: self.degree, vec: self.vec.scale(ring, c) }
    }
}

/// A cochain complex with explicit, lexicographically sorted cell bases.
pub struct CochainComplex<R: CoeffRing> {
    pub ring: R,
    /// Lowest degree carrying a cell basis (-1 for augmented complexes).
    pub min_degree: i32,
    /// cells[i] = sorted cell list in degree min_degree + i.
    pub cells: Vec<Vec<Cell>>,
    /// deltas[i]: C^{min_degree+i} -> C^{min_degree+i+1}; one per degree below the top.
    pub deltas: Vec<SparseMat<R::Elem>>,
}

impl<R: CoeffRing> CochainComplex<R> {
    /// Build from per-degree cell lists. Cells must be sorted vertex lists;
    /// each degree's list must be lexicographically sorted and duplicate-free.
    /// Faces absent from the basis contribute zero to the coboundary, which
    /// is exactly the relative (quotient) cochain complex for a subcomplex.
    pub fn from_cells(ring: R, min_degree: i32, cells: Vec<Vec<Cell>>) -> Self {
        debug_assert!(cells
            .iter()
            .all(|list| list.windows(2).all(|w| w[0] < w[1])));
        let mut deltas = Vec::new();
        for i in 0..cells.len().saturating_sub(1) {
            let lower = &cells[i];
            let upper = &cells[i + 1];
            let mut triplets: Vec<(usize, usize, R::Elem)> = Vec::new();
            for (r, cell) in upper.iter().enumerate() {
                let mut face: Vec<u32> = Vec::with_capacity(cell.len().saturating_sub(1));
                for j in 0..cell.len() {
                    face.clear();
                    face.extend_from_slice(&cell[..j]);
                    face.extend_from_slice(&cell[j + 1..]);
                    if let Ok(c) = lower.binary_search_by(|probe| probe.as_ref().cmp(&face[..])) {
                        let sign = if j % 2 == 0 { 1 } else { -1 };
                        triplets.push((r, c, ring.from_i64(sign)));
                    }
                }
            }
            deltas.push(SparseMat::from_triplets(
                &ring,
                upper.len(),
                lower.len(),
                triplets,
            ));
        }
        let cx = CochainComplex { ring, min_degree, cells, deltas };
        debug_assert!(cx.check_dd_zero());
        cx
    }

    /// The augmented (reduced) simplicial cochain complex of `k`.
    pub fn reduced(ring: R, k: &SimplicialComplex) -> Self {
        let top = k.dim();
        let mut cells: Vec<Vec<Cell>> = Vec::new();
        for q in -1..=top {
            let mut list: Vec<Cell> = k
                .faces_of_card((q + 1) as usize)
                .iter()
                .map(|f| f.members().iter().map(|&v| v as u32).collect())
                .collect();
            list.sort();
            cells.push(list);
        }
        if cells.is_empty() {
            cells.push(vec![Vec::new().into_boxed_slice()]);
        }
        Self::from_cells(ring, -1, cells)
    }

    /// Relative cochain complex of the pair `(k, a)`: cochains vanishing on
    /// faces of `a`. `a = None` means relative to nothing, i.e. the full
    /// augmented complex (reduced cohomology of `k`). With `a` present the
    /// empty face belongs to `a`, so the complex is unaugmented.
    pub fn relative(ring: R, k: &SimplicialComplex, a: Option<&SimplicialComplex>) -> Self {
        match a {
            None => Self::reduced(ring, k),
            Some(sub) => {
                let top = k.dim();
                let mut cells: Vec<Vec<Cell>> = Vec::new();
                for q in 0..=top.max(0) {
                    let mut list: Vec<Cell> = k
                        .faces_of_card((q + 1) as usize)
                        .iter()
                        .filter(|f| !sub.has_face_mask(f.mask()))
                        .map(|f| f.members().iter().map(|&v| v as u32).collect())
                        .collect();
                    list.sort();
                    cells.push(list);
                }
                Self::from_cells(ring, 0, cells)
            }
        }
    }

    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.cells.len() as i32 - 1
    }

    fn idx(&self, q: i32) -> Option<usize> {
        if q < self.min_degree || q > self.max_degree() {
            None
        } else {
            Some((q - self.min_degree) as usize)
        }
    }

    pub fn num_cells(&self, q: i32) -> usize {
        self.idx(q).map_or(0, |i| self.cells[i].len())
    }

    pub fn cells_in(&self, q: i32) -> &[Cell] {
        self.idx(q).map_or(&[], |i| &self.cells[i])
    }

    pub fn cell_index(&self, q: i32, cell: &[u32]) -> Option<usize> {
        let i = self.idx(q)?;
        self.cells[i]
            .binary_search_by(|probe| probe.as_ref().cmp(cell))
            .ok()
    }

    /// δ_q: C^q -> C^{q+1}. Degrees outside the support give empty matrices.
    pub fn delta(&self, q: i32) -> SparseMat<R::Elem> {
        match self.idx(q) {
            Some(i) if i < self.deltas.len() => self.deltas[i].clone(),
            _ => SparseMat::zero(self.num_cells(q + 1), self.num_cells(q)),
        }
    }

    pub fn delta_ref(&self, q: i32) -> Option<&SparseMat<R::Elem>> {
        let i = self.idx(q)?;
        self.deltas.get(i)
    }

    pub fn coboundary(&self, u: &Cochain<R::Elem>) -> Cochain<R::Elem> {
        let d = self.delta(u.degree);
        Cochain { degree: u.degree + 1, vec: d.apply(&self.ring, &u.vec) }
    }

    pub fn is_cocycle(&self, u: &Cochain<R::Elem>) -> bool {
        self.coboundary(u).is_zero()
    }

    fn check_dd_zero(&self) -> bool {
        for i in 0..self.deltas.len().saturating_sub(1) {
            let prod = self.deltas[i + 1].matmul(&self.ring, &self.deltas[i]);
            if prod.nnz() != 0 {
                return false;
            }
        }
        true
    }

    /// Number of cells of each degree as (degree, count), ascending.
    pub fn cell_counts(&self) -> Vec<(i32, usize)> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| (self.min_degree + i as i32, c.len()))
            .collect()
    }

    /// Front-face/back-face cup product: for sorted `v_0 < ... < v_{p+q}`,
    /// `(u ⌣ v)(v_0..v_{p+q}) = u(v_0..v_p) · v(v_p..v_{p+q})`.
    pub fn cup(&self, u: &Cochain<R::Elem>, v: &Cochain<R::Elem>) -> Cochain<R::Elem> {
        let ring = &self.ring;
        let (p, q) = (u.degree, v.degree);
        let target = p + q;
        if p < 0 || q < 0 {
            // products with the augmentation degree are not formed here
            return Cochain::zero(target);
        }
        let Some(ti) = self.idx(target) else {
            return Cochain::zero(target);
        };
        let mut out: Vec<(usize, R::Elem)> = Vec::new();
        for (idx, cell) in self.cells[ti].iter().enumerate() {
            let front = &cell[..=(p as usize)];
            let back = &cell[(p as usize)..];
            let Some(fi) = self.cell_index(p, front) else {
                continue;
            };
            let Some(bi) = self.cell_index(q, back) else {
                continue;
            };
            let (Some(a), Some(b)) = (u.vec.get(fi), v.vec.get(bi)) else {
                continue;
            };
            let prod = ring.mul(a, b);
            if !ring.is_zero(&prod) {
                out.push((idx, prod));
            }
        }
        Cochain { degree: target, vec: SparseVec::from_sorted(out) }
    }
}

/// Pull a cochain on `target` back along a vertex map into `source`.
///
/// Each source cell's image list is taken in the source's vertex order;
/// repeated images kill the term, otherwise the value on the sorted image
/// cell is taken with the sign of the sorting permutation. Image cells
/// absent from the target basis (collapsed cells of a relative complex)
/// contribute zero.
pub fn pullback<R: CoeffRing>(
    ring: &R,
    source: &CochainComplex<R>,
    target: &CochainComplex<R>,
    vertex_map: impl Fn(u32) -> u32,
    u: &Cochain<R::Elem>,
) -> Cochain<R::Elem> {
    let q = u.degree;
    let mut out: Vec<(usize, R::Elem)> = Vec::new();
    for (idx, cell) in source.cells_in(q).iter().enumerate() {
        let image: Vec<u32> = cell.iter().map(|&v| vertex_map(v)).collect();
        let Some((sorted, sign)) = sort_with_sign(&image) else {
            continue;
        };
        let Some(ti) = target.cell_index(q, &sorted) else {
            continue;
        };
        let Some(val) = u.vec.get(ti) else {
            continue;
        };
        let val = if sign < 0 { ring.neg(val) } else { val.clone() };
        if !ring.is_zero(&val) {
            out.push((idx, val));
        }
    }
    Cochain { degree: q, vec: SparseVec::from_sorted(out) }
}

/// Sort a vertex list, returning the permutation sign; `None` on repeats.
pub fn sort_with_sign(list: &[u32]) -> Option<(Vec<u32>, i32)> {
    let mut v: Vec<u32> = list.to_vec();
    // insertion sort, counting inversions
    let mut sign = 1i32;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}

/// Dense evaluation helper for tests: value of `u` on the cell `cell`.
pub fn eval_on<R: CoeffRing>(
    ring: &R,
    cx: &CochainComplex<R>,
    u: &Cochain<R::Elem>,
    cell: &[u32],
) -> R::Elem {
    match cx.cell_index(u.degree, cell) {
        Some(i) => u.vec.get(i).cloned().unwrap_or_else(|| ring.zero()),
        None => ring.zero(),
    }
}

/// Build a cochain from (cell, coefficient) pairs.
pub fn cochain_from_cells<R: CoeffRing>(
    ring: &R,
    cx: &CochainComplex<R>,
    degree: i32,
    entries: &[(&[u32], i64)],
) -> Cochain<R::Elem> {
    let mut map: HashMap<usize, R::Elem> = HashMap::new();
    for (cell, c) in entries {
        let idx = cx
            .cell_index(degree, cell)
            .unwrap_or_else(|| panic!("cell {cell:?} not in degree {degree} basis"));
        let add = ring.from_i64(*c);
        let cur = map.get(&idx).cloned().unwrap_or_else(|| ring.zero());
        let nv = ring.add(&cur, &add);
        if ring.is_zero(&nv) {
            map.remove(&idx);
        } else {
            map.insert(idx, nv);
        }
    }
    Cochain { degree, vec: SparseVec::from_map(map) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::library;
    use crate::linalg::{Int, IntRing};

    #[test]
    fn reduced_complex_of_two_points() {
        let cx = CochainComplex::reduced(IntRing, &library::disjoint_points(2));
        assert_eq!(cx.min_degree, -1);
        assert_eq!(cx.num_cells(-1), 1);
        assert_eq!(cx.num_cells(0), 2);
        // δ_{-1} is the augmentation transpose: both vertices get the value
        let d = cx.delta(-1);
        assert_eq!(d.nnz(), 2);
    }

    #[test]
    fn dd_zero_on_projective_plane() {
        let cx = CochainComplex::reduced(IntRing, &library::projective_plane_six());
        assert!(cx.check_dd_zero());
        assert_eq!(cx.num_cells(2), 10);
    }

    #[test]
    fn relative_edge_mod_endpoints() {
        let edge = SimplicialComplex::simplex(2);
        let ends = library::disjoint_points(2);
        let cx = CochainComplex::relative(IntRing, &edge, Some(&ends));
        assert_eq!(cx.num_cells(0), 0);
        assert_eq!(cx.num_cells(1), 1);
    }

    use crate::complex::SimplicialComplex;

    #[test]
    fn sort_sign() {
        assert_eq!(sort_with_sign(&[3, 1, 2]), Some((vec![1, 2, 3], 1)));
        assert_eq!(sort_with_sign(&[2, 1]), Some((vec![1, 2], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn cup_with_zero_is_zero() {
        let cx = CochainComplex::reduced(IntRing, &library::cycle(3));
        let u = Cochain::<Int>::zero(0);
        let v = cochain_from_cells(&IntRing, &cx, 1, &[(&[1, 2], 1)]);
        assert!(cx.cup(&u, &v).is_zero());
    }
}
