//! Sparse exact matrices keyed by (row, col), with no stored zeros.

use std::collections::HashMap;

use super::ring::CoeffRing;

/// Sparse matrix stored row-wise. Invariant: no explicit zero entries.
#[derive(Clone, Debug)]
pub struct SparseMat<E> {
    pub nrows: usize,
    pub ncols: usize,
    rows: Vec<HashMap<u32, E>>,
}

impl<E: Clone + PartialEq> SparseMat<E> {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMat { nrows, ncols, rows: vec![HashMap::new(); nrows] }
    }

    pub fn identity<R>(ring: &R, n: usize) -> Self
    where
        R: CoeffRing<Elem = E>,
    {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.rows[i].insert(i as u32, ring.one());
        }
        m
    }

    pub fn from_triplets<R>(
        ring: &R,
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, E)>,
    ) -> Self
    where
        R: CoeffRing<Elem = E>,
    {
        let mut m = Self::zero(nrows, ncols);
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            if !ring.is_zero(&v) {
                let slot = m.rows[r].entry(c as u32);
                use std::collections::hash_map::Entry;
                match slot {
                    Entry::Occupied(mut e) => {
                        let nv = ring.add(e.get(), &v);
                        if ring.is_zero(&nv) {
                            e.remove();
                        } else {
                            *e.get_mut() = nv;
                        }
                    }
                    Entry::Vacant(e) => {
                        e.insert(v);
                    }
                }
            }
        }
        m
    }

    pub fn set<R>(&mut self, ring: &R, r: usize, c: usize, v: E)
    where
        R: CoeffRing<Elem = E>,
    {
        if ring.is_zero(&v) {
            self.rows[r].remove(&(c as u32));
        } else {
            self.rows[r].insert(c as u32, v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&E> {
        self.rows[r].get(&(c as u32))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, r: usize) -> &HashMap<u32, E> {
        &self.rows[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut HashMap<u32, E> {
        &mut self.rows[r]
    }

    /// Entries of row `r` sorted by column.
    pub fn row_sorted(&self, r: usize) -> Vec<(usize, E)> {
        let mut v: Vec<(usize, E)> =
            self.rows[r].iter().map(|(c, e)| (*c as usize, e.clone())).collect();
        v.sort_by_key(|(c, _)| *c);
        v
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, &E)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, e)| (r, *c as usize, e)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.ncols, self.nrows);
        for (r, c, e) in self.iter_entries() {
            t.rows[c].insert(r as u32, e.clone());
        }
        t
    }

    /// Matrix product (used by invariants and small transforms only).
    pub fn matmul<R>(&self, ring: &R, other: &SparseMat<E>) -> SparseMat<E>
    where
        R: CoeffRing<Elem = E>,
    {
        assert_eq!(self.ncols, other.nrows);
        let mut out = SparseMat::zero(self.nrows, other.ncols);
        for r in 0..self.nrows {
            let mut acc: HashMap<u32, E> = HashMap::new();
            for (k, a) in &self.rows[r] {
                for (c, b) in &other.rows[*k as usize] {
                    let prod = ring.mul(a, b);
                    if ring.is_zero(&prod) {
                        continue;
                    }
                    use std::collections::hash_map::Entry;
                    match acc.entry(*c) {
                        Entry::Occupied(mut e) => {
                            let nv = ring.add(e.get(), &prod);
                            if ring.is_zero(&nv) {
                                e.remove();
                            } else {
                                *e.get_mut() = nv;
                            }
                        }
                        Entry::Vacant(e) => {
                            e.insert(prod);
                        }
                    }
                }
            }
            out.rows[r] = acc;
        }
        out
    }

    /// Apply to a sparse column vector (length ncols), producing length nrows.
    pub fn apply<R>(&self, ring: &R, vec: &SparseVec<E>) -> SparseVec<E>
    where
        R: CoeffRing<Elem = E>,
    {
        let mut out: HashMap<usize, E> = HashMap::new();
        for r in 0..self.nrows {
            let mut sum = ring.zero();
            let mut any = false;
            for (c, a) in &self.rows[r] {
                if let Some(x) = vec.get(*c as usize) {
                    sum = ring.add(&sum, &ring.mul(a, x));
                    any = true;
                }
            }
            if any && !ring.is_zero(&sum) {
                out.insert(r, sum);
            }
        }
        SparseVec::from_map(out)
    }
}

/// Sparse vector: sorted (index, value) pairs, no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseVec<E> {
    entries: Vec<(usize, E)>,
}

impl<E: Clone + PartialEq> SparseVec<E> {
    pub fn empty() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn from_map(map: HashMap<usize, E>) -> Self {
        let mut entries: Vec<(usize, E)> = map.into_iter().collect();
        entries.sort_by_key(|(i, _)| *i);
        SparseVec { entries }
    }

    pub fn from_sorted(entries: Vec<(usize, E)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseVec { entries }
    }

    pub fn singleton(i: usize, v: E) -> Self {
        SparseVec { entries: vec![(i, v)] }
    }

    pub fn get(&self, i: usize) -> Option<&E> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, E)> {
        self.entries.iter()
    }

    pub fn into_entries(self) -> Vec<(usize, E)> {
        self.entries
    }

    pub fn scale<R>(&self, ring: &R, c: &E) -> Self
    where
        R: CoeffRing<Elem = E>,
    {
        if ring.is_zero(c) {
            return Self::empty();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, ring.mul(v, c))).collect(),
        }
    }

    pub fn add<R>(&self, ring: &R, other: &Self) -> Self
    where
        R: CoeffRing<Elem = E>,
    {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            if j >= other.entries.len()
                || (i < self.entries.len() && self.entries[i].0 < other.entries[j].0)
            {
                out.push(self.entries[i].clone());
                i += 1;
            } else if i >= self.entries.len() || other.entries[j].0 < self.entries[i].0 {
                out.push(other.entries[j].clone());
                j += 1;
            } else {
                let v = ring.add(&self.entries[i].1, &other.entries[j].1);
                if !ring.is_zero(&v) {
                    out.push((self.entries[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn sub<R>(&self, ring: &R, other: &Self) -> Self
    where
        R: CoeffRing<Elem = E>,
    {
        self.add(ring, &other.scale(ring, &ring.from_i64(-1)))
    }

    pub fn axpy<R>(&self, ring: &R, c: &E, other: &Self) -> Self
    where
        R: CoeffRing<Elem = E>,
    {
        self.add(ring, &other.scale(ring, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int::Int;
    use crate::linalg::ring::IntRing;

    #[test]
    fn triplets_cancel() {
        let r = IntRing;
        let m = SparseMat::from_triplets(
            &r,
            2,
            2,
            vec![
                (0, 0, Int::from_i64(2)),
                (0, 0, Int::from_i64(-2)),
                (1, 1, Int::from_i64(5)),
            ],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 1), Some(&Int::from_i64(5)));
    }

    #[test]
    fn sparse_vec_ops() {
        let r = IntRing;
        let a = SparseVec::from_sorted(vec![(0, Int::from_i64(1)), (2, Int::from_i64(3))]);
        let b = SparseVec::from_sorted(vec![(2, Int::from_i64(-3)), (5, Int::from_i64(4))]);
        let s = a.add(&r, &b);
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(0), Some(&Int::from_i64(1)));
        assert_eq!(s.get(5), Some(&Int::from_i64(4)));
    }
}
