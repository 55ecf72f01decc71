//! Families of based pairs `(X_i, A_i)`, one per vertex of the complex.

use serde::Deserialize;

use crate::complex::SimplicialComplex;
use crate::error::InputError;

/// The pair assigned to one vertex.
#[derive(Clone, Debug, PartialEq)]
pub enum PairDescriptor {
    /// `(D^n, S^{n-1})`, n ≥ 1; modelled simplicially as the n-fold product
    /// of the edge pair (staircase cubes).
    DiskSphere(u32),
    /// An explicit simplicial pair with a based vertex of `a`.
    SimplicialPair { x: SimplicialComplex, a: SimplicialComplex, basepoint: usize },
    /// A cone pair `(CX, X)` described only by the reduced cohomology ring
    /// of `X`; no simplicial model.
    Cone(RingPresentation),
}

impl PairDescriptor {
    /// Degree shift contributed by this factor in the wedge decomposition
    /// (n-1 for a disk pair). Only meaningful for disk factors.
    pub fn disk_dimension(&self) -> Option<u32> {
        match self {
            PairDescriptor::DiskSphere(n) => Some(*n),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PairDescriptor::DiskSphere(_) => "disk-sphere",
            PairDescriptor::SimplicialPair { .. } => "simplicial-pair",
            PairDescriptor::Cone(_) => "cone",
        }
    }
}

/// A finite graded-commutative ring presentation of a reduced cohomology
/// ring: free basis with degrees, and structure constants.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct RingPresentation {
    /// (name, degree) of each reduced basis element; degrees ≥ 1.
    pub generators: Vec<(String, u32)>,
    /// Products of basis elements: entry for (i, j) lists the expansion of
    /// g_i · g_j as (basis index, integer coefficient) pairs. Missing entries
    /// mean zero.
    pub products: Vec<ProductRule>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ProductRule {
    pub left: usize,
    pub right: usize,
    pub result: Vec<(usize, i64)>,
}

impl RingPresentation {
    /// The reduced cohomology ring of a sphere S^d: one generator squaring
    /// to zero.
    pub fn sphere(d: u32) -> Self {
        RingPresentation {
            generators: vec![(format!("s{d}"), d)],
            products: vec![ProductRule { left: 0, right: 0, result: vec![] }],
        }
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.generators[i].1
    }

    pub fn product(&self, i: usize, j: usize) -> Vec<(usize, i64)> {
        self.products
            .iter()
            .find(|r| r.left == i && r.right == j)
            .map(|r| r.result.clone())
            .unwrap_or_default()
    }

    /// Shift every degree up by `t`; products of positive-degree classes
    /// vanish after suspension.
    pub fn suspend(&self, t: u32) -> Self {
        if t == 0 {
            return self.clone();
        }
        RingPresentation {
            generators: self
                .generators
                .iter()
                .map(|(n, d)| (n.clone(), d + t))
                .collect(),
            products: Vec::new(),
        }
    }

    /// Check degrees, graded commutativity and associativity of the table.
    pub fn validate(&self) -> Result<(), InputError> {
        let n = self.generators.len();
        for (name, d) in &self.generators {
            if *d == 0 {
                return Err(InputError::PairFamily(format!(
                    "ring generator {name} has degree 0; reduced generators must have positive degree"
                )));
            }
        }
        for rule in &self.products {
            if rule.left >= n || rule.right >= n {
                return Err(InputError::PairFamily("product rule references missing generator".into()));
            }
            let target = self.degree(rule.left) + self.degree(rule.right);
            for (k, _) in &rule.result {
                if *k >= n {
                    return Err(InputError::PairFamily("product expansion references missing generator".into()));
                }
                if self.degree(*k) != target {
                    return Err(InputError::PairFamily(format!(
                        "product of degrees {} and {} lands in degree {}, not {}",
                        self.degree(rule.left),
                        self.degree(rule.right),
                        self.degree(*k),
                        target
                    )));
                }
            }
        }
        // graded commutativity
        for i in 0..n {
            for j in 0..n {
                let mut ij = self.product(i, j);
                let mut ji = self.product(j, i);
                let sign = if self.degree(i) % 2 == 1 && self.degree(j) % 2 == 1 { -1 } else { 1 };
                for e in &mut ji {
                    e.1 *= sign;
                }
                ij.sort();
                ji.sort();
                let norm = |v: Vec<(usize, i64)>| -> Vec<(usize, i64)> {
                    v.into_iter().filter(|(_, c)| *c != 0).collect()
                };
                if norm(ij) != norm(ji) {
                    return Err(InputError::PairFamily(format!(
                        "ring is not graded-commutative at generators {i}, {j}"
                    )));
                }
            }
        }
        // associativity
        let mul_lin = |lhs: &[(usize, i64)], g: usize| -> Vec<(usize, i64)> {
            let mut acc: Vec<(usize, i64)> = Vec::new();
            for (k, c) in lhs {
                for (t, d) in self.product(*k, g) {
                    acc.push((t, c * d));
                }
            }
            acc.sort();
            let mut out: Vec<(usize, i64)> = Vec::new();
            for (k, c) in acc {
                if let Some(last) = out.last_mut() {
                    if last.0 == k {
                        last.1 += c;
                        continue;
                    }
                }
                out.push((k, c));
            }
            out.retain(|(_, c)| *c != 0);
            out
        };
        let mul_lin_right = |g: usize, rhs: &[(usize, i64)]| -> Vec<(usize, i64)> {
            let mut acc: Vec<(usize, i64)> = Vec::new();
            for (k, c) in rhs {
                for (t, d) in self.product(g, *k) {
                    acc.push((t, c * d));
                }
            }
            acc.sort();
            let mut out: Vec<(usize, i64)> = Vec::new();
            for (k, c) in acc {
                if let Some(last) = out.last_mut() {
                    if last.0 == k {
                        last.1 += c;
                        continue;
                    }
                }
                out.push((k, c));
            }
            out.retain(|(_, c)| *c != 0);
            out
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = mul_lin(&self.product(i, j), k);
                    let right = mul_lin_right(i, &self.product(j, k));
                    if left != right {
                        return Err(InputError::PairFamily(format!(
                            "ring is not associative at generators {i}, {j}, {k}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The pair family of a polyhedral product: one descriptor per vertex, plus
/// an optional suspension vector applied on top.
#[derive(Clone, Debug, PartialEq)]
pub struct PairFamily {
    pub per_vertex: Vec<PairDescriptor>,
    pub suspension: Vec<u32>,
}

impl PairFamily {
    pub fn uniform_disk(m: usize, n: u32) -> Self {
        assert!(n >= 1);
        PairFamily {
            per_vertex: vec![PairDescriptor::DiskSphere(n); m],
            suspension: vec![0; m],
        }
    }

    pub fn disks(ns: &[u32]) -> Self {
        assert!(ns.iter().all(|&n| n >= 1));
        PairFamily {
            per_vertex: ns.iter().map(|&n| PairDescriptor::DiskSphere(n)).collect(),
            suspension: vec![0; ns.len()],
        }
    }

    pub fn uniform_cone(m: usize, ring: RingPresentation) -> Self {
        PairFamily {
            per_vertex: vec![PairDescriptor::Cone(ring); m],
            suspension: vec![0; m],
        }
    }

    pub fn m(&self) -> usize {
        self.per_vertex.len()
    }

    pub fn with_suspension(mut self, t: Vec<u32>) -> Result<Self, InputError> {
        if t.len() != self.per_vertex.len() {
            return Err(InputError::ShiftLengthMismatch {
                got: t.len(),
                expected: self.per_vertex.len(),
            });
        }
        self.suspension = t;
        Ok(self)
    }

    /// Fold the suspension vector into the descriptors: disk pairs absorb the
    /// shift into their dimension, simplicial pairs are joined with that many
    /// S⁰ factors, cone rings suspend their presentation.
    pub fn normalized(&self) -> Result<PairFamily, InputError> {
        let mut out = Vec::with_capacity(self.per_vertex.len());
        for (desc, &t) in self.per_vertex.iter().zip(&self.suspension) {
            let nd = match desc {
                PairDescriptor::DiskSphere(n) => PairDescriptor::DiskSphere(n + t),
                PairDescriptor::SimplicialPair { x, a, basepoint } => {
                    let mut x = x.clone();
                    let mut a = a.clone();
                    let bp = *basepoint;
                    for _ in 0..t {
                        let s0 = crate::complex::library::disjoint_points(2);
                        // suspension of the pair: join X and A with the same S⁰
                        x = x.join(&s0);
                        a = a.join(&s0);
                    }
                    PairDescriptor::SimplicialPair { x, a, basepoint: bp }
                }
                PairDescriptor::Cone(r) => PairDescriptor::Cone(r.suspend(t)),
            };
            out.push(nd);
        }
        Ok(PairFamily { per_vertex: out, suspension: vec![0; self.per_vertex.len()] })
    }

    /// All descriptors disk pairs: the Hochster-style combinatorial paths
    /// apply. Returns the disk dimensions.
    pub fn all_disks(&self) -> Option<Vec<u32>> {
        self.per_vertex
            .iter()
            .zip(&self.suspension)
            .map(|(d, t)| d.disk_dimension().map(|n| n + t))
            .collect()
    }

    /// All cone pairs: returns the per-vertex ring presentations (suspension
    /// folded in).
    pub fn all_cones(&self) -> Option<Vec<RingPresentation>> {
        self.per_vertex
            .iter()
            .zip(&self.suspension)
            .map(|(d, t)| match d {
                PairDescriptor::Cone(r) => Some(r.suspend(*t)),
                _ => None,
            })
            .collect()
    }

    /// Whether overlapping-index star products vanish by the suspension rule:
    /// every descriptor a disk pair of dimension ≥ 2, or a positive global
    /// suspension applied to every vertex.
    pub fn suspension_rule_applies(&self) -> bool {
        let all_disks_ge2 = self
            .per_vertex
            .iter()
            .zip(&self.suspension)
            .all(|(d, t)| matches!(d, PairDescriptor::DiskSphere(n) if n + t >= 2));
        let all_suspended = self.suspension.iter().all(|&t| t >= 1);
        all_disks_ge2 || all_suspended
    }

    /// Simplicial models exist (no cone descriptors).
    pub fn is_simplicial(&self) -> bool {
        !self.per_vertex.iter().any(|d| matches!(d, PairDescriptor::Cone(_)))
    }

    pub fn validate(&self, m: usize) -> Result<(), InputError> {
        if self.per_vertex.len() != m {
            return Err(InputError::PairFamily(format!(
                "family lists {} pairs for a complex on {m} vertices",
                self.per_vertex.len()
            )));
        }
        if self.suspension.len() != m {
            return Err(InputError::ShiftLengthMismatch { got: self.suspension.len(), expected: m });
        }
        for (i, d) in self.per_vertex.iter().enumerate() {
            match d {
                PairDescriptor::DiskSphere(n) => {
                    if *n == 0 {
                        return Err(InputError::PairFamily(format!(
                            "vertex {}: disk dimension must be at least 1",
                            i + 1
                        )));
                    }
                }
                PairDescriptor::SimplicialPair { x, a, basepoint } => {
                    if a.m() != x.m() {
                        return Err(InputError::PairFamily(format!(
                            "vertex {}: subcomplex must share the ambient vertex set",
                            i + 1
                        )));
                    }
                    for f in a.faces() {
                        if !x.has_face(&f) {
                            return Err(InputError::PairFamily(format!(
                                "vertex {}: {f:?} is in A but not in X",
                                i + 1
                            )));
                        }
                    }
                    let bp_mask = 1u32 << (basepoint - 1);
                    if !a.has_face_mask(bp_mask) {
                        return Err(InputError::PairFamily(format!(
                            "vertex {}: basepoint {basepoint} is not a vertex of A",
                            i + 1
                        )));
                    }
                }
                PairDescriptor::Cone(r) => r.validate()?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::library;

    #[test]
    fn sphere_ring_validates() {
        RingPresentation::sphere(1).validate().unwrap();
        RingPresentation::sphere(2).validate().unwrap();
    }

    #[test]
    fn non_commutative_ring_rejected() {
        let bad = RingPresentation {
            generators: vec![("a".into(), 1), ("b".into(), 1), ("c".into(), 2)],
            products: vec![
                ProductRule { left: 0, right: 1, result: vec![(2, 1)] },
                ProductRule { left: 1, right: 0, result: vec![(2, 1)] }, // should be -1
            ],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn disk_suspension_normalizes() {
        let fam = PairFamily::uniform_disk(3, 1).with_suspension(vec![1, 1, 1]).unwrap();
        let norm = fam.normalized().unwrap();
        assert_eq!(norm.all_disks(), Some(vec![2, 2, 2]));
        assert!(norm.suspension_rule_applies());
    }

    #[test]
    fn simplicial_pair_validation() {
        let x = SimplicialComplex::simplex(2);
        let a = library::disjoint_points(2);
        let fam = PairFamily {
            per_vertex: vec![PairDescriptor::SimplicialPair { x, a, basepoint: 1 }],
            suspension: vec![0],
        };
        fam.validate(1).unwrap();
    }
}
