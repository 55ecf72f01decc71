//! Abstract simplicial complexes on an ordered vertex set `1..=m`.
//!
//! Faces are stored as sorted vertex lists together with a bitmask index,
//! and every complex keeps the empty face. Vertices that appear in no facet
//! ("ghost" vertices) are legal: they count towards `m` but carry no face.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InputError;

/// A sorted subset of the ambient vertex set `1..=m`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet {
    mask: u32,
    m: u8,
}

impl IndexSet {
    pub fn new(members: &[usize], m: usize) -> Result<Self, InputError> {
        let mut mask = 0u32;
        for &v in members {
            if v < 1 || v > m {
                return Err(InputError::VertexOutOfRange { index: v as i64, m });
            }
            if mask & (1 << (v - 1)) != 0 {
                return Err(InputError::DuplicateVertex { index: v });
            }
            mask |= 1 << (v - 1);
        }
        Ok(IndexSet { mask, m: m as u8 })
    }

    pub fn from_mask(mask: u32, m: usize) -> Self {
        debug_assert!(mask < (1u32 << m.min(31)) || m >= 32);
        IndexSet { mask, m: m as u8 }
    }

    pub fn empty(m: usize) -> Self {
        IndexSet { mask: 0, m: m as u8 }
    }

    pub fn full(m: usize) -> Self {
        let mask = if m == 0 { 0 } else { (1u32 << m) - 1 };
        IndexSet { mask, m: m as u8 }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn ambient(&self) -> usize {
        self.m as usize
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        v >= 1 && v <= self.m as usize && self.mask & (1 << (v - 1)) != 0
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet { mask: self.mask & other.mask, m: self.m }
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet { mask: self.mask | other.mask, m: self.m }
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.mask & other.mask == 0
    }

    /// Members in increasing order.
    pub fn members(&self) -> Vec<usize> {
        (1..=self.m as usize).filter(|&v| self.contains(v)).collect()
    }

    /// Position (0-based) of `v` within the sorted members, if present.
    pub fn position(&self, v: usize) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        Some((self.mask & ((1 << (v - 1)) - 1)).count_ones() as usize)
    }

    pub fn subsets(&self) -> impl Iterator<Item = IndexSet> {
        let mask = self.mask;
        let m = self.m;
        let mut sub = 0u32;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = IndexSet { mask: sub, m };
            if sub == mask {
                done = true;
            } else {
                sub = (sub.wrapping_sub(mask)) & mask;
            }
            Some(out)
        })
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.members().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// An abstract simplicial complex on `1..=m`, closed under subsets, with the
/// empty face always present.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    m: usize,
    /// All faces as bitmasks, sorted ascending. Always contains 0 (the empty face).
    faces: Vec<u32>,
    face_set: BTreeSet<u32>,
}

impl SimplicialComplex {
    /// Downward closure of the given facets.
    pub fn from_facets(m: usize, facets: &[Vec<usize>]) -> Result<Self, InputError> {
        let mut face_set: BTreeSet<u32> = BTreeSet::new();
        face_set.insert(0);
        for facet in facets {
            let f = IndexSet::new(facet, m)?;
            // insert all subsets
            for sub in f.subsets() {
                face_set.insert(sub.mask());
            }
        }
        let faces: Vec<u32> = face_set.iter().copied().collect();
        Ok(SimplicialComplex { m, faces, face_set })
    }

    pub fn from_face_masks(m: usize, masks: impl IntoIterator<Item = u32>) -> Self {
        let mut face_set: BTreeSet<u32> = masks.into_iter().collect();
        face_set.insert(0);
        // ensure closure
        let mut stack: Vec<u32> = face_set.iter().copied().collect();
        while let Some(f) = stack.pop() {
            let mut bits = f;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                let sub = f & !b;
                if face_set.insert(sub) {
                    stack.push(sub);
                }
                bits &= bits - 1;
            }
        }
        let faces = face_set.iter().copied().collect();
        SimplicialComplex { m, faces, face_set }
    }

    /// The full simplex on `m` vertices.
    pub fn simplex(m: usize) -> Self {
        let full = IndexSet::full(m);
        let masks: Vec<u32> = full.subsets().map(|s| s.mask()).collect();
        Self::from_face_masks(m, masks)
    }

    /// The complex `{∅}` on `m` (ghost) vertices.
    pub fn void_faces(m: usize) -> Self {
        Self::from_face_masks(m, [0u32])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> impl Iterator<Item = IndexSet> + '_ {
        self.faces.iter().map(|&f| IndexSet::from_mask(f, self.m))
    }

    /// Faces with exactly `k` vertices, in ascending mask order.
    pub fn faces_of_card(&self, k: usize) -> Vec<IndexSet> {
        self.faces()
            .filter(|f| f.len() == k)
            .collect()
    }

    pub fn has_face_mask(&self, mask: u32) -> bool {
        self.face_set.contains(&mask)
    }

    pub fn has_face(&self, f: &IndexSet) -> bool {
        self.has_face_mask(f.mask())
    }

    /// Maximal faces, ascending mask order.
    pub fn facets(&self) -> Vec<IndexSet> {
        self.faces()
            .filter(|f| {
                (1..=self.m).all(|v| f.contains(v) || !self.has_face_mask(f.mask() | (1 << (v - 1))))
            })
            .collect()
    }

    /// Dimension of the complex: -1 for `{∅}`.
    pub fn dim(&self) -> i32 {
        self.faces().map(|f| f.len() as i32 - 1).max().unwrap_or(-1)
    }

    /// Vertices that belong to at least one face.
    pub fn real_vertices(&self) -> Vec<usize> {
        (1..=self.m)
            .filter(|&v| self.has_face_mask(1 << (v - 1)))
            .collect()
    }

    /// The full subcomplex `K_I = {σ ∩ I : σ ∈ K}`, re-indexed to `1..=|I|`
    /// preserving the order inherited from `I`.
    pub fn full_subcomplex(&self, index: &IndexSet) -> SimplicialComplex {
        let members = index.members();
        let k = members.len();
        let mut masks: BTreeSet<u32> = BTreeSet::new();
        for f in &self.faces {
            let mut sub = 0u32;
            for (pos, &v) in members.iter().enumerate() {
                if f & (1 << (v - 1)) != 0 {
                    sub |= 1 << pos;
                }
            }
            masks.insert(sub);
        }
        // σ∩I results are automatically closed under subsets (K is closed).
        let faces: Vec<u32> = masks.iter().copied().collect();
        SimplicialComplex { m: k, face_set: masks, faces }
    }

    /// Join `K1 * K2`: vertex set is the ordered disjoint union, faces are all
    /// unions of a face of each.
    pub fn join(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let m = self.m + other.m;
        let mut masks = BTreeSet::new();
        for f in &self.faces {
            for g in &other.faces {
                masks.insert(f | (g << self.m));
            }
        }
        let faces = masks.iter().copied().collect();
        SimplicialComplex { m, face_set: masks, faces }
    }

    /// Relabel vertices by a permutation `perm` (perm[v-1] = image of v).
    pub fn relabel(&self, perm: &[usize]) -> SimplicialComplex {
        assert_eq!(perm.len(), self.m);
        let masks: Vec<u32> = self
            .faces
            .iter()
            .map(|&f| {
                let mut g = 0u32;
                for v in 1..=self.m {
                    if f & (1 << (v - 1)) != 0 {
                        g |= 1 << (perm[v - 1] - 1);
                    }
                }
                g
            })
            .collect();
        Self::from_face_masks(self.m, masks)
    }

    /// Replace vertex `i` by `mult[i-1]` consecutive copies; a subset of the
    /// new vertex set is a face iff the set of fully-represented originals is
    /// a face of `self`. The copies of vertex `i` occupy consecutive slots.
    pub fn inflate(&self, mult: &[usize]) -> SimplicialComplex {
        assert_eq!(mult.len(), self.m);
        assert!(mult.iter().all(|&j| j >= 1));
        let total: usize = mult.iter().sum();
        assert!(total <= 31, "inflated complex needs more than 31 vertices");
        // slot ranges per original vertex
        let mut start = Vec::with_capacity(self.m);
        let mut s = 0usize;
        for &j in mult {
            start.push(s);
            s += j;
        }
        let group_mask = |i: usize| -> u32 {
            let width = mult[i];
            (((1u64 << width) - 1) as u32) << start[i]
        };
        // Enumerate faces: for each face σ of K, the maximal inflated faces over σ
        // are: all copies of σ's vertices, plus at most (mult-1) copies of others.
        // Enumerate all subsets τ with merge(τ) ∈ K directly from facets.
        let mut masks: BTreeSet<u32> = BTreeSet::new();
        for facet in self.facets() {
            // maximal inflated faces for this facet: full groups on facet vertices,
            // and each non-facet group missing exactly one copy.
            let base: u32 = facet.members().iter().map(|&v| group_mask(v - 1)).sum();
            let others: Vec<usize> = (1..=self.m).filter(|v| !facet.contains(*v)).collect();
            // product over others of (choose which copy to drop)
            let mut tops: Vec<u32> = vec![base];
            for &v in &others {
                let g = group_mask(v - 1);
                let mut next = Vec::new();
                for t in &tops {
                    let mut bit = g;
                    while bit != 0 {
                        let b = bit & bit.wrapping_neg();
                        next.push(t | (g & !b));
                        bit &= bit - 1;
                    }
                }
                tops = next;
            }
            for t in tops {
                masks.insert(t);
            }
        }
        SimplicialComplex::from_face_masks(total, masks)
    }

    /// Euler characteristic of the augmented complex: Σ (-1)^{|f|-1} over all
    /// faces including ∅ (so the empty complex has χ̃ = -1).
    pub fn reduced_euler(&self) -> i64 {
        self.faces()
            .map(|f| if f.len() % 2 == 0 { -1i64 } else { 1 })
            .sum::<i64>()
    }
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplicialComplex(m={}, facets=", self.m)?;
        let facets = self.facets();
        for (i, fc) in facets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{fc:?}")?;
        }
        write!(f, ")")
    }
}

/// A simplicial map given by a vertex assignment; images of faces are checked
/// to be faces of the target at construction.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub source: SimplicialComplex,
    pub target: SimplicialComplex,
    /// vertex_map[v-1] = image of source vertex v (a target vertex).
    pub vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(
        source: SimplicialComplex,
        target: SimplicialComplex,
        vertex_map: Vec<usize>,
    ) -> Result<Self, InputError> {
        if vertex_map.len() != source.m() {
            return Err(InputError::Dimension(format!(
                "vertex map has length {}, source has {} vertices",
                vertex_map.len(),
                source.m()
            )));
        }
        for f in source.faces() {
            let mut image = 0u32;
            for v in f.members() {
                let w = vertex_map[v - 1];
                if w < 1 || w > target.m() {
                    return Err(InputError::VertexOutOfRange { index: w as i64, m: target.m() });
                }
                image |= 1 << (w - 1);
            }
            if !target.has_face_mask(image) {
                return Err(InputError::Parse(format!(
                    "image of face {:?} is not a face of the target",
                    f
                )));
            }
        }
        Ok(SimplicialMap { source, target, vertex_map })
    }

    pub fn identity(k: SimplicialComplex) -> Self {
        let map = (1..=k.m()).collect();
        SimplicialMap { source: k.clone(), target: k, vertex_map: map }
    }
}

/// The canonical vertex map `K_I -> K_J * K_L` for disjoint `J`, `L` with
/// `I = J ∪ L`: vertices of `J` go to the first join factor, vertices of `L`
/// to the second.
pub fn canonical_join_inclusion(
    k: &SimplicialComplex,
    j: &IndexSet,
    l: &IndexSet,
) -> Result<SimplicialMap, InputError> {
    if !j.is_disjoint(l) {
        return Err(InputError::OverlappingIndexSets(
            j.intersection(l).members(),
        ));
    }
    let i = j.union(l);
    let ki = k.full_subcomplex(&i);
    let kj = k.full_subcomplex(j);
    let kl = k.full_subcomplex(l);
    let join = kj.join(&kl);
    let i_members = i.members();
    let mut vertex_map = Vec::with_capacity(i_members.len());
    for &v in &i_members {
        if j.contains(v) {
            vertex_map.push(j.position(v).unwrap() + 1);
        } else {
            vertex_map.push(kj.m() + l.position(v).unwrap() + 1);
        }
    }
    SimplicialMap::new(ki, join, vertex_map)
}

/// Parse the inline complex grammar `m=<int>; facets={a,b,...},{...}` or a
/// JSON document `{"m": <int>, "facets": [[..],..]}`.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex, InputError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        #[derive(Deserialize)]
        struct Doc {
            m: usize,
            facets: Vec<Vec<usize>>,
        }
        let doc: Doc = serde_json::from_str(trimmed)
            .map_err(|e| InputError::Parse(format!("invalid JSON complex: {e}")))?;
        return SimplicialComplex::from_facets(doc.m, &doc.facets);
    }
    let mut m: Option<usize> = None;
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for part in trimmed.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some(rest) = part.strip_prefix("m") {
            let rest = rest.trim_start();
            let rest = rest
                .strip_prefix('=')
                .ok_or_else(|| InputError::Parse(format!("expected m=<int> in {part:?}")))?;
            m = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| InputError::Parse(format!("invalid vertex count {rest:?}")))?,
            );
        } else if let Some(rest) = part.strip_prefix("facets") {
            let rest = rest.trim_start();
            let rest = rest
                .strip_prefix('=')
                .ok_or_else(|| InputError::Parse(format!("expected facets=... in {part:?}")))?;
            let rest = rest.trim();
            if rest.is_empty() {
                continue;
            }
            // split {..},{..}
            for chunk in rest.split('}') {
                let chunk = chunk.trim().trim_start_matches(',').trim();
                if chunk.is_empty() {
                    continue;
                }
                let inner = chunk
                    .strip_prefix('{')
                    .ok_or_else(|| InputError::Parse(format!("expected {{...}} facet in {rest:?}")))?;
                let inner = inner.trim();
                if inner.is_empty() {
                    facets.push(Vec::new());
                    continue;
                }
                let verts: Result<Vec<usize>, _> = inner
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| InputError::Parse(format!("invalid vertex {s:?}")))
                    })
                    .collect();
                facets.push(verts?);
            }
        } else {
            return Err(InputError::Parse(format!("unrecognized clause {part:?}")));
        }
    }
    let m = m.ok_or_else(|| InputError::Parse("missing m=<int>".into()))?;
    SimplicialComplex::from_facets(m, &facets)
}

/// Serialize a complex to the canonical inline grammar (facet list).
pub fn complex_to_text(k: &SimplicialComplex) -> String {
    let facets = k.facets();
    let body = facets
        .iter()
        .filter(|f| !f.is_empty())
        .map(|f| {
            let mems: Vec<String> = f.members().iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", mems.join(","))
        })
        .collect::<Vec<_>>()
        .join(",");
    format!("m={}; facets={}", k.m(), body)
}

#[derive(Serialize)]
pub struct ComplexJson {
    pub m: usize,
    pub facets: Vec<Vec<usize>>,
}

impl From<&SimplicialComplex> for ComplexJson {
    fn from(k: &SimplicialComplex) -> Self {
        ComplexJson {
            m: k.m(),
            facets: k
                .facets()
                .iter()
                .filter(|f| !f.is_empty())
                .map(|f| f.members())
                .collect(),
        }
    }
}

/// Standard complexes used throughout the test corpus and CLI examples.
pub mod library {
    use super::SimplicialComplex;

    /// Boundary of the m-gon: edges {i, i+1} cyclically.
    pub fn cycle(m: usize) -> SimplicialComplex {
        assert!(m >= 3);
        let facets: Vec<Vec<usize>> = (1..=m).map(|i| vec![i, i % m + 1]).collect();
        SimplicialComplex::from_facets(m, &facets).unwrap()
    }

    /// k isolated points.
    pub fn disjoint_points(k: usize) -> SimplicialComplex {
        let facets: Vec<Vec<usize>> = (1..=k).map(|i| vec![i]).collect();
        SimplicialComplex::from_facets(k, &facets).unwrap()
    }

    /// The 6-vertex triangulation of the real projective plane.
    pub fn projective_plane_six() -> SimplicialComplex {
        let facets = vec![
            vec![1, 2, 3],
            vec![1, 3, 4],
            vec![1, 2, 6],
            vec![1, 4, 5],
            vec![1, 5, 6],
            vec![2, 3, 5],
            vec![2, 4, 5],
            vec![2, 4, 6],
            vec![3, 4, 6],
            vec![3, 5, 6],
        ];
        SimplicialComplex::from_facets(6, &facets).unwrap()
    }

    /// The 7-vertex triangulation of the torus: triangles (i, i+1, i+3) and
    /// (i, i+2, i+3) mod 7.
    pub fn torus_seven() -> SimplicialComplex {
        let mut facets = Vec::new();
        for i in 0..7usize {
            facets.push(vec![i + 1, (i + 1) % 7 + 1, (i + 3) % 7 + 1]);
            facets.push(vec![i + 1, (i + 2) % 7 + 1, (i + 3) % 7 + 1]);
        }
        SimplicialComplex::from_facets(7, &facets).unwrap()
    }

    /// Boundary of the (m-1)-simplex on m vertices.
    pub fn boundary_simplex(m: usize) -> SimplicialComplex {
        assert!(m >= 2);
        let facets: Vec<Vec<usize>> = (1..=m)
            .map(|skip| (1..=m).filter(|&v| v != skip).collect())
            .collect();
        SimplicialComplex::from_facets(m, &facets).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_two_points() {
        let k = parse_complex("m=2; facets={1},{2}").unwrap();
        assert_eq!(k.num_faces(), 3); // ∅, {1}, {2}
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn parse_triangle_boundary() {
        let k = parse_complex("m=3; facets={1,2},{2,3},{1,3}").unwrap();
        assert_eq!(k.num_faces(), 7);
    }

    #[test]
    fn parse_five_cycle() {
        let k = parse_complex("m=5; facets={1,2},{2,3},{3,4},{4,5},{5,1}").unwrap();
        assert_eq!(k.num_faces(), 11);
        assert_eq!(k, library::cycle(5));
    }

    #[test]
    fn parse_json() {
        let k = parse_complex(r#"{"m": 3, "facets": [[1,2],[2,3],[1,3]]}"#).unwrap();
        assert_eq!(k, library::cycle(3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_complex("m=2; facets={3}"),
            Err(InputError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            parse_complex("m=3; facets={1,1}"),
            Err(InputError::DuplicateVertex { .. })
        ));
    }

    #[test]
    fn ghost_vertices_are_retained() {
        let k = parse_complex("m=4; facets={1,2}").unwrap();
        assert_eq!(k.m(), 4);
        assert_eq!(k.real_vertices(), vec![1, 2]);
    }

    #[test]
    fn full_subcomplex_five_cycle() {
        let k = library::cycle(5);
        let i = IndexSet::new(&[1, 3], 5).unwrap();
        let ki = k.full_subcomplex(&i);
        assert_eq!(ki.m(), 2);
        assert_eq!(ki.num_faces(), 3); // two disjoint points

        let i = IndexSet::new(&[1, 2, 4], 5).unwrap();
        let ki = k.full_subcomplex(&i);
        // edge {1,2} plus isolated point {4 -> position 3}
        assert_eq!(ki.m(), 3);
        assert!(ki.has_face(&IndexSet::new(&[1, 2], 3).unwrap()));
        assert!(ki.has_face(&IndexSet::new(&[3], 3).unwrap()));
        assert!(!ki.has_face(&IndexSet::new(&[1, 3], 3).unwrap()));
    }

    #[test]
    fn full_subcomplex_of_simplex() {
        let k = SimplicialComplex::simplex(5);
        let i = IndexSet::new(&[2, 3, 5], 5).unwrap();
        assert_eq!(k.full_subcomplex(&i), SimplicialComplex::simplex(3));
    }

    #[test]
    fn full_subcomplex_composes() {
        let k = library::cycle(6);
        let i = IndexSet::new(&[1, 2, 4, 5], 6).unwrap();
        let ki = k.full_subcomplex(&i);
        // restrict further to {1,2,5} of the original = positions {1,2,4} of ki
        let inner = IndexSet::new(&[1, 2, 4], 4).unwrap();
        let a = ki.full_subcomplex(&inner);
        let b = k.full_subcomplex(&IndexSet::new(&[1, 2, 5], 6).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn join_counts_multiply() {
        let pt = SimplicialComplex::simplex(1);
        let edge = pt.join(&pt);
        assert_eq!(edge, SimplicialComplex::simplex(2));

        let s0 = library::disjoint_points(2);
        let s1 = s0.join(&s0);
        assert_eq!(s1, library::cycle(4).relabel(&[1, 3, 2, 4]));
        assert_eq!(s1.num_faces(), s0.num_faces() * s0.num_faces());

        let empty = SimplicialComplex::void_faces(0);
        assert_eq!(empty.join(&s0), s0);
    }

    #[test]
    fn join_associative_counts() {
        let a = library::cycle(3);
        let b = library::disjoint_points(2);
        let c = SimplicialComplex::simplex(2);
        let left = a.join(&b).join(&c);
        let right = a.join(&b.join(&c));
        assert_eq!(left, right);
        assert_eq!(left.num_faces(), a.num_faces() * b.num_faces() * c.num_faces());
    }

    #[test]
    fn join_inclusion_four_cycle() {
        let k = library::cycle(4);
        let j = IndexSet::new(&[1, 3], 4).unwrap();
        let l = IndexSet::new(&[2, 4], 4).unwrap();
        let map = canonical_join_inclusion(&k, &j, &l).unwrap();
        assert_eq!(map.source.num_faces(), map.target.num_faces());
        // bijective on vertices
        let mut images = map.vertex_map.clone();
        images.sort_unstable();
        assert_eq!(images, vec![1, 2, 3, 4]);
    }

    #[test]
    fn join_inclusion_five_cycle_is_path_into_square() {
        let k = library::cycle(5);
        let j = IndexSet::new(&[1, 3], 5).unwrap();
        let l = IndexSet::new(&[2, 4], 5).unwrap();
        let map = canonical_join_inclusion(&k, &j, &l).unwrap();
        // source is the path 1-2-3-4 (edges 12, 23, 34)
        assert_eq!(map.source.faces_of_card(2).len(), 3);
        assert_eq!(map.target.faces_of_card(2).len(), 4);
    }

    #[test]
    fn join_inclusion_rejects_overlap() {
        let k = library::cycle(4);
        let j = IndexSet::new(&[1, 2], 4).unwrap();
        let l = IndexSet::new(&[2, 4], 4).unwrap();
        assert!(canonical_join_inclusion(&k, &j, &l).is_err());
    }

    #[test]
    fn inflate_two_points_gives_suspension() {
        // doubling one vertex of {·,·} produces a complex homotopy equivalent
        // to the circle: here literally the boundary of the triangle.
        let k = library::disjoint_points(2);
        let k2 = k.inflate(&[1, 2]);
        assert_eq!(k2, library::cycle(3));
    }

    #[test]
    fn inflate_merge_condition() {
        let k = library::cycle(4);
        let k2 = k.inflate(&[2, 1, 1, 1]);
        // τ is a face iff merging the copies of vertex 1 gives a face of C4
        for f in k2.faces() {
            let mask = f.mask();
            let has_both = mask & 0b11 == 0b11;
            let mut orig = 0u32;
            if has_both {
                orig |= 1;
            }
            orig |= (mask >> 2) << 1 & 0b1110;
            // rebuild: copies occupy slots 1,2 for vertex 1; slots 3,4,5 are 2,3,4
            assert!(k.has_face_mask(orig), "inflated face {f:?} breaks the merge rule");
        }
    }

    #[test]
    fn facets_of_cycle() {
        let k = library::cycle(5);
        assert_eq!(k.facets().len(), 5);
    }

    #[test]
    fn projective_plane_is_closed_surface() {
        let k = library::projective_plane_six();
        assert_eq!(k.faces_of_card(3).len(), 10);
        assert_eq!(k.faces_of_card(2).len(), 15);
        assert_eq!(k.faces_of_card(1).len(), 6);
    }

    #[test]
    fn torus_seven_counts() {
        let k = library::torus_seven();
        assert_eq!(k.faces_of_card(3).len(), 14);
        assert_eq!(k.faces_of_card(2).len(), 21);
    }
}
