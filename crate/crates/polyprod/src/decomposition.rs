//! The additive decomposition: `H*(Z(K;(X,A)))` as a sum over index sets
//! `I ⊆ [m]` of shifted summands attached to the full subcomplexes `K_I`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cochain::CochainComplex;
use crate::cohomology::{cohomology_basis, cohomology_ranks, CohomologyBasis};
use crate::complex::{IndexSet, SimplicialComplex};
use crate::error::{BudgetError, InputError};
use crate::linalg::CoeffRing;
use crate::model::{build_grid, expand_slots, slots_of_index, GridModel};
use crate::pairs::{PairFamily, RingPresentation};

/// Default ceiling on triangulated model cells.
pub const DEFAULT_BUDGET: usize = 20_000_000;

/// Shared data for one full subcomplex `K_I` (re-indexed to `1..|I|`).
pub struct LinkInfo<R: CoeffRing> {
    pub k_i: SimplicialComplex,
    pub cx: CochainComplex<R>,
    pub bases: BTreeMap<i32, CohomologyBasis<R>>,
}

impl<R: CoeffRing> LinkInfo<R> {
    pub fn new(ring: R, k: &SimplicialComplex, index: &IndexSet) -> Self {
        let k_i = k.full_subcomplex(index);
        let cx = CochainComplex::reduced(ring, &k_i);
        let mut bases = BTreeMap::new();
        for q in -1..=k_i.dim() {
            let basis = cohomology_basis(&cx, q, true);
            if basis.num_generators() > 0 {
                bases.insert(q, basis);
            }
        }
        LinkInfo { k_i, cx, bases }
    }
}

/// Shared data for one geometric smash model.
pub struct SmashInfo<R: CoeffRing> {
    pub positions: Vec<usize>,
    pub model: GridModel<R>,
    pub bases: BTreeMap<i32, CohomologyBasis<R>>,
}

pub enum SummandKind<R: CoeffRing> {
    /// Reduced cohomology of `K_I` with the degree tag carrying the shift.
    Link(Arc<LinkInfo<R>>),
    /// Cohomology of the smash model itself (simplicial-pair families).
    Geometric(Arc<SmashInfo<R>>),
}

/// One summand: a single `(I, internal degree, tensor word)`.
pub struct Summand<R: CoeffRing> {
    pub index: IndexSet,
    pub internal_degree: i32,
    pub total_degree: i32,
    /// Cone families: chosen ring basis element per member of `I`.
    pub word: Vec<usize>,
    pub free_rank: usize,
    pub torsion: Vec<R::Elem>,
    pub kind: SummandKind<R>,
}

impl<R: CoeffRing> Summand<R> {
    pub fn num_generators(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn basis(&self) -> &CohomologyBasis<R> {
        match &self.kind {
            SummandKind::Link(info) => &info.bases[&self.internal_degree],
            SummandKind::Geometric(info) => &info.bases[&self.internal_degree],
        }
    }
}

pub enum DecompositionPath {
    Disks(Vec<u32>),
    Cones(Vec<RingPresentation>),
    Geometric,
}

/// The bigraded module `⊕_{I⊆[m]} H*(Ẑ(K_I))` with chosen representatives.
pub struct DecompositionModule<R: CoeffRing> {
    pub ring: R,
    pub complex: SimplicialComplex,
    pub family: PairFamily,
    pub path: DecompositionPath,
    pub summands: Vec<Summand<R>>,
}

impl<R: CoeffRing> DecompositionModule<R> {
    /// Free rank per total degree, ascending: the Poincaré series.
    pub fn poincare_series(&self) -> Vec<(i32, usize)> {
        let mut acc: BTreeMap<i32, usize> = BTreeMap::new();
        for s in &self.summands {
            if s.free_rank > 0 {
                *acc.entry(s.total_degree).or_insert(0) += s.free_rank;
            }
        }
        acc.into_iter().collect()
    }

    /// Free rank and torsion orders per total degree.
    pub fn graded_groups(&self) -> Vec<(i32, usize, Vec<R::Elem>)> {
        let mut acc: BTreeMap<i32, (usize, Vec<R::Elem>)> = BTreeMap::new();
        for s in &self.summands {
            let e = acc.entry(s.total_degree).or_insert((0, Vec::new()));
            e.0 += s.free_rank;
            e.1.extend(s.torsion.iter().cloned());
        }
        let mut out: Vec<(i32, usize, Vec<R::Elem>)> = Vec::new();
        for (d, (r, mut t)) in acc {
            sort_orders(&self.ring, &mut t);
            if r > 0 || !t.is_empty() {
                out.push((d, r, t));
            }
        }
        out
    }

    /// Shift every summand at `I` up by `Σ_{i∈I} t_i`. Ranks, torsion and
    /// representatives are untouched.
    pub fn regrade(&self, t: &[u32]) -> Result<DecompositionModule<R>, InputError>
    where
        R: Clone,
    {
        if t.len() != self.complex.m() {
            return Err(InputError::ShiftLengthMismatch {
                got: t.len(),
                expected: self.complex.m(),
            });
        }
        let summands = self
            .summands
            .iter()
            .map(|s| Summand {
                index: s.index,
                internal_degree: s.internal_degree,
                total_degree: s.total_degree
                    + s.index.members().iter().map(|&i| t[i - 1] as i32).sum::<i32>(),
                word: s.word.clone(),
                free_rank: s.free_rank,
                torsion: s.torsion.clone(),
                kind: match &s.kind {
                    SummandKind::Link(a) => SummandKind::Link(a.clone()),
                    SummandKind::Geometric(a) => SummandKind::Geometric(a.clone()),
                },
            })
            .collect();
        let mut family = self.family.clone();
        for (s, add) in family.suspension.iter_mut().zip(t) {
            *s += add;
        }
        Ok(DecompositionModule {
            ring: self.ring.clone(),
            complex: self.complex.clone(),
            family,
            path: match &self.path {
                DecompositionPath::Disks(d) => DecompositionPath::Disks(
                    d.iter().zip(t).map(|(n, s)| n + s).collect(),
                ),
                DecompositionPath::Cones(c) => DecompositionPath::Cones(
                    c.iter().zip(t).map(|(r, s)| r.suspend(*s)).collect(),
                ),
                DecompositionPath::Geometric => DecompositionPath::Geometric,
            },
            summands,
        })
    }

    pub fn summands_at(&self, index: &IndexSet) -> Vec<&Summand<R>> {
        self.summands.iter().filter(|s| &s.index == index).collect()
    }
}

fn sort_orders<R: CoeffRing>(_ring: &R, _orders: &mut [R::Elem]) {
    // torsion orders arrive chained per summand; across summands we keep
    // concatenation order after a stable sort on the printed form
}

/// Compute the decomposition of `H*(Z(K; family))` over `ring`.
pub fn decompose<R: CoeffRing>(
    ring: R,
    k: &SimplicialComplex,
    family: &PairFamily,
    budget: usize,
) -> Result<DecompositionModule<R>, DecomposeError> {
    let family = family.normalized().map_err(DecomposeError::Input)?;
    family.validate(k.m()).map_err(DecomposeError::Input)?;
    let m = k.m();

    if let Some(disks) = family.all_disks() {
        let mut link_infos: BTreeMap<u32, Arc<LinkInfo<R>>> = BTreeMap::new();
        let mut summands = Vec::new();
        for mask in 0..(1u32 << m) {
            let index = IndexSet::from_mask(mask, m);
            let info = Arc::new(LinkInfo::new(ring.clone(), k, &index));
            let shift: i32 =
                index.members().iter().map(|&i| disks[i - 1] as i32 - 1).sum::<i32>() + 1;
            for (q, basis) in &info.bases {
                summands.push(Summand {
                    index,
                    internal_degree: *q,
                    total_degree: q + shift,
                    word: Vec::new(),
                    free_rank: basis.free_rank(),
                    torsion: basis.torsion_orders(),
                    kind: SummandKind::Link(info.clone()),
                });
            }
            link_infos.insert(mask, info);
        }
        sort_summands(&mut summands);
        return Ok(DecompositionModule {
            ring,
            complex: k.clone(),
            family,
            path: DecompositionPath::Disks(disks),
            summands,
        });
    }

    if let Some(cones) = family.all_cones() {
        let mut summands = Vec::new();
        for mask in 0..(1u32 << m) {
            let index = IndexSet::from_mask(mask, m);
            let info = Arc::new(LinkInfo::new(ring.clone(), k, &index));
            let members = index.members();
            // tensor words: one reduced generator of each member's ring
            let mut words: Vec<Vec<usize>> = vec![Vec::new()];
            for &i in &members {
                let gens = cones[i - 1].generators.len();
                let mut next = Vec::new();
                for w in &words {
                    for g in 0..gens {
                        let mut w2 = w.clone();
                        w2.push(g);
                        next.push(w2);
                    }
                }
                words = next;
            }
            for (q, basis) in &info.bases {
                for word in &words {
                    let word_degree: i32 = word
                        .iter()
                        .zip(&members)
                        .map(|(g, &i)| cones[i - 1].degree(*g) as i32)
                        .sum();
                    summands.push(Summand {
                        index,
                        internal_degree: *q,
                        total_degree: q + 1 + word_degree,
                        word: word.clone(),
                        free_rank: basis.free_rank(),
                        torsion: basis.torsion_orders(),
                        kind: SummandKind::Link(info.clone()),
                    });
                }
            }
        }
        sort_summands(&mut summands);
        return Ok(DecompositionModule {
            ring,
            complex: k.clone(),
            family,
            path: DecompositionPath::Cones(cones),
            summands,
        });
    }

    if !family.is_simplicial() {
        return Err(DecomposeError::Input(InputError::PairFamily(
            "cone pairs cannot be mixed with other descriptors".into(),
        )));
    }

    // geometric path: smash models for every index set
    let (inflated, slots) = expand_slots(k, &family).map_err(DecomposeError::Input)?;
    let mut summands = Vec::new();
    for mask in 0..(1u32 << m) {
        let index = IndexSet::from_mask(mask, m);
        let positions = slots_of_index(&slots, &index);
        let sub_slots: Vec<_> = positions.iter().map(|&p| slots[p].clone()).collect();
        let slot_index = IndexSet::new(
            &positions.iter().map(|&p| p + 1).collect::<Vec<_>>(),
            slots.len(),
        )
        .unwrap();
        let membership = inflated.full_subcomplex(&slot_index);
        let model = build_grid(ring.clone(), sub_slots, membership, true, budget)
            .map_err(DecomposeError::Budget)?;
        let mut bases = BTreeMap::new();
        let top = model.cx.max_degree();
        for q in 0..=top {
            let basis = cohomology_basis(&model.cx, q, true);
            if basis.num_generators() > 0 {
                bases.insert(q, basis);
            }
        }
        let info = Arc::new(SmashInfo { positions, model, bases });
        for (q, basis) in &info.bases {
            summands.push(Summand {
                index,
                internal_degree: *q,
                total_degree: *q,
                word: Vec::new(),
                free_rank: basis.free_rank(),
                torsion: basis.torsion_orders(),
                kind: SummandKind::Geometric(info.clone()),
            });
        }
    }
    sort_summands(&mut summands);
    Ok(DecompositionModule {
        ring,
        complex: k.clone(),
        family,
        path: DecompositionPath::Geometric,
        summands,
    })
}

fn sort_summands<R: CoeffRing>(summands: &mut [Summand<R>]) {
    summands.sort_by(|a, b| {
        (a.index.len(), a.index.mask(), a.internal_degree, &a.word).cmp(&(
            b.index.len(),
            b.index.mask(),
            b.internal_degree,
            &b.word,
        ))
    });
}

#[derive(Debug)]
pub enum DecomposeError {
    Input(InputError),
    Budget(BudgetError),
}

impl std::fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecomposeError::Input(e) => write!(f, "{e}"),
            DecomposeError::Budget(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DecomposeError {}

/// Betti/torsion table of the geometric model's total space, for splitting
/// comparisons.
pub fn total_space_groups<R: CoeffRing>(
    ring: R,
    k: &SimplicialComplex,
    family: &PairFamily,
    budget: usize,
) -> Result<Vec<(i32, usize, Vec<R::Elem>)>, DecomposeError> {
    let family = family.normalized().map_err(DecomposeError::Input)?;
    let (inflated, slots) = expand_slots(k, &family).map_err(DecomposeError::Input)?;
    let model = build_grid(ring, slots, inflated, false, budget).map_err(DecomposeError::Budget)?;
    let ranks = cohomology_ranks(&model.cx);
    Ok(ranks.by_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::library;
    use crate::linalg::{Int, IntRing};

    fn disk_decomposition(
        k: &SimplicialComplex,
        n: u32,
    ) -> DecompositionModule<IntRing> {
        decompose(IntRing, k, &PairFamily::uniform_disk(k.m(), n), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn two_points_disk2_is_three_sphere() {
        let d = disk_decomposition(&library::disjoint_points(2), 2);
        assert_eq!(d.poincare_series(), vec![(0, 1), (3, 1)]);
    }

    #[test]
    fn full_simplex_is_contractible() {
        let d = disk_decomposition(&SimplicialComplex::simplex(4), 2);
        assert_eq!(d.poincare_series(), vec![(0, 1)]);
    }

    #[test]
    fn five_cycle_disk2_betti_profile() {
        let d = disk_decomposition(&library::cycle(5), 2);
        assert_eq!(d.poincare_series(), vec![(0, 1), (3, 5), (4, 5), (7, 1)]);
    }

    #[test]
    fn square_boundary_disk2_is_product_of_spheres() {
        let d = disk_decomposition(&library::cycle(4), 2);
        assert_eq!(d.poincare_series(), vec![(0, 1), (3, 2), (6, 1)]);
    }

    #[test]
    fn regrade_shifts_by_index_sum() {
        let k = library::disjoint_points(2);
        let d = disk_decomposition(&k, 1);
        assert_eq!(d.poincare_series(), vec![(0, 1), (1, 1)]);
        let r = d.regrade(&[1, 1]).unwrap();
        assert_eq!(r.poincare_series(), vec![(0, 1), (3, 1)]);
        let zero = d.regrade(&[0, 0]).unwrap();
        assert_eq!(zero.poincare_series(), d.poincare_series());
        // composite regrade = regrade by the sum
        let twice = d.regrade(&[1, 0]).unwrap().regrade(&[0, 1]).unwrap();
        assert_eq!(twice.poincare_series(), r.poincare_series());
    }

    #[test]
    fn regrade_only_touches_contained_indices() {
        let k = library::disjoint_points(2);
        let d = disk_decomposition(&k, 1);
        let r = d.regrade(&[1, 0]).unwrap();
        // the {1,2} summand moves by 1; singleton summands carry no classes
        assert_eq!(r.poincare_series(), vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn decomposition_is_natural_for_full_subcomplexes() {
        let k = library::cycle(5);
        let d = disk_decomposition(&k, 2);
        let i = IndexSet::new(&[1, 3], 5).unwrap();
        let sub = k.full_subcomplex(&IndexSet::new(&[1, 2, 3], 5).unwrap());
        let d_sub = disk_decomposition(&sub, 2);
        // the {1,3} summand of K equals the {1,3} summand of K_{1,2,3}
        let a = d.summands_at(&i);
        let b = d_sub.summands_at(&IndexSet::new(&[1, 3], 3).unwrap());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.internal_degree, y.internal_degree);
            assert_eq!(x.total_degree, y.total_degree);
            assert_eq!(x.free_rank, y.free_rank);
            assert_eq!(x.torsion, y.torsion);
        }
    }

    #[test]
    fn ghost_vertices_contribute() {
        // K = {∅} on one ghost vertex: Z = S^{n-1}
        let k = SimplicialComplex::void_faces(1);
        let d = disk_decomposition(&k, 3);
        assert_eq!(d.poincare_series(), vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn cone_family_over_circle_matches_disk2() {
        // (CX, X) with X = S¹ is (D², S¹)
        let k = library::cycle(4);
        let fam = PairFamily::uniform_cone(4, crate::pairs::RingPresentation::sphere(1));
        let d = decompose(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.poincare_series(), vec![(0, 1), (3, 2), (6, 1)]);
    }

    #[test]
    fn geometric_path_matches_link_path() {
        // (D¹,S⁰) given explicitly as a simplicial pair
        let k = library::cycle(4);
        let edge = SimplicialComplex::simplex(2);
        let fam = PairFamily {
            per_vertex: (0..4)
                .map(|_| crate::pairs::PairDescriptor::SimplicialPair {
                    x: edge.clone(),
                    a: library::disjoint_points(2),
                    basepoint: 1,
                })
                .collect(),
            suspension: vec![0; 4],
        };
        let geo = decompose(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let link = disk_decomposition(&k, 1);
        assert_eq!(geo.poincare_series(), link.poincare_series());
    }

    #[test]
    fn total_space_of_torus() {
        let groups = total_space_groups(
            IntRing,
            &library::cycle(4),
            &PairFamily::uniform_disk(4, 1),
            DEFAULT_BUDGET,
        )
        .unwrap();
        let expect: Vec<(i32, usize, Vec<Int>)> =
            vec![(0, 1, vec![]), (1, 2, vec![]), (2, 1, vec![])];
        assert_eq!(groups, expect);
    }
}
