//! The geometric side: triangulated total and smash models, the cochain
//! realization of the projections and partial diagonals, and the verifiers
//! for the additive splitting and the ring identity
//! `Π̂*_I(u*v) = Π̂*_J(u) ⌣ Π̂*_L(v)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cochain::{Cochain, CochainComplex};
use crate::cohomology::{cohomology_ranks, express_modulo_image};
use crate::complex::{IndexSet, SimplicialComplex};
use crate::decomposition::{DecompositionModule, DecompositionPath, SummandKind};
use crate::error::InputError;
use crate::linalg::{
    image_membership, smith_normal_form, CoeffRing, SparseMat, SparseVec, TransformFlags,
};
use crate::model::{build_grid, cup_of_pullbacks, expand_slots, projection_pullback, GridModel, Slot};
use crate::pairs::PairFamily;
use crate::suspension::{inflate_cocycle, lift_to_smash};

pub struct SmashData<R: CoeffRing> {
    pub positions: Vec<usize>,
    pub model: GridModel<R>,
    /// Reduced complex of the smash membership complex (the lift source).
    pub link: CochainComplex<R>,
}

/// Triangulated models for one `(K, family)` pair: the total space and the
/// smash quotients for the requested index sets.
pub struct GeometricContext<R: CoeffRing> {
    pub ring: R,
    pub k: SimplicialComplex,
    pub family: PairFamily,
    pub slots: Vec<Slot>,
    pub inflated: SimplicialComplex,
    pub total: Option<GridModel<R>>,
    pub smash: BTreeMap<u32, SmashData<R>>,
    pub budget: usize,
}

#[derive(Debug)]
pub enum GeometryError {
    Input(InputError),
    Budget(crate::error::BudgetError),
}

impl std::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeometryError::Input(e) => write!(f, "{e}"),
            GeometryError::Budget(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GeometryError {}

impl<R: CoeffRing> GeometricContext<R> {
    /// Build the total model and the smash models for every `I ⊆ [m]`.
    pub fn full(
        ring: R,
        k: &SimplicialComplex,
        family: &PairFamily,
        budget: usize,
    ) -> Result<Self, GeometryError> {
        let mut ctx = Self::empty(ring, k, family, budget)?;
        ctx.build_total()?;
        for mask in 0..(1u32 << k.m()) {
            ctx.ensure_smash(mask)?;
        }
        Ok(ctx)
    }

    /// Context with no models yet; they are built on demand.
    pub fn empty(
        ring: R,
        k: &SimplicialComplex,
        family: &PairFamily,
        budget: usize,
    ) -> Result<Self, GeometryError> {
        let family = family.normalized().map_err(GeometryError::Input)?;
        let (inflated, slots) = expand_slots(k, &family).map_err(GeometryError::Input)?;
        Ok(GeometricContext {
            ring,
            k: k.clone(),
            family,
            slots,
            inflated,
            total: None,
            smash: BTreeMap::new(),
            budget,
        })
    }

    pub fn build_total(&mut self) -> Result<(), GeometryError> {
        if self.total.is_none() {
            let model = build_grid(
                self.ring.clone(),
                self.slots.clone(),
                self.inflated.clone(),
                false,
                self.budget,
            )
            .map_err(GeometryError::Budget)?;
            self.total = Some(model);
        }
        Ok(())
    }

    pub fn ensure_smash(&mut self, mask: u32) -> Result<&SmashData<R>, GeometryError> {
        if !self.smash.contains_key(&mask) {
            let index = IndexSet::from_mask(mask, self.k.m());
            let positions = crate::model::slots_of_index(&self.slots, &index);
            let sub_slots: Vec<Slot> = positions.iter().map(|&p| self.slots[p].clone()).collect();
            let slot_index = IndexSet::new(
                &positions.iter().map(|&p| p + 1).collect::<Vec<_>>(),
                self.slots.len(),
            )
            .unwrap();
            let membership = self.inflated.full_subcomplex(&slot_index);
            let link = CochainComplex::reduced(self.ring.clone(), &membership);
            let model = build_grid(
                self.ring.clone(),
                sub_slots,
                membership,
                true,
                self.budget,
            )
            .map_err(GeometryError::Budget)?;
            self.smash.insert(mask, SmashData { positions, model, link });
        }
        Ok(&self.smash[&mask])
    }

    pub fn smash_data(&self, mask: u32) -> &SmashData<R> {
        &self.smash[&mask]
    }

    /// Realize a decomposition generator as a relative cocycle on the smash
    /// model of its index set.
    pub fn smash_cocycle(
        &self,
        module: &DecompositionModule<R>,
        summand_idx: usize,
        position: usize,
    ) -> Cochain<R::Elem> {
        let s = &module.summands[summand_idx];
        match &s.kind {
            SummandKind::Geometric(_) => s.basis().generator(position).clone(),
            SummandKind::Link(info) => {
                let mask = s.index.mask();
                let data = &self.smash[&mask];
                let c = s.basis().generator(position);
                let mult: Vec<usize> = match &module.path {
                    DecompositionPath::Disks(d) => {
                        s.index.members().iter().map(|&i| d[i - 1] as usize).collect()
                    }
                    _ => vec![1; s.index.len()],
                };
                let (inflated_link, lifted) = inflate_cocycle(&self.ring, &info.k_i, &mult, c);
                debug_assert_eq!(inflated_link, data.model.membership);
                lift_to_smash(&self.ring, &data.model, &data.link, &lifted)
            }
        }
    }

    /// η of a generator: the smash cocycle pulled back to the total model.
    pub fn eta_cocycle(
        &self,
        module: &DecompositionModule<R>,
        summand_idx: usize,
        position: usize,
    ) -> Cochain<R::Elem> {
        let s = &module.summands[summand_idx];
        let data = &self.smash[&s.index.mask()];
        let total = self.total.as_ref().expect("total model not built");
        let u = self.smash_cocycle(module, summand_idx, position);
        projection_pullback(&self.ring, total, &data.positions, &data.model, &u)
    }

    /// The star product of smash-model cocycles `u` (at `J`) and `v` (at
    /// `L`), as a relative cocycle on the smash model of `J ∪ L`: the
    /// partial-diagonal pullback of the cross product.
    pub fn geometric_star(
        &self,
        j_mask: u32,
        u: &Cochain<R::Elem>,
        l_mask: u32,
        v: &Cochain<R::Elem>,
    ) -> Cochain<R::Elem> {
        let i_mask = j_mask | l_mask;
        let target = &self.smash[&i_mask];
        let dj = &self.smash[&j_mask];
        let dl = &self.smash[&l_mask];
        // positions of the J-slots (and L-slots) within the I-model's slots
        let j_in_i = positions_within(&target.positions, &dj.positions);
        let l_in_i = positions_within(&target.positions, &dl.positions);
        let prod = cup_of_pullbacks(
            &self.ring,
            &target.model,
            &j_in_i,
            &dj.model,
            u,
            &l_in_i,
            &dl.model,
            v,
        );
        debug_assert!(target.model.cx.is_cocycle(&prod));
        prod
    }
}

fn positions_within(ambient: &[usize], sub: &[usize]) -> Vec<usize> {
    sub.iter()
        .map(|p| ambient.iter().position(|q| q == p).expect("slot not in ambient model"))
        .collect()
}

/// Outcome of the additive splitting check.
pub struct SplittingReport<E> {
    /// degree -> (decomposition, sum of smash models, total model):
    /// (free rank, torsion orders) each.
    pub rows: Vec<SplittingRow<E>>,
    pub eta_rank: Option<EtaRankCheck>,
    pub pass: bool,
}

pub struct SplittingRow<E> {
    pub degree: i32,
    pub decomposition: (usize, Vec<E>),
    pub smash_sum: (usize, Vec<E>),
    pub total: (usize, Vec<E>),
    pub pass: bool,
}

pub struct EtaRankCheck {
    pub expected: usize,
    pub got: usize,
    pub pass: bool,
}

/// Compare the decomposition's graded groups against the direct sum of the
/// smash models and against the total space, degree by degree; over fields
/// additionally check that η is injective (the pulled-back generators stay
/// independent modulo coboundaries).
pub fn verify_splitting<R: CoeffRing>(
    ctx: &GeometricContext<R>,
    module: &DecompositionModule<R>,
) -> SplittingReport<R::Elem> {
    let ring = &ctx.ring;
    let total = ctx.total.as_ref().expect("total model not built");
    let decomp = module.graded_groups();
    // sum over smash models
    let mut smash_acc: BTreeMap<i32, (usize, Vec<R::Elem>)> = BTreeMap::new();
    for data in ctx.smash.values() {
        for (d, r, t) in cohomology_ranks(&data.model.cx).by_degree {
            let e = smash_acc.entry(d).or_insert((0, Vec::new()));
            e.0 += r;
            e.1.extend(t);
        }
    }
    let total_groups = cohomology_ranks(&total.cx).by_degree;

    let mut degrees: Vec<i32> = Vec::new();
    degrees.extend(decomp.iter().map(|(d, _, _)| *d));
    degrees.extend(smash_acc.keys().copied());
    degrees.extend(total_groups.iter().map(|(d, _, _)| *d));
    degrees.sort_unstable();
    degrees.dedup();

    let torsion_key = |t: &[R::Elem]| -> Vec<String> {
        let mut v: Vec<String> = t.iter().map(|x| ring.elem_string(x)).collect();
        v.sort();
        v
    };

    let mut rows = Vec::new();
    let mut pass = true;
    for d in degrees {
        let a = decomp
            .iter()
            .find(|(x, _, _)| *x == d)
            .map(|(_, r, t)| (*r, t.clone()))
            .unwrap_or((0, Vec::new()));
        let b = smash_acc.get(&d).cloned().unwrap_or((0, Vec::new()));
        let c = total_groups
            .iter()
            .find(|(x, _, _)| *x == d)
            .map(|(_, r, t)| (*r, t.clone()))
            .unwrap_or((0, Vec::new()));
        let ok = a.0 == b.0
            && b.0 == c.0
            && torsion_key(&a.1) == torsion_key(&b.1)
            && torsion_key(&b.1) == torsion_key(&c.1);
        pass &= ok;
        rows.push(SplittingRow { degree: d, decomposition: a, smash_sum: b, total: c, pass: ok });
    }

    // η-injectivity over fields
    let eta_rank = if ring.is_field() {
        let mut expected = 0;
        let mut got = 0;
        let mut by_degree: BTreeMap<i32, Vec<SparseVec<R::Elem>>> = BTreeMap::new();
        for (si, s) in module.summands.iter().enumerate() {
            for pos in 0..s.num_generators() {
                let z = ctx.eta_cocycle(module, si, pos);
                by_degree.entry(s.total_degree).or_default().push(z.vec);
            }
        }
        for (d, gens) in by_degree {
            expected += gens.len();
            let delta = total.cx.delta(d - 1);
            let n = total.cx.num_cells(d);
            // rank of [gens | delta] minus rank of delta = independent gens
            let rank_delta = smith_normal_form(ring, &delta, TransformFlags::NONE).rank;
            let mut triplets: Vec<(usize, usize, R::Elem)> = Vec::new();
            for (c, g) in gens.iter().enumerate() {
                for (r, e) in g.iter() {
                    triplets.push((*r, c, e.clone()));
                }
            }
            for (r, c, e) in delta.iter_entries() {
                triplets.push((r, c + gens.len(), e.clone()));
            }
            let aug =
                SparseMat::from_triplets(ring, n, gens.len() + delta.ncols, triplets);
            let rank_aug = smith_normal_form(ring, &aug, TransformFlags::NONE).rank;
            got += rank_aug - rank_delta;
        }
        let ok = expected == got;
        pass &= ok;
        Some(EtaRankCheck { expected, got, pass: ok })
    } else {
        None
    };

    SplittingReport { rows, eta_rank, pass }
}

/// One compared generator pair in the ring verification.
pub struct EtaPairResult<E> {
    pub left_gen: usize,
    pub right_gen: usize,
    pub degree: i32,
    pub pass: bool,
    /// On failure: printable witnesses (the two cochains).
    pub witness: Option<(String, String)>,
    pub detail: E,
}

pub struct EtaRingReport {
    pub pairs: Vec<(usize, usize, i32, bool)>,
    pub failures: Vec<EtaFailure>,
    pub pass: bool,
}

pub struct EtaFailure {
    pub left_gen: usize,
    pub right_gen: usize,
    pub degree: i32,
    pub lhs: String,
    pub rhs: String,
}

/// Generators of the star ring paired with their table, as needed here.
pub struct TableView<'a, R: CoeffRing> {
    pub module: &'a DecompositionModule<R>,
    /// flattened generators: (summand index, position, total degree)
    pub generators: &'a [(usize, usize, i32)],
    /// table[i][j] = expansion of g_i * g_j over generator indices
    pub entry: &'a dyn Fn(usize, usize) -> Vec<(usize, R::Elem)>,
}

/// Verify `Π̂*_I(u*v) = Π̂*_J(u) ⌣ Π̂*_L(v)` for every ordered generator
/// pair, comparing cohomology classes in the total model exactly.
pub fn verify_eta_ring<R: CoeffRing>(
    ctx: &GeometricContext<R>,
    view: &TableView<R>,
) -> EtaRingReport {
    let ring = &ctx.ring;
    let total = ctx.total.as_ref().expect("total model not built");
    let module = view.module;
    let n = view.generators.len();

    // per-generator cocycles
    let smash_cocycles: Vec<Cochain<R::Elem>> = view
        .generators
        .iter()
        .map(|(si, pos, _)| ctx.smash_cocycle(module, *si, *pos))
        .collect();
    let eta: Vec<Cochain<R::Elem>> = view
        .generators
        .iter()
        .enumerate()
        .map(|(gi, (si, pos, _))| {
            let _ = gi;
            let s = &module.summands[*si];
            let data = &ctx.smash[&s.index.mask()];
            projection_pullback(
                ring,
                total,
                &data.positions,
                &data.model,
                &smash_cocycles[view
                    .generators
                    .iter()
                    .position(|(a, b, _)| (a, b) == (si, pos))
                    .unwrap()],
            )
        })
        .collect();

    // gather differences by total degree
    let mut buckets: BTreeMap<i32, Vec<(usize, usize, SparseVec<R::Elem>, String, String)>> =
        BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let (si, _, di) = view.generators[i];
            let (sj, _, dj) = view.generators[j];
            let jm = module.summands[si].index.mask();
            let lm = module.summands[sj].index.mask();
            let degree = di + dj;
            // LHS: η of the table entry
            let mut lhs = Cochain::zero(degree);
            for (g, c) in (view.entry)(i, j) {
                lhs = lhs.add(ring, &eta[g].scale(ring, &c));
            }
            // RHS: cup of pullbacks in the total model
            let dj_data = &ctx.smash[&jm];
            let dl_data = &ctx.smash[&lm];
            let rhs = cup_of_pullbacks(
                ring,
                total,
                &dj_data.positions,
                &dj_data.model,
                &smash_cocycles[i],
                &dl_data.positions,
                &dl_data.model,
                &smash_cocycles[j],
            );
            let diff = lhs.vec.sub(ring, &rhs.vec);
            let lhs_str = cochain_string(ring, &lhs.vec);
            let rhs_str = cochain_string(ring, &rhs.vec);
            buckets.entry(degree).or_default().push((i, j, diff, lhs_str, rhs_str));
        }
    }

    let mut pairs = Vec::new();
    let mut failures = Vec::new();
    let mut pass = true;
    for (degree, items) in buckets {
        let delta = total.cx.delta(degree - 1);
        let riders: Vec<SparseVec<R::Elem>> =
            items.iter().map(|(_, _, d, _, _)| d.clone()).collect();
        let verdicts = image_membership(ring, &delta, &riders);
        for ((i, j, _, lhs, rhs), ok) in items.into_iter().zip(verdicts) {
            pairs.push((i, j, degree, ok));
            if !ok {
                pass = false;
                failures.push(EtaFailure { left_gen: i, right_gen: j, degree, lhs, rhs });
            }
        }
    }
    EtaRingReport { pairs, failures, pass }
}

fn cochain_string<R: CoeffRing>(ring: &R, v: &SparseVec<R::Elem>) -> String {
    let mut out = String::new();
    for (i, (idx, e)) in v.iter().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        let _ = write!(out, "{}·c{}", ring.elem_string(e), idx);
        if i > 12 {
            out.push_str(" + ...");
            break;
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// The oracle multiplication table: cup products of the pulled-back
/// generators, expressed in the pulled-back basis itself. Returns
/// `None` coefficients when a product cannot be expressed (which falsifies
/// the decomposition and is reported by the caller).
pub fn direct_ring<R: CoeffRing>(
    ctx: &GeometricContext<R>,
    view: &TableView<R>,
) -> Vec<Vec<Option<Vec<(usize, R::Elem)>>>> {
    let ring = &ctx.ring;
    let total = ctx.total.as_ref().expect("total model not built");
    let module = view.module;
    let n = view.generators.len();
    let smash_cocycles: Vec<Cochain<R::Elem>> = view
        .generators
        .iter()
        .map(|(si, pos, _)| ctx.smash_cocycle(module, *si, *pos))
        .collect();
    let eta: Vec<Cochain<R::Elem>> = (0..n)
        .map(|i| {
            let (si, _, _) = view.generators[i];
            let s = &module.summands[si];
            let data = &ctx.smash[&s.index.mask()];
            projection_pullback(ring, total, &data.positions, &data.model, &smash_cocycles[i])
        })
        .collect();

    // degree -> generator indices
    let mut gens_by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, (_, _, d)) in view.generators.iter().enumerate() {
        gens_by_degree.entry(*d).or_default().push(i);
    }

    // products by degree
    let mut prod_by_degree: BTreeMap<i32, Vec<(usize, usize, SparseVec<R::Elem>)>> =
        BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let (si, _, di) = view.generators[i];
            let (sj, _, dj) = view.generators[j];
            let dj_data = &ctx.smash[&module.summands[si].index.mask()];
            let dl_data = &ctx.smash[&module.summands[sj].index.mask()];
            let rhs = cup_of_pullbacks(
                ring,
                total,
                &dj_data.positions,
                &dj_data.model,
                &smash_cocycles[i],
                &dl_data.positions,
                &dl_data.model,
                &smash_cocycles[j],
            );
            prod_by_degree.entry(di + dj).or_default().push((i, j, rhs.vec));
        }
    }

    let mut out: Vec<Vec<Option<Vec<(usize, R::Elem)>>>> =
        vec![vec![None; n]; n];
    for (degree, items) in prod_by_degree {
        let gen_ids = gens_by_degree.get(&degree).cloned().unwrap_or_default();
        let gen_vecs: Vec<SparseVec<R::Elem>> =
            gen_ids.iter().map(|&g| eta[g].vec.clone()).collect();
        let delta = total.cx.delta(degree - 1);
        let targets: Vec<SparseVec<R::Elem>> =
            items.iter().map(|(_, _, v)| v.clone()).collect();
        let solutions = express_modulo_image(ring, &delta, &gen_vecs, &targets);
        for ((i, j, _), sol) in items.into_iter().zip(solutions) {
            out[i][j] = sol.map(|coeffs| {
                let mut entry: Vec<(usize, R::Elem)> = Vec::new();
                for (k, c) in coeffs.into_iter().enumerate() {
                    let gen = gen_ids[k];
                    // reduce torsion coefficients modulo the generator order
                    let (sgen, pgen, _) = view.generators[gen];
                    let c = match module.summands[sgen].basis().generator_order(pgen) {
                        Some(d) => ring.rem_mod(&c, d),
                        None => c,
                    };
                    if !ring.is_zero(&c) {
                        entry.push((gen, c));
                    }
                }
                entry.sort_by_key(|(g, _)| *g);
                entry
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::cohomology_basis;
    use crate::complex::library;
    use crate::decomposition::{decompose, DEFAULT_BUDGET};
    use crate::linalg::IntRing;

    #[test]
    fn splitting_two_points_disk2() {
        let k = library::disjoint_points(2);
        let fam = PairFamily::uniform_disk(2, 2);
        let module = decompose(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let ctx = GeometricContext::full(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let report = verify_splitting(&ctx, &module);
        assert!(report.pass, "splitting failed");
    }

    #[test]
    fn splitting_five_cycle_disk1() {
        let k = library::cycle(5);
        let fam = PairFamily::uniform_disk(5, 1);
        let module = decompose(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let ctx = GeometricContext::full(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let report = verify_splitting(&ctx, &module);
        assert!(report.pass);
    }

    #[test]
    fn eta_cocycles_are_cocycles() {
        let k = library::cycle(4);
        let fam = PairFamily::uniform_disk(4, 1);
        let module = decompose(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let ctx = GeometricContext::full(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let total = ctx.total.as_ref().unwrap();
        for (si, s) in module.summands.iter().enumerate() {
            for pos in 0..s.num_generators() {
                let z = ctx.eta_cocycle(&module, si, pos);
                assert!(total.cx.is_cocycle(&z), "η image not a cocycle at {:?}", s.index);
                assert_eq!(z.degree, s.total_degree);
            }
        }
    }

    #[test]
    fn geometric_star_lands_in_cocycles() {
        let k = library::cycle(4);
        let fam = PairFamily::uniform_disk(4, 1);
        let module = decompose(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let ctx = GeometricContext::full(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        // the two diagonal pairs of the square boundary
        let j = IndexSet::new(&[1, 3], 4).unwrap();
        let l = IndexSet::new(&[2, 4], 4).unwrap();
        let (sj, _) = module
            .summands
            .iter()
            .enumerate()
            .find(|(_, s)| s.index == j && s.num_generators() > 0)
            .map(|(i, s)| (i, s))
            .unwrap();
        let (sl, _) = module
            .summands
            .iter()
            .enumerate()
            .find(|(_, s)| s.index == l && s.num_generators() > 0)
            .map(|(i, s)| (i, s))
            .unwrap();
        let u = ctx.smash_cocycle(&module, sj, 0);
        let v = ctx.smash_cocycle(&module, sl, 0);
        let prod = ctx.geometric_star(j.mask(), &u, l.mask(), &v);
        // the product of the two degree-1 torus classes is a fundamental class
        let target = &ctx.smash[&j.union(&l).mask()];
        let basis = cohomology_basis(&target.model.cx, 2, true);
        assert_eq!(basis.free_rank(), 1);
        let coords = basis.express(&IntRing, &prod).unwrap();
        assert!(IntRing.is_unit(&coords.free[0]), "torus product must be a generator, got {coords:?}");
    }
}
