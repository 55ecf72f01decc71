//! The star product on the decomposition and the full multiplication table.
//!
//! Products of classes at disjoint index sets follow the join cochain
//! formula on the full subcomplexes; overlapping index sets are zero for
//! suspension families, follow the tensor formula for cone families, and
//! fall back to the triangulated models otherwise (where no combinatorial
//! formula exists).

use std::collections::BTreeMap;

use crate::cochain::{Cochain, CochainComplex};
use crate::cohomology::{cohomology_basis, ClassCoords, CohomologyBasis};
use crate::complex::{IndexSet, SimplicialComplex};
use crate::decomposition::{
    decompose, DecompositionModule, DecompositionPath, Summand, SummandKind,
};
use crate::error::InputError;
use crate::geometry::{GeometricContext, GeometryError};
use crate::linalg::{solve_in_image, CoeffRing, SparseMat, SparseVec};
use crate::pairs::{PairFamily, RingPresentation};
use crate::suspension::{inflate_cocycle, lift_to_smash};

/// Sign convention of the disjoint star product at slot level (where every
/// summand shift is one suspension coordinate): unitality forces the
/// exponent to be a multiple of (p+1)(q+1), so exactly two conventions
/// remain. The triangulated oracle fixes the multiplier; see the tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct StarSignConvention(pub bool);

/// Frozen convention, fitted against the triangulated cup products over the
/// integers: the shuffle sign alone, no extra Koszul factor. (Unitality
/// allows only the exponents 0 and (p+1)(q+1); the cup products of the
/// staircase models select the former.)
pub(crate) const STAR_SIGN: StarSignConvention = StarSignConvention(false);

impl StarSignConvention {
    pub(crate) fn sign(&self, p: i32, q: i32) -> i64 {
        if !self.0 {
            return 1;
        }
        if ((p + 1) * (q + 1)).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

/// Shuffle sign: (-1)^{inversions between the J-part and the L-part of σ}.
fn shuffle_sign(sigma_j: &[usize], sigma_l: &[usize]) -> i64 {
    let mut inv = 0usize;
    for &a in sigma_j {
        for &b in sigma_l {
            if a > b {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The disjoint star product at the level of full-subcomplex cocycles:
/// `(u*v)(σ) = sign · ε(σ,J,L) · u(σ∩J) · v(σ∩L)`.
///
/// `u` is a reduced p-cocycle on `K_J` (re-indexed), `v` a q-cocycle on
/// `K_L`; the result is a (p+q+1)-cochain on `K_{J∪L}`. For disk families
/// the formula is applied on the vertex-multiplied complexes, where each
/// summand carries a single suspension coordinate.
#[allow(clippy::too_many_arguments)]
pub(crate) fn star_disjoint_cochain<R: CoeffRing>(
    ring: &R,
    j: &IndexSet,
    l: &IndexSet,
    cx_j: &CochainComplex<R>,
    cx_l: &CochainComplex<R>,
    cx_i: &CochainComplex<R>,
    u: &Cochain<R::Elem>,
    v: &Cochain<R::Elem>,
    convention: StarSignConvention,
) -> Result<Cochain<R::Elem>, InputError> {
    if !j.is_disjoint(l) {
        return Err(InputError::OverlappingIndexSets(j.intersection(l).members()));
    }
    let i = j.union(l);
    let members = i.members();
    let (p, q) = (u.degree, v.degree);
    let target = p + q + 1;
    let conv = convention.sign(p, q);
    let mut out: Vec<(usize, R::Elem)> = Vec::new();
    for (idx, cell) in cx_i.cells_in(target).iter().enumerate() {
        // split the ambient labels of σ into the J and L parts
        let mut amb_j: Vec<usize> = Vec::new();
        let mut amb_l: Vec<usize> = Vec::new();
        let mut pos_j: Vec<u32> = Vec::new();
        let mut pos_l: Vec<u32> = Vec::new();
        for &w in cell.iter() {
            let ambient = members[(w - 1) as usize];
            if j.contains(ambient) {
                amb_j.push(ambient);
                pos_j.push(j.position(ambient).unwrap() as u32 + 1);
            } else {
                amb_l.push(ambient);
                pos_l.push(l.position(ambient).unwrap() as u32 + 1);
            }
        }
        if pos_j.len() != (p + 1) as usize || pos_l.len() != (q + 1) as usize {
            continue;
        }
        let Some(ju) = cx_j.cell_index(p, &pos_j) else { continue };
        let Some(lv) = cx_l.cell_index(q, &pos_l) else { continue };
        let (Some(a), Some(b)) = (u.vec.get(ju), v.vec.get(lv)) else {
            continue;
        };
        let prod = ring.mul(a, b);
        if ring.is_zero(&prod) {
            continue;
        }
        let s = shuffle_sign(&amb_j, &amb_l) * conv;
        let prod = if s < 0 { ring.neg(&prod) } else { prod };
        out.push((idx, prod));
    }
    Ok(Cochain { degree: target, vec: SparseVec::from_sorted(out) })
}

/// One generator of the star ring.
#[derive(Clone, Debug)]
pub struct StarGenerator<E> {
    pub summand: usize,
    pub position: usize,
    pub index_mask: u32,
    pub internal_degree: i32,
    pub total_degree: i32,
    pub order: Option<E>,
}

/// How a table entry was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductPath {
    Unit,
    Disjoint,
    SuspensionZero,
    Cone,
    Geometric,
}

#[derive(Clone, Debug)]
pub struct ProductEntry<E> {
    pub coeffs: Vec<(usize, E)>,
    pub path: ProductPath,
}

/// The graded ring presentation: generators tagged by (I, degree) and the
/// complete table of pairwise products.
pub struct StarRing<R: CoeffRing> {
    pub module: DecompositionModule<R>,
    pub generators: Vec<StarGenerator<R::Elem>>,
    pub table: Vec<Vec<ProductEntry<R::Elem>>>,
}

#[derive(Debug)]
pub enum StarError {
    Input(InputError),
    Geometry(GeometryError),
    Decompose(crate::decomposition::DecomposeError),
    /// A product cochain could not be expressed in the target summand basis:
    /// this falsifies the decomposition and is never expected.
    Expression { left: usize, right: usize },
}

impl std::fmt::Display for StarError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StarError::Input(e) => write!(f, "{e}"),
            StarError::Geometry(e) => write!(f, "{e}"),
            StarError::Decompose(e) => write!(f, "{e}"),
            StarError::Expression { left, right } => {
                write!(f, "product of generators {left} and {right} escapes the target summand")
            }
        }
    }
}

impl std::error::Error for StarError {}

impl<R: CoeffRing> StarRing<R> {
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Table entry for an ordered generator pair.
    pub fn product_of(&self, i: usize, j: usize) -> &ProductEntry<R::Elem> {
        &self.table[i][j]
    }

    /// Bilinear extension to ring elements (generator-index / coefficient
    /// pairs). Torsion coefficients are reduced modulo the target order.
    pub fn star_product(
        &self,
        u: &[(usize, R::Elem)],
        v: &[(usize, R::Elem)],
    ) -> Vec<(usize, R::Elem)> {
        let ring = &self.module.ring;
        let mut acc: BTreeMap<usize, R::Elem> = BTreeMap::new();
        for (gi, a) in u {
            for (gj, b) in v {
                let c = ring.mul(a, b);
                if ring.is_zero(&c) {
                    continue;
                }
                for (gk, e) in &self.table[*gi][*gj].coeffs {
                    let add = ring.mul(&c, e);
                    let cur = acc.get(gk).cloned().unwrap_or_else(|| ring.zero());
                    acc.insert(*gk, ring.add(&cur, &add));
                }
            }
        }
        let mut out: Vec<(usize, R::Elem)> = Vec::new();
        for (g, e) in acc {
            let e = self.reduce_coeff(g, e);
            if !ring.is_zero(&e) {
                out.push((g, e));
            }
        }
        out
    }

    pub fn reduce_coeff(&self, g: usize, e: R::Elem) -> R::Elem {
        match &self.generators[g].order {
            Some(d) => self.module.ring.rem_mod(&e, d),
            None => e,
        }
    }

    /// Graded commutativity of the whole table, exactly.
    pub fn check_graded_commutative(&self) -> Result<(), String> {
        let ring = &self.module.ring;
        let n = self.generators.len();
        for i in 0..n {
            for j in 0..n {
                let sign = (self.generators[i].total_degree * self.generators[j].total_degree)
                    .rem_euclid(2);
                let mut rhs: Vec<(usize, R::Elem)> = self.table[j][i]
                    .coeffs
                    .iter()
                    .map(|(g, c)| {
                        let c = if sign == 1 { ring.neg(c) } else { c.clone() };
                        (*g, self.reduce_coeff(*g, c))
                    })
                    .filter(|(_, c)| !ring.is_zero(c))
                    .collect();
                rhs.sort_by_key(|(g, _)| *g);
                let lhs: Vec<(usize, R::Elem)> = self.table[i][j]
                    .coeffs
                    .iter()
                    .map(|(g, c)| (*g, self.reduce_coeff(*g, c.clone())))
                    .filter(|(_, c)| !ring.is_zero(c))
                    .collect();
                if lhs != rhs {
                    return Err(format!(
                        "graded commutativity fails at generators {i}, {j}: {lhs:?} vs {rhs:?}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Associativity on all generator triples, exactly.
    pub fn check_associative(&self) -> Result<(), String> {
        let ring = &self.module.ring;
        let n = self.generators.len();
        for i in 0..n {
            for j in 0..n {
                let ij = &self.table[i][j].coeffs;
                for k in 0..n {
                    let jk = &self.table[j][k].coeffs;
                    let left = self.star_product(ij, &[(k, ring.one())]);
                    let right = self.star_product(&[(i, ring.one())], jk);
                    if left != right {
                        return Err(format!(
                            "associativity fails at generators {i}, {j}, {k}: {left:?} vs {right:?}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every product lands in the J ∪ L summand with additive total degree.
    pub fn check_targets(&self) -> Result<(), String> {
        for (i, gi) in self.generators.iter().enumerate() {
            for (j, gj) in self.generators.iter().enumerate() {
                let union = gi.index_mask | gj.index_mask;
                let degree = gi.total_degree + gj.total_degree;
                for (g, _) in &self.table[i][j].coeffs {
                    let gt = &self.generators[*g];
                    if gt.index_mask != union {
                        return Err(format!(
                            "product of {i}, {j} lands outside the union summand"
                        ));
                    }
                    if gt.total_degree != degree {
                        return Err(format!("product of {i}, {j} breaks degree additivity"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Internal cache for expressing geometric products back in link bases.
struct DiskSummandCache<R: CoeffRing> {
    /// smash-model cohomology basis at the summand's total degree
    smash_basis: CohomologyBasis<R>,
    /// class coordinates of the lifted link generators
    gen_coords: Vec<ClassCoords<R::Elem>>,
}

/// Slot-level data for disk-family products at one index set: the vertex
/// multiplication of `K_I` together with the suspension images of the
/// public generators.
struct InflatedLink<R: CoeffRing> {
    complex: SimplicialComplex,
    cx: CochainComplex<R>,
    /// slot positions (1-based within the inflated complex) per original
    /// member of `I`, grouped consecutively
    slot_of_vertex: Vec<Vec<usize>>,
    /// suspension images of the public generators, keyed by (internal q, pos)
    chi: BTreeMap<(i32, usize), Cochain<R::Elem>>,
    /// per slot-level degree: basis with expression and the coordinates of
    /// the suspension images of the public generators of that level
    levels: BTreeMap<i32, InflatedLevel<R>>,
}

struct InflatedLevel<R: CoeffRing> {
    basis: CohomologyBasis<R>,
    gen_coords: Vec<ClassCoords<R::Elem>>,
}

fn inflated_link<'a, R: CoeffRing>(
    ring: &R,
    module: &DecompositionModule<R>,
    disks: &[u32],
    cache: &'a mut BTreeMap<u32, InflatedLink<R>>,
    index: &IndexSet,
) -> &'a mut InflatedLink<R> {
    let mask = index.mask();
    if !cache.contains_key(&mask) {
        let members = index.members();
        let mult: Vec<usize> = members.iter().map(|&v| disks[v - 1] as usize).collect();
        // rebuild the link data; this is the same deterministic computation
        // that produced the summand bases
        let info = crate::decomposition::LinkInfo::new(ring.clone(), &module.complex, index);
        let complex = info.k_i.inflate(&mult);
        let cx = CochainComplex::reduced(ring.clone(), &complex);
        let mut slot_of_vertex = Vec::new();
        let mut next = 1usize;
        for &w in &mult {
            slot_of_vertex.push((next..next + w).collect());
            next += w;
        }
        // suspension images of every public generator at this index set
        let mut chi = BTreeMap::new();
        for (q, basis) in &info.bases {
            for pos in 0..basis.num_generators() {
                let (inflated, lifted) =
                    inflate_cocycle(ring, &info.k_i, &mult, basis.generator(pos));
                debug_assert_eq!(inflated, complex);
                chi.insert((*q, pos), lifted);
            }
        }
        cache.insert(
            mask,
            InflatedLink { complex, cx, slot_of_vertex, chi, levels: BTreeMap::new() },
        );
    }
    cache.get_mut(&mask).unwrap()
}

fn inflated_level<'a, R: CoeffRing>(
    ring: &R,
    link: &'a mut InflatedLink<R>,
    level_degree: i32,
) -> &'a InflatedLevel<R> {
    if !link.levels.contains_key(&level_degree) {
        let basis = cohomology_basis(&link.cx, level_degree, true);
        let mut gen_coords = Vec::new();
        // public generators at this level, in public order
        let mut keys: Vec<(i32, usize)> = link
            .chi
            .keys()
            .filter(|(_, _)| true)
            .cloned()
            .collect();
        keys.sort();
        for key in keys {
            let c = &link.chi[&key];
            if c.degree == level_degree {
                gen_coords.push(
                    basis
                        .express(ring, c)
                        .expect("suspension image must be a cocycle"),
                );
            }
        }
        link.levels.insert(level_degree, InflatedLevel { basis, gen_coords });
    }
    &link.levels[&level_degree]
}

/// Build the full multiplication table of the star ring.
pub fn multiplication_table<R: CoeffRing>(
    ring: R,
    k: &SimplicialComplex,
    family: &PairFamily,
    budget: usize,
) -> Result<StarRing<R>, StarError> {
    let module =
        decompose(ring.clone(), k, family, budget).map_err(StarError::Decompose)?;
    multiplication_table_of(module, budget)
}

pub fn multiplication_table_of<R: CoeffRing>(
    module: DecompositionModule<R>,
    budget: usize,
) -> Result<StarRing<R>, StarError> {
    let ring = module.ring.clone();
    // flatten generators
    let mut generators: Vec<StarGenerator<R::Elem>> = Vec::new();
    for (si, s) in module.summands.iter().enumerate() {
        for pos in 0..s.num_generators() {
            generators.push(StarGenerator {
                summand: si,
                position: pos,
                index_mask: s.index.mask(),
                internal_degree: s.internal_degree,
                total_degree: s.total_degree,
                order: s.basis().generator_order(pos).cloned(),
            });
        }
    }
    // summand lookup by (mask, internal degree, word)
    let mut summand_of: BTreeMap<(u32, i32, Vec<usize>), usize> = BTreeMap::new();
    for (si, s) in module.summands.iter().enumerate() {
        summand_of.insert((s.index.mask(), s.internal_degree, s.word.clone()), si);
    }
    // generator lookup by (summand, position)
    let mut gen_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (gi, g) in generators.iter().enumerate() {
        gen_of.insert((g.summand, g.position), gi);
    }

    // geometric context for overlapping non-suspension products and for
    // simplicial-pair families; built lazily
    let needs_geometry = match &module.path {
        DecompositionPath::Geometric => true,
        DecompositionPath::Disks(_) => !module.family.suspension_rule_applies(),
        DecompositionPath::Cones(_) => false,
    };
    let geom_family = match &module.path {
        DecompositionPath::Cones(_) => PairFamily::uniform_disk(module.complex.m(), 1),
        _ => module.family.clone(),
    };
    let cones_need_geometry = matches!(&module.path, DecompositionPath::Cones(_))
        && !module.family.suspension_rule_applies();
    let mut geometry: Option<GeometricContext<R>> = None;
    if needs_geometry || cones_need_geometry {
        geometry = Some(
            GeometricContext::empty(ring.clone(), &module.complex, &geom_family, budget)
                .map_err(StarError::Geometry)?,
        );
    }

    let mut disk_cache: BTreeMap<(u32, i32), DiskSummandCache<R>> = BTreeMap::new();
    let mut inflated_cache: BTreeMap<u32, InflatedLink<R>> = BTreeMap::new();

    let n = generators.len();
    let mut table: Vec<Vec<ProductEntry<R::Elem>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for jdx in 0..n {
            let entry = product_entry(
                &ring,
                &module,
                &generators,
                &summand_of,
                &gen_of,
                &mut geometry,
                &mut disk_cache,
                &mut inflated_cache,
                budget,
                i,
                jdx,
            )?;
            row.push(entry);
        }
        table.push(row);
    }

    Ok(StarRing { module, generators, table })
}

#[allow(clippy::too_many_arguments)]
fn product_entry<R: CoeffRing>(
    ring: &R,
    module: &DecompositionModule<R>,
    generators: &[StarGenerator<R::Elem>],
    summand_of: &BTreeMap<(u32, i32, Vec<usize>), usize>,
    gen_of: &BTreeMap<(usize, usize), usize>,
    geometry: &mut Option<GeometricContext<R>>,
    disk_cache: &mut BTreeMap<(u32, i32), DiskSummandCache<R>>,
    inflated_cache: &mut BTreeMap<u32, InflatedLink<R>>,
    _budget: usize,
    gi: usize,
    gj: usize,
) -> Result<ProductEntry<R::Elem>, StarError> {
    let ga = &generators[gi];
    let gb = &generators[gj];
    let sa = &module.summands[ga.summand];
    let sb = &module.summands[gb.summand];
    let j = sa.index;
    let l = sb.index;
    let overlap = !j.is_disjoint(&l);

    // units: the empty-index summand acts as the identity
    if j.is_empty() || l.is_empty() {
        let (other, other_gen) = if j.is_empty() { (gb, gj) } else { (ga, gi) };
        let _ = other;
        return Ok(ProductEntry {
            coeffs: vec![(other_gen, ring.one())],
            path: ProductPath::Unit,
        });
    }

    match &module.path {
        DecompositionPath::Disks(disks) => {
            if overlap {
                if module.family.suspension_rule_applies() {
                    return Ok(ProductEntry { coeffs: vec![], path: ProductPath::SuspensionZero });
                }
                // geometric path
                let entry = geometric_product_link(
                    ring,
                    module,
                    generators,
                    gen_of,
                    geometry.as_mut().expect("geometry required"),
                    disk_cache,
                    disks,
                    gi,
                    gj,
                )?;
                return Ok(entry);
            }
            // disjoint: the join formula at slot level
            let i = j.union(&l);
            let target_q = ga.internal_degree + gb.internal_degree + 1;
            let target_summand = summand_of.get(&(i.mask(), target_q, Vec::new())).copied();
            let d_of = |index: &IndexSet| -> i32 {
                index.members().iter().map(|&v| disks[v - 1] as i32 - 1).sum::<i32>()
            };
            inflated_link(ring, module, disks, inflated_cache, &j);
            inflated_link(ring, module, disks, inflated_cache, &l);
            inflated_link(ring, module, disks, inflated_cache, &i);
            let prod = {
                let link_j = &inflated_cache[&j.mask()];
                let link_l = &inflated_cache[&l.mask()];
                let link_i = &inflated_cache[&i.mask()];
                let u = &link_j.chi[&(ga.internal_degree, ga.position)];
                let v = &link_l.chi[&(gb.internal_degree, gb.position)];
                // slot index sets of J and L within the inflated I
                let mut j_slots: Vec<usize> = Vec::new();
                let mut l_slots: Vec<usize> = Vec::new();
                for (pos, &v_orig) in i.members().iter().enumerate() {
                    let slots = &link_i.slot_of_vertex[pos];
                    if j.contains(v_orig) {
                        j_slots.extend(slots.iter().copied());
                    } else {
                        l_slots.extend(slots.iter().copied());
                    }
                }
                let total_slots = link_i.complex.m();
                let j_tilde = IndexSet::new(&j_slots, total_slots).unwrap();
                let l_tilde = IndexSet::new(&l_slots, total_slots).unwrap();
                debug_assert_eq!(link_i.complex.full_subcomplex(&j_tilde), link_j.complex);
                debug_assert_eq!(link_i.complex.full_subcomplex(&l_tilde), link_l.complex);
                star_disjoint_cochain(
                    ring,
                    &j_tilde,
                    &l_tilde,
                    &link_j.cx,
                    &link_l.cx,
                    &link_i.cx,
                    u,
                    v,
                    STAR_SIGN,
                )
                .map_err(StarError::Input)?
            };
            debug_assert_eq!(prod.degree, target_q + d_of(&i));
            let coeffs = match target_summand {
                Some(si) => {
                    let link_i = inflated_cache.get_mut(&i.mask()).unwrap();
                    let level = inflated_level(ring, link_i, prod.degree);
                    let target_coords = level
                        .basis
                        .express(ring, &prod)
                        .map_err(StarError::Input)?;
                    let sols =
                        solve_in_coords(ring, &level.basis, &level.gen_coords, &target_coords)
                            .ok_or(StarError::Expression { left: gi, right: gj })?;
                    let s = &module.summands[si];
                    let mut out: Vec<(usize, R::Elem)> = Vec::new();
                    for (pos, c) in sols.into_iter().enumerate() {
                        let c = match s.basis().generator_order(pos) {
                            Some(d) => ring.rem_mod(&c, d),
                            None => c,
                        };
                        if !ring.is_zero(&c) {
                            out.push((gen_of[&(si, pos)], c));
                        }
                    }
                    out.sort_by_key(|(g, _)| *g);
                    out
                }
                None => {
                    let link_i = inflated_cache.get_mut(&i.mask()).unwrap();
                    debug_assert!(link_coboundary_check(ring, &link_i.cx, &prod));
                    Vec::new()
                }
            };
            Ok(ProductEntry { coeffs, path: ProductPath::Disjoint })
        }
        DecompositionPath::Cones(cones) => cone_pair_product(
            ring,
            module,
            generators,
            summand_of,
            gen_of,
            geometry,
            disk_cache,
            cones,
            gi,
            gj,
        ),
        DecompositionPath::Geometric => {
            if overlap && module.family.suspension_rule_applies() {
                return Ok(ProductEntry { coeffs: vec![], path: ProductPath::SuspensionZero });
            }
            let ctx = geometry.as_mut().expect("geometry required");
            ctx.ensure_smash(j.mask()).map_err(StarError::Geometry)?;
            ctx.ensure_smash(l.mask()).map_err(StarError::Geometry)?;
            ctx.ensure_smash(j.union(&l).mask()).map_err(StarError::Geometry)?;
            let u = ctx.smash_cocycle(module, ga.summand, ga.position);
            let v = ctx.smash_cocycle(module, gb.summand, gb.position);
            let prod = ctx.geometric_star(j.mask(), &u, l.mask(), &v);
            let target_q = prod.degree;
            let coeffs = match summand_of.get(&(j.union(&l).mask(), target_q, Vec::new())) {
                Some(&si) => expand_in_summand(ring, module, gen_of, si, &prod)
                    .ok_or(StarError::Expression { left: gi, right: gj })?,
                None => {
                    debug_assert!(
                        geometric_coboundary_check(ring, ctx, j.union(&l).mask(), &prod)
                    );
                    Vec::new()
                }
            };
            let path = if overlap { ProductPath::Geometric } else { ProductPath::Disjoint };
            Ok(ProductEntry { coeffs, path })
        }
    }
}

fn link_of<R: CoeffRing>(s: &Summand<R>) -> &crate::decomposition::LinkInfo<R> {
    match &s.kind {
        SummandKind::Link(info) => info,
        SummandKind::Geometric(_) => panic!("expected a link summand"),
    }
}

/// Expand a cocycle in the basis of the given summand, returning generator
/// index / coefficient pairs.
fn expand_in_summand<R: CoeffRing>(
    ring: &R,
    module: &DecompositionModule<R>,
    gen_of: &BTreeMap<(usize, usize), usize>,
    si: usize,
    z: &Cochain<R::Elem>,
) -> Option<Vec<(usize, R::Elem)>> {
    let s = &module.summands[si];
    let coords = s.basis().express(ring, z).ok()?;
    let mut out: Vec<(usize, R::Elem)> = Vec::new();
    let free_rank = s.free_rank;
    for (k, c) in coords.free.iter().enumerate() {
        if !ring.is_zero(c) {
            out.push((gen_of[&(si, k)], c.clone()));
        }
    }
    for (k, c) in coords.torsion.iter().enumerate() {
        if !ring.is_zero(c) {
            out.push((gen_of[&(si, free_rank + k)], c.clone()));
        }
    }
    out.sort_by_key(|(g, _)| *g);
    Some(out)
}

fn link_coboundary_check<R: CoeffRing>(
    ring: &R,
    cx: &CochainComplex<R>,
    z: &Cochain<R::Elem>,
) -> bool {
    if z.is_zero() {
        return true;
    }
    let delta = cx.delta(z.degree - 1);
    solve_in_image(ring, &delta, &z.vec).is_some()
}

fn geometric_coboundary_check<R: CoeffRing>(
    ring: &R,
    ctx: &GeometricContext<R>,
    mask: u32,
    z: &Cochain<R::Elem>,
) -> bool {
    if z.is_zero() {
        return true;
    }
    let delta = ctx.smash_data(mask).model.cx.delta(z.degree - 1);
    solve_in_image(ring, &delta, &z.vec).is_some()
}

/// Overlapping disk-family product computed on the triangulated models and
/// expressed back in the link basis of the target summand.
#[allow(clippy::too_many_arguments)]
fn geometric_product_link<R: CoeffRing>(
    ring: &R,
    module: &DecompositionModule<R>,
    generators: &[StarGenerator<R::Elem>],
    gen_of: &BTreeMap<(usize, usize), usize>,
    ctx: &mut GeometricContext<R>,
    disk_cache: &mut BTreeMap<(u32, i32), DiskSummandCache<R>>,
    disks: &[u32],
    gi: usize,
    gj: usize,
) -> Result<ProductEntry<R::Elem>, StarError> {
    let ga = &generators[gi];
    let gb = &generators[gj];
    let sa = &module.summands[ga.summand];
    let sb = &module.summands[gb.summand];
    let i = sa.index.union(&sb.index);
    ctx.ensure_smash(sa.index.mask()).map_err(StarError::Geometry)?;
    ctx.ensure_smash(sb.index.mask()).map_err(StarError::Geometry)?;
    ctx.ensure_smash(i.mask()).map_err(StarError::Geometry)?;
    let u = ctx.smash_cocycle(module, ga.summand, ga.position);
    let v = ctx.smash_cocycle(module, gb.summand, gb.position);
    let prod = ctx.geometric_star(sa.index.mask(), &u, sb.index.mask(), &v);
    // target: link summand of I at internal degree prod.degree - shift(I)
    let shift: i32 = i.members().iter().map(|&v| disks[v - 1] as i32 - 1).sum::<i32>() + 1;
    let target_q = prod.degree - shift;
    let target = module
        .summands
        .iter()
        .position(|s| s.index == i && s.internal_degree == target_q && s.word.is_empty());
    let Some(si) = target else {
        // zero group: the geometric product must be a coboundary
        debug_assert!(geometric_coboundary_check(ring, ctx, i.mask(), &prod));
        return Ok(ProductEntry { coeffs: vec![], path: ProductPath::Geometric });
    };
    // cache the lifted link basis of the target summand
    let key = (i.mask(), target_q);
    if !disk_cache.contains_key(&key) {
        let s = &module.summands[si];
        let info = link_of(s);
        let data = ctx.smash_data(i.mask());
        let smash_basis = cohomology_basis(&data.model.cx, prod.degree, true);
        let mult: Vec<usize> = i.members().iter().map(|&v| disks[v - 1] as usize).collect();
        let mut gen_coords = Vec::new();
        for pos in 0..s.num_generators() {
            let c = info.bases[&target_q].generator(pos);
            let (_, lifted) = inflate_cocycle(ring, &info.k_i, &mult, c);
            let rel = lift_to_smash(ring, &data.model, &data.link, &lifted);
            let coords = smash_basis
                .express(ring, &rel)
                .expect("lifted generator must be a cocycle");
            gen_coords.push(coords);
        }
        disk_cache.insert(key, DiskSummandCache { smash_basis, gen_coords });
    }
    let cache = &disk_cache[&key];
    let target_coords = cache
        .smash_basis
        .express(ring, &prod)
        .map_err(|_| StarError::Expression { left: gi, right: gj })?;
    let coeffs = solve_in_coords(
        ring,
        &cache.smash_basis,
        &cache.gen_coords,
        &target_coords,
    )
    .ok_or(StarError::Expression { left: gi, right: gj })?;
    let s = &module.summands[si];
    let mut out: Vec<(usize, R::Elem)> = Vec::new();
    for (pos, c) in coeffs.into_iter().enumerate() {
        let c = match s.basis().generator_order(pos) {
            Some(d) => ring.rem_mod(&c, d),
            None => c,
        };
        if !ring.is_zero(&c) {
            out.push((gen_of[&(si, pos)], c));
        }
    }
    out.sort_by_key(|(g, _)| *g);
    Ok(ProductEntry { coeffs: out, path: ProductPath::Geometric })
}

/// Solve `Σ c_k · gens_k = target` in the class-coordinate module of
/// `basis` (free coordinates exact, torsion coordinates modulo the order).
fn solve_in_coords<R: CoeffRing>(
    ring: &R,
    basis: &CohomologyBasis<R>,
    gens: &[ClassCoords<R::Elem>],
    target: &ClassCoords<R::Elem>,
) -> Option<Vec<R::Elem>> {
    let free_rank = basis.free_rank();
    let torsion: Vec<R::Elem> = basis.torsion_orders();
    let nrows = free_rank + torsion.len();
    let k = gens.len();
    let mut triplets: Vec<(usize, usize, R::Elem)> = Vec::new();
    for (c, g) in gens.iter().enumerate() {
        for (r, e) in g.free.iter().enumerate() {
            triplets.push((r, c, e.clone()));
        }
        for (r, e) in g.torsion.iter().enumerate() {
            triplets.push((free_rank + r, c, e.clone()));
        }
    }
    // slack columns: torsion rows hold modulo their order
    for (r, d) in torsion.iter().enumerate() {
        triplets.push((free_rank + r, k + r, d.clone()));
    }
    let mat = SparseMat::from_triplets(ring, nrows, k + torsion.len(), triplets);
    let mut b: Vec<(usize, R::Elem)> = Vec::new();
    for (r, e) in target.free.iter().enumerate() {
        if !ring.is_zero(e) {
            b.push((r, e.clone()));
        }
    }
    for (r, e) in target.torsion.iter().enumerate() {
        if !ring.is_zero(e) {
            b.push((free_rank + r, e.clone()));
        }
    }
    let x = solve_in_image(ring, &mat, &SparseVec::from_sorted(b))?;
    Some(
        (0..k)
            .map(|c| x.get(c).cloned().unwrap_or_else(|| ring.zero()))
            .collect(),
    )
}

/// The cone-pair product: tensor the (D¹,S⁰)-level star product with the
/// per-vertex ring products, with the Koszul sign of the factor swap.
#[allow(clippy::too_many_arguments)]
fn cone_pair_product<R: CoeffRing>(
    ring: &R,
    module: &DecompositionModule<R>,
    generators: &[StarGenerator<R::Elem>],
    summand_of: &BTreeMap<(u32, i32, Vec<usize>), usize>,
    gen_of: &BTreeMap<(usize, usize), usize>,
    geometry: &mut Option<GeometricContext<R>>,
    disk_cache: &mut BTreeMap<(u32, i32), DiskSummandCache<R>>,
    cones: &[RingPresentation],
    gi: usize,
    gj: usize,
) -> Result<ProductEntry<R::Elem>, StarError> {
    let ga = &generators[gi];
    let gb = &generators[gj];
    let sa = &module.summands[ga.summand];
    let sb = &module.summands[gb.summand];
    let j = sa.index;
    let l = sb.index;
    let i = j.union(&l);
    let j_members = j.members();
    let l_members = l.members();
    let deg = |v: usize, g: usize| cones[v - 1].degree(g) as i32;

    // Koszul sign of the swap: the (D¹,S⁰)-level class of the right factor
    // moves left past the tensor word of the left factor, plus the word
    // reshuffle into slot order.
    let x_degree: i32 = sa
        .word
        .iter()
        .zip(&j_members)
        .map(|(g, &v)| deg(v, *g))
        .sum();
    let b_level_degree = gb.internal_degree + 1;
    let mut expo = b_level_degree * x_degree;
    for (giy, &vy) in sb.word.iter().zip(&l_members) {
        for (gjx, &vx) in sa.word.iter().zip(&j_members) {
            if vx > vy {
                expo += deg(vy, *giy) * deg(vx, *gjx);
            }
        }
    }
    let swap_sign = if expo.rem_euclid(2) == 0 { 1 } else { -1 };

    // merge the tensor words, expanding ring products on the overlap
    let mut words: Vec<(R::Elem, Vec<usize>)> = vec![(ring.one(), Vec::new())];
    for &v in &i.members() {
        let xg = j.position(v).map(|p| sa.word[p]);
        let yg = l.position(v).map(|p| sb.word[p]);
        match (xg, yg) {
            (Some(x), None) => {
                for (_, w) in &mut words {
                    w.push(x);
                }
            }
            (None, Some(y)) => {
                for (_, w) in &mut words {
                    w.push(y);
                }
            }
            (Some(x), Some(y)) => {
                let expansion = cones[v - 1].product(x, y);
                if expansion.is_empty() {
                    return Ok(ProductEntry { coeffs: vec![], path: ProductPath::Cone });
                }
                let mut next = Vec::new();
                for (c, w) in &words {
                    for (g, coeff) in &expansion {
                        let nc = ring.mul(c, &ring.from_i64(*coeff));
                        if ring.is_zero(&nc) {
                            continue;
                        }
                        let mut w2 = w.clone();
                        w2.push(*g);
                        next.push((nc, w2));
                    }
                }
                if next.is_empty() {
                    return Ok(ProductEntry { coeffs: vec![], path: ProductPath::Cone });
                }
                words = next;
            }
            (None, None) => unreachable!(),
        }
    }

    // the (D¹,S⁰)-level product of the link classes
    let info_j = link_of(sa);
    let info_l = link_of(sb);
    let target_q = ga.internal_degree + gb.internal_degree + 1;
    let link_coeffs: Vec<(i32, usize, R::Elem)> = if j.is_disjoint(&l) {
        let cx_i_owned;
        let cx_i = match summand_of
            .get(&(i.mask(), target_q, words.first().map(|(_, w)| w.clone()).unwrap_or_default()))
        {
            Some(&si) => &link_of(&module.summands[si]).cx,
            None => {
                let ki = module.complex.full_subcomplex(&i);
                cx_i_owned = CochainComplex::reduced(ring.clone(), &ki);
                &cx_i_owned
            }
        };
        let prod = star_disjoint_cochain(
            ring,
            &j,
            &l,
            &info_j.cx,
            &info_l.cx,
            cx_i,
            sa.basis().generator(ga.position),
            sb.basis().generator(gb.position),
            STAR_SIGN,
        )
        .map_err(StarError::Input)?;
        link_expand(ring, module, &i, target_q, &prod)
            .ok_or(StarError::Expression { left: gi, right: gj })?
    } else {
        // the overlapping (D¹,S⁰)-level product via the triangulated models
        let ctx = geometry.as_mut().expect("geometry required for overlapping cone products");
        link_star_geometric(
            ring, module, ctx, disk_cache, &j, ga, sa, &l, gb, sb,
        )
        .map_err(|e| e)?
    };

    // assemble: coefficients into (I, target_q, word)-summands
    let mut acc: BTreeMap<usize, R::Elem> = BTreeMap::new();
    for (word_coeff, word) in &words {
        let Some(&si) = summand_of.get(&(i.mask(), target_q, word.clone())) else {
            continue;
        };
        for (lq, pos, c) in &link_coeffs {
            debug_assert_eq!(*lq, target_q);
            let gidx = gen_of[&(si, *pos)];
            let add = ring.mul(word_coeff, c);
            let add = if swap_sign < 0 { ring.neg(&add) } else { add };
            let cur = acc.get(&gidx).cloned().unwrap_or_else(|| ring.zero());
            acc.insert(gidx, ring.add(&cur, &add));
        }
    }
    let coeffs: Vec<(usize, R::Elem)> = acc
        .into_iter()
        .map(|(g, c)| {
            let c = match &generators[g].order {
                Some(d) => ring.rem_mod(&c, d),
                None => c,
            };
            (g, c)
        })
        .filter(|(_, c)| !ring.is_zero(c))
        .collect();
    Ok(ProductEntry { coeffs, path: ProductPath::Cone })
}

/// Expand a link cochain on `K_I` in the degree-q link cohomology basis,
/// independent of the tensor word (the link part is shared across words).
fn link_expand<R: CoeffRing>(
    ring: &R,
    module: &DecompositionModule<R>,
    i: &IndexSet,
    q: i32,
    z: &Cochain<R::Elem>,
) -> Option<Vec<(i32, usize, R::Elem)>> {
    // find any summand at (I, q) to reuse its link basis
    let s = module
        .summands
        .iter()
        .find(|s| s.index == *i && s.internal_degree == q);
    match s {
        Some(s) => {
            let coords = s.basis().express(ring, z).ok()?;
            let mut out = Vec::new();
            for (kx, c) in coords.free.iter().enumerate() {
                if !ring.is_zero(c) {
                    out.push((q, kx, c.clone()));
                }
            }
            for (kx, c) in coords.torsion.iter().enumerate() {
                if !ring.is_zero(c) {
                    out.push((q, s.free_rank + kx, c.clone()));
                }
            }
            Some(out)
        }
        None => {
            let ki = module.complex.full_subcomplex(i);
            let cx = CochainComplex::reduced(ring.clone(), &ki);
            if link_coboundary_check(ring, &cx, z) {
                Some(Vec::new())
            } else {
                None
            }
        }
    }
}

/// Overlapping (D¹,S⁰)-level star product of link classes, via geometry,
/// expressed in the link basis of `K_{J∪L}`.
#[allow(clippy::too_many_arguments)]
fn link_star_geometric<R: CoeffRing>(
    ring: &R,
    module: &DecompositionModule<R>,
    ctx: &mut GeometricContext<R>,
    disk_cache: &mut BTreeMap<(u32, i32), DiskSummandCache<R>>,
    j: &IndexSet,
    ga: &StarGenerator<R::Elem>,
    sa: &Summand<R>,
    l: &IndexSet,
    gb: &StarGenerator<R::Elem>,
    sb: &Summand<R>,
) -> Result<Vec<(i32, usize, R::Elem)>, StarError> {
    let i = j.union(l);
    ctx.ensure_smash(j.mask()).map_err(StarError::Geometry)?;
    ctx.ensure_smash(l.mask()).map_err(StarError::Geometry)?;
    ctx.ensure_smash(i.mask()).map_err(StarError::Geometry)?;
    // lift the link generators into the (D¹,S⁰)-smash models
    let lift = |index: &IndexSet, s: &Summand<R>, pos: usize| -> Cochain<R::Elem> {
        let info = link_of(s);
        let data = ctx.smash_data(index.mask());
        let c = info.bases[&s.internal_degree].generator(pos);
        lift_to_smash(ring, &data.model, &data.link, c)
    };
    let u = lift(j, sa, ga.position);
    let v = lift(l, sb, gb.position);
    let prod = ctx.geometric_star(j.mask(), &u, l.mask(), &v);
    let target_q = prod.degree - 1;
    // express in the lifted link basis of K_I
    let ki = module.complex.full_subcomplex(&i);
    let link_cx = CochainComplex::reduced(ring.clone(), &ki);
    let link_basis = cohomology_basis(&link_cx, target_q, true);
    if link_basis.num_generators() == 0 {
        debug_assert!(geometric_coboundary_check(ring, ctx, i.mask(), &prod));
        return Ok(Vec::new());
    }
    let key = (i.mask(), target_q);
    if !disk_cache.contains_key(&key) {
        let data = ctx.smash_data(i.mask());
        let smash_basis = cohomology_basis(&data.model.cx, prod.degree, true);
        let mut gen_coords = Vec::new();
        for pos in 0..link_basis.num_generators() {
            let c = link_basis.generator(pos);
            let rel = lift_to_smash(ring, &data.model, &data.link, c);
            gen_coords.push(smash_basis.express(ring, &rel).expect("lift must be a cocycle"));
        }
        disk_cache.insert(key, DiskSummandCache { smash_basis, gen_coords });
    }
    let cache = &disk_cache[&key];
    let target_coords = cache
        .smash_basis
        .express(ring, &prod)
        .map_err(StarError::Input)?;
    let coeffs = solve_in_coords(ring, &cache.smash_basis, &cache.gen_coords, &target_coords)
        .ok_or(StarError::Expression { left: 0, right: 0 })?;
    let mut out = Vec::new();
    for (pos, c) in coeffs.into_iter().enumerate() {
        let c = match link_basis.generator_order(pos) {
            Some(d) => ring.rem_mod(&c, d),
            None => c,
        };
        if !ring.is_zero(&c) {
            out.push((target_q, pos, c));
        }
    }
    Ok(out)
}

/// Compare the multiplication tables of two suspension regradings of the
/// same family under the canonical generator correspondence.
pub struct UngradedIsoReport<E> {
    pub generator_pairs: Vec<(usize, usize)>,
    pub mismatch: Option<UngradedMismatch<E>>,
}

pub struct UngradedMismatch<E> {
    pub left_pair: (usize, usize),
    pub lhs: Vec<(usize, E)>,
    pub rhs: Vec<(usize, E)>,
}

pub fn ungraded_iso_check<R: CoeffRing>(
    ring: R,
    k: &SimplicialComplex,
    family: &PairFamily,
    t1: &[u32],
    t2: &[u32],
    budget: usize,
) -> Result<UngradedIsoReport<R::Elem>, StarError> {
    if t1.len() != k.m() || t2.len() != k.m() {
        return Err(StarError::Input(InputError::ShiftLengthMismatch {
            got: t1.len().max(t2.len()),
            expected: k.m(),
        }));
    }
    for (v, (a, b)) in t1.iter().zip(t2).enumerate() {
        if (a % 2) != (b % 2) {
            return Err(StarError::Input(InputError::ShiftParityMismatch { vertex: v + 1 }));
        }
    }
    let fam1 = family.clone().with_suspension(
        family.suspension.iter().zip(t1).map(|(s, t)| s + t).collect(),
    ).map_err(StarError::Input)?;
    let fam2 = family.clone().with_suspension(
        family.suspension.iter().zip(t2).map(|(s, t)| s + t).collect(),
    ).map_err(StarError::Input)?;
    let ring1 = multiplication_table(ring.clone(), k, &fam1, budget)?;
    let ring2 = multiplication_table(ring, k, &fam2, budget)?;
    // canonical correspondence: same (index mask, internal degree, word, position)
    let keyer = |star: &StarRing<R>, g: &StarGenerator<R::Elem>| -> (u32, i32, Vec<usize>, usize) {
        let s = &star.module.summands[g.summand];
        (g.index_mask, g.internal_degree, s.word.clone(), g.position)
    };
    let mut of2: BTreeMap<(u32, i32, Vec<usize>, usize), usize> = BTreeMap::new();
    for (gi, g) in ring2.generators.iter().enumerate() {
        of2.insert(keyer(&ring2, g), gi);
    }
    let mut pairs = Vec::new();
    let mut map12: Vec<usize> = Vec::new();
    for (gi, g) in ring1.generators.iter().enumerate() {
        let Some(&gj) = of2.get(&keyer(&ring1, g)) else {
            return Err(StarError::Input(InputError::PairFamily(
                "regraded summands do not correspond".into(),
            )));
        };
        pairs.push((gi, gj));
        map12.push(gj);
    }
    // compare structure constants exactly
    for i in 0..ring1.generators.len() {
        for j in 0..ring1.generators.len() {
            let lhs = &ring1.table[i][j].coeffs;
            let rhs_raw = &ring2.table[map12[i]][map12[j]].coeffs;
            let mut rhs: Vec<(usize, R::Elem)> = Vec::new();
            // translate rhs generator ids back through the correspondence
            let mut back: BTreeMap<usize, usize> = BTreeMap::new();
            for (a, b) in map12.iter().enumerate() {
                back.insert(*b, a);
            }
            for (g, c) in rhs_raw {
                rhs.push((back[g], c.clone()));
            }
            rhs.sort_by_key(|(g, _)| *g);
            if lhs != &rhs {
                return Ok(UngradedIsoReport {
                    generator_pairs: pairs,
                    mismatch: Some(UngradedMismatch {
                        left_pair: (i, j),
                        lhs: lhs.clone(),
                        rhs,
                    }),
                });
            }
        }
    }
    Ok(UngradedIsoReport { generator_pairs: pairs, mismatch: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::library;
    use crate::decomposition::DEFAULT_BUDGET;
    use crate::linalg::{Int, IntRing};

    fn disk_table(k: &SimplicialComplex, n: u32) -> StarRing<IntRing> {
        multiplication_table(IntRing, k, &PairFamily::uniform_disk(k.m(), n), DEFAULT_BUDGET)
            .unwrap()
    }

    #[test]
    fn two_points_disk2_table() {
        let star = disk_table(&library::disjoint_points(2), 2);
        // unit + one degree-3 generator with square zero
        assert_eq!(star.num_generators(), 2);
        let g = star
            .generators
            .iter()
            .position(|g| g.total_degree == 3)
            .unwrap();
        assert_eq!(star.table[g][g].coeffs, vec![]);
        assert_eq!(star.table[g][g].path, ProductPath::SuspensionZero);
        star.check_targets().unwrap();
        star.check_graded_commutative().unwrap();
        star.check_associative().unwrap();
    }

    #[test]
    fn square_boundary_disk2_is_exterior() {
        let star = disk_table(&library::cycle(4), 2);
        // unit, two degree-3 generators, one degree-6 generator
        assert_eq!(star.num_generators(), 4);
        let d3: Vec<usize> = star
            .generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.total_degree == 3)
            .map(|(i, _)| i)
            .collect();
        let d6 = star
            .generators
            .iter()
            .position(|g| g.total_degree == 6)
            .unwrap();
        assert_eq!(d3.len(), 2);
        // products of the two degree-3 generators hit the fundamental class
        let p = &star.table[d3[0]][d3[1]].coeffs;
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].0, d6);
        assert!(IntRing.is_unit(&p[0].1));
        // squares vanish (overlapping index sets, suspension rule)
        assert!(star.table[d3[0]][d3[0]].coeffs.is_empty());
        assert!(star.table[d3[1]][d3[1]].coeffs.is_empty());
        // graded commutativity: odd degrees anticommute
        let q = &star.table[d3[1]][d3[0]].coeffs;
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].1, p[0].1.neg());
        star.check_targets().unwrap();
        star.check_graded_commutative().unwrap();
        star.check_associative().unwrap();
    }

    #[test]
    fn five_cycle_disk2_products() {
        let star = disk_table(&library::cycle(5), 2);
        assert_eq!(star.num_generators(), 12);
        let d7 = star
            .generators
            .iter()
            .position(|g| g.total_degree == 7)
            .unwrap();
        // exactly the five complementary pair×triple products are nonzero
        let mut nonzero = 0;
        for (i, gi) in star.generators.iter().enumerate() {
            for (j, gj) in star.generators.iter().enumerate() {
                if gi.total_degree == 3 && gj.total_degree == 4 {
                    let entry = &star.table[i][j];
                    if !entry.coeffs.is_empty() {
                        nonzero += 1;
                        assert_eq!(entry.coeffs[0].0, d7);
                        assert!(IntRing.is_unit(&entry.coeffs[0].1));
                        assert_eq!(gi.index_mask | gj.index_mask, star.generators[d7].index_mask);
                        assert_eq!(gi.index_mask & gj.index_mask, 0);
                    }
                }
            }
        }
        assert_eq!(nonzero, 5);
        star.check_targets().unwrap();
        star.check_graded_commutative().unwrap();
        star.check_associative().unwrap();
    }

    #[test]
    fn unit_is_identity() {
        let star = disk_table(&library::cycle(4), 2);
        let unit = star
            .generators
            .iter()
            .position(|g| g.index_mask == 0)
            .unwrap();
        for i in 0..star.num_generators() {
            assert_eq!(star.table[unit][i].coeffs, vec![(i, Int::ONE)]);
            assert_eq!(star.table[i][unit].coeffs, vec![(i, Int::ONE)]);
        }
    }

    #[test]
    fn cone_over_circle_reproduces_disk2() {
        let k = library::cycle(4);
        let fam = PairFamily::uniform_cone(4, RingPresentation::sphere(1));
        let cone = multiplication_table(IntRing, &k, &fam, DEFAULT_BUDGET).unwrap();
        let disk = disk_table(&k, 2);
        assert_eq!(cone.num_generators(), disk.num_generators());
        // correspondence by (mask, internal degree, position)
        let key = |star: &StarRing<IntRing>, g: &StarGenerator<Int>| {
            (g.index_mask, g.internal_degree, g.position, star.module.summands[g.summand].word.len())
        };
        for (gi, g) in cone.generators.iter().enumerate() {
            let h = &disk.generators[gi];
            assert_eq!(
                (g.index_mask, g.internal_degree, g.position),
                (h.index_mask, h.internal_degree, h.position),
                "generator order mismatch"
            );
            assert_eq!(g.total_degree, h.total_degree);
            let _ = key;
        }
        for i in 0..cone.num_generators() {
            for j in 0..cone.num_generators() {
                assert_eq!(
                    cone.table[i][j].coeffs, disk.table[i][j].coeffs,
                    "cone/disk mismatch at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn ungraded_iso_even_shifts() {
        let k = library::cycle(4);
        let fam = PairFamily::uniform_disk(4, 1);
        let report =
            ungraded_iso_check(IntRing, &k, &fam, &[1, 1, 1, 1], &[3, 3, 3, 3], DEFAULT_BUDGET)
                .unwrap();
        assert!(report.mismatch.is_none());
    }

    #[test]
    fn ungraded_iso_rejects_parity_mismatch() {
        let k = library::cycle(4);
        let fam = PairFamily::uniform_disk(4, 1);
        let res =
            ungraded_iso_check(IntRing, &k, &fam, &[1, 1, 1, 1], &[2, 1, 1, 1], DEFAULT_BUDGET);
        assert!(matches!(
            res,
            Err(StarError::Input(InputError::ShiftParityMismatch { vertex: 1 }))
        ));
    }
}
