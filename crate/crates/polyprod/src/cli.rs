//! Command-line surface: parse inputs, run computations, emit reports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cochain::Cochain;
use crate::cohomology::cohomology_ranks;
use crate::complex::{complex_to_text, parse_complex, ComplexJson, SimplicialComplex};
use crate::decomposition::{decompose, DecomposeError, DecompositionModule, DEFAULT_BUDGET};
use crate::error::InputError;
use crate::geometry::{verify_eta_ring, verify_splitting, GeometricContext, GeometryError, TableView};
use crate::linalg::{CoeffRing, CoeffSpec, FpRing, IntRing};
use crate::pairs::{PairDescriptor, PairFamily, RingPresentation};
use crate::star::{multiplication_table_of, ungraded_iso_check, ProductPath, StarRing};

/// A fully parsed job.
pub struct JobSpec {
    pub complex: SimplicialComplex,
    pub complex_source: String,
    pub pairs: PairFamily,
    pub pairs_source: String,
    pub pairs_other: Option<(PairFamily, String)>,
    pub coeff: CoeffSpec,
    pub command: Command,
    pub structured: bool,
    pub budget: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Command {
    Betti,
    Ring,
    Verify,
    Table,
    RegradeCheck,
}

impl Command {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        match text {
            "betti" => Ok(Command::Betti),
            "ring" => Ok(Command::Ring),
            "verify" => Ok(Command::Verify),
            "table" => Ok(Command::Table),
            "regrade-check" => Ok(Command::RegradeCheck),
            other => Err(InputError::Parse(format!(
                "unknown command {other:?} (betti|ring|verify|table|regrade-check)"
            ))),
        }
    }
}

/// Exit status conventions: 0 success, 1 verification failure, 2 input
/// error, 3 size budget exceeded.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Read the complex argument: inline text/JSON, or a file path.
pub fn load_complex(arg: &str) -> Result<SimplicialComplex, InputError> {
    let trimmed = arg.trim();
    if trimmed.contains('=') || trimmed.starts_with('{') {
        return parse_complex(trimmed);
    }
    let text = std::fs::read_to_string(trimmed)
        .map_err(|e| InputError::Parse(format!("cannot read complex file {trimmed:?}: {e}")))?;
    parse_complex(&text)
}

/// Parse the pair-family descriptor; `m` is the vertex count.
pub fn parse_pairs(arg: &str, m: usize) -> Result<PairFamily, InputError> {
    let mut per_vertex: Option<Vec<PairDescriptor>> = None;
    let mut suspension: Option<Vec<u32>> = None;
    for clause in arg.split(';') {
        let clause = clause.trim();
        if clause.is_empty() {
            continue;
        }
        if let Some(rest) = clause.strip_prefix("disk-sphere:") {
            let rest = rest.trim();
            let dims: Vec<u32> = if let Some(list) = rest.strip_prefix('[') {
                let list = list
                    .strip_suffix(']')
                    .ok_or_else(|| InputError::Parse(format!("unclosed list in {clause:?}")))?;
                list.split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|_| InputError::Parse(format!("invalid disk dimension {s:?}")))
                    })
                    .collect::<Result<_, _>>()?
            } else {
                let n: u32 = rest
                    .parse()
                    .map_err(|_| InputError::Parse(format!("invalid disk dimension {rest:?}")))?;
                vec![n; m]
            };
            if dims.len() != m {
                return Err(InputError::PairFamily(format!(
                    "disk-sphere lists {} dimensions for {m} vertices",
                    dims.len()
                )));
            }
            per_vertex = Some(dims.into_iter().map(PairDescriptor::DiskSphere).collect());
        } else if let Some(path) = clause.strip_prefix("pair-file:") {
            let text = std::fs::read_to_string(path.trim()).map_err(|e| {
                InputError::Parse(format!("cannot read pair file {path:?}: {e}"))
            })?;
            per_vertex = Some(parse_pair_file(&text, m)?);
        } else if let Some(path) = clause.strip_prefix("cone:") {
            let text = std::fs::read_to_string(path.trim()).map_err(|e| {
                InputError::Parse(format!("cannot read ring file {path:?}: {e}"))
            })?;
            let ring: RingPresentation = serde_json::from_str(&text)
                .map_err(|e| InputError::Parse(format!("invalid ring file: {e}")))?;
            ring.validate()?;
            per_vertex = Some(vec![PairDescriptor::Cone(ring); m]);
        } else if let Some(rest) = clause.strip_prefix("suspend:") {
            let rest = rest.trim();
            let list = rest
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| InputError::Parse(format!("suspend expects [t1,...] in {clause:?}")))?;
            let t: Vec<u32> = list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| InputError::Parse(format!("invalid shift {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            suspension = Some(t);
        } else {
            return Err(InputError::Parse(format!("unknown pair clause {clause:?}")));
        }
    }
    let per_vertex = per_vertex
        .ok_or_else(|| InputError::Parse("pair descriptor missing (e.g. disk-sphere:2)".into()))?;
    let mut fam = PairFamily { per_vertex, suspension: vec![0; m] };
    if let Some(t) = suspension {
        fam = fam.with_suspension(t)?;
    }
    fam.validate(m)?;
    Ok(fam)
}

fn parse_pair_file(text: &str, m: usize) -> Result<Vec<PairDescriptor>, InputError> {
    #[derive(serde::Deserialize)]
    struct Doc {
        pairs: Vec<PairDoc>,
    }
    #[derive(serde::Deserialize)]
    struct PairDoc {
        x: ComplexDoc,
        a: ComplexDoc,
        basepoint: usize,
    }
    #[derive(serde::Deserialize)]
    struct ComplexDoc {
        m: usize,
        facets: Vec<Vec<usize>>,
    }
    let doc: Doc = serde_json::from_str(text)
        .map_err(|e| InputError::Parse(format!("invalid pair file: {e}")))?;
    if doc.pairs.len() != m {
        return Err(InputError::PairFamily(format!(
            "pair file lists {} pairs for {m} vertices",
            doc.pairs.len()
        )));
    }
    doc.pairs
        .into_iter()
        .map(|p| {
            Ok(PairDescriptor::SimplicialPair {
                x: SimplicialComplex::from_facets(p.x.m, &p.x.facets)?,
                a: SimplicialComplex::from_facets(p.a.m, &p.a.facets)?,
                basepoint: p.basepoint,
            })
        })
        .collect()
}

/// Run a job, returning the exit code and the report text.
pub fn run(job: &JobSpec) -> (i32, String) {
    match job.coeff {
        CoeffSpec::Int => run_ring(IntRing, job),
        CoeffSpec::ModP(p) => match FpRing::new(p) {
            Ok(r) => run_ring(r, job),
            Err(e) => (EXIT_INPUT, format!("error: {e}\n")),
        },
    }
}

fn run_ring<R: CoeffRing>(ring: R, job: &JobSpec) -> (i32, String) {
    let result = match job.command {
        Command::Betti => cmd_betti(ring, job),
        Command::Ring => cmd_ring(ring, job),
        Command::Table => cmd_table(ring, job),
        Command::Verify => cmd_verify(ring, job),
        Command::RegradeCheck => cmd_regrade(ring, job),
    };
    match result {
        Ok(out) => out,
        Err(e) => classify_error(e),
    }
}

enum CmdError {
    Input(InputError),
    Budget(crate::error::BudgetError),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Input(e) => write!(f, "{e}"),
            CmdError::Budget(e) => write!(f, "{e}"),
        }
    }
}

impl From<DecomposeError> for CmdError {
    fn from(e: DecomposeError) -> Self {
        match e {
            DecomposeError::Input(e) => CmdError::Input(e),
            DecomposeError::Budget(e) => CmdError::Budget(e),
        }
    }
}

impl From<GeometryError> for CmdError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Input(e) => CmdError::Input(e),
            GeometryError::Budget(e) => CmdError::Budget(e),
        }
    }
}

impl From<crate::star::StarError> for CmdError {
    fn from(e: crate::star::StarError) -> Self {
        match e {
            crate::star::StarError::Input(e) => CmdError::Input(e),
            crate::star::StarError::Geometry(g) => g.into(),
            crate::star::StarError::Decompose(d) => d.into(),
            crate::star::StarError::Expression { left, right } => CmdError::Input(
                InputError::Parse(format!(
                    "internal: product of generators {left}, {right} escaped its summand"
                )),
            ),
        }
    }
}

impl From<InputError> for CmdError {
    fn from(e: InputError) -> Self {
        CmdError::Input(e)
    }
}

fn classify_error(e: CmdError) -> (i32, String) {
    match e {
        CmdError::Input(e) => (EXIT_INPUT, format!("error: {e}\n")),
        CmdError::Budget(e) => (EXIT_BUDGET, format!("error: {e}\n")),
    }
}

fn header(job: &JobSpec) -> String {
    format!(
        "# complex: {}\n# pairs: {}\n# coefficients: {}\n",
        complex_to_text(&job.complex),
        job.pairs_source,
        job.coeff.label()
    )
}

#[derive(Serialize)]
struct BettiDoc {
    command: &'static str,
    complex: ComplexJson,
    pairs: String,
    coeff: String,
    summands: Vec<SummandDoc>,
    by_degree: Vec<DegreeDoc>,
}

#[derive(Serialize)]
struct SummandDoc {
    index_set: Vec<usize>,
    internal_degree: i32,
    total_degree: i32,
    word: Vec<String>,
    rank: usize,
    torsion: Vec<String>,
}

#[derive(Serialize)]
struct DegreeDoc {
    degree: i32,
    rank: usize,
    torsion: Vec<String>,
}

fn summand_docs<R: CoeffRing>(module: &DecompositionModule<R>) -> Vec<SummandDoc> {
    let ring = &module.ring;
    module
        .summands
        .iter()
        .map(|s| SummandDoc {
            index_set: s.index.members(),
            internal_degree: s.internal_degree,
            total_degree: s.total_degree,
            word: word_names(module, s.index.members(), &s.word),
            rank: s.free_rank,
            torsion: s.torsion.iter().map(|d| ring.elem_string(d)).collect(),
        })
        .collect()
}

fn word_names<R: CoeffRing>(
    module: &DecompositionModule<R>,
    members: Vec<usize>,
    word: &[usize],
) -> Vec<String> {
    match &module.path {
        crate::decomposition::DecompositionPath::Cones(cones) => word
            .iter()
            .zip(members)
            .map(|(g, v)| cones[v - 1].generators[*g].0.clone())
            .collect(),
        _ => Vec::new(),
    }
}

fn cmd_betti<R: CoeffRing>(ring: R, job: &JobSpec) -> Result<(i32, String), CmdError> {
    let module = decompose(ring, &job.complex, &job.pairs, job.budget)?;
    let summands = summand_docs(&module);
    let groups = module.graded_groups();
    let by_degree: Vec<DegreeDoc> = groups
        .iter()
        .map(|(d, r, t)| DegreeDoc {
            degree: *d,
            rank: *r,
            torsion: t.iter().map(|x| module.ring.elem_string(x)).collect(),
        })
        .collect();
    if job.structured {
        let doc = BettiDoc {
            command: "betti",
            complex: (&job.complex).into(),
            pairs: job.pairs_source.clone(),
            coeff: job.coeff.label(),
            summands,
            by_degree,
        };
        return Ok((EXIT_OK, serde_json::to_string_pretty(&doc).unwrap() + "\n"));
    }
    let mut out = header(job);
    out.push_str("# decomposition summands (one row per (I, degree))\n");
    for s in &summands {
        let torsion = if s.torsion.is_empty() {
            String::new()
        } else {
            format!(" torsion=({})", s.torsion.join(","))
        };
        let word = if s.word.is_empty() {
            String::new()
        } else {
            format!(" word=({})", s.word.join("⊗"))
        };
        let _ = writeln!(
            out,
            "I={{{}}} q={} total={} rank={}{}{}",
            s.index_set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            s.internal_degree,
            s.total_degree,
            s.rank,
            torsion,
            word
        );
    }
    out.push_str("# total by degree\n");
    for d in &by_degree {
        let torsion = if d.torsion.is_empty() {
            String::new()
        } else {
            format!(" torsion=({})", d.torsion.join(","))
        };
        let _ = writeln!(out, "degree {}: rank {}{}", d.degree, d.rank, torsion);
    }
    Ok((EXIT_OK, out))
}

#[derive(Serialize)]
struct RingDoc {
    command: &'static str,
    complex: ComplexJson,
    pairs: String,
    coeff: String,
    generators: Vec<GenDoc>,
    products: Vec<ProductDoc>,
}

#[derive(Serialize)]
struct GenDoc {
    id: usize,
    index_set: Vec<usize>,
    internal_degree: i32,
    total_degree: i32,
    word: Vec<String>,
    order: Option<String>,
    representative: Vec<(Vec<usize>, String)>,
}

#[derive(Serialize)]
struct ProductDoc {
    left: usize,
    right: usize,
    path: String,
    terms: Vec<(usize, String)>,
}

fn path_name(p: ProductPath) -> &'static str {
    match p {
        ProductPath::Unit => "unit",
        ProductPath::Disjoint => "disjoint formula",
        ProductPath::SuspensionZero => "suspension zero",
        ProductPath::Cone => "cone formula",
        ProductPath::Geometric => "geometric path",
    }
}

fn representative_doc<R: CoeffRing>(
    star: &StarRing<R>,
    gen: usize,
) -> Vec<(Vec<usize>, String)> {
    let ring = &star.module.ring;
    let g = &star.generators[gen];
    let s = &star.module.summands[g.summand];
    let c: &Cochain<R::Elem> = s.basis().generator(g.position);
    let cx = match &s.kind {
        crate::decomposition::SummandKind::Link(info) => &info.cx,
        crate::decomposition::SummandKind::Geometric(info) => &info.model.cx,
    };
    c.vec
        .iter()
        .map(|(i, e)| {
            let cell = &cx.cells_in(c.degree)[*i];
            (cell.iter().map(|v| *v as usize).collect(), ring.elem_string(e))
        })
        .collect()
}

fn build_star<R: CoeffRing>(ring: R, job: &JobSpec) -> Result<StarRing<R>, CmdError> {
    let module = decompose(ring, &job.complex, &job.pairs, job.budget)?;
    Ok(multiplication_table_of(module, job.budget)?)
}

fn cmd_ring<R: CoeffRing>(ring: R, job: &JobSpec) -> Result<(i32, String), CmdError> {
    let star = build_star(ring, job)?;
    let module = &star.module;
    let generators: Vec<GenDoc> = star
        .generators
        .iter()
        .enumerate()
        .map(|(id, g)| {
            let s = &module.summands[g.summand];
            GenDoc {
                id,
                index_set: s.index.members(),
                internal_degree: g.internal_degree,
                total_degree: g.total_degree,
                word: word_names(module, s.index.members(), &s.word),
                order: g.order.as_ref().map(|d| module.ring.elem_string(d)),
                representative: representative_doc(&star, id),
            }
        })
        .collect();
    let mut products = Vec::new();
    for i in 0..star.num_generators() {
        for j in 0..star.num_generators() {
            let e = &star.table[i][j];
            products.push(ProductDoc {
                left: i,
                right: j,
                path: path_name(e.path).to_string(),
                terms: e
                    .coeffs
                    .iter()
                    .map(|(g, c)| (*g, module.ring.elem_string(c)))
                    .collect(),
            });
        }
    }
    if job.structured {
        let doc = RingDoc {
            command: "ring",
            complex: (&job.complex).into(),
            pairs: job.pairs_source.clone(),
            coeff: job.coeff.label(),
            generators,
            products,
        };
        return Ok((EXIT_OK, serde_json::to_string_pretty(&doc).unwrap() + "\n"));
    }
    let mut out = header(job);
    out.push_str("# generators\n");
    for g in &generators {
        let order = match &g.order {
            Some(d) => format!(" order={d}"),
            None => String::new(),
        };
        let word = if g.word.is_empty() {
            String::new()
        } else {
            format!(" word=({})", g.word.join("⊗"))
        };
        let _ = writeln!(
            out,
            "g{}: I={{{}}} q={} degree={}{}{}",
            g.id,
            g.index_set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            g.internal_degree,
            g.total_degree,
            order,
            word
        );
    }
    out.push_str("# products g_i * g_j (all ordered pairs)\n");
    for p in &products {
        let rhs = if p.terms.is_empty() {
            "0".to_string()
        } else {
            p.terms
                .iter()
                .map(|(g, c)| {
                    if c == "1" {
                        format!("g{g}")
                    } else {
                        format!("{c}·g{g}")
                    }
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let _ = writeln!(out, "g{}*g{} = {}   [{}]", p.left, p.right, rhs, p.path);
    }
    Ok((EXIT_OK, out))
}

#[derive(Serialize)]
struct TableDoc {
    command: &'static str,
    complex: ComplexJson,
    pairs: String,
    coeff: String,
    /// rows: (|I|, internal degree, rank, torsion count)
    cells: Vec<(usize, i32, usize, usize)>,
}

fn cmd_table<R: CoeffRing>(ring: R, job: &JobSpec) -> Result<(i32, String), CmdError> {
    let module = decompose(ring, &job.complex, &job.pairs, job.budget)?;
    use std::collections::BTreeMap;
    let mut cells: BTreeMap<(usize, i32), (usize, usize)> = BTreeMap::new();
    for s in &module.summands {
        let e = cells.entry((s.index.len(), s.internal_degree)).or_insert((0, 0));
        e.0 += s.free_rank;
        e.1 += s.torsion.len();
    }
    let list: Vec<(usize, i32, usize, usize)> =
        cells.iter().map(|((l, q), (r, t))| (*l, *q, *r, *t)).collect();
    if job.structured {
        let doc = TableDoc {
            command: "table",
            complex: (&job.complex).into(),
            pairs: job.pairs_source.clone(),
            coeff: job.coeff.label(),
            cells: list,
        };
        return Ok((EXIT_OK, serde_json::to_string_pretty(&doc).unwrap() + "\n"));
    }
    let mut out = header(job);
    out.push_str("# bigraded table: rows |I|, columns internal degree q; rank (+torsion count)\n");
    let qs: Vec<i32> = {
        let mut v: Vec<i32> = list.iter().map(|(_, q, _, _)| *q).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let sizes: Vec<usize> = {
        let mut v: Vec<usize> = list.iter().map(|(l, _, _, _)| *l).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let _ = write!(out, "{:>5}", "|I|");
    for q in &qs {
        let _ = write!(out, "{:>8}", format!("q={q}"));
    }
    out.push('\n');
    for l in sizes {
        let _ = write!(out, "{l:>5}");
        for q in &qs {
            match cells.get(&(l, *q)) {
                Some((r, 0)) => {
                    let _ = write!(out, "{r:>8}");
                }
                Some((r, t)) => {
                    let _ = write!(out, "{:>8}", format!("{r}+{t}t"));
                }
                None => {
                    let _ = write!(out, "{:>8}", ".");
                }
            }
        }
        out.push('\n');
    }
    Ok((EXIT_OK, out))
}

#[derive(Serialize)]
struct VerifyDoc {
    command: &'static str,
    complex: ComplexJson,
    pairs: String,
    coeff: String,
    splitting: Vec<VerifyRow>,
    eta_injective: Option<(usize, usize, bool)>,
    ring_pairs_checked: usize,
    ring_failures: Vec<VerifyFailure>,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyRow {
    degree: i32,
    decomposition: (usize, Vec<String>),
    smash_sum: (usize, Vec<String>),
    total: (usize, Vec<String>),
    pass: bool,
}

#[derive(Serialize)]
struct VerifyFailure {
    left: usize,
    right: usize,
    degree: i32,
    lhs: String,
    rhs: String,
}

fn cmd_verify<R: CoeffRing>(ring: R, job: &JobSpec) -> Result<(i32, String), CmdError> {
    if !job.pairs.is_simplicial() {
        return Err(CmdError::Input(InputError::PairFamily(
            "verify needs a simplicial pair family (cone pairs have no model)".into(),
        )));
    }
    let star = build_star(ring.clone(), job)?;
    let ctx = GeometricContext::full(ring, &job.complex, &job.pairs, job.budget)?;
    let splitting = verify_splitting(&ctx, &star.module);
    let generators: Vec<(usize, usize, i32)> = star
        .generators
        .iter()
        .map(|g| (g.summand, g.position, g.total_degree))
        .collect();
    let entry = |i: usize, j: usize| star.table[i][j].coeffs.clone();
    let view = TableView { module: &star.module, generators: &generators, entry: &entry };
    let eta = verify_eta_ring(&ctx, &view);
    let elem_strings = |v: &[R::Elem]| -> Vec<String> {
        v.iter().map(|x| star.module.ring.elem_string(x)).collect()
    };
    let rows: Vec<VerifyRow> = splitting
        .rows
        .iter()
        .map(|r| VerifyRow {
            degree: r.degree,
            decomposition: (r.decomposition.0, elem_strings(&r.decomposition.1)),
            smash_sum: (r.smash_sum.0, elem_strings(&r.smash_sum.1)),
            total: (r.total.0, elem_strings(&r.total.1)),
            pass: r.pass,
        })
        .collect();
    let failures: Vec<VerifyFailure> = eta
        .failures
        .iter()
        .map(|f| VerifyFailure {
            left: f.left_gen,
            right: f.right_gen,
            degree: f.degree,
            lhs: f.lhs.clone(),
            rhs: f.rhs.clone(),
        })
        .collect();
    let pass = splitting.pass && eta.pass;
    if job.structured {
        let doc = VerifyDoc {
            command: "verify",
            complex: (&job.complex).into(),
            pairs: job.pairs_source.clone(),
            coeff: job.coeff.label(),
            splitting: rows,
            eta_injective: splitting.eta_rank.as_ref().map(|e| (e.expected, e.got, e.pass)),
            ring_pairs_checked: eta.pairs.len(),
            ring_failures: failures,
            pass,
        };
        let code = if pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
        return Ok((code, serde_json::to_string_pretty(&doc).unwrap() + "\n"));
    }
    let mut out = header(job);
    out.push_str("# additive splitting: decomposition = ⊕ smash models = total space\n");
    for r in &rows {
        let fmt_group = |g: &(usize, Vec<String>)| -> String {
            if g.1.is_empty() {
                format!("{}", g.0)
            } else {
                format!("{}+({})", g.0, g.1.join(","))
            }
        };
        let _ = writeln!(
            out,
            "degree {}: decomposition={} smash={} total={} {}",
            r.degree,
            fmt_group(&r.decomposition),
            fmt_group(&r.smash_sum),
            fmt_group(&r.total),
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    if let Some(e) = &splitting.eta_rank {
        let _ = writeln!(
            out,
            "projection pullbacks independent: {}/{} {}",
            e.got,
            e.expected,
            if e.pass { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(
        out,
        "ring identity: {} generator pairs checked, {} failed {}",
        eta.pairs.len(),
        failures.len(),
        if eta.pass { "PASS" } else { "FAIL" }
    );
    for f in &failures {
        let _ = writeln!(
            out,
            "FAIL g{}*g{} degree {}: pullback of product = {} but cup of pullbacks = {}",
            f.left, f.right, f.degree, f.lhs, f.rhs
        );
    }
    let _ = writeln!(out, "{}", if pass { "VERIFIED" } else { "FAILED" });
    Ok((if pass { EXIT_OK } else { EXIT_VERIFY_FAILED }, out))
}

#[derive(Serialize)]
struct RegradeDoc {
    command: &'static str,
    complex: ComplexJson,
    pairs: String,
    pairs_other: String,
    coeff: String,
    generator_pairs: usize,
    mismatch: Option<(usize, usize)>,
    pass: bool,
}

fn cmd_regrade<R: CoeffRing>(ring: R, job: &JobSpec) -> Result<(i32, String), CmdError> {
    let Some((other, other_src)) = &job.pairs_other else {
        return Err(CmdError::Input(InputError::Parse(
            "regrade-check needs --pairs-other with the second suspension".into(),
        )));
    };
    // both descriptors must share the base family; the suspensions differ
    if job.pairs.per_vertex != other.per_vertex {
        return Err(CmdError::Input(InputError::PairFamily(
            "regrade-check compares two suspensions of the same base family".into(),
        )));
    }
    let base = PairFamily {
        per_vertex: job.pairs.per_vertex.clone(),
        suspension: vec![0; job.complex.m()],
    };
    let report = ungraded_iso_check(
        ring,
        &job.complex,
        &base,
        &job.pairs.suspension,
        &other.suspension,
        job.budget,
    )?;
    let pass = report.mismatch.is_none();
    if job.structured {
        let doc = RegradeDoc {
            command: "regrade-check",
            complex: (&job.complex).into(),
            pairs: job.pairs_source.clone(),
            pairs_other: other_src.clone(),
            coeff: job.coeff.label(),
            generator_pairs: report.generator_pairs.len(),
            mismatch: report.mismatch.as_ref().map(|m| m.left_pair),
            pass,
        };
        let code = if pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
        return Ok((code, serde_json::to_string_pretty(&doc).unwrap() + "\n"));
    }
    let mut out = header(job);
    let _ = writeln!(out, "# comparing against: {other_src}");
    let _ = writeln!(out, "generator correspondence: {} pairs", report.generator_pairs.len());
    match &report.mismatch {
        None => {
            let _ = writeln!(out, "all structure constants agree exactly");
            let _ = writeln!(out, "PASS");
            Ok((EXIT_OK, out))
        }
        Some(m) => {
            let _ = writeln!(
                out,
                "FAIL at generator pair ({}, {}): {:?} vs {:?}",
                m.left_pair.0,
                m.left_pair.1,
                m.lhs.iter().map(|(g, c)| (g, job.coeff_elem_string(c))).collect::<Vec<_>>(),
                m.rhs.iter().map(|(g, c)| (g, job.coeff_elem_string(c))).collect::<Vec<_>>()
            );
            Ok((EXIT_VERIFY_FAILED, out))
        }
    }
}

impl JobSpec {
    fn coeff_elem_string<E: std::fmt::Debug>(&self, e: &E) -> String {
        format!("{e:?}")
    }
}

/// Cohomology of the triangulated total model, for tests and tooling.
pub fn total_model_groups<R: CoeffRing>(
    ring: R,
    k: &SimplicialComplex,
    family: &PairFamily,
    budget: usize,
) -> Result<Vec<(i32, usize, Vec<R::Elem>)>, CmdError> {
    let mut ctx = GeometricContext::empty(ring, k, family, budget)?;
    ctx.build_total()?;
    Ok(cohomology_ranks(&ctx.total.as_ref().unwrap().cx).by_degree)
}

pub use crate::decomposition::DEFAULT_BUDGET as DEFAULT_CELL_BUDGET;

/// Parse command-line arguments into a job.
pub fn job_from_args(
    complex: &str,
    pairs: &str,
    coeff: &str,
    cmd: &str,
    out: &str,
    budget: Option<usize>,
    pairs_other: Option<&str>,
) -> Result<JobSpec, InputError> {
    let complex_parsed = load_complex(complex)?;
    let m = complex_parsed.m();
    let pairs_parsed = parse_pairs(pairs, m)?;
    let coeff_parsed = CoeffSpec::parse(coeff)?;
    let command = Command::parse(cmd)?;
    let structured = match out {
        "text" => false,
        "structured" => true,
        other => {
            return Err(InputError::Parse(format!(
                "unknown output format {other:?} (text|structured)"
            )))
        }
    };
    let pairs_other_parsed = match pairs_other {
        Some(p) => Some((parse_pairs(p, m)?, p.to_string())),
        None => None,
    };
    Ok(JobSpec {
        complex: complex_parsed,
        complex_source: complex.to_string(),
        pairs: pairs_parsed,
        pairs_source: pairs.to_string(),
        pairs_other: pairs_other_parsed,
        coeff: coeff_parsed,
        command,
        structured,
        budget: budget.unwrap_or(DEFAULT_BUDGET),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(complex: &str, pairs: &str, cmd: &str) -> JobSpec {
        job_from_args(complex, pairs, "Z", cmd, "text", None, None).unwrap()
    }

    #[test]
    fn betti_five_cycle() {
        let j = job("m=5; facets={1,2},{2,3},{3,4},{4,5},{5,1}", "disk-sphere:2", "betti");
        let (code, out) = run(&j);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("degree 3: rank 5"), "{out}");
        assert!(out.contains("degree 4: rank 5"), "{out}");
        assert!(out.contains("degree 7: rank 1"), "{out}");
    }

    #[test]
    fn betti_full_simplex() {
        let j = job("m=3; facets={1,2,3}", "disk-sphere:2", "betti");
        let (code, out) = run(&j);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("degree 0: rank 1"), "{out}");
        assert_eq!(out.matches("degree").count(), 1, "{out}");
    }

    #[test]
    fn ring_is_deterministic() {
        let j = job("m=4; facets={1,2},{2,3},{3,4},{4,1}", "disk-sphere:2", "ring");
        let (c1, o1) = run(&j);
        let (c2, o2) = run(&j);
        assert_eq!(c1, EXIT_OK);
        assert_eq!((c1, &o1), (c2, &o2), "reports must be byte-identical");
    }

    #[test]
    fn verify_square_boundary() {
        let j = job("m=4; facets={1,2},{2,3},{3,4},{4,1}", "disk-sphere:2", "verify");
        let (code, out) = run(&j);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("VERIFIED"), "{out}");
    }

    #[test]
    fn regrade_check_square() {
        let j = job_from_args(
            "m=4; facets={1,2},{2,3},{3,4},{4,1}",
            "disk-sphere:1;suspend:[1,1,1,1]",
            "Z",
            "regrade-check",
            "text",
            None,
            Some("disk-sphere:1;suspend:[3,3,3,3]"),
        )
        .unwrap();
        let (code, out) = run(&j);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("PASS"), "{out}");
    }

    #[test]
    fn invalid_inputs_exit_two() {
        assert!(job_from_args("m=2; facets={3}", "disk-sphere:1", "Z", "betti", "text", None, None)
            .is_err());
        assert!(
            job_from_args("m=2; facets={1}", "disk-sphere:1", "Zp:4", "betti", "text", None, None)
                .is_err()
        );
    }

    #[test]
    fn budget_exit_three() {
        let j = JobSpec {
            budget: 10,
            ..job("m=4; facets={1,2},{2,3},{3,4},{4,1}", "disk-sphere:2", "verify")
        };
        let (code, out) = run(&j);
        assert_eq!(code, EXIT_BUDGET, "{out}");
    }

    #[test]
    fn structured_ring_parses_back() {
        let mut j = job("m=2; facets={1},{2}", "disk-sphere:2", "ring");
        j.structured = true;
        let (code, out) = run(&j);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "ring");
        assert_eq!(v["generators"].as_array().unwrap().len(), 2);
    }
}
