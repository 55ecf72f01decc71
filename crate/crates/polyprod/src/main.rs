use clap::Parser;

/// Cohomology rings of polyhedral products: decomposition, star products,
/// and triangulated verification.
#[derive(Parser)]
#[command(name = "polyprod", version, about)]
struct Args {
    /// Complex: inline (`m=4; facets={1,2},...`), JSON, or a file path
    #[arg(long)]
    complex: String,
    /// Pair family: `disk-sphere:n`, `disk-sphere:[n1,...]`,
    /// `pair-file:<path>`, `cone:<ring-file>`, with optional
    /// `;suspend:[t1,...,tm]`
    #[arg(long)]
    pairs: String,
    /// Coefficients: `Z` or `Zp:<prime>`
    #[arg(long, default_value = "Z")]
    coeff: String,
    /// Command: betti | ring | verify | table | regrade-check
    #[arg(long)]
    cmd: String,
    /// Output format: text | structured
    #[arg(long, default_value = "text")]
    out: String,
    /// Ceiling on triangulated model cells
    #[arg(long)]
    budget: Option<usize>,
    /// Second pair family for regrade-check
    #[arg(long)]
    pairs_other: Option<String>,
}

fn main() {
    let args = Args::parse();
    let job = match polyprod::cli::job_from_args(
        &args.complex,
        &args.pairs,
        &args.coeff,
        &args.cmd,
        &args.out,
        args.budget,
        args.pairs_other.as_deref(),
    ) {
        Ok(job) => job,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(polyprod::cli::EXIT_INPUT);
        }
    };
    let (code, report) = polyprod::cli::run(&job);
    print!("{report}");
    std::process::exit(code);
}
