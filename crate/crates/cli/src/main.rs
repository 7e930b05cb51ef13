use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use twoiso::io::{AnalyzeInput, DefectInput};
use twoiso::reproduce::{reproduce, ReproduceOptions, Reproduction};
use twoiso::search::{search_dirichlet_alpha, search_rank_one, GridSpec, SEARCH_DEFAULT_N};
use twoiso::{
    theorem_verdict, TheoremReport, TwoIsoError, C64, DEFAULT_TOL_DEFECT, DEFAULT_TOL_RANK,
};

// stdout closed early (e.g. piped into `head`) is not an error
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "twoiso",
    version,
    about = "Decide whether T + u ⊗ v is a 2-isometry"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Tolerance on defect residuals
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_DEFECT)]
    tol_defect: f64,
    /// Tolerance for rank and branch decisions
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_RANK)]
    tol_rank: f64,
    /// Truncation degree, or the dimension for c2-rankone
    #[arg(long = "dim", short = 'N', global = true)]
    dim: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Accept a base operator that is not a 2-isometry
    #[arg(long, global = true)]
    allow_non_2iso_base: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rerun a built-in example and check it against its known outcome
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(twoiso::EXAMPLES))]
        name: String,
        /// Coefficient for dirichlet-n0, as RE or RE,IM
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: Option<C64>,
    },
    /// Analyze a perturbation problem read from a JSON file
    Analyze { input: PathBuf },
    /// Scan parameters for 2-isometric perturbations
    Search {
        #[command(subcommand)]
        target: SearchTarget,
    },
    /// Evaluate ||x||^2 - 2||Tx||^2 + ||T^2 x||^2 for an operator and vector in a JSON file
    Defect { input: PathBuf },
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    re_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    re_max: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    im_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    im_max: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
}

impl GridArgs {
    fn spec(self) -> GridSpec {
        GridSpec {
            re_min: self.re_min,
            re_max: self.re_max,
            im_min: self.im_min,
            im_max: self.im_max,
            step: self.step,
        }
    }
}

#[derive(Subcommand)]
enum SearchTarget {
    /// alpha over a grid for M_z + alpha z^n ⊗ 1 on the Dirichlet space
    DirichletAlpha {
        /// Power n of the monomial
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// c over a grid for T + c Tv ⊗ v with random unitary T on C^d
    C2Rankone {
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err("expected RE or RE,IM".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_MISMATCH),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn read(path: &Path) -> Result<String, TwoIsoError> {
    std::fs::read_to_string(path)
        .map_err(|e| TwoIsoError::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

fn check_tolerances(g: &Global) -> Result<(), TwoIsoError> {
    for (name, tol) in [("--tol-defect", g.tol_defect), ("--tol-rank", g.tol_rank)] {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(TwoIsoError::InvalidParameter(format!(
                "{name} must be positive"
            )));
        }
    }
    Ok(())
}

fn print_json(value: &impl serde::Serialize) -> Result<(), TwoIsoError> {
    out!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// `Ok(true)` when every check passes.
fn run(cli: &Cli) -> Result<bool, TwoIsoError> {
    let g = &cli.global;
    check_tolerances(g)?;
    match &cli.command {
        Command::Reproduce { name, alpha } => {
            let mut opts = ReproduceOptions {
                tol_defect: g.tol_defect,
                tol_rank: g.tol_rank,
                n: g.dim,
                ..ReproduceOptions::default()
            };
            if let Some(a) = alpha {
                opts.alpha = *a;
            }
            let rep = reproduce(name, &opts)?;
            match g.format {
                Format::Json => print_json(&rep)?,
                Format::Text => print_reproduction(&rep),
            }
            Ok(rep.passed)
        }
        Command::Analyze { input } => {
            let doc = AnalyzeInput::from_json(&read(input)?)?;
            let problem = doc.problem(g.dim, g.tol_rank, g.tol_defect, g.allow_non_2iso_base)?;
            let report = theorem_verdict(&problem)?;
            let expected = doc.expected();
            let pass =
                report.verdicts_agree() && expected.is_none_or(|e| e == report.verdict_theorem);
            match g.format {
                Format::Json => print_json(&json!({
                    "report": report,
                    "expected_two_isometry": expected,
                    "pass": pass,
                }))?,
                Format::Text => {
                    print_report(&report, "");
                    if let Some(e) = expected {
                        out!("expected two_isometry: {e}");
                    }
                    out!("result: {}", if pass { "PASS" } else { "FAIL" });
                }
            }
            Ok(pass)
        }
        Command::Search { target } => search(g, target),
        Command::Defect { input } => {
            let out = DefectInput::from_json(&read(input)?)?.evaluate()?;
            match g.format {
                Format::Json => print_json(&out)?,
                Format::Text => out!(
                    "{} {}",
                    out.value,
                    if out.truncation_safe {
                        "safe"
                    } else {
                        "unsafe"
                    }
                ),
            }
            Ok(true)
        }
    }
}

fn search(g: &Global, target: &SearchTarget) -> Result<bool, TwoIsoError> {
    match target {
        SearchTarget::DirichletAlpha { n, grid } => {
            let n_trunc = g.dim.unwrap_or(SEARCH_DEFAULT_N.max(2 * n + 2));
            let hits = search_dirichlet_alpha(*n, &grid.spec(), n_trunc, g.tol_defect)?;
            // hits for n = 1 must sit on |alpha + 1| = 1
            let on_locus = *n != 1 || hits.iter().all(|h| h.circle_distance <= grid.step);
            match g.format {
                Format::Json => print_json(&json!({
                    "target": "dirichlet-alpha",
                    "n": n,
                    "max_degree": n_trunc,
                    "grid": grid.spec(),
                    "tol_defect": g.tol_defect,
                    "hits": hits,
                }))?,
                Format::Text => {
                    out!(
                        "M_z + alpha z^{n} ⊗ 1 on Dirichlet N={n_trunc}: {} hits",
                        hits.len()
                    );
                    if !hits.is_empty() {
                        out!(
                            "{:>10} {:>10} {:>12} {:>12}",
                            "re",
                            "im",
                            "defect",
                            "| |a+1|-1 |"
                        );
                    }
                    for h in &hits {
                        out!(
                            "{:>10.4} {:>10.4} {:>12.3e} {:>12.3e}",
                            h.alpha[0],
                            h.alpha[1],
                            h.oracle_defect,
                            h.circle_distance
                        );
                    }
                }
            }
            Ok(on_locus)
        }
        SearchTarget::C2Rankone { trials, grid } => {
            let d = g.dim.unwrap_or(2) as usize;
            let hits = search_rank_one(d, *trials, &grid.spec(), g.seed, g.tol_defect)?;
            let agree = hits.iter().all(|h| h.verdict_theorem);
            match g.format {
                Format::Json => print_json(&json!({
                    "target": "c2-rankone",
                    "dim": d,
                    "trials": trials,
                    "seed": g.seed,
                    "grid": grid.spec(),
                    "tol_defect": g.tol_defect,
                    "hits": hits,
                }))?,
                Format::Text => {
                    out!(
                        "T + c Tv ⊗ v on C^{d}, {trials} trials, seed {}: {} hits",
                        g.seed,
                        hits.len()
                    );
                    if !hits.is_empty() {
                        out!(
                            "{:>6} {:>10} {:>10} {:>12} {:>7} {:>8}",
                            "trial",
                            "re c",
                            "im c",
                            "defect",
                            "branch",
                            "theorem"
                        );
                    }
                    for h in &hits {
                        out!(
                            "{:>6} {:>10.4} {:>10.4} {:>12.3e} {:>7} {:>8}",
                            h.trial,
                            h.c[0],
                            h.c[1],
                            h.oracle_defect,
                            h.branch.label(),
                            h.verdict_theorem
                        );
                    }
                }
            }
            Ok(agree)
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"))
}

fn print_report(r: &TheoremReport, indent: &str) {
    out!(
        "{indent}space: {:?}, dim {}, safe dim {}",
        r.space.kind(),
        r.space.dim(),
        r.safe_dim
    );
    out!(
        "{indent}tolerances: tol_defect {:e}, tol_rank {:e}",
        r.tol_defect,
        r.tol_rank
    );
    if let Some(n) = r.v_rescaled_from {
        out!("{indent}v rescaled from norm {n}");
    }
    out!("{indent}base defect: {:.3e}", r.base_defect);
    out!("{indent}branch: {}, dim S = {}", r.branch_label, r.s_dim);
    out!("{indent}kernel residual: {:.6e}", r.kernel_residual);
    out!("{indent}gamma: {}", opt(r.gamma));
    out!(
        "{indent}(ii)(a) residual: {} (evaluated dim {})",
        opt(r.cond_iia_residual),
        r.cond_iia_evaluated_dim
            .map_or("-".to_string(), |d| d.to_string())
    );
    out!("{indent}(ii)(b) residual: {}", opt(r.cond_iib_residual));
    out!("{indent}oracle defect: {:.6e}", r.oracle_defect);
    out!(
        "{indent}verdict: theorem {}, oracle {}",
        r.verdict_theorem,
        r.verdict_oracle
    );
}

fn print_reproduction(rep: &Reproduction) {
    out!("reproduce {}", rep.name);
    for c in &rep.checks {
        out!(
            "  {} {}: expected {}, observed {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.expected,
            c.observed
        );
    }
    for r in &rep.reports {
        out!("report {}:", r.label);
        print_report(&r.report, "  ");
    }
    for n in &rep.notes {
        out!("note: {n}");
    }
    out!("result: {}", if rep.passed { "PASS" } else { "FAIL" });
}
