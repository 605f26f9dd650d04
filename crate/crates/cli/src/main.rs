use std::path::PathBuf;
use std::process::ExitCode;

use aqg_core::coverage;
use aqg_core::examples::{is_rational_square, ExampleSpec};
use aqg_core::hopf::file::load_presentation;
use aqg_core::suites::{build_example, run_suite, summary_line, RunOptions, Suite};
use aqg_core::{AqgError, Presentation, DEFAULT_TOLERANCE};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aqg", version, about = "Verify the modular and analytic structure of algebraic quantum groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and report every identity checked.
    Verify(VerifyArgs),
    /// Run every suite and list propositions that have no check.
    Coverage(Source),
}

#[derive(Args, Clone)]
struct Source {
    /// suq2, group:C[Z8], group:F[S3], ...
    #[arg(long, default_value = "group:C[S3]")]
    example: String,
    /// Deformation parameter for suq2, a rational in (0, 1).
    #[arg(long)]
    q: Option<String>,
    /// Truncation degree.
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Load a presentation from a file instead of a built-in example.
    #[arg(long)]
    presentation_file: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "all")]
    suite: String,
    /// Comma-separated real parameters for the one-parameter groups.
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long)]
    report_json: Option<PathBuf>,
    #[arg(long)]
    report_md: Option<PathBuf>,
    /// Require exact polar parts J, Ĵ (q must be a rational square).
    #[arg(long)]
    exact_polar: bool,
    /// Print only failures and the final line.
    #[arg(long)]
    quiet: bool,
}

fn tolerance(flag: Option<f64>) -> Result<f64, AqgError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("AQG_DEFAULT_TOLERANCE") {
        Ok(v) => v.trim().parse().map_err(|_| AqgError::Usage(format!("AQG_DEFAULT_TOLERANCE is not a number: '{v}'"))),
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

fn presentation(s: &Source, tol: f64) -> Result<Presentation, AqgError> {
    match &s.presentation_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| AqgError::Usage(format!("cannot read {}: {e}", path.display())))?;
            // Malformed files are usage errors; well-formed files that fail the axioms are check failures.
            load_presentation(&text, tol).map_err(|e| match e {
                AqgError::Parse { .. } => AqgError::Usage(format!("{}: {e}", path.display())),
                e => e,
            })
        }
        None => build_example(&ExampleSpec::parse(&s.example, s.q.as_deref())?, s.degree),
    }
}

fn options(s: &Source, tol: f64) -> RunOptions {
    RunOptions { degree: s.degree, tolerance: tol, seed: s.seed, ..Default::default() }
}

fn verify(a: &VerifyArgs) -> Result<bool, AqgError> {
    let suite: Suite = a.suite.parse()?;
    let tol = tolerance(a.source.tolerance)?;
    if a.exact_polar && a.source.presentation_file.is_none() {
        let spec = ExampleSpec::parse(&a.source.example, a.source.q.as_deref())?;
        if let Some(q) = spec.q() {
            if !is_rational_square(q) {
                return Err(AqgError::Usage(format!("--exact-polar needs q to be a rational square; q = {q} is not")));
            }
        }
    }
    let p = presentation(&a.source, tol)?;
    let mut o = options(&a.source, tol);
    o.exact_polar = a.exact_polar;
    if let Some(t) = &a.t {
        o.t_samples = t.clone();
    }
    let rep = run_suite(&p, suite, &o)?;
    for c in &rep.checks {
        if !a.quiet || c.status == aqg_core::report::Status::Fail {
            println!("{}", summary_line(c));
            if let Some(w) = &c.witness {
                if c.status == aqg_core::report::Status::Fail {
                    println!("      witness: {w}");
                }
            }
        }
    }
    let failures = rep.failures().len();
    println!("{} checks, {} failed: {}", rep.checks.len(), failures, if rep.passed() { "PASS" } else { "FAIL" });
    if let Some(path) = &a.report_json {
        std::fs::write(path, rep.to_json() + "\n").map_err(|e| AqgError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &a.report_md {
        std::fs::write(path, rep.to_markdown()).map_err(|e| AqgError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(rep.passed())
}

fn audit(s: &Source) -> Result<bool, AqgError> {
    let tol = tolerance(s.tolerance)?;
    let p = presentation(s, tol)?;
    let rep = run_suite(&p, Suite::All, &options(s, tol))?;
    let a = coverage::audit(&rep);
    print!("{}", a.to_text());
    Ok(a.is_complete())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Coverage(s) => audit(s),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ AqgError::Usage(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
