//! Subcommands. Each returns the process exit code.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gaussinv::coeff_io::{read_coeffs, write_coeffs};
use gaussinv::operator::{build_right_inverse, estimate_op_norm, solve_min_norm, Family, OperatorSpec};
use gaussinv::quadrature::{build_rule_1d, build_rule_2d};
use num_complex::Complex64;
use serde_json::json;

use crate::config::{Suite, TrialConfig};
use crate::suites::run_suite;
use crate::{CliError, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};

#[derive(Debug, Parser)]
#[command(name = "gaussinv", version, about = "Right inverses and norm estimates on Gaussian-weighted L² spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print Gauss–Hermite nodes and weights as CSV.
    Rule(RuleArgs),
    /// Minimal-norm solve of `α·A u + c·u = α·f` for a coefficient file.
    Solve(SolveArgs),
    /// Run a verification suite and write its report.
    Verify(SuiteArgs),
    /// Measure the norm of the right inverse against the candidate constants.
    Opnorm(OperatorArgs),
    /// Scaled-weight suite.
    Scaled(SuiteArgs),
    /// Bounded-domain suite.
    Domain(SuiteArgs),
    /// Convex-weight first-order suite.
    Convex(SuiteArgs),
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    /// Number of nodes per axis.
    #[arg(long, short = 'q')]
    pub points: usize,
    /// Tensor rule on ℂ with Lebesgue weights.
    #[arg(long)]
    pub complex: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    /// lap, dk, dbar or mixed.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, visible_alias = "alpha", default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    #[arg(long = "c-re", visible_alias = "c", default_value_t = 0.0, allow_negative_numbers = true)]
    pub c_re: f64,
    #[arg(long = "c-im", default_value_t = 0.0, allow_negative_numbers = true)]
    pub c_im: f64,
    /// Truncation degree `N`.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Band limit `B` of the inputs.
    #[arg(long)]
    pub band: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol_bound: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    /// Coefficient file of `f`.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Suite to run (verify only; the other suite commands fix it).
    #[arg(long)]
    pub suite: Option<String>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Restrict to one family.
    #[arg(long)]
    pub family: Option<String>,
    /// Restrict to one order.
    #[arg(long)]
    pub k: Option<usize>,
    /// Fix `|α|`.
    #[arg(long, visible_alias = "alpha", allow_negative_numbers = true)]
    pub alpha_re: Option<f64>,
    /// Fix `c` (both real and imaginary ranges for complex families).
    #[arg(long = "c-re", visible_alias = "c", allow_negative_numbers = true)]
    pub c_re: Option<f64>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub band: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional CSV flattening of the records.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub tol_bound: Option<f64>,
    /// Include wall time in the report.
    #[arg(long)]
    pub timing: bool,
}

/// Parses `args` and runs the command; errors become exit code 2.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Rule(a) => cmd_rule(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_suite(&a, None),
        Command::Opnorm(a) => cmd_opnorm(&a),
        Command::Scaled(a) => cmd_suite(&a, Some(Suite::Scaled)),
        Command::Domain(a) => cmd_suite(&a, Some(Suite::Domain)),
        Command::Convex(a) => cmd_suite(&a, Some(Suite::Convex)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

pub fn cmd_rule(a: &RuleArgs) -> Result<i32, CliError> {
    let mut w = output(&a.out)?;
    if a.complex {
        let rule = build_rule_2d(a.points)?;
        writeln!(w, "re,im,weight")?;
        for (z, wt) in rule.nodes().iter().zip(rule.weights()) {
            writeln!(w, "{},{},{}", z.re, z.im, wt)?;
        }
    } else {
        let rule = build_rule_1d(a.points)?;
        writeln!(w, "x,weight")?;
        for (x, wt) in rule.nodes().iter().zip(rule.weights()) {
            writeln!(w, "{x},{wt}")?;
        }
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn operator_spec(a: &OperatorArgs) -> Result<OperatorSpec, CliError> {
    let family = Family::from_short_name(&a.family, a.k)?;
    Ok(OperatorSpec::new(
        family,
        Complex64::new(a.alpha_re, a.alpha_im),
        Complex64::new(a.c_re, a.c_im),
    )?)
}

fn default_degree(family: Family, band: usize) -> usize {
    let base = if family.is_complex() { 16 } else { 96 };
    base.max(band + 4 * family.order())
}

pub fn cmd_solve(a: &SolveArgs) -> Result<i32, CliError> {
    let spec = operator_spec(&a.op)?;
    let file = File::open(&a.input).map_err(|e| CliError::Usage(format!("{}: {e}", a.input.display())))?;
    let f = read_coeffs(BufReader::new(file))?;
    if f.is_complex() != spec.family().is_complex() {
        return Err(CliError::Usage(format!(
            "{} takes {} coefficients",
            spec.family(),
            if spec.family().is_complex() { "complex" } else { "real" }
        )));
    }
    let degree = a.op.degree.unwrap_or_else(|| default_degree(spec.family(), f.degree()));
    let r = solve_min_norm(&spec, &f, degree)?;
    {
        let mut w = output(&a.op.out)?;
        write_coeffs(&mut w, &r.solution)?;
        w.flush()?;
    }
    let tol = a.op.tol_bound.unwrap_or(gaussinv::operator::BOUND_SLACK);
    let satisfied = r.satisfies(tol);
    let line = json!({
        "family": spec.family().short_name(),
        "k": spec.order(),
        "degree": degree,
        "ratio_sq": r.ratio_sq,
        "bound_sq": r.bound_sq,
        "residual": r.residual_norm,
        "satisfied": satisfied,
    });
    if a.op.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(if satisfied && r.residual_ok() { EXIT_OK } else { EXIT_VIOLATION })
}

pub fn cmd_opnorm(a: &OperatorArgs) -> Result<i32, CliError> {
    let spec = operator_spec(a)?;
    let family = spec.family();
    let degree = a.degree.unwrap_or_else(|| default_degree(family, 0));
    let band = a.band.unwrap_or_else(|| degree.saturating_sub(4 * family.order()));
    let t = build_right_inverse(&spec, degree)?;
    let est = estimate_op_norm(&t, band, a.trials, a.seed)?;
    let measured = est.sampled.max(est.exact);
    let value = json!({
        "family": family.short_name(),
        "k": family.order(),
        "alpha": [spec.alpha().re, spec.alpha().im],
        "c": [spec.c().re, spec.c().im],
        "band": band,
        "degree": degree,
        "trials": a.trials,
        "seed": a.seed,
        "measured": measured,
        "sampled": est.sampled,
        "exact": est.exact,
        "diagonal": est.diagonal,
        "candidates": est.candidates.iter().map(|c| json!({
            "label": c.label,
            "value": c.value,
            "satisfied": c.satisfied,
        })).collect::<Vec<_>>(),
    });
    let mut w = output(&a.out)?;
    writeln!(w, "{}", serde_json::to_string_pretty(&value).map_err(|e| CliError::Usage(e.to_string()))?)?;
    w.flush()?;
    Ok(if est.candidates[0].satisfied { EXIT_OK } else { EXIT_VIOLATION })
}

fn suite_config(a: &SuiteArgs, fixed: Option<Suite>) -> Result<TrialConfig, CliError> {
    let requested = match (&a.suite, fixed) {
        (Some(_), Some(s)) => {
            return Err(CliError::Usage(format!("the {s} command does not take --suite")));
        }
        (Some(name), None) => Some(name.parse::<Suite>()?),
        (None, s) => s,
    };
    let mut cfg = match &a.config {
        Some(path) => {
            let c = TrialConfig::from_file(path, requested.unwrap_or(Suite::EqualityPins))?;
            match requested {
                Some(s) if s != c.suite => {
                    return Err(CliError::Usage(format!("config names suite {} but {s} was requested", c.suite)));
                }
                _ => c,
            }
        }
        None => TrialConfig::defaults(requested.ok_or_else(|| CliError::Usage("give --suite or --config".into()))?),
    };
    let complex_family = a.family.as_deref().map(|f| f == "dbar" || f == "mixed");
    if let Some(f) = &a.family {
        cfg.families = vec![f.clone()];
    }
    if let Some(k) = a.k {
        cfg.k_min = k;
        cfg.k_max_real = k;
        cfg.k_max_complex = k;
    }
    if let Some(alpha) = a.alpha_re {
        cfg.alpha_min = alpha.abs();
        cfg.alpha_max = alpha.abs();
    }
    if let Some(c) = a.c_re {
        cfg.c_min = c;
        cfg.c_max = c;
    }
    if let Some(n) = a.degree {
        if complex_family != Some(true) {
            cfg.degree = n;
        }
        if complex_family != Some(false) {
            cfg.complex_degree = n;
        }
    }
    if let Some(b) = a.band {
        if complex_family != Some(true) {
            cfg.band = b;
        }
        if complex_family != Some(false) {
            cfg.complex_band = b;
        }
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
        cfg.complex_trials = t;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(t) = a.tol_bound {
        cfg.tol_bound = t;
    }
    if a.out.is_some() {
        cfg.out = a.out.clone();
    }
    if a.csv.is_some() {
        cfg.csv = a.csv.clone();
    }
    cfg.timing |= a.timing;
    Ok(cfg)
}

pub fn cmd_suite(a: &SuiteArgs, fixed: Option<Suite>) -> Result<i32, CliError> {
    let cfg = suite_config(a, fixed)?;
    let report = run_suite(&cfg)?;
    match &cfg.out {
        Some(p) => report.write_json(p)?,
        None => print!("{}", report.to_json()?),
    }
    if let Some(p) = &cfg.csv {
        report.write_csv(File::create(p)?)?;
    }
    eprintln!(
        "{}: {} records, {} violations",
        cfg.suite,
        report.aggregates.records,
        report.violations()
    );
    for note in &report.aggregates.notes {
        eprintln!("note: {note}");
    }
    Ok(if report.violations() == 0 { EXIT_OK } else { EXIT_VIOLATION })
}
