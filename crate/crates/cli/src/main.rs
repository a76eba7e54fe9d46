//! Command line front end for moment kernels on the unit sphere of `C^d`.
//!
//! Every subcommand loads a measure (from a JSON file or a built-in preset),
//! computes one layer of the pipeline, writes a deterministic artifact into
//! `--out`, and prints a one-line summary. Exit codes are part of the
//! contract: `0` success, `2` a verified identity failed, `3` the moment
//! kernel stopped being positive definite, `64` bad usage or an unreadable
//! spec, `1` an I/O failure while writing artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ballszego::kernelfact::{self, KernelError, VerblunskyTable};
use ballszego::{christoffel, measure, moments, orthopoly, szego};
use ballszego::{MeasureSpec, MomentKernel, QuadratureRule, SpecError, C64};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "ballszego",
    version,
    about = "Moment kernels, orthonormal polynomials, and Christoffel functions on the unit sphere of C^d"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the moment kernel window K(a, b) for all ranks up to N
    Moments(CommonArgs),
    /// Write the window factorizations and the three polynomial families
    Ops(CommonArgs),
    /// Write the coefficient table gamma(i, j) with its defects
    Verblunsky(CommonArgs),
    /// Write the Christoffel values at the origin, one per complete level
    Christoffel(CommonArgs),
    /// Write the full cross-checked report with residuals and verdict
    Szego(CommonArgs),
    /// Run every identity check and exit nonzero if any residual is too large
    Verify(CommonArgs),
    /// Rebuild the kernel from its diagonal and coefficient table, compare
    Reconstruct(CommonArgs),
    /// Write the verified strict-gap example with its certificate
    Counterexample(CounterArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Measure description, JSON file
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "preset",
        required_unless_present = "preset"
    )]
    spec: Option<PathBuf>,

    /// Built-in measure: lebesgue, counterexample, or stable-demo
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Largest rank of the moment window
    #[arg(short = 'N', long = "max-rank", value_name = "RANK", default_value_t = 27)]
    max_rank: usize,

    /// Artifact format
    #[arg(long, value_name = "FMT", default_value = "json")]
    format: Format,

    /// Quadrature nodes per coordinate (angular and radial)
    #[arg(long, value_name = "COUNT", default_value_t = 64)]
    nodes: usize,

    /// Residual tolerance for verification checks
    #[arg(long, value_name = "TOL", default_value_t = 1e-8)]
    tol: f64,

    /// Directory for artifacts (created if missing)
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct CounterArgs {
    /// Largest rank of the moment window
    #[arg(short = 'N', long = "max-rank", value_name = "RANK", default_value_t = 27)]
    max_rank: usize,

    /// Artifact format
    #[arg(long, value_name = "FMT", default_value = "json")]
    format: Format,

    /// Residual tolerance for the certificate
    #[arg(long, value_name = "TOL", default_value_t = 1e-8)]
    tol: f64,

    /// Directory for artifacts (created if missing)
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Error)]
enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Violation(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Usage(_) | RunError::Spec(_) => 64,
            RunError::Kernel(KernelError::NotPositiveDefinite { .. }) => 3,
            RunError::Kernel(_) => 64,
            RunError::Violation(_) => 2,
            RunError::Io(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), RunError> {
    match command {
        Command::Moments(args) => cmd_moments(&args),
        Command::Ops(args) => cmd_ops(&args),
        Command::Verblunsky(args) => cmd_verblunsky(&args),
        Command::Christoffel(args) => cmd_christoffel(&args),
        Command::Szego(args) => cmd_szego(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Reconstruct(args) => cmd_reconstruct(&args),
        Command::Counterexample(args) => cmd_counterexample(&args),
    }
}

/// Loads the spec from `--spec` or `--preset` and validates it.
fn load_spec(args: &CommonArgs) -> Result<MeasureSpec, RunError> {
    match (&args.spec, &args.preset) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(MeasureSpec::from_json_str(&text)?)
        }
        (None, Some(name)) => Ok(measure::preset(name)?),
        _ => unreachable!("argument parsing enforces exactly one source"),
    }
}

/// Builds the kernel window, checking first that the quadrature resolution
/// covers every frequency the window can produce.
fn build_kernel(
    spec: &MeasureSpec,
    max_rank: usize,
    rule: &QuadratureRule,
) -> Result<MomentKernel, RunError> {
    if !spec.has_exact_moments() {
        let window_degree = ballszego::multiindex::shortlex_range(spec.d, max_rank + 1)
            .last()
            .map_or(0, |a| a.degree());
        let weight_degree = spec.weight.as_ref().map_or(0, |w| w.g.max_degree());
        let needed = 2 * (window_degree + weight_degree) as usize + 2;
        if rule.angular < needed {
            return Err(RunError::Usage(format!(
                "--nodes {} is below the degree-exactness requirement {needed} for this window",
                rule.angular
            )));
        }
    }
    Ok(if spec.has_exact_moments() {
        moments::kernel_window(spec, max_rank)
    } else {
        moments::kernel_window_quadrature(spec, max_rank, rule)
    })
}

/// Writes `text` to `<out>/<name>.<ext>` and returns the path.
fn write_artifact(out: &Path, name: &str, format: Format, text: &str) -> Result<PathBuf, RunError> {
    fs::create_dir_all(out)?;
    let path = out.join(format!("{name}.{}", format.ext()));
    fs::write(&path, text)?;
    Ok(path)
}

fn json_string<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable artifact");
    text.push('\n');
    text
}

/// Flushes negative zero so artifacts never print `-0`.
fn nz(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn pair(z: C64) -> [f64; 2] {
    [nz(z.re), nz(z.im)]
}

// ---------------------------------------------------------------------------
// moments

#[derive(Serialize)]
struct MomentEntryRow {
    row: usize,
    col: usize,
    index_row: String,
    index_col: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct MomentArtifact {
    d: usize,
    max_rank: usize,
    total_mass: f64,
    entries: Vec<MomentEntryRow>,
}

fn moment_rows(kernel: &MomentKernel) -> Vec<MomentEntryRow> {
    let mut rows = Vec::new();
    for r in 0..=kernel.max_rank() {
        for c in 0..=kernel.max_rank() {
            let v = kernel.entry(r, c);
            rows.push(MomentEntryRow {
                row: r,
                col: c,
                index_row: kernel.index(r).compact(),
                index_col: kernel.index(c).compact(),
                re: nz(v.re),
                im: nz(v.im),
            });
        }
    }
    rows
}

fn cmd_moments(args: &CommonArgs) -> Result<(), RunError> {
    let spec = load_spec(args)?;
    let rule = QuadratureRule::with_nodes(args.nodes);
    let kernel = build_kernel(&spec, args.max_rank, &rule)?;
    let rows = moment_rows(&kernel);
    let text = match args.format {
        Format::Json => json_string(&MomentArtifact {
            d: kernel.dim(),
            max_rank: kernel.max_rank(),
            total_mass: kernel.entry(0, 0).re,
            entries: rows,
        }),
        Format::Csv => {
            let mut out = String::from("rank_row,rank_col,index_row,index_col,re,im\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.row, r.col, r.index_row, r.index_col, r.re, r.im
                );
            }
            out
        }
    };
    let path = write_artifact(&args.out, "moments", args.format, &text)?;
    println!(
        "moments: d={} max_rank={} mass={} -> {}",
        kernel.dim(),
        kernel.max_rank(),
        kernel.entry(0, 0).re,
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// ops

#[derive(Serialize)]
struct OpsArtifact {
    d: usize,
    max_rank: usize,
    /// Upper factor of the Gram window, `A = F* F`.
    upper: Vec<Vec<[f64; 2]>>,
    /// Lower factor of the Gram window, `A = G* G`.
    lower: Vec<Vec<[f64; 2]>>,
    /// Orthonormal family; row `n` holds the coefficients of `phi_n`.
    orthonormal: Vec<Vec<[f64; 2]>>,
    /// Monic family.
    monic: Vec<Vec<[f64; 2]>>,
    /// Sharp family; row `n` is the reversed-window unit vector.
    sharp: Vec<Vec<[f64; 2]>>,
    leading: Vec<f64>,
    monic_norm_sq: Vec<f64>,
}

fn cmd_ops(args: &CommonArgs) -> Result<(), RunError> {
    let spec = load_spec(args)?;
    let rule = QuadratureRule::with_nodes(args.nodes);
    let kernel = build_kernel(&spec, args.max_rank, &rule)?;
    let factors = kernelfact::cholesky_window(&kernel, 0, kernel.max_rank())?;
    let sys = orthopoly::orthonormal_system(&kernel)?;
    let m = kernel.max_rank() + 1;
    let art = OpsArtifact {
        d: kernel.dim(),
        max_rank: kernel.max_rank(),
        upper: (0..m)
            .map(|r| (0..m).map(|c| pair(factors.upper(r, c))).collect())
            .collect(),
        lower: (0..m)
            .map(|r| (0..m).map(|c| pair(factors.lower(r, c))).collect())
            .collect(),
        orthonormal: (0..m)
            .map(|n| sys.phi(n).coeffs().iter().map(|&z| pair(z)).collect())
            .collect(),
        monic: (0..m)
            .map(|n| sys.monic(n).coeffs().iter().map(|&z| pair(z)).collect())
            .collect(),
        sharp: (0..m)
            .map(|n| sys.sharp(n).coeffs().iter().map(|&z| pair(z)).collect())
            .collect(),
        leading: (0..m).map(|n| sys.leading_coeff(n)).collect(),
        monic_norm_sq: (0..m).map(|n| sys.monic_norm_sq(n)).collect(),
    };
    let text = match args.format {
        Format::Json => json_string(&art),
        Format::Csv => {
            let mut out = String::from("item,i,j,re,im\n");
            for (name, mat) in [("upper", &art.upper), ("lower", &art.lower)] {
                for (r, row) in mat.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        let _ = writeln!(out, "{name},{r},{c},{},{}", v[0], v[1]);
                    }
                }
            }
            for (name, fam) in [
                ("orthonormal", &art.orthonormal),
                ("monic", &art.monic),
                ("sharp", &art.sharp),
            ] {
                for (n, coeffs) in fam.iter().enumerate() {
                    for (r, v) in coeffs.iter().enumerate() {
                        let _ = writeln!(out, "{name},{n},{r},{},{}", v[0], v[1]);
                    }
                }
            }
            out
        }
    };
    let path = write_artifact(&args.out, "ops", args.format, &text)?;
    println!(
        "ops: d={} max_rank={} families=3 -> {}",
        kernel.dim(),
        kernel.max_rank(),
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// verblunsky

#[derive(Serialize)]
struct GammaRow {
    i: usize,
    j: usize,
    index_i: String,
    index_j: String,
    re: f64,
    im: f64,
    defect: f64,
}

#[derive(Serialize)]
struct VerblunskyArtifact {
    d: usize,
    max_rank: usize,
    gammas: Vec<GammaRow>,
}

fn gamma_rows(kernel: &MomentKernel, table: &VerblunskyTable) -> Vec<GammaRow> {
    table
        .pairs()
        .map(|(i, j)| {
            let g = table.gamma(i, j);
            GammaRow {
                i,
                j,
                index_i: kernel.index(i).compact(),
                index_j: kernel.index(j).compact(),
                re: nz(g.re),
                im: nz(g.im),
                defect: table.defect(i, j),
            }
        })
        .collect()
}

fn cmd_verblunsky(args: &CommonArgs) -> Result<(), RunError> {
    let spec = load_spec(args)?;
    let rule = QuadratureRule::with_nodes(args.nodes);
    let kernel = build_kernel(&spec, args.max_rank, &rule)?;
    let table = kernelfact::verblunsky_table(&kernel)?;
    let rows = gamma_rows(&kernel, &table);
    let max_gamma = rows
        .iter()
        .map(|r| C64::new(r.re, r.im).norm())
        .fold(0.0f64, f64::max);
    let text = match args.format {
        Format::Json => json_string(&VerblunskyArtifact {
            d: kernel.dim(),
            max_rank: kernel.max_rank(),
            gammas: rows,
        }),
        Format::Csv => {
            let mut out = String::from("i,j,index_i,index_j,re,im,defect\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.i, r.j, r.index_i, r.index_j, r.re, r.im, r.defect
                );
            }
            out
        }
    };
    let path = write_artifact(&args.out, "verblunsky", args.format, &text)?;
    println!(
        "verblunsky: d={} max_rank={} max|gamma|={} -> {}",
        kernel.dim(),
        kernel.max_rank(),
        max_gamma,
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// christoffel

#[derive(Serialize)]
struct ChristoffelArtifact {
    d: usize,
    max_rank: usize,
    /// Entropy side of the bound; a lower limit for every lambda below.
    lower_bound: f64,
    points: Vec<christoffel::ChristoffelPoint>,
}

fn cmd_christoffel(args: &CommonArgs) -> Result<(), RunError> {
    let spec = load_spec(args)?;
    let rule = QuadratureRule::with_nodes(args.nodes);
    let kernel = build_kernel(&spec, args.max_rank, &rule)?;
    let sys = orthopoly::orthonormal_system(&kernel)?;
    let origin = vec![C64::new(0.0, 0.0); spec.d];
    let points = christoffel::lambda_levels(&sys, &origin);
    let entropy = moments::entropy(&spec, &rule);
    let lower_bound = entropy.exp_value();
    let text = match args.format {
        Format::Json => json_string(&ChristoffelArtifact {
            d: kernel.dim(),
            max_rank: kernel.max_rank(),
            lower_bound,
            points: points.clone(),
        }),
        Format::Csv => {
            let mut out = String::from("level,max_rank,lambda,lower_bound\n");
            for p in &points {
                let _ = writeln!(out, "{},{},{},{}", p.level, p.max_rank, p.lambda, lower_bound);
            }
            out
        }
    };
    let path = write_artifact(&args.out, "christoffel", args.format, &text)?;
    let last = points.last().map_or(f64::NAN, |p| p.lambda);
    println!(
        "christoffel: d={} levels={} last_lambda={} lower_bound={} -> {}",
        kernel.dim(),
        points.len(),
        last,
        lower_bound,
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// szego

fn szego_csv(report: &szego::SummaryReport) -> String {
    let mut out = String::from("key,value\n");
    let verdict = serde_json::to_value(report.verdict).expect("verdict string");
    let scalars: Vec<(&str, String)> = vec![
        ("d", report.d.to_string()),
        ("max_rank", report.max_rank.to_string()),
        ("total_mass", report.total_mass.to_string()),
        ("weight_mass", report.weight_mass.to_string()),
        ("atom_mass", report.atom_mass.to_string()),
        ("mass_split_residual", report.mass_split_residual.to_string()),
        ("condition_residual", report.condition_residual.to_string()),
        (
            "orthonormality_residual",
            report.orthonormality_residual.to_string(),
        ),
        ("recurrence_residual", report.recurrence_residual.to_string()),
        (
            "determinant_identity_residual",
            report.determinant_identity_residual.to_string(),
        ),
        ("first_list_residual", report.first_list_residual.to_string()),
        (
            "second_list_residual",
            report.second_list_residual.to_string(),
        ),
        ("szego_quantity", report.second_list.from_defects.to_string()),
        ("entropy_value", report.entropy.value.to_string()),
        ("entropy_exp", report.entropy.exp_value.to_string()),
        ("entropy_finite", report.entropy.finite.to_string()),
        ("entropy_method", report.entropy.method.clone()),
        ("bracket_lower", report.bracket.lower.to_string()),
        ("bracket_upper", report.bracket.upper.to_string()),
        ("bracket_width", report.bracket.width().to_string()),
        (
            "verdict",
            verdict.as_str().unwrap_or("unknown").to_string(),
        ),
    ];
    for (k, v) in scalars {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

fn cmd_szego(args: &CommonArgs) -> Result<(), RunError> {
    let spec = load_spec(args)?;
    let rule = QuadratureRule::with_nodes(args.nodes);
    // Resolution guard runs here as well, before the heavy work.
    let _ = build_kernel(&spec, args.max_rank, &rule)?;
    let report = szego::summary_report(&spec, args.max_rank, &rule)?;
    let text = match args.format {
        Format::Json => json_string(&report),
        Format::Csv => szego_csv(&report),
    };
    let path = write_artifact(&args.out, "szego", args.format, &text)?;
    let verdict = serde_json::to_value(report.verdict).expect("verdict string");
    println!(
        "szego: d={} max_rank={} bracket=[{}, {}] verdict={} -> {}",
        report.d,
        report.max_rank,
        report.bracket.lower,
        report.bracket.upper,
        verdict.as_str().unwrap_or("unknown"),
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

#[derive(Serialize)]
struct CheckRow {
    name: String,
    value: f64,
    tol: f64,
    ok: bool,
}

#[derive(Serialize)]
struct VerifyArtifact {
    d: usize,
    max_rank: usize,
    tol: f64,
    checks: Vec<CheckRow>,
    ok: bool,
}

fn cmd_verify(args: &CommonArgs) -> Result<(), RunError> {
    let spec = load_spec(args)?;
    let rule = QuadratureRule::with_nodes(args.nodes);
    let kernel = build_kernel(&spec, args.max_rank, &rule)?;
    let report = szego::summary_report(&spec, args.max_rank, &rule)?;

    // Roundtrip: extract table and diagonal, rebuild, compare entrywise.
    let table = kernelfact::verblunsky_table(&kernel)?;
    let diagonal: Vec<f64> = (0..=kernel.max_rank())
        .map(|r| kernel.entry(r, r).re)
        .collect();
    let rebuilt = kernelfact::reconstruct_kernel(spec.d, &diagonal, &table)?;
    let scale = diagonal.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
    let mut roundtrip = 0.0f64;
    for r in 0..=kernel.max_rank() {
        for c in 0..=kernel.max_rank() {
            roundtrip = roundtrip.max((rebuilt.entry(r, c) - kernel.entry(r, c)).norm());
        }
    }

    let tol = args.tol;
    let mut checks = Vec::new();
    let mut push = |name: &str, value: f64, limit: f64| {
        checks.push(CheckRow {
            name: name.to_string(),
            value,
            tol: limit,
            ok: value <= limit,
        });
    };
    push("mass_split", report.mass_split_residual, tol);
    push("shift_condition", report.condition_residual, tol);
    push("orthonormality", report.orthonormality_residual, tol);
    push("recurrence", report.recurrence_residual, tol);
    push(
        "determinant_identity",
        report.determinant_identity_residual,
        tol,
    );
    push("norm_chain", report.first_list_residual, tol);
    push("christoffel_chain", report.second_list_residual, tol);
    push(
        "bracket_order",
        (report.bracket.lower - report.bracket.upper).max(0.0),
        tol,
    );
    push("reconstruction", roundtrip / scale, tol);

    let ok = checks.iter().all(|c| c.ok);
    for c in &checks {
        println!(
            "check {}: {:.3e} (tol {:.1e}) {}",
            c.name,
            c.value,
            c.tol,
            if c.ok { "ok" } else { "FAIL" }
        );
    }
    let art = VerifyArtifact {
        d: spec.d,
        max_rank: args.max_rank,
        tol,
        checks,
        ok,
    };
    let text = match args.format {
        Format::Json => json_string(&art),
        Format::Csv => {
            let mut out = String::from("name,value,tol,ok\n");
            for c in &art.checks {
                let _ = writeln!(out, "{},{},{},{}", c.name, c.value, c.tol, c.ok);
            }
            out
        }
    };
    let path = write_artifact(&args.out, "verify", args.format, &text)?;
    println!("verify: {} -> {}", if ok { "ok" } else { "FAIL" }, path.display());
    if ok {
        Ok(())
    } else {
        Err(RunError::Violation(
            "one or more identity checks exceeded the tolerance".to_string(),
        ))
    }
}

// ---------------------------------------------------------------------------
// reconstruct

#[derive(Serialize)]
struct ReconstructArtifact {
    d: usize,
    max_rank: usize,
    max_entry_deviation: f64,
    relative_deviation: f64,
    ok: bool,
}

fn cmd_reconstruct(args: &CommonArgs) -> Result<(), RunError> {
    let spec = load_spec(args)?;
    let rule = QuadratureRule::with_nodes(args.nodes);
    let kernel = build_kernel(&spec, args.max_rank, &rule)?;
    let table = kernelfact::verblunsky_table(&kernel)?;
    let diagonal: Vec<f64> = (0..=kernel.max_rank())
        .map(|r| kernel.entry(r, r).re)
        .collect();
    let rebuilt = kernelfact::reconstruct_kernel(spec.d, &diagonal, &table)?;
    let scale = diagonal.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
    let mut deviation = 0.0f64;
    for r in 0..=kernel.max_rank() {
        for c in 0..=kernel.max_rank() {
            deviation = deviation.max((rebuilt.entry(r, c) - kernel.entry(r, c)).norm());
        }
    }
    let relative = deviation / scale;
    let ok = relative <= args.tol;
    let art = ReconstructArtifact {
        d: spec.d,
        max_rank: kernel.max_rank(),
        max_entry_deviation: deviation,
        relative_deviation: relative,
        ok,
    };
    let text = match args.format {
        Format::Json => json_string(&art),
        Format::Csv => {
            let mut out = String::from("key,value\n");
            let _ = writeln!(out, "d,{}", art.d);
            let _ = writeln!(out, "max_rank,{}", art.max_rank);
            let _ = writeln!(out, "max_entry_deviation,{}", art.max_entry_deviation);
            let _ = writeln!(out, "relative_deviation,{}", art.relative_deviation);
            let _ = writeln!(out, "ok,{}", art.ok);
            out
        }
    };
    let path = write_artifact(&args.out, "reconstruct", args.format, &text)?;
    println!(
        "reconstruct: d={} max_rank={} relative_deviation={} -> {}",
        art.d,
        art.max_rank,
        art.relative_deviation,
        path.display()
    );
    if ok {
        Ok(())
    } else {
        Err(RunError::Violation(format!(
            "reconstruction deviates by {relative:.3e} (tol {:.1e})",
            args.tol
        )))
    }
}

// ---------------------------------------------------------------------------
// counterexample

fn cmd_counterexample(args: &CounterArgs) -> Result<(), RunError> {
    let report = szego::counterexample_report(args.max_rank)?;
    let text = match args.format {
        Format::Json => json_string(&report),
        Format::Csv => {
            let verdict = serde_json::to_value(report.verdict).expect("verdict string");
            let mut out = String::from("key,value\n");
            let _ = writeln!(out, "max_rank,{}", report.max_rank);
            let _ = writeln!(out, "max_off_diagonal,{}", report.max_off_diagonal);
            let _ = writeln!(out, "max_gamma,{}", report.max_gamma);
            let _ = writeln!(out, "lambda_deviation,{}", report.lambda_deviation);
            let _ = writeln!(out, "entropy_rhs,{}", report.entropy_rhs);
            let _ = writeln!(out, "gap,{}", report.gap);
            let _ = writeln!(out, "factor_min_modulus,{}", report.factor_min_modulus);
            let _ = writeln!(out, "verdict,{}", verdict.as_str().unwrap_or("unknown"));
            out
        }
    };
    let path = write_artifact(&args.out, "counterexample", args.format, &text)?;
    println!(
        "counterexample: max_rank={} gap={} verdict={:?} -> {}",
        report.max_rank,
        report.gap,
        report.verdict,
        path.display()
    );
    let tol = args.tol;
    if report.max_off_diagonal > tol
        || report.max_gamma > tol
        || report.lambda_deviation > tol
        || report.gap <= 0.0
        || report.verdict != szego::Verdict::StrictGap
    {
        return Err(RunError::Violation(
            "counterexample certificate failed".to_string(),
        ));
    }
    Ok(())
}
