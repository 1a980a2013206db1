//! `hadamard-langevin`: solvability checks, solving, Mittag-Leffler values and
//! the worked-example comparison.
//!
//! Exit codes: 0 ok, 1 usage or input error, 2 certificate or comparison
//! failure, 3 inconclusive or not evaluable, 4 no convergence.

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hadamard_langevin::benchmark::{compare_published, DEFAULT_TOLERANCE};
use hadamard_langevin::hadamard::{make_grid, weighted_norm};
use hadamard_langevin::io::{read_problem, solution_csv, Problem, FORMAT_VERSION};
use hadamard_langevin::langevin::{picard_solve, residual_report, LangevinOperator};
use hadamard_langevin::solvability::{
    certify, estimate_bounds, GrowthBounds, Provenance, SolvabilityReport, Verdict,
};
use hadamard_langevin::special::{mittag_leffler, MlParams};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_FAIL: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_NO_CONVERGENCE: u8 = 4;

/// Samples used when a problem file carries no growth constants.
const ESTIMATE_SAMPLES: usize = 20_000;

#[derive(Parser)]
#[command(name = "hadamard-langevin", version, about = "Hadamard fractional Langevin boundary-value problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate ω1, ω2 and the existence/uniqueness conditions.
    Check {
        /// Problem file (JSON), or - for stdin.
        path: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Which condition decides the exit status.
        #[arg(long, value_enum, default_value_t = Certificate::Auto)]
        certificate: Certificate,
    },
    /// Solve by Picard iteration and write the solution as CSV.
    Solve {
        /// Problem file (JSON), or - for stdin.
        path: PathBuf,
        /// Stop when the weighted step falls to this size.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for weight assembly (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Grid cells, overriding the problem file.
        #[arg(long)]
        nodes: Option<usize>,
        /// Grid grading exponent, overriding the problem file.
        #[arg(long)]
        grading: Option<f64>,
        /// Print the summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the Mittag-Leffler function E_{alpha,beta}(z).
    #[command(allow_negative_numbers = true)]
    Ml {
        alpha: f64,
        beta: f64,
        z: f64,
        #[arg(long)]
        json: bool,
    },
    /// Recompute the worked-example constants and compare them with their
    /// ten-digit published values.
    #[command(alias = "repro-paper")]
    Reproduce {
        /// Relative tolerance for a match.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Certificate {
    /// Every condition whose constants are available.
    Auto,
    Existence,
    Uniqueness,
    Both,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Check {
            path,
            json,
            certificate,
        } => cmd_check(&path, json, certificate),
        Command::Solve {
            path,
            tol,
            max_iter,
            out,
            threads,
            nodes,
            grading,
            json,
        } => cmd_solve(SolveArgs {
            path,
            tol,
            max_iter,
            out,
            threads,
            nodes,
            grading,
            json,
        }),
        Command::Ml { alpha, beta, z, json } => cmd_ml(alpha, beta, z, json),
        Command::Reproduce { tolerance, json } => cmd_reproduce(tolerance, json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))?;
    }
    Ok(text)
}

fn load(path: &PathBuf) -> Result<Problem, Failure> {
    read_problem(&read_input(path)?).map_err(|e| Failure::usage(e.to_string()))
}

/// `digits` significant digits, plain notation for moderate magnitudes,
/// trailing zeros dropped.
fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..=9).contains(&mag) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| sig(v, 10))
}

fn cmd_check(path: &PathBuf, json: bool, certificate: Certificate) -> Result<u8, Failure> {
    let problem = load(path)?;
    let bounds = match &problem.bounds {
        Some(b) => b.clone(),
        None => estimate_bounds(&problem.spec.f, ESTIMATE_SAMPLES).map_err(|e| Failure::usage(e.to_string()))?,
    };
    let report = certify(&problem.spec, &bounds).map_err(|e| Failure::usage(e.to_string()))?;
    let code = check_status(&report, certificate);

    if json {
        let mut value = serde_json::to_value(&report).expect("report serializes");
        value["version"] = FORMAT_VERSION.into();
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    } else {
        print_report(&problem, &bounds, &report);
    }
    Ok(code)
}

fn check_status(report: &SolvabilityReport, certificate: Certificate) -> u8 {
    let requested: Vec<Verdict> = match certificate {
        Certificate::Existence => vec![report.existence],
        Certificate::Uniqueness => vec![report.uniqueness],
        Certificate::Both => vec![report.existence, report.uniqueness],
        Certificate::Auto => [report.existence, report.uniqueness]
            .into_iter()
            .filter(|v| *v != Verdict::NotEvaluable)
            .collect(),
    };
    if requested.is_empty() {
        return EXIT_INCONCLUSIVE;
    }
    if requested.contains(&Verdict::Fails) {
        return EXIT_FAIL;
    }
    if requested.iter().any(|v| *v != Verdict::Holds) {
        return EXIT_INCONCLUSIVE;
    }
    // Estimated constants never certify anything.
    if report.bounds.provenance == Provenance::AutoEstimated {
        return EXIT_INCONCLUSIVE;
    }
    EXIT_OK
}

fn print_report(problem: &Problem, bounds: &GrowthBounds, r: &SolvabilityReport) {
    let p = &problem.spec;
    println!(
        "problem    alpha = {}, beta = {}, lambda = {}, gamma = {}, c0 = {}",
        sig(p.alpha, 10),
        sig(p.beta, 10),
        sig(p.lambda, 10),
        sig(p.gamma, 10),
        sig(p.c0, 10)
    );
    println!("f(t,x)     {}", p.f);
    let origin = match bounds.provenance {
        Provenance::UserSupplied => "supplied",
        Provenance::AutoEstimated => "ESTIMATED from samples, not rigorous",
    };
    println!(
        "bounds     L1 = {}, L2 = {}, L = {}  ({origin})",
        opt(bounds.l1),
        opt(bounds.l2),
        opt(bounds.l)
    );
    println!("omega1 = {}", opt(r.omega1));
    println!("omega2 = {}", sig(r.omega2, 10));
    println!("L1*omega2 = {}  existence: {}", opt(r.l1_omega2), r.existence.label());
    println!("L*omega2 = {}  uniqueness: {}", opt(r.l_omega2), r.uniqueness.label());
    if let Some(rm) = r.r_min {
        println!("r_min = {}", sig(rm, 10));
    }
}

struct SolveArgs {
    path: PathBuf,
    tol: f64,
    max_iter: usize,
    out: Option<PathBuf>,
    threads: Option<usize>,
    nodes: Option<usize>,
    grading: Option<f64>,
    json: bool,
}

fn cmd_solve(a: SolveArgs) -> Result<u8, Failure> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Failure::usage(format!("--tol must be positive, got {}", a.tol)));
    }
    if a.max_iter == 0 {
        return Err(Failure::usage("--max-iter must be at least 1"));
    }
    let problem = load(&a.path)?;
    let threads = a.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    pool.install(|| solve_in_pool(&a, problem))
}

fn solve_in_pool(a: &SolveArgs, problem: Problem) -> Result<u8, Failure> {
    let n = a.nodes.unwrap_or(problem.grid.n);
    let q = a.grading.unwrap_or(problem.grid.q);
    let grid = make_grid(n, q).map_err(|e| Failure::usage(e.to_string()))?;

    if let Some(b) = &problem.bounds {
        if let Ok(r) = certify(&problem.spec, b) {
            if !r.uniqueness_ok {
                eprintln!(
                    "warning: uniqueness condition {} (L*omega2 = {})",
                    r.uniqueness.label(),
                    opt(r.l_omega2)
                );
            }
        }
    } else {
        eprintln!("warning: no growth constants given; uniqueness not checked");
    }

    let op = LangevinOperator::new(problem.spec.clone(), grid.clone()).map_err(|e| Failure::usage(e.to_string()))?;
    let result = picard_solve(&op, a.tol, a.max_iter).map_err(|e| Failure::usage(e.to_string()))?;
    let residuals = residual_report(&op, &result.solution).map_err(|e| Failure::usage(e.to_string()))?;
    let last = result.history.last().copied().unwrap_or(0.0);
    let warning = (!result.converged).then(|| {
        format!(
            "not converged after {} iterations (last step {:e}, tolerance {:e})",
            result.iterations, last, a.tol
        )
    });

    let csv = solution_csv(&result.solution, warning.as_deref());
    match &a.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::usage(format!("writing {}: {e}", path.display())))?,
        None => io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| Failure::usage(format!("writing stdout: {e}")))?,
    }

    let x_end = *result.solution.values().last().expect("grid is non-empty");
    let norm = weighted_norm(&result.solution);
    if a.json {
        let summary = serde_json::json!({
            "version": FORMAT_VERSION,
            "converged": result.converged,
            "iterations": result.iterations,
            "final_step": last,
            "rate_estimate": result.rate_estimate,
            "x_at_e": x_end,
            "weighted_norm": if norm.is_finite() { Some(norm) } else { None },
            "residuals": residuals,
            "grid": { "n": n, "q": q },
        });
        let text = serde_json::to_string_pretty(&summary).expect("json");
        summary_out(a.out.is_some(), &text);
    } else {
        let mut s = String::new();
        s += &format!("converged      {}\n", result.converged);
        s += &format!("iterations     {}\n", result.iterations);
        s += &format!("final step     {}\n", sig(last, 10));
        s += &format!("rate estimate  {}\n", opt(result.rate_estimate));
        s += &format!("x(e)           {}\n", sig(x_end, 10));
        s += &format!("weighted norm  {}\n", sig(norm, 10));
        s += &format!("ODE residual   {}\n", sig(residuals.ode_residual, 10));
        s += &format!("right boundary {}\n", sig(residuals.right_boundary, 10));
        s += &format!("left boundary  {}", sig(residuals.left_boundary, 10));
        summary_out(a.out.is_some(), &s);
    }
    if let Some(w) = warning {
        eprintln!("warning: {w}");
        return Ok(EXIT_NO_CONVERGENCE);
    }
    Ok(EXIT_OK)
}

/// The summary goes to stdout unless stdout carries the CSV.
fn summary_out(csv_in_file: bool, text: &str) {
    if csv_in_file {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
}

fn cmd_ml(alpha: f64, beta: f64, z: f64, json: bool) -> Result<u8, Failure> {
    let params = MlParams::new(alpha, beta).map_err(|e| Failure::usage(e.to_string()))?;
    let r = mittag_leffler(params, z).map_err(|e| Failure::usage(e.to_string()))?;
    if json {
        let v = serde_json::json!({
            "alpha": alpha,
            "beta": beta,
            "z": z,
            "value": r.value,
            "truncation_bound": r.truncation_bound,
            "rounding_bound": r.rounding_bound,
            "terms_used": r.terms_used,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("E_{{{alpha},{beta}}}({z}) = {}", sig(r.value, 10));
        println!("truncation_bound = {:.3e}", r.truncation_bound);
        println!("rounding_bound = {:.3e}", r.rounding_bound);
        println!("terms_used = {}", r.terms_used);
    }
    Ok(EXIT_OK)
}

fn cmd_reproduce(tolerance: f64, json: bool) -> Result<u8, Failure> {
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Failure::usage(format!("--tolerance must be >= 0, got {tolerance}")));
    }
    let table = compare_published(tolerance).map_err(|e| Failure::usage(e.to_string()))?;
    if json {
        let v = serde_json::json!({ "version": FORMAT_VERSION, "tolerance": tolerance, "rows": table });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{:<16} {:>16} {:>16} {:>10}  match", "quantity", "published", "computed", "rel.err");
        for row in &table {
            println!(
                "{:<16} {:>16} {:>16} {:>10.2e}  {}",
                row.name,
                sig(row.published, 10),
                sig(row.computed, 10),
                row.rel_error,
                if row.matches { "yes" } else { "NO" }
            );
        }
    }
    let bad: Vec<&str> = table.iter().filter(|r| !r.matches).map(|r| r.name).collect();
    if bad.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("mismatch at relative tolerance {tolerance:e}: {}", bad.join(", "));
        Ok(EXIT_FAIL)
    }
}
