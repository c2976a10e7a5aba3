//! Command-line surface: quantize | star | matrix | gcoeff | verify.

use std::fmt::Display;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use gmoyal::fock::{matrix_to_json, quantize_matrix};
use gmoyal::lang::{format_aa, format_coeff, format_op, format_phase, parse_phase_poly};
use gmoyal::opalg::{ladder_map, quantize};
use gmoyal::phase::{g_star, PhasePoly};
use gmoyal::series::{g_from_alpha, g_from_f, parse_custom_f, Ordering, Preset};
use gmoyal::verify::{
    run_suite, OrderingSource, OrderingSpec, Suite, VerifyConfig, VerifyReport, ALL_SUITES,
};

#[derive(Parser)]
#[command(
    name = "gmoyal",
    version,
    about = "Exact star products, ordering-scheme quantization maps, and truncated Fock matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OrderingArg {
    /// Ordering scheme: weyl | standard | antistandard | symmetric |
    /// born_jordan, or a path to a custom coefficient file
    /// (one `re_num/re_den,im_num/im_den` line per coefficient).
    #[arg(long)]
    ordering: String,
}

#[derive(Subcommand)]
enum Command {
    /// Map a phase-space polynomial to its operator image.
    Quantize {
        /// Polynomial, e.g. "p^2*x + (1/2)*i*hbar".
        poly: String,
        #[command(flatten)]
        ordering: OrderingArg,
        /// Target algebra: canonical operators or ladder operators.
        #[arg(long, value_parser = ["op", "aa"], default_value = "op")]
        rep: String,
        /// Emit JSON instead of plain text.
        #[arg(long)]
        json: bool,
    },
    /// Star product of two polynomials under an ordering.
    Star {
        a: String,
        b: String,
        #[command(flatten)]
        ordering: OrderingArg,
        #[arg(long)]
        json: bool,
    },
    /// Truncated matrix image of a polynomial, as JSON.
    Matrix {
        poly: String,
        #[command(flatten)]
        ordering: OrderingArg,
        /// Matrix dimension.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        dim: u64,
        /// Evaluate entries numerically at this hbar instead of exactly.
        #[arg(long)]
        hbar: Option<f64>,
    },
    /// Tabulate the ordering coefficients g(m, n, s), computed two ways.
    Gcoeff {
        m: u32,
        n: u32,
        #[command(flatten)]
        ordering: OrderingArg,
        #[arg(long)]
        json: bool,
    },
    /// Run the property suites and stream one JSON report per line.
    Verify {
        /// Comma-separated suite names, or "all".
        #[arg(long, default_value = "all")]
        suites: String,
        /// Comma-separated orderings (preset names or custom file paths),
        /// or "all" for the five presets.
        #[arg(long, default_value = "all")]
        ordering: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        max_degree: u32,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(2..))]
        dim: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Accepted for symmetry; the report stream is always JSON lines.
        #[arg(long)]
        json: bool,
    },
}

fn fail(err: impl Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::FAILURE
}

/// Resolve an `--ordering` argument: a preset name, else a custom file path.
fn resolve_ordering_spec(arg: &str) -> Result<OrderingSpec, String> {
    if let Ok(preset) = Preset::from_name(arg) {
        return Ok(OrderingSpec::preset(preset));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| {
        format!("`{arg}` is not a preset name and could not be read as a file: {e}")
    })?;
    let coeffs = parse_custom_f(&text).map_err(|e| format!("{arg}: {e}"))?;
    Ok(OrderingSpec::custom(arg.to_owned(), coeffs))
}

fn build_ordering(arg: &str, order: usize) -> Result<Ordering, String> {
    let spec = resolve_ordering_spec(arg)?;
    match spec.source {
        OrderingSource::Preset(p) => Ok(Ordering::preset(p, order)),
        OrderingSource::Custom(coeffs) => {
            Ordering::custom(spec.label, &coeffs, order).map_err(|e| e.to_string())
        }
    }
}

fn parse_poly_arg(name: &str, text: &str) -> Result<PhasePoly, String> {
    parse_phase_poly(text).map_err(|e| format!("{name}: {e}"))
}

#[derive(Serialize)]
struct TextResult<'a> {
    command: &'a str,
    ordering: &'a str,
    output: String,
}

fn emit(json: bool, command: &str, ordering: &str, output: String) {
    if json {
        println!(
            "{}",
            serde_json::to_string(&TextResult {
                command,
                ordering,
                output,
            })
            .expect("serialization cannot fail")
        );
    } else {
        println!("{output}");
    }
}

fn cmd_quantize(poly: &str, ordering: &str, rep: &str, json: bool) -> Result<(), String> {
    let a = parse_poly_arg("poly", poly)?;
    let ord = build_ordering(ordering, a.max_mixed_degree() as usize)?;
    let op = quantize(&a, &ord).map_err(|e| e.to_string())?;
    let output = match rep {
        "aa" => format_aa(&ladder_map(&op)),
        _ => format_op(&op),
    };
    emit(json, "quantize", ordering, output);
    Ok(())
}

fn cmd_star(a: &str, b: &str, ordering: &str, json: bool) -> Result<(), String> {
    let pa = parse_poly_arg("a", a)?;
    let pb = parse_poly_arg("b", b)?;
    let order = (pa.total_degree() + pb.total_degree()) as usize;
    let ord = build_ordering(ordering, order)?;
    let product = g_star(&pa, &pb, &ord).map_err(|e| e.to_string())?;
    emit(json, "star", ordering, format_phase(&product));
    Ok(())
}

fn cmd_matrix(poly: &str, ordering: &str, dim: usize, hbar: Option<f64>) -> Result<(), String> {
    let a = parse_poly_arg("poly", poly)?;
    let ord = build_ordering(ordering, a.max_mixed_degree() as usize)?;
    let matrix = quantize_matrix(&a, &ord, dim).map_err(|e| e.to_string())?;
    println!("{}", matrix_to_json(&matrix, hbar));
    Ok(())
}

#[derive(Serialize)]
struct GcoeffRow {
    s: u32,
    from_f: String,
    from_alpha: String,
    agree: bool,
}

#[derive(Serialize)]
struct GcoeffResult<'a> {
    ordering: &'a str,
    m: u32,
    n: u32,
    values: Vec<GcoeffRow>,
    agree: bool,
}

fn cmd_gcoeff(ordering: &str, m: u32, n: u32, json: bool) -> Result<(), String> {
    let ord = build_ordering(ordering, m.min(n) as usize)?;
    let mut rows = Vec::new();
    let mut all_agree = true;
    for s in 0..=m.min(n) {
        let from_f = g_from_f(ord.f(), m, n, s).map_err(|e| e.to_string())?;
        let from_alpha = g_from_alpha(ord.alpha(), m, n, s).map_err(|e| e.to_string())?;
        let agree = from_f == from_alpha;
        all_agree &= agree;
        rows.push(GcoeffRow {
            s,
            from_f: format_coeff(&from_f),
            from_alpha: format_coeff(&from_alpha),
            agree,
        });
    }
    if json {
        println!(
            "{}",
            serde_json::to_string(&GcoeffResult {
                ordering,
                m,
                n,
                values: rows,
                agree: all_agree,
            })
            .expect("serialization cannot fail")
        );
    } else {
        for row in &rows {
            if row.agree {
                println!("s={}: {}", row.s, row.from_f);
            } else {
                println!(
                    "s={}: f-route {} / alpha-route {}",
                    row.s, row.from_f, row.from_alpha
                );
            }
        }
        println!("agree={all_agree}");
    }
    Ok(())
}

/// A report line: the deterministic report plus wall-clock milliseconds.
#[derive(Serialize)]
struct TimedReport {
    #[serde(flatten)]
    report: VerifyReport,
    elapsed_ms: u128,
}

fn cmd_verify(
    suites: &str,
    orderings: &str,
    max_degree: u32,
    trials: u32,
    dim: usize,
    seed: u64,
) -> Result<bool, String> {
    let suites: Vec<Suite> = if suites == "all" {
        ALL_SUITES.to_vec()
    } else {
        suites
            .split(',')
            .map(str::trim)
            .map(|name| Suite::from_name(name).ok_or_else(|| format!("unknown suite `{name}`")))
            .collect::<Result<_, _>>()?
    };
    let orderings: Vec<OrderingSpec> = if orderings == "all" {
        OrderingSpec::all_presets()
    } else {
        orderings
            .split(',')
            .map(str::trim)
            .map(resolve_ordering_spec)
            .collect::<Result<_, _>>()?
    };
    let cfg = VerifyConfig {
        max_degree,
        trials,
        dim,
        seed,
    };
    // Pairs run concurrently; lines print afterwards in task order so the
    // stream layout is independent of scheduling.
    let tasks: Vec<(Suite, &OrderingSpec)> = suites
        .iter()
        .flat_map(|&s| orderings.iter().map(move |o| (s, o)))
        .collect();
    let timed: Vec<TimedReport> = tasks
        .par_iter()
        .map(|(suite, ordering)| {
            let start = Instant::now();
            let report = run_suite(*suite, ordering, &cfg);
            TimedReport {
                report,
                elapsed_ms: start.elapsed().as_millis(),
            }
        })
        .collect();
    let mut all_passed = true;
    for line in &timed {
        all_passed &= line.report.passed();
        println!(
            "{}",
            serde_json::to_string(line).expect("serialization cannot fail")
        );
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool, String> = match cli.command {
        Command::Quantize {
            poly,
            ordering,
            rep,
            json,
        } => cmd_quantize(&poly, &ordering.ordering, &rep, json).map(|_| true),
        Command::Star {
            a,
            b,
            ordering,
            json,
        } => cmd_star(&a, &b, &ordering.ordering, json).map(|_| true),
        Command::Matrix {
            poly,
            ordering,
            dim,
            hbar,
        } => cmd_matrix(&poly, &ordering.ordering, dim as usize, hbar).map(|_| true),
        Command::Gcoeff {
            m,
            n,
            ordering,
            json,
        } => cmd_gcoeff(&ordering.ordering, m, n, json).map(|_| true),
        Command::Verify {
            suites,
            ordering,
            max_degree,
            trials,
            dim,
            seed,
            json: _,
        } => cmd_verify(&suites, &ordering, max_degree, trials, dim as usize, seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => fail(err),
    }
}
