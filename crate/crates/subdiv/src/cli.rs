//! Command-line front end over the library: regularity analysis, transition
//! matrices, spectral-radius brackets, cascade rendering, support intervals,
//! Fourier zero sets and the generability necessary-condition test.
//!
//! Output contract: every subcommand writes a short human-readable report to
//! standard output and, when `--out FILE` is given, a machine-readable JSON
//! or CSV payload to that file.  Without `--out` the machine payload is
//! written to standard output instead (and the human report is suppressed),
//! so pipelines can consume either form.
//!
//! Exit codes: `0` on success, `2` on argument or input errors (malformed
//! scheme files report the JSON line and column), `3` when the requested
//! analysis completes but does not certify — an uncertified regularity
//! bracket, a non-converged radius bracket, or a generability verdict other
//! than consistent — with the report still emitted.
//!
//! Determinism: identical argument vectors, input files and seeds produce
//! byte-identical machine payloads.  Worker threads for the radius searches
//! come from `SUBDIV_JSR_THREADS` (default 1) and do not affect the output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use crate::engine::{self, ParameterSchedule, RefinedData};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, to_f64};
use crate::jsr::{jsr_bounds, JsrOptions, MatrixFamily};
use crate::laurent::ParamSymbol;
use crate::regularity::{analyze, RegularityOptions};
use crate::scheme::SchemeDocument;
use crate::spectral::{gamma_set, generability_necessary_test, GenerabilityVerdict};
use crate::transition::{matrices_from_json, restrict};

/// Exit code for analyses that run to completion without certifying.
const EXIT_UNCERTIFIED: i32 = 3;
/// Exit code for argument and input errors.
const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "subdiv",
    version,
    about = "Analysis toolkit for level- and parameter-dependent subdivision schemes",
    long_about = "Analysis toolkit for level- and parameter-dependent subdivision schemes.\n\
        Scheme files are JSON documents with exact rational coefficients; see the\n\
        crate examples for the format.  Machine output goes to --out when given,\n\
        otherwise to standard output."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify convergence and a Hölder lower bound for a scheme family
    Analyze {
        /// Scheme JSON file
        scheme: PathBuf,
        /// Restrict a one-parameter family to [LO, HI] (rational strings)
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        interval: Option<Vec<String>>,
        /// Difference order cap (default: sum-rule order − 1)
        #[arg(long)]
        ell: Option<usize>,
        /// Branch-and-bound depth for the radius search
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// Relative tolerance for the radius bracket
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write machine JSON here (human report stays on stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the transition matrices restricted to the difference subspace
    Matrices {
        /// Scheme JSON file
        scheme: PathBuf,
        /// Restrict a one-parameter family to [LO, HI] (rational strings)
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        interval: Option<Vec<String>>,
        /// Difference order of the restriction
        #[arg(long)]
        ell: usize,
        /// Write machine JSON here (human report stays on stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket the joint spectral radius of matrices exported by `matrices`
    Jsr {
        /// Matrix JSON file (as produced by `matrices`)
        matrices: PathBuf,
        /// Branch-and-bound depth
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// Relative convergence target for the bracket
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write machine JSON here (human report stays on stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refine a delta through the schedule and emit level,position,value CSV
    Render {
        /// Scheme JSON file (univariate)
        scheme: PathBuf,
        /// Number of refinement steps
        #[arg(long)]
        levels: usize,
        /// Level of the first applied mask (schedules are 1-based)
        #[arg(long, default_value_t = 1)]
        start_level: usize,
        /// Write CSV here (human report stays on stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact interval containing the supports of all basic limit functions
    Support {
        /// Scheme JSON file (univariate)
        scheme: PathBuf,
        /// Level of the first applied mask (schedules are 1-based)
        #[arg(long, default_value_t = 1)]
        start_level: usize,
        /// Levels before the mask supports must settle (default: schedule prefix length)
        #[arg(long)]
        settle: Option<usize>,
        /// Extra levels probed to confirm the settled support
        #[arg(long, default_value_t = 6)]
        probe: usize,
        /// Write machine JSON here (human report stays on stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Base points of the periodic zero sets of the level symbols (CSV)
    Gamma {
        /// Scheme JSON file (univariate)
        scheme: PathBuf,
        /// First level
        #[arg(long, default_value_t = 1)]
        from: usize,
        /// Last level
        #[arg(long)]
        to: usize,
        /// Write CSV here (human report stays on stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Necessary-condition test: every zero needs partners ω ± m^r in the set
    Generability {
        /// CSV of zeros, one `re[,im]` pair per line (`#` comments allowed)
        zeros: PathBuf,
        /// Dilation factor
        #[arg(long)]
        m: i64,
        /// Half-width of the window the zero list is complete on
        #[arg(long)]
        window: f64,
        /// Largest level r tried when searching for partners
        #[arg(long, default_value_t = 6)]
        rmax: usize,
        /// Write machine JSON here (human report stays on stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse the process arguments, run the selected command and return the
/// process exit code.  Argument errors print to standard error and yield 2;
/// clap handles `--help`/`--version` itself.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Analyze {
            scheme,
            interval,
            ell,
            depth,
            tol,
            out,
        } => cmd_analyze(
            &scheme,
            interval.as_deref(),
            ell,
            depth,
            tol,
            out.as_deref(),
        ),
        Command::Matrices {
            scheme,
            interval,
            ell,
            out,
        } => cmd_matrices(&scheme, interval.as_deref(), ell, out.as_deref()),
        Command::Jsr {
            matrices,
            depth,
            tol,
            out,
        } => cmd_jsr(&matrices, depth, tol, out.as_deref()),
        Command::Render {
            scheme,
            levels,
            start_level,
            out,
        } => cmd_render(&scheme, levels, start_level, out.as_deref()),
        Command::Support {
            scheme,
            start_level,
            settle,
            probe,
            out,
        } => cmd_support(&scheme, start_level, settle, probe, out.as_deref()),
        Command::Gamma {
            scheme,
            from,
            to,
            out,
        } => cmd_gamma(&scheme, from, to, out.as_deref()),
        Command::Generability {
            zeros,
            m,
            window,
            rmax,
            out,
        } => cmd_generability(&zeros, m, window, rmax, out.as_deref()),
    }
}

/// Route the machine payload to `--out` (human report to stdout) or, without
/// `--out`, print the payload itself so pipelines can capture it.
fn emit(out: Option<&Path>, human: &str, machine: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, machine)?;
            print!("{human}");
        }
        None => print!("{machine}"),
    }
    Ok(())
}

fn scheme_label(doc: &SchemeDocument, path: &Path) -> String {
    doc.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    })
}

/// The schedule the file asks for, or a sensible default: stationary schemes
/// run with no parameters, parameter families without a schedule run fixed at
/// the first domain vertex.  The second return is a label for reports; for
/// seeded schedules it records the seed.
fn resolved_schedule(
    doc: &SchemeDocument,
    family: &ParamSymbol,
) -> Result<(ParameterSchedule, String)> {
    if let Some(schedule) = doc.to_schedule()? {
        let label = match &schedule {
            ParameterSchedule::Fixed(_) => "fixed".to_string(),
            ParameterSchedule::List(_) => "list".to_string(),
            ParameterSchedule::RandomUniform { seed, .. } => {
                format!("random-uniform (seed {seed})")
            }
            ParameterSchedule::ConvergentTo { .. } => "convergent-to".to_string(),
        };
        return Ok((schedule, label));
    }
    if family.param_dim() == 0 {
        return Ok((
            ParameterSchedule::Fixed(Vec::new()),
            "stationary".to_string(),
        ));
    }
    Ok((
        ParameterSchedule::Fixed(family.domain()[0].clone()),
        "fixed at the first domain vertex (file has no schedule)".to_string(),
    ))
}

fn cmd_analyze(
    scheme: &Path,
    interval: Option<&[String]>,
    ell: Option<usize>,
    depth: usize,
    tol: f64,
    out: Option<&Path>,
) -> Result<i32> {
    let doc = SchemeDocument::load(scheme)?;
    let family = restrict_interval(doc.to_param_symbol()?, interval)?;
    let opts = RegularityOptions {
        ell,
        depth,
        tol,
        ..RegularityOptions::default()
    };
    let report = analyze(&family, doc.m, &opts)?;

    let convergent: i64 = report.convergent_in.map_or(-1, |l| l as i64);
    let machine = to_pretty(&json!({
        "order": report.sum_rule_order,
        "ell": report.ell_used,
        "gamma_lo": report.jsr.lower,
        "gamma_hi": report.jsr.upper,
        "alpha_lower": report.holder_lower,
        "convergent": convergent,
    }));

    let mut human = String::new();
    let _ = writeln!(human, "scheme: {}", scheme_label(&doc, scheme));
    let _ = writeln!(human, "dilation: m = {}", doc.m);
    let _ = writeln!(human, "sum-rule order: {}", report.sum_rule_order);
    let _ = writeln!(
        human,
        "radius bracket at difference order {}: [{:.12e}, {:.12e}]",
        report.ell_used, report.jsr.lower, report.jsr.upper
    );
    match report.convergent_in {
        Some(l) => {
            let _ = writeln!(
                human,
                "certified: contractive on differences of order {l}; Hölder exponent >= {:.6}",
                report.holder_lower
            );
        }
        None => {
            let _ = writeln!(human, "not certified at any difference order tried");
        }
    }
    let _ = writeln!(human, "certificate: {}", report.jsr.certificate);
    for note in &report.notes {
        let _ = writeln!(human, "  - {note}");
    }
    emit(out, &human, &machine)?;
    Ok(if report.convergent_in.is_some() {
        0
    } else {
        EXIT_UNCERTIFIED
    })
}

/// Replace a one-parameter family's domain by `[LO, HI]` when `--interval`
/// is given; pass other families through untouched.
fn restrict_interval(family: ParamSymbol, interval: Option<&[String]>) -> Result<ParamSymbol> {
    let Some(bounds) = interval else {
        return Ok(family);
    };
    if family.param_dim() != 1 {
        return Err(Error::arg(format!(
            "--interval restricts a one-parameter family, but this scheme has {} parameters",
            family.param_dim()
        )));
    }
    let lo = parse_rational(&bounds[0])?;
    let hi = parse_rational(&bounds[1])?;
    if lo > hi {
        return Err(Error::arg("--interval bounds must satisfy LO <= HI"));
    }
    family.with_domain(vec![vec![lo], vec![hi]])
}

fn cmd_matrices(
    scheme: &Path,
    interval: Option<&[String]>,
    ell: usize,
    out: Option<&Path>,
) -> Result<i32> {
    let doc = SchemeDocument::load(scheme)?;
    let family = restrict_interval(doc.to_param_symbol()?, interval)?;
    let tf = restrict(&family, doc.m, ell)?;
    let machine = tf.export_json();
    let human = format!(
        "scheme: {}\n{} transition matrices of size {}x{} ({} vertices x {} cosets), \
         restricted to differences of order {}\n",
        scheme_label(&doc, scheme),
        tf.members().len(),
        tf.dim_v(),
        tf.dim_v(),
        tf.vertex_count(),
        tf.cosets().len(),
        ell,
    );
    emit(out, &human, &machine)?;
    Ok(0)
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::arg(format!("cannot read {}: {e}", path.display())))
}

fn cmd_jsr(matrices: &Path, depth: usize, tol: f64, out: Option<&Path>) -> Result<i32> {
    let text = read_input(matrices)?;
    let named = matrices_from_json(&text)?;
    let names: Vec<String> = named.iter().map(|(n, _)| n.clone()).collect();
    let members: Vec<_> = named.into_iter().map(|(_, m)| m).collect();
    let fam = MatrixFamily::new(members)?;
    let opts = JsrOptions {
        max_depth: depth,
        tol,
        ..JsrOptions::default()
    };
    let bounds = jsr_bounds(&fam, &opts)?;

    let witness: Vec<&str> = bounds.witness.iter().map(|&i| names[i].as_str()).collect();
    let machine = to_pretty(&json!({
        "lower": bounds.lower,
        "upper": bounds.upper,
        "converged": bounds.converged,
        "witness": witness,
        "certificate": bounds.certificate,
        "depth_reached": bounds.depth_reached,
        "nodes_explored": bounds.nodes_explored,
    }));

    let mut human = String::new();
    let _ = writeln!(
        human,
        "joint spectral radius in [{:.12e}, {:.12e}] ({} matrices of size {}x{})",
        bounds.lower,
        bounds.upper,
        fam.len(),
        fam.size(),
        fam.size()
    );
    let _ = writeln!(
        human,
        "converged: {} (relative gap {:.3e}, depth {}, {} nodes)",
        bounds.converged,
        bounds.upper / bounds.lower - 1.0,
        bounds.depth_reached,
        bounds.nodes_explored
    );
    let _ = writeln!(human, "lower-bound witness: {}", witness.join(" "));
    let _ = writeln!(human, "certificate: {}", bounds.certificate);
    emit(out, &human, &machine)?;
    Ok(if bounds.converged {
        0
    } else {
        EXIT_UNCERTIFIED
    })
}

fn cmd_render(scheme: &Path, levels: usize, start_level: usize, out: Option<&Path>) -> Result<i32> {
    let doc = SchemeDocument::load(scheme)?;
    let family = doc.to_param_symbol()?;
    if family.dim() != 1 {
        return Err(Error::arg(
            "render emits level,position,value rows and is univariate only",
        ));
    }
    let (schedule, label) = resolved_schedule(&doc, &family)?;

    let mut csv = String::from("level,position,value\n");
    let mut data = RefinedData::delta(1);
    append_rows(&mut csv, &data, doc.m)?;
    for j in 0..levels {
        let omega = schedule.value_at(start_level + j)?;
        let mask = family.instantiate(&omega)?.to_mask()?;
        data = engine::subdivide_once(&data, &mask, doc.m)?;
        append_rows(&mut csv, &data, doc.m)?;
    }

    let human = format!(
        "scheme: {}\nschedule: {label}\nrefined {} steps from a delta: {} samples at \
         spacing {}, total mass {}\n",
        scheme_label(&doc, scheme),
        levels,
        data.len(),
        format_rational(&data.grid_spacing(doc.m)?),
        format_rational(&data.total_mass()),
    );
    emit(out, &human, &csv)?;
    Ok(0)
}

fn append_rows(csv: &mut String, data: &RefinedData, m: i64) -> Result<()> {
    for (alpha, value) in data.iter() {
        let pos = data.position(alpha, m)?;
        let _ = writeln!(
            csv,
            "{},{},{}",
            data.level(),
            to_f64(&pos[0]),
            to_f64(value)
        );
    }
    Ok(())
}

fn cmd_support(
    scheme: &Path,
    start_level: usize,
    settle: Option<usize>,
    probe: usize,
    out: Option<&Path>,
) -> Result<i32> {
    let doc = SchemeDocument::load(scheme)?;
    let family = doc.to_param_symbol()?;
    let (schedule, label) = resolved_schedule(&doc, &family)?;
    let settle = settle.unwrap_or(match &schedule {
        ParameterSchedule::RandomUniform { prefix, .. } => prefix.len(),
        ParameterSchedule::List(values) => values.len().saturating_sub(1),
        ParameterSchedule::Fixed(_) | ParameterSchedule::ConvergentTo { .. } => 0,
    });
    let (lo, hi) = engine::schedule_support(&family, &schedule, doc.m, start_level, settle, probe)?;
    let machine = to_pretty(&json!({
        "lower": format_rational(&lo),
        "upper": format_rational(&hi),
    }));
    let human = format!(
        "[{}, {}]\nscheme: {} (schedule: {label}); supports settled after {settle} levels, \
         probed {probe} more\n",
        format_rational(&lo),
        format_rational(&hi),
        scheme_label(&doc, scheme),
    );
    emit(out, &human, &machine)?;
    Ok(0)
}

fn cmd_gamma(scheme: &Path, from: usize, to: usize, out: Option<&Path>) -> Result<i32> {
    if from == 0 {
        return Err(Error::arg("levels are 1-based: --from must be at least 1"));
    }
    if to < from {
        return Err(Error::arg("--to must be at least --from"));
    }
    let doc = SchemeDocument::load(scheme)?;
    let family = doc.to_param_symbol()?;
    let (schedule, label) = resolved_schedule(&doc, &family)?;

    let mut csv = String::from("r,re,im,period\n");
    let mut human = format!(
        "scheme: {} (schedule: {label})\n",
        scheme_label(&doc, scheme)
    );
    for r in from..=to {
        let symbol = family.instantiate(&schedule.value_at(r)?)?;
        let zeros = gamma_set(&symbol, r, doc.m)?;
        for b in zeros.base_points() {
            let _ = writeln!(csv, "{r},{},{},{}", b.re, b.im, zeros.period());
        }
        let _ = writeln!(
            human,
            "level {r}: {} base zeros, period {}",
            zeros.base_points().len(),
            zeros.period()
        );
    }
    emit(out, &human, &csv)?;
    Ok(0)
}

fn cmd_generability(
    zeros_path: &Path,
    m: i64,
    window: f64,
    rmax: usize,
    out: Option<&Path>,
) -> Result<i32> {
    let text = read_input(zeros_path)?;
    let zeros = parse_zero_csv(&text)?;
    let verdict = generability_necessary_test(&zeros, m, window, rmax)?;

    let (machine, human, code) = match &verdict {
        GenerabilityVerdict::Consistent { tested } => (
            to_pretty(&json!({"verdict": "consistent", "tested": tested})),
            format!(
                "consistent: all {tested} zeros inside the window have partners \
                 at some level r <= {rmax}\n"
            ),
            0,
        ),
        GenerabilityVerdict::Violation { witnesses } => {
            let list: Vec<Vec<f64>> = witnesses.iter().map(|w| vec![w.re, w.im]).collect();
            let mut human = format!(
                "violation: {} zeros have no partner pair omega +- m^r for any r <= {rmax}\n",
                witnesses.len()
            );
            for w in witnesses {
                let _ = writeln!(human, "  witness: {} + {}i", w.re, w.im);
            }
            (
                to_pretty(&json!({"verdict": "violation", "witnesses": list})),
                human,
                EXIT_UNCERTIFIED,
            )
        }
        GenerabilityVerdict::Inconclusive => (
            to_pretty(&json!({"verdict": "inconclusive"})),
            format!(
                "inconclusive: no zero lies deep enough inside the window \
                 (need |omega| + {m} <= {window})\n"
            ),
            EXIT_UNCERTIFIED,
        ),
    };
    emit(out, &human, &machine)?;
    Ok(code)
}

/// Accept `re` or `re,im` per line; blank lines and `#` comments are skipped,
/// and a single leading header line is tolerated.
fn parse_zero_csv(text: &str) -> Result<Vec<Complex64>> {
    let mut zeros = Vec::new();
    let mut header_allowance = 1usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() > 2 {
            return Err(Error::arg(format!(
                "zeros file line {}: expected `re` or `re,im`, got {} fields",
                idx + 1,
                fields.len()
            )));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                let re = values[0];
                let im = values.get(1).copied().unwrap_or(0.0);
                zeros.push(Complex64::new(re, im));
                header_allowance = 0;
            }
            Err(_) if header_allowance > 0 => header_allowance -= 1,
            Err(_) => {
                return Err(Error::arg(format!(
                    "zeros file line {}: cannot parse {line:?} as numbers",
                    idx + 1
                )));
            }
        }
    }
    Ok(zeros)
}

fn to_pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}
