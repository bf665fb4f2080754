//! Command-line front end. Every subcommand writes versioned JSON (or SVG)
//! to stdout; wall-clock timings go to stderr so stdout is reproducible.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bench::{correlate, run_experiment, summarize, write_csvs, ExperimentConfig, GenParams};
use crate::cad::svg::plot_svg;
use crate::cad::{build_cad, cells_json, check_cylindricity, check_truth_invariance, Verdict};
use crate::deadline::Deadline;
use crate::formulation::{
    advise, constraint_ordering_set, enumerate_orderings, measure_degsum, AdviseOptions, ConstraintOrdering,
    HeuristicChoice, Problem,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ttcad", version, about = "Constraint-ordering advice and truth-table invariant CAD")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Heuristic {
    H1,
    H2,
    H3,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Constraint ordering sets with their sotd and degree sum.
    Cos {
        problem: PathBuf,
        #[arg(long)]
        ordering: Option<usize>,
    },
    /// Rank constraint orderings with a heuristic.
    Advise {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "h1")]
        heuristic: Heuristic,
        #[arg(long)]
        single_ec_first: bool,
        /// Seconds allowed for tree construction.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Build the decomposition for one ordering and dump its cells.
    Build {
        problem: PathBuf,
        #[arg(long)]
        ordering: usize,
        /// Include the complex tree.
        #[arg(long)]
        explain: bool,
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Build, then verify cylindricity and truth invariance.
    Check {
        problem: PathBuf,
        #[arg(long)]
        ordering: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Run the random-system experiment and write CSVs.
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Seconds per problem.
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 3)]
        nvars: usize,
        #[arg(long, default_value_t = 6)]
        terms: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Render a two-variable cell dump as SVG.
    Plot {
        celldump: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure(i32, String);

impl Failure {
    fn usage(m: impl ToString) -> Self {
        Failure(EXIT_USAGE, m.to_string())
    }
    fn internal(m: impl ToString) -> Self {
        Failure(EXIT_INTERNAL, m.to_string())
    }
}

type Out<'a> = &'a mut dyn Write;

/// Parse `args` (program name first) and run. Returns the process exit code.
pub fn run<I, T>(args: I, out: Out, err: Out) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn load(path: &Path) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Problem::from_json(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn deadline(secs: Option<f64>) -> Result<Deadline, Failure> {
    match secs {
        None => Ok(Deadline::none()),
        Some(s) if s.is_finite() && s > 0.0 => Ok(Deadline::after(Duration::from_secs_f64(s))),
        Some(s) => Err(Failure::usage(format!("invalid timeout {s}"))),
    }
}

fn pick(all: &[ConstraintOrdering], k: usize) -> Result<&ConstraintOrdering, Failure> {
    all.get(k).ok_or_else(|| Failure::usage(format!("ordering {k} out of range (problem has {})", all.len())))
}

fn emit(out: Out, v: &Value) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(Failure::internal)?;
    writeln!(out, "{s}").map_err(Failure::internal)
}

fn verdict_json(v: &Verdict) -> Value {
    json!({ "pass": v.pass, "checked": v.checked, "witnesses": v.witnesses })
}

fn dispatch(cmd: Cmd, out: Out, err: Out) -> Result<i32, Failure> {
    match cmd {
        Cmd::Cos { problem, ordering } => {
            let prob = load(&problem)?;
            let all = enumerate_orderings(&prob);
            let ks: Vec<usize> = match ordering {
                Some(k) => vec![pick(&all, k).map(|_| k)?],
                None => (0..all.len()).collect(),
            };
            let mut rows = Vec::new();
            for k in ks {
                let set = constraint_ordering_set(&prob, &all[k]).map_err(Failure::usage)?;
                let degsum = measure_degsum(&set, &prob).map_err(Failure::usage)?;
                rows.push(json!({
                    "k": k,
                    "ordering": all[k].describe(&prob),
                    "set": set.polys.iter().map(|p| p.display(&prob.order).to_string()).collect::<Vec<_>>(),
                    "sotd": set.sotd(),
                    "degsum": degsum,
                }));
            }
            emit(out, &json!({ "format": 1, "orderings": rows }))?;
            Ok(EXIT_OK)
        }
        Cmd::Advise { problem, heuristic, single_ec_first, timeout } => {
            let prob = load(&problem)?;
            let heuristic = match heuristic {
                Heuristic::H1 => HeuristicChoice::H1,
                Heuristic::H2 => HeuristicChoice::H2,
                Heuristic::H3 => HeuristicChoice::H3,
            };
            let t = Instant::now();
            let report = advise(&prob, &AdviseOptions { heuristic, single_ec_first }, &deadline(timeout)?)
                .map_err(Failure::usage)?;
            let _ = writeln!(err, "advise: {:.3}s", t.elapsed().as_secs_f64());
            emit(out, &serde_json::to_value(&report).map_err(Failure::internal)?)?;
            Ok(EXIT_OK)
        }
        Cmd::Build { problem, ordering, explain, timeout } => {
            let prob = load(&problem)?;
            let all = enumerate_orderings(&prob);
            let o = pick(&all, ordering)?;
            let (tree, cad) = build_cad(&prob, o, &deadline(timeout)?).map_err(Failure::internal)?;
            let _ = writeln!(err, "build: {} cells in {:.3}s", cad.cell_count(), cad.elapsed.as_secs_f64());
            let mut v = cells_json(&cad, &prob, ordering);
            if explain {
                v["tree"] = tree.to_json();
            }
            emit(out, &v)?;
            Ok(EXIT_OK)
        }
        Cmd::Check { problem, ordering, samples, seed, timeout } => {
            let prob = load(&problem)?;
            let all = enumerate_orderings(&prob);
            let o = pick(&all, ordering)?;
            let (_, cad) = build_cad(&prob, o, &deadline(timeout)?).map_err(Failure::internal)?;
            let cyl = check_cylindricity(&cad);
            let inv = check_truth_invariance(&cad, &prob, samples, seed);
            let pass = cyl.pass && inv.pass;
            emit(
                out,
                &json!({
                    "format": 1,
                    "ordering": ordering,
                    "cell_count": cad.cell_count(),
                    "cylindricity": verdict_json(&cyl),
                    "truth_invariance": verdict_json(&inv),
                    "pass": pass,
                }),
            )?;
            Ok(if pass { EXIT_OK } else { EXIT_FAIL })
        }
        Cmd::Bench { n, seed, budget, out: dir, degree, nvars, terms, workers } => {
            if !(budget.is_finite() && budget > 0.0) {
                return Err(Failure::usage(format!("invalid budget {budget}")));
            }
            let params = GenParams { nvars, degree, terms, ..Default::default() };
            crate::bench::random_system(seed, &params).map_err(Failure::usage)?;
            let cfg = ExperimentConfig { n, seed, params, budget: Duration::from_secs_f64(budget), workers };
            let t = Instant::now();
            let recs = run_experiment(&cfg);
            let s = summarize(&recs);
            let c = correlate(&recs);
            write_csvs(&dir, &recs, &s, &c).map_err(Failure::internal)?;
            let _ = writeln!(err, "bench: {:.1}s", t.elapsed().as_secs_f64());
            emit(
                out,
                &json!({
                    "format": 1,
                    "studied": s.studied,
                    "excluded": s.excluded,
                    "pearson": {
                        "h1_cells": c.h1_cells, "h1_time": c.h1_time,
                        "h2_cells": c.h2_cells, "h2_time": c.h2_time,
                    },
                    "out": dir.display().to_string(),
                }),
            )?;
            Ok(EXIT_OK)
        }
        Cmd::Plot { celldump, out: file } => {
            let text = std::fs::read_to_string(&celldump)
                .map_err(|e| Failure::usage(format!("{}: {e}", celldump.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("cell dump: {e}")))?;
            if v["format"] != json!(1) {
                return Err(Failure::usage("cell dump: unsupported format"));
            }
            let prob = Problem::from_json(&v["problem"].to_string()).map_err(Failure::usage)?;
            let k = v["ordering"].as_u64().ok_or_else(|| Failure::usage("cell dump: missing ordering"))? as usize;
            if prob.nvars() != 2 && prob.nvars() != 1 {
                return Err(Failure::usage(format!("cannot plot {} variables", prob.nvars())));
            }
            let all = enumerate_orderings(&prob);
            let (_, cad) = build_cad(&prob, pick(&all, k)?, &Deadline::none()).map_err(Failure::internal)?;
            if v["cell_count"].as_u64() != Some(cad.cell_count() as u64) {
                return Err(Failure::usage("cell dump does not match its problem"));
            }
            let svg = plot_svg(&cad, &prob).map_err(Failure::usage)?;
            std::fs::write(&file, svg).map_err(|e| Failure::internal(format!("{}: {e}", file.display())))?;
            emit(out, &json!({ "format": 1, "cells": cad.cell_count(), "out": file.display().to_string() }))?;
            Ok(EXIT_OK)
        }
    }
}
