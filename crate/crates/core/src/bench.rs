//! Random systems and the harness that scores ordering heuristics against
//! the CADs every ordering produces.
//!
//! Cell counts and timings come from this crate's own lifting, so only
//! trends are comparable with other implementations.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cad::build_cad;
use crate::deadline::Deadline;
use crate::formulation::{
    competition_ranks, enumerate_orderings, heuristic1, heuristic2, heuristic3, Clause, Constraint, Problem, Relation,
};
use crate::poly::{Polynomial, VariableOrder};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid generator parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Generator settings. Coefficients are uniform on `[-bound, bound]`
/// without zero; monomials are uniform among those of bounded total degree.
#[derive(Debug, Clone, Serialize)]
pub struct GenParams {
    pub nvars: usize,
    pub degree: u32,
    pub terms: usize,
    pub coeff_bound: i64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self { nvars: 3, degree: 3, terms: 6, coeff_bound: 99 }
    }
}

fn monomials(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|m: Vec<u32>| {
                let used: u32 = m.iter().sum();
                (0..=degree - used).map(move |e| {
                    let mut m = m.clone();
                    m.push(e);
                    m
                })
            })
            .collect();
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, p: &GenParams, pool: &[Vec<u32>]) -> Polynomial {
    let top = p.nvars - 1;
    let with_top: Vec<&Vec<u32>> = pool.iter().filter(|m| m[top] > 0).collect();
    let mut chosen: BTreeSet<Vec<u32>> = BTreeSet::new();
    chosen.insert(with_top[rng.gen_range(0..with_top.len())].clone());
    let want = p.terms.min(pool.len());
    while chosen.len() < want {
        chosen.insert(pool[rng.gen_range(0..pool.len())].clone());
    }
    let terms = chosen.into_iter().map(|m| {
        let mut c = rng.gen_range(1..=p.coeff_bound);
        if rng.gen_bool(0.5) {
            c = -c;
        }
        (m, BigInt::from(c))
    });
    Polynomial::from_terms(p.nvars, terms)
}

/// Two clauses `(f = 0 and f = 0 and g > 0)`, deterministic in `seed`.
pub fn random_system(seed: u64, p: &GenParams) -> Result<Problem, BenchError> {
    if p.terms == 0 || p.degree == 0 || p.nvars < 2 || p.coeff_bound < 1 {
        return Err(BenchError::Params(format!("{p:?}")));
    }
    let names: Vec<String> = match p.nvars {
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        n => (1..=n).map(|i| format!("x{i}")).collect(),
    };
    let order = VariableOrder::new(names).map_err(|e| BenchError::Params(e.to_string()))?;
    let pool = monomials(p.nvars, p.degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (1..=2)
        .map(|c| {
            let mut cs = Vec::new();
            for rel in [Relation::Eq, Relation::Eq, Relation::Gt] {
                cs.push(Constraint { poly: random_poly(&mut rng, p, &pool), relation: rel });
            }
            Clause::new(format!("phi{c}"), cs)
        })
        .collect();
    Ok(Problem { order, clauses })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingRun {
    pub k: usize,
    pub cells: usize,
    pub seconds: f64,
    pub degsum: u32,
    pub sotd: u64,
    pub ccd_measure: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeuristicRun {
    pub name: String,
    pub selected: Vec<usize>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub id: usize,
    pub seed: u64,
    /// False when the budget ran out; such problems are excluded from statistics.
    pub completed: bool,
    pub runs: Vec<OrderingRun>,
    pub heuristics: Vec<HeuristicRun>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub seed: u64,
    pub params: GenParams,
    pub budget: Duration,
    pub workers: usize,
}

fn run_one(id: usize, seed: u64, params: &GenParams, budget: Duration) -> ExperimentRecord {
    let deadline = Deadline::after(budget);
    let failed = |runs| ExperimentRecord { id, seed, completed: false, runs, heuristics: vec![] };
    let Ok(prob) = random_system(seed, params) else { return failed(vec![]) };
    let all = enumerate_orderings(&prob);
    let cands: Vec<usize> = (0..all.len()).collect();
    let t = Instant::now();
    let Ok(h1) = heuristic1(&prob) else { return failed(vec![]) };
    let h1_time = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let h2 = heuristic2(&prob, &all, &cands, &deadline);
    let h2_time = t.elapsed().as_secs_f64();
    if h2.rows.iter().any(|r| r.1.is_none()) {
        return failed(vec![]);
    }
    let t = Instant::now();
    let Ok(h3) = heuristic3(&prob, &deadline) else { return failed(vec![]) };
    let h3_time = t.elapsed().as_secs_f64();
    let mut runs = Vec::new();
    for (k, o) in all.iter().enumerate() {
        let t = Instant::now();
        match build_cad(&prob, o, &deadline) {
            Ok((_, cad)) => runs.push(OrderingRun {
                k,
                cells: cad.cell_count(),
                seconds: t.elapsed().as_secs_f64(),
                degsum: h1.rows[k].degsum,
                sotd: h1.rows[k].sotd,
                ccd_measure: h2.rows[k].1.unwrap(),
            }),
            Err(_) => return failed(runs),
        }
    }
    let heuristics = vec![
        HeuristicRun { name: "h1".into(), selected: h1.shortlist, seconds: h1_time },
        HeuristicRun { name: "h2".into(), selected: h2.shortlist, seconds: h2_time },
        HeuristicRun { name: "h3".into(), selected: vec![h3], seconds: h3_time },
    ];
    ExperimentRecord { id, seed, completed: true, runs, heuristics }
}

/// Generate `n` problems from consecutive seeds and run every ordering of
/// each under a per-problem time budget.
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<ExperimentRecord> {
    let job = |i: usize| run_one(i, cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64), &cfg.params, cfg.budget);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers.max(1)).build().expect("thread pool");
    pool.install(|| (0..cfg.n).into_par_iter().map(job).collect())
}

/// Per problem and heuristic: cells and time of the pick against the best and worst orderings.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub heuristic: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    #[serde(rename = "a'")]
    pub a_t: f64,
    #[serde(rename = "b'")]
    pub b_t: f64,
    #[serde(rename = "c'")]
    pub c_t: f64,
    #[serde(rename = "d'")]
    pub d_t: f64,
    #[serde(rename = "e'")]
    pub e_t: f64,
    #[serde(rename = "f'")]
    pub f_t: f64,
    #[serde(rename = "g'")]
    pub g_t: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankRow {
    pub heuristic: String,
    pub measure: String,
    pub counts: Vec<usize>,
    pub total: usize,
}

#[derive(Debug, Clone)]
pub struct StatsSummary {
    pub studied: usize,
    pub excluded: usize,
    /// One row per studied problem and heuristic, then one `mean` row per heuristic.
    pub rows: Vec<SummaryRow>,
    pub ranks: Vec<RankRow>,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn pct(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        100.0 * num / den
    }
}

pub fn summarize(records: &[ExperimentRecord]) -> StatsSummary {
    let done: Vec<&ExperimentRecord> = records.iter().filter(|r| r.completed).collect();
    let names: Vec<String> = done.first().map(|r| r.heuristics.iter().map(|h| h.name.clone()).collect()).unwrap_or_default();
    let width = done.first().map_or(0, |r| r.runs.len());
    let mut rows = Vec::new();
    let mut ranks = Vec::new();
    for (hi, name) in names.iter().enumerate() {
        let mut mine = Vec::new();
        let mut rank_c = vec![0usize; width];
        let mut rank_t = vec![0usize; width];
        for r in &done {
            let h = &r.heuristics[hi];
            let cells: Vec<f64> = r.runs.iter().map(|x| x.cells as f64).collect();
            let times: Vec<f64> = r.runs.iter().map(|x| x.seconds).collect();
            let pick = |v: &[f64]| mean(&h.selected.iter().map(|&k| v[k]).collect::<Vec<_>>());
            let (a, b) = (mean(&cells), pick(&cells));
            let (a_t, b_t) = (mean(&times), pick(&times));
            let c = a - b;
            let c_t = a_t - b_t;
            let e_t = h.seconds;
            let f_t = a_t - b_t - e_t;
            mine.push(SummaryRow {
                problem: r.id.to_string(),
                heuristic: name.clone(),
                a,
                b,
                c,
                d: pct(c, a),
                a_t,
                b_t,
                c_t,
                d_t: pct(c_t, a_t),
                e_t,
                f_t,
                g_t: pct(f_t, a_t),
            });
            let rc = competition_ranks(&r.runs.iter().map(|x| x.cells).collect::<Vec<_>>());
            let rt = competition_ranks(&times.iter().map(|t| (t * 1e9) as u64).collect::<Vec<_>>());
            for &k in &h.selected {
                rank_c[rc[k] - 1] += 1;
                rank_t[rt[k] - 1] += 1;
            }
        }
        let col = |f: fn(&SummaryRow) -> f64| mean(&mine.iter().map(f).collect::<Vec<_>>());
        let avg = SummaryRow {
            problem: "mean".into(),
            heuristic: name.clone(),
            a: col(|r| r.a),
            b: col(|r| r.b),
            c: col(|r| r.c),
            d: col(|r| r.d),
            a_t: col(|r| r.a_t),
            b_t: col(|r| r.b_t),
            c_t: col(|r| r.c_t),
            d_t: col(|r| r.d_t),
            e_t: col(|r| r.e_t),
            f_t: col(|r| r.f_t),
            g_t: col(|r| r.g_t),
        };
        rows.extend(mine);
        rows.push(avg);
        ranks.push(RankRow { heuristic: name.clone(), measure: "cells".into(), total: rank_c.iter().sum(), counts: rank_c });
        ranks.push(RankRow { heuristic: name.clone(), measure: "time".into(), total: rank_t.iter().sum(), counts: rank_t });
    }
    StatsSummary { studied: done.len(), excluded: records.len() - done.len(), rows, ranks }
}

/// Pearson's r; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatterPoint {
    pub problem: usize,
    pub k: usize,
    pub h1: f64,
    pub h2: f64,
    pub cells: f64,
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct Correlation {
    pub h1_cells: Option<f64>,
    pub h1_time: Option<f64>,
    pub h2_cells: Option<f64>,
    pub h2_time: Option<f64>,
    pub scatter: Vec<ScatterPoint>,
}

fn scaled(v: &[f64]) -> Vec<f64> {
    let m = v.iter().cloned().fold(0.0, f64::max);
    v.iter().map(|x| if m > 0.0 { x / m } else { 0.0 }).collect()
}

/// Correlate each measure with cell count and time, every value scaled by
/// its maximum within the problem.
pub fn correlate(records: &[ExperimentRecord]) -> Correlation {
    let mut scatter = Vec::new();
    for r in records.iter().filter(|r| r.completed) {
        let col = |f: fn(&OrderingRun) -> f64| scaled(&r.runs.iter().map(f).collect::<Vec<_>>());
        let (h1, h2, c, t) = (col(|x| x.degsum as f64), col(|x| x.ccd_measure as f64), col(|x| x.cells as f64), col(|x| x.seconds));
        for (i, run) in r.runs.iter().enumerate() {
            scatter.push(ScatterPoint { problem: r.id, k: run.k, h1: h1[i], h2: h2[i], cells: c[i], time: t[i] });
        }
    }
    let get = |f: fn(&ScatterPoint) -> f64| scatter.iter().map(f).collect::<Vec<_>>();
    let (h1, h2, c, t) = (get(|p| p.h1), get(|p| p.h2), get(|p| p.cells), get(|p| p.time));
    Correlation {
        h1_cells: pearson(&h1, &c),
        h1_time: pearson(&h1, &t),
        h2_cells: pearson(&h2, &c),
        h2_time: pearson(&h2, &t),
        scatter,
    }
}

fn fmt_r(r: Option<f64>) -> String {
    r.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"))
}

/// Write `records.csv`, `summary.csv`, `ranks.csv`, `correlation.csv` and
/// `scatter.csv` into `dir`.
pub fn write_csvs(dir: &Path, records: &[ExperimentRecord], s: &StatsSummary, c: &Correlation) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("records.csv"))?;
    w.write_record(["problem", "seed", "completed", "k", "cells", "seconds", "degsum", "sotd", "ccd_measure", "selected_by"])?;
    for r in records {
        if r.runs.is_empty() {
            w.write_record([r.id.to_string(), r.seed.to_string(), r.completed.to_string(), "".into(), "".into(), "".into(), "".into(), "".into(), "".into(), "".into()])?;
        }
        for run in &r.runs {
            let by: Vec<&str> = r.heuristics.iter().filter(|h| h.selected.contains(&run.k)).map(|h| h.name.as_str()).collect();
            w.write_record([
                r.id.to_string(),
                r.seed.to_string(),
                r.completed.to_string(),
                run.k.to_string(),
                run.cells.to_string(),
                format!("{:.6}", run.seconds),
                run.degsum.to_string(),
                run.sotd.to_string(),
                run.ccd_measure.to_string(),
                by.join(" "),
            ])?;
        }
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    for row in &s.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("ranks.csv"))?;
    let width = s.ranks.first().map_or(0, |r| r.counts.len());
    let mut header = vec!["heuristic".to_string(), "measure".to_string()];
    header.extend((1..=width).map(|i| i.to_string()));
    header.push("total".into());
    w.write_record(&header)?;
    for r in &s.ranks {
        let mut rec = vec![r.heuristic.clone(), r.measure.clone()];
        rec.extend(r.counts.iter().map(ToString::to_string));
        rec.push(r.total.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("correlation.csv"))?;
    w.write_record(["measure", "against", "r"])?;
    for (m, a, r) in [("h1", "cells", c.h1_cells), ("h1", "time", c.h1_time), ("h2", "cells", c.h2_cells), ("h2", "time", c.h2_time)] {
        w.write_record([m, a, &fmt_r(r)])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("scatter.csv"))?;
    for p in &c.scatter {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(cells: &[usize], picks: &[&[usize]]) -> ExperimentRecord {
        ExperimentRecord {
            id: 0,
            seed: 0,
            completed: true,
            runs: cells
                .iter()
                .enumerate()
                .map(|(k, &c)| OrderingRun { k, cells: c, seconds: c as f64 / 100.0, degsum: 0, sotd: 0, ccd_measure: c as u64 })
                .collect(),
            heuristics: picks
                .iter()
                .enumerate()
                .map(|(i, p)| HeuristicRun { name: format!("h{}", i + 1), selected: p.to_vec(), seconds: 0.01 })
                .collect(),
        }
    }

    #[test]
    fn generator_is_deterministic_and_shaped() {
        let p = GenParams::default();
        let a = random_system(5, &p).unwrap();
        assert_eq!(a, random_system(5, &p).unwrap());
        assert_ne!(a, random_system(6, &p).unwrap());
        assert_eq!(a.clauses.len(), 2);
        let polys: Vec<&Polynomial> = a.clauses.iter().flat_map(|c| c.constraints().map(|k| &k.poly)).collect();
        assert_eq!(polys.len(), 6);
        assert_eq!(a.clauses.iter().map(|c| c.ecs.len()).sum::<usize>(), 4);
        assert!(a.clauses.iter().all(|c| c.others.len() == 1 && c.others[0].relation == Relation::Gt));
        for q in polys {
            assert!(q.uses_var(2));
            assert!(q.total_degree().unwrap() <= 3);
            assert_eq!(q.num_terms(), 6);
        }
        let lin = random_system(1, &GenParams { degree: 1, ..p.clone() }).unwrap();
        assert!(lin.clauses.iter().flat_map(|c| c.constraints()).all(|k| k.poly.total_degree() == Some(1)));
        assert!(random_system(1, &GenParams { terms: 0, ..p }).is_err());
    }

    #[test]
    fn summary_identities() {
        let r = record(&[10, 20, 30, 40, 50, 60, 70, 80], &[&[0], &[0, 1, 2, 3, 4, 5, 6, 7], &[1]]);
        let s = summarize(&[r]);
        assert_eq!(s.studied, 1);
        let h1 = &s.rows[0];
        assert_eq!((h1.a, h1.b, h1.c), (45.0, 10.0, 35.0));
        assert!((h1.d - 100.0 * 35.0 / 45.0).abs() < 1e-9);
        let h2 = s.rows.iter().find(|r| r.heuristic == "h2" && r.problem == "0").unwrap();
        assert_eq!(h2.c, 0.0);
        for row in &s.rows {
            assert!((row.c - (row.a - row.b)).abs() < 1e-9);
            assert!((row.f_t - (row.a_t - row.b_t - row.e_t)).abs() < 1e-9);
        }
        assert_eq!(s.ranks[0].counts[0], 1);
        assert_eq!(s.ranks[2].counts, vec![1; 8]);
        for r in &s.ranks {
            assert_eq!(r.counts.iter().sum::<usize>(), r.total);
        }
    }

    #[test]
    fn ties_rank_high() {
        let r = record(&[5, 5, 7, 7, 7, 9, 9, 9], &[&[1], &[4]]);
        let s = summarize(&[r]);
        assert_eq!(s.ranks[0].counts[0], 1);
        assert_eq!(s.ranks[2].counts[2], 1);
    }

    #[test]
    fn pearson_edges() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).map(|r| (r * 1e9).round()), Some(1e9));
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), None);
        let r = record(&[10, 20, 30, 40, 50, 60, 70, 80], &[&[0]]);
        let c = correlate(&[r]);
        assert!((c.h2_cells.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(c.h1_cells, None);
    }

    #[test]
    fn small_experiment() {
        let cfg = ExperimentConfig {
            n: 2,
            seed: 3,
            params: GenParams { degree: 2, nvars: 2, ..Default::default() },
            budget: Duration::from_secs(60),
            workers: 2,
        };
        let recs = run_experiment(&cfg);
        assert_eq!(recs.len(), 2);
        for r in recs.iter().filter(|r| r.completed) {
            assert_eq!(r.runs.len(), 8);
            assert_eq!(r.heuristics[2].selected.len(), 1);
        }
        let again = run_experiment(&cfg);
        for (a, b) in recs.iter().zip(&again) {
            let cells = |r: &ExperimentRecord| r.runs.iter().map(|x| x.cells).collect::<Vec<_>>();
            assert_eq!(cells(a), cells(b));
        }
        let dir = tempfile::tempdir().unwrap();
        let s = summarize(&recs);
        write_csvs(dir.path(), &recs, &s, &correlate(&recs)).unwrap();
        for f in ["records.csv", "summary.csv", "ranks.csv", "correlation.csv", "scatter.csv"] {
            assert!(dir.path().join(f).exists());
        }
        let tiny = ExperimentConfig { budget: Duration::from_nanos(1), ..cfg };
        let recs = run_experiment(&tiny);
        assert_eq!(summarize(&recs).excluded, recs.iter().filter(|r| !r.completed).count());
    }
}
