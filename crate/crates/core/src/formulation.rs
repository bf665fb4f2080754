//! Formulae, constraint orderings, constraint ordering sets and the ordering
//! heuristics.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ccd::{build_ccd, CCTree, CcdError};
use crate::deadline::Deadline;
use crate::elim::{discriminant, resultant};
use crate::poly::{parse_polynomial, sotd, ParseError, PolyError, Polynomial, VariableOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=0")]
    Eq,
    #[serde(rename = "!=0")]
    Ne,
    #[serde(rename = "<0")]
    Lt,
    #[serde(rename = ">0")]
    Gt,
    #[serde(rename = "<=0")]
    Le,
    #[serde(rename = ">=0")]
    Ge,
}

impl Relation {
    pub fn holds(self, sign: i32) -> bool {
        match self {
            Relation::Eq => sign == 0,
            Relation::Ne => sign != 0,
            Relation::Lt => sign < 0,
            Relation::Gt => sign > 0,
            Relation::Le => sign <= 0,
            Relation::Ge => sign >= 0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=0",
            Relation::Ne => "!=0",
            Relation::Lt => "<0",
            Relation::Gt => ">0",
            Relation::Le => "<=0",
            Relation::Ge => ">=0",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Eq, Self::Ne, Self::Lt, Self::Gt, Self::Le, Self::Ge].into_iter().find(|r| r.symbol() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub poly: Polynomial,
    pub relation: Relation,
}

impl Constraint {
    pub fn is_ec(&self) -> bool {
        self.relation == Relation::Eq
    }

    pub fn holds_with_sign(&self, sign: i32) -> bool {
        self.relation.holds(sign)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub label: String,
    pub ecs: Vec<Constraint>,
    pub others: Vec<Constraint>,
}

impl Clause {
    pub fn new(label: impl Into<String>, constraints: Vec<Constraint>) -> Self {
        let (ecs, others) = constraints.into_iter().partition(Constraint::is_ec);
        Self { label: label.into(), ecs, others }
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.ecs.iter().chain(&self.others)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub order: VariableOrder,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("malformed problem JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("clause {clause}, constraint {index}: {source}")]
    Poly { clause: String, index: usize, source: ParseError },
    #[error("clause {clause}, constraint {index}: unknown relation `{rel}`")]
    Relation { clause: String, index: usize, rel: String },
    #[error("clause {clause}, constraint {index}: zero polynomial")]
    ZeroPolynomial { clause: String, index: usize },
    #[error("problem has no clauses")]
    NoClauses,
    #[error(transparent)]
    Variables(#[from] PolyError),
}

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    vars: Vec<String>,
    clauses: Vec<ClauseFile>,
}

#[derive(Serialize, Deserialize)]
struct ClauseFile {
    label: String,
    constraints: Vec<ConstraintFile>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintFile {
    poly: String,
    rel: String,
}

impl Problem {
    pub fn nvars(&self) -> usize {
        self.order.len()
    }

    pub fn greatest(&self) -> usize {
        self.order.greatest()
    }

    /// Parse the JSON problem format.
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| ProblemError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let order = VariableOrder::new(file.vars)?;
        if file.clauses.is_empty() {
            return Err(ProblemError::NoClauses);
        }
        let mut clauses = Vec::new();
        for c in file.clauses {
            let mut cs = Vec::new();
            for (i, k) in c.constraints.iter().enumerate() {
                let poly = parse_polynomial(&k.poly, &order).map_err(|source| ProblemError::Poly {
                    clause: c.label.clone(),
                    index: i,
                    source,
                })?;
                if poly.is_zero() {
                    return Err(ProblemError::ZeroPolynomial { clause: c.label.clone(), index: i });
                }
                let relation = Relation::parse(k.rel.trim()).ok_or_else(|| ProblemError::Relation {
                    clause: c.label.clone(),
                    index: i,
                    rel: k.rel.clone(),
                })?;
                cs.push(Constraint { poly, relation });
            }
            clauses.push(Clause::new(c.label, cs));
        }
        Ok(Self { order, clauses })
    }

    pub fn to_json(&self) -> String {
        let file = ProblemFile {
            vars: self.order.names().to_vec(),
            clauses: self
                .clauses
                .iter()
                .map(|c| ClauseFile {
                    label: c.label.clone(),
                    constraints: c
                        .constraints()
                        .map(|k| ConstraintFile {
                            poly: k.poly.display(&self.order).to_string(),
                            rel: k.relation.symbol().into(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Multiply the `ec`-th EC of clause `clause` by `k`.
    pub fn scale_ec(&self, clause: usize, ec: usize, k: i64) -> Problem {
        let mut p = self.clone();
        let c = &mut p.clauses[clause].ecs[ec];
        c.poly = c.poly.scale(&k.into());
        p
    }
}

/// A formula permutation plus one EC permutation per clause.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstraintOrdering {
    pub formula_perm: Vec<usize>,
    pub ec_perms: Vec<Vec<usize>>,
}

/// One step of the induced processing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub clause: usize,
    /// Index into the clause's ECs when `is_ec`, else into its others.
    pub index: usize,
    pub is_ec: bool,
    /// Position among the clause's processed ECs.
    pub ec_rank: usize,
}

impl ConstraintOrdering {
    pub fn is_valid_for(&self, prob: &Problem) -> bool {
        let n = prob.clauses.len();
        let perm_ok = |p: &[usize], n: usize| p.len() == n && p.iter().copied().collect::<BTreeSet<_>>() == (0..n).collect();
        perm_ok(&self.formula_perm, n)
            && self.ec_perms.len() == n
            && self.ec_perms.iter().zip(&prob.clauses).all(|(p, c)| perm_ok(p, c.ecs.len()))
    }

    pub fn steps(&self, prob: &Problem) -> Vec<Step> {
        let mut out = Vec::new();
        for &c in &self.formula_perm {
            for (rank, &e) in self.ec_perms[c].iter().enumerate() {
                out.push(Step { clause: c, index: e, is_ec: true, ec_rank: rank });
            }
            for i in 0..prob.clauses[c].others.len() {
                out.push(Step { clause: c, index: i, is_ec: false, ec_rank: 0 });
            }
        }
        out
    }

    pub fn first_ec(&self, clause: usize) -> Option<usize> {
        self.ec_perms[clause].first().copied()
    }

    /// Human-readable descriptor such as `phi2 -> phi1; phi1: e1 -> e2; phi2: e1`.
    pub fn describe(&self, prob: &Problem) -> String {
        let f = self.formula_perm.iter().map(|&c| prob.clauses[c].label.as_str()).join(" -> ");
        let mut parts = vec![f];
        for (c, perm) in self.ec_perms.iter().enumerate() {
            if perm.is_empty() {
                continue;
            }
            let e = perm.iter().map(|i| format!("e{}", i + 1)).join(" -> ");
            parts.push(format!("{}: {}", prob.clauses[c].label, e));
        }
        parts.join("; ")
    }
}

/// Every ordering, formula permutations outermost, lexicographically.
pub fn enumerate_orderings(prob: &Problem) -> Vec<ConstraintOrdering> {
    let n = prob.clauses.len();
    let ec_choices: Vec<Vec<Vec<usize>>> = prob
        .clauses
        .iter()
        .map(|c| (0..c.ecs.len()).permutations(c.ecs.len()).collect())
        .collect();
    let ec_combos: Vec<Vec<Vec<usize>>> = if n == 0 {
        vec![vec![]]
    } else {
        ec_choices.into_iter().multi_cartesian_product().collect()
    };
    let mut out = Vec::new();
    for fp in (0..n).permutations(n) {
        for ec in &ec_combos {
            out.push(ConstraintOrdering { formula_perm: fp.clone(), ec_perms: ec.clone() });
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulationError {
    #[error("no clause has an equational constraint")]
    NoEquationalConstraint,
    #[error("ordering does not match the problem")]
    OrderingMismatch,
    #[error("degree measure needs at least two variables")]
    TooFewVariables,
    #[error("ordering index {0} out of range")]
    NoSuchOrdering(usize),
}

/// The constraint ordering set: discriminants of the first ECs and their
/// pairwise resultants, in the greatest variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintOrderingSet {
    pub polys: BTreeSet<Polynomial>,
}

impl ConstraintOrderingSet {
    pub fn sotd(&self) -> u64 {
        sotd(&self.polys)
    }
}

/// First-EC polynomials in formula order.
pub fn first_ecs(prob: &Problem, o: &ConstraintOrdering) -> Vec<Polynomial> {
    o.formula_perm
        .iter()
        .filter_map(|&c| o.first_ec(c).map(|e| prob.clauses[c].ecs[e].poly.clone()))
        .collect()
}

pub fn constraint_ordering_set(
    prob: &Problem,
    o: &ConstraintOrdering,
) -> Result<ConstraintOrderingSet, FormulationError> {
    if !o.is_valid_for(prob) {
        return Err(FormulationError::OrderingMismatch);
    }
    let v = prob.greatest();
    let p = first_ecs(prob, o);
    if p.is_empty() {
        return Err(FormulationError::NoEquationalConstraint);
    }
    let mut polys = BTreeSet::new();
    for f in &p {
        if f.degree_in(v).unwrap_or(0) >= 1 {
            polys.insert(discriminant(f, v).expect("involves the main variable"));
        }
    }
    for (i, j) in (0..p.len()).tuple_combinations() {
        if let Ok(r) = resultant(&p[i], &p[j], v) {
            polys.insert(r);
        }
    }
    Ok(ConstraintOrderingSet { polys })
}

/// Sum of degrees in the second-greatest variable; zero counts 0.
pub fn measure_degsum(c: &ConstraintOrderingSet, prob: &Problem) -> Result<u32, FormulationError> {
    let n = prob.nvars();
    if n < 2 {
        return Err(FormulationError::TooFewVariables);
    }
    Ok(c.polys.iter().map(|p| p.degree_measure(n - 2)).sum())
}

/// Competition rank: one plus the number of strictly smaller keys.
pub fn competition_ranks<K: Ord>(keys: &[K]) -> Vec<usize> {
    keys.iter().map(|k| 1 + keys.iter().filter(|o| *o < k).count()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H1Row {
    pub k: usize,
    pub degsum: u32,
    pub sotd: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H1Result {
    /// Rows in enumeration order, restricted to the candidates considered.
    pub rows: Vec<H1Row>,
    /// Candidate indices sorted by (degsum, sotd, k).
    pub ranking: Vec<usize>,
    /// Every candidate sharing the minimal (degsum, sotd).
    pub shortlist: Vec<usize>,
}

fn h1_rows(prob: &Problem, all: &[ConstraintOrdering], cands: &[usize]) -> Result<Vec<H1Row>, FormulationError> {
    cands
        .iter()
        .map(|&k| {
            let c = constraint_ordering_set(prob, &all[k])?;
            Ok(H1Row { k, degsum: measure_degsum(&c, prob)?, sotd: c.sotd() })
        })
        .collect()
}

/// Rank orderings by degree sum in the second variable, ties by sotd.
pub fn heuristic1(prob: &Problem) -> Result<H1Result, FormulationError> {
    let all = enumerate_orderings(prob);
    heuristic1_among(prob, &all, &(0..all.len()).collect::<Vec<_>>())
}

pub fn heuristic1_among(
    prob: &Problem,
    all: &[ConstraintOrdering],
    cands: &[usize],
) -> Result<H1Result, FormulationError> {
    let rows = h1_rows(prob, all, cands)?;
    let mut ranking: Vec<&H1Row> = rows.iter().collect();
    ranking.sort_by_key(|r| (r.degsum, r.sotd, r.k));
    let best = ranking.first().map(|r| (r.degsum, r.sotd));
    let shortlist = rows.iter().filter(|r| Some((r.degsum, r.sotd)) == best).map(|r| r.k).collect();
    let ranking = ranking.into_iter().map(|r| r.k).collect();
    Ok(H1Result { rows, ranking, shortlist })
}

/// Ranking by sotd alone, the measure the degree heuristic improves upon.
pub fn sotd_ranking(prob: &Problem) -> Result<Vec<(usize, u64)>, FormulationError> {
    let all = enumerate_orderings(prob);
    let mut rows: Vec<(usize, u64)> = all
        .iter()
        .enumerate()
        .map(|(k, o)| Ok((k, constraint_ordering_set(prob, o)?.sotd())))
        .collect::<Result<_, FormulationError>>()?;
    rows.sort_by_key(|&(k, s)| (s, k));
    Ok(rows)
}

#[derive(Debug)]
pub struct H2Result {
    /// `(k, measure)` per candidate, candidate order; `None` marks a failed build.
    pub rows: Vec<(usize, Option<u64>)>,
    pub ranking: Vec<usize>,
    pub shortlist: Vec<usize>,
    pub trees: Vec<Result<CCTree, CcdError>>,
}

/// Rank candidates by the degree sum over their complex tree's polynomials.
pub fn heuristic2(
    prob: &Problem,
    all: &[ConstraintOrdering],
    cands: &[usize],
    deadline: &Deadline,
) -> H2Result {
    use rayon::prelude::*;
    let trees: Vec<Result<CCTree, CcdError>> =
        cands.par_iter().map(|&k| build_ccd(prob, &all[k], deadline)).collect();
    let rows: Vec<(usize, Option<u64>)> =
        cands.iter().zip(&trees).map(|(&k, t)| (k, t.as_ref().ok().map(CCTree::measure))).collect();
    let key = |m: Option<u64>| m.unwrap_or(u64::MAX);
    let mut ranking: Vec<(usize, Option<u64>)> = rows.clone();
    ranking.sort_by_key(|&(k, m)| (key(m), k));
    let best = ranking.first().map(|&(_, m)| m).flatten();
    let shortlist = match best {
        Some(b) => rows.iter().filter(|r| r.1 == Some(b)).map(|r| r.0).collect(),
        None => vec![],
    };
    H2Result { rows, ranking: ranking.into_iter().map(|r| r.0).collect(), shortlist, trees }
}

/// Degree heuristic shortlist, then tree measure, then lexicographic first.
pub fn heuristic3(prob: &Problem, deadline: &Deadline) -> Result<usize, FormulationError> {
    let all = enumerate_orderings(prob);
    heuristic3_among(prob, &all, &(0..all.len()).collect::<Vec<_>>(), deadline)
}

pub fn heuristic3_among(
    prob: &Problem,
    all: &[ConstraintOrdering],
    cands: &[usize],
    deadline: &Deadline,
) -> Result<usize, FormulationError> {
    let h1 = heuristic1_among(prob, all, cands)?;
    if h1.shortlist.len() == 1 {
        return Ok(h1.shortlist[0]);
    }
    let h2 = heuristic2(prob, all, &h1.shortlist, deadline);
    Ok(h2.shortlist.first().copied().unwrap_or(h1.shortlist[0]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeuristicChoice {
    #[default]
    H1,
    H2,
    H3,
}

impl fmt::Display for HeuristicChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicChoice::H1 => "h1",
            HeuristicChoice::H2 => "h2",
            HeuristicChoice::H3 => "h3",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct AdviseOptions {
    pub heuristic: HeuristicChoice,
    /// Only consider orderings that put single-EC clauses first.
    pub single_ec_first: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub k: usize,
    pub ordering: String,
    pub degsum: u32,
    pub sotd: u64,
    pub ccd_measure: Option<u64>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub format: u32,
    pub heuristic: String,
    pub single_ec_first: bool,
    pub rows: Vec<ReportRow>,
    pub selected: Vec<usize>,
}

/// Orderings whose formula permutation places every single-EC clause before
/// the others.
pub fn single_ec_first_candidates(prob: &Problem, all: &[ConstraintOrdering]) -> Vec<usize> {
    let single = |c: usize| prob.clauses[c].ecs.len() == 1;
    let keep: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|(_, o)| {
            let first_other = o.formula_perm.iter().position(|&c| !single(c)).unwrap_or(o.formula_perm.len());
            o.formula_perm[first_other..].iter().all(|&c| !single(c))
        })
        .map(|(k, _)| k)
        .collect();
    keep
}

pub fn advise(prob: &Problem, opts: &AdviseOptions, deadline: &Deadline) -> Result<Report, FormulationError> {
    let all = enumerate_orderings(prob);
    let cands: Vec<usize> = if opts.single_ec_first {
        single_ec_first_candidates(prob, &all)
    } else {
        (0..all.len()).collect()
    };
    let h1 = heuristic1_among(prob, &all, &cands)?;
    let mut ccd: Vec<Option<u64>> = vec![None; all.len()];
    let selected = match opts.heuristic {
        HeuristicChoice::H1 => h1.shortlist.clone(),
        HeuristicChoice::H2 => {
            let h2 = heuristic2(prob, &all, &cands, deadline);
            for &(k, m) in &h2.rows {
                ccd[k] = m;
            }
            h2.shortlist
        }
        HeuristicChoice::H3 => {
            if h1.shortlist.len() > 1 {
                let h2 = heuristic2(prob, &all, &h1.shortlist, deadline);
                for &(k, m) in &h2.rows {
                    ccd[k] = m;
                }
            }
            vec![heuristic3_among(prob, &all, &cands, deadline)?]
        }
    };
    let keys: Vec<(u64, u64, u64)> = h1
        .rows
        .iter()
        .map(|r| match opts.heuristic {
            HeuristicChoice::H1 => (r.degsum as u64, r.sotd, 0),
            HeuristicChoice::H2 => (ccd[r.k].unwrap_or(u64::MAX), 0, 0),
            HeuristicChoice::H3 => (r.degsum as u64, r.sotd, ccd[r.k].unwrap_or(u64::MAX)),
        })
        .collect();
    let ranks = competition_ranks(&keys);
    let rows = h1
        .rows
        .iter()
        .zip(ranks)
        .map(|(r, rank)| ReportRow {
            k: r.k,
            ordering: all[r.k].describe(prob),
            degsum: r.degsum,
            sotd: r.sotd,
            ccd_measure: ccd[r.k],
            rank,
        })
        .collect();
    Ok(Report {
        format: 1,
        heuristic: opts.heuristic.to_string(),
        single_ec_first: opts.single_ec_first,
        rows,
        selected,
    })
}

/// Problems shipped with the crate.
pub mod corpus {
    use super::Problem;

    pub const CIRCLES_PARABOLA: &str = include_str!("../fixtures/circles_parabola.json");
    pub const CIRCLES_PARABOLA_SHIFTED: &str = include_str!("../fixtures/circles_parabola_shifted.json");
    pub const ELLIPSE: &str = include_str!("../fixtures/ellipse.json");
    pub const CUBICS_SPLIT: &str = include_str!("../fixtures/cubics_split.json");
    pub const CUBICS_JOINT: &str = include_str!("../fixtures/cubics_joint.json");
    pub const CIRCLE: &str = include_str!("../fixtures/circle.json");

    fn load(s: &str) -> Problem {
        Problem::from_json(s).expect("bundled fixture parses")
    }

    pub fn circles_parabola() -> Problem {
        load(CIRCLES_PARABOLA)
    }
    pub fn circles_parabola_shifted() -> Problem {
        load(CIRCLES_PARABOLA_SHIFTED)
    }
    pub fn ellipse() -> Problem {
        load(ELLIPSE)
    }
    pub fn cubics_split() -> Problem {
        load(CUBICS_SPLIT)
    }
    pub fn cubics_joint() -> Problem {
        load(CUBICS_JOINT)
    }
    pub fn circle() -> Problem {
        load(CIRCLE)
    }

    /// Named fixtures for iteration in tests and tools.
    pub fn all() -> Vec<(&'static str, Problem)> {
        vec![
            ("circles_parabola", circles_parabola()),
            ("circles_parabola_shifted", circles_parabola_shifted()),
            ("ellipse", ellipse()),
            ("cubics_split", cubics_split()),
            ("cubics_joint", cubics_joint()),
            ("circle", circle()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn parse(s: &str, prob: &Problem) -> Polynomial {
        parse_polynomial(s, &prob.order).unwrap()
    }

    fn set(prob: &Problem, polys: &[&str]) -> BTreeSet<Polynomial> {
        polys.iter().map(|s| parse(s, prob)).collect()
    }

    /// Index of the ordering with the given permutations.
    fn find(all: &[ConstraintOrdering], fp: &[usize], ec: &[&[usize]]) -> usize {
        let want = ConstraintOrdering { formula_perm: fp.to_vec(), ec_perms: ec.iter().map(|e| e.to_vec()).collect() };
        all.iter().position(|o| *o == want).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_orderings(&corpus::circles_parabola()).len(), 4);
        assert_eq!(enumerate_orderings(&corpus::ellipse()).len(), 8);
        assert_eq!(enumerate_orderings(&corpus::circle()).len(), 1);
        let all = enumerate_orderings(&corpus::circles_parabola());
        assert_eq!(all[0].describe(&corpus::circles_parabola()), "phi1 -> phi2; phi1: e1 -> e2; phi2: e1");
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn circles_parabola_sets() {
        let prob = corpus::circles_parabola();
        let all = enumerate_orderings(&prob);
        let c1 = constraint_ordering_set(&prob, &all[0]).unwrap();
        let c2 = constraint_ordering_set(&prob, &all[1]).unwrap();
        assert_eq!(c1.polys, set(&prob, &["-4*x^2+4", "-4*x^2+40*x-96", "104*x^2-520*x+672"]));
        assert_eq!(c2.polys, set(&prob, &["8*x", "-4*x^2+40*x-96", "4*x^4-76*x^3+561*x^2-1908*x+2500"]));
        assert_eq!((c1.sotd(), c2.sotd()), (8, 14));
        // the formula permutation does not matter
        assert_eq!(constraint_ordering_set(&prob, &all[2]).unwrap(), c1);
        assert_eq!(constraint_ordering_set(&prob, &all[3]).unwrap(), c2);
    }

    #[test]
    fn ellipse_table() {
        let prob = corpus::ellipse();
        let all = enumerate_orderings(&prob);
        let (f, h) = (0usize, 1usize);
        let hh = constraint_ordering_set(&prob, &all[find(&all, &[0, 1], &[&[h, f], &[h, f]])]).unwrap();
        assert_eq!(hh.polys, set(&prob, &["4*a^2*(a^2-c^2+2*c*x-x^2)", "0"]));
        let ff = constraint_ordering_set(&prob, &all[find(&all, &[0, 1], &[&[f, h], &[f, h]])]).unwrap();
        assert_eq!(ff.polys, set(&prob, &["-4*x^2+16*x-12", "-4*x^2-16*x-12", "64*x^2"]));
        for (k, o) in all.iter().enumerate() {
            let c = constraint_ordering_set(&prob, o).unwrap();
            let pair = (c.sotd(), measure_degsum(&c, &prob).unwrap());
            let hs = o.ec_perms.iter().filter(|p| p[0] == h).count();
            let want = match hs {
                2 => (16, 2),
                1 => (114, 8),
                _ => (8, 6),
            };
            assert_eq!(pair, want, "ordering {k}");
        }
    }

    #[test]
    fn heuristic1_shortlists() {
        let prob = corpus::circles_parabola();
        let r = heuristic1(&prob).unwrap();
        assert_eq!(r.shortlist, vec![0, 2]);

        let prob = corpus::ellipse();
        let all = enumerate_orderings(&prob);
        let r = heuristic1(&prob).unwrap();
        let h_first: Vec<usize> = (0..all.len()).filter(|&k| all[k].ec_perms.iter().all(|p| p[0] == 1)).collect();
        assert_eq!(h_first.len(), 2);
        assert_eq!(r.shortlist, h_first);
        // sotd alone prefers the worst class, f first in both
        let s = sotd_ranking(&prob).unwrap();
        assert!(all[s[0].0].ec_perms.iter().all(|p| p[0] == 0));

        // shifted parabola: the measure cannot tell, f1 first is still chosen
        let prob = corpus::circles_parabola_shifted();
        let r = heuristic1(&prob).unwrap();
        let all = enumerate_orderings(&prob);
        assert!(r.shortlist.iter().all(|&k| all[k].ec_perms[0][0] == 0));
    }

    #[test]
    fn scaling_an_ec_keeps_the_choice() {
        for (_, prob) in corpus::all() {
            let base = heuristic1(&prob).unwrap();
            for c in 0..prob.clauses.len() {
                for e in 0..prob.clauses[c].ecs.len() {
                    let scaled = heuristic1(&prob.scale_ec(c, e, 7)).unwrap();
                    assert_eq!(scaled.shortlist, base.shortlist);
                }
            }
        }
    }

    #[test]
    fn heuristic2_and_3() {
        let prob = corpus::circles_parabola();
        let all = enumerate_orderings(&prob);
        let h2 = heuristic2(&prob, &all, &[0, 1, 2, 3], &Deadline::none());
        let m: Vec<u64> = h2.rows.iter().map(|r| r.1.unwrap()).collect();
        assert!(m[0] <= m[1] && m[2] <= m[3], "{m:?}");
        let twice = heuristic2(&prob, &all, &[0, 0], &Deadline::none());
        assert_eq!(twice.rows[0].1, twice.rows[1].1);
        assert_eq!(all[heuristic3(&prob, &Deadline::none()).unwrap()].ec_perms[0][0], 0);
        for (_, prob) in corpus::all() {
            let k = heuristic3(&prob, &Deadline::none()).unwrap();
            assert!(heuristic1(&prob).unwrap().shortlist.contains(&k));
        }
    }

    #[test]
    fn advice_pre_rule() {
        let prob = corpus::circles_parabola();
        let opts = AdviseOptions { single_ec_first: true, ..Default::default() };
        let rep = advise(&prob, &opts, &Deadline::none()).unwrap();
        let all = enumerate_orderings(&prob);
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows.iter().all(|r| all[r.k].formula_perm == vec![1, 0]));
        assert_eq!(rep.selected, vec![2]);
        assert_eq!(rep.heuristic, "h1");
        let again = advise(&prob, &opts, &Deadline::none()).unwrap();
        assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn problem_json_round_trip() {
        for (_, prob) in corpus::all() {
            let back = Problem::from_json(&prob.to_json()).unwrap();
            assert_eq!(back, prob);
        }
        assert!(Problem::from_json("").is_err());
        assert_eq!(corpus::circles_parabola().clauses[0].ecs.len(), 2);
        assert_eq!(corpus::circles_parabola().clauses[1].ecs.len(), 1);
        assert_eq!(corpus::cubics_joint().clauses.len(), 1);
        assert_eq!(corpus::cubics_split().clauses.len(), 2);
    }

    #[test]
    fn no_ec_is_flagged() {
        let prob = Problem::from_json(r#"{"vars":["x","y"],"clauses":[{"label":"p","constraints":[{"poly":"x+y","rel":">0"}]}]}"#).unwrap();
        let all = enumerate_orderings(&prob);
        assert_eq!(constraint_ordering_set(&prob, &all[0]), Err(FormulationError::NoEquationalConstraint));
    }
}
