//! Lifting a complex cylindrical tree to a cylindrical algebraic
//! decomposition of real space, with structural and semantic checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ccd::{build_ccd, CCTree, CcdError, PolyId, Role};
use crate::deadline::Deadline;
use crate::formulation::{ConstraintOrdering, Problem};
use crate::poly::Polynomial;
use crate::realroot::AlgebraicNumber;

mod check;
pub mod point;
pub mod svg;

pub use check::{check_cylindricity, check_truth_invariance, Verdict};
pub use point::{Coord, Point, TaggedRoots};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CadError {
    #[error("time budget exhausted")]
    Timeout,
    #[error(transparent)]
    Tree(#[from] CcdError),
}

/// The stack over one cell: the polynomials lifted and their real roots.
#[derive(Debug, Clone)]
pub struct Stack {
    pub polys: Vec<Polynomial>,
    pub roots: Vec<Coord>,
}

/// A cell. Index entries are 1-based per level: odd for sectors, even for
/// sections.
#[derive(Debug, Clone)]
pub struct Cell {
    pub index: Vec<usize>,
    pub sample: Vec<Coord>,
    /// Sign of every input constraint polynomial, clause by clause.
    pub signs: Vec<i32>,
    pub truth: Vec<bool>,
}

impl Cell {
    pub fn dimension(&self) -> usize {
        self.index.iter().filter(|i| *i % 2 == 1).count()
    }
}

#[derive(Debug, Clone)]
pub struct CADResult {
    pub nvars: usize,
    pub cells: Vec<Cell>,
    /// Stacks keyed by the index of the cell they sit over.
    pub stacks: BTreeMap<Vec<usize>, Stack>,
    pub elapsed: Duration,
}

impl CADResult {
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }
}

/// Signs of the input constraints at a full sample point, and clause truth.
pub fn evaluate_cell(prob: &Problem, point: &mut Point) -> (Vec<i32>, Vec<bool>) {
    let mut signs = Vec::new();
    let mut truth = Vec::new();
    for c in &prob.clauses {
        let mut all = true;
        for k in c.constraints() {
            let s = point.sign(&k.poly);
            all &= k.holds_with_sign(s);
            signs.push(s);
        }
        truth.push(all);
    }
    (signs, truth)
}

struct Lifter<'a> {
    tree: &'a CCTree,
    prob: &'a Problem,
    deadline: &'a Deadline,
    cells: Vec<Cell>,
    stacks: BTreeMap<Vec<usize>, Stack>,
    /// Signs of level-`j` tree polynomials at the current point, for each `j`.
    memo: Vec<HashMap<PolyId, i32>>,
}

impl Lifter<'_> {
    /// Effective polynomials at `level` of every branch whose lower-level
    /// conditions hold at `point`.
    fn stack_polys(&mut self, point: &mut Point, level: usize) -> Vec<Polynomial> {
        let mut ids: BTreeSet<PolyId> = BTreeSet::new();
        let memo = &mut self.memo;
        for b in &self.tree.branches {
            let ok = (0..level).all(|j| {
                b.conditions(j).all(|(id, role)| {
                    let s = *memo[j].entry(id).or_insert_with(|| point.sign(self.tree.poly(id)));
                    match role {
                        Role::Equated => s == 0,
                        _ => s != 0,
                    }
                })
            });
            if ok {
                ids.extend(b.effective(level));
            }
        }
        ids.into_iter().map(|id| self.tree.poly(id).clone()).collect()
    }

    fn lift(&mut self, point: &mut Point, index: &mut Vec<usize>) -> Result<(), CadError> {
        if self.deadline.expired() {
            return Err(CadError::Timeout);
        }
        let level = point.len();
        if level == self.tree.nvars() {
            let (signs, truth) = evaluate_cell(self.prob, point);
            if point.expired() {
                return Err(CadError::Timeout);
            }
            self.cells.push(Cell { index: index.clone(), sample: point.coords().to_vec(), signs, truth });
            return Ok(());
        }
        let polys = self.stack_polys(point, level);
        let TaggedRoots { mut roots, tags, nullified } = point.stack_roots_tagged(&polys);
        let samples = point.sector_samples(&mut roots);
        if point.expired() {
            return Err(CadError::Timeout);
        }
        self.stacks.insert(index.clone(), Stack { polys: polys.clone(), roots: roots.clone() });
        for i in 1..=2 * roots.len() + 1 {
            let (c, zero): (Coord, &[usize]) = if i % 2 == 1 {
                (Coord::Rat(samples[(i - 1) / 2].clone()), &[])
            } else {
                (roots[i / 2 - 1].clone(), &tags[i / 2 - 1])
            };
            let known = polys
                .iter()
                .enumerate()
                .map(|(j, p)| (p.clone(), nullified.contains(&j) || zero.contains(&j)))
                .collect();
            point.push_known(c, Rc::new(known));
            self.memo.truncate(level);
            self.memo.push(HashMap::new());
            index.push(i);
            let r = self.lift(point, index);
            index.pop();
            point.pop();
            r?;
        }
        Ok(())
    }
}

/// Lift `tree` to a CAD of real space, lifting over each cell only the
/// polynomials of branches consistent with it.
pub fn refine_to_cad(tree: &CCTree, prob: &Problem, deadline: &Deadline) -> Result<CADResult, CadError> {
    let start = Instant::now();
    let mut l = Lifter { tree, prob, deadline, cells: Vec::new(), stacks: BTreeMap::new(), memo: Vec::new() };
    l.lift(&mut Point::new(tree.nvars()).with_deadline(*deadline), &mut Vec::new())?;
    Ok(CADResult { nvars: tree.nvars(), cells: l.cells, stacks: l.stacks, elapsed: start.elapsed() })
}

/// Build the tree for an ordering and lift it.
pub fn build_cad(prob: &Problem, o: &ConstraintOrdering, deadline: &Deadline) -> Result<(CCTree, CADResult), CadError> {
    let tree = build_ccd(prob, o, deadline)?;
    let cad = refine_to_cad(&tree, prob, deadline)?;
    Ok((tree, cad))
}

/// How the first coordinate axis is cut, ascending.
pub fn induced_line_points(res: &CADResult) -> Vec<AlgebraicNumber> {
    res.stacks.get(&Vec::new()).map(|s| s.roots.iter().map(|c| c.to_algebraic(0)).collect()).unwrap_or_default()
}

fn rat_str(r: &BigRational) -> String {
    r.to_string()
}

pub fn coord_json(c: &Coord, names: &[String], v: usize) -> Value {
    match c {
        Coord::Rat(r) => json!({ "value": rat_str(r), "approx": c.to_f64() }),
        Coord::Alg { f, lo, hi, .. } => json!({
            "root_of": f.format_with(names),
            "var": names[v],
            "interval": [rat_str(lo), rat_str(hi)],
            "approx": c.to_f64(),
        }),
    }
}

/// Cell dump. Embeds the problem and ordering so the dump can be re-read.
pub fn cells_json(res: &CADResult, prob: &Problem, ordering: usize) -> Value {
    let names = prob.order.names();
    let sign = |s: i32| match s {
        -1 => "-",
        0 => "0",
        _ => "+",
    };
    let labels: Vec<String> = prob
        .clauses
        .iter()
        .flat_map(|c| {
            let e = (0..c.ecs.len()).map(move |i| format!("{}.e{}", c.label, i + 1));
            let o = (0..c.others.len()).map(move |i| format!("{}.n{}", c.label, i + 1));
            e.chain(o)
        })
        .collect();
    let cells: Vec<Value> = res
        .cells
        .iter()
        .map(|c| {
            json!({
                "index": c.index,
                "sample": c.sample.iter().enumerate().map(|(v, x)| coord_json(x, names, v)).collect::<Vec<_>>(),
                "signs": labels.iter().zip(&c.signs).map(|(l, s)| (l.clone(), json!(sign(*s)))).collect::<serde_json::Map<_, _>>(),
                "truth": c.truth,
            })
        })
        .collect();
    let line: Vec<Value> = res
        .stacks
        .get(&Vec::new())
        .map(|s| s.roots.iter().map(|c| coord_json(c, names, 0)).collect())
        .unwrap_or_default();
    json!({
        "format": 1,
        "problem": serde_json::from_str::<Value>(&prob.to_json()).expect("problem JSON"),
        "ordering": ordering,
        "cell_count": res.cells.len(),
        "line_points": line,
        "cells": cells,
    })
}
