//! An order-sensitive model of the complex cylindrical tree refined
//! incrementally by constraint.
//!
//! Each branch records, per level, an optional *chain* polynomial (the first
//! polynomial equated at that level) and a set of entries tagged equated,
//! nonzero or invariant. Splitting a branch on a polynomial `q` at level `l`:
//!
//! * with a chain `e` at `l`: split on `res_l(e, q)` one level down;
//! * without a chain: make `disc(q)` and `res(q, x)` for every entry `x`
//!   invariant below, then branch into `q = 0` (which becomes the chain) and
//!   `q != 0`.
//!
//! Non-constant leading coefficients are split first, the `lc = 0` side
//! continuing with the reductum.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::deadline::Deadline;
use crate::elim::{discriminant, resultant};
use crate::formulation::{ConstraintOrdering, Problem};
use crate::poly::{Polynomial, VariableOrder};

pub type PolyId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CcdError {
    #[error("constraint polynomial is constant (clause {clause})")]
    ConstantConstraint { clause: String },
    #[error("ordering does not match the problem")]
    OrderingMismatch,
    #[error("time budget exhausted")]
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Provenance {
    Input { clause: usize, constraint: String },
    Disc(PolyId),
    Res(PolyId, PolyId),
    Lc(PolyId),
    Content(PolyId),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Input { clause, constraint } => write!(f, "input({clause}.{constraint})"),
            Provenance::Disc(a) => write!(f, "disc(#{a})"),
            Provenance::Res(a, b) => write!(f, "res(#{a},#{b})"),
            Provenance::Lc(a) => write!(f, "lc(#{a})"),
            Provenance::Content(a) => write!(f, "content(#{a})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolyRecord {
    /// Primitive, positive leading coefficient; the registry key.
    pub poly: Polynomial,
    /// First value introduced into the tree, as computed.
    pub raw: Option<Polynomial>,
    /// Square-free, content-free part in the main variable.
    pub core: PolyId,
    pub level: usize,
    pub tags: BTreeSet<Provenance>,
}

#[derive(Debug, Clone, Default)]
struct Registry {
    recs: Vec<PolyRecord>,
    index: HashMap<Polynomial, PolyId>,
    res_cache: HashMap<(PolyId, PolyId), Polynomial>,
    disc_cache: HashMap<PolyId, Polynomial>,
}

impl Registry {
    fn register(&mut self, p: &Polynomial) -> PolyId {
        let key = p.normalized();
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let level = key.main_var().expect("non-constant");
        let cont = key.content_in(level);
        let prim = key.div_exact(&cont).expect("content divides");
        let core_poly = prim.squarefree_in(level);
        let id = self.recs.len();
        self.recs.push(PolyRecord { poly: key.clone(), raw: None, core: id, level, tags: BTreeSet::new() });
        self.index.insert(key.clone(), id);
        if core_poly != key {
            let c = self.register(&core_poly);
            self.recs[id].core = c;
        }
        id
    }

    fn introduce(&mut self, p: &Polynomial, prov: Option<Provenance>) -> PolyId {
        let id = self.register(p);
        let r = &mut self.recs[id];
        if let Some(t) = prov {
            if r.raw.is_none() {
                r.raw = Some(p.clone());
            }
            r.tags.insert(t);
        }
        id
    }

    fn res(&mut self, a: PolyId, b: PolyId) -> Polynomial {
        let key = (a.min(b), a.max(b));
        if let Some(r) = self.res_cache.get(&key) {
            return r.clone();
        }
        let (pa, pb) = (&self.recs[key.0].poly, &self.recs[key.1].poly);
        let v = self.recs[key.0].level.max(self.recs[key.1].level);
        let r = resultant(pa, pb, v).expect("both nonzero, one involves v");
        self.res_cache.insert(key, r.clone());
        r
    }

    fn disc(&mut self, a: PolyId) -> Polynomial {
        if let Some(d) = self.disc_cache.get(&a) {
            return d.clone();
        }
        let d = discriminant(&self.recs[a].poly, self.recs[a].level).expect("involves its main variable");
        self.disc_cache.insert(a, d.clone());
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Role {
    Equated,
    NonZero,
    Invariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClauseState {
    Live,
    Failed,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub chain: Option<PolyId>,
    pub entries: BTreeMap<PolyId, Role>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub slots: Vec<Slot>,
    pub clause_state: Vec<ClauseState>,
}

impl Branch {
    fn root(nvars: usize, nclauses: usize) -> Self {
        Self { slots: vec![Slot::default(); nvars], clause_state: vec![ClauseState::Live; nclauses] }
    }

    fn role(&self, level: usize, id: PolyId) -> Option<Role> {
        self.slots[level].entries.get(&id).copied()
    }

    fn set_role(&mut self, level: usize, id: PolyId, role: Role) {
        let e = self.slots[level].entries.entry(id).or_insert(role);
        if *e == Role::Invariant {
            *e = role;
        }
    }

    /// Equated and nonzero conditions at `level`.
    pub fn conditions(&self, level: usize) -> impl Iterator<Item = (PolyId, Role)> + '_ {
        self.slots[level].entries.iter().filter(|(_, r)| **r != Role::Invariant).map(|(i, r)| (*i, *r))
    }

    /// Polynomials whose roots this branch contributes to stacks at `level`.
    pub fn effective(&self, level: usize) -> Vec<PolyId> {
        match self.slots[level].chain {
            Some(c) => vec![c],
            None => self.slots[level].entries.keys().copied().collect(),
        }
    }
}

#[derive(Default)]
struct Outcome {
    zero: Vec<Branch>,
    nonzero: Vec<Branch>,
    undecided: Vec<Branch>,
}

impl Outcome {
    fn extend(&mut self, o: Outcome) {
        self.zero.extend(o.zero);
        self.nonzero.extend(o.nonzero);
        self.undecided.extend(o.undecided);
    }
}

struct Builder<'a> {
    reg: Registry,
    deadline: &'a Deadline,
}

impl Builder<'_> {
    fn check(&self) -> Result<(), CcdError> {
        if self.deadline.expired() {
            Err(CcdError::Timeout)
        } else {
            Ok(())
        }
    }

    fn level(&self, id: PolyId) -> usize {
        self.reg.recs[id].level
    }

    fn split(&mut self, mut b: Branch, q: &Polynomial, prov: Option<Provenance>) -> Result<Outcome, CcdError> {
        self.check()?;
        let mut out = Outcome::default();
        if q.is_zero() {
            out.zero.push(b);
            return Ok(out);
        }
        if q.is_constant() {
            out.nonzero.push(b);
            return Ok(out);
        }
        let prov = prov.filter(|p| counts(&b, q, p));
        let id = self.reg.introduce(q, prov);
        let cid = self.reg.recs[id].core;
        let l = self.level(cid);
        let cont = self.reg.recs[id].poly.content_in(self.reg.recs[id].level);
        if !cont.is_constant() {
            self.add_invariant(&mut b, &cont, Provenance::Content(id))?;
        }
        let core = self.reg.recs[cid].poly.clone();
        let lc = core.lc_in(l);
        if lc.is_constant() {
            return self.split_core(b, cid);
        }
        let lco = self.split(b, &lc, Some(Provenance::Lc(cid)))?;
        for nb in lco.nonzero.into_iter().chain(lco.undecided) {
            out.extend(self.split_core(nb, cid)?);
        }
        let red = core.reductum_in(l);
        for zb in lco.zero {
            let o = self.split(zb, &red, None)?;
            for (v, role) in [(o.zero, Role::Equated), (o.nonzero, Role::NonZero), (o.undecided, Role::Invariant)] {
                for mut x in v {
                    x.set_role(l, cid, role);
                    match role {
                        Role::Equated => out.zero.push(x),
                        Role::NonZero => out.nonzero.push(x),
                        Role::Invariant => out.undecided.push(x),
                    }
                }
            }
        }
        Ok(out)
    }

    fn split_core(&mut self, mut b: Branch, cid: PolyId) -> Result<Outcome, CcdError> {
        let l = self.level(cid);
        let mut out = Outcome::default();
        if b.slots[l].chain == Some(cid) {
            out.zero.push(b);
            return Ok(out);
        }
        match b.role(l, cid) {
            Some(Role::Equated) => {
                out.zero.push(b);
                return Ok(out);
            }
            Some(Role::NonZero) => {
                out.nonzero.push(b);
                return Ok(out);
            }
            _ => {}
        }
        if let Some(e) = b.slots[l].chain {
            let r = self.reg.res(e, cid);
            if r.is_zero() {
                b.set_role(l, cid, Role::Invariant);
                out.undecided.push(b);
            } else if r.is_constant() {
                b.set_role(l, cid, Role::NonZero);
                out.nonzero.push(b);
            } else {
                let o = self.split(b, &r, Some(Provenance::Res(e.min(cid), e.max(cid))))?;
                for mut z in o.zero {
                    z.set_role(l, cid, Role::Equated);
                    out.zero.push(z);
                }
                for mut n in o.nonzero {
                    n.set_role(l, cid, Role::NonZero);
                    out.nonzero.push(n);
                }
                for mut u in o.undecided {
                    u.set_role(l, cid, Role::Invariant);
                    out.undecided.push(u);
                }
            }
            return Ok(out);
        }
        self.project_into(&mut b, cid)?;
        let mut z = b.clone();
        z.slots[l].chain = Some(cid);
        z.set_role(l, cid, Role::Equated);
        b.set_role(l, cid, Role::NonZero);
        out.zero.push(z);
        out.nonzero.push(b);
        Ok(out)
    }

    /// Derive what a new entry at a chain-free level needs below it.
    fn project_into(&mut self, b: &mut Branch, cid: PolyId) -> Result<(), CcdError> {
        let l = self.level(cid);
        let core = self.reg.recs[cid].poly.clone();
        let lc = core.lc_in(l);
        if !lc.is_constant() {
            self.add_invariant(b, &lc, Provenance::Lc(cid))?;
        }
        if core.degree_in(l).unwrap_or(0) >= 2 {
            let d = self.reg.disc(cid);
            self.add_invariant(b, &d, Provenance::Disc(cid))?;
        }
        let others: Vec<PolyId> = b.slots[l].entries.keys().copied().filter(|&x| x != cid).collect();
        for x in others {
            let r = self.reg.res(x, cid);
            if !r.is_constant() {
                self.add_invariant(b, &r, Provenance::Res(x.min(cid), x.max(cid)))?;
            }
        }
        Ok(())
    }

    fn add_invariant(&mut self, b: &mut Branch, q: &Polynomial, prov: Provenance) -> Result<(), CcdError> {
        self.check()?;
        if q.is_constant() {
            return Ok(());
        }
        let prov = Some(prov).filter(|p| counts(b, q, p));
        let id = self.reg.introduce(q, prov);
        let cont = self.reg.recs[id].poly.content_in(self.reg.recs[id].level);
        if !cont.is_constant() {
            self.add_invariant(b, &cont, Provenance::Content(id))?;
        }
        let cid = self.reg.recs[id].core;
        let l = self.level(cid);
        if b.role(l, cid).is_some() || b.slots[l].chain == Some(cid) {
            return Ok(());
        }
        match b.slots[l].chain {
            Some(e) => {
                let r = self.reg.res(e, cid);
                b.set_role(l, cid, Role::Invariant);
                if !r.is_constant() {
                    self.add_invariant(b, &r, Provenance::Res(e.min(cid), e.max(cid)))?;
                }
            }
            None => {
                self.project_into(b, cid)?;
                b.set_role(l, cid, Role::Invariant);
            }
        }
        Ok(())
    }

    /// Branches that can hold simultaneously over one lower cell must have
    /// their stack polynomials delineable together.
    fn close(&mut self, branches: &mut [Branch], nvars: usize) -> Result<(), CcdError> {
        for l in (1..nvars).rev() {
            for i in 0..branches.len() {
                for j in i + 1..branches.len() {
                    if !compatible(&branches[i], &branches[j], l) {
                        continue;
                    }
                    let (ei, ej) = (branches[i].effective(l), branches[j].effective(l));
                    for &p in &ei {
                        for &q in &ej {
                            if p == q {
                                continue;
                            }
                            let r = self.reg.res(p, q);
                            if r.is_constant() {
                                continue;
                            }
                            let prov = Provenance::Res(p.min(q), p.max(q));
                            self.add_invariant(&mut branches[i], &r, prov.clone())?;
                            self.add_invariant(&mut branches[j], &r, prov)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A derived polynomial landing on a level that already has a chain is only
/// ever looked at modulo that chain, so it does not join the tree's set.
fn counts(b: &Branch, q: &Polynomial, prov: &Provenance) -> bool {
    matches!(prov, Provenance::Input { .. }) || q.main_var().map_or(true, |l| b.slots[l].chain.is_none())
}

fn compatible(a: &Branch, b: &Branch, below: usize) -> bool {
    (0..below).all(|l| {
        a.conditions(l).all(|(id, r)| match b.role(l, id) {
            Some(Role::Equated) => r != Role::NonZero,
            Some(Role::NonZero) => r != Role::Equated,
            _ => true,
        })
    })
}

/// The complex tree for one ordering.
#[derive(Debug, Clone)]
pub struct CCTree {
    pub order: VariableOrder,
    pub branches: Vec<Branch>,
    recs: Vec<PolyRecord>,
}

/// Build the tree for `prob` under ordering `o`.
pub fn build_ccd(prob: &Problem, o: &ConstraintOrdering, deadline: &Deadline) -> Result<CCTree, CcdError> {
    if !o.is_valid_for(prob) {
        return Err(CcdError::OrderingMismatch);
    }
    let n = prob.nvars();
    let mut bld = Builder { reg: Registry::default(), deadline };
    let mut branches = vec![Branch::root(n, prob.clauses.len())];
    for step in o.steps(prob) {
        let clause = &prob.clauses[step.clause];
        let c = if step.is_ec { &clause.ecs[step.index] } else { &clause.others[step.index] };
        if c.poly.is_constant() {
            return Err(CcdError::ConstantConstraint { clause: clause.label.clone() });
        }
        let tag = format!("{}{}", if step.is_ec { "e" } else { "n" }, step.index + 1);
        let prov = Provenance::Input { clause: step.clause, constraint: tag };
        let mut next = Vec::new();
        for b in branches {
            if b.clause_state[step.clause] == ClauseState::Failed {
                next.push(b);
                continue;
            }
            let out = bld.split(b, &c.poly, Some(prov.clone()))?;
            next.extend(out.zero);
            next.extend(out.undecided);
            for mut nb in out.nonzero {
                if step.is_ec {
                    nb.clause_state[step.clause] = ClauseState::Failed;
                }
                next.push(nb);
            }
        }
        next.sort();
        next.dedup();
        branches = next;
    }
    bld.close(&mut branches, n)?;
    branches.sort();
    branches.dedup();
    Ok(CCTree { order: prob.order.clone(), branches, recs: bld.reg.recs })
}

impl CCTree {
    pub fn nvars(&self) -> usize {
        self.order.len()
    }

    /// Canonical (normalized) polynomial for an id.
    pub fn poly(&self, id: PolyId) -> &Polynomial {
        &self.recs[id].poly
    }

    pub fn level(&self, id: PolyId) -> usize {
        self.recs[id].level
    }

    pub fn record(&self, id: PolyId) -> &PolyRecord {
        &self.recs[id]
    }

    fn introduced(&self) -> impl Iterator<Item = (PolyId, &PolyRecord)> {
        self.recs.iter().enumerate().filter(|(_, r)| r.raw.is_some())
    }

    /// Every polynomial introduced anywhere, as computed, ordered by level
    /// then canonical form.
    pub fn polyset(&self) -> Vec<Polynomial> {
        let mut v: Vec<(usize, &Polynomial, &Polynomial)> =
            self.introduced().map(|(_, r)| (r.level, &r.poly, r.raw.as_ref().unwrap())).collect();
        v.sort();
        v.into_iter().map(|(_, _, raw)| raw.clone()).collect()
    }

    /// Introduced polynomials in canonical form.
    pub fn polyset_normalized(&self) -> BTreeSet<Polynomial> {
        self.introduced().map(|(_, r)| r.poly.clone()).collect()
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        p.is_constant() || self.polyset_normalized().contains(&p.normalized())
    }

    /// Sum over the polyset of each member's degree in its main variable.
    pub fn measure(&self) -> u64 {
        self.introduced().map(|(_, r)| r.poly.degree_measure(r.level) as u64).sum()
    }

    /// Core ids that some branch contributes at `level`.
    pub fn active_at(&self, level: usize) -> BTreeSet<PolyId> {
        self.branches.iter().flat_map(|b| b.effective(level)).collect()
    }

    /// The first-processed constraint's core is equated or nonzero on every branch.
    pub fn decides_everywhere(&self, p: &Polynomial) -> bool {
        let key = p.normalized();
        let Some(id) = self.recs.iter().position(|r| r.poly == key) else { return false };
        let cid = self.recs[id].core;
        let l = self.recs[cid].level;
        self.branches.iter().all(|b| matches!(b.role(l, cid), Some(Role::Equated | Role::NonZero)))
    }

    pub fn to_json(&self) -> Value {
        let names = self.order.names();
        let fmt = |id: PolyId| self.recs[id].poly.format_with(names);
        let polyset: Vec<Value> = {
            let mut v: Vec<(usize, PolyId)> = self.introduced().map(|(i, r)| (r.level, i)).collect();
            v.sort_by(|a, b| (a.0, &self.recs[a.1].poly).cmp(&(b.0, &self.recs[b.1].poly)));
            v.into_iter()
                .map(|(l, i)| {
                    let r = &self.recs[i];
                    json!({
                        "id": i,
                        "level": names[l],
                        "poly": r.raw.as_ref().unwrap().format_with(names),
                        "tags": r.tags.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    })
                })
                .collect()
        };
        let branches: Vec<Value> = self
            .branches
            .iter()
            .map(|b| {
                let levels: Vec<Value> = b
                    .slots
                    .iter()
                    .enumerate()
                    .map(|(l, s)| {
                        let list = |role: Role| -> Vec<String> {
                            s.entries.iter().filter(|(_, r)| **r == role).map(|(i, _)| fmt(*i)).collect()
                        };
                        json!({
                            "var": names[l],
                            "chain": s.chain.map(fmt),
                            "equated": list(Role::Equated),
                            "nonzero": list(Role::NonZero),
                            "invariant": list(Role::Invariant),
                        })
                    })
                    .collect();
                json!({
                    "levels": levels,
                    "clause_state": b.clause_state.iter().map(|s| match s {
                        ClauseState::Live => "live",
                        ClauseState::Failed => "ec_failed",
                    }).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "format": 1,
            "vars": names,
            "measure": self.measure(),
            "polyset": polyset,
            "branches": branches,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{corpus, enumerate_orderings, first_ecs};
    use crate::poly::parse_polynomial;

    fn xy(s: &str) -> Polynomial {
        parse_polynomial(s, &VariableOrder::new(["x", "y"]).unwrap()).unwrap()
    }

    #[test]
    fn circle_tree() {
        let prob = corpus::circle();
        let o = &enumerate_orderings(&prob)[0];
        let t = build_ccd(&prob, o, &Deadline::none()).unwrap();
        assert_eq!(t.polyset(), vec![xy("-4*x^2+4"), xy("x^2+y^2-1")]);
        assert_eq!(t.measure(), 4);
        assert_eq!(t.branches.len(), 2);
        assert!(t.decides_everywhere(&xy("x^2+y^2-1")));
    }

    #[test]
    fn circles_parabola_f1_first() {
        let prob = corpus::circles_parabola();
        let all = enumerate_orderings(&prob);
        let t = build_ccd(&prob, &all[0], &Deadline::none()).unwrap();
        for p in ["-4*x^2+4", "-4*x^2+40*x-96", "104*x^2-520*x+672", "4*x^4+4*x^3-7*x^2-4*x+4"] {
            assert!(t.contains(&xy(p)), "{p}");
        }
        assert!(!t.contains(&xy("8*x")));
        assert!(!t.contains(&xy("4*x^4-76*x^3+561*x^2-1908*x+2500")));
    }

    #[test]
    fn circles_parabola_f2_first() {
        let prob = corpus::circles_parabola();
        let all = enumerate_orderings(&prob);
        let t = build_ccd(&prob, &all[1], &Deadline::none()).unwrap();
        assert!(t.contains(&xy("4*x^4-76*x^3+561*x^2-1908*x+2500")));
        assert!(t.contains(&xy("8*x")));
        assert!(!t.contains(&xy("-4*x^2+4")));
    }

    #[test]
    fn determinism_and_first_constraint() {
        for (name, prob) in corpus::all() {
            for o in enumerate_orderings(&prob) {
                let a = build_ccd(&prob, &o, &Deadline::none()).unwrap();
                let b = build_ccd(&prob, &o, &Deadline::none()).unwrap();
                assert_eq!(a.branches, b.branches);
                assert_eq!(a.polyset(), b.polyset());
                let first = &first_ecs(&prob, &o)[0];
                assert!(a.decides_everywhere(first), "{name} {}", o.describe(&prob));
            }
        }
    }
}
