use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{evaluate_cell, CADResult, Coord, Point};
use crate::formulation::Problem;

/// Outcome of a check, with one line per counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub pass: bool,
    pub checked: usize,
    pub witnesses: Vec<String>,
}

impl Verdict {
    fn from(checked: usize, witnesses: Vec<String>) -> Self {
        Self { pass: witnesses.is_empty(), checked, witnesses }
    }
}

/// Is `c` (a cell coordinate) the stack root `r` over `prefix`?
fn same_root(prefix: &[Coord], n: usize, c: &Coord, r: &Coord) -> bool {
    match (c, r) {
        (Coord::Rat(a), Coord::Rat(b)) => a == b,
        (Coord::Alg { f: fa, lo: la, hi: ha, .. }, Coord::Alg { f: fb, lo: lb, hi: hb, .. }) => {
            fa == fb && la >= lb && ha <= hb
        }
        (Coord::Rat(a), Coord::Alg { f, lo, hi, .. }) => {
            if a <= lo || a >= hi {
                return false;
            }
            let mut p = Point::from_coords(n, prefix.to_vec());
            p.sign(&f.substitute(prefix.len(), a)) == 0
        }
        (Coord::Alg { .. }, Coord::Rat(_)) => false,
    }
}

fn strictly_below(a: &Coord, b: &Coord) -> bool {
    match (a, b) {
        (Coord::Rat(x), Coord::Rat(y)) => x < y,
        _ => a.upper() <= b.lower() && !(a.upper() == b.lower() && (a.is_rational() && b.is_rational())),
    }
}

/// Structural cylindricity: every cell coordinate is the stack root or a
/// sector point of the stack over its prefix, stack roots are strictly
/// ordered, and every stack is covered exactly once.
pub fn check_cylindricity(res: &CADResult) -> Verdict {
    let n = res.nvars;
    let mut w = Vec::new();
    for (prefix, st) in &res.stacks {
        for (i, pair) in st.roots.windows(2).enumerate() {
            if !strictly_below(&pair[0], &pair[1]) {
                w.push(format!("stack over {prefix:?}: roots {} and {} are not strictly ordered", i + 1, i + 2));
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for cell in &res.cells {
        if !seen.insert(cell.index.clone()) {
            w.push(format!("cell {:?} appears twice", cell.index));
        }
        if cell.index.len() != n || cell.sample.len() != n {
            w.push(format!("cell {:?} has the wrong length", cell.index));
            continue;
        }
        for j in 0..n {
            let prefix = &cell.index[..j];
            let Some(st) = res.stacks.get(prefix) else {
                w.push(format!("cell {:?}: no stack over {prefix:?}", cell.index));
                break;
            };
            let m = st.roots.len();
            let i = cell.index[j];
            if i == 0 || i > 2 * m + 1 {
                w.push(format!("cell {:?}: index {i} at level {} but the stack has {m} roots", cell.index, j + 1));
                break;
            }
            let c = &cell.sample[j];
            let ok = if i % 2 == 0 {
                same_root(&cell.sample[..j], n, c, &st.roots[i / 2 - 1])
            } else {
                let s = (i - 1) / 2;
                let above = s == 0 || strictly_below(&st.roots[s - 1], c);
                let below = s == m || strictly_below(c, &st.roots[s]);
                c.is_rational() && above && below
            };
            if !ok {
                w.push(format!(
                    "cell {:?}: level {} coordinate ~{:.6} is not {} {} of the stack over {prefix:?}",
                    cell.index,
                    j + 1,
                    c.to_f64(),
                    if i % 2 == 0 { "root" } else { "sector" },
                    if i % 2 == 0 { i / 2 } else { (i + 1) / 2 },
                ));
                break;
            }
        }
    }
    // every stack is fully covered
    for (prefix, st) in &res.stacks {
        let want = 2 * st.roots.len() + 1;
        let got: std::collections::BTreeSet<usize> = res
            .cells
            .iter()
            .filter(|c| c.index.len() > prefix.len() && c.index[..prefix.len()] == prefix[..])
            .map(|c| c.index[prefix.len()])
            .collect();
        if got != (1..=want).collect() {
            w.push(format!("stack over {prefix:?}: cells cover {got:?}, expected 1..={want}"));
        }
    }
    Verdict::from(res.cells.len(), w)
}

fn random_unit(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(rng.gen_range(1..1000).into(), 1000.into())
}

/// Semantic check: truth vectors are constant on cells. Each full-dimensional
/// cell is re-entered at `k` random points by re-lifting its stacks; a root
/// count differing from the stored stack is reported as a delineability
/// failure. Lower-dimensional cells are re-evaluated at their sample.
pub fn check_truth_invariance(res: &CADResult, prob: &Problem, k: usize, seed: u64) -> Verdict {
    let n = res.nvars;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Vec::new();
    let mut checked = 0;
    for cell in &res.cells {
        if cell.dimension() < n {
            let mut p = Point::from_coords(n, cell.sample.clone());
            let (_, truth) = evaluate_cell(prob, &mut p);
            checked += 1;
            if truth != cell.truth {
                w.push(format!("cell {:?}: recorded truth {:?}, sample gives {:?}", cell.index, cell.truth, truth));
            }
            continue;
        }
        'samples: for _ in 0..k {
            let mut p = Point::new(n);
            for j in 0..n {
                let prefix = &cell.index[..j];
                let Some(st) = res.stacks.get(prefix) else {
                    w.push(format!("cell {:?}: no stack over {prefix:?}", cell.index));
                    break 'samples;
                };
                let mut roots = p.stack_roots(&st.polys);
                if roots.len() != st.roots.len() {
                    let at: Vec<String> = p.coords().iter().map(|c| format!("{}", c.lower())).collect();
                    w.push(format!(
                        "cell {:?}: over ({}) the stack has {} roots, expected {}",
                        cell.index,
                        at.join(", "),
                        roots.len(),
                        st.roots.len()
                    ));
                    break 'samples;
                }
                let s = (cell.index[j] - 1) / 2;
                let x = match (s.checked_sub(1), s < roots.len()) {
                    (None, false) => BigRational::from_integer(rng.gen_range(-5..=5).into()),
                    (None, true) => roots[0].below() - random_unit(&mut rng) * BigRational::from_integer(4.into()),
                    (Some(_), false) => roots[s - 1].above() + random_unit(&mut rng) * BigRational::from_integer(4.into()),
                    (Some(_), true) => loop {
                        if roots[s - 1].gap(&roots[s]).is_some() {
                            let (a, b) = (roots[s - 1].upper().clone(), roots[s].lower().clone());
                            if a == b {
                                break a;
                            }
                            let t = random_unit(&mut rng);
                            break &a + (&b - &a) * t;
                        }
                        let (l, r) = roots.split_at_mut(s);
                        p.refine_next(&mut l[s - 1]);
                        p.refine_next(&mut r[0]);
                    },
                };
                p.push(Coord::Rat(x));
            }
            checked += 1;
            let (_, truth) = evaluate_cell(prob, &mut p);
            if truth != cell.truth {
                let at: Vec<String> = p.coords().iter().map(|c| format!("{}", c.lower())).collect();
                w.push(format!(
                    "cell {:?}: recorded truth {:?}, point ({}) gives {:?}",
                    cell.index,
                    cell.truth,
                    at.join(", "),
                    truth
                ));
                break;
            }
        }
    }
    Verdict::from(checked, w)
}
