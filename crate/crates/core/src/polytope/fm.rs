use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};

use super::lp::{maximize, DenseOutcome};
use super::{canonical_scale, Inequality, Polyhedron, Variable};
use crate::rational::Rational;

/// Row count above which elimination interleaves an LP redundancy sweep.
pub const DEFAULT_REDUNDANCY_THRESHOLD: usize = 64;

/// Dense working system over a fixed column order.
#[derive(Clone)]
struct Rows {
    cols: usize,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    infeasible: bool,
}

enum Normalized {
    Keep(Vec<Rational>, Rational),
    Trivial,
    Infeasible,
}

fn normalize(mut a: Vec<Rational>, mut b: Rational) -> Normalized {
    match canonical_scale(a.iter()) {
        None => {
            if b.is_negative() {
                Normalized::Infeasible
            } else {
                Normalized::Trivial
            }
        }
        Some(scale) => {
            if !b.is_negative() && a.iter().all(|c| !c.is_positive()) {
                return Normalized::Trivial;
            }
            if scale != Rational::from_integer(1.into()) {
                for c in a.iter_mut() {
                    if !c.is_zero() {
                        *c *= &scale;
                    }
                }
                b *= &scale;
            }
            Normalized::Keep(a, b)
        }
    }
}

impl Rows {
    fn new(cols: usize) -> Self {
        Rows {
            cols,
            a: Vec::new(),
            b: Vec::new(),
            infeasible: false,
        }
    }

    fn from_polyhedron(p: &Polyhedron, order: &[Variable]) -> Self {
        let (a, b) = p.dense(order);
        let mut rows = Rows::new(order.len());
        let mut index = HashMap::new();
        for (ai, bi) in a.into_iter().zip(b) {
            rows.insert(&mut index, ai, bi);
        }
        rows
    }

    /// Adds a normalized row; equal coefficient vectors keep the tighter bound.
    fn insert(&mut self, index: &mut HashMap<Vec<Rational>, usize>, a: Vec<Rational>, b: Rational) {
        if self.infeasible {
            return;
        }
        match normalize(a, b) {
            Normalized::Trivial => {}
            Normalized::Infeasible => self.infeasible = true,
            Normalized::Keep(a, b) => match index.get(&a) {
                Some(&i) => {
                    if b < self.b[i] {
                        self.b[i] = b;
                    }
                }
                None => {
                    index.insert(a.clone(), self.a.len());
                    self.a.push(a);
                    self.b.push(b);
                }
            },
        }
    }

    fn len(&self) -> usize {
        self.a.len()
    }

    fn keep(&mut self, keep: &[bool]) {
        let mut i = 0;
        self.a.retain(|_| {
            i += 1;
            keep[i - 1]
        });
        let mut i = 0;
        self.b.retain(|_| {
            i += 1;
            keep[i - 1]
        });
    }

    /// Drops rows `i` with `a_i <= a_j` componentwise and `b_j <= b_i` for some other
    /// kept row `j`; valid because every variable is nonnegative.
    fn drop_dominated(&mut self) {
        let m = self.len();
        let mut keep = vec![true; m];
        for i in 0..m {
            for j in 0..m {
                if i == j || !keep[j] {
                    continue;
                }
                if self.b[j] <= self.b[i] && (0..self.cols).all(|c| self.a[i][c] <= self.a[j][c]) {
                    keep[i] = false;
                    break;
                }
            }
        }
        self.keep(&keep);
    }

    /// Exact LP sweep; each row is tested against the rows still kept.
    fn drop_redundant(&mut self) {
        self.drop_dominated();
        let m = self.len();
        if self.b.iter().any(|b| b.is_negative()) {
            let zero = vec![Rational::zero(); self.cols];
            if maximize(&self.a, &self.b, &zero) == DenseOutcome::Infeasible {
                self.infeasible = true;
                return;
            }
        }
        let mut keep = vec![true; m];
        for i in 0..m {
            let others: Vec<usize> = (0..m).filter(|&k| k != i && keep[k]).collect();
            let a: Vec<Vec<Rational>> = others.iter().map(|&k| self.a[k].clone()).collect();
            let b: Vec<Rational> = others.iter().map(|&k| self.b[k].clone()).collect();
            match maximize(&a, &b, &self.a[i]) {
                DenseOutcome::Optimal { value, .. } if value <= self.b[i] => keep[i] = false,
                DenseOutcome::Infeasible => {
                    self.infeasible = true;
                    return;
                }
                _ => {}
            }
        }
        self.keep(&keep);
    }

    fn eliminate(&mut self, col: usize) {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = Rows::new(self.cols);
        let mut index = HashMap::new();
        for i in 0..self.len() {
            let c = &self.a[i][col];
            if c.is_positive() {
                pos.push(i);
            } else if c.is_negative() {
                neg.push(i);
            } else {
                next.insert(&mut index, self.a[i].clone(), self.b[i].clone());
            }
        }
        // pairing with -x_col <= 0 just drops the column from a positive row
        for &p in &pos {
            let mut a = self.a[p].clone();
            a[col] = Rational::zero();
            next.insert(&mut index, a, self.b[p].clone());
        }
        for &p in &pos {
            for &n in &neg {
                let cp = &self.a[p][col];
                let cn = -&self.a[n][col];
                let a: Vec<Rational> = (0..self.cols)
                    .map(|k| {
                        if k == col {
                            Rational::zero()
                        } else {
                            &self.a[p][k] * &cn + &self.a[n][k] * cp
                        }
                    })
                    .collect();
                let b = &self.b[p] * &cn + &self.b[n] * cp;
                next.insert(&mut index, a, b);
                if next.infeasible {
                    break;
                }
            }
        }
        next.infeasible |= self.infeasible;
        *self = next;
    }

    fn pairing_cost(&self, col: usize) -> usize {
        let pos = self.a.iter().filter(|r| r[col].is_positive()).count();
        let neg = self.a.iter().filter(|r| r[col].is_negative()).count();
        pos * neg
    }

    fn into_polyhedron(self, order: &[Variable], keep_vars: &BTreeSet<Variable>) -> Polyhedron {
        if self.infeasible {
            return Polyhedron::with_variables(vec![Inequality::infeasible()], keep_vars.iter().cloned());
        }
        let qs = self
            .a
            .into_iter()
            .zip(self.b)
            .map(|(a, b)| {
                Inequality::new(
                    order.iter().cloned().zip(a).filter(|(_, c)| !c.is_zero()),
                    b,
                )
            })
            .collect();
        Polyhedron::with_variables(qs, keep_vars.iter().cloned()).canonicalized()
    }
}

/// Projects `p` onto its variables other than `vars`.
pub fn fm_eliminate(p: &Polyhedron, vars: &[Variable]) -> Polyhedron {
    fm_eliminate_with(p, vars, DEFAULT_REDUNDANCY_THRESHOLD)
}

/// [`fm_eliminate`] with an explicit interleaved-redundancy threshold.
pub fn fm_eliminate_with(p: &Polyhedron, vars: &[Variable], threshold: usize) -> Polyhedron {
    let order: Vec<Variable> = p.variables().iter().cloned().collect();
    let mut todo: Vec<usize> = vars
        .iter()
        .filter_map(|v| order.iter().position(|o| o == v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let keep_vars: BTreeSet<Variable> = p
        .variables()
        .iter()
        .filter(|v| !vars.contains(v))
        .cloned()
        .collect();
    let mut rows = Rows::from_polyhedron(p, &order);
    while !todo.is_empty() && !rows.infeasible {
        let (at, _) = todo
            .iter()
            .enumerate()
            .min_by_key(|(_, &c)| rows.pairing_cost(c))
            .expect("nonempty");
        let col = todo.remove(at);
        rows.eliminate(col);
        rows.drop_dominated();
        if rows.len() > threshold {
            rows.drop_redundant();
        }
    }
    rows.into_polyhedron(&order, &keep_vars)
}

/// Removes every inequality implied by the others and nonnegativity.
pub fn remove_redundant(p: &Polyhedron) -> Polyhedron {
    let order: Vec<Variable> = p.variables().iter().cloned().collect();
    let mut rows = Rows::from_polyhedron(p, &order);
    if !rows.infeasible {
        rows.drop_redundant();
    }
    rows.into_polyhedron(&order, p.variables())
}
