//! Dense two-phase primal simplex over exact rationals, Bland's rule.
//!
//! Solves `max c·x  s.t.  A x <= b,  x >= 0`.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum DenseOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Unbounded,
    Infeasible,
}

struct Tableau {
    /// `rows[i]` holds the constraint coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row for the current objective: `obj[j] = c_j - z_j`, last entry `-z`.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..=self.cols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                self.obj[j] -= &f * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs Bland-rule pivots over columns `< allowed`. Returns false when unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> DenseOutcome {
    let m = a.len();
    let n = c.len();
    let negative: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let arts = negative.len();
    // columns: x (n) | slack (m) | artificial (arts) | rhs
    let cols = n + m + arts;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_of_row = vec![None; m];
    for (k, &i) in negative.iter().enumerate() {
        art_of_row[i] = Some(k);
    }
    for i in 0..m {
        let mut row = vec![Rational::zero(); cols + 1];
        let flip = b[i].is_negative();
        for j in 0..n {
            if !a[i][j].is_zero() {
                row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
            }
        }
        row[n + i] = if flip { -Rational::one() } else { Rational::one() };
        row[cols] = if flip { -b[i].clone() } else { b[i].clone() };
        match art_of_row[i] {
            Some(k) => {
                row[n + m + k] = Rational::one();
                basis.push(n + m + k);
            }
            None => basis.push(n + i),
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        obj: vec![Rational::zero(); cols + 1],
        basis,
        cols,
    };

    if arts > 0 {
        // phase 1: maximize -Σ artificials; reduced costs after pricing out the basis
        for &i in &negative {
            for j in 0..=cols {
                if j < n + m || j == cols {
                    let v = t.rows[i][j].clone();
                    t.obj[j] += v;
                }
            }
        }
        t.optimize(cols);
        if t.obj[cols].is_positive() {
            return DenseOutcome::Infeasible;
        }
        // drive artificials out of the basis where possible
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(c) = (0..n + m).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, c);
                }
            }
        }
        // a row whose artificial stays basic is redundant (all zero over real columns)
        let keep: Vec<bool> = t.basis.iter().map(|&bv| bv < n + m).collect();
        let mut r = 0;
        t.rows.retain(|_| {
            let k = keep[r];
            r += 1;
            k
        });
        let mut r = 0;
        t.basis.retain(|_| {
            let k = keep[r];
            r += 1;
            k
        });
        for row in t.rows.iter_mut() {
            for v in row[n + m..cols].iter_mut() {
                *v = Rational::zero();
            }
        }
    }

    // phase 2 objective priced against the current basis
    let mut obj = vec![Rational::zero(); cols + 1];
    obj[..n].clone_from_slice(c);
    for (r, &bv) in t.basis.iter().enumerate() {
        if bv < n && !c[bv].is_zero() {
            let f = c[bv].clone();
            for j in 0..=cols {
                if !t.rows[r][j].is_zero() {
                    obj[j] -= &f * &t.rows[r][j];
                }
            }
        }
    }
    t.obj = obj;
    if !t.optimize(n + m) {
        return DenseOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(r).clone();
        }
    }
    let value = c
        .iter()
        .zip(&x)
        .fold(Rational::zero(), |acc, (ci, xi)| acc + ci * xi);
    DenseOutcome::Optimal { value, x }
}
