//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0`. Bland's rule (lowest index enters,
//! lowest basic index leaves on ties) guarantees termination on degenerate
//! problems, which are the norm for polytope membership.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    /// Farkas certificate: `y.A_j <= 0` for every column and `y.b > 0`.
    Infeasible { farkas: Vec<Rational> },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let inv = Rational::one() / &self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[col].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let d = &f * &pivot_row[j];
                row[j] -= d;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = col;
    }

    /// Runs Bland's rule over columns `0..allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[self.rhs] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }
}

pub fn solve(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    assert_eq!(b.len(), m, "rhs length");
    let n = c.len();
    assert!(a.iter().all(|r| r.len() == n), "ragged constraint matrix");
    let width = n + m + 1;
    let rhs = n + m;
    let signs: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rational::zero(); width];
        for j in 0..n {
            row[j] = if signs[i] { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = Rational::one();
        row[rhs] = b[i].abs();
        rows.push(row);
    }
    let mut obj = vec![Rational::zero(); width];
    for row in &rows {
        for j in (0..n).chain(std::iter::once(rhs)) {
            if !row[j].is_zero() {
                obj[j] -= &row[j];
            }
        }
    }
    let mut t = Tableau {
        rows,
        obj,
        basis: (n..n + m).collect(),
        rhs,
    };
    let bounded = t.optimize(n + m);
    debug_assert!(bounded, "phase one is bounded below by zero");

    let infeasibility = -t.obj[rhs].clone();
    if infeasibility.is_positive() {
        let farkas = (0..m)
            .map(|i| {
                let y = Rational::one() - &t.obj[n + i];
                if signs[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        return LpOutcome::Infeasible { farkas };
    }

    // Drive artificial variables out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut obj = vec![Rational::zero(); width];
    obj[..n].clone_from_slice(c);
    for (row, &bj) in t.rows.iter().zip(&t.basis) {
        let cb = &c[bj];
        if cb.is_zero() {
            continue;
        }
        for j in 0..width {
            if !row[j].is_zero() {
                obj[j] -= cb * &row[j];
            }
        }
    }
    t.obj = obj;
    if !t.optimize(n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &bj) in t.rows.iter().zip(&t.basis) {
        x[bj] = row[rhs].clone();
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { x, value }
}
