//! Dense two-phase simplex for small standard-form linear programs
//!
//! ```text
//! minimize cᵀx  subject to  A x = b,  x ≥ 0
//! ```
//!
//! Pivoting follows Bland's rule (lowest eligible index enters, lowest basic
//! index leaves on ratio ties), which cannot cycle. Problems here have a few
//! dozen columns at most, so the tableau is kept dense.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct StandardLp {
    /// Constraint rows, each of length `ncols`.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// rows x (cols + 1); last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
    cap: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.cap {
            return Err(Error::IterationCap { cap: self.cap });
        }
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                line[col] = 0.0;
            }
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Reduced costs of `cost` with respect to the current basis.
    fn reduced(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (r, &bv) in self.basis.iter().enumerate() {
            let cb = cost[bv];
            if cb != 0.0 {
                for (j, dj) in d.iter_mut().enumerate() {
                    *dj -= cb * self.t[r][j];
                }
            }
        }
        d
    }

    /// Runs simplex iterations on `cost` restricted to columns `< allowed`.
    /// Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        loop {
            let d = self.reduced(cost);
            let scale = 1.0 + cost.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            let entering = (0..allowed).find(|&j| d[j] < -PIVOT_EPS * scale);
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.t.len() {
                let a = self.t[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => {
                            ratio < br - PIVOT_EPS || (ratio <= br + PIVOT_EPS && self.basis[r] < bb)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, row, _)) = best else {
                return Ok(false);
            };
            self.pivot(row, col)?;
        }
    }
}

impl StandardLp {
    pub fn solve(&self) -> Result<LpOutcome> {
        let m = self.b.len();
        let n = self.c.len();
        let cap = 10 * (m + n).max(1);
        self.solve_with_cap(cap)
    }

    pub fn solve_with_cap(&self, cap: usize) -> Result<LpOutcome> {
        let m = self.b.len();
        let n = self.c.len();
        if m == 0 {
            // No constraints: x = 0 is optimal unless some cost is negative.
            return Ok(if self.c.iter().any(|&c| c < 0.0) {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Optimal {
                    x: vec![0.0; n],
                    value: 0.0,
                }
            });
        }
        let cols = n + m;
        let mut t = Vec::with_capacity(m);
        for (i, row) in self.a.iter().enumerate() {
            let sign = if self.b[i] < 0.0 { -1.0 } else { 1.0 };
            let mut line = vec![0.0; cols + 1];
            for (j, v) in row.iter().enumerate() {
                line[j] = sign * v;
            }
            line[n + i] = 1.0;
            line[cols] = sign * self.b[i];
            t.push(line);
        }
        let mut tab = Tableau {
            t,
            basis: (n..n + m).collect(),
            cols,
            pivots: 0,
            cap,
        };

        // Phase 1: minimise the sum of artificials.
        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(n) {
            *c = 1.0;
        }
        tab.optimize(&phase1, cols)?;
        let infeasibility: f64 = (0..m)
            .filter(|&r| tab.basis[r] >= n)
            .map(|r| tab.rhs(r))
            .sum();
        let bscale = 1.0 + self.b.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if infeasibility > FEAS_EPS * bscale {
            return Ok(LpOutcome::Infeasible);
        }

        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.t.len() {
            if tab.basis[r] >= n {
                let col = (0..n).find(|&j| tab.t[r][j].abs() > 1e-9);
                match col {
                    Some(j) => tab.pivot(r, j)?,
                    None => {
                        tab.t.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        // Phase 2 on the original objective; artificials may not re-enter.
        let mut cost = self.c.clone();
        cost.resize(cols, 0.0);
        if !tab.optimize(&cost, n)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; n];
        for (r, &bv) in tab.basis.iter().enumerate() {
            if bv < n {
                x[bv] = tab.rhs(r).max(0.0);
            }
        }
        let value = self.c.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

/// `min Σλᵢ  s.t.  Σλᵢvᵢ + Σρⱼrⱼ = x,  λ, ρ ≥ 0`; `∞` when infeasible.
///
/// This is the gauge of `conv(V ∪ {0}) + cone(R)` at `x`.
pub fn lp_minsum(vertices: &[Vec<f64>], rays: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    if x.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let n = x.len();
    let gens: Vec<&Vec<f64>> = vertices.iter().chain(rays).collect();
    let a = (0..n)
        .map(|i| gens.iter().map(|g| g[i]).collect())
        .collect();
    let mut c = vec![1.0; vertices.len()];
    c.resize(gens.len(), 0.0);
    let lp = StandardLp {
        a,
        b: x.to_vec(),
        c,
    };
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Infeasible => Ok(f64::INFINITY),
        // Costs are nonnegative, so the objective is bounded below by zero.
        LpOutcome::Unbounded => unreachable!("lp_minsum objective is bounded below"),
    }
}

/// Whether `{x ≥ 0 : A x = b}` is nonempty; returns a feasible point.
pub fn feasible_point(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Option<Vec<f64>>> {
    let n = a.first().map_or(0, Vec::len);
    let lp = StandardLp {
        a,
        b,
        c: vec![0.0; n],
    };
    Ok(match lp.solve()? {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    })
}
