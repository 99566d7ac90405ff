//! `min ½ xᵀAx + cᵀx  s.t.  Bx = 0` with `A` positive diagonal.
//!
//! Closed form: `x = (A⁻¹Bᵀ(BA⁻¹Bᵀ)⁻¹BA⁻¹ − A⁻¹) c`. The `m × m` Gram matrix
//! `BA⁻¹Bᵀ` is factored with a diagonally pivoted Cholesky decomposition, whose
//! pivots double as the full-row-rank test.

use crate::error::KernelError;

/// Relative pivot threshold of the rank test.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EqQp {
    a_diag: Vec<f64>,
    /// Row-major `rows × cols`.
    b: Vec<f64>,
    rows: usize,
    c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqQpSolution {
    pub x: Vec<f64>,
    /// Multiplier of `Bx = 0` in `Ax + c + Bᵀν = 0`.
    pub nu: Vec<f64>,
}

impl EqQp {
    pub fn new(a_diag: Vec<f64>, rows: usize, b: Vec<f64>, c: Vec<f64>) -> Result<Self, KernelError> {
        let n = a_diag.len();
        if c.len() != n || b.len() != rows * n {
            return Err(KernelError::InvalidInput("EqQp dimension mismatch"));
        }
        if rows > n {
            return Err(KernelError::InvalidInput("EqQp has more rows than columns"));
        }
        if a_diag.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(KernelError::InvalidInput("EqQp diagonal must be positive"));
        }
        if b.iter().chain(&c).any(|v| !v.is_finite()) {
            return Err(KernelError::InvalidInput("EqQp data must be finite"));
        }
        Ok(EqQp { a_diag, b, rows, c })
    }

    /// `A = rho I`.
    pub fn scaled_identity(rho: f64, rows: usize, b: Vec<f64>, c: Vec<f64>) -> Result<Self, KernelError> {
        let n = c.len();
        Self::new(vec![rho; n], rows, b, c)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.a_diag.len()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn a_diag(&self) -> &[f64] {
        &self.a_diag
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn b_at(&self, i: usize, j: usize) -> f64 {
        self.b[i * self.dim() + j]
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.a_diag)
            .zip(&self.c)
            .map(|((xi, ai), ci)| 0.5 * ai * xi * xi + ci * xi)
            .sum()
    }

    /// `(‖Ax + c + Bᵀν‖∞, ‖Bx‖∞)`.
    pub fn kkt_residuals(&self, x: &[f64], nu: &[f64]) -> (f64, f64) {
        let n = self.dim();
        let mut stat: f64 = 0.0;
        for j in 0..n {
            let mut g = self.a_diag[j] * x[j] + self.c[j];
            for (i, nui) in nu.iter().enumerate() {
                g += self.b_at(i, j) * nui;
            }
            stat = stat.max(g.abs());
        }
        let mut feas: f64 = 0.0;
        for i in 0..self.rows {
            let r: f64 = (0..n).map(|j| self.b_at(i, j) * x[j]).sum();
            feas = feas.max(r.abs());
        }
        (stat, feas)
    }
}

/// Solves the equality-constrained diagonal QP in closed form.
pub fn solve_eq_qp(q: &EqQp) -> Result<EqQpSolution, KernelError> {
    let n = q.dim();
    let m = q.rows;
    // y = A⁻¹c
    let y: Vec<f64> = q.c.iter().zip(&q.a_diag).map(|(c, a)| c / a).collect();
    if m == 0 {
        return Ok(EqQpSolution {
            x: y.into_iter().map(|v| -v).collect(),
            nu: Vec::new(),
        });
    }
    // gram = B A⁻¹ Bᵀ, rhs = B y
    let mut gram = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let bi = &q.b[i * n..(i + 1) * n];
        rhs[i] = bi.iter().zip(&y).map(|(b, y)| b * y).sum();
        for k in 0..=i {
            let bk = &q.b[k * n..(k + 1) * n];
            let g: f64 = (0..n).map(|j| bi[j] * bk[j] / q.a_diag[j]).sum();
            gram[i * m + k] = g;
            gram[k * m + i] = g;
        }
    }
    let gram0 = gram.clone();
    let mut w = pivoted_cholesky_solve(&mut gram, m, &rhs)?;
    // x = A⁻¹Bᵀw − y, ν = −w
    let mut x: Vec<f64> = y.iter().map(|v| -v).collect();
    for (i, wi) in w.iter().enumerate() {
        let bi = &q.b[i * n..(i + 1) * n];
        for j in 0..n {
            x[j] += bi[j] * wi / q.a_diag[j];
        }
    }
    // refine on Bx = 0; the gram squares B's conditioning
    let residual = |x: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| q.b[i * n..(i + 1) * n].iter().zip(x).map(|(b, x)| b * x).sum())
            .collect()
    };
    let norm = |e: &[f64]| e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut e = residual(&x);
    for _ in 0..3 {
        if norm(&e) == 0.0 {
            break;
        }
        let dw = pivoted_cholesky_solve(&mut gram0.clone(), m, &e)?;
        let mut x_new = x.clone();
        for (i, d) in dw.iter().enumerate() {
            let bi = &q.b[i * n..(i + 1) * n];
            for j in 0..n {
                x_new[j] -= bi[j] * d / q.a_diag[j];
            }
        }
        let e_new = residual(&x_new);
        if norm(&e_new) >= norm(&e) {
            break;
        }
        for (wi, d) in w.iter_mut().zip(&dw) {
            *wi -= d;
        }
        x = x_new;
        e = e_new;
    }
    Ok(EqQpSolution {
        x,
        nu: w.into_iter().map(|v| -v).collect(),
    })
}

/// Solves `G w = rhs` for symmetric positive definite `G` (row-major, in place).
fn pivoted_cholesky_solve(g: &mut [f64], m: usize, rhs: &[f64]) -> Result<Vec<f64>, KernelError> {
    let max_diag = (0..m).fold(0.0_f64, |acc, i| acc.max(g[i * m + i]));
    if !(max_diag > 0.0) {
        return Err(KernelError::RankDeficient);
    }
    let mut perm: Vec<usize> = (0..m).collect();
    for k in 0..m {
        // choose the largest remaining diagonal
        let (piv, val) = (k..m)
            .map(|i| (i, g[i * m + i]))
            .fold((k, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(val > RANK_TOL * max_diag) {
            return Err(KernelError::RankDeficient);
        }
        if piv != k {
            perm.swap(k, piv);
            for j in 0..m {
                g.swap(k * m + j, piv * m + j);
            }
            for i in 0..m {
                g.swap(i * m + k, i * m + piv);
            }
        }
        let lkk = g[k * m + k].sqrt();
        g[k * m + k] = lkk;
        for i in k + 1..m {
            g[i * m + k] /= lkk;
        }
        // full symmetric trailing update so later symmetric pivots stay valid
        for j in k + 1..m {
            let ljk = g[j * m + k];
            for i in k + 1..m {
                g[i * m + j] -= g[i * m + k] * ljk;
            }
        }
    }
    // L Lᵀ (P w) = P rhs
    let mut t: Vec<f64> = perm.iter().map(|&p| rhs[p]).collect();
    for i in 0..m {
        let mut s = t[i];
        for k in 0..i {
            s -= g[i * m + k] * t[k];
        }
        t[i] = s / g[i * m + i];
    }
    for i in (0..m).rev() {
        let mut s = t[i];
        for k in i + 1..m {
            s -= g[k * m + i] * t[k];
        }
        t[i] = s / g[i * m + i];
    }
    let mut w = vec![0.0; m];
    for (k, &p) in perm.iter().enumerate() {
        w[p] = t[k];
    }
    Ok(w)
}
