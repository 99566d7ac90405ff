//! Closed-form solvers for the per-bus subproblems.

mod cone_box;
mod disk;
mod eq_qp;
pub mod roots;

pub use cone_box::{solve_cone_box_qp, ConeBoxQp, ConeBoxSolution, ConeCase};
pub use disk::{solve_disk_qp, DiskCase, DiskQp, DiskSolution};
pub use eq_qp::{solve_eq_qp, EqQp, EqQpSolution, RANK_TOL};
pub use roots::real_roots;

use crate::error::KernelError;

/// `x` clipped into `[lo, hi]`.
#[inline]
pub fn clamp(x: f64, lo: f64, hi: f64) -> Result<f64, KernelError> {
    if lo > hi || lo.is_nan() || hi.is_nan() {
        return Err(KernelError::BadBounds { lo, hi });
    }
    Ok(hi.min(x.max(lo)))
}

/// Injection subproblem over a box:
/// `min (alpha/2)p² + beta p + (rho/2)((p − p̂)² + (q − q̂)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxQp {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub p_hat: f64,
    pub q_hat: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub q_lo: f64,
    pub q_hi: f64,
}

impl BoxQp {
    pub fn objective(&self, p: f64, q: f64) -> f64 {
        0.5 * self.alpha * p * p
            + self.beta * p
            + 0.5 * self.rho * ((p - self.p_hat).powi(2) + (q - self.q_hat).powi(2))
    }
}

pub fn solve_box_qp(b: &BoxQp) -> Result<(f64, f64), KernelError> {
    if !(b.alpha + b.rho > 0.0) || b.alpha < 0.0 {
        return Err(KernelError::InvalidInput("box QP needs alpha >= 0 and alpha + rho > 0"));
    }
    let p = clamp((b.rho * b.p_hat - b.beta) / (b.alpha + b.rho), b.p_lo, b.p_hi)?;
    let q = clamp(b.q_hat, b.q_lo, b.q_hi)?;
    Ok((p, q))
}
