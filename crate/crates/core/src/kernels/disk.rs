//! `min (a1/2)p² + b1 p + (a2/2)q² + b2 q  s.t.  p² + q² ≤ c²,  p ≥ 0`.

use super::clamp;
use super::roots::real_roots;
use crate::error::KernelError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskQp {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    /// Disk radius.
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskCase {
    /// `b1 ≥ 0`: real part pinned at zero.
    ZeroReal,
    /// Unconstrained minimizer lies inside the half-disk.
    Interior,
    /// Optimum on the arc, from the positive root of the secular quartic.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSolution {
    pub p: f64,
    pub q: f64,
    pub case: DiskCase,
}

impl DiskQp {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64, c: f64) -> Result<Self, KernelError> {
        let d = DiskQp { a1, a2, b1, b2, c };
        d.check()?;
        Ok(d)
    }

    fn check(&self) -> Result<(), KernelError> {
        if !(self.a1 > 0.0 && self.a2 > 0.0 && self.a1.is_finite() && self.a2.is_finite()) {
            return Err(KernelError::InvalidInput("disk quadratic coefficients must be positive"));
        }
        if !(self.b1.is_finite() && self.b2.is_finite()) {
            return Err(KernelError::InvalidInput("disk linear coefficients must be finite"));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(KernelError::InvalidInput("disk radius must be nonnegative"));
        }
        Ok(())
    }

    pub fn objective(&self, p: f64, q: f64) -> f64 {
        0.5 * self.a1 * p * p + self.b1 * p + 0.5 * self.a2 * q * q + self.b2 * q
    }

    pub fn violation(&self, p: f64, q: f64) -> f64 {
        ((p * p + q * q).sqrt() - self.c).max(-p).max(0.0)
    }
}

/// Solves the half-disk QP.
pub fn solve_disk_qp(d: &DiskQp) -> Result<DiskSolution, KernelError> {
    d.check()?;
    let DiskQp { a1, a2, b1, b2, c } = *d;
    if b1 >= 0.0 {
        return Ok(DiskSolution {
            p: 0.0,
            q: clamp(-b2 / a2, -c, c)?,
            case: DiskCase::ZeroReal,
        });
    }
    if c == 0.0 {
        return Ok(DiskSolution {
            p: 0.0,
            q: 0.0,
            case: DiskCase::Boundary,
        });
    }
    let (p0, q0) = (-b1 / a1, -b2 / a2);
    if p0 * p0 + q0 * q0 <= c * c {
        return Ok(DiskSolution {
            p: p0,
            q: q0,
            case: DiskCase::Interior,
        });
    }
    // p = −b1/(a1 + 2λ), q = −b2/(a2 + 2λ) on p² + q² = c²:
    // b1²(a2+2λ)² + b2²(a1+2λ)² − c²(a1+2λ)²(a2+2λ)² = 0
    let u = [a1 * a1, 4.0 * a1, 4.0]; // (a1 + 2λ)²
    let w = [a2 * a2, 4.0 * a2, 4.0]; // (a2 + 2λ)²
    let mut coeffs = [0.0; 5];
    for i in 0..3 {
        coeffs[i] += b1 * b1 * w[i] + b2 * b2 * u[i];
        for j in 0..3 {
            coeffs[i + j] -= c * c * u[i] * w[j];
        }
    }
    let secular = |lam: f64| {
        let p = b1 / (a1 + 2.0 * lam);
        let q = b2 / (a2 + 2.0 * lam);
        p * p + q * q - c * c
    };
    let lam = real_roots(&coeffs)?
        .into_iter()
        .filter(|l| *l > 0.0)
        .map(|l| (secular(l).abs(), l))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .map(|(_, l)| l)
        .ok_or(KernelError::NoCandidate)?;
    let mut p = -b1 / (a1 + 2.0 * lam);
    let mut q = -b2 / (a2 + 2.0 * lam);
    let norm = (p * p + q * q).sqrt();
    if norm > c {
        p *= c / norm;
        q *= c / norm;
    }
    Ok(DiskSolution {
        p,
        q,
        case: DiskCase::Boundary,
    })
}
