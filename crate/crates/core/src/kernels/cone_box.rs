//! `min Σ(zᵢ² + cᵢzᵢ)  s.t.  (z1² + z2²)/z3 ≤ k² z4,  z3_lo ≤ z3 ≤ z3_hi`.
//!
//! The problem is strictly convex, so its KKT system has exactly one solution.
//! The solver enumerates the multiplier patterns in a fixed order and returns
//! the first one that produces a KKT-consistent point:
//!
//! 1. cone inactive (`μ = 0`): the componentwise minimizer with `z3` clamped;
//! 2. cone active with `z3` pinned at the upper bound, then at the lower bound:
//!    a cubic in `p`;
//! 3. cone active with `z3` interior: a quartic in `p`, with `z3` recovered
//!    from `p` in closed form.
//!
//! Throughout, `p := −1/(2(z3 + μ))`, so that the stationarity conditions of
//! `z1` and `z2` read `z1 = c1 p z3`, `z2 = c2 p z3`. This coincides with the
//! ratio `z1/(c1 z3)` whenever `c1 ≠ 0` and stays defined when a linear
//! coefficient vanishes.

use super::clamp;
use super::roots::real_roots;
use crate::error::KernelError;

/// Multiplier-sign tolerance, relative to the instance scale.
const SIGN_TOL: f64 = 1e-9;
/// Residual allowed in the `z1`/`z2` stationarity identity of a candidate.
const STATIONARITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeBoxQp {
    pub c: [f64; 4],
    pub k: f64,
    pub z3_lo: f64,
    pub z3_hi: f64,
}

/// Which multiplier pattern resolved an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeCase {
    /// Cone inactive.
    Inactive,
    /// Cone active, `z3` at its upper bound.
    ActiveUpper,
    /// Cone active, `z3` at its lower bound.
    ActiveLower,
    /// Cone active, `z3` at a degenerate (`lo = hi`) box.
    ActiveFixed,
    /// Cone active, `z3` strictly inside the box.
    ActiveInterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeBoxSolution {
    pub z: [f64; 4],
    /// Cone multiplier.
    pub mu: f64,
    pub case: ConeCase,
}

impl ConeBoxQp {
    pub fn new(c: [f64; 4], k: f64, z3_lo: f64, z3_hi: f64) -> Result<Self, KernelError> {
        let q = ConeBoxQp { c, k, z3_lo, z3_hi };
        q.check()?;
        Ok(q)
    }

    fn check(&self) -> Result<(), KernelError> {
        if !self.c.iter().all(|v| v.is_finite()) {
            return Err(KernelError::InvalidInput("cone-box coefficients must be finite"));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(KernelError::InvalidInput("cone constant must be positive"));
        }
        if !(self.z3_lo > 0.0 && self.z3_lo <= self.z3_hi && self.z3_hi.is_finite()) {
            return Err(KernelError::InvalidInput("z3 bounds must satisfy 0 < lo <= hi"));
        }
        Ok(())
    }

    pub fn objective(&self, z: &[f64; 4]) -> f64 {
        z.iter().zip(&self.c).map(|(zi, ci)| zi * zi + ci * zi).sum()
    }

    /// `max(0, z1² + z2² − k² z3 z4)`.
    pub fn cone_violation(&self, z: &[f64; 4]) -> f64 {
        (z[0] * z[0] + z[1] * z[1] - self.k * self.k * z[2] * z[3]).max(0.0)
    }

    fn scale(&self) -> f64 {
        self.c
            .iter()
            .fold(1.0_f64, |m, v| m.max(v.abs()))
            .max(self.z3_hi)
    }
}

#[derive(Clone, Copy)]
enum Pin {
    Upper,
    Lower,
    Fixed,
}

struct Ctx<'a> {
    q: &'a ConeBoxQp,
    /// c1² + c2².
    csq: f64,
    k2: f64,
    tol: f64,
}

impl Ctx<'_> {
    /// Point on the active cone for a given `p` and `z3`, with its multipliers.
    /// Returns `(z, μ, λ̄ − λ̲)` or `None` when stationarity fails.
    fn point(&self, p: f64, z3: f64) -> Option<([f64; 4], f64, f64)> {
        let c = &self.q.c;
        let z1 = c[0] * p * z3;
        let z2 = c[1] * p * z3;
        let w = z1 * z1 + z2 * z2;
        let z4 = w / (self.k2 * z3);
        let mu = 2.0 * w / (self.k2 * self.k2 * z3) + c[3] / self.k2;
        // 2 z1 + c1 + 2 μ z1 / z3 = c1 (2 p z3 + 1 + 2 μ p)
        let ident = 2.0 * p * z3 + 1.0 + 2.0 * mu * p;
        if !(ident.abs() <= STATIONARITY_TOL * (1.0 + (2.0 * mu * p).abs() + (2.0 * p * z3).abs())) {
            return None;
        }
        let bound_mult = -(2.0 * z3 + c[2] - mu * w / (z3 * z3));
        Some(([z1, z2, z3, z4], mu, bound_mult))
    }

    fn pinned(&self, pin: Pin) -> Vec<[f64; 4]> {
        let q = self.q;
        let z3 = match pin {
            Pin::Upper | Pin::Fixed => q.z3_hi,
            Pin::Lower => q.z3_lo,
        };
        // (4 C z3 / k⁴) p³ + (2 z3 + 2 c4 / k²) p + 1 = 0
        let coeffs = [
            1.0,
            2.0 * z3 + 2.0 * q.c[3] / self.k2,
            0.0,
            4.0 * self.csq * z3 / (self.k2 * self.k2),
        ];
        let Ok(ps) = real_roots(&coeffs) else {
            return Vec::new();
        };
        ps.into_iter()
            .filter_map(|p| self.point(p, z3))
            .filter(|(_, mu, nu)| {
                *mu >= -self.tol
                    && match pin {
                        Pin::Upper => *nu >= -self.tol,
                        Pin::Lower => *nu <= self.tol,
                        Pin::Fixed => true,
                    }
            })
            .map(|(z, _, _)| z)
            .collect()
    }

    fn interior(&self) -> Vec<[f64; 4]> {
        let q = self.q;
        let cs = self.csq;
        let (c3, c4, k2) = (q.c[2], q.c[3], self.k2);
        // (C²/k⁴) p⁴ + (C/k²)(2c3/k² − c4) p³ + (c3 − 2c4/k²) p − 1 = 0
        let coeffs = [
            -1.0,
            c3 - 2.0 * c4 / k2,
            0.0,
            cs / k2 * (2.0 * c3 / k2 - c4),
            cs * cs / (k2 * k2),
        ];
        let Ok(ps) = real_roots(&coeffs) else {
            return Vec::new();
        };
        let band = self.tol * q.z3_hi.max(1.0);
        ps.into_iter()
            .filter_map(|p| {
                let z3 = -(cs * p + 2.0 * c3) / (2.0 * (cs * p * p + 2.0));
                if !(z3 > q.z3_lo - band && z3 < q.z3_hi + band) {
                    return None;
                }
                let z3 = z3.clamp(q.z3_lo, q.z3_hi);
                let (z, mu, _) = self.point(p, z3)?;
                (mu >= -self.tol).then_some(z)
            })
            .collect()
    }
}

fn best(q: &ConeBoxQp, cands: Vec<[f64; 4]>) -> Option<[f64; 4]> {
    cands.into_iter().min_by(|a, b| {
        q.objective(a)
            .partial_cmp(&q.objective(b))
            .unwrap()
            .then_with(|| a.partial_cmp(b).unwrap())
    })
}

fn cone_mu(q: &ConeBoxQp, z: &[f64; 4]) -> f64 {
    ((2.0 * z[3] + q.c[3]) / (q.k * q.k)).max(0.0)
}

/// Solves the cone-box QP by KKT case enumeration.
pub fn solve_cone_box_qp(q: &ConeBoxQp) -> Result<ConeBoxSolution, KernelError> {
    q.check()?;
    let [c1, c2, c3, c4] = q.c;
    let k2 = q.k * q.k;
    let fixed = q.z3_lo == q.z3_hi;

    // cone inactive
    let z3 = clamp(-0.5 * c3, q.z3_lo, q.z3_hi)?;
    let free = [-0.5 * c1, -0.5 * c2, z3, -0.5 * c4];
    if free[0] * free[0] + free[1] * free[1] <= k2 * free[2] * free[3] {
        return Ok(ConeBoxSolution {
            z: free,
            mu: 0.0,
            case: ConeCase::Inactive,
        });
    }

    let csq = c1 * c1 + c2 * c2;
    if csq == 0.0 {
        // z1 = z2 = 0, so the cone reduces to z4 >= 0 and z4 = 0 is active
        let z = [0.0, 0.0, z3, 0.0];
        let case = if fixed {
            ConeCase::ActiveFixed
        } else if z3 == q.z3_hi {
            ConeCase::ActiveUpper
        } else if z3 == q.z3_lo {
            ConeCase::ActiveLower
        } else {
            ConeCase::ActiveInterior
        };
        return Ok(ConeBoxSolution {
            z,
            mu: c4 / k2,
            case,
        });
    }

    let ctx = Ctx {
        q,
        csq,
        k2,
        tol: SIGN_TOL * q.scale(),
    };
    let order: &[(Pin, ConeCase)] = if fixed {
        &[(Pin::Fixed, ConeCase::ActiveFixed)]
    } else {
        &[
            (Pin::Upper, ConeCase::ActiveUpper),
            (Pin::Lower, ConeCase::ActiveLower),
        ]
    };
    for &(pin, case) in order {
        if let Some(z) = best(q, ctx.pinned(pin)) {
            return Ok(ConeBoxSolution {
                z,
                mu: cone_mu(q, &z),
                case,
            });
        }
    }
    if !fixed {
        if let Some(z) = best(q, ctx.interior()) {
            return Ok(ConeBoxSolution {
                z,
                mu: cone_mu(q, &z),
                case: ConeCase::ActiveInterior,
            });
        }
    }
    Err(KernelError::NoCandidate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_with_lower_clamp() {
        let q = ConeBoxQp::new([0.0; 4], 1.0, 0.5, 2.0).unwrap();
        let s = solve_cone_box_qp(&q).unwrap();
        assert_eq!(s.z, [0.0, 0.0, 0.5, 0.0]);
        assert_eq!(s.case, ConeCase::Inactive);
    }

    #[test]
    fn inactive_cone_componentwise() {
        let q = ConeBoxQp::new([-1.0, 0.0, -2.0, -2.0], 1.0, 0.5, 2.0).unwrap();
        let s = solve_cone_box_qp(&q).unwrap();
        assert_eq!(s.z, [0.5, 0.0, 1.0, 1.0]);
        assert_eq!(s.case, ConeCase::Inactive);
    }

    #[test]
    fn active_cone_instance() {
        // componentwise point (2, 0, 1, 1) violates 4 <= 1
        let q = ConeBoxQp::new([-4.0, 0.0, -2.0, -2.0], 1.0, 0.5, 2.0).unwrap();
        let s = solve_cone_box_qp(&q).unwrap();
        let z = s.z;
        assert!((z[0] * z[0] + z[1] * z[1] - z[2] * z[3]).abs() < 1e-12, "{z:?}");
        assert_ne!(s.case, ConeCase::Inactive);
        assert!(s.mu > 0.0);
    }

    #[test]
    fn degenerate_box_uses_pinned_path() {
        let q = ConeBoxQp::new([-3.0, 1.0, 5.0, -0.5], 0.8, 1.2, 1.2).unwrap();
        let s = solve_cone_box_qp(&q).unwrap();
        assert_eq!(s.z[2], 1.2);
        assert_eq!(s.case, ConeCase::ActiveFixed);
        assert!(q.cone_violation(&s.z) < 1e-12);
    }

    #[test]
    fn zero_planar_coefficients() {
        let q = ConeBoxQp::new([0.0, 0.0, -1.0, 3.0], 1.0, 0.1, 2.0).unwrap();
        let s = solve_cone_box_qp(&q).unwrap();
        assert_eq!(s.z, [0.0, 0.0, 0.5, 0.0]);
        assert_eq!(s.case, ConeCase::ActiveInterior);
    }

    #[test]
    fn single_zero_linear_coefficient_keeps_coordinate_zero() {
        let q = ConeBoxQp::new([0.0, -4.0, -1.0, 1.0], 0.7, 0.2, 3.0).unwrap();
        let s = solve_cone_box_qp(&q).unwrap();
        assert_eq!(s.z[0], 0.0);
        assert!(q.cone_violation(&s.z) < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ConeBoxQp::new([0.0; 4], 0.0, 0.5, 1.0).is_err());
        assert!(ConeBoxQp::new([0.0; 4], 1.0, 0.0, 1.0).is_err());
        assert!(ConeBoxQp::new([0.0; 4], 1.0, 2.0, 1.0).is_err());
    }
}
