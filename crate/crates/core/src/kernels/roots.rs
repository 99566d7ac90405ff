//! Real roots of polynomials of degree at most four.
//!
//! Degrees one and two use closed forms (the quadratic in its cancellation-free
//! arrangement). Higher degrees bracket each root between consecutive critical
//! points and refine it with safeguarded Newton steps; every candidate is then
//! polished on the original coefficients.

use crate::error::KernelError;

/// Coefficients below this fraction of the largest magnitude are dropped from
/// the leading end before the degree is determined.
const LEADING_CUTOFF: f64 = 1e-14;
/// Roots closer than this (relative) are reported once.
const MERGE_TOL: f64 = 1e-6;

/// Evaluates `sum coeffs[i] x^i` together with its derivative (Horner).
#[inline]
pub fn eval_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

#[inline]
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `sum |coeffs[i]| |x|^i`, the natural scale of rounding error in `eval`.
fn eval_scale(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
}

fn polish(coeffs: &[f64], mut x: f64) -> f64 {
    let mut best = (eval(coeffs, x).abs(), x);
    for _ in 0..12 {
        let (p, dp) = eval_with_derivative(coeffs, x);
        if p == 0.0 || dp == 0.0 || !dp.is_finite() {
            break;
        }
        let next = x - p / dp;
        if !next.is_finite() {
            break;
        }
        let r = eval(coeffs, next).abs();
        if r < best.0 {
            best = (r, next);
        }
        if (next - x).abs() <= f64::EPSILON * next.abs().max(1e-300) {
            break;
        }
        x = next;
    }
    best.1
}

/// All distinct real roots of `sum coeffs[i] x^i`, sorted ascending.
///
/// Coefficients are in ascending order of power. Fails on the zero
/// polynomial and on polynomials whose degree (after trimming negligible
/// leading coefficients) exceeds four.
pub fn real_roots(coeffs: &[f64]) -> Result<Vec<f64>, KernelError> {
    let max = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if max == 0.0 || !max.is_finite() {
        return Err(KernelError::ZeroPolynomial);
    }
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].abs() < LEADING_CUTOFF * max {
        end -= 1;
    }
    let poly = &coeffs[..end];
    let degree = poly.len() - 1;
    if degree > 4 {
        return Err(KernelError::DegreeTooHigh(degree));
    }

    // exact zero roots: deflate trailing zero coefficients
    let zeros = poly.iter().take_while(|c| **c == 0.0).count();
    let reduced = &poly[zeros..];
    let mut roots = Vec::with_capacity(4);
    if zeros > 0 {
        roots.push(0.0);
    }
    let d = reduced.len() - 1;
    match d {
        0 => {}
        1 => roots.push(-reduced[0] / reduced[1]),
        2 => quadratic(reduced[2], reduced[1], reduced[0], &mut roots),
        _ => bracketed_roots(reduced, &mut roots),
    }

    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    roots.retain(|r| r.is_finite());
    for r in roots.iter_mut() {
        *r = polish(poly, *r);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for r in roots {
        let accept = eval(poly, r).abs() <= 1e-9 * eval_scale(poly, r).max(max * 1e-3);
        if !accept {
            continue;
        }
        match out.last() {
            Some(&last) if (r - last).abs() <= MERGE_TOL * last.abs().max(1.0) => {
                // keep whichever evaluates closer to zero
                if eval(poly, r).abs() < eval(poly, last).abs() {
                    *out.last_mut().unwrap() = r;
                }
            }
            _ => out.push(r),
        }
    }
    Ok(out)
}

fn quadratic(a: f64, b: f64, c: f64, roots: &mut Vec<f64>) {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs());
    if disc < 0.0 {
        // negative only through rounding: report the double root
        if -disc <= 1e-12 * scale {
            roots.push(-b / (2.0 * a));
        }
        return;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        roots.push(0.0);
        return;
    }
    roots.push(q / a);
    roots.push(c / q);
}

/// Roots of a degree ≥ 3 polynomial: the critical points (roots of the
/// derivative) split the line into monotone pieces, each holding at most one
/// root. Critical points themselves are kept as candidates for even-multiplicity
/// roots and filtered by the residual test of the caller.
fn bracketed_roots(poly: &[f64], roots: &mut Vec<f64>) {
    let d = poly.len() - 1;
    let deriv: Vec<f64> = (1..=d).map(|i| i as f64 * poly[i]).collect();
    let mut crit = Vec::with_capacity(d);
    match d - 1 {
        2 => quadratic(deriv[2], deriv[1], deriv[0], &mut crit),
        _ => bracketed_roots(&deriv, &mut crit),
    }
    crit.retain(|c| c.is_finite());
    crit.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lead = poly[d];
    let bound = 1.0 + poly[..d].iter().fold(0.0_f64, |m, c| m.max((c / lead).abs()));
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(-bound);
    knots.extend(crit.iter().copied().filter(|c| c.abs() < bound));
    knots.push(bound);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (eval(poly, a), eval(poly, b));
        if fa == 0.0 {
            roots.push(a);
        } else if fb != 0.0 && fa.signum() != fb.signum() {
            roots.push(safe_newton(poly, a, b, fa));
        }
    }
    if eval(poly, bound) == 0.0 {
        roots.push(bound);
    }
    roots.extend(crit);
}

/// Newton iteration kept inside a sign-change bracket, bisecting whenever a
/// step would leave it or fails to shrink it fast enough.
fn safe_newton(poly: &[f64], mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let neg_at_lo = f_lo < 0.0;
    let mut x = 0.5 * (lo + hi);
    let mut last_width = hi - lo;
    for _ in 0..200 {
        let (f, df) = eval_with_derivative(poly, x);
        if f == 0.0 {
            return x;
        }
        if (f < 0.0) == neg_at_lo {
            lo = x;
        } else {
            hi = x;
        }
        let width = hi - lo;
        if width <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let newton = x - f / df;
        x = if df != 0.0 && newton > lo && newton < hi && width <= 0.5 * last_width {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_width = width;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_roots(rs: &[f64], lead: f64) -> Vec<f64> {
        let mut c = vec![lead];
        for &r in rs {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        c
    }

    #[test]
    fn cubic_factored() {
        // p^3 - p
        assert_eq!(real_roots(&[0.0, -1.0, 0.0, 1.0]).unwrap(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn biquadratic_factored() {
        let r = real_roots(&[4.0, 0.0, -5.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.len(), 4);
        for (got, want) in r.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots(&[1.0, 0.0, 1.0]).unwrap().is_empty());
        assert!(real_roots(&[1.0, 0.0, 0.0, 0.0, 1.0]).unwrap().is_empty());
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(real_roots(&[0.0, 0.0]), Err(KernelError::ZeroPolynomial));
        assert_eq!(real_roots(&[]), Err(KernelError::ZeroPolynomial));
    }

    #[test]
    fn degree_above_four_rejected() {
        assert_eq!(
            real_roots(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            Err(KernelError::DegreeTooHigh(5))
        );
    }

    #[test]
    fn negligible_leading_terms_are_trimmed() {
        let r = real_roots(&[-2.0, 1.0, 0.0, 1e-20]).unwrap();
        assert_eq!(r, vec![2.0]);
    }

    #[test]
    fn double_root_reported_once() {
        let c = from_roots(&[1.5, 1.5, -3.0], 2.0);
        let r = real_roots(&c).unwrap();
        assert_eq!(r.len(), 2, "{r:?}");
        assert!((r[0] + 3.0).abs() < 1e-9);
        assert!((r[1] - 1.5).abs() < 1e-6);
    }

    #[test]
    fn linear_and_constant() {
        assert_eq!(real_roots(&[3.0, -1.5]).unwrap(), vec![2.0]);
        assert!(real_roots(&[7.0]).unwrap().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn recovers_separated_roots(
            raw in proptest::collection::vec(-10.0f64..10.0, 1..=4),
            lead in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
        ) {
            let mut rs = raw.clone();
            rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(rs.windows(2).all(|w| w[1] - w[0] >= 1e-3));
            let c = from_roots(&rs, lead);
            let got = real_roots(&c).unwrap();
            prop_assert_eq!(got.len(), rs.len(), "{:?} vs {:?}", got, rs);
            let m = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (g, w) in got.iter().zip(&rs) {
                prop_assert!((g - w).abs() <= 1e-7, "{} vs {}", g, w);
                prop_assert!(eval(&c, *g).abs() <= 1e-9 * m);
            }
        }
    }
}
