//! Slow reference solvers for tests and checks.
//!
//! Nothing here calls into [`crate::kernels`]: the kernel subproblems are
//! solved by grid search followed by pattern search, the equality QP by dense
//! Gaussian elimination on the full KKT matrix, and small ROPF instances by
//! projected gradient over the injections with a power-flow sweep.

use crate::kernels::{ConeBoxQp, DiskQp, EqQp};
use crate::network::{BusId, InjectionRegion, RadialNetwork};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Grid points per axis.
    pub resolution: usize,
    /// Cap on refinement iterations.
    pub refine_iters: usize,
    pub tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            resolution: 50,
            refine_iters: 20_000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("infeasible box: [{lo}, {hi}]")]
    InfeasibleBox { lo: f64, hi: f64 },
    #[error("no feasible point found")]
    NoFeasiblePoint,
    #[error("network too large for the oracle: {0} buses")]
    TooLarge(usize),
    #[error("singular KKT system")]
    Singular,
}

/// Pattern search over the full `{-1, 0, 1}^n` stencil with step halving.
/// Coordinates are clipped into `[lo, hi]`.
fn pattern_search<F: Fn(&[f64]) -> f64>(
    f: &F,
    mut x: Vec<f64>,
    mut step: Vec<f64>,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let n = x.len();
    let mut fx = f(&x);
    let dirs: Vec<Vec<f64>> = (0..3usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let d = (code % 3) as f64 - 1.0;
                    code /= 3;
                    d
                })
                .collect::<Vec<_>>()
        })
        .filter(|d| d.iter().any(|v| *v != 0.0))
        .collect();
    let mut trial = vec![0.0; n];
    for _ in 0..max_iters {
        if step.iter().all(|s| *s < tol) {
            break;
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for d in &dirs {
            for i in 0..n {
                trial[i] = (x[i] + d[i] * step[i]).clamp(lo[i], hi[i]);
            }
            let ft = f(&trial);
            if ft < fx && best.as_ref().map_or(true, |(fb, _)| ft < *fb) {
                best = Some((ft, trial.clone()));
            }
        }
        match best {
            Some((fb, xb)) => {
                fx = fb;
                x = xb;
            }
            None => step.iter_mut().for_each(|s| *s *= 0.5),
        }
    }
    (x, fx)
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

// ---------------------------------------------------------------------------
// Cone-box QP
// ---------------------------------------------------------------------------

/// `min Σ zᵢ² + cᵢzᵢ  s.t.  z1² + z2² ≤ k² z3 z4,  z3 ∈ [z3_lo, z3_hi]`.
pub fn oracle_cone_box(q: &ConeBoxQp, cfg: &OracleConfig) -> Result<([f64; 4], f64), OracleError> {
    let (lo3, hi3) = (q.z3_lo, q.z3_hi);
    if !(lo3 <= hi3) || !(lo3 > 0.0) {
        return Err(OracleError::InfeasibleBox { lo: lo3, hi: hi3 });
    }
    let c = q.c;
    let k2 = q.k * q.k;
    let z4_of = |z: &[f64]| ((z[0] * z[0] + z[1] * z[1]) / (k2 * z[2])).max(-0.5 * c[3]);
    let f = |z: &[f64]| {
        let z4 = z4_of(z);
        z[0] * z[0] + c[0] * z[0] + z[1] * z[1] + c[1] * z[1] + z[2] * z[2] + c[2] * z[2] + z4 * z4 + c[3] * z4
    };
    // the cone only shrinks the planar part towards zero
    let span = |ci: f64| ((-0.5 * ci).min(0.0), (-0.5 * ci).max(0.0));
    let (a1, b1) = span(c[0]);
    let (a2, b2) = span(c[1]);
    let res = cfg.resolution;
    let mut best = (f64::INFINITY, vec![0.0; 3]);
    for z1 in linspace(a1, b1, res) {
        for z2 in linspace(a2, b2, res) {
            for z3 in linspace(lo3, hi3, res) {
                let z = [z1, z2, z3];
                let fz = f(&z);
                if fz < best.0 {
                    best = (fz, z.to_vec());
                }
            }
        }
    }
    let cell = |a: f64, b: f64| ((b - a) / (res - 1) as f64).max(1e-3);
    let step = vec![cell(a1, b1), cell(a2, b2), cell(lo3, hi3)];
    let wide = 1e6;
    let (z, fz) = pattern_search(
        &f,
        best.1,
        step,
        &[-wide, -wide, lo3],
        &[wide, wide, hi3],
        cfg.tol,
        cfg.refine_iters,
    );
    Ok(([z[0], z[1], z[2], z4_of(&z)], fz))
}

// ---------------------------------------------------------------------------
// Disk QP
// ---------------------------------------------------------------------------

/// `min (a1/2)p² + b1 p + (a2/2)q² + b2 q` over the half-disk `p ≥ 0, p² + q² ≤ c²`.
pub fn oracle_disk(d: &DiskQp, cfg: &OracleConfig) -> (f64, f64, f64) {
    let obj = |p: f64, q: f64| 0.5 * d.a1 * p * p + d.b1 * p + 0.5 * d.a2 * q * q + d.b2 * q;
    let c = d.c;
    if c == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let polar = |x: &[f64]| obj(x[0] * x[1].cos(), x[0] * x[1].sin());
    let res = cfg.resolution;
    let mut best = (f64::INFINITY, vec![0.0, 0.0]);
    let mut best_arc = (f64::INFINITY, 0.0);
    for r in linspace(0.0, c, res) {
        for t in linspace(-half_pi, half_pi, 2 * res) {
            let fx = polar(&[r, t]);
            if fx < best.0 {
                best = (fx, vec![r, t]);
            }
            if r == c && fx < best_arc.0 {
                best_arc = (fx, t);
            }
        }
    }
    let step = vec![c / (res - 1) as f64, std::f64::consts::PI / (2 * res - 1) as f64];
    let (x, fx) = pattern_search(&polar, best.1, step.clone(), &[0.0, -half_pi], &[c, half_pi], cfg.tol, cfg.refine_iters);
    let mut out = (x[0] * x[1].cos(), x[0] * x[1].sin(), fx);
    // boundary refinement along the arc
    let arc = |t: &[f64]| polar(&[c, t[0]]);
    let (t, ft) = pattern_search(&arc, vec![best_arc.1], vec![step[1]], &[-half_pi], &[half_pi], cfg.tol, cfg.refine_iters);
    if ft < out.2 {
        out = (c * t[0].cos(), c * t[0].sin(), ft);
    }
    // polar steps stall at the origin, where every angle is the same point
    let cart = |x: &[f64]| {
        if x[0] < 0.0 || x[0].hypot(x[1]) > c {
            f64::INFINITY
        } else {
            obj(x[0], x[1])
        }
    };
    let (xc, fc) = pattern_search(&cart, vec![out.0.max(0.0), out.1], vec![step[0]; 2], &[0.0, -c], &[c, c], cfg.tol, cfg.refine_iters);
    if fc < out.2 {
        out = (xc[0], xc[1], fc);
    }
    // and along the flat edge p = 0, where the optimum is a clipped vertex
    let qe = (-d.b2 / d.a2).clamp(-c, c);
    let fe = obj(0.0, qe);
    if fe < out.2 {
        out = (0.0, qe, fe);
    }
    out.0 = out.0.max(0.0);
    out
}

// ---------------------------------------------------------------------------
// Equality-constrained QP
// ---------------------------------------------------------------------------

/// Solves `[A Bᵀ; B 0] [x; ν] = [−c; 0]` by Gaussian elimination with partial pivoting.
pub fn oracle_eq_qp(q: &EqQp) -> Result<(Vec<f64>, f64), OracleError> {
    let n = q.dim();
    let m = q.rows();
    let size = n + m;
    let mut k = vec![vec![0.0; size + 1]; size];
    for i in 0..n {
        k[i][i] = q.a_diag()[i];
        k[i][size] = -q.c()[i];
    }
    for r in 0..m {
        for j in 0..n {
            let b = q.b()[r * n + j];
            k[n + r][j] = b;
            k[j][n + r] = b;
        }
    }
    let scale = k.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    for col in 0..size {
        let piv = (col..size)
            .max_by(|&a, &b| k[a][col].abs().partial_cmp(&k[b][col].abs()).unwrap())
            .unwrap();
        if k[piv][col].abs() < 1e-13 * scale {
            return Err(OracleError::Singular);
        }
        k.swap(col, piv);
        for row in col + 1..size {
            let f = k[row][col] / k[col][col];
            if f != 0.0 {
                for j in col..=size {
                    k[row][j] -= f * k[col][j];
                }
            }
        }
    }
    let mut sol = vec![0.0; size];
    for row in (0..size).rev() {
        let mut acc = k[row][size];
        for j in row + 1..size {
            acc -= k[row][j] * sol[j];
        }
        sol[row] = acc / k[row][row];
    }
    sol.truncate(n);
    let obj = (0..n)
        .map(|i| 0.5 * q.a_diag()[i] * sol[i] * sol[i] + q.c()[i] * sol[i])
        .sum();
    Ok((sol, obj))
}

// ---------------------------------------------------------------------------
// Small ROPF
// ---------------------------------------------------------------------------

/// Primal point of the branch flow model, indexed by bus. Line quantities
/// (`flow`, `l`) sit on the line's child bus and are zero at the root.
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePoint {
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub flow_p: Vec<f64>,
    pub flow_q: Vec<f64>,
    pub l: Vec<f64>,
}

/// `Σ (αᵢ/2) pᵢ² + βᵢ pᵢ`.
pub fn objective(p: &[f64], net: &RadialNetwork) -> f64 {
    net.buses()
        .zip(p)
        .map(|(b, &pi)| {
            let s = net.spec(b);
            0.5 * s.alpha * pi * pi + s.beta * pi
        })
        .sum()
}

/// Power-flow sweep with `ℓ = |S|²/v`, given non-root injections.
fn sweep(net: &RadialNetwork, order: &[BusId], p: &[f64], q: &[f64]) -> Option<OraclePoint> {
    let n = net.n_buses();
    let v0 = net.spec(BusId::ROOT).v_lo;
    let mut v = vec![v0; n];
    let mut fp = vec![0.0; n];
    let mut fq = vec![0.0; n];
    let mut l = vec![0.0; n];
    let (mut p, mut q) = (p.to_vec(), q.to_vec());
    p[0] = 0.0;
    q[0] = 0.0;
    for _ in 0..500 {
        let v_old = v.clone();
        for &b in order.iter().rev().filter(|b| !b.is_root()) {
            let i = b.index();
            let (mut sp, mut sq) = (p[i], q[i]);
            for &c in net.children(b) {
                let z = net.line(c).unwrap();
                sp += fp[c.index()] - z.r * l[c.index()];
                sq += fq[c.index()] - z.x * l[c.index()];
            }
            fp[i] = sp;
            fq[i] = sq;
            l[i] = (sp * sp + sq * sq) / v[i];
        }
        for &b in order {
            if let Some(a) = net.parent(b) {
                let z = net.line(b).unwrap();
                let i = b.index();
                v[i] = v[a.index()] + 2.0 * (z.r * fp[i] + z.x * fq[i]) - z.z_sq() * l[i];
                if !(v[i] > 0.0) {
                    return None;
                }
            }
        }
        let delta = v.iter().zip(&v_old).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if delta < 1e-15 {
            break;
        }
    }
    // final balance at the root with the converged flows
    let (mut sp, mut sq) = (0.0, 0.0);
    for &c in net.children(BusId::ROOT) {
        let z = net.line(c).unwrap();
        sp += fp[c.index()] - z.r * l[c.index()];
        sq += fq[c.index()] - z.x * l[c.index()];
    }
    p[0] = -sp;
    q[0] = -sq;
    let ok = v.iter().all(|x| x.is_finite()) && fp.iter().chain(&fq).chain(&l).all(|x| x.is_finite());
    ok.then(|| OraclePoint {
        v,
        p,
        q,
        flow_p: fp,
        flow_q: fq,
        l,
    })
}

fn feasible(net: &RadialNetwork, pt: &OraclePoint) -> bool {
    net.buses().all(|b| {
        let s = net.spec(b);
        let i = b.index();
        let v_ok = b.is_root() || (pt.v[i] >= s.v_lo && pt.v[i] <= s.v_hi);
        v_ok && (!b.is_root() || s.injection.violation(pt.p[i], pt.q[i]) == 0.0)
    })
}

fn project(region: &InjectionRegion, p: f64, q: f64) -> (f64, f64) {
    match *region {
        InjectionRegion::Box { p_lo, p_hi, q_lo, q_hi } => (p.max(p_lo).min(p_hi), q.max(q_lo).min(q_hi)),
        InjectionRegion::Disk { s_max } => {
            let p = p.max(0.0);
            let r = (p * p + q * q).sqrt();
            if r > s_max {
                (p * s_max / r, q * s_max / r)
            } else {
                (p, q)
            }
        }
    }
}

/// Free scalars: `(p, q)` of every non-root bus, flattened.
struct Ropf<'a> {
    net: &'a RadialNetwork,
    order: Vec<BusId>,
}

impl Ropf<'_> {
    fn point(&self, u: &[f64]) -> Option<OraclePoint> {
        let n = self.net.n_buses();
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for i in 1..n {
            p[i] = u[2 * (i - 1)];
            q[i] = u[2 * (i - 1) + 1];
        }
        sweep(self.net, &self.order, &p, &q).filter(|pt| feasible(self.net, pt))
    }

    fn value(&self, u: &[f64]) -> f64 {
        self.point(u).map_or(f64::INFINITY, |pt| objective(&pt.p, self.net))
    }

    /// Objective extended past the feasible set, for finite differences only.
    fn raw_value(&self, u: &[f64]) -> f64 {
        let n = self.net.n_buses();
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for i in 1..n {
            p[i] = u[2 * (i - 1)];
            q[i] = u[2 * (i - 1) + 1];
        }
        sweep(self.net, &self.order, &p, &q).map_or(f64::INFINITY, |pt| objective(&pt.p, self.net))
    }

    fn project(&self, u: &mut [f64]) {
        for i in 1..self.net.n_buses() {
            let (p, q) = project(&self.net.spec(BusId(i)).injection, u[2 * (i - 1)], u[2 * (i - 1) + 1]);
            u[2 * (i - 1)] = p;
            u[2 * (i - 1) + 1] = q;
        }
    }

    fn ranges(&self) -> Vec<(f64, f64)> {
        (1..self.net.n_buses())
            .flat_map(|i| match self.net.spec(BusId(i)).injection {
                InjectionRegion::Box { p_lo, p_hi, q_lo, q_hi } => [(p_lo, p_hi), (q_lo, q_hi)],
                InjectionRegion::Disk { s_max } => [(0.0, s_max), (-s_max, s_max)],
            })
            .collect()
    }
}

/// Centralized ROPF reference with the relaxation held tight (`ℓ = |S|²/v`).
///
/// Starts from the canonical injections, or from the best point of a coarse
/// grid over the injections when that start violates a voltage or root limit,
/// then runs projected gradient with Armijo backtracking.
pub fn oracle_ropf_small(net: &RadialNetwork, cfg: &OracleConfig) -> Result<(f64, OraclePoint), OracleError> {
    let n = net.n_buses();
    if n > 6 {
        return Err(OracleError::TooLarge(n));
    }
    let pb = Ropf {
        net,
        order: net.top_down_order(),
    };
    let mut u: Vec<f64> = (1..n)
        .flat_map(|i| {
            let (p, q) = net.spec(BusId(i)).injection.canonical_point();
            [p, q]
        })
        .collect();
    if pb.value(&u).is_infinite() {
        u = grid_start(&pb, cfg).ok_or(OracleError::NoFeasiblePoint)?;
    }
    let mut fu = pb.value(&u);
    let dim = u.len();
    let mut t = 1.0;
    for _ in 0..cfg.refine_iters {
        let h = 1e-7;
        let mut g = vec![0.0; dim];
        for i in 0..dim {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[i] += h;
            dn[i] -= h;
            g[i] = (pb.raw_value(&up) - pb.raw_value(&dn)) / (2.0 * h);
        }
        if g.iter().any(|x| !x.is_finite()) {
            break;
        }
        let mut moved = false;
        let mut step = t * 4.0;
        while step > 1e-14 {
            let mut cand: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            pb.project(&mut cand);
            let decrease: f64 = u.iter().zip(&g).zip(&cand).map(|((a, gi), c)| gi * (a - c)).sum();
            let fc = pb.value(&cand);
            if fc.is_finite() && fc <= fu - 1e-4 * decrease {
                let dist = u.iter().zip(&cand).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
                u = cand;
                fu = fc;
                t = step;
                moved = dist > 1e-13;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
        // stationarity of the projected step
        let mut probe: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - b).collect();
        pb.project(&mut probe);
        let pg = u.iter().zip(&probe).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
        if pg < 1e-8 {
            break;
        }
    }
    let pt = pb.point(&u).ok_or(OracleError::NoFeasiblePoint)?;
    Ok((fu, pt))
}

fn grid_start(pb: &Ropf, cfg: &OracleConfig) -> Option<Vec<f64>> {
    let ranges = pb.ranges();
    let dim = ranges.len();
    // at most `resolution^4` evaluations, coarser with more free scalars
    let per_axis = ((cfg.resolution.pow(4) as f64).powf(1.0 / dim as f64).floor() as usize).clamp(2, cfg.resolution);
    let total = per_axis.checked_pow(dim as u32)?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut u = vec![0.0; dim];
    for mut code in 0..total {
        for (i, &(lo, hi)) in ranges.iter().enumerate() {
            u[i] = lo + (hi - lo) * (code % per_axis) as f64 / (per_axis - 1) as f64;
            code /= per_axis;
        }
        let mut w = u.clone();
        pb.project(&mut w);
        let f = pb.value(&w);
        if f.is_finite() && best.as_ref().map_or(true, |(fb, _)| f < *fb) {
            best = Some((f, w));
        }
    }
    best.map(|(_, w)| w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{BusSpec, Line, LineParams};

    #[test]
    fn objective_examples() {
        let net = crate::network::gen_line(2, &crate::network::LoadProfile::default()).unwrap();
        assert_eq!(objective(&[0.0, 0.0], &net), 0.0);
        assert!((objective(&[0.1, -0.2], &net) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn quadratic_objective_example() {
        let spec = BusSpec {
            injection: InjectionRegion::Disk { s_max: 1.0 },
            v_lo: 1.0,
            v_hi: 1.0,
            alpha: 2.0,
            beta: 0.0,
        };
        let leaf = BusSpec {
            alpha: 0.0,
            v_lo: 0.5,
            v_hi: 1.5,
            ..spec.clone()
        };
        let net = RadialNetwork::new(
            vec![spec, leaf],
            vec![Line {
                from: BusId(1),
                to: BusId(0),
                params: LineParams { r: 0.1, x: 0.1 },
            }],
        )
        .unwrap();
        assert!((objective(&[0.5, 0.0], &net) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cone_box_zero_coefficients() {
        let q = ConeBoxQp::new([0.0; 4], 1.0, 0.5, 2.0).unwrap();
        let (z, f) = oracle_cone_box(&q, &OracleConfig::default()).unwrap();
        assert!((z[2] - 0.5).abs() < 1e-9 && f - 0.25 < 1e-9);
    }

    #[test]
    fn cone_box_inactive_matches_clamped() {
        let q = ConeBoxQp::new([-0.2, 0.2, -2.0, -4.0], 1.0, 0.1, 3.0).unwrap();
        let (z, _) = oracle_cone_box(&q, &OracleConfig::default()).unwrap();
        let want = [0.1, -0.1, 1.0, 2.0];
        for i in 0..4 {
            assert!((z[i] - want[i]).abs() < 1e-6, "{z:?}");
        }
    }

    #[test]
    fn disk_examples() {
        let cfg = OracleConfig::default();
        let (p, q, _) = oracle_disk(&DiskQp::new(2.0, 2.0, 1.0, -1.0, 10.0).unwrap(), &cfg);
        assert!(p.abs() < 1e-6 && (q - 0.5).abs() < 1e-6);
        let (p, q, _) = oracle_disk(&DiskQp::new(2.0, 2.0, -1.0, -1.0, 10.0).unwrap(), &cfg);
        assert!((p - 0.5).abs() < 1e-6 && (q - 0.5).abs() < 1e-6);
        let (p, q, _) = oracle_disk(&DiskQp::new(2.0, 2.0, -1000.0, 0.0, 1.0).unwrap(), &cfg);
        assert!((p - 1.0).abs() < 1e-6 && q.abs() < 1e-6);
    }

    #[test]
    fn eq_qp_example() {
        let q = EqQp::scaled_identity(1.0, 1, vec![1.0, -1.0], vec![1.0, 0.0]).unwrap();
        let (x, _) = oracle_eq_qp(&q).unwrap();
        assert!((x[0] + 0.5).abs() < 1e-14 && (x[1] + 0.5).abs() < 1e-14);
    }

    fn bus(injection: InjectionRegion, v_lo: f64, v_hi: f64) -> BusSpec {
        BusSpec {
            injection,
            v_lo,
            v_hi,
            alpha: 0.0,
            beta: 1.0,
        }
    }

    fn root() -> BusSpec {
        bus(
            InjectionRegion::Box {
                p_lo: -10.0,
                p_hi: 10.0,
                q_lo: -10.0,
                q_hi: 10.0,
            },
            1.0,
            1.0,
        )
    }

    #[test]
    fn zero_load_loss_minimization_is_zero() {
        let net = RadialNetwork::new(
            vec![root(), bus(InjectionRegion::Disk { s_max: 0.5 }, 0.81, 1.21)],
            vec![Line {
                from: BusId(1),
                to: BusId(0),
                params: LineParams { r: 0.05, x: 0.05 },
            }],
        )
        .unwrap();
        let (f, _) = oracle_ropf_small(&net, &OracleConfig::default()).unwrap();
        assert!(f.abs() < 1e-12);
    }

    #[test]
    fn two_bus_load_is_tight_and_consistent() {
        let net = RadialNetwork::new(
            vec![
                root(),
                bus(
                    InjectionRegion::Box {
                        p_lo: -0.5,
                        p_hi: -0.4,
                        q_lo: -0.2,
                        q_hi: -0.1,
                    },
                    0.81,
                    1.21,
                ),
            ],
            vec![Line {
                from: BusId(1),
                to: BusId(0),
                params: LineParams { r: 0.05, x: 0.05 },
            }],
        )
        .unwrap();
        let (f, pt) = oracle_ropf_small(&net, &OracleConfig::default()).unwrap();
        // least load, least loss
        assert!((pt.p[1] + 0.4).abs() < 1e-9 && (pt.q[1] + 0.1).abs() < 1e-9, "{pt:?}");
        let gap = pt.v[1] * pt.l[1] - (pt.flow_p[1].powi(2) + pt.flow_q[1].powi(2));
        assert!(gap.abs() < 1e-12);
        assert!((f - 0.05 * pt.l[1]).abs() < 1e-12);
    }
}
