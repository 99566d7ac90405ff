//! Randomized kernel-vs-oracle comparison and kernel latency measurement.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::KernelError;
use crate::kernels::{self, ConeBoxQp, ConeBoxSolution, DiskQp, DiskSolution, EqQp, EqQpSolution};
use crate::oracle::{self, OracleConfig};

pub const CONE_GAP_TOL: f64 = 1e-6;
pub const CONE_FEAS_TOL: f64 = 1e-8;
pub const DISK_GAP_TOL: f64 = 1e-6;
pub const DISK_FEAS_TOL: f64 = 1e-9;
pub const EQ_GAP_TOL: f64 = 1e-9;
pub const EQ_FEAS_TOL: f64 = 1e-9;

/// The kernels under test. Swappable so the checker itself can be tested.
#[derive(Clone, Copy)]
pub struct KernelSet {
    pub eq_qp: fn(&EqQp) -> Result<EqQpSolution, KernelError>,
    pub cone_box: fn(&ConeBoxQp) -> Result<ConeBoxSolution, KernelError>,
    pub disk: fn(&DiskQp) -> Result<DiskSolution, KernelError>,
}

impl Default for KernelSet {
    fn default() -> Self {
        KernelSet {
            eq_qp: kernels::solve_eq_qp,
            cone_box: kernels::solve_cone_box_qp,
            disk: kernels::solve_disk_qp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    EqQp,
    ConeBox,
    Disk,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::EqQp, Family::ConeBox, Family::Disk];

    pub fn name(self) -> &'static str {
        match self {
            Family::EqQp => "eq_qp",
            Family::ConeBox => "cone_box",
            Family::Disk => "disk",
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

fn rng_for(seed: u64, family: Family) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(family.stream());
    rng
}

// ---------------------------------------------------------------------------
// Instance generators
// ---------------------------------------------------------------------------

/// Dimension ≤ 20, rows ≤ 10.
pub fn random_eq_qp(rng: &mut impl Rng) -> EqQp {
    let n = rng.gen_range(1..=20);
    let m = rng.gen_range(0..=n.min(10));
    random_eq_qp_sized(rng, n, m)
}

pub fn random_eq_qp_sized(rng: &mut impl Rng, n: usize, m: usize) -> EqQp {
    let a = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
    let b = (0..n * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    EqQp::new(a, m, b, c).expect("generated EqQp is valid")
}

/// Sized like the x-update of a bus with `children` children.
pub fn random_x_update_qp(rng: &mut impl Rng, children: usize) -> EqQp {
    let n = 7 + 3 * children;
    let mut b = vec![0.0; 3 * n];
    let (r, x) = (rng.gen_range(0.001..0.1), rng.gen_range(0.001..0.1));
    b[6] = 1.0;
    b[0] = -1.0;
    b[2] = 2.0 * r;
    b[3] = 2.0 * x;
    b[1] = -(r * r + x * x);
    b[n + 2] = -1.0;
    b[n + 4] = 1.0;
    b[2 * n + 3] = -1.0;
    b[2 * n + 5] = 1.0;
    for k in 0..children {
        let j = 7 + 3 * k;
        b[n + j] = -rng.gen_range(0.001..0.1);
        b[n + j + 1] = 1.0;
        b[2 * n + j] = -rng.gen_range(0.001..0.1);
        b[2 * n + j + 2] = 1.0;
    }
    let c = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    EqQp::scaled_identity(rng.gen_range(0.1..10.0), 3, b, c).expect("generated EqQp is valid")
}

/// `cᵢ ∈ [−5, 5]`, `k ∈ [0.3, 2]`, bounds in `(0, 3]`; one in twenty boxes is degenerate.
pub fn random_cone_box(rng: &mut impl Rng) -> ConeBoxQp {
    let c = [(); 4].map(|_| rng.gen_range(-5.0..5.0));
    let k = rng.gen_range(0.3..2.0);
    let a: f64 = rng.gen_range(0.01..=3.0);
    let (lo, hi) = if rng.gen_bool(0.05) {
        (a, a)
    } else {
        let b: f64 = rng.gen_range(0.01..=3.0);
        (a.min(b), a.max(b))
    };
    ConeBoxQp::new(c, k, lo, hi).expect("generated ConeBoxQp is valid")
}

pub fn random_disk(rng: &mut impl Rng) -> DiskQp {
    DiskQp::new(
        rng.gen_range(0.1..5.0),
        rng.gen_range(0.1..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(0.05..3.0),
    )
    .expect("generated DiskQp is valid")
}

// ---------------------------------------------------------------------------
// Check
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub family: Family,
    pub count: usize,
    /// Largest `kernel objective − oracle objective`.
    pub max_gap: f64,
    pub max_violation: f64,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub index: usize,
    /// Debug rendering of the instance, for reproduction.
    pub instance: String,
    pub reason: String,
}

impl FamilyReport {
    fn new(family: Family, count: usize) -> Self {
        FamilyReport {
            family,
            count,
            max_gap: f64::NEG_INFINITY,
            max_violation: 0.0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, index: usize, instance: String, outcome: Result<(f64, f64), String>, gap_tol: f64, feas_tol: f64) {
        match outcome {
            Ok((gap, viol)) => {
                self.max_gap = self.max_gap.max(gap);
                self.max_violation = self.max_violation.max(viol);
                if !(gap <= gap_tol && viol <= feas_tol) {
                    self.failures.push(Failure {
                        index,
                        instance,
                        reason: format!("gap {gap:e}, violation {viol:e}"),
                    });
                }
            }
            Err(reason) => self.failures.push(Failure { index, instance, reason }),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub families: Vec<FamilyReport>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(FamilyReport::passed)
    }
}

fn check_eq(kernel: fn(&EqQp) -> Result<EqQpSolution, KernelError>, q: &EqQp) -> Result<(f64, f64), String> {
    let sol = kernel(q).map_err(|e| e.to_string())?;
    let (xo, fo) = oracle::oracle_eq_qp(q).map_err(|e| e.to_string())?;
    let scale = q.c().iter().chain(&xo).fold(1.0f64, |m, v| m.max(v.abs()));
    let (stat, feas) = q.kkt_residuals(&sol.x, &sol.nu);
    let gap = (q.objective(&sol.x) - fo) / scale.max(fo.abs());
    Ok((gap, feas.max(stat / scale)))
}

fn check_cone(kernel: fn(&ConeBoxQp) -> Result<ConeBoxSolution, KernelError>, q: &ConeBoxQp, cfg: &OracleConfig) -> Result<(f64, f64), String> {
    let sol = kernel(q).map_err(|e| e.to_string())?;
    let (_, fo) = oracle::oracle_cone_box(q, cfg).map_err(|e| e.to_string())?;
    let z = sol.z;
    let box_viol = (q.z3_lo - z[2]).max(z[2] - q.z3_hi).max(0.0);
    if box_viol > 0.0 {
        return Err(format!("z3 = {} outside [{}, {}]", z[2], q.z3_lo, q.z3_hi));
    }
    Ok((q.objective(&z) - fo, q.cone_violation(&z)))
}

fn check_disk(kernel: fn(&DiskQp) -> Result<DiskSolution, KernelError>, d: &DiskQp, cfg: &OracleConfig) -> Result<(f64, f64), String> {
    let sol = kernel(d).map_err(|e| e.to_string())?;
    let (_, _, fo) = oracle::oracle_disk(d, cfg);
    Ok((d.objective(sol.p, sol.q) - fo, d.violation(sol.p, sol.q)))
}

/// Compares each kernel family against its oracle on `count` seeded instances.
pub fn kernel_check(kernels: &KernelSet, count: usize, seed: u64) -> CheckReport {
    let cfg = OracleConfig::default();
    let families = Family::ALL
        .iter()
        .map(|&family| {
            let mut rng = rng_for(seed, family);
            let mut rep = FamilyReport::new(family, count);
            for i in 0..count {
                match family {
                    Family::EqQp => {
                        let q = random_eq_qp(&mut rng);
                        rep.record(i, format!("{q:?}"), check_eq(kernels.eq_qp, &q), EQ_GAP_TOL, EQ_FEAS_TOL);
                    }
                    Family::ConeBox => {
                        let q = random_cone_box(&mut rng);
                        rep.record(i, format!("{q:?}"), check_cone(kernels.cone_box, &q, &cfg), CONE_GAP_TOL, CONE_FEAS_TOL);
                    }
                    Family::Disk => {
                        let d = random_disk(&mut rng);
                        rep.record(i, format!("{d:?}"), check_disk(kernels.disk, &d, &cfg), DISK_GAP_TOL, DISK_FEAS_TOL);
                    }
                }
            }
            if count == 0 {
                rep.max_gap = 0.0;
            }
            rep
        })
        .collect();
    CheckReport { families }
}

// ---------------------------------------------------------------------------
// Bench
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct BenchStats {
    pub kernel: &'static str,
    pub samples: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub p99_us: f64,
}

fn stats(kernel: &'static str, mut t: Vec<f64>) -> BenchStats {
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = t.len();
    let pick = |q: f64| if n == 0 { 0.0 } else { t[((q * (n - 1) as f64).round() as usize).min(n - 1)] };
    BenchStats {
        kernel,
        samples: n,
        mean_us: if n == 0 { 0.0 } else { t.iter().sum::<f64>() / n as f64 },
        median_us: pick(0.5),
        p99_us: pick(0.99),
    }
}

fn time_us<T>(f: impl FnOnce() -> T) -> f64 {
    let start = Instant::now();
    std::hint::black_box(f());
    start.elapsed().as_secs_f64() * 1e6
}

/// Per-call wall time of each kernel over `count` seeded instances.
/// The equality QPs are x-update shaped with 0 to 10 children.
pub fn bench(count: usize, seed: u64) -> Vec<BenchStats> {
    let mut rng = rng_for(seed, Family::EqQp);
    let eq: Vec<EqQp> = (0..count).map(|i| random_x_update_qp(&mut rng, i % 11)).collect();
    let mut rng = rng_for(seed, Family::ConeBox);
    let cone: Vec<ConeBoxQp> = (0..count).map(|_| random_cone_box(&mut rng)).collect();
    let mut rng = rng_for(seed, Family::Disk);
    let disk: Vec<DiskQp> = (0..count).map(|_| random_disk(&mut rng)).collect();
    vec![
        stats("solve_eq_qp", eq.iter().map(|q| time_us(|| kernels::solve_eq_qp(q))).collect()),
        stats("solve_cone_box_qp", cone.iter().map(|q| time_us(|| kernels::solve_cone_box_qp(q))).collect()),
        stats("solve_disk_qp", disk.iter().map(|d| time_us(|| kernels::solve_disk_qp(d))).collect()),
    ]
}
