//! Synchronous round scheduler.
//!
//! One round is: pre-x exchange, x-updates, pre-z exchange, z-updates,
//! post-z exchange, multiplier updates. Agents run in parallel within a phase;
//! message routing and residual aggregation are sequential in bus order, so the
//! trace does not depend on the worker count.

use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{self, AgentState, Message, MultInbound, XInbound, ZInbound};
use crate::error::SolveError;
use crate::network::{BusId, RadialNetwork};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub rho: f64,
    pub tol_scale: f64,
    pub max_iters: u64,
    pub parallelism: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            rho: 1.0,
            tol_scale: 1e-4,
            max_iters: 100_000,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(SolveError::Config(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(SolveError::Config(format!("tol_scale must be positive, got {}", self.tol_scale)));
        }
        if self.max_iters == 0 {
            return Err(SolveError::Config("max_iters must be at least 1".into()));
        }
        if self.parallelism == 0 {
            return Err(SolveError::Config("parallelism must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIters,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: u64,
    pub r: f64,
    pub s: f64,
    pub objective: f64,
}

impl TraceRow {
    pub const CSV_HEADER: &'static str = "iter,r,s,objective";

    pub fn csv_line(&self) -> String {
        format!("{},{},{},{}", self.iter, self.r, self.s, self.objective)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    pub status: Status,
}

impl Trace {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.rows.len() + 1));
        out.push_str(TraceRow::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.csv_line());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusSolution {
    pub id: BusId,
    pub v: f64,
    pub p: f64,
    pub q: f64,
}

/// Line from `from` to its parent `to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSolution {
    pub from: BusId,
    pub to: BusId,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: Status,
    pub iterations: u64,
    pub r: f64,
    pub s: f64,
    pub objective: f64,
    pub buses: Vec<BusSolution>,
    pub lines: Vec<LineSolution>,
}

impl Solution {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }
}

pub struct Engine {
    net: RadialNetwork,
    agents: Vec<AgentState>,
    iter: u64,
    config: SolveConfig,
    pool: rayon::ThreadPool,
    inbox: Vec<Vec<Message>>,
}

fn deliver(net: &RadialNetwork, outs: Vec<Vec<Message>>, inbox: &mut [Vec<Message>]) {
    for b in inbox.iter_mut() {
        b.clear();
    }
    // senders in ascending bus order, so each inbox is in a fixed order
    for m in outs.into_iter().flatten() {
        debug_assert!(m.to.index() < net.n_buses());
        inbox[m.to.index()].push(m);
    }
}

impl Engine {
    pub fn new(net: RadialNetwork, config: SolveConfig) -> Result<Self, SolveError> {
        config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism)
            .build()
            .map_err(|e| SolveError::Config(e.to_string()))?;
        let agents = agent::init_states(&net);
        let inbox = vec![Vec::new(); net.n_buses()];
        Ok(Engine {
            net,
            agents,
            iter: 0,
            config,
            pool,
            inbox,
        })
    }

    pub fn net(&self) -> &RadialNetwork {
        &self.net
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn iter(&self) -> u64 {
        self.iter
    }

    pub fn config(&self) -> &SolveConfig {
        &self.config
    }

    /// Objective on the z-side injections.
    pub fn objective(&self) -> f64 {
        self.agents
            .iter()
            .map(|a| self.net.spec(a.bus).cost(a.z.inj.re))
            .sum()
    }

    /// One full iteration; returns the global `(r, s)`.
    pub fn round(&mut self) -> Result<(f64, f64), SolveError> {
        let iter = self.iter + 1;
        let rho = self.config.rho;
        let Engine {
            net,
            agents,
            pool,
            inbox,
            ..
        } = self;
        let net = &*net;

        pool.install(|| -> Result<(f64, f64), SolveError> {
            let outs: Vec<Vec<Message>> = agents
                .par_iter()
                .map(|a| {
                    let mut out = Vec::new();
                    a.pre_x_messages(net, iter, &mut out);
                    out
                })
                .collect();
            deliver(net, outs, inbox);
            agents
                .par_iter_mut()
                .zip(inbox.par_iter())
                .try_for_each(|(a, msgs)| -> Result<(), SolveError> {
                    let xin = XInbound::collect(net, a.bus, iter, msgs)?;
                    a.x = agent::x_update(a, net, rho, &xin)?;
                    Ok(())
                })?;

            let outs: Vec<Vec<Message>> = agents
                .par_iter()
                .map(|a| {
                    let mut out = Vec::new();
                    a.pre_z_messages(net, iter, &mut out);
                    out
                })
                .collect();
            deliver(net, outs, inbox);
            let zins: Vec<ZInbound> = agents
                .par_iter_mut()
                .zip(inbox.par_iter())
                .map(|(a, msgs)| -> Result<ZInbound, SolveError> {
                    let zin = ZInbound::collect(net, a.bus, iter, msgs)?;
                    let z = agent::z_update(a, net, rho, &zin)?;
                    a.z_prev = a.z;
                    a.z = z;
                    Ok(zin)
                })
                .collect::<Result<_, _>>()?;

            let outs: Vec<Vec<Message>> = agents
                .par_iter()
                .map(|a| {
                    let mut out = Vec::new();
                    a.post_z_messages(net, iter, &mut out);
                    out
                })
                .collect();
            deliver(net, outs, inbox);
            let contribs: Vec<(f64, f64)> = agents
                .par_iter_mut()
                .zip(inbox.par_iter())
                .zip(zins.par_iter())
                .map(|((a, msgs), zin)| -> Result<(f64, f64), SolveError> {
                    let min = MultInbound::collect(net, a.bus, iter, zin, msgs)?;
                    let c = agent::local_residual_contrib(a, &min)?;
                    a.mult = agent::multiplier_update(a, rho, &min)?;
                    Ok(c)
                })
                .collect::<Result<_, _>>()?;

            let (mut r_sq, mut s_sq) = (0.0, 0.0);
            for (r, s) in contribs {
                r_sq += r;
                s_sq += s;
            }
            Ok((r_sq.sqrt(), rho * s_sq.sqrt()))
        })
        .inspect(|_| self.iter = iter)
    }

    pub fn solution(&self, status: Status, r: f64, s: f64) -> Solution {
        let net = &self.net;
        Solution {
            status,
            iterations: self.iter,
            r,
            s,
            objective: self.objective(),
            buses: self
                .agents
                .iter()
                .map(|a| BusSolution {
                    id: a.bus,
                    v: a.z.v,
                    p: a.z.inj.re,
                    q: a.z.inj.im,
                })
                .collect(),
            lines: self
                .agents
                .iter()
                .filter_map(|a| {
                    net.parent(a.bus).map(|to| LineSolution {
                        from: a.bus,
                        to,
                        p: a.z.flow.re,
                        q: a.z.flow.im,
                        l: a.z.l,
                    })
                })
                .collect(),
        }
    }
}

/// Runs to convergence or the iteration cap, calling `on_row` after every round.
pub fn run_with<F>(net: RadialNetwork, config: SolveConfig, mut on_row: F) -> Result<(Solution, Trace), SolveError>
where
    F: FnMut(&TraceRow) -> io::Result<()>,
{
    let tol = config.tol_scale * (net.n_buses() as f64).sqrt();
    let max_iters = config.max_iters;
    let mut engine = Engine::new(net, config)?;
    let mut rows = Vec::new();
    let mut status = Status::MaxIters;
    let (mut r, mut s) = (f64::NAN, f64::NAN);
    while engine.iter() < max_iters {
        (r, s) = engine.round()?;
        let row = TraceRow {
            iter: engine.iter(),
            r,
            s,
            objective: engine.objective(),
        };
        on_row(&row).map_err(|e| SolveError::Config(format!("trace output: {e}")))?;
        rows.push(row);
        if r <= tol && s <= tol {
            status = Status::Converged;
            break;
        }
    }
    Ok((engine.solution(status, r, s), Trace { rows, status }))
}

pub fn run(net: RadialNetwork, config: SolveConfig) -> Result<(Solution, Trace), SolveError> {
    run_with(net, config, |_| Ok(()))
}

/// Per-line `v ℓ − |S|²`, in line order of `sol.lines`.
pub fn exactness_gap(sol: &Solution, net: &RadialNetwork) -> Vec<f64> {
    let _ = net;
    sol.lines
        .iter()
        .map(|ln| sol.buses[ln.from.index()].v * ln.l - (ln.p * ln.p + ln.q * ln.q))
        .collect()
}

/// Largest violation of the voltage-drop and power-balance equations.
pub fn flow_residual(sol: &Solution, net: &RadialNetwork) -> f64 {
    let n = net.n_buses();
    let mut flow = vec![(0.0, 0.0, 0.0); n];
    for ln in &sol.lines {
        flow[ln.from.index()] = (ln.p, ln.q, ln.l);
    }
    let mut worst: f64 = 0.0;
    for b in net.buses() {
        let i = b.index();
        let (p, q, l) = flow[i];
        if let (Some(parent), Some(z)) = (net.parent(b), net.line(b)) {
            let drop = sol.buses[parent.index()].v - sol.buses[i].v + 2.0 * (z.r * p + z.x * q) - z.z_sq() * l;
            worst = worst.max(drop.abs());
        }
        let (mut bp, mut bq) = (sol.buses[i].p - p, sol.buses[i].q - q);
        for &c in net.children(b) {
            let (cp, cq, cl) = flow[c.index()];
            let zc = net.line(c).expect("child has a line");
            bp += cp - zc.r * cl;
            bq += cq - zc.x * cl;
        }
        worst = worst.max(bp.abs()).max(bq.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{gen_fat_tree, gen_line, BusSpec, InjectionRegion, Line, LineParams, LoadProfile};

    fn cfg(parallelism: usize) -> SolveConfig {
        SolveConfig {
            parallelism,
            ..SolveConfig::default()
        }
    }

    #[test]
    fn config_rejects_bad_values() {
        let bad = [
            SolveConfig { rho: 0.0, ..cfg(1) },
            SolveConfig { tol_scale: -1.0, ..cfg(1) },
            SolveConfig { max_iters: 0, ..cfg(1) },
            SolveConfig { parallelism: 0, ..cfg(1) },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(SolveError::Config(_))));
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let t = Trace {
            rows: vec![TraceRow {
                iter: 1,
                r: 0.5,
                s: 0.25,
                objective: -1.0,
            }],
            status: Status::MaxIters,
        };
        assert_eq!(t.to_csv(), "iter,r,s,objective\n1,0.5,0.25,-1\n");
    }

    #[test]
    fn max_iters_one_gives_one_row() {
        let net = gen_line(5, &LoadProfile::default()).unwrap();
        let (sol, trace) = run(net, SolveConfig { max_iters: 1, ..cfg(1) }).unwrap();
        assert_eq!(trace.rows.len(), 1);
        assert_eq!(trace.status, Status::MaxIters);
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn parallelism_does_not_change_trace() {
        let net = gen_fat_tree(12, &LoadProfile::default()).unwrap();
        let c = SolveConfig { max_iters: 300, ..cfg(1) };
        let (_, t1) = run(net.clone(), c.clone()).unwrap();
        let (_, t4) = run(net, SolveConfig { parallelism: 4, ..c }).unwrap();
        assert_eq!(t1.to_csv(), t4.to_csv());
    }

    #[test]
    fn zero_load_network_stays_at_zero_flow() {
        let spec = |inj| BusSpec {
            injection: inj,
            v_lo: 0.9,
            v_hi: 1.1,
            // strictly convex cost, so zero injection is the unique optimum
            alpha: 1.0,
            beta: 1.0,
        };
        let root = BusSpec {
            v_lo: 1.0,
            v_hi: 1.0,
            ..spec(InjectionRegion::Box {
                p_lo: -1.0,
                p_hi: 1.0,
                q_lo: -1.0,
                q_hi: 1.0,
            })
        };
        let net = RadialNetwork::new(
            vec![root, spec(InjectionRegion::Disk { s_max: 0.5 }), spec(InjectionRegion::Disk { s_max: 0.5 })],
            vec![
                Line {
                    from: BusId(1),
                    to: BusId(0),
                    params: LineParams { r: 0.01, x: 0.01 },
                },
                Line {
                    from: BusId(2),
                    to: BusId(1),
                    params: LineParams { r: 0.01, x: 0.01 },
                },
            ],
        )
        .unwrap();
        let (sol, trace) = run(net.clone(), cfg(1)).unwrap();
        assert_eq!(trace.status, Status::Converged);
        for ln in &sol.lines {
            assert!(ln.p.abs() < 1e-3 && ln.q.abs() < 1e-3 && ln.l.abs() < 1e-3, "{ln:?}");
        }
        assert!(sol.objective.abs() < 1e-3);
        assert!(flow_residual(&sol, &net) < 1e-2);
    }

    #[test]
    fn flow_residual_zero_on_exact_point() {
        let net = gen_line(2, &LoadProfile::default()).unwrap();
        let z = net.line(BusId(1)).unwrap();
        let (p, q, l) = (-0.1, -0.05, 0.0125);
        let v1 = 1.0 + 2.0 * (z.r * p + z.x * q) - z.z_sq() * l;
        let sol = Solution {
            status: Status::Converged,
            iterations: 0,
            r: 0.0,
            s: 0.0,
            objective: 0.0,
            buses: vec![
                BusSolution {
                    id: BusId(0),
                    v: 1.0,
                    p: z.r * l - p,
                    q: z.x * l - q,
                },
                BusSolution { id: BusId(1), v: v1, p, q },
            ],
            lines: vec![LineSolution {
                from: BusId(1),
                to: BusId(0),
                p,
                q,
                l,
            }],
        };
        assert!(flow_residual(&sol, &net) < 1e-15);
        assert!(exactness_gap(&sol, &net)[0].abs() < 1e-3);
    }

    #[test]
    fn init_point_has_flow_residual_from_impedance() {
        let net = gen_line(6, &LoadProfile::default()).unwrap();
        let engine = Engine::new(net.clone(), cfg(1)).unwrap();
        let sol = engine.solution(Status::MaxIters, 0.0, 0.0);
        assert!(flow_residual(&sol, &net) > 0.0);
    }

    #[test]
    fn solution_json_round_trip() {
        let net = gen_line(3, &LoadProfile::default()).unwrap();
        let (sol, _) = run(net, SolveConfig { max_iters: 5, ..cfg(1) }).unwrap();
        let back: Solution = serde_json::from_str(&sol.to_json()).unwrap();
        assert_eq!(back, sol);
    }
}
