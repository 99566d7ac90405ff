//! Per-bus ADMM agent.
//!
//! Consensus pairs owned by bus `i` (x-side = z-side):
//!
//! | multiplier   | x-side                          | z-side              |
//! |--------------|---------------------------------|---------------------|
//! | `lam_flow`   | `S_i^(x)`                       | `S_i^(z)`           |
//! | `lam_l`      | `ℓ_i^(x)`                       | `ℓ_i^(z)`           |
//! | `lam_v`      | `v_i^(x)`                       | `v_i^(z)`           |
//! | `lam_inj`    | `s_i^(x)`                       | `s_i^(z)`           |
//! | `mu_flow`    | parent's copy of `S_i`          | `S_i^(z)`           |
//! | `mu_l`       | parent's copy of `ℓ_i`          | `ℓ_i^(z)`           |
//! | `gamma`      | this bus's copy of `v_{A_i}`    | `v_{A_i}^(z)`       |
//!
//! The root owns no line, so it has no flow/current variables and no parent pairs.

use num_complex::Complex64;

use crate::error::{KernelError, SolveError};
use crate::kernels::{self, BoxQp, ConeBoxQp, DiskQp, EqQp};
use crate::network::{BusId, InjectionRegion, RadialNetwork};

/// A child's current and branch flow as copied at its parent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChildCopy {
    pub bus: BusId,
    pub l: f64,
    pub flow: Complex64,
}

/// Variables updated in the x-phase.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalX {
    pub v: f64,
    pub l: f64,
    /// Branch power `S = P + iQ` towards the parent.
    pub flow: Complex64,
    /// Net injection `s = p + iq`.
    pub inj: Complex64,
    /// Copy of the parent's squared voltage; `None` at the root.
    pub v_parent: Option<f64>,
    /// One entry per child, in the network's canonical child order.
    pub children: Vec<ChildCopy>,
}

/// Variables updated in the z-phase.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalZ {
    pub v: f64,
    pub l: f64,
    pub flow: Complex64,
    pub inj: Complex64,
}

impl LocalZ {
    fn dist_sq(&self, other: &LocalZ) -> f64 {
        (self.v - other.v).powi(2)
            + (self.l - other.l).powi(2)
            + (self.flow - other.flow).norm_sqr()
            + (self.inj - other.inj).norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Multipliers {
    pub lam_flow: Complex64,
    pub lam_l: f64,
    pub lam_v: f64,
    pub lam_inj: Complex64,
    pub mu_flow: Complex64,
    pub mu_l: f64,
    pub gamma: f64,
}

impl Multipliers {
    pub fn is_finite(&self) -> bool {
        [
            self.lam_flow.re,
            self.lam_flow.im,
            self.lam_l,
            self.lam_v,
            self.lam_inj.re,
            self.lam_inj.im,
            self.mu_flow.re,
            self.mu_flow.im,
            self.mu_l,
            self.gamma,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub bus: BusId,
    pub x: LocalX,
    pub z: LocalZ,
    pub z_prev: LocalZ,
    pub mult: Multipliers,
}

/// Proximal centers of the completed-square z-objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatTargets {
    pub flow: Complex64,
    pub l: f64,
    pub v: f64,
    pub inj: Complex64,
}

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payload {
    /// Before the x-update: the parent's voltage.
    ParentToChildPreX { v_z: f64 },
    /// Before the x-update: the child's z-variables and its parent-edge flow multipliers.
    ChildToParentPreX { z: LocalZ, mu_flow: Complex64, mu_l: f64 },
    /// Before the z-update: the parent's copy of the child's current and flow.
    ParentToChildPreZ { l: f64, flow: Complex64 },
    /// Before the z-update: the child's copy of the parent voltage and its multiplier.
    ChildToParentPreZ { v_parent: f64, gamma: f64 },
    /// Before the multiplier update: the parent's freshly updated voltage.
    ParentToChildPostZ { v_z: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub from: BusId,
    pub to: BusId,
    pub iter: u64,
    pub payload: Payload,
}

/// Child-side data needed by the parent's x-update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChildPreX {
    pub l: f64,
    pub flow: Complex64,
    pub mu_flow: Complex64,
    pub mu_l: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct XInbound {
    pub parent_v_z: Option<f64>,
    pub children: Vec<ChildPreX>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZInbound {
    /// Parent's copy `(ℓ, S)` of this bus.
    pub parent_copy: Option<(f64, Complex64)>,
    /// Per child: `(copy of this bus's voltage, gamma)`.
    pub children: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MultInbound {
    pub parent_copy: Option<(f64, Complex64)>,
    pub parent_v_z: Option<f64>,
}

fn missing(bus: BusId, what: &'static str) -> SolveError {
    SolveError::MissingMessage { bus, what }
}

fn child_slot(net: &RadialNetwork, bus: BusId, from: BusId) -> Option<usize> {
    net.children(bus).binary_search(&from).ok()
}

fn check_envelope(net: &RadialNetwork, bus: BusId, iter: u64, m: &Message) -> Result<(), SolveError> {
    let neighbor = net.parent(bus) == Some(m.from) || net.parent(m.from) == Some(bus);
    if m.to != bus || m.iter != iter || !neighbor {
        return Err(missing(bus, "message with a mismatched envelope"));
    }
    Ok(())
}

impl XInbound {
    pub fn collect(net: &RadialNetwork, bus: BusId, iter: u64, msgs: &[Message]) -> Result<Self, SolveError> {
        let mut children = vec![None; net.children(bus).len()];
        let mut parent_v_z = None;
        for m in msgs {
            check_envelope(net, bus, iter, m)?;
            match m.payload {
                Payload::ParentToChildPreX { v_z } if net.parent(bus) == Some(m.from) => {
                    parent_v_z = Some(v_z)
                }
                Payload::ChildToParentPreX { z, mu_flow, mu_l } => {
                    let slot = child_slot(net, bus, m.from).ok_or(missing(bus, "child pre-x"))?;
                    children[slot] = Some(ChildPreX {
                        l: z.l,
                        flow: z.flow,
                        mu_flow,
                        mu_l,
                    });
                }
                _ => return Err(missing(bus, "pre-x payload")),
            }
        }
        if net.parent(bus).is_some() && parent_v_z.is_none() {
            return Err(missing(bus, "parent pre-x"));
        }
        Ok(XInbound {
            parent_v_z,
            children: children
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or(missing(bus, "child pre-x"))?,
        })
    }
}

impl ZInbound {
    pub fn collect(net: &RadialNetwork, bus: BusId, iter: u64, msgs: &[Message]) -> Result<Self, SolveError> {
        let mut children = vec![None; net.children(bus).len()];
        let mut parent_copy = None;
        for m in msgs {
            check_envelope(net, bus, iter, m)?;
            match m.payload {
                Payload::ParentToChildPreZ { l, flow } if net.parent(bus) == Some(m.from) => {
                    parent_copy = Some((l, flow))
                }
                Payload::ChildToParentPreZ { v_parent, gamma } => {
                    let slot = child_slot(net, bus, m.from).ok_or(missing(bus, "child pre-z"))?;
                    children[slot] = Some((v_parent, gamma));
                }
                _ => return Err(missing(bus, "pre-z payload")),
            }
        }
        if net.parent(bus).is_some() && parent_copy.is_none() {
            return Err(missing(bus, "parent pre-z"));
        }
        Ok(ZInbound {
            parent_copy,
            children: children
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or(missing(bus, "child pre-z"))?,
        })
    }
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

/// Zero-impedance branch-flow point: unit voltages, canonical injections,
/// subtree-aggregated flows and `ℓ = |S|²/v`. x-copies equal the z-values and
/// all multipliers are zero.
pub fn init_states(net: &RadialNetwork) -> Vec<AgentState> {
    let n = net.n_buses();
    let inj: Vec<Complex64> = net
        .buses()
        .map(|b| {
            let (p, q) = net.spec(b).injection.canonical_point();
            Complex64::new(p, q)
        })
        .collect();
    let v: Vec<f64> = net
        .buses()
        .map(|b| if b.is_root() { net.spec(b).v_lo } else { 1.0 })
        .collect();
    let mut flow = inj.clone();
    for &b in net.top_down_order().iter().rev() {
        if let Some(p) = net.parent(b) {
            if !p.is_root() {
                let f = flow[b.0];
                flow[p.0] += f;
            }
        }
    }
    flow[0] = Complex64::new(0.0, 0.0);
    let z: Vec<LocalZ> = (0..n)
        .map(|i| {
            let (fl, l) = if i == 0 {
                (Complex64::new(0.0, 0.0), 0.0)
            } else {
                (flow[i], flow[i].norm_sqr() / v[i])
            };
            LocalZ {
                v: v[i],
                l,
                flow: fl,
                inj: inj[i],
            }
        })
        .collect();
    net.buses()
        .map(|b| {
            let zi = z[b.0];
            AgentState {
                bus: b,
                x: LocalX {
                    v: zi.v,
                    l: zi.l,
                    flow: zi.flow,
                    inj: zi.inj,
                    v_parent: net.parent(b).map(|p| z[p.0].v),
                    children: net
                        .children(b)
                        .iter()
                        .map(|&c| ChildCopy {
                            bus: c,
                            l: z[c.0].l,
                            flow: z[c.0].flow,
                        })
                        .collect(),
                },
                z: zi,
                z_prev: zi,
                mult: Multipliers::default(),
            }
        })
        .collect()
}

/// Initial state of a single bus, identical to `init_states(net)[bus]`.
pub fn init_state(net: &RadialNetwork, bus: BusId) -> AgentState {
    init_states(net).swap_remove(bus.0)
}

// ---------------------------------------------------------------------------
// Outbound messages
// ---------------------------------------------------------------------------

impl AgentState {
    /// Messages sent before the x-update of iteration `iter`.
    pub fn pre_x_messages(&self, net: &RadialNetwork, iter: u64, out: &mut Vec<Message>) {
        for &c in net.children(self.bus) {
            out.push(Message {
                from: self.bus,
                to: c,
                iter,
                payload: Payload::ParentToChildPreX { v_z: self.z.v },
            });
        }
        if let Some(p) = net.parent(self.bus) {
            out.push(Message {
                from: self.bus,
                to: p,
                iter,
                payload: Payload::ChildToParentPreX {
                    z: self.z,
                    mu_flow: self.mult.mu_flow,
                    mu_l: self.mult.mu_l,
                },
            });
        }
    }

    /// Messages sent before the z-update.
    pub fn pre_z_messages(&self, net: &RadialNetwork, iter: u64, out: &mut Vec<Message>) {
        for copy in &self.x.children {
            out.push(Message {
                from: self.bus,
                to: copy.bus,
                iter,
                payload: Payload::ParentToChildPreZ {
                    l: copy.l,
                    flow: copy.flow,
                },
            });
        }
        if let (Some(p), Some(vp)) = (net.parent(self.bus), self.x.v_parent) {
            out.push(Message {
                from: self.bus,
                to: p,
                iter,
                payload: Payload::ChildToParentPreZ {
                    v_parent: vp,
                    gamma: self.mult.gamma,
                },
            });
        }
    }

    /// Messages sent before the multiplier update.
    pub fn post_z_messages(&self, net: &RadialNetwork, iter: u64, out: &mut Vec<Message>) {
        for &c in net.children(self.bus) {
            out.push(Message {
                from: self.bus,
                to: c,
                iter,
                payload: Payload::ParentToChildPostZ { v_z: self.z.v },
            });
        }
    }
}

impl MultInbound {
    /// The parent copy comes from the pre-z exchange; the voltage from post-z.
    pub fn collect(
        net: &RadialNetwork,
        bus: BusId,
        iter: u64,
        zin: &ZInbound,
        msgs: &[Message],
    ) -> Result<Self, SolveError> {
        let mut parent_v_z = None;
        for m in msgs {
            check_envelope(net, bus, iter, m)?;
            match m.payload {
                Payload::ParentToChildPostZ { v_z } if net.parent(bus) == Some(m.from) => {
                    parent_v_z = Some(v_z)
                }
                _ => return Err(missing(bus, "post-z payload")),
            }
        }
        if net.parent(bus).is_some() && parent_v_z.is_none() {
            return Err(missing(bus, "parent post-z"));
        }
        Ok(MultInbound {
            parent_copy: zin.parent_copy,
            parent_v_z,
        })
    }
}

// ---------------------------------------------------------------------------
// x-update
// ---------------------------------------------------------------------------

/// Stacked real variables of the x-subproblem and the equality constraints
/// they satisfy. Layout, non-root: `[v, ℓ, P, Q, p, q, v_parent, (ℓ_j, P_j, Q_j)…]`;
/// root (fixed voltage, no line): `[p, q, (ℓ_j, P_j, Q_j)…]`.
pub fn x_subproblem(
    state: &AgentState,
    net: &RadialNetwork,
    rho: f64,
    inbound: &XInbound,
) -> Result<EqQp, SolveError> {
    let bus = state.bus;
    let kids = net.children(bus);
    if inbound.children.len() != kids.len() {
        return Err(missing(bus, "child pre-x"));
    }
    let m = &state.mult;
    let z = &state.z;
    let head = if bus.is_root() { 2 } else { 7 };
    let n = head + 3 * kids.len();
    let rows = if bus.is_root() { 2 } else { 3 };
    let mut b = vec![0.0; rows * n];
    let mut c = vec![0.0; n];
    // c = multiplier − ρ·target for each variable
    let (row_p, row_q, off_p) = if bus.is_root() {
        (0, 1, 0)
    } else {
        let line = net.line(bus).expect("non-root bus has a line");
        let vp = inbound.parent_v_z.ok_or(missing(bus, "parent pre-x"))?;
        c[0] = m.lam_v - rho * z.v;
        c[1] = m.lam_l - rho * z.l;
        c[2] = m.lam_flow.re - rho * z.flow.re;
        c[3] = m.lam_flow.im - rho * z.flow.im;
        c[6] = m.gamma - rho * vp;
        // v_parent − v + 2(r P + x Q) − |z|² ℓ = 0
        b[6] = 1.0;
        b[0] = -1.0;
        b[2] = 2.0 * line.r;
        b[3] = 2.0 * line.x;
        b[1] = -line.z_sq();
        // balance rows carry −P and −Q
        b[n + 2] = -1.0;
        b[2 * n + 3] = -1.0;
        (1, 2, 4)
    };
    c[off_p] = m.lam_inj.re - rho * z.inj.re;
    c[off_p + 1] = m.lam_inj.im - rho * z.inj.im;
    b[row_p * n + off_p] = 1.0;
    b[row_q * n + off_p + 1] = 1.0;
    for (k, (&child, info)) in kids.iter().zip(&inbound.children).enumerate() {
        let j = head + 3 * k;
        let line = net.line(child).expect("child has a line");
        c[j] = info.mu_l - rho * info.l;
        c[j + 1] = info.mu_flow.re - rho * info.flow.re;
        c[j + 2] = info.mu_flow.im - rho * info.flow.im;
        // Σ (P_j − r_j ℓ_j) + p − P = 0, likewise for Q
        b[row_p * n + j] = -line.r;
        b[row_p * n + j + 1] = 1.0;
        b[row_q * n + j] = -line.x;
        b[row_q * n + j + 2] = 1.0;
    }
    EqQp::scaled_identity(rho, rows, b, c).map_err(|e| SolveError::Kernel { bus, source: e })
}

/// Solves the x-subproblem in closed form.
pub fn x_update(
    state: &AgentState,
    net: &RadialNetwork,
    rho: f64,
    inbound: &XInbound,
) -> Result<LocalX, SolveError> {
    let bus = state.bus;
    let qp = x_subproblem(state, net, rho, inbound)?;
    let sol = kernels::solve_eq_qp(&qp).map_err(|e| SolveError::Kernel { bus, source: e })?;
    let x = sol.x;
    let kids = net.children(bus);
    let head = if bus.is_root() { 2 } else { 7 };
    let children = kids
        .iter()
        .enumerate()
        .map(|(k, &child)| ChildCopy {
            bus: child,
            l: x[head + 3 * k],
            flow: Complex64::new(x[head + 3 * k + 1], x[head + 3 * k + 2]),
        })
        .collect();
    Ok(if bus.is_root() {
        LocalX {
            v: state.z.v,
            l: 0.0,
            flow: Complex64::new(0.0, 0.0),
            inj: Complex64::new(x[0], x[1]),
            v_parent: None,
            children,
        }
    } else {
        LocalX {
            v: x[0],
            l: x[1],
            flow: Complex64::new(x[2], x[3]),
            inj: Complex64::new(x[4], x[5]),
            v_parent: Some(x[6]),
            children,
        }
    })
}

// ---------------------------------------------------------------------------
// z-update
// ---------------------------------------------------------------------------

pub fn compute_hats(state: &AgentState, rho: f64, inbound: &ZInbound) -> Result<HatTargets, SolveError> {
    let bus = state.bus;
    let m = &state.mult;
    let x = &state.x;
    let (flow, l) = match inbound.parent_copy {
        Some((pl, pflow)) => (
            0.5 * (x.flow + pflow) + (m.lam_flow + m.mu_flow) / (2.0 * rho),
            0.5 * (x.l + pl) + (m.lam_l + m.mu_l) / (2.0 * rho),
        ),
        None if bus.is_root() => (Complex64::new(0.0, 0.0), 0.0),
        None => return Err(missing(bus, "parent pre-z")),
    };
    let (vsum, gsum) = inbound
        .children
        .iter()
        .fold((x.v, m.lam_v), |(vs, gs), (vc, g)| (vs + vc, gs + g));
    let v = (vsum + gsum / rho) / (inbound.children.len() as f64 + 1.0);
    let inj = x.inj + m.lam_inj / rho;
    Ok(HatTargets { flow, l, v, inj })
}

/// `κ = sqrt((|C|+1)/2)`: z3 = κ v puts the voltage term on the same footing
/// as the flow and current terms.
#[inline]
pub fn voltage_scale(n_children: usize) -> f64 {
    ((n_children as f64 + 1.0) / 2.0).sqrt()
}

/// Cone-box instance of the (v, ℓ, S) block. With `z3 = κ v` and `k² = 1/κ`,
/// `z1² + z2² ≤ k² z3 z4` is exactly `|S|² ≤ v ℓ`.
pub fn cone_subproblem(hats: &HatTargets, n_children: usize, v_lo: f64, v_hi: f64) -> Result<ConeBoxQp, KernelError> {
    let kappa = voltage_scale(n_children);
    ConeBoxQp::new(
        [
            -2.0 * hats.flow.re,
            -2.0 * hats.flow.im,
            -2.0 * kappa * hats.v,
            -2.0 * hats.l,
        ],
        (1.0 / kappa).sqrt(),
        kappa * v_lo,
        kappa * v_hi,
    )
}

pub fn z_update(
    state: &AgentState,
    net: &RadialNetwork,
    rho: f64,
    inbound: &ZInbound,
) -> Result<LocalZ, SolveError> {
    let bus = state.bus;
    let spec = net.spec(bus);
    let kerr = |e| SolveError::Kernel { bus, source: e };
    let hats = compute_hats(state, rho, inbound)?;
    // root: S and ℓ are absent (zero hats) and the box collapses to v0
    let n_children = net.children(bus).len();
    let q = cone_subproblem(&hats, n_children, spec.v_lo, spec.v_hi).map_err(kerr)?;
    let s = kernels::solve_cone_box_qp(&q).map_err(kerr)?;
    let v = (s.z[2] / voltage_scale(n_children)).clamp(spec.v_lo, spec.v_hi);
    let (l, flow) = if bus.is_root() {
        (0.0, Complex64::new(0.0, 0.0))
    } else {
        (s.z[3], Complex64::new(s.z[0], s.z[1]))
    };
    let inj = match spec.injection {
        InjectionRegion::Box { p_lo, p_hi, q_lo, q_hi } => {
            let (p, q) = kernels::solve_box_qp(&BoxQp {
                alpha: spec.alpha,
                beta: spec.beta,
                rho,
                p_hat: hats.inj.re,
                q_hat: hats.inj.im,
                p_lo,
                p_hi,
                q_lo,
                q_hi,
            })
            .map_err(kerr)?;
            Complex64::new(p, q)
        }
        InjectionRegion::Disk { s_max } => {
            let d = DiskQp::new(
                spec.alpha + rho,
                rho,
                spec.beta - rho * hats.inj.re,
                -rho * hats.inj.im,
                s_max,
            )
            .map_err(kerr)?;
            let s = kernels::solve_disk_qp(&d).map_err(kerr)?;
            Complex64::new(s.p, s.q)
        }
    };
    Ok(LocalZ { v, l, flow, inj })
}

/// `H_i(z)` written out term by term from the augmented Lagrangian.
pub fn z_lagrangian(state: &AgentState, net: &RadialNetwork, rho: f64, inbound: &ZInbound, z: &LocalZ) -> f64 {
    let spec = net.spec(state.bus);
    let m = &state.mult;
    let x = &state.x;
    let dot = |a: Complex64, b: Complex64| a.re * b.re + a.im * b.im;
    let mut h = spec.cost(z.inj.re);
    h -= dot(m.lam_flow, z.flow) + m.lam_l * z.l + m.lam_v * z.v + dot(m.lam_inj, z.inj);
    let mut prox = (x.v - z.v).powi(2) + (x.l - z.l).powi(2) + (x.flow - z.flow).norm_sqr() + (x.inj - z.inj).norm_sqr();
    if let Some((pl, pflow)) = inbound.parent_copy {
        h -= dot(m.mu_flow, z.flow) + m.mu_l * z.l;
        prox += (pl - z.l).powi(2) + (pflow - z.flow).norm_sqr();
    }
    for &(vc, g) in &inbound.children {
        h -= g * z.v;
        prox += (vc - z.v).powi(2);
    }
    h + 0.5 * rho * prox
}

impl HatTargets {
    /// Completed-square form of `H_i`, equal to it up to an additive constant.
    pub fn completed_objective(&self, net: &RadialNetwork, bus: BusId, rho: f64, z: &LocalZ) -> f64 {
        let spec = net.spec(bus);
        let nc = net.children(bus).len() as f64;
        let mut h = spec.cost(z.inj.re) + 0.5 * rho * (z.inj - self.inj).norm_sqr();
        h += rho * 0.5 * (nc + 1.0) * (z.v - self.v).powi(2);
        if !bus.is_root() {
            h += rho * ((z.flow - self.flow).norm_sqr() + (z.l - self.l).powi(2));
        }
        h
    }
}

// ---------------------------------------------------------------------------
// Multipliers and residuals
// ---------------------------------------------------------------------------

fn parent_pairs(state: &AgentState, inbound: &MultInbound) -> Result<Option<(f64, Complex64, f64)>, SolveError> {
    if state.bus.is_root() {
        return Ok(None);
    }
    let (pl, pflow) = inbound.parent_copy.ok_or(missing(state.bus, "parent pre-z"))?;
    let pv = inbound.parent_v_z.ok_or(missing(state.bus, "parent post-z"))?;
    let vx = state.x.v_parent.ok_or(missing(state.bus, "parent voltage copy"))?;
    Ok(Some((pl - state.z.l, pflow - state.z.flow, vx - pv)))
}

/// Dual ascent on every consensus pair owned by this bus.
pub fn multiplier_update(state: &AgentState, rho: f64, inbound: &MultInbound) -> Result<Multipliers, SolveError> {
    let x = &state.x;
    let z = &state.z;
    let mut m = state.mult;
    m.lam_flow += (x.flow - z.flow) * rho;
    m.lam_l += rho * (x.l - z.l);
    m.lam_v += rho * (x.v - z.v);
    m.lam_inj += (x.inj - z.inj) * rho;
    if let Some((gl, gflow, gv)) = parent_pairs(state, inbound)? {
        m.mu_l += rho * gl;
        m.mu_flow += gflow * rho;
        m.gamma += rho * gv;
    }
    Ok(m)
}

/// `(‖x − z‖²` over this bus's pairs, `‖z − z_prev‖²)`.
pub fn local_residual_contrib(state: &AgentState, inbound: &MultInbound) -> Result<(f64, f64), SolveError> {
    let x = &state.x;
    let z = &state.z;
    let mut r = (x.v - z.v).powi(2) + (x.l - z.l).powi(2) + (x.flow - z.flow).norm_sqr() + (x.inj - z.inj).norm_sqr();
    if let Some((gl, gflow, gv)) = parent_pairs(state, inbound)? {
        r += gl * gl + gflow.norm_sqr() + gv * gv;
    }
    Ok((r, z.dist_sq(&state.z_prev)))
}
