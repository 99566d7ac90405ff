//! Radial network data model, validation, canonical document I/O and
//! synthetic topology generators.

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::NetworkError;

/// Dense bus index; bus 0 is the substation (root).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BusId(pub usize);

impl BusId {
    pub const ROOT: BusId = BusId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }

    #[inline]
    pub fn is_root(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for BusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Per-unit series impedance of the line from a bus towards its parent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub r: f64,
    pub x: f64,
}

impl LineParams {
    /// |z|² = r² + x².
    #[inline]
    pub fn z_sq(&self) -> f64 {
        self.r * self.r + self.x * self.x
    }
}

/// Feasible set for the complex injection `p + iq` at a bus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InjectionRegion {
    /// Controllable load: independent intervals on `p` and `q`.
    Box {
        p_lo: f64,
        p_hi: f64,
        q_lo: f64,
        q_hi: f64,
    },
    /// Inverter-connected PV: `p >= 0`, `p² + q² <= s_max²`.
    Disk { s_max: f64 },
}

impl InjectionRegion {
    /// Canonical feasible point used to initialize the solver.
    pub fn canonical_point(&self) -> (f64, f64) {
        match *self {
            InjectionRegion::Box { p_lo, p_hi, q_lo, q_hi } => {
                (0.5 * (p_lo + p_hi), 0.5 * (q_lo + q_hi))
            }
            InjectionRegion::Disk { .. } => (0.0, 0.0),
        }
    }

    /// Distance-like violation of `(p, q)`; zero when feasible.
    pub fn violation(&self, p: f64, q: f64) -> f64 {
        match *self {
            InjectionRegion::Box { p_lo, p_hi, q_lo, q_hi } => (p_lo - p)
                .max(p - p_hi)
                .max(q_lo - q)
                .max(q - q_hi)
                .max(0.0),
            InjectionRegion::Disk { s_max } => {
                let radial = (p * p + q * q).sqrt() - s_max;
                radial.max(-p).max(0.0)
            }
        }
    }
}

/// Operating limits and cost of a single bus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusSpec {
    pub injection: InjectionRegion,
    /// Squared voltage magnitude bounds.
    pub v_lo: f64,
    pub v_hi: f64,
    /// Cost `alpha/2 p² + beta p`.
    pub alpha: f64,
    pub beta: f64,
}

impl BusSpec {
    #[inline]
    pub fn cost(&self, p: f64) -> f64 {
        0.5 * self.alpha * p * p + self.beta * p
    }
}

/// A line given by its sending (child) bus and receiving (parent) bus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub from: BusId,
    pub to: BusId,
    pub params: LineParams,
}

/// One violated network invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    TooFewBuses,
    NonDenseIds { position: usize, found: usize },
    UnknownBus { bus: usize },
    DuplicateLine { bus: BusId },
    MissingLine { bus: BusId },
    RootHasLine,
    NotATree { bus: BusId },
    ZeroImpedance { bus: BusId },
    NegativeImpedance { bus: BusId },
    NonFinite { bus: BusId, field: &'static str },
    BoxBoundsOrder { bus: BusId },
    NegativeDiskRadius { bus: BusId },
    VoltageBounds { bus: BusId },
    RootVoltageNotFixed,
    NegativeAlpha { bus: BusId },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::TooFewBuses => write!(f, "network needs at least one bus"),
            Diagnostic::NonDenseIds { position, found } => {
                write!(f, "bus ids must be dense and ascending: position {position} holds id {found}")
            }
            Diagnostic::UnknownBus { bus } => write!(f, "line references unknown bus {bus}"),
            Diagnostic::DuplicateLine { bus } => write!(f, "bus {bus}: more than one line to a parent"),
            Diagnostic::MissingLine { bus } => write!(f, "bus {bus}: no line to a parent"),
            Diagnostic::RootHasLine => write!(f, "bus 0: root must not have a parent line"),
            Diagnostic::NotATree { bus } => write!(f, "bus {bus}: not a tree (unreachable from root or on a cycle)"),
            Diagnostic::ZeroImpedance { bus } => write!(f, "line {bus}: zero impedance"),
            Diagnostic::NegativeImpedance { bus } => write!(f, "line {bus}: negative r or x"),
            Diagnostic::NonFinite { bus, field } => write!(f, "bus {bus}: non-finite {field}"),
            Diagnostic::BoxBoundsOrder { bus } => write!(f, "bus {bus}: box injection bounds out of order"),
            Diagnostic::NegativeDiskRadius { bus } => write!(f, "bus {bus}: disk radius must be >= 0"),
            Diagnostic::VoltageBounds { bus } => write!(f, "bus {bus}: voltage bounds must satisfy 0 < v_lo <= v_hi"),
            Diagnostic::RootVoltageNotFixed => write!(f, "root voltage must be fixed (v_lo = v_hi)"),
            Diagnostic::NegativeAlpha { bus } => write!(f, "bus {bus}: alpha must be >= 0"),
        }
    }
}

/// Immutable radial distribution network rooted at bus 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialNetwork {
    specs: Vec<BusSpec>,
    parent: Vec<Option<BusId>>,
    children: Vec<Vec<BusId>>,
    lines: Vec<Option<LineParams>>,
}

impl RadialNetwork {
    /// Assembles and validates a network. `buses[i]` describes bus `i`.
    pub fn new(buses: Vec<BusSpec>, lines: Vec<Line>) -> Result<Self, NetworkError> {
        let n = buses.len();
        let mut diags = Vec::new();
        let mut parent = vec![None; n];
        let mut params = vec![None; n];
        for line in &lines {
            if line.from.0 >= n || line.to.0 >= n {
                diags.push(Diagnostic::UnknownBus {
                    bus: line.from.0.max(line.to.0),
                });
                continue;
            }
            if line.from.is_root() {
                diags.push(Diagnostic::RootHasLine);
                continue;
            }
            if parent[line.from.0].is_some() {
                diags.push(Diagnostic::DuplicateLine { bus: line.from });
                continue;
            }
            parent[line.from.0] = Some(line.to);
            params[line.from.0] = Some(line.params);
        }
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                if p.0 != i {
                    children[p.0].push(BusId(i));
                }
            }
        }
        // ascending by construction; keep explicit for clarity of the invariant
        for c in &mut children {
            c.sort_unstable();
        }
        let net = RadialNetwork {
            specs: buses,
            parent,
            children,
            lines: params,
        };
        if let Err(NetworkError::Invalid(more)) = validate(&net) {
            diags.extend(more);
        }
        if diags.is_empty() {
            Ok(net)
        } else {
            Err(NetworkError::Invalid(diags))
        }
    }

    #[inline]
    pub fn n_buses(&self) -> usize {
        self.specs.len()
    }

    pub fn buses(&self) -> impl Iterator<Item = BusId> + '_ {
        (0..self.specs.len()).map(BusId)
    }

    #[inline]
    pub fn parent(&self, bus: BusId) -> Option<BusId> {
        self.parent[bus.0]
    }

    #[inline]
    pub fn children(&self, bus: BusId) -> &[BusId] {
        &self.children[bus.0]
    }

    /// Line from `bus` to its parent; `None` at the root.
    #[inline]
    pub fn line(&self, bus: BusId) -> Option<LineParams> {
        self.lines[bus.0]
    }

    #[inline]
    pub fn spec(&self, bus: BusId) -> &BusSpec {
        &self.specs[bus.0]
    }

    /// Buses ordered so that every bus appears after its parent (BFS from root).
    pub fn top_down_order(&self) -> Vec<BusId> {
        let mut order = Vec::with_capacity(self.n_buses());
        let mut queue = VecDeque::from([BusId::ROOT]);
        while let Some(b) = queue.pop_front() {
            order.push(b);
            queue.extend(self.children(b).iter().copied());
        }
        order
    }

    /// Hop distance of every bus from the root.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n_buses()];
        for b in self.top_down_order() {
            if let Some(p) = self.parent(b) {
                depth[b.0] = depth[p.0] + 1;
            }
        }
        depth
    }

    fn neighbors(&self, bus: BusId) -> impl Iterator<Item = BusId> + '_ {
        self.parent(bus)
            .into_iter()
            .chain(self.children(bus).iter().copied())
    }
}

/// Checks every network invariant, returning one diagnostic per violation.
pub fn validate(net: &RadialNetwork) -> Result<(), NetworkError> {
    let n = net.n_buses();
    let mut diags = Vec::new();
    if n == 0 {
        return Err(NetworkError::Invalid(vec![Diagnostic::TooFewBuses]));
    }
    for b in net.buses() {
        let s = net.spec(b);
        for (field, value) in [
            ("v_lo", s.v_lo),
            ("v_hi", s.v_hi),
            ("alpha", s.alpha),
            ("beta", s.beta),
        ] {
            if !value.is_finite() {
                diags.push(Diagnostic::NonFinite { bus: b, field });
            }
        }
        if !(s.v_lo > 0.0 && s.v_lo <= s.v_hi) {
            diags.push(Diagnostic::VoltageBounds { bus: b });
        }
        if s.alpha < 0.0 {
            diags.push(Diagnostic::NegativeAlpha { bus: b });
        }
        match s.injection {
            InjectionRegion::Box { p_lo, p_hi, q_lo, q_hi } => {
                if [p_lo, p_hi, q_lo, q_hi].iter().any(|v| !v.is_finite()) {
                    diags.push(Diagnostic::NonFinite { bus: b, field: "injection" });
                } else if p_lo > p_hi || q_lo > q_hi {
                    diags.push(Diagnostic::BoxBoundsOrder { bus: b });
                }
            }
            InjectionRegion::Disk { s_max } => {
                if !s_max.is_finite() {
                    diags.push(Diagnostic::NonFinite { bus: b, field: "injection" });
                } else if s_max < 0.0 {
                    diags.push(Diagnostic::NegativeDiskRadius { bus: b });
                }
            }
        }
        if b.is_root() {
            if net.parent(b).is_some() {
                diags.push(Diagnostic::RootHasLine);
            }
            if s.v_lo != s.v_hi {
                diags.push(Diagnostic::RootVoltageNotFixed);
            }
            continue;
        }
        match net.line(b) {
            None => diags.push(Diagnostic::MissingLine { bus: b }),
            Some(l) => {
                if !(l.r.is_finite() && l.x.is_finite()) {
                    diags.push(Diagnostic::NonFinite { bus: b, field: "impedance" });
                } else if l.r < 0.0 || l.x < 0.0 {
                    diags.push(Diagnostic::NegativeImpedance { bus: b });
                } else if l.z_sq() <= 0.0 {
                    diags.push(Diagnostic::ZeroImpedance { bus: b });
                }
            }
        }
    }
    // connectivity: walk down from the root through the children lists
    let mut seen = vec![false; n];
    let mut stack = vec![BusId::ROOT];
    seen[0] = true;
    while let Some(b) = stack.pop() {
        for &c in net.children(b) {
            if !seen[c.0] {
                seen[c.0] = true;
                stack.push(c);
            }
        }
    }
    for b in net.buses() {
        if !seen[b.0] && !b.is_root() {
            diags.push(Diagnostic::NotATree { bus: b });
        }
    }
    for b in net.buses() {
        let c = net.children(b);
        if c.windows(2).any(|w| w[0] >= w[1]) {
            diags.push(Diagnostic::NotATree { bus: b });
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        Err(NetworkError::Invalid(diags))
    }
}

/// Longest hop count between any two buses (two BFS passes).
pub fn diameter(net: &RadialNetwork) -> usize {
    let bfs = |start: BusId| -> (BusId, usize) {
        let mut dist = vec![usize::MAX; net.n_buses()];
        dist[start.0] = 0;
        let mut queue = VecDeque::from([start]);
        let mut far = (start, 0);
        while let Some(b) = queue.pop_front() {
            let d = dist[b.0];
            if d > far.1 {
                far = (b, d);
            }
            for nb in net.neighbors(b) {
                if dist[nb.0] == usize::MAX {
                    dist[nb.0] = d + 1;
                    queue.push_back(nb);
                }
            }
        }
        far
    };
    let (a, _) = bfs(BusId::ROOT);
    bfs(a).1
}

// ---------------------------------------------------------------------------
// Canonical document
// ---------------------------------------------------------------------------

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BusDoc {
    id: usize,
    v_lo: f64,
    v_hi: f64,
    alpha: f64,
    beta: f64,
    injection: InjectionRegion,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineDoc {
    from: usize,
    to: usize,
    r: f64,
    x: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    version: u32,
    buses: Vec<BusDoc>,
    lines: Vec<LineDoc>,
}

/// Parses and validates a network document.
pub fn load_network(bytes: &[u8]) -> Result<RadialNetwork, NetworkError> {
    let doc: NetworkDoc =
        serde_json::from_slice(bytes).map_err(|e| NetworkError::Parse(e.to_string()))?;
    if doc.version != DOCUMENT_VERSION {
        return Err(NetworkError::Parse(format!(
            "unsupported document version {}",
            doc.version
        )));
    }
    let mut diags = Vec::new();
    let mut buses = doc.buses;
    buses.sort_by_key(|b| b.id);
    for (pos, b) in buses.iter().enumerate() {
        if b.id != pos {
            diags.push(Diagnostic::NonDenseIds { position: pos, found: b.id });
        }
    }
    if !diags.is_empty() {
        return Err(NetworkError::Invalid(diags));
    }
    let specs = buses
        .into_iter()
        .map(|b| BusSpec {
            injection: b.injection,
            v_lo: b.v_lo,
            v_hi: b.v_hi,
            alpha: b.alpha,
            beta: b.beta,
        })
        .collect();
    let lines = doc
        .lines
        .into_iter()
        .map(|l| Line {
            from: BusId(l.from),
            to: BusId(l.to),
            params: LineParams { r: l.r, x: l.x },
        })
        .collect();
    RadialNetwork::new(specs, lines)
}

/// Serializes a network to its canonical document (arrays by ascending id).
pub fn save_network(net: &RadialNetwork) -> Vec<u8> {
    let doc = NetworkDoc {
        version: DOCUMENT_VERSION,
        buses: net
            .buses()
            .map(|b| {
                let s = net.spec(b);
                BusDoc {
                    id: b.0,
                    v_lo: s.v_lo,
                    v_hi: s.v_hi,
                    alpha: s.alpha,
                    beta: s.beta,
                    injection: s.injection,
                }
            })
            .collect(),
        lines: net
            .buses()
            .filter_map(|b| {
                let p = net.parent(b)?;
                let l = net.line(b)?;
                Some(LineDoc {
                    from: b.0,
                    to: p.0,
                    r: l.r,
                    x: l.x,
                })
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("network document serializes");
    out.push(b'\n');
    out
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Seeded parameters for synthetic networks. Every per-bus quantity is drawn
/// from a stream keyed by `(seed, bus index)`, so two topologies generated with
/// the same profile carry identical per-bus loads and line impedances.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    pub seed: u64,
    /// Nominal line resistance and reactance (pu).
    pub r: f64,
    pub x: f64,
    /// Impedances are scaled by a uniform factor in `[1 - jitter, 1 + jitter]`.
    pub impedance_jitter: f64,
    /// Nominal real/reactive demand drawn uniformly in `[0, p_load]`, `[0, q_load]`.
    pub p_load: f64,
    pub q_load: f64,
    /// A load may be curtailed down to this fraction of its nominal demand.
    pub curtail_fraction: f64,
    /// Fraction of non-root buses that host an inverter instead of a load.
    pub pv_fraction: f64,
    pub pv_s_max: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Half-width of the substation's box injection region.
    pub root_capacity: f64,
    pub v_root: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Default for LoadProfile {
    fn default() -> Self {
        LoadProfile {
            seed: 1,
            r: 0.002,
            x: 0.002,
            impedance_jitter: 0.5,
            p_load: 0.005,
            q_load: 0.002,
            curtail_fraction: 0.8,
            pv_fraction: 0.2,
            pv_s_max: 0.003,
            alpha: 0.0,
            beta: 1.0,
            root_capacity: 10.0,
            v_root: 1.0,
            v_lo: 0.95 * 0.95,
            v_hi: 1.05 * 1.05,
        }
    }
}

impl LoadProfile {
    pub fn with_seed(seed: u64) -> Self {
        LoadProfile {
            seed,
            ..Default::default()
        }
    }

    fn bus_rng(&self, bus: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(bus as u64);
        rng
    }

    fn bus_spec(&self, bus: usize) -> BusSpec {
        if bus == 0 {
            return BusSpec {
                injection: InjectionRegion::Box {
                    p_lo: -self.root_capacity,
                    p_hi: self.root_capacity,
                    q_lo: -self.root_capacity,
                    q_hi: self.root_capacity,
                },
                v_lo: self.v_root,
                v_hi: self.v_root,
                alpha: self.alpha,
                beta: self.beta,
            };
        }
        let mut rng = self.bus_rng(bus);
        // fixed draw order keeps streams comparable across profiles
        let _impedance: f64 = rng.gen();
        let is_pv = rng.gen::<f64>() < self.pv_fraction;
        let dp = self.p_load * rng.gen::<f64>();
        let dq = self.q_load * rng.gen::<f64>();
        let injection = if is_pv {
            InjectionRegion::Disk { s_max: self.pv_s_max }
        } else {
            InjectionRegion::Box {
                p_lo: -dp,
                p_hi: -self.curtail_fraction * dp,
                q_lo: -dq,
                q_hi: -self.curtail_fraction * dq,
            }
        };
        BusSpec {
            injection,
            v_lo: self.v_lo,
            v_hi: self.v_hi,
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    fn line_params(&self, bus: usize) -> LineParams {
        let mut rng = self.bus_rng(bus);
        let u: f64 = rng.gen();
        let scale = 1.0 + self.impedance_jitter * (2.0 * u - 1.0);
        LineParams {
            r: self.r * scale,
            x: self.x * scale,
        }
    }

    fn build(&self, parents: &[usize]) -> Result<RadialNetwork, NetworkError> {
        let n = parents.len() + 1;
        let specs = (0..n).map(|b| self.bus_spec(b)).collect();
        let lines = parents
            .iter()
            .enumerate()
            .map(|(k, &p)| Line {
                from: BusId(k + 1),
                to: BusId(p),
                params: self.line_params(k + 1),
            })
            .collect();
        RadialNetwork::new(specs, lines)
    }
}

fn check_size(n: usize) -> Result<(), NetworkError> {
    if n < 2 {
        Err(NetworkError::Size(n))
    } else {
        Ok(())
    }
}

/// Path network 0–1–…–(n−1).
pub fn gen_line(n: usize, profile: &LoadProfile) -> Result<RadialNetwork, NetworkError> {
    check_size(n)?;
    let parents: Vec<usize> = (0..n - 1).collect();
    profile.build(&parents)
}

/// Star network: every bus is a child of the root.
pub fn gen_fat_tree(n: usize, profile: &LoadProfile) -> Result<RadialNetwork, NetworkError> {
    check_size(n)?;
    profile.build(&vec![0; n - 1])
}

/// Random recursive tree: bus `i` attaches to a uniformly drawn earlier bus.
pub fn gen_random_tree(n: usize, profile: &LoadProfile) -> Result<RadialNetwork, NetworkError> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    rng.set_stream(u64::MAX);
    let parents: Vec<usize> = (1..n).map(|i| rng.gen_range(0..i)).collect();
    profile.build(&parents)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_bus(v_lo: f64, v_hi: f64) -> BusSpec {
        BusSpec {
            injection: InjectionRegion::Box {
                p_lo: -1.0,
                p_hi: 0.0,
                q_lo: -0.5,
                q_hi: 0.0,
            },
            v_lo,
            v_hi,
            alpha: 0.0,
            beta: 1.0,
        }
    }

    fn line(from: usize, to: usize) -> Line {
        Line {
            from: BusId(from),
            to: BusId(to),
            params: LineParams { r: 0.01, x: 0.02 },
        }
    }

    const TWO_BUS: &str = r#"{
        "version": 1,
        "buses": [
            {"id": 0, "v_lo": 1.0, "v_hi": 1.0, "alpha": 0.0, "beta": 1.0,
             "injection": {"kind": "box", "p_lo": -5.0, "p_hi": 5.0, "q_lo": -5.0, "q_hi": 5.0}},
            {"id": 1, "v_lo": 0.9025, "v_hi": 1.1025, "alpha": 0.0, "beta": 1.0,
             "injection": {"kind": "box", "p_lo": -0.1, "p_hi": -0.05, "q_lo": -0.02, "q_hi": 0.0}}
        ],
        "lines": [{"from": 1, "to": 0, "r": 0.01, "x": 0.02}]
    }"#;

    #[test]
    fn loads_minimal_document() {
        let net = load_network(TWO_BUS.as_bytes()).unwrap();
        assert_eq!(net.n_buses(), 2);
        assert_eq!(net.parent(BusId(1)), Some(BusId(0)));
        assert_eq!(net.children(BusId(0)), &[BusId(1)]);
    }

    #[test]
    fn self_loop_is_not_a_tree() {
        let doc = r#"{"version":1,"buses":[
            {"id":0,"v_lo":1.0,"v_hi":1.0,"alpha":0.0,"beta":1.0,"injection":{"kind":"disk","s_max":1.0}},
            {"id":1,"v_lo":0.9,"v_hi":1.1,"alpha":0.0,"beta":1.0,"injection":{"kind":"disk","s_max":1.0}},
            {"id":2,"v_lo":0.9,"v_hi":1.1,"alpha":0.0,"beta":1.0,"injection":{"kind":"disk","s_max":1.0}}],
            "lines":[{"from":1,"to":0,"r":0.01,"x":0.01},{"from":2,"to":2,"r":0.01,"x":0.01}]}"#;
        let err = load_network(doc.as_bytes()).unwrap_err();
        assert!(matches!(err, NetworkError::Invalid(_)));
        assert!(err.to_string().contains("not a tree"), "{err}");
    }

    #[test]
    fn missing_impedance_is_parse_error() {
        let doc = TWO_BUS.replace(r#""r": 0.01, "#, "");
        let err = load_network(doc.as_bytes()).unwrap_err();
        assert!(matches!(err, NetworkError::Parse(_)), "{err}");
    }

    #[test]
    fn cycle_without_root_path_is_rejected() {
        let buses = vec![box_bus(1.0, 1.0), box_bus(0.9, 1.1), box_bus(0.9, 1.1)];
        let err = RadialNetwork::new(buses, vec![line(1, 2), line(2, 1)]).unwrap_err();
        assert!(err.to_string().contains("not a tree"));
    }

    #[test]
    fn three_bus_line_validates() {
        let buses = vec![box_bus(1.0, 1.0), box_bus(0.9, 1.1), box_bus(0.9, 1.1)];
        let net = RadialNetwork::new(buses, vec![line(1, 0), line(2, 1)]).unwrap();
        assert!(validate(&net).is_ok());
        assert_eq!(diameter(&net), 2);
    }

    #[test]
    fn root_voltage_must_be_fixed() {
        let buses = vec![box_bus(0.9, 1.1), box_bus(0.9, 1.1)];
        let err = RadialNetwork::new(buses, vec![line(1, 0)]).unwrap_err();
        assert!(err.to_string().contains("root voltage must be fixed"));
    }

    #[test]
    fn box_bounds_out_of_order() {
        let mut bad = box_bus(0.9, 1.1);
        bad.injection = InjectionRegion::Box {
            p_lo: 1.0,
            p_hi: 0.0,
            q_lo: 0.0,
            q_hi: 0.0,
        };
        let err = RadialNetwork::new(vec![box_bus(1.0, 1.0), bad], vec![line(1, 0)]).unwrap_err();
        match err {
            NetworkError::Invalid(d) => {
                assert_eq!(d, vec![Diagnostic::BoxBoundsOrder { bus: BusId(1) }])
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn zero_impedance_rejected() {
        let mut l = line(1, 0);
        l.params = LineParams { r: 0.0, x: 0.0 };
        let err = RadialNetwork::new(vec![box_bus(1.0, 1.0), box_bus(0.9, 1.1)], vec![l]).unwrap_err();
        assert!(err.to_string().contains("zero impedance"));
    }

    #[test]
    fn missing_line_reported_per_bus() {
        let buses = vec![box_bus(1.0, 1.0), box_bus(0.9, 1.1), box_bus(0.9, 1.1)];
        let err = RadialNetwork::new(buses, vec![line(1, 0)]).unwrap_err();
        let NetworkError::Invalid(d) = err else { panic!() };
        assert!(d.contains(&Diagnostic::MissingLine { bus: BusId(2) }));
    }

    #[test]
    fn line_generator_structure() {
        let p = LoadProfile::with_seed(1);
        let net = gen_line(5, &p).unwrap();
        for i in 1..5 {
            assert_eq!(net.parent(BusId(i)), Some(BusId(i - 1)));
        }
        assert_eq!(net, gen_line(5, &p).unwrap());
        assert_eq!(diameter(&gen_line(50, &p).unwrap()), 49);
    }

    #[test]
    fn fat_tree_generator_structure() {
        let p = LoadProfile::with_seed(1);
        let net = gen_fat_tree(5, &p).unwrap();
        for i in 1..5 {
            assert_eq!(net.parent(BusId(i)), Some(BusId::ROOT));
        }
        assert_eq!(diameter(&gen_fat_tree(50, &p).unwrap()), 2);
        assert_eq!(diameter(&gen_fat_tree(2, &p).unwrap()), 1);
    }

    #[test]
    fn generators_reject_tiny_sizes() {
        let p = LoadProfile::default();
        assert!(matches!(gen_line(1, &p), Err(NetworkError::Size(1))));
        assert!(matches!(gen_fat_tree(0, &p), Err(NetworkError::Size(0))));
    }

    #[test]
    fn topologies_share_per_bus_profile() {
        let p = LoadProfile::with_seed(9);
        let a = gen_line(20, &p).unwrap();
        let b = gen_fat_tree(20, &p).unwrap();
        for bus in a.buses() {
            assert_eq!(a.spec(bus), b.spec(bus));
            assert_eq!(a.line(bus), b.line(bus));
        }
    }

    #[test]
    fn diameter_small_cases() {
        let p = LoadProfile::default();
        assert_eq!(diameter(&gen_line(10, &p).unwrap()), 9);
        assert_eq!(diameter(&gen_fat_tree(10, &p).unwrap()), 2);
        assert_eq!(diameter(&gen_line(2, &p).unwrap()), 1);
    }

    #[test]
    fn random_tree_is_valid_and_deterministic() {
        let p = LoadProfile::with_seed(3);
        let a = gen_random_tree(300, &p).unwrap();
        assert_eq!(a, gen_random_tree(300, &p).unwrap());
        assert!(validate(&a).is_ok());
    }
}
