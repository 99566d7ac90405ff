//! Distributed ADMM for the second-order cone relaxation of optimal power flow
//! on balanced radial distribution networks.
//!
//! Every bus is an agent. Each iteration runs an x-update (an equality
//! constrained diagonal QP per bus), a z-update (a cone-box QP plus an
//! injection QP per bus) and a multiplier update, with messages exchanged only
//! between tree neighbors. All per-bus subproblems are solved in closed form by
//! the routines in [`kernels`].

pub mod agent;
pub mod check;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod network;
pub mod oracle;

pub use agent::{AgentState, HatTargets, LocalX, LocalZ, Message, Multipliers};
pub use error::{KernelError, NetworkError, SolveError};
pub use harness::{run, Engine, Solution, SolveConfig, Status, Trace, TraceRow};
pub use network::{
    diameter, gen_fat_tree, gen_line, gen_random_tree, load_network, save_network, validate, BusId,
    BusSpec, InjectionRegion, Line, LineParams, LoadProfile, RadialNetwork,
};
