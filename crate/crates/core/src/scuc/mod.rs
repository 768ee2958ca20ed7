//! Master unit-commitment MILP, hourly network and scenario checks, and the
//! feasibility cuts they feed back.

mod check;
mod cuts;
mod extensive;
mod master;
mod redispatch;
mod schedule;

use thiserror::Error;

use crate::optkernel::{KernelError, Status};

pub use check::{
    network_check, network_subproblem, scenario_check, scenario_subproblem, CheckKind, CheckResult,
};
pub use cuts::{make_network_cut, make_scenario_cut, BendersCut};
pub use extensive::build_extensive;
pub use master::{build_master, precheck, solve_master, MasterProblem};
pub use redispatch::{redispatch, Redispatch, SHORTFALL_PENALTY};
pub use schedule::Schedule;

/// Violation threshold for line and scenario slacks, MW.
pub const EPSILON: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum ScucError {
    #[error("hour {hour}: {message}")]
    StructurallyInfeasible { hour: usize, message: String },
    #[error("master problem is {0:?}")]
    Master(Status),
    #[error("{kind} subproblem at hour {hour} ended with status {status:?}")]
    Subproblem {
        kind: &'static str,
        hour: usize,
        status: Status,
    },
    #[error("cut for hour {hour} has all-zero coefficients (violation {violation:.6} MW cannot be influenced by commitment or dispatch)")]
    DegenerateCut { hour: usize, violation: f64 },
    #[error("cut requested for hour {hour} but the check is not violated")]
    NotViolated { hour: usize },
    #[error("scenario weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
