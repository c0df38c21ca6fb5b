//! Projection-free convex optimization: Frank-Wolfe and its LMO-averaged
//! variant, their continuous-time flows, and convergence diagnostics.

pub mod cli;
pub mod diagnostics;
pub mod domains;
pub mod error;
pub mod experiments;
pub mod flows;
pub mod linalg;
pub mod objectives;
pub mod schedules;
pub mod solvers;

pub use domains::{Atom, DomainKind, DomainSet};
pub use error::{Error, Result};
pub use objectives::{LogisticData, Objective, QuadraticLsData};
pub use schedules::{Schedule, WeightVector};
pub use solvers::{
    resume, solve, IterateTrace, SolverConfig, SolverState, TraceRow, Variant, X0Policy,
};
