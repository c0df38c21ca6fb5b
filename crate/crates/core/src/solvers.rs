//! Frank-Wolfe and LMO-averaged Frank-Wolfe iterations with tracing.
//!
//! Per iteration `k` (counting from 0):
//!
//! ```text
//! s_k   = lmo(∇f(x_k))
//! FW:     x_{k+1} = x_k + γ_k (s_k − x_k)
//! AvgFW:  s̄_k    = s̄_{k−1} + β_k (s_k − s̄_{k−1})      (β_0 = 1, so s̄_0 = s_0)
//!         x_{k+1} = x_k + γ_k (s̄_k − x_k)
//! ```
//!
//! The trace row for `k` is taken at `x_k`, before the step.

use std::fmt;

use crate::domains::{Atom, DomainKind, DomainSet};
use crate::error::{Error, Result};
use crate::linalg::dist2;
use crate::objectives::{clamp_gap, Objective};
use crate::schedules::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Fw,
    AvgFw,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Fw => "fw",
            Variant::AvgFw => "avgfw",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fw" => Ok(Variant::Fw),
            "avgfw" | "avg_fw" | "avg-fw" => Ok(Variant::AvgFw),
            other => Err(Error::config(format!("unknown solver variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum X0Policy {
    /// The vertex returned by the oracle at `∇f(0)`.
    #[default]
    LmoAtOriginGradient,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    pub schedule: Schedule,
    pub max_iters: u64,
    pub x0: X0Policy,
    pub trace_every: u64,
    /// Retain per-iteration atoms, iterates and averaged atoms.
    pub keep_history: bool,
}

impl SolverConfig {
    pub fn new(variant: Variant, schedule: Schedule, max_iters: u64) -> Self {
        Self {
            variant,
            schedule,
            max_iters,
            x0: X0Policy::default(),
            trace_every: 1,
            keep_history: false,
        }
    }

    pub fn with_x0(mut self, x0: Vec<f64>) -> Self {
        self.x0 = X0Policy::Explicit(x0);
        self
    }

    pub fn with_trace_every(mut self, every: u64) -> Self {
        self.trace_every = every;
        self
    }

    pub fn with_history(mut self) -> Self {
        self.keep_history = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::config("max_iters must be at least 1"));
        }
        if self.trace_every < 1 {
            return Err(Error::config("trace_every must be at least 1"));
        }
        Ok(())
    }
}

/// Live solver state at the start of iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub k: u64,
    pub x: Vec<f64>,
    pub s_last: Option<Atom>,
    pub s_bar: Vec<f64>,
}

impl SolverState {
    pub fn initial(obj: &Objective, domain: &DomainSet, cfg: &SolverConfig) -> Result<Self> {
        check_problem(obj, domain)?;
        let n = domain.dim();
        let x = match &cfg.x0 {
            X0Policy::LmoAtOriginGradient => domain.lmo(&obj.gradient(&vec![0.0; n]))?.vector,
            X0Policy::Explicit(v) => {
                if v.len() != n {
                    return Err(Error::config(format!(
                        "x0 has length {}, domain dimension is {n}",
                        v.len()
                    )));
                }
                if !domain.contains(v, 1e-9 * domain.radius()) {
                    return Err(Error::config("x0 lies outside the domain"));
                }
                v.clone()
            }
        };
        Ok(Self {
            k: 0,
            x,
            s_last: None,
            s_bar: vec![0.0; n],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: u64,
    pub f_value: f64,
    pub gap: f64,
    /// `‖s_k − x_k‖` for FW, `‖s̄_k − x_k‖` for AvgFW.
    pub disc_err: f64,
    pub gamma: f64,
    pub beta: f64,
    pub atom_id: Option<i64>,
}

/// Dense per-iteration vectors, retained only on request.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct History {
    pub atoms: Vec<Vec<f64>>,
    pub iterates: Vec<Vec<f64>>,
    pub s_bars: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    pub variant: Variant,
    pub domain_kind: DomainKind,
    pub rows: Vec<TraceRow>,
    /// First iteration index covered by `atom_ids` and `history`.
    pub start_k: u64,
    /// Vertex id of every oracle output, one per iteration.
    pub atom_ids: Vec<Option<i64>>,
    pub history: Option<History>,
    /// State after the last step, suitable for [`resume`].
    pub state: SolverState,
}

impl IterateTrace {
    pub fn last_row(&self) -> &TraceRow {
        self.rows.last().expect("trace has at least one row")
    }

    pub fn final_x(&self) -> &[f64] {
        &self.state.x
    }
}

fn check_problem(obj: &Objective, domain: &DomainSet) -> Result<()> {
    if obj.dim() != domain.dim() {
        return Err(Error::config(format!(
            "objective dimension {} does not match domain dimension {}",
            obj.dim(),
            domain.dim()
        )));
    }
    Ok(())
}

pub fn solve(obj: &Objective, domain: &DomainSet, cfg: &SolverConfig) -> Result<IterateTrace> {
    cfg.validate()?;
    let state = SolverState::initial(obj, domain, cfg)?;
    resume(state, obj, domain, cfg)
}

/// Runs `cfg.max_iters` further iterations from `state`.
pub fn resume(
    state: SolverState,
    obj: &Objective,
    domain: &DomainSet,
    cfg: &SolverConfig,
) -> Result<IterateTrace> {
    cfg.validate()?;
    check_problem(obj, domain)?;
    let n = domain.dim();
    if state.x.len() != n || state.s_bar.len() != n {
        return Err(Error::config(format!(
            "state dimension {} does not match domain dimension {n}",
            state.x.len()
        )));
    }
    let tol = 1e-9 * domain.radius();
    if !domain.contains(&state.x, tol) {
        return Err(Error::config("state iterate lies outside the domain"));
    }
    if cfg.variant == Variant::AvgFw && state.k > 0 && !domain.contains(&state.s_bar, tol) {
        return Err(Error::config("state averaged atom lies outside the domain"));
    }

    let SolverState {
        k: start_k,
        mut x,
        mut s_last,
        mut s_bar,
    } = state;
    let end = start_k + cfg.max_iters;
    let mut rows = Vec::new();
    let mut atom_ids = Vec::with_capacity(cfg.max_iters as usize);
    let mut history = cfg.keep_history.then(History::default);

    for k in start_k..end {
        let (f_value, g) = obj.value_and_gradient(&x);
        if !f_value.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup { k });
        }
        let s = domain.lmo(&g)?;
        let gap = clamp_gap(&x, &g, &s.vector)?;
        let gamma = cfg.schedule.gamma(k);
        let beta = cfg.schedule.beta(k);

        let disc_err = match cfg.variant {
            Variant::Fw => dist2(&s.vector, &x),
            Variant::AvgFw => {
                for (b, si) in s_bar.iter_mut().zip(&s.vector) {
                    *b += beta * (si - *b);
                }
                dist2(&s_bar, &x)
            }
        };

        if k % cfg.trace_every == 0 || k + 1 == end {
            rows.push(TraceRow {
                k,
                f_value,
                gap,
                disc_err,
                gamma,
                beta,
                atom_id: s.vertex_id,
            });
        }
        atom_ids.push(s.vertex_id);
        if let Some(h) = history.as_mut() {
            h.atoms.push(s.vector.clone());
            h.iterates.push(x.clone());
            h.s_bars.push(s_bar.clone());
        }

        let dir = match cfg.variant {
            Variant::Fw => &s.vector,
            Variant::AvgFw => &s_bar,
        };
        for (xi, di) in x.iter_mut().zip(dir) {
            *xi += gamma * (di - *xi);
        }
        s_last = Some(s);
    }

    Ok(IterateTrace {
        variant: cfg.variant,
        domain_kind: domain.kind(),
        rows,
        start_k,
        atom_ids,
        history,
        state: SolverState {
            k: end,
            x,
            s_last,
            s_bar,
        },
    })
}
