//! Explicit-Euler integration of the continuous-time flows
//!
//! ```text
//! FWFlow:     ẋ = γ(t)(s(t) − x)
//! AvgFWFlow:  ṡ̄ = β(t)(s(t) − s̄),  ẋ = γ(t)(s̄ − x)
//! ```
//!
//! with `s(t) = lmo(∇f(x(t)))`. The oracle makes the right-hand side
//! discontinuous, so only fixed small steps are offered.

use std::fmt;

use crate::diagnostics::reference_optimum;
use crate::domains::DomainSet;
use crate::error::{Error, Result};
use crate::linalg::dist2;
use crate::objectives::{gap_from_gradient, Objective};
use crate::schedules::Schedule;
use crate::solvers::X0Policy;

/// Largest admissible step.
pub const MAX_DT: f64 = 1e-2;
/// Iterations of the averaged reference run used when no `f_ref` is given.
pub const DEFAULT_REFERENCE_ITERS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowVariant {
    FwFlow,
    AvgFwFlow,
}

impl fmt::Display for FlowVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowVariant::FwFlow => "fwflow",
            FlowVariant::AvgFwFlow => "avgfwflow",
        })
    }
}

impl std::str::FromStr for FlowVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fwflow" | "fw" => Ok(FlowVariant::FwFlow),
            "avgfwflow" | "avgfw" => Ok(FlowVariant::AvgFwFlow),
            other => Err(Error::config(format!("unknown flow variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub variant: FlowVariant,
    pub schedule: Schedule,
    pub t_end: f64,
    pub dt: f64,
    pub record_every: f64,
    pub x0: X0Policy,
    /// `min f` over the domain; estimated by a long averaged run when absent.
    pub f_ref: Option<f64>,
}

impl FlowConfig {
    pub fn new(variant: FlowVariant, schedule: Schedule, t_end: f64) -> Self {
        Self {
            variant,
            schedule,
            t_end,
            dt: 1e-3,
            record_every: 1.0,
            x0: X0Policy::default(),
            f_ref: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::config(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.dt.is_nan() || self.dt <= 0.0 {
            return Err(Error::config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.dt > MAX_DT {
            return Err(Error::StepTooLarge {
                dt: self.dt,
                t: 0.0,
                suggested: MAX_DT,
            });
        }
        if self.record_every.is_nan() || self.record_every <= 0.0 {
            return Err(Error::config("record_every must be positive"));
        }
        Ok(())
    }

    fn n_steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil() as usize
    }

    fn record_stride(&self) -> usize {
        ((self.record_every / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample {
    pub t: f64,
    pub f_value: f64,
    pub gap: f64,
    pub disc_err: f64,
    /// `f(x(t)) − f_ref`.
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub samples: Vec<FlowSample>,
    pub f_ref: f64,
    /// `s̄` at each sample; filled by [`force_signal`] only.
    pub s_bar_samples: Vec<Vec<f64>>,
    pub final_x: Vec<f64>,
    pub final_s_bar: Vec<f64>,
}

impl FlowTrace {
    pub fn last(&self) -> &FlowSample {
        self.samples
            .last()
            .expect("flow trace has at least one sample")
    }

    /// Sample closest to time `t`.
    pub fn at(&self, t: f64) -> &FlowSample {
        self.samples
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("flow trace has at least one sample")
    }
}

pub fn integrate(obj: &Objective, domain: &DomainSet, cfg: &FlowConfig) -> Result<FlowTrace> {
    cfg.validate()?;
    let n = domain.dim();
    if obj.dim() != n {
        return Err(Error::config("objective and domain dimensions differ"));
    }
    let f_ref = match cfg.f_ref {
        Some(v) => v,
        None => reference_optimum(obj, domain, DEFAULT_REFERENCE_ITERS)?.f_star,
    };
    let mut x = match &cfg.x0 {
        X0Policy::LmoAtOriginGradient => domain.lmo(&obj.gradient(&vec![0.0; n]))?.vector,
        X0Policy::Explicit(v) if v.len() == n => v.clone(),
        X0Policy::Explicit(v) => {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            })
        }
    };
    let tol = 1e-6 * domain.radius();
    let steps = cfg.n_steps();
    let stride = cfg.record_stride();
    let mut s_bar: Option<Vec<f64>> = None;
    let mut samples = Vec::with_capacity(steps / stride + 2);

    for i in 0..=steps {
        let t = i as f64 * cfg.dt;
        let (f_value, g) = obj.value_and_gradient(&x);
        if !f_value.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup { k: i as u64 });
        }
        let (gap, s) = gap_from_gradient(domain, &x, &g)?;
        let dir = match cfg.variant {
            FlowVariant::FwFlow => &s.vector,
            FlowVariant::AvgFwFlow => s_bar.get_or_insert_with(|| s.vector.clone()),
        };
        if i % stride == 0 || i == steps {
            samples.push(FlowSample {
                t,
                f_value,
                gap,
                disc_err: dist2(dir, &x),
                h: f_value - f_ref,
            });
        }
        if i == steps {
            break;
        }
        let step = cfg.dt * cfg.schedule.gamma_t(t);
        for (xi, di) in x.iter_mut().zip(dir) {
            *xi += step * (di - *xi);
        }
        if let Some(sb) = s_bar.as_mut() {
            let b = cfg.dt * cfg.schedule.beta_t(t);
            for (v, si) in sb.iter_mut().zip(&s.vector) {
                *v += b * (si - *v);
            }
        }
        if !domain.contains(&x, tol) {
            return Err(Error::StepTooLarge {
                dt: cfg.dt,
                t,
                suggested: cfg.dt / 10.0,
            });
        }
    }

    Ok(FlowTrace {
        samples,
        f_ref,
        s_bar_samples: Vec::new(),
        final_x: x,
        final_s_bar: s_bar.unwrap_or_else(|| vec![0.0; n]),
    })
}

/// Integrates only `ṡ̄ = β(t)(s(t) − s̄)` from `s̄(0) = 0` against a
/// prescribed signal. `f_value`, `gap` and `h` are zero in the returned
/// samples; `disc_err` is `‖s(t) − s̄(t)‖`.
pub fn force_signal(cfg: &FlowConfig, signal: impl Fn(f64) -> Vec<f64>) -> Result<FlowTrace> {
    cfg.validate()?;
    let steps = cfg.n_steps();
    let stride = cfg.record_stride();
    let mut s_bar = vec![0.0; signal(0.0).len()];
    let mut samples = Vec::new();
    let mut s_bar_samples = Vec::new();

    for i in 0..=steps {
        let t = i as f64 * cfg.dt;
        let s = signal(t);
        if s.len() != s_bar.len() {
            return Err(Error::DimensionMismatch {
                expected: s_bar.len(),
                got: s.len(),
            });
        }
        if i % stride == 0 || i == steps {
            samples.push(FlowSample {
                t,
                f_value: 0.0,
                gap: 0.0,
                disc_err: dist2(&s, &s_bar),
                h: 0.0,
            });
            s_bar_samples.push(s_bar.clone());
        }
        if i == steps {
            break;
        }
        let b = cfg.dt * cfg.schedule.beta_t(t);
        for (v, si) in s_bar.iter_mut().zip(&s) {
            *v += b * (si - *v);
        }
    }

    Ok(FlowTrace {
        samples,
        f_ref: 0.0,
        s_bar_samples,
        final_x: Vec::new(),
        final_s_bar: s_bar,
    })
}
