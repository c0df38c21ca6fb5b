//! Post-hoc analysis of solver traces: empirical rate fits, support-size
//! trajectories, manifold identification and the ℓ1 degeneracy margin.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::domains::{DomainKind, DomainSet};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::objectives::Objective;
use crate::schedules::Schedule;
use crate::solvers::{solve, IterateTrace, SolverConfig, Variant};

/// Consecutive fit points are at least this factor apart in `k`.
pub const SUBSAMPLE_RATIO: f64 = 1.1;
pub const MIN_FIT_POINTS: usize = 10;
/// Relative tolerance on oracle values defining the optimal support set.
pub const SUPPORT_TOL_REL: f64 = 1e-6;
/// `|x_j| <= ZERO_TOL_REL · α` counts as a zero coordinate.
pub const ZERO_TOL_REL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Series {
    Gap,
    DiscErr,
    /// `f(x_k) − f_ref` with the given reference value.
    FValueMinusRef(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: (u64, u64),
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least-squares slope of `log(series)` against `log(k)` over `window`
/// (inclusive), after geometric subsampling.
pub fn fit_rate(trace: &IterateTrace, series: Series, window: (u64, u64)) -> Result<RateFit> {
    let points = trace.rows.iter().map(|r| {
        let v = match series {
            Series::Gap => r.gap,
            Series::DiscErr => r.disc_err,
            Series::FValueMinusRef(f_ref) => r.f_value - f_ref,
        };
        (r.k, v)
    });
    fit_power_law(points, window)
}

/// Power-law fit over arbitrary `(k, value)` pairs sorted by `k`.
pub fn fit_power_law(
    points: impl IntoIterator<Item = (u64, f64)>,
    window: (u64, u64),
) -> Result<RateFit> {
    let (lo, hi) = window;
    if lo >= hi {
        return Err(Error::config(format!("rate window ({lo}, {hi}) is empty")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut next = lo.max(1) as f64;
    for (k, v) in points {
        if k < lo.max(1) || k > hi || (k as f64) < next {
            continue;
        }
        if v > 0.0 && v.is_finite() {
            xs.push((k as f64).ln());
            ys.push(v.ln());
            next = (k as f64 * SUBSAMPLE_RATIO).max(k as f64 + 1.0);
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData { found: xs.len() });
    }
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    Ok(RateFit {
        slope,
        intercept,
        window,
        r_squared,
        n_points: xs.len(),
    })
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, intercept, r_squared)
}

/// Entry `j` is the number of distinct atoms among iterations `j..end`.
pub fn support_trajectory(trace: &IterateTrace) -> Result<Vec<usize>> {
    support_trajectory_ids(&trace.atom_ids)
}

pub fn support_trajectory_ids(ids: &[Option<i64>]) -> Result<Vec<usize>> {
    let mut seen = HashSet::new();
    let mut out = vec![0; ids.len()];
    for (j, id) in ids.iter().enumerate().rev() {
        let id = id.ok_or(Error::UnsupportedKind("l2ball"))?;
        seen.insert(id);
        out[j] = seen.len();
    }
    Ok(out)
}

/// `min_{j: x*_j = 0} ‖∇f(x*)‖∞ − |∇f(x*)_j|` on an ℓ1 ball.
pub fn degeneracy_delta(obj: &Objective, domain: &DomainSet, x_star: &[f64]) -> Result<f64> {
    if domain.kind() != DomainKind::L1Ball {
        return Err(Error::UnsupportedKind(domain.kind().name()));
    }
    degeneracy_delta_from_gradient(&obj.gradient(x_star), x_star, domain.radius())
}

pub fn degeneracy_delta_from_gradient(grad: &[f64], x_star: &[f64], alpha: f64) -> Result<f64> {
    let gmax = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_tol = ZERO_TOL_REL * alpha;
    x_star
        .iter()
        .zip(grad)
        .filter(|(x, _)| x.abs() <= zero_tol)
        .map(|(_, g)| (gmax - g.abs()).max(0.0))
        .min_by(f64::total_cmp)
        .ok_or(Error::NoZeroSet)
}

/// Vertex ids whose oracle value at `grad` is within `SUPPORT_TOL_REL`
/// (relative) of the optimum.
pub fn support_set_from_gradient(domain: &DomainSet, grad: &[f64]) -> Result<BTreeSet<i64>> {
    if !matches!(domain.kind(), DomainKind::L1Ball | DomainKind::Simplex) {
        return Err(Error::UnsupportedKind(domain.kind().name()));
    }
    let verts = domain.vertices()?;
    let vals: Vec<f64> = verts.iter().map(|v| dot(grad, &v.vector)).collect();
    let best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = SUPPORT_TOL_REL * best.abs();
    Ok(verts
        .iter()
        .zip(&vals)
        .filter(|(_, v)| **v <= best + tol)
        .filter_map(|(a, _)| a.vertex_id)
        .collect())
}

pub fn support_set(obj: &Objective, domain: &DomainSet, x_star: &[f64]) -> Result<BTreeSet<i64>> {
    support_set_from_gradient(domain, &obj.gradient(x_star))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldReport {
    pub support_star: BTreeSet<i64>,
    /// First iteration after which every atom lies in `support_star`.
    pub k_bar: Option<u64>,
    pub delta: f64,
}

pub fn identify_manifold(
    trace: &IterateTrace,
    support_star: &BTreeSet<i64>,
    delta: f64,
) -> ManifoldReport {
    ManifoldReport {
        support_star: support_star.clone(),
        k_bar: identification_index(trace.start_k, &trace.atom_ids, support_star),
        delta,
    }
}

/// Smallest `k` such that every id from `k` on lies in `support`.
pub fn identification_index(
    start_k: u64,
    ids: &[Option<i64>],
    support: &BTreeSet<i64>,
) -> Option<u64> {
    let inside = |id: &Option<i64>| id.is_some_and(|i| support.contains(&i));
    let tail_len = ids.iter().rev().take_while(|id| inside(id)).count();
    (tail_len > 0).then(|| start_k + (ids.len() - tail_len) as u64)
}

/// Certified reference optimum from a long averaged run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceOptimum {
    pub x_star: Vec<f64>,
    pub f_final: f64,
    pub gap_final: f64,
    /// `f_final − gap_final`, a lower bound on `min f` by convexity.
    pub f_star: f64,
    pub iters: u64,
}

pub fn reference_optimum(
    obj: &Objective,
    domain: &DomainSet,
    iters: u64,
) -> Result<ReferenceOptimum> {
    let cfg = SolverConfig::new(Variant::AvgFw, Schedule::default(), iters).with_trace_every(iters);
    let trace = solve(obj, domain, &cfg)?;
    let x_star = trace.state.x;
    let (gap_final, _) = obj.gap(domain, &x_star)?;
    let f_final = obj.value(&x_star);
    Ok(ReferenceOptimum {
        x_star,
        f_final,
        gap_final,
        f_star: f_final - gap_final,
        iters,
    })
}

/// Flat `key=value` report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn extend(&mut self, other: &Report) {
        self.entries.extend(other.entries.iter().cloned());
    }

    /// Same entries, each line prefixed with `# `.
    pub fn as_comment_block(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("# {k}={v}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .map(|l| l.trim_start_matches('#').trim())
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self { entries }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
