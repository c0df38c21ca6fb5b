//! Smooth convex objectives over dense or CSR data.

use crate::domains::{Atom, DomainSet};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

const POWER_ITERS: usize = 50;
const POWER_SEED: u64 = 0x5EED_F00D;

/// `½‖Ax − y‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLsData {
    pub a: Matrix,
    pub y: Vec<f64>,
}

impl QuadraticLsData {
    pub fn new(a: impl Into<Matrix>, y: Vec<f64>) -> Result<Self> {
        let a = a.into();
        if a.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: y.len(),
            });
        }
        Ok(Self { a, y })
    }
}

/// `(1/m) Σ log(1 + exp(−yᵢ zᵢᵀx))` with labels in {−1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticData {
    pub z: Matrix,
    pub labels: Vec<f64>,
}

impl LogisticData {
    pub fn new(z: impl Into<Matrix>, labels: Vec<f64>) -> Result<Self> {
        let z = z.into();
        if z.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: z.nrows(),
                got: labels.len(),
            });
        }
        if let Some((i, l)) = labels
            .iter()
            .enumerate()
            .find(|(_, l)| **l != 1.0 && **l != -1.0)
        {
            return Err(Error::Label {
                line: i + 1,
                label: l.to_string(),
            });
        }
        Ok(Self { z, labels })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.z.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    QuadraticLs(QuadraticLsData),
    Logistic(LogisticData),
    /// `f(x) = x²` on ℝ¹.
    Scalar1D,
}

/// `log(1 + exp(−u))` without overflow.
fn softplus_neg(u: f64) -> f64 {
    if u >= 0.0 {
        (-u).exp().ln_1p()
    } else {
        -u + u.exp().ln_1p()
    }
}

/// Logistic sigmoid `1 / (1 + exp(−v))` without overflow.
fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

impl Objective {
    pub fn dim(&self) -> usize {
        match self {
            Objective::QuadraticLs(d) => d.a.ncols(),
            Objective::Logistic(d) => d.z.ncols(),
            Objective::Scalar1D => 1,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Objective::QuadraticLs(_) => "quadratic_ls",
            Objective::Logistic(_) => "logistic",
            Objective::Scalar1D => "scalar1d",
        }
    }

    fn check(&self, x: &[f64]) {
        assert_eq!(
            x.len(),
            self.dim(),
            "objective evaluated at wrong dimension"
        );
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.value_and_gradient(x).0
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_and_gradient(x).1
    }

    /// Value and gradient sharing one pass over the data.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.check(x);
        match self {
            Objective::QuadraticLs(d) => {
                let r: Vec<f64> =
                    d.a.matvec(x)
                        .into_iter()
                        .zip(&d.y)
                        .map(|(ax, y)| ax - y)
                        .collect();
                (0.5 * dot(&r, &r), d.a.tmatvec(&r))
            }
            Objective::Logistic(d) => {
                let m = d.n_samples() as f64;
                let mut value = 0.0;
                let mut grad = vec![0.0; d.n_features()];
                for (i, &y) in d.labels.iter().enumerate() {
                    let u = y * d.z.row_dot(i, x);
                    value += softplus_neg(u);
                    let w = -y * sigmoid(-u) / m;
                    if w != 0.0 {
                        d.z.add_row_scaled(i, w, &mut grad);
                    }
                }
                (value / m, grad)
            }
            Objective::Scalar1D => (x[0] * x[0], vec![2.0 * x[0]]),
        }
    }

    /// Estimate of the smoothness constant.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            Objective::QuadraticLs(d) => d.a.spectral_norm_sq(POWER_ITERS, POWER_SEED),
            Objective::Logistic(d) => {
                d.z.spectral_norm_sq(POWER_ITERS, POWER_SEED) / (4.0 * d.n_samples() as f64)
            }
            Objective::Scalar1D => 2.0,
        }
    }

    /// Duality gap `∇f(x)ᵀ(x − s)` together with the oracle atom `s`.
    pub fn gap(&self, domain: &DomainSet, x: &[f64]) -> Result<(f64, Atom)> {
        let g = self.gradient(x);
        gap_from_gradient(domain, x, &g)
    }
}

/// Duality gap at `x` for a precomputed gradient.
///
/// Negative values within rounding of the terms involved are clamped to
/// zero; anything below that means the oracle returned a non-minimizer.
pub fn gap_from_gradient(domain: &DomainSet, x: &[f64], g: &[f64]) -> Result<(f64, Atom)> {
    let s = domain.lmo(g)?;
    Ok((clamp_gap(x, g, &s.vector)?, s))
}

pub(crate) fn clamp_gap(x: &[f64], g: &[f64], s: &[f64]) -> Result<f64> {
    let mut gap = 0.0;
    let mut scale = 0.0;
    for ((xi, gi), si) in x.iter().zip(g).zip(s) {
        gap += gi * (xi - si);
        scale += (gi * xi).abs() + (gi * si).abs();
    }
    if gap >= 0.0 {
        return Ok(gap);
    }
    if gap >= -1e-12 * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::BrokenOracle { gap })
    }
}
