//! Step-size and averaging schedules.
//!
//! `γ_k = c/(c+k)` drives the iterate and `β_k = (c/(c+k))^p` drives the
//! averaged atom. Iterations count from `k = 0`, so `β_0 = 1` and the
//! averaged atom starts out equal to the first oracle output.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    c: f64,
    p: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { c: 3.0, p: 1.0 }
    }
}

impl Schedule {
    pub fn new(c: f64, p: f64) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::config(format!("schedule c must be >= 1, got {c}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::config(format!(
                "schedule p must lie in (0, 1], got {p}"
            )));
        }
        Ok(Self { c, p })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn gamma(&self, k: u64) -> f64 {
        self.gamma_t(k as f64)
    }

    pub fn beta(&self, k: u64) -> f64 {
        self.beta_t(k as f64)
    }

    pub fn gamma_t(&self, t: f64) -> f64 {
        self.c / (self.c + t)
    }

    pub fn beta_t(&self, t: f64) -> f64 {
        let g = self.gamma_t(t);
        if self.p == 1.0 {
            g
        } else {
            g.powf(self.p)
        }
    }

    /// Weights `w_{k,i}` with `s̄_k = Σᵢ w_{k,i} s_i`, i.e.
    /// `w_{k,i} = β_i Π_{j=i+1..k} (1 − β_j)`.
    pub fn unrolled_weights(&self, k: u64) -> WeightVector {
        let len = k as usize + 1;
        let mut weights = vec![0.0; len];
        let mut tail = 1.0;
        for i in (0..len).rev() {
            let b = self.beta(i as u64);
            weights[i] = b * tail;
            tail *= 1.0 - b;
        }
        WeightVector { k, weights }
    }

    /// `α(t) = c^p (c+t)^{1−p} / (1−p)`, an antiderivative of `β(t)`.
    pub fn alpha_t(&self, t: f64) -> Result<f64> {
        if self.p == 1.0 {
            return Err(Error::WrongBranch);
        }
        Ok(self.c.powf(self.p) * (self.c + t).powf(1.0 - self.p) / (1.0 - self.p))
    }

    /// Closed-form `s̄(t)` for `ṡ̄ = β(t)(1 − s̄)`, `s̄(0) = 0`.
    pub fn accumulation(&self, t: f64) -> f64 {
        if self.p == 1.0 {
            1.0 - self.gamma_t(t).powf(self.c)
        } else {
            let a0 = self.alpha_t(0.0).expect("p != 1");
            let at = self.alpha_t(t).expect("p != 1");
            -(a0 - at).exp_m1()
        }
    }
}

/// Unrolled averaging weights for iteration `k` (entry `i` multiplies `s_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub k: u64,
    pub weights: Vec<f64>,
}

impl WeightVector {
    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σᵢ w_i · atoms[i]`; `atoms` must hold `k + 1` equal-length vectors.
    pub fn apply(&self, atoms: &[Vec<f64>]) -> Vec<f64> {
        assert_eq!(atoms.len(), self.weights.len());
        let n = atoms.first().map_or(0, Vec::len);
        let mut out = vec![0.0; n];
        for (w, a) in self.weights.iter().zip(atoms) {
            for (o, v) in out.iter_mut().zip(a) {
                *o += w * v;
            }
        }
        out
    }
}
