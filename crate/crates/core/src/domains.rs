//! Constraint sets and their linear minimization oracles.
//!
//! Vertex ids:
//! - `L1Ball`: `+(i+1)` for `+α·e_i`, `-(i+1)` for `-α·e_i`.
//! - `Simplex`: `i` for `α·e_i`.
//! - `Box`: bitmask with bit `i` set when coordinate `i` is `+α` (only for `n <= 62`).
//! - `L2Ball`: none.
//!
//! Ties go to the lowest index. For sign choices (L1 and Box) a zero
//! gradient coordinate resolves to `+α`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm1, norm2};

/// Largest dimension for which box corners get a vertex id.
const BOX_ID_MAX_DIM: usize = 62;
/// Largest dimension for exhaustive box-corner enumeration.
const BOX_ENUM_MAX_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    L1Ball,
    Simplex,
    Box,
    L2Ball,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::L1Ball => "l1ball",
            DomainKind::Simplex => "simplex",
            DomainKind::Box => "box",
            DomainKind::L2Ball => "l2ball",
        }
    }

    pub fn is_polyhedral(self) -> bool {
        !matches!(self, DomainKind::L2Ball)
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1ball" | "l1" => Ok(DomainKind::L1Ball),
            "simplex" => Ok(DomainKind::Simplex),
            "box" => Ok(DomainKind::Box),
            "l2ball" | "l2" => Ok(DomainKind::L2Ball),
            other => Err(Error::config(format!("unknown domain kind {other:?}"))),
        }
    }
}

/// An extremal point returned by an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub vector: Vec<f64>,
    pub vertex_id: Option<i64>,
}

/// A compact convex constraint set: `{‖x‖₁ ≤ α}`, `{x ≥ 0, Σx = α}`,
/// `[-α, α]ⁿ` or `{‖x‖₂ ≤ α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSet {
    kind: DomainKind,
    radius: f64,
    dim: usize,
}

impl DomainSet {
    pub fn new(kind: DomainKind, radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::config(format!(
                "domain radius must be positive, got {radius}"
            )));
        }
        if dim == 0 {
            return Err(Error::config("domain dimension must be at least 1"));
        }
        Ok(Self { kind, radius, dim })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.kind, radius, self.dim)
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Linear minimization oracle: a minimizer of `gᵀs` over the set.
    pub fn lmo(&self, g: &[f64]) -> Result<Atom> {
        self.check_len(g)?;
        let a = self.radius;
        let n = self.dim;
        match self.kind {
            DomainKind::L1Ball => {
                let mut best = 0;
                let mut best_abs = g[0].abs();
                for (i, v) in g.iter().enumerate().skip(1) {
                    if v.abs() > best_abs {
                        best = i;
                        best_abs = v.abs();
                    }
                }
                Ok(self.l1_vertex(best, g[best] <= 0.0))
            }
            DomainKind::Simplex => {
                let mut best = 0;
                for (i, v) in g.iter().enumerate().skip(1) {
                    if *v < g[best] {
                        best = i;
                    }
                }
                Ok(self.simplex_vertex(best))
            }
            DomainKind::Box => {
                let mut vector = vec![0.0; n];
                let mut mask: u64 = 0;
                for (i, v) in g.iter().enumerate() {
                    if *v > 0.0 {
                        vector[i] = -a;
                    } else {
                        vector[i] = a;
                        if i < 64 {
                            mask |= 1 << i;
                        }
                    }
                }
                let vertex_id = (n <= BOX_ID_MAX_DIM).then_some(mask as i64);
                Ok(Atom { vector, vertex_id })
            }
            DomainKind::L2Ball => {
                let norm = norm2(g);
                if norm == 0.0 {
                    return Err(Error::DegenerateGradient);
                }
                Ok(Atom {
                    vector: g.iter().map(|v| -a * v / norm).collect(),
                    vertex_id: None,
                })
            }
        }
    }

    /// Exhaustive oracle over the vertex list, with the same tie-break as [`lmo`](Self::lmo).
    pub fn lmo_bruteforce(&self, g: &[f64]) -> Result<Atom> {
        self.check_len(g)?;
        let vertices = self.vertices()?;
        let mut best: Option<(f64, Atom)> = None;
        for v in vertices {
            let val = dot(g, &v.vector);
            match &best {
                Some((b, _)) if val >= *b => {}
                _ => best = Some((val, v)),
            }
        }
        Ok(best.expect("vertex list is nonempty").1)
    }

    /// All extremal vertices in canonical tie-break order.
    pub fn vertices(&self) -> Result<Vec<Atom>> {
        match self.kind {
            DomainKind::L1Ball => Ok((0..self.dim)
                .flat_map(|i| [self.l1_vertex(i, true), self.l1_vertex(i, false)])
                .collect()),
            DomainKind::Simplex => Ok((0..self.dim).map(|i| self.simplex_vertex(i)).collect()),
            DomainKind::Box => {
                if self.dim > BOX_ENUM_MAX_DIM {
                    return Err(Error::config(format!(
                        "box corner enumeration limited to n <= {BOX_ENUM_MAX_DIM}"
                    )));
                }
                // Descending masks so that ties resolve toward +α like `lmo`.
                Ok((0..1u64 << self.dim)
                    .rev()
                    .map(|mask| self.box_vertex(mask))
                    .collect())
            }
            DomainKind::L2Ball => Err(Error::UnsupportedKind(self.kind.name())),
        }
    }

    /// Reconstructs the vertex for a vertex id, if the id is valid.
    pub fn vertex(&self, id: i64) -> Option<Atom> {
        match self.kind {
            DomainKind::L1Ball => {
                let i = id.unsigned_abs() as usize;
                (id != 0 && i <= self.dim).then(|| self.l1_vertex(i - 1, id > 0))
            }
            DomainKind::Simplex => {
                (id >= 0 && (id as usize) < self.dim).then(|| self.simplex_vertex(id as usize))
            }
            DomainKind::Box => {
                (self.dim <= BOX_ID_MAX_DIM && id >= 0 && (id as u64) < (1u64 << self.dim))
                    .then(|| self.box_vertex(id as u64))
            }
            DomainKind::L2Ball => None,
        }
    }

    fn l1_vertex(&self, i: usize, positive: bool) -> Atom {
        let mut vector = vec![0.0; self.dim];
        vector[i] = if positive { self.radius } else { -self.radius };
        let id = i as i64 + 1;
        Atom {
            vector,
            vertex_id: Some(if positive { id } else { -id }),
        }
    }

    fn simplex_vertex(&self, i: usize) -> Atom {
        let mut vector = vec![0.0; self.dim];
        vector[i] = self.radius;
        Atom {
            vector,
            vertex_id: Some(i as i64),
        }
    }

    fn box_vertex(&self, mask: u64) -> Atom {
        let vector = (0..self.dim)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    self.radius
                } else {
                    -self.radius
                }
            })
            .collect();
        Atom {
            vector,
            vertex_id: Some(mask as i64),
        }
    }

    /// Membership test with additive tolerance on the defining constraint.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let a = self.radius;
        match self.kind {
            DomainKind::L1Ball => norm1(x) <= a + tol,
            DomainKind::Simplex => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - a).abs() <= tol
            }
            DomainKind::Box => x.iter().all(|v| v.abs() <= a + tol),
            DomainKind::L2Ball => norm2(x) <= a + tol,
        }
    }

    /// Largest Euclidean distance between two points of the set.
    pub fn diameter(&self) -> f64 {
        let a = self.radius;
        match self.kind {
            DomainKind::L1Ball | DomainKind::L2Ball => 2.0 * a,
            DomainKind::Simplex => {
                if self.dim == 1 {
                    0.0
                } else {
                    std::f64::consts::SQRT_2 * a
                }
            }
            DomainKind::Box => 2.0 * a * (self.dim as f64).sqrt(),
        }
    }
}
