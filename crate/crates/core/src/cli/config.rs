//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [problem]
//! kind = cs
//! alpha_scale = 1.0
//! [solver]
//! variant = avgfw
//! ```
//!
//! Blank lines and lines starting with `#` or `;` are ignored. Keys are
//! unique per section.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::domains::DomainKind;
use crate::error::{Error, Result};
use crate::experiments::{SparseLogisticSpec, SyntheticCsSpec};
use crate::flows::FlowVariant;
use crate::schedules::Schedule;
use crate::solvers::{Variant, X0Policy};

const SECTIONS: [&str; 4] = ["problem", "solver", "flow", "output"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: Vec<(String, String, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut section: Option<String> = None;
        let mut entries: Vec<(String, String, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_ascii_lowercase();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(Error::config(format!(
                        "line {}: unknown section [{name}]",
                        i + 1
                    )));
                }
                section = Some(name);
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value", i + 1)))?;
            let sec = section.clone().ok_or_else(|| {
                Error::config(format!("line {}: key outside of a section", i + 1))
            })?;
            let key = k.trim().to_ascii_lowercase();
            if entries.iter().any(|(s, kk, _)| *s == sec && *kk == key) {
                return Err(Error::config(format!(
                    "line {}: duplicate key {sec}.{key}",
                    i + 1
                )));
            }
            entries.push((sec, key, v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v.as_str())
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.entries.iter().any(|(s, _, _)| s == section)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.entries
            .iter()
            .map(|(s, k, v)| (s.as_str(), k.as_str(), v.as_str()))
    }

    fn parsed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::config(format!("{section}.{key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    fn or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(section, key)?.unwrap_or(default))
    }

    fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(Error::config(format!(
                    "{section}.{key}: expected a boolean, got {v:?}"
                ))),
            },
        }
    }

    /// Rejects keys that no section understands, catching typos.
    fn check_known(&self, known: &[(&str, &[&str])]) -> Result<()> {
        for (s, k, _) in self.entries() {
            let ok = known
                .iter()
                .any(|(sec, keys)| *sec == s && keys.contains(&k));
            if !ok {
                return Err(Error::config(format!("unknown key {s}.{k}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Scalar1D,
    CompressedSensing(SyntheticCsSpec),
    L2Ball {
        seed: u64,
    },
    Svmlight {
        path: PathBuf,
        n_features_hint: Option<usize>,
    },
    SyntheticLogistic(SparseLogisticSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Radius {
    Absolute(f64),
    /// Multiple of the instance's natural scale (`‖x₀‖₁` for compressed
    /// sensing, `‖x_unc‖₂` for the ℓ2-ball quadratic).
    Scaled(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub source: ProblemSource,
    pub domain: DomainKind,
    pub radius: Radius,
    pub val_frac: Option<f64>,
    pub alpha_sweep: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub variant: Variant,
    pub schedule: Schedule,
    pub max_iters: u64,
    pub trace_every: u64,
    pub x0: X0Policy,
    pub reference_iters: Option<u64>,
    pub fit_window: Option<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSection {
    pub variant: FlowVariant,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: f64,
    pub forced_signal: Option<f64>,
    pub f_ref: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub emit_plots: bool,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub solver: SolverSection,
    pub flow: Option<FlowSection>,
    pub output: OutputSection,
    pub raw: RawConfig,
}

const PROBLEM_KEYS: &[&str] = &[
    "kind",
    "domain",
    "alpha",
    "alpha_scale",
    "seed",
    "n_features",
    "m_measurements",
    "sparsity_frac",
    "noise_std",
    "path",
    "n_features_hint",
    "m_samples",
    "density",
    "separator_nnz",
    "val_frac",
    "alpha_sweep",
];
const SOLVER_KEYS: &[&str] = &[
    "variant",
    "c",
    "p",
    "max_iters",
    "trace_every",
    "x0",
    "reference_iters",
    "fit_lo",
    "fit_hi",
];
const FLOW_KEYS: &[&str] = &[
    "variant",
    "dt",
    "t_end",
    "record_every",
    "forced_signal",
    "f_ref",
];
const OUTPUT_KEYS: &[&str] = &["dir", "emit_plots", "seed"];

impl RunConfig {
    /// Loads and validates; `seed_override` replaces every configured seed.
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Self> {
        let raw = RawConfig::load(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_raw(raw, base, seed_override)
    }

    pub fn from_raw(raw: RawConfig, base_dir: &Path, seed_override: Option<u64>) -> Result<Self> {
        raw.check_known(&[
            ("problem", PROBLEM_KEYS),
            ("solver", SOLVER_KEYS),
            ("flow", FLOW_KEYS),
            ("output", OUTPUT_KEYS),
        ])?;
        let output = OutputSection {
            dir: raw.get("output", "dir").map(PathBuf::from),
            emit_plots: raw.bool_or("output", "emit_plots", false)?,
            seed: raw.parsed("output", "seed")?,
        };
        let seed = seed_override
            .or(raw.parsed("problem", "seed")?)
            .or(output.seed)
            .unwrap_or(0);
        let problem = Self::problem(&raw, base_dir, seed)?;
        let solver = Self::solver(&raw)?;
        let flow = if raw.has_section("flow") {
            Some(FlowSection {
                variant: raw.or("flow", "variant", FlowVariant::FwFlow)?,
                dt: raw.or("flow", "dt", 1e-3)?,
                t_end: raw.or("flow", "t_end", 50.0)?,
                record_every: raw.or("flow", "record_every", 1.0)?,
                forced_signal: raw.parsed("flow", "forced_signal")?,
                f_ref: raw.parsed("flow", "f_ref")?,
            })
        } else {
            None
        };
        Ok(Self {
            problem,
            solver,
            flow,
            output,
            raw,
        })
    }

    fn problem(raw: &RawConfig, base_dir: &Path, seed: u64) -> Result<ProblemConfig> {
        let kind = raw
            .get("problem", "kind")
            .ok_or_else(|| Error::config("problem.kind is required"))?
            .to_ascii_lowercase();
        let has_path = raw.get("problem", "path").is_some();
        if has_path != (kind == "svmlight") {
            return Err(Error::config(
                "exactly one problem source: problem.path belongs with kind = svmlight",
            ));
        }
        let (source, default_domain, default_radius) = match kind.as_str() {
            "scalar1d" => (
                ProblemSource::Scalar1D,
                DomainKind::Box,
                Radius::Absolute(1.0),
            ),
            "cs" => {
                let d = SyntheticCsSpec::default();
                let spec = SyntheticCsSpec {
                    n_features: raw.or("problem", "n_features", d.n_features)?,
                    m_measurements: raw.or("problem", "m_measurements", d.m_measurements)?,
                    sparsity_frac: raw.or("problem", "sparsity_frac", d.sparsity_frac)?,
                    noise_std: raw.or("problem", "noise_std", d.noise_std)?,
                    seed,
                };
                (
                    ProblemSource::CompressedSensing(spec),
                    DomainKind::L1Ball,
                    Radius::Scaled(1.0),
                )
            }
            "l2ball" => (
                ProblemSource::L2Ball { seed },
                DomainKind::L2Ball,
                Radius::Scaled(0.5),
            ),
            "svmlight" => {
                let p = PathBuf::from(raw.get("problem", "path").unwrap());
                let path = if p.is_absolute() { p } else { base_dir.join(p) };
                if !path.is_file() {
                    return Err(Error::config(format!(
                        "svmlight file {} does not exist",
                        path.display()
                    )));
                }
                (
                    ProblemSource::Svmlight {
                        path,
                        n_features_hint: raw.parsed("problem", "n_features_hint")?,
                    },
                    DomainKind::L1Ball,
                    Radius::Absolute(10.0),
                )
            }
            "logistic_synth" => {
                let d = SparseLogisticSpec::default();
                let spec = SparseLogisticSpec {
                    m_samples: raw.or("problem", "m_samples", d.m_samples)?,
                    n_features: raw.or("problem", "n_features", d.n_features)?,
                    density: raw.or("problem", "density", d.density)?,
                    separator_nnz: raw.or("problem", "separator_nnz", d.separator_nnz)?,
                    seed,
                };
                (
                    ProblemSource::SyntheticLogistic(spec),
                    DomainKind::L1Ball,
                    Radius::Absolute(10.0),
                )
            }
            other => return Err(Error::config(format!("unknown problem.kind {other:?}"))),
        };
        let radius = match (
            raw.parsed::<f64>("problem", "alpha")?,
            raw.parsed::<f64>("problem", "alpha_scale")?,
        ) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "give problem.alpha or problem.alpha_scale, not both",
                ))
            }
            (Some(a), None) => Radius::Absolute(a),
            (None, Some(s)) => {
                if !matches!(
                    source,
                    ProblemSource::CompressedSensing(_) | ProblemSource::L2Ball { .. }
                ) {
                    return Err(Error::config(
                        "problem.alpha_scale needs kind = cs or l2ball",
                    ));
                }
                Radius::Scaled(s)
            }
            (None, None) => default_radius,
        };
        match radius {
            Radius::Absolute(v) | Radius::Scaled(v) if v.is_nan() || v <= 0.0 => {
                return Err(Error::config("problem radius must be positive"))
            }
            _ => {}
        }
        let domain = raw.or("problem", "domain", default_domain)?;
        if matches!(source, ProblemSource::L2Ball { .. }) && domain != DomainKind::L2Ball {
            return Err(Error::config("kind = l2ball requires domain = l2ball"));
        }
        let val_frac: Option<f64> = raw.parsed("problem", "val_frac")?;
        if let Some(v) = val_frac {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::config("problem.val_frac must lie in (0, 1)"));
            }
            if !matches!(
                source,
                ProblemSource::Svmlight { .. } | ProblemSource::SyntheticLogistic(_)
            ) {
                return Err(Error::config(
                    "problem.val_frac applies to logistic problems only",
                ));
            }
        }
        let alpha_sweep = raw.bool_or("problem", "alpha_sweep", false)?;
        let is_cs = matches!(source, ProblemSource::CompressedSensing(_));
        if alpha_sweep && val_frac.is_none() && !is_cs {
            return Err(Error::config(
                "problem.alpha_sweep needs kind = cs or a validation split (problem.val_frac)",
            ));
        }
        Ok(ProblemConfig {
            source,
            domain,
            radius,
            val_frac,
            alpha_sweep,
        })
    }

    fn solver(raw: &RawConfig) -> Result<SolverSection> {
        let schedule = Schedule::new(raw.or("solver", "c", 3.0)?, raw.or("solver", "p", 1.0)?)?;
        let max_iters: u64 = raw.or("solver", "max_iters", 1000)?;
        let trace_every: u64 = raw.or("solver", "trace_every", 1)?;
        if max_iters < 1 || trace_every < 1 {
            return Err(Error::config(
                "solver.max_iters and solver.trace_every must be >= 1",
            ));
        }
        let x0 = match raw.get("solver", "x0") {
            None => X0Policy::LmoAtOriginGradient,
            Some(v) if v.eq_ignore_ascii_case("lmo") => X0Policy::LmoAtOriginGradient,
            Some(v) => X0Policy::Explicit(
                v.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::config(format!("solver.x0: bad entry {t:?}")))
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        let fit_window = match (
            raw.parsed::<u64>("solver", "fit_lo")?,
            raw.parsed::<u64>("solver", "fit_hi")?,
        ) {
            (None, None) => None,
            (lo, hi) => {
                let lo = lo.unwrap_or(100);
                let hi = hi.unwrap_or(max_iters - 1);
                if lo >= hi {
                    return Err(Error::config("solver.fit_lo must be below solver.fit_hi"));
                }
                Some((lo, hi))
            }
        };
        Ok(SolverSection {
            variant: raw.or("solver", "variant", Variant::AvgFw)?,
            schedule,
            max_iters,
            trace_every,
            x0,
            reference_iters: raw.parsed("solver", "reference_iters")?,
            fit_window,
        })
    }

    /// Rate-fit window: configured, else `[100, max_iters − 1]`, else the
    /// whole run when it is short.
    pub fn fit_window(&self) -> (u64, u64) {
        self.solver.fit_window.unwrap_or_else(|| {
            let hi = self.solver.max_iters.saturating_sub(1).max(2);
            let lo = if hi > 1000 { 100 } else { 1 };
            (lo, hi)
        })
    }
}
