//! Problem generators, scripted averaging runs, and svmlight ingestion.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::domains::{Atom, DomainKind, DomainSet};
use crate::error::{Error, Result};
use crate::linalg::{dist2, norm1, norm2, CsrMatrix, DenseMatrix, Matrix};
use crate::objectives::{LogisticData, Objective, QuadraticLsData};
use crate::schedules::Schedule;
use crate::solvers::{History, IterateTrace, SolverState, TraceRow, Variant};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    DenseMatrix::from_row_major(rows, cols, data).expect("sized by construction")
}

/// Compressed-sensing instance: `y = A x₀ + z` with Gaussian `A` and a
/// sparse Gaussian `x₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCsSpec {
    pub n_features: usize,
    pub m_measurements: usize,
    pub sparsity_frac: f64,
    /// Standard deviation of the additive noise.
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SyntheticCsSpec {
    fn default() -> Self {
        Self {
            n_features: 500,
            m_measurements: 100,
            sparsity_frac: 0.10,
            noise_std: 0.05,
            seed: 0,
        }
    }
}

impl SyntheticCsSpec {
    pub fn noiseless(seed: u64) -> Self {
        Self {
            noise_std: 0.0,
            seed,
            ..Self::default()
        }
    }

    pub fn nonzeros(&self) -> usize {
        ((self.sparsity_frac * self.n_features as f64).round() as usize).clamp(1, self.n_features)
    }

    fn validate(&self) -> Result<()> {
        if self.n_features == 0 || self.m_measurements == 0 {
            return Err(Error::config(
                "compressed-sensing dimensions must be at least 1",
            ));
        }
        if !(self.sparsity_frac > 0.0 && self.sparsity_frac <= 1.0) {
            return Err(Error::config("sparsity_frac must lie in (0, 1]"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::config("noise_std must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsInstance {
    pub objective: Objective,
    pub ground_truth: Vec<f64>,
}

impl CsInstance {
    pub fn l1_domain(&self, alpha: f64) -> Result<DomainSet> {
        DomainSet::new(DomainKind::L1Ball, alpha, self.ground_truth.len())
    }

    pub fn ground_truth_l1(&self) -> f64 {
        norm1(&self.ground_truth)
    }

    pub fn ground_truth_support(&self) -> Vec<usize> {
        self.ground_truth
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn generate_cs(spec: &SyntheticCsSpec) -> Result<CsInstance> {
    spec.validate()?;
    let (m, n) = (spec.m_measurements, spec.n_features);
    let mut rng = rng(spec.seed);
    let a = gaussian_matrix(&mut rng, m, n);
    let mut positions = index::sample(&mut rng, n, spec.nonzeros()).into_vec();
    positions.sort_unstable();
    let mut x0 = vec![0.0; n];
    for &i in &positions {
        let mut v: f64 = rng.sample(StandardNormal);
        while v == 0.0 {
            v = rng.sample(StandardNormal);
        }
        x0[i] = v;
    }
    let a = Matrix::Dense(a);
    let mut y = a.matvec(&x0);
    if spec.noise_std > 0.0 {
        let noise = Normal::new(0.0, spec.noise_std).expect("validated std");
        for yi in &mut y {
            *yi += noise.sample(&mut rng);
        }
    }
    Ok(CsInstance {
        objective: Objective::QuadraticLs(QuadraticLsData { a, y }),
        ground_truth: x0,
    })
}

/// Quadratic `½‖Ax − y‖²` with `y = A x_unc`, so the unconstrained
/// minimizer `x_unc` is known exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct L2BallInstance {
    pub objective: Objective,
    pub domain: DomainSet,
    pub x_unconstrained: Vec<f64>,
}

impl L2BallInstance {
    pub fn unconstrained_norm(&self) -> f64 {
        norm2(&self.x_unconstrained)
    }

    /// `x_unc` lies strictly outside the ball.
    pub fn is_boundary_regime(&self) -> bool {
        self.unconstrained_norm() > self.domain.radius()
    }
}

const L2_ROWS: usize = 12;
const L2_COLS: usize = 6;

pub fn generate_l2ball_quadratic(alpha: f64, seed: u64) -> Result<L2BallInstance> {
    let domain = DomainSet::new(DomainKind::L2Ball, alpha, L2_COLS)?;
    let mut rng = rng(seed);
    let a = gaussian_matrix(&mut rng, L2_ROWS, L2_COLS);
    let x_unc: Vec<f64> = (0..L2_COLS).map(|_| rng.sample(StandardNormal)).collect();
    let a = Matrix::Dense(a);
    let y = a.matvec(&x_unc);
    Ok(L2BallInstance {
        objective: Objective::QuadraticLs(QuadraticLsData { a, y }),
        domain,
        x_unconstrained: x_unc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptMode {
    /// `s_k = pool[k mod len]`.
    RepeatingCycle,
    /// `s_k` drawn uniformly from the pool.
    RandomVertex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedTrajectorySpec {
    pub mode: ScriptMode,
    pub vertex_pool: Vec<Atom>,
    pub steps: u64,
    pub seed: u64,
}

/// All `2n` vertices of the ℓ1 ball of radius `alpha`.
pub fn l1_vertex_pool(n: usize, alpha: f64) -> Result<Vec<Atom>> {
    DomainSet::new(DomainKind::L1Ball, alpha, n)?.vertices()
}

/// Runs the averaged `s̄`/`x` updates with atoms taken from a script
/// instead of an oracle. `f_value` and `gap` are zero in the rows.
pub fn run_scripted_averaging(
    spec: &ScriptedTrajectorySpec,
    schedule: &Schedule,
) -> Result<IterateTrace> {
    let pool = &spec.vertex_pool;
    let n = pool
        .first()
        .ok_or_else(|| Error::config("vertex pool is empty"))?
        .vector
        .len();
    if pool.iter().any(|a| a.vector.len() != n) {
        return Err(Error::config("vertex pool atoms differ in dimension"));
    }
    let radius = pool.iter().map(|a| norm1(&a.vector)).fold(0.0, f64::max);
    if radius <= 0.0 {
        return Err(Error::config("vertex pool spans only the origin"));
    }
    let mut rng = rng(spec.seed);
    let mut x = vec![0.0; n];
    let mut s_bar = vec![0.0; n];
    let mut rows = Vec::with_capacity(spec.steps as usize);
    let mut atom_ids = Vec::with_capacity(spec.steps as usize);
    let mut last = None;
    for k in 0..spec.steps {
        let atom = match spec.mode {
            ScriptMode::RepeatingCycle => &pool[(k % pool.len() as u64) as usize],
            ScriptMode::RandomVertex => &pool[rng.random_range(0..pool.len())],
        };
        let gamma = schedule.gamma(k);
        let beta = schedule.beta(k);
        for (b, s) in s_bar.iter_mut().zip(&atom.vector) {
            *b += beta * (s - *b);
        }
        rows.push(TraceRow {
            k,
            f_value: 0.0,
            gap: 0.0,
            disc_err: dist2(&s_bar, &x),
            gamma,
            beta,
            atom_id: atom.vertex_id,
        });
        atom_ids.push(atom.vertex_id);
        for (xi, b) in x.iter_mut().zip(&s_bar) {
            *xi += gamma * (b - *xi);
        }
        last = Some(atom.clone());
    }
    Ok(IterateTrace {
        variant: Variant::AvgFw,
        domain_kind: DomainKind::L1Ball,
        rows,
        start_k: 0,
        atom_ids,
        history: None::<History>,
        state: SolverState {
            k: spec.steps,
            x,
            s_last: last,
            s_bar,
        },
    })
}

/// Sparse ±1 classification data with a planted sparse separator.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLogisticSpec {
    pub m_samples: usize,
    pub n_features: usize,
    pub density: f64,
    pub separator_nnz: usize,
    pub seed: u64,
}

impl Default for SparseLogisticSpec {
    fn default() -> Self {
        Self {
            m_samples: 800,
            n_features: 1000,
            density: 0.01,
            separator_nnz: 20,
            seed: 0,
        }
    }
}

pub fn generate_sparse_logistic(spec: &SparseLogisticSpec) -> Result<LogisticData> {
    let (m, n) = (spec.m_samples, spec.n_features);
    if m == 0 || n == 0 {
        return Err(Error::config("logistic dimensions must be at least 1"));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::config("density must lie in (0, 1]"));
    }
    let mut rng = rng(spec.seed);
    let mut w = vec![0.0; n];
    for i in index::sample(&mut rng, n, spec.separator_nnz.clamp(1, n)) {
        w[i] = rng.sample(StandardNormal);
    }
    let mut indptr = vec![0];
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let mut margin = 0.0;
        for (j, wj) in w.iter().enumerate() {
            if rng.random::<f64>() < spec.density {
                let v: f64 = rng.sample(StandardNormal);
                indices.push(j);
                values.push(v);
                margin += v * wj;
            }
        }
        indptr.push(indices.len());
        let noise: f64 = 0.1 * rng.sample::<f64, _>(StandardNormal);
        labels.push(if margin + noise >= 0.0 { 1.0 } else { -1.0 });
    }
    let z = CsrMatrix::new(m, n, indptr, indices, values)?;
    LogisticData::new(z, labels)
}

/// Reads svmlight/libsvm text: `label idx:val idx:val ...` with 1-based
/// indices. Labels `0`/`1` map to `-1`/`+1`. Text after `#` is ignored.
pub fn load_svmlight(
    path: impl AsRef<Path>,
    n_features_hint: Option<usize>,
) -> Result<LogisticData> {
    let file = std::fs::File::open(path)?;
    parse_svmlight(file, n_features_hint)
}

pub fn parse_svmlight(reader: impl Read, n_features_hint: Option<usize>) -> Result<LogisticData> {
    let mut indptr = vec![0];
    let mut indices: Vec<usize> = Vec::new();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut n_cols = n_features_hint.unwrap_or(0);

    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = lineno + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line");
        labels.push(parse_label(label_tok, line_no)?);

        let row_start = indices.len();
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected idx:value, got {tok:?}"),
            })?;
            if idx == "qid" {
                continue;
            }
            let idx: usize = idx.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad feature index {idx:?}"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "feature indices are 1-based".into(),
                });
            }
            let val: f64 = val.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad feature value {val:?}"),
            })?;
            indices.push(idx - 1);
            values.push(val);
        }
        sort_row(&mut indices[row_start..], &mut values[row_start..]);
        if indices[row_start..].windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse {
                line: line_no,
                msg: "duplicate feature index".into(),
            });
        }
        if let Some(&last) = indices[row_start..].last() {
            n_cols = n_cols.max(last + 1);
        }
        indptr.push(indices.len());
    }
    let rows = labels.len();
    let z = CsrMatrix::new(rows, n_cols, indptr, indices, values)?;
    LogisticData::new(z, labels)
}

fn parse_label(tok: &str, line: usize) -> Result<f64> {
    let err = || Error::Label {
        line,
        label: tok.to_string(),
    };
    let v: f64 = tok.parse().map_err(|_| err())?;
    if v == 1.0 {
        Ok(1.0)
    } else if v == -1.0 || v == 0.0 {
        Ok(-1.0)
    } else {
        Err(err())
    }
}

fn sort_row(indices: &mut [usize], values: &mut [f64]) {
    if indices.windows(2).all(|w| w[0] < w[1]) {
        return;
    }
    let mut pairs: Vec<(usize, f64)> = indices
        .iter()
        .copied()
        .zip(values.iter().copied())
        .collect();
    pairs.sort_by_key(|p| p.0);
    for (k, (i, v)) in pairs.into_iter().enumerate() {
        indices[k] = i;
        values[k] = v;
    }
}

/// Writes svmlight text; values use shortest round-trip formatting so that
/// reading back is lossless.
pub fn write_svmlight(mut w: impl Write, data: &LogisticData) -> Result<()> {
    let csr = match &data.z {
        Matrix::Sparse(m) => std::borrow::Cow::Borrowed(m),
        Matrix::Dense(m) => std::borrow::Cow::Owned(m.to_csr()),
    };
    for (i, label) in data.labels.iter().enumerate() {
        w.write_all(if *label > 0.0 { b"+1" } else { b"-1" })?;
        let (idx, vals) = csr.row(i);
        for (j, v) in idx.iter().zip(vals) {
            write!(w, " {}:{}", j + 1, v)?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_svmlight(path: impl AsRef<Path>, data: &LogisticData) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_svmlight(&mut w, data)?;
    w.flush()?;
    Ok(())
}

/// Seeded random split: `⌊frac·m⌋` rows for training, the rest for validation.
pub fn train_val_split(
    data: &LogisticData,
    frac: f64,
    seed: u64,
) -> Result<(LogisticData, LogisticData)> {
    if !(frac > 0.0 && frac < 1.0) {
        return Err(Error::config(format!(
            "split fraction must lie in (0, 1), got {frac}"
        )));
    }
    let m = data.n_samples();
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut rng(seed));
    let n_train = ((frac * m as f64) + 1e-9).floor() as usize;
    let (train, val) = perm.split_at(n_train);
    Ok((select_rows(data, train)?, select_rows(data, val)?))
}

fn select_rows(data: &LogisticData, rows: &[usize]) -> Result<LogisticData> {
    let z = match &data.z {
        Matrix::Sparse(m) => m.select_rows(rows),
        Matrix::Dense(m) => m.to_csr().select_rows(rows),
    };
    LogisticData::new(z, rows.iter().map(|&r| data.labels[r]).collect())
}

/// `count` points spaced evenly in log space from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{fit_rate, Series};

    #[test]
    fn cs_is_seed_deterministic() {
        let spec = SyntheticCsSpec::default();
        assert_eq!(generate_cs(&spec).unwrap(), generate_cs(&spec).unwrap());
        let other = SyntheticCsSpec { seed: 1, ..spec };
        assert_ne!(generate_cs(&other).unwrap(), generate_cs(&spec).unwrap());
    }

    #[test]
    fn cs_default_has_fifty_nonzeros() {
        let inst = generate_cs(&SyntheticCsSpec::default()).unwrap();
        assert_eq!(inst.ground_truth_support().len(), 50);
        assert_eq!(inst.objective.dim(), 500);
        if let Objective::QuadraticLs(d) = &inst.objective {
            assert_eq!(d.a.nrows(), 100);
        }
    }

    #[test]
    fn cs_noiseless_has_zero_residual_at_truth() {
        let inst = generate_cs(&SyntheticCsSpec::noiseless(4)).unwrap();
        assert!(inst.objective.value(&inst.ground_truth) < 1e-20);
    }

    #[test]
    fn l2_instance_reproducible() {
        let a = generate_l2ball_quadratic(1.0, 9).unwrap();
        assert_eq!(a, generate_l2ball_quadratic(1.0, 9).unwrap());
        let g = a.objective.gradient(&a.x_unconstrained);
        assert!(norm2(&g) < 1e-10);
    }

    #[test]
    fn single_vertex_script_collapses() {
        let pool = vec![l1_vertex_pool(2, 1.0).unwrap()[0].clone()];
        let spec = ScriptedTrajectorySpec {
            mode: ScriptMode::RandomVertex,
            vertex_pool: pool,
            steps: 10_000,
            seed: 3,
        };
        let tr = run_scripted_averaging(&spec, &Schedule::default()).unwrap();
        assert!(tr.last_row().disc_err < 1e-2);
    }

    #[test]
    fn repeating_cycle_decays() {
        let spec = ScriptedTrajectorySpec {
            mode: ScriptMode::RepeatingCycle,
            vertex_pool: l1_vertex_pool(2, 1.0).unwrap(),
            steps: 10_000,
            seed: 0,
        };
        let tr = run_scripted_averaging(&spec, &Schedule::default()).unwrap();
        let fit = fit_rate(&tr, Series::DiscErr, (100, 10_000)).unwrap();
        assert!(fit.slope <= -0.7, "{}", fit.slope);
    }

    #[test]
    fn empty_pool_rejected() {
        let spec = ScriptedTrajectorySpec {
            mode: ScriptMode::RepeatingCycle,
            vertex_pool: vec![],
            steps: 10,
            seed: 0,
        };
        assert!(run_scripted_averaging(&spec, &Schedule::default()).is_err());
    }

    #[test]
    fn parses_basic_lines() {
        let d = parse_svmlight("+1 3:0.5 7:-2\n-1\n".as_bytes(), None).unwrap();
        assert_eq!(d.n_samples(), 2);
        assert!(d.n_features() >= 7);
        assert_eq!(d.labels, vec![1.0, -1.0]);
        if let Matrix::Sparse(z) = &d.z {
            assert_eq!(z.row(0), (&[2usize, 6][..], &[0.5, -2.0][..]));
            assert_eq!(z.row(1).0.len(), 0);
        }
        assert_eq!(d.z.row_dot(0, &[1.0; 7]), -1.5);
    }

    #[test]
    fn parse_maps_zero_one_labels_and_hint() {
        let d = parse_svmlight("1 1:1\n0 2:1 # trailing\n\n".as_bytes(), Some(10)).unwrap();
        assert_eq!(d.labels, vec![1.0, -1.0]);
        assert_eq!(d.n_features(), 10);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_svmlight("+1 1:1\n+1 2-3\n".as_bytes(), None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_svmlight("+1 1:1\n+1 0:3\n".as_bytes(), None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_svmlight("+1 1:1\n\n3 1:1\n".as_bytes(), None) {
            Err(Error::Label { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_svmlight("+1 1:1 1:2\n".as_bytes(), None).is_err());
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let data = parse_svmlight(
            (1..=10)
                .map(|i| format!("+1 1:{i}\n"))
                .collect::<String>()
                .as_bytes(),
            None,
        )
        .unwrap();
        let (a, b) = train_val_split(&data, 0.6, 5).unwrap();
        assert_eq!((a.n_samples(), b.n_samples()), (6, 4));
        let feats = |d: &LogisticData| -> Vec<i64> {
            (0..d.n_samples())
                .map(|i| d.z.row_dot(i, &[1.0]) as i64)
                .collect()
        };
        let (fa, fb) = (feats(&a), feats(&b));
        assert!(fa.iter().all(|v| !fb.contains(v)));
        let mut all: Vec<i64> = fa.iter().chain(&fb).copied().collect();
        all.sort();
        assert_eq!(all, (1..=10).collect::<Vec<_>>());
        let (a2, _) = train_val_split(&data, 0.6, 5).unwrap();
        assert_eq!(a, a2);
        assert!(train_val_split(&data, 1.0, 5).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1.0, 100.0, 10);
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1.0).abs() < 1e-12 && (g[9] - 100.0).abs() < 1e-9);
    }
}
