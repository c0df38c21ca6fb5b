#![allow(dead_code)]

use avgfw::experiments::{generate_cs, SyntheticCsSpec};
use avgfw::linalg::DenseMatrix;
use avgfw::{DomainKind, DomainSet, Objective, QuadraticLsData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small noisy compressed-sensing quadratic on an ℓ1 ball at half the
/// ground-truth radius, so the solution sits on a low-dimensional face.
pub fn l1_quadratic() -> (Objective, DomainSet) {
    let spec = SyntheticCsSpec {
        n_features: 40,
        m_measurements: 20,
        sparsity_frac: 0.1,
        noise_std: 0.05,
        seed: 7,
    };
    let inst = generate_cs(&spec).unwrap();
    let d = inst.l1_domain(0.5 * inst.ground_truth_l1()).unwrap();
    (inst.objective, d)
}

pub fn random_dense(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix {
    let data = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::from_row_major(m, n, data).unwrap()
}

pub fn random_quadratic(seed: u64, m: usize, n: usize) -> Objective {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_dense(&mut rng, m, n);
    let y = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
    Objective::QuadraticLs(QuadraticLsData::new(a, y).unwrap())
}

pub fn all_kinds() -> [DomainKind; 4] {
    [
        DomainKind::L1Ball,
        DomainKind::Simplex,
        DomainKind::Box,
        DomainKind::L2Ball,
    ]
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
