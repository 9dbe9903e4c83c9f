//! Shared fixtures for unit tests: the paper-fig3 correlation profile and
//! small random-sample helpers.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{exp_correlation, to_complex, CMatrix, CorrelationSet};
use crate::constellation::{
    difference_classes, enumerate_vectors, make_constellation, ConstellationKind,
};
use crate::lift::{build_quadratics, LiftedQuadratics, DEFAULT_MATRIX_MEMORY_CAP};

pub(crate) fn cm(rho: f64, n: usize) -> CMatrix {
    to_complex(&exp_correlation(rho, n).unwrap())
}

/// Correlation profile of the built-in BPSK convergence scenario.
pub(crate) fn fig3_corr() -> CorrelationSet {
    CorrelationSet::new(
        cm(0.3, 2),
        cm(0.6, 2),
        [cm(0.95, 2), cm(0.85, 2)],
        [cm(0.4, 2), cm(0.95, 2)],
        vec![cm(0.5, 2)],
        vec![[cm(0.3, 2), cm(0.5, 2)]],
    )
    .unwrap()
}

/// Lifted quadratics of the paper-fig3 scenario with the given modulation.
pub(crate) fn fig3_quad(kind: ConstellationKind) -> LiftedQuadratics {
    let corr = fig3_corr();
    let c = make_constellation(kind);
    let en = enumerate_vectors(&c, &c, 2, 2, 4096).unwrap();
    let classes = difference_classes(&en);
    build_quadratics(
        &corr,
        &en,
        &classes,
        [2.0, 2.0],
        vec![0.2],
        0.1,
        0.1,
        DEFAULT_MATRIX_MEMORY_CAP,
    )
    .unwrap()
}

/// Single-antenna-per-transmitter BPSK instance: n = 4, small enough for
/// grid-search oracles.
pub(crate) fn tiny_quad() -> LiftedQuadratics {
    let one = |r: f64| cm(r, 1);
    let corr = CorrelationSet::new(
        cm(0.3, 2),
        cm(0.6, 2),
        [one(0.0), one(0.0)],
        [one(0.0), one(0.0)],
        vec![cm(0.5, 2)],
        vec![[one(0.0), one(0.0)]],
    )
    .unwrap();
    let c = make_constellation(ConstellationKind::Bpsk);
    let en = enumerate_vectors(&c, &c, 1, 1, 4096).unwrap();
    let classes = difference_classes(&en);
    build_quadratics(
        &corr,
        &en,
        &classes,
        [2.0, 2.0],
        vec![0.2],
        0.1,
        0.1,
        DEFAULT_MATRIX_MEMORY_CAP,
    )
    .unwrap()
}

pub(crate) fn random_p(dim: usize, rng: &mut ChaCha8Rng, scale: f64) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| (rng.random::<f64>() - 0.5) * 2.0 * scale)
}

/// Feasible precoder vector: a random direction scaled onto (slack = 1) or
/// inside (slack > 1) the boundary of the tightest budget constraint.
pub(crate) fn random_feasible_p(
    quad: &LiftedQuadratics,
    rng: &mut ChaCha8Rng,
    slack: f64,
) -> DVector<f64> {
    let raw = random_p(quad.dim, rng, 1.0);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        worst = worst.max((raw.transpose() * &quad.c[i] * &raw)[(0, 0)] / quad.beta[i]);
    }
    for (dj, &gj) in quad.d.iter().zip(&quad.gamma) {
        worst = worst.max((raw.transpose() * dj * &raw)[(0, 0)] / gj);
    }
    raw / (worst * slack).sqrt().max(1e-12)
}

pub(crate) fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| (rng.random::<f64>() - 0.5) * 0.4);
    &m * m.transpose()
}
