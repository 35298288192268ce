//! Reference implementations used to cross-check the fast paths.
//!
//! Everything here works on dense matrices with generic factorizations and
//! evaluates densities directly. Nothing in this module is used by the
//! simulator itself; it backs the test suites and `bscat selftest`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{CMatrix, CVector, ReceivedBlock};

/// Inverse of a Hermitian positive-definite matrix via Cholesky.
pub fn dense_inverse(k: &CMatrix) -> Option<CMatrix> {
    k.clone().cholesky().map(|c| c.inverse())
}

/// `ln|K|` via Cholesky: `2 Σ ln L_ii`.
pub fn dense_logdet(k: &CMatrix) -> Option<f64> {
    k.clone()
        .cholesky()
        .map(|c| 2.0 * c.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>())
}

/// Determinant via LU, real part.
pub fn dense_det(k: &CMatrix) -> f64 {
    k.clone().lu().determinant().re
}

/// `K = v vᴴ + I` assembled densely.
pub fn dense_covariance(v: &CVector) -> CMatrix {
    let m = v.len();
    let mut k = CMatrix::identity(m, m);
    for i in 0..m {
        for j in 0..m {
            k[(i, j)] += v[i] * v[j].conj();
        }
    }
    k
}

/// Single-vector CN(0, K) density, `exp(−yᴴ K⁻¹ y) / (π^M |K|)`, with `K⁻¹`
/// from a generic LU solve.
pub fn density(y: &CVector, k: &CMatrix) -> f64 {
    let m = y.len() as i32;
    let solved = k.clone().lu().solve(y).expect("covariance is nonsingular");
    let quad: Complex64 = y.iter().zip(solved.iter()).map(|(a, b)| a.conj() * b).sum();
    (-quad.re).exp() / (PI.powi(m) * dense_det(k))
}

/// Product of per-row densities: the block likelihood in the linear domain.
pub fn block_likelihood(block: &ReceivedBlock, k: &CMatrix) -> f64 {
    block
        .samples
        .row_iter()
        .map(|row| density(&row.transpose(), k))
        .product()
}

/// Direct likelihood comparison: 1 when `L(Y|1) > L(Y|0)`, else 0.
pub fn naive_decision(block: &ReceivedBlock, k0: &CMatrix, k1: &CMatrix) -> u8 {
    u8::from(block_likelihood(block, k1) > block_likelihood(block, k0))
}

/// Bayes posterior `(P(e=0|Y), P(e=1|Y))` computed straight from the densities.
pub fn naive_posterior(block: &ReceivedBlock, k0: &CMatrix, k1: &CMatrix, prior: f64) -> (f64, f64) {
    let p0 = prior * block_likelihood(block, k0);
    let p1 = (1.0 - prior) * block_likelihood(block, k1);
    (p0 / (p0 + p1), p1 / (p0 + p1))
}
