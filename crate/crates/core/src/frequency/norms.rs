//! Plancherel pairing and Sobolev-type norms.
//!
//! All values are raw frequency-side sums `Σ |F|² σ w_j`; multiply by
//! [`inverse_plancherel_constant`](super::grid::inverse_plancherel_constant)
//! for physical `L²` normalization.

use num_complex::Complex64;

use super::field::{HorizontalField, SpectralField};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// `(4|λ|(2|m|+d))^ℓ`
    LeftHom,
    /// `(4|λ|(2|n|+d))^ℓ`
    RightHom,
    /// `(1 + 4|λ|(2|m|+d))^ℓ`
    LeftInhom,
    /// `(1 + 4|λ|(2|n|+d))^ℓ`
    RightInhom,
    /// `(1 + 4|λ|(2|m|+d))^ℓ (4|λ|(2|n|+d))^ℓ'`
    Mixed,
}

/// `Σ f conj(g) w_j`.
pub fn inner_product(f: &SpectralField, g: &SpectralField) -> Result<Complex64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let w = grid.weights();
    let nl = grid.n_lambda();
    let mut acc = Complex64::new(0.0, 0.0);
    for (chunk_f, chunk_g) in f.coeffs().chunks(nl).zip(g.coeffs().chunks(nl)) {
        for j in 0..nl {
            acc += chunk_f[j] * chunk_g[j].conj() * w[j];
        }
    }
    Ok(acc)
}

pub fn inner_product_h(u: &HorizontalField, v: &HorizontalField) -> Result<Complex64> {
    if u.len() != v.len() {
        return Err(Error::GridMismatch);
    }
    u.components().iter().zip(v.components()).try_fold(Complex64::new(0.0, 0.0), |acc, (a, b)| {
        Ok(acc + inner_product(a, b)?)
    })
}

/// Squared symbol `σ(n, m, λ)` of the requested norm.
pub fn norm_symbol(kind: NormKind, l: f64, l2: f64, d: usize, deg_n: usize, deg_m: usize, lambda: f64) -> f64 {
    if l == 0.0 && (kind != NormKind::Mixed || l2 == 0.0) {
        return 1.0;
    }
    let a = lambda.abs();
    let left = 4.0 * a * (2 * deg_m + d) as f64;
    let right = 4.0 * a * (2 * deg_n + d) as f64;
    match kind {
        NormKind::LeftHom => left.powf(l),
        NormKind::RightHom => right.powf(l),
        NormKind::LeftInhom => (1.0 + left).powf(l),
        NormKind::RightInhom => (1.0 + right).powf(l),
        NormKind::Mixed => (1.0 + left).powf(l) * right.powf(l2),
    }
}

/// Weighted pairing `Σ f conj(g) σ w_j`.
pub fn sobolev_inner(f: &SpectralField, g: &SpectralField, kind: NormKind, l: f64, l2: Option<f64>) -> Result<Complex64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let l2 = l2.unwrap_or(0.0);
    let side = grid.side();
    let nl = grid.n_lambda();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..side {
        for m in 0..side {
            let base = grid.index(n, m, 0);
            for j in 0..nl {
                let a = f.coeffs()[base + j];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let s = norm_symbol(kind, l, l2, grid.d(), grid.degree(n), grid.degree(m), grid.nodes()[j]);
                acc += a * g.coeffs()[base + j].conj() * (s * grid.weights()[j]);
            }
        }
    }
    Ok(acc)
}

pub fn sobolev_norm_sq(f: &SpectralField, kind: NormKind, l: f64, l2: Option<f64>) -> f64 {
    sobolev_inner(f, f, kind, l, l2).expect("same field").re
}

pub fn sobolev_inner_h(u: &HorizontalField, v: &HorizontalField, kind: NormKind, l: f64, l2: Option<f64>) -> Result<Complex64> {
    u.components().iter().zip(v.components()).try_fold(Complex64::new(0.0, 0.0), |acc, (a, b)| {
        Ok(acc + sobolev_inner(a, b, kind, l, l2)?)
    })
}

pub fn sobolev_norm_sq_h(u: &HorizontalField, kind: NormKind, l: f64, l2: Option<f64>) -> f64 {
    u.components().iter().map(|c| sobolev_norm_sq(c, kind, l, l2)).sum()
}

pub fn l2_norm_sq(f: &SpectralField) -> f64 {
    sobolev_norm_sq(f, NormKind::LeftHom, 0.0, None)
}

pub fn l2_norm_sq_h(u: &HorizontalField) -> f64 {
    sobolev_norm_sq_h(u, NormKind::LeftHom, 0.0, None)
}
