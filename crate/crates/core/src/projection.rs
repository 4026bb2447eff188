//! Leray projector, `Π_ℍ`, pressure recovery and Friedrichs multipliers.
//!
//! The projector is built from the untruncated divergence: `div` is evaluated
//! on the grid with cutoff `M + 1`, where the ladder overshoot of a field with
//! cutoff `M` is kept exactly. With `D` that map and `D*` its adjoint
//! (`-∇` followed by truncation to `M`), `D D*` is diagonal and
//!
//! `ℙ = Id + ∇ (D D*)^+ div`
//!
//! is the orthogonal projector onto fields whose divergence vanishes as
//! functions on ℍ^d, not only up to the cutoff. On interior bands `D D*`
//! coincides with `-Δ_ℍ`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frequency::norms::{l2_norm_sq, l2_norm_sq_h, sobolev_norm_sq_h, NormKind};
use crate::frequency::{FrequencyGrid, HorizontalField, SpectralField};
use crate::ops::{apply_symbol_h, divergence_h, gradient_h, SymbolSpec};
use crate::sample;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The `2d × 2d` matrix `[[0, 2I], [-2I, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SMatrix {
    pub d: usize,
}

impl SMatrix {
    pub fn new(d: usize) -> Self {
        SMatrix { d }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let d = self.d;
        if i < d && j == i + d {
            2.0
        } else if i >= d && j + d == i {
            -2.0
        } else {
            0.0
        }
    }

    pub fn apply(&self, u: &HorizontalField) -> HorizontalField {
        self.combine(u, 2.0)
    }

    pub fn apply_transpose(&self, u: &HorizontalField) -> HorizontalField {
        self.combine(u, -2.0)
    }

    fn combine(&self, u: &HorizontalField, a: f64) -> HorizontalField {
        let d = self.d;
        let comps = (0..2 * d)
            .map(|i| if i < d { u.component(i + d) * a } else { u.component(i - d) * -a })
            .collect();
        HorizontalField::from_components(comps).expect("same grid")
    }
}

/// Divergence on the grid with cutoff `M + 1`.
pub fn divergence_full(u: &HorizontalField) -> SpectralField {
    let ext = u.grid().with_cutoff(u.grid().m_cut() + 1);
    divergence_h(&u.recut(&ext))
}

/// `(D D*)^+` on the extended grid: per direction `4|λ|(2m_j + 1)` below the
/// cutoff, `4|λ|M` at `m_j = M`, and `4|λ|(M + 1)` alone when `m_j = M + 1`.
fn apply_gram_pinv(phi: &SpectralField, base_cut: usize) -> SpectralField {
    let g = phi.grid().clone();
    let top = base_cut;
    let diag: Vec<f64> = (0..g.side())
        .map(|m| {
            let mi = g.multi_index(m);
            let over = mi.iter().filter(|&&k| k > top).count();
            match over {
                0 => mi.iter().map(|&k| if k < top { (2 * k + 1) as f64 } else { top as f64 }).sum(),
                1 => (top + 1) as f64,
                _ => 0.0,
            }
        })
        .collect();
    phi.map(|_, m, j, c| {
        let v = 4.0 * g.nodes()[j].abs() * diag[m];
        if v > 0.0 && c != ZERO {
            c / v
        } else {
            ZERO
        }
    })
}

/// `(D D*)^+ div u` on the extended grid.
fn potential(u: &HorizontalField) -> SpectralField {
    apply_gram_pinv(&divergence_full(u), u.grid().m_cut())
}

/// `-∇` of an extended-grid scalar, truncated back to `grid`.
pub fn pressure_gradient(p: &SpectralField, grid: &Arc<FrequencyGrid>) -> HorizontalField {
    gradient_h(p).recut(grid)
}

/// `ℙu = u + ∇ (D D*)^+ div u`.
pub fn leray(u: &HorizontalField) -> HorizontalField {
    let mut out = u.clone();
    out += &pressure_gradient(&potential(u), u.grid());
    out
}

/// `Π_ℍ u = 4 (Id − ℙ)(𝔖ᵀ u)`, the operator with
/// `(Id − ℙ)(−Δ_ℍ v) = Π_ℍ ∂_s v` for divergence-free `v`.
pub fn pi_h(u: &HorizontalField) -> HorizontalField {
    let su = SMatrix::new(u.grid().d()).apply_transpose(u);
    let p = leray(&su);
    &(&su - &p) * 4.0
}

/// Relative divergence `‖div u‖ / ‖u‖_{Ḣ¹}` using the untruncated divergence.
pub fn relative_divergence(u: &HorizontalField) -> f64 {
    let num = l2_norm_sq(&divergence_full(u));
    let den = sobolev_norm_sq_h(u, NormKind::LeftHom, 1.0, None);
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Pressure `p` with `-∇p = (Id − ℙ)(−Δ_ℍ u + N)`, returned on the grid with
/// cutoff `M + 1` (its top layer feeds the gradient at `m_j = M`).
pub fn recover_pressure(u: &HorizontalField, nonlinear: &HorizontalField) -> Result<SpectralField> {
    let rel = relative_divergence(u);
    if rel > 1e-8 {
        return Err(Error::Divergence(rel));
    }
    let mut w = apply_symbol_h(u, SymbolSpec::LeftSublapPow(1.0))?;
    w += nonlinear;
    Ok(potential(&w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FriedrichsKind {
    /// `J_k`: band on both `m` and `n`.
    Bi,
    /// `J̃_k`: band on `n` only.
    Right,
}

pub fn friedrichs(f: &SpectralField, k: u32, kind: FriedrichsKind) -> SpectralField {
    let g = f.grid().clone();
    let lo = 2f64.powi(-(k as i32) - 1);
    let hi = 2f64.powi(k as i32);
    let inside = |e: f64| lo <= e && e <= hi;
    f.map(|n, m, j, c| {
        let lam = g.nodes()[j];
        let keep = inside(g.eigenvalue(g.degree(n), lam))
            && (kind == FriedrichsKind::Right || inside(g.eigenvalue(g.degree(m), lam)));
        if keep {
            c
        } else {
            ZERO
        }
    })
}

pub fn friedrichs_h(u: &HorizontalField, k: u32, kind: FriedrichsKind) -> HorizontalField {
    u.map(|c| friedrichs(c, k, kind))
}

/// Smallest `k` with `J_k = Id` on the grid.
pub fn covering_index(grid: &FrequencyGrid) -> u32 {
    let lo = grid.eigenvalue(0, grid.min_abs_lambda());
    let hi = grid.eigenvalue(grid.d() * grid.m_cut(), grid.max_abs_lambda());
    let mut k = 0;
    while 2f64.powi(k as i32) < hi || 2f64.powi(-(k as i32) - 1) > lo {
        k += 1;
    }
    k
}

/// Monte-Carlo estimate of `sup ‖Π_ℍ u‖ / ‖u‖` over random unit fields.
pub fn pi_h_norm_proxy(grid: &Arc<FrequencyGrid>, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let u = sample::horizontal(grid, 0, &mut rng);
            (l2_norm_sq_h(&pi_h(&u)) / l2_norm_sq_h(&u)).sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::norms::inner_product_h;
    use crate::frequency::NodeParams;
    use crate::ops::apply_symbol;
    use std::f64::consts::PI;

    fn grid(d: usize, m: usize) -> Arc<FrequencyGrid> {
        FrequencyGrid::new(d, m, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s: 6 }).unwrap()
    }

    #[test]
    fn s_matrix_algebra() {
        let s = SMatrix::new(2);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.entry(i, j), -s.entry(j, i));
                let sq: f64 = (0..4).map(|k| s.entry(i, k) * s.entry(k, j)).sum();
                assert_eq!(sq, if i == j { -4.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn projector_on_full_band() {
        for d in [1, 2] {
            let g = grid(d, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let u = sample::horizontal(&g, 0, &mut rng);
            let p = leray(&u);
            assert!(relative_divergence(&p) < 1e-13);
            assert!((&leray(&p) - &p).max_abs() < 1e-12 * p.max_abs());
            let v = sample::horizontal(&g, 0, &mut rng);
            let a = inner_product_h(&leray(&u), &v).unwrap();
            let b = inner_product_h(&u, &leray(&v)).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn gram_matches_laplacian_inside() {
        let g = grid(2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = sample::scalar(&g, 3, &mut rng);
        let ext = g.with_cutoff(6);
        let back = apply_gram_pinv(&f.recut(&ext), 5).recut(&g);
        let direct = apply_symbol(&f, SymbolSpec::LeftSublapPow(-1.0)).unwrap();
        assert!((&back - &direct).max_abs() < 1e-14);
    }

    #[test]
    fn covering_index_is_identity() {
        let g = grid(1, 4);
        let k = covering_index(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = sample::scalar(&g, 0, &mut rng);
        assert_eq!(friedrichs(&f, k, FriedrichsKind::Bi).coeffs(), f.coeffs());
        assert!(friedrichs(&f, k.saturating_sub(2), FriedrichsKind::Bi).max_abs() < f.max_abs());
    }

    #[test]
    fn key_identity_and_its_sign() {
        let g = grid(1, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = leray(&sample::horizontal(&g, 4, &mut rng));
        let lap = apply_symbol_h(&v, SymbolSpec::LeftSublapPow(1.0)).unwrap();
        let lhs = &lap - &leray(&lap);
        let rhs = pi_h(&apply_symbol_h(&v, SymbolSpec::Ds).unwrap());
        let scale = l2_norm_sq_h(&lhs).sqrt();
        assert!(l2_norm_sq_h(&(&lhs - &rhs)).sqrt() < 1e-10 * scale);
        // the untransposed matrix gives the opposite sign
        let sv = SMatrix::new(1).apply(&apply_symbol_h(&v, SymbolSpec::Ds).unwrap());
        let literal = &(&sv - &leray(&sv)) * 4.0;
        assert!(l2_norm_sq_h(&(&lhs + &literal)).sqrt() < 1e-10 * scale);
    }
}
