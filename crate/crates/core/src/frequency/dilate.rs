//! Frequency-side action of the dilations `δ_μ(Y, s) = (μY, μ²s)`.

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::GridMode;
use crate::error::{Error, Result};

/// `F(f∘δ_μ)(n, m, λ) = μ^{-Q} F(f)(n, m, λ/μ²)` with `μ = r^{p/2}` on a
/// geometric grid of ratio `r`: an exact shift by `p` λ-nodes.
pub fn dilate(f: &SpectralField, p: i64) -> Result<SpectralField> {
    let g = f.grid();
    if g.mode() != GridMode::Geometric {
        return Err(Error::GridMode("geometric"));
    }
    if p == 0 {
        return Ok(f.clone());
    }
    let r = g.ratio().expect("geometric");
    let half = g.n_positive() as i64;
    let scale = r.powf(-(p as f64) * g.q_dim() as f64 / 2.0);
    let nl = g.n_lambda();
    let mut out = SpectralField::zeros(g);
    let zero = Complex64::new(0.0, 0.0);
    for (chunk_in, chunk_out) in f.coeffs().chunks(nl).zip(out.coeffs_mut().chunks_mut(nl)) {
        for (i, &c) in chunk_in.iter().enumerate() {
            if c == zero {
                continue;
            }
            // position along |λ|, shared by the two signs
            let (level, positive) = if (i as i64) >= half { (i as i64 - half, true) } else { (half - 1 - i as i64, false) };
            let target = level + p;
            if target < 0 || target >= half {
                return Err(Error::OutOfBand { shift: p });
            }
            let t = if positive { half + target } else { half - 1 - target } as usize;
            chunk_out[t] = c * scale;
        }
    }
    Ok(out)
}
