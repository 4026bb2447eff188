//! Random test fields.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::frequency::{FrequencyGrid, HorizontalField, SpectralField};

/// Complex Gaussian coefficients on the interior band with the given margin.
pub fn scalar(grid: &Arc<FrequencyGrid>, margin: usize, rng: &mut impl Rng) -> SpectralField {
    let f = SpectralField::from_fn(grid, |_, _, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    f.cut_to_interior(margin)
}

/// Interior field whose physical counterpart is real.
pub fn real_scalar(grid: &Arc<FrequencyGrid>, margin: usize, rng: &mut impl Rng) -> SpectralField {
    scalar(grid, margin, rng).realify()
}

pub fn horizontal(grid: &Arc<FrequencyGrid>, margin: usize, rng: &mut impl Rng) -> HorizontalField {
    let comps = (0..2 * grid.d()).map(|_| scalar(grid, margin, rng)).collect();
    HorizontalField::from_components(comps).expect("same grid")
}

pub fn real_horizontal(grid: &Arc<FrequencyGrid>, margin: usize, rng: &mut impl Rng) -> HorizontalField {
    horizontal(grid, margin, rng).realify()
}
