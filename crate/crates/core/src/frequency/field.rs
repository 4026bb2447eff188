//! Scalar and horizontal spectral fields.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{same_grid, FrequencyGrid};
use crate::error::{Error, Result};

/// Coefficients `F(n, m, λ_j)` on a frequency grid.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<FrequencyGrid>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<FrequencyGrid>) -> Self {
        SpectralField { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); grid.n_coeffs()] }
    }

    pub fn from_coeffs(grid: &Arc<FrequencyGrid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n_coeffs() {
            return Err(Error::Shape { expected: grid.n_coeffs(), got: coeffs.len() });
        }
        Ok(SpectralField { grid: grid.clone(), coeffs })
    }

    /// Builds a field from `f(n_flat, m_flat, j)`.
    pub fn from_fn(grid: &Arc<FrequencyGrid>, mut f: impl FnMut(usize, usize, usize) -> Complex64) -> Self {
        let side = grid.side();
        let nl = grid.n_lambda();
        let mut coeffs = Vec::with_capacity(grid.n_coeffs());
        for n in 0..side {
            for m in 0..side {
                for j in 0..nl {
                    coeffs.push(f(n, m, j));
                }
            }
        }
        SpectralField { grid: grid.clone(), coeffs }
    }

    /// A single unit coefficient.
    pub fn unit(grid: &Arc<FrequencyGrid>, n: usize, m: usize, j: usize) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[grid.index(n, m, j)] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn grid(&self) -> &Arc<FrequencyGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize, j: usize) -> Complex64 {
        self.coeffs[self.grid.index(n, m, j)]
    }

    #[inline]
    pub fn set(&mut self, n: usize, m: usize, j: usize, v: Complex64) {
        let i = self.grid.index(n, m, j);
        self.coeffs[i] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &SpectralField) -> bool {
        same_grid(&self.grid, &other.grid)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map(|_, _, _, c| c * a)
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: Complex64, x: &SpectralField) {
        assert!(self.same_grid(x), "grid mismatch");
        for (s, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += a * v;
        }
    }

    /// Applies `f(n_flat, m_flat, j, value)` to every coefficient.
    pub fn map(&self, mut f: impl FnMut(usize, usize, usize, Complex64) -> Complex64) -> Self {
        let side = self.grid.side();
        let nl = self.grid.n_lambda();
        let mut out = self.clone();
        for n in 0..side {
            for m in 0..side {
                let base = (n * side + m) * nl;
                for j in 0..nl {
                    out.coeffs[base + j] = f(n, m, j, self.coeffs[base + j]);
                }
            }
        }
        out
    }

    /// True when every coefficient with some `n_i` or `m_i` above `M - margin` vanishes.
    pub fn is_interior(&self, margin: usize) -> bool {
        let g = &self.grid;
        let side = g.side();
        let top = g.m_cut() as i64 - margin as i64;
        let inside = |flat: usize| (0..g.d()).all(|j| (g.component(flat, j) as i64) <= top);
        (0..side).all(|n| {
            (0..side).all(|m| {
                inside(n) && inside(m) || (0..g.n_lambda()).all(|j| self.get(n, m, j) == Complex64::new(0.0, 0.0))
            })
        })
    }

    /// Zeroes every mode outside the interior band of the given margin.
    pub fn cut_to_interior(&self, margin: usize) -> Self {
        let g = self.grid.clone();
        let top = g.m_cut() as i64 - margin as i64;
        let inside = |flat: usize| (0..g.d()).all(|j| (g.component(flat, j) as i64) <= top);
        self.map(|n, m, _, c| if inside(n) && inside(m) { c } else { Complex64::new(0.0, 0.0) })
    }

    /// Re-indexes onto a grid with the same λ nodes and another cutoff.
    /// Modes beyond the target cutoff are dropped; new modes are zero.
    pub fn recut(&self, target: &Arc<FrequencyGrid>) -> Self {
        let src = &self.grid;
        assert_eq!(src.d(), target.d());
        assert_eq!(src.nodes(), target.nodes(), "recut needs identical λ nodes");
        let mut out = SpectralField::zeros(target);
        let keep = src.m_cut().min(target.m_cut());
        let fits = |flat: usize| (0..src.d()).all(|j| src.component(flat, j) <= keep);
        let map_index = |flat: usize| target.flat_index(&src.multi_index(flat));
        let nl = src.n_lambda();
        for n in (0..src.side()).filter(|&n| fits(n)) {
            let tn = map_index(n);
            for m in (0..src.side()).filter(|&m| fits(m)) {
                let tm = map_index(m);
                let s = src.index(n, m, 0);
                let t = target.index(tn, tm, 0);
                out.coeffs[t..t + nl].copy_from_slice(&self.coeffs[s..s + nl]);
            }
        }
        out
    }

    /// Largest deviation from `F(n, m, -λ) = conj F(n, m, λ)`, the spectral
    /// signature of a real-valued physical field.
    pub fn reality_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for n in 0..g.side() {
            for m in 0..g.side() {
                for j in 0..g.n_lambda() {
                    let a = self.get(n, m, j);
                    let b = self.get(n, m, g.mirror(j)).conj();
                    worst = worst.max((a - b).norm());
                }
            }
        }
        worst
    }

    /// Symmetrizes so that the physical field is real.
    pub fn realify(&self) -> Self {
        let g = self.grid.clone();
        let src = self.clone();
        self.map(|n, m, j, c| 0.5 * (c + src.get(n, m, g.mirror(j)).conj()))
    }
}

macro_rules! field_ops {
    ($t:ty) => {
        impl Add for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                let mut out = self.clone();
                out += rhs;
                out
            }
        }
        impl Sub for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                let mut out = self.clone();
                out -= rhs;
                out
            }
        }
        impl Add for $t {
            type Output = $t;
            fn add(mut self, rhs: $t) -> $t {
                self += &rhs;
                self
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(mut self, rhs: $t) -> $t {
                self -= &rhs;
                self
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scale(Complex64::new(-1.0, 0.0))
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scale(Complex64::new(-1.0, 0.0))
            }
        }
        impl Mul<f64> for &$t {
            type Output = $t;
            fn mul(self, a: f64) -> $t {
                self.scale(Complex64::new(a, 0.0))
            }
        }
        impl Mul<Complex64> for &$t {
            type Output = $t;
            fn mul(self, a: Complex64) -> $t {
                self.scale(a)
            }
        }
    };
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.axpy(Complex64::new(1.0, 0.0), rhs);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.axpy(Complex64::new(-1.0, 0.0), rhs);
    }
}

field_ops!(SpectralField);

/// A horizontal vector field: `2d` components, X-directions first.
#[derive(Clone, Debug)]
pub struct HorizontalField {
    components: Vec<SpectralField>,
}

impl HorizontalField {
    pub fn zeros(grid: &Arc<FrequencyGrid>) -> Self {
        HorizontalField { components: (0..2 * grid.d()).map(|_| SpectralField::zeros(grid)).collect() }
    }

    pub fn from_components(components: Vec<SpectralField>) -> Result<Self> {
        let first = components.first().ok_or(Error::Shape { expected: 2, got: 0 })?;
        let expected = 2 * first.grid().d();
        if components.len() != expected {
            return Err(Error::Shape { expected, got: components.len() });
        }
        if components.iter().any(|c| !c.same_grid(first)) {
            return Err(Error::GridMismatch);
        }
        Ok(HorizontalField { components })
    }

    pub fn grid(&self) -> &Arc<FrequencyGrid> {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [SpectralField] {
        &mut self.components
    }

    pub fn component(&self, i: usize) -> &SpectralField {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<SpectralField> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn map(&self, f: impl FnMut(&SpectralField) -> SpectralField) -> Self {
        HorizontalField { components: self.components.iter().map(f).collect() }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map(|c| c.scale(a))
    }

    pub fn axpy(&mut self, a: Complex64, x: &HorizontalField) {
        for (s, v) in self.components.iter_mut().zip(&x.components) {
            s.axpy(a, v);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(SpectralField::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(SpectralField::max_abs).fold(0.0, f64::max)
    }

    pub fn is_interior(&self, margin: usize) -> bool {
        self.components.iter().all(|c| c.is_interior(margin))
    }

    pub fn recut(&self, target: &Arc<FrequencyGrid>) -> Self {
        self.map(|c| c.recut(target))
    }

    pub fn reality_defect(&self) -> f64 {
        self.components.iter().map(SpectralField::reality_defect).fold(0.0, f64::max)
    }

    pub fn realify(&self) -> Self {
        self.map(SpectralField::realify)
    }
}

impl AddAssign<&HorizontalField> for HorizontalField {
    fn add_assign(&mut self, rhs: &HorizontalField) {
        self.axpy(Complex64::new(1.0, 0.0), rhs);
    }
}

impl SubAssign<&HorizontalField> for HorizontalField {
    fn sub_assign(&mut self, rhs: &HorizontalField) {
        self.axpy(Complex64::new(-1.0, 0.0), rhs);
    }
}

field_ops!(HorizontalField);
