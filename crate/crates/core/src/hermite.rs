//! Rescaled Hermite functions `h_{n,λ}` and the kernel `W(n, m, λ, Y)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Hermite rule for the weight `e^{-t²}`, nodes ascending.
pub fn gauss_hermite(count: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(count > 0);
    let n = count;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let mut z: f64 = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[n - 1],
            3 => 1.91 * z - 0.91 * nodes[n - 2],
            _ => 2.0 * z - nodes[n - i + 1],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2 - (j as f64 / (j as f64 + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

/// `h_0(x), …, h_{nmax}(x)` for `λ = 1`, unit `L²` norm, via the stable
/// three-term recurrence.
pub fn hermite_functions(nmax: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > nmax);
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if nmax >= 1 {
        out[1] = 2f64.sqrt() * x * out[0];
    }
    for n in 1..nmax {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// One-dimensional `h_{n,λ}(x) = |λ|^{1/4} h_n(|λ|^{1/2} x)` for `n <= nmax`.
pub fn hermite_functions_scaled(nmax: usize, lambda: f64, x: f64) -> Vec<f64> {
    let a = lambda.abs();
    let mut out = vec![0.0; nmax + 1];
    hermite_functions(nmax, a.sqrt() * x, &mut out);
    let s = a.powf(0.25);
    out.iter_mut().for_each(|v| *v *= s);
    out
}

/// `∂_x h_{m,λ}` from `(|λ|^{1/2}/2)(√(2m) h_{m-1,λ} − √(2m+2) h_{m+1,λ})`,
/// for `m <= nmax - 1`.
pub fn hermite_derivatives_scaled(nmax: usize, lambda: f64, x: f64) -> Vec<f64> {
    assert!(nmax >= 1);
    let h = hermite_functions_scaled(nmax, lambda, x);
    let c = lambda.abs().sqrt() / 2.0;
    (0..nmax)
        .map(|m| {
            let down = if m > 0 { (2.0 * m as f64).sqrt() * h[m - 1] } else { 0.0 };
            c * (down - (2.0 * m as f64 + 2.0).sqrt() * h[m + 1])
        })
        .collect()
}

/// Gauss–Hermite quadrature on ℝ scaled to a reference `|λ|`.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub count: usize,
    pub reference_scale: f64,
}

impl QuadratureSpec {
    /// Exact for `h_{n,λ} h_{m,λ}` with `n, m <= M + 2` when `|λ|` equals the reference.
    pub fn for_cutoff(m_cut: usize, reference_scale: f64) -> Self {
        QuadratureSpec { count: m_cut + 8, reference_scale }
    }
}

/// Tabulated `h_{n,λ}` on a tensor quadrature grid in ℝ^d, for `n ∈ [0, M+2]^d`.
///
/// The tensor structure is kept implicit: the 1-D nodes, weights and values
/// are stored once and products are formed on demand.
#[derive(Clone, Debug)]
pub struct HermiteTable {
    pub lambda: f64,
    pub d: usize,
    pub m_cut: usize,
    pub x_nodes: Vec<f64>,
    pub x_weights: Vec<f64>,
    /// `values[n * x_nodes.len() + i] = h_{n,λ}(x_i)` in one dimension.
    pub values: Vec<f64>,
}

impl HermiteTable {
    pub fn build(lambda: f64, d: usize, m_cut: usize, quad: QuadratureSpec) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidGrid("λ must be nonzero".into()));
        }
        let (t, w) = gauss_hermite(quad.count);
        let a = quad.reference_scale.abs();
        let x_nodes: Vec<f64> = t.iter().map(|&ti| ti / a.sqrt()).collect();
        let x_weights: Vec<f64> = t.iter().zip(&w).map(|(&ti, &wi)| wi * (ti * ti).exp() / a.sqrt()).collect();
        let top = m_cut + 2;
        let k = x_nodes.len();
        let mut values = vec![0.0; (top + 1) * k];
        for (i, &x) in x_nodes.iter().enumerate() {
            let h = hermite_functions_scaled(top, lambda, x);
            for n in 0..=top {
                values[n * k + i] = h[n];
            }
        }
        let table = HermiteTable { lambda, d, m_cut, x_nodes, x_weights, values };
        let residual = table.orthonormality_residual();
        if !(residual < 1e-8 / d as f64) {
            return Err(Error::QuadratureTooCoarse { residual });
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.x_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_nodes.is_empty()
    }

    /// One-dimensional value `h_{n,λ}(x_i)`.
    pub fn value(&self, n: usize, i: usize) -> f64 {
        self.values[n * self.len() + i]
    }

    /// Tensor value `h_{n,λ}(x)` at the node with per-axis indices `idx`.
    pub fn value_nd(&self, n: &[usize], idx: &[usize]) -> f64 {
        n.iter().zip(idx).map(|(&nj, &ij)| self.value(nj, ij)).product()
    }

    /// Largest `|Σ w h_n h_m − δ_nm|` over `n, m <= M + 2` (1-D factors).
    pub fn orthonormality_residual(&self) -> f64 {
        let top = self.m_cut + 2;
        let mut worst: f64 = 0.0;
        for n in 0..=top {
            for m in 0..=n {
                let s: f64 = (0..self.len()).map(|i| self.x_weights[i] * self.value(n, i) * self.value(m, i)).sum();
                let target = if n == m { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// Quadrature evaluator for `W(n, m, λ, Y) = ∫ e^{-2iλ⟨η, x-y⟩} h_{m,λ}(x-2y) h_{n,λ}(x) dx`.
///
/// The node set follows the shift `x = z + y`, which leaves a Gaussian of
/// scale `|λ|` times a polynomial and the oscillation `e^{-2iλ⟨η, z⟩}`.
#[derive(Clone, Debug)]
pub struct WKernel {
    pub lambda: f64,
    pub d: usize,
    pub m_cut: usize,
    z_nodes: Vec<f64>,
    z_weights: Vec<f64>,
}

impl WKernel {
    pub fn new(lambda: f64, d: usize, m_cut: usize) -> Result<Self> {
        Self::with_count(lambda, d, m_cut, 2 * m_cut + 48)
    }

    pub fn with_count(lambda: f64, d: usize, m_cut: usize, count: usize) -> Result<Self> {
        let table = HermiteTable::build(lambda, d, m_cut, QuadratureSpec { count, reference_scale: lambda.abs() })?;
        Ok(WKernel { lambda, d, m_cut, z_nodes: table.x_nodes, z_weights: table.x_weights })
    }

    /// Radius of the reliable window in units of `|λ|^{-1/2}`.
    fn window(&self) -> f64 {
        0.7 * (2.0 * self.z_nodes.len() as f64).sqrt()
    }

    /// One-dimensional factor for the plane `(y, η)`.
    pub fn factor(&self, n: usize, m: usize, y: f64, eta: f64) -> Result<Complex64> {
        if n > self.m_cut || m > self.m_cut {
            return Err(Error::InvalidGrid(format!("index ({n}, {m}) exceeds cutoff {}", self.m_cut)));
        }
        let s = self.lambda.abs().sqrt();
        if 2.0 * s * eta.abs() > self.window() || s * y.abs() > 2.0 * self.window() {
            return Err(Error::OutsideWindow(format!("(y, η) = ({y}, {eta}) at λ = {}", self.lambda)));
        }
        let top = n.max(m);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&z, &w) in self.z_nodes.iter().zip(&self.z_weights) {
            let hm = hermite_functions_scaled(top, self.lambda, z - y);
            let hn = hermite_functions_scaled(top, self.lambda, z + y);
            let phase = Complex64::from_polar(1.0, -2.0 * self.lambda * eta * z);
            acc += phase * (w * hm[m] * hn[n]);
        }
        Ok(acc)
    }

    /// `W(n, m, λ, Y)` with `Y = (y, η)`, each of length `d`.
    pub fn eval(&self, n: &[usize], m: &[usize], y: &[f64], eta: &[f64]) -> Result<Complex64> {
        assert!(n.len() == self.d && m.len() == self.d && y.len() == self.d && eta.len() == self.d);
        (0..self.d).try_fold(Complex64::new(1.0, 0.0), |acc, j| Ok(acc * self.factor(n[j], m[j], y[j], eta[j])?))
    }

    /// All 1-D factors `W(n, m, λ, (y, η))` for `n, m <= M` as a row-major matrix.
    pub fn matrix_1d(&self, y: f64, eta: f64) -> Result<Vec<Complex64>> {
        let k = self.m_cut + 1;
        let mut out = vec![Complex64::new(0.0, 0.0); k * k];
        for n in 0..k {
            for m in 0..k {
                out[n * k + m] = self.factor(n, m, y, eta)?;
            }
        }
        Ok(out)
    }
}

/// Real radial profiles `R_{nm}(r) = W(n, m, λ, (r, 0))` for `n, m <= top`,
/// layout `[(n * (top + 1) + m) * radii.len() + i]`.
///
/// On the plane, `W(n, m, λ, (r cos θ, r sin θ)) = e^{i sgn(λ)(m-n)θ} R_{nm}(r)`.
/// The integrand `h_m(z - r) h_n(z + r)` is a polynomial times `e^{-|λ|(z² + r²)}`,
/// so Gauss–Hermite at scale `|λ|` with `top + 4` nodes is exact.
pub fn radial_profiles(lambda: f64, top: usize, radii: &[f64]) -> Vec<f64> {
    let a = lambda.abs();
    let (t, w) = gauss_hermite(top + 4);
    let k = top + 1;
    let nr = radii.len();
    let mut out = vec![0.0; k * k * nr];
    for (i, &r) in radii.iter().enumerate() {
        for (&ti, &wi) in t.iter().zip(&w) {
            let z = ti / a.sqrt();
            let weight = wi * (ti * ti).exp() / a.sqrt();
            let hm = hermite_functions_scaled(top, lambda, z - r);
            let hn = hermite_functions_scaled(top, lambda, z + r);
            for n in 0..k {
                let wn = weight * hn[n];
                for m in 0..k {
                    out[(n * k + m) * nr + i] += wn * hm[m];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_hermite_moments() {
        let (t, w) = gauss_hermite(30);
        let m0: f64 = w.iter().sum();
        let m2: f64 = t.iter().zip(&w).map(|(x, w)| x * x * w).sum();
        assert!((m0 - PI.sqrt()).abs() < 1e-13);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-13);
        assert!(t.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn unit_norm_and_scaling() {
        let table = HermiteTable::build(1.0, 1, 6, QuadratureSpec::for_cutoff(6, 1.0)).unwrap();
        let norm0: f64 = (0..table.len()).map(|i| table.x_weights[i] * table.value(0, i).powi(2)).sum();
        assert!((norm0 - 1.0).abs() < 1e-10);
        for x in [-2.0, -0.3, 0.0, 0.7, 1.9] {
            let a = hermite_functions_scaled(0, 4.0, x)[0];
            let b = 2f64.sqrt() * hermite_functions_scaled(0, 1.0, 2.0 * x)[0];
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn coarse_quadrature_rejected() {
        let r = HermiteTable::build(1.0, 1, 10, QuadratureSpec { count: 6, reference_scale: 1.0 });
        assert!(matches!(r, Err(Error::QuadratureTooCoarse { .. })));
    }

    #[test]
    fn derivative_identity() {
        let lam = 2.5;
        let h = 1e-4;
        for x in [-1.3, -0.2, 0.4, 1.1] {
            let d = hermite_derivatives_scaled(8, lam, x);
            let p = hermite_functions_scaled(8, lam, x + h);
            let q = hermite_functions_scaled(8, lam, x - h);
            let p2 = hermite_functions_scaled(8, lam, x + 2.0 * h);
            let q2 = hermite_functions_scaled(8, lam, x - 2.0 * h);
            for m in 0..8 {
                let fd = (-p2[m] + 8.0 * p[m] - 8.0 * q[m] + q2[m]) / (12.0 * h);
                assert!((fd - d[m]).abs() < 1e-8, "m={m}");
            }
        }
    }

    #[test]
    fn position_recurrence() {
        let lam = -3.0;
        for x in [-0.8, 0.1, 0.9] {
            let h = hermite_functions_scaled(9, lam, x);
            let s = lam.abs().sqrt();
            for m in 0..8 {
                let down = if m > 0 { (2.0 * m as f64).sqrt() * h[m - 1] } else { 0.0 };
                let rhs = (down + (2.0 * m as f64 + 2.0).sqrt() * h[m + 1]) / (2.0 * s);
                assert!((x * h[m] - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn w_at_origin_is_identity() {
        let k = WKernel::new(1.7, 1, 5).unwrap();
        for n in 0..=5 {
            for m in 0..=5 {
                let w = k.eval(&[n], &[m], &[0.0], &[0.0]).unwrap();
                let t = if n == m { 1.0 } else { 0.0 };
                assert!((w - t).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn w00_closed_form() {
        for lam in [0.5, 1.0, -2.0] {
            let k = WKernel::new(lam, 1, 2).unwrap();
            for (y, e) in [(0.3, -0.4), (1.0, 0.5), (-0.7, 1.2)] {
                let w = k.eval(&[0], &[0], &[y], &[e]).unwrap();
                let exact = (-lam.abs() * (y * y + e * e)).exp();
                assert!((w - exact).norm() < 1e-12, "{w} {exact}");
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let kp = WKernel::new(1.3, 1, 4).unwrap();
        let km = WKernel::new(-1.3, 1, 4).unwrap();
        for (y, e) in [(0.2, 0.5), (-0.9, 0.3)] {
            for n in 0..=4 {
                for m in 0..=4 {
                    let a = kp.factor(n, m, y, e).unwrap();
                    let b = km.factor(n, m, y, e).unwrap();
                    assert!((a - b.conj()).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn far_points_are_rejected() {
        let k = WKernel::with_count(1.0, 1, 2, 20).unwrap();
        assert!(matches!(k.factor(0, 0, 0.0, 50.0), Err(Error::OutsideWindow(_))));
    }

    #[test]
    fn polar_form_matches_kernel() {
        let lam = -1.4;
        let k = WKernel::new(lam, 1, 4).unwrap();
        let r = 0.8;
        let prof = radial_profiles(lam, 4, &[r]);
        for th in [0.0, 0.7, 2.5, -1.9] {
            let (y, e) = (r * f64::cos(th), r * f64::sin(th));
            for n in 0..=4 {
                for m in 0..=4 {
                    let w = k.factor(n, m, y, e).unwrap();
                    let q = (m as f64 - n as f64) * lam.signum() * th;
                    let p = Complex64::from_polar(prof[n * 5 + m], q);
                    assert!((w - p).norm() < 1e-11, "n={n} m={m}");
                }
            }
        }
    }
}
