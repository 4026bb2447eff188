//! Forward and inverse group Fourier transforms on a periodized `(Y, s)` grid.
//!
//! Each `(y_j, η_j)` plane is sampled in polar coordinates. On a plane,
//! `W(n, m, λ, (r cos θ, r sin θ)) = e^{i sgn(λ)(m-n)θ} R_{nm}(r)` with a real
//! radial profile, so a transform is an FFT in `s`, a short angular DFT and a
//! real radial contraction. Radial nodes are composite Gauss–Legendre in
//! `ρ = r²` on geometrically growing panels.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::frequency::{inverse_plancherel_constant, FrequencyGrid, GridMode, SpectralField};
use crate::hermite::{radial_profiles, WKernel};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let n = count;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

/// Radial panels `[0, a], [a, a q], [a q, a q²], …` in `ρ = r²` up to `outer`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialSpec {
    pub first: f64,
    pub ratio: f64,
    pub per_panel: usize,
    pub outer: f64,
}

impl RadialSpec {
    /// Panels resolving Gaussians `e^{-aρ}` for `a` between `λ_min` and `3 λ_max`
    /// against polynomials of degree about `3M`.
    pub fn for_band(lambda_min: f64, lambda_max: f64, m_cut: usize) -> Self {
        RadialSpec {
            first: 0.5 / lambda_max,
            ratio: 1.6,
            per_panel: 10,
            outer: (36.0 + 4.0 * m_cut as f64) / lambda_min,
        }
    }

    /// Nodes `r_i` and weights with `Σ w_i g(r_i) ≈ ∫_0^∞ g(r) r dr`.
    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let (x, w) = gauss_legendre(self.per_panel);
        let mut edges = vec![0.0, self.first];
        while *edges.last().unwrap() < self.outer {
            let next = edges.last().unwrap() * self.ratio;
            edges.push(next);
        }
        let mut radii = Vec::new();
        let mut weights = Vec::new();
        for e in edges.windows(2) {
            let (a, b) = (e[0], e[1]);
            for (xi, wi) in x.iter().zip(&w) {
                let rho = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                radii.push(rho.sqrt());
                // r dr = dρ / 2
                weights.push(0.25 * (b - a) * wi);
            }
        }
        (radii, weights)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalGridSpec {
    pub n_theta: usize,
    pub radial: RadialSpec,
    pub s_points: usize,
}

impl PhysicalGridSpec {
    /// Defaults paired with a uniform frequency grid.
    ///
    /// `dealias` pads the `s` grid to `2 N_s` points so that products of two
    /// band-limited fields are free of aliasing on the band; otherwise the
    /// smallest grid resolving the band (`N_s + 2`) is used. The angular grid
    /// always resolves triple products up to cutoff `M + 1`.
    pub fn paired(fgrid: &FrequencyGrid, dealias: bool) -> Result<Self> {
        let n_s = fgrid.n_s().ok_or(Error::GridMode("uniform_periodic"))?;
        let m = fgrid.m_cut();
        let n_theta = (3 * m + 6).next_multiple_of(2);
        Ok(PhysicalGridSpec {
            n_theta,
            radial: RadialSpec::for_band(fgrid.min_abs_lambda(), fgrid.max_abs_lambda(), m),
            s_points: if dealias { 2 * n_s } else { n_s + 2 },
        })
    }
}

/// Tensor grid of polar planes times a uniform periodic `s` grid.
#[derive(Clone, Debug)]
pub struct PhysicalGrid {
    d: usize,
    spec: PhysicalGridSpec,
    s_period: f64,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
}

impl PhysicalGrid {
    pub fn new(d: usize, s_period: f64, spec: PhysicalGridSpec) -> Result<Arc<Self>> {
        if d == 0 || spec.n_theta < 2 || spec.s_points < 3 || !(s_period > 0.0) {
            return Err(Error::InvalidGrid("degenerate physical grid".into()));
        }
        let (radii, radial_weights) = spec.radial.nodes();
        Ok(Arc::new(PhysicalGrid { d, spec, s_period, radii, radial_weights }))
    }

    pub fn paired(fgrid: &FrequencyGrid, dealias: bool) -> Result<Arc<Self>> {
        let spec = PhysicalGridSpec::paired(fgrid, dealias)?;
        Self::new(fgrid.d(), fgrid.s_period().expect("uniform"), spec)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn spec(&self) -> &PhysicalGridSpec {
        &self.spec
    }

    pub fn s_period(&self) -> f64 {
        self.s_period
    }

    pub fn s_points(&self) -> usize {
        self.spec.s_points
    }

    pub fn n_theta(&self) -> usize {
        self.spec.n_theta
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    /// Points in one polar plane.
    pub fn plane_len(&self) -> usize {
        self.radii.len() * self.spec.n_theta
    }

    /// Number of `Y` nodes.
    pub fn y_len(&self) -> usize {
        self.plane_len().pow(self.d as u32)
    }

    pub fn len(&self) -> usize {
        self.y_len() * self.spec.s_points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self, a: usize) -> f64 {
        2.0 * PI * a as f64 / self.spec.n_theta as f64
    }

    /// `(y, η)` and quadrature weight of the plane point `p = i_r N_θ + i_θ`.
    pub fn plane_point(&self, p: usize) -> (f64, f64, f64) {
        let (ir, ia) = (p / self.spec.n_theta, p % self.spec.n_theta);
        let (r, th) = (self.radii[ir], self.theta(ia));
        let w = self.radial_weights[ir] * 2.0 * PI / self.spec.n_theta as f64;
        (r * th.cos(), r * th.sin(), w)
    }

    /// Coordinates `(y, η)` and weight of a `Y` node; planes are ordered with the
    /// first plane most significant.
    pub fn y_point(&self, idx: usize) -> (Vec<f64>, Vec<f64>, f64) {
        let pl = self.plane_len();
        let mut y = vec![0.0; self.d];
        let mut eta = vec![0.0; self.d];
        let mut w = 1.0;
        let mut rest = idx;
        for a in (0..self.d).rev() {
            let (yy, ee, ww) = self.plane_point(rest % pl);
            rest /= pl;
            y[a] = yy;
            eta[a] = ee;
            w *= ww;
        }
        (y, eta, w)
    }

    pub fn s_node(&self, l: usize) -> f64 {
        self.s_period * l as f64 / self.spec.s_points as f64
    }

    pub fn s_weight(&self) -> f64 {
        self.s_period / self.spec.s_points as f64
    }

    pub fn y_weights(&self) -> Vec<f64> {
        (0..self.y_len()).map(|i| self.y_point(i).2).collect()
    }
}

/// Samples `f(Y, s)`, stored as `[y_index * s_points + l]`.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: Arc<PhysicalGrid>,
    samples: Vec<Complex64>,
}

impl PhysicalField {
    pub fn zeros(grid: &Arc<PhysicalGrid>) -> Self {
        PhysicalField { grid: grid.clone(), samples: vec![ZERO; grid.len()] }
    }

    pub fn from_samples(grid: &Arc<PhysicalGrid>, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Shape { expected: grid.len(), got: samples.len() });
        }
        Ok(PhysicalField { grid: grid.clone(), samples })
    }

    /// Samples a function of `(y, η, s)`.
    pub fn from_fn(grid: &Arc<PhysicalGrid>, f: impl Fn(&[f64], &[f64], f64) -> Complex64 + Sync) -> Self {
        let ns = grid.s_points();
        let samples = (0..grid.y_len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let (y, eta, _) = grid.y_point(i);
                (0..ns).map(move |l| (y.clone(), eta.clone(), l))
            })
            .map(|(y, eta, l)| f(&y, &eta, grid.s_node(l)))
            .collect();
        PhysicalField { grid: grid.clone(), samples }
    }

    pub fn grid(&self) -> &Arc<PhysicalGrid> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &PhysicalField) -> PhysicalField {
        assert!(Arc::ptr_eq(&self.grid, &other.grid));
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        PhysicalField { grid: self.grid.clone(), samples }
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: Complex64, x: &PhysicalField) {
        for (s, v) in self.samples.iter_mut().zip(&x.samples) {
            *s += a * v;
        }
    }

    /// `∫ f conj(g) dY ds` by the grid quadrature.
    pub fn inner(&self, other: &PhysicalField) -> Complex64 {
        let ns = self.grid.s_points();
        let wy = self.grid.y_weights();
        let ws = self.grid.s_weight();
        let mut acc = ZERO;
        for (i, w) in wy.iter().enumerate() {
            let row: Complex64 = (0..ns).map(|l| self.samples[i * ns + l] * other.samples[i * ns + l].conj()).sum();
            acc += row * (w * ws);
        }
        acc
    }

    /// `∫ |f|^p dY ds`.
    pub fn lp_pow(&self, p: f64) -> f64 {
        let ns = self.grid.s_points();
        let wy = self.grid.y_weights();
        let ws = self.grid.s_weight();
        wy.iter()
            .enumerate()
            .map(|(i, w)| w * ws * (0..ns).map(|l| self.samples[i * ns + l].norm().powf(p)).sum::<f64>())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean Fourier multiplier `a(ξ)` in `s`, with `ξ = 2πk / L` for the
    /// signed DFT index `k`.
    pub fn s_multiplier(&self, a: impl Fn(f64) -> f64) -> PhysicalField {
        let ns = self.grid.s_points();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(ns);
        let inv = planner.plan_fft_inverse(ns);
        let factors: Vec<f64> = (0..ns)
            .map(|k| {
                let kk = if k <= ns / 2 { k as f64 } else { k as f64 - ns as f64 };
                a(2.0 * PI * kk / self.grid.s_period()) / ns as f64
            })
            .collect();
        let mut out = self.clone();
        out.samples.par_chunks_mut(ns).for_each(|row| {
            fwd.process(row);
            row.iter_mut().zip(&factors).for_each(|(v, f)| *v *= f);
            inv.process(row);
        });
        out
    }
}

/// Precomputed tables for transforms between a uniform frequency grid and a
/// physical grid.
pub struct TransformPlan {
    fgrid: Arc<FrequencyGrid>,
    pgrid: Arc<PhysicalGrid>,
    /// Radial profiles per positive λ level, `(top+1)² × N_r`, pre-multiplied
    /// by the radial weights for the forward direction.
    profiles: Vec<Vec<f64>>,
    weighted: Vec<Vec<f64>>,
    /// Array position of every `(n_flat, m_flat)` pair.
    positions: Vec<usize>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
    ang_fwd: Arc<dyn Fft<f64>>,
    ang_inv: Arc<dyn Fft<f64>>,
}

impl TransformPlan {
    pub fn new(fgrid: &Arc<FrequencyGrid>, pgrid: &Arc<PhysicalGrid>) -> Result<Self> {
        check_paired(fgrid, pgrid)?;
        let top = fgrid.m_cut();
        let k = top + 1;
        let half = fgrid.n_positive();
        let profiles: Vec<Vec<f64>> = (0..half)
            .into_par_iter()
            .map(|lvl| radial_profiles(fgrid.nodes()[half + lvl], top, pgrid.radii()))
            .collect();
        let nr = pgrid.radii().len();
        let weighted = profiles
            .iter()
            .map(|p| {
                let mut q = p.clone();
                for nm in 0..k * k {
                    for i in 0..nr {
                        q[nm * nr + i] *= pgrid.radial_weights()[i];
                    }
                }
                q
            })
            .collect();
        let d = fgrid.d();
        let side = fgrid.side();
        let mut positions = vec![0; side * side];
        for n in 0..side {
            let nm = fgrid.multi_index(n);
            for m in 0..side {
                let mm = fgrid.multi_index(m);
                positions[n * side + m] = (0..d).fold(0, |acc, a| acc * k * k + nm[a] * k + mm[a]);
            }
        }
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(pgrid.s_points());
        let fft_inv = planner.plan_fft_inverse(pgrid.s_points());
        let ang_fwd = planner.plan_fft_forward(pgrid.n_theta());
        let ang_inv = planner.plan_fft_inverse(pgrid.n_theta());
        Ok(TransformPlan {
            fgrid: fgrid.clone(),
            pgrid: pgrid.clone(),
            profiles,
            weighted,
            positions,
            fft_fwd,
            fft_inv,
            ang_fwd,
            ang_inv,
        })
    }

    pub fn fgrid(&self) -> &Arc<FrequencyGrid> {
        &self.fgrid
    }

    pub fn pgrid(&self) -> &Arc<PhysicalGrid> {
        &self.pgrid
    }

    /// `𝓕(f)(n, m, λ) = ∫ W(n, m, λ, Y) ∫_0^L e^{-iλs} f(Y, s) ds dY`.
    ///
    /// Rejects inputs whose `s`-mean carries relative `L²` mass above `1e-12`.
    pub fn forward(&self, f: &PhysicalField) -> Result<SpectralField> {
        let (out, mean, total) = self.forward_parts(f)?;
        if mean > 1e-12 * total.max(f64::MIN_POSITIVE) && mean > 1e-300 {
            return Err(Error::NonzeroMean { mass: mean / total.max(f64::MIN_POSITIVE) });
        }
        Ok(out)
    }

    /// Like [`forward`](Self::forward) but silently drops the `s`-mean, as
    /// required for products of zero-mean fields.
    pub fn forward_drop_mean(&self, f: &PhysicalField) -> Result<SpectralField> {
        Ok(self.forward_parts(f)?.0)
    }

    /// Returns the transform plus the `L²` norms of the `s`-mean and of `f`.
    fn forward_parts(&self, f: &PhysicalField) -> Result<(SpectralField, f64, f64)> {
        if !Arc::ptr_eq(f.grid(), &self.pgrid) {
            return Err(Error::Unpaired("physical field is on another grid".into()));
        }
        let ns = self.pgrid.s_points();
        let ny = self.pgrid.y_len();
        let nl = self.fgrid.n_lambda();
        let ws = self.pgrid.s_weight();
        // s-DFT of every Y row, kept as [λ index][Y index]
        let rows: Vec<(Vec<Complex64>, Complex64, f64)> = f
            .samples()
            .par_chunks(ns)
            .map(|row| {
                let energy: f64 = row.iter().map(|c| c.norm_sqr()).sum::<f64>() * ws;
                let mut buf = row.to_vec();
                self.fft_fwd.process(&mut buf);
                let picked = (0..nl)
                    .map(|j| {
                        let k = self.fgrid.wavenumber(j).expect("uniform");
                        buf[k.rem_euclid(ns as i64) as usize] * ws
                    })
                    .collect();
                (picked, buf[0] * ws, energy)
            })
            .collect();
        let wy = self.pgrid.y_weights();
        let mut mean = 0.0;
        let mut total = 0.0;
        for (i, (_, m0, e)) in rows.iter().enumerate() {
            // ∫|mean|² ds = |∫ f ds|² / L
            mean += wy[i] * m0.norm_sqr() / self.pgrid.s_period();
            total += wy[i] * e;
        }
        let columns: Vec<Vec<Complex64>> = (0..nl)
            .into_par_iter()
            .map(|j| {
                let slice: Vec<Complex64> = (0..ny).map(|i| rows[i].0[j]).collect();
                self.analyze(j, slice)
            })
            .collect();
        let side = self.fgrid.side();
        let mut out = SpectralField::zeros(&self.fgrid);
        let coeffs = out.coeffs_mut();
        for n in 0..side {
            for m in 0..side {
                let pos = self.positions[n * side + m];
                let base = (n * side + m) * nl;
                for (j, col) in columns.iter().enumerate() {
                    coeffs[base + j] = col[pos];
                }
            }
        }
        Ok((out, mean.sqrt(), total.sqrt()))
    }

    /// Planewise angular and radial analysis at node `j`.
    fn analyze(&self, j: usize, data: Vec<Complex64>) -> Vec<Complex64> {
        let lam = self.fgrid.nodes()[j];
        let kappa = lam.signum() as i64;
        let lvl = self.level(j);
        let prof = &self.weighted[lvl];
        let top = self.fgrid.m_cut();
        let k = top + 1;
        let nr = self.pgrid.radii().len();
        let nt = self.pgrid.n_theta();
        let dtheta = 2.0 * PI / nt as f64;
        let pl = self.pgrid.plane_len();
        let span = 2 * top + 1;
        map_planes(data, self.fgrid.d(), pl, k * k, |v, out| {
            // g_q(r_i) = Σ_a e^{iκqθ_a} v(r_i, θ_a) dθ
            let mut g = vec![ZERO; span * nr];
            let mut buf = vec![ZERO; nt];
            for i in 0..nr {
                buf.copy_from_slice(&v[i * nt..(i + 1) * nt]);
                self.ang_fwd.process(&mut buf);
                for q in 0..span {
                    let qq = kappa * (q as i64 - top as i64);
                    g[q * nr + i] = buf[(-qq).rem_euclid(nt as i64) as usize] * dtheta;
                }
            }
            for n in 0..k {
                for m in 0..k {
                    let q = m + top - n;
                    let p = &prof[(n * k + m) * nr..(n * k + m + 1) * nr];
                    let gq = &g[q * nr..(q + 1) * nr];
                    out[n * k + m] = p.iter().zip(gq).map(|(a, b)| b * a).sum();
                }
            }
        })
    }

    /// `f(Y, s) = c Σ_j w_j e^{iλ_j s} Σ_{n,m} F(n, m, λ_j) conj W(n, m, λ_j, Y)`
    /// with `c = 2^{d-1} / π^{d+1}`.
    pub fn inverse(&self, field: &SpectralField) -> Result<PhysicalField> {
        if !crate::frequency::same_grid(field.grid(), &self.fgrid) {
            return Err(Error::Unpaired("spectral field is on another grid".into()));
        }
        let c = inverse_plancherel_constant(self.fgrid.d());
        let nl = self.fgrid.n_lambda();
        let side = self.fgrid.side();
        let k = self.fgrid.m_cut() + 1;
        let d = self.fgrid.d();
        let columns: Vec<Vec<Complex64>> = (0..nl)
            .into_par_iter()
            .map(|j| {
                let mut arr = vec![ZERO; (k * k).pow(d as u32)];
                let scale = c * self.fgrid.weights()[j];
                let mut any = false;
                for n in 0..side {
                    for m in 0..side {
                        let v = field.get(n, m, j);
                        if v != ZERO {
                            any = true;
                        }
                        arr[self.positions[n * side + m]] = v * scale;
                    }
                }
                if any {
                    self.synthesize(j, arr)
                } else {
                    Vec::new()
                }
            })
            .collect();
        let ns = self.pgrid.s_points();
        let mut out = PhysicalField::zeros(&self.pgrid);
        let bins: Vec<usize> = (0..nl)
            .map(|j| self.fgrid.wavenumber(j).expect("uniform").rem_euclid(ns as i64) as usize)
            .collect();
        out.samples_mut().par_chunks_mut(ns).enumerate().for_each(|(i, row)| {
            for (j, col) in columns.iter().enumerate() {
                if !col.is_empty() {
                    row[bins[j]] = col[i];
                }
            }
            self.fft_inv.process(row);
        });
        Ok(out)
    }

    fn synthesize(&self, j: usize, data: Vec<Complex64>) -> Vec<Complex64> {
        let lam = self.fgrid.nodes()[j];
        let kappa = lam.signum() as i64;
        let prof = &self.profiles[self.level(j)];
        let top = self.fgrid.m_cut();
        let k = top + 1;
        let nr = self.pgrid.radii().len();
        let nt = self.pgrid.n_theta();
        let pl = self.pgrid.plane_len();
        let span = 2 * top + 1;
        map_planes(data, self.fgrid.d(), k * k, pl, |coef, out| {
            let mut h = vec![ZERO; span * nr];
            for n in 0..k {
                for m in 0..k {
                    let c = coef[n * k + m];
                    if c == ZERO {
                        continue;
                    }
                    let q = m + top - n;
                    let p = &prof[(n * k + m) * nr..(n * k + m + 1) * nr];
                    for i in 0..nr {
                        h[q * nr + i] += c * p[i];
                    }
                }
            }
            for i in 0..nr {
                let row = &mut out[i * nt..(i + 1) * nt];
                for q in 0..span {
                    let qq = -kappa * (q as i64 - top as i64);
                    row[qq.rem_euclid(nt as i64) as usize] = h[q * nr + i];
                }
                self.ang_inv.process(row);
            }
        })
    }

    fn level(&self, j: usize) -> usize {
        let half = self.fgrid.n_positive();
        if j >= half {
            j - half
        } else {
            half - 1 - j
        }
    }
}

fn check_paired(fgrid: &FrequencyGrid, pgrid: &PhysicalGrid) -> Result<()> {
    if fgrid.mode() != GridMode::UniformPeriodic {
        return Err(Error::Unpaired("frequency grid must be uniform_periodic".into()));
    }
    if fgrid.d() != pgrid.d() {
        return Err(Error::Unpaired(format!("dimension {} vs {}", fgrid.d(), pgrid.d())));
    }
    let l = fgrid.s_period().expect("uniform");
    if (l - pgrid.s_period()).abs() > 1e-12 * l {
        return Err(Error::Unpaired(format!("s period {l} vs {}", pgrid.s_period())));
    }
    let n_s = fgrid.n_s().expect("uniform");
    if pgrid.s_points() <= n_s {
        return Err(Error::Unpaired(format!("{} s points cannot separate wavenumbers ±{}", pgrid.s_points(), n_s / 2)));
    }
    if pgrid.n_theta() <= 2 * fgrid.m_cut() {
        return Err(Error::Unpaired(format!("{} angles cannot resolve cutoff {}", pgrid.n_theta(), fgrid.m_cut())));
    }
    Ok(())
}

/// Maps each of the `d` axes of length `from` to length `to`, first axis
/// first; used both for plane-to-mode and mode-to-plane passes.
fn map_planes(
    mut data: Vec<Complex64>,
    d: usize,
    from: usize,
    to: usize,
    op: impl Fn(&[Complex64], &mut [Complex64]),
) -> Vec<Complex64> {
    for a in 0..d {
        let outer = to.pow(a as u32);
        let inner = from.pow((d - a - 1) as u32);
        data = map_axis(&data, outer, from, to, inner, &op);
    }
    data
}

fn map_axis(
    data: &[Complex64],
    outer: usize,
    from: usize,
    to: usize,
    inner: usize,
    op: &impl Fn(&[Complex64], &mut [Complex64]),
) -> Vec<Complex64> {
    let mut out = vec![ZERO; outer * to * inner];
    let mut src = vec![ZERO; from];
    let mut dst = vec![ZERO; to];
    for o in 0..outer {
        for i in 0..inner {
            for (t, s) in src.iter_mut().enumerate() {
                *s = data[(o * from + t) * inner + i];
            }
            if src.iter().all(|x| *x == ZERO) {
                continue;
            }
            dst.iter_mut().for_each(|x| *x = ZERO);
            op(&src, &mut dst);
            for (t, v) in dst.iter().enumerate() {
                out[(o * to + t) * inner + i] = *v;
            }
        }
    }
    out
}

/// Direct evaluation of the inversion formula at one point, using the
/// Cartesian kernel quadrature of [`WKernel`]. Slow; meant as an oracle.
pub fn trace_formula_at(field: &SpectralField, y: &[f64], eta: &[f64], s: f64) -> Result<Complex64> {
    let g = field.grid();
    let c = inverse_plancherel_constant(g.d());
    let mut acc = ZERO;
    for j in 0..g.n_lambda() {
        let lam = g.nodes()[j];
        let kern = WKernel::new(lam, g.d(), g.m_cut())?;
        let mut inner = ZERO;
        for n in 0..g.side() {
            let nm = g.multi_index(n);
            for m in 0..g.side() {
                let v = field.get(n, m, j);
                if v == ZERO {
                    continue;
                }
                inner += v * kern.eval(&nm, &g.multi_index(m), y, eta)?.conj();
            }
        }
        acc += inner * Complex64::from_polar(c * g.weights()[j], lam * s);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::NodeParams;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn radial_rule_integrates_gaussians() {
        let spec = RadialSpec::for_band(1.0, 16.0, 8);
        let (r, w) = spec.nodes();
        for a in [1.0, 5.0, 48.0] {
            let s: f64 = r.iter().zip(&w).map(|(r, w)| w * (-a * r * r).exp()).sum();
            assert!((s - 0.5 / a).abs() < 1e-13 / a);
        }
    }

    fn small() -> (Arc<FrequencyGrid>, TransformPlan) {
        let g = FrequencyGrid::new(1, 3, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s: 6 }).unwrap();
        let p = PhysicalGrid::paired(&g, true).unwrap();
        let plan = TransformPlan::new(&g, &p).unwrap();
        (g, plan)
    }

    #[test]
    fn zero_maps_to_zero() {
        let (g, plan) = small();
        let z = plan.inverse(&SpectralField::zeros(&g)).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        assert_eq!(plan.forward(&z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn single_mode_roundtrip() {
        let (g, plan) = small();
        let j = g.index_of_wavenumber(2).unwrap();
        let f = SpectralField::unit(&g, 1, 3, j);
        let back = plan.forward(&plan.inverse(&f).unwrap()).unwrap();
        let err = (&back - &f).max_abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn mean_is_rejected() {
        let (_, plan) = small();
        let f = PhysicalField::from_fn(plan.pgrid(), |y, e, _| Complex64::new((-y[0] * y[0] - e[0] * e[0]).exp(), 0.0));
        assert!(matches!(plan.forward(&f), Err(Error::NonzeroMean { .. })));
        assert!(plan.forward_drop_mean(&f).is_ok());
    }

    #[test]
    fn pairing_is_checked() {
        let g = FrequencyGrid::new(1, 3, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s: 6 }).unwrap();
        let other = FrequencyGrid::new(1, 3, NodeParams::UniformPeriodic { s_period: 3.0, n_s: 6 }).unwrap();
        let p = PhysicalGrid::paired(&other, true).unwrap();
        assert!(matches!(TransformPlan::new(&g, &p), Err(Error::Unpaired(_))));
        let geo = FrequencyGrid::new(1, 3, NodeParams::Geometric { lambda0: 1.0, ratio: 2.0, count: 3 }).unwrap();
        assert!(PhysicalGrid::paired(&geo, true).is_err());
    }
}
