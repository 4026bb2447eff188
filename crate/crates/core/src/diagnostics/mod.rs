//! Run orchestration, time series, physical norms and the vertical
//! analyticity-radius estimator.

mod config;
mod run;
mod series;
pub mod verify;

pub use config::{GridSection, InitSection, OutputSection, Problem, SimulationConfig, StepperSection};
pub use run::{initial_state, perturb, run, simulate, Artifacts, Simulation};
pub use series::{Record, TimeSeries};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frequency::{inverse_plancherel_constant, FrequencyGrid, HorizontalField};

/// `Σ |F|² weight(|n|, |m|, λ) w_j`, physically normalized.
pub fn weighted_sq(u: &HorizontalField, weight: impl Fn(usize, usize, f64) -> f64) -> f64 {
    let g = u.grid();
    let nl = g.n_lambda();
    let side = g.side();
    let mut acc = 0.0;
    for c in u.components() {
        for n in 0..side {
            for m in 0..side {
                let (dn, dm) = (g.degree(n), g.degree(m));
                let base = g.index(n, m, 0);
                for j in 0..nl {
                    let v = c.coeffs()[base + j];
                    if v != Complex64::new(0.0, 0.0) {
                        acc += v.norm_sqr() * weight(dn, dm, g.nodes()[j]) * g.weights()[j];
                    }
                }
            }
        }
    }
    acc * inverse_plancherel_constant(g.d())
}

/// `(4|λ|(2|n|+d))^d`, the `H̃^d` weight.
pub fn htilde_weight(d: usize, deg_n: usize, lambda: f64) -> f64 {
    (4.0 * lambda.abs() * (2 * deg_n + d) as f64).powi(d as i32)
}

pub fn l2_sq(u: &HorizontalField) -> f64 {
    weighted_sq(u, |_, _, _| 1.0)
}

/// `‖∇_ℍ u‖²_{L²}`.
pub fn grad_l2_sq(u: &HorizontalField) -> f64 {
    let g = u.grid().clone();
    weighted_sq(u, |_, dm, l| g.eigenvalue(dm, l))
}

/// `‖u‖²_{H̃^d}`.
pub fn htilde_sq(u: &HorizontalField) -> f64 {
    let d = u.grid().d();
    weighted_sq(u, |dn, _, l| htilde_weight(d, dn, l))
}

/// `‖∇_ℍ u‖²_{H̃^d}`.
pub fn grad_htilde_sq(u: &HorizontalField) -> f64 {
    let g = u.grid().clone();
    let d = g.d();
    weighted_sq(u, |dn, dm, l| htilde_weight(d, dn, l) * g.eigenvalue(dm, l))
}

/// `‖e^{ζ|D_s|} u‖²_{H̃^d}`.
pub fn analytic_htilde_sq(u: &HorizontalField, zeta: f64) -> f64 {
    let d = u.grid().d();
    weighted_sq(u, |dn, _, l| htilde_weight(d, dn, l) * (2.0 * zeta * l.abs()).exp())
}

/// `‖e^{δ|D_s|} u‖²_{Ḣ^d}`.
pub fn analytic_dot_hd_sq(u: &HorizontalField, delta: f64) -> f64 {
    let g = u.grid().clone();
    let d = g.d();
    weighted_sq(u, |_, dm, l| g.eigenvalue(dm, l).powi(d as i32) * (2.0 * delta * l.abs()).exp())
}

/// Logarithmic mean `(a − b) / ln(a / b)`.
pub fn log_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let r = b / a - 1.0;
    if r.abs() < 1e-6 {
        a * (1.0 + r / 2.0 - r * r / 12.0)
    } else {
        (a - b) / (a / b).ln()
    }
}

/// `∫ ‖∇_ℍ u‖²_weight dt` over one step, with each mode's `|F|²` taken as
/// exponential between its end values. Exact for diagonal decay.
pub fn dissipation_increment(
    prev: &HorizontalField,
    next: &HorizontalField,
    dt: f64,
    weight: impl Fn(usize, usize, f64) -> f64,
) -> f64 {
    let g = prev.grid();
    let nl = g.n_lambda();
    let side = g.side();
    let mut acc = 0.0;
    for (a, b) in prev.components().iter().zip(next.components()) {
        for n in 0..side {
            for m in 0..side {
                let (dn, dm) = (g.degree(n), g.degree(m));
                let base = g.index(n, m, 0);
                for j in 0..nl {
                    let lam = g.nodes()[j];
                    let mean = log_mean(a.coeffs()[base + j].norm_sqr(), b.coeffs()[base + j].norm_sqr());
                    if mean > 0.0 {
                        acc += mean * g.eigenvalue(dm, lam) * weight(dn, dm, lam) * g.weights()[j];
                    }
                }
            }
        }
    }
    acc * dt * inverse_plancherel_constant(g.d())
}

/// Result of the λ-slope fit behind [`analyticity_radius`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusFit {
    pub radius: f64,
    pub slope: f64,
    pub intercept: f64,
    /// `|λ|` bins that entered the fit.
    pub window: Vec<f64>,
}

/// Squared `H̃^d` mass per `|λ|` bin with the polynomial factors
/// `(4|λ|)^d` and `|λ|^d` divided out.
pub fn radial_mass(u: &HorizontalField) -> Vec<(f64, f64)> {
    let g: &FrequencyGrid = u.grid();
    let d = g.d();
    let half = g.n_positive();
    let side = g.side();
    let mut out = Vec::with_capacity(half);
    for lvl in 0..half {
        let jp = half + lvl;
        let jn = g.mirror(jp);
        let mut s = 0.0;
        for c in u.components() {
            for n in 0..side {
                let w = ((2 * g.degree(n) + d) as f64).powi(d as i32);
                for m in 0..side {
                    let base = g.index(n, m, 0);
                    s += w * (c.coeffs()[base + jp].norm_sqr() + c.coeffs()[base + jn].norm_sqr());
                }
            }
        }
        out.push((g.nodes()[jp], s));
    }
    out
}

/// Fits `log S(|λ|) ≈ c − 2R|λ|` over bins above `1e-24 · max S`.
pub fn analyticity_fit(u: &HorizontalField) -> Result<RadiusFit> {
    let mass = radial_mass(u);
    let top = mass.iter().map(|p| p.1).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = mass.into_iter().filter(|p| p.1 > 1e-24 * top && p.1 > 0.0).collect();
    if pts.len() < 3 {
        return Err(Error::Estimator(format!("{} usable λ bins, need 3", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let slope = sxy / sxx;
    Ok(RadiusFit {
        radius: (-slope / 2.0).max(0.0),
        slope,
        intercept: my - slope * mx,
        window: pts.iter().map(|p| p.0).collect(),
    })
}

/// Least-squares estimate of `sup { R : e^{R|D_s|} u ∈ H̃^d }` on the band.
pub fn analyticity_radius(u: &HorizontalField) -> Result<f64> {
    Ok(analyticity_fit(u)?.radius)
}

/// Least-squares slope through the origin of `y` against `x`, with `R²`.
pub fn fit_through_origin(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let c = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - c * a).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (c, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::step_heat;
    use crate::frequency::{NodeParams, SpectralField};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid() -> Arc<FrequencyGrid> {
        FrequencyGrid::new(1, 4, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s: 32 }).unwrap()
    }

    fn decaying(g: &Arc<FrequencyGrid>, r: f64) -> HorizontalField {
        let f = SpectralField::from_fn(g, |n, m, j| {
            let lam = g.nodes()[j].abs();
            let s = if n <= 2 && m <= 2 { 1.0 / (1.0 + n as f64 + m as f64) } else { 0.0 };
            Complex64::new(s * (-r * lam).exp(), 0.0)
        });
        HorizontalField::from_components(vec![f.clone(), f]).unwrap()
    }

    #[test]
    fn radius_examples() {
        let g = grid();
        let r = analyticity_radius(&decaying(&g, 0.7)).unwrap();
        assert!((0.63..=0.77).contains(&r), "{r}");
        assert!(analyticity_radius(&decaying(&g, 0.0)).unwrap() < 1e-12);
        assert!(matches!(analyticity_radius(&HorizontalField::zeros(&g)), Err(Error::Estimator(_))));
    }

    #[test]
    fn heat_sharpens_the_radius() {
        let g = grid();
        let u = decaying(&g, 0.0);
        let mut prev = 0.0;
        for t in [0.002, 0.004, 0.008] {
            let r = analyticity_radius(&step_heat(&u, t)).unwrap();
            assert!(r >= 0.9 * 4.0 * t && r >= prev);
            prev = r;
        }
    }

    #[test]
    fn log_mean_is_exact_for_heat() {
        let g = grid();
        let u = decaying(&g, 0.1);
        let dt = 0.01;
        let v = step_heat(&u, dt);
        let lhs = l2_sq(&v) + 2.0 * dissipation_increment(&u, &v, dt, |_, _, _| 1.0);
        assert!((lhs - l2_sq(&u)).abs() < 1e-13 * l2_sq(&u));
        assert!((log_mean(2.0, 2.0 * (1.0 + 1e-9)) - 2.0 * (1.0 + 0.5e-9)).abs() < 1e-15);
    }

    #[test]
    fn origin_fit() {
        let (c, r2) = fit_through_origin(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((c - 2.0).abs() < 1e-15 && (r2 - 1.0).abs() < 1e-15);
    }
}
