//! Discretized frequency space: Hermite cutoff, λ nodes and Plancherel weights.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    Geometric,
    UniformPeriodic,
}

impl GridMode {
    pub fn tag(self) -> u8 {
        match self {
            GridMode::Geometric => 0,
            GridMode::UniformPeriodic => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(GridMode::Geometric),
            1 => Some(GridMode::UniformPeriodic),
            _ => None,
        }
    }
}

/// Parameters that generate the λ nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeParams {
    /// Positive nodes `lambda0 * ratio^j`, `j < count`, mirrored to negative values.
    Geometric { lambda0: f64, ratio: f64, count: usize },
    /// Nodes `2πk / s_period` for `0 < |k| <= n_s / 2`.
    UniformPeriodic { s_period: f64, n_s: usize },
}

impl NodeParams {
    pub fn mode(&self) -> GridMode {
        match self {
            NodeParams::Geometric { .. } => GridMode::Geometric,
            NodeParams::UniformPeriodic { .. } => GridMode::UniformPeriodic,
        }
    }
}

/// Frequency grid for fields `F(n, m, λ)` with `n, m ∈ [0, M]^d`.
///
/// Nodes are stored in ascending order: the negative half first, then the
/// positive half, so `nodes[i] == -nodes[len - 1 - i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    d: usize,
    m_cut: usize,
    params: NodeParams,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    degrees: Vec<usize>,
}

impl FrequencyGrid {
    pub fn new(d: usize, m_cut: usize, params: NodeParams) -> Result<Arc<Self>> {
        if d == 0 {
            return Err(Error::InvalidGrid("d must be positive".into()));
        }
        let positive: Vec<f64> = match params {
            NodeParams::Geometric { lambda0, ratio, count } => {
                if !(lambda0 > 0.0) || !lambda0.is_finite() {
                    return Err(Error::InvalidGrid(format!("lambda0 = {lambda0} must be positive")));
                }
                if !(ratio > 1.0) || !ratio.is_finite() {
                    return Err(Error::InvalidGrid(format!("ratio = {ratio} must exceed 1")));
                }
                if count == 0 {
                    return Err(Error::InvalidGrid("count must be at least 1".into()));
                }
                (0..count).map(|j| lambda0 * ratio.powi(j as i32)).collect()
            }
            NodeParams::UniformPeriodic { s_period, n_s } => {
                if !(s_period > 0.0) || !s_period.is_finite() {
                    return Err(Error::InvalidGrid(format!("s_period = {s_period} must be positive")));
                }
                if n_s < 4 || n_s % 2 != 0 {
                    return Err(Error::InvalidGrid(format!("N_s = {n_s} must be even and >= 4")));
                }
                (1..=n_s / 2).map(|k| 2.0 * PI * k as f64 / s_period).collect()
            }
        };
        let cell = |lam: f64| -> f64 {
            match params {
                NodeParams::Geometric { ratio, .. } => ratio.ln() * lam.powi(d as i32 + 1),
                NodeParams::UniformPeriodic { s_period, .. } => 2.0 * PI / s_period * lam.powi(d as i32),
            }
        };
        let mut nodes: Vec<f64> = positive.iter().rev().map(|&l| -l).collect();
        nodes.extend_from_slice(&positive);
        let weights = nodes.iter().map(|&l| cell(l.abs())).collect();
        let side = (m_cut + 1).pow(d as u32);
        let degrees = (0..side).map(|flat| digits(flat, d, m_cut).iter().sum()).collect();
        Ok(Arc::new(FrequencyGrid { d, m_cut, params, nodes, weights, degrees }))
    }

    /// Same λ discretization with a different Hermite cutoff.
    pub fn with_cutoff(&self, m_cut: usize) -> Arc<Self> {
        FrequencyGrid::new(self.d, m_cut, self.params).expect("parameters already validated")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Hermite cutoff `M`.
    pub fn m_cut(&self) -> usize {
        self.m_cut
    }

    /// Homogeneous dimension `2d + 2`.
    pub fn q_dim(&self) -> usize {
        2 * self.d + 2
    }

    pub fn mode(&self) -> GridMode {
        self.params.mode()
    }

    pub fn params(&self) -> NodeParams {
        self.params
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_lambda(&self) -> usize {
        self.nodes.len()
    }

    /// Number of positive nodes.
    pub fn n_positive(&self) -> usize {
        self.nodes.len() / 2
    }

    /// Index of the node `-λ_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.nodes.len() - 1 - i
    }

    pub fn max_abs_lambda(&self) -> f64 {
        self.nodes.last().copied().unwrap_or(0.0)
    }

    pub fn min_abs_lambda(&self) -> f64 {
        self.nodes[self.n_positive()]
    }

    /// Number of multi-indices in `[0, M]^d`.
    pub fn side(&self) -> usize {
        self.degrees.len()
    }

    pub fn n_coeffs(&self) -> usize {
        self.side() * self.side() * self.n_lambda()
    }

    /// Flat position of `(n, m, j)`; `n` is the slowest index.
    #[inline]
    pub fn index(&self, n: usize, m: usize, j: usize) -> usize {
        (n * self.side() + m) * self.n_lambda() + j
    }

    /// `|n|` for a flat multi-index.
    #[inline]
    pub fn degree(&self, flat: usize) -> usize {
        self.degrees[flat]
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        digits(flat, self.d, self.m_cut)
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        assert_eq!(multi.len(), self.d);
        multi.iter().fold(0, |acc, &k| {
            assert!(k <= self.m_cut, "multi-index component {k} exceeds cutoff");
            acc * (self.m_cut + 1) + k
        })
    }

    /// Flat-index stride of coordinate `j` (0-based) of a multi-index.
    pub fn stride(&self, j: usize) -> usize {
        (self.m_cut + 1).pow((self.d - 1 - j) as u32)
    }

    /// Component `j` of a flat multi-index.
    #[inline]
    pub fn component(&self, flat: usize, j: usize) -> usize {
        (flat / self.stride(j)) % (self.m_cut + 1)
    }

    /// Sub-Laplacian eigenvalue `4|λ|(2|k| + d)` for a multi-index of degree `deg`.
    #[inline]
    pub fn eigenvalue(&self, deg: usize, lambda: f64) -> f64 {
        4.0 * lambda.abs() * (2 * deg + self.d) as f64
    }

    /// Geometric ratio, if any.
    pub fn ratio(&self) -> Option<f64> {
        match self.params {
            NodeParams::Geometric { ratio, .. } => Some(ratio),
            _ => None,
        }
    }

    pub fn s_period(&self) -> Option<f64> {
        match self.params {
            NodeParams::UniformPeriodic { s_period, .. } => Some(s_period),
            _ => None,
        }
    }

    /// `N_s` for uniform grids.
    pub fn n_s(&self) -> Option<usize> {
        match self.params {
            NodeParams::UniformPeriodic { n_s, .. } => Some(n_s),
            _ => None,
        }
    }

    /// Signed DFT wavenumber of node `i` on a uniform grid.
    pub fn wavenumber(&self, i: usize) -> Option<i64> {
        self.n_s().map(|_| {
            let p = self.n_positive();
            if i >= p {
                (i - p + 1) as i64
            } else {
                -((p - i) as i64)
            }
        })
    }

    /// Node index of a signed wavenumber on a uniform grid.
    pub fn index_of_wavenumber(&self, k: i64) -> Option<usize> {
        let p = self.n_positive() as i64;
        if k == 0 || k.abs() > p || self.n_s().is_none() {
            return None;
        }
        Some(if k > 0 { (p + k - 1) as usize } else { (p + k) as usize })
    }
}

/// True when two grids describe the same discretization.
pub fn same_grid(a: &Arc<FrequencyGrid>, b: &Arc<FrequencyGrid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Physical pairing constant `2^{d-1} / π^{d+1}`.
pub fn inverse_plancherel_constant(d: usize) -> f64 {
    2f64.powi(d as i32 - 1) / PI.powi(d as i32 + 1)
}

/// `π^{d+1} / 2^{d-1}`.
pub fn plancherel_constant(d: usize) -> f64 {
    1.0 / inverse_plancherel_constant(d)
}

fn digits(mut flat: usize, d: usize, m_cut: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for slot in out.iter_mut().rev() {
        *slot = flat % (m_cut + 1);
        flat /= m_cut + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_nodes_are_symmetric() {
        let g = FrequencyGrid::new(1, 4, NodeParams::Geometric { lambda0: 0.25, ratio: 2.0, count: 4 }).unwrap();
        assert_eq!(g.nodes(), &[-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0]);
        for i in 0..g.n_lambda() {
            assert_eq!(g.weights()[i], g.weights()[g.mirror(i)]);
            assert!(g.weights()[i] > 0.0);
        }
    }

    #[test]
    fn uniform_weights() {
        let g = FrequencyGrid::new(1, 2, NodeParams::UniformPeriodic { s_period: 2.0 * PI, n_s: 8 }).unwrap();
        let expect = [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0];
        for (a, b) in g.nodes().iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let j = g.index_of_wavenumber(2).unwrap();
        assert!((g.weights()[j] - 2.0).abs() < 1e-14);
        assert_eq!(g.wavenumber(j), Some(2));
        assert_eq!(g.wavenumber(0), Some(-4));
    }

    #[test]
    fn minimal_grid() {
        let g = FrequencyGrid::new(1, 0, NodeParams::Geometric { lambda0: 1.0, ratio: 2.0, count: 1 }).unwrap();
        assert_eq!(g.nodes(), &[-1.0, 1.0]);
        assert_eq!(g.n_coeffs(), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FrequencyGrid::new(1, 2, NodeParams::Geometric { lambda0: 0.0, ratio: 2.0, count: 3 }).is_err());
        assert!(FrequencyGrid::new(1, 2, NodeParams::Geometric { lambda0: 1.0, ratio: 1.0, count: 3 }).is_err());
        assert!(FrequencyGrid::new(1, 2, NodeParams::UniformPeriodic { s_period: 1.0, n_s: 7 }).is_err());
        assert!(FrequencyGrid::new(1, 2, NodeParams::UniformPeriodic { s_period: 1.0, n_s: 2 }).is_err());
        assert!(FrequencyGrid::new(0, 2, NodeParams::UniformPeriodic { s_period: 1.0, n_s: 4 }).is_err());
    }

    #[test]
    fn homogeneous_dimension() {
        for d in 1..=3 {
            let g = FrequencyGrid::new(d, 1, NodeParams::Geometric { lambda0: 1.0, ratio: 2.0, count: 2 }).unwrap();
            assert_eq!(g.q_dim(), 2 * d + 2);
        }
    }

    #[test]
    fn multi_index_roundtrip() {
        let g = FrequencyGrid::new(3, 2, NodeParams::Geometric { lambda0: 1.0, ratio: 2.0, count: 1 }).unwrap();
        for flat in 0..g.side() {
            let mi = g.multi_index(flat);
            assert_eq!(g.flat_index(&mi), flat);
            assert_eq!(g.degree(flat), mi.iter().sum::<usize>());
            for (j, &k) in mi.iter().enumerate() {
                assert_eq!(g.component(flat, j), k);
            }
        }
    }
}
