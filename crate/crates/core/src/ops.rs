//! Linear operators in frequency space: diagonal symbols and ladder
//! realizations of the left- and right-invariant vector fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frequency::{HorizontalField, SpectralField};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Which eigenvalue a band indicator tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Band {
    /// `4|λ|(2|m| + d)`
    Left,
    /// `4|λ|(2|n| + d)`
    Right,
    /// `|λ|`
    Vertical,
}

/// Diagonal multipliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymbolSpec {
    /// `(-Δ)^ℓ`: `(4|λ|(2|m|+d))^ℓ`
    LeftSublapPow(f64),
    /// `(-Δ̃)^ℓ`: `(4|λ|(2|n|+d))^ℓ`
    RightSublapPow(f64),
    /// `(1 + 4|λ|(2|m|+d))^ℓ`
    LeftInhomPow(f64),
    /// `(1 + 4|λ|(2|n|+d))^ℓ`
    RightInhomPow(f64),
    /// `∂_s`: `iλ`
    Ds,
    /// `|D_s|^ℓ`: `|λ|^ℓ`, `ℓ >= 0`
    AbsDsPow(f64),
    /// `e^{ζ|D_s|}`
    ExpAbsDs(f64),
    /// Indicator of `lo <= eigenvalue <= hi`.
    BandIndicator { band: Band, lo: f64, hi: f64 },
}

impl SymbolSpec {
    pub fn validate(&self, max_abs_lambda: f64) -> Result<()> {
        match *self {
            SymbolSpec::AbsDsPow(l) if l < 0.0 || !l.is_finite() => {
                Err(Error::InvalidSymbol(format!("|D_s|^{l}: only nonnegative powers")))
            }
            SymbolSpec::ExpAbsDs(z) if !(z.abs() * max_abs_lambda <= 700.0) => {
                Err(Error::InvalidSymbol(format!("e^(ζ|D_s|) with ζ = {z} overflows on |λ| <= {max_abs_lambda}")))
            }
            SymbolSpec::BandIndicator { lo, hi, .. } if lo.is_nan() || hi.is_nan() => {
                Err(Error::InvalidSymbol("band bounds must be numbers".into()))
            }
            _ => Ok(()),
        }
    }

    /// Symbol value at `(|n|, |m|, λ)`.
    pub fn value(&self, d: usize, deg_n: usize, deg_m: usize, lambda: f64) -> Complex64 {
        let a = lambda.abs();
        let left = || 4.0 * a * (2 * deg_m + d) as f64;
        let right = || 4.0 * a * (2 * deg_n + d) as f64;
        let re = |x: f64| Complex64::new(x, 0.0);
        match *self {
            SymbolSpec::LeftSublapPow(l) => re(left().powf(l)),
            SymbolSpec::RightSublapPow(l) => re(right().powf(l)),
            SymbolSpec::LeftInhomPow(l) => re((1.0 + left()).powf(l)),
            SymbolSpec::RightInhomPow(l) => re((1.0 + right()).powf(l)),
            SymbolSpec::Ds => Complex64::new(0.0, lambda),
            SymbolSpec::AbsDsPow(l) => re(a.powf(l)),
            SymbolSpec::ExpAbsDs(z) => re((z * a).exp()),
            SymbolSpec::BandIndicator { band, lo, hi } => {
                let e = match band {
                    Band::Left => left(),
                    Band::Right => right(),
                    Band::Vertical => a,
                };
                re(if lo <= e && e <= hi { 1.0 } else { 0.0 })
            }
        }
    }
}

pub fn apply_symbol(f: &SpectralField, s: SymbolSpec) -> Result<SpectralField> {
    let g = f.grid().clone();
    s.validate(g.max_abs_lambda())?;
    Ok(f.map(|n, m, j, c| {
        if c == ZERO {
            c
        } else {
            c * s.value(g.d(), g.degree(n), g.degree(m), g.nodes()[j])
        }
    }))
}

pub fn apply_symbol_h(u: &HorizontalField, s: SymbolSpec) -> Result<HorizontalField> {
    HorizontalField::from_components(u.components().iter().map(|c| apply_symbol(c, s)).collect::<Result<_>>()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    /// `X_j = ∂_{y_j} + 2η_j ∂_s`
    X,
    /// `Ξ_j = ∂_{η_j} - 2y_j ∂_s`
    Xi,
    /// `X̃_j = ∂_{y_j} - 2η_j ∂_s`
    XTilde,
    /// `Ξ̃_j = ∂_{η_j} + 2y_j ∂_s`
    XiTilde,
}

/// A vector field direction; `j` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LadderSpec {
    pub kind: LadderKind,
    pub j: usize,
}

impl LadderSpec {
    pub fn new(kind: LadderKind, j: usize) -> Self {
        LadderSpec { kind, j }
    }

    /// `P_i` for `i` in `1..=2d`: `X_i` then `Ξ_{i-d}`.
    pub fn left(i: usize, d: usize) -> Self {
        if i <= d {
            LadderSpec::new(LadderKind::X, i)
        } else {
            LadderSpec::new(LadderKind::Xi, i - d)
        }
    }

    /// `P̃_i` for `i` in `1..=2d`.
    pub fn right(i: usize, d: usize) -> Self {
        if i <= d {
            LadderSpec::new(LadderKind::XTilde, i)
        } else {
            LadderSpec::new(LadderKind::XiTilde, i - d)
        }
    }
}

/// Frequency-side action of a vector field. Left fields step `m`, right fields
/// step `n`:
///
/// - `𝓕(X_j f)  = -𝓜⁺_j 𝓕f`, `𝓜⁺_j F(m) = √(2|λ|)(√(m_j+1) F(m+e_j) − √m_j F(m−e_j))`
/// - `𝓕(Ξ_j f)  = +𝓜⁻_j 𝓕f`, `𝓜⁻_j F(m) = i√2 λ/√|λ| (√(m_j+1) F(m+e_j) + √m_j F(m−e_j))`
/// - `𝓕(X̃_j f) = 𝓜̃⁺_j 𝓕f`, `𝓕(Ξ̃_j f) = 𝓜̃⁻_j 𝓕f` (same formulas in `n`)
///
/// Indices beyond the cutoff read zero.
pub fn apply_ladder(f: &SpectralField, l: LadderSpec) -> Result<SpectralField> {
    let g = f.grid();
    if l.j == 0 || l.j > g.d() {
        return Err(Error::InvalidSymbol(format!("direction j = {} outside 1..={}", l.j, g.d())));
    }
    let axis = l.j - 1;
    let right = matches!(l.kind, LadderKind::XTilde | LadderKind::XiTilde);
    let coefs: Vec<(Complex64, Complex64)> = g
        .nodes()
        .iter()
        .map(|&lam| {
            let a = (2.0 * lam.abs()).sqrt();
            let b = Complex64::new(0.0, 2f64.sqrt() * lam / lam.abs().sqrt());
            match l.kind {
                LadderKind::X => (Complex64::new(-a, 0.0), Complex64::new(a, 0.0)),
                LadderKind::XTilde => (Complex64::new(a, 0.0), Complex64::new(-a, 0.0)),
                LadderKind::Xi | LadderKind::XiTilde => (b, b),
            }
        })
        .collect();
    let side = g.side();
    let nl = g.n_lambda();
    let top = g.m_cut();
    let stride = g.stride(axis);
    let mut out = SpectralField::zeros(g);
    let src = f.coeffs();
    let dst = out.coeffs_mut();
    for n in 0..side {
        for m in 0..side {
            let k = if right { n } else { m };
            let kj = g.component(k, axis);
            let at = |kk: usize| if right { g.index(kk, m, 0) } else { g.index(n, kk, 0) };
            let base = g.index(n, m, 0);
            if kj < top {
                let up = at(k + stride);
                let s = ((kj + 1) as f64).sqrt();
                for j in 0..nl {
                    dst[base + j] += coefs[j].0 * s * src[up + j];
                }
            }
            if kj > 0 {
                let down = at(k - stride);
                let s = (kj as f64).sqrt();
                for j in 0..nl {
                    dst[base + j] += coefs[j].1 * s * src[down + j];
                }
            }
        }
    }
    Ok(out)
}

/// `(X_1 f, …, X_d f, Ξ_1 f, …, Ξ_d f)`.
pub fn gradient_h(f: &SpectralField) -> HorizontalField {
    let d = f.grid().d();
    let comps = (1..=2 * d).map(|i| apply_ladder(f, LadderSpec::left(i, d)).expect("valid direction")).collect();
    HorizontalField::from_components(comps).expect("2d components")
}

/// `Σ_i P_i u_i`.
pub fn divergence_h(u: &HorizontalField) -> SpectralField {
    let d = u.grid().d();
    let mut acc = SpectralField::zeros(u.grid());
    for (i, c) in u.components().iter().enumerate() {
        acc += &apply_ladder(c, LadderSpec::left(i + 1, d)).expect("valid direction");
    }
    acc
}

/// Any operator of this module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Operator {
    Symbol(SymbolSpec),
    Ladder(LadderSpec),
}

pub fn apply_operator(f: &SpectralField, op: Operator) -> Result<SpectralField> {
    match op {
        Operator::Symbol(s) => apply_symbol(f, s),
        Operator::Ladder(l) => apply_ladder(f, l),
    }
}

/// `[A, B] f = A(B f) − B(A f)`.
pub fn commutator(f: &SpectralField, a: Operator, b: Operator) -> Result<SpectralField> {
    let ab = apply_operator(&apply_operator(f, b)?, a)?;
    let ba = apply_operator(&apply_operator(f, a)?, b)?;
    Ok(ab - ba)
}
