//! Independent representations of the lowest member and its growth rate.
//!
//! In the Bargmann variable `z` with `ζ = √(2κ) z`, the pair `𝒟₀^{(±)}`
//! is proportional to
//! `d^{(±)}(z) = z^{3/2}[I_{±¼}(κz²/2) − I_{∓¾}(κz²/2)]`, and the even member
//! also to `e^{−κz²/2} ₁F₁(−¼, ½, κz²)`. Both are evaluated here from their
//! own series and compared by ratio constancy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::rgamma_quarter;
use super::{eval_d, Branch, DIndex};
use crate::error::{Error, Result};

/// `I_ν(t)` for `ν = q/4` by its ascending series.
pub fn bessel_i_quarter(q: i64, t: f64) -> f64 {
    let nu = q as f64 / 4.0;
    let h = t / 2.0;
    // 1/Γ(ν + 1)
    let mut term = h.powf(nu) * rgamma_quarter(q + 4);
    let mut sum = term;
    for k in 0..500 {
        let kf = k as f64;
        term *= h * h / ((kf + 1.0) * (kf + 1.0 + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `z^{3/2}[I_{±¼}(κz²/2) − I_{∓¾}(κz²/2)]`.
pub fn bessel_combination(branch: Branch, z: f64, kappa: f64) -> f64 {
    let t = kappa * z * z / 2.0;
    let (a, b) = match branch {
        Branch::Plus => (1, -3),
        Branch::Minus => (-1, 3),
    };
    z.powf(1.5) * (bessel_i_quarter(a, t) - bessel_i_quarter(b, t))
}

/// `₁F₁(a; b; x)` for real arguments, summed as `eˣ ₁F₁(b−a; b; −x)`.
pub fn hyp1f1(a: f64, b: f64, x: f64) -> f64 {
    let y = -x;
    let a2 = b - a;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..5000 {
        let kf = k as f64;
        term *= (a2 + kf) / ((b + kf) * (kf + 1.0)) * y;
        sum += term;
        if kf > y.abs() && term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    x.exp() * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioCheck {
    pub mean: f64,
    /// Largest `|rᵢ/mean − 1|` over the grid.
    pub max_deviation: f64,
    pub points: usize,
}

pub fn ratio_constancy(num: &[f64], den: &[f64]) -> RatioCheck {
    let ratios: Vec<f64> = num.iter().zip(den).map(|(a, b)| a / b).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max_deviation = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    RatioCheck { mean, max_deviation, points: ratios.len() }
}

/// Real part of `𝒟₀^{(σ)}(√(2κ) z)`, skipping grid points near its zeros.
fn d0_on_grid(branch: Branch, zs: &[f64], kappa: f64) -> Result<Vec<(f64, f64)>> {
    let s = (2.0 * kappa).sqrt();
    let mut out = Vec::with_capacity(zs.len());
    for &z in zs {
        let d = eval_d(DIndex::new(0, branch), Complex64::new(s * z, 0.0))?;
        if d.value.norm() > 1e-8 * d.derivative.norm().max(1.0) {
            out.push((z, d.value.re));
        }
    }
    Ok(out)
}

fn validate_grid(zs: &[f64], kappa: f64) -> Result<()> {
    if zs.is_empty() || zs.iter().any(|&z| !(z > 0.0)) || !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidParameter("cross-check needs z > 0 and kappa in (0,1)".into()));
    }
    Ok(())
}

/// Ratio `d^{(±)}(z) / 𝒟₀^{(d_branch)}(√(2κ)z)` over `zs`.
pub fn bessel_crosscheck(bessel_branch: Branch, d_branch: Branch, zs: &[f64], kappa: f64) -> Result<RatioCheck> {
    validate_grid(zs, kappa)?;
    let d = d0_on_grid(d_branch, zs, kappa)?;
    let num: Vec<f64> = d.iter().map(|&(z, _)| bessel_combination(bessel_branch, z, kappa)).collect();
    let den: Vec<f64> = d.iter().map(|&(_, v)| v).collect();
    Ok(ratio_constancy(&num, &den))
}

/// Ratio `e^{−κz²/2}₁F₁(−¼,½,κz²) / 𝒟₀^{(+)}(√(2κ)z)` and the odd analogue
/// `z e^{−κz²/2}₁F₁(¼,3/2,κz²) / 𝒟₀^{(−)}`.
pub fn hyp1f1_crosscheck(branch: Branch, zs: &[f64], kappa: f64) -> Result<RatioCheck> {
    validate_grid(zs, kappa)?;
    let d = d0_on_grid(branch, zs, kappa)?;
    let num: Vec<f64> = d
        .iter()
        .map(|&(z, _)| {
            let x = kappa * z * z;
            let g = (-x / 2.0).exp();
            match branch {
                Branch::Plus => g * hyp1f1(-0.25, 0.5, x),
                Branch::Minus => z * g * hyp1f1(0.25, 1.5, x),
            }
        })
        .collect();
    let den: Vec<f64> = d.iter().map(|&(_, v)| v).collect();
    Ok(ratio_constancy(&num, &den))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Type: coefficient of `z²` in `log|f|`.
    pub sigma: f64,
    /// Coefficient of `ln z`.
    pub power: f64,
    pub offset: f64,
    pub rms_residual: f64,
}

/// Least-squares fit `log|f(z)| ≈ σz² + p ln z + c` over sampled `(z, log|f|)`.
pub fn fit_growth(samples: &[(f64, f64)]) -> Result<GrowthFit> {
    if samples.len() < 4 {
        return Err(Error::InvalidParameter("growth fit needs at least 4 samples".into()));
    }
    let a = DMatrix::from_fn(samples.len(), 3, |r, c| {
        let z = samples[r].0;
        match c {
            0 => z * z,
            1 => z.ln(),
            _ => 1.0,
        }
    });
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&y, 1e-14).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let r = &a * &x - &y;
    Ok(GrowthFit {
        sigma: x[0],
        power: x[1],
        offset: x[2],
        rms_residual: (r.norm_squared() / samples.len() as f64).sqrt(),
    })
}

pub const GROWTH_WINDOW: (f64, f64) = (8.0, 15.0);

/// Growth type of `z ↦ 𝒟ₙ^{(σ)}(√(2κ)z)` on `z ∈ [8, 15]`.
pub fn growth_type(i: DIndex, kappa: f64) -> Result<GrowthFit> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} must lie in (0,1)")));
    }
    let s = (2.0 * kappa).sqrt();
    let (lo, hi) = GROWTH_WINDOW;
    let m = 36;
    let samples = (0..m)
        .map(|k| {
            let z = lo + (hi - lo) * k as f64 / (m - 1) as f64;
            let d = eval_d(i, Complex64::new(s * z, 0.0))?;
            Ok((z, d.value.norm().ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_growth(&samples)
}
