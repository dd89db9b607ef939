//! Null vector of the tridiagonal system by inverse iteration.

use nalgebra::DMatrix;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::TridiagSystem;
use crate::dfamily::Precision;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// `‖Ma‖ < target · ‖M‖_F ‖a‖`.
pub const NULL_RESIDUAL_TARGET: f64 = 1e-9;
/// Required ratio between the two smallest singular values.
pub const SINGULAR_GAP: f64 = 1e6;
/// `|det| / scale` above this is not treated as a root.
const ROOT_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullVector {
    /// `a₀..a_ℓ`, scaled so that `a_ℓ = 1`.
    pub coefficients: Vec<f64>,
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_second: f64,
    pub extended: bool,
}

/// Solves `My = x` by Gaussian elimination with partial pivoting. Exactly
/// zero pivots are replaced by `tiny` so a singular `M` still yields a
/// direction.
fn solve<T: Float>(m: &[Vec<T>], x: &[T], tiny: T) -> Vec<T> {
    let n = x.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut b = x.to_vec();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).expect("finite")).expect("non-empty");
        a.swap(c, p);
        b.swap(c, p);
        if a[c][c].abs() <= tiny {
            a[c][c] = tiny;
        }
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] = a[r][k] - f * a[c][k];
            }
            b[r] = b[r] - f * b[c];
        }
    }
    let mut y = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for k in r + 1..n {
            s = s - a[r][k] * y[k];
        }
        y[r] = s / a[r][r];
    }
    y
}

fn normalize<T: Float>(v: &mut [T]) {
    let n = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    for x in v.iter_mut() {
        *x = *x / n;
    }
}

/// Two inverse-iteration steps from the given start.
fn inverse_iteration<T: Float>(m: &[Vec<T>], start: &[T], tiny: T) -> Vec<T> {
    let mut x = start.to_vec();
    normalize(&mut x);
    for _ in 0..2 {
        x = solve(m, &x, tiny);
        normalize(&mut x);
    }
    x
}

fn relative_residual(s: &TridiagSystem<f64>, a: &[f64]) -> f64 {
    let m = s.dense();
    let r: f64 = m.iter().map(|row| row.iter().zip(a).map(|(x, y)| x * y).sum::<f64>().powi(2)).sum::<f64>().sqrt();
    let an: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    r / (s.frobenius() * an)
}

pub fn null_vector(ell: u32, m: &ModelParams) -> Result<NullVector> {
    null_vector_seeded(ell, m, DEFAULT_SEED)
}

/// Null vector from a seeded random start.
pub fn null_vector_seeded(ell: u32, m: &ModelParams, seed: u64) -> Result<NullVector> {
    null_vector_with(ell, m, seed, Precision::Auto)
}

/// `Double` stays in f64, `Extended` iterates in double-double, `Auto` falls
/// back to double-double when the f64 residual misses the target.
pub fn null_vector_with(ell: u32, m: &ModelParams, seed: u64, precision: Precision) -> Result<NullVector> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    let s = TridiagSystem::new(ell, m);
    let scaled = s.determinant().abs() / s.scale();
    let extended_det = super::normalized_determinant(ell, m.kappa(), m.mu()).abs();
    if scaled.min(extended_det) > ROOT_THRESHOLD {
        return Err(Error::InvalidParameter(format!("kappa = {} is not a root for ell = {ell} (|det|/scale = {extended_det:e})", m.kappa())));
    }
    let n = s.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let dense = s.dense();
    let tiny = f64::EPSILON * s.frobenius();
    let mut a = inverse_iteration(&dense, &start, tiny);
    let mut residual = relative_residual(&s, &a);
    let mut extended = false;
    let retry = match precision {
        Precision::Double => false,
        Precision::Extended => true,
        Precision::Auto => residual >= NULL_RESIDUAL_TARGET,
    };
    if retry {
        let t = TridiagSystem::<TwoFloat>::from_values(ell, TwoFloat::from(m.kappa()), TwoFloat::from(m.mu()));
        let start_t: Vec<TwoFloat> = start.iter().map(|&x| TwoFloat::from(x)).collect();
        let tiny_t = TwoFloat::from(1e-30 * s.frobenius());
        let at = inverse_iteration(&t.dense(), &start_t, tiny_t);
        a = at.iter().map(|&x| f64::from(x)).collect();
        residual = relative_residual(&s, &a);
        extended = true;
    }
    if residual >= NULL_RESIDUAL_TARGET {
        return Err(Error::ResidualTooLarge { residual, target: NULL_RESIDUAL_TARGET });
    }

    let mat = DMatrix::from_fn(n, n, |r, c| dense[r][c]);
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    let (sigma_min, sigma_second) = (sv[0], sv.get(1).copied().unwrap_or(f64::INFINITY));
    if sigma_second < SINGULAR_GAP * sigma_min {
        return Err(Error::DegenerateNullSpace { smallest: sigma_min, second: sigma_second });
    }

    let top = a[n - 1];
    if top == 0.0 {
        return Err(Error::InvalidParameter("null vector has a vanishing top coefficient".into()));
    }
    let mut coefficients: Vec<f64> = a.iter().map(|x| x / top).collect();
    // γ_{1−ℓ} = 0 decouples the first row, whose β never vanishes
    if coefficients[0].abs() > 1e-6 {
        return Err(Error::ResidualTooLarge { residual: coefficients[0].abs(), target: 1e-6 });
    }
    coefficients[0] = 0.0;
    Ok(NullVector { coefficients, residual, sigma_min, sigma_second, extended })
}
