//! The parabolic-cylinder family `𝒟ₙ^{(±)}(ζ) = D_{n+½}(ζ) ± D_{n+½}(−ζ)`.
//!
//! `𝒟ₙ` solves `𝒟″ + (n + 1 − ζ²/4)𝒟 = 0` for every integer `n`. The
//! operators `b = ζ/2 + d/dζ` and `b† = ζ/2 − d/dζ` shift the index by one and
//! swap the branch: `b†𝒟ₙ^{(σ)} = 𝒟ₙ₊₁^{(−σ)}`, `b𝒟ₙ^{(σ)} = (n+½)𝒟ₙ₋₁^{(−σ)}`.
//! Equivalently the ladder acts within `Fₙ = D_{n+½}(ζ) + τ(−1)ⁿD_{n+½}(−ζ)`
//! at fixed `τ`, and `𝒟ₖ^{(σ)} = Fₖ` with `τ = σ(−1)ᵏ`.

mod asymptotic;
pub mod crossrep;
pub mod gamma;
mod series;
pub mod taylor;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
pub use crossrep::{bessel_crosscheck, bessel_i_quarter, growth_type, hyp1f1, hyp1f1_crosscheck, GrowthFit, RatioCheck};
pub use series::{d_at_zero, d_prime_at_zero};
pub use taylor::{taylor, taylor_coefficients, TaylorSeries};

/// Above this modulus only the asymptotic expansion is used.
pub const ASYMPTOTIC_RADIUS: f64 = 12.0;
/// Inner radius where heavy cancellation already favours the expansion.
pub const ASYMPTOTIC_INNER_RADIUS: f64 = 8.0;
const EXTENDED_RATIO: f64 = 1e4;
const ASYMPTOTIC_RATIO: f64 = 1e8;
/// `|e^{ζ²/4}|` must stay representable.
const OVERFLOW_EXPONENT: f64 = 690.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s >= 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DIndex {
    pub n: i32,
    pub branch: Branch,
}

impl DIndex {
    pub fn new(n: i32, branch: Branch) -> Self {
        Self { n, branch }
    }

    pub fn nu(&self) -> f64 {
        self.n as f64 + 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Precision {
    /// Double precision, switching to double-double under cancellation.
    Auto,
    Double,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Series,
    SeriesExtended,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DValue {
    pub value: Complex64,
    pub derivative: Complex64,
    /// Estimated relative error of the evaluation.
    pub condition: f64,
    pub method: Method,
}

impl DValue {
    /// `[𝒟, 𝒟′, 𝒟″, 𝒟‴, 𝒟⁗]` from the value, the first derivative and the ODE.
    pub fn jet(&self, n: i32, zeta: Complex64) -> [Complex64; 5] {
        let q = n as f64 + 1.0 - 0.25 * zeta * zeta;
        let dq = -0.5 * zeta;
        let ddq = Complex64::new(-0.5, 0.0);
        let (d0, d1) = (self.value, self.derivative);
        let d2 = -q * d0;
        let d3 = -dq * d0 - q * d1;
        let d4 = -ddq * d0 - 2.0 * dq * d1 + q * q * d0;
        [d0, d1, d2, d3, d4]
    }
}

pub fn eval_d(i: DIndex, zeta: Complex64) -> Result<DValue> {
    eval_d_with(i, zeta, Precision::Auto)
}

pub fn eval_d_with(i: DIndex, zeta: Complex64, precision: Precision) -> Result<DValue> {
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite argument {zeta}")));
    }
    let r = zeta.norm();
    if r * r / 4.0 > OVERFLOW_EXPONENT {
        return Err(Error::Overflow { modulus: r });
    }
    if r >= ASYMPTOTIC_RADIUS {
        return Ok(eval_asymptotic(i, zeta));
    }
    if precision == Precision::Extended {
        return eval_extended(i, zeta);
    }
    let (value, derivative, ratio) = series::eval_series::<f64>(i.n, i.branch, zeta, 1e-17)?;
    if precision == Precision::Double || ratio <= EXTENDED_RATIO {
        return Ok(DValue { value, derivative, condition: ratio * f64::EPSILON, method: Method::Series });
    }
    if ratio > ASYMPTOTIC_RATIO && r >= ASYMPTOTIC_INNER_RADIUS {
        return Ok(eval_asymptotic(i, zeta));
    }
    eval_extended(i, zeta)
}

fn eval_extended(i: DIndex, zeta: Complex64) -> Result<DValue> {
    let (value, derivative, ratio) = series::eval_series::<TwoFloat>(i.n, i.branch, zeta, 1e-32)?;
    // the f64 prefactors bound the final accuracy
    let condition = (ratio * 1e-32).max(4.0 * f64::EPSILON);
    Ok(DValue { value, derivative, condition, method: Method::SeriesExtended })
}

fn eval_asymptotic(i: DIndex, zeta: Complex64) -> DValue {
    // reduce to the right half plane; 𝒟^{(σ)}(−ζ) = σ𝒟^{(σ)}(ζ)
    let flip = zeta.re < 0.0 || (zeta.re == 0.0 && zeta.im < 0.0);
    let zp = if flip { -zeta } else { zeta };
    let s = i.branch.sign();
    let (u, du, eu) = asymptotic::d_nu_with_derivative(i.n, zp);
    let (v, dv, ev) = asymptotic::d_nu_with_derivative(i.n, -zp);
    let mut value = u + s * v;
    let mut derivative = du - s * dv;
    if flip {
        value *= s;
        derivative *= -s;
    }
    let scale = u.norm() + v.norm();
    let condition = eu.max(ev).max(f64::EPSILON) * scale / value.norm().max(f64::MIN_POSITIVE);
    DValue { value, derivative, condition, method: Method::Asymptotic }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Raise,
    Lower,
}

/// `b†𝒟ₙ` or `b𝒟ₙ` computed from `𝒟ₙ` and its derivative. Returns the index
/// of the result, which carries the opposite branch.
pub fn ladder(i: DIndex, direction: Direction, zeta: Complex64) -> Result<(DIndex, DValue)> {
    let d = eval_d(i, zeta)?;
    let [d0, d1, d2, ..] = d.jet(i.n, zeta);
    let (n, value, derivative) = match direction {
        Direction::Raise => (i.n + 1, 0.5 * zeta * d0 - d1, 0.5 * d0 + 0.5 * zeta * d1 - d2),
        Direction::Lower => {
            let f = 1.0 / i.nu();
            (i.n - 1, f * (0.5 * zeta * d0 + d1), f * (0.5 * d0 + 0.5 * zeta * d1 + d2))
        }
    };
    Ok((DIndex::new(n, i.branch.flip()), DValue { value, derivative, ..d }))
}

/// `|ζ𝒟ₙ − (n+½)𝒟ₙ₋₁ − 𝒟ₙ₊₁|` relative to the size of the terms.
pub fn recurrence_residual(i: DIndex, zeta: Complex64) -> Result<f64> {
    let d = eval_d(i, zeta)?.value;
    let dm = eval_d(DIndex::new(i.n - 1, i.branch.flip()), zeta)?.value;
    let dp = eval_d(DIndex::new(i.n + 1, i.branch.flip()), zeta)?.value;
    let lhs = zeta * d;
    let rhs = i.nu() * dm + dp;
    let scale = lhs.norm().max(i.nu().abs() * dm.norm()).max(dp.norm());
    Ok((lhs - rhs).norm() / scale)
}

/// `i^x = e^{iπx/2}`.
fn ipow(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * x / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub relative_error: f64,
}

/// `Kₙ` with `𝒟ₙ^{(σ)}(iζ) = Kₙ 𝒟₋ₙ₋₂^{(σ)}(ζ)`, the connection formula with
/// the branch parity `𝒟(−ζ) = σ𝒟(ζ)` folded in.
pub fn connection_coefficient(i: DIndex) -> Complex64 {
    let g = gamma::gamma_quarter(4 * i.n as i64 + 6);
    let nf = i.n as f64;
    Complex64::i() * g / (2.0 * PI).sqrt() * (i.branch.sign() * ipow(nf - 0.5) - ipow(0.5 - nf))
}

/// Evaluates both sides of
/// `𝒟ₙ(iζ) = (iΓ(n+3/2)/√(2π)) [i^{n−½}𝒟₋ₙ₋₂(−ζ) − i^{½−n}𝒟₋ₙ₋₂(ζ)]`
/// with the branch held fixed.
pub fn connection(i: DIndex, zeta: Complex64) -> Result<ConnectionCheck> {
    let lhs = eval_d(i, Complex64::i() * zeta)?.value;
    let j = DIndex::new(-i.n - 2, i.branch);
    let at_minus = eval_d(j, -zeta)?.value;
    let at_plus = eval_d(j, zeta)?.value;
    let g = gamma::gamma_quarter(4 * i.n as i64 + 6);
    let nf = i.n as f64;
    let bracket = ipow(nf - 0.5) * at_minus - ipow(0.5 - nf) * at_plus;
    let rhs = Complex64::i() * g / (2.0 * PI).sqrt() * bracket;
    let scale = lhs.norm().max(g / (2.0 * PI).sqrt() * (at_minus.norm() + at_plus.norm()));
    let relative_error = if scale == 0.0 { 0.0 } else { (lhs - rhs).norm() / scale };
    Ok(ConnectionCheck { lhs, rhs, relative_error })
}

pub mod cyclotomic {
    //! Exact arithmetic in `ℚ(ω)`, `ω = e^{iπ/4}`, for connection prefactors.

    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use std::ops::Mul;

    use super::gamma::gamma_half_over_sqrt_pi;

    /// `Σ cₖ ωᵏ` for `k = 0..4`, reduced by `ω⁴ = −1`.
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct Cyclo8(pub [BigRational; 4]);

    impl Cyclo8 {
        pub fn zero() -> Self {
            Cyclo8(std::array::from_fn(|_| BigRational::zero()))
        }

        /// `c·ωᵏ` for any integer `k`.
        pub fn monomial(c: BigRational, k: i64) -> Self {
            let k = k.rem_euclid(8);
            let mut out = Self::zero();
            out.0[(k % 4) as usize] = if k >= 4 { -c } else { c };
            out
        }

        pub fn scale(&self, c: &BigRational) -> Self {
            Cyclo8(std::array::from_fn(|i| &self.0[i] * c))
        }

        pub fn add(&self, o: &Self) -> Self {
            Cyclo8(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
        }
    }

    impl Mul for &Cyclo8 {
        type Output = Cyclo8;
        fn mul(self, o: &Cyclo8) -> Cyclo8 {
            let mut out = Cyclo8::zero();
            for i in 0..4 {
                for j in 0..4 {
                    let p = &self.0[i] * &o.0[j];
                    let k = i + j;
                    if k >= 4 {
                        out.0[k - 4] -= p;
                    } else {
                        out.0[k] += p;
                    }
                }
            }
            out
        }
    }

    /// The connection prefactor `cₙ` with `𝒟ₙ^{(σ)}(iζ) = cₙ 𝒟₋ₙ₋₂^{(σ)}(ζ)`,
    /// written as `r · Γ-part` where
    /// `cₙ = σ Γ(n+3/2)/√(2π) (e^{iπν/2} + σe^{−iπν/2})`, `ν = n+½`.
    /// Returns the cyclotomic factor `σ(ω^{2n+1} + σω^{−2n−1})` and the
    /// rational `Γ(n+3/2)/√π`; the remaining `1/√2` is carried by the caller.
    pub fn prefactor_parts(n: i64, sigma: i64) -> (Cyclo8, BigRational) {
        let s = BigRational::from_integer(BigInt::from(sigma));
        let phase = Cyclo8::monomial(s.clone(), 2 * n + 1).add(&Cyclo8::monomial(BigRational::one(), -(2 * n + 1)));
        // σ(ω^{2n+1} + σω^{−2n−1}) = σω^{2n+1} + ω^{−2n−1}
        (phase, gamma_half_over_sqrt_pi(n + 1))
    }

    /// Checks `cₙ c₋ₙ₋₂ = σ` exactly: applying the connection twice maps
    /// `ζ ↦ −ζ`, which multiplies `𝒟^{(σ)}` by `σ`.
    pub fn composition_is_exact(n: i64, sigma: i64) -> bool {
        let (p1, g1) = prefactor_parts(n, sigma);
        let (p2, g2) = prefactor_parts(-n - 2, sigma);
        // (1/√2)² = ½
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let prod = (&p1 * &p2).scale(&(g1 * g2 * half));
        prod == Cyclo8::monomial(BigRational::from_integer(BigInt::from(sigma)), 0)
    }
}
