//! Model parameters and the Z4 parity algebra.
//!
//! The rescaled Hamiltonian is `K = 2x a†a + μσx + [(a†)² + a²]σz` with
//! `x = (κ + 1/κ)/2`. Energies are expressed either directly as eigenvalues
//! `E` of `K` or through the spectral parameter `χ`,
//! `E = 2(1/κ − κ)(χ − 1) − κ`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from `κ = 1` below which a conversion is reported as ill-conditioned.
pub const NEAR_BOUNDARY: f64 = 1e-3;

/// Physical frequencies and coupling in energy units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
}

/// Dimensionless model parameters, `0 < κ < 1` and `μ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    kappa: f64,
    mu: f64,
}

impl ModelParams {
    pub fn new(kappa: f64, mu: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} must lie in the open interval (0, 1)"
            )));
        }
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu = {mu} must be finite and >= 0")));
        }
        Ok(Self { kappa, mu })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `x = (κ + 1/κ)/2 > 1`.
    pub fn x(&self) -> f64 {
        0.5 * (self.kappa + 1.0 / self.kappa)
    }

    /// `1/κ − κ`, the χ-to-energy slope divided by two.
    pub fn width(&self) -> f64 {
        1.0 / self.kappa - self.kappa
    }

    pub fn energy_from_chi(&self, chi: f64) -> f64 {
        energy_from_chi(chi, self)
    }

    pub fn chi_from_energy(&self, energy: f64) -> f64 {
        chi_from_energy(energy, self)
    }

    pub fn near_boundary(&self) -> bool {
        1.0 - self.kappa < NEAR_BOUNDARY
    }
}

/// A point of the spectrum given in both energy conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint {
    pub energy: f64,
    pub chi: f64,
}

impl EnergyPoint {
    pub fn from_energy(energy: f64, m: &ModelParams) -> Self {
        Self { energy, chi: chi_from_energy(energy, m) }
    }

    pub fn from_chi(chi: f64, m: &ModelParams) -> Self {
        Self { energy: energy_from_chi(chi, m), chi }
    }
}

/// Result of converting physical parameters; `warning` is set when κ is
/// within [`NEAR_BOUNDARY`] of one, where the parametrization degenerates.
#[derive(Debug, Clone, PartialEq)]
pub struct Conversion {
    pub params: ModelParams,
    pub warning: Option<String>,
}

/// `κ` as the root in (0,1) of `κ² − 2xκ + 1 = 0`.
pub fn kappa_from_x(x: f64) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::CouplingTooStrong { x });
    }
    // x² − 1 factored to keep precision when x is close to one.
    let root = ((x - 1.0) * (x + 1.0)).sqrt();
    Ok(1.0 / (x + root))
}

pub fn to_model_params(p: &PhysicalParams) -> Result<Conversion> {
    if !(p.g > 0.0) {
        return Err(Error::InvalidParameter(format!("g = {} must be positive", p.g)));
    }
    if !(p.omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega = {} must be positive", p.omega)));
    }
    let x = p.omega / (4.0 * p.g);
    let kappa = kappa_from_x(x)?;
    let mu = p.omega0 / (4.0 * p.g);
    if kappa >= 1.0 {
        return Err(Error::CouplingTooStrong { x });
    }
    let params = ModelParams::new(kappa, mu)?;
    let warning = params.near_boundary().then(|| {
        format!("kappa = {kappa:.12} is within {NEAR_BOUNDARY:e} of 1; Fock truncations converge slowly")
    });
    Ok(Conversion { params, warning })
}

pub fn energy_from_chi(chi: f64, m: &ModelParams) -> f64 {
    2.0 * m.width() * (chi - 1.0) - m.kappa()
}

pub fn chi_from_energy(energy: f64, m: &ModelParams) -> f64 {
    1.0 + (energy + m.kappa()) / (2.0 * m.width())
}

/// Eigenvalue `s` of `τψ(z) = σx ψ(iz)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "+1")]
    PlusOne,
    #[serde(rename = "-1")]
    MinusOne,
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl Parity {
    /// Fixed output order: +1, −1, +i, −i.
    pub const ALL: [Parity; 4] = [Parity::PlusOne, Parity::MinusOne, Parity::PlusI, Parity::MinusI];

    /// Exponent `k` with `s = iᵏ`.
    pub fn exponent(self) -> u8 {
        match self {
            Parity::PlusOne => 0,
            Parity::PlusI => 1,
            Parity::MinusOne => 2,
            Parity::MinusI => 3,
        }
    }

    pub fn from_exponent(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Parity::PlusOne,
            1 => Parity::PlusI,
            2 => Parity::MinusOne,
            _ => Parity::MinusI,
        }
    }

    pub fn value(self) -> Complex64 {
        match self {
            Parity::PlusOne => Complex64::new(1.0, 0.0),
            Parity::MinusOne => Complex64::new(-1.0, 0.0),
            Parity::PlusI => Complex64::new(0.0, 1.0),
            Parity::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// Nearest group element to an arbitrary complex number.
    pub fn nearest(w: Complex64) -> Self {
        *Parity::ALL
            .iter()
            .min_by(|a, b| (a.value() - w).norm().total_cmp(&(b.value() - w).norm()))
            .expect("non-empty")
    }

    /// Even parities (`s = ±1`) have `τ²ψ = ψ`, i.e. even functions.
    pub fn is_even(self) -> bool {
        matches!(self, Parity::PlusOne | Parity::MinusOne)
    }

    pub fn conj(self) -> Self {
        Parity::from_exponent(-(self.exponent() as i64))
    }

    pub fn inverse(self) -> Self {
        self.conj()
    }

    pub fn pow(self, k: u32) -> Self {
        Parity::from_exponent(self.exponent() as i64 * k as i64)
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::PlusOne => "+1",
            Parity::MinusOne => "-1",
            Parity::PlusI => "+i",
            Parity::MinusI => "-i",
        }
    }
}

impl Mul for Parity {
    type Output = Parity;

    fn mul(self, rhs: Parity) -> Parity {
        Parity::from_exponent(self.exponent() as i64 + rhs.exponent() as i64)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" => Ok(Parity::PlusOne),
            "-1" => Ok(Parity::MinusOne),
            "+i" | "i" => Ok(Parity::PlusI),
            "-i" => Ok(Parity::MinusI),
            other => Err(Error::InvalidParameter(format!("unknown parity {other:?}"))),
        }
    }
}

/// Initial data `(ψ(0), ψ′(0))` of the parity-`s` solution of the Bargmann system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub value: [Complex64; 2],
    pub derivative: [Complex64; 2],
}

impl InitialConditions {
    /// `(ψ₁, ψ₂, ψ₁′, ψ₂′)(0)` stacked.
    pub fn stacked(&self) -> [Complex64; 4] {
        [self.value[0], self.value[1], self.derivative[0], self.derivative[1]]
    }
}

pub fn parity_initial_conditions(s: Parity) -> InitialConditions {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let sv = s.value();
    if s.is_even() {
        InitialConditions { value: [one, sv], derivative: [zero, zero] }
    } else {
        let i = Complex64::new(0.0, 1.0);
        InitialConditions { value: [zero, zero], derivative: [one, -i * sv] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn physical_conversion() {
        let c = to_model_params(&PhysicalParams { omega: 5.0, omega0: 12.0, g: 1.0 }).unwrap();
        assert!((c.params.x() - 1.25).abs() < 1e-15);
        assert!((c.params.kappa() - 0.5).abs() < 1e-15);
        assert_eq!(c.params.mu(), 3.0);
        assert!(c.warning.is_none());
    }

    #[test]
    fn boundary_rejected() {
        let err = to_model_params(&PhysicalParams { omega: 4.0, omega0: 0.0, g: 1.0 });
        assert!(matches!(err, Err(Error::CouplingTooStrong { .. })));
        assert!(to_model_params(&PhysicalParams { omega: 3.0, omega0: 0.0, g: 1.0 }).is_err());
        assert!(to_model_params(&PhysicalParams { omega: 5.0, omega0: 1.0, g: 0.0 }).is_err());
    }

    #[test]
    fn near_boundary_warns() {
        // x = 1 + 1e-8: κ = 1 − √(2·1e-8) + O(1e-8) ≈ 1 − 1.41421e-4.
        let c = to_model_params(&PhysicalParams { omega: 4.0 * (1.0 + 1e-8), omega0: 1.0, g: 1.0 })
            .unwrap();
        let expected = 1.0 - (2.0e-8f64).sqrt() + 1e-8;
        assert!((c.params.kappa() - expected).abs() < 1e-11, "{}", c.params.kappa());
        assert!(c.warning.is_some());
    }

    #[test]
    fn chi_energy_examples() {
        let m = ModelParams::new(0.3, 2.0).unwrap();
        assert!((energy_from_chi(1.0, &m) + 0.3).abs() < 1e-15);
        let k = 3.0 - 2.0 * 2f64.sqrt();
        let m = ModelParams::new(k, 3.0).unwrap();
        let e = energy_from_chi(1.25, &m);
        assert!((e - (4.0 * 2f64.sqrt() - 3.0)).abs() < 1e-13, "{e}");
    }

    #[test]
    fn initial_conditions_match_parity_rules() {
        let c = parity_initial_conditions(Parity::PlusOne);
        assert_eq!(c.value, [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert_eq!(c.derivative, [Complex64::new(0.0, 0.0); 2]);
        let c = parity_initial_conditions(Parity::MinusI);
        assert_eq!(c.value, [Complex64::new(0.0, 0.0); 2]);
        assert_eq!(c.derivative, [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
    }

    #[test]
    fn initial_conditions_independent() {
        let rows: Vec<[Complex64; 4]> =
            Parity::ALL.iter().map(|&s| parity_initial_conditions(s).stacked()).collect();
        let m = nalgebra::Matrix4::from_fn(|i, j| rows[i][j]);
        assert!(m.determinant().norm() > 1e-12);
    }

    #[test]
    fn z4_table() {
        for s in Parity::ALL {
            assert_eq!(s.pow(4), Parity::PlusOne);
            assert_eq!(s * s.inverse(), Parity::PlusOne);
            let w = s.value() * s.value() * s.value() * s.value();
            assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        assert_eq!(Parity::PlusI * Parity::PlusI, Parity::MinusOne);
        assert_eq!(Parity::MinusI * Parity::MinusOne, Parity::PlusI);
        assert_eq!("-i".parse::<Parity>().unwrap(), Parity::MinusI);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn chi_roundtrip(chi in 1.0f64..10.0, kappa in 0.01f64..0.99) {
                let m = ModelParams::new(kappa, 1.0).unwrap();
                let back = chi_from_energy(energy_from_chi(chi, &m), &m);
                prop_assert!((back - chi).abs() < 1e-12 * chi.max(1.0));
            }

            #[test]
            fn energy_increasing(chi in 1.0f64..10.0, dchi in 1e-6f64..1.0, kappa in 0.01f64..0.99) {
                let m = ModelParams::new(kappa, 1.0).unwrap();
                prop_assert!(energy_from_chi(chi + dchi, &m) > energy_from_chi(chi, &m));
            }

            #[test]
            fn kappa_x_roundtrip(kappa in 1e-3f64..(1.0 - 1e-3)) {
                let m = ModelParams::new(kappa, 0.0).unwrap();
                let back = kappa_from_x(m.x()).unwrap();
                // conditioning of the inverse map grows like 1/(1−κ) near the boundary
                prop_assert!((back - kappa).abs() < 4.0 * f64::EPSILON / (1.0 - kappa));
            }
        }
    }
}
