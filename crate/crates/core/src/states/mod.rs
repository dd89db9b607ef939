//! Exact degenerate eigenstates.
//!
//! Transcendental states at `χ = (2ℓ+3)/4` are finite 𝒟-expansions whose
//! coefficients span the null space of an `(ℓ+1)×(ℓ+1)` tridiagonal system.
//! Juddian states at `χ = n/2` are Gaussians times polynomials.

mod expansion;
mod judd;
mod nullspace;
mod roots;

pub use expansion::{build_state, build_state_with, reduce_to_adb, AdbRepresentation, AdbShape, Component, DExpansion, TranscendentalState};
pub use judd::{judd_determinant, judd_states, GaussPoly, JuddResult, JuddState};
pub use nullspace::{null_vector, null_vector_seeded, null_vector_with, NullVector, DEFAULT_SEED, NULL_RESIDUAL_TARGET, SINGULAR_GAP};
pub use roots::{find_kappa_roots, KappaRoot, ROOT_GRID, ROOT_TOL};

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::verify::{default_grid, factor_residual, ResidualReport};

fn int<T: FromPrimitive>(k: i64) -> T {
    T::from_i64(k).expect("integer constant")
}

/// `χ = (2ℓ+3)/4`.
pub fn chi_for_ell<T: Clone + Num + FromPrimitive>(ell: u32) -> T {
    int::<T>(2 * ell as i64 + 3) / int::<T>(4)
}

/// Lowest index `l₁ = −1−ℓ` of the ψ₁ expansion.
pub fn lowest_index(ell: u32) -> i32 {
    -1 - ell as i32
}

/// `(αₙ, βₙ, γₙ)` of `ℒ𝒟ₙ = βₙ𝒟ₙ + αₙ𝒟ₙ₊₂ + γₙ𝒟ₙ₋₂` in any field.
pub fn coeff_abc<T: Clone + Num + FromPrimitive>(n: i64, kappa: &T, mu: &T, chi: &T) -> (T, T, T) {
    let one = T::one();
    let k2 = kappa.clone() * kappa.clone();
    let k4 = k2.clone() * k2.clone();
    let four_n2_1 = int::<T>(4 * n * n - 1);
    let chi4 = int::<T>(4) * chi.clone();
    let alpha = (one.clone() - k4.clone()) * (int::<T>(5 + 2 * n) - chi4.clone());
    let om = one.clone() - k2.clone();
    let two_chi = int::<T>(2) * chi.clone();
    let beta = (one.clone() + k4.clone()) * four_n2_1.clone()
        + int::<T>(2) * om.clone() * om * (int::<T>(2 * n - 1) - two_chi.clone() * (two_chi - int::<T>(3)))
        + int::<T>(2) * k2 * mu.clone() * mu.clone();
    let gamma = (one - k4) * four_n2_1 * (chi4 + int::<T>(2 * n - 5)) / int::<T>(4);
    (alpha, beta, gamma)
}

/// The band of the `(ℓ+1)×(ℓ+1)` system. Row `r` reads
/// `α_{l₁+2r−2} a_{r−1} + β_{l₁+2r} a_r + γ_{l₁+2r+2} a_{r+1} = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagSystem<T> {
    pub ell: u32,
    pub l1: i32,
    pub kappa: T,
    pub mu: T,
    pub chi: T,
    /// `sub[r−1] = M[r][r−1]`.
    pub sub: Vec<T>,
    pub diag: Vec<T>,
    /// `sup[r] = M[r][r+1]`.
    pub sup: Vec<T>,
}

impl<T: Clone + Num + FromPrimitive> TridiagSystem<T> {
    pub fn from_values(ell: u32, kappa: T, mu: T) -> Self {
        let chi: T = chi_for_ell(ell);
        let l1 = lowest_index(ell);
        let size = ell as usize + 1;
        let mut sub = Vec::with_capacity(size - 1);
        let mut diag = Vec::with_capacity(size);
        let mut sup = Vec::with_capacity(size - 1);
        for r in 0..size {
            let n = (l1 + 2 * r as i32) as i64;
            let (_, b, _) = coeff_abc(n, &kappa, &mu, &chi);
            diag.push(b);
            if r > 0 {
                sub.push(coeff_abc(n - 2, &kappa, &mu, &chi).0);
            }
            if r + 1 < size {
                sup.push(coeff_abc(n + 2, &kappa, &mu, &chi).2);
            }
        }
        TridiagSystem { ell, l1, kappa, mu, chi, sub, diag, sup }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Leading principal minors `Dₖ = βDₖ₋₁ − αγDₖ₋₂`; returns `D_{ℓ+1}`.
    pub fn determinant(&self) -> T {
        let mut prev2 = T::one();
        let mut prev = self.diag[0].clone();
        for k in 1..self.size() {
            let d = self.diag[k].clone() * prev.clone() - self.sub[k - 1].clone() * self.sup[k - 1].clone() * prev2;
            prev2 = prev;
            prev = d;
        }
        prev
    }

    pub fn dense(&self) -> Vec<Vec<T>> {
        let n = self.size();
        let mut m = vec![vec![T::zero(); n]; n];
        for r in 0..n {
            m[r][r] = self.diag[r].clone();
            if r > 0 {
                m[r][r - 1] = self.sub[r - 1].clone();
            }
            if r + 1 < n {
                m[r][r + 1] = self.sup[r].clone();
            }
        }
        m
    }
}

impl TridiagSystem<f64> {
    pub fn new(ell: u32, m: &ModelParams) -> Self {
        Self::from_values(ell, m.kappa(), m.mu())
    }

    /// Product of row 1-norms, an upper bound on `|det|`.
    pub fn scale(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|r| {
                let mut s = self.diag[r].abs();
                if r > 0 {
                    s += self.sub[r - 1].abs();
                }
                if r + 1 < n {
                    s += self.sup[r].abs();
                }
                s
            })
            .product()
    }

    pub fn frobenius(&self) -> f64 {
        self.diag.iter().chain(&self.sub).chain(&self.sup).map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn determinant(ell: u32, m: &ModelParams) -> f64 {
    TridiagSystem::new(ell, m).determinant()
}

/// `det / scale`, evaluated in double-double.
pub fn normalized_determinant(ell: u32, kappa: f64, mu: f64) -> f64 {
    let t = TridiagSystem::<TwoFloat>::from_values(ell, TwoFloat::from(kappa), TwoFloat::from(mu));
    let scale = TridiagSystem::<f64>::from_values(ell, kappa, mu).scale();
    f64::from(t.determinant()) / scale
}

/// Residual of `L₂ = ∂z² + κ_op(2 − κ_op z²)` on ψ₁ of an ℓ = 1 state over
/// the default grid.
pub fn l2_factor_check(state: &TranscendentalState, kappa_op: f64) -> Result<ResidualReport> {
    if state.ell != 1 {
        return Err(Error::InvalidParameter(format!("the factor applies to ell = 1, got {}", state.ell)));
    }
    factor_residual(state, kappa_op, &default_grid())
}

pub fn determinant_exact(ell: u32, kappa: &BigRational, mu: &BigRational) -> BigRational {
    TridiagSystem::from_values(ell, kappa.clone(), mu.clone()).determinant()
}
