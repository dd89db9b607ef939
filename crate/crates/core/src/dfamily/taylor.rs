//! Taylor expansion of `𝒟ₙ` about the origin.
//!
//! Matching powers in `𝒟″ + (n+1−ζ²/4)𝒟 = 0` gives
//! `(k+1)(k+2)c_{k+2} = ¼c_{k−2} − (n+1)c_k`.

use num_complex::Complex64;
use num_traits::{FromPrimitive, Num};

use super::{eval_d, Branch, DIndex};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    pub index: DIndex,
    pub coefficients: Vec<f64>,
}

impl TaylorSeries {
    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * zeta + c)
    }
}

/// Coefficients `c₀..c_K` from the seeds, in any field.
pub fn taylor_coefficients<T: Clone + Num + FromPrimitive>(n: i64, c0: T, c1: T, order: usize) -> Vec<T> {
    let quarter = T::from_f64(0.25).unwrap();
    let np1 = T::from_i64(n + 1).unwrap();
    let mut c = vec![T::zero(); order + 1];
    c[0] = c0;
    if order >= 1 {
        c[1] = c1;
    }
    for k in 0..order.saturating_sub(1) {
        let prev = if k >= 2 { c[k - 2].clone() } else { T::zero() };
        let denom = T::from_usize((k + 1) * (k + 2)).unwrap();
        c[k + 2] = (quarter.clone() * prev - np1.clone() * c[k].clone()) / denom;
    }
    c
}

pub fn taylor(i: DIndex, order: usize) -> Result<TaylorSeries> {
    let d = eval_d(i, Complex64::new(0.0, 0.0))?;
    let (c0, c1) = match i.branch {
        Branch::Plus => (d.value.re, 0.0),
        Branch::Minus => (0.0, d.derivative.re),
    };
    Ok(TaylorSeries { index: i, coefficients: taylor_coefficients(i.n as i64, c0, c1, order) })
}
