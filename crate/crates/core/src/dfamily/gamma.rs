//! Γ at quarter-integer arguments.
//!
//! Every gamma value the parabolic-cylinder seeds need has argument `q/4`
//! for an integer `q`. They are built from Γ(¼), Γ(½) = √π, Γ(¾), Γ(1) by the
//! functional equation, so no general-purpose gamma routine is involved.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_311_9;
pub const GAMMA_THREE_QUARTERS: f64 = 1.225_416_702_465_177_645_1;
pub const SQRT_PI: f64 = 1.772_453_850_905_516_027_3;

/// Γ(q/4). Poles (q a non-positive multiple of 4) return infinity.
pub fn gamma_quarter(q: i64) -> f64 {
    let r = q.rem_euclid(4);
    if r == 0 && q <= 0 {
        return f64::INFINITY;
    }
    let r = if r == 0 { 4 } else { r };
    let mut x = r as f64 / 4.0;
    let mut g = match r {
        1 => GAMMA_QUARTER,
        2 => SQRT_PI,
        3 => GAMMA_THREE_QUARTERS,
        _ => 1.0,
    };
    let steps = (q - r) / 4;
    if steps > 0 {
        for _ in 0..steps {
            g *= x;
            x += 1.0;
        }
    } else {
        for _ in 0..-steps {
            x -= 1.0;
            g /= x;
        }
    }
    g
}

/// 1/Γ(q/4), zero at the poles.
pub fn rgamma_quarter(q: i64) -> f64 {
    if q <= 0 && q % 4 == 0 {
        0.0
    } else {
        1.0 / gamma_quarter(q)
    }
}

/// Γ(k + ½)/√π as an exact rational.
pub fn gamma_half_over_sqrt_pi(k: i64) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut g = BigRational::one();
    if k >= 0 {
        for j in 0..k {
            g *= BigRational::from_integer(BigInt::from(j)) + &half;
        }
    } else {
        for j in k..0 {
            let f = BigRational::from_integer(BigInt::from(j)) + &half;
            debug_assert!(!f.is_zero());
            g /= f;
        }
    }
    g
}
