//! Confluent hypergeometric series for the even and odd combinations.
//!
//! With `w = ζ²/2` and `ν = n + ½`,
//! `𝒟⁺(ζ) = 2D_ν(0) e^{−ζ²/4} M(−ν/2, ½, w)` and
//! `𝒟⁻(ζ) = 2D_ν′(0) ζ e^{−ζ²/4} M((1−ν)/2, 3/2, w)`.
//! When `Re w < 0` Kummer's transformation `M(a,b,w) = e^w M(b−a,b,−w)` keeps
//! the terms from alternating. The sum is generic so the same code runs in
//! `f64` and in double-double.

use num_complex::{Complex, Complex64};
use num_traits::Float;

use super::gamma::{gamma_quarter, SQRT_PI};
use super::Branch;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 20_000;

/// `D_ν(0)` for `ν = n + ½`.
pub fn d_at_zero(n: i32) -> f64 {
    let nu = n as f64 + 0.5;
    SQRT_PI * 2f64.powf(nu / 2.0) / gamma_quarter(1 - 2 * n as i64)
}

/// `D_ν′(0)` for `ν = n + ½`.
pub fn d_prime_at_zero(n: i32) -> f64 {
    let nu = n as f64 + 0.5;
    -SQRT_PI * 2f64.powf((nu + 1.0) / 2.0) / gamma_quarter(-(2 * n as i64 + 1))
}

pub(crate) struct Kummer<T> {
    /// `M = e^{shift} m`, `M′ = e^{shift} dm`.
    pub m: Complex<T>,
    pub dm: Complex<T>,
    pub shifted: bool,
    /// `Σ|terms| / |sum|`, the cancellation ratio.
    pub ratio: f64,
}

fn norm<T: Float>(c: &Complex<T>) -> f64 {
    let re = c.re.to_f64().unwrap_or(f64::NAN);
    let im = c.im.to_f64().unwrap_or(f64::NAN);
    re.hypot(im)
}

// `FromPrimitive::from_f64` is not overridden by the double-double type and
// would round through an integer, so conversions go through `From<f64>`.
fn c<T: Float + From<f64>>(x: f64) -> Complex<T> {
    Complex::new(<T as From<f64>>::from(x), T::zero())
}

/// `M(a,b,w)` and `M′(a,b,w)` summed directly.
fn kummer_direct<T: Float + From<f64>>(a: f64, b: f64, w: Complex<T>, eps: f64) -> Result<(Complex<T>, Complex<T>, f64)> {
    let mut t: Complex<T> = c(1.0);
    let mut u: Complex<T> = c(a / b);
    let mut m = t;
    let mut dm = u;
    let mut abs_m = 1.0;
    let mut abs_dm = (a / b).abs();
    let wn = norm(&w);
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        t = t * w * c::<T>((a + kf) / ((b + kf) * (kf + 1.0)));
        u = u * w * c::<T>((a + kf + 1.0) / ((b + kf + 1.0) * (kf + 1.0)));
        m = m + t;
        dm = dm + u;
        let (nt, nu) = (norm(&t), norm(&u));
        abs_m += nt;
        abs_dm += nu;
        if kf > wn && nt <= eps * norm(&m) && nu <= eps * norm(&dm) {
            let ratio = (abs_m / norm(&m)).max(abs_dm / norm(&dm));
            return Ok((m, dm, ratio));
        }
    }
    Err(Error::NoConvergence { index: 0, iterations: MAX_TERMS })
}

pub(crate) fn kummer<T: Float + From<f64>>(a: f64, b: f64, w: Complex<T>, eps: f64) -> Result<Kummer<T>> {
    if w.re.to_f64().unwrap_or(0.0) >= 0.0 {
        let (m, dm, ratio) = kummer_direct(a, b, w, eps)?;
        Ok(Kummer { m, dm, shifted: false, ratio })
    } else {
        let (n, dn, ratio) = kummer_direct(b - a, b, -w, eps)?;
        Ok(Kummer { m: n, dm: n - dn, shifted: true, ratio })
    }
}

/// Value, derivative and cancellation ratio of `𝒟ₙ^{(±)}(ζ)` by series.
pub(crate) fn eval_series<T: Float + From<f64>>(n: i32, branch: Branch, zeta: Complex64, eps: f64) -> Result<(Complex64, Complex64, f64)> {
    let nu = n as f64 + 0.5;
    let z: Complex<T> = Complex::new(<T as From<f64>>::from(zeta.re), <T as From<f64>>::from(zeta.im));
    let w = z * z * c::<T>(0.5);
    let half: Complex<T> = c(0.5);
    let to64 = |v: Complex<T>| Complex64::new(v.re.to_f64().unwrap(), v.im.to_f64().unwrap());
    let quarter_sq = zeta * zeta * 0.25;
    match branch {
        Branch::Plus => {
            let k = kummer(-nu / 2.0, 0.5, w, eps)?;
            let pref = 2.0 * d_at_zero(n) * if k.shifted { quarter_sq.exp() } else { (-quarter_sq).exp() };
            let val = to64(k.m);
            let der = to64(z * (k.dm - half * k.m));
            Ok((pref * val, pref * der, k.ratio))
        }
        Branch::Minus => {
            let k = kummer((1.0 - nu) / 2.0, 1.5, w, eps)?;
            let pref = 2.0 * d_prime_at_zero(n) * if k.shifted { quarter_sq.exp() } else { (-quarter_sq).exp() };
            let val = to64(z * k.m);
            let der = to64(k.m + z * z * (k.dm - half * k.m));
            Ok((pref * val, pref * der, k.ratio))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use twofloat::TwoFloat;

    #[test]
    fn kummer_closed_forms() {
        // M(a,a,w) = e^w and M(1,2,w) = (e^w − 1)/w
        let w = Complex64::new(1.3, -0.4);
        let k = kummer::<f64>(0.7, 0.7, w, 1e-17).unwrap();
        assert!((k.m - w.exp()).norm() < 1e-14 * w.exp().norm());
        let k = kummer::<f64>(1.0, 2.0, w, 1e-17).unwrap();
        assert!((k.m - (w.exp() - 1.0) / w).norm() < 1e-14);
        // transformed path agrees with the direct one
        let w = Complex64::new(-2.5, 0.3);
        let k = kummer::<f64>(0.3, 1.5, w, 1e-17).unwrap();
        assert!(k.shifted);
        let (m, dm, _) = kummer_direct::<f64>(0.3, 1.5, w, 1e-17).unwrap();
        assert!((k.m * w.exp() - m).norm() < 1e-13 * m.norm());
        assert!((k.dm * w.exp() - dm).norm() < 1e-13 * dm.norm());
    }

    #[test]
    fn double_double_matches_double_when_benign() {
        let z = Complex64::new(1.7, 0.2);
        for n in [-3, 0, 4] {
            for b in [Branch::Plus, Branch::Minus] {
                let (v, d, _) = eval_series::<f64>(n, b, z, 1e-17).unwrap();
                let (v2, d2, _) = eval_series::<TwoFloat>(n, b, z, 1e-32).unwrap();
                assert!((v - v2).norm() < 1e-13 * v.norm());
                assert!((d - d2).norm() < 1e-13 * d.norm());
            }
        }
    }
}
