//! The edge series xi_0 and the correction terms f_s, f_r.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest |tau| at which the edge series are summed.
pub const MAX_TAU: f64 = 0.9;
const MAX_TERMS: usize = 4000;
const RECIP_TERMS: usize = 90;
const RECIP_RADIUS: f64 = 0.2;

/// `(-1)^k B(k+2, 1/2)` for k = 0, 1, ...
fn beta_coefficients() -> impl Iterator<Item = f64> {
    let mut c = 4.0 / 3.0;
    let mut k = 0usize;
    std::iter::from_fn(move || {
        let out = if k.is_multiple_of(2) { c } else { -c };
        c *= (k as f64 + 2.0) / (k as f64 + 2.5);
        k += 1;
        Some(out)
    })
}

/// Normalized series `sum (-1)^k B(k+2,1/2) tau^k / B(2,1/2)`.
fn unit_series(tau: Complex64) -> Result<Complex64> {
    if tau.norm() > MAX_TAU {
        return Err(Error::Domain(format!("edge series needs |tau| <= {MAX_TAU}, got {}", tau.norm())));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for (k, c) in beta_coefficients().take(MAX_TERMS).enumerate() {
        let term = pow * (c * 0.75);
        sum += term;
        if k > 4 && term.norm() < 1e-17 * sum.norm() {
            return Ok(sum);
        }
        pow *= tau;
    }
    Err(Error::Domain(format!("edge series did not converge at tau = {tau}")))
}

pub fn xi0(b: f64, tau: Complex64) -> Result<Complex64> {
    Ok(unit_series(tau)? * (4.0 / 3.0) * (b / 2.0).sqrt())
}

pub fn f_s(b: f64, tau: Complex64) -> Result<Complex64> {
    if tau.norm() == 0.0 {
        return Err(Error::Domain("f_s is singular at tau = 0".into()));
    }
    Ok(1.0 / (12.0 * b * tau) + 5.0 / (48.0 * b * tau * tau))
}

/// Coefficients of the reciprocal of the normalized series.
fn reciprocal() -> &'static [f64] {
    static R: OnceLock<Vec<f64>> = OnceLock::new();
    R.get_or_init(|| {
        let a: Vec<f64> = beta_coefficients().take(RECIP_TERMS).map(|c| c * 0.75).collect();
        let mut d = vec![1.0; RECIP_TERMS];
        for k in 1..RECIP_TERMS {
            d[k] = -(1..=k).map(|j| a[j] * d[k - j]).sum::<f64>();
        }
        d
    })
}

/// Regular part of `5 sqrt(2/b) / (72 tau^2 xi_0(tau))`.
pub fn f_r(b: f64, tau: Complex64) -> Result<Complex64> {
    if tau.norm() > MAX_TAU {
        return Err(Error::Domain(format!("f_r needs |tau| <= {MAX_TAU}, got {}", tau.norm())));
    }
    let lead = 5.0 / (48.0 * b);
    if tau.norm() < RECIP_RADIUS {
        let d = reciprocal();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for &c in &d[2..] {
            let term = pow * c;
            sum += term;
            if term.norm() < 1e-18 * sum.norm().max(1e-300) {
                break;
            }
            pow *= tau;
        }
        return Ok(lead * sum);
    }
    let full = 5.0 * (2.0 / b).sqrt() / (72.0 * tau * tau * xi0(b, tau)?);
    Ok(full - f_s(b, tau)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn xi0_values() {
        assert!((xi0(2.0, c(0.0, 0.0)).unwrap() - 4.0 / 3.0).norm() < 1e-15);
        let h = 1e-6;
        let slope = (xi0(2.0, c(h, 0.0)).unwrap() - xi0(2.0, c(-h, 0.0)).unwrap()) / (2.0 * h);
        assert!((slope / (4.0 / 3.0) + 0.8).norm() < 1e-8);
        assert!(xi0(1.0, c(0.95, 0.0)).is_err());
    }

    #[test]
    fn xi0_closed_form() {
        // sum (-1)^k B(k+2,1/2) t^k = int_0^1 u (1-u)^(-1/2) / (1 + t u) du.
        let t = 0.5;
        let r = crate::quad::integrate(
            |v: f64| {
                let u = 1.0 - v * v;
                2.0 * u / (1.0 + t * u)
            },
            &[0.0, 1.0],
            Default::default(),
        );
        let s = xi0(2.0, c(t, 0.0)).unwrap();
        assert!((s.re - r.value).abs() < 1e-12);
    }

    #[test]
    fn f_s_value() {
        assert!((f_s(1.0, c(1.0, 0.0)).unwrap() - 3.0 / 16.0).norm() < 1e-16);
    }

    #[test]
    fn f_r_regular_and_consistent() {
        let mut last = None;
        for t in [1e-2, 1e-3, 1e-4] {
            let v = f_r(1.0, c(t, 0.0)).unwrap();
            if let Some(prev) = last {
                let d: Complex64 = v - prev;
                assert!(d.norm() < 10.0 * t * 10.0);
            }
            last = Some(v);
        }
        for t in [c(0.19, 0.02), c(0.3, -0.2), c(-0.5, 0.0)] {
            let full = 5.0 * 2f64.sqrt() / (72.0 * t * t * xi0(1.0, t).unwrap());
            let sum = f_r(1.0, t).unwrap() + f_s(1.0, t).unwrap();
            assert!((full - sum).norm() < 1e-12 * full.norm(), "{t}");
        }
        // The series and the direct form agree at the switch radius.
        let t = c(0.2, 0.0);
        let s = f_r(1.0, t * 0.9999999).unwrap();
        let d = f_r(1.0, t).unwrap();
        assert!((s - d).norm() < 1e-6);
    }
}
