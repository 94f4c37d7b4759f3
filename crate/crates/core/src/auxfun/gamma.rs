use num_complex::Complex64;

use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const SHIFT_TO: f64 = 15.0;

// B_{2k} / (2k (2k-1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

fn stirling_tail(w: Complex64) -> Complex64 {
    let w2 = (w * w).inv();
    let mut term = w.inv();
    let mut sum = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter() {
        sum += term * *c;
        term *= w2;
    }
    sum
}

fn near_pole(w: Complex64) -> bool {
    w.re <= 0.5 && w.im.abs() < 1e-14 && (w.re - w.re.round()).abs() < 1e-14
}

/// Principal branch of log Gamma, continuous off the negative real axis.
pub fn log_gamma(w: Complex64) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma of non-finite {w}")));
    }
    if near_pole(w) {
        return Err(Error::Domain(format!("log_gamma at pole {w}")));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut v = w;
    if v.re < SHIFT_TO && v.norm() < SHIFT_TO * 4.0 || v.re < 0.0 {
        let n = (SHIFT_TO - v.re).ceil().max(0.0) as usize;
        for k in 0..n {
            shift += (w + k as f64).ln();
        }
        v = w + n as f64;
    }
    Ok((v - 0.5) * v.ln() - v + HALF_LN_2PI + stirling_tail(v) - shift)
}

/// Binet remainder `log Gamma(w) - (w - 1/2) log w + w - log(2 pi)/2`.
pub fn binet(w: Complex64) -> Result<Complex64> {
    if w.norm() >= SHIFT_TO && w.arg().abs() < 2.8 {
        return Ok(stirling_tail(w));
    }
    Ok(log_gamma(w)? - (w - 0.5) * w.ln() + w - HALF_LN_2PI)
}

/// `ln x - digamma(x) - 1/(2x)` for x > 0; minus the derivative of the Binet remainder.
pub fn binet_slope(x: f64) -> f64 {
    const C: [f64; 7] = [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0];
    let series = |y: f64| {
        let y2 = 1.0 / (y * y);
        let mut t = y2;
        let mut s = 0.0;
        for c in C.iter() {
            s += c * t;
            t *= y2;
        }
        s
    };
    if x >= 10.0 {
        return series(x);
    }
    let n = (10.0 - x).ceil() as usize;
    let y = x + n as f64;
    let digamma_y = y.ln() - 0.5 / y - series(y);
    let mut recip = 0.0;
    for k in 0..n {
        recip += 1.0 / (x + k as f64);
    }
    x.ln() - 0.5 / x - digamma_y + recip
}
