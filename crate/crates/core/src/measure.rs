//! The orthogonality measure: continuous weight on (-1, 1), point masses at
//! x_k = sqrt(1 + b^2/k^2), the density r and an orthonormality check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::auxfun::gamma::{binet, binet_slope};
use crate::auxfun::point::{sq_out, BoundaryPoint};
use crate::error::{Error, Result};
use crate::oracle::{recurrence_f64, FamilyParams};
use crate::quad::{integrate, QuadSettings};

/// Distance from +-1 inside which `r` and `r'/r` are replaced by their limits.
pub const ENDPOINT_MARGIN: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeMass {
    pub k: u64,
    pub x_k: f64,
    pub mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSample {
    pub x: f64,
    pub w: f64,
}

/// `theta / sin(theta)` on [0, pi).
fn theta_over_sin(theta: f64) -> f64 {
    if theta < 1e-4 {
        1.0 + theta * theta / 6.0
    } else {
        theta / theta.sin()
    }
}

fn wc_theta(b: f64, theta: f64) -> f64 {
    let s = theta.sin();
    if s <= 0.0 {
        return if theta < 1.0 { 4.0 * b * (-2.0 * b).exp() } else { 0.0 };
    }
    4.0 * b * (-2.0 * b * theta_over_sin(theta)).exp() / (-(-2.0 * PI * b / s).exp_m1())
}

/// Continuous weight on (-1, 1).
pub fn w_c(params: &FamilyParams, x: f64) -> Result<f64> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::Domain(format!("w_c needs -1 < x < 1, got {x}")));
    }
    Ok(wc_theta(params.b, x.acos()))
}

pub fn weight_sample(params: &FamilyParams, x: f64) -> Result<WeightSample> {
    Ok(WeightSample { x, w: w_c(params, x)? })
}

/// Analytic continuation of the discrete weight to x > 1.
pub fn w_d(params: &FamilyParams, x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("w_d needs x > 1, got {x}")));
    }
    let s = ((x - 1.0) * (x + 1.0)).sqrt();
    // x - sqrt(x^2-1) = exp(-acosh x)
    Ok(4.0 / x * s.powi(3) * (-2.0 * params.b * s.asinh() / s).exp())
}

pub fn w_d_mass(params: &FamilyParams, k: u64) -> Result<NodeMass> {
    if k == 0 {
        return Err(Error::Domain("node index starts at 1".into()));
    }
    let b = params.b;
    let kf = k as f64;
    let u = b / kf;
    let x_k = u.hypot(1.0);
    // (x_k - u) = exp(-asinh u)
    let mass = 4.0 * b.powi(3) / (kf.powi(3) * x_k) * (-2.0 * kf * u.asinh()).exp();
    Ok(NodeMass { k, x_k, mass })
}

/// `ln r(x)` for real x != 1 in (-1, inf); the x > 1 branch is the analytic
/// continuation, used on (1, beta).
pub fn ln_r_unchecked(b: f64, x: f64) -> f64 {
    let ln_pi = PI.ln();
    if x == 1.0 {
        return -ln_pi - 2.0 * b;
    }
    if x < 1.0 {
        let theta = x.acos();
        return -ln_pi - 2.0 * b * theta_over_sin(theta);
    }
    let s = ((x - 1.0) * (x + 1.0)).sqrt();
    let a = s.asinh();
    let mu = binet(Complex64::new(b / s, 0.0)).map(|m| m.re).unwrap_or(0.0);
    -ln_pi - 2.0 * b * a / s + a + 2.0 * mu
}

/// Density r on (-1, 1) and its continuation to (1, inf).
pub fn r(params: &FamilyParams, x: f64) -> Result<f64> {
    if !(x > -1.0) {
        return Err(Error::Domain(format!("r needs x > -1, got {x}")));
    }
    if (x - 1.0).abs() < ENDPOINT_MARGIN {
        return Ok((-2.0 * params.b).exp() / PI);
    }
    Ok(ln_r_unchecked(params.b, x).exp())
}

/// `sin t - t cos t` (or minus `sinh t - t cosh t` when `hyperbolic`), accurate at small t.
fn cubic_gap(t: f64, hyperbolic: bool) -> f64 {
    if t < 0.1 {
        let mut sum = 0.0;
        let mut pow = t;
        let mut fact = 1.0;
        for k in 1..10 {
            pow *= t * t;
            fact *= (2 * k) as f64 * (2 * k + 1) as f64;
            let term = pow * (2 * k) as f64 / fact;
            sum += if hyperbolic || k % 2 == 1 { term } else { -term };
        }
        sum
    } else if hyperbolic {
        t * t.cosh() - t.sinh()
    } else {
        t.sin() - t * t.cos()
    }
}

/// `r'(x)/r(x)` without the endpoint margin check; x != +-1.
pub fn log_r_derivative_unchecked(b: f64, x: f64) -> f64 {
    if x <= 1.0 {
        let theta = x.acos();
        let s = theta.sin();
        if s == 0.0 {
            return 2.0 * b / 3.0;
        }
        return 2.0 * b * cubic_gap(theta, false) / s.powi(3);
    }
    log_r_derivative_above_one(b, x - 1.0)
}

/// `r'(x)/r(x)` at x = 1 + h, h > 0, with h given exactly.
pub fn log_r_derivative_above_one(b: f64, h: f64) -> f64 {
    let x = 1.0 + h;
    let s = (h * (2.0 + h)).sqrt();
    let a = s.asinh();
    let g = b / s;
    // (x a - s) / s^3 > 0
    2.0 * b * cubic_gap(a, true) / s.powi(3) + 1.0 / s + 2.0 * binet_slope(g) * b * x / s.powi(3)
}

/// `r'/r` at an abscissa, using its exact offset from 1 on the right.
pub fn log_r_derivative_at(b: f64, x: f64, from_one: f64) -> f64 {
    if from_one > 0.0 {
        log_r_derivative_above_one(b, from_one)
    } else {
        log_r_derivative_unchecked(b, x)
    }
}

pub fn log_r_derivative(params: &FamilyParams, x: f64) -> Result<f64> {
    if !(x > -1.0) || (x - 1.0).abs() < ENDPOINT_MARGIN || (x + 1.0) < ENDPOINT_MARGIN {
        return Err(Error::Domain(format!("r'/r requested at {x}, within the endpoint margin or outside (-1, inf)")));
    }
    Ok(log_r_derivative_unchecked(params.b, x))
}

/// `b / sqrt(z^2 - 1)`, positive on (1, inf).
pub fn gamma_fn(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(-1.0, 1.0, "gamma")?;
    let s = sq_out(p.eval_point());
    if s.norm() == 0.0 {
        return Err(Error::Domain("gamma is infinite at +-1".into()));
    }
    Ok(params.b / s)
}

/// Real-axis `gamma` for x > 1.
pub fn gamma_real(b: f64, x: f64) -> f64 {
    b / ((x - 1.0) * (x + 1.0)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadSpec {
    /// Relative tolerance of the continuous-part integral.
    pub rel_tol: f64,
    /// Number of point masses summed before the analytic tail.
    pub cutoff: u64,
    /// Largest acceptable reported error.
    pub tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { rel_tol: 1e-13, cutoff: 100_000, tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub values: Vec<Vec<f64>>,
    pub error: f64,
}

impl GramMatrix {
    pub fn max_deviation(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                d = d.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        d
    }
}

/// All inner products `<p_i, p_j>` for i, j <= max_degree.
pub fn gram_matrix(params: &FamilyParams, max_degree: usize, spec: &QuadSpec) -> Result<GramMatrix> {
    let b = params.b;
    let m = max_degree + 1;
    let mut values = vec![vec![0.0; m]; m];
    let mut error: f64 = 0.0;

    let settings = QuadSettings { abs_tol: 1e-300, rel_tol: spec.rel_tol, max_panels: 2000 };
    for i in 0..m {
        for j in i..m {
            let f = |theta: f64| {
                let p = recurrence_f64(b, j, theta.cos());
                p[i] * p[j] * wc_theta(b, theta) * theta.sin()
            };
            let res = integrate(f, &[0.0, 0.5, 1.5, 2.5, PI], settings);
            values[i][j] = res.value;
            error = error.max(res.error);
        }
    }

    let c_tail = 4.0 * b.powi(3) * (-2.0 * b).exp();
    let k_max = spec.cutoff;
    let mut disc = vec![vec![0.0; m]; m];
    // Smallest masses first.
    for k in (1..=k_max).rev() {
        let node = w_d_mass(params, k)?;
        let p = recurrence_f64(b, max_degree, node.x_k);
        for i in 0..m {
            for j in i..m {
                disc[i][j] += p[i] * p[j] * node.mass;
            }
        }
    }
    let p1 = recurrence_f64(b, max_degree, 1.0);
    let kf = k_max as f64;
    for i in 0..m {
        for j in i..m {
            let f1 = p1[i] * p1[j];
            let total = values[i][j] + disc[i][j] + f1 * c_tail / (2.0 * kf * kf);
            values[i][j] = total;
            values[j][i] = total;
            error = error.max(c_tail * (f1.abs() * (2.0 + b * b) + 1.0) / kf.powi(3));
        }
    }
    if error > spec.tol {
        return Err(Error::Quadrature(format!("orthonormality error bound {error:e} exceeds {:e}", spec.tol)));
    }
    Ok(GramMatrix { values, error })
}

/// `<p_n, p_m>` with its error bound.
pub fn inner_product(params: &FamilyParams, n: usize, m: usize, spec: &QuadSpec) -> Result<(f64, f64)> {
    let g = gram_matrix(params, n.max(m), spec)?;
    Ok((g.values[n][m], g.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(b: f64) -> FamilyParams {
        FamilyParams::new(b).unwrap()
    }

    #[test]
    fn continuous_weight_values() {
        assert!((w_c(&p(1.0), 0.0).unwrap() - 2.0 / PI.sinh()).abs() < 1e-15);
        assert!((w_c(&p(1.0), 1.0 - 1e-12).unwrap() - 4.0 * (-2f64).exp()).abs() < 1e-5);
        assert!(w_c(&p(1.0), -1.0 + 1e-9).unwrap() < 1e-100);
        assert!(w_c(&p(1.0), 1.0).is_err());
    }

    #[test]
    fn first_mass() {
        let node = w_d_mass(&p(1.0), 1).unwrap();
        assert!((node.x_k - 2f64.sqrt()).abs() < 1e-15);
        assert!((node.mass - (6.0 * 2f64.sqrt() - 8.0)).abs() < 1e-14);
        assert!((w_d(&p(1.0), node.x_k).unwrap() - node.mass).abs() < 1e-14);
        let far = w_d_mass(&p(1.0), 10_000).unwrap();
        assert!((far.mass * 1e12 / (4.0 * (-2f64).exp()) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn density_values() {
        let b = p(1.0);
        assert!((r(&b, 0.0).unwrap() - (-PI).exp() / PI).abs() < 1e-16);
        let lim = (-2f64).exp() / PI;
        assert!((r(&b, 1.0 - 1e-9).unwrap() - lim).abs() < 1e-15);
        assert!((r(&b, 1.0 - 1e-6).unwrap() - lim).abs() < 1e-5);
        assert!((r(&b, 1.0 + 1e-6).unwrap() - lim).abs() < 1e-4);
        for h in [1e-2, 1e-3, 1e-4] {
            let d = (r(&b, 1.0 - h).unwrap() - r(&b, 1.0 + h).unwrap()).abs();
            assert!(d < 0.2 * h.sqrt(), "{h} {d}");
        }
    }

    #[test]
    fn log_derivative_limits() {
        let b = 1.0;
        assert!((log_r_derivative_unchecked(b, 1.0 - 1e-7) - 2.0 / 3.0).abs() < 1e-3);
        let x: f64 = -1.0 + 1e-6;
        let lead = b * PI / (2f64.sqrt() * (1.0 + x).powf(1.5));
        assert!((log_r_derivative_unchecked(b, x) / lead - 1.0).abs() < 1e-2);
        for &x in &[0.0, 0.7, -0.9, 1.3, 2.5] {
            let h = 1e-6;
            let fd = (ln_r_unchecked(b, x + h) - ln_r_unchecked(b, x - h)) / (2.0 * h);
            assert!((fd - log_r_derivative_unchecked(b, x)).abs() < 1e-6 * (1.0 + fd.abs()), "{x}");
        }
    }

    #[test]
    fn gamma_at_nodes() {
        let b = p(1.0);
        let g = gamma_fn(&b, &BoundaryPoint::off_axis(Complex64::new(2.0, 0.0))).unwrap();
        assert!((g.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        for k in 1..=5 {
            let node = w_d_mass(&b, k).unwrap();
            assert!((gamma_real(1.0, node.x_k) - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn small_orthonormality() {
        let spec = QuadSpec { cutoff: 20_000, ..Default::default() };
        let (v, _) = inner_product(&p(1.0), 0, 0, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
        let (v, _) = inner_product(&p(1.0), 0, 1, &spec).unwrap();
        assert!(v.abs() < 1e-8);
        let (v, _) = inner_product(&p(0.5), 3, 3, &spec).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }
}
