//! Scalar auxiliary functions of the asymptotic formulas.

pub mod gamma;
pub mod point;
mod edge;
mod series;
mod szego;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::oracle::FamilyParams;
pub use edge::{edge_quarter_alpha, edge_quarter_beta, lambda_alpha, lambda_beta, EDGE_SMALL_TAU};
pub use gamma::{binet, log_gamma};
pub use point::{joukowski_inv, sq_in, sq_out, BoundaryPoint, Side};
pub use series::{f_r, f_s, xi0, MAX_TAU};
pub use szego::{ln_szego_d, ln_szego_d_approx, ln_szego_d_infinity, szego_d, szego_d_approx};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Values of q = lambda/tau on a circle around each soft edge, filled on first use.
#[derive(Debug, Default)]
pub struct EdgeCache {
    pub(crate) alpha: OnceLock<Vec<Complex64>>,
    pub(crate) beta: OnceLock<Vec<Complex64>>,
}

/// A phi-function value with its n-scaled form and, near the edge, the conformal map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiValue {
    pub value: Complex64,
    pub scaled: Complex64,
    pub map: Option<Complex64>,
}

/// Treats an untagged point within the axis margin as lying on the upper side.
fn sided(p: &BoundaryPoint) -> BoundaryPoint {
    if p.side == Side::OffAxis {
        let q = BoundaryPoint::snapped(p.z);
        if q.on_axis() {
            return BoundaryPoint { z: q.z, side: if p.z.im.is_sign_negative() { Side::Lower } else { Side::Upper } };
        }
    }
    *p
}

fn gamma_at(b: f64, z: Complex64) -> Result<Complex64> {
    let s = sq_out(z);
    if s.norm() == 0.0 {
        return Err(Error::Domain("gamma is infinite at +-1".into()));
    }
    Ok(b / s)
}

pub(crate) fn ln_phi0_at(b: f64, z: Complex64, sg: f64) -> Result<Complex64> {
    let g = gamma_at(b, z)?;
    let ipi = I * PI;
    let jump = (-g).ln() - g.ln();
    Ok(ipi * sg - joukowski_inv(z).ln() + (g + 0.5) * jump - ipi * sg * (g + 0.5) + binet(-g)? - binet(g)?)
}

/// `ln phi_0`, the logarithm taken as the sum of the logarithms of its factors.
pub fn ln_phi0(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(-1.0, 1.0, "phi_0")?;
    let p = sided(p);
    ln_phi0_at(params.b, p.eval_point(), p.sign())
}

pub fn phi0(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    Ok(ln_phi0(params, p)?.exp())
}

/// `ln d_E`; analytic off [-1, inf).
pub fn ln_d_e(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(-1.0, f64::INFINITY, "d_E")?;
    let z = sided(p).eval_point();
    binet(-gamma_at(params.b, z)?)
}

pub fn d_e(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    Ok(ln_d_e(params, p)?.exp())
}

/// `ln d_I`; analytic off (-inf, 1].
pub fn ln_d_i(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(f64::NEG_INFINITY, 1.0, "d_I")?;
    let z = sided(p).eval_point();
    Ok(-binet(gamma_at(params.b, z)?)?)
}

pub fn d_i(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    Ok(ln_d_i(params, p)?.exp())
}

pub fn chi(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(-1.0, f64::INFINITY, "chi")?;
    let p = sided(p);
    let z = p.eval_point();
    let l = joukowski_inv(z).ln() - I * PI * p.sign();
    Ok(2.0 * (PI * params.b).sqrt() * (-0.5 * l).exp())
}

/// Continuation of `-r'/r` from (-1, 1).
pub fn h_alpha(params: &FamilyParams, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(f64::NEG_INFINITY, -1.0, "h_alpha")?;
    let z = sided(p).eval_point();
    let w = sq_in(z);
    Ok(-2.0 * params.b * (w + I * z * (z + I * w).ln()) / (w * w * w))
}

/// `ln r(z)` continued off (-inf, 1], real on (1, inf).
pub fn ln_r_complex(b: f64, z: Complex64) -> Result<Complex64> {
    let s = sq_out(z);
    let phi = z + s;
    let g = b / s;
    let lp = phi.ln();
    Ok(-PI.ln() - 2.0 * b / s * lp + lp + 2.0 * binet(g)?)
}

pub fn tau_alpha(eq: &Equilibrium, z: Complex64) -> Complex64 {
    (z - eq.alpha()) / (1.0 + eq.alpha())
}

pub fn tau_beta(eq: &Equilibrium, z: Complex64) -> Complex64 {
    (z - eq.beta()) / (eq.beta() - 1.0)
}

/// `((z-beta)/(z-alpha))^(1/4)` with principal roots of each factor.
pub fn varrho(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(eq.alpha(), eq.beta(), "varrho")?;
    let z = sided(p).eval_point();
    Ok((z - eq.beta()).powf(0.25) / (z - eq.alpha()).powf(0.25))
}

pub(crate) fn phi_alpha_at(eq: &Equilibrium, z: Complex64, sg: f64) -> Result<Complex64> {
    let b = eq.b();
    let (alpha, beta, nf) = (eq.alpha(), eq.beta(), eq.nf());
    let r = eq.big_r(z);
    let tail = eq.tail_cauchy(|x| -crate::measure::gamma_real(b, x), z);
    let band = eq.band_cauchy(|x| crate::measure::ln_r_unchecked(b, x) + PI.ln(), z);
    let w = sq_in(z);
    let lead = ((2.0 * z - alpha - beta + 2.0 * r) / (beta - alpha)).ln();
    Ok(r * tail / nf - lead - r * band / (2.0 * nf * PI) - I * b * (z + I * w).ln() / (nf * w) + I * PI * sg)
}

/// phi-function of the left soft edge from its explicit integral form.
pub fn phi_alpha(eq: &Equilibrium, p: &BoundaryPoint) -> Result<PhiValue> {
    p.require_side(eq.alpha(), f64::INFINITY, "phi_alpha")?;
    p.require_side(f64::NEG_INFINITY, -1.0, "phi_alpha")?;
    let p = sided(p);
    let tau = tau_alpha(eq, p.z);
    let v = if tau.norm() < EDGE_SMALL_TAU {
        edge::phi_near_edge(eq, true, p.eval_point())?
    } else {
        phi_alpha_at(eq, p.eval_point(), p.sign())?
    };
    let map = if tau.norm() < 0.9 { lambda_alpha(eq, &p).ok() } else { None };
    Ok(PhiValue { value: v, scaled: v * eq.nf(), map })
}

/// The same function through its relation with g and l.
pub fn phi_alpha_via_g(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(eq.alpha(), f64::INFINITY, "phi_alpha")?;
    let p = sided(p);
    let z = p.eval_point();
    let nf = eq.nf();
    let w = sq_in(z);
    Ok(-eq.g_unchecked(z)? - I * eq.b() * (z + I * w).ln() / (nf * w) + eq.mrs.l / 2.0 + PI.ln() / (2.0 * nf) + I * PI * p.sign())
}

pub(crate) fn phi_beta_at(eq: &Equilibrium, z: Complex64, sg: f64) -> Result<Complex64> {
    let nf = eq.nf();
    let g = gamma_at(eq.b(), z)?;
    Ok(eq.mrs.l / 2.0 - eq.g_unchecked(z)? + I * PI * sg * g / nf - ln_r_complex(eq.b(), z)? / (2.0 * nf))
}

/// phi-function of the right soft edge.
pub fn phi_beta(eq: &Equilibrium, p: &BoundaryPoint) -> Result<PhiValue> {
    p.require_side(f64::NEG_INFINITY, eq.beta(), "phi_beta")?;
    let p = sided(p);
    let tau = tau_beta(eq, p.z);
    let v = if tau.norm() < EDGE_SMALL_TAU {
        edge::phi_near_edge(eq, false, p.eval_point())?
    } else {
        phi_beta_at(eq, p.eval_point(), p.sign())?
    };
    let map = if tau.norm() < 0.9 { lambda_beta(eq, &p).ok() } else { None };
    Ok(PhiValue { value: v, scaled: v * eq.nf(), map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p1() -> FamilyParams {
        FamilyParams::new(1.0).unwrap()
    }

    #[test]
    fn phi0_on_band() {
        let up = phi0(&p1(), &BoundaryPoint::upper(0.3)).unwrap();
        let lo = phi0(&p1(), &BoundaryPoint::lower(0.3)).unwrap();
        assert!((up * lo - 1.0).norm() < 1e-10);
        assert!((up.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phi0_band_expansion() {
        // phi_0 = 1 + i b_a sqrt(x+1) + O(x+1) near -1 on the upper side.
        let b: f64 = 1.0;
        let ba = (2.0 * b).sqrt() * (1.0 - 1.0 / (6.0 * b));
        for h in [1e-4, 1e-5] {
            let v = phi0(&p1(), &BoundaryPoint::upper(-1.0 + h)).unwrap();
            let lead = c(1.0, ba * h.sqrt());
            assert!((v - lead).norm() < 5.0 * h, "{h} {v} {lead}");
        }
    }

    #[test]
    fn edge_normalizations() {
        let b2 = FamilyParams::new(2.0).unwrap();
        let d = d_i(&b2, &BoundaryPoint::off_axis(c(1.0 + 1e-6, 0.0))).unwrap();
        assert!((d - 1.0).norm() < 1e-4);
        for r in [1e2, 1e3] {
            let z = c(0.0, r);
            let v = d_e(&p1(), &BoundaryPoint::off_axis(z)).unwrap() * chi(&p1(), &BoundaryPoint::off_axis(z)).unwrap();
            assert!((v - 1.0).norm() < 3.0 * r.ln() / r, "{r} {v}");
        }
        let z = c(-1e3, 0.0);
        let p = BoundaryPoint::snapped(z);
        let v = d_e(&p1(), &p).unwrap() * chi(&p1(), &p).unwrap();
        let lead = 1.0 - (-z).ln() / z;
        assert!((v - lead).norm() < 3.0 / 1e3, "{v} {lead}");
    }

    #[test]
    fn h_alpha_is_minus_log_derivative() {
        for x in [0.0, 0.4, -0.7] {
            let h = h_alpha(&p1(), &BoundaryPoint::off_axis(c(x, 0.0))).unwrap();
            let d = crate::measure::log_r_derivative_unchecked(1.0, x);
            assert!((h + d).norm() < 1e-10 * (1.0 + d.abs()), "{x}");
        }
        // Path continuation to an off-axis point by numerical differentiation of ln r.
        let z = c(0.5, 0.5);
        let w = sq_in(z);
        let lnr = |z: Complex64| -PI.ln() - 2.0 * (z + I * sq_in(z)).ln() / (I * sq_in(z));
        let hstep = 1e-6;
        let fd = (lnr(z + hstep) - lnr(z - hstep)) / (2.0 * hstep);
        let h = h_alpha(&p1(), &BoundaryPoint::off_axis(z)).unwrap();
        assert!((h + fd).norm() < 1e-6 * (1.0 + fd.norm()), "{h} {fd} {w}");
    }

    #[test]
    fn ln_r_branches_agree_on_real_axis() {
        for x in [1.001, 1.2, 3.0] {
            let a = ln_r_complex(1.0, c(x, 1e-150)).unwrap();
            let b = crate::measure::ln_r_unchecked(1.0, x);
            assert!((a - b).norm() < 1e-12, "{x}");
        }
    }

    fn eq100() -> Arc<Equilibrium> {
        Equilibrium::new(p1(), 100).unwrap()
    }

    #[test]
    fn phi_alpha_two_ways() {
        let eq = eq100();
        for z in [c(0.3, 0.2), c(-0.995, 0.003), c(-0.98, -0.01)] {
            let p = BoundaryPoint::off_axis(z);
            let a = phi_alpha(&eq, &p).unwrap().value;
            let b = phi_alpha_via_g(&eq, &p).unwrap();
            assert!((a - b).norm() < 1e-6, "{z} {a} {b}");
        }
        // Pure imaginary boundary values on (alpha, 1).
        let v = phi_alpha(&eq, &BoundaryPoint::upper(0.2)).unwrap().value;
        assert!(v.re.abs() < 1e-8 && v.im > 0.0, "{v}");
    }

    #[test]
    fn phi_vanish_at_edges() {
        let eq = eq100();
        let a = phi_alpha(&eq, &BoundaryPoint::upper(eq.alpha() + 1e-9)).unwrap().value;
        assert!(a.norm() < 1e-6, "{a}");
        let b = phi_beta(&eq, &BoundaryPoint::upper(eq.beta() + 1e-9)).unwrap().value;
        assert!(b.norm() < 1e-6, "{b}");
    }

    #[test]
    fn phi_near_edge_matches_direct() {
        let eq = eq100();
        for (t, sd) in [(0.029, 1.0), (0.029, -1.0), (-0.029, 1.0)] {
            let za = eq.alpha() + (1.0 + eq.alpha()) * t;
            let pa = if sd > 0.0 { BoundaryPoint::upper(za) } else { BoundaryPoint::lower(za) };
            let near = phi_alpha(&eq, &pa).unwrap().value;
            let far = phi_alpha_at(&eq, pa.eval_point(), sd).unwrap();
            assert!((near - far).norm() < 1e-6 * far.norm(), "{t} {near} {far}");
            let zb = eq.beta() + (eq.beta() - 1.0) * t;
            let pb = if sd > 0.0 { BoundaryPoint::upper(zb) } else { BoundaryPoint::lower(zb) };
            let near = phi_beta(&eq, &pb).unwrap().value;
            let far = phi_beta_at(&eq, pb.eval_point(), sd).unwrap();
            assert!((near - far).norm() < 1e-6 * far.norm(), "{t} {near} {far}");
        }
    }

    #[test]
    fn phi_beta_pure_imaginary_on_short_band() {
        let eq = eq100();
        let x = 1.0 + 0.5 * (eq.beta() - 1.0);
        let v = phi_beta(&eq, &BoundaryPoint::upper(x)).unwrap().value;
        assert!(v.re.abs() < 1e-8, "{v}");
    }

    #[test]
    fn varrho_basics() {
        let eq = eq100();
        let v = varrho(&eq, &BoundaryPoint::off_axis(c(2.0, 0.0))).unwrap();
        assert!(v.im.abs() < 1e-15 && v.re > 0.0 && v.re < 1.0);
        let v = varrho(&eq, &BoundaryPoint::off_axis(c(1e8, 0.0))).unwrap();
        assert!((v - 1.0).norm() < 1e-7);
        // det of the outer-parametrix combination.
        let v = varrho(&eq, &BoundaryPoint::off_axis(c(0.3, 0.7))).unwrap();
        let a = (v + 1.0 / v) / 2.0;
        let bb = (v - 1.0 / v) / (2.0 * I);
        assert!((a * a + bb * bb - 1.0).norm() < 1e-14);
    }
}
