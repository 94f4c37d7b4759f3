//! MRS numbers, the equilibrium density, the g-function and the Lagrange
//! multiplier for degree n.

pub mod weighted;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::auxfun::point::BoundaryPoint;
use crate::error::{Error, Result};
use crate::measure::{gamma_real, ln_r_unchecked, log_r_derivative_at, log_r_derivative_unchecked};
use crate::oracle::FamilyParams;
use crate::quad::{integrate, QuadSettings};
pub use weighted::{weighted_integral, weighted_integral_at, Abscissa, Kernel, Segment, Weighted};

/// Smallest degree accepted by the solver.
pub const N_MIN: usize = 10;
/// Distance from alpha, 1 and beta inside which densities are not evaluated.
pub const EDGE_MARGIN: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MrsSolution {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub l: f64,
    pub residuals: [f64; 2],
    pub iterations: usize,
}

/// Quadrature policy for the band and tail integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub settings: QuadSettings,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid { settings: QuadSettings { abs_tol: 1e-300, rel_tol: 1e-13, max_panels: 4000 } }
    }
}

impl QuadratureGrid {
    /// A stricter grid for independent plug-back checks.
    pub fn refined(&self) -> Self {
        QuadratureGrid {
            settings: QuadSettings {
                abs_tol: self.settings.abs_tol,
                rel_tol: (self.settings.rel_tol * 1e-2).max(1e-15),
                max_panels: self.settings.max_panels * 4,
            },
        }
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn node_density(b: f64, x: f64) -> f64 {
    let s2 = (x - 1.0) * (x + 1.0);
    b * x / (s2 * s2.sqrt())
}

/// Residuals of the two moment equations at (alpha, beta).
pub fn mrs_residuals(b: f64, n: usize, alpha: f64, beta: f64, grid: &QuadratureGrid) -> [f64; 2] {
    let band = Segment::Band { alpha, beta };
    let tail = Segment::Tail { alpha, beta };
    let s = grid.settings;
    let fb = |a: Abscissa| c(log_r_derivative_at(b, a.x, a.from_one) / PI);
    let ft = |x: f64| c(2.0 * node_density(b, x));
    let b0 = weighted_integral_at(band, fb, Kernel::One, s).value.re;
    let b1 = weighted_integral_at(band, fb, Kernel::X, s).value.re;
    let t0 = weighted_integral(tail, ft, Kernel::One, s).value.re;
    let t1 = weighted_integral(tail, ft, Kernel::X, s).value.re;
    [b0 - t0, b1 - t1 + 2.0 * n as f64]
}

fn solve_2x2(j: [[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([(r[0] * j[1][1] - r[1] * j[0][1]) / det, (j[0][0] * r[1] - j[1][0] * r[0]) / det])
}

fn norm2(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

/// Damped Newton iteration for the MRS numbers with a numerical Jacobian.
pub fn solve_mrs_with(params: &FamilyParams, n: usize, grid: &QuadratureGrid) -> Result<MrsSolution> {
    if n < N_MIN {
        return Err(Error::InvalidParameter(format!("degree {n} is below the minimum {N_MIN}")));
    }
    let b = params.b;
    let nf = n as f64;
    let mut alpha = -1.0 + b / nf;
    let mut beta = 1.0 + b / nf;
    if alpha >= 1.0 {
        return Err(Error::InvalidParameter(format!("b/n = {} too large for a band", b / nf)));
    }
    let mut res = mrs_residuals(b, n, alpha, beta, grid);
    let tol = 1e-11;
    let mut it = 0;
    while it < 50 {
        if norm2(res) <= tol {
            break;
        }
        it += 1;
        let ha = 1e-7 * (1.0 + alpha);
        let hb = 1e-7 * (beta - 1.0);
        let ra_p = mrs_residuals(b, n, alpha + ha, beta, grid);
        let ra_m = mrs_residuals(b, n, alpha - ha, beta, grid);
        let rb_p = mrs_residuals(b, n, alpha, beta + hb, grid);
        let rb_m = mrs_residuals(b, n, alpha, beta - hb, grid);
        let jac = [
            [(ra_p[0] - ra_m[0]) / (2.0 * ha), (rb_p[0] - rb_m[0]) / (2.0 * hb)],
            [(ra_p[1] - ra_m[1]) / (2.0 * ha), (rb_p[1] - rb_m[1]) / (2.0 * hb)],
        ];
        let step = solve_2x2(jac, [-res[0], -res[1]]).ok_or_else(|| Error::Newton {
            iterations: it,
            alpha,
            beta,
            r0: res[0],
            r1: res[1],
        })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let na = alpha + lambda * step[0];
            let nb = beta + lambda * step[1];
            if na > -1.0 && na < 1.0 && nb > 1.0 {
                let nr = mrs_residuals(b, n, na, nb, grid);
                if norm2(nr) < norm2(res) {
                    alpha = na;
                    beta = nb;
                    res = nr;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // Stalled at the quadrature noise floor.
            break;
        }
    }
    if norm2(res) > 1e-9 || !norm2(res).is_finite() {
        return Err(Error::Newton { iterations: it, alpha, beta, r0: res[0], r1: res[1] });
    }
    let mut sol = MrsSolution { n, alpha, beta, l: 0.0, residuals: res, iterations: it };
    sol.l = lagrange_l_with(params, &sol, grid)?;
    Ok(sol)
}

type CacheKey = (u64, usize);

fn cache() -> &'static RwLock<HashMap<CacheKey, MrsSolution>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, MrsSolution>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// MRS numbers and Lagrange multiplier for degree n, cached per (b, n).
pub fn solve_mrs(params: &FamilyParams, n: usize) -> Result<MrsSolution> {
    let key = (params.b.to_bits(), n);
    if let Some(s) = cache().read().unwrap().get(&key) {
        return Ok(*s);
    }
    let sol = solve_mrs_with(params, n, &QuadratureGrid::default())?;
    cache().write().unwrap().entry(key).or_insert(sol);
    Ok(sol)
}

/// `l` from the large-z expansion of g.
pub fn lagrange_l_with(params: &FamilyParams, mrs: &MrsSolution, grid: &QuadratureGrid) -> Result<f64> {
    let b = params.b;
    let (alpha, beta, nf) = (mrs.alpha, mrs.beta, mrs.n as f64);
    let s = grid.settings;
    let band = weighted_integral(Segment::Band { alpha, beta }, |x| c(ln_r_unchecked(b, x) + PI.ln()), Kernel::One, s);
    let tail = weighted_integral(Segment::Tail { alpha, beta }, |x| c(gamma_real(b, x)), Kernel::One, s);
    if !band.converged || !tail.converged {
        return Err(Error::Quadrature("Lagrange multiplier integrals did not converge".into()));
    }
    let half = ((beta - alpha) / 4.0).ln() - PI.ln() / (2.0 * nf) + band.value.re / (2.0 * nf * PI) + tail.value.re / nf;
    Ok(2.0 * half)
}

pub fn lagrange_l(params: &FamilyParams, mrs: &MrsSolution) -> Result<f64> {
    lagrange_l_with(params, mrs, &QuadratureGrid::default())
}

/// Solved equilibrium problem for one (b, n), with the integral
/// representations of G, psi and g.
#[derive(Debug)]
pub struct Equilibrium {
    pub params: FamilyParams,
    pub mrs: MrsSolution,
    pub grid: QuadratureGrid,
    pub(crate) edge_cache: crate::auxfun::EdgeCache,
}

impl Equilibrium {
    pub fn new(params: FamilyParams, n: usize) -> Result<Arc<Self>> {
        let mrs = solve_mrs(&params, n)?;
        Ok(Self::from_solution(params, mrs))
    }

    pub fn from_solution(params: FamilyParams, mrs: MrsSolution) -> Arc<Self> {
        Arc::new(Equilibrium { params, mrs, grid: QuadratureGrid::default(), edge_cache: Default::default() })
    }

    pub fn n(&self) -> usize {
        self.mrs.n
    }

    pub fn nf(&self) -> f64 {
        self.mrs.n as f64
    }

    pub fn alpha(&self) -> f64 {
        self.mrs.alpha
    }

    pub fn beta(&self) -> f64 {
        self.mrs.beta
    }

    pub fn b(&self) -> f64 {
        self.params.b
    }

    /// `sqrt(z-alpha) sqrt(z-beta)`, ~ z at infinity.
    pub fn big_r(&self, z: Complex64) -> Complex64 {
        (z - self.alpha()).sqrt() * (z - self.beta()).sqrt()
    }

    pub(crate) fn band(&self) -> Segment {
        Segment::Band { alpha: self.alpha(), beta: self.beta() }
    }

    pub(crate) fn tail(&self) -> Segment {
        Segment::Tail { alpha: self.alpha(), beta: self.beta() }
    }

    /// Cauchy transform of `f w` over the band at z.
    pub(crate) fn band_cauchy<F: Fn(f64) -> f64>(&self, f: F, z: Complex64) -> Complex64 {
        weighted_integral(self.band(), |x| c(f(x)), Kernel::Cauchy(z), self.grid.settings).value
    }

    pub(crate) fn tail_cauchy<F: Fn(f64) -> f64>(&self, f: F, z: Complex64) -> Complex64 {
        weighted_integral(self.tail(), |x| c(f(x)), Kernel::Cauchy(z), self.grid.settings).value
    }

    fn check_point(&self, p: &BoundaryPoint, what: &str) -> Result<Complex64> {
        p.require_side(self.alpha(), f64::INFINITY, what)?;
        let z = p.eval_point();
        if p.on_axis() {
            for e in [self.alpha(), 1.0, self.beta()] {
                if (z.re - e).abs() < EDGE_MARGIN {
                    return Err(Error::Domain(format!("{what} at {} is within the margin of the edge {e}", z.re)));
                }
            }
        }
        Ok(z)
    }

    /// The resolvent-type function whose boundary values give the density.
    pub fn big_g(&self, p: &BoundaryPoint) -> Result<Complex64> {
        let z = self.check_point(p, "G")?;
        let b = self.b();
        let band = self.band_cauchy(|x| log_r_derivative_unchecked(b, x), z);
        let tail = self.tail_cauchy(|x| 2.0 * node_density(b, x), z);
        let r = self.big_r(z);
        Ok(r / (Complex64::new(0.0, 2.0 * self.nf() * PI)) * (-band / PI + tail))
    }

    /// Equilibrium density.
    pub fn psi(&self, x: f64) -> Result<f64> {
        if x > self.beta() + EDGE_MARGIN {
            return Ok(node_density(self.b(), x) / self.nf());
        }
        if x <= self.alpha() {
            return Err(Error::Domain(format!("psi needs x > alpha, got {x}")));
        }
        Ok(self.big_g(&BoundaryPoint::upper(x))?.re)
    }

    /// The g-function.
    pub fn g(&self, p: &BoundaryPoint) -> Result<Complex64> {
        let z = self.check_point(p, "g")?;
        self.g_unchecked(z)
    }

    pub(crate) fn g_unchecked(&self, z: Complex64) -> Result<Complex64> {
        let b = self.b();
        let (alpha, beta, nf) = (self.alpha(), self.beta(), self.nf());
        let r = self.big_r(z);
        let lead = ((2.0 * z - alpha - beta + 2.0 * r) / (beta - alpha)).ln();
        let band = self.band_cauchy(|x| ln_r_unchecked(b, x), z);
        let tail = self.tail_cauchy(|x| gamma_real(b, x), z);
        Ok(lead + r * band / (2.0 * nf * PI) + r * tail / nf + self.mrs.l / 2.0)
    }

    /// `g+ + g- - l + ln r / n` at a band point.
    pub fn phase_residual(&self, x: f64) -> Result<f64> {
        if !(x > self.alpha() && x < self.beta()) {
            return Err(Error::Domain(format!("phase condition holds on the band only, got {x}")));
        }
        let gp = self.g(&BoundaryPoint::upper(x))?;
        let gm = self.g(&BoundaryPoint::lower(x))?;
        Ok((gp + gm - self.mrs.l + ln_r_unchecked(self.b(), x) / self.nf()).norm())
    }

    /// Total band mass `int_alpha^beta psi`.
    pub fn band_mass(&self) -> Result<f64> {
        let (alpha, beta) = (self.alpha(), self.beta());
        let settings = QuadSettings { abs_tol: 1e-300, rel_tol: 1e-10, max_panels: 400 };
        let mut err = None;
        let mut f = |x: f64| -> f64 {
            match self.psi(x) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        };
        // x = alpha + u^2 on the left; x = 1 + (beta-1) sin^2 t on the right.
        let left = integrate(|u: f64| f(alpha + u * u) * 2.0 * u, &[0.0, (1.0 + alpha).sqrt(), (1.0 - alpha).sqrt()], settings);
        let h = beta - 1.0;
        let right = integrate(
            |t: f64| {
                let (s, co) = t.sin_cos();
                f(1.0 + h * s * s) * 2.0 * h * s * co
            },
            &[0.0, std::f64::consts::FRAC_PI_2],
            settings,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(left.value + right.value)
    }

    /// `l` recomputed from the potential of the density at alpha.
    pub fn lagrange_l_from_density(&self) -> Result<f64> {
        let b = self.b();
        let (alpha, beta, nf) = (self.alpha(), self.beta(), self.nf());
        let settings = QuadSettings { abs_tol: 1e-300, rel_tol: 1e-11, max_panels: 600 };
        let mut err = None;
        let mut f = |x: f64| -> f64 {
            match self.psi(x) {
                Ok(v) => v * (x - alpha).ln(),
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        };
        let left = integrate(
            |u: f64| if u == 0.0 { 0.0 } else { f(alpha + u * u) * 2.0 * u },
            &[0.0, 0.25 * (1.0 + alpha).sqrt(), (1.0 + alpha).sqrt(), 4.0 * (1.0 + alpha).sqrt(), (1.0 - alpha).sqrt()],
            settings,
        );
        let h = beta - 1.0;
        let right = integrate(
            |t: f64| {
                let (s, co) = t.sin_cos();
                f(1.0 + h * s * s) * 2.0 * h * s * co
            },
            &[0.0, std::f64::consts::FRAC_PI_2],
            settings,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let tail = weighted_integral(
            self.tail(),
            |x| c(node_density(b, x) / nf * (x - alpha).ln() * ((x - alpha) * (x - beta)).sqrt()),
            Kernel::One,
            self.grid.settings,
        );
        let potential = left.value + right.value + tail.value.re;
        Ok(2.0 * potential - 2.0 * b * alpha.acos() / (nf * (1.0 - alpha * alpha).sqrt()) - PI.ln() / nf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(n: usize) -> Arc<Equilibrium> {
        Equilibrium::new(FamilyParams::new(1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn mrs_numbers_b1_n100() {
        let e = eq(100);
        assert!((e.alpha() - (-0.989_999_854_361_772)).abs() < 1e-11, "{}", e.alpha());
        assert!((e.beta() - 1.009_942_115_882_78).abs() < 1e-11, "{}", e.beta());
        assert!(e.mrs.residuals[0].abs() < 1e-10 && e.mrs.residuals[1].abs() < 1e-10);
    }

    #[test]
    fn below_minimum_degree() {
        assert!(solve_mrs(&FamilyParams::new(1.0).unwrap(), 5).is_err());
    }

    #[test]
    fn g_jumps_and_phase() {
        let e = eq(50);
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let x = e.alpha() - 0.3;
        let d = e.g(&BoundaryPoint::upper(x)).unwrap() - e.g(&BoundaryPoint::lower(x)).unwrap();
        assert!((d - two_pi_i).norm() < 1e-8, "{d}");
        let x = e.beta() + 0.4;
        let d = e.g(&BoundaryPoint::upper(x)).unwrap() - e.g(&BoundaryPoint::lower(x)).unwrap();
        let expect = two_pi_i * gamma_real(1.0, x) / e.nf();
        assert!((d - expect).norm() < 1e-8, "{d} {expect}");
        for x in [-0.9, 0.0, 0.5, 0.99, 1.0 + 0.5 * (e.beta() - 1.0)] {
            assert!(e.phase_residual(x).unwrap() < 1e-8, "{x}");
        }
    }

    #[test]
    fn g_is_log_at_infinity() {
        let e = eq(50);
        let z = Complex64::new(1e3, 1e3);
        let g = e.g(&BoundaryPoint::off_axis(z)).unwrap();
        assert!((g - z.ln()).norm() < 1e-2);
    }

    #[test]
    fn big_g_jumps() {
        let e = eq(100);
        let b = 1.0;
        for x in [-0.5, 0.3, 1.0 + 0.4 * (e.beta() - 1.0)] {
            let s = e.big_g(&BoundaryPoint::upper(x)).unwrap() + e.big_g(&BoundaryPoint::lower(x)).unwrap();
            let expect = c(log_r_derivative_unchecked(b, x)) / Complex64::new(0.0, e.nf() * PI);
            assert!((s - expect).norm() < 1e-8, "{x} {s} {expect}");
        }
        let x = e.beta() + 0.5;
        let d = e.big_g(&BoundaryPoint::upper(x)).unwrap() - e.big_g(&BoundaryPoint::lower(x)).unwrap();
        assert!((d - c(2.0 / e.nf() * node_density(b, x))).norm() < 1e-8);
        assert_eq!(e.psi(x).unwrap(), node_density(b, x) / 100.0);
    }
}
