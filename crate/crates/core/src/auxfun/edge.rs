//! Airy conformal maps at the soft edges and the quarter-root edge factors.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::point::{BoundaryPoint, Side};
use super::{phi_alpha_at, phi_beta_at, sided, tau_alpha, tau_beta};
use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};

/// Below this |tau| the map is taken from the Cauchy-integral cache of
/// lambda/tau instead of from the cancelling direct evaluation.
pub const EDGE_SMALL_TAU: f64 = 0.03;

const CACHE_RADIUS: f64 = 0.12;
const CACHE_NODES: usize = 64;
const MAX_TAU: f64 = 0.95;

#[derive(Clone, Copy)]
enum Edge {
    Alpha,
    Beta,
}

fn scale(eq: &Equilibrium) -> f64 {
    1.5f64.powf(2.0 / 3.0) * eq.nf().cbrt()
}

/// The 2/3 power of w whose direction is nearest to `target` after rotation by `rot`.
fn pow23_toward(w: Complex64, rot: Complex64, target: Complex64) -> Complex64 {
    let m = w.norm().powf(2.0 / 3.0);
    let a = w.arg();
    let mut best = Complex64::new(0.0, 0.0);
    let mut dist = f64::INFINITY;
    for k in 0..3 {
        let c = rot * Complex64::from_polar(m, 2.0 * (a + 2.0 * PI * k as f64) / 3.0);
        let d = (c / target).arg().abs();
        if d < dist {
            dist = d;
            best = c;
        }
    }
    best
}

fn tau_of(eq: &Equilibrium, edge: Edge, z: Complex64) -> Complex64 {
    match edge {
        Edge::Alpha => tau_alpha(eq, z),
        Edge::Beta => tau_beta(eq, z),
    }
}

fn z_of(eq: &Equilibrium, edge: Edge, tau: Complex64) -> Complex64 {
    match edge {
        Edge::Alpha => eq.alpha() + (1.0 + eq.alpha()) * tau,
        Edge::Beta => eq.beta() + (eq.beta() - 1.0) * tau,
    }
}

/// Direct evaluation of lambda at a point with a side sign.
fn lambda_direct(eq: &Equilibrium, edge: Edge, z: Complex64, sg: f64) -> Result<Complex64> {
    let tau = tau_of(eq, edge, z);
    let c = (2.0 * eq.b()).cbrt();
    Ok(match edge {
        Edge::Alpha => {
            let phi = phi_alpha_at(eq, z, sg)?;
            let rot = Complex64::from_polar(1.0, -4.0 * PI / 3.0);
            scale(eq) * pow23_toward(phi, rot, -c * tau)
        }
        Edge::Beta => {
            let phi = phi_beta_at(eq, z, sg)?;
            scale(eq) * pow23_toward(-phi, Complex64::new(1.0, 0.0), c * tau)
        }
    })
}

fn nodes() -> impl Iterator<Item = (usize, Complex64)> {
    (0..CACHE_NODES / 2).map(|j| {
        let th = 2.0 * PI * (j as f64 + 0.5) / CACHE_NODES as f64;
        (j, Complex64::from_polar(CACHE_RADIUS, th))
    })
}

fn cache_values(eq: &Equilibrium, edge: Edge) -> Result<&Vec<Complex64>> {
    let cell = match edge {
        Edge::Alpha => &eq.edge_cache.alpha,
        Edge::Beta => &eq.edge_cache.beta,
    };
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let mut vals = Vec::with_capacity(CACHE_NODES / 2);
    for (_, t) in nodes() {
        vals.push(lambda_direct(eq, edge, z_of(eq, edge, t), 1.0)? / t);
    }
    Ok(cell.get_or_init(|| vals))
}

fn q_cached(eq: &Equilibrium, edge: Edge, tau: Complex64) -> Result<Complex64> {
    let vals = cache_values(eq, edge)?;
    let mut acc = Complex64::new(0.0, 0.0);
    // q is real on the real axis, so the lower half of the circle is the conjugate.
    for (j, t) in nodes() {
        acc += vals[j] * t / (t - tau) + vals[j].conj() * t.conj() / (t.conj() - tau);
    }
    Ok(acc / CACHE_NODES as f64)
}

/// phi from the cached map near the edge, where the direct form cancels.
pub(crate) fn phi_near_edge(eq: &Equilibrium, alpha_edge: bool, z: Complex64) -> Result<Complex64> {
    let edge = if alpha_edge { Edge::Alpha } else { Edge::Beta };
    let tau = tau_of(eq, edge, z);
    let lam = q_cached(eq, edge, tau)? * tau;
    let c = (2.0 * eq.b()).sqrt() * 2.0 / (3.0 * eq.nf().sqrt());
    let (w, guide) = match edge {
        Edge::Alpha => {
            let mut a = tau.arg();
            if a < 0.0 {
                a += 2.0 * PI;
            }
            let t32 = Complex64::from_polar(tau.norm().powf(1.5), 1.5 * a);
            (lam * Complex64::from_polar(1.0, 4.0 * PI / 3.0) / scale(eq), Complex64::new(0.0, c) * t32)
        }
        Edge::Beta => (lam / scale(eq), -c * tau.powf(1.5)),
    };
    let root = w.powf(1.5);
    let root = match edge {
        Edge::Alpha => root,
        Edge::Beta => -root,
    };
    Ok(if (root - guide).norm() <= (root + guide).norm() { root } else { -root })
}

/// lambda/tau, analytic through the edge.
fn q_value(eq: &Equilibrium, edge: Edge, p: &BoundaryPoint) -> Result<Complex64> {
    let tau = tau_of(eq, edge, p.z);
    if tau.norm() > MAX_TAU {
        return Err(Error::Region(format!("|tau| = {} is outside the edge disc", tau.norm())));
    }
    if tau.norm() < EDGE_SMALL_TAU {
        return q_cached(eq, edge, tau);
    }
    let p = sided(p);
    if tau.norm() == 0.0 {
        return Err(Error::Domain("edge point".into()));
    }
    Ok(lambda_direct(eq, edge, p.eval_point(), p.sign())? / tau)
}

fn cut_check(eq: &Equilibrium, edge: Edge, p: &BoundaryPoint) -> Result<()> {
    let tau = tau_of(eq, edge, p.z);
    if tau.norm() >= EDGE_SMALL_TAU && p.side == Side::OffAxis {
        match edge {
            Edge::Alpha => p.require_side(eq.alpha(), f64::INFINITY, "lambda_alpha"),
            Edge::Beta => p.require_side(f64::NEG_INFINITY, eq.beta(), "lambda_beta"),
        }
    } else {
        Ok(())
    }
}

/// `e^(-4 pi i/3) (3/2)^(2/3) n^(1/3) phi_alpha^(2/3)`, the branch linear in tau_alpha.
pub fn lambda_alpha(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    cut_check(eq, Edge::Alpha, p)?;
    Ok(q_value(eq, Edge::Alpha, p)? * tau_alpha(eq, p.z))
}

/// `(3/2)^(2/3) n^(1/3) (-phi_beta)^(2/3)`, the branch linear in tau_beta.
pub fn lambda_beta(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    cut_check(eq, Edge::Beta, p)?;
    Ok(q_value(eq, Edge::Beta, p)? * tau_beta(eq, p.z))
}

/// `lambda_alpha^(1/4) varrho`, continued analytically through alpha
/// (positive on the left of alpha).
pub fn edge_quarter_alpha(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    cut_check(eq, Edge::Alpha, p)?;
    let q = q_value(eq, Edge::Alpha, p)?;
    Ok((q * (p.z - eq.beta()) / (1.0 + eq.alpha())).powf(0.25))
}

/// `lambda_beta^(1/4) / varrho`, continued analytically through beta.
pub fn edge_quarter_beta(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    cut_check(eq, Edge::Beta, p)?;
    let q = q_value(eq, Edge::Beta, p)?;
    Ok((q * (p.z - eq.alpha()) / (eq.beta() - 1.0)).powf(0.25))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FamilyParams;
    use std::sync::Arc;

    fn eq(n: usize) -> Arc<Equilibrium> {
        Equilibrium::new(FamilyParams::new(1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn maps_vanish_and_linearize() {
        let e = eq(400);
        let c = 2f64.cbrt();
        assert!(lambda_alpha(&e, &BoundaryPoint::upper(e.alpha())).unwrap().norm() < 1e-14);
        assert!(lambda_beta(&e, &BoundaryPoint::upper(e.beta())).unwrap().norm() < 1e-14);
        for t in [Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.1), Complex64::new(-0.07, -0.07)] {
            let za = BoundaryPoint::snapped(z_of(&e, Edge::Alpha, t));
            let la = lambda_alpha(&e, &za).unwrap();
            assert!((la / (-c * t) - 1.0).norm() < 0.1, "{t} {la}");
            let zb = BoundaryPoint::snapped(z_of(&e, Edge::Beta, t));
            let lb = lambda_beta(&e, &zb).unwrap();
            assert!((lb / (c * t) - 1.0).norm() < 0.1, "{t} {lb}");
        }
    }

    #[test]
    fn cache_matches_direct_evaluation() {
        let e = eq(100);
        for edge in [Edge::Alpha, Edge::Beta] {
            for t in [Complex64::new(0.05, 0.001), Complex64::new(-0.03, 0.04)] {
                let z = z_of(&e, edge, t);
                let direct = lambda_direct(&e, edge, z, 1.0).unwrap() / t;
                let cached = q_cached(&e, edge, t).unwrap();
                assert!((direct / cached - 1.0).norm() < 1e-7, "{direct} {cached}");
            }
        }
    }

    #[test]
    fn maps_continuous_across_cut_near_edge() {
        let e = eq(100);
        let x = e.alpha() + 0.2 * (1.0 + e.alpha());
        let up = lambda_alpha(&e, &BoundaryPoint::upper(x)).unwrap();
        let lo = lambda_alpha(&e, &BoundaryPoint::lower(x)).unwrap();
        assert!((up - lo).norm() < 1e-8 * up.norm(), "{up} {lo}");
        assert!(up.im.abs() < 1e-8 * up.norm() && up.re < 0.0);
        let x = e.beta() - 0.2 * (e.beta() - 1.0);
        let up = lambda_beta(&e, &BoundaryPoint::upper(x)).unwrap();
        let lo = lambda_beta(&e, &BoundaryPoint::lower(x)).unwrap();
        assert!((up - lo).norm() < 1e-8 * up.norm(), "{up} {lo}");
    }

    #[test]
    fn quarter_factors_positive_on_axis_outside() {
        let e = eq(100);
        let x = e.alpha() - 0.1 * (1.0 + e.alpha());
        let v = edge_quarter_alpha(&e, &BoundaryPoint::off_axis(Complex64::new(x, 0.0))).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-10);
        let x = e.beta() + 0.1 * (e.beta() - 1.0);
        let v = edge_quarter_beta(&e, &BoundaryPoint::off_axis(Complex64::new(x, 0.0))).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-10);
    }
}
