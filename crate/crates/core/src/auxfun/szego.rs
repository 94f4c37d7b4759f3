//! Szego function of the outer parametrix.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::point::BoundaryPoint;
use super::{ln_phi0_at, sided};
use crate::equilibrium::{weighted_integral, Equilibrium, Kernel, Segment};
use crate::error::{Error, Result};

fn gap_integral(eq: &Equilibrium, kernel: Kernel) -> Result<Complex64> {
    let b = eq.b();
    let failure = RefCell::new(None);
    let f = |x: f64| match ln_phi0_at(b, Complex64::new(x, 1e-150), 1.0) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let seg = Segment::Gap { alpha: eq.alpha(), beta: eq.beta() };
    let w = weighted_integral(seg, f, kernel, eq.grid.settings);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !w.converged {
        return Err(Error::Quadrature("Szego integral did not converge".into()));
    }
    Ok(w.value)
}

/// `ln D(z)`; boundary values on [-1, beta] need a side.
pub fn ln_szego_d(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    p.require_side(-1.0, eq.beta(), "D")?;
    let p = sided(p);
    let z = p.eval_point();
    let c = gap_integral(eq, Kernel::Cauchy(z))?;
    Ok(-eq.big_r(z) * c / Complex64::new(0.0, 2.0 * PI))
}

pub fn szego_d(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    Ok(ln_szego_d(eq, p)?.exp())
}

/// `ln D(inf)`.
pub fn ln_szego_d_infinity(eq: &Equilibrium) -> Result<Complex64> {
    Ok(gap_integral(eq, Kernel::One)? / Complex64::new(0.0, 2.0 * PI))
}

/// Closed-form approximation `(sqrt2/2)(1-1/(6b)) sqrt(z-beta)(sqrt(z+1)-sqrt(z-alpha))`.
pub fn ln_szego_d_approx(eq: &Equilibrium, z: Complex64) -> Complex64 {
    let k = std::f64::consts::FRAC_1_SQRT_2 * (1.0 - 1.0 / (6.0 * eq.b()));
    k * (z - eq.beta()).sqrt() * ((z + 1.0).sqrt() - (z - eq.alpha()).sqrt())
}

pub fn szego_d_approx(eq: &Equilibrium, z: Complex64) -> Complex64 {
    ln_szego_d_approx(eq, z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxfun::phi0;
    use crate::oracle::FamilyParams;

    #[test]
    fn jumps() {
        let params = FamilyParams::new(1.0).unwrap();
        let eq = Equilibrium::new(params, 100).unwrap();
        let x = 0.5 * (eq.alpha() + eq.beta());
        let up = szego_d(&eq, &BoundaryPoint::upper(x)).unwrap();
        let lo = szego_d(&eq, &BoundaryPoint::lower(x)).unwrap();
        assert!((up * lo - 1.0).norm() < 1e-8, "{up} {lo}");
        let x = 0.5 * (eq.alpha() - 1.0);
        let up = szego_d(&eq, &BoundaryPoint::upper(x)).unwrap();
        let lo = szego_d(&eq, &BoundaryPoint::lower(x)).unwrap();
        let p0 = phi0(&params, &BoundaryPoint::upper(x)).unwrap();
        assert!((up / lo - p0).norm() < 1e-8, "{up} {lo} {p0}");
    }

    #[test]
    fn value_at_infinity() {
        let params = FamilyParams::new(1.0).unwrap();
        let eq = Equilibrium::new(params, 100).unwrap();
        let d = ln_szego_d_infinity(&eq).unwrap();
        assert!(d.im.abs() < 1e-12 && d.re.abs() < 0.05, "{d}");
        let far = ln_szego_d(&eq, &BoundaryPoint::off_axis(Complex64::new(0.0, 1e6))).unwrap();
        assert!((far - d).norm() < 1e-5);
    }
}
