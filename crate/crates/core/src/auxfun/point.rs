use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from the real axis below which a point counts as lying on it.
pub const AXIS_MARGIN: f64 = 1e-10;

/// Offset used to realize a boundary value; far below any quantity of interest
/// but large enough to fix the sign of every imaginary part downstream.
const SIDE_OFFSET: f64 = 1e-150;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Upper,
    Lower,
    OffAxis,
}

/// A complex point together with the side from which boundary values on a
/// real cut are taken.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub z: Complex64,
    pub side: Side,
}

impl BoundaryPoint {
    /// A point off the real axis, or on it away from every cut involved.
    pub fn off_axis(z: Complex64) -> Self {
        BoundaryPoint { z, side: Side::OffAxis }
    }

    pub fn upper(x: f64) -> Self {
        BoundaryPoint { z: Complex64::new(x, 0.0), side: Side::Upper }
    }

    pub fn lower(x: f64) -> Self {
        BoundaryPoint { z: Complex64::new(x, 0.0), side: Side::Lower }
    }

    /// Points within the axis margin are moved onto the axis and given the
    /// side of their imaginary part (upper for exactly real input).
    pub fn snapped(z: Complex64) -> Self {
        if z.im.abs() <= AXIS_MARGIN * z.norm().max(1.0) {
            let side = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { Side::Lower } else { Side::Upper };
            BoundaryPoint { z: Complex64::new(z.re, 0.0), side }
        } else {
            Self::off_axis(z)
        }
    }

    pub fn x(&self) -> f64 {
        self.z.re
    }

    /// +1 for the upper side or upper half-plane, -1 for the lower.
    pub fn sign(&self) -> f64 {
        match self.side {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
            Side::OffAxis => {
                if self.z.im < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn on_axis(&self) -> bool {
        self.side != Side::OffAxis
    }

    /// The point itself, nudged off the axis toward its side.
    pub fn eval_point(&self) -> Complex64 {
        match self.side {
            Side::OffAxis => self.z,
            _ => Complex64::new(self.z.re, self.sign() * SIDE_OFFSET * self.z.re.abs().max(1.0)),
        }
    }

    pub fn conj(&self) -> Self {
        let side = match self.side {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
            Side::OffAxis => Side::OffAxis,
        };
        BoundaryPoint { z: self.z.conj(), side }
    }

    /// Errors when an untagged point sits within the margin of the real cut `[a, b]`.
    pub fn require_side(&self, a: f64, b: f64, what: &str) -> Result<()> {
        if self.side == Side::OffAxis
            && self.z.im.abs() <= AXIS_MARGIN * self.z.norm().max(1.0)
            && self.z.re >= a
            && self.z.re <= b
        {
            return Err(Error::BranchSide(format!("{what} at {} needs an upper or lower side", self.z)));
        }
        Ok(())
    }
}

/// `sqrt(z-1) sqrt(z+1)`, analytic off `[-1, 1]` and ~ z at infinity.
pub fn sq_out(z: Complex64) -> Complex64 {
    (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

/// `sqrt(1-z) sqrt(1+z)`, analytic off `(-inf,-1] U [1,inf)`.
pub fn sq_in(z: Complex64) -> Complex64 {
    (1.0 - z).sqrt() * (1.0 + z).sqrt()
}

/// `z + sqrt(z^2-1)`, the exterior map of `[-1, 1]`.
pub fn joukowski_inv(z: Complex64) -> Complex64 {
    z + sq_out(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping() {
        let p = BoundaryPoint::snapped(Complex64::new(0.3, 1e-13));
        assert_eq!(p.side, Side::Upper);
        assert_eq!(p.z.im, 0.0);
        let p = BoundaryPoint::snapped(Complex64::new(0.3, -1e-13));
        assert_eq!(p.side, Side::Lower);
        let p = BoundaryPoint::snapped(Complex64::new(0.3, 1e-3));
        assert_eq!(p.side, Side::OffAxis);
    }

    #[test]
    fn side_values_of_sqrt() {
        let up = sq_out(BoundaryPoint::upper(0.6).eval_point());
        let lo = sq_out(BoundaryPoint::lower(0.6).eval_point());
        assert!((up - Complex64::new(0.0, 0.8)).norm() < 1e-15);
        assert!((lo - Complex64::new(0.0, -0.8)).norm() < 1e-15);
    }

    #[test]
    fn untagged_on_cut_is_rejected() {
        let p = BoundaryPoint::off_axis(Complex64::new(0.5, 0.0));
        assert!(p.require_side(-1.0, 1.0, "test").is_err());
        assert!(BoundaryPoint::upper(0.5).require_side(-1.0, 1.0, "test").is_ok());
    }
}
