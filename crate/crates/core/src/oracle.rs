//! Exact evaluation of the polynomials through the three-term recurrence
//! in MPFR arithmetic, certified by agreement of two precisions.

use num_complex::Complex64;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

/// Parameter `b` of the family plus the arithmetic policy of the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub b: f64,
    pub precision_bits: u32,
    pub tol: f64,
}

impl FamilyParams {
    pub const DEFAULT_PRECISION: u32 = 256;
    pub const PRECISION_CAP: u32 = 8192;

    pub fn new(b: f64) -> Result<Self> {
        Self::with_precision(b, Self::DEFAULT_PRECISION)
    }

    pub fn with_precision(b: f64, precision_bits: u32) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("b must be positive and finite, got {b}")));
        }
        if precision_bits < 64 {
            return Err(Error::InvalidParameter(format!("precision must be at least 64 bits, got {precision_bits}")));
        }
        Ok(FamilyParams { b, precision_bits, tol: 1e-20 })
    }
}

/// A complex number stored as `mant * 2^exp2`, wide enough for values far
/// outside the f64 range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    pub mant: Complex64,
    pub exp2: i64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex { mant: Complex64 { re: 0.0, im: 0.0 }, exp2: 0 };

    pub fn new(mant: Complex64, exp2: i64) -> Self {
        let m = mant.re.abs().max(mant.im.abs());
        if m == 0.0 || !m.is_finite() {
            return ScaledComplex { mant, exp2: if m == 0.0 { 0 } else { exp2 } };
        }
        let e = m.log2().floor() as i64 + 1;
        let scale = (-e as f64).exp2();
        ScaledComplex { mant: mant * scale, exp2: exp2 + e }
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    /// `exp(l)` without overflow.
    pub fn from_ln(l: Complex64) -> Self {
        if l.re == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let e = (l.re / LN2).floor();
        let mant = Complex64::from_polar((l.re - e * LN2).exp(), l.im);
        Self::new(mant, e as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mant.re.is_finite() && self.mant.im.is_finite()
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Complex64 {
        self.mant.ln() + Complex64::new(self.exp2 as f64 * LN2, 0.0)
    }

    pub fn ln_abs(&self) -> f64 {
        self.mant.norm().ln() + self.exp2 as f64 * LN2
    }

    pub fn arg(&self) -> f64 {
        self.mant.arg()
    }

    /// Plain f64 value; overflows to infinity or underflows to zero when out of range.
    pub fn to_c64(&self) -> Complex64 {
        let e = self.exp2.clamp(-2200, 2200) as i32;
        let half = e / 2;
        self.mant * 2f64.powi(half) * 2f64.powi(e - half)
    }

    pub fn in_f64_range(&self) -> bool {
        self.is_zero() || (self.exp2 > -1000 && self.exp2 < 1000)
    }

    pub fn conj(&self) -> Self {
        ScaledComplex { mant: self.mant.conj(), exp2: self.exp2 }
    }

    pub fn mul(&self, other: &ScaledComplex) -> Self {
        Self::new(self.mant * other.mant, self.exp2 + other.exp2)
    }

    pub fn div(&self, other: &ScaledComplex) -> Self {
        Self::new(self.mant / other.mant, self.exp2 - other.exp2)
    }

    pub fn neg(&self) -> Self {
        ScaledComplex { mant: -self.mant, exp2: self.exp2 }
    }

    pub fn add(&self, other: &ScaledComplex) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.exp2 >= other.exp2 { (self, other) } else { (other, self) };
        let shift = (small.exp2 - big.exp2).max(-1100) as i32;
        Self::new(big.mant + small.mant * 2f64.powi(shift), big.exp2)
    }

    pub fn sub(&self, other: &ScaledComplex) -> Self {
        self.add(&other.neg())
    }

    pub fn scale_c64(&self, c: Complex64) -> Self {
        Self::new(self.mant * c, self.exp2)
    }

    /// `|self - other| / |other|`.
    pub fn rel_diff(&self, other: &ScaledComplex) -> f64 {
        if other.is_zero() {
            return if self.is_zero() { 0.0 } else { f64::INFINITY };
        }
        let shift = (self.exp2 - other.exp2).clamp(-3000, 3000) as i32;
        let a = self.mant * 2f64.powi(shift / 2) * 2f64.powi(shift - shift / 2);
        (a - other.mant).norm() / other.mant.norm()
    }

    /// `|ln self - ln other| / |ln other|` with the difference taken on the
    /// principal branch of `ln(self/other)`.
    pub fn log_rel_diff(&self, other: &ScaledComplex) -> f64 {
        let d = (self.mant / other.mant).ln() + Complex64::new((self.exp2 - other.exp2) as f64 * LN2, 0.0);
        d.norm() / other.ln().norm()
    }
}

/// All values p_0(z) .. p_n(z) of one recurrence run.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySequenceValue {
    pub z: Complex64,
    pub n: usize,
    pub values: Vec<ScaledComplex>,
    pub precision_bits: u32,
}

impl PolySequenceValue {
    pub fn last(&self) -> ScaledComplex {
        self.values[self.n]
    }
}

/// A certified value of p_n(z).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: ScaledComplex,
    pub precision_bits: u32,
}

#[derive(Clone, Debug)]
struct MpComplex {
    re: Float,
    im: Float,
}

impl MpComplex {
    fn from_c64(prec: u32, z: Complex64) -> Self {
        MpComplex { re: Float::with_val(prec, z.re), im: Float::with_val(prec, z.im) }
    }

    fn to_scaled(&self) -> ScaledComplex {
        if self.re.is_zero() && self.im.is_zero() {
            return ScaledComplex::ZERO;
        }
        let (mr, er) = if self.re.is_zero() { (0.0, i32::MIN) } else { self.re.to_f64_exp() };
        let (mi, ei) = if self.im.is_zero() { (0.0, i32::MIN) } else { self.im.to_f64_exp() };
        let e = er.max(ei);
        let sh = |m: f64, ex: i32| if ex == i32::MIN { 0.0 } else { m * 2f64.powi((ex - e).max(-1100)) };
        ScaledComplex::new(Complex64::new(sh(mr, er), sh(mi, ei)), e as i64)
    }

    /// log2 of the larger component magnitude, or None for zero.
    fn log2_mag(&self) -> Option<f64> {
        let f = |x: &Float| if x.is_zero() { None } else { let (m, e) = x.to_f64_exp(); Some(m.abs().log2() + e as f64) };
        match (f(&self.re), f(&self.im)) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(f64::NEG_INFINITY).max(b.unwrap_or(f64::NEG_INFINITY))),
        }
    }
}

/// One uncertified run of the recurrence with a signed parameter `b`.
fn run(b: f64, n: usize, z: Complex64, prec: u32) -> Vec<MpComplex> {
    let two_zr = Float::with_val(prec, z.re) * 2u32;
    let two_zi = Float::with_val(prec, z.im) * 2u32;
    let two_b = Float::with_val(prec, b) * 2u32;
    let mut out = Vec::with_capacity(n + 1);
    out.push(MpComplex::from_c64(prec, Complex64::new(1.0, 0.0)));
    if n == 0 {
        return out;
    }
    out.push(MpComplex { re: Float::with_val(prec, &two_zr - &two_b), im: two_zi.clone() });
    for k in 1..n {
        let c = Float::with_val(prec, &two_b / (k as u32 + 1));
        let ar = Float::with_val(prec, &two_zr - &c);
        let (pk, pkm1) = (&out[k], &out[k - 1]);
        // (ar + i*two_zi) * pk - pkm1
        let re = Float::with_val(prec, &ar * &pk.re) - Float::with_val(prec, &two_zi * &pk.im) - &pkm1.re;
        let im = Float::with_val(prec, &ar * &pk.im) + Float::with_val(prec, &two_zi * &pk.re) - &pkm1.im;
        out.push(MpComplex { re, im });
    }
    out
}

/// True when `lo` and `hi` agree to `tol` relative to their size, or to the
/// cancellation floor `2^(-prec/2)` relative to the running magnitude `scale_log2`.
fn agree(lo: &MpComplex, hi: &MpComplex, prec_hi: u32, tol: f64, floor_log2: f64) -> bool {
    let dre = Float::with_val(prec_hi, &hi.re - &lo.re);
    let dim = Float::with_val(prec_hi, &hi.im - &lo.im);
    let d = MpComplex { re: dre, im: dim };
    let dl = match d.log2_mag() {
        None => return true,
        Some(v) => v,
    };
    let ml = hi.log2_mag().unwrap_or(f64::NEG_INFINITY);
    dl <= ml + tol.log2() || dl <= floor_log2
}

fn certified(b: f64, n: usize, z: Complex64, params: &FamilyParams) -> Result<(Vec<MpComplex>, u32)> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("z must be finite, got {z}")));
    }
    let mut prec = params.precision_bits;
    let mut lo = run(b, n, z, prec);
    loop {
        let hi_prec = prec * 2;
        if hi_prec > FamilyParams::PRECISION_CAP {
            let hi = run(b, n, z, FamilyParams::PRECISION_CAP);
            return Err(Error::PrecisionCap {
                cap: FamilyParams::PRECISION_CAP,
                low: format!("{:?}", lo[n].to_scaled()),
                high: format!("{:?}", hi[n].to_scaled()),
            });
        }
        let hi = run(b, n, z, hi_prec);
        let mut ok = true;
        let mut scale = f64::NEG_INFINITY;
        for k in 0..=n {
            if let Some(m) = hi[k].log2_mag() {
                scale = scale.max(m);
            }
            if !agree(&lo[k], &hi[k], hi_prec, params.tol, scale - prec as f64 / 2.0) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok((hi, hi_prec));
        }
        prec = hi_prec;
        lo = hi;
    }
}

/// p_0(z) .. p_n(z), certified by two-precision agreement.
pub fn eval_recurrence(params: &FamilyParams, n: usize, z: Complex64) -> Result<PolySequenceValue> {
    let (vals, prec) = certified(params.b, n, z, params)?;
    Ok(PolySequenceValue { z, n, values: vals.iter().map(MpComplex::to_scaled).collect(), precision_bits: prec })
}

/// Certified p_n(z).
pub fn eval_pn(params: &FamilyParams, n: usize, z: Complex64) -> Result<OracleValue> {
    let (vals, prec) = certified(params.b, n, z, params)?;
    Ok(OracleValue { value: vals[n].to_scaled(), precision_bits: prec })
}

/// Leading coefficient 2^n of p_n.
pub fn leading_coefficient(n: usize) -> Integer {
    Integer::from(1) << n as u32
}

/// Monic value p_n(z) / 2^n.
pub fn monic_value(params: &FamilyParams, n: usize, z: Complex64) -> Result<ScaledComplex> {
    let v = eval_pn(params, n, z)?.value;
    Ok(ScaledComplex::new(v.mant, v.exp2 - n as i64))
}

/// Leading coefficient recovered from the n-th forward difference of p_n on
/// the integer points 0..=n, rounded to the nearest integer.
pub fn leading_coefficient_by_differences(params: &FamilyParams, n: usize) -> Integer {
    let prec = params.precision_bits.max(128) + 16 * n as u32;
    let mut acc = Float::with_val(prec, 0);
    let mut binom = Integer::from(1);
    for j in 0..=n {
        let p = run(params.b, n, Complex64::new(j as f64, 0.0), prec);
        let term = Float::with_val(prec, &p[n].re * &binom);
        if (n - j).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
        binom = binom * (n - j) as u32 / (j + 1) as u32;
    }
    let mut fact = Integer::from(1);
    for k in 2..=n as u32 {
        fact *= k;
    }
    let q = acc / Float::with_val(prec, &fact);
    q.to_integer().unwrap_or_default()
}

/// `|p_n(z; -b) - (-1)^n p_n(-z; b)|`, computed at `params.precision_bits`.
pub fn check_symmetry(params: &FamilyParams, n: usize, z: Complex64) -> f64 {
    let prec = params.precision_bits;
    let a = run(-params.b, n, z, prec);
    let b = run(params.b, n, -z, prec);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let re = Float::with_val(prec, &a[n].re - Float::with_val(prec, &b[n].re * sign));
    let im = Float::with_val(prec, &a[n].im - Float::with_val(prec, &b[n].im * sign));
    MpComplex { re, im }.to_scaled().to_c64().norm()
}

fn sign_at(params: &FamilyParams, n: usize, x: f64) -> Result<i8> {
    let v = eval_pn(params, n, Complex64::new(x, 0.0))?.value;
    Ok(if v.mant.re > 0.0 {
        1
    } else if v.mant.re < 0.0 {
        -1
    } else {
        0
    })
}

fn scan(params: &FamilyParams, n: usize, a: f64, b: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    let mut brackets = Vec::new();
    let mut xp = a;
    let mut sp = sign_at(params, n, a)?;
    for i in 1..=points {
        let x = a + (b - a) * i as f64 / points as f64;
        let s = sign_at(params, n, x)?;
        if s == 0 {
            brackets.push((x, x));
        } else if sp != 0 && s != sp {
            brackets.push((xp, x));
        }
        xp = x;
        sp = s;
    }
    Ok(brackets)
}

/// Sign-change zeros of p_n on `[a, b]`, located by bisection to `tol`.
/// The scan uses `grid_points` cells and is repeated on a doubled grid; a
/// different count on the refined grid is reported as an error.
pub fn real_zeros_in(params: &FamilyParams, n: usize, interval: (f64, f64), grid_points: usize, tol: f64) -> Result<Vec<f64>> {
    let (a, b) = interval;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    let coarse = scan(params, n, a, b, grid_points.max(1))?;
    let fine = scan(params, n, a, b, 2 * grid_points.max(1))?;
    if coarse.len() != fine.len() {
        return Err(Error::GridTooCoarse(format!(
            "{} sign changes on {} cells but {} on {}",
            coarse.len(),
            grid_points,
            fine.len(),
            2 * grid_points
        )));
    }
    let mut zeros = Vec::with_capacity(fine.len());
    for (mut lo, mut hi) in fine {
        if lo == hi {
            zeros.push(lo);
            continue;
        }
        let slo = sign_at(params, n, lo)?;
        while hi - lo > tol * (1.0 + lo.abs()) {
            let mid = 0.5 * (lo + hi);
            let s = sign_at(params, n, mid)?;
            if s == 0 {
                lo = mid;
                hi = mid;
                break;
            }
            if s == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        zeros.push(0.5 * (lo + hi));
    }
    Ok(zeros)
}

/// Plain f64 recurrence for p_0..p_n at a real point; used where the
/// degree is small enough that no cancellation control is needed.
pub fn recurrence_f64(b: f64, n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(2.0 * x - 2.0 * b);
    for k in 1..n {
        let next = (2.0 * x - 2.0 * b / (k as f64 + 1.0)) * out[k] - out[k - 1];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> FamilyParams {
        FamilyParams::new(1.0).unwrap()
    }

    #[test]
    fn initial_values() {
        let v = eval_pn(&p1(), 0, Complex64::new(0.37, 2.0)).unwrap().value;
        assert_eq!(v.to_c64(), Complex64::new(1.0, 0.0));
        let v = eval_pn(&p1(), 1, Complex64::new(1.0, 0.0)).unwrap().value;
        assert!(v.is_zero());
    }

    #[test]
    fn second_degree_by_hand() {
        let v = eval_pn(&p1(), 2, Complex64::new(1.0, 0.0)).unwrap().value;
        assert_eq!(v.to_c64(), Complex64::new(-1.0, 0.0));
        // p_2 = 4z^2 - 6bz + 2b^2 - 1 at a complex point.
        let z = Complex64::new(0.3, -0.7);
        let b = 1.0;
        let expect = z * z * 4.0 - z * 6.0 * b + 2.0 * b * b - 1.0;
        let got = eval_pn(&p1(), 2, z).unwrap().value.to_c64();
        assert!((got - expect).norm() < 1e-15);
    }

    #[test]
    fn leading_coefficients() {
        assert_eq!(leading_coefficient(0), 1);
        assert_eq!(leading_coefficient(5), 32);
        assert_eq!(leading_coefficient(10), 1024);
        assert_eq!(leading_coefficient_by_differences(&p1(), 5), 32);
    }

    #[test]
    fn symmetry_examples() {
        let p = FamilyParams::with_precision(1.0, 128).unwrap();
        assert!(check_symmetry(&p, 3, Complex64::new(0.5, 0.0)) <= 2f64.powi(-40));
        let p = FamilyParams::with_precision(2.0, 128).unwrap();
        assert_eq!(check_symmetry(&p, 1, Complex64::new(0.0, 1.0)), 0.0);
        let p = FamilyParams::with_precision(0.5, 128).unwrap();
        assert!(check_symmetry(&p, 20, Complex64::new(1.3, 0.0)) <= 2f64.powi(-40));
    }

    #[test]
    fn zeros_small_degree() {
        let z = real_zeros_in(&p1(), 1, (-2.0, 2.0), 100, 1e-14).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - 1.0).abs() < 1e-12);
        let z = real_zeros_in(&p1(), 2, (-2.0, 2.0), 100, 1e-14).unwrap();
        let s5 = 5f64.sqrt();
        assert!((z[0] - (3.0 - s5) / 4.0).abs() < 1e-12);
        assert!((z[1] - (3.0 + s5) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_roundtrip() {
        let l = Complex64::new(5000.0, 1.0);
        let s = ScaledComplex::from_ln(l);
        assert!((s.ln() - l).norm() < 1e-10);
        let z = Complex64::new(-3.5, 0.25);
        assert!((ScaledComplex::from_c64(z).to_c64() - z).norm() < 1e-15);
    }

    #[test]
    fn huge_values_stay_finite() {
        let v = eval_pn(&p1(), 2000, Complex64::new(1000.0, 0.0)).unwrap().value;
        assert!(v.is_finite());
        // |p_n| ~ (2x)^n up to a modest factor.
        let expect = 2000.0 * (2000f64).ln();
        assert!((v.ln_abs() - expect).abs() < 5.0);
    }
}
