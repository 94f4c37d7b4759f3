//! Complex Airy functions and the Airy model matrices of the edge parametrices.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::ScaledComplex;

/// Below this modulus the Maclaurin series is summed in extended precision.
pub const SERIES_RADIUS: f64 = 8.0;
/// Largest argument modulus accepted.
pub const MAX_ARGUMENT: f64 = 1e3;

const SERIES_BITS: u32 = 192;

pub type Matrix2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn omega() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Ai, Bi and their derivatives at one argument, stored with wide exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryQuartet {
    pub s: Complex64,
    pub ai: ScaledComplex,
    pub bi: ScaledComplex,
    pub ai_prime: ScaledComplex,
    pub bi_prime: ScaledComplex,
}

impl AiryQuartet {
    /// `Ai Bi' - Ai' Bi`, equal to 1/pi.
    pub fn wronskian(&self) -> Complex64 {
        self.ai.mul(&self.bi_prime).sub(&self.ai_prime.mul(&self.bi)).to_c64()
    }

    pub fn values(&self) -> [Complex64; 4] {
        [self.ai.to_c64(), self.bi.to_c64(), self.ai_prime.to_c64(), self.bi_prime.to_c64()]
    }
}

struct Mp {
    re: Float,
    im: Float,
}

impl Mp {
    fn new(z: Complex64) -> Self {
        Mp { re: Float::with_val(SERIES_BITS, z.re), im: Float::with_val(SERIES_BITS, z.im) }
    }

    fn zero() -> Self {
        Self::new(c(0.0, 0.0))
    }

    fn mul(&self, o: &Mp) -> Mp {
        let re = Float::with_val(SERIES_BITS, &self.re * &o.re) - Float::with_val(SERIES_BITS, &self.im * &o.im);
        let im = Float::with_val(SERIES_BITS, &self.re * &o.im) + Float::with_val(SERIES_BITS, &self.im * &o.re);
        Mp { re, im }
    }

    fn scale(&self, k: &Float) -> Mp {
        Mp { re: Float::with_val(SERIES_BITS, &self.re * k), im: Float::with_val(SERIES_BITS, &self.im * k) }
    }

    fn add_assign(&mut self, o: &Mp) {
        self.re += &o.re;
        self.im += &o.im;
    }

    fn lin(&self, a: &Float, o: &Mp, b: &Float) -> Mp {
        let mut r = self.scale(a);
        r.add_assign(&o.scale(b));
        r
    }

    fn log2_mag(&self) -> f64 {
        let f = |x: &Float| if x.is_zero() { f64::NEG_INFINITY } else { let (m, e) = x.to_f64_exp(); m.abs().log2() + e as f64 };
        f(&self.re).max(f(&self.im))
    }

    fn to_scaled(&self) -> ScaledComplex {
        let parts = |x: &Float| if x.is_zero() { (0.0, i32::MIN) } else { x.to_f64_exp() };
        let (mr, er) = parts(&self.re);
        let (mi, ei) = parts(&self.im);
        let e = er.max(ei);
        if e == i32::MIN {
            return ScaledComplex::ZERO;
        }
        let sh = |m: f64, ex: i32| if ex == i32::MIN { 0.0 } else { m * 2f64.powi((ex - e).max(-1100)) };
        ScaledComplex::new(c(sh(mr, er), sh(mi, ei)), e as i64)
    }
}

/// `Ai(0)` and `-Ai'(0)` in extended precision.
fn origin_constants() -> &'static (Float, Float, Float) {
    static C: OnceLock<(Float, Float, Float)> = OnceLock::new();
    C.get_or_init(|| {
        let p = SERIES_BITS;
        let three = Float::with_val(p, 3);
        let g23 = Float::with_val(p, Float::with_val(p, 2) / 3u32).gamma();
        let g13 = Float::with_val(p, Float::with_val(p, 1) / 3u32).gamma();
        let c1 = Float::with_val(p, three.clone().pow(Float::with_val(p, -2) / 3u32)) / g23;
        let c2 = Float::with_val(p, three.clone().pow(Float::with_val(p, -1) / 3u32)) / g13;
        (c1, c2, three.sqrt())
    })
}

fn series(s: Complex64) -> AiryQuartet {
    let z = Mp::new(s);
    let z3 = z.mul(&z).mul(&z);
    // f = sum A_k s^{3k}, g = sum B_k s^{3k+1}; derivatives alongside.
    let (mut f, mut fp, mut g, mut gp) = (Mp::zero(), Mp::zero(), Mp::zero(), Mp::zero());
    let mut pow = Mp::new(c(1.0, 0.0));
    let mut a = Float::with_val(SERIES_BITS, 1);
    let mut b = Float::with_val(SERIES_BITS, 1);
    let mut peak = f64::NEG_INFINITY;
    let mut prev_pow = Mp::zero();
    for k in 0..400u32 {
        let kf = 3 * k;
        // s^{3k} times coefficients
        let tf = pow.scale(&a);
        let tg = pow.mul(&z).scale(&b);
        f.add_assign(&tf);
        g.add_assign(&tg);
        if k > 0 {
            let da = Float::with_val(SERIES_BITS, &a * kf);
            fp.add_assign(&prev_pow.mul(&z).mul(&z).scale(&da));
        }
        let db = Float::with_val(SERIES_BITS, &b * (kf + 1));
        gp.add_assign(&pow.scale(&db));
        let mag = tf.log2_mag().max(tg.log2_mag());
        peak = peak.max(mag);
        if k > 3 && mag < peak - SERIES_BITS as f64 - 8.0 {
            break;
        }
        a /= (kf + 3) * (kf + 2);
        b /= (kf + 4) * (kf + 3);
        prev_pow = pow;
        pow = prev_pow.mul(&z3);
    }
    let (c1, c2, sqrt3) = origin_constants();
    let neg_c2 = Float::with_val(SERIES_BITS, -c2);
    let ai = f.lin(c1, &g, &neg_c2);
    let aip = fp.lin(c1, &gp, &neg_c2);
    let k1 = Float::with_val(SERIES_BITS, c1 * sqrt3);
    let k2 = Float::with_val(SERIES_BITS, c2 * sqrt3);
    let bi = f.lin(&k1, &g, &k2);
    let bip = fp.lin(&k1, &gp, &k2);
    AiryQuartet { s, ai: ai.to_scaled(), bi: bi.to_scaled(), ai_prime: aip.to_scaled(), bi_prime: bip.to_scaled() }
}

/// Large-argument expansion of Ai and Ai', valid for |arg s| <= 2pi/3.
fn ai_expansion(s: Complex64) -> (ScaledComplex, ScaledComplex) {
    let zeta = 2.0 / 3.0 * s.powf(1.5);
    let mut su = c(1.0, 0.0);
    let mut sv = c(1.0, 0.0);
    let mut u = 1.0;
    let mut zpow = c(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zpow *= -zeta;
        let tu = u / zpow;
        let size = tu.norm();
        if size > last {
            break;
        }
        su += tu;
        sv += v / zpow;
        last = size;
        if size < 1e-17 {
            break;
        }
    }
    let base = -zeta - (2.0 * PI.sqrt()).ln();
    let q = s.ln() / 4.0;
    let ai = ScaledComplex::from_ln(base - q + su.ln());
    let aip = ScaledComplex::from_ln(base + q + sv.ln()).neg();
    (ai, aip)
}

fn ai_large(s: Complex64) -> (ScaledComplex, ScaledComplex) {
    if s.arg().abs() <= 2.0 * PI / 3.0 {
        return ai_expansion(s);
    }
    // Ai(s) = -w Ai(w s) - w^2 Ai(w^2 s), both rotated arguments inside the sector.
    let w = omega();
    let w2 = w * w;
    let (a1, d1) = ai_expansion(w * s);
    let (a2, d2) = ai_expansion(w2 * s);
    let ai = a1.scale_c64(-w).add(&a2.scale_c64(-w2));
    let aip = d1.scale_c64(-w2).add(&d2.scale_c64(-w));
    (ai, aip)
}

fn asymptotic(s: Complex64) -> AiryQuartet {
    let (ai, aip) = ai_large(s);
    // Bi(s) = +-i Ai(s) + 2 e^(-+ i pi/6) Ai(s e^(-+ 2 pi i/3)).
    let sg = if s.im >= 0.0 { 1.0 } else { -1.0 };
    let rot = Complex64::from_polar(1.0, -sg * 2.0 * PI / 3.0);
    let (ar, dr) = ai_large(rot * s);
    let i = c(0.0, sg);
    let bi = ai.scale_c64(i).add(&ar.scale_c64(Complex64::from_polar(2.0, -sg * PI / 6.0)));
    let bip = aip.scale_c64(i).add(&dr.scale_c64(Complex64::from_polar(2.0, -sg * 5.0 * PI / 6.0)));
    AiryQuartet { s, ai, bi, ai_prime: aip, bi_prime: bip }
}

/// Ai, Bi, Ai', Bi' at s.
pub fn airy_quartet(s: Complex64) -> Result<AiryQuartet> {
    if !(s.re.is_finite() && s.im.is_finite()) || s.norm() > MAX_ARGUMENT {
        return Err(Error::Domain(format!("Airy argument {s} outside |s| <= {MAX_ARGUMENT}")));
    }
    Ok(if s.norm() <= SERIES_RADIUS { series(s) } else { asymptotic(s) })
}

/// Ai and Ai' only.
pub fn airy_ai(s: Complex64) -> Result<(ScaledComplex, ScaledComplex)> {
    let q = airy_quartet(s)?;
    Ok((q.ai, q.ai_prime))
}

fn ai_pair(s: Complex64) -> Result<(Complex64, Complex64)> {
    let (a, d) = airy_ai(s)?;
    Ok((a.to_c64(), d.to_c64()))
}

/// Sectors of the left-edge model, bounded by the rays arg s = 0, +-2pi/3, pi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiSector {
    I,
    II,
    III,
    IV,
}

impl PsiSector {
    pub fn of(s: Complex64) -> PsiSector {
        let a = s.arg();
        if a >= 0.0 {
            if a < 2.0 * PI / 3.0 {
                PsiSector::I
            } else {
                PsiSector::II
            }
        } else if a < -2.0 * PI / 3.0 {
            PsiSector::III
        } else {
            PsiSector::IV
        }
    }
}

/// Quadrants of the right-edge model, numbered counterclockwise from arg s in (0, pi/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl Quadrant {
    pub fn of(s: Complex64) -> Quadrant {
        match (s.re >= 0.0, s.im >= 0.0) {
            (true, true) => Quadrant::Q1,
            (false, true) => Quadrant::Q2,
            (false, false) => Quadrant::Q3,
            (true, false) => Quadrant::Q4,
        }
    }
}

fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut r = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn det(a: &Matrix2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn real(m: [[f64; 2]; 2]) -> Matrix2 {
    [[c(m[0][0], 0.0), c(m[0][1], 0.0)], [c(m[1][0], 0.0), c(m[1][1], 0.0)]]
}

/// The left-edge model matrix, assembled for the given sector at any s.
pub fn psi_model(s: Complex64, sector: PsiSector) -> Result<Matrix2> {
    let w = omega();
    let w2 = w * w;
    let (a, ap) = ai_pair(s)?;
    let sig = [[Complex64::from_polar(1.0, -PI / 6.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, PI / 6.0)]];
    let base = match sector {
        PsiSector::I | PsiSector::II => {
            let (b, bp) = ai_pair(w2 * s)?;
            [[a, b], [ap, w2 * bp]]
        }
        PsiSector::III | PsiSector::IV => {
            let (b, bp) = ai_pair(w * s)?;
            [[a, -w2 * b], [ap, -bp]]
        }
    };
    let m = matmul(&base, &sig);
    Ok(match sector {
        PsiSector::II => matmul(&m, &real([[1.0, 0.0], [-1.0, 1.0]])),
        PsiSector::III => matmul(&m, &real([[1.0, 0.0], [1.0, 1.0]])),
        _ => m,
    })
}

/// The right-edge model matrix for the given quadrant at any s.
pub fn psi_beta_model(s: Complex64, quadrant: Quadrant) -> Result<Matrix2> {
    let w = omega();
    let w2 = w * w;
    let (a0, d0) = ai_pair(s)?;
    let (a1, d1) = ai_pair(w * s)?;
    let (a2, d2) = ai_pair(w2 * s)?;
    Ok(match quadrant {
        Quadrant::Q1 => [[w2 * a2, -a0], [w * d2, -d0]],
        Quadrant::Q2 => [[w2 * a2, w * a1], [w * d2, w2 * d1]],
        Quadrant::Q3 => [[w * a1, -w2 * a2], [w2 * d1, -w * d2]],
        Quadrant::Q4 => [[w * a1, a0], [w2 * d1, d0]],
    })
}

/// `|Ai(s) + w Ai(ws) + w^2 Ai(w^2 s)|` relative to its largest term, w = e^(2 pi i/3).
pub fn connection_residual(s: Complex64) -> Result<f64> {
    let w = omega();
    let parts = [ai_pair(s)?.0, w * ai_pair(w * s)?.0, w * w * ai_pair(w * w * s)?.0];
    let r = parts[0] + parts[1] + parts[2];
    let scale = parts.iter().map(|p| p.norm()).fold(1.0, f64::max);
    Ok(r.norm() / scale)
}

/// `|pi W(Ai, Bi)(s) - 1|` relative to the larger of 1 and the two products in W.
pub fn wronskian_residual(s: Complex64) -> Result<f64> {
    let q = airy_quartet(s)?;
    let scale = q.ai.mul(&q.bi_prime).to_c64().norm().max(q.ai_prime.mul(&q.bi).to_c64().norm()) * PI;
    Ok((q.wronskian() * PI - 1.0).norm() / scale.max(1.0))
}

/// A model contour: a ray from the origin, the sectors on its two sides and
/// the printed jump, with `plus = minus * jump`.
#[derive(Clone, Copy, Debug)]
pub struct ModelRay<S> {
    pub name: &'static str,
    pub angle: f64,
    pub minus: S,
    pub plus: S,
    pub jump: [[f64; 2]; 2],
}

pub fn psi_rays() -> [ModelRay<PsiSector>; 4] {
    use PsiSector::*;
    [
        ModelRay { name: "sigma1", angle: 2.0 * PI / 3.0, minus: I, plus: II, jump: [[1.0, 0.0], [-1.0, 1.0]] },
        ModelRay { name: "sigma2", angle: PI, minus: II, plus: III, jump: [[0.0, -1.0], [1.0, 0.0]] },
        ModelRay { name: "sigma3", angle: -2.0 * PI / 3.0, minus: IV, plus: III, jump: [[1.0, 0.0], [1.0, 1.0]] },
        ModelRay { name: "sigma4", angle: 0.0, minus: I, plus: IV, jump: [[1.0, -1.0], [0.0, 1.0]] },
    ]
}

pub fn psi_beta_rays() -> [ModelRay<Quadrant>; 4] {
    use Quadrant::*;
    [
        ModelRay { name: "negative real axis", angle: PI, minus: Q3, plus: Q2, jump: [[0.0, 1.0], [-1.0, 0.0]] },
        ModelRay { name: "positive real axis", angle: 0.0, minus: Q4, plus: Q1, jump: [[-1.0, 0.0], [-1.0, -1.0]] },
        ModelRay { name: "positive imaginary axis", angle: PI / 2.0, minus: Q1, plus: Q2, jump: [[1.0, -1.0], [0.0, 1.0]] },
        ModelRay { name: "negative imaginary axis", angle: -PI / 2.0, minus: Q4, plus: Q3, jump: [[1.0, 1.0], [0.0, 1.0]] },
    ]
}

/// Largest entry of `plus - minus * jump` on a ray at the given radius,
/// relative to the largest entry of `minus`.
pub fn jump_residual<S: Copy>(ray: &ModelRay<S>, radius: f64, model: impl Fn(Complex64, S) -> Result<Matrix2>) -> Result<f64> {
    let s = Complex64::from_polar(radius, ray.angle);
    let m = model(s, ray.minus)?;
    let p = model(s, ray.plus)?;
    let mj = matmul(&m, &real(ray.jump));
    let mut worst: f64 = 0.0;
    let mut size: f64 = 0.0;
    for i in 0..2 {
        for k in 0..2 {
            worst = worst.max((p[i][k] - mj[i][k]).norm());
            size = size.max(m[i][k].norm());
        }
    }
    Ok(worst / size)
}
