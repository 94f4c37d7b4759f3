//! Region classification and the six uniform asymptotic formulas for p_n.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airy::airy_quartet;
use crate::auxfun::{
    edge_quarter_alpha, edge_quarter_beta, f_r, f_s, joukowski_inv, lambda_alpha, lambda_beta, ln_phi0, ln_szego_d,
    ln_szego_d_approx, phi_alpha, phi_beta, sq_out, tau_alpha, tau_beta, varrho, BoundaryPoint, MAX_TAU,
};
use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::oracle::ScaledComplex;

/// Claimed relative error exponent of every region formula.
pub const CLAIMED_ORDER: f64 = -0.5;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionTag {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl RegionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::A => "A",
            RegionTag::B => "B",
            RegionTag::C => "C",
            RegionTag::D => "D",
            RegionTag::E => "E",
            RegionTag::F => "F",
        }
    }
}

impl std::fmt::Display for RegionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RegionTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "A" => RegionTag::A,
            "B" => RegionTag::B,
            "C" => RegionTag::C,
            "D" => RegionTag::D,
            "E" => RegionTag::E,
            "F" => RegionTag::F,
            other => return Err(Error::Parse(format!("unknown region {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub tag: RegionTag,
    pub r: f64,
}

/// Tunable region geometry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSettings {
    /// Edge disc radius in the scaled variables tau.
    pub r: f64,
    /// Half-height of the node strip of region E.
    pub eta_e: f64,
    /// Height of the short-band strip of region C in units of max(b/n, beta-1).
    pub c_c: f64,
    /// Distance from [alpha, 1] that still counts as region B.
    pub eta_b: f64,
    /// Right end of region E; None means 1.25 sqrt(1+b^2).
    pub m: Option<f64>,
}

impl Default for ClassifierSettings {
    fn default() -> Self {
        ClassifierSettings { r: 0.5, eta_e: 0.05, c_c: 1.0, eta_b: 0.3, m: None }
    }
}

impl ClassifierSettings {
    pub fn with_r(r: f64) -> Self {
        ClassifierSettings { r, ..Default::default() }
    }

    pub fn m_for(&self, b: f64) -> f64 {
        self.m.unwrap_or(1.25 * (1.0 + b * b).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        // Edge formulas are evaluated up to |tau| = r; keep clear of the series limit.
        let max_r = 0.99 * MAX_TAU;
        if !(self.r > 0.0 && self.r <= max_r) {
            return Err(Error::InvalidParameter(format!("r must lie in (0, {max_r}], got {}", self.r)));
        }
        if !(self.eta_e > 0.0 && self.c_c > 0.0 && self.eta_b > 0.0) {
            return Err(Error::InvalidParameter("classifier sizes must be positive".into()));
        }
        Ok(())
    }
}

/// Which Szego function enters the outer formulas.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SzegoMode {
    #[default]
    Exact,
    Approx,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticOptions {
    pub classifier: ClassifierSettings,
    pub szego: SzegoMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticValue {
    pub value: ScaledComplex,
    pub region: RegionLabel,
    pub order: f64,
    /// Size of the additive error term, reported by region E only.
    pub bound: Option<ScaledComplex>,
}

/// Region of a point; the lower half-plane is classified by reflection.
pub fn classify_region(eq: &Equilibrium, z: Complex64, settings: &ClassifierSettings) -> RegionLabel {
    let z = Complex64::new(z.re, z.im.abs());
    let (alpha, beta) = (eq.alpha(), eq.beta());
    let r = settings.r;
    let label = |tag| RegionLabel { tag, r };
    if tau_alpha(eq, z).norm() < r {
        return label(RegionTag::F);
    }
    if tau_beta(eq, z).norm() < r {
        return label(RegionTag::D);
    }
    if z.re > beta && z.re < settings.m_for(eq.b()) && z.im < settings.eta_e {
        return label(RegionTag::E);
    }
    let strip = settings.c_c * (eq.b() / eq.nf()).max(beta - 1.0);
    if z.re >= 1.0 && z.re <= beta && z.im < strip {
        return label(RegionTag::C);
    }
    let dx = if z.re < alpha { alpha - z.re } else if z.re > 1.0 { z.re - 1.0 } else { 0.0 };
    if z.re >= alpha && dx.hypot(z.im) < settings.eta_b {
        return label(RegionTag::B);
    }
    label(RegionTag::A)
}

fn exp_sc(l: Complex64) -> ScaledComplex {
    ScaledComplex::from_ln(l)
}

fn cos_sc(t: Complex64) -> ScaledComplex {
    exp_sc(I * t).add(&exp_sc(-I * t)).scale_c64(Complex64::new(0.5, 0.0))
}

fn sin_sc(t: Complex64) -> ScaledComplex {
    exp_sc(I * t).sub(&exp_sc(-I * t)).scale_c64(Complex64::new(0.0, -0.5))
}

/// Principal `(1 - e^w)^(1/2)` without overflow.
fn sqrt_one_minus_exp(w: Complex64) -> ScaledComplex {
    let l = if w.re > 30.0 {
        let mut l = w + ((-w).exp() - 1.0).ln();
        l.im -= 2.0 * PI * (l.im / (2.0 * PI)).round();
        l
    } else {
        (1.0 - w.exp()).ln()
    };
    exp_sc(l / 2.0)
}

fn sign_n(eq: &Equilibrium) -> f64 {
    if eq.n().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn point(z: Complex64) -> Result<BoundaryPoint> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("z must be finite, got {z}")));
    }
    if z.im < 0.0 {
        return Err(Error::Region("region formulas take Im z >= 0; use eval_auto for the lower half-plane".into()));
    }
    let p = BoundaryPoint::snapped(z);
    Ok(if p.on_axis() { BoundaryPoint::upper(p.z.re) } else { p })
}

fn gamma_of(eq: &Equilibrium, p: &BoundaryPoint) -> Result<Complex64> {
    let z = p.z;
    if (z - 1.0).norm() < 1e-12 || (z + 1.0).norm() < 1e-12 {
        return Err(Error::Domain("the formulas are singular at z = +-1".into()));
    }
    Ok(eq.b() / sq_out(p.eval_point()))
}

fn ln_szego(eq: &Equilibrium, p: &BoundaryPoint, mode: SzegoMode) -> Result<Complex64> {
    match mode {
        SzegoMode::Exact => ln_szego_d(eq, p),
        SzegoMode::Approx => Ok(ln_szego_d_approx(eq, p.eval_point())),
    }
}

fn value(v: ScaledComplex, tag: RegionTag, opts: &AsymptoticOptions, bound: Option<ScaledComplex>) -> AsymptoticValue {
    AsymptoticValue { value: v, region: RegionLabel { tag, r: opts.classifier.r }, order: CLAIMED_ORDER, bound }
}

/// `rho + 1/rho + rho f_s(tau_beta) - f_s(tau_alpha)/rho` and `phi^gamma / (2 sqrt(b pi))` in logs.
fn outer_parts(eq: &Equilibrium, p: &BoundaryPoint) -> Result<(Complex64, Complex64, Complex64)> {
    let z = p.eval_point();
    let g = gamma_of(eq, p)?;
    let rho = varrho(eq, p)?;
    let bracket = rho + 1.0 / rho + rho * f_s(eq.b(), tau_beta(eq, z))? - f_s(eq.b(), tau_alpha(eq, z))? / rho;
    let ln_pre = g * joukowski_inv(z).ln() - (2.0 * (eq.b() * PI).sqrt()).ln();
    Ok((bracket, ln_pre, g))
}

/// Outer region formula.
pub fn eval_region_a(eq: &Equilibrium, z: Complex64, opts: &AsymptoticOptions) -> Result<AsymptoticValue> {
    let p = point(z)?;
    let (bracket, ln_pre, g) = outer_parts(eq, &p)?;
    let nphi = phi_beta(eq, &p)?.scaled;
    let ln_d = ln_szego(eq, &p, opts.szego)?;
    let v = exp_sc(ln_pre - nphi + ln_d).mul(&sin_sc(PI * g)).scale_c64(bracket);
    Ok(value(v, RegionTag::A, opts, None))
}

/// Band formula on (alpha, 1).
pub fn eval_region_b(eq: &Equilibrium, z: Complex64, opts: &AsymptoticOptions) -> Result<AsymptoticValue> {
    let p = point(z)?;
    let zz = p.eval_point();
    let b = eq.b();
    let g = gamma_of(eq, &p)?;
    let rho = varrho(eq, &p)?;
    let nphi = phi_alpha(eq, &p)?.scaled;
    let l0 = ln_phi0(&eq.params, &p)?;
    let ln_d = ln_szego(eq, &p, opts.szego)?;
    let theta = I * nphi + I * l0 / 2.0 - I * ln_d + PI / 4.0;
    let pre = exp_sc(g * joukowski_inv(zz).ln() - (2.0 * (b * PI).sqrt()).ln()).mul(&sqrt_one_minus_exp(-2.0 * PI * I * g));
    let c1 = (1.0 + f_s(b, tau_beta(eq, zz))?) * rho * Complex64::from_polar(1.0, -PI / 4.0);
    let c2 = (1.0 - f_s(b, tau_alpha(eq, zz))?) / rho * Complex64::from_polar(1.0, PI / 4.0);
    let v = cos_sc(theta).scale_c64(c1).add(&sin_sc(theta).scale_c64(c2)).mul(&pre).scale_c64(Complex64::new(sign_n(eq), 0.0));
    Ok(value(v, RegionTag::B, opts, None))
}

/// Short-band formula on (1, beta).
pub fn eval_region_c(eq: &Equilibrium, z: Complex64, opts: &AsymptoticOptions) -> Result<AsymptoticValue> {
    let p = point(z)?;
    let zz = p.eval_point();
    let b = eq.b();
    let g = gamma_of(eq, &p)?;
    let rho = varrho(eq, &p)?;
    let nphi = phi_beta(eq, &p)?.scaled;
    let theta = I * nphi + PI * g - PI / 4.0;
    let c1 = (1.0 + f_s(b, tau_beta(eq, zz))?) * rho * Complex64::from_polar(1.0, -PI / 4.0);
    let c2 = Complex64::from_polar(1.0, PI / 4.0) / rho;
    let pre = b.exp() / (2.0 * (b * PI).sqrt());
    let v = cos_sc(theta).scale_c64(c1).add(&sin_sc(theta).scale_c64(c2)).scale_c64(Complex64::new(pre, 0.0));
    Ok(value(v, RegionTag::C, opts, None))
}

/// Airy formula at the right soft edge.
pub fn eval_region_d(eq: &Equilibrium, z: Complex64, opts: &AsymptoticOptions) -> Result<AsymptoticValue> {
    let p = point(z)?;
    let zz = p.eval_point();
    let b = eq.b();
    let nf = eq.nf();
    let g = gamma_of(eq, &p)?;
    let s = nf.cbrt() * lambda_beta(eq, &p)?;
    let q = airy_quartet(s)?;
    let (cg, sg) = (cos_sc(PI * g).neg(), sin_sc(PI * g));
    let a1 = cg.mul(&q.ai).add(&sg.mul(&q.bi));
    let a2 = cg.mul(&q.ai_prime).add(&sg.mul(&q.bi_prime));
    let e = edge_quarter_beta(eq, &p)?;
    let t1 = a1.scale_c64(nf.powf(1.0 / 12.0) * e);
    let t2 = a2.scale_c64(nf.powf(-1.0 / 12.0) / e * (1.0 - f_r(b, tau_beta(eq, zz))?));
    let v = t1.add(&t2).scale_c64(Complex64::new(b.exp() / (2.0 * b.sqrt()), 0.0));
    Ok(value(v, RegionTag::D, opts, None))
}

/// Node-strip formula on (beta, M), with the size of its additive error term.
pub fn eval_region_e(eq: &Equilibrium, z: Complex64, opts: &AsymptoticOptions) -> Result<AsymptoticValue> {
    let p = point(z)?;
    let (bracket, ln_pre, g) = outer_parts(eq, &p)?;
    let nphi = phi_beta(eq, &p)?.scaled;
    let main = exp_sc(ln_pre - nphi).mul(&sin_sc(PI * g)).scale_c64(bracket);
    let ln_bound = ln_pre.re + 0.25 * eq.nf().ln() + (nphi - I * PI * g).re;
    let bound = exp_sc(Complex64::new(ln_bound, 0.0));
    Ok(value(main, RegionTag::E, opts, Some(bound)))
}

/// Airy formula at the left soft edge.
pub fn eval_region_f(eq: &Equilibrium, z: Complex64, opts: &AsymptoticOptions) -> Result<AsymptoticValue> {
    let p = point(z)?;
    let zz = p.eval_point();
    let b = eq.b();
    let nf = eq.nf();
    let s = nf.cbrt() * lambda_alpha(eq, &p)?;
    let q = airy_quartet(s)?;
    let e = edge_quarter_alpha(eq, &p)?;
    let coef = 2.0 - 1.0 / (6.0 * b) + f_r(b, tau_alpha(eq, zz))?;
    let t1 = q.ai.scale_c64(nf.powf(1.0 / 12.0) * e);
    let t2 = q.ai_prime.scale_c64(nf.powf(-1.0 / 12.0) / e * coef);
    let ln_pre = -b + b * PI / (2.0 * (zz + 1.0)).sqrt() - (2.0 * b.sqrt()).ln();
    let v = t1.sub(&t2).mul(&exp_sc(ln_pre)).scale_c64(Complex64::new(sign_n(eq), 0.0));
    Ok(value(v, RegionTag::F, opts, None))
}

/// Formula of a given region at a point of the closed upper half-plane.
pub fn eval_region(eq: &Equilibrium, tag: RegionTag, z: Complex64, opts: &AsymptoticOptions) -> Result<AsymptoticValue> {
    match tag {
        RegionTag::A => eval_region_a(eq, z, opts),
        RegionTag::B => eval_region_b(eq, z, opts),
        RegionTag::C => eval_region_c(eq, z, opts),
        RegionTag::D => eval_region_d(eq, z, opts),
        RegionTag::E => eval_region_e(eq, z, opts),
        RegionTag::F => eval_region_f(eq, z, opts),
    }
}

/// Classify, dispatch, and reflect for Im z < 0.
pub fn eval_auto(eq: &Equilibrium, z: Complex64, opts: &AsymptoticOptions) -> Result<AsymptoticValue> {
    opts.classifier.validate()?;
    let lower = z.im < 0.0;
    let w = if lower { z.conj() } else { z };
    let label = classify_region(eq, w, &opts.classifier);
    let mut v = eval_region(eq, label.tag, w, opts)?;
    if lower {
        v.value = v.value.conj();
    }
    Ok(v)
}
