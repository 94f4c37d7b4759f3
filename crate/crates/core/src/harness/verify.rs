use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airy::{connection_residual, jump_residual, psi_beta_model, psi_beta_rays, psi_model, psi_rays, wronskian_residual};
use crate::asymptotics::{classify_region, eval_region, AsymptoticOptions, ClassifierSettings, RegionTag};
use crate::auxfun::{phi_alpha, phi_beta, BoundaryPoint};
use crate::equilibrium::Equilibrium;
use crate::error::Result;
use crate::measure::{gamma_real, gram_matrix, QuadSpec};
use crate::oracle::FamilyParams;

const I2PI: Complex64 = Complex64 { re: 0.0, im: 2.0 * PI };

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub check: String,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub details: Vec<String>,
}

impl VerifyReport {
    fn new(check: &str, worst: f64, tolerance: f64, details: Vec<String>) -> Self {
        VerifyReport { check: check.into(), passed: worst <= tolerance, worst, tolerance, details }
    }
}

/// `max |<p_i, p_j> - delta_ij|` for degrees up to `max_degree`.
pub fn verify_orthogonality(params: &FamilyParams, max_degree: usize) -> Result<VerifyReport> {
    let g = gram_matrix(params, max_degree, &QuadSpec::default())?;
    let worst = g.max_deviation();
    Ok(VerifyReport::new(
        "orthogonality",
        worst,
        1e-8,
        vec![format!("b={} degrees<={max_degree} quadrature error bound {:e}", params.b, g.error)],
    ))
}

fn geometric(from: f64, to: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |k| from * (to / from).powf(k as f64 / (count - 1) as f64))
}

fn interior(a: f64, b: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |k| a + (b - a) * (k as f64 + 0.5) / count as f64)
}

/// The jump `g+ - g-` on the four real segments, 100 points each.
pub fn verify_jumps(params: &FamilyParams, n: usize) -> Result<VerifyReport> {
    let eq = Equilibrium::new(*params, n)?;
    let (alpha, beta, nf, b) = (eq.alpha(), eq.beta(), eq.nf(), params.b);
    let jump = |x: f64| -> Result<Complex64> { Ok(eq.g(&BoundaryPoint::upper(x))? - eq.g(&BoundaryPoint::lower(x))?) };
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;
    let mut record = |name: &str, res: Vec<f64>| {
        let m = res.iter().copied().fold(0.0, f64::max);
        details.push(format!("{name}: max residual {m:e}"));
        worst = worst.max(m);
    };
    let mut res = Vec::new();
    for d in geometric(1e-3, 5.0, 100) {
        res.push((jump(alpha - d)? - I2PI).norm());
    }
    record("(-inf, alpha)", res);
    let mut res = Vec::new();
    for x in interior(alpha, 1.0, 100) {
        let phi = phi_alpha(&eq, &BoundaryPoint::upper(x))?.value;
        res.push((jump(x)? - (I2PI - 2.0 * phi)).norm());
    }
    record("(alpha, 1)", res);
    let mut res = Vec::new();
    for x in interior(1.0, beta, 100) {
        let phi = phi_beta(&eq, &BoundaryPoint::upper(x))?.value;
        res.push((jump(x)? - (I2PI * gamma_real(b, x) / nf - 2.0 * phi)).norm());
    }
    record("(1, beta)", res);
    let mut res = Vec::new();
    for d in geometric(1e-3, 5.0, 100) {
        let x = beta + d;
        res.push((jump(x)? - I2PI * gamma_real(b, x) / nf).norm());
    }
    record("(beta, inf)", res);
    Ok(VerifyReport::new("jumps", worst, 1e-6, details))
}

/// Phase condition `g+ + g- - l + ln r / n = 0` on 100 band points.
pub fn verify_phase(params: &FamilyParams, n: usize) -> Result<VerifyReport> {
    let eq = Equilibrium::new(*params, n)?;
    let mut worst: f64 = 0.0;
    for x in interior(eq.alpha(), eq.beta(), 100) {
        worst = worst.max(eq.phase_residual(x)?);
    }
    Ok(VerifyReport::new("phase", worst, 1e-6, vec![format!("b={} n={n} band points 100", params.b)]))
}

/// Airy connection and Wronskian on a polar grid of |s| <= 5 and the eight model jumps.
pub fn verify_airy() -> Result<VerifyReport> {
    let mut conn: f64 = 0.0;
    let mut wr: f64 = 0.0;
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for k in 1..=10 {
        for j in 0..24 {
            pts.push(Complex64::from_polar(0.5 * k as f64, 2.0 * PI * j as f64 / 24.0 + 0.05));
        }
    }
    for &s in &pts {
        conn = conn.max(connection_residual(s)?);
        wr = wr.max(wronskian_residual(s)?);
    }
    let mut jumps: f64 = 0.0;
    let mut details = vec![format!("connection {conn:e} on {} points", pts.len()), format!("wronskian {wr:e}")];
    for r in [0.5, 2.0, 5.0] {
        for ray in psi_rays() {
            jumps = jumps.max(jump_residual(&ray, r, psi_model)?);
        }
        for ray in psi_beta_rays() {
            jumps = jumps.max(jump_residual(&ray, r, psi_beta_model)?);
        }
    }
    details.push(format!("model jumps {jumps:e}"));
    Ok(VerifyReport::new("airy", conn.max(wr).max(jumps), 1e-10, details))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SoftEdge {
    Alpha,
    Beta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapSample {
    pub z: Complex64,
    pub partner: RegionTag,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub edge: SoftEdge,
    pub r: f64,
    pub samples: Vec<OverlapSample>,
    pub max_discrepancy: f64,
}

fn circle_point(eq: &Equilibrium, edge: SoftEdge, t: Complex64) -> Complex64 {
    match edge {
        SoftEdge::Alpha => eq.alpha() + (1.0 + eq.alpha()) * t,
        SoftEdge::Beta => eq.beta() + (eq.beta() - 1.0) * t,
    }
}

fn edge_tag(edge: SoftEdge) -> RegionTag {
    match edge {
        SoftEdge::Alpha => RegionTag::F,
        SoftEdge::Beta => RegionTag::D,
    }
}

fn compare(eq: &Equilibrium, edge: SoftEdge, z: Complex64, partner: RegionTag, opts: &AsymptoticOptions) -> Result<OverlapSample> {
    let own = eval_region(eq, edge_tag(edge), z, opts)?.value;
    let other = eval_region(eq, partner, z, opts)?.value;
    Ok(OverlapSample { z, partner, discrepancy: own.rel_diff(&other) })
}

/// Edge formula against the formula the classifier uses just outside the
/// disc, on 13 points of the upper half of |tau| = r.
pub fn overlap_report(eq: &Equilibrium, edge: SoftEdge, opts: &AsymptoticOptions) -> Result<OverlapReport> {
    let r = opts.classifier.r;
    let outside = ClassifierSettings { r: 1e-12, ..opts.classifier };
    let mut samples = Vec::new();
    for k in 0..=12 {
        let u = Complex64::from_polar(1.0, PI * k as f64 / 12.0);
        let z = circle_point(eq, edge, r * u);
        let partner = classify_region(eq, circle_point(eq, edge, r * 1.001 * u), &outside).tag;
        samples.push(compare(eq, edge, z, partner, opts)?);
    }
    let max_discrepancy = samples.iter().map(|s| s.discrepancy).fold(0.0, f64::max);
    Ok(OverlapReport { edge, r, samples, max_discrepancy })
}

/// Edge formula against a fixed partner on the quarter of |tau| = r facing
/// right (Re z at or beyond the edge), where the partner formula applies.
pub fn pair_overlap(eq: &Equilibrium, edge: SoftEdge, partner: RegionTag, opts: &AsymptoticOptions) -> Result<OverlapReport> {
    let r = opts.classifier.r;
    let mut samples = Vec::new();
    for k in 0..=6 {
        let z = circle_point(eq, edge, Complex64::from_polar(r, PI * k as f64 / 12.0));
        samples.push(compare(eq, edge, z, partner, opts)?);
    }
    let max_discrepancy = samples.iter().map(|s| s.discrepancy).fold(0.0, f64::max);
    Ok(OverlapReport { edge, r, samples, max_discrepancy })
}

/// Both edge overlaps against the neighbouring formulas, 5% tolerance.
pub fn verify_overlaps(params: &FamilyParams, n: usize, opts: &AsymptoticOptions) -> Result<VerifyReport> {
    let eq = Equilibrium::new(*params, n)?;
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;
    for edge in [SoftEdge::Alpha, SoftEdge::Beta] {
        let rep = overlap_report(&eq, edge, opts)?;
        for s in &rep.samples {
            details.push(format!("{} vs {} at {}: {:e}", edge_tag(edge), s.partner, s.z, s.discrepancy));
        }
        worst = worst.max(rep.max_discrepancy);
    }
    Ok(VerifyReport::new("overlaps", worst, 0.05, details))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> FamilyParams {
        FamilyParams::new(1.0).unwrap()
    }

    #[test]
    fn airy_checks_pass() {
        let r = verify_airy().unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn jumps_and_phase_pass() {
        let r = verify_jumps(&p1(), 50).unwrap();
        assert!(r.passed, "{r:?}");
        let r = verify_phase(&p1(), 50).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn overlap_partners() {
        let eq = Equilibrium::new(p1(), 100).unwrap();
        let o = AsymptoticOptions::default();
        let a = overlap_report(&eq, SoftEdge::Alpha, &o).unwrap();
        assert_eq!(a.samples[0].partner, RegionTag::B);
        assert_eq!(a.samples[12].partner, RegionTag::A);
        let b = overlap_report(&eq, SoftEdge::Beta, &o).unwrap();
        assert_eq!(b.samples[0].partner, RegionTag::E);
        assert_eq!(b.samples[12].partner, RegionTag::C);
        let p = pair_overlap(&eq, SoftEdge::Beta, RegionTag::A, &o).unwrap();
        assert!(p.max_discrepancy < 0.05, "{p:?}");
    }
}
