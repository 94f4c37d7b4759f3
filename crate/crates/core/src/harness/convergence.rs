use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::verify::{overlap_report, SoftEdge};
use crate::asymptotics::{eval_region, AsymptoticOptions, RegionTag};
use crate::auxfun::{ln_szego_d, ln_szego_d_approx, ln_szego_d_infinity, BoundaryPoint};
use crate::equilibrium::Equilibrium;
use crate::error::{Error, Result};
use crate::oracle::{eval_pn, FamilyParams};

/// Distance from the claimed order still accepted by a report.
pub const ORDER_SLACK: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub quantity: String,
    pub n_list: Vec<usize>,
    pub errors: Vec<f64>,
    /// Least-squares slope of ln(error) against ln(n); `None` when every error is zero.
    pub fitted_order: Option<f64>,
    pub claimed_order: f64,
    pub exact: bool,
    pub passed: bool,
}

/// Fits `error ~ C n^p` by least squares in log-log coordinates.
pub fn fit_order(quantity: &str, n_list: &[usize], errors: &[f64], claimed_order: f64) -> Result<ConvergenceReport> {
    if n_list.len() != errors.len() {
        return Err(Error::InvalidParameter("n-list and error list differ in length".into()));
    }
    if n_list.len() < 3 {
        return Err(Error::InvalidParameter("order fitting needs at least three degrees".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::InvalidParameter("n-list must be positive and strictly increasing".into()));
    }
    if errors.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::InvalidParameter(format!("errors must be finite and non-negative: {errors:?}")));
    }
    let report = |fitted_order, exact, passed| ConvergenceReport {
        quantity: quantity.to_string(),
        n_list: n_list.to_vec(),
        errors: errors.to_vec(),
        fitted_order,
        claimed_order,
        exact,
        passed,
    };
    if errors.contains(&0.0) {
        return Ok(report(None, true, true));
    }
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(report(Some(slope), false, (slope - claimed_order).abs() <= ORDER_SLACK))
}

/// Quantities with a known rate of convergence in n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    /// Relative error of the band formula at x = 0.
    RegionB,
    /// Relative error of the right edge formula at tau_beta = 0.05.
    RegionD,
    /// Relative error of the left edge formula at z = alpha.
    RegionF,
    /// `|n l + 2 n ln 2 + ln pi|`.
    LagrangeL,
    /// `|alpha + 1 - b/n|`.
    MrsAlpha,
    /// `|beta - 1 - b/n|`.
    MrsBeta,
    /// `|ln D - ln D_closed|` at z = 2 + i.
    SzegoGap,
    /// `|D(infinity) - 1|`.
    SzegoInfinity,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::RegionB,
        Quantity::RegionD,
        Quantity::RegionF,
        Quantity::LagrangeL,
        Quantity::MrsAlpha,
        Quantity::MrsBeta,
        Quantity::SzegoGap,
        Quantity::SzegoInfinity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::RegionB => "regionB",
            Quantity::RegionD => "regionD",
            Quantity::RegionF => "regionF",
            Quantity::LagrangeL => "lagrange-l",
            Quantity::MrsAlpha => "mrs-alpha",
            Quantity::MrsBeta => "mrs-beta",
            Quantity::SzegoGap => "szego-gap",
            Quantity::SzegoInfinity => "szego-infinity",
        }
    }

    pub fn claimed_order(&self) -> f64 {
        match self {
            Quantity::MrsAlpha | Quantity::MrsBeta => -2.0,
            Quantity::SzegoInfinity => -1.0,
            _ => -0.5,
        }
    }

    /// Error value at one degree.
    pub fn error_at(&self, params: &FamilyParams, n: usize, opts: &AsymptoticOptions) -> Result<f64> {
        let eq = Equilibrium::new(*params, n)?;
        let b = params.b;
        let nf = n as f64;
        let against_oracle = |tag: RegionTag, z: Complex64| -> Result<f64> {
            let o = eval_pn(params, n, z)?.value;
            Ok(eval_region(&eq, tag, z, opts)?.value.rel_diff(&o))
        };
        match self {
            Quantity::RegionB => against_oracle(RegionTag::B, Complex64::new(0.0, 0.0)),
            Quantity::RegionD => against_oracle(RegionTag::D, Complex64::new(eq.beta() + 0.05 * (eq.beta() - 1.0), 0.0)),
            Quantity::RegionF => against_oracle(RegionTag::F, Complex64::new(eq.alpha(), 0.0)),
            Quantity::LagrangeL => Ok((nf * eq.mrs.l + 2.0 * nf * LN_2 + PI.ln()).abs()),
            Quantity::MrsAlpha => Ok((eq.alpha() + 1.0 - b / nf).abs()),
            Quantity::MrsBeta => Ok((eq.beta() - 1.0 - b / nf).abs()),
            Quantity::SzegoGap => {
                let z = Complex64::new(2.0, 1.0);
                Ok((ln_szego_d(&eq, &BoundaryPoint::off_axis(z))? - ln_szego_d_approx(&eq, z)).norm())
            }
            Quantity::SzegoInfinity => Ok((ln_szego_d_infinity(&eq)?.exp() - 1.0).norm()),
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown quantity {s:?}")))
    }
}

/// Errors of one quantity over a list of degrees and their fitted order.
pub fn convergence(quantity: Quantity, params: &FamilyParams, n_list: &[usize], opts: &AsymptoticOptions) -> Result<ConvergenceReport> {
    let errors = n_list.iter().map(|&n| quantity.error_at(params, n, opts)).collect::<Result<Vec<_>>>()?;
    fit_order(quantity.name(), n_list, &errors, quantity.claimed_order())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section8Entry {
    pub n: usize,
    /// `|gamma_{n-1} / 2^(n-1) - 1|` with gamma_{n-1}^2 = e^(-nl) / (4 pi).
    pub leading_coefficient_gap: f64,
    /// `|D(10^3) - 1|`.
    pub szego_drift: f64,
    /// Largest discrepancy between the left edge formula and its neighbours.
    pub overlap_alpha: f64,
    /// Largest discrepancy between the right edge formula and its neighbours.
    pub overlap_beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section8Report {
    pub b: f64,
    pub entries: Vec<Section8Entry>,
}

/// Leading-coefficient reconstruction, Szego drift at a far point and edge overlaps.
pub fn section8_checks(params: &FamilyParams, n_list: &[usize], opts: &AsymptoticOptions) -> Result<Section8Report> {
    let mut entries = Vec::new();
    for &n in n_list {
        let eq = Equilibrium::new(*params, n)?;
        let nf = n as f64;
        let ln_gamma = 0.5 * (-nf * eq.mrs.l - (4.0 * PI).ln());
        let leading_coefficient_gap = ((ln_gamma - (nf - 1.0) * LN_2).exp() - 1.0).abs();
        let far = BoundaryPoint::off_axis(Complex64::new(1e3, 0.0));
        let szego_drift = (ln_szego_d(&eq, &far)?.exp() - 1.0).norm();
        let overlap_alpha = overlap_report(&eq, SoftEdge::Alpha, opts)?.max_discrepancy;
        let overlap_beta = overlap_report(&eq, SoftEdge::Beta, opts)?.max_discrepancy;
        entries.push(Section8Entry { n, leading_coefficient_gap, szego_drift, overlap_alpha, overlap_beta });
    }
    Ok(Section8Report { b: params.b, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_power_law() {
        let ns = [50, 100, 200, 400];
        let errs: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(-0.5)).collect();
        let r = fit_order("synthetic", &ns, &errs, -0.5).unwrap();
        assert!((r.fitted_order.unwrap() + 0.5).abs() < 1e-6);
        assert!(r.passed && !r.exact);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_order("q", &[1, 2], &[1.0, 0.5], -1.0).is_err());
        assert!(fit_order("q", &[2, 1, 3], &[1.0, 0.5, 0.2], -1.0).is_err());
        let r = fit_order("q", &[1, 2, 3], &[0.0, 0.0, 0.0], -1.0).unwrap();
        assert!(r.exact && r.fitted_order.is_none());
    }

    #[test]
    fn quantity_names() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
        }
        assert!("regionZ".parse::<Quantity>().is_err());
    }

    #[test]
    fn leading_coefficient_reconstruction() {
        let r = section8_checks(&FamilyParams::new(1.0).unwrap(), &[100], &AsymptoticOptions::default()).unwrap();
        let e = &r.entries[0];
        assert!(e.leading_coefficient_gap < 1.0 / 10.0, "{e:?}");
        assert!(e.szego_drift < 1.0, "{e:?}");
        assert!(e.overlap_alpha < 0.1 && e.overlap_beta < 0.1, "{e:?}");
    }
}
