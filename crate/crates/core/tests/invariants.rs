//! Property tests for structural identities that hold at every parameter.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use proptest::prelude::*;
use sieved_pollaczek::airy::{connection_residual, wronskian_residual};
use sieved_pollaczek::asymptotics::{classify_region, eval_auto, AsymptoticOptions, ClassifierSettings, RegionTag};
use sieved_pollaczek::auxfun::{phi0, szego_d, BoundaryPoint};
use sieved_pollaczek::equilibrium::Equilibrium;
use sieved_pollaczek::harness::{fit_order, format_number};
use sieved_pollaczek::measure::{log_r_derivative_above_one, log_r_derivative_unchecked};
use sieved_pollaczek::oracle::check_symmetry;
use sieved_pollaczek::{FamilyParams, ScaledComplex};

fn eq100() -> Arc<Equilibrium> {
    static EQ: OnceLock<Arc<Equilibrium>> = OnceLock::new();
    EQ.get_or_init(|| Equilibrium::new(FamilyParams::new(1.0).unwrap(), 100).unwrap()).clone()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn auto_evaluation_commutes_with_conjugation(re in -2.5f64..2.5, im in 0.02f64..1.5) {
        let eq = eq100();
        let opts = AsymptoticOptions::default();
        let z = Complex64::new(re, im);
        let up = eval_auto(&eq, z, &opts);
        let lo = eval_auto(&eq, z.conj(), &opts);
        match (up, lo) {
            (Ok(u), Ok(l)) => {
                prop_assert_eq!(u.region, l.region);
                prop_assert!(u.value.conj().rel_diff(&l.value) < 1e-12);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "conjugate points disagree on success"),
        }
    }

    #[test]
    fn classifier_is_total_and_deterministic(re in -4.0f64..4.0, im in -3.0f64..3.0) {
        let eq = eq100();
        let s = ClassifierSettings::default();
        let z = Complex64::new(re, im);
        let a = classify_region(&eq, z, &s);
        prop_assert_eq!(a, classify_region(&eq, z, &s));
        prop_assert_eq!(a.tag, classify_region(&eq, z.conj(), &s).tag);
    }

    #[test]
    fn fit_recovers_power_laws(order in -3.0f64..-0.2, scale in 1e-6f64..10.0) {
        let ns = [50usize, 100, 200, 400];
        let errs: Vec<f64> = ns.iter().map(|&n| scale * (n as f64).powf(order)).collect();
        let r = fit_order("synthetic", &ns, &errs, order).unwrap();
        prop_assert!((r.fitted_order.unwrap() - order).abs() < 1e-9);
        prop_assert!(r.passed);
    }

    #[test]
    fn formatted_numbers_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let s = format_number(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        prop_assert!(!s.contains('E'));
    }

    #[test]
    fn airy_identities_on_disc(r in 0.0f64..5.0, t in -PI..PI) {
        let s = Complex64::from_polar(r, t);
        prop_assert!(connection_residual(s).unwrap() <= 1e-10);
        prop_assert!(wronskian_residual(s).unwrap() <= 1e-10);
    }

    #[test]
    fn phi0_is_unimodular_on_band(x in -0.999f64..0.999, b in 0.2f64..3.0) {
        let p = FamilyParams::new(b).unwrap();
        let v = phi0(&p, &BoundaryPoint::upper(x)).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn szego_jump_product_is_one(u in 0.001f64..0.999) {
        let eq = eq100();
        let x = eq.alpha() + (eq.beta() - eq.alpha()) * u;
        let up = szego_d(&eq, &BoundaryPoint::upper(x)).unwrap();
        let lo = szego_d(&eq, &BoundaryPoint::lower(x)).unwrap();
        prop_assert!((up * lo - 1.0).norm() < 1e-8);
    }

    #[test]
    fn reflection_symmetry(n in 0usize..40, re in -2.0f64..2.0, im in -2.0f64..2.0, k in 0usize..3) {
        let b = [0.5, 1.0, 2.0][k];
        let p = FamilyParams::with_precision(b, 128).unwrap();
        prop_assert!(check_symmetry(&p, n, Complex64::new(re, im)) <= 2f64.powi(-40));
    }

    #[test]
    fn scaled_arithmetic_matches_f64(a in -1e3f64..1e3, b in -1e3f64..1e3, c in -1e3f64..1e3, d in -1e3f64..1e3) {
        let (x, y) = (Complex64::new(a, b), Complex64::new(c, d));
        let (sx, sy) = (ScaledComplex::from_c64(x), ScaledComplex::from_c64(y));
        let tol = 1e-13 * (1.0 + x.norm()) * (1.0 + y.norm());
        prop_assert!((sx.mul(&sy).to_c64() - x * y).norm() <= tol);
        prop_assert!((sx.add(&sy).to_c64() - (x + y)).norm() <= tol);
        if x.norm() > 1e-6 {
            prop_assert!((ScaledComplex::from_ln(x.ln()).to_c64() - x).norm() <= 1e-13 * x.norm());
        }
    }

    #[test]
    fn offset_derivative_matches_direct(h in 1e-4f64..5.0, b in 0.2f64..3.0) {
        let a = log_r_derivative_above_one(b, h);
        let d = log_r_derivative_unchecked(b, 1.0 + h);
        prop_assert!((a - d).abs() <= 1e-9 * a.abs());
    }
}

#[test]
fn offset_derivative_resolves_tiny_offsets() {
    // 1 + h rounds to 1 here; the offset form keeps the 1/sqrt(h) growth.
    let small = log_r_derivative_above_one(1.0, 1e-20);
    let larger = log_r_derivative_above_one(1.0, 4e-20);
    assert!((small / larger - 2.0).abs() < 1e-6, "{small} {larger}");
}

#[test]
fn tags_cover_all_regions_on_a_sweep() {
    let eq = eq100();
    let s = ClassifierSettings::default();
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..200 {
        for j in 0..60 {
            let z = Complex64::new(-2.0 + 4.0 * i as f64 / 199.0, 0.001 + j as f64 / 60.0);
            seen.insert(classify_region(&eq, z, &s).tag.as_str());
        }
    }
    seen.insert(classify_region(&eq, Complex64::new(eq.alpha(), 0.0), &s).tag.as_str());
    seen.insert(classify_region(&eq, Complex64::new(eq.beta(), 0.0), &s).tag.as_str());
    let mid = 0.5 * (1.0 + eq.beta());
    seen.insert(classify_region(&eq, Complex64::new(mid, 1e-4), &s).tag.as_str());
    for t in [RegionTag::A, RegionTag::B, RegionTag::C, RegionTag::D, RegionTag::E, RegionTag::F] {
        assert!(seen.contains(t.as_str()), "missing {t}");
    }
}
