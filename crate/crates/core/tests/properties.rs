use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::gamma as reference_gamma;

use pplab::bounds::{gamma, singularity_exponent_bounds, slice_cap_bound, volume_bound, BoundInput, SliceExponent};
use pplab::capacity::{toric_extremal, CondenserSpec};
use pplab::report::{render, ReportFormat, VerdictReport};
use pplab::PshModel;

fn origin(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn volume_bound_is_homogeneous(n in 1usize..5, mu in 0.05f64..5.0, s in 0.05f64..10.0, t in 0.1f64..100.0) {
        let a = volume_bound(&BoundInput::new(n, mu, s, 2.0).unwrap(), true).unwrap().value;
        let b = volume_bound(&BoundInput::new(n, t * mu, t * s, 2.0).unwrap(), true).unwrap().value;
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn volume_bound_decreases_in_depth(n in 1usize..5, mu in 0.05f64..5.0, s in 0.05f64..10.0, ds in 1e-3f64..1.0) {
        let a = volume_bound(&BoundInput::new(n, mu, s, 2.0).unwrap(), false).unwrap().value;
        let b = volume_bound(&BoundInput::new(n, mu, s + ds, 2.0).unwrap(), false).unwrap().value;
        prop_assert!(b < a);
    }

    #[test]
    fn toric_volume_below_bound(mu0 in 0.2f64..3.0, mu1 in 0.2f64..3.0, s in 0.1f64..6.0) {
        let m = PshModel::toric_max_log(vec![mu0, mu1]).unwrap();
        let v = m.closed_form_sublevel_volume(s).unwrap();
        let mu = (mu0 * mu1).sqrt();
        let bound = volume_bound(&BoundInput::new(2, mu, s, 2.0).unwrap(), false).unwrap().value;
        prop_assert!(v <= bound, "{v} > {bound}");
    }

    #[test]
    fn gamma_matches_reference(p in 0.05f64..12.0) {
        assert_relative_eq!(gamma(p).unwrap(), reference_gamma(p), max_relative = 1e-10);
    }

    #[test]
    fn proof_line_slice_bound_is_smaller(m in 1usize..4, p in 0.1f64..4.0, cap in 1e-3f64..10.0) {
        let stated = slice_cap_bound(m, p, cap, 2.0, SliceExponent::Stated).unwrap();
        let proof = slice_cap_bound(m, p, cap, 2.0, SliceExponent::ProofLine).unwrap();
        assert_relative_eq!(proof / stated, 2f64.powf(-(m as f64) * p), max_relative = 1e-12);
    }

    #[test]
    fn singularity_exponent_within_bounds(w0 in 0.2f64..4.0, w1 in 0.2f64..4.0) {
        let m = PshModel::toric_max_log(vec![w0, w1]).unwrap();
        let z = origin(2);
        let nu = m.lelong_number(&z).unwrap();
        let ca = m.singularity_exponent(&z).unwrap();
        let mass = m.closed_form_ma_mass().total_mass;
        let (lo, hi) = singularity_exponent_bounds(nu, mass.sqrt(), 2).unwrap();
        prop_assert!(lo <= ca * (1.0 + 1e-12) && ca <= hi * (1.0 + 1e-12), "{lo} {ca} {hi}");
    }

    #[test]
    fn scaling_scales_lelong_and_exponent(w in 0.2f64..3.0, t in 0.1f64..10.0) {
        let m = PshModel::radial_log(2, w).unwrap();
        let s = m.scaled(t).unwrap();
        let z = origin(2);
        assert_relative_eq!(s.lelong_number(&z).unwrap(), t * m.lelong_number(&z).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(s.singularity_exponent(&z).unwrap() * t, m.singularity_exponent(&z).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn sub_mean_value_on_complex_lines(
        w0 in 0.2f64..3.0, w1 in 0.2f64..3.0,
        a in 0.05f64..0.45, b in -0.45f64..0.45, dx in -1.0f64..1.0, dy in -1.0f64..1.0, r in 0.01f64..0.4,
    ) {
        let m = PshModel::toric_max_log(vec![w0, w1]).unwrap();
        let z0 = [Complex64::new(a, 0.1), Complex64::new(b, -0.2)];
        let dir = Complex64::new(dx, dy);
        let k = 512;
        let mean = (0..k)
            .map(|j| {
                let e = Complex64::from_polar(r, 2.0 * PI * j as f64 / k as f64);
                m.evaluate_unchecked(&[z0[0] + e, z0[1] + e * dir])
            })
            .sum::<f64>() / k as f64;
        prop_assert!(m.evaluate_unchecked(&z0) <= mean + 1e-9);
    }

    #[test]
    fn rendering_is_deterministic(values in proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), 0..20), seed in 0u64..1000) {
        let reports: Vec<VerdictReport> = values
            .iter()
            .enumerate()
            .map(|(i, (c, b))| VerdictReport::inequality("prop", &format!("case-{i}"), *c, *b, 0.01))
            .collect();
        for format in [ReportFormat::Json, ReportFormat::Csv] {
            let a = render(&reports, format, seed).unwrap();
            prop_assert_eq!(&a, &render(&reports, format, seed).unwrap());
        }
        let csv = render(&reports, ReportFormat::Csv, seed).unwrap();
        prop_assert_eq!(csv.lines().count(), reports.len() + 2);
    }
}

#[test]
fn toric_capacity_monotone_in_radius() {
    let caps: Vec<f64> = (1..10)
        .map(|k| toric_extremal(&CondenserSpec::centered_subpolydisc(2, 0.1 * k as f64), 64).unwrap().capacity)
        .collect();
    assert!(caps.windows(2).all(|w| w[1] > w[0]), "{caps:?}");
}
