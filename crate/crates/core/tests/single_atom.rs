use eit_forge::{
    analysis::{dispersion_slope_at, find_raman_peak, linspace, transmission_spectrum},
    single_atom_susceptibility, DetuningPoint, ExcitedLevel, FieldConfig, LevelScheme, VelocityDistribution,
};
use num_complex::Complex;
use proptest::prelude::*;

const GAMMA: f64 = 5.2;

fn lambda(gamma_sg: f64) -> LevelScheme<f64> {
    LevelScheme::lambda(GAMMA, gamma_sg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lambda_is_dark_at_two_photon_resonance(omega in 0.01f64..60.0, dd in -600.0f64..600.0, det in -20.0f64..20.0) {
        let f = FieldConfig::new(omega).with_control_detuning(det);
        let chi = single_atom_susceptibility(&lambda(0.0), &f, DetuningPoint::new(0.0, dd)).unwrap();
        prop_assert!(chi.absorption().abs() <= 1e-12, "{:?}", chi);
    }

    #[test]
    fn medium_is_passive(
        omega in 0.0f64..40.0,
        d2 in -60.0f64..60.0,
        dd in -500.0f64..500.0,
        gamma_sg in 0.0f64..2.0,
        p1 in -3.0f64..3.0, c1 in -3.0f64..3.0,
        p2 in -3.0f64..3.0, c2 in -3.0f64..3.0,
    ) {
        let levels = vec![
            ExcitedLevel::new(0.0, 1.0, 1.0),
            ExcitedLevel::new(151.0, p1, c1),
            ExcitedLevel::new(352.0, p2, c2),
        ];
        let s = LevelScheme::new(1.25, levels, GAMMA, gamma_sg).unwrap();
        let chi = single_atom_susceptibility(&s, &FieldConfig::new(omega), DetuningPoint::new(d2, dd)).unwrap();
        prop_assert!(chi.absorption() >= -1e-12, "{:?}", chi);
    }
}

#[test]
fn cesium_is_passive_on_dense_grid() {
    let s = LevelScheme::<f64>::cesium();
    let f = FieldConfig::cesium();
    for dd in linspace(-480.0, 480.0, 97) {
        for d2 in linspace(-30.0, 30.0, 121) {
            let a = single_atom_susceptibility(&s, &f, DetuningPoint::new(d2, dd)).unwrap().absorption();
            assert!(a >= -1e-12, "({d2}, {dd}): {a}");
        }
    }
}

/// Exact Raman position for the Λ scheme: δ(δ + Δ_D) = Ω²/4.
fn exact_raman(omega: f64, dd: f64) -> f64 {
    (-dd + (dd * dd + omega * omega).sqrt()) / 2.0
}

#[test]
fn raman_peak_follows_light_shift() {
    let s = lambda(0.0);
    let omega = 2.3 * GAMMA;
    let f = FieldConfig::new(omega);
    for m in [10.0, 20.0, 50.0] {
        let dd = m * omega;
        let peak = find_raman_peak(&s, &f, dd, (0.0, omega)).unwrap();
        let asym = omega * omega / (4.0 * dd);
        assert!((peak - asym).abs() <= 0.1 * asym, "dd={dd}: {peak} vs {asym}");
        assert!((peak - exact_raman(omega, dd)).abs() <= 1e-3 * asym, "dd={dd}: {peak}");
    }
}

#[test]
fn raman_peak_approaches_zero_monotonically() {
    let s = lambda(0.0);
    let omega = 2.3 * GAMMA;
    let f = FieldConfig::new(omega);
    let peaks: Vec<f64> = linspace(2.0, 50.0, 25)
        .into_iter()
        .map(|m| find_raman_peak(&s, &f, m * omega, (0.0, omega)).unwrap())
        .collect();
    assert!(peaks.iter().all(|&p| p > 0.0));
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

#[test]
fn dispersion_slope_matches_analytic_derivative() {
    let omega = 2.3 * GAMMA;
    let gamma_sg = 0.077 * GAMMA;
    let tp = std::f64::consts::TAU;
    let i = Complex::new(0.0, 1.0);
    let gge = tp * GAMMA / 2.0;
    let w = tp * omega / 2.0;
    // dχ/dδ for χ = 2γ_ge (i/2) / (a + w²/b), a and b linear in δ
    let slope = |delta: f64, dd: f64| {
        let a = Complex::new(gge, -tp * (delta + dd));
        let b = Complex::new(tp * gamma_sg, -tp * delta);
        let da = Complex::new(0.0, -tp);
        let db = Complex::new(0.0, -tp);
        let den = a + w * w / b;
        let dden = da - w * w * db / (b * b);
        (-2.0 * gge * (i * 0.5) * dden / (den * den)).re
    };

    let step = 0.01 * GAMMA;
    let f = FieldConfig::new(omega);
    for (center, dd) in [(0.0, 0.0), (0.3, 0.0), (0.0, 40.0), (2.0, -25.0)] {
        let grid: Vec<f64> = (-5..=5).map(|j| center + j as f64 * step).collect();
        let spec = transmission_spectrum(&lambda(gamma_sg), &f, &VelocityDistribution::point(dd), &grid, 1.0).unwrap();
        let fd = dispersion_slope_at(&spec, 5).unwrap();
        let exact = slope(center, dd);
        assert!((fd - exact).abs() <= 0.01 * exact.abs(), "({center}, {dd}): {fd} vs {exact}");
    }
}

#[test]
fn f32_and_f64_agree_on_cesium_lines() {
    let s64 = LevelScheme::<f64>::cesium();
    let s32 = LevelScheme::<f32>::cesium();
    for dd in linspace(-200.0f64, 200.0, 41) {
        for d2 in [-10.0f64, -1.0, 0.0, 2.5, 10.0] {
            let a = single_atom_susceptibility(&s64, &FieldConfig::cesium(), DetuningPoint::new(d2, dd)).unwrap().value;
            let b = single_atom_susceptibility(&s32, &FieldConfig::cesium(), DetuningPoint::new(d2 as f32, dd as f32))
                .unwrap()
                .value;
            let err = ((b.re as f64 - a.re).powi(2) + (b.im as f64 - a.im).powi(2)).sqrt();
            assert!(err <= 1e-4 * a.norm().max(1e-2), "({d2}, {dd}): {a} vs {b}");
        }
    }
}
