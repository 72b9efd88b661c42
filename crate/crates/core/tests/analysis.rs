use eit_forge::{
    analysis::{detrimental_residual, detrimental_velocity_roots, eit_contrast, linspace},
    cesium, Spectrum,
};
use num_complex::Complex;
use proptest::prelude::*;

fn spectrum(absorption: &[f64], od: f64) -> Spectrum<f64> {
    let grid = linspace(-10.0, 10.0, absorption.len());
    let chi: Vec<_> = absorption.iter().map(|&a| Complex::new(0.0, a)).collect();
    Spectrum::from_chi(&grid, &chi, od).unwrap()
}

proptest! {
    #[test]
    fn contrast_is_bounded(a in prop::collection::vec(0.0f64..3.0, 5..80), od in 0.0f64..10.0) {
        let spec = spectrum(&a, od);
        let r = eit_contrast(&spec, (-10.0, 10.0)).unwrap();
        prop_assert!(r.t_max >= r.t_min);
        prop_assert!((0.0..=1.0).contains(&r.contrast), "{:?}", r);
    }

    #[test]
    fn more_optical_depth_never_raises_transmission(
        a in prop::collection::vec(0.0f64..3.0, 5..80),
        od in 0.0f64..5.0,
        extra in 0.0f64..5.0,
    ) {
        let thin = eit_contrast(&spectrum(&a, od), (-10.0, 10.0)).unwrap();
        let thick = eit_contrast(&spectrum(&a, od + extra), (-10.0, 10.0)).unwrap();
        prop_assert!(thick.t_max <= thin.t_max);
        prop_assert!(thick.t_min <= thin.t_min);
    }

    #[test]
    fn roots_satisfy_the_rational_equation(d in 0.05f64..20.0, dp in 0.05f64..20.0, w in 1.0f64..1000.0) {
        let r = detrimental_velocity_roots(d, dp, w).unwrap();
        for x in r.roots {
            prop_assert!(detrimental_residual(d, dp, w, x) <= 1e-9);
        }
        prop_assert!(r.principal > 0.0 && r.principal < w);
    }

    #[test]
    fn roots_depend_only_on_the_weight_ratio(d in 0.05f64..20.0, dp in 0.05f64..20.0, c in 1e-3f64..1e3, neg in any::<bool>()) {
        let c = if neg { -c } else { c };
        let a = detrimental_velocity_roots(d, dp, 151.0).unwrap();
        let b = detrimental_velocity_roots(c * d, c * dp, 151.0).unwrap();
        for (x, y) in a.roots.iter().zip(b.roots) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs());
        }
    }
}

#[test]
fn cesium_principal_root_sits_in_the_full_model_band() {
    let c = cesium::CONTROL_WEIGHTS;
    let r = detrimental_velocity_roots(c[0], c[1], cesium::OFFSETS_MHZ[1]).unwrap();
    assert!((30.0..=55.0).contains(&r.principal), "{}", r.principal);
}
