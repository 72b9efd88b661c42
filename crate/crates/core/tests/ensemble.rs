use eit_forge::{
    analysis::linspace, apply_hole, ensemble_susceptibility, gaussian_distribution, EnsembleKernel, FieldConfig,
    HoleProfile, HoleSpec, LevelScheme, VelocityDistribution,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAMMA: f64 = 5.2;

fn base() -> VelocityDistribution<f64> {
    gaussian_distribution(160.0, 480.0, 401).unwrap()
}

fn hole() -> impl Strategy<Value = HoleSpec<f64>> {
    (-480.0f64..480.0, 0.0f64..=1.0, 0.5f64..60.0, prop::bool::ANY).prop_map(|(c, d, w, lor)| HoleSpec {
        center: c,
        depth: d,
        hwhm: w,
        profile: if lor { HoleProfile::Lorentzian } else { HoleProfile::Gaussian },
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hole_composition_commutes(h1 in hole(), h2 in hole()) {
        let d = base();
        let a = apply_hole(&apply_hole(&d, h1).unwrap(), h2).unwrap();
        let b = apply_hole(&apply_hole(&d, h2).unwrap(), h1).unwrap();
        prop_assert_eq!(a.weights(), b.weights());
        prop_assert_eq!(a.norm(), b.norm());
    }

    #[test]
    fn holes_remove_mass(h in hole()) {
        prop_assume!(h.depth > 1e-6);
        let d = base();
        let holed = apply_hole(&d, h).unwrap();
        prop_assert!(holed.norm() < d.norm());
        prop_assert!(holed.weights().iter().all(|&w| w >= 0.0));
    }
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> VelocityDistribution<f64> {
    let deltas = linspace(-300.0, 300.0, n);
    let weights = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    VelocityDistribution::from_nodes(deltas, weights).unwrap()
}

#[test]
fn ensemble_is_linear_in_the_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scheme = LevelScheme::<f64>::cesium();
    let fields = FieldConfig::cesium();
    for _ in 0..5 {
        let d1 = random_distribution(&mut rng, 121);
        let d2 = random_distribution(&mut rng, 121);
        let a = rng.gen_range(0.0..1.0);
        let mixed: Vec<f64> = d1.weights().iter().zip(d2.weights()).map(|(x, y)| a * x + (1.0 - a) * y).collect();
        let mix = VelocityDistribution::from_nodes(d1.deltas().to_vec(), mixed).unwrap();
        for d2ph in [-7.0, 0.0, 1.3] {
            let c1 = ensemble_susceptibility(&scheme, &fields, &d1, d2ph).unwrap().value;
            let c2 = ensemble_susceptibility(&scheme, &fields, &d2, d2ph).unwrap().value;
            let cm = ensemble_susceptibility(&scheme, &fields, &mix, d2ph).unwrap().value;
            let (n1, n2) = (a * d1.norm(), (1.0 - a) * d2.norm());
            let want = (c1 * n1 + c2 * n2) / (n1 + n2);
            assert!((cm - want).norm() <= 1e-10 * want.norm().max(1.0), "{cm} vs {want}");
        }
    }
}

#[test]
fn velocity_integration_keeps_the_dark_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let scheme = LevelScheme::<f64>::lambda(GAMMA, 0.0);
    for _ in 0..20 {
        let d = random_distribution(&mut rng, 201);
        let f = FieldConfig::new(rng.gen_range(0.5..5.0) * GAMMA);
        let chi = ensemble_susceptibility(&scheme, &f, &d, 0.0).unwrap();
        assert!(chi.absorption().abs() <= 1e-10, "{chi:?}");
    }
    let holed = apply_hole(&gaussian_distribution(160.0, 480.0, 1601).unwrap(), HoleSpec::default_at(40.0)).unwrap();
    let chi = ensemble_susceptibility(&scheme, &FieldConfig::cesium(), &holed, 0.0).unwrap();
    assert!(chi.absorption().abs() <= 1e-10);
}

/// Full width at half depth of the absorption dip centered at Δ_2ph = 0.
fn dip_width(hwhm: f64) -> f64 {
    let scheme = LevelScheme::<f64>::lambda(GAMMA, 0.0);
    let f = FieldConfig::cesium();
    let dist = gaussian_distribution(hwhm, 6.0 * hwhm, 1601).unwrap();
    let grid = linspace(-40.0, 40.0, 1601);
    let kernel = EnsembleKernel::for_distribution(&scheme, &f, &dist, &grid).unwrap();
    let a: Vec<f64> = kernel.average(&dist).unwrap().iter().map(|c| c.im).collect();
    let mid = grid.len() / 2;
    // walk out from the center to the absorption maxima on each side
    let mut r = mid;
    while r + 1 < a.len() && a[r + 1] > a[r] {
        r += 1;
    }
    let mut l = mid;
    while l > 0 && a[l - 1] > a[l] {
        l -= 1;
    }
    let half = (a[mid] + a[l].min(a[r])) / 2.0;
    let right = (mid..=r).find(|&j| a[j] >= half).unwrap();
    let left = (l..=mid).rev().find(|&j| a[j] >= half).unwrap();
    grid[right] - grid[left]
}

#[test]
fn doppler_broadening_narrows_the_window() {
    let (hot, cold) = (dip_width(160.0), dip_width(16.0));
    assert!(hot < cold, "hot {hot} cold {cold}");
}

#[test]
fn quadrature_converges() {
    let scheme = LevelScheme::<f64>::cesium();
    let f = FieldConfig::cesium();
    let coarse = gaussian_distribution(160.0, 480.0, 1601).unwrap();
    let fine = gaussian_distribution(160.0, 480.0, 3201).unwrap();
    for d2 in [-20.0, -5.0, -1.6, 0.0, 0.7, 12.0] {
        let a = ensemble_susceptibility(&scheme, &f, &coarse, d2).unwrap().value;
        let b = ensemble_susceptibility(&scheme, &f, &fine, d2).unwrap().value;
        assert!((a - b).norm() <= 1e-6 * b.norm(), "{d2}: {a} vs {b}");
    }
}

#[test]
fn kernel_is_independent_of_thread_count() {
    let scheme = LevelScheme::<f64>::cesium();
    let f = FieldConfig::cesium();
    let dist = gaussian_distribution(160.0, 480.0, 401).unwrap();
    let grid = linspace(-30.0, 30.0, 101);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            EnsembleKernel::for_distribution(&scheme, &f, &dist, &grid).unwrap().average(&dist).unwrap()
        })
    };
    let one = run(1);
    let many = run(4);
    assert!(one.iter().zip(&many).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
}
