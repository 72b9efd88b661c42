//! Linearized steady state of the probe coherences and the single-atom
//! susceptibility.
//!
//! Unknowns are the optical coherences σ_k (g → e_k) and the ground
//! coherence σ_sg. With angular rates γ_ge = πγ, Ω_k = 2πΩ·c_k:
//!
//! ```text
//! [γ_ge − i·2πΔ_p,k] σ_k − i(Ω_k/2) σ_sg       = i d_k / 2
//! −i Σ_k (Ω_k/2) σ_k + [γ_sg − i·2πΔ_2ph] σ_sg = 0
//! ```
//!
//! All population sits in |g⟩. σ_k equals −ρ_{e_k g}/Ω_probe for a probe
//! coupling Ω_probe·d_k/2 in the rotating-frame Hamiltonian.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::scheme::{DetuningPoint, FieldConfig, LevelScheme};

/// Normalized complex susceptibility: `Im` is absorption, `Re` dispersion.
///
/// A single resonant two-level transition with unit probe weight and no
/// control field gives exactly `i`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Susceptibility<T> {
    pub value: Complex<T>,
}

impl<T: Real> Susceptibility<T> {
    pub fn new(value: Complex<T>) -> Self {
        Self { value }
    }

    #[inline]
    pub fn absorption(&self) -> T {
        self.value.im
    }

    #[inline]
    pub fn dispersion(&self) -> T {
        self.value.re
    }
}

/// Returns `(σ_0 .. σ_{K-1}, σ_sg)`.
pub fn steady_state_coherences<T: Real>(
    scheme: &LevelScheme<T>,
    fields: &FieldConfig<T>,
    pt: DetuningPoint<T>,
) -> Result<Vec<Complex<T>>> {
    scheme.validate()?;
    fields.validate()?;
    solve_unchecked(scheme, fields, pt)
}

pub fn single_atom_susceptibility<T: Real>(
    scheme: &LevelScheme<T>,
    fields: &FieldConfig<T>,
    pt: DetuningPoint<T>,
) -> Result<Susceptibility<T>> {
    scheme.validate()?;
    fields.validate()?;
    susceptibility_unchecked(scheme, fields, pt)
}

/// Half the natural linewidth, angular.
#[inline]
pub(crate) fn optical_decay<T: Real>(scheme: &LevelScheme<T>) -> T {
    T::two_pi() * scheme.gamma / T::lit(2.0)
}

pub(crate) fn solve_unchecked<T: Real>(
    scheme: &LevelScheme<T>,
    fields: &FieldConfig<T>,
    pt: DetuningPoint<T>,
) -> Result<Vec<Complex<T>>> {
    let k_levels = scheme.n_excited();
    let n = k_levels + 1;
    let two_pi = T::two_pi();
    let half = T::lit(0.5);
    let i = Complex::new(T::zero(), T::one());
    let zero = Complex::new(T::zero(), T::zero());

    let gamma_ge = optical_decay(scheme);
    if fields.omega == T::zero() {
        // σ_sg decouples and relaxes to zero; each line is a bare Lorentzian
        let mut out: Vec<Complex<T>> = scheme
            .excited_levels
            .iter()
            .map(|level| {
                let a = Complex::new(gamma_ge, -two_pi * pt.probe_detuning(fields, level));
                i * (half * level.probe_weight) / a
            })
            .collect();
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DegenerateCoherenceSystem);
        }
        out.push(zero);
        return Ok(out);
    }
    let mut a = vec![zero; n * n];
    let mut b = vec![zero; n];

    for (k, level) in scheme.excited_levels.iter().enumerate() {
        let dp = two_pi * pt.probe_detuning(fields, level);
        let half_rabi = half * two_pi * fields.omega * level.control_weight;
        a[k * n + k] = Complex::new(gamma_ge, -dp);
        a[k * n + k_levels] = -i * half_rabi;
        a[k_levels * n + k] = -i * half_rabi;
        b[k] = i * (half * level.probe_weight);
    }
    a[k_levels * n + k_levels] =
        Complex::new(two_pi * scheme.gamma_sg, -two_pi * pt.delta_2ph);

    linalg::solve_in_place(&mut a, &mut b, n).ok_or(Error::DegenerateCoherenceSystem)?;
    if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DegenerateCoherenceSystem);
    }
    Ok(b)
}

pub(crate) fn susceptibility_unchecked<T: Real>(
    scheme: &LevelScheme<T>,
    fields: &FieldConfig<T>,
    pt: DetuningPoint<T>,
) -> Result<Susceptibility<T>> {
    let sigma = solve_unchecked(scheme, fields, pt)?;
    let scale = T::lit(2.0) * optical_decay(scheme);
    let sum = scheme
        .excited_levels
        .iter()
        .zip(&sigma)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (l, s)| acc + s * l.probe_weight);
    Ok(Susceptibility::new(sum * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::ExcitedLevel;

    const GAMMA: f64 = 5.2;

    fn lambda(gamma_sg: f64) -> LevelScheme<f64> {
        LevelScheme::lambda(GAMMA, gamma_sg)
    }

    /// Closed form for K = 1 by eliminating σ_sg.
    fn lambda_closed_form(omega: f64, gamma_sg: f64, pt: DetuningPoint<f64>) -> Complex<f64> {
        let tp = std::f64::consts::TAU;
        let i = Complex::new(0.0, 1.0);
        let gge = tp * GAMMA / 2.0;
        let a = Complex::new(gge, -tp * (pt.delta_2ph + pt.delta_doppler));
        let b = Complex::new(tp * gamma_sg, -tp * pt.delta_2ph);
        let w = tp * omega / 2.0;
        let sigma = (i * 0.5) / (a + w * w / b);
        2.0 * gge * sigma
    }

    #[test]
    fn two_level_resonance_is_unit_imaginary() {
        let f = FieldConfig::new(0.0);
        let chi = single_atom_susceptibility(&lambda(0.0), &f, DetuningPoint::new(0.0, 0.0)).unwrap();
        assert!((chi.value - Complex::new(0.0, 1.0)).norm() < 1e-15);

        let s = steady_state_coherences(&lambda(0.0), &f, DetuningPoint::new(0.0, 0.0)).unwrap();
        let gge = std::f64::consts::PI * GAMMA;
        assert!(s[0].re.abs() < 1e-18);
        assert!((s[0].im - 1.0 / (2.0 * gge)).abs() < 1e-15);
    }

    #[test]
    fn dark_state_zeroes_optical_coherence() {
        let f = FieldConfig::new(2.3 * GAMMA);
        for dd in [-300.0, -40.0, 0.0, 12.5, 151.0] {
            let s = steady_state_coherences(&lambda(0.0), &f, DetuningPoint::new(0.0, dd)).unwrap();
            assert!(s[0].norm() < 1e-15, "dd={dd}: {:?}", s[0]);
        }
    }

    #[test]
    fn matches_lambda_closed_form() {
        let f = FieldConfig::new(2.3 * GAMMA);
        for &(d2, dd) in &[(0.3, 0.0), (-4.0, 20.0), (6.0, -80.0), (0.01, 130.0)] {
            let pt = DetuningPoint::new(d2, dd);
            let chi = single_atom_susceptibility(&lambda(0.4), &f, pt).unwrap().value;
            let want = lambda_closed_form(2.3 * GAMMA, 0.4, pt);
            assert!((chi - want).norm() <= 1e-12 * want.norm(), "{chi} vs {want}");
        }
    }

    #[test]
    fn autler_townes_doublet_is_symmetric() {
        let omega = 2.3 * GAMMA;
        let f = FieldConfig::new(omega);
        let grid: Vec<f64> = (0..=4000).map(|j| -2.0 * omega + j as f64 * omega / 1000.0).collect();
        let im: Vec<f64> = grid
            .iter()
            .map(|&d| single_atom_susceptibility(&lambda(0.0), &f, DetuningPoint::new(d, 0.0)).unwrap().absorption())
            .collect();
        let (neg_i, _) = im[..2000].iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        let (pos_i, _) = im[2001..].iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        let pos_i = pos_i + 2001;
        let step = omega / 1000.0;
        assert!((grid[neg_i] + omega / 2.0).abs() <= step);
        assert!((grid[pos_i] - omega / 2.0).abs() <= step);
        assert!((im[neg_i] - im[pos_i]).abs() < 1e-12);
    }

    #[test]
    fn raman_class_absorbs_in_zero_velocity_window() {
        // Effective F'=2, F'=3 pair. The resting class is most transparent
        // near -1.63 MHz (light shift from F'=3); there the 40 MHz class
        // absorbs 4.34x more (value from an independent numpy solve).
        let scheme = LevelScheme::<f64>::cesium_levels(2);
        let f = FieldConfig::cesium();
        let at = |d2: f64, dd: f64| {
            single_atom_susceptibility(&scheme, &f, DetuningPoint::new(d2, dd)).unwrap().absorption()
        };
        let window = (0..=6000)
            .map(|j| -4.0 + j as f64 * 1e-3)
            .fold((0.0, f64::MAX), |b, d2| if at(d2, 0.0) < b.1 { (d2, at(d2, 0.0)) } else { b })
            .0;
        assert!((window + 1.629).abs() < 2e-3, "{window}");
        let (moving, resting) = (at(window, 40.0), at(window, 0.0));
        assert!(moving >= 4.0 * resting, "moving {moving} resting {resting}");
    }

    #[test]
    fn degenerate_system_is_reported() {
        // no control, no decay on the ground coherence, and a level with
        // zero weights cannot make the matrix singular; only gamma = 0 can.
        let mut s = lambda(0.0);
        s.gamma = 0.0;
        let f = FieldConfig::new(0.0);
        assert!(matches!(
            solve_unchecked(&s, &f, DetuningPoint::new(0.0, 0.0)),
            Err(Error::DegenerateCoherenceSystem)
        ));
        assert!(steady_state_coherences(&s, &f, DetuningPoint::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn f32_path_agrees_with_f64() {
        let s64 = LevelScheme::<f64>::cesium();
        let s32 = LevelScheme::<f32>::cesium();
        let f64f = FieldConfig::<f64>::cesium();
        let f32f = FieldConfig::<f32>::cesium();
        for &(d2, dd) in &[(0.5, 10.0), (-3.0, 60.0), (2.0, -100.0)] {
            let a = single_atom_susceptibility(&s64, &f64f, DetuningPoint::new(d2, dd)).unwrap().value;
            let b = single_atom_susceptibility(&s32, &f32f, DetuningPoint::new(d2 as f32, dd as f32)).unwrap().value;
            let diff = Complex::new(b.re as f64 - a.re, b.im as f64 - a.im).norm();
            assert!(diff <= 1e-4 * a.norm().max(1e-3), "{a} vs {b}");
        }
    }

    #[test]
    fn uncoupled_level_is_inert() {
        let mut s = lambda(0.1);
        s.excited_levels.push(ExcitedLevel::new(100.0, 0.0, 0.0));
        let f = FieldConfig::new(10.0);
        let pt = DetuningPoint::new(1.0, 3.0);
        let a = single_atom_susceptibility(&s, &f, pt).unwrap().value;
        let b = single_atom_susceptibility(&lambda(0.1), &f, pt).unwrap().value;
        assert!((a - b).norm() < 1e-15);
    }
}
