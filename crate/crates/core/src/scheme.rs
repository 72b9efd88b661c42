//! Atomic level scheme, field configuration and detuning conventions.
//!
//! All public frequencies are linear MHz. The coherence equations run in
//! angular units; the conversion happens once, in [`crate::coherence`].

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One effective excited level |e_k⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitedLevel<T> {
    /// Energy above the reference level |e⟩, MHz.
    pub offset: T,
    /// Relative dipole amplitude for |g⟩ → |e_k⟩ (probe).
    pub probe_weight: T,
    /// Relative dipole amplitude for |s⟩ → |e_k⟩ (control). The control Rabi
    /// frequency on this level is `omega * control_weight`.
    pub control_weight: T,
}

impl<T: Real> ExcitedLevel<T> {
    pub fn new(offset: T, probe_weight: T, control_weight: T) -> Self {
        Self { offset, probe_weight, control_weight }
    }
}

/// Ground pair |g⟩, |s⟩ plus an ordered list of excited levels.
///
/// Level 0 is the reference |e⟩: offset 0, control weight 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelScheme<T> {
    pub ground_splitting: T,
    pub excited_levels: Vec<ExcitedLevel<T>>,
    /// Natural linewidth γ (linear MHz).
    pub gamma: T,
    /// Ground-coherence decay rate γ_sg (linear MHz).
    pub gamma_sg: T,
}

impl<T: Real> LevelScheme<T> {
    pub fn new(
        ground_splitting: T,
        excited_levels: Vec<ExcitedLevel<T>>,
        gamma: T,
        gamma_sg: T,
    ) -> Result<Self> {
        let scheme = Self { ground_splitting, excited_levels, gamma, gamma_sg };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Single excited level with unit probe and control weights.
    pub fn lambda(gamma: T, gamma_sg: T) -> Self {
        Self {
            ground_splitting: T::lit(cesium::GROUND_SPLITTING_MHZ),
            excited_levels: vec![ExcitedLevel::new(T::zero(), T::one(), T::one())],
            gamma,
            gamma_sg,
        }
    }

    /// The three effective 6P3/2 hyperfine levels F' = 2, 3, 4 with the
    /// default linewidths.
    pub fn cesium() -> Self {
        Self::cesium_levels(3)
    }

    /// The first `n` (1..=3) levels of the cesium table.
    pub fn cesium_levels(n: usize) -> Self {
        let n = n.clamp(1, cesium::OFFSETS_MHZ.len());
        let gamma = T::lit(cesium::GAMMA_MHZ);
        Self {
            ground_splitting: T::lit(cesium::GROUND_SPLITTING_MHZ),
            excited_levels: (0..n)
                .map(|k| {
                    ExcitedLevel::new(
                        T::lit(cesium::OFFSETS_MHZ[k]),
                        T::lit(cesium::PROBE_WEIGHTS[k]),
                        T::lit(cesium::CONTROL_WEIGHTS[k]),
                    )
                })
                .collect(),
            gamma,
            gamma_sg: gamma * T::lit(cesium::GAMMA_SG_OVER_GAMMA),
        }
    }

    pub fn n_excited(&self) -> usize {
        self.excited_levels.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidScheme(m.to_owned()));
        let Some(first) = self.excited_levels.first() else {
            return bad("excited_levels must not be empty");
        };
        if first.offset != T::zero() {
            return bad("reference level must have offset 0");
        }
        if !self.excited_levels.windows(2).all(|w| w[1].offset > w[0].offset) {
            return bad("level offsets must be strictly increasing");
        }
        let all_finite = self.excited_levels.iter().all(|l| {
            l.offset.is_finite() && l.probe_weight.is_finite() && l.control_weight.is_finite()
        });
        if !all_finite {
            return bad("level parameters must be finite");
        }
        if !(self.gamma > T::zero()) || !self.gamma.is_finite() {
            return bad("gamma must be > 0");
        }
        if !(self.gamma_sg >= T::zero()) || !self.gamma_sg.is_finite() {
            return bad("gamma_sg must be >= 0");
        }
        if !self.ground_splitting.is_finite() {
            return bad("ground_splitting must be finite");
        }
        if self.excited_levels.iter().all(|l| l.probe_weight == T::zero()) {
            return bad("at least one level needs a nonzero probe weight");
        }
        if self.excited_levels.iter().all(|l| l.control_weight == T::zero()) {
            return bad("at least one level needs a nonzero control weight");
        }
        Ok(())
    }
}

/// Control field. The probe is implicit: weak, treated to first order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig<T> {
    /// Control Rabi frequency Ω on the reference transition, MHz.
    pub omega: T,
    /// Control detuning from |s⟩ → |e⟩ for an atom at rest, MHz.
    pub control_detuning: T,
}

impl<T: Real> FieldConfig<T> {
    pub fn new(omega: T) -> Self {
        Self { omega, control_detuning: T::zero() }
    }

    pub fn with_control_detuning(mut self, detuning: T) -> Self {
        self.control_detuning = detuning;
        self
    }

    /// Ω = 2.3 γ on resonance.
    pub fn cesium() -> Self {
        Self::new(T::lit(cesium::OMEGA_OVER_GAMMA * cesium::GAMMA_MHZ))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega >= T::zero()) || !self.omega.is_finite() {
            return Err(Error::InvalidFields("omega must be >= 0".into()));
        }
        if !self.control_detuning.is_finite() {
            return Err(Error::InvalidFields("control_detuning must be finite".into()));
        }
        Ok(())
    }
}

/// A point in (two-photon detuning, Doppler detuning) space, MHz.
///
/// Probe and control share the same Doppler shift.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetuningPoint<T> {
    pub delta_2ph: T,
    pub delta_doppler: T,
}

impl<T: Real> DetuningPoint<T> {
    pub fn new(delta_2ph: T, delta_doppler: T) -> Self {
        Self { delta_2ph, delta_doppler }
    }

    /// Probe detuning from |g⟩ → |e_k⟩ seen by the moving atom.
    #[inline]
    pub fn probe_detuning(&self, fields: &FieldConfig<T>, level: &ExcitedLevel<T>) -> T {
        self.delta_2ph + fields.control_detuning + self.delta_doppler - level.offset
    }
}

/// Cesium D2 constants for the |F=3,m=1⟩ / |F=3,m=3⟩ ground pair coupled to
/// |F', m=2⟩, with Zeeman structure collapsed to one effective level per F'.
///
/// Weights are hyperfine dipole amplitudes ⟨F' m'|d_q|F m⟩ in units of the
/// reduced J-element (Clebsch–Gordan coefficient times the 6j factor, Steck
/// sign conventions), rescaled so the F' = 2 entry of each column is 1:
///
/// | F' | offset MHz | control σ+ from m=1 | probe σ− from m=3 |
/// |----|-----------:|---------------------|-------------------|
/// | 2  |          0 | √21/21  → 1         | √35/7  → 1        |
/// | 3  |        151 | √5/4    → √105/4    | −√3/4  → −7√3/(4√35) |
/// | 4  |        352 | 5√7/28  → 5√3/4     | √105/84 → √3/12   |
pub mod cesium {
    pub const OFFSETS_MHZ: [f64; 3] = [0.0, 151.0, 352.0];
    pub const CONTROL_WEIGHTS: [f64; 3] = [1.0, 2.561_737_691_489_899_5, 2.165_063_509_461_096_4];
    pub const PROBE_WEIGHTS: [f64; 3] = [1.0, -0.512_347_538_297_979_9, 0.144_337_567_297_406_43];
    pub const GAMMA_MHZ: f64 = 5.2;
    pub const GAMMA_SG_OVER_GAMMA: f64 = 0.077;
    pub const OMEGA_OVER_GAMMA: f64 = 2.3;
    pub const GROUND_SPLITTING_MHZ: f64 = 1.25;
    pub const OPTICAL_DEPTH: f64 = 5.0;
    pub const DOPPLER_HWHM_MHZ: f64 = 160.0;
}
