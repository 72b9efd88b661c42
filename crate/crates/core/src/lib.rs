//! Weak-probe EIT spectra of Λ and multilevel atoms under Doppler
//! broadening, velocity-selective hole burning, and hole optimization for
//! maximum transparency contrast.
//!
//! The numerics are generic over the scalar type ([`Real`]: `f32` or `f64`).
//! The aliases below fix the scalar for the common cases.

// `!(x > 0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod broadening;
pub mod coherence;
pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod scalar;
pub mod scheme;

pub use analysis::{
    absorption_map, detrimental_velocity_roots, eit_contrast, find_raman_peak, group_delay_factor, linspace,
    transmission_spectrum, ContrastReport, DetrimentalRoots, Spectrum, SpectrumPoint,
};
pub use broadening::{
    apply_hole, apply_holes, ensemble_susceptibility, gaussian_distribution, load_distribution,
    parse_distribution, EnsembleKernel, HoleProfile, HoleSpec, VelocityDistribution,
};
pub use coherence::{single_atom_susceptibility, steady_state_coherences, Susceptibility};
pub use error::{Error, Result};
pub use optimizer::{optimize_holes, scan_hole_center, ContrastProblem, OptimizeOptions, OptimizeResult, ScanResult};
pub use oracle::{brute_force_steady_state, oracle_susceptibility, DensityMatrix};
pub use scalar::Real;
pub use scheme::{cesium, DetuningPoint, ExcitedLevel, FieldConfig, LevelScheme};

pub type LevelScheme64 = LevelScheme<f64>;
pub type LevelScheme32 = LevelScheme<f32>;
pub type FieldConfig64 = FieldConfig<f64>;
pub type FieldConfig32 = FieldConfig<f32>;
pub type DetuningPoint64 = DetuningPoint<f64>;
pub type Susceptibility64 = Susceptibility<f64>;
pub type VelocityDistribution64 = VelocityDistribution<f64>;
pub type VelocityDistribution32 = VelocityDistribution<f32>;
pub type HoleSpec64 = HoleSpec<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type ContrastReport64 = ContrastReport<f64>;
pub type ScanResult64 = ScanResult<f64>;
pub type OptimizeResult64 = OptimizeResult<f64>;
