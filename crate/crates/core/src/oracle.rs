//! Brute-force steady state of the full (K+2)-level Lindblad master equation,
//! used to validate the linearized coherence solve.
//!
//! Basis order: |g⟩, |s⟩, |e_0⟩ … |e_{K-1}⟩. Both fields are kept at finite
//! strength. Excited level k decays at rate γ into |g⟩ and |s⟩ in proportion
//! to d_k² and c_k² (equal split when both vanish). The ground coherence
//! dephases at γ_sg through the jump operator √(2γ_sg)|s⟩⟨s|.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::coherence::optical_decay;
use crate::error::{Error, Result};
use crate::scheme::{DetuningPoint, FieldConfig, LevelScheme};

type C64 = Complex<f64>;

const RESIDUAL_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-9;

const G: usize = 0;
const S: usize = 1;
const E0: usize = 2;

/// Steady-state density matrix, row `i` column `j` is ⟨i|ρ|j⟩.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub rho: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// ρ_{e_k g}.
    pub fn optical_coherence(&self, k: usize) -> C64 {
        self.rho[(E0 + k, G)]
    }

    pub fn ground_coherence(&self) -> C64 {
        self.rho[(S, G)]
    }

    pub fn population(&self, i: usize) -> f64 {
        self.rho[(i, i)].re
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }
}

struct Jump {
    rate: f64,
    to: usize,
    from: usize,
}

fn hamiltonian(
    scheme: &LevelScheme<f64>,
    fields: &FieldConfig<f64>,
    pt: DetuningPoint<f64>,
    probe_rabi: f64,
) -> DMatrix<C64> {
    let tp = std::f64::consts::TAU;
    let n = scheme.n_excited() + 2;
    let mut h = DMatrix::<C64>::zeros(n, n);
    h[(S, S)] = C64::new(-tp * pt.delta_2ph, 0.0);
    for (k, level) in scheme.excited_levels.iter().enumerate() {
        let e = E0 + k;
        h[(e, e)] = C64::new(-tp * pt.probe_detuning(fields, level), 0.0);
        let wp = C64::new(0.5 * tp * probe_rabi * level.probe_weight, 0.0);
        let wc = C64::new(0.5 * tp * fields.omega * level.control_weight, 0.0);
        h[(e, G)] = wp;
        h[(G, e)] = wp;
        h[(e, S)] = wc;
        h[(S, e)] = wc;
    }
    h
}

fn jumps(scheme: &LevelScheme<f64>) -> Vec<Jump> {
    let tp = std::f64::consts::TAU;
    let gamma = tp * scheme.gamma;
    let mut out = Vec::new();
    for (k, level) in scheme.excited_levels.iter().enumerate() {
        let dg = level.probe_weight * level.probe_weight;
        let ds = level.control_weight * level.control_weight;
        let (bg, bs) = if dg + ds > 0.0 { (dg / (dg + ds), ds / (dg + ds)) } else { (0.5, 0.5) };
        out.push(Jump { rate: gamma * bg, to: G, from: E0 + k });
        out.push(Jump { rate: gamma * bs, to: S, from: E0 + k });
    }
    if scheme.gamma_sg > 0.0 {
        out.push(Jump { rate: 2.0 * tp * scheme.gamma_sg, to: S, from: S });
    }
    out
}

/// Superoperator acting on row-major vec(ρ), index `i * n + j`.
fn liouvillian(h: &DMatrix<C64>, jumps: &[Jump]) -> DMatrix<C64> {
    let n = h.nrows();
    let idx = |i: usize, j: usize| i * n + j;
    let mi = C64::new(0.0, -1.0);
    let mut l = DMatrix::<C64>::zeros(n * n, n * n);

    // -i[H, ρ]: (Hρ)_ij = Σ_k H_ik ρ_kj ; (ρH)_ij = Σ_k ρ_ik H_kj
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                l[(idx(i, j), idx(k, j))] += mi * h[(i, k)];
                l[(idx(i, j), idx(i, k))] -= mi * h[(k, j)];
            }
        }
    }
    // D[L]ρ with L = √r |to⟩⟨from|:
    //   LρL† = r ρ_ff |to⟩⟨to|,   L†L = r |from⟩⟨from|
    for jmp in jumps {
        let (t, f, r) = (jmp.to, jmp.from, jmp.rate);
        l[(idx(t, t), idx(f, f))] += C64::new(r, 0.0);
        for j in 0..n {
            l[(idx(f, j), idx(f, j))] -= C64::new(0.5 * r, 0.0);
            l[(idx(j, f), idx(j, f))] -= C64::new(0.5 * r, 0.0);
        }
    }
    l
}

/// Null-space steady state of the full master equation.
///
/// `probe_rabi` is the probe Rabi frequency on a unit-weight transition, MHz.
pub fn brute_force_steady_state(
    scheme: &LevelScheme<f64>,
    fields: &FieldConfig<f64>,
    pt: DetuningPoint<f64>,
    probe_rabi: f64,
) -> Result<DensityMatrix> {
    scheme.validate()?;
    fields.validate()?;
    if !(probe_rabi >= 0.0) || !probe_rabi.is_finite() {
        return Err(Error::InvalidInput("probe_rabi must be >= 0".into()));
    }

    let h = hamiltonian(scheme, fields, pt, probe_rabi);
    let l = liouvillian(&h, &jumps(scheme));
    let n = h.nrows();
    let dim = n * n;

    // Replace the ρ_gg balance equation (redundant with trace preservation)
    // by Tr ρ = 1.
    let mut a = l.clone();
    let mut rhs = DVector::<C64>::zeros(dim);
    for c in 0..dim {
        a[(0, c)] = C64::new(0.0, 0.0);
    }
    for i in 0..n {
        a[(0, i * n + i)] = C64::new(1.0, 0.0);
    }
    rhs[0] = C64::new(1.0, 0.0);

    let x = a.lu().solve(&rhs).ok_or(Error::OracleNotConverged { residual: f64::INFINITY })?;
    let scale = l.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let residual = (&l * &x).norm() / scale.max(1.0);
    if !residual.is_finite() || residual > RESIDUAL_TOL {
        return Err(Error::OracleNotConverged { residual });
    }

    let mut rho = DMatrix::<C64>::from_fn(n, n, |i, j| x[i * n + j]);
    // symmetrize away rounding-level anti-Hermitian parts
    rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let min_eig = rho.clone().symmetric_eigen().eigenvalues.min();
    if min_eig < -POSITIVITY_TOL {
        return Err(Error::OracleNotConverged { residual: -min_eig });
    }
    Ok(DensityMatrix { rho })
}

/// Normalized susceptibility extracted from the full steady state:
/// χ = 2γ_ge Σ_k d_k (−ρ_{e_k g} / Ω_probe), angular rates throughout.
pub fn oracle_susceptibility(
    scheme: &LevelScheme<f64>,
    fields: &FieldConfig<f64>,
    pt: DetuningPoint<f64>,
    probe_rabi: f64,
) -> Result<C64> {
    if !(probe_rabi > 0.0) {
        return Err(Error::InvalidInput("probe_rabi must be > 0 to normalize".into()));
    }
    let dm = brute_force_steady_state(scheme, fields, pt, probe_rabi)?;
    let wp = std::f64::consts::TAU * probe_rabi;
    let sum: C64 = scheme
        .excited_levels
        .iter()
        .enumerate()
        .map(|(k, l)| -dm.optical_coherence(k) / wp * l.probe_weight)
        .sum();
    Ok(sum * (2.0 * optical_decay(scheme)))
}
