//! Velocity distributions over Doppler detuning, depump holes and the
//! velocity-averaged (ensemble) susceptibility.
//!
//! Everything lives in Doppler-detuning space (MHz). Integration is the
//! trapezoidal rule on a uniform grid.

use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;

use crate::coherence::{susceptibility_unchecked, Susceptibility};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scheme::{DetuningPoint, FieldConfig, LevelScheme};

/// Header line of the distribution file format.
pub const DISTRIBUTION_HEADER: &str = "delta_doppler_mhz,weight";

const UNIFORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HoleProfile {
    Gaussian,
    Lorentzian,
}

impl HoleProfile {
    /// Unit-height profile with half maximum at `u = ±1`.
    #[inline]
    pub fn eval<T: Real>(self, u: T) -> T {
        match self {
            HoleProfile::Gaussian => (-T::LN_2() * u * u).exp(),
            HoleProfile::Lorentzian => T::one() / (T::one() + u * u),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HoleProfile::Gaussian => "gaussian",
            HoleProfile::Lorentzian => "lorentzian",
        }
    }
}

impl std::str::FromStr for HoleProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(HoleProfile::Gaussian),
            "lorentzian" => Ok(HoleProfile::Lorentzian),
            other => Err(Error::InvalidHole(format!("unknown profile `{other}`"))),
        }
    }
}

/// A velocity-selective depump hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleSpec<T> {
    /// Doppler detuning Δ_D of the removed class, MHz.
    pub center: T,
    /// Fractional removal at the center, in [0, 1].
    pub depth: T,
    /// Half width at half maximum, MHz.
    pub hwhm: T,
    pub profile: HoleProfile,
}

impl<T: Real> HoleSpec<T> {
    pub fn gaussian(center: T, depth: T, hwhm: T) -> Self {
        Self { center, depth, hwhm, profile: HoleProfile::Gaussian }
    }

    /// Gaussian, depth 0.8, 10 MHz HWHM.
    pub fn default_at(center: T) -> Self {
        Self::gaussian(center, T::lit(0.8), T::lit(10.0))
    }

    pub fn at(self, center: T) -> Self {
        Self { center, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.depth >= T::zero() && self.depth <= T::one()) {
            return Err(Error::InvalidHole(format!("depth {} outside [0, 1]", self.depth)));
        }
        if !(self.hwhm > T::zero()) || !self.hwhm.is_finite() {
            return Err(Error::InvalidHole(format!("hwhm {} must be > 0", self.hwhm)));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidHole("center must be finite".into()));
        }
        Ok(())
    }

    /// Surviving fraction at Doppler detuning `x`.
    #[inline]
    pub fn transmission(&self, x: T) -> T {
        T::one() - self.depth * self.profile.eval((x - self.center) / self.hwhm)
    }

    fn sort_key(&self) -> (f64, f64, f64, u8) {
        (
            self.center.to_f64_lossy(),
            self.depth.to_f64_lossy(),
            self.hwhm.to_f64_lossy(),
            self.profile as u8,
        )
    }
}

/// Non-negative weight sampled on a uniform Doppler grid, with any applied
/// holes.
///
/// Holes are kept alongside the unholed weights and multiplied in a
/// canonical order, so the result does not depend on application order.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityDistribution<T> {
    deltas: Vec<T>,
    step: T,
    base: Vec<T>,
    holes: Vec<HoleSpec<T>>,
    weights: Vec<T>,
    norm: T,
}

impl<T: Real> VelocityDistribution<T> {
    /// Builds from explicit nodes. The grid must be uniform and strictly
    /// increasing, weights non-negative.
    pub fn from_nodes(deltas: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if deltas.is_empty() || deltas.len() != weights.len() {
            return Err(Error::InvalidInput("distribution needs matching, non-empty columns".into()));
        }
        if let Some(line) = weights.iter().position(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::NegativeWeight { line: line + 1 });
        }
        let step = uniform_step(&deltas)?;
        Ok(Self::assemble(deltas, step, weights))
    }

    /// Delta-like distribution: one node with unit weight. Its norm is the
    /// weight itself.
    pub fn point(delta_doppler: T) -> Self {
        Self::assemble(vec![delta_doppler], T::zero(), vec![T::one()])
    }

    fn assemble(deltas: Vec<T>, step: T, base: Vec<T>) -> Self {
        let mut d = Self {
            weights: base.clone(),
            deltas,
            step,
            base,
            holes: Vec::new(),
            norm: T::zero(),
        };
        d.norm = trapezoid(&d.weights, d.step);
        d
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn deltas(&self) -> &[T] {
        &self.deltas
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn holes(&self) -> &[HoleSpec<T>] {
        &self.holes
    }

    /// Trapezoidal integral of the weight.
    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn nodes(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.deltas.iter().copied().zip(self.weights.iter().copied())
    }

    /// Linear interpolation of the weight; zero outside the grid.
    pub fn weight_at(&self, x: T) -> T {
        let n = self.len();
        if n == 1 {
            return if x == self.deltas[0] { self.weights[0] } else { T::zero() };
        }
        let (lo, hi) = (self.deltas[0], self.deltas[n - 1]);
        if x < lo || x > hi {
            return T::zero();
        }
        let pos = (x - lo) / self.step;
        let i = pos.floor().to_usize().unwrap_or(0).min(n - 2);
        let frac = pos - T::from_usize_lossy(i);
        self.weights[i] * (T::one() - frac) + self.weights[i + 1] * frac
    }

    /// Same distribution with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.base.iter_mut().for_each(|w| *w *= factor);
        out.refresh();
        out
    }

    /// Rescaled so that `norm() == 1`.
    pub fn normalized(&self) -> Result<Self> {
        if !(self.norm > T::zero()) {
            return Err(Error::EmptyDistribution);
        }
        Ok(self.scaled(T::one() / self.norm))
    }

    /// Trapezoid quadrature weights (weight × node weight), in node order.
    pub fn quadrature_weights(&self) -> Vec<T> {
        quadrature(&self.weights, self.step)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.deltas == other.deltas
    }

    fn refresh(&mut self) {
        self.holes.sort_by(|a, b| a.sort_key().partial_cmp(&b.sort_key()).unwrap_or(std::cmp::Ordering::Equal));
        self.weights = self
            .deltas
            .iter()
            .zip(&self.base)
            .map(|(&x, &w)| {
                let kept = self.holes.iter().fold(T::one(), |acc, h| acc * h.transmission(x));
                (w * kept).max(T::zero())
            })
            .collect();
        self.norm = trapezoid(&self.weights, self.step);
    }
}

fn uniform_step<T: Real>(deltas: &[T]) -> Result<T> {
    if deltas.len() == 1 {
        return Ok(T::zero());
    }
    let n = deltas.len();
    let step = (deltas[n - 1] - deltas[0]) / T::from_usize_lossy(n - 1);
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::GridNotUniform);
    }
    let tol = T::lit(UNIFORM_TOL) * step;
    let uniform = deltas.windows(2).all(|w| {
        let d = w[1] - w[0];
        d > T::zero() && (d - step).abs() <= tol
    });
    if uniform {
        Ok(step)
    } else {
        Err(Error::GridNotUniform)
    }
}

fn quadrature<T: Real>(weights: &[T], step: T) -> Vec<T> {
    let n = weights.len();
    if n == 1 {
        return weights.to_vec();
    }
    let half = T::lit(0.5);
    weights
        .iter()
        .enumerate()
        .map(|(i, &w)| if i == 0 || i == n - 1 { w * step * half } else { w * step })
        .collect()
}

fn trapezoid<T: Real>(weights: &[T], step: T) -> T {
    quadrature(weights, step).into_iter().sum()
}

/// Normalized Gaussian with the given HWHM on a symmetric grid
/// [−half_range, +half_range].
pub fn gaussian_distribution<T: Real>(hwhm: T, half_range: T, n_nodes: usize) -> Result<VelocityDistribution<T>> {
    if n_nodes < 3 {
        return Err(Error::GridTooCoarse);
    }
    if !(hwhm > T::zero()) || !(half_range > T::zero()) {
        return Err(Error::InvalidInput("hwhm and half_range must be > 0".into()));
    }
    let sigma = gaussian_sigma(hwhm);
    let mid = T::from_usize_lossy(n_nodes - 1) / T::lit(2.0);
    let step = half_range / mid;
    // (i - mid) is exact, so node i and node n-1-i are exact negatives
    let deltas: Vec<T> = (0..n_nodes).map(|i| (T::from_usize_lossy(i) - mid) * step).collect();
    let raw: Vec<T> = deltas
        .iter()
        .map(|&x| (-(x * x) / (T::lit(2.0) * sigma * sigma)).exp())
        .collect();
    let norm = trapezoid(&raw, step);
    let weights = raw.into_iter().map(|w| w / norm).collect();
    Ok(VelocityDistribution::assemble(deltas, step, weights))
}

/// σ = HWHM / √(2 ln 2).
pub fn gaussian_sigma<T: Real>(hwhm: T) -> T {
    hwhm / (T::lit(2.0) * T::LN_2()).sqrt()
}

/// Multiplies the hole into the distribution. Holes commute exactly.
pub fn apply_hole<T: Real>(dist: &VelocityDistribution<T>, hole: HoleSpec<T>) -> Result<VelocityDistribution<T>> {
    hole.validate()?;
    let (lo, hi) = (dist.deltas[0], dist.deltas[dist.len() - 1]);
    if hole.center < lo || hole.center > hi {
        return Err(Error::HoleOutsideSupport);
    }
    let mut out = dist.clone();
    out.holes.push(hole);
    out.refresh();
    Ok(out)
}

pub fn apply_holes<T: Real>(dist: &VelocityDistribution<T>, holes: &[HoleSpec<T>]) -> Result<VelocityDistribution<T>> {
    holes.iter().try_fold(dist.clone(), |d, h| apply_hole(&d, *h))
}

/// Parses the two-column distribution format. Weights are not renormalized.
pub fn parse_distribution<T: Real>(text: &str) -> Result<VelocityDistribution<T>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == DISTRIBUTION_HEADER => {}
        _ => return Err(Error::Parse { line: 1 }),
    }
    let mut deltas = Vec::new();
    let mut weights = Vec::new();
    let mut last_line = 1;
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        last_line = line_no;
        let mut cols = line.split(',');
        let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Parse { line: line_no });
        };
        let x: f64 = a.trim().parse().map_err(|_| Error::Parse { line: line_no })?;
        let w: f64 = b.trim().parse().map_err(|_| Error::Parse { line: line_no })?;
        if !x.is_finite() || !w.is_finite() {
            return Err(Error::Parse { line: line_no });
        }
        if w < 0.0 {
            return Err(Error::NegativeWeight { line: line_no });
        }
        deltas.push(T::lit(x));
        weights.push(T::lit(w));
    }
    if deltas.is_empty() {
        return Err(Error::Parse { line: last_line + 1 });
    }
    if deltas.len() == 1 {
        let mut d = VelocityDistribution::point(deltas[0]);
        d.base = weights;
        d.refresh();
        return Ok(d);
    }
    let step = uniform_step(&deltas)?;
    Ok(VelocityDistribution::assemble(deltas, step, weights))
}

pub fn load_distribution<T: Real>(path: impl AsRef<Path>) -> Result<VelocityDistribution<T>> {
    let text = std::fs::read_to_string(path)?;
    parse_distribution(&text)
}

/// Quadrature-weighted average of a row of single-atom values.
#[inline]
fn weighted_average<T: Real>(row: impl Iterator<Item = Complex<T>>, q: &[T], norm: T) -> Complex<T> {
    let sum = row
        .zip(q)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (chi, &w)| acc + chi * w);
    sum / norm
}

/// Velocity-averaged susceptibility at one two-photon detuning.
pub fn ensemble_susceptibility<T: Real>(
    scheme: &LevelScheme<T>,
    fields: &FieldConfig<T>,
    dist: &VelocityDistribution<T>,
    delta_2ph: T,
) -> Result<Susceptibility<T>> {
    scheme.validate()?;
    fields.validate()?;
    if !(dist.norm() > T::zero()) {
        return Err(Error::EmptyDistribution);
    }
    let row: Vec<Complex<T>> = dist
        .deltas
        .iter()
        .map(|&dd| susceptibility_unchecked(scheme, fields, DetuningPoint::new(delta_2ph, dd)).map(|s| s.value))
        .collect::<Result<_>>()?;
    let q = dist.quadrature_weights();
    Ok(Susceptibility::new(weighted_average(row.into_iter(), &q, dist.norm())))
}

/// Single-atom susceptibility tabulated over (two-photon grid × Doppler
/// nodes). The ensemble average is linear in the weights, so one table
/// serves every reshaped distribution on the same Doppler grid.
#[derive(Debug, Clone)]
pub struct EnsembleKernel<T> {
    grid: Vec<T>,
    deltas: Vec<T>,
    table: Vec<Complex<T>>,
}

impl<T: Real> EnsembleKernel<T> {
    /// Rows are evaluated in parallel; each row is a fixed sequential loop,
    /// so the table is identical for any thread count.
    pub fn build(
        scheme: &LevelScheme<T>,
        fields: &FieldConfig<T>,
        deltas: &[T],
        grid: &[T],
    ) -> Result<Self> {
        scheme.validate()?;
        fields.validate()?;
        if grid.is_empty() || deltas.is_empty() {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        let rows: Vec<Vec<Complex<T>>> = grid
            .par_iter()
            .map(|&d2| {
                deltas
                    .iter()
                    .map(|&dd| susceptibility_unchecked(scheme, fields, DetuningPoint::new(d2, dd)).map(|s| s.value))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            grid: grid.to_vec(),
            deltas: deltas.to_vec(),
            table: rows.into_iter().flatten().collect(),
        })
    }

    pub fn for_distribution(
        scheme: &LevelScheme<T>,
        fields: &FieldConfig<T>,
        dist: &VelocityDistribution<T>,
        grid: &[T],
    ) -> Result<Self> {
        Self::build(scheme, fields, dist.deltas(), grid)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn deltas(&self) -> &[T] {
        &self.deltas
    }

    /// Single-atom value at (grid index, node index).
    pub fn single(&self, grid_idx: usize, node_idx: usize) -> Complex<T> {
        self.table[grid_idx * self.deltas.len() + node_idx]
    }

    /// Ensemble susceptibility at every grid point for `dist`, which must
    /// sit on the kernel's Doppler nodes.
    pub fn average(&self, dist: &VelocityDistribution<T>) -> Result<Vec<Complex<T>>> {
        if dist.deltas() != self.deltas.as_slice() {
            return Err(Error::DistributionMismatch);
        }
        if !(dist.norm() > T::zero()) {
            return Err(Error::EmptyDistribution);
        }
        let q = dist.quadrature_weights();
        let m = self.deltas.len();
        Ok(self
            .table
            .par_chunks(m)
            .map(|row| weighted_average(row.iter().copied(), &q, dist.norm()))
            .collect())
    }
}
