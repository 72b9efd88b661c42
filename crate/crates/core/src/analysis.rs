//! Transmission spectra, the EIT contrast metric, Raman peak location, the
//! detrimental-velocity equation and the dispersion-slope (group delay)
//! proxy.

use num_complex::Complex;
use rayon::prelude::*;

use crate::broadening::{EnsembleKernel, VelocityDistribution};
use crate::coherence::susceptibility_unchecked;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scheme::{DetuningPoint, FieldConfig, LevelScheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint<T> {
    pub delta_2ph: T,
    pub chi: Complex<T>,
    pub transmission: T,
}

/// Probe transmission `exp(−OD · Im χ)` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub points: Vec<SpectrumPoint<T>>,
    pub optical_depth: T,
}

impl<T: Real> Spectrum<T> {
    pub fn from_chi(grid: &[T], chi: &[Complex<T>], optical_depth: T) -> Result<Self> {
        if grid.is_empty() || grid.len() != chi.len() {
            return Err(Error::InvalidInput("grid and susceptibility lengths differ".into()));
        }
        if !grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput("detuning grid must be strictly increasing".into()));
        }
        if !(optical_depth >= T::zero()) || !optical_depth.is_finite() {
            return Err(Error::InvalidInput("optical_depth must be >= 0".into()));
        }
        let points = grid
            .iter()
            .zip(chi)
            .map(|(&d, &c)| SpectrumPoint { delta_2ph: d, chi: c, transmission: (-optical_depth * c.im).exp() })
            .collect();
        Ok(Self { points, optical_depth })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn grid(&self) -> Vec<T> {
        self.points.iter().map(|p| p.delta_2ph).collect()
    }

    pub fn transmission(&self) -> Vec<T> {
        self.points.iter().map(|p| p.transmission).collect()
    }

    /// Same susceptibility, different optical depth.
    pub fn with_optical_depth(&self, optical_depth: T) -> Result<Self> {
        let chi: Vec<_> = self.points.iter().map(|p| p.chi).collect();
        Self::from_chi(&self.grid(), &chi, optical_depth)
    }

    /// Index range `[lo, hi]` of grid points inside `window`.
    fn window_indices(&self, window: (T, T)) -> Result<(usize, usize)> {
        let (a, b) = window;
        let first = self.points[0].delta_2ph;
        let last = self.points[self.len() - 1].delta_2ph;
        if !(a < b) || a < first || b > last {
            return Err(Error::WindowOutOfRange);
        }
        let lo = self.points.iter().position(|p| p.delta_2ph >= a).ok_or(Error::WindowOutOfRange)?;
        let hi = self.points.iter().rposition(|p| p.delta_2ph <= b).ok_or(Error::WindowOutOfRange)?;
        if hi < lo || hi - lo + 1 < 5 {
            return Err(Error::InvalidInput("contrast window must contain at least 5 grid points".into()));
        }
        Ok((lo, hi))
    }

    /// Index of the transmission maximum inside `window` (first on ties).
    pub fn peak_index(&self, window: (T, T)) -> Result<usize> {
        let (lo, hi) = self.window_indices(window)?;
        Ok(argmax(self.points[lo..=hi].iter().map(|p| p.transmission)) + lo)
    }
}

fn argmax<T: Real>(values: impl Iterator<Item = T>) -> usize {
    values
        .enumerate()
        .fold((0, T::neg_infinity()), |best, (i, v)| if v > best.1 { (i, v) } else { best })
        .0
}

/// Ensemble transmission spectrum over `grid`.
pub fn transmission_spectrum<T: Real>(
    scheme: &LevelScheme<T>,
    fields: &FieldConfig<T>,
    dist: &VelocityDistribution<T>,
    grid: &[T],
    optical_depth: T,
) -> Result<Spectrum<T>> {
    let kernel = EnsembleKernel::for_distribution(scheme, fields, dist, grid)?;
    spectrum_from_kernel(&kernel, dist, optical_depth)
}

/// Spectrum of `dist` using a precomputed single-atom table.
pub fn spectrum_from_kernel<T: Real>(
    kernel: &EnsembleKernel<T>,
    dist: &VelocityDistribution<T>,
    optical_depth: T,
) -> Result<Spectrum<T>> {
    let chi = kernel.average(dist)?;
    Spectrum::from_chi(kernel.grid(), &chi, optical_depth)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastReport<T> {
    pub t_max: T,
    pub t_min: T,
    pub contrast: T,
    pub peak_location: T,
    pub window: (T, T),
}

/// C = (t_max − t_min) / (1 − t_min).
///
/// `t_max` is the largest transmission in the window. `t_min` is the lowest
/// transmission between the peak and either window edge; the side with the
/// stronger absorption wins. A spectrum that is unity everywhere gives C = 0.
pub fn eit_contrast<T: Real>(spec: &Spectrum<T>, window: (T, T)) -> Result<ContrastReport<T>> {
    let (lo, hi) = spec.window_indices(window)?;
    let t: Vec<T> = spec.points.iter().map(|p| p.transmission).collect();
    let peak = argmax(t[lo..=hi].iter().copied()) + lo;
    let t_max = t[peak];
    let min_of = |s: &[T]| s.iter().copied().fold(T::infinity(), T::min);
    let t_min = min_of(&t[lo..=peak]).min(min_of(&t[peak..=hi]));
    let contrast = if t_min >= T::one() { T::zero() } else { (t_max - t_min) / (T::one() - t_min) };
    Ok(ContrastReport { t_max, t_min, contrast, peak_location: spec.points[peak].delta_2ph, window })
}

const PEAK_SAMPLES: usize = 401;
const PEAK_MAX_ZOOMS: usize = 40;

/// Absorption maximum of the single-atom spectrum inside `search`.
///
/// Repeatedly resamples the bracket around the grid maximum, then refines
/// with a three-point parabola. Resolves the very narrow Raman lines of
/// far-detuned classes.
pub fn find_raman_peak<T: Real>(
    scheme: &LevelScheme<T>,
    fields: &FieldConfig<T>,
    delta_doppler: T,
    search: (T, T),
) -> Result<T> {
    scheme.validate()?;
    fields.validate()?;
    let (mut a, mut b) = search;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("search interval must be finite and increasing".into()));
    }
    let absorption = |d2: T| -> Result<T> {
        susceptibility_unchecked(scheme, fields, DetuningPoint::new(d2, delta_doppler)).map(|s| s.absorption())
    };
    let last = PEAK_SAMPLES - 1;
    let scale = a.abs().max(b.abs()).max(T::one());

    for zoom in 0..PEAK_MAX_ZOOMS {
        let step = (b - a) / T::from_usize_lossy(last);
        let xs: Vec<T> = (0..PEAK_SAMPLES).map(|j| a + step * T::from_usize_lossy(j)).collect();
        let ys: Vec<T> = xs.iter().map(|&x| absorption(x)).collect::<Result<_>>()?;
        let i = argmax(ys.iter().copied());
        if zoom == 0 && (i == 0 || i == last) {
            return Err(Error::PeakNotBracketed);
        }
        let i = i.clamp(1, last - 1);
        if step <= T::lit(1e-9) * scale || zoom + 1 == PEAK_MAX_ZOOMS {
            return Ok(parabolic_vertex(xs[i - 1], xs[i], xs[i + 1], ys[i - 1], ys[i], ys[i + 1]));
        }
        a = xs[i - 1];
        b = xs[i + 1];
    }
    unreachable!()
}

/// Vertex of the parabola through three equally spaced points.
fn parabolic_vertex<T: Real>(x0: T, x1: T, x2: T, y0: T, y1: T, y2: T) -> T {
    let denom = y0 - T::lit(2.0) * y1 + y2;
    if denom >= T::zero() {
        return x1;
    }
    let h = (x2 - x0) / T::lit(2.0);
    let shift = T::lit(0.5) * (y0 - y2) / denom;
    x1 + shift.max(-T::one()).min(T::one()) * h
}

/// Both solutions Δ_0 of
/// `|d|²/Δ_0 + |d′|²/(Δ_0 − ω) = −|d′|²/ω`,
/// i.e. of `r Δ_0² + ω Δ_0 − ω² = 0` with `r = |d′|²/|d|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetrimentalRoots<T> {
    /// `[root in (0, ω), negative root]`.
    pub roots: [T; 2],
    /// The root between the two control resonances.
    pub principal: T,
}

/// Residual of the rational equation, relative to the magnitude of its terms.
pub fn detrimental_residual<T: Real>(d: T, d_prime: T, omega_ee: T, delta0: T) -> T {
    let (a, b) = (d * d, d_prime * d_prime);
    let t1 = a / delta0;
    let t2 = b / (delta0 - omega_ee);
    let t3 = b / omega_ee;
    (t1 + t2 + t3).abs() / (t1.abs() + t2.abs() + t3.abs())
}

pub fn detrimental_velocity_roots<T: Real>(d: T, d_prime: T, omega_ee: T) -> Result<DetrimentalRoots<T>> {
    if d == T::zero() || d_prime == T::zero() || !d.is_finite() || !d_prime.is_finite() {
        return Err(Error::InvalidInput("dipole weights must be finite and nonzero".into()));
    }
    if !(omega_ee > T::zero()) || !omega_ee.is_finite() {
        return Err(Error::InvalidInput("excited splitting must be > 0".into()));
    }
    let r = (d_prime * d_prime) / (d * d);
    let disc = (T::one() + T::lit(4.0) * r).sqrt();
    // cancellation-free forms of ω(−1 ± √(1+4r)) / 2r
    let inner = T::lit(2.0) * omega_ee / (T::one() + disc);
    let outer = -omega_ee * (T::one() + disc) / (T::lit(2.0) * r);
    let polish = |x: T| -> T {
        // one Newton step on the quadratic
        let f = r * x * x + omega_ee * x - omega_ee * omega_ee;
        let df = T::lit(2.0) * r * x + omega_ee;
        if df == T::zero() { x } else { x - f / df }
    };
    let roots = [polish(inner), polish(outer)];
    for &x in &roots {
        if x == T::zero() || x == omega_ee || !x.is_finite() {
            return Err(Error::DegenerateRoot);
        }
    }
    Ok(DetrimentalRoots { roots, principal: roots[0] })
}

/// Ratio of dispersion slopes d(Re χ)/dΔ_2ph, `spec_b` over `spec_a`, each
/// taken at its own EIT peak (transmission maximum inside `window`).
pub fn group_delay_factor<T: Real>(spec_a: &Spectrum<T>, spec_b: &Spectrum<T>, window: (T, T)) -> Result<T> {
    if spec_a.grid() != spec_b.grid() {
        return Err(Error::GridMismatch);
    }
    let sa = dispersion_slope_at(spec_a, spec_a.peak_index(window)?)?;
    let sb = dispersion_slope_at(spec_b, spec_b.peak_index(window)?)?;
    if sa == T::zero() {
        return Err(Error::ZeroReferenceSlope);
    }
    Ok(sb / sa)
}

/// Central-difference d(Re χ)/dΔ_2ph at grid index `i`.
pub fn dispersion_slope_at<T: Real>(spec: &Spectrum<T>, i: usize) -> Result<T> {
    if i == 0 || i + 1 >= spec.len() {
        return Err(Error::BoundaryDerivative);
    }
    let (p0, p2) = (&spec.points[i - 1], &spec.points[i + 1]);
    Ok((p2.chi.re - p0.chi.re) / (p2.delta_2ph - p0.delta_2ph))
}

/// Single-atom absorption Im χ over (Doppler detuning × two-photon
/// detuning), row-major by Doppler detuning.
pub fn absorption_map<T: Real>(
    scheme: &LevelScheme<T>,
    fields: &FieldConfig<T>,
    dopplers: &[T],
    grid: &[T],
) -> Result<Vec<Vec<T>>> {
    scheme.validate()?;
    fields.validate()?;
    dopplers
        .par_iter()
        .map(|&dd| {
            grid.iter()
                .map(|&d2| susceptibility_unchecked(scheme, fields, DetuningPoint::new(d2, dd)).map(|s| s.absorption()))
                .collect()
        })
        .collect()
}

/// `n` evenly spaced points on `[min, max]` (both included).
pub fn linspace<T: Real>(min: T, max: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / T::from_usize_lossy(n - 1);
            (0..n)
                .map(|i| if i == n - 1 { max } else { min + step * T::from_usize_lossy(i) })
                .collect()
        }
    }
}
