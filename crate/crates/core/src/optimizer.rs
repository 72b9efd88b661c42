//! Hole-center scans and derivative-free optimization of depump holes for
//! maximum EIT contrast.
//!
//! Every objective evaluation reuses one [`EnsembleKernel`]: reshaping the
//! velocity distribution only changes the quadrature weights.

use crate::analysis::{eit_contrast, spectrum_from_kernel};
use crate::broadening::{apply_hole, apply_holes, EnsembleKernel, HoleSpec, VelocityDistribution};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scheme::{FieldConfig, LevelScheme};

/// Shared evaluation context: spectrum grid, optical depth and contrast
/// window.
#[derive(Debug, Clone)]
pub struct ContrastProblem<'a, T> {
    pub scheme: &'a LevelScheme<T>,
    pub fields: &'a FieldConfig<T>,
    pub base: &'a VelocityDistribution<T>,
    pub grid: &'a [T],
    pub optical_depth: T,
    pub window: (T, T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult<T> {
    /// `(hole_center, contrast)` in input order.
    pub samples: Vec<(T, T)>,
    pub best_center: T,
    pub best_contrast: T,
}

struct Objective<'a, T> {
    kernel: EnsembleKernel<T>,
    base: &'a VelocityDistribution<T>,
    optical_depth: T,
    window: (T, T),
}

impl<'a, T: Real> Objective<'a, T> {
    fn new(p: &ContrastProblem<'a, T>) -> Result<Self> {
        Ok(Self {
            kernel: EnsembleKernel::for_distribution(p.scheme, p.fields, p.base, p.grid)?,
            base: p.base,
            optical_depth: p.optical_depth,
            window: p.window,
        })
    }

    fn contrast(&self, holes: &[HoleSpec<T>]) -> Result<T> {
        let dist = apply_holes(self.base, holes)?;
        let spec = spectrum_from_kernel(&self.kernel, &dist, self.optical_depth)?;
        Ok(eit_contrast(&spec, self.window)?.contrast)
    }
}

/// Contrast of the base distribution with one `template` hole moved to each
/// center in turn.
pub fn scan_hole_center<T: Real>(
    problem: &ContrastProblem<'_, T>,
    hole_template: HoleSpec<T>,
    centers: &[T],
) -> Result<ScanResult<T>> {
    if centers.is_empty() {
        return Err(Error::InvalidInput("no hole centers to scan".into()));
    }
    hole_template.validate()?;
    let objective = Objective::new(problem)?;
    let mut samples = Vec::with_capacity(centers.len());
    for &c in centers {
        // checks support before the (cheaper) kernel average
        apply_hole(problem.base, hole_template.at(c))?;
        samples.push((c, objective.contrast(&[hole_template.at(c)])?));
    }
    let (best_center, best_contrast) = samples
        .iter()
        .copied()
        .fold((samples[0].0, T::neg_infinity()), |b, s| if s.1 > b.1 { s } else { b });
    Ok(ScanResult { samples, best_center, best_contrast })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions<T> {
    /// Also optimize each hole's depth and width.
    pub joint_shape: bool,
    /// Spacing of the coarse seeding grid, MHz.
    pub coarse_step: T,
    /// Convergence: every simplex vertex within this distance of the best
    /// one in every center coordinate, MHz.
    pub center_tol: T,
    pub max_iterations: usize,
}

impl<T: Real> Default for OptimizeOptions<T> {
    fn default() -> Self {
        Self {
            joint_shape: false,
            coarse_step: T::lit(5.0),
            center_tol: T::lit(0.5),
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult<T> {
    /// Sorted by center.
    pub holes: Vec<HoleSpec<T>>,
    pub contrast: T,
    /// Best contrast found by the coarse seeding stage.
    pub seed_contrast: T,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
}

const MAX_HOLES: usize = 4;
const HWHM_RANGE: (f64, f64) = (0.5, 50.0);
const DEPTH_TOL: f64 = 5e-3;
const HWHM_TOL: f64 = 0.1;

/// Parameter layout: `[c_0..c_n, depth_0..depth_n, hwhm_0..hwhm_n]`, the
/// shape block present only with `joint_shape`.
struct Layout<T> {
    n: usize,
    joint: bool,
    template: HoleSpec<T>,
    bounds: (T, T),
}

impl<T: Real> Layout<T> {
    fn dim(&self) -> usize {
        if self.joint { 3 * self.n } else { self.n }
    }

    fn clamp(&self, x: &mut [T]) {
        for (i, v) in x.iter_mut().enumerate() {
            let (lo, hi) = match i / self.n {
                0 => self.bounds,
                1 => (T::zero(), T::one()),
                _ => (T::lit(HWHM_RANGE.0), T::lit(HWHM_RANGE.1)),
            };
            *v = v.max(lo).min(hi);
        }
    }

    fn holes(&self, x: &[T]) -> Vec<HoleSpec<T>> {
        (0..self.n)
            .map(|k| {
                let mut h = self.template.at(x[k]);
                if self.joint {
                    h.depth = x[self.n + k];
                    h.hwhm = x[2 * self.n + k];
                }
                h
            })
            .collect()
    }

    fn tolerance(&self, i: usize, center_tol: T) -> T {
        match i / self.n {
            0 => center_tol,
            1 => T::lit(DEPTH_TOL),
            _ => T::lit(HWHM_TOL),
        }
    }

    fn initial_step(&self, i: usize, coarse_step: T) -> T {
        match i / self.n {
            0 => coarse_step,
            1 => T::lit(0.1),
            _ => T::lit(2.0),
        }
    }
}

/// Maximizes contrast over `n_holes` hole centers inside `bounds`.
///
/// Holes are seeded one at a time on a coarse grid (each new hole scanned
/// with the previous ones in place), then refined jointly with a bounded
/// Nelder–Mead simplex. The result never falls below the best seed.
pub fn optimize_holes<T: Real>(
    problem: &ContrastProblem<'_, T>,
    n_holes: usize,
    bounds: (T, T),
    template: HoleSpec<T>,
    options: OptimizeOptions<T>,
) -> Result<OptimizeResult<T>> {
    if !(1..=MAX_HOLES).contains(&n_holes) {
        return Err(Error::InvalidInput(format!("n_holes must be in 1..={MAX_HOLES}")));
    }
    template.validate()?;
    let (lo, hi) = bounds;
    let deltas = problem.base.deltas();
    if !(lo < hi) || lo < deltas[0] || hi > deltas[deltas.len() - 1] {
        return Err(Error::HoleOutsideSupport);
    }
    if !(options.coarse_step > T::zero()) || !(options.center_tol > T::zero()) {
        return Err(Error::InvalidInput("coarse_step and center_tol must be > 0".into()));
    }

    let objective = Objective::new(problem)?;
    let layout = Layout { n: n_holes, joint: options.joint_shape, template, bounds };
    let mut evaluations = 0usize;

    // greedy coarse seeding
    let coarse = coarse_grid(lo, hi, options.coarse_step);
    let mut seed: Vec<T> = Vec::with_capacity(layout.dim());
    let mut seed_contrast = T::neg_infinity();
    for k in 0..n_holes {
        let sub = Layout { n: k + 1, joint: false, template, bounds };
        let mut best = (coarse[0], T::neg_infinity());
        for &c in &coarse {
            let mut x = seed.clone();
            x.push(c);
            evaluations += 1;
            let v = objective.contrast(&sub.holes(&x))?;
            if v > best.1 {
                best = (c, v);
            }
        }
        seed.push(best.0);
        seed_contrast = best.1;
    }
    if options.joint_shape {
        seed.extend(std::iter::repeat_n(template.depth, n_holes));
        seed.extend(std::iter::repeat_n(template.hwhm, n_holes));
    }

    let mut eval = |x: &[T]| -> Result<T> {
        evaluations += 1;
        objective.contrast(&layout.holes(x))
    };
    let (x_best, f_best, converged, iterations) =
        nelder_mead_max(&layout, &seed, seed_contrast, &mut eval, options)?;

    let mut holes = layout.holes(&x_best);
    holes.sort_by(|a, b| a.center.partial_cmp(&b.center).unwrap_or(std::cmp::Ordering::Equal));
    Ok(OptimizeResult {
        holes,
        contrast: f_best,
        seed_contrast,
        converged,
        iterations,
        evaluations,
    })
}

fn coarse_grid<T: Real>(lo: T, hi: T, step: T) -> Vec<T> {
    let n = ((hi - lo) / step).floor().to_usize().unwrap_or(0);
    let mut v: Vec<T> = (0..=n).map(|i| lo + step * T::from_usize_lossy(i)).collect();
    if *v.last().unwrap() < hi {
        v.push(hi);
    }
    v
}

/// Bounded Nelder–Mead maximization (standard coefficients 1, 2, ½, ½),
/// starting from `x0` whose value `f0` is already known.
fn nelder_mead_max<T: Real>(
    layout: &Layout<T>,
    x0: &[T],
    f0: T,
    eval: &mut impl FnMut(&[T]) -> Result<T>,
    options: OptimizeOptions<T>,
) -> Result<(Vec<T>, T, bool, usize)> {
    let dim = layout.dim();
    let half = T::lit(0.5);
    let two = T::lit(2.0);

    let mut simplex: Vec<(Vec<T>, T)> = vec![(x0.to_vec(), f0)];
    for i in 0..dim {
        let mut x = x0.to_vec();
        let step = layout.initial_step(i, options.coarse_step);
        x[i] += step;
        layout.clamp(&mut x);
        if x[i] == x0[i] {
            x[i] -= step;
            layout.clamp(&mut x);
        }
        let f = eval(&x)?;
        simplex.push((x, f));
    }

    let combine = |a: &[T], b: &[T], t: T| -> Vec<T> {
        // a + t (b − a)
        a.iter().zip(b).map(|(&p, &q)| p + t * (q - p)).collect()
    };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iterations {
        // best first; stable sort keeps earlier vertices ahead on ties
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].0.clone();
        let collapsed = simplex[1..].iter().all(|(x, _)| {
            x.iter().zip(&best).enumerate().all(|(i, (&v, &b))| (v - b).abs() < layout.tolerance(i, options.center_tol))
        });
        if collapsed {
            converged = true;
            break;
        }
        iterations += 1;

        let worst = simplex[dim].clone();
        let centroid: Vec<T> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<T>() / T::from_usize_lossy(dim))
            .collect();

        let mut reflected = combine(&centroid, &worst.0, -T::one());
        layout.clamp(&mut reflected);
        let fr = eval(&reflected)?;

        if fr > simplex[0].1 {
            let mut expanded = combine(&centroid, &worst.0, -two);
            layout.clamp(&mut expanded);
            let fe = eval(&expanded)?;
            simplex[dim] = if fe > fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr > simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (mut contracted, outside) = if fr > worst.1 {
            (combine(&centroid, &reflected, half), true)
        } else {
            (combine(&centroid, &worst.0, half), false)
        };
        layout.clamp(&mut contracted);
        let fc = eval(&contracted)?;
        if (outside && fc >= fr) || (!outside && fc > worst.1) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        for v in simplex.iter_mut().skip(1) {
            let mut x = combine(&best, &v.0, half);
            layout.clamp(&mut x);
            let f = eval(&x)?;
            *v = (x, f);
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let (x, f) = simplex.swap_remove(0);
    Ok((x, f, converged, iterations))
}
