use std::path::PathBuf;

use eit_forge::{
    analysis::{absorption_map, detrimental_velocity_roots, eit_contrast, linspace, spectrum_from_kernel},
    optimize_holes, scan_hole_center, ContrastProblem, EnsembleKernel, OptimizeOptions,
};

use crate::config::{Mode, RunConfig};
use crate::error::{CliError, Context};
use crate::output::{csv, num, report, with_suffix, write_all_atomic};

/// Files written and text for standard output.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub stdout: String,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let files = match cfg.mode {
        Mode::Roots => return roots(cfg),
        Mode::Spectrum => spectrum(cfg)?,
        Mode::Scan => scan(cfg)?,
        Mode::Optimize => optimize(cfg)?,
        Mode::VelocityMap => velocity_map(cfg)?,
    };
    write_all_atomic(&files)?;
    Ok(Outcome { files: files.into_iter().map(|(p, _)| p).collect(), stdout: String::new() })
}

fn grid(cfg: &RunConfig) -> Vec<f64> {
    linspace(cfg.grid.0, cfg.grid.1, cfg.grid.2)
}

fn out(cfg: &RunConfig, suffix: &str) -> PathBuf {
    with_suffix(&cfg.output_prefix, suffix)
}

fn spectrum(cfg: &RunConfig) -> Result<Vec<(PathBuf, String)>, CliError> {
    let grid = grid(cfg);
    let kernel = EnsembleKernel::for_distribution(&cfg.scheme, &cfg.fields, &cfg.distribution, &grid)
        .during("susceptibility table")?;
    let spec = spectrum_from_kernel(&kernel, &cfg.distribution, cfg.optical_depth).during("transmission spectrum")?;
    let rep = eit_contrast(&spec, cfg.window).during("eit contrast")?;

    let rows: Vec<[f64; 4]> =
        spec.points.iter().map(|p| [p.delta_2ph, p.chi.re, p.chi.im, p.transmission]).collect();
    let text = csv("delta_2ph_mhz,re_chi,im_chi,transmission", rows.iter().map(|r| &r[..]));
    let summary = report(&[
        ("t_max", num(rep.t_max)),
        ("t_min", num(rep.t_min)),
        ("contrast", num(rep.contrast)),
        ("peak_location_mhz", num(rep.peak_location)),
        ("window_mhz", format!("{},{}", num(rep.window.0), num(rep.window.1))),
        ("optical_depth", num(cfg.optical_depth)),
    ]);
    Ok(vec![(out(cfg, "_spectrum.csv"), text), (out(cfg, "_report.txt"), summary)])
}

fn problem<'a>(cfg: &'a RunConfig, grid: &'a [f64]) -> ContrastProblem<'a, f64> {
    ContrastProblem {
        scheme: &cfg.scheme,
        fields: &cfg.fields,
        base: &cfg.distribution,
        grid,
        optical_depth: cfg.optical_depth,
        window: cfg.window,
    }
}

fn scan_centers(cfg: &RunConfig) -> Vec<f64> {
    let (lo, hi, step) = cfg.scan;
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| lo + step * i as f64).collect()
}

fn scan(cfg: &RunConfig) -> Result<Vec<(PathBuf, String)>, CliError> {
    let grid = grid(cfg);
    let result = scan_hole_center(&problem(cfg, &grid), cfg.hole_template, &scan_centers(cfg)).during("hole scan")?;
    let rows: Vec<[f64; 2]> = result.samples.iter().map(|&(c, v)| [c, v]).collect();
    Ok(vec![(out(cfg, "_scan.csv"), csv("hole_center_mhz,contrast", rows.iter().map(|r| &r[..])))])
}

fn optimize(cfg: &RunConfig) -> Result<Vec<(PathBuf, String)>, CliError> {
    let grid = grid(cfg);
    let p = problem(cfg, &grid);
    let options = OptimizeOptions { joint_shape: cfg.optimize_shape, ..OptimizeOptions::default() };
    let r = optimize_holes(&p, cfg.n_holes, cfg.bounds, cfg.hole_template, options).during("hole optimization")?;

    let kernel = EnsembleKernel::for_distribution(&cfg.scheme, &cfg.fields, &cfg.distribution, &grid)
        .during("susceptibility table")?;
    let base_spec = spectrum_from_kernel(&kernel, &cfg.distribution, cfg.optical_depth).during("transmission spectrum")?;
    let base = eit_contrast(&base_spec, cfg.window).during("eit contrast")?;

    let mut holes = String::from("center_mhz,depth,hwhm_mhz,profile\n");
    for h in &r.holes {
        holes.push_str(&format!("{},{},{},{}\n", num(h.center), num(h.depth), num(h.hwhm), h.profile.name()));
    }
    let summary = report(&[
        ("contrast", num(r.contrast)),
        ("seed_contrast", num(r.seed_contrast)),
        ("base_contrast", num(base.contrast)),
        ("converged", r.converged.to_string()),
        ("iterations", r.iterations.to_string()),
        ("evaluations", r.evaluations.to_string()),
    ]);
    Ok(vec![(out(cfg, "_holes.csv"), holes), (out(cfg, "_report.txt"), summary)])
}

fn roots(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let levels = &cfg.scheme.excited_levels;
    let r = detrimental_velocity_roots(levels[0].control_weight, levels[1].control_weight, levels[1].offset)
        .during("detrimental velocity roots")?;
    let stdout = format!(
        "root1_mhz,root2_mhz,principal_mhz\n{},{},{}\n",
        num(r.roots[0]),
        num(r.roots[1]),
        num(r.principal)
    );
    Ok(Outcome { files: Vec::new(), stdout })
}

fn velocity_map(cfg: &RunConfig) -> Result<Vec<(PathBuf, String)>, CliError> {
    let grid = grid(cfg);
    let dopplers = linspace(cfg.map_doppler.0, cfg.map_doppler.1, cfg.map_doppler.2);
    let map = absorption_map(&cfg.scheme, &cfg.fields, &dopplers, &grid).during("absorption map")?;
    let rows: Vec<[f64; 3]> = dopplers
        .iter()
        .zip(&map)
        .flat_map(|(&dd, row)| grid.iter().zip(row).map(move |(&d2, &a)| [dd, d2, a]))
        .collect();
    Ok(vec![(out(cfg, "_map.csv"), csv("delta_doppler_mhz,delta_2ph_mhz,im_chi", rows.iter().map(|r| &r[..])))])
}
