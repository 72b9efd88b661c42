//! Flat `key=value` run configuration.
//!
//! One pair per line, `#` starts a comment, lists are comma-separated and
//! levels are `offset:probe:control` triples separated by `;`. Anything not
//! given falls back to the cesium constants.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use eit_forge::{
    apply_holes, cesium, gaussian_distribution, load_distribution, ExcitedLevel, FieldConfig, HoleProfile, HoleSpec,
    LevelScheme, VelocityDistribution,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Scan,
    Optimize,
    Roots,
    VelocityMap,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "spectrum" => Ok(Mode::Spectrum),
            "scan" => Ok(Mode::Scan),
            "optimize" => Ok(Mode::Optimize),
            "roots" => Ok(Mode::Roots),
            "velocity-map" => Ok(Mode::VelocityMap),
            _ => Err("expected one of spectrum, scan, optimize, roots, velocity-map".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSource {
    Gaussian { hwhm: f64, half_range: f64, n_nodes: usize },
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub scheme: LevelScheme<f64>,
    pub fields: FieldConfig<f64>,
    pub source: DistributionSource,
    /// Base distribution with the configured holes already applied.
    pub distribution: VelocityDistribution<f64>,
    pub holes: Vec<HoleSpec<f64>>,
    /// Depth, width and profile used for scanned and optimized holes.
    pub hole_template: HoleSpec<f64>,
    pub grid: (f64, f64, usize),
    pub optical_depth: f64,
    pub window: (f64, f64),
    pub output_prefix: PathBuf,
    pub scan: (f64, f64, f64),
    pub n_holes: usize,
    pub bounds: (f64, f64),
    pub optimize_shape: bool,
    pub map_doppler: (f64, f64, usize),
}

const KEYS: &[&str] = &[
    "mode",
    "gamma_mhz",
    "gamma_sg_mhz",
    "ground_splitting_mhz",
    "levels",
    "omega_mhz",
    "control_detuning_mhz",
    "distribution",
    "hwhm_mhz",
    "half_range_mhz",
    "n_nodes",
    "distribution_file",
    "holes",
    "depth",
    "hole_hwhm_mhz",
    "hole_profile",
    "grid_min_mhz",
    "grid_max_mhz",
    "grid_points",
    "optical_depth",
    "window",
    "output_prefix",
    "scan_min_mhz",
    "scan_max_mhz",
    "scan_step_mhz",
    "n_holes",
    "bounds",
    "optimize_shape",
    "map_doppler_min_mhz",
    "map_doppler_max_mhz",
    "map_doppler_points",
];

/// Raw pairs with their line numbers.
struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Config { line, key: content.to_owned(), msg: "expected key=value".into() });
            };
            let key = key.trim().to_owned();
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config { line, key, msg: "unknown key".into() });
            }
            if let Some((first, _)) = map.get(&key) {
                return Err(CliError::Config { line, key, msg: format!("duplicate key (first set on line {first})") });
            }
            map.insert(key, (line, value.trim().to_owned()));
        }
        Ok(Self { map })
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> CliError {
        let line = self.map.get(key).map_or(0, |(l, _)| *l);
        CliError::Config { line, key: key.to_owned(), msg: msg.into() }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| self.err(key, format!("cannot parse {v:?}"))))
            .transpose()
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.get::<f64>(key)?.unwrap_or(default);
        if !v.is_finite() {
            return Err(self.err(key, "must be finite"));
        }
        Ok(v)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.number(key, default)?;
        if v <= 0.0 {
            return Err(self.err(key, format!("must be > 0, got {v}")));
        }
        Ok(v)
    }

    fn non_negative(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.number(key, default)?;
        if v < 0.0 {
            return Err(self.err(key, format!("must be >= 0, got {v}")));
        }
        Ok(v)
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        if v.is_empty() {
            return Ok(Some(Vec::new()));
        }
        v.split(',')
            .map(|x| match x.trim().parse::<f64>() {
                Ok(f) if f.is_finite() => Ok(f),
                _ => Err(self.err(key, format!("cannot parse {:?} as a number", x.trim()))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn pair(&self, key: &str, default: (f64, f64)) -> Result<(f64, f64), CliError> {
        match self.list(key)? {
            None => Ok(default),
            Some(v) if v.len() == 2 && v[0] < v[1] => Ok((v[0], v[1])),
            Some(_) => Err(self.err(key, "expected two increasing values `lo,hi`")),
        }
    }
}

fn parse_levels(e: &Entries, v: &str) -> Result<Vec<ExcitedLevel<f64>>, CliError> {
    v.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|triple| {
            let parts: Vec<f64> = triple
                .split(':')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| e.err("levels", format!("cannot parse level {triple:?}")))?;
            match parts[..] {
                [offset, probe, control] => Ok(ExcitedLevel::new(offset, probe, control)),
                _ => Err(e.err("levels", format!("level {triple:?} is not offset:probe:control"))),
            }
        })
        .collect()
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::MissingFile { path: path.to_owned(), source })?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_str(&text, base)
}

/// Parses config text; relative file paths resolve against `base_dir`.
pub fn parse_str(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    let e = Entries::parse(text)?;

    let mode = match e.raw("mode") {
        None => return Err(CliError::Config { line: 0, key: "mode".into(), msg: "missing required key".into() }),
        Some(v) => v.parse::<Mode>().map_err(|m| e.err("mode", m))?,
    };

    let gamma = e.positive("gamma_mhz", cesium::GAMMA_MHZ)?;
    let gamma_sg = e.non_negative("gamma_sg_mhz", cesium::GAMMA_SG_OVER_GAMMA * gamma)?;
    let ground_splitting = e.number("ground_splitting_mhz", cesium::GROUND_SPLITTING_MHZ)?;
    let mut scheme = LevelScheme::<f64>::cesium();
    scheme.gamma = gamma;
    scheme.gamma_sg = gamma_sg;
    scheme.ground_splitting = ground_splitting;
    if let Some(v) = e.raw("levels") {
        scheme.excited_levels = parse_levels(&e, v)?;
    }
    scheme.validate().map_err(|err| e.err(if e.raw("levels").is_some() { "levels" } else { "gamma_mhz" }, err.to_string()))?;

    let omega = e.non_negative("omega_mhz", cesium::OMEGA_OVER_GAMMA * gamma)?;
    let fields = FieldConfig::new(omega).with_control_detuning(e.number("control_detuning_mhz", 0.0)?);

    let source = match (e.raw("distribution"), e.raw("distribution_file")) {
        (None | Some("file"), Some(f)) => DistributionSource::File(base_dir.join(f)),
        (Some("file"), None) => return Err(e.err("distribution", "distribution=file needs distribution_file")),
        (None | Some("gaussian"), None) => {
            let n_nodes = e.get::<usize>("n_nodes")?.unwrap_or(1601);
            if n_nodes < 3 {
                return Err(e.err("n_nodes", format!("must be >= 3, got {n_nodes}")));
            }
            DistributionSource::Gaussian {
                hwhm: e.positive("hwhm_mhz", cesium::DOPPLER_HWHM_MHZ)?,
                half_range: e.positive("half_range_mhz", 3.0 * cesium::DOPPLER_HWHM_MHZ)?,
                n_nodes,
            }
        }
        (Some("gaussian"), Some(_)) => return Err(e.err("distribution_file", "given with distribution=gaussian")),
        (Some(other), _) => return Err(e.err("distribution", format!("expected gaussian or file, got {other:?}"))),
    };
    let unholed = match &source {
        DistributionSource::Gaussian { hwhm, half_range, n_nodes } => gaussian_distribution(*hwhm, *half_range, *n_nodes)
            .map_err(|err| e.err("n_nodes", err.to_string()))?,
        DistributionSource::File(p) => match load_distribution::<f64>(p) {
            Ok(d) => d,
            Err(eit_forge::Error::Io(source)) => return Err(CliError::MissingFile { path: p.clone(), source }),
            Err(err) => return Err(e.err("distribution_file", format!("{}: {err}", p.display()))),
        },
    };
    if !(unholed.norm() > 0.0) {
        return Err(e.err("distribution_file", "distribution has zero norm"));
    }

    let depth = e.number("depth", 0.8)?;
    if !(0.0..=1.0).contains(&depth) {
        return Err(e.err("depth", format!("must be in [0, 1], got {depth}")));
    }
    let profile = match e.raw("hole_profile") {
        None => HoleProfile::Gaussian,
        Some(v) => v.parse::<HoleProfile>().map_err(|_| e.err("hole_profile", "expected gaussian or lorentzian"))?,
    };
    let hole_template = HoleSpec { center: 0.0, depth, hwhm: e.positive("hole_hwhm_mhz", 10.0)?, profile };
    let holes: Vec<HoleSpec<f64>> =
        e.list("holes")?.unwrap_or_default().into_iter().map(|c| hole_template.at(c)).collect();
    let distribution = apply_holes(&unholed, &holes).map_err(|err| e.err("holes", err.to_string()))?;
    let support = (unholed.deltas()[0], unholed.deltas()[unholed.len() - 1]);

    let grid_points = e.get::<usize>("grid_points")?.unwrap_or(500);
    if grid_points < 5 {
        return Err(e.err("grid_points", format!("must be >= 5, got {grid_points}")));
    }
    let grid = (e.number("grid_min_mhz", -30.0)?, e.number("grid_max_mhz", 30.0)?, grid_points);
    if !(grid.0 < grid.1) {
        return Err(e.err("grid_max_mhz", "must exceed grid_min_mhz"));
    }
    let window = e.pair("window", (-10.0, 10.0))?;
    let step = (grid.1 - grid.0) / (grid.2 - 1) as f64;
    if window.0 < grid.0 || window.1 > grid.1 || ((window.1 - window.0) / step).floor() < 4.0 {
        return Err(e.err("window", "must lie inside the detuning grid and span at least 5 grid points"));
    }

    let scan = (e.number("scan_min_mhz", 0.0)?, e.number("scan_max_mhz", 150.0)?, e.positive("scan_step_mhz", 5.0)?);
    if scan.0 > scan.1 {
        return Err(e.err("scan_max_mhz", "must be >= scan_min_mhz"));
    }
    if mode == Mode::Scan && (scan.0 < support.0 || scan.1 > support.1) {
        return Err(e.err("scan_max_mhz", "scan range outside distribution support"));
    }
    let n_holes = e.get::<usize>("n_holes")?.unwrap_or(1);
    if !(1..=4).contains(&n_holes) {
        return Err(e.err("n_holes", format!("must be in [1, 4], got {n_holes}")));
    }
    let bounds = e.pair("bounds", (0.0, 150.0))?;
    if mode == Mode::Optimize && (bounds.0 < support.0 || bounds.1 > support.1) {
        return Err(e.err("bounds", "outside distribution support"));
    }
    let map_points = e.get::<usize>("map_doppler_points")?.unwrap_or(81);
    if map_points < 1 {
        return Err(e.err("map_doppler_points", "must be >= 1"));
    }
    let map_doppler = (e.number("map_doppler_min_mhz", -200.0)?, e.number("map_doppler_max_mhz", 200.0)?, map_points);
    if map_doppler.0 > map_doppler.1 {
        return Err(e.err("map_doppler_max_mhz", "must be >= map_doppler_min_mhz"));
    }
    if mode == Mode::Roots && scheme.n_excited() < 2 {
        return Err(e.err("levels", "roots mode needs at least two excited levels"));
    }

    Ok(RunConfig {
        mode,
        scheme,
        fields,
        source,
        distribution,
        holes,
        hole_template,
        grid,
        optical_depth: e.non_negative("optical_depth", cesium::OPTICAL_DEPTH)?,
        window,
        output_prefix: PathBuf::from(e.raw("output_prefix").unwrap_or("eit_forge")),
        scan,
        n_holes,
        bounds,
        optimize_shape: e.get::<bool>("optimize_shape")?.unwrap_or(false),
        map_doppler,
    })
}
