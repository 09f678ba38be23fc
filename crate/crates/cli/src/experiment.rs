//! Runs an [`ExperimentManifest`] and collects metrics plus output files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use subdiv_l1::analysis::{basic_limit_levels, limit_support_width, overshoot, support_width};
use subdiv_l1::datagen::{
    add_noise, add_noise_grid, random_grid_outliers, random_outliers, sample, torus_grid, torus_rms, NoiseSpec,
    Outlier, TestFunction,
};
use subdiv_l1::refine1d::subdivide_with;
use subdiv_l1::refine2d::subdivide_2d_with;
use subdiv_l1::{ControlPolygon, Execution, FitStats, GridMesh, LimitSamples};

use crate::io::{write_curve_csv, write_grid_csv, write_obj};
use crate::manifest::{DataSource, ExperimentManifest, NoiseEntry, OutlierEntry, OUTLIER_SEED_OFFSET};
use crate::{CliError, CliResult};

/// Tolerance below which a basic-limit sample counts as zero.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub name: String,
    pub rng: String,
    pub levels: usize,
    pub schemes: Vec<SchemeMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeMetrics {
    pub label: String,
    pub runs: Vec<RunMetrics>,
    /// Median over runs of the final-level RMS distance to the clean data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_rms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RunMetrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// RMS distance of the input data from the clean reference.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_rms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs: Option<f64>,
    /// Per-level RMS distance from the clean reference, level 0 first.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rms_by_level: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overshoot: Option<f64>,
    /// Largest gap between the limit curve and the input at interior
    /// control parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interpolation_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_support_width: Option<f64>,
    pub fits: usize,
    pub non_converged: usize,
    pub ill_conditioned: usize,
}

impl RunMetrics {
    fn with_stats(stats: &[FitStats]) -> Self {
        let total = stats.iter().copied().fold(FitStats::default(), FitStats::merge);
        RunMetrics {
            fits: total.fits,
            non_converged: total.fits - total.converged,
            ill_conditioned: total.ill_conditioned,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub manifest: ExperimentManifest,
    pub metrics: Metrics,
    /// Output files by name, in a fixed order.
    pub files: BTreeMap<String, Vec<u8>>,
}

impl Report {
    pub fn scheme(&self, label: &str) -> Option<&SchemeMetrics> {
        self.metrics.schemes.iter().find(|s| s.label == label)
    }

    /// Writes every file plus `manifest.json` and `metrics.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
        let mut all = self.files.clone();
        all.insert("manifest.json".into(), (self.manifest.to_json() + "\n").into_bytes());
        all.insert("metrics.json".into(), (self.metrics_json() + "\n").into_bytes());
        for (name, bytes) in all {
            let path = dir.join(name);
            std::fs::write(&path, bytes)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }

    pub fn metrics_json(&self) -> String {
        serde_json::to_string_pretty(&self.metrics).expect("metrics serialise")
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => None,
        n if n % 2 == 1 => Some(v[n / 2]),
        n => Some(0.5 * (v[n / 2 - 1] + v[n / 2])),
    }
}

fn csv_bytes(polygon: &ControlPolygon<f64>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_curve_csv(&mut buf, polygon)?;
    Ok(buf)
}

fn obj_bytes(mesh: &GridMesh<f64>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_obj(&mut buf, mesh).expect("writing to memory");
    buf
}

fn seeded_name(stem: &str, seed: Option<u64>, ext: &str) -> String {
    match seed {
        Some(s) => format!("{stem}_seed{s}.{ext}"),
        None => format!("{stem}.{ext}"),
    }
}

/// Absolute noise level and outliers for one seed.
fn noise_for(entry: &NoiseEntry, seed: u64, clean_scale: f64, len: usize, grid: Option<(usize, usize)>) -> CliResult<NoiseSpec> {
    let sigma = if entry.relative { entry.sigma * clean_scale } else { entry.sigma };
    let outliers = match &entry.outliers {
        OutlierEntry::None => Vec::new(),
        OutlierEntry::Fixed { points } => match grid {
            None => points.iter().map(|&(index, offset)| Outlier::Point { index, offset }).collect(),
            Some((_, cols)) => points
                .iter()
                .map(|&(k, offset)| Outlier::Cell { i: k / cols, j: k % cols, offset })
                .collect(),
        },
        OutlierEntry::Random { count, sigmas } => {
            let seed = seed.wrapping_add(OUTLIER_SEED_OFFSET);
            match grid {
                None => random_outliers(*count, len, sigmas * sigma, seed)?,
                Some((rows, cols)) => random_grid_outliers(*count, rows, cols, sigmas * sigma, seed)?,
            }
        }
    };
    Ok(NoiseSpec::new(sigma, seed).with_outliers(outliers))
}

pub fn run(manifest: &ExperimentManifest, exec: Execution) -> CliResult<Report> {
    manifest.validate()?;
    let mut files = BTreeMap::new();
    let schemes = match &manifest.data {
        DataSource::Impulse { padding } => run_impulse(manifest, *padding, &mut files)?,
        DataSource::Function { function, domain, samples } => {
            let f = TestFunction::from_name(function)?;
            let clean = sample(f, (domain[0], domain[1]), *samples)?;
            run_curves(manifest, &clean, Some(f), exec, &mut files)?
        }
        DataSource::File { path } => {
            let data = crate::io::read_curve_csv(path)?;
            run_curves(manifest, &data, None, exec, &mut files)?
        }
        DataSource::Torus { c1, c2, rows, cols } => run_torus(manifest, *c1, *c2, (*rows, *cols), exec, &mut files)?,
    };
    Ok(Report {
        manifest: manifest.clone(),
        metrics: Metrics {
            name: manifest.name.clone(),
            rng: manifest.rng.clone(),
            levels: manifest.levels,
            schemes,
        },
        files,
    })
}

fn run_impulse(
    manifest: &ExperimentManifest,
    padding: Option<usize>,
    files: &mut BTreeMap<String, Vec<u8>>,
) -> CliResult<Vec<SchemeMetrics>> {
    let mut out = Vec::new();
    for entry in &manifest.schemes {
        let spec = entry.curve_spec()?;
        let pad = padding.unwrap_or(4 * spec.fit.n);
        let (_, levels) = basic_limit_levels(&spec, manifest.levels, pad)?;
        let last = levels.last().expect("level 0 present");
        let mut run = RunMetrics {
            support_width: Some(support_width(last, SUPPORT_TOL)?),
            ..Default::default()
        };
        if levels.len() >= 2 {
            run.limit_support_width = Some(limit_support_width(&levels, SUPPORT_TOL)?);
        }
        let poly = ControlPolygon::from_scalars(last.values.clone()).with_params(last.params[0], last.params[1] - last.params[0]);
        files.insert(format!("{}.csv", entry.stem()), csv_bytes(&poly)?);
        out.push(SchemeMetrics { label: entry.label(), runs: vec![run], median_rms: None });
    }
    Ok(out)
}

fn run_curves(
    manifest: &ExperimentManifest,
    clean: &ControlPolygon<f64>,
    reference: Option<TestFunction>,
    exec: Execution,
    files: &mut BTreeMap<String, Vec<u8>>,
) -> CliResult<Vec<SchemeMetrics>> {
    let scale = clean.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (low, high) = clean
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let seeds: Vec<Option<u64>> = match &manifest.noise {
        Some(n) => n.seeds.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let inputs = seeds
        .iter()
        .map(|&seed| match (&manifest.noise, seed) {
            (Some(entry), Some(s)) => add_noise(clean, &noise_for(entry, s, scale, clean.len(), None)?).map_err(CliError::from),
            _ => Ok(clean.clone()),
        })
        .collect::<CliResult<Vec<_>>>()?;
    for (seed, input) in seeds.iter().zip(&inputs) {
        files.insert(seeded_name("input", *seed, "csv"), csv_bytes(input)?);
    }

    let mut out = Vec::new();
    for entry in &manifest.schemes {
        let spec = entry.curve_spec()?;
        let mut runs = Vec::new();
        for (seed, input) in seeds.iter().zip(&inputs) {
            let (polys, stats) = subdivide_with(input, &spec, manifest.levels, exec)?;
            let fine = polys.last().expect("level 0 present");
            let mut run = RunMetrics::with_stats(&stats);
            run.seed = *seed;
            if let Some(f) = reference {
                let dev: Vec<f64> = fine
                    .params()
                    .iter()
                    .zip(fine.values())
                    .map(|(&t, &v)| v - f.eval(t))
                    .collect();
                run.rms = Some(rms(&dev));
                run.max_abs = Some(dev.iter().fold(0.0, |m: f64, d| m.max(d.abs())));
                let input_dev: Vec<f64> = input.values().iter().zip(clean.values()).map(|(a, b)| a - b).collect();
                run.input_rms = Some(rms(&input_dev));
            }
            if fine.dim() == 1 && !fine.is_empty() && low < high {
                let samples = LimitSamples::from_polygon(fine, 0)?;
                run.overshoot = Some(overshoot(&samples, low, high)?);
                run.interpolation_error = interpolation_error(&samples, input);
            }
            files.insert(seeded_name(&entry.stem(), *seed, "csv"), csv_bytes(fine)?);
            runs.push(run);
        }
        let rmss: Vec<f64> = runs.iter().filter_map(|r| r.rms).collect();
        out.push(SchemeMetrics { label: entry.label(), median_rms: median(&rmss), runs });
    }
    Ok(out)
}

fn rms(dev: &[f64]) -> f64 {
    if dev.is_empty() {
        return 0.0;
    }
    (dev.iter().map(|d| d * d).sum::<f64>() / dev.len() as f64).sqrt()
}

/// Largest `|L(t_i) - f_i|` over control parameters strictly inside the
/// refined range, reading `L` through linear interpolation.
fn interpolation_error(samples: &LimitSamples<f64>, input: &ControlPolygon<f64>) -> Option<f64> {
    let (lo, hi) = (*samples.params.first()?, *samples.params.last()?);
    input
        .params()
        .iter()
        .zip(input.values())
        .filter(|(&t, _)| t > lo && t < hi)
        .filter_map(|(&t, &v)| samples.sample_at(t).map(|l| (l - v).abs()))
        .reduce(f64::max)
}

fn run_torus(
    manifest: &ExperimentManifest,
    c1: f64,
    c2: f64,
    res: (usize, usize),
    exec: Execution,
    files: &mut BTreeMap<String, Vec<u8>>,
) -> CliResult<Vec<SchemeMetrics>> {
    let clean = torus_grid(c1, c2, res)?;
    let scale = clean.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let seeds: Vec<Option<u64>> = match &manifest.noise {
        Some(n) => n.seeds.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let inputs = seeds
        .iter()
        .map(|&seed| match (&manifest.noise, seed) {
            (Some(entry), Some(s)) => {
                add_noise_grid(&clean, &noise_for(entry, s, scale, res.0 * res.1, Some(res))?).map_err(CliError::from)
            }
            _ => Ok(clean.clone()),
        })
        .collect::<CliResult<Vec<_>>>()?;
    for (seed, input) in seeds.iter().zip(&inputs) {
        files.insert(seeded_name("input", *seed, "obj"), obj_bytes(input));
    }

    let mut out = Vec::new();
    for entry in &manifest.schemes {
        let spec = entry.surface_spec()?;
        let stem = format!("d{}x{}_{}", entry.points, entry.points, entry.degree);
        let mut runs = Vec::new();
        for (seed, input) in seeds.iter().zip(&inputs) {
            let (meshes, stats) = subdivide_2d_with(input, &spec, manifest.levels, exec)?;
            let mut run = RunMetrics::with_stats(&stats);
            run.seed = *seed;
            run.rms_by_level = meshes.iter().map(|m| torus_rms(m, c1, c2)).collect();
            run.input_rms = run.rms_by_level.first().copied();
            run.rms = run.rms_by_level.last().copied();
            let fine = meshes.last().expect("level 0 present");
            files.insert(seeded_name(&stem, *seed, "obj"), obj_bytes(fine));
            let mut grid = Vec::new();
            write_grid_csv(&mut grid, fine)?;
            files.insert(seeded_name(&stem, *seed, "csv"), grid);
            runs.push(run);
        }
        let rmss: Vec<f64> = runs.iter().filter_map(|r| r.rms).collect();
        out.push(SchemeMetrics {
            label: format!("D({})^2,{}", entry.points, entry.degree),
            median_rms: median(&rmss),
            runs,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::{builtin, SchemeEntry};

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn small_curve_experiment() {
        let mut m = builtin("quadratic").unwrap();
        m.schemes = vec![SchemeEntry::new(10, 2), SchemeEntry::new(10, 1)];
        m.levels = 2;
        let r = run(&m, Execution::Sequential).unwrap();
        assert!(r.scheme("D10,2").unwrap().runs[0].max_abs.unwrap() < 1e-8);
        assert!(r.scheme("D10,1").unwrap().runs[0].max_abs.unwrap() > 1e-3);
        assert!(r.files.contains_key("d10_2.csv") && r.files.contains_key("input.csv"));
    }

    #[test]
    fn fixed_outliers_land_where_listed() {
        let m = builtin("fixed-outliers").unwrap();
        let entry = m.noise.as_ref().unwrap();
        let spec = noise_for(entry, 0, 1.0, 61, None).unwrap();
        assert_eq!(spec.outliers.len(), 12);
        assert_eq!(spec.sigma, 0.0);
    }

    #[test]
    fn parallel_report_matches_sequential() {
        let mut m = builtin("noisy-outliers").unwrap();
        m.noise.as_mut().unwrap().seeds = vec![3];
        m.levels = 2;
        let a = run(&m, Execution::Sequential).unwrap();
        let b = run(&m, Execution::Parallel).unwrap();
        assert_eq!(a.files, b.files);
        assert_eq!(a.metrics_json(), b.metrics_json());
    }
}
