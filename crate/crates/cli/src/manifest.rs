//! Experiment manifests: a scheme list, a data source, a noise model and a
//! level count, serialised as JSON. `experiment <name>` runs one of the
//! built-in manifests below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use subdiv_l1::datagen::RNG_ID;
use subdiv_l1::{SchemeSpec, SchemeSpec2D};

use crate::args::{BoundaryArg, WeightingArg};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub schemes: Vec<SchemeEntry>,
    pub data: DataSource,
    #[serde(default)]
    pub noise: Option<NoiseEntry>,
    pub levels: usize,
    /// Identifier of the noise generator; must match [`RNG_ID`].
    #[serde(default = "default_rng")]
    pub rng: String,
}

fn default_rng() -> String {
    RNG_ID.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntry {
    /// Stencil length `2n` or `2n + 1` (side of the square stencil for
    /// surfaces).
    pub points: usize,
    pub degree: usize,
    #[serde(default)]
    pub weighting: WeightingArg,
    #[serde(default = "default_arity")]
    pub arity: usize,
    #[serde(default)]
    pub boundary: BoundaryArg,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_arity() -> usize {
    2
}
fn default_delta() -> f64 {
    1e-4
}
fn default_epsilon() -> f64 {
    1e-6
}
fn default_max_iters() -> usize {
    6
}

impl SchemeEntry {
    pub fn new(points: usize, degree: usize) -> Self {
        SchemeEntry {
            points,
            degree,
            weighting: WeightingArg::Dynamic,
            arity: default_arity(),
            boundary: BoundaryArg::Shrink,
            delta: default_delta(),
            epsilon: default_epsilon(),
            max_iters: default_max_iters(),
        }
    }

    pub fn unit(mut self) -> Self {
        self.weighting = WeightingArg::Unit;
        self
    }

    pub fn curve_spec(&self) -> CliResult<SchemeSpec<f64>> {
        let spec = SchemeSpec::new(self.points, self.degree)
            .with_arity(self.arity)
            .with_boundary(self.boundary.into())
            .with_weighting(self.weighting.into())
            .with_fit(|c| c.with_delta(self.delta).with_epsilon(self.epsilon).with_max_iters(self.max_iters));
        spec.validate()?;
        Ok(spec)
    }

    pub fn surface_spec(&self) -> CliResult<SchemeSpec2D<f64>> {
        if self.arity != 2 {
            return Err(CliError::usage("surface schemes are binary only"));
        }
        let spec = SchemeSpec2D::new(self.points, self.degree)
            .with_boundary(self.boundary.into())
            .with_weighting(self.weighting.into())
            .with_fit(|c| c.with_delta(self.delta).with_epsilon(self.epsilon).with_max_iters(self.max_iters));
        spec.validate()?;
        Ok(spec)
    }

    /// `D10,3`, `D11,2/unit`.
    pub fn label(&self) -> String {
        let unit = if self.weighting == WeightingArg::Unit { "/unit" } else { "" };
        format!("D{},{}{unit}", self.points, self.degree)
    }

    /// File-name form of [`label`](Self::label): `d10_3`, `d11_2_unit`.
    pub fn stem(&self) -> String {
        let unit = if self.weighting == WeightingArg::Unit { "_unit" } else { "" };
        format!("d{}_{}{unit}", self.points, self.degree)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Unit impulse refined into the basic limit function.
    Impulse {
        #[serde(default)]
        padding: Option<usize>,
    },
    /// Uniform samples of a named test function.
    Function { function: String, domain: [f64; 2], samples: usize },
    /// Closed torus grid.
    Torus { c1: f64, c2: f64, rows: usize, cols: usize },
    /// Curve control points from a CSV file (relative to the manifest).
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseEntry {
    pub sigma: f64,
    /// When set, `sigma` is a fraction of the largest absolute clean value.
    #[serde(default)]
    pub relative: bool,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub outliers: OutlierEntry,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum OutlierEntry {
    #[default]
    None,
    /// The same `(index, offset)` pairs for every seed.
    Fixed { points: Vec<(usize, f64)> },
    /// `count` distinct positions with offsets `±sigmas·σ`, drawn from the
    /// run's seed.
    Random { count: usize, sigmas: f64 },
}

/// Offset between a run's noise seed and the seed its random outliers are
/// drawn from, so the two streams never coincide.
pub const OUTLIER_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

impl ExperimentManifest {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| CliError::usage(format!("bad manifest: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let mut m = Self::from_json(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        if let DataSource::File { path: data } = &mut m.data {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises")
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.rng != RNG_ID {
            return Err(CliError::usage(format!(
                "manifest {} asks for generator {:?}; this build provides {RNG_ID:?}",
                self.name, self.rng
            )));
        }
        if self.schemes.is_empty() {
            return Err(CliError::usage(format!("manifest {} lists no schemes", self.name)));
        }
        if let Some(noise) = &self.noise {
            if !(noise.sigma >= 0.0 && noise.sigma.is_finite()) {
                return Err(CliError::usage(format!("noise sigma must be finite and >= 0, got {}", noise.sigma)));
            }
            if noise.seeds.is_empty() {
                return Err(CliError::usage("noise needs at least one seed"));
            }
        }
        for s in &self.schemes {
            match self.data {
                DataSource::Torus { .. } => drop(s.surface_spec()?),
                _ => drop(s.curve_spec()?),
            }
        }
        Ok(())
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 9] = [
    "impulse",
    "quadratic",
    "cubic",
    "exponential",
    "step",
    "interpolation",
    "fixed-outliers",
    "noisy-outliers",
    "torus",
];

/// Outliers planted in the g5 data of `fixed-outliers`: twelve positions spread over
/// the 61 samples with alternating offsets.
pub const FIXED_OUTLIERS: [(usize, f64); 12] = [
    (4, 1.5),
    (9, -1.5),
    (14, 2.0),
    (19, -2.0),
    (24, 1.0),
    (29, -1.0),
    (33, 2.5),
    (38, -2.5),
    (43, 1.5),
    (48, -1.5),
    (52, 2.0),
    (56, -2.0),
];

fn family(sizes: &[usize], degrees: &[usize], with_unit: bool) -> Vec<SchemeEntry> {
    let mut out = Vec::new();
    for &h in sizes {
        for &d in degrees {
            out.push(SchemeEntry::new(h, d));
            if with_unit {
                out.push(SchemeEntry::new(h, d).unit());
            }
        }
    }
    out
}

fn function(name: &str, a: f64, b: f64, samples: usize) -> DataSource {
    DataSource::Function { function: name.into(), domain: [a, b], samples }
}

pub fn builtin(name: &str) -> CliResult<ExperimentManifest> {
    let m = |name: &str, description: &str, schemes, data, noise, levels| ExperimentManifest {
        name: name.into(),
        description: description.into(),
        schemes,
        data,
        noise,
        levels,
        rng: default_rng(),
    };
    let degrees = [1, 2, 3];
    let manifest = match name {
        "impulse" => m(
            "impulse",
            "basic limit functions of D10..D13 for d = 1, 2, 3",
            family(&[10, 11, 12, 13], &degrees, false),
            DataSource::Impulse { padding: None },
            None,
            6,
        ),
        "quadratic" => m(
            "quadratic",
            "response to quadratic data g1",
            family(&[10, 11], &degrees, false),
            function("g1", -5.0, 10.0, 30),
            None,
            5,
        ),
        "cubic" => m(
            "cubic",
            "response to cubic data g2",
            family(&[10, 11], &degrees, false),
            function("g2", -5.0, 10.0, 30),
            None,
            5,
        ),
        "exponential" => m(
            "exponential",
            "response to exponential data g3",
            family(&[10, 11], &degrees, false),
            function("g3", -5.0, 10.0, 30),
            None,
            5,
        ),
        "step" => m(
            "step",
            "step data g4: overshoot of the limit curves",
            family(&[10, 11, 12, 13], &degrees, false),
            function("g4", -10.0, 10.0, 41),
            None,
            4,
        ),
        "interpolation" => m(
            "interpolation",
            "interpolation behaviour on clean exponential data",
            family(&[15, 16], &degrees, false),
            function("g3", -5.0, 5.0, 41),
            None,
            4,
        ),
        "fixed-outliers" => m(
            "fixed-outliers",
            "g5 with twelve fixed outliers",
            family(&[10, 11], &degrees, true),
            function("g5", 0.0, 60.0, 61),
            Some(NoiseEntry {
                sigma: 0.0,
                relative: false,
                seeds: vec![0],
                outliers: OutlierEntry::Fixed { points: FIXED_OUTLIERS.to_vec() },
            }),
            3,
        ),
        "noisy-outliers" => m(
            "noisy-outliers",
            "noisy g6 with two 5-sigma outliers, ten seeds",
            family(&[19, 20], &degrees, true),
            function("g6", 0.0, 3.0 * std::f64::consts::PI, 60),
            Some(NoiseEntry {
                sigma: 0.15,
                relative: true,
                seeds: (0..10).collect(),
                outliers: OutlierEntry::Random { count: 2, sigmas: 5.0 },
            }),
            3,
        ),
        "torus" => m(
            "torus",
            "noisy torus with outliers, bilinear against biquadratic fits",
            family(&[4], &[1, 2], false),
            DataSource::Torus { c1: 2.0, c2: 5.0, rows: 24, cols: 24 },
            Some(NoiseEntry {
                sigma: 0.1,
                relative: false,
                seeds: (0..5).collect(),
                outliers: OutlierEntry::Random { count: 8, sigmas: 10.0 },
            }),
            2,
        ),
        other => {
            return Err(CliError::usage(format!(
                "unknown experiment {other:?}; available: {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    Ok(manifest)
}
