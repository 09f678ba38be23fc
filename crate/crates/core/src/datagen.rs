//! Test data: the benchmark functions, the torus surface and seeded noise.
//!
//! Noise is drawn from ChaCha8 (`rand_chacha`, seeded with
//! `seed_from_u64`). Each standard normal consumes two `u64` outputs
//! `a`, `b`: `u1 = 1 - (a >> 11) 2^-53`, `u2 = (b >> 11) 2^-53`,
//! `z = sqrt(-2 ln u1) cos(2π u2)`. Values are perturbed in storage order
//! (point-major, then component), after which outlier offsets are added.
//! The scheme is identified as [`RNG_ID`] in experiment manifests.

use std::f64::consts::TAU;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::refine1d::{ControlPolygon, Topology};
use crate::refine2d::GridMesh;
use crate::{Error, Result};

pub const RNG_ID: &str = "chacha8-boxmuller-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunction {
    /// `x² - 5x + 3`
    G1,
    /// `x³ - x² - 5x + 3`
    G2,
    /// `0.7670 e^(0.4040 x)`
    G3,
    /// `-10` for `x <= 0`, `10` otherwise
    G4,
    /// `(x/40 - 1)³ + cos(2x/5)`
    G5,
    /// `e^(-x/3) sin(3x)`
    G6,
}

impl TestFunction {
    pub const ALL: [TestFunction; 6] = [Self::G1, Self::G2, Self::G3, Self::G4, Self::G5, Self::G6];

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name.to_ascii_lowercase())
            .ok_or_else(|| Error::input(format!("unknown test function {name:?} (expected g1..g6)")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::G1 => "g1",
            Self::G2 => "g2",
            Self::G3 => "g3",
            Self::G4 => "g4",
            Self::G5 => "g5",
            Self::G6 => "g6",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::G1 => x * x - 5.0 * x + 3.0,
            Self::G2 => x * x * x - x * x - 5.0 * x + 3.0,
            Self::G3 => 0.7670 * (0.4040 * x).exp(),
            Self::G4 => {
                if x <= 0.0 {
                    -10.0
                } else {
                    10.0
                }
            }
            Self::G5 => (x / 40.0 - 1.0).powi(3) + (2.0 * x / 5.0).cos(),
            Self::G6 => (-x / 3.0).exp() * (3.0 * x).sin(),
        }
    }
}

/// `count` uniform samples of `f` on `[a, b]`, endpoints included.
pub fn sample(f: TestFunction, domain: (f64, f64), count: usize) -> Result<ControlPolygon<f64>> {
    let (a, b) = domain;
    if count < 2 {
        return Err(Error::input(format!("need at least 2 samples, got {count}")));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::input(format!("invalid domain [{a}, {b}]")));
    }
    let h = (b - a) / (count - 1) as f64;
    let values = (0..count).map(|i| f.eval(a + i as f64 * h)).collect();
    Ok(ControlPolygon::from_scalars(values).with_params(a, h))
}

pub fn sample_function(name: &str, domain: (f64, f64), count: usize) -> Result<ControlPolygon<f64>> {
    sample(TestFunction::from_name(name)?, domain, count)
}

pub fn torus_point(c1: f64, c2: f64, nu1: f64, nu2: f64) -> [f64; 3] {
    let ring = c2 + c1 * nu2.cos();
    [ring * nu1.cos(), ring * nu1.sin(), c1 * nu2.sin()]
}

/// Torus with tube radius `c1` and centre radius `c2` sampled at
/// `ν1 = 2π i / N1` (rows) and `ν2 = 2π j / N2` (columns); closed on both
/// axes.
pub fn torus_grid(c1: f64, c2: f64, res: (usize, usize)) -> Result<GridMesh<f64>> {
    if !(c1 > 0.0 && c2 > c1 && c2.is_finite()) {
        return Err(Error::input(format!("torus radii need 0 < c1 < c2, got c1={c1}, c2={c2}")));
    }
    let (n1, n2) = res;
    if n1 < 3 || n2 < 3 {
        return Err(Error::input(format!("torus resolution must be at least 3x3, got {n1}x{n2}")));
    }
    let (h1, h2) = (TAU / n1 as f64, TAU / n2 as f64);
    let mut data = Vec::with_capacity(n1 * n2 * 3);
    for i in 0..n1 {
        for j in 0..n2 {
            data.extend(torus_point(c1, c2, i as f64 * h1, j as f64 * h2));
        }
    }
    Ok(GridMesh::new(n1, n2, 3, data)?
        .with_topology([Topology::Closed; 2])
        .with_params([0.0, 0.0], [h1, h2]))
}

/// A fixed offset added to every component of one control point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outlier {
    Point { index: usize, offset: f64 },
    Cell { i: usize, j: usize, offset: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
    pub outliers: Vec<Outlier>,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Self {
        NoiseSpec { sigma, seed, outliers: Vec::new() }
    }

    pub fn with_outliers(mut self, outliers: Vec<Outlier>) -> Self {
        self.outliers = outliers;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::input(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Seeded standard normal stream.
#[derive(Debug, Clone)]
pub struct GaussianStream(ChaCha8Rng);

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }
}

fn perturb(values: &mut [f64], sigma: f64, seed: u64) {
    if sigma == 0.0 {
        return;
    }
    let mut rng = GaussianStream::new(seed);
    for v in values {
        *v += sigma * rng.normal();
    }
}

pub fn add_noise(polygon: &ControlPolygon<f64>, spec: &NoiseSpec) -> Result<ControlPolygon<f64>> {
    spec.validate()?;
    let mut out = polygon.clone();
    let dim = out.dim();
    let len = out.len();
    perturb(out.values_mut(), spec.sigma, spec.seed);
    for o in &spec.outliers {
        match *o {
            Outlier::Point { index, offset } if index < len => {
                out.values_mut()[index * dim..(index + 1) * dim].iter_mut().for_each(|v| *v += offset);
            }
            Outlier::Point { index, .. } => {
                return Err(Error::input(format!("outlier index {index} out of range for {len} points")))
            }
            Outlier::Cell { .. } => return Err(Error::input("grid outlier applied to a polygon")),
        }
    }
    Ok(out)
}

pub fn add_noise_grid(mesh: &GridMesh<f64>, spec: &NoiseSpec) -> Result<GridMesh<f64>> {
    spec.validate()?;
    let mut out = mesh.clone();
    let (rows, cols, dim) = (out.rows(), out.cols(), out.dim());
    perturb(out.values_mut(), spec.sigma, spec.seed);
    for o in &spec.outliers {
        match *o {
            Outlier::Cell { i, j, offset } if i < rows && j < cols => {
                let k = (i * cols + j) * dim;
                out.values_mut()[k..k + dim].iter_mut().for_each(|v| *v += offset);
            }
            Outlier::Cell { i, j, .. } => {
                return Err(Error::input(format!("outlier cell ({i}, {j}) out of range for {rows}x{cols}")))
            }
            Outlier::Point { .. } => return Err(Error::input("polygon outlier applied to a grid")),
        }
    }
    Ok(out)
}

/// `count` distinct positions in `0..len`, each offset by `±magnitude` with a
/// random sign. Drawn from a stream seeded with `seed`; positions come first
/// then signs.
pub fn random_outliers(count: usize, len: usize, magnitude: f64, seed: u64) -> Result<Vec<Outlier>> {
    if count > len {
        return Err(Error::input(format!("cannot place {count} outliers among {len} points")));
    }
    let mut rng = GaussianStream::new(seed);
    let mut picked: Vec<usize> = Vec::with_capacity(count);
    while picked.len() < count {
        let k = ((rng.uniform() * len as f64) as usize).min(len - 1);
        if !picked.contains(&k) {
            picked.push(k);
        }
    }
    Ok(picked
        .into_iter()
        .map(|index| {
            let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            Outlier::Point { index, offset: sign * magnitude }
        })
        .collect())
}

/// Like [`random_outliers`] over the cells of a `rows x cols` grid.
pub fn random_grid_outliers(count: usize, rows: usize, cols: usize, magnitude: f64, seed: u64) -> Result<Vec<Outlier>> {
    Ok(random_outliers(count, rows * cols, magnitude, seed)?
        .into_iter()
        .map(|o| match o {
            Outlier::Point { index, offset } => Outlier::Cell { i: index / cols, j: index % cols, offset },
            cell => cell,
        })
        .collect())
}

/// Root mean square of `a - b`.
pub fn rms_difference(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::input(format!("cannot compare {} with {} values", a.len(), b.len())));
    }
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((sq / a.len() as f64).sqrt())
}

/// RMS distance of each mesh point from the analytic torus at the point's
/// parameters.
pub fn torus_rms(mesh: &GridMesh<f64>, c1: f64, c2: f64) -> f64 {
    let mut sq = 0.0;
    for i in 0..mesh.rows() {
        for j in 0..mesh.cols() {
            let (u, v) = mesh.param(i, j);
            let t = torus_point(c1, c2, u, v);
            sq += mesh.point(i, j).iter().zip(t).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
        }
    }
    (sq / (mesh.rows() * mesh.cols()) as f64).sqrt()
}
