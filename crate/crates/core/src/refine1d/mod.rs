//! Univariate subdivision: one IRLS fit per stencil, evaluated at the
//! scheme's abscissae.
//!
//! Level-`k` point `i` sits at parameter `start + i * spacing`. A stencil
//! centred on `i` produces `N` new points at `i + abscissa` (in level-`k`
//! index units), so the refined polygon is again uniform with spacing
//! `spacing / N`. For the binary even schemes the new points lie at
//! `(2i + 1/2) 2^-(k+1)` and `(2i + 3/2) 2^-(k+1)` relative to a unit
//! level-0 spacing.

mod masks;

pub use masks::{constant_weight_mask, generic_masks, masks_d1_closed_form, masks_d2_closed_form, Mask};

use crate::exec::Execution;
use crate::local_fit::{irls_fit, ols_init, Beta, FitConfig, FitWarning, Parity, Stencil};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Topology {
    #[default]
    Open,
    Closed,
}

/// How stencils are completed near the ends of open data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundaryPolicy {
    /// Only centres with a full stencil produce points; the polygon shrinks.
    #[default]
    Shrink,
    /// Indices wrap; every point is a centre.
    Periodic,
    /// Indices reflect about the end points (`-1 -> 1`, `L -> L - 2`).
    Mirror,
}

/// Which weights the local fits use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Weighting {
    /// IRLS weights recomputed from the residuals.
    #[default]
    Dynamic,
    /// Unit weights: the linear least squares scheme.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec<T> {
    pub fit: FitConfig<T>,
    /// New points per old point.
    pub arity: usize,
    pub boundary: BoundaryPolicy,
    pub weighting: Weighting,
}

impl<T: Scalar> SchemeSpec<T> {
    /// The binary `points`-point scheme of degree `degree` with default
    /// smoothing settings and the shrink policy.
    pub fn new(points: usize, degree: usize) -> Self {
        SchemeSpec {
            fit: FitConfig::for_points(points, degree),
            arity: 2,
            boundary: BoundaryPolicy::Shrink,
            weighting: Weighting::Dynamic,
        }
    }

    pub fn from_fit(fit: FitConfig<T>) -> Self {
        SchemeSpec {
            fit,
            arity: 2,
            boundary: BoundaryPolicy::Shrink,
            weighting: Weighting::Dynamic,
        }
    }

    pub fn with_arity(mut self, arity: usize) -> Self {
        self.arity = arity;
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryPolicy) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    pub fn with_fit(mut self, f: impl FnOnce(FitConfig<T>) -> FitConfig<T>) -> Self {
        self.fit = f(self.fit);
        self
    }

    pub fn points(&self) -> usize {
        self.fit.stencil_len()
    }

    /// `D_{h,d}` style name.
    pub fn label(&self) -> String {
        let base = format!("D_{{{},{}}}", self.points(), self.fit.degree);
        match self.weighting {
            Weighting::Dynamic => base,
            Weighting::Unit => format!("{base}/unit"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fit.validate()?;
        abscissae::<T>(self.fit.parity, self.arity)?;
        Ok(())
    }

    /// Fit one stencil according to the weighting mode.
    pub fn fit_stencil(&self, values: &[T]) -> Result<(Beta<T>, FitStats)> {
        let stencil = Stencil::new(values, self.fit.parity)?;
        match self.weighting {
            Weighting::Unit => Ok((ols_init(stencil, &self.fit)?, FitStats::single(0, true, &[]))),
            Weighting::Dynamic => {
                let res = irls_fit(stencil, &self.fit)?;
                let stats = FitStats::single(res.iterations, res.converged, &res.warnings);
                Ok((res.beta, stats))
            }
        }
    }
}

/// Evaluation abscissae of an `N`-ary scheme, in level-`k` index units
/// relative to the stencil centre.
///
/// Even parity: `(2M - 1) / (2N)` for `M = 1..=N`. Odd parity with even
/// `N`: `M / (2N)` for odd `M` in `-(N-1)..=N-1`. Odd parity with odd
/// `N > 2` is rejected.
pub fn abscissae<T: Scalar>(parity: Parity, arity: usize) -> Result<Vec<T>> {
    if arity < 2 {
        return Err(Error::config(format!("arity must be >= 2, got {arity}")));
    }
    let two_n = T::of_int(2 * arity as i64);
    match parity {
        Parity::Even => Ok((1..=arity as i64).map(|m| T::of_int(2 * m - 1) / two_n).collect()),
        Parity::Odd if arity % 2 == 0 => {
            let top = arity as i64 - 1;
            Ok((-top..=top).step_by(2).map(|m| T::of_int(m) / two_n).collect())
        }
        Parity::Odd => Err(Error::Unsupported(format!(
            "odd-stencil schemes with odd arity {arity} have no consistent abscissa set"
        ))),
    }
}

/// An ordered sequence of control points, each `dim` components wide.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPolygon<T> {
    dim: usize,
    data: Vec<T>,
    pub level: usize,
    pub topology: Topology,
    /// Parameter of point 0.
    pub start: T,
    /// Parameter step between consecutive points.
    pub spacing: T,
}

impl<T: Scalar> ControlPolygon<T> {
    pub fn from_scalars(values: Vec<T>) -> Self {
        ControlPolygon {
            dim: 1,
            data: values,
            level: 0,
            topology: Topology::Open,
            start: T::zero(),
            spacing: T::one(),
        }
    }

    /// `data` is point-major: point `i` occupies `data[i * dim..(i + 1) * dim]`.
    pub fn from_points(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::input(format!("{} values cannot form {dim}-wide points", data.len())));
        }
        Ok(ControlPolygon {
            dim,
            data,
            level: 0,
            topology: Topology::Open,
            start: T::zero(),
            spacing: T::one(),
        })
    }

    pub fn with_params(mut self, start: T, spacing: T) -> Self {
        self.start = start;
        self.spacing = spacing;
        self
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn component(&self, c: usize) -> Vec<T> {
        self.data.iter().skip(c).step_by(self.dim).copied().collect()
    }

    pub fn param(&self, i: usize) -> T {
        self.start + T::of_int(i as i64) * self.spacing
    }

    pub fn params(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.param(i)).collect()
    }

    /// Reverse point order; the parameter range is mirrored.
    pub fn reversed(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for i in (0..self.len()).rev() {
            data.extend_from_slice(self.point(i));
        }
        let end = self.param(self.len().saturating_sub(1));
        ControlPolygon {
            data,
            start: -end,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("control polygon contains non-finite values"));
        }
        Ok(())
    }
}

/// Aggregate fit diagnostics of a refinement step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FitStats {
    pub fits: usize,
    pub iterations: usize,
    pub converged: usize,
    pub ill_conditioned: usize,
}

impl FitStats {
    pub(crate) fn single(iterations: usize, converged: bool, warnings: &[FitWarning]) -> Self {
        FitStats {
            fits: 1,
            iterations,
            converged: converged as usize,
            ill_conditioned: warnings.len(),
        }
    }

    pub fn merge(self, other: FitStats) -> FitStats {
        FitStats {
            fits: self.fits + other.fits,
            iterations: self.iterations + other.iterations,
            converged: self.converged + other.converged,
            ill_conditioned: self.ill_conditioned + other.ill_conditioned,
        }
    }
}

/// Stencil centres and index resolution for one axis.
#[derive(Debug, Clone)]
pub(crate) struct AxisPlan {
    pub centers: Vec<i64>,
    len: usize,
    policy: BoundaryPolicy,
}

impl AxisPlan {
    pub fn new(len: usize, parity: Parity, n: usize, policy: BoundaryPolicy) -> Result<Self> {
        let stencil = parity.stencil_len(n);
        let centers: Vec<i64> = match policy {
            BoundaryPolicy::Shrink => {
                if len < stencil {
                    return Err(Error::input(format!(
                        "{len} points cannot hold a {stencil}-point stencil"
                    )));
                }
                let lo = -parity.first_offset(n);
                let hi = len as i64 - 1 - n as i64;
                (lo..=hi).collect()
            }
            BoundaryPolicy::Periodic => {
                if len < stencil {
                    return Err(Error::input(format!(
                        "periodic data needs at least {stencil} points, got {len}"
                    )));
                }
                (0..len as i64).collect()
            }
            BoundaryPolicy::Mirror => {
                if len < 2 {
                    return Err(Error::input("mirror boundary needs at least 2 points"));
                }
                match parity {
                    Parity::Even => (0..len as i64 - 1).collect(),
                    Parity::Odd => (0..len as i64).collect(),
                }
            }
        };
        Ok(AxisPlan { centers, len, policy })
    }

    pub fn resolve(&self, idx: i64) -> usize {
        let len = self.len as i64;
        match self.policy {
            BoundaryPolicy::Shrink => idx as usize,
            BoundaryPolicy::Periodic => idx.rem_euclid(len) as usize,
            BoundaryPolicy::Mirror => {
                let period = 2 * (len - 1);
                let k = idx.rem_euclid(period);
                (if k > len - 1 { period - k } else { k }) as usize
            }
        }
    }

    pub fn first_center(&self) -> i64 {
        self.centers[0]
    }
}

pub(crate) fn effective_policy(topology: Topology, policy: BoundaryPolicy) -> BoundaryPolicy {
    match topology {
        Topology::Closed => BoundaryPolicy::Periodic,
        Topology::Open => policy,
    }
}

/// A refined polygon with its fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement<T> {
    pub polygon: ControlPolygon<T>,
    pub stats: FitStats,
}

/// One subdivision step.
pub fn refine_once<T: Scalar>(polygon: &ControlPolygon<T>, spec: &SchemeSpec<T>) -> Result<ControlPolygon<T>> {
    Ok(refine_once_with(polygon, spec, Execution::Sequential)?.polygon)
}

pub fn refine_once_with<T: Scalar>(
    polygon: &ControlPolygon<T>,
    spec: &SchemeSpec<T>,
    exec: Execution,
) -> Result<Refinement<T>> {
    spec.validate()?;
    polygon.validate()?;
    let ab: Vec<T> = abscissae(spec.fit.parity, spec.arity)?;
    let policy = effective_policy(polygon.topology, spec.boundary);
    let plan = AxisPlan::new(polygon.len(), spec.fit.parity, spec.fit.n, policy)?;
    let offsets: Vec<i64> = spec.fit.parity.offsets(spec.fit.n).collect();
    let dim = polygon.dim;

    let per_center = exec.map_collect(&plan.centers, |&i| {
        let mut out = vec![T::zero(); ab.len() * dim];
        let mut stats = FitStats::default();
        let mut stencil = vec![T::zero(); offsets.len()];
        for c in 0..dim {
            for (slot, &r) in stencil.iter_mut().zip(&offsets) {
                *slot = polygon.data[plan.resolve(i + r) * dim + c];
            }
            let (beta, s) = spec.fit_stencil(&stencil)?;
            stats = stats.merge(s);
            for (a, &x) in ab.iter().enumerate() {
                out[a * dim + c] = beta.eval(x);
            }
        }
        Ok((out, stats))
    })?;

    let mut data = Vec::with_capacity(per_center.len() * ab.len() * dim);
    let mut stats = FitStats::default();
    for (pts, s) in per_center {
        data.extend(pts);
        stats = stats.merge(s);
    }
    let start = polygon.start + (T::of_int(plan.first_center()) + ab[0]) * polygon.spacing;
    Ok(Refinement {
        polygon: ControlPolygon {
            dim,
            data,
            level: polygon.level + 1,
            topology: polygon.topology,
            start,
            spacing: polygon.spacing / T::of_int(spec.arity as i64),
        },
        stats,
    })
}

/// `levels` successive refinements; returns the final polygon.
pub fn subdivide<T: Scalar>(polygon: &ControlPolygon<T>, spec: &SchemeSpec<T>, levels: usize) -> Result<ControlPolygon<T>> {
    let mut current = polygon.clone();
    for _ in 0..levels {
        current = refine_once(&current, spec)?;
    }
    Ok(current)
}

/// Every level from the input (index 0) to `levels`, with per-step stats.
pub fn subdivide_with<T: Scalar>(
    polygon: &ControlPolygon<T>,
    spec: &SchemeSpec<T>,
    levels: usize,
    exec: Execution,
) -> Result<(Vec<ControlPolygon<T>>, Vec<FitStats>)> {
    let mut out = vec![polygon.clone()];
    let mut stats = Vec::with_capacity(levels);
    for _ in 0..levels {
        let step = refine_once_with(out.last().expect("non-empty"), spec, exec)?;
        out.push(step.polygon);
        stats.push(step.stats);
    }
    Ok((out, stats))
}
