//! Scheme diagnostics on sampled refinements: basic limit functions, support
//! width, overshoot and reproduction error.

use crate::refine1d::{subdivide_with, BoundaryPolicy, ControlPolygon, SchemeSpec};
use crate::{Error, Execution, Result, Scalar};

/// Values of a refined scalar polygon at their parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSamples<T> {
    pub params: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> LimitSamples<T> {
    pub fn new(params: Vec<T>, values: Vec<T>) -> Result<Self> {
        if params.len() != values.len() {
            return Err(Error::input("parameter and value counts differ"));
        }
        if params.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::input("parameters must be strictly increasing"));
        }
        if values.iter().chain(&params).any(|v| !v.is_finite()) {
            return Err(Error::input("samples must be finite"));
        }
        Ok(LimitSamples { params, values })
    }

    /// Samples of one component of `polygon`.
    pub fn from_polygon(polygon: &ControlPolygon<T>, component: usize) -> Result<Self> {
        if component >= polygon.dim() {
            return Err(Error::input(format!(
                "component {component} out of range for {}-wide points",
                polygon.dim()
            )));
        }
        Self::new(polygon.params(), polygon.component(component))
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Piecewise linear interpolant at `t`; `None` outside the sampled range.
    pub fn sample_at(&self, t: T) -> Option<T> {
        let (first, last) = (*self.params.first()?, *self.params.last()?);
        if t < first || t > last {
            return None;
        }
        let k = self.params.partition_point(|&p| p <= t);
        if k == 0 {
            return Some(self.values[0]);
        }
        if k == self.len() {
            return Some(self.values[k - 1]);
        }
        let (p0, p1) = (self.params[k - 1], self.params[k]);
        let s = (t - p0) / (p1 - p0);
        Some(self.values[k - 1] + s * (self.values[k] - self.values[k - 1]))
    }
}

/// Refine the unit impulse on `-padding..=padding` for `levels` levels with
/// the shrink policy.
///
/// The padding must be at least `4n` so that the shrinking ends never reach
/// the support.
pub fn basic_limit<T: Scalar>(spec: &SchemeSpec<T>, levels: usize, padding: usize) -> Result<LimitSamples<T>> {
    let (_, all) = basic_limit_levels(spec, levels, padding)?;
    Ok(all.into_iter().last().expect("level 0 is always present"))
}

/// Like [`basic_limit`] but returns every level from 0 to `levels`.
pub fn basic_limit_levels<T: Scalar>(
    spec: &SchemeSpec<T>,
    levels: usize,
    padding: usize,
) -> Result<(SchemeSpec<T>, Vec<LimitSamples<T>>)> {
    spec.validate()?;
    if padding < 4 * spec.fit.n {
        return Err(Error::input(format!(
            "padding {padding} is below 4n = {}",
            4 * spec.fit.n
        )));
    }
    let mut impulse = vec![T::zero(); 2 * padding + 1];
    impulse[padding] = T::one();
    let polygon = ControlPolygon::from_scalars(impulse).with_params(-T::of_int(padding as i64), T::one());
    let spec = spec.with_boundary(BoundaryPolicy::Shrink);
    let (polys, _) = subdivide_with(&polygon, &spec, levels, Execution::Sequential)?;
    let samples = polys
        .iter()
        .map(|p| LimitSamples::from_polygon(p, 0))
        .collect::<Result<Vec<_>>>()?;
    Ok((spec, samples))
}

/// Length of the smallest parameter interval outside which `|value| <= tol`.
pub fn support_width<T: Scalar>(samples: &LimitSamples<T>, tol: T) -> Result<T> {
    if !(tol > T::zero()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut nonzero = samples.values.iter().enumerate().filter(|(_, v)| v.abs() > tol).map(|(i, _)| i);
    let Some(first) = nonzero.next() else {
        return Ok(T::zero());
    };
    let last = nonzero.last().unwrap_or(first);
    Ok(samples.params[last] - samples.params[first])
}

/// Support width of the limit function estimated from the last two levels
/// of a binary refinement.
///
/// At level `k` the outermost non-zero samples sit `W (1 - 2^-k)` apart,
/// where `W` is the limit support, because the footprint of each step is a
/// fixed multiple of the current spacing. Two consecutive widths therefore
/// determine `W = 2 W_k - W_{k-1}`.
pub fn limit_support_width<T: Scalar>(levels: &[LimitSamples<T>], tol: T) -> Result<T> {
    match levels {
        [.., prev, last] => {
            let two = T::of(2.0);
            Ok(two * support_width(last, tol)? - support_width(prev, tol)?)
        }
        _ => Err(Error::input("limit support needs at least two levels")),
    }
}

/// Excursion beyond `[low, high]` relative to `high - low`.
pub fn overshoot<T: Scalar>(samples: &LimitSamples<T>, low: T, high: T) -> Result<T> {
    if !(low < high) {
        return Err(Error::Domain(format!("need low < high, got [{low}, {high}]")));
    }
    let max = samples.values.iter().copied().fold(T::neg_infinity(), T::max);
    let min = samples.values.iter().copied().fold(T::infinity(), T::min);
    let over = (max - high).max(T::zero()) + (low - min).max(T::zero());
    Ok(over / (high - low))
}

/// `(max_abs, rms)` deviation of the samples from `reference`.
pub fn reproduction_error<T: Scalar>(samples: &LimitSamples<T>, reference: impl Fn(T) -> T) -> (T, T) {
    if samples.is_empty() {
        return (T::zero(), T::zero());
    }
    let mut max = T::zero();
    let mut sq = T::zero();
    for (&t, &v) in samples.params.iter().zip(&samples.values) {
        let e = (v - reference(t)).abs();
        max = max.max(e);
        sq += e * e;
    }
    (max, (sq / T::of_int(samples.len() as i64)).sqrt())
}

/// `max |L_{k+1}(t) - L_k(t)|` over the level-`k` parameters covered by
/// level `k + 1`, for each consecutive pair. Level `k + 1` is read through
/// its piecewise linear interpolant since the two grids need not nest.
pub fn successive_differences<T: Scalar>(levels: &[LimitSamples<T>]) -> Vec<T> {
    levels
        .windows(2)
        .map(|w| {
            w[0].params
                .iter()
                .zip(&w[0].values)
                .filter_map(|(&t, &v)| w[1].sample_at(t).map(|u| (u - v).abs()))
                .fold(T::zero(), T::max)
        })
        .collect()
}
