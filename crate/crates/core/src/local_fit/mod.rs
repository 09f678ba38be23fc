//! Weighted local polynomial fitting: the IRLS engine behind every scheme.
//!
//! A stencil of `2n` (even parity, abscissae `-n+1..=n`) or `2n + 1` (odd
//! parity, abscissae `-n..=n`) values is fitted by a polynomial of degree
//! `d` minimising the smoothed ℓ1 functional
//!
//! ```text
//! F_δ(β) = Σ_r sqrt((f_r - Σ_a r^a β_a)² + δ)
//! ```
//!
//! The iteration starts from the ordinary least squares fit and alternates
//! weight updates `w_r = ((f_r - p(r))² + δ)^(-1/2)` with weighted least
//! squares solves until the largest coefficient change drops below `ε` or
//! the iteration cap is reached. Bivariate stencils work the same way on a
//! square grid with monomials `r^a1 s^a2`, `a1 + a2 <= d`.

mod bivariate;
mod closed_form;
mod normal;
mod univariate;

pub use bivariate::{
    compute_weights_2d, eval_poly_2d, irls_fit_2d, objective_2d, ols_init_2d, wls_solve_2d,
};
pub use closed_form::{ols_init_2d_closed_form, ols_init_closed_form};
pub use normal::{MomentVector, NormalSystem, Solution, CONDITION_WARNING_THRESHOLD};
pub use univariate::{compute_weights, eval_poly, irls_fit, objective, ols_init, wls_solve};

use crate::{Error, Result, Scalar};

/// Whether a stencil has `2n` or `2n + 1` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn stencil_len(self, n: usize) -> usize {
        match self {
            Parity::Even => 2 * n,
            Parity::Odd => 2 * n + 1,
        }
    }

    /// Smallest integer abscissa of a half-width `n` stencil.
    pub fn first_offset(self, n: usize) -> i64 {
        match self {
            Parity::Even => 1 - n as i64,
            Parity::Odd => -(n as i64),
        }
    }

    pub fn offsets(self, n: usize) -> std::ops::RangeInclusive<i64> {
        self.first_offset(n)..=n as i64
    }

    /// Parity and half-width implied by a stencil length.
    pub fn from_len(len: usize) -> (Parity, usize) {
        if len % 2 == 0 {
            (Parity::Even, len / 2)
        } else {
            (Parity::Odd, (len - 1) / 2)
        }
    }
}

/// Exponent pairs `(a1, a2)` of the bivariate monomials, in coefficient order.
pub const EXPONENTS_2D: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

/// Number of bivariate coefficients for total degree `d`.
pub fn coeff_count_2d(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig<T> {
    pub degree: usize,
    pub parity: Parity,
    /// Stencil half-width, at least 2.
    pub n: usize,
    /// Smoothing parameter of the ℓ1 approximation.
    pub delta: T,
    /// Stopping threshold on the largest coefficient change.
    pub epsilon: T,
    /// Maximum number of reweighting passes after the least squares start.
    pub max_iters: usize,
}

impl<T: Scalar> FitConfig<T> {
    pub const DEFAULT_DELTA: f64 = 1e-4;
    pub const DEFAULT_EPSILON: f64 = 1e-6;
    pub const DEFAULT_MAX_ITERS: usize = 6;

    pub fn new(degree: usize, parity: Parity, n: usize) -> Self {
        FitConfig {
            degree,
            parity,
            n,
            delta: T::of(Self::DEFAULT_DELTA),
            epsilon: T::of(Self::DEFAULT_EPSILON),
            max_iters: Self::DEFAULT_MAX_ITERS,
        }
    }

    /// Configuration for the `h`-point family: `h = 2n` is even parity,
    /// `h = 2n + 1` odd.
    pub fn for_points(points: usize, degree: usize) -> Self {
        let (parity, n) = Parity::from_len(points);
        Self::new(degree, parity, n)
    }

    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn stencil_len(&self) -> usize {
        self.parity.stencil_len(self.n)
    }

    pub fn points(&self) -> usize {
        self.stencil_len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config(format!("half-width n must be >= 2, got {}", self.n)));
        }
        if !(1..=3).contains(&self.degree) {
            return Err(Error::config(format!("degree must be 1, 2 or 3, got {}", self.degree)));
        }
        if 2 * self.n < self.degree + 1 {
            return Err(Error::config("stencil too small for the requested degree"));
        }
        if !(self.delta > T::zero()) || !self.delta.is_finite() {
            return Err(Error::config(format!("delta must be positive and finite, got {}", self.delta)));
        }
        if !(self.epsilon > T::zero()) || !self.epsilon.is_finite() {
            return Err(Error::config(format!("epsilon must be positive and finite, got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn validate_2d(&self) -> Result<()> {
        self.validate()?;
        if self.degree > 2 {
            return Err(Error::config(format!(
                "bivariate fits support degree 1 or 2, got {}",
                self.degree
            )));
        }
        Ok(())
    }
}

/// A window of consecutive control values with implied integer abscissae.
#[derive(Debug, Clone, Copy)]
pub struct Stencil<'a, T> {
    values: &'a [T],
    parity: Parity,
}

impl<'a, T: Scalar> Stencil<'a, T> {
    pub fn new(values: &'a [T], parity: Parity) -> Result<Self> {
        let len = values.len();
        let ok = match parity {
            Parity::Even => len % 2 == 0 && len >= 4,
            Parity::Odd => len % 2 == 1 && len >= 5,
        };
        if !ok {
            return Err(Error::input(format!("stencil length {len} does not match {parity:?} parity")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("stencil contains non-finite values"));
        }
        Ok(Stencil { values, parity })
    }

    /// Parity inferred from the length (`2n` even, `2n + 1` odd).
    pub fn from_slice(values: &'a [T]) -> Result<Self> {
        Self::new(values, Parity::from_len(values.len()).0)
    }

    pub fn values(&self) -> &'a [T] {
        self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn n(&self) -> usize {
        Parity::from_len(self.values.len()).1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn abscissae(&self) -> Vec<T> {
        self.parity.offsets(self.n()).map(T::of_int).collect()
    }

    pub(crate) fn check(&self, cfg: &FitConfig<T>) -> Result<()> {
        if self.parity != cfg.parity || self.n() != cfg.n {
            return Err(Error::config(format!(
                "stencil ({:?}, n={}) does not match configuration ({:?}, n={})",
                self.parity,
                self.n(),
                cfg.parity,
                cfg.n
            )));
        }
        Ok(())
    }
}

/// Square window of control values, row-major, `values[i * side + j]` at
/// abscissae `(r_i, s_j)`.
#[derive(Debug, Clone, Copy)]
pub struct Stencil2D<'a, T> {
    values: &'a [T],
    side: usize,
    parity: Parity,
}

impl<'a, T: Scalar> Stencil2D<'a, T> {
    pub fn new(values: &'a [T], side: usize, parity: Parity) -> Result<Self> {
        if values.len() != side * side {
            return Err(Error::input(format!(
                "bivariate stencil has {} values, expected {side}x{side}",
                values.len()
            )));
        }
        let ok = match parity {
            Parity::Even => side % 2 == 0 && side >= 4,
            Parity::Odd => side % 2 == 1 && side >= 5,
        };
        if !ok {
            return Err(Error::input(format!("stencil side {side} does not match {parity:?} parity")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("stencil contains non-finite values"));
        }
        Ok(Stencil2D { values, side, parity })
    }

    pub fn values(&self) -> &'a [T] {
        self.values
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn n(&self) -> usize {
        Parity::from_len(self.side).1
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.side + j]
    }

    /// Axis abscissae, shared by `r` and `s`.
    pub fn abscissae(&self) -> Vec<T> {
        self.parity.offsets(self.n()).map(T::of_int).collect()
    }

    pub(crate) fn check(&self, cfg: &FitConfig<T>) -> Result<()> {
        if self.parity != cfg.parity || self.n() != cfg.n {
            return Err(Error::config(format!(
                "stencil ({:?}, n={}) does not match configuration ({:?}, n={})",
                self.parity,
                self.n(),
                cfg.parity,
                cfg.n
            )));
        }
        Ok(())
    }
}

/// Univariate coefficients `β_0..β_d` of `Σ β_a r^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beta<T>(pub Vec<T>);

impl<T: Scalar> Beta<T> {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.0
    }

    pub fn eval(&self, r: T) -> T {
        self.0.iter().rev().fold(T::zero(), |acc, &c| acc * r + c)
    }

    pub(crate) fn max_abs_diff(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

/// Bivariate coefficients `B_a` in the order of [`EXPONENTS_2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Beta2D<T>(pub Vec<T>);

impl<T: Scalar> Beta2D<T> {
    pub fn degree(&self) -> usize {
        if self.0.len() > 3 {
            2
        } else {
            1
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.0
    }

    pub fn eval(&self, r: T, s: T) -> T {
        self.0
            .iter()
            .zip(EXPONENTS_2D.iter())
            .fold(T::zero(), |acc, (&c, &(a1, a2))| acc + c * r.powi(a1 as i32) * s.powi(a2 as i32))
    }

    pub(crate) fn max_abs_diff(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

/// Per-sample IRLS weights, same layout as the stencil they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(pub Vec<T>);

impl<T: Scalar> WeightVector<T> {
    pub fn unit(len: usize) -> Self {
        WeightVector(vec![T::one(); len])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        match self.0.iter().find(|w| !(**w > T::zero()) || !w.is_finite()) {
            Some(w) => Err(Error::Domain(format!("weights must be positive and finite, got {w}"))),
            None => Ok(()),
        }
    }
}

/// A weighted least squares solution and any conditioning warning.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsSolution<B> {
    pub beta: B,
    pub warning: Option<FitWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWarning {
    /// The weighted normal system had a condition estimate above
    /// [`CONDITION_WARNING_THRESHOLD`].
    IllConditioned { condition: f64 },
}

/// Outcome of one IRLS run.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T, B> {
    pub beta: B,
    /// Reweighting passes actually run (0 when only the least squares start
    /// was computed).
    pub iterations: usize,
    /// The last coefficient change was below `ε`.
    pub converged: bool,
    /// Weights of the solve that produced `beta` (unit weights for the least
    /// squares start).
    pub final_weights: WeightVector<T>,
    /// `F_δ` at the start and after every pass.
    pub objective_trace: Vec<T>,
    pub warnings: Vec<FitWarning>,
}

/// Least squares start, then reweight and re-solve until the largest
/// coefficient change falls below `epsilon` or `max_iters` passes ran.
pub(crate) fn run_irls<T: Scalar, B>(
    len: usize,
    epsilon: T,
    max_iters: usize,
    solve: impl Fn(&WeightVector<T>) -> Result<WlsSolution<B>>,
    weigh: impl Fn(&B) -> WeightVector<T>,
    objective: impl Fn(&B) -> T,
    change: impl Fn(&B, &B) -> T,
) -> Result<FitResult<T, B>> {
    let mut warnings = Vec::new();
    let mut weights = WeightVector::unit(len);
    let start = solve(&weights)?;
    warnings.extend(start.warning);
    let mut beta = start.beta;
    let mut trace = vec![objective(&beta)];
    let mut iterations = 0;
    let mut converged = false;

    for m in 1..=max_iters {
        let next_weights = weigh(&beta);
        let WlsSolution { beta: next, warning } = solve(&next_weights)?;
        warnings.extend(warning);
        let delta = change(&next, &beta);
        trace.push(objective(&next));
        beta = next;
        weights = next_weights;
        iterations = m;
        if delta < epsilon {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        beta,
        iterations,
        converged,
        final_weights: weights,
        objective_trace: trace,
        warnings,
    })
}
