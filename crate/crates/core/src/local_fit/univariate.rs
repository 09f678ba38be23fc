use super::{run_irls, Beta, FitConfig, FitResult, FitWarning, NormalSystem, Stencil, WeightVector, WlsSolution};
use super::normal::CONDITION_WARNING_THRESHOLD;
use crate::{Error, Result, Scalar};

/// Least squares start `β^(0)`: the weighted solve with unit weights.
pub fn ols_init<T: Scalar>(stencil: Stencil<'_, T>, cfg: &FitConfig<T>) -> Result<Beta<T>> {
    cfg.validate()?;
    stencil.check(cfg)?;
    Ok(wls_solve(stencil, &WeightVector::unit(stencil.len()), cfg.degree)?.beta)
}

/// Residual weights `w_r = ((f_r - p(r))² + δ)^(-1/2)`.
pub fn compute_weights<T: Scalar>(stencil: Stencil<'_, T>, beta: &Beta<T>, delta: T) -> Result<WeightVector<T>> {
    if !(delta > T::zero()) {
        return Err(Error::config(format!("delta must be positive, got {delta}")));
    }
    Ok(weights_unchecked(stencil, beta, delta))
}

fn weights_unchecked<T: Scalar>(stencil: Stencil<'_, T>, beta: &Beta<T>, delta: T) -> WeightVector<T> {
    let w = stencil
        .abscissae()
        .into_iter()
        .zip(stencil.values())
        .map(|(r, &f)| {
            let res = f - beta.eval(r);
            (res * res + delta).sqrt().recip()
        })
        .collect();
    WeightVector(w)
}

/// Minimiser of `Σ_r w_r (f_r - Σ_a r^a β_a)²`.
///
/// The system is assembled on the rescaled abscissae `r / n` and the
/// coefficients mapped back, which keeps the monomial moments of order `2d`
/// near unity.
pub fn wls_solve<T: Scalar>(
    stencil: Stencil<'_, T>,
    weights: &WeightVector<T>,
    degree: usize,
) -> Result<WlsSolution<Beta<T>>> {
    if weights.len() != stencil.len() {
        return Err(Error::input(format!(
            "{} weights for a stencil of {} values",
            weights.len(),
            stencil.len()
        )));
    }
    weights.validate()?;
    if stencil.len() < degree + 1 {
        return Err(Error::config("stencil too small for the requested degree"));
    }
    let scale = T::of_int(stencil.n() as i64);
    let u: Vec<T> = stencil.abscissae().into_iter().map(|r| r / scale).collect();
    let sol = NormalSystem::univariate(&u, weights.as_slice(), stencil.values(), degree).solve()?;
    let mut factor = T::one();
    let coeffs = sol
        .x
        .iter()
        .map(|&g| {
            let c = g / factor;
            factor *= scale;
            c
        })
        .collect();
    Ok(WlsSolution {
        beta: Beta(coeffs),
        warning: condition_warning(sol.condition),
    })
}

pub(crate) fn condition_warning<T: Scalar>(condition: T) -> Option<FitWarning> {
    let c = condition.to_f64().unwrap_or(f64::INFINITY);
    (c > CONDITION_WARNING_THRESHOLD).then_some(FitWarning::IllConditioned { condition: c })
}

/// The smoothed ℓ1 functional `F_δ(β) = Σ_r sqrt((f_r - p(r))² + δ)`.
pub fn objective<T: Scalar>(stencil: Stencil<'_, T>, beta: &Beta<T>, delta: T) -> T {
    stencil
        .abscissae()
        .into_iter()
        .zip(stencil.values())
        .fold(T::zero(), |acc, (r, &f)| {
            let res = f - beta.eval(r);
            acc + (res * res + delta).sqrt()
        })
}

/// Robust local fit: least squares start followed by up to `max_iters`
/// reweighting passes.
pub fn irls_fit<T: Scalar>(stencil: Stencil<'_, T>, cfg: &FitConfig<T>) -> Result<FitResult<T, Beta<T>>> {
    cfg.validate()?;
    stencil.check(cfg)?;
    run_irls(
        stencil.len(),
        cfg.epsilon,
        cfg.max_iters,
        |w| wls_solve(stencil, w, cfg.degree),
        |b| weights_unchecked(stencil, b, cfg.delta),
        |b| objective(stencil, b, cfg.delta),
        |a, b| a.max_abs_diff(b),
    )
}

/// `Σ_a β_a r^a`.
pub fn eval_poly<T: Scalar>(beta: &Beta<T>, r: T) -> T {
    beta.eval(r)
}
