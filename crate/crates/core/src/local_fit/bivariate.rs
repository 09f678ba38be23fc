use super::univariate::condition_warning;
use super::{
    coeff_count_2d, run_irls, Beta2D, FitConfig, FitResult, NormalSystem, Stencil2D, WeightVector,
    WlsSolution, EXPONENTS_2D,
};
use crate::{Error, Result, Scalar};

/// Bivariate least squares start `B^(0)`.
pub fn ols_init_2d<T: Scalar>(stencil: Stencil2D<'_, T>, cfg: &FitConfig<T>) -> Result<Beta2D<T>> {
    cfg.validate_2d()?;
    stencil.check(cfg)?;
    let unit = WeightVector::unit(stencil.values().len());
    Ok(wls_solve_2d(stencil, &unit, cfg.degree)?.beta)
}

/// Residual weights `w_{r,s} = ((f_{r,s} - p(r, s))² + δ)^(-1/2)`, row-major.
pub fn compute_weights_2d<T: Scalar>(
    stencil: Stencil2D<'_, T>,
    beta: &Beta2D<T>,
    delta: T,
) -> Result<WeightVector<T>> {
    if !(delta > T::zero()) {
        return Err(Error::config(format!("delta must be positive, got {delta}")));
    }
    Ok(weights_unchecked(stencil, beta, delta))
}

fn weights_unchecked<T: Scalar>(stencil: Stencil2D<'_, T>, beta: &Beta2D<T>, delta: T) -> WeightVector<T> {
    let ax = stencil.abscissae();
    let mut w = Vec::with_capacity(ax.len() * ax.len());
    for (i, &r) in ax.iter().enumerate() {
        for (j, &s) in ax.iter().enumerate() {
            let res = stencil.get(i, j) - beta.eval(r, s);
            w.push((res * res + delta).sqrt().recip());
        }
    }
    WeightVector(w)
}

/// Minimiser of `Σ_{r,s} w_{r,s} (f_{r,s} - Σ_a r^a1 s^a2 B_a)²` via the
/// 3x3 (`d = 1`) or 6x6 (`d = 2`) normal equations on rescaled abscissae.
pub fn wls_solve_2d<T: Scalar>(
    stencil: Stencil2D<'_, T>,
    weights: &WeightVector<T>,
    degree: usize,
) -> Result<WlsSolution<Beta2D<T>>> {
    if weights.len() != stencil.values().len() {
        return Err(Error::input(format!(
            "{} weights for a stencil of {} values",
            weights.len(),
            stencil.values().len()
        )));
    }
    if !(1..=2).contains(&degree) {
        return Err(Error::config(format!("bivariate fits support degree 1 or 2, got {degree}")));
    }
    weights.validate()?;
    let scale = T::of_int(stencil.n() as i64);
    let u: Vec<T> = stencil.abscissae().into_iter().map(|r| r / scale).collect();
    let sol = NormalSystem::bivariate(&u, weights.as_slice(), stencil.values(), degree).solve()?;
    let coeffs = sol
        .x
        .iter()
        .zip(&EXPONENTS_2D[..coeff_count_2d(degree)])
        .map(|(&g, &(a1, a2))| g / scale.powi((a1 + a2) as i32))
        .collect();
    Ok(WlsSolution {
        beta: Beta2D(coeffs),
        warning: condition_warning(sol.condition),
    })
}

/// `F_δ` over a square stencil.
pub fn objective_2d<T: Scalar>(stencil: Stencil2D<'_, T>, beta: &Beta2D<T>, delta: T) -> T {
    let ax = stencil.abscissae();
    let mut acc = T::zero();
    for (i, &r) in ax.iter().enumerate() {
        for (j, &s) in ax.iter().enumerate() {
            let res = stencil.get(i, j) - beta.eval(r, s);
            acc += (res * res + delta).sqrt();
        }
    }
    acc
}

pub fn irls_fit_2d<T: Scalar>(
    stencil: Stencil2D<'_, T>,
    cfg: &FitConfig<T>,
) -> Result<FitResult<T, Beta2D<T>>> {
    cfg.validate_2d()?;
    stencil.check(cfg)?;
    run_irls(
        stencil.values().len(),
        cfg.epsilon,
        cfg.max_iters,
        |w| wls_solve_2d(stencil, w, cfg.degree),
        |b| weights_unchecked(stencil, b, cfg.delta),
        |b| objective_2d(stencil, b, cfg.delta),
        |a, b| a.max_abs_diff(b),
    )
}

/// `Σ_a B_a r^a1 s^a2`.
pub fn eval_poly_2d<T: Scalar>(beta: &Beta2D<T>, r: T, s: T) -> T {
    beta.eval(r, s)
}
