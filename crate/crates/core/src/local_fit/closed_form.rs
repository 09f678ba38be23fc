//! Closed-form least squares starts for unit weights.
//!
//! These evaluate the explicit summation formulas for the cubic (univariate)
//! and quadratic (bivariate) least squares coefficients. Lower degrees zero
//! the higher coefficients inside the same formulas, which yields the lower
//! degree least squares fit because the orthogonal-polynomial projections are
//! nested.

use super::{Beta, Beta2D, FitConfig, Parity, Stencil, Stencil2D};
use crate::{Result, Scalar};

pub fn ols_init_closed_form<T: Scalar>(stencil: Stencil<'_, T>, cfg: &FitConfig<T>) -> Result<Beta<T>> {
    cfg.validate()?;
    stencil.check(cfg)?;
    let d = cfg.degree;
    let n = T::of_int(cfg.n as i64);
    let n2 = n * n;
    let c = T::of;
    let rf = || stencil.abscissae().into_iter().zip(stencil.values().iter().copied());
    let sum = |g: &dyn Fn(T) -> T| rf().fold(T::zero(), |acc, (r, f)| acc + g(r) * f);

    let coeffs = match cfg.parity {
        Parity::Even => {
            let b3 = if d >= 3 {
                let den = n * (n2 - c(1.0)) * (c(4.0) * n2 - c(1.0)) * (c(4.0) * n2 - c(9.0));
                sum(&|r| {
                    c(35.0)
                        * (c(10.0) * r * r * r - c(15.0) * r * r + c(11.0) * r - c(6.0) * n2 * r
                            + c(3.0) * n2
                            - c(3.0))
                        / den
                })
            } else {
                T::zero()
            };
            let b2 = if d >= 2 {
                let den = c(2.0) * n * (n2 - c(1.0)) * (c(4.0) * n2 - c(1.0));
                sum(&|r| c(15.0) * (c(3.0) * r * r - c(3.0) * r - n2 + c(1.0)) / den) - c(1.5) * b3
            } else {
                T::zero()
            };
            let den1 = n * (c(4.0) * n2 - c(1.0));
            let b1 = sum(&|r| c(3.0) * (c(2.0) * r - c(1.0)) / den1)
                - b2
                - (c(3.0) * n2 + c(2.0)) / c(5.0) * b3;
            let b0 = sum(&|_| T::one()) / (c(2.0) * n)
                - b1 / c(2.0)
                - (c(2.0) * n2 + c(1.0)) / c(6.0) * b2
                - n2 / c(2.0) * b3;
            [b0, b1, b2, b3]
        }
        Parity::Odd => {
            let b3 = if d >= 3 {
                let den = n
                    * (n2 - c(1.0))
                    * (n + c(2.0))
                    * (c(4.0) * n2 - c(1.0))
                    * (c(2.0) * n + c(3.0));
                sum(&|r| c(35.0) * (c(5.0) * r * r * r - c(3.0) * n2 * r - c(3.0) * n * r + r) / den)
            } else {
                T::zero()
            };
            let b2 = if d >= 2 {
                let den = n * (n + c(1.0)) * (c(4.0) * n2 - c(1.0)) * (c(2.0) * n + c(3.0));
                sum(&|r| c(15.0) * (c(3.0) * r * r - n2 - n) / den)
            } else {
                T::zero()
            };
            let den1 = n * (n + c(1.0)) * (c(2.0) * n + c(1.0));
            let b1 = sum(&|r| c(3.0) * r / den1) - (c(3.0) * n2 + c(3.0) * n - c(1.0)) / c(5.0) * b3;
            let b0 = sum(&|_| T::one()) / (c(2.0) * n + c(1.0)) - n * (n + c(1.0)) / c(3.0) * b2;
            [b0, b1, b2, b3]
        }
    };
    Ok(Beta(coeffs[..=d].to_vec()))
}

pub fn ols_init_2d_closed_form<T: Scalar>(
    stencil: Stencil2D<'_, T>,
    cfg: &FitConfig<T>,
) -> Result<Beta2D<T>> {
    cfg.validate_2d()?;
    stencil.check(cfg)?;
    let quadratic = cfg.degree == 2;
    let n = T::of_int(cfg.n as i64);
    let n2 = n * n;
    let c = T::of;
    let ax = stencil.abscissae();
    let sum = |g: &dyn Fn(T, T) -> T| {
        let mut acc = T::zero();
        for (i, &r) in ax.iter().enumerate() {
            for (j, &s) in ax.iter().enumerate() {
                acc += g(r, s) * stencil.get(i, j);
            }
        }
        acc
    };

    let coeffs = match cfg.parity {
        Parity::Even => {
            let (b3, b4, b5) = if quadratic {
                let den_sq = c(4.0) * n2 * (n2 - c(1.0)) * (c(4.0) * n2 - c(1.0));
                let q = c(4.0) * n2 - c(1.0);
                let b5 = sum(&|_, s| -c(15.0) * (c(3.0) * s - c(1.0) - c(3.0) * s * s + n2) / den_sq);
                let b4 = sum(&|r, s| c(9.0) * (c(4.0) * r * s + c(1.0) - c(2.0) * r - c(2.0) * s) / (n2 * q * q));
                let b3 = sum(&|r, _| -c(15.0) * (n2 + c(3.0) * r - c(3.0) * r * r - c(1.0)) / den_sq);
                (b3, b4, b5)
            } else {
                (T::zero(), T::zero(), T::zero())
            };
            let den = c(2.0) * n2 * (c(4.0) * n2 - c(1.0));
            let b2 = sum(&|_, s| c(3.0) * (c(2.0) * s - c(1.0)) / den) - b4 / c(2.0) - b5;
            let b1 = sum(&|r, _| c(3.0) * (c(2.0) * r - c(1.0)) / den) - b3 - b4 / c(2.0);
            let k = (c(2.0) * n2 + c(1.0)) / c(6.0);
            let b0 = sum(&|_, _| T::one()) / (c(4.0) * n2) - b1 / c(2.0) - b2 / c(2.0) - k * b3 - b4 / c(4.0) - k * b5;
            [b0, b1, b2, b3, b4, b5]
        }
        Parity::Odd => {
            let m = c(2.0) * n + c(1.0);
            let (b3, b4, b5) = if quadratic {
                let den = n * (n + c(1.0)) * (c(2.0) * n - c(1.0)) * m * m * (c(2.0) * n + c(3.0));
                let b5 = sum(&|_, s| -c(15.0) * (n2 + n - c(3.0) * s * s) / den);
                let b4 = sum(&|r, s| c(9.0) * r * s / (n2 * (n + c(1.0)) * (n + c(1.0)) * m * m));
                let b3 = sum(&|r, _| -c(15.0) * (n2 + n - c(3.0) * r * r) / den);
                (b3, b4, b5)
            } else {
                (T::zero(), T::zero(), T::zero())
            };
            let den = n * (n + c(1.0)) * m * m;
            let b2 = sum(&|_, s| c(3.0) * s / den);
            let b1 = sum(&|r, _| c(3.0) * r / den);
            let k = n * (n + c(1.0)) / c(3.0);
            let b0 = sum(&|_, _| T::one()) / (m * m) - k * b3 - k * b5;
            [b0, b1, b2, b3, b4, b5]
        }
    };
    let len = if quadratic { 6 } else { 3 };
    Ok(Beta2D(coeffs[..len].to_vec()))
}
