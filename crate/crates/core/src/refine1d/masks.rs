//! Linear masks of a fixed-weight fit.
//!
//! For frozen weights the fitted value at an abscissa is linear in the
//! stencil data, `p(x) = Σ_r m_r f_r`. The generic route obtains `m` by
//! fitting unit impulses; the closed forms below give the same numbers for
//! degrees 1 and 2 at the binary abscissae `±1/4`, `3/4`.

use super::{abscissae, SchemeSpec};
use crate::local_fit::{wls_solve, MomentVector, Parity, Stencil, WeightVector};
use crate::{Error, Result, Scalar};

/// Coefficients `m_r` (in stencil order) producing the value at `abscissa`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask<T> {
    pub abscissa: T,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> Mask<T> {
    pub fn apply(&self, values: &[T]) -> T {
        self.coeffs.iter().zip(values).fold(T::zero(), |s, (&m, &f)| s + m * f)
    }

    pub fn sum(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, &m| s + m)
    }
}

fn stencil_shape<T: Scalar>(weights: &WeightVector<T>, parity: Parity) -> Result<(usize, Vec<T>)> {
    weights.validate()?;
    let (p, n) = Parity::from_len(weights.len());
    if p != parity || n < 2 {
        return Err(Error::input(format!(
            "{} weights do not form a {parity:?} stencil",
            weights.len()
        )));
    }
    let r = parity.offsets(n).map(T::of_int).collect();
    Ok((n, r))
}

/// Masks at each of `points` by fitting unit impulses with fixed weights.
pub fn generic_masks<T: Scalar>(
    weights: &WeightVector<T>,
    parity: Parity,
    degree: usize,
    points: &[T],
) -> Result<Vec<Mask<T>>> {
    let (_, r) = stencil_shape(weights, parity)?;
    let len = r.len();
    let mut columns = Vec::with_capacity(len);
    let mut impulse = vec![T::zero(); len];
    for k in 0..len {
        impulse[k] = T::one();
        let beta = wls_solve(Stencil::new(&impulse, parity)?, weights, degree)?.beta;
        columns.push(beta);
        impulse[k] = T::zero();
    }
    Ok(points
        .iter()
        .map(|&x| Mask {
            abscissa: x,
            coeffs: columns.iter().map(|b| b.eval(x)).collect(),
        })
        .collect())
}

/// Masks of the linear least squares scheme (unit weights) at the binary
/// abscissae of `spec`.
pub fn constant_weight_mask<T: Scalar>(spec: &SchemeSpec<T>) -> Result<Vec<Mask<T>>> {
    spec.validate()?;
    let fit = &spec.fit;
    let ab = abscissae(fit.parity, spec.arity)?;
    generic_masks(&WeightVector::unit(fit.stencil_len()), fit.parity, fit.degree, &ab)
}

fn moments<T: Scalar>(r: &[T], weights: &WeightVector<T>, max_power: usize) -> Vec<T> {
    MomentVector::univariate(r, weights.as_slice(), max_power).0
}

/// Degree-1 masks from the moment closed form, at the binary abscissae.
///
/// With `χ0 = α0 α2 - α1²` the coefficient of `f_r` is `t(r) w_r / (4 χ0)`
/// where `t` is `4α2 - 4rα1 + rα0 - α1` at `1/4`, `4α2 - 4rα1 + 3rα0 - 3α1`
/// at `3/4` and `4α2 - 4rα1 - rα0 + α1` at `-1/4`.
pub fn masks_d1_closed_form<T: Scalar>(weights: &WeightVector<T>, parity: Parity) -> Result<Vec<Mask<T>>> {
    let (_, r) = stencil_shape(weights, parity)?;
    let a = moments(&r, weights, 2);
    let chi0 = a[0] * a[2] - a[1] * a[1];
    let four = T::of(4.0);
    let three = T::of(3.0);
    let t_quarter = |x: T| four * a[2] - four * x * a[1] + x * a[0] - a[1];
    let t_three_quarters = |x: T| four * a[2] - four * x * a[1] + three * x * a[0] - three * a[1];
    let t_minus_quarter = |x: T| four * a[2] - four * x * a[1] - x * a[0] + a[1];
    let build = |abscissa: f64, t: &dyn Fn(T) -> T| Mask {
        abscissa: T::of(abscissa),
        coeffs: r
            .iter()
            .zip(weights.as_slice())
            .map(|(&x, &w)| t(x) * w / (four * chi0))
            .collect(),
    };
    Ok(match parity {
        Parity::Even => vec![build(0.25, &t_quarter), build(0.75, &t_three_quarters)],
        Parity::Odd => vec![build(-0.25, &t_minus_quarter), build(0.25, &t_quarter)],
    })
}

/// Degree-2 masks from the moment closed form, at the binary abscissae.
///
/// The coefficient of `f_r` is `α0 q(r) w_r / (16 λ0)` with
/// `λ0 = χ0 χ3 - χ1²`, `χ1 = α0 α3 - α1 α2`, `χ3 = α0 α4 - α2²`.
pub fn masks_d2_closed_form<T: Scalar>(weights: &WeightVector<T>, parity: Parity) -> Result<Vec<Mask<T>>> {
    let (_, r) = stencil_shape(weights, parity)?;
    let a = moments(&r, weights, 4);
    let (a0, a1, a2, a3, a4) = (a[0], a[1], a[2], a[3], a[4]);
    let chi0 = a0 * a2 - a1 * a1;
    let chi1 = a0 * a3 - a1 * a2;
    let chi3 = a0 * a4 - a2 * a2;
    let lambda0 = chi0 * chi3 - chi1 * chi1;
    let c = |v: f64| T::of(v);

    let q_quarter = |x: T| {
        let x2 = x * x;
        x2 * a0 * a2 + c(4.0) * a0 * x * a4 - c(4.0) * a0 * a3 * x2 - a0 * a3 * x - a2 * a2
            - c(4.0) * a2 * a2 * x
            - c(16.0) * x2 * a2 * a2
            + a1 * a2 * x
            + c(4.0) * a2 * a3
            + c(4.0) * a2 * a1 * x2
            + c(16.0) * a2 * a3 * x
            + c(16.0) * a4 * a2
            - c(16.0) * a1 * a4 * x
            + a1 * a3
            - c(16.0) * a3 * a3
            - x2 * a1 * a1
            + c(16.0) * x2 * a1 * a3
            - c(4.0) * a1 * a4
    };
    let q_three_quarters = |x: T| {
        let x2 = x * x;
        c(9.0) * x2 * a0 * a2 + c(12.0) * a0 * x * a4 - c(9.0) * a0 * a3 * x - c(12.0) * a0 * a3 * x2
            - c(12.0) * a2 * a2 * x
            - c(9.0) * a2 * a2
            - c(16.0) * x2 * a2 * a2
            + c(9.0) * a1 * a2 * x
            + c(12.0) * a2 * a1 * x2
            + c(16.0) * a4 * a2
            + c(12.0) * a2 * a3
            + c(16.0) * a2 * a3 * x
            + c(9.0) * a1 * a3
            - c(16.0) * a1 * a4 * x
            - c(12.0) * a1 * a4
            - c(9.0) * x2 * a1 * a1
            + c(16.0) * x2 * a1 * a3
            - c(16.0) * a3 * a3
    };
    let q_minus_quarter = |x: T| {
        let x2 = x * x;
        -c(16.0) * x2 * a2 * a2 + c(16.0) * a2 * a4 + c(16.0) * a2 * a3 * x - c(16.0) * a1 * a4 * x
            + c(16.0) * x2 * a1 * a3
            - c(16.0) * a3 * a3
            - c(4.0) * a0 * x * a4
            + c(4.0) * a0 * a3 * x2
            + c(4.0) * x * a2 * a2
            - c(4.0) * a2 * a3
            - c(4.0) * a2 * a1 * x2
            + c(4.0) * a1 * a4
            + x2 * a0 * a2
            - x2 * a1 * a1
            - a2 * a2
            - a0 * a3 * x
            + a1 * a3
            + a1 * a2 * x
    };
    let scale = a0 / (c(16.0) * lambda0);
    let build = |abscissa: f64, q: &dyn Fn(T) -> T| Mask {
        abscissa: T::of(abscissa),
        coeffs: r
            .iter()
            .zip(weights.as_slice())
            .map(|(&x, &w)| scale * q(x) * w)
            .collect(),
    };
    Ok(match parity {
        Parity::Even => vec![build(0.25, &q_quarter), build(0.75, &q_three_quarters)],
        Parity::Odd => vec![build(-0.25, &q_minus_quarter), build(0.25, &q_quarter)],
    })
}
