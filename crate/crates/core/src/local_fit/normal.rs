use crate::{Error, Result, Scalar};

/// Condition estimates above this attach a [`super::FitWarning`].
pub const CONDITION_WARNING_THRESHOLD: f64 = 1e12;

/// Weighted power sums of the abscissae.
///
/// Univariate: `α_b = Σ_r r^b w_r` for `b = 0..=max_power`.
/// Bivariate: `τ_b = Σ_{r,s} r^b1 s^b2 w_{r,s}` over all `(b1, b2)` with
/// `b1 + b2 <= max_total`, ordered by total degree and then by decreasing
/// `b1`: `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), (3,0), ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<T>(pub Vec<T>);

impl<T: Scalar> MomentVector<T> {
    pub fn univariate(abscissae: &[T], weights: &[T], max_power: usize) -> Self {
        let mut out = vec![T::zero(); max_power + 1];
        for (&r, &w) in abscissae.iter().zip(weights) {
            let mut p = w;
            for slot in out.iter_mut() {
                *slot += p;
                p *= r;
            }
        }
        MomentVector(out)
    }

    /// `abscissae` is the shared axis; `weights` is row-major over `(r, s)`.
    pub fn bivariate(abscissae: &[T], weights: &[T], max_total: usize) -> Self {
        let side = abscissae.len();
        let mut out = vec![T::zero(); bivariate_len(max_total)];
        for (i, &r) in abscissae.iter().enumerate() {
            for (j, &s) in abscissae.iter().enumerate() {
                let w = weights[i * side + j];
                for t in 0..=max_total {
                    for b2 in 0..=t {
                        let b1 = t - b2;
                        out[bivariate_index(b1, b2)] += w * r.powi(b1 as i32) * s.powi(b2 as i32);
                    }
                }
            }
        }
        MomentVector(out)
    }

    pub fn get(&self, b: usize) -> T {
        self.0[b]
    }

    pub fn get_2d(&self, b1: usize, b2: usize) -> T {
        self.0[bivariate_index(b1, b2)]
    }
}

pub(crate) fn bivariate_index(b1: usize, b2: usize) -> usize {
    let t = b1 + b2;
    t * (t + 1) / 2 + b2
}

fn bivariate_len(max_total: usize) -> usize {
    (max_total + 1) * (max_total + 2) / 2
}

/// Symmetric weighted normal equations `M β = rhs` for one stencil fit.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalSystem<T> {
    pub dim: usize,
    /// Row-major `dim x dim`.
    pub matrix: Vec<T>,
    pub rhs: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub x: Vec<T>,
    /// `‖M‖₁ ‖M⁻¹‖₁`.
    pub condition: T,
}

impl<T: Scalar> NormalSystem<T> {
    /// Univariate system: `M[a][b] = α_{a+b}`, `rhs[a] = Σ r^a w f`.
    pub fn univariate(abscissae: &[T], weights: &[T], values: &[T], degree: usize) -> Self {
        let dim = degree + 1;
        let moments = MomentVector::univariate(abscissae, weights, 2 * degree);
        let mut matrix = vec![T::zero(); dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                matrix[a * dim + b] = moments.get(a + b);
            }
        }
        let mut rhs = vec![T::zero(); dim];
        for ((&r, &w), &f) in abscissae.iter().zip(weights).zip(values) {
            let mut p = w * f;
            for slot in rhs.iter_mut() {
                *slot += p;
                p *= r;
            }
        }
        NormalSystem { dim, matrix, rhs }
    }

    /// Bivariate system over monomials `r^a1 s^a2`, `a1 + a2 <= degree`:
    /// `M[a][b] = τ(a + b)`, `rhs[a] = A_a = Σ r^a1 s^a2 w f`.
    pub fn bivariate(abscissae: &[T], weights: &[T], values: &[T], degree: usize) -> Self {
        let exps = &super::EXPONENTS_2D[..super::coeff_count_2d(degree)];
        let dim = exps.len();
        let side = abscissae.len();
        let moments = MomentVector::bivariate(abscissae, weights, 2 * degree);
        let mut matrix = vec![T::zero(); dim * dim];
        for (a, &(a1, a2)) in exps.iter().enumerate() {
            for (b, &(b1, b2)) in exps.iter().enumerate() {
                matrix[a * dim + b] = moments.get_2d((a1 + b1) as usize, (a2 + b2) as usize);
            }
        }
        let mut rhs = vec![T::zero(); dim];
        for (i, &r) in abscissae.iter().enumerate() {
            for (j, &s) in abscissae.iter().enumerate() {
                let k = i * side + j;
                let wf = weights[k] * values[k];
                for (slot, &(a1, a2)) in rhs.iter_mut().zip(exps) {
                    *slot += wf * r.powi(a1 as i32) * s.powi(a2 as i32);
                }
            }
        }
        NormalSystem { dim, matrix, rhs }
    }

    /// Gaussian elimination with partial pivoting plus a 1-norm condition
    /// estimate from the explicit inverse (systems are at most 6x6).
    pub fn solve(&self) -> Result<Solution<T>> {
        let lu = Lu::factor(self.dim, &self.matrix)?;
        let x = lu.solve(&self.rhs);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("non-finite solution".into()));
        }

        let norm = column_norm(self.dim, &self.matrix);
        let mut inv_norm = T::zero();
        let mut e = vec![T::zero(); self.dim];
        for j in 0..self.dim {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = lu.solve(&e);
            inv_norm = inv_norm.max(col.iter().fold(T::zero(), |s, v| s + v.abs()));
        }
        Ok(Solution { x, condition: norm * inv_norm })
    }
}

fn column_norm<T: Scalar>(dim: usize, m: &[T]) -> T {
    (0..dim)
        .map(|j| (0..dim).fold(T::zero(), |s, i| s + m[i * dim + j].abs()))
        .fold(T::zero(), T::max)
}

struct Lu<T> {
    dim: usize,
    a: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    fn factor(dim: usize, matrix: &[T]) -> Result<Self> {
        let mut a = matrix.to_vec();
        let mut perm: Vec<usize> = (0..dim).collect();
        for k in 0..dim {
            let p = (k..dim)
                .max_by(|&i, &j| {
                    a[i * dim + k]
                        .abs()
                        .partial_cmp(&a[j * dim + k].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(k);
            let pivot = a[p * dim + k];
            if pivot == T::zero() || !pivot.is_finite() {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            if p != k {
                for j in 0..dim {
                    a.swap(k * dim + j, p * dim + j);
                }
                perm.swap(k, p);
            }
            for i in k + 1..dim {
                let factor = a[i * dim + k] / a[k * dim + k];
                a[i * dim + k] = factor;
                for j in k + 1..dim {
                    let v = a[k * dim + j];
                    a[i * dim + j] -= factor * v;
                }
            }
        }
        Ok(Lu { dim, a, perm })
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let dim = self.dim;
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..dim {
            for j in 0..i {
                let v = self.a[i * dim + j] * y[j];
                y[i] -= v;
            }
        }
        for i in (0..dim).rev() {
            for j in i + 1..dim {
                let v = self.a[i * dim + j] * y[j];
                y[i] -= v;
            }
            y[i] /= self.a[i * dim + i];
        }
        y
    }
}
