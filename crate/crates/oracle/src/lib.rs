//! Reference implementations for testing `subdiv-l1`.
//!
//! Everything here is plain `f64` and deliberately shares no code with the
//! library: least squares goes through Householder QR on the weighted design
//! matrix rather than normal equations, the smoothed ℓ1 functional is
//! minimised directly with Newton's method, and the exact ℓ1 line fit is
//! found by enumeration.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("rank deficient design")]
    Singular,
    #[error("no convergence after {iterations} iterations (gradient norm {gradient:e})")]
    NonConvergence { iterations: usize, gradient: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Integer abscissae of a stencil of `len` values: `-n+1..=n` for `len = 2n`,
/// `-n..=n` for `len = 2n + 1`.
pub fn stencil_abscissae(len: usize) -> Vec<f64> {
    let half = (len / 2) as i64;
    let lo = if len % 2 == 0 { 1 - half } else { -half };
    (0..len as i64).map(|k| (lo + k) as f64).collect()
}

/// Rows `[1, r, r², ...]`.
pub fn design_1d(abscissae: &[f64], degree: usize) -> Vec<Vec<f64>> {
    abscissae
        .iter()
        .map(|&r| (0..=degree).map(|a| r.powi(a as i32)).collect())
        .collect()
}

/// Monomials of total degree <= 2 in the library's coefficient order.
const MONOMIALS_2D: [(i32, i32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

pub fn monomials_2d(r: f64, s: f64, degree: usize) -> Vec<f64> {
    let count = (degree + 1) * (degree + 2) / 2;
    MONOMIALS_2D[..count].iter().map(|&(a, b)| r.powi(a) * s.powi(b)).collect()
}

/// Rows for the grid `(abscissae[i], abscissae[j])`, row-major in `(i, j)`.
pub fn design_2d(abscissae: &[f64], degree: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for &r in abscissae {
        for &s in abscissae {
            rows.push(monomials_2d(r, s, degree));
        }
    }
    rows
}

/// Weighted least squares `argmin Σ w_k (y_k - x_k·β)²` by Householder QR.
pub fn brute_ls(design: &[Vec<f64>], weights: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let m = design.len();
    let p = design.first().map_or(0, Vec::len);
    if m < p || weights.len() != m || values.len() != m {
        return Err(OracleError::Degenerate(format!("{m} rows for {p} unknowns")));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(OracleError::Degenerate("weights must be positive".into()));
    }
    let mut a: Vec<Vec<f64>> = design
        .iter()
        .zip(weights)
        .map(|(row, &w)| row.iter().map(|x| x * w.sqrt()).collect())
        .collect();
    let mut b: Vec<f64> = values.iter().zip(weights).map(|(y, w)| y * w.sqrt()).collect();
    let scale = (0..p)
        .map(|j| a.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);

    for k in 0..p {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm <= 1e-13 * scale {
            return Err(OracleError::Singular);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        for j in k..p {
            let dot: f64 = (k..m).map(|i| v[i - k] * a[i][j]).sum();
            let f = 2.0 * dot / vv;
            for i in k..m {
                a[i][j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * b[i]).sum();
        let f = 2.0 * dot / vv;
        for i in k..m {
            b[i] -= f * v[i - k];
        }
    }
    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let s: f64 = (k + 1..p).map(|j| a[k][j] * beta[j]).sum();
        beta[k] = (b[k] - s) / a[k][k];
    }
    Ok(beta)
}

/// Univariate convenience wrapper over [`brute_ls`].
pub fn brute_ls_1d(values: &[f64], weights: &[f64], degree: usize) -> Result<Vec<f64>> {
    brute_ls(&design_1d(&stencil_abscissae(values.len()), degree), weights, values)
}

/// Bivariate wrapper; `values` is row-major `side x side`.
pub fn brute_ls_2d(values: &[f64], side: usize, weights: &[f64], degree: usize) -> Result<Vec<f64>> {
    brute_ls(&design_2d(&stencil_abscissae(side), degree), weights, values)
}

/// Coefficients `m` with `x·β = Σ m_k y_k` for the fixed-weight fit.
pub fn linear_mask(design: &[Vec<f64>], weights: &[f64], at: &[f64]) -> Result<Vec<f64>> {
    let mut e = vec![0.0; design.len()];
    let mut out = Vec::with_capacity(design.len());
    for k in 0..design.len() {
        e[k] = 1.0;
        let beta = brute_ls(design, weights, &e)?;
        out.push(dot(at, &beta));
        e[k] = 0.0;
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn residuals(design: &[Vec<f64>], values: &[f64], beta: &[f64]) -> Vec<f64> {
    design.iter().zip(values).map(|(x, y)| y - dot(x, beta)).collect()
}

/// `F_δ(β) = Σ sqrt((y - x·β)² + δ)`.
pub fn f_delta(design: &[Vec<f64>], values: &[f64], beta: &[f64], delta: f64) -> f64 {
    residuals(design, values, beta).iter().map(|e| (e * e + delta).sqrt()).sum()
}

/// `∂F_δ/∂β_a = -Σ x_a e / sqrt(e² + δ)`.
pub fn grad_f_delta(design: &[Vec<f64>], values: &[f64], beta: &[f64], delta: f64) -> Vec<f64> {
    let mut g = vec![0.0; beta.len()];
    for (x, e) in design.iter().zip(residuals(design, values, beta)) {
        let s = e / (e * e + delta).sqrt();
        for (ga, xa) in g.iter_mut().zip(x) {
            *ga -= xa * s;
        }
    }
    g
}

/// Central differences of [`f_delta`] with step `h`.
pub fn grad_f_delta_fd(design: &[Vec<f64>], values: &[f64], beta: &[f64], delta: f64, h: f64) -> Vec<f64> {
    (0..beta.len())
        .map(|a| {
            let mut up = beta.to_vec();
            let mut down = beta.to_vec();
            up[a] += h;
            down[a] -= h;
            (f_delta(design, values, &up, delta) - f_delta(design, values, &down, delta)) / (2.0 * h)
        })
        .collect()
}

fn cholesky_solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let p = b.len();
    for j in 0..p {
        let d = m[j][j] - (0..j).map(|k| m[j][k] * m[j][k]).sum::<f64>();
        if !(d > 0.0) {
            return Err(OracleError::Singular);
        }
        m[j][j] = d.sqrt();
        for i in j + 1..p {
            let s = m[i][j] - (0..j).map(|k| m[i][k] * m[j][k]).sum::<f64>();
            m[i][j] = s / m[j][j];
        }
    }
    for i in 0..p {
        b[i] = (b[i] - (0..i).map(|k| m[i][k] * b[k]).sum::<f64>()) / m[i][i];
    }
    for i in (0..p).rev() {
        b[i] = (b[i] - (i + 1..p).map(|k| m[k][i] * b[k]).sum::<f64>()) / m[i][i];
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub delta: f64,
    /// Stop once the gradient infinity norm is at or below this.
    pub gradient_tol: f64,
    pub max_iters: usize,
}

impl MinimizeOptions {
    pub fn new(delta: f64) -> Self {
        MinimizeOptions {
            delta,
            gradient_tol: 1e-10,
            max_iters: 500,
        }
    }
}

/// Direct minimiser of `F_δ`: Newton steps from the least squares start,
/// halved until the objective decreases.
pub fn minimize_f_delta(design: &[Vec<f64>], values: &[f64], opts: MinimizeOptions) -> Result<Vec<f64>> {
    if !(opts.delta > 0.0) {
        return Err(OracleError::Degenerate("delta must be positive".into()));
    }
    let delta = opts.delta;
    let mut beta = brute_ls(design, &vec![1.0; design.len()], values)?;
    let mut f = f_delta(design, values, &beta, delta);
    let p = beta.len();
    for _ in 0..opts.max_iters {
        let g = grad_f_delta(design, values, &beta, delta);
        if g.iter().all(|v| v.abs() <= opts.gradient_tol) {
            return Ok(beta);
        }
        let mut h = vec![vec![0.0; p]; p];
        for (x, e) in design.iter().zip(residuals(design, values, &beta)) {
            let c = delta / (e * e + delta).powf(1.5);
            for a in 0..p {
                for b in 0..p {
                    h[a][b] += c * x[a] * x[b];
                }
            }
        }
        let step = cholesky_solve(h, g.iter().map(|v| -v).collect())?;
        let decrement = -dot(&g, &step);
        if decrement <= 1e-14 * f.abs().max(1.0) {
            // objective differences are below rounding; take the full step
            beta.iter_mut().zip(&step).for_each(|(b, s)| *b += s);
            f = f_delta(design, values, &beta, delta);
            continue;
        }
        let mut t = 1.0;
        while t > 1e-12 {
            let trial: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
            let ft = f_delta(design, values, &trial, delta);
            if ft <= f - 1e-4 * t * decrement {
                beta = trial;
                f = ft;
                break;
            }
            t *= 0.5;
        }
    }
    let g = grad_f_delta(design, values, &beta, delta);
    let final_norm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if final_norm <= opts.gradient_tol {
        return Ok(beta);
    }
    Err(OracleError::NonConvergence {
        iterations: opts.max_iters,
        gradient: final_norm,
    })
}

/// Exact least absolute deviations line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Line {
    pub intercept: f64,
    pub slope: f64,
    pub deviation: f64,
}

/// Enumerates the lines through every pair of points and keeps the one with
/// the smallest total absolute deviation; ties go to the smaller slope, then
/// the smaller intercept.
pub fn l1_line_exact(x: &[f64], y: &[f64]) -> Result<L1Line> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(OracleError::Degenerate("need at least two points".into()));
    }
    let mut best: Option<L1Line> = None;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if x[i] == x[j] {
                return Err(OracleError::Degenerate(format!("repeated abscissa {}", x[i])));
            }
            let slope = (y[j] - y[i]) / (x[j] - x[i]);
            let intercept = y[i] - slope * x[i];
            let deviation = x.iter().zip(y).map(|(u, v)| (v - intercept - slope * u).abs()).sum();
            let cand = L1Line { intercept, slope, deviation };
            let better = match best {
                None => true,
                Some(b) => {
                    let tie = (cand.deviation - b.deviation).abs() <= 1e-12 * (1.0 + b.deviation);
                    if tie {
                        (cand.slope, cand.intercept) < (b.slope, b.intercept)
                    } else {
                        cand.deviation < b.deviation
                    }
                }
            };
            if better {
                best = Some(cand);
            }
        }
    }
    Ok(best.expect("at least one pair"))
}
