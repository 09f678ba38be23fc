//! Bivariate subdivision over rectangular grids.
//!
//! Each square window of `(2n)²` or `(2n+1)²` control values is fitted by a
//! bivariate polynomial of total degree `d <= 2` (not a tensor product) and
//! evaluated at four abscissa pairs. The fit centred on `(i, j)` fills the
//! refined positions `(2c + a, 2c' + b)` where `c`, `c'` index the centre
//! within the list of valid centres and `a`, `b` select the abscissa along
//! each axis.

use crate::exec::Execution;
use crate::local_fit::{irls_fit_2d, ols_init_2d, Beta2D, FitConfig, Parity, Stencil2D};
use crate::refine1d::{abscissae, effective_policy, AxisPlan, BoundaryPolicy, FitStats, Topology, Weighting};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec2D<T> {
    pub fit: FitConfig<T>,
    /// Policy along rows (`i`) and columns (`j`).
    pub boundary: [BoundaryPolicy; 2],
    pub weighting: Weighting,
}

impl<T: Scalar> SchemeSpec2D<T> {
    /// The `side²`-point scheme of degree `degree`; `side = 2n` or `2n + 1`.
    pub fn new(side: usize, degree: usize) -> Self {
        SchemeSpec2D {
            fit: FitConfig::for_points(side, degree),
            boundary: [BoundaryPolicy::Shrink; 2],
            weighting: Weighting::Dynamic,
        }
    }

    pub fn with_boundary(mut self, boundary: BoundaryPolicy) -> Self {
        self.boundary = [boundary; 2];
        self
    }

    pub fn with_boundaries(mut self, boundary: [BoundaryPolicy; 2]) -> Self {
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

    pub fn side(&self) -> usize {
        self.fit.stencil_len()
    }

    pub fn validate(&self) -> Result<()> {
        self.fit.validate_2d()
    }

    /// Fit one row-major `side x side` window.
    pub fn fit_stencil(&self, values: &[T]) -> Result<(Beta2D<T>, FitStats)> {
        let stencil = Stencil2D::new(values, self.side(), self.fit.parity)?;
        match self.weighting {
            Weighting::Unit => Ok((ols_init_2d(stencil, &self.fit)?, FitStats::single(0, true, &[]))),
            Weighting::Dynamic => {
                let res = irls_fit_2d(stencil, &self.fit)?;
                let stats = FitStats::single(res.iterations, res.converged, &res.warnings);
                Ok((res.beta, stats))
            }
        }
    }
}

/// The four `(r, s)` evaluation pairs, `r` varying fastest.
pub fn abscissae_2d<T: Scalar>(parity: Parity) -> Vec<(T, T)> {
    let ax = abscissae::<T>(parity, 2).expect("binary abscissae exist for both parities");
    let mut out = Vec::with_capacity(4);
    for &s in &ax {
        for &r in &ax {
            out.push((r, s));
        }
    }
    out
}

/// Rectangular grid of control points, each `dim` components wide.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMesh<T> {
    rows: usize,
    cols: usize,
    dim: usize,
    /// Row-major, point-major: `data[(i * cols + j) * dim + c]`.
    data: Vec<T>,
    pub level: usize,
    /// Row axis, column axis.
    pub topology: [Topology; 2],
    pub start: [T; 2],
    pub spacing: [T; 2],
}

impl<T: Scalar> GridMesh<T> {
    pub fn new(rows: usize, cols: usize, dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 || rows == 0 || cols == 0 || data.len() != rows * cols * dim {
            return Err(Error::input(format!(
                "{} values do not form a {rows}x{cols} grid of {dim}-wide points",
                data.len()
            )));
        }
        Ok(GridMesh {
            rows,
            cols,
            dim,
            data,
            level: 0,
            topology: [Topology::Open; 2],
            start: [T::zero(); 2],
            spacing: [T::one(); 2],
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        GridMesh::new(rows, cols, 1, data).expect("shape is consistent")
    }

    pub fn with_topology(mut self, topology: [Topology; 2]) -> Self {
        self.topology = topology;
        self
    }

    pub fn with_params(mut self, start: [T; 2], spacing: [T; 2]) -> Self {
        self.start = start;
        self.spacing = spacing;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
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

    pub fn point(&self, i: usize, j: usize) -> &[T] {
        let k = (i * self.cols + j) * self.dim;
        &self.data[k..k + self.dim]
    }

    pub fn component(&self, c: usize) -> GridMesh<T> {
        GridMesh {
            dim: 1,
            data: self.data.iter().skip(c).step_by(self.dim).copied().collect(),
            ..self.clone()
        }
    }

    /// Parameters `(ν1, ν2)` of point `(i, j)`.
    pub fn param(&self, i: usize, j: usize) -> (T, T) {
        (
            self.start[0] + T::of_int(i as i64) * self.spacing[0],
            self.start[1] + T::of_int(j as i64) * self.spacing[1],
        )
    }

    /// Swap the row and column axes.
    pub fn transposed(&self) -> GridMesh<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.extend_from_slice(self.point(i, j));
            }
        }
        GridMesh {
            rows: self.cols,
            cols: self.rows,
            dim: self.dim,
            data,
            level: self.level,
            topology: [self.topology[1], self.topology[0]],
            start: [self.start[1], self.start[0]],
            spacing: [self.spacing[1], self.spacing[0]],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("grid contains non-finite values"));
        }
        Ok(())
    }
}

/// A refined grid with its fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement2D<T> {
    pub mesh: GridMesh<T>,
    pub stats: FitStats,
}

pub fn refine_once_2d<T: Scalar>(mesh: &GridMesh<T>, spec: &SchemeSpec2D<T>) -> Result<GridMesh<T>> {
    Ok(refine_once_2d_with(mesh, spec, Execution::Sequential)?.mesh)
}

pub fn refine_once_2d_with<T: Scalar>(
    mesh: &GridMesh<T>,
    spec: &SchemeSpec2D<T>,
    exec: Execution,
) -> Result<Refinement2D<T>> {
    spec.validate()?;
    mesh.validate()?;
    let fit = &spec.fit;
    let ab = abscissae::<T>(fit.parity, 2)?;
    let plans = [
        AxisPlan::new(mesh.rows, fit.parity, fit.n, effective_policy(mesh.topology[0], spec.boundary[0]))?,
        AxisPlan::new(mesh.cols, fit.parity, fit.n, effective_policy(mesh.topology[1], spec.boundary[1]))?,
    ];
    let offsets: Vec<i64> = fit.parity.offsets(fit.n).collect();
    let side = offsets.len();
    let dim = mesh.dim;
    let centers: Vec<(i64, i64)> = plans[0]
        .centers
        .iter()
        .flat_map(|&i| plans[1].centers.iter().map(move |&j| (i, j)))
        .collect();

    let per_center = exec.map_collect(&centers, |&(i, j)| {
        let mut out = vec![T::zero(); 4 * dim];
        let mut stats = FitStats::default();
        let mut window = vec![T::zero(); side * side];
        for c in 0..dim {
            for (a, &r) in offsets.iter().enumerate() {
                let row = plans[0].resolve(i + r);
                for (b, &s) in offsets.iter().enumerate() {
                    let col = plans[1].resolve(j + s);
                    window[a * side + b] = mesh.data[(row * mesh.cols + col) * dim + c];
                }
            }
            let (beta, s) = spec.fit_stencil(&window)?;
            stats = stats.merge(s);
            for (a, &r) in ab.iter().enumerate() {
                for (b, &s) in ab.iter().enumerate() {
                    out[(a * 2 + b) * dim + c] = beta.eval(r, s);
                }
            }
        }
        Ok((out, stats))
    })?;

    let out_cols = plans[1].centers.len() * 2;
    let out_rows = plans[0].centers.len() * 2;
    let mut data = vec![T::zero(); out_rows * out_cols * dim];
    let mut stats = FitStats::default();
    for (k, (pts, s)) in per_center.into_iter().enumerate() {
        let ci = k / plans[1].centers.len();
        let cj = k % plans[1].centers.len();
        for a in 0..2 {
            for b in 0..2 {
                let dst = ((2 * ci + a) * out_cols + 2 * cj + b) * dim;
                let src = (a * 2 + b) * dim;
                data[dst..dst + dim].copy_from_slice(&pts[src..src + dim]);
            }
        }
        stats = stats.merge(s);
    }
    let half = T::of(0.5);
    let start = [
        mesh.start[0] + (T::of_int(plans[0].first_center()) + ab[0]) * mesh.spacing[0],
        mesh.start[1] + (T::of_int(plans[1].first_center()) + ab[0]) * mesh.spacing[1],
    ];
    Ok(Refinement2D {
        mesh: GridMesh {
            rows: out_rows,
            cols: out_cols,
            dim,
            data,
            level: mesh.level + 1,
            topology: mesh.topology,
            start,
            spacing: [mesh.spacing[0] * half, mesh.spacing[1] * half],
        },
        stats,
    })
}

pub fn subdivide_2d<T: Scalar>(mesh: &GridMesh<T>, spec: &SchemeSpec2D<T>, levels: usize) -> Result<GridMesh<T>> {
    let mut current = mesh.clone();
    for _ in 0..levels {
        current = refine_once_2d(&current, spec)?;
    }
    Ok(current)
}

/// Every level from the input (index 0) to `levels`, with per-step stats.
pub fn subdivide_2d_with<T: Scalar>(
    mesh: &GridMesh<T>,
    spec: &SchemeSpec2D<T>,
    levels: usize,
    exec: Execution,
) -> Result<(Vec<GridMesh<T>>, Vec<FitStats>)> {
    let mut out = vec![mesh.clone()];
    let mut stats = Vec::with_capacity(levels);
    for _ in 0..levels {
        let step = refine_once_2d_with(out.last().expect("non-empty"), spec, exec)?;
        out.push(step.mesh);
        stats.push(step.stats);
    }
    Ok((out, stats))
}
