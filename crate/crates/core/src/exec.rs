//! Evaluation strategy for refinement steps.
//!
//! Each new point depends only on its own stencil, so the parallel path maps
//! the same per-point function over the centres and collects in index order.
//! Output is bitwise identical to the sequential path.

use rayon::prelude::*;

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    /// Runs on the current rayon pool.
    Parallel,
}

impl Execution {
    pub(crate) fn map_collect<I, O, F>(self, items: &[I], f: F) -> Result<Vec<O>>
    where
        I: Sync,
        O: Send,
        F: Fn(&I) -> Result<O> + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            Execution::Parallel => items.par_iter().map(f).collect(),
        }
    }
}
