//! Parsers for the compact command-line notations.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use subdiv_l1::datagen::Outlier;
use subdiv_l1::{BoundaryPolicy, Execution, Weighting};

use crate::{CliError, CliResult};

pub const THREADS_ENV: &str = "SUBDIV_L1_THREADS";

/// Stencil size and degree parsed from `2n=10,d=3` or `2n+1=11,d=2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeArg {
    pub points: usize,
    pub degree: usize,
}

impl FromStr for SchemeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut points = None;
        let mut degree = None;
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value in {part:?}"))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("{value:?} is not a non-negative integer"))?;
            match key.trim() {
                "2n" if value % 2 == 0 => points = Some(value),
                "2n" => return Err(format!("2n={value} is odd")),
                "2n+1" if value % 2 == 1 => points = Some(value),
                "2n+1" => return Err(format!("2n+1={value} is even")),
                "h" => points = Some(value),
                "d" => degree = Some(value),
                other => return Err(format!("unknown scheme key {other:?} (expected 2n, 2n+1 or d)")),
            }
        }
        match (points, degree) {
            (Some(points), Some(degree)) => Ok(SchemeArg { points, degree }),
            _ => Err(format!("scheme {s:?} needs both a stencil size and d")),
        }
    }
}

/// Closed interval `a:b` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain(pub f64, pub f64);

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("{v:?} is not a number"));
        let (a, b) = (parse(a)?, parse(b)?);
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(format!("domain needs finite a < b, got {a}:{b}"));
        }
        Ok(Domain(a, b))
    }
}

/// `i:offset,...` for curves.
pub fn parse_outliers(s: &str) -> Result<Vec<Outlier>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (i, off) = p.split_once(':').ok_or_else(|| format!("expected index:offset, got {p:?}"))?;
            let index = i.trim().parse().map_err(|_| format!("bad outlier index {i:?}"))?;
            let offset: f64 = off.trim().parse().map_err(|_| format!("bad outlier offset {off:?}"))?;
            Ok(Outlier::Point { index, offset })
        })
        .collect()
}

/// `i:j:offset,...` for grids.
pub fn parse_grid_outliers(s: &str) -> Result<Vec<Outlier>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let fields: Vec<&str> = p.split(':').map(str::trim).collect();
            let [i, j, off] = fields[..] else {
                return Err(format!("expected i:j:offset, got {p:?}"));
            };
            Ok(Outlier::Cell {
                i: i.parse().map_err(|_| format!("bad row index {i:?}"))?,
                j: j.parse().map_err(|_| format!("bad column index {j:?}"))?,
                offset: off.parse().map_err(|_| format!("bad outlier offset {off:?}"))?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryArg {
    #[default]
    Shrink,
    Periodic,
    Mirror,
}

impl From<BoundaryArg> for BoundaryPolicy {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Shrink => BoundaryPolicy::Shrink,
            BoundaryArg::Periodic => BoundaryPolicy::Periodic,
            BoundaryArg::Mirror => BoundaryPolicy::Mirror,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum WeightingArg {
    #[default]
    Dynamic,
    Unit,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Dynamic => Weighting::Dynamic,
            WeightingArg::Unit => Weighting::Unit,
        }
    }
}

/// Thread cap from `SUBDIV_L1_THREADS`; `None` or `Some(0)` means automatic.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::usage(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
    }
}

/// A single thread means sequential evaluation; anything else runs on the
/// rayon pool.
pub fn execution_for(threads: Option<usize>) -> Execution {
    match threads {
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    }
}
