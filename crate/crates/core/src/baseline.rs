//! Per-sensor recovery followed by majority-vote fusion, the reference the
//! joint solver is compared against.

use rayon::prelude::*;

use crate::error::{param_err, Result};
use crate::likelihood::LikelihoodContext;
use crate::model::{BitMatrix, MeasurementMatrix, SupportSet};
use crate::solver::{self, ExtractionMode, SolverConfig};

/// Minimum number of votes for an index to enter the fused support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FusionRule {
    threshold: usize,
}

impl FusionRule {
    pub fn new(threshold: usize, p: usize) -> Result<Self> {
        if threshold == 0 || threshold > p {
            return Err(param_err(format!("vote threshold {threshold} must lie in 1..={p}")));
        }
        Ok(Self { threshold })
    }

    /// Strict majority: more than `p/2` votes.
    pub fn majority(p: usize) -> Result<Self> {
        Self::new(p / 2 + 1, p)
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn fuse(&self, supports: &[SupportSet]) -> SupportSet {
        let mut votes: Vec<usize> = supports.iter().flat_map(|s| s.indices().iter().copied()).collect();
        votes.sort_unstable();
        let mut fused = Vec::new();
        for run in votes.chunk_by(|a, b| a == b) {
            if run.len() >= self.threshold {
                fused.push(run[0]);
            }
        }
        SupportSet::from_sorted_unchecked(fused)
    }
}

/// Indices present in strictly more than half of the `p` supports.
pub fn majority_fuse(supports: &[SupportSet], p: usize) -> Result<SupportSet> {
    if supports.is_empty() || p == 0 {
        return Err(param_err("majority fusion needs at least one support"));
    }
    if supports.len() != p {
        return Err(param_err(format!("expected {p} supports, got {}", supports.len())));
    }
    Ok(FusionRule::majority(p)?.fuse(supports))
}

/// Support recovered from a single sensor's bits (an M×1 bit matrix).
pub fn solve_single(
    z_col: &BitMatrix,
    phi: &MeasurementMatrix,
    sigma_v: f64,
    cfg: &SolverConfig,
    mode: ExtractionMode,
) -> Result<SupportSet> {
    Ok(solve_single_detailed(z_col, phi, sigma_v, cfg, mode)?.0)
}

fn solve_single_detailed(
    z_col: &BitMatrix,
    phi: &MeasurementMatrix,
    sigma_v: f64,
    cfg: &SolverConfig,
    mode: ExtractionMode,
) -> Result<(SupportSet, bool)> {
    if z_col.cols() != 1 {
        return Err(param_err(format!("expected one sensor column, got {}", z_col.cols())));
    }
    let ctx = LikelihoodContext::new(phi.clone(), z_col.clone(), sigma_v)?;
    let res = solver::run(&ctx, cfg)?;
    let support = solver::extract_support(res.s_hat.view(), mode)?;
    Ok((support, res.converged))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineEstimate {
    pub fused: SupportSet,
    pub per_sensor: Vec<SupportSet>,
    /// Sensors whose solve hit an iteration cap.
    pub non_converged: usize,
}

/// Solves every sensor independently (in parallel) and fuses by majority.
pub fn estimate(
    z: &BitMatrix,
    phi: &MeasurementMatrix,
    sigma_v: f64,
    cfg: &SolverConfig,
    mode: ExtractionMode,
) -> Result<BaselineEstimate> {
    let p = z.cols();
    let outcomes = (0..p)
        .into_par_iter()
        .map(|j| solve_single_detailed(&z.column(j)?, phi, sigma_v, cfg, mode))
        .collect::<Result<Vec<_>>>()?;
    let non_converged = outcomes.iter().filter(|(_, ok)| !ok).count();
    let per_sensor: Vec<SupportSet> = outcomes.into_iter().map(|(s, _)| s).collect();
    let fused = majority_fuse(&per_sensor, p)?;
    Ok(BaselineEstimate { fused, per_sensor, non_converged })
}
