//! Comparisons between distance functions on a common sample: uniform
//! distance, the identity-correspondence Gromov–Hausdorff bound, Hölder and
//! Lipschitz constant fits, and pointwise convergence tables.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geodesic::{DistanceMatrix, Provenance};
use crate::metric::ParamPoint;

/// A distance given directly rather than through a metric tensor.
#[derive(Debug, Clone, PartialEq)]
pub enum DistanceModel {
    /// `|x₁ - x₂| + |y₁ - y₂|` on the unit square.
    Taxi,
    /// `|x - y|^{1/j}` on `[0, 1]` (points use the `u` coordinate).
    Power(u32),
    /// `1` for distinct points, `0` otherwise, on `[0, 1]`.
    Discrete,
    /// Graph distances on a fixed sample set.
    Matrix(DistanceMatrix),
}

impl DistanceModel {
    pub fn id(&self) -> String {
        match self {
            Self::Taxi => "taxi".into(),
            Self::Power(j) => format!("power(j={j})"),
            Self::Discrete => "discrete".into(),
            Self::Matrix(m) => m.provenance().model.clone(),
        }
    }

    /// Tabulates the model on `samples`.
    pub fn to_matrix(&self, samples: &[ParamPoint]) -> Result<DistanceMatrix> {
        let mut values = Vec::with_capacity(samples.len() * samples.len());
        for &p in samples {
            for &q in samples {
                values.push(eval_distance_model(self, p, q)?);
            }
        }
        DistanceMatrix::from_values(samples.to_vec(), values, Provenance::new(self.id(), "closed-form"))
    }
}

fn in_unit(x: f64) -> bool {
    (-1e-12..=1.0 + 1e-12).contains(&x)
}

pub fn eval_distance_model(model: &DistanceModel, p: ParamPoint, q: ParamPoint) -> Result<f64> {
    match model {
        DistanceModel::Taxi => {
            for x in [p, q] {
                if !(in_unit(x.u) && in_unit(x.v)) {
                    return Err(LabError::PointOutsideDomain(x));
                }
            }
            Ok((p.u - q.u).abs() + (p.v - q.v).abs())
        }
        DistanceModel::Power(j) => {
            for x in [p, q] {
                if !in_unit(x.u) {
                    return Err(LabError::PointOutsideDomain(x));
                }
            }
            if *j == 0 {
                return Err(LabError::InvalidModel("power index must be >= 1".into()));
            }
            Ok((p.u - q.u).abs().powf(1.0 / *j as f64))
        }
        DistanceModel::Discrete => {
            for x in [p, q] {
                if !in_unit(x.u) {
                    return Err(LabError::PointOutsideDomain(x));
                }
            }
            Ok(if p.u == q.u { 0.0 } else { 1.0 })
        }
        DistanceModel::Matrix(m) => {
            let find = |x: ParamPoint| {
                m.samples().iter().position(|&s| s == x).ok_or(LabError::PointOutsideDomain(x))
            };
            Ok(m.get(find(p)?, find(q)?))
        }
    }
}

fn check_same(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<()> {
    if a.same_samples(b) {
        Ok(())
    } else {
        Err(LabError::MismatchedSamples)
    }
}

/// `sup |d₁ - d₂|` over the sampled pairs.
pub fn uniform_distance(d1: &DistanceMatrix, d2: &DistanceMatrix) -> Result<f64> {
    check_same(d1, d2)?;
    Ok(d1.values().iter().zip(d2.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Upper bound on the Gromov–Hausdorff distance from the identity
/// correspondence: half the uniform distance.
pub fn gh_upper_bound(d1: &DistanceMatrix, d2: &DistanceMatrix) -> Result<f64> {
    Ok(0.5 * uniform_distance(d1, d2)?)
}

/// Sample constants of the sandwich `c·d₀ ≤ d_j ≤ λ·d₀^α`.
///
/// `lambda_hat` is a sample lower bound of the true `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub alpha: f64,
    pub lambda_hat: f64,
    pub c_hat: f64,
    pub argmax: (usize, usize),
    pub argmin: (usize, usize),
}

pub fn fit_holder(dj: &DistanceMatrix, d0: &DistanceMatrix, alpha: f64) -> Result<HolderFit> {
    check_same(dj, d0)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(LabError::InvalidExponent(alpha));
    }
    let mut fit = HolderFit {
        alpha,
        lambda_hat: 0.0,
        c_hat: f64::INFINITY,
        argmax: (0, 0),
        argmin: (0, 0),
    };
    for (i, j) in dj.pairs() {
        let base = d0.get(i, j);
        if base <= 0.0 {
            return Err(LabError::ZeroBackgroundDistance(i, j));
        }
        let x = dj.get(i, j);
        let upper = x / base.powf(alpha);
        if upper > fit.lambda_hat {
            fit.lambda_hat = upper;
            fit.argmax = (i, j);
        }
        let lower = x / base;
        if lower < fit.c_hat {
            fit.c_hat = lower;
            fit.argmin = (i, j);
        }
    }
    if dj.len() < 2 {
        fit.c_hat = 0.0;
    }
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConvergence {
    pub pair: (usize, usize),
    pub deviations: Vec<f64>,
    /// Deviations are nonincreasing over the second half of the sequence.
    pub monotone_tail: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub indices: Vec<u32>,
    pub pairs: Vec<PairConvergence>,
    /// `sup` over pairs at each step, i.e. the uniform distance sequence.
    pub sup: Vec<f64>,
}

impl ConvergenceReport {
    pub fn pair(&self, i: usize, j: usize) -> Option<&PairConvergence> {
        let key = (i.min(j), i.max(j));
        self.pairs.iter().find(|p| p.pair == key)
    }
}

/// Per-pair `|d_j - d_ref|` for a sequence of matrices.
pub fn pointwise_convergence_report(
    sequence: &[(u32, DistanceMatrix)],
    reference: &DistanceMatrix,
) -> Result<ConvergenceReport> {
    for (_, m) in sequence {
        check_same(m, reference)?;
    }
    let pairs = reference
        .pairs()
        .map(|(i, j)| {
            let deviations: Vec<f64> = sequence.iter().map(|(_, m)| (m.get(i, j) - reference.get(i, j)).abs()).collect();
            let tail = &deviations[deviations.len() / 2..];
            let monotone_tail = tail.windows(2).all(|w| w[1] <= w[0]);
            PairConvergence { pair: (i, j), deviations, monotone_tail }
        })
        .collect();
    let sup = sequence
        .iter()
        .map(|(_, m)| uniform_distance(m, reference))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { indices: sequence.iter().map(|(j, _)| *j).collect(), pairs, sup })
}
