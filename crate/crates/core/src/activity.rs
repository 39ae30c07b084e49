//! Posting-activity completion curves and the saturation model.
//!
//! Posting activity follows an exponential saturation law
//! `lambda_volume = 1 - exp(-alpha * lambda_time)`: most posts arrive early
//! in a conversation's lifetime and activity then levels off. This module
//! turns conversations into (lifetime fraction, post fraction) step curves,
//! aggregates them on a fixed grid, and fits the saturation rate `alpha`
//! by weighted least squares. The saturation time `gamma = 1/alpha` marks
//! the lifetime fraction by which about 63% of posts exist.

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Conversation;

pub const DEFAULT_RESOLUTION: f64 = 1e-5;

const MAX_ITERATIONS: usize = 200;
const RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ActivityError {
    #[error("conversation `{0}` has fewer than 2 posts")]
    TooFewPosts(String),
    #[error("conversation `{0}` has zero duration (all timestamps equal)")]
    ZeroDuration(String),
    #[error("no valid conversations to aggregate")]
    NoValidConversations,
    #[error("curve has {0} points; at least {1} required for fitting")]
    TooFewPoints(usize, usize),
    #[error("curve is identically zero; nothing to fit")]
    AllZeroCurve,
    #[error("fit did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("saturation rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("lifetime fraction must lie in [0, 1], got {0}")]
    FractionOutOfRange(f64),
}

/// One grid point of an aggregated completion curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub lambda_time: f64,
    /// Mean volume completion across conversations.
    pub mean: f64,
    /// Population standard deviation across conversations.
    pub sd: f64,
    /// Conversations contributing to this point.
    pub n: usize,
}

/// Completion curve on a regular `lambda_time` grid.
#[derive(Clone, Debug)]
pub struct CompletionCurve {
    pub resolution: f64,
    /// Mean empirical-CDF step (1/posts) across the aggregated
    /// conversations; 0 when the curve was not built from conversations.
    /// Standard deviations below this scale carry quantization, not noise,
    /// and are floored to it when weighting the fit.
    pub quantum: f64,
    pub points: Vec<CurvePoint>,
}

/// Fitted saturation model parameters.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ActivityFit {
    /// Saturation rate per unit of normalized lifetime.
    pub alpha: f64,
    /// Saturation time, exactly `1 / alpha`.
    pub gamma: f64,
    /// Weighted sum of squared residuals over `n_points - 1`.
    pub chi2_reduced: f64,
    pub n_points: usize,
    /// Unweighted root-mean-square residual.
    pub residual_sd: f64,
}

/// Model value `1 - exp(-alpha * lambda_time)`.
pub fn model_value(alpha: f64, lambda_time: f64) -> Result<f64, ActivityError> {
    check_rate(alpha)?;
    check_fraction(lambda_time)?;
    Ok(-(-alpha * lambda_time).exp_m1())
}

/// Instantaneous change rate `alpha * exp(-alpha * lambda_time)`.
pub fn change_rate(alpha: f64, lambda_time: f64) -> Result<f64, ActivityError> {
    check_rate(alpha)?;
    check_fraction(lambda_time)?;
    Ok(alpha * (-alpha * lambda_time).exp())
}

/// Ratio of change rates at two lifetimes: `exp(alpha * (t2 - t1))`.
pub fn change_rate_ratio(alpha: f64, t1: f64, t2: f64) -> Result<f64, ActivityError> {
    check_rate(alpha)?;
    check_fraction(t1)?;
    check_fraction(t2)?;
    Ok((alpha * (t2 - t1)).exp())
}

fn check_rate(alpha: f64) -> Result<(), ActivityError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ActivityError::NonPositiveRate(alpha));
    }
    Ok(())
}

fn check_fraction(x: f64) -> Result<(), ActivityError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ActivityError::FractionOutOfRange(x));
    }
    Ok(())
}

/// Per-conversation completion points.
///
/// Posts sorted by (timestamp, id); the j-th post (1-based) yields the point
/// `((tau_j - t_first) / (t_last - t_first), j / N)`, so the curve starts at
/// `lambda_time = 0` and ends at `(1, 1)`.
pub fn completion_points(conv: &Conversation) -> Result<Vec<(f64, f64)>, ActivityError> {
    let posts = conv.posts_by_time();
    let n = posts.len();
    if n < 2 {
        return Err(ActivityError::TooFewPosts(conv.id().to_string()));
    }
    let t0 = conv.t_first().millis();
    let span = conv.t_last().millis() - t0;
    if span == 0 {
        return Err(ActivityError::ZeroDuration(conv.id().to_string()));
    }
    let span = span as f64;
    Ok(posts
        .iter()
        .enumerate()
        .map(|(idx, id)| {
            let ts = conv.graph().timestamp(id).expect("posts carry timestamps");
            let lambda_time = (ts.millis() - t0) as f64 / span;
            let lambda_volume = (idx + 1) as f64 / n as f64;
            (lambda_time, lambda_volume)
        })
        .collect())
}

/// Aggregate conversations into a mean/sd curve at the given grid step.
///
/// Each conversation's step curve is evaluated at every grid point as the
/// fraction of posts published at or before that lifetime fraction
/// (previous-value interpolation). Conversations that cannot produce
/// completion points are skipped; at least one must survive.
pub fn aggregate_curve(
    convs: &[Conversation],
    resolution: f64,
) -> Result<CompletionCurve, ActivityError> {
    assert!(
        resolution > 0.0 && resolution <= 1.0,
        "resolution must lie in (0, 1]"
    );
    let steps = (1.0 / resolution).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();

    // Welford accumulators per grid point, filled conversation by
    // conversation in deterministic order.
    let mut count = 0usize;
    let mut mean = vec![0.0f64; grid.len()];
    let mut m2 = vec![0.0f64; grid.len()];
    let mut quantum_sum = 0.0f64;

    for conv in convs {
        let points = match completion_points(conv) {
            Ok(points) => points,
            Err(_) => continue,
        };
        count += 1;
        quantum_sum += 1.0 / points.len() as f64;
        let mut j = 0usize;
        for (gi, &lambda) in grid.iter().enumerate() {
            while j < points.len() && points[j].0 <= lambda {
                j += 1;
            }
            // Largest point with lambda_time <= lambda; the first post sits
            // at lambda_time = 0, so j >= 1 always.
            let value = points[j - 1].1;
            let delta = value - mean[gi];
            mean[gi] += delta / count as f64;
            m2[gi] += delta * (value - mean[gi]);
        }
    }

    if count == 0 {
        return Err(ActivityError::NoValidConversations);
    }
    let points = grid
        .iter()
        .enumerate()
        .map(|(gi, &lambda_time)| CurvePoint {
            lambda_time,
            mean: mean[gi],
            sd: (m2[gi] / count as f64).sqrt(),
            n: count,
        })
        .collect();
    Ok(CompletionCurve {
        resolution: 1.0 / steps as f64,
        quantum: quantum_sum / count as f64,
        points,
    })
}

/// Fit the saturation rate to an aggregated curve by weighted least squares.
///
/// Weights are `1 / sd^2` with the sd floored at the curve's quantization
/// step, and 1 where both vanish. The single parameter is found by damped
/// Gauss-Newton with the analytic Jacobian
/// `d/d alpha = lambda_time * exp(-alpha * lambda_time)`, starting from a
/// log-linearization of the point nearest `lambda_volume = 0.5`.
pub fn fit_saturation(curve: &CompletionCurve) -> Result<ActivityFit, ActivityError> {
    const MIN_POINTS: usize = 10;
    let points = &curve.points;
    if points.len() < MIN_POINTS {
        return Err(ActivityError::TooFewPoints(points.len(), MIN_POINTS));
    }
    if points.iter().all(|p| p.mean == 0.0) {
        return Err(ActivityError::AllZeroCurve);
    }

    let weights: Vec<f64> = points
        .iter()
        .map(|p| {
            let sd = p.sd.max(curve.quantum);
            if sd > 0.0 {
                1.0 / (sd * sd)
            } else {
                1.0
            }
        })
        .collect();

    let weighted_ssr = |alpha: f64| -> f64 {
        points
            .iter()
            .zip(&weights)
            .map(|(p, w)| {
                let r = p.mean - (-(-alpha * p.lambda_time).exp_m1());
                w * r * r
            })
            .sum()
    };

    let mut alpha = initial_rate(points);
    let mut ssr = weighted_ssr(alpha);
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        // Gauss-Newton step on the single parameter.
        let mut jtj = 0.0;
        let mut jtr = 0.0;
        for (p, w) in points.iter().zip(&weights) {
            let e = (-alpha * p.lambda_time).exp();
            let r = p.mean - (1.0 - e);
            let jac = p.lambda_time * e;
            jtj += w * jac * jac;
            jtr += w * jac * r;
        }
        if jtj == 0.0 {
            break;
        }
        let mut step = jtr / jtj;
        // Damping: halve until the step reduces the residual and keeps
        // alpha positive.
        let mut candidate = alpha + step;
        let mut candidate_ssr = if candidate > 0.0 {
            weighted_ssr(candidate)
        } else {
            f64::INFINITY
        };
        let mut halvings = 0;
        while candidate_ssr > ssr && halvings < 60 {
            step *= 0.5;
            candidate = alpha + step;
            candidate_ssr = if candidate > 0.0 {
                weighted_ssr(candidate)
            } else {
                f64::INFINITY
            };
            halvings += 1;
        }
        if candidate_ssr > ssr {
            // No descent direction left; treat the current point as optimal.
            converged = true;
            break;
        }
        let relative = (candidate - alpha).abs() / alpha.abs().max(f64::MIN_POSITIVE);
        alpha = candidate;
        ssr = candidate_ssr;
        if relative < RELATIVE_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ActivityError::NonConvergence(MAX_ITERATIONS));
    }
    check_rate(alpha)?;

    let residual_ss: f64 = points
        .iter()
        .map(|p| {
            let r = p.mean - (-(-alpha * p.lambda_time).exp_m1());
            r * r
        })
        .sum();
    Ok(ActivityFit {
        alpha,
        gamma: 1.0 / alpha,
        chi2_reduced: ssr / (points.len() - 1) as f64,
        n_points: points.len(),
        residual_sd: (residual_ss / points.len() as f64).sqrt(),
    })
}

/// Starting value: invert the model at the point whose mean is closest to
/// one half, `alpha0 = ln 2 / lambda_time`.
fn initial_rate(points: &[CurvePoint]) -> f64 {
    let anchor = points
        .iter()
        .filter(|p| p.lambda_time > 0.0)
        .min_by(|a, b| {
            (a.mean - 0.5)
                .abs()
                .partial_cmp(&(b.mean - 0.5).abs())
                .expect("means are finite")
        });
    match anchor {
        Some(p) => std::f64::consts::LN_2 / p.lambda_time,
        None => 1.0,
    }
}
