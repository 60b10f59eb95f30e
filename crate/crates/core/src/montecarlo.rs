//! Seeded Monte Carlo over random evader starts.
//!
//! Each trial draws the evader's start uniformly from the pursuers' hull
//! using a stream derived from `(seed, trial)`, so results do not depend on
//! how trials are scheduled across threads. The same starts are reused for
//! every speed ratio in a sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tracing::{debug, warn};

use crate::analysis::sample_in_triangle;
use crate::error::{Error, Result};
use crate::evader::PolicyKind;
use crate::geometry::{area_vector, hull_order, HullOrder, Vec2};
use crate::scenario::ScenarioConfig;
use crate::simulation::Episode;

pub const HISTOGRAM_BINS: usize = 20;
const MAX_REDRAWS: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub trials: usize,
    /// Pursuer layout, radius and controller; the evader start, `mu_max` and
    /// policy are overridden per trial.
    pub template: ScenarioConfig,
    pub policy: PolicyKind,
    pub mu_values: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub mu_max: f64,
    pub evader_start: Vec2,
    /// Draws discarded for starting inside a capture disc.
    pub rejected_draws: u32,
    pub captured: bool,
    pub t_capture: Option<f64>,
    pub t_bound: Option<f64>,
    pub tau: Option<f64>,
    pub encirclement_ok: bool,
    pub min_area: f64,
}

/// Equal-width bins on `[0, 1]`; values above 1 land in `overflow`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub overflow: u64,
}

impl Histogram {
    pub fn of_unit_interval(values: &[f64], bins: usize) -> Self {
        let edges = (0..=bins).map(|i| i as f64 / bins as f64).collect();
        let mut counts = vec![0; bins];
        let mut overflow = 0;
        for &v in values {
            if v > 1.0 {
                overflow += 1;
            } else {
                let b = ((v.max(0.0) * bins as f64) as usize).min(bins - 1);
                counts[b] += 1;
            }
        }
        Self { edges, counts, overflow }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCStats {
    pub mu_max: f64,
    pub trials: usize,
    pub captured: usize,
    pub not_captured: usize,
    /// Mean and unbiased standard deviation of the capture time over the
    /// captured trials.
    pub mean_t: f64,
    pub std_t: f64,
    pub tau_values: Vec<f64>,
    pub tau_mean: f64,
    pub tau_std: f64,
    pub tau_max: f64,
    pub encirclement_ok: bool,
    pub histogram: Histogram,
    pub rows: Vec<TrialRecord>,
}

/// Mean and unbiased (n-1) standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Uniform point in the convex polygon, by area-weighted fan triangle.
pub fn sample_in_hull<R: Rng + ?Sized>(rng: &mut R, points: &[Vec2], order: &HullOrder) -> Vec2 {
    let idx = order.indices();
    let apex = points[idx[0]];
    let fans: Vec<(Vec2, Vec2)> = idx[1..].windows(2).map(|w| (points[w[0]], points[w[1]])).collect();
    let pick = if fans.len() == 1 {
        0
    } else {
        let weights: Vec<f64> = fans.iter().map(|(b, c)| 0.5 * (*b - apex).cross(*c - apex)).collect();
        let total: f64 = weights.iter().sum();
        let mut r = rng.random::<f64>() * total;
        weights
            .iter()
            .position(|w| {
                r -= w;
                r < 0.0
            })
            .unwrap_or(fans.len() - 1)
    };
    let (b, c) = fans[pick];
    sample_in_triangle(rng, apex, b, c)
}

/// Evader start for one trial, redrawn while it falls inside a capture disc
/// or not strictly inside the hull.
pub fn trial_start(template: &ScenarioConfig, order: &HullOrder, seed: u64, trial: usize) -> Result<(Vec2, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    for rejected in 0..MAX_REDRAWS {
        let e = sample_in_hull(&mut rng, &template.pursuers, order);
        let clear = template.pursuers.iter().all(|p| p.distance(e) > template.capture_radius);
        if clear && area_vector(&template.pursuers, order, e).min() > 0.0 {
            if rejected > 0 {
                debug!(trial, rejected, "redrew evader start");
            }
            return Ok((e, rejected));
        }
    }
    Err(Error::InvalidState(format!("trial {trial}: no admissible evader start after {MAX_REDRAWS} draws")))
}

pub fn run_trial(
    config: &MonteCarloConfig,
    mu_max: f64,
    trial: usize,
    start: Vec2,
    rejected: u32,
) -> Result<TrialRecord> {
    let mut cfg = config.template.clone().with_evader(start).with_mu_max(mu_max).with_policy(config.policy);
    cfg.seed = config.seed.wrapping_add(trial as u64);
    let scenario = cfg.validate()?;
    let mut policy = scenario.policy.build(scenario.seed, None);
    let mut episode = Episode::new(&scenario)?.without_trace();
    let r = episode.run(policy.as_mut())?;
    if !r.captured {
        warn!(trial, mu_max, "trial ended without capture");
    }
    Ok(TrialRecord {
        trial,
        mu_max,
        evader_start: start,
        rejected_draws: rejected,
        captured: r.captured,
        t_capture: r.t_capture,
        t_bound: r.t_bound,
        tau: r.tau,
        encirclement_ok: r.encirclement_ok,
        min_area: r.min_area_seen,
    })
}

fn aggregate(mu_max: f64, rows: Vec<TrialRecord>) -> MCStats {
    let times: Vec<f64> = rows.iter().filter_map(|r| r.t_capture).collect();
    let taus: Vec<f64> = rows.iter().filter_map(|r| r.tau).collect();
    let (mean_t, std_t) = mean_std(&times);
    let (tau_mean, tau_std) = mean_std(&taus);
    let captured = rows.iter().filter(|r| r.captured).count();
    MCStats {
        mu_max,
        trials: rows.len(),
        captured,
        not_captured: rows.len() - captured,
        mean_t,
        std_t,
        tau_max: taus.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        tau_mean,
        tau_std,
        encirclement_ok: rows.iter().all(|r| r.encirclement_ok),
        histogram: Histogram::of_unit_interval(&taus, HISTOGRAM_BINS),
        tau_values: taus,
        rows,
    }
}

/// Runs `trials` episodes for every speed ratio in `mu_values`.
pub fn monte_carlo(config: &MonteCarloConfig) -> Result<Vec<MCStats>> {
    if config.trials == 0 {
        return Err(Error::Validation("trials must be >= 1".into()));
    }
    if config.mu_values.is_empty() {
        return Err(Error::Validation("at least one mu_max value is required".into()));
    }
    let order = hull_order(&config.template.pursuers).map_err(|e| Error::Validation(e.to_string()))?;
    let starts = (0..config.trials)
        .map(|i| trial_start(&config.template, &order, config.seed, i))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> =
        (0..config.mu_values.len()).flat_map(|m| (0..config.trials).map(move |i| (m, i))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(m, i)| {
            let (start, rejected) = starts[i];
            run_trial(config, config.mu_values[m], i, start, rejected)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_mu: Vec<Vec<TrialRecord>> = vec![Vec::new(); config.mu_values.len()];
    for (row, &(m, _)) in rows.into_iter().zip(&jobs) {
        per_mu[m].push(row);
    }
    Ok(config.mu_values.iter().zip(per_mu).map(|(&mu, rows)| aggregate(mu, rows)).collect())
}
