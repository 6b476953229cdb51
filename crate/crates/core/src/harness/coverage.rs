//! Monte Carlo coverage of the high-probability events.
//!
//! Every event is evaluated with the population constants of the experiment
//! (exact `kappa`, `s4_sq`, `|G|_F`, and `sigma` chosen by the same grid
//! policy as the estimator). When the standing assumption
//! `8 zeta(sigma) <= sqrt(n)` fails, or a bound is infinite, the event holds
//! trivially and is counted as `vacuous`.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use super::config::ExperimentConfig;
use super::generate::{draw, Population};
use super::seeds::{derive_seed, trial_seed, PROBE_STREAM};
use crate::bounds::BoundParams;
use crate::error::{Error, Result};
use crate::gram_estimator::{estimate_gram, RobustGramEstimate};
use crate::matrix::SymMatrix;
use crate::pca::{
    cutoff_with_params, frobenius_certificate, operator_norm_certificate, perturbation_diagnostics,
    projector_error_bound, top_projector, GapSource,
};
use crate::spectral::{
    apply_spectral_function, eigendecompose, make_ramp, operator_norm, EigenSystem,
};

/// `|theta^T Q theta| vs theta^T G theta` over the net, both inequalities.
pub const NET_QUADRATIC_FORMS: &str = "net_quadratic_forms";
/// Same inequalities with `G_hat = Q_+` in place of `Q`.
pub const NET_QUADRATIC_FORMS_G_HAT: &str = "net_quadratic_forms_g_hat";
/// `|l_i - l_hat_i|` within both interval half-widths, every `i`.
pub const EIGENVALUE_INTERVALS: &str = "eigenvalue_intervals";
/// `|Pi_r - Pi_hat_r|_inf <= sqrt(2r) B(l_1) / gap`.
pub const PROJECTOR_BOUND: &str = "projector_bound";
/// `|f(G) - f(G_hat)|_inf` for a ramp across the gap at `r`.
pub const RAMP_OPERATOR_BOUND: &str = "ramp_operator_bound";
/// `|G - G_tilde|_F` against the Frobenius certificate.
pub const CUTOFF_FROBENIUS_BOUND: &str = "cutoff_frobenius_bound";
/// `sum_i (l_i - l_k)^2 <q_k, p_i>^2 <= 2 B(l_1)^2`, every `k`.
pub const PERTURBATION_TRUE_GAP: &str = "perturbation_true_gap";
/// `sum_i (l_i - l_hat_k)^2 <q_k, p_i>^2 <= B(l_1)^2`, every `k`.
pub const PERTURBATION_ESTIMATED: &str = "perturbation_estimated";
/// `B(l_hat_1) <= 3 B(l_1) / 2` whenever the eigenvalue intervals hold.
pub const TOP_BOUND_INFLATION: &str = "top_bound_inflation";
/// `l_tilde_i <= l_i`, every `i`.
pub const SHRINKAGE_BELOW_TRUTH: &str = "shrinkage_below_truth";

pub const EVENTS: [&str; 10] = [
    NET_QUADRATIC_FORMS,
    NET_QUADRATIC_FORMS_G_HAT,
    EIGENVALUE_INTERVALS,
    PROJECTOR_BOUND,
    RAMP_OPERATOR_BOUND,
    CUTOFF_FROBENIUS_BOUND,
    PERTURBATION_TRUE_GAP,
    PERTURBATION_ESTIMATED,
    TOP_BOUND_INFLATION,
    SHRINKAGE_BELOW_TRUTH,
];

const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    /// Holds because the bound is infinite or the standing assumption fails.
    Vacuous,
    Fails,
    /// Fails at the nominal `delta` but holds once `delta` is raised to the
    /// empirical covering radius of the net.
    FailsNetSuspect,
}

impl Outcome {
    pub fn holds(self) -> bool {
        matches!(self, Outcome::Holds | Outcome::Vacuous)
    }
}

/// Non-finite values serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub error: Option<String>,
    pub net_radius: f64,
    #[serde(rename = "event_flags")]
    pub events: BTreeMap<String, Outcome>,
    pub bounds: BTreeMap<String, f64>,
    #[serde(rename = "observed_errors")]
    pub observed: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    pub event: String,
    pub trials: usize,
    pub holds: usize,
    pub vacuous: usize,
    pub failures: usize,
    pub net_suspect_failures: usize,
    /// `(holds + vacuous) / trials`.
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub threshold: f64,
    pub meets_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub config: ExperimentConfig,
    /// `1 - 2 epsilon`.
    pub threshold: f64,
    pub confidence: f64,
    pub population_params: BoundParams,
    pub standing_assumption: bool,
    pub events: Vec<EventSummary>,
    pub records: Vec<TrialRecord>,
}

impl CoverageReport {
    pub fn event(&self, name: &str) -> Option<&EventSummary> {
        self.events.iter().find(|e| e.event == name)
    }

    pub fn all_meet_threshold(&self) -> bool {
        self.events.iter().all(|e| e.meets_threshold)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_summary_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for e in &self.events {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exact two-sided Clopper-Pearson interval for `successes / trials`.
pub fn clopper_pearson(successes: usize, trials: usize, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let alpha = 1.0 - confidence;
    let (x, n) = (successes as f64, trials as f64);
    let low = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0)
            .map(|b| b.inverse_cdf(alpha / 2.0))
            .unwrap_or(0.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x)
            .map(|b| b.inverse_cdf(1.0 - alpha / 2.0))
            .unwrap_or(1.0)
    };
    (low, high)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Holds,
    Vacuous,
    Fails,
}

/// Result of checking one event: a status plus the quantities to record.
#[derive(Debug, Clone, Copy)]
struct Eval {
    status: Status,
    observed: f64,
    bound: f64,
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + 1e-12 * rhs.abs().max(1.0)
}

/// Checks a family of inequalities `lhs <= rhs`; infinite right-hand sides
/// hold trivially. Records the worst ratio `lhs / rhs`.
fn check_all(pairs: impl IntoIterator<Item = (f64, f64)>, assumption: bool) -> Eval {
    let mut worst = 0.0f64;
    let mut any_finite = false;
    let mut fails = false;
    for (lhs, rhs) in pairs {
        if rhs.is_infinite() {
            continue;
        }
        any_finite = true;
        if !within(lhs, rhs) {
            fails = true;
        }
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(ratio);
    }
    let status = if !assumption || !any_finite {
        Status::Vacuous
    } else if fails {
        Status::Fails
    } else {
        Status::Holds
    };
    Eval {
        status,
        observed: worst,
        bound: 1.0,
    }
}

fn check_one(lhs: f64, rhs: f64, assumption: bool) -> Eval {
    let status = if !assumption || rhs.is_infinite() {
        Status::Vacuous
    } else if within(lhs, rhs) {
        Status::Holds
    } else {
        Status::Fails
    };
    Eval {
        status,
        observed: lhs,
        bound: rhs,
    }
}

const VACUOUS: Eval = Eval {
    status: Status::Vacuous,
    observed: f64::NAN,
    bound: f64::INFINITY,
};

struct Truth<'a> {
    gram: &'a SymMatrix,
    eigen: &'a EigenSystem,
    rank: usize,
}

fn evaluate_events(
    truth: &Truth<'_>,
    est: &RobustGramEstimate,
    es_hat: &EigenSystem,
    p: &BoundParams,
) -> Result<Vec<Eval>> {
    let ok = p.standing_assumption_holds();
    let lambda = &truth.eigen.values;
    let lambda_hat = &es_hat.values;
    let d = lambda.len();
    let r = truth.rank;
    let sigma = p.sigma;
    let slack = 7.0 * p.delta * p.gram_frobenius;

    let side = |t: f64| 2.0 * t.max(sigma) * p.b_star(t.min(p.s4_sq)) + slack;
    let net_event = |m: &SymMatrix| {
        check_all(
            est.net.directions.iter().flat_map(|theta| {
                let g = truth.gram.quadratic_form(theta);
                let q = m.quadratic_form(theta);
                let lhs = (q.max(sigma) - g.max(sigma)).abs();
                [(lhs, side(g)), (lhs, side(q))]
            }),
            ok,
        )
    };
    let net_q = net_event(&est.q_matrix);
    let net_g_hat = net_event(&est.g_hat);

    let hw_pop = p.eigenvalue_halfwidth_population(lambda[0]);
    let hw_hat = p.eigenvalue_halfwidth(lambda_hat[0]);
    let intervals = check_all(
        lambda
            .iter()
            .zip(lambda_hat)
            .flat_map(|(l, lh)| [((l - lh).abs(), hw_pop), ((l - lh).abs(), hw_hat)]),
        ok,
    );

    let (projector, ramp) = if r < d && lambda[r - 1] > lambda[r] {
        let pi = top_projector(truth.eigen, r)?;
        let pi_hat = top_projector(es_hat, r)?;
        let observed = operator_norm(&pi.sub(&pi_hat)?);
        let bound = projector_error_bound(r, es_hat, p, GapSource::True(lambda))?;
        let projector = check_one(observed, bound, ok);

        let f = make_ramp(lambda[r], lambda[r - 1])?;
        let diff = apply_spectral_function(truth.gram, &f)?
            .sub(&apply_spectral_function(&est.g_hat, &f)?)?;
        let cert = operator_norm_certificate(lambda, f.lipschitz_constant(), p)?;
        (projector, check_one(operator_norm(&diff), cert.value, ok))
    } else {
        (VACUOUS, VACUOUS)
    };

    let (cutoff, shrinkage) = match cutoff_with_params(&est.g_hat, p) {
        Ok(cut) => {
            let observed = truth.gram.sub(&cut.g_tilde)?.frobenius_norm();
            let cert = frobenius_certificate(lambda, p)?;
            let shrink = check_all(
                cut.lambda_tilde.iter().zip(lambda).map(|(&lt, &l)| (lt, l)),
                ok,
            );
            (check_one(observed, cert.value, ok), shrink)
        }
        Err(Error::InfiniteBound) => (VACUOUS, VACUOUS),
        Err(e) => return Err(e),
    };

    let report = perturbation_diagnostics(truth.gram, &est.g_hat, p)?;
    let true_gap = check_all(
        report
            .rows
            .iter()
            .map(|row| (row.true_gap_lhs, report.true_gap_threshold)),
        ok,
    );
    let estimated = check_all(
        report
            .rows
            .iter()
            .map(|row| (row.estimated_lhs, report.estimated_threshold)),
        ok,
    );

    let inflation = if intervals.status == Status::Holds {
        check_one(p.bound(lambda_hat[0]), 1.5 * p.bound(lambda[0]), ok)
    } else {
        VACUOUS
    };

    Ok(vec![
        net_q, net_g_hat, intervals, projector, ramp, cutoff, true_gap, estimated, inflation,
        shrinkage,
    ])
}

fn run_trial(
    config: &ExperimentConfig,
    population: &Population,
    truth: &Truth<'_>,
    params: &BoundParams,
    trial: usize,
) -> TrialRecord {
    let seed = trial_seed(config.root_seed, trial);
    let mut record = TrialRecord {
        trial,
        seed,
        error: None,
        net_radius: f64::NAN,
        events: BTreeMap::new(),
        bounds: BTreeMap::new(),
        observed: BTreeMap::new(),
    };
    let outcome = (|| -> Result<()> {
        let sample = draw(config, population, seed)?;
        let est = estimate_gram(&sample, &config.estimator)?;
        let es_hat = eigendecompose(&est.g_hat)?;
        let radius = est.net.coverage_check(
            config.net_probes,
            derive_seed(config.root_seed, PROBE_STREAM, trial as u64),
        );
        record.net_radius = radius;

        let nominal = evaluate_events(truth, &est, &es_hat, params)?;
        let relaxed_params = BoundParams {
            delta: params.delta.max(radius),
            ..*params
        };
        let needs_relaxed = nominal.iter().any(|e| e.status == Status::Fails);
        let relaxed = if needs_relaxed {
            Some(evaluate_events(truth, &est, &es_hat, &relaxed_params)?)
        } else {
            None
        };
        for (i, name) in EVENTS.iter().enumerate() {
            let e = nominal[i];
            let outcome = match e.status {
                Status::Holds => Outcome::Holds,
                Status::Vacuous => Outcome::Vacuous,
                Status::Fails => match relaxed.as_ref().map(|r| r[i].status) {
                    Some(Status::Holds) => Outcome::FailsNetSuspect,
                    _ => Outcome::Fails,
                },
            };
            record.events.insert(name.to_string(), outcome);
            record.observed.insert(name.to_string(), e.observed);
            record.bounds.insert(name.to_string(), e.bound);
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
        record.events = EVENTS
            .iter()
            .map(|n| (n.to_string(), Outcome::Fails))
            .collect();
    }
    record
}

/// Runs `config.trials` independent trials in parallel and tallies every
/// event. Per-trial failures are recorded in the report, not returned.
pub fn run_coverage(config: &ExperimentConfig) -> Result<CoverageReport> {
    config.validate()?;
    let population = Population::new(config)?;
    let params = population.params(config)?;
    let eigen = eigendecompose(&population.gram)?;
    let truth = Truth {
        gram: &population.gram,
        eigen: &eigen,
        rank: config.projector_rank,
    };

    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, &population, &truth, &params, t))
        .collect();

    let threshold = 1.0 - 2.0 * config.estimator.epsilon;
    let events = EVENTS
        .iter()
        .map(|name| {
            let count = |o: Outcome| {
                records
                    .iter()
                    .filter(|r| r.events.get(*name) == Some(&o))
                    .count()
            };
            let holds = count(Outcome::Holds);
            let vacuous = count(Outcome::Vacuous);
            let net_suspect_failures = count(Outcome::FailsNetSuspect);
            let failures = records.len() - holds - vacuous;
            let successes = holds + vacuous;
            let frequency = successes as f64 / records.len() as f64;
            let (ci_low, ci_high) = clopper_pearson(successes, records.len(), CONFIDENCE);
            EventSummary {
                event: name.to_string(),
                trials: records.len(),
                holds,
                vacuous,
                failures,
                net_suspect_failures,
                frequency,
                ci_low,
                ci_high,
                threshold,
                meets_threshold: frequency >= threshold,
            }
        })
        .collect();

    Ok(CoverageReport {
        config: config.clone(),
        threshold,
        confidence: CONFIDENCE,
        population_params: params,
        standing_assumption: params.standing_assumption_holds(),
        events,
        records,
    })
}
