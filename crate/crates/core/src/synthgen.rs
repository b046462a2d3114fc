//! Synthetic event-log generators used by the test and acceptance suites:
//! a claim-handling process whose control flow depends on a per-case risk
//! score, and step-pattern logs with explicit variant regions.
//!
//! Generation is seeded with ChaCha8, a fixed cross-platform algorithm, so a
//! given seed always produces byte-identical logs.

use std::collections::BTreeMap;

use chrono::{DateTime, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::event_log::{AttrValue, Event, EventLog, Trace, Variant};

pub const ACT_CREATE: &str = "Create Application";
pub const ACT_CANCEL: &str = "Cancel Application";
pub const ACT_CHECK: &str = "Check Documents";
pub const ACT_INTERVIEW: &str = "Interview";
pub const ACT_SUBMIT_MORE: &str = "Submit More Documents";
pub const ACT_SECOND_INTERVIEW: &str = "Second Interview";
pub const ACT_DECISION: &str = "Final Decision";

/// Risk scores are uniform on [0, RISK_MAX); the control flow changes at
/// RISK_SKIP_BELOW and RISK_CANCEL_ABOVE.
pub const RISK_MAX: f64 = 15.0;
pub const RISK_SKIP_BELOW: f64 = 3.0;
pub const RISK_CANCEL_ABOVE: f64 = 10.0;

fn base_instant() -> DateTime<Utc> {
    Utc.timestamp_opt(1_700_000_000, 0).unwrap()
}

/// Configuration of the claim-handling generator.
#[derive(Debug, Clone)]
pub struct ClaimGenConfig {
    pub cases: usize,
    pub seed: u64,
    /// Probability that a mid-risk case repeats the document resubmission.
    pub noise_rate: f64,
}

impl ClaimGenConfig {
    pub fn new(cases: usize, seed: u64) -> ClaimGenConfig {
        ClaimGenConfig {
            cases,
            seed,
            noise_rate: 0.05,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.cases < 1 {
            return Err(Error::InvalidConfig("case count must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.noise_rate) {
            return Err(Error::InvalidConfig(format!(
                "noise rate {} outside [0, 1)",
                self.noise_rate
            )));
        }
        Ok(())
    }
}

fn claim_activities(risk: f64, noisy: bool) -> Vec<&'static str> {
    if risk > RISK_CANCEL_ABOVE {
        vec![ACT_CREATE, ACT_CANCEL]
    } else if risk < RISK_SKIP_BELOW {
        vec![ACT_CREATE, ACT_CHECK, ACT_INTERVIEW, ACT_DECISION]
    } else if noisy {
        vec![
            ACT_CREATE,
            ACT_CHECK,
            ACT_INTERVIEW,
            ACT_SUBMIT_MORE,
            ACT_SUBMIT_MORE,
            ACT_SECOND_INTERVIEW,
            ACT_DECISION,
        ]
    } else {
        vec![
            ACT_CREATE,
            ACT_CHECK,
            ACT_INTERVIEW,
            ACT_SUBMIT_MORE,
            ACT_SECOND_INTERVIEW,
            ACT_DECISION,
        ]
    }
}

fn build_trace(
    case_id: String,
    activities: &[&str],
    start: DateTime<Utc>,
    attrs: &[(&str, f64)],
) -> Trace {
    let events = activities
        .iter()
        .enumerate()
        .map(|(k, activity)| Event {
            case_id: case_id.clone(),
            activity: activity.to_string(),
            timestamp: start + chrono::Duration::seconds(60 * k as i64),
        })
        .collect();
    let attributes: BTreeMap<String, AttrValue> = attrs
        .iter()
        .map(|(name, value)| (name.to_string(), AttrValue::Number(*value)))
        .collect();
    Trace {
        case_id,
        events,
        attributes,
    }
}

/// Generate the claim-handling log: risk drawn uniformly on [0, 15), high
/// risk canceled after creation, low risk skipping the resubmission loop,
/// mid risk running the full procedure with an optional noisy repetition.
/// The drawn risk is stored as the `risk_score` case attribute.
pub fn generate_claim_log(config: &ClaimGenConfig) -> Result<EventLog> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let base = base_instant();
    let traces = (0..config.cases)
        .map(|k| {
            let risk = rng.random::<f64>() * RISK_MAX;
            let mid = (RISK_SKIP_BELOW..=RISK_CANCEL_ABOVE).contains(&risk);
            let noisy = mid && rng.random::<f64>() < config.noise_rate;
            let activities = claim_activities(risk, noisy);
            build_trace(
                format!("c{k:05}"),
                &activities,
                base + chrono::Duration::seconds(600 * k as i64),
                &[("risk_score", risk)],
            )
        })
        .collect();
    EventLog::new(traces)
}

/// One region of a step-pattern log: `cases` consecutive cases all running
/// the same variant.
#[derive(Debug, Clone)]
pub struct StepRegion {
    pub variant: Variant,
    pub cases: usize,
}

/// Configuration of the step-pattern generator.
#[derive(Debug, Clone)]
pub struct StepGenConfig {
    pub regions: Vec<StepRegion>,
}

impl StepGenConfig {
    fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::InvalidConfig("need at least one region".into()));
        }
        for region in &self.regions {
            if region.cases < 1 {
                return Err(Error::InvalidConfig(
                    "region case count must be >= 1".into(),
                ));
            }
            if region.variant.is_empty() {
                return Err(Error::InvalidConfig(
                    "region variant must be non-empty".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Emit cases region by region with an ascending `idx` case attribute, so
/// ranking by `idx` reproduces the construction order.
pub fn generate_step_log(config: &StepGenConfig) -> Result<EventLog> {
    config.validate()?;
    let base = base_instant();
    let mut traces = Vec::new();
    let mut k = 0usize;
    for region in &config.regions {
        for _ in 0..region.cases {
            k += 1;
            let activities: Vec<&str> = region
                .variant
                .activities()
                .iter()
                .map(String::as_str)
                .collect();
            traces.push(build_trace(
                format!("s{k:05}"),
                &activities,
                base + chrono::Duration::seconds(600 * k as i64),
                &[("idx", k as f64)],
            ));
        }
    }
    EventLog::new(traces)
}

/// Parse a region list of the form `a-b-c:70,d:30` into a step config:
/// comma-separated regions, each `activity(-activity)*:count`.
pub fn parse_step_regions(spec: &str) -> Result<StepGenConfig> {
    let mut regions = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        let (variant_part, count_part) = token.rsplit_once(':').ok_or_else(|| {
            Error::InvalidConfig(format!("region `{token}` is not of the form SEQ:count"))
        })?;
        let activities: Vec<String> = variant_part
            .split('-')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if activities.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "region `{token}` has an empty activity sequence"
            )));
        }
        let cases: usize = count_part
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("region `{token}` has a bad case count")))?;
        regions.push(StepRegion {
            variant: Variant::new(activities),
            cases,
        });
    }
    let config = StepGenConfig { regions };
    config.validate()?;
    Ok(config)
}
