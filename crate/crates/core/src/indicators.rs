//! Case-level indicators and the induced ranking of traces.
//!
//! An indicator assigns one real value to each case: its duration or a stored
//! numeric case attribute. Ranking a log by an indicator produces the ordered
//! trace sequence every downstream bucketing and windowing step runs over.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event_log::{EventLog, Trace};

pub const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DurationUnit {
    #[default]
    Seconds,
    Days,
}

/// Which per-case value to rank by.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorSpec {
    Duration { unit: DurationUnit },
    TraceAttribute { name: String },
}

impl IndicatorSpec {
    pub fn duration(unit: DurationUnit) -> IndicatorSpec {
        IndicatorSpec::Duration { unit }
    }

    pub fn attribute(name: impl Into<String>) -> Result<IndicatorSpec> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidConfig(
                "empty indicator attribute name".into(),
            ));
        }
        Ok(IndicatorSpec::TraceAttribute { name })
    }

    /// Render an indicator value for reports. Durations in days are floored
    /// to whole days; everything else keeps six decimals.
    pub fn display_value(&self, kappa: f64) -> String {
        match self {
            IndicatorSpec::Duration {
                unit: DurationUnit::Days,
            } => format!("{} days", kappa.floor() as i64),
            IndicatorSpec::Duration {
                unit: DurationUnit::Seconds,
            } => format!("{kappa:.6} s"),
            IndicatorSpec::TraceAttribute { .. } => format!("{kappa:.6}"),
        }
    }
}

impl fmt::Display for IndicatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndicatorSpec::Duration { unit } => match unit {
                DurationUnit::Seconds => write!(f, "duration (seconds)"),
                DurationUnit::Days => write!(f, "duration (days)"),
            },
            IndicatorSpec::TraceAttribute { name } => write!(f, "attribute:{name}"),
        }
    }
}

/// Evaluate the indicator for a single trace.
///
/// Duration is last event timestamp minus first, converted to the requested
/// unit with fractions kept. Attributes must exist and be numeric.
pub fn evaluate_indicator(trace: &Trace, spec: &IndicatorSpec) -> Result<f64> {
    match spec {
        IndicatorSpec::Duration { unit } => {
            let first = trace.events.first().ok_or_else(|| Error::Indicator {
                indicator: spec.to_string(),
                cases: trace.case_id.clone(),
            })?;
            let last = trace.events.last().expect("non-empty checked above");
            let seconds = (last.timestamp - first.timestamp).num_milliseconds() as f64 / 1_000.0;
            Ok(match unit {
                DurationUnit::Seconds => seconds,
                DurationUnit::Days => seconds / SECONDS_PER_DAY,
            })
        }
        IndicatorSpec::TraceAttribute { name } => trace
            .attributes
            .get(name)
            .and_then(|v| v.as_number())
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Indicator {
                indicator: spec.to_string(),
                cases: trace.case_id.clone(),
            }),
    }
}

/// One position of a ranked log: which trace sits there and its indicator value.
#[derive(Debug, Clone, Copy)]
pub struct RankedEntry {
    pub trace_idx: usize,
    pub kappa: f64,
}

/// The traces of a log in non-decreasing indicator order, ties broken by
/// ascending case id.
#[derive(Debug, Clone)]
pub struct RankedLog<'a> {
    log: &'a EventLog,
    entries: Vec<RankedEntry>,
}

impl<'a> RankedLog<'a> {
    pub fn log(&self) -> &'a EventLog {
        self.log
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Trace at ranked position `pos` (0-based).
    pub fn trace(&self, pos: usize) -> &'a Trace {
        &self.log.traces()[self.entries[pos].trace_idx]
    }

    /// Indicator value at ranked position `pos` (0-based).
    pub fn kappa(&self, pos: usize) -> f64 {
        self.entries[pos].kappa
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a Trace, f64)> + '_ {
        self.entries
            .iter()
            .map(move |e| (&self.log.traces()[e.trace_idx], e.kappa))
    }
}

/// Rank all traces of a log by the indicator. Indicator failures are
/// aggregated so the error names every offending case.
pub fn rank_log<'a>(log: &'a EventLog, spec: &IndicatorSpec) -> Result<RankedLog<'a>> {
    let mut entries = Vec::with_capacity(log.len());
    let mut failures: Vec<String> = Vec::new();
    for (trace_idx, trace) in log.traces().iter().enumerate() {
        match evaluate_indicator(trace, spec) {
            Ok(kappa) => entries.push(RankedEntry { trace_idx, kappa }),
            Err(_) => failures.push(trace.case_id.clone()),
        }
    }
    if !failures.is_empty() {
        failures.sort();
        return Err(Error::Indicator {
            indicator: spec.to_string(),
            cases: failures.join(", "),
        });
    }
    entries.sort_by(|a, b| {
        a.kappa
            .partial_cmp(&b.kappa)
            .expect("indicator values are finite")
            .then_with(|| {
                log.traces()[a.trace_idx]
                    .case_id
                    .cmp(&log.traces()[b.trace_idx].case_id)
            })
    });
    Ok(RankedLog { log, entries })
}
