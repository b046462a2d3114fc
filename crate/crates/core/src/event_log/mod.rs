//! Event logs: traces of timestamped events plus case-level attributes.
//!
//! A log is an ordered collection of traces, one per case. Each trace is a
//! timestamp-ordered sequence of events carrying an activity label. Projecting
//! a trace onto its activity labels yields its [`Variant`]; the relative
//! frequencies of the variants of a trace collection form its
//! [`StochasticLanguage`].

pub mod csv;
pub mod xes;

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, Utc};

use crate::error::{Error, Result};

/// A numeric or textual case attribute value.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Number(f64),
    Text(String),
}

impl AttrValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttrValue::Number(x) => Some(*x),
            AttrValue::Text(_) => None,
        }
    }

    /// Parse a raw field: finite numbers become `Number`, everything else `Text`.
    pub fn parse(raw: &str) -> AttrValue {
        match raw.parse::<f64>() {
            Ok(x) if x.is_finite() => AttrValue::Number(x),
            _ => AttrValue::Text(raw.to_string()),
        }
    }
}

/// A single event: a case executed an activity at an instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub case_id: String,
    pub activity: String,
    pub timestamp: DateTime<Utc>,
}

/// All events of one case, ordered by timestamp, plus its case-level attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub case_id: String,
    pub events: Vec<Event>,
    pub attributes: BTreeMap<String, AttrValue>,
}

impl Trace {
    /// The activity-label projection of this trace.
    pub fn variant(&self) -> Variant {
        Variant::new(self.events.iter().map(|e| e.activity.clone()).collect())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// An immutable event log; each trace belongs to a different case.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    traces: Vec<Trace>,
}

impl EventLog {
    /// Build a log from traces, enforcing the structural invariants:
    /// at least one trace, no empty traces, non-empty activity labels,
    /// events sorted by timestamp within each trace, distinct case ids.
    pub fn new(traces: Vec<Trace>) -> Result<EventLog> {
        if traces.is_empty() {
            return Err(Error::EmptyLog);
        }
        let mut seen = std::collections::HashSet::new();
        for trace in &traces {
            if trace.events.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "trace `{}` has no events",
                    trace.case_id
                )));
            }
            if !seen.insert(trace.case_id.clone()) {
                return Err(Error::DuplicateCase(trace.case_id.clone()));
            }
            let mut prev: Option<DateTime<Utc>> = None;
            for event in &trace.events {
                if event.activity.is_empty() {
                    return Err(Error::InvalidConfig(format!(
                        "trace `{}` has an event with an empty activity label",
                        trace.case_id
                    )));
                }
                if event.case_id != trace.case_id {
                    return Err(Error::InvalidConfig(format!(
                        "trace `{}` contains an event of case `{}`",
                        trace.case_id, event.case_id
                    )));
                }
                if let Some(p) = prev {
                    if event.timestamp < p {
                        return Err(Error::InvalidConfig(format!(
                            "trace `{}` has events out of timestamp order",
                            trace.case_id
                        )));
                    }
                }
                prev = Some(event.timestamp);
            }
        }
        Ok(EventLog { traces })
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    /// Number of traces.
    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

/// An activity-label sequence. The empty variant is accepted as an input to
/// distance functions but is never produced from a trace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variant(Vec<String>);

impl Variant {
    pub fn new(activities: Vec<String>) -> Variant {
        Variant(activities)
    }

    /// Convenience constructor from string slices.
    pub fn of(activities: &[&str]) -> Variant {
        Variant(activities.iter().map(|s| s.to_string()).collect())
    }

    pub fn activities(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0.join(","))
    }
}

/// Extract the control flow of a log: one variant per trace, in log order.
/// Counted with multiplicity, the result has exactly `log.len()` elements.
pub fn control_flow(log: &EventLog) -> Vec<Variant> {
    log.traces().iter().map(Trace::variant).collect()
}

/// Count the distinct variants of an arbitrary trace collection.
pub fn variant_counts<'a, I>(traces: I) -> BTreeMap<Variant, usize>
where
    I: IntoIterator<Item = &'a Trace>,
{
    let mut counts = BTreeMap::new();
    for trace in traces {
        *counts.entry(trace.variant()).or_insert(0) += 1;
    }
    counts
}

/// A probability distribution over variants, stored exactly as
/// integer frequencies over a common total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticLanguage {
    counts: BTreeMap<Variant, u64>,
    total: u64,
}

impl StochasticLanguage {
    /// Build from variant frequencies. The total is the sum of all counts.
    pub fn from_counts(counts: BTreeMap<Variant, usize>) -> Result<StochasticLanguage> {
        let counts: BTreeMap<Variant, u64> = counts
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(v, c)| (v, c as u64))
            .collect();
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::InvalidLanguage(
                "no variants with positive frequency".into(),
            ));
        }
        Ok(StochasticLanguage { counts, total })
    }

    /// Build from an arbitrary trace collection.
    pub fn from_traces<'a, I>(traces: I) -> Result<StochasticLanguage>
    where
        I: IntoIterator<Item = &'a Trace>,
    {
        StochasticLanguage::from_counts(variant_counts(traces))
    }

    /// Number of distinct variants in the support.
    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    /// Total frequency mass (the denominator of every probability).
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Iterate `(variant, probability)` in canonical (sorted) variant order.
    pub fn iter(&self) -> impl Iterator<Item = (&Variant, f64)> + '_ {
        self.counts
            .iter()
            .map(move |(v, c)| (v, *c as f64 / self.total as f64))
    }

    /// Iterate `(variant, count)` in canonical order.
    pub fn iter_counts(&self) -> impl Iterator<Item = (&Variant, u64)> + '_ {
        self.counts.iter().map(|(v, c)| (v, *c))
    }

    pub fn probability(&self, variant: &Variant) -> f64 {
        self.counts
            .get(variant)
            .map(|c| *c as f64 / self.total as f64)
            .unwrap_or(0.0)
    }

    /// Variants sorted by descending probability, ties by ascending variant.
    pub fn top_variants(&self, limit: usize) -> Vec<(&Variant, f64)> {
        let mut entries: Vec<(&Variant, u64)> = self.counts.iter().map(|(v, c)| (v, *c)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        entries
            .into_iter()
            .take(limit)
            .map(|(v, c)| (v, c as f64 / self.total as f64))
            .collect()
    }
}

/// Extract the stochastic language of a log: each distinct variant mapped to
/// its relative frequency.
pub fn stochastic_language(log: &EventLog) -> Result<StochasticLanguage> {
    if log.is_empty() {
        return Err(Error::EmptyLog);
    }
    StochasticLanguage::from_traces(log.traces())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn ts(secs: i64) -> DateTime<Utc> {
        Utc.timestamp_opt(secs, 0).unwrap()
    }

    fn trace(case: &str, events: &[(&str, i64)]) -> Trace {
        Trace {
            case_id: case.to_string(),
            events: events
                .iter()
                .map(|(a, t)| Event {
                    case_id: case.to_string(),
                    activity: a.to_string(),
                    timestamp: ts(*t),
                })
                .collect(),
            attributes: BTreeMap::new(),
        }
    }

    /// The three-case log used throughout: c1 = <a,b>, c2 = <a,b,c>, c3 = <a,b,c>.
    pub(crate) fn three_case_log() -> EventLog {
        EventLog::new(vec![
            trace("c1", &[("a", 13), ("b", 23)]),
            trace("c2", &[("a", 14), ("b", 16), ("c", 20)]),
            trace("c3", &[("a", 17), ("b", 20), ("c", 35)]),
        ])
        .unwrap()
    }

    #[test]
    fn control_flow_multiset() {
        let log = three_case_log();
        let cf = control_flow(&log);
        assert_eq!(cf.len(), log.len());
        let counts = variant_counts(log.traces());
        assert_eq!(counts[&Variant::of(&["a", "b", "c"])], 2);
        assert_eq!(counts[&Variant::of(&["a", "b"])], 1);
    }

    #[test]
    fn control_flow_single_trace() {
        let log = EventLog::new(vec![trace("c1", &[("x", 1)])]).unwrap();
        assert_eq!(control_flow(&log), vec![Variant::of(&["x"])]);
    }

    #[test]
    fn control_flow_counts_identical_traces() {
        let log = EventLog::new(vec![
            trace("c1", &[("a", 1), ("b", 2)]),
            trace("c2", &[("a", 5), ("b", 6)]),
        ])
        .unwrap();
        let counts = variant_counts(log.traces());
        assert_eq!(counts[&Variant::of(&["a", "b"])], 2);
    }

    #[test]
    fn stochastic_language_three_case() {
        let log = three_case_log();
        let lang = stochastic_language(&log).unwrap();
        assert_eq!(lang.probability(&Variant::of(&["a", "b", "c"])), 2.0 / 3.0);
        assert_eq!(lang.probability(&Variant::of(&["a", "b"])), 1.0 / 3.0);
        let sum: f64 = lang.iter().map(|(_, p)| p).sum();
        assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn stochastic_language_single_trace() {
        let log = EventLog::new(vec![trace("c1", &[("x", 1)])]).unwrap();
        let lang = stochastic_language(&log).unwrap();
        assert_eq!(lang.probability(&Variant::of(&["x"])), 1.0);
    }

    #[test]
    fn stochastic_language_three_to_one() {
        let log = EventLog::new(vec![
            trace("c1", &[("a", 1)]),
            trace("c2", &[("a", 1)]),
            trace("c3", &[("a", 1)]),
            trace("c4", &[("b", 1)]),
        ])
        .unwrap();
        let lang = stochastic_language(&log).unwrap();
        assert_eq!(lang.probability(&Variant::of(&["a"])), 0.75);
        assert_eq!(lang.probability(&Variant::of(&["b"])), 0.25);
    }

    #[test]
    fn rejects_duplicate_case_ids() {
        let err = EventLog::new(vec![trace("c1", &[("a", 1)]), trace("c1", &[("b", 1)])]);
        assert!(matches!(err, Err(Error::DuplicateCase(_))));
    }

    #[test]
    fn rejects_empty_log() {
        assert!(matches!(EventLog::new(vec![]), Err(Error::EmptyLog)));
    }

    #[test]
    fn rejects_out_of_order_events() {
        let bad = Trace {
            case_id: "c1".into(),
            events: vec![
                Event {
                    case_id: "c1".into(),
                    activity: "a".into(),
                    timestamp: ts(10),
                },
                Event {
                    case_id: "c1".into(),
                    activity: "b".into(),
                    timestamp: ts(5),
                },
            ],
            attributes: BTreeMap::new(),
        };
        assert!(EventLog::new(vec![bad]).is_err());
    }
}
