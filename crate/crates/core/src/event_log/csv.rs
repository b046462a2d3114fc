//! CSV event-log parsing and export.
//!
//! Expected header: `case_id,activity,timestamp[,attr...]`. Extra columns
//! become case-level attributes, taking the value from the case's earliest
//! event (numeric when parseable). Timestamps are RFC 3339 strings or integer
//! epoch seconds, selected by [`CsvConfig`].

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};

use super::{AttrValue, Event, EventLog, Trace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimestampFormat {
    #[default]
    Rfc3339,
    EpochSeconds,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CsvConfig {
    pub timestamps: TimestampFormat,
}

fn parse_timestamp(raw: &str, format: TimestampFormat, line: u64) -> Result<DateTime<Utc>> {
    match format {
        TimestampFormat::Rfc3339 => DateTime::parse_from_rfc3339(raw)
            .map(|dt| dt.with_timezone(&Utc))
            .map_err(|e| Error::CsvRow {
                line,
                msg: format!("unparseable timestamp `{raw}`: {e}"),
            }),
        TimestampFormat::EpochSeconds => raw
            .parse::<i64>()
            .ok()
            .and_then(|secs| Utc.timestamp_opt(secs, 0).single())
            .ok_or_else(|| Error::CsvRow {
                line,
                msg: format!("unparseable epoch-seconds timestamp `{raw}`"),
            }),
    }
}

struct PendingCase {
    order: usize,
    // (timestamp, file order, activity)
    events: Vec<(DateTime<Utc>, usize, String)>,
    // attributes of the earliest event row seen so far
    first_key: (DateTime<Utc>, usize),
    attributes: BTreeMap<String, AttrValue>,
}

/// Parse a CSV event log. Events are grouped by case id and sorted by
/// timestamp within a case, ties keeping original file order.
pub fn parse<R: Read>(source: R, config: CsvConfig) -> Result<EventLog> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);

    let headers = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .clone();
    let mut case_col = None;
    let mut activity_col = None;
    let mut ts_col = None;
    let mut attr_cols: Vec<(usize, String)> = Vec::new();
    for (idx, name) in headers.iter().enumerate() {
        match name {
            "case_id" => case_col = Some(idx),
            "activity" => activity_col = Some(idx),
            "timestamp" => ts_col = Some(idx),
            other => attr_cols.push((idx, other.to_string())),
        }
    }
    let case_col = case_col.ok_or_else(|| Error::MissingColumn("case_id".into()))?;
    let activity_col = activity_col.ok_or_else(|| Error::MissingColumn("activity".into()))?;
    let ts_col = ts_col.ok_or_else(|| Error::MissingColumn("timestamp".into()))?;

    let mut cases: HashMap<String, PendingCase> = HashMap::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |idx: usize| -> Result<&str> {
            record.get(idx).ok_or_else(|| Error::CsvRow {
                line,
                msg: format!("missing field {idx}"),
            })
        };

        let case_id = field(case_col)?.to_string();
        let activity = field(activity_col)?.to_string();
        if activity.is_empty() {
            return Err(Error::CsvRow {
                line,
                msg: format!("empty activity for case `{case_id}`"),
            });
        }
        let timestamp = parse_timestamp(field(ts_col)?, config.timestamps, line)?;

        let order = cases.len();
        let entry = cases.entry(case_id).or_insert_with(|| PendingCase {
            order,
            events: Vec::new(),
            first_key: (DateTime::<Utc>::MAX_UTC, usize::MAX),
            attributes: BTreeMap::new(),
        });
        // Case attributes come from the earliest event row (stable on ties).
        let key = (timestamp, row_no);
        if key < entry.first_key {
            entry.first_key = key;
            entry.attributes = attr_cols
                .iter()
                .filter_map(|(idx, name)| {
                    record.get(*idx).and_then(|raw| {
                        if raw.is_empty() {
                            None
                        } else {
                            Some((name.clone(), AttrValue::parse(raw)))
                        }
                    })
                })
                .collect();
        }
        entry.events.push((timestamp, row_no, activity));
    }

    if cases.is_empty() {
        return Err(Error::EmptyLog);
    }

    let mut pending: Vec<(String, PendingCase)> = cases.into_iter().collect();
    pending.sort_by_key(|(_, c)| c.order);

    let traces = pending
        .into_iter()
        .map(|(case_id, mut case)| {
            case.events.sort_by_key(|e| (e.0, e.1));
            Trace {
                events: case
                    .events
                    .into_iter()
                    .map(|(timestamp, _, activity)| Event {
                        case_id: case_id.clone(),
                        activity,
                        timestamp,
                    })
                    .collect(),
                case_id,
                attributes: case.attributes,
            }
        })
        .collect();
    EventLog::new(traces)
}

fn format_number(x: f64) -> String {
    // Shortest round-trip representation keeps exports lossless.
    format!("{x}")
}

/// Write a log in the same CSV dialect `parse` reads (RFC 3339 timestamps).
/// Attribute columns are the union of all trace attribute names, sorted.
pub fn write<W: Write>(log: &EventLog, sink: W) -> Result<()> {
    let mut attr_names: Vec<String> = log
        .traces()
        .iter()
        .flat_map(|t| t.attributes.keys().cloned())
        .collect();
    attr_names.sort();
    attr_names.dedup();

    let mut writer = ::csv::Writer::from_writer(sink);
    let mut header = vec![
        "case_id".to_string(),
        "activity".to_string(),
        "timestamp".to_string(),
    ];
    header.extend(attr_names.iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| Error::Csv(e.to_string()))?;

    for trace in log.traces() {
        for event in &trace.events {
            let mut record = vec![
                trace.case_id.clone(),
                event.activity.clone(),
                event.timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            ];
            for name in &attr_names {
                record.push(match trace.attributes.get(name) {
                    Some(AttrValue::Number(x)) => format_number(*x),
                    Some(AttrValue::Text(s)) => s.clone(),
                    None => String::new(),
                });
            }
            writer
                .write_record(&record)
                .map_err(|e| Error::Csv(e.to_string()))?;
        }
    }
    writer.flush()?;
    Ok(())
}
