//! XES event-log parsing (pragmatic subset).
//!
//! Understands `log`/`trace`/`event` elements with scalar attributes. Events
//! must carry `concept:name` (activity) and `time:timestamp` (date); traces
//! carry `concept:name` (case id) and optional scalar attributes, of which
//! float/int values are kept as numeric case attributes. Extensions, globals,
//! classifiers, and nested attribute lists are skipped.

use std::collections::BTreeMap;
use std::io::BufRead;

use chrono::{DateTime, Utc};
use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;

use super::{AttrValue, Event, EventLog, Trace};
use crate::error::{Error, Result};

#[derive(Default)]
struct PendingEvent {
    activity: Option<String>,
    timestamp: Option<DateTime<Utc>>,
}

#[derive(Default)]
struct PendingTrace {
    case_id: Option<String>,
    attributes: BTreeMap<String, AttrValue>,
    // (timestamp, arrival order, activity)
    events: Vec<(DateTime<Utc>, usize, String)>,
}

struct XesParser {
    stack: Vec<Vec<u8>>,
    trace: Option<PendingTrace>,
    event: Option<PendingEvent>,
    traces: Vec<Trace>,
    trace_no: usize,
}

fn key_value(element: &BytesStart<'_>) -> Result<(String, String)> {
    let mut key = None;
    let mut value = None;
    for attr in element.attributes() {
        let attr = attr.map_err(|e| Error::Xes(e.to_string()))?;
        match attr.key.as_ref() {
            b"key" => {
                key = Some(
                    attr.unescape_value()
                        .map_err(|e| Error::Xes(e.to_string()))?
                        .into_owned(),
                )
            }
            b"value" => {
                value = Some(
                    attr.unescape_value()
                        .map_err(|e| Error::Xes(e.to_string()))?
                        .into_owned(),
                )
            }
            _ => {}
        }
    }
    Ok((key.unwrap_or_default(), value.unwrap_or_default()))
}

impl XesParser {
    fn new() -> Self {
        XesParser {
            stack: Vec::new(),
            trace: None,
            event: None,
            traces: Vec::new(),
            trace_no: 0,
        }
    }

    fn trace_label(&self) -> String {
        match self.trace.as_ref().and_then(|t| t.case_id.clone()) {
            Some(id) => format!("`{id}`"),
            None => format!("#{}", self.trace_no),
        }
    }

    /// Scalar attribute elements are only interpreted directly below
    /// `trace` or `event`; nested children are ignored.
    fn on_scalar(&mut self, tag: &[u8], element: &BytesStart<'_>) -> Result<()> {
        let parent = self.stack.last().map(|v| v.as_slice());
        let label = self.trace_label();
        let (key, value) = key_value(element)?;
        match parent {
            Some(b"event") => {
                if let Some(event) = self.event.as_mut() {
                    match (tag, key.as_str()) {
                        (b"string", "concept:name") => event.activity = Some(value),
                        (b"date", "time:timestamp") => {
                            let parsed = DateTime::parse_from_rfc3339(&value).map_err(|e| {
                                Error::Xes(format!(
                                    "trace {label}: bad event timestamp `{value}`: {e}"
                                ))
                            })?;
                            event.timestamp = Some(parsed.with_timezone(&Utc));
                        }
                        _ => {}
                    }
                }
            }
            Some(b"trace") => {
                if let Some(trace) = self.trace.as_mut() {
                    match tag {
                        b"string" if key == "concept:name" => trace.case_id = Some(value),
                        b"string" => {
                            trace.attributes.insert(key, AttrValue::Text(value));
                        }
                        b"float" | b"int" => match value.parse::<f64>() {
                            Ok(x) if x.is_finite() => {
                                trace.attributes.insert(key, AttrValue::Number(x));
                            }
                            _ => {
                                return Err(Error::Xes(format!(
                                    "trace {}: non-numeric {} attribute `{key}`",
                                    self.trace_label(),
                                    String::from_utf8_lossy(tag)
                                )))
                            }
                        },
                        _ => {}
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn on_start(&mut self, element: &BytesStart<'_>, self_closing: bool) -> Result<()> {
        let tag = element.name().as_ref().to_vec();
        match tag.as_slice() {
            b"trace" => {
                self.trace_no += 1;
                self.trace = Some(PendingTrace::default());
            }
            b"event" => {
                if self.trace.is_some() {
                    self.event = Some(PendingEvent::default());
                }
            }
            b"string" | b"date" | b"int" | b"float" | b"boolean" | b"id" => {
                self.on_scalar(&tag, element)?;
            }
            _ => {}
        }
        if !self_closing {
            self.stack.push(tag);
        }
        Ok(())
    }

    fn on_end(&mut self, tag: &[u8]) -> Result<()> {
        self.stack.pop();
        match tag {
            b"event" => {
                if let Some(event) = self.event.take() {
                    if let Some(trace) = self.trace.as_mut() {
                        let activity = event.activity.ok_or_else(|| {
                            Error::Xes(format!(
                                "trace {}: event missing concept:name",
                                match &trace.case_id {
                                    Some(id) => format!("`{id}`"),
                                    None => format!("#{}", self.trace_no),
                                }
                            ))
                        })?;
                        let timestamp = event.timestamp.ok_or_else(|| {
                            Error::Xes(format!(
                                "trace {}: event missing time:timestamp",
                                match &trace.case_id {
                                    Some(id) => format!("`{id}`"),
                                    None => format!("#{}", self.trace_no),
                                }
                            ))
                        })?;
                        let order = trace.events.len();
                        trace.events.push((timestamp, order, activity));
                    }
                }
            }
            b"trace" => {
                if let Some(mut trace) = self.trace.take() {
                    let case_id = trace.case_id.take().ok_or_else(|| {
                        Error::Xes(format!("trace #{}: missing concept:name", self.trace_no))
                    })?;
                    if self.traces.iter().any(|t| t.case_id == case_id) {
                        return Err(Error::Xes(format!(
                            "duplicate trace concept:name `{case_id}`"
                        )));
                    }
                    trace.events.sort_by_key(|e| (e.0, e.1));
                    self.traces.push(Trace {
                        events: trace
                            .events
                            .into_iter()
                            .map(|(timestamp, _, activity)| Event {
                                case_id: case_id.clone(),
                                activity,
                                timestamp,
                            })
                            .collect(),
                        case_id,
                        attributes: trace.attributes,
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parse a XES document into an event log.
pub fn parse<R: BufRead>(source: R) -> Result<EventLog> {
    let mut reader = Reader::from_reader(source);
    reader.config_mut().trim_text(true);

    let mut parser = XesParser::new();
    let mut buf = Vec::new();
    loop {
        match reader.read_event_into(&mut buf) {
            Ok(XmlEvent::Start(e)) => parser.on_start(&e, false)?,
            Ok(XmlEvent::Empty(e)) => parser.on_start(&e, true)?,
            Ok(XmlEvent::End(e)) => parser.on_end(e.name().as_ref())?,
            Ok(XmlEvent::Eof) => break,
            Ok(_) => {}
            Err(e) => return Err(Error::Xes(format!("malformed XML: {e}"))),
        }
        buf.clear();
    }
    if parser.traces.is_empty() {
        return Err(Error::EmptyLog);
    }
    EventLog::new(parser.traces)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0">
  <extension name="Concept" prefix="concept" uri="http://www.xes-standard.org/concept.xesext"/>
  <trace>
    <string key="concept:name" value="c1"/>
    <float key="risk_score" value="4.5"/>
    <event>
      <string key="concept:name" value="a"/>
      <date key="time:timestamp" value="2024-01-01T10:00:00.000+00:00"/>
    </event>
    <event>
      <string key="concept:name" value="b"/>
      <date key="time:timestamp" value="2024-01-01T11:00:00.000+00:00"/>
    </event>
  </trace>
</log>"#;

    #[test]
    fn parses_minimal_log() {
        let log = parse(MINIMAL.as_bytes()).unwrap();
        assert_eq!(log.len(), 1);
        let trace = &log.traces()[0];
        assert_eq!(trace.case_id, "c1");
        assert_eq!(trace.events.len(), 2);
        let acts: Vec<&str> = trace.events.iter().map(|e| e.activity.as_str()).collect();
        assert_eq!(acts, ["a", "b"]);
    }

    #[test]
    fn float_trace_attribute_is_numeric() {
        let log = parse(MINIMAL.as_bytes()).unwrap();
        assert_eq!(
            log.traces()[0].attributes["risk_score"],
            AttrValue::Number(4.5)
        );
    }

    #[test]
    fn event_missing_timestamp_names_trace() {
        let doc = r#"<log><trace>
            <string key="concept:name" value="c7"/>
            <event><string key="concept:name" value="a"/></event>
        </trace></log>"#;
        match parse(doc.as_bytes()) {
            Err(Error::Xes(msg)) => assert!(msg.contains("c7") && msg.contains("time:timestamp")),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn duplicate_case_id_rejected() {
        let doc = r#"<log>
          <trace><string key="concept:name" value="c1"/>
            <event><string key="concept:name" value="a"/><date key="time:timestamp" value="2024-01-01T00:00:00Z"/></event>
          </trace>
          <trace><string key="concept:name" value="c1"/>
            <event><string key="concept:name" value="a"/><date key="time:timestamp" value="2024-01-01T00:00:00Z"/></event>
          </trace>
        </log>"#;
        match parse(doc.as_bytes()) {
            Err(Error::Xes(msg)) => assert!(msg.contains("duplicate")),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn malformed_xml_rejected() {
        let doc = "<log><trace></log>";
        assert!(matches!(parse(doc.as_bytes()), Err(Error::Xes(_))));
    }

    #[test]
    fn events_sorted_by_timestamp() {
        let doc = r#"<log><trace>
            <string key="concept:name" value="c1"/>
            <event><string key="concept:name" value="late"/><date key="time:timestamp" value="2024-01-02T00:00:00Z"/></event>
            <event><string key="concept:name" value="early"/><date key="time:timestamp" value="2024-01-01T00:00:00Z"/></event>
        </trace></log>"#;
        let log = parse(doc.as_bytes()).unwrap();
        let acts: Vec<&str> = log.traces()[0]
            .events
            .iter()
            .map(|e| e.activity.as_str())
            .collect();
        assert_eq!(acts, ["early", "late"]);
    }

    #[test]
    fn nested_attribute_children_ignored() {
        let doc = r#"<log><trace>
            <string key="concept:name" value="c1"/>
            <string key="note" value="outer">
              <string key="concept:name" value="not-the-case-id"/>
            </string>
            <event>
              <string key="concept:name" value="a"/>
              <date key="time:timestamp" value="2024-01-01T00:00:00Z"/>
            </event>
        </trace></log>"#;
        let log = parse(doc.as_bytes()).unwrap();
        assert_eq!(log.traces()[0].case_id, "c1");
    }
}
