//! End-to-end analysis pipeline and report emission.
//!
//! `run_analysis` executes parse -> rank -> bucket -> multi-window local
//! distances -> change points -> segments -> comparison matrix -> merge, then
//! writes the JSON report, per-window CSV series, the matrix CSV, one CSV
//! event log per final segment group, and optional SVG heatmaps. All written
//! bytes are deterministic: floats are fixed to six decimals, key order is
//! fixed, and parallel execution does not change any value. Wall-clock
//! timings are logged to the diagnostic channel only, never written into
//! output files.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize, Serializer};

use crate::change_detection::{make_buckets, multi_window_analysis, Bucketing, LdistSeries};
use crate::emd::{emd_with_cache, DistanceCache};
use crate::error::{Error, Result};
use crate::event_log::csv::{self as csv_io, CsvConfig, TimestampFormat};
use crate::event_log::{xes, EventLog, StochasticLanguage};
use crate::indicators::{rank_log, IndicatorSpec};
use crate::render;
use crate::segmentation::{
    compare_segments, cut_segments, detect_change_points, merge_segments, ComparisonMatrix,
    MergeResult, Segment,
};

pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6 + 0.0
}

fn ser6<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round6(*x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Csv,
    Xes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimestampEcho {
    Rfc3339,
    EpochSeconds,
}

impl From<TimestampFormat> for TimestampEcho {
    fn from(f: TimestampFormat) -> Self {
        match f {
            TimestampFormat::Rfc3339 => TimestampEcho::Rfc3339,
            TimestampFormat::EpochSeconds => TimestampEcho::EpochSeconds,
        }
    }
}

impl From<TimestampEcho> for TimestampFormat {
    fn from(f: TimestampEcho) -> Self {
        match f {
            TimestampEcho::Rfc3339 => TimestampFormat::Rfc3339,
            TimestampEcho::EpochSeconds => TimestampFormat::EpochSeconds,
        }
    }
}

/// Everything one analysis run needs.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub timestamps: TimestampFormat,
    pub indicator: IndicatorSpec,
    pub buckets: usize,
    pub windows: Vec<usize>,
    pub segment_window: usize,
    pub theta: f64,
    pub out_dir: PathBuf,
    pub emit_svg: bool,
    pub retain_plans: bool,
}

impl AnalysisConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidConfig(format!(
                "theta {} outside [0, 1]",
                self.theta
            )));
        }
        if self.buckets < 2 {
            return Err(Error::InvalidConfig("bucket count must be >= 2".into()));
        }
        if self.windows.is_empty() {
            return Err(Error::InvalidConfig("need at least one window size".into()));
        }
        if !self.windows.contains(&self.segment_window) {
            return Err(Error::InvalidConfig(format!(
                "segmentation window {} is not among the window sizes {:?}",
                self.segment_window, self.windows
            )));
        }
        Ok(())
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            input: self.input.display().to_string(),
            format: self.format,
            timestamps: self.timestamps.into(),
            indicator: self.indicator.clone(),
            buckets: self.buckets,
            windows: self.windows.clone(),
            segment_window: self.segment_window,
            theta: self.theta,
            svg: self.emit_svg,
            retain_plans: self.retain_plans,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub format: InputFormat,
    pub timestamps: TimestampEcho,
    pub indicator: IndicatorSpec,
    pub buckets: usize,
    pub windows: Vec<usize>,
    pub segment_window: usize,
    #[serde(serialize_with = "ser6")]
    pub theta: f64,
    pub svg: bool,
    pub retain_plans: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesEntryReport {
    pub i: usize,
    #[serde(serialize_with = "ser6")]
    pub kappa_boundary: f64,
    #[serde(serialize_with = "ser6")]
    pub ldist: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesReport {
    pub window: usize,
    pub entries: Vec<SeriesEntryReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChangePointReport {
    pub index: usize,
    #[serde(serialize_with = "ser6")]
    pub kappa_boundary: f64,
    pub kappa_display: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantShare {
    pub activities: Vec<String>,
    #[serde(serialize_with = "ser6")]
    pub probability: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentReport {
    pub index: usize,
    pub first_bucket: usize,
    pub last_bucket: usize,
    #[serde(serialize_with = "ser6")]
    pub kappa_min: f64,
    #[serde(serialize_with = "ser6")]
    pub kappa_max: f64,
    pub trace_count: usize,
    pub top_variants: Vec<VariantShare>,
}

fn ser6_matrix<S: Serializer>(values: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rounded: Vec<Vec<f64>> = values
        .iter()
        .map(|row| row.iter().map(|x| round6(*x)).collect())
        .collect();
    rounded.serialize(s)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixReport {
    pub labels: Vec<String>,
    #[serde(serialize_with = "ser6_matrix")]
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeStepReport {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    #[serde(serialize_with = "ser6")]
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeReport {
    pub steps: Vec<MergeStepReport>,
    pub groups: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowReport {
    pub from: Vec<String>,
    pub to: Vec<String>,
    #[serde(serialize_with = "ser6")]
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanReport {
    pub segment_a: usize,
    pub segment_b: usize,
    pub flows: Vec<FlowReport>,
}

/// Wall-clock stage timings. Diagnostic only: logged, never serialized, so
/// repeated runs produce byte-identical files.
#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub parse_ms: u128,
    pub rank_ms: u128,
    pub series_ms: u128,
    pub segmentation_ms: u128,
    pub write_ms: u128,
    pub total_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: ConfigEcho,
    pub series: Vec<SeriesReport>,
    pub change_points: Vec<ChangePointReport>,
    pub segments: Vec<SegmentReport>,
    pub comparison_matrix: MatrixReport,
    pub merge: MergeReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transport_plans: Option<Vec<PlanReport>>,
    #[serde(skip, default)]
    pub timings: Timings,
}

impl AnalysisReport {
    /// Cross-check the report against the structural invariants before any
    /// byte is written: segments partition the log, the matrix is symmetric
    /// with a zero diagonal, the merge groups partition the segments, and
    /// every distance lies in `[0,1]`.
    pub fn validate(&self, log_len: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::InconsistentReport(msg));

        let total: usize = self.segments.iter().map(|s| s.trace_count).sum();
        if total != log_len {
            return fail(format!(
                "segment trace counts sum to {total}, log has {log_len}"
            ));
        }
        let mut next = 1usize;
        for seg in &self.segments {
            if seg.first_bucket != next || seg.last_bucket < seg.first_bucket {
                return fail(format!(
                    "segment {} bucket range is not contiguous",
                    seg.index
                ));
            }
            next = seg.last_bucket + 1;
        }
        if next != self.config.buckets + 1 {
            return fail("segments do not cover all buckets".into());
        }

        let n = self.comparison_matrix.values.len();
        if n != self.segments.len() {
            return fail("matrix size does not match segment count".into());
        }
        for i in 0..n {
            if self.comparison_matrix.values[i][i] != 0.0 {
                return fail("matrix diagonal not zero".into());
            }
            for j in 0..n {
                let v = self.comparison_matrix.values[i][j];
                if !(0.0..=1.0).contains(&v) {
                    return fail("matrix value outside [0,1]".into());
                }
                if (v - self.comparison_matrix.values[j][i]).abs() > 1e-9 {
                    return fail("matrix not symmetric".into());
                }
            }
        }

        let mut members: Vec<usize> = self.merge.groups.iter().flatten().copied().collect();
        members.sort_unstable();
        if members != (1..=self.segments.len()).collect::<Vec<_>>() {
            return fail("merge groups do not partition the segments".into());
        }

        let (kappa_lo, kappa_hi) = match (self.segments.first(), self.segments.last()) {
            (Some(first), Some(last)) => (first.kappa_min, last.kappa_max),
            _ => return fail("no segments".into()),
        };
        for cp in &self.change_points {
            if cp.kappa_boundary < kappa_lo - 1e-9 || cp.kappa_boundary > kappa_hi + 1e-9 {
                return fail(format!(
                    "change point at index {} has boundary outside the indicator range",
                    cp.index
                ));
            }
        }
        for series in &self.series {
            for e in &series.entries {
                if !(0.0..=1.0).contains(&e.ldist) {
                    return fail("ldist outside [0,1]".into());
                }
            }
        }
        Ok(())
    }
}

/// Read an event log in the configured format.
pub fn read_log(path: &Path, format: InputFormat, timestamps: TimestampFormat) -> Result<EventLog> {
    let file = fs::File::open(path)?;
    match format {
        InputFormat::Csv => csv_io::parse(BufReader::new(file), CsvConfig { timestamps }),
        InputFormat::Xes => xes::parse(BufReader::new(file)),
    }
}

fn series_report(series: &LdistSeries) -> SeriesReport {
    SeriesReport {
        window: series.window,
        entries: series
            .entries
            .iter()
            .map(|e| SeriesEntryReport {
                i: e.index,
                kappa_boundary: e.kappa_boundary,
                ldist: e.value,
            })
            .collect(),
    }
}

fn segment_reports(bucketing: &Bucketing<'_>, segments: &[Segment]) -> Vec<SegmentReport> {
    segments
        .iter()
        .map(|seg| {
            let language = bucketing
                .language_of(seg.first_bucket..=seg.last_bucket)
                .expect("segments are non-empty");
            SegmentReport {
                index: seg.index,
                first_bucket: seg.first_bucket,
                last_bucket: seg.last_bucket,
                kappa_min: seg.kappa_min,
                kappa_max: seg.kappa_max,
                trace_count: seg.trace_count,
                top_variants: language
                    .top_variants(10)
                    .into_iter()
                    .map(|(variant, probability)| VariantShare {
                        activities: variant.activities().to_vec(),
                        probability,
                    })
                    .collect(),
            }
        })
        .collect()
}

fn plan_reports(
    bucketing: &Bucketing<'_>,
    segments: &[Segment],
    cache: &DistanceCache,
) -> Vec<PlanReport> {
    let languages: Vec<StochasticLanguage> = segments
        .iter()
        .map(|s| {
            bucketing
                .language_of(s.first_bucket..=s.last_bucket)
                .expect("segments are non-empty")
        })
        .collect();
    let mut reports = Vec::new();
    for i in 0..segments.len() {
        for j in i + 1..segments.len() {
            let result = emd_with_cache(&languages[i], &languages[j], cache);
            let rows: Vec<&crate::event_log::Variant> =
                languages[i].iter_counts().map(|(v, _)| v).collect();
            let cols: Vec<&crate::event_log::Variant> =
                languages[j].iter_counts().map(|(v, _)| v).collect();
            let flows = result
                .plan
                .map(|plan| {
                    plan.flows()
                        .iter()
                        .map(|&(r, c, mass)| FlowReport {
                            from: rows[r].activities().to_vec(),
                            to: cols[c].activities().to_vec(),
                            mass,
                        })
                        .collect()
                })
                .unwrap_or_default();
            reports.push(PlanReport {
                segment_a: i + 1,
                segment_b: j + 1,
                flows,
            });
        }
    }
    reports
}

fn write_series_csv(series: &SeriesReport, path: &Path) -> Result<()> {
    let mut out = String::from("i,kappa_boundary,ldist\n");
    for e in &series.entries {
        out.push_str(&format!("{},{:.6},{:.6}\n", e.i, e.kappa_boundary, e.ldist));
    }
    fs::write(path, out)?;
    Ok(())
}

fn write_matrix_csv(matrix: &MatrixReport, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(",{}\n", matrix.labels.join(",")));
    for (label, row) in matrix.labels.iter().zip(&matrix.values) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        out.push_str(&format!("{},{}\n", label, cells.join(",")));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Manifest entry for one exported segment group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportedGroup {
    pub file: String,
    pub group: Vec<usize>,
    pub trace_count: usize,
    #[serde(serialize_with = "ser6")]
    pub kappa_min: f64,
    #[serde(serialize_with = "ser6")]
    pub kappa_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportManifest {
    pub groups: Vec<ExportedGroup>,
}

/// Write one CSV event log per final merge group, plus a manifest JSON.
/// Ranking and bucketing are re-derived from the report's config echo, so a
/// saved report plus the original log reproduce the exact same files.
pub fn export_segments(
    report: &AnalysisReport,
    log: &EventLog,
    out_dir: &Path,
) -> Result<ExportManifest> {
    fs::create_dir_all(out_dir)?;
    let ranked = rank_log(log, &report.config.indicator)?;
    let bucketing = make_buckets(ranked, report.config.buckets)?;

    let mut groups = Vec::new();
    for (k, members) in report.merge.groups.iter().enumerate() {
        let mut traces = Vec::new();
        let mut kappa_min = f64::INFINITY;
        let mut kappa_max = f64::NEG_INFINITY;
        for &seg_index in members {
            let seg = report.segments.get(seg_index - 1).ok_or_else(|| {
                Error::InconsistentReport("group references unknown segment".into())
            })?;
            kappa_min = kappa_min.min(seg.kappa_min);
            kappa_max = kappa_max.max(seg.kappa_max);
            traces.extend(
                bucketing
                    .traces_of(seg.first_bucket..=seg.last_bucket)
                    .cloned(),
            );
        }
        let group_log = EventLog::new(traces)?;
        let file = format!(
            "segment_{}_{:.6}_{:.6}.csv",
            k + 1,
            round6(kappa_min),
            round6(kappa_max)
        );
        let handle = fs::File::create(out_dir.join(&file))?;
        csv_io::write(&group_log, handle)?;
        groups.push(ExportedGroup {
            file,
            group: members.clone(),
            trace_count: group_log.len(),
            kappa_min,
            kappa_max,
        });
    }

    let manifest = ExportManifest { groups };
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(out_dir.join("manifest.json"), json + "\n")?;
    Ok(manifest)
}

/// Analysis results before report assembly; exposed for tests that want the
/// raw artifacts alongside the serialized form.
pub struct AnalysisArtifacts {
    pub report: AnalysisReport,
    pub matrix: ComparisonMatrix,
    pub merge: MergeResult,
}

/// Run the full pipeline on an already-parsed log and write all outputs.
pub fn run_analysis_on_log(log: &EventLog, config: &AnalysisConfig) -> Result<AnalysisReport> {
    config.validate().map_err(|e| e.in_stage("config"))?;
    let total_start = Instant::now();
    let mut timings = Timings::default();

    let start = Instant::now();
    let ranked = rank_log(log, &config.indicator).map_err(|e| e.in_stage("rank"))?;
    let bucketing = make_buckets(ranked, config.buckets).map_err(|e| e.in_stage("bucket"))?;
    timings.rank_ms = start.elapsed().as_millis();

    let cache = DistanceCache::new();
    let start = Instant::now();
    let all_series = multi_window_analysis(&bucketing, &config.windows, &cache)
        .map_err(|e| e.in_stage("ldist"))?;
    timings.series_ms = start.elapsed().as_millis();

    let start = Instant::now();
    let segmentation_series = all_series
        .iter()
        .find(|s| s.window == config.segment_window)
        .expect("validated: segmentation window is among the window sizes");
    let points = detect_change_points(segmentation_series, config.theta);
    let segments = cut_segments(&bucketing, &points);
    let matrix = compare_segments(&bucketing, &segments, &cache);
    let merge = merge_segments(&bucketing, &segments, config.theta, &cache);
    timings.segmentation_ms = start.elapsed().as_millis();

    let report = AnalysisReport {
        config: config.echo(),
        series: all_series.iter().map(series_report).collect(),
        change_points: points
            .points
            .iter()
            .map(|&index| {
                let kappa = bucketing.boundary_kappa(index);
                ChangePointReport {
                    index,
                    kappa_boundary: kappa,
                    kappa_display: config.indicator.display_value(kappa),
                }
            })
            .collect(),
        segments: segment_reports(&bucketing, &segments),
        comparison_matrix: MatrixReport {
            labels: (1..=segments.len()).map(|i| format!("seg_{i}")).collect(),
            values: matrix.rows().to_vec(),
        },
        merge: MergeReport {
            steps: merge
                .steps
                .iter()
                .map(|s| MergeStepReport {
                    left: s.left.clone(),
                    right: s.right.clone(),
                    distance: s.distance,
                })
                .collect(),
            groups: merge.groups.clone(),
        },
        transport_plans: config
            .retain_plans
            .then(|| plan_reports(&bucketing, &segments, &cache)),
        timings: Timings::default(),
    };
    report
        .validate(log.len())
        .map_err(|e| e.in_stage("report"))?;

    let start = Instant::now();
    write_outputs(&report, log, config).map_err(|e| e.in_stage("write"))?;
    timings.write_ms = start.elapsed().as_millis();
    timings.total_ms = total_start.elapsed().as_millis();
    log::info!(
        "analysis done: rank {} ms, ldist {} ms, segmentation {} ms, write {} ms, total {} ms",
        timings.rank_ms,
        timings.series_ms,
        timings.segmentation_ms,
        timings.write_ms,
        timings.total_ms
    );

    let mut report = report;
    report.timings = timings;
    Ok(report)
}

fn write_outputs(report: &AnalysisReport, log: &EventLog, config: &AnalysisConfig) -> Result<()> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir)?;

    for series in &report.series {
        write_series_csv(series, &dir.join(format!("ldist_w{}.csv", series.window)))?;
        if config.emit_svg {
            fs::write(
                dir.join(format!("ldist_w{}.svg", series.window)),
                render::render_series_heatmap(series),
            )?;
        }
    }
    write_matrix_csv(
        &report.comparison_matrix,
        &dir.join("comparison_matrix.csv"),
    )?;
    if config.emit_svg {
        fs::write(
            dir.join("comparison_matrix.svg"),
            render::render_matrix_heatmap(&report.comparison_matrix),
        )?;
    }
    export_segments(report, log, dir)?;

    let json = serde_json::to_string_pretty(report)?;
    fs::write(dir.join("report.json"), json + "\n")?;
    Ok(())
}

/// Parse the configured input and run the full pipeline.
pub fn run_analysis(config: &AnalysisConfig) -> Result<AnalysisReport> {
    config.validate().map_err(|e| e.in_stage("config"))?;
    let start = Instant::now();
    let log = read_log(&config.input, config.format, config.timestamps)
        .map_err(|e| e.in_stage("parse"))?;
    let parse_ms = start.elapsed().as_millis();
    log::info!("parsed {} traces in {} ms", log.len(), parse_ms);
    let mut report = run_analysis_on_log(&log, config)?;
    report.timings.parse_ms = parse_ms;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_log::Variant;
    use crate::synthgen::{
        generate_claim_log, generate_step_log, parse_step_regions, ClaimGenConfig,
    };

    fn config(dir: &Path, input: &Path) -> AnalysisConfig {
        AnalysisConfig {
            input: input.to_path_buf(),
            format: InputFormat::Csv,
            timestamps: TimestampFormat::Rfc3339,
            indicator: IndicatorSpec::attribute("idx").unwrap(),
            buckets: 15,
            windows: vec![1, 3],
            segment_window: 1,
            theta: 0.1,
            out_dir: dir.to_path_buf(),
            emit_svg: true,
            retain_plans: false,
        }
    }

    #[test]
    fn analyze_step_log_end_to_end() {
        let tmp = tempfile::tempdir().unwrap();
        let log = generate_step_log(&parse_step_regions("A:70,B:30,A:50").unwrap()).unwrap();
        let input = tmp.path().join("step.csv");
        let file = fs::File::create(&input).unwrap();
        csv_io::write(&log, file).unwrap();

        let out = tmp.path().join("out");
        let report = run_analysis(&config(&out, &input)).unwrap();

        let indices: Vec<usize> = report.change_points.iter().map(|c| c.index).collect();
        assert_eq!(indices, [7, 10]);
        assert_eq!(report.segments.len(), 3);
        assert_eq!(report.merge.groups, vec![vec![1, 3], vec![2]]);

        for name in [
            "report.json",
            "ldist_w1.csv",
            "ldist_w3.csv",
            "ldist_w1.svg",
            "comparison_matrix.csv",
            "comparison_matrix.svg",
            "manifest.json",
        ] {
            assert!(out.join(name).exists(), "missing {name}");
        }
    }

    #[test]
    fn homogeneous_log_single_segment() {
        let tmp = tempfile::tempdir().unwrap();
        let log = generate_step_log(&parse_step_regions("A:45").unwrap()).unwrap();
        let input = tmp.path().join("flat.csv");
        csv_io::write(&log, fs::File::create(&input).unwrap()).unwrap();

        let mut cfg = config(&tmp.path().join("out"), &input);
        cfg.buckets = 9;
        let report = run_analysis(&cfg).unwrap();
        assert!(report.change_points.is_empty());
        assert_eq!(report.segments.len(), 1);
        assert!(report.merge.steps.is_empty());
        assert_eq!(report.merge.groups, vec![vec![1]]);
    }

    #[test]
    fn segmentation_window_must_be_listed() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = config(tmp.path(), Path::new("missing.csv"));
        cfg.segment_window = 5;
        match run_analysis(&cfg) {
            Err(Error::Stage { stage, .. }) => assert_eq!(stage, "config"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn export_conserves_traces_and_is_deterministic() {
        let tmp = tempfile::tempdir().unwrap();
        let log = generate_step_log(&parse_step_regions("A:20,B:10,A:10").unwrap()).unwrap();
        let input = tmp.path().join("log.csv");
        csv_io::write(&log, fs::File::create(&input).unwrap()).unwrap();

        let mut cfg = config(&tmp.path().join("out"), &input);
        cfg.buckets = 8;
        let report = run_analysis(&cfg).unwrap();

        let manifest = export_segments(&report, &log, &tmp.path().join("again")).unwrap();
        let total: usize = manifest.groups.iter().map(|g| g.trace_count).sum();
        assert_eq!(total, log.len());

        // re-running overwrites with identical bytes
        let manifest2 = export_segments(&report, &log, &tmp.path().join("again")).unwrap();
        for (a, b) in manifest.groups.iter().zip(&manifest2.groups) {
            assert_eq!(a.file, b.file);
            let bytes_a = fs::read(tmp.path().join("again").join(&a.file)).unwrap();
            let bytes_b = fs::read(tmp.path().join("again").join(&b.file)).unwrap();
            assert_eq!(bytes_a, bytes_b);
        }
    }

    #[test]
    fn report_round_trips_through_json() {
        let tmp = tempfile::tempdir().unwrap();
        let log = generate_claim_log(&ClaimGenConfig::new(300, 5)).unwrap();
        let input = tmp.path().join("claim.csv");
        csv_io::write(&log, fs::File::create(&input).unwrap()).unwrap();

        let cfg = AnalysisConfig {
            input: input.clone(),
            format: InputFormat::Csv,
            timestamps: TimestampFormat::Rfc3339,
            indicator: IndicatorSpec::attribute("risk_score").unwrap(),
            buckets: 10,
            windows: vec![2],
            segment_window: 2,
            theta: 0.1,
            out_dir: tmp.path().join("out"),
            emit_svg: false,
            retain_plans: true,
        };
        let report = run_analysis(&cfg).unwrap();
        assert!(report.transport_plans.is_some());

        let json = fs::read_to_string(tmp.path().join("out/report.json")).unwrap();
        let parsed: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.segments.len(), report.segments.len());
        assert_eq!(parsed.merge.groups, report.merge.groups);
        assert_eq!(parsed.config.buckets, 10);
    }

    #[test]
    fn round6_is_stable() {
        assert_eq!(round6(0.1234564), 0.123456);
        assert_eq!(round6(0.1234566), 0.123457);
        assert_eq!(round6(-0.0), 0.0);
        assert_eq!(round6(1.0), 1.0);
    }

    #[test]
    fn variant_share_keeps_order() {
        let v = Variant::of(&["x", "y"]);
        assert_eq!(v.activities(), ["x".to_string(), "y".to_string()]);
    }
}
