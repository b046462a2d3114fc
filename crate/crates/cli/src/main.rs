//! Command-line pipeline: analyze an event log along a continuous case
//! dimension, compute pairwise distances, generate synthetic logs, and
//! re-export segment groups from a saved report.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use varseg_core::emd::emd;
use varseg_core::event_log::csv::TimestampFormat;
use varseg_core::event_log::{csv as csv_io, stochastic_language};
use varseg_core::indicators::{DurationUnit, IndicatorSpec};
use varseg_core::pipeline::{
    export_segments, read_log, run_analysis, AnalysisConfig, AnalysisReport, InputFormat,
};
use varseg_core::synthgen::{
    generate_claim_log, generate_step_log, parse_step_regions, ClaimGenConfig,
};

#[derive(Parser)]
#[command(
    name = "varseg",
    version,
    about = "Detect control-flow changes in an event log along a continuous case dimension, \
             segment the log at the change points, and merge similar segments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Xes,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => InputFormat::Csv,
            FormatArg::Xes => InputFormat::Xes,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TimestampArg {
    Rfc3339,
    Epoch,
}

impl From<TimestampArg> for TimestampFormat {
    fn from(f: TimestampArg) -> Self {
        match f {
            TimestampArg::Rfc3339 => TimestampFormat::Rfc3339,
            TimestampArg::Epoch => TimestampFormat::EpochSeconds,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Seconds,
    Days,
}

#[derive(Args)]
struct InputArgs {
    /// Input format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Timestamp format of CSV inputs
    #[arg(long, value_enum, default_value = "rfc3339")]
    timestamps: TimestampArg,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write the report, CSVs, segment exports,
    /// and optional SVG heatmaps
    Analyze {
        /// Event log to analyze
        input: PathBuf,
        #[command(flatten)]
        source: InputArgs,
        /// Case indicator: `duration` or `attribute:<name>`
        #[arg(long, default_value = "duration")]
        indicator: String,
        /// Unit for duration indicators
        #[arg(long, value_enum, default_value = "seconds")]
        duration_unit: UnitArg,
        /// Number of buckets
        #[arg(long, default_value_t = 100)]
        buckets: usize,
        /// Window sizes, e.g. `2,5,10,15`
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,15")]
        windows: Vec<usize>,
        /// Window size used for segmentation (must be listed in --windows)
        #[arg(long)]
        segment_window: usize,
        /// Peak and merge threshold
        #[arg(long, default_value_t = 0.1)]
        theta: f64,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        /// Emit SVG heatmaps
        #[arg(long)]
        svg: bool,
        /// Keep transport plans in the report
        #[arg(long)]
        plans: bool,
        /// Worker cap for parallel stages (default: all cores).
        /// Output is independent of this setting.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Earth mover's distance between the stochastic languages of two logs
    Emd {
        #[arg(long)]
        log_a: PathBuf,
        #[arg(long)]
        log_b: PathBuf,
        #[command(flatten)]
        source: InputArgs,
    },
    /// Generate synthetic event logs
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Re-export segment group logs from a saved report
    SegmentExport {
        /// report.json produced by `analyze`
        #[arg(long)]
        report: PathBuf,
        /// Override the input log path recorded in the report
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Claim-handling process with a risk_score case attribute
    Claim {
        #[arg(long)]
        cases: usize,
        #[arg(long)]
        seed: u64,
        /// Probability of the noisy resubmission repetition in mid-risk cases
        #[arg(long, default_value_t = 0.05)]
        noise_rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Step-pattern log from a region list, e.g. `A:70,B:30,A:50`
    /// (multi-activity variants use dashes: `a-b-c:70`)
    Step {
        #[arg(long)]
        regions: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_indicator(spec: &str, unit: UnitArg) -> Result<IndicatorSpec> {
    if spec == "duration" {
        let unit = match unit {
            UnitArg::Seconds => DurationUnit::Seconds,
            UnitArg::Days => DurationUnit::Days,
        };
        return Ok(IndicatorSpec::duration(unit));
    }
    if let Some(name) = spec.strip_prefix("attribute:") {
        return Ok(IndicatorSpec::attribute(name)?);
    }
    bail!("indicator must be `duration` or `attribute:<name>`, got `{spec}`")
}

fn write_log(log: &varseg_core::event_log::EventLog, out: &PathBuf) -> Result<()> {
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let file = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
    csv_io::write(log, file)?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter("VS_LOG_LEVEL")).init();
    let cli = Cli::parse();

    match cli.command {
        Command::Analyze {
            input,
            source,
            indicator,
            duration_unit,
            buckets,
            windows,
            segment_window,
            theta,
            out,
            svg,
            plans,
            jobs,
        } => {
            let config = AnalysisConfig {
                input,
                format: source.format.into(),
                timestamps: source.timestamps.into(),
                indicator: parse_indicator(&indicator, duration_unit)?,
                buckets,
                windows,
                segment_window,
                theta,
                out_dir: out.clone(),
                emit_svg: svg,
                retain_plans: plans,
            };
            let pool = rayon_pool(jobs)?;
            let report = pool.install(|| run_analysis(&config))?;
            print_summary(&report);
            log::info!("outputs written to {}", out.display());
        }
        Command::Emd {
            log_a,
            log_b,
            source,
        } => {
            let format: InputFormat = source.format.into();
            let timestamps: TimestampFormat = source.timestamps.into();
            let a = read_log(&log_a, format, timestamps)
                .with_context(|| format!("reading {}", log_a.display()))?;
            let b = read_log(&log_b, format, timestamps)
                .with_context(|| format!("reading {}", log_b.display()))?;
            let value = emd(&stochastic_language(&a)?, &stochastic_language(&b)?).value;
            println!("{value:.6}");
        }
        Command::Generate(generate) => match generate {
            GenerateCommand::Claim {
                cases,
                seed,
                noise_rate,
                out,
            } => {
                let mut config = ClaimGenConfig::new(cases, seed);
                config.noise_rate = noise_rate;
                let log = generate_claim_log(&config)?;
                write_log(&log, &out)?;
                println!("wrote {} cases to {}", log.len(), out.display());
            }
            GenerateCommand::Step { regions, out } => {
                let config = parse_step_regions(&regions)?;
                let log = generate_step_log(&config)?;
                write_log(&log, &out)?;
                println!("wrote {} cases to {}", log.len(), out.display());
            }
        },
        Command::SegmentExport { report, input, out } => {
            let json = fs::read_to_string(&report)
                .with_context(|| format!("reading {}", report.display()))?;
            let report: AnalysisReport = serde_json::from_str(&json)?;
            let log_path = input.unwrap_or_else(|| PathBuf::from(&report.config.input));
            let log = read_log(
                &log_path,
                report.config.format,
                report.config.timestamps.into(),
            )
            .with_context(|| format!("reading {}", log_path.display()))?;
            let manifest = export_segments(&report, &log, &out)?;
            println!(
                "exported {} group log(s) to {}",
                manifest.groups.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn rayon_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()?)
}

fn print_summary(report: &AnalysisReport) {
    println!(
        "{} window size(s), segmentation on w={}, theta={:.6}",
        report.series.len(),
        report.config.segment_window,
        report.config.theta
    );
    if report.change_points.is_empty() {
        println!("no change points");
    } else {
        let points: Vec<String> = report
            .change_points
            .iter()
            .map(|c| format!("i={} ({})", c.index, c.kappa_display))
            .collect();
        println!("change points: {}", points.join(", "));
    }
    println!("{} segment(s):", report.segments.len());
    for seg in &report.segments {
        println!(
            "  seg_{}: buckets {}..{}, {} trace(s), kappa [{:.6}, {:.6}]",
            seg.index,
            seg.first_bucket,
            seg.last_bucket,
            seg.trace_count,
            seg.kappa_min,
            seg.kappa_max
        );
    }
    let groups: Vec<String> = report
        .merge
        .groups
        .iter()
        .map(|g| {
            let ids: Vec<String> = g.iter().map(|s| s.to_string()).collect();
            format!("{{{}}}", ids.join(","))
        })
        .collect();
    println!("final groups: {}", groups.join(" "));
}
