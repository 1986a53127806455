use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

use flicker::frame_io::{self, ImageFormat, SequenceLocator};
use flicker::phosphor::{self, RefreshSweep};
use flicker::report::{self, ReportFormat, TabularReport};
use flicker::synth::{self, GroundTruth, InjectionSpec};
use flicker::{
    CdfMode, DetectorConfig, Error, ErrorKind, FlickerReport, PairOrientation, PaletteColor,
    ProbabilitySource, ReconstructionFill, ReductionMode, StochasticTables,
};

#[derive(Parser)]
#[command(
    name = "flicker",
    version,
    about = "Detect and reduce inter-frame flicker; model CRT phosphor flicker"
)]
struct Cli {
    /// Print a JSON description of every command and flag, then exit
    #[arg(long, global = true)]
    help_json: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Flag flickering pixels between consecutive frames
    Detect(DetectCmd),
    /// Insert (or blend in) mean-pixel frames between flagged pairs
    Reduce(ReduceCmd),
    /// Amplitude-coefficient curves, visual angles and flicker rate
    Phosphor(PhosphorCmd),
    /// Generate a frame sequence with flicker injected at known pixels
    Synth(SynthCmd),
    /// Dump the color relation and probability tables as CSV
    Tables(TablesCmd),
}

#[derive(Args)]
struct DetectorArgs {
    /// Flag pixels whose pair probability is at least this value
    #[arg(long, env = "FLICKER_THRESHOLD", default_value_t = flicker::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Probability table: col_stochastic, prob_col or prob_row
    #[arg(long, default_value = "col_stochastic")]
    source: ProbabilitySource,
    /// CDF evaluation: precision or paper_parity
    #[arg(long, default_value = "precision")]
    cdf: CdfMode,
    /// Which frame of a pair selects the table row: earlier_row or earlier_column
    #[arg(long, default_value = "earlier_row")]
    orientation: PairOrientation,
}

impl DetectorArgs {
    fn config(&self) -> DetectorConfig {
        DetectorConfig::default()
            .with_threshold(self.threshold)
            .with_source(self.source)
            .with_mode(self.cdf)
            .with_orientation(self.orientation)
    }
}

#[derive(Args)]
struct DetectCmd {
    /// Frame directory, or a pattern such as frames/f_%04d.ppm
    #[arg(long = "in", value_name = "DIR_OR_PATTERN")]
    input: String,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Report path
    #[arg(long)]
    report: PathBuf,
    /// Report format; defaults to the report file extension
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Write one 1-bit PBM mask per pair into this directory
    #[arg(long, value_name = "DIR")]
    maps: Option<PathBuf>,
    /// Include flagged pixel coordinates in the JSON report
    #[arg(long)]
    locations: bool,
}

#[derive(Args)]
struct ReduceCmd {
    /// Frame directory, or a pattern such as frames/f_%04d.ppm
    #[arg(long = "in", value_name = "DIR_OR_PATTERN")]
    input: String,
    /// Output directory for the reduced sequence
    #[arg(long)]
    out: PathBuf,
    /// insert grows the sequence; replace overwrites flagged pixels of the later frame
    #[arg(long, default_value = "insert")]
    mode: ReductionMode,
    /// Average the whole reconstructed frame, not just flagged pixels
    #[arg(long)]
    full_mean: bool,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Reduction report path
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Output image format
    #[arg(long, default_value = "ppm", value_parser = parse_image_format)]
    image_format: ImageFormat,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct PhosphorCmd {
    #[command(subcommand)]
    command: Option<PhosphorSub>,
    /// Refresh rates as min:max:step in hertz
    #[arg(long, default_value = "30:120:1")]
    sweep: RefreshSweep,
    /// Phosphor table (NAME = decay_seconds per line); built-in placeholders if omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PhosphorSub {
    /// Visual angle per display resolution
    Angle {
        /// Comma-separated WIDTHxHEIGHT list
        #[arg(long, default_value = "640x480,800x600,1024x768,1280x1024,1600x1200")]
        resolutions: String,
        /// Pixel pitch, mm per pixel
        #[arg(long, default_value_t = phosphor::DEFAULT_PIXEL_PITCH_MM)]
        pitch: f64,
        /// Viewing distance, mm
        #[arg(long, default_value_t = phosphor::DEFAULT_VIEWING_DISTANCE_MM)]
        distance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flicker regression divided by luminance decay time
    Rate {
        #[arg(long, allow_hyphen_values = true)]
        regression: f64,
        /// Decay time, seconds
        #[arg(long)]
        decay: f64,
    },
}

#[derive(Args)]
struct SynthCmd {
    /// WIDTHxHEIGHT
    #[arg(long, default_value = "100x100")]
    size: String,
    #[arg(long, default_value_t = 10)]
    frames: usize,
    /// Fraction of pixels that flicker
    #[arg(long, default_value_t = 0.06)]
    fraction: f64,
    /// base:flicker palette colors
    #[arg(long, default_value = "black:white")]
    colors: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "ppm", value_parser = parse_image_format)]
    image_format: ImageFormat,
}

#[derive(Args)]
struct TablesCmd {
    #[arg(long)]
    out: PathBuf,
    /// CDF evaluation for the probability tables
    #[arg(long, default_value = "precision")]
    cdf: CdfMode,
}

fn parse_image_format(s: &str) -> Result<ImageFormat, String> {
    match s {
        "ppm" => Ok(ImageFormat::Ppm),
        "png" => Ok(ImageFormat::Png),
        _ => Err(format!("{s:?} (expected ppm or png)")),
    }
}

fn parse_size(s: &str) -> flicker::Result<(usize, usize)> {
    let bad = || Error::InvalidParameter {
        name: "size",
        reason: format!("{s:?} (expected WIDTHxHEIGHT)"),
    };
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        w.trim().parse().map_err(|_| bad())?,
        h.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_colors(s: &str) -> flicker::Result<(PaletteColor, PaletteColor)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::InvalidParameter {
        name: "colors",
        reason: format!("{s:?} (expected base:flicker)"),
    })?;
    Ok((a.parse()?, b.parse()?))
}

fn write_tabular<R: TabularReport>(
    report: &R,
    path: &Path,
    format: Option<ReportFormat>,
) -> flicker::Result<()> {
    let format = format.unwrap_or_else(|| ReportFormat::from_path(path));
    report::write_report(report, path, format)
}

/// Writes a line to stdout; a closed pipe (`| head`) ends output quietly.
fn emit(text: impl std::fmt::Display) -> flicker::Result<()> {
    let result = writeln!(std::io::stdout().lock(), "{text}");
    stdout_result(result)
}

fn stdout_result(result: std::io::Result<()>) -> flicker::Result<()> {
    match result {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn write_csv_or_stdout(
    out: Option<&Path>,
    header: &[String],
    rows: &[Vec<String>],
) -> flicker::Result<()> {
    match out {
        Some(path) => report::write_csv(path, header, rows),
        None => {
            let mut stdout = std::io::stdout().lock();
            let mut line = |cells: &[String]| writeln!(stdout, "{}", cells.join(","));
            stdout_result(line(header).and_then(|_| rows.iter().try_for_each(|r| line(r))))
        }
    }
}

fn run_detect(cmd: DetectCmd) -> flicker::Result<()> {
    let seq = frame_io::load_sequence(&SequenceLocator::parse(&cmd.input))?;
    let config = cmd.detector.config();
    let detection = flicker::detect_sequence(&seq, &config)?;
    let report = if cmd.locations {
        FlickerReport::from_maps(&detection.maps, true)
    } else {
        detection.report
    };
    write_tabular(&report, &cmd.report, cmd.format)?;
    if let Some(dir) = &cmd.maps {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        let width = frame_io::index_width(detection.maps.len());
        for map in &detection.maps {
            frame_io::write_mask(
                map,
                &dir.join(format!("mask_{:0width$}.pbm", map.pair_index)),
            )?;
        }
    }
    emit(format_args!(
        "{} frames, {} pairs, aggregate flicker ratio {:.6}",
        seq.len(),
        report.pairs.len(),
        report.aggregate_ratio
    ))?;
    Ok(())
}

fn run_reduce(cmd: ReduceCmd) -> flicker::Result<()> {
    let seq = frame_io::load_sequence(&SequenceLocator::parse(&cmd.input))?;
    let fill = if cmd.full_mean {
        ReconstructionFill::FullMean
    } else {
        ReconstructionFill::Earlier
    };
    let reduction = flicker::reduce(&seq, &cmd.detector.config(), cmd.mode, fill)?;
    frame_io::write_sequence(&reduction.sequence, &cmd.out, "frame_", cmd.image_format)?;
    write_tabular(&reduction.report, &cmd.report, cmd.format)?;
    let r = &reduction.report;
    emit(format_args!(
        "{} -> {} frames, flicker ratio {:.6} -> {:.6} ({:.2}% reduction)",
        r.frames_before, r.frames_after, r.before_ratio, r.after_ratio, r.percent_reduction
    ))?;
    Ok(())
}

fn run_phosphor(cmd: PhosphorCmd) -> flicker::Result<()> {
    match cmd.command {
        None => {
            let phosphors = match &cmd.config {
                Some(path) => phosphor::load_phosphors(path)?,
                None => phosphor::builtin_phosphors(),
            };
            let curves = phosphor::emit_amp_curves(&phosphors, &cmd.sweep)?;
            write_csv_or_stdout(cmd.out.as_deref(), &curves.header(), &curves.rows())
        }
        Some(PhosphorSub::Angle {
            resolutions,
            pitch,
            distance,
            out,
        }) => {
            let res = phosphor::parse_resolutions(&resolutions)?;
            let curve = phosphor::emit_visual_angle_curve(&res, pitch, distance)?;
            write_csv_or_stdout(out.as_deref(), &curve.header(), &curve.rows())
        }
        Some(PhosphorSub::Rate { regression, decay }) => {
            emit(phosphor::flicker_rate(regression, decay)?)?;
            Ok(())
        }
    }
}

fn run_synth(cmd: SynthCmd) -> flicker::Result<()> {
    let (width, height) = parse_size(&cmd.size)?;
    let (base_color, flicker_color) = parse_colors(&cmd.colors)?;
    let spec = InjectionSpec {
        base_color,
        flicker_color,
        fraction: cmd.fraction,
        width,
        height,
        frame_count: cmd.frames,
        seed: cmd.seed,
    };
    let generated = synth::generate(&spec)?;
    frame_io::write_sequence(&generated.sequence, &cmd.out, "frame_", cmd.image_format)?;
    report::write_json(
        &GroundTruth::new(&spec, &generated),
        &cmd.out.join("ground_truth.json"),
    )?;
    emit(format_args!(
        "{} frames of {}x{}, {} injected pixels per pair",
        generated.sequence.len(),
        width,
        height,
        generated.locations.len()
    ))?;
    Ok(())
}

fn run_tables(cmd: TablesCmd) -> flicker::Result<()> {
    let tables = StochasticTables::build(cmd.cdf)?;
    for path in report::write_tables(&tables, &cmd.out)? {
        emit(path.display())?;
    }
    Ok(())
}

fn describe(cmd: &clap::Command) -> Value {
    let args: Vec<Value> = cmd
        .get_arguments()
        .filter(|a| !a.is_hide_set())
        .map(|a| {
            json!({
                "id": a.get_id().as_str(),
                "long": a.get_long(),
                "short": a.get_short().map(String::from),
                "help": a.get_help().map(|h| h.to_string()),
                "required": a.is_required_set(),
                "takes_value": a.get_action().takes_values(),
                "default": a.get_default_values().iter().map(|v| v.to_string_lossy().into_owned()).collect::<Vec<_>>(),
                "env": a.get_env().map(|e| e.to_string_lossy().into_owned()),
            })
        })
        .collect();
    let subcommands: Vec<Value> = cmd
        .get_subcommands()
        .filter(|s| s.get_name() != "help")
        .map(describe)
        .collect();
    json!({
        "name": cmd.get_name(),
        "about": cmd.get_about().map(|s| s.to_string()),
        "version": cmd.get_version(),
        "args": args,
        "subcommands": subcommands,
    })
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Input => 1,
        ErrorKind::Format => 2,
        ErrorKind::Invariant => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.help_json {
        let doc = describe(&Cli::command());
        let text = serde_json::to_string_pretty(&doc).expect("json value serializes");
        if let Err(e) = emit(text) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        let _ = Cli::command().print_help();
        return ExitCode::from(1);
    };
    let result = match command {
        Command::Detect(c) => run_detect(c),
        Command::Reduce(c) => run_reduce(c),
        Command::Phosphor(c) => run_phosphor(c),
        Command::Synth(c) => run_synth(c),
        Command::Tables(c) => run_tables(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
