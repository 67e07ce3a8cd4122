#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use atomseg::align::{parse_geometry, place_hand_features};
use atomseg::classify::{synth_timeline, Consensus, LogitsBackend, NoiseModel, OracleBackend, LOGITS_MAGIC};
use atomseg::cleaning::{compute_class_stats, sweep_kappa, ClassStats, CleanerConfig};
use atomseg::formats::{self, hand_predictions, hand_targets, read_hand_rows};
use atomseg::grid::{Dims, FeatureMap};
use atomseg::hands::hand_counts;
use atomseg::metrics::{evaluate, EvalConfig, EvalReport};
use atomseg::pipeline::{run_offline, PipelineConfig, Segmentation};
use atomseg::reference::{reference_stats, sample_ground_truth};
use atomseg::{ClassId, ClipClassifier, Timeline, NUM_CLASSES};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{usage, RunConfig, UsageError};

#[derive(Parser)]
#[command(name = "atomseg", version, about = "Sliding-window atomic action segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-class segment length statistics from a segment file.
    Stats(StatsArgs),
    /// Segment a sequence from logits or per-frame predictions.
    Run(RunArgs),
    /// Pick the cleaning kappa that maximises F1@0.5.
    SweepKappa(SweepArgs),
    /// Show where a hand crop lands in the backbone feature map.
    EnhanceDemo(EnhanceArgs),
    /// Hand localisation F1 at several distance thresholds.
    HandEval(HandEvalArgs),
    /// Corrupt a ground-truth timeline and write predictions and logits.
    Synth(SynthArgs),
    /// Generate a synthetic ground-truth timeline.
    Gen(GenArgs),
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a human-readable table instead of JSON on stdout.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// CSV `start,end,label_id`, end exclusive.
    #[arg(long)]
    segments: PathBuf,
    #[arg(long, default_value_t = 15.0)]
    fps: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RunArgs {
    /// Logits file, binary (`ATSL` header) or CSV.
    #[arg(long, required_unless_present = "predictions", conflicts_with = "predictions")]
    logits: Option<PathBuf>,
    /// Per-frame predicted labels, CSV `frame,label_id`; each clip takes the
    /// label of its middle frame.
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Ground-truth timeline for evaluation.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Class statistics JSON; required unless --no-clean.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// `key=value` configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    fps: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    consensus: Option<ConsensusArg>,
    #[arg(long)]
    no_clean: bool,
    /// Score background segments as well.
    #[arg(long)]
    include_background: bool,
    /// Directory for raw.csv, cleaned.csv and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConsensusArg {
    Logits,
    Softmax,
}

#[derive(Args)]
struct SweepArgs {
    /// Raw (uncleaned) timelines, paired in order with --gt.
    #[arg(long, num_args = 1.., required = true)]
    raw: Vec<PathBuf>,
    #[arg(long, num_args = 1.., required = true)]
    gt: Vec<PathBuf>,
    #[arg(long)]
    stats: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    include_background: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EnhanceArgs {
    /// `key=value` geometry file.
    #[arg(long)]
    geometry: PathBuf,
    /// Backbone feature map side, in cells.
    #[arg(long, default_value_t = 56)]
    backbone: usize,
    /// Hand feature map side, in cells.
    #[arg(long, default_value_t = 14)]
    hand: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct HandEvalArgs {
    /// CSV `frame,p1,x1,y1,p2,x2,y2`.
    #[arg(long)]
    pred: PathBuf,
    /// Same layout, presence 0 or 1.
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.15,0.2,0.25,0.3")]
    thresholds: Vec<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    gt: PathBuf,
    /// Directory for predictions.csv and the logits file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    substitution_prob: f64,
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Expected spikes per 1000 frames.
    #[arg(long, default_value_t = 0.0)]
    spike_rate: f64,
    #[arg(long, default_value_t = 3)]
    spike_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = LogitsFormat::Bin)]
    format: LogitsFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LogitsFormat {
    Bin,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    /// Directory for gt.csv and gt_segments.csv.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 9000)]
    frames: usize,
    /// Background frames at the start.
    #[arg(long, default_value_t = 120)]
    lead: usize,
    /// Segment length spread relative to the class mean.
    #[arg(long, default_value_t = 0.5)]
    cv: f64,
    #[arg(long, default_value_t = 15.0)]
    fps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn read_timeline(path: &Path) -> Result<Timeline> {
    let t = formats::read_timeline(open(path)?).with_context(|| path.display().to_string())?;
    if let Some((frame, c)) = t.invalid_label(NUM_CLASSES) {
        anyhow::bail!(
            "{}: frame {frame} has label {c}, outside 0..{NUM_CLASSES}",
            path.display()
        );
    }
    Ok(t)
}

fn read_stats(path: &Path) -> Result<Vec<ClassStats>> {
    formats::read_stats(open(path)?).with_context(|| path.display().to_string())
}

fn read_logits(path: &Path) -> Result<LogitsBackend> {
    let bytes = fs::read(path).with_context(|| format!("cannot open {}", path.display()))?;
    let b = if bytes.starts_with(LOGITS_MAGIC) {
        LogitsBackend::read_bin(&bytes[..])
    } else {
        LogitsBackend::read_csv(&bytes[..])
    }
    .with_context(|| path.display().to_string())?;
    if b.num_classes() != NUM_CLASSES {
        anyhow::bail!(
            "{}: {} classes, expected {NUM_CLASSES}",
            path.display(),
            b.num_classes()
        );
    }
    Ok(b)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn say(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => {
            let mut w = create(p)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => say(&format!("{}\n", serde_json::to_string_pretty(value)?))?,
    }
    Ok(())
}

/// JSON to `--out` or stdout; with `--pretty` the table goes to stdout.
fn emit<T: Serialize>(value: &T, table: impl FnOnce() -> String, output: &Output) -> Result<()> {
    if output.pretty {
        say(&table())?;
        if let Some(p) = &output.out {
            write_json(value, Some(p))?;
        }
        Ok(())
    } else {
        write_json(value, output.out.as_deref())
    }
}

fn cmd_stats(a: &StatsArgs) -> Result<()> {
    if !(a.fps > 0.0) {
        return Err(usage(format!("--fps must be > 0, got {}", a.fps)));
    }
    let segs = formats::read_segments(open(&a.segments)?).with_context(|| a.segments.display().to_string())?;
    let stats = compute_class_stats(&segs).with_context(|| a.segments.display().to_string())?;
    emit(
        &stats,
        || {
            let mut s = format!(
                "{:>5} {:<40} {:>6} {:>10} {:>10}\n",
                "class", "name", "count", "mean (s)", "std (s)"
            );
            for c in &stats {
                s += &format!(
                    "{:>5} {:<40} {:>6} {:>10.2} {:>10.2}\n",
                    c.class_id,
                    c.name,
                    c.count,
                    c.mean_frames / a.fps,
                    c.std_frames / a.fps
                );
            }
            s
        },
        &a.output,
    )
}

#[derive(Serialize)]
struct RunReport {
    frames: usize,
    t: usize,
    tau: usize,
    fps: f64,
    kappa: Option<f64>,
    ignore_background: bool,
    raw_segments: usize,
    cleaned_segments: usize,
    raw: Option<EvalReport>,
    cleaned: Option<EvalReport>,
}

fn resolve_run_config(a: &RunArgs) -> Result<RunConfig> {
    if a.no_clean && a.kappa.is_some() {
        return Err(usage("--kappa has no effect with --no-clean"));
    }
    if a.predictions.is_some() && a.consensus.is_some() {
        return Err(usage("--consensus applies to --logits only"));
    }
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot open {}", p.display()))?;
            RunConfig::parse(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    cfg.t = a.t.unwrap_or(cfg.t);
    cfg.tau = a.tau.unwrap_or(cfg.tau);
    cfg.fps = a.fps.unwrap_or(cfg.fps);
    cfg.kappa = a.kappa.unwrap_or(cfg.kappa);
    if a.no_clean {
        cfg.clean = false;
    }
    if a.include_background {
        cfg.ignore_background = false;
    }
    if let Some(c) = a.consensus {
        cfg.softmax = matches!(c, ConsensusArg::Softmax);
    }
    cfg.validate()?;
    if cfg.clean && a.stats.is_none() {
        return Err(usage("cleaning needs --stats (or pass --no-clean)"));
    }
    Ok(cfg)
}

fn eval_config(ignore_background: bool) -> EvalConfig {
    EvalConfig {
        ignore_background,
        ..EvalConfig::default()
    }
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let cfg = resolve_run_config(a)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }

    let cleaner = match (&a.stats, cfg.clean) {
        (Some(p), true) => Some(CleanerConfig::new(cfg.kappa, read_stats(p)?, cfg.fps)),
        _ => None,
    };
    let pipeline = PipelineConfig::new(cfg.t, cfg.tau, cfg.fps, cleaner).map_err(|e| usage(e.to_string()))?;
    let gt = a.gt.as_deref().map(read_timeline).transpose()?;

    let seg: Segmentation = if let Some(p) = &a.logits {
        let consensus = if cfg.softmax {
            Consensus::Softmax
        } else {
            Consensus::Logits
        };
        let b = read_logits(p)?.with_consensus(consensus);
        check_len(&gt, b.len(), p)?;
        run_offline(&pipeline, &b, b.len())?
    } else {
        let p = a.predictions.as_deref().expect("clap enforces one input");
        let t = read_timeline(p)?;
        check_len(&gt, t.len(), p)?;
        let n = t.len();
        run_offline(&pipeline, &OracleBackend::new(t, NUM_CLASSES), n)?
    };

    let eval = eval_config(cfg.ignore_background);
    let (raw, cleaned) = match &gt {
        Some(g) => (
            Some(evaluate(&seg.raw, g, &eval)?),
            Some(evaluate(&seg.cleaned, g, &eval)?),
        ),
        None => (None, None),
    };
    let report = RunReport {
        frames: seg.raw.len(),
        t: cfg.t,
        tau: cfg.tau,
        fps: cfg.fps,
        kappa: cfg.clean.then_some(cfg.kappa),
        ignore_background: cfg.ignore_background,
        raw_segments: seg.raw.segments().len(),
        cleaned_segments: seg.cleaned.segments().len(),
        raw,
        cleaned,
    };

    if let Some(dir) = &a.out {
        for (name, t) in [("raw.csv", &seg.raw), ("cleaned.csv", &seg.cleaned)] {
            let path = dir.join(name);
            let mut w = create(&path)?;
            formats::write_timeline(&mut w, t)?;
            w.flush()?;
        }
        write_json(&report, Some(&dir.join("report.json")))?;
    }
    if a.pretty {
        say(&run_table(&report))?;
    } else if a.out.is_none() {
        write_json(&report, None)?;
    }
    Ok(())
}

fn check_len(gt: &Option<Timeline>, n: usize, input: &Path) -> Result<()> {
    match gt {
        Some(g) if g.len() != n => anyhow::bail!(
            "{} covers {n} frames but the ground truth has {}",
            input.display(),
            g.len()
        ),
        _ => Ok(()),
    }
}

fn run_table(r: &RunReport) -> String {
    let mut s = format!(
        "frames {}  T={} tau={}  kappa {}  segments raw {} cleaned {}\n",
        r.frames,
        r.t,
        r.tau,
        r.kappa.map_or("off".to_string(), |k| k.to_string()),
        r.raw_segments,
        r.cleaned_segments
    );
    if let (Some(raw), Some(cleaned)) = (&r.raw, &r.cleaned) {
        let keys: Vec<&String> = raw.f1.keys().collect();
        s += &format!("{:<8} {:>7} {:>7}", "", "Acc", "Edit");
        for k in &keys {
            s += &format!(" {:>7}", format!("F1@{k}"));
        }
        s += "\n";
        for (name, e) in [("raw", raw), ("cleaned", cleaned)] {
            s += &format!("{name:<8} {:>7.2} {:>7.2}", e.acc, e.edit);
            for k in &keys {
                s += &format!(" {:>7.2}", e.f1[*k]);
            }
            s += "\n";
        }
    }
    s
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    if a.raw.len() != a.gt.len() {
        return Err(usage(format!(
            "{} --raw files but {} --gt files",
            a.raw.len(),
            a.gt.len()
        )));
    }
    let cfg = match &a.config {
        Some(p) => RunConfig::parse(&fs::read_to_string(p).with_context(|| format!("cannot open {}", p.display()))?)
            .map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => RunConfig::default(),
    };
    cfg.validate()?;
    let ignore_background = cfg.ignore_background && !a.include_background;
    let raw = a.raw.iter().map(|p| read_timeline(p)).collect::<Result<Vec<_>>>()?;
    let gt = a.gt.iter().map(|p| read_timeline(p)).collect::<Result<Vec<_>>>()?;
    for ((r, g), p) in raw.iter().zip(&gt).zip(&a.raw) {
        check_len(&Some(g.clone()), r.len(), p)?;
    }
    let base = CleanerConfig::new(cfg.kappa, read_stats(&a.stats)?, cfg.fps);
    let result = sweep_kappa(&raw, &gt, &base, &eval_config(ignore_background))?;
    emit(
        &result,
        || {
            let mut s = String::from("kappa  F1@0.5\n");
            for k in &result.scores {
                let mark = if k.kappa == result.best_kappa { "  <- best" } else { "" };
                s += &format!("{:>5.1}  {:>6.2}{mark}\n", k.kappa, k.f1);
            }
            s
        },
        &a.output,
    )
}

#[derive(Serialize)]
struct EnhanceReport {
    norm_w: f64,
    norm_h: f64,
    norm_x: f64,
    norm_y: f64,
    footprint_rows: usize,
    footprint_cols: usize,
    row: i64,
    col: i64,
    backbone: usize,
    visible_cells: usize,
    mask: Vec<String>,
}

fn cmd_enhance(a: &EnhanceArgs) -> Result<()> {
    if a.backbone == 0 || a.hand == 0 {
        return Err(usage("--backbone and --hand must be >= 1"));
    }
    let text = fs::read_to_string(&a.geometry).with_context(|| format!("cannot open {}", a.geometry.display()))?;
    let g = parse_geometry(&text).with_context(|| a.geometry.display().to_string())?;
    let al = g.align()?;
    let fp = g.footprint(a.backbone, a.backbone)?;
    let ones = FeatureMap::filled(Dims::new(1, 1, a.hand, a.hand), 1.0)?;
    let placed = place_hand_features(&ones, &g, a.backbone, a.backbone)?;
    let mask: Vec<String> = (0..a.backbone)
        .map(|i| {
            (0..a.backbone)
                .map(|j| if placed.get(0, 0, i, j) > 0.0 { '#' } else { '.' })
                .collect()
        })
        .collect();
    let report = EnhanceReport {
        norm_w: al.norm_w,
        norm_h: al.norm_h,
        norm_x: al.norm_x,
        norm_y: al.norm_y,
        footprint_rows: fp.rows,
        footprint_cols: fp.cols,
        row: fp.row,
        col: fp.col,
        backbone: a.backbone,
        visible_cells: placed.sum() as usize,
        mask,
    };
    emit(
        &report,
        || {
            let mut s = format!(
                "normalised size {:.4} x {:.4}, offset ({:.4}, {:.4})\nfootprint {}x{} at row {}, col {} ({} cells visible)\n",
                report.norm_w,
                report.norm_h,
                report.norm_x,
                report.norm_y,
                report.footprint_rows,
                report.footprint_cols,
                report.row,
                report.col,
                report.visible_cells
            );
            for line in &report.mask {
                s += line;
                s.push('\n');
            }
            s
        },
        &a.output,
    )
}

#[derive(Serialize)]
struct HandRow {
    t_l: f64,
    f1: f64,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
}

fn cmd_hand_eval(a: &HandEvalArgs) -> Result<()> {
    if let Some(t) = a.thresholds.iter().find(|t| !(**t > 0.0)) {
        return Err(usage(format!("thresholds must be > 0, got {t}")));
    }
    let pred = read_hand_rows(open(&a.pred)?).with_context(|| a.pred.display().to_string())?;
    let gt = read_hand_rows(open(&a.gt)?).with_context(|| a.gt.display().to_string())?;
    let pf: Vec<usize> = pred.iter().map(|r| r.frame).collect();
    let gf: Vec<usize> = gt.iter().map(|r| r.frame).collect();
    if pf != gf {
        anyhow::bail!(
            "{} and {} do not list the same frames in the same order",
            a.pred.display(),
            a.gt.display()
        );
    }
    let preds = hand_predictions(&pred);
    let targets = hand_targets(&gt).with_context(|| a.gt.display().to_string())?;
    let rows = a
        .thresholds
        .iter()
        .map(|&t_l| {
            let c = hand_counts(&preds, &targets, t_l)?;
            Ok(HandRow {
                t_l,
                f1: c.f1(),
                tp: c.tp,
                fp: c.fp,
                fn_: c.fn_,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(
        &rows,
        || {
            let mut s = String::from("  T_L      F1    TP    FP    FN\n");
            for r in &rows {
                s += &format!("{:>5.2} {:>7.2} {:>5} {:>5} {:>5}\n", r.t_l, r.f1, r.tp, r.fp, r.fn_);
            }
            s
        },
        &a.output,
    )
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let nm = NoiseModel {
        substitution_prob: a.substitution_prob,
        boundary_jitter_std: a.jitter,
        spike_rate: a.spike_rate,
        spike_len: a.spike_len,
        seed: a.seed,
    };
    nm.validate().map_err(|e| usage(e.to_string()))?;
    let gt = read_timeline(&a.gt)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let noisy = synth_timeline(&gt, &nm, NUM_CLASSES)?;
    let mut w = create(&a.out.join("predictions.csv"))?;
    formats::write_timeline(&mut w, &noisy)?;
    w.flush()?;
    let logits = LogitsBackend::one_hot(&noisy, NUM_CLASSES);
    let (name, mut w) = match a.format {
        LogitsFormat::Bin => ("logits.bin", create(&a.out.join("logits.bin"))?),
        LogitsFormat::Csv => ("logits.csv", create(&a.out.join("logits.csv"))?),
    };
    match a.format {
        LogitsFormat::Bin => logits.write_bin(&mut w)?,
        LogitsFormat::Csv => logits.write_csv(&mut w)?,
    }
    w.flush()?;
    let changed = noisy.labels().iter().zip(gt.labels()).filter(|(x, y)| x != y).count();
    write_json(
        &serde_json::json!({
            "frames": gt.len(),
            "changed_frames": changed,
            "predictions": a.out.join("predictions.csv"),
            "logits": a.out.join(name),
        }),
        None,
    )
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    if !(a.fps > 0.0) || !(a.cv >= 0.0) {
        return Err(usage("--fps must be > 0 and --cv >= 0"));
    }
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let stats = reference_stats(a.fps, a.cv);
    let gt = sample_ground_truth(&stats, ClassId::BACKGROUND, a.frames, a.lead, a.seed);
    let mut w = create(&a.out.join("gt.csv"))?;
    formats::write_timeline(&mut w, &gt)?;
    w.flush()?;
    let mut w = create(&a.out.join("gt_segments.csv"))?;
    formats::write_segments(&mut w, &gt.segments())?;
    w.flush()?;
    write_json(
        &serde_json::json!({ "frames": gt.len(), "segments": gt.segments().len() }),
        None,
    )
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Run(a) => cmd_run(a),
        Command::SweepKappa(a) => cmd_sweep(a),
        Command::EnhanceDemo(a) => cmd_enhance(a),
        Command::HandEval(a) => cmd_hand_eval(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Gen(a) => cmd_gen(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
