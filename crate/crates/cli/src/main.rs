use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use efs_core::bench::{bench, load_corpus, render_table};
use efs_core::format::{read_header, read_signals, write_signals};
use efs_core::partition::{detect_local_minima, merge_to_target, partition_from_minima};
use efs_core::{
    gen_synthetic, select_anchors, select_report, temporal_similarity, EfsConfig, EfsError, FillPolicy, SignalSetF64,
    Strategy, SyntheticSpec,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "efs", version, about = "Event-anchored keyframe selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select keyframes from a signals file and write a JSON report.
    Select {
        #[arg(long)]
        signals: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long, value_enum, default_value_t = StrategyArg::Efs)]
        strategy: StrategyArg,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the event partition of a signals file as JSON.
    Partition {
        #[arg(long)]
        signals: PathBuf,
        #[arg(long, default_value_t = EfsConfig::DEFAULT_M)]
        m: usize,
        #[arg(long, default_value_t = EfsConfig::DEFAULT_WINDOW)]
        window: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic signals with known events from a JSON spec.
    GenSynthetic {
        #[arg(long)]
        spec: PathBuf,
        /// Output file, or output directory when --count is given.
        #[arg(long)]
        out: PathBuf,
        /// Write this many files with seeds seed, seed+1, ...
        #[arg(long)]
        count: Option<u64>,
    },
    /// Compare strategies on a directory of synthetic signals files.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        budgets: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "efs,uniform,topk,mmr,fixed")]
        strategies: Vec<StrategyArg>,
        #[command(flatten)]
        tuning: Tuning,
        /// Leave wall-clock timings out of the JSON so output is reproducible.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a signals file header.
    Inspect { file: PathBuf },
}

#[derive(Args)]
struct Tuning {
    #[arg(long, default_value_t = EfsConfig::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = EfsConfig::DEFAULT_M)]
    m: usize,
    #[arg(long, default_value_t = EfsConfig::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = EfsConfig::DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = EfsConfig::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, default_value_t = EfsConfig::DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = EfsConfig::DEFAULT_TAU)]
    tau: f64,
    #[arg(long, value_enum, default_value_t = FillArg::Fill)]
    fill: FillArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Tuning {
    fn config(&self) -> EfsConfig {
        EfsConfig {
            k: self.k,
            m_target: self.m,
            window: self.window,
            alpha: self.alpha,
            delta: self.delta,
            fill_policy: match self.fill {
                FillArg::Fill => FillPolicy::FillByRelevance,
                FillArg::Underfill => FillPolicy::AllowUnderfill,
            },
            lambda: self.lambda,
            tau: self.tau,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FillArg {
    Fill,
    Underfill,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Efs,
    Uniform,
    Topk,
    Mmr,
    Fixed,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Efs => Strategy::Efs,
            StrategyArg::Uniform => Strategy::Uniform,
            StrategyArg::Topk => Strategy::Topk,
            StrategyArg::Mmr => Strategy::Mmr,
            StrategyArg::Fixed => Strategy::Fixed,
        }
    }
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl From<EfsError> for Failure {
    fn from(e: EfsError) -> Self {
        Failure { kind: e.kind(), message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { kind: "Json", message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        EfsError::Io(e).into()
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load(path: &Path) -> Result<SignalSetF64, Failure> {
    Ok(read_signals::<f64>(path)?.0)
}

#[derive(Serialize)]
struct PartitionOutput {
    n_frames: usize,
    window: usize,
    m_target: usize,
    minima: Vec<usize>,
    initial_events: usize,
    events: Vec<[usize; 2]>,
    anchors: Vec<usize>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Select { signals, tuning, strategy, out } => {
            let s = load(&signals)?;
            let report = select_report(&s, strategy.into(), &tuning.config())?;
            emit_json(&report, out.as_deref())
        }
        Command::Partition { signals, m, window, out } => {
            let s = load(&signals)?;
            let curve = temporal_similarity(&s, window)?;
            let minima = detect_local_minima(&curve);
            let initial = partition_from_minima(&minima, s.frame_count())?;
            let merged = merge_to_target(&initial, &s, m)?;
            let anchors = select_anchors(&merged, s.relevance())?;
            let output = PartitionOutput {
                n_frames: s.frame_count(),
                window,
                m_target: m,
                minima,
                initial_events: initial.len(),
                events: merged.segments().iter().map(|r| [r.start, r.end]).collect(),
                anchors,
            };
            emit_json(&output, out.as_deref())
        }
        Command::GenSynthetic { spec, out, count } => {
            let spec: SyntheticSpec = serde_json::from_str(&fs::read_to_string(&spec)?)?;
            match count {
                None => {
                    let (s, _) = gen_synthetic::<f32>(&spec)?;
                    write_signals(&s, &out)?;
                }
                Some(count) => {
                    fs::create_dir_all(&out)?;
                    for i in 0..count {
                        let item = SyntheticSpec { seed: spec.seed + i, ..spec.clone() };
                        let (s, _) = gen_synthetic::<f32>(&item)?;
                        write_signals(&s, out.join(format!("synthetic_{:06}.efss", item.seed)))?;
                    }
                }
            }
            Ok(())
        }
        Command::Bench { corpus, budgets, strategies, tuning, no_timing, out } => {
            let (items, reading) = load_corpus::<f64>(&corpus)?;
            let strategies: Vec<Strategy> = strategies.into_iter().map(Strategy::from).collect();
            let start = Instant::now();
            let mut result = bench(&items, &strategies, &budgets, &tuning.config())?;
            let elapsed = start.elapsed();
            if let Some(t) = result.timing.as_mut() {
                t.reading_ms = reading.as_secs_f64() * 1e3 / items.len() as f64;
            }
            print!("{}", render_table(&result));
            if no_timing {
                result.timing = None;
            } else {
                eprintln!("bench wall clock {:.3}s", elapsed.as_secs_f64());
            }
            match out {
                Some(path) => emit_json(&result, Some(&path)),
                None => Ok(()),
            }
        }
        Command::Inspect { file } => {
            let h = read_header(&file)?;
            println!("file:        {}", file.display());
            println!("version:     {}", h.version);
            println!("frames:      {}", h.frame_count);
            println!("dim:         {}", h.dim);
            println!("fps:         {}", h.fps);
            println!("duration:    {:.3}s", h.frame_count as f64 / h.fps as f64);
            println!("flags:       {:#x} (pre-normalized: {})", h.flags, h.flags & 1 == 1);
            println!("payload:     {} bytes", h.payload_len());
            println!("metadata:    {}", serde_json::to_string_pretty(&h.metadata)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = serde_json::json!({ "error": "Usage", "message": e.to_string().trim() });
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let err = serde_json::json!({ "error": f.kind, "message": f.message });
            eprintln!("{err}");
            ExitCode::FAILURE
        }
    }
}
