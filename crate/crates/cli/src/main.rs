//! `cascade-dtw`: classify message cascades by their propagation structure.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 internal
//! invariant violation.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cascade_core::{
    build_traces, classify_evidential, classify_probabilistic, dataset_stats, generate,
    read_networks, resolve_gamma, write_networks, ClassProfile, ClassifierSpec, CombinationRule,
    DtwConfig, Error, EvalOptions, EvalReport, Evaluator, EvidentialParams, FollowWeightMode,
    GammaMode, IngestConfig, InteractionLog, LabeledCorpus, PropagationNetwork, Result,
    DEFAULT_DIPATH_CAP,
};

#[derive(Parser)]
#[command(
    name = "cascade-dtw",
    version,
    about = "Classify message-propagation networks with a DTW-based network distance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct labeled propagation networks from an interaction event log
    Ingest {
        /// Event log (JSON Lines)
        #[arg(long)]
        log: PathBuf,
        /// Class labels to extract, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<String>,
        /// Output network file (JSON Lines)
        #[arg(long)]
        out: PathBuf,
        /// Follow-weight formula
        #[arg(long, value_enum, default_value_t = WfModeArg::Reciprocal)]
        wf_mode: WfModeArg,
        /// Keep only the nearest earlier propagator per node
        #[arg(long)]
        tree_mode: bool,
    },
    /// Generate a labeled synthetic corpus from class profiles
    Generate {
        /// Class profile file (JSON array)
        #[arg(long)]
        profiles: PathBuf,
        /// Networks per class
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output network file (JSON Lines)
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify query networks against a training corpus
    Classify {
        /// Training networks (JSON Lines, labeled)
        #[arg(long)]
        train: PathBuf,
        /// Query networks (JSON Lines)
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        classifier: ClassifierArgs,
        /// Include per-neighbor distances and fused masses in the output
        #[arg(long)]
        explain: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Repeated-holdout evaluation on a labeled corpus
    Evaluate {
        /// Labeled networks (JSON Lines)
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        classifier: ClassifierArgs,
        /// Training fraction of each split
        #[arg(long, default_value_t = 0.9)]
        split: f64,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Split each class separately
        #[arg(long)]
        stratified: bool,
        /// Abort on the first classification error instead of counting it
        #[arg(long)]
        strict: bool,
        /// Also write the JSON report to this path
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate several k values over identical splits
    SweepK {
        #[arg(long)]
        data: PathBuf,
        /// k values, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        k_values: Vec<usize>,
        #[command(flatten)]
        classifier: ClassifierArgs,
        #[arg(long, default_value_t = 0.9)]
        split: f64,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        stratified: bool,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct ClassifierArgs {
    /// Decision rule family
    #[arg(long, value_enum)]
    classifier: ClassifierKind,
    /// Evidential: base certainty of a zero-distance neighbor
    #[arg(long, default_value_t = 0.95)]
    alpha0: f64,
    /// Evidential: distance exponent
    #[arg(long, default_value_t = 1)]
    beta: u32,
    /// Evidential: attenuation coefficient, `auto` or a positive number
    #[arg(long, default_value = "auto", value_parser = parse_gamma)]
    gamma: GammaArg,
    /// Evidential: mass combination rule
    #[arg(long, value_enum, default_value_t = RuleArg::Dempster)]
    rule: RuleArg,
    /// Use the symmetrized network distance
    #[arg(long)]
    symmetrize: bool,
    /// Refuse networks with more root-to-leaf paths than this
    #[arg(long, default_value_t = DEFAULT_DIPATH_CAP)]
    dipath_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ClassifierKind {
    Prob,
    Evid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Dempster,
    Conjunctive,
    Disjunctive,
}

impl From<RuleArg> for CombinationRule {
    fn from(rule: RuleArg) -> Self {
        match rule {
            RuleArg::Dempster => CombinationRule::Dempster,
            RuleArg::Conjunctive => CombinationRule::Conjunctive,
            RuleArg::Disjunctive => CombinationRule::Disjunctive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum GammaArg {
    Auto,
    Fixed(f64),
}

fn parse_gamma(s: &str) -> std::result::Result<GammaArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(GammaArg::Auto);
    }
    s.parse::<f64>()
        .map(GammaArg::Fixed)
        .map_err(|_| format!("expected `auto` or a number, got `{s}`"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WfModeArg {
    Reciprocal,
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

impl ClassifierArgs {
    fn dtw_config(&self) -> DtwConfig {
        DtwConfig {
            symmetrize: self.symmetrize,
            dipath_cap: self.dipath_cap,
            ..DtwConfig::default()
        }
    }

    fn evidential_params(&self) -> EvidentialParams {
        EvidentialParams {
            alpha0: self.alpha0,
            beta: self.beta,
            gamma: match self.gamma {
                GammaArg::Auto => GammaMode::Auto,
                GammaArg::Fixed(g) => GammaMode::Global(g),
            },
        }
    }

    fn spec(&self) -> ClassifierSpec {
        match self.classifier {
            ClassifierKind::Prob => ClassifierSpec::Probabilistic,
            ClassifierKind::Evid => ClassifierSpec::Evidential {
                params: self.evidential_params(),
                rule: self.rule.into(),
            },
        }
    }
}

fn main() {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::InvalidNetwork(_)
        | Error::DipathCapExceeded { .. }
        | Error::Data(_) => 2,
        Error::Domain(_) | Error::EmptySequence | Error::NaiveLengthGuard { .. } => 1,
        Error::FrameMismatch(_) | Error::TotalConflict => 3,
    }
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))
}

fn create_output(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Data(format!("cannot create {}: {e}", path.display())))
}

fn load_networks(path: &Path) -> Result<Vec<PropagationNetwork>> {
    read_networks(open_input(path)?)
}

fn load_corpus(path: &Path) -> Result<LabeledCorpus> {
    LabeledCorpus::new(load_networks(path)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            log,
            labels,
            out,
            wf_mode,
            tree_mode,
        } => cmd_ingest(&log, &labels, &out, wf_mode, tree_mode),
        Command::Generate {
            profiles,
            n,
            seed,
            out,
        } => cmd_generate(&profiles, n, seed, &out),
        Command::Classify {
            train,
            query,
            k,
            classifier,
            explain,
            format,
        } => cmd_classify(&train, &query, k, &classifier, explain, format),
        Command::Evaluate {
            data,
            k,
            classifier,
            split,
            repeats,
            seed,
            stratified,
            strict,
            report,
            format,
        } => {
            let opts = EvalOptions {
                train_fraction: split,
                repeats,
                seed,
                stratified,
                strict,
            };
            cmd_evaluate(&data, k, &classifier, &opts, report.as_deref(), format)
        }
        Command::SweepK {
            data,
            k_values,
            classifier,
            split,
            repeats,
            seed,
            stratified,
            strict,
            report,
            format,
        } => {
            let opts = EvalOptions {
                train_fraction: split,
                repeats,
                seed,
                stratified,
                strict,
            };
            cmd_sweep(&data, &k_values, &classifier, &opts, report.as_deref(), format)
        }
    }
}

fn cmd_ingest(
    log_path: &Path,
    labels: &[String],
    out: &Path,
    wf_mode: WfModeArg,
    tree_mode: bool,
) -> Result<()> {
    let log = InteractionLog::parse_jsonl(open_input(log_path)?)?;
    let cfg = IngestConfig {
        follow_weight: match wf_mode {
            WfModeArg::Reciprocal => FollowWeightMode::Reciprocal,
            WfModeArg::Literal => FollowWeightMode::Literal,
        },
        tree_mode,
    };
    let mut networks = Vec::new();
    let mut seen = Vec::new();
    for label in labels {
        if seen.contains(&label) {
            continue;
        }
        seen.push(label);
        networks.extend(build_traces(&log, label, &cfg)?);
    }
    let mut writer = create_output(out)?;
    write_networks(&mut writer, &networks)?;
    writer.flush()?;
    print!("{}", dataset_stats(&networks));
    println!("wrote {} networks to {}", networks.len(), out.display());
    Ok(())
}

fn cmd_generate(profiles_path: &Path, n: usize, seed: u64, out: &Path) -> Result<()> {
    let profiles: Vec<ClassProfile> = serde_json::from_reader(open_input(profiles_path)?)
        .map_err(|e| Error::Data(format!("bad profile file {}: {e}", profiles_path.display())))?;
    let corpus = generate(&profiles, n, seed)?;
    let mut writer = create_output(out)?;
    write_networks(&mut writer, corpus.networks())?;
    writer.flush()?;
    println!(
        "wrote {} networks ({} classes x {n}) to {}",
        corpus.len(),
        profiles.len(),
        out.display()
    );
    Ok(())
}

/// One output line per classified query.
#[derive(Serialize)]
struct ClassifyRecord {
    query: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<String>,
    predicted: String,
    scores: BTreeMap<String, f64>,
    tie_broken: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    neighbors: Option<Vec<NeighborOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    combined_mass: Option<Vec<cascade_core::MassRecord>>,
}

#[derive(Serialize)]
struct NeighborOut {
    rank: usize,
    train_index: usize,
    label: String,
    distance: f64,
}

fn cmd_classify(
    train: &Path,
    query: &Path,
    k: usize,
    args: &ClassifierArgs,
    explain: bool,
    format: Format,
) -> Result<()> {
    let corpus = load_corpus(train)?;
    let queries = load_networks(query)?;
    let cfg = args.dtw_config();

    // Resolve auto-gamma once against the training corpus rather than per
    // query.
    let evid = match args.classifier {
        ClassifierKind::Prob => None,
        ClassifierKind::Evid => {
            let params = args.evidential_params();
            let gamma = resolve_gamma(&params, &corpus, &cfg)?;
            let resolved = EvidentialParams {
                gamma: GammaMode::PerClass(gamma),
                ..params
            };
            Some((resolved, CombinationRule::from(args.rule)))
        }
    };

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for (i, q) in queries.iter().enumerate() {
        let result = match &evid {
            None => classify_probabilistic(q, &corpus, k, &cfg)?,
            Some((params, rule)) => classify_evidential(q, &corpus, k, &cfg, params, *rule)?,
        };
        let record = ClassifyRecord {
            query: i,
            truth: q.label().map(String::from),
            predicted: result.predicted.clone(),
            scores: result.scores.clone(),
            tie_broken: result.tie_broken,
            neighbors: explain.then(|| {
                result
                    .neighbors
                    .iter()
                    .enumerate()
                    .map(|(r, n)| NeighborOut {
                        rank: r + 1,
                        train_index: n.train_index,
                        label: n.label.clone(),
                        distance: n.distance,
                    })
                    .collect()
            }),
            combined_mass: if explain { result.combined_mass.clone() } else { None },
        };
        match format {
            Format::Json => {
                serde_json::to_writer(&mut out, &record)
                    .map_err(|e| Error::Data(format!("serialize result: {e}")))?;
                writeln!(out)?;
            }
            Format::Table => {
                let score = result.scores.get(&result.predicted).copied().unwrap_or(0.0);
                write!(out, "query {i}: predicted={} score={score:.4}", result.predicted)?;
                if let Some(truth) = q.label() {
                    write!(out, " truth={truth}")?;
                }
                if result.tie_broken {
                    write!(out, " [tie broken]")?;
                }
                writeln!(out)?;
                if explain {
                    for (r, n) in result.neighbors.iter().enumerate() {
                        writeln!(
                            out,
                            "  neighbor {:>2}: train[{}] label={} distance={}",
                            r + 1,
                            n.train_index,
                            n.label,
                            n.distance
                        )?;
                    }
                    if let Some(mass) = &result.combined_mass {
                        for rec in mass {
                            writeln!(out, "  mass {{{}}} = {:.6}", rec.focal.join(","), rec.mass)?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn report_table(reports: &[EvalReport]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<12} {:>4} {:>10} {:>9} {:>10} {:>8}\n",
        "classifier", "k", "accuracy", "ci95", "decisions", "repeats"
    ));
    for r in reports {
        s.push_str(&format!(
            "{:<12} {:>4} {:>9.2}% {:>8.2}% {:>10} {:>8}\n",
            r.classifier,
            r.k,
            r.accuracy * 100.0,
            r.ci_halfwidth * 100.0,
            r.n_decisions,
            r.repeats
        ));
    }
    s
}

fn write_report_json<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    let mut writer = create_output(path)?;
    serde_json::to_writer_pretty(&mut writer, report)
        .map_err(|e| Error::Data(format!("serialize report: {e}")))?;
    writer.flush()?;
    Ok(())
}

fn cmd_evaluate(
    data: &Path,
    k: usize,
    args: &ClassifierArgs,
    opts: &EvalOptions,
    report_path: Option<&Path>,
    format: Format,
) -> Result<()> {
    let corpus = load_corpus(data)?;
    let evaluator = Evaluator::new(&corpus, &args.dtw_config())?;
    let report = evaluator.evaluate(&args.spec(), k, opts)?;
    if let Some(path) = report_path {
        write_report_json(&report, path)?;
    }
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Data(format!("serialize report: {e}")))?
        ),
        Format::Table => {
            print!("{}", report_table(std::slice::from_ref(&report)));
            println!();
            print!("{}", report.confusion);
        }
    }
    Ok(())
}

fn cmd_sweep(
    data: &Path,
    k_values: &[usize],
    args: &ClassifierArgs,
    opts: &EvalOptions,
    report_path: Option<&Path>,
    format: Format,
) -> Result<()> {
    let corpus = load_corpus(data)?;
    let evaluator = Evaluator::new(&corpus, &args.dtw_config())?;
    let reports = evaluator.sweep_k(&args.spec(), k_values, opts)?;
    if let Some(path) = report_path {
        write_report_json(&reports, path)?;
    }
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&reports)
                .map_err(|e| Error::Data(format!("serialize report: {e}")))?
        ),
        Format::Table => print!("{}", report_table(&reports)),
    }
    Ok(())
}
