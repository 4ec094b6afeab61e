//! `lnb`: corpus intake, sequential learning, classification, and the
//! three evaluation protocols behind one binary.
//!
//! Every failure is one machine-parseable line on stderr in the form
//! `error[usage|data|internal]: <message>` with exit code 2, 3, or 4
//! respectively. Success prints either the requested output (classify) or
//! a short summary, and exits 0.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand};

use lnb_core::eval::{
    write_new_task_csvs, write_prev_task_csvs, write_task_effect_csvs, EvalReport, SystemId,
    SYSTEMS,
};
use lnb_core::{
    build_lnb_model, featurize, generate_synthetic, load_dir, load_sequences, mine_knowledge,
    parse_record, run_new_task_eval, run_prev_task_eval, run_task_effect, write_reviews, Document,
    ExperimentConfig, KnowledgeBase, Metric, NBModel, PastSplit, Polarity, RawReview,
    SyntheticSpec,
};

// ---------------------------------------------------------------------------
// Failure classification

/// A terminal failure, already assigned to an exit class.
enum Failure {
    /// Bad invocation: unknown flags, out-of-range knobs. Exit 2.
    Usage(String),
    /// Bad input data: unreadable or malformed corpora, KB conflicts. Exit 3.
    Data(String),
    /// The tool itself could not complete: output writes failed. Exit 4.
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Internal(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Data(m) => ("data", m),
            Failure::Internal(m) => ("internal", m),
        };
        // Single-line guarantee, whatever the message's source.
        write!(f, "error[{kind}]: {}", flatten(msg))
    }
}

fn flatten(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Read-side core errors are the user's data, whatever their variant.
fn data(e: impl fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

/// Write-side errors: the inputs were fine, the run could not deliver.
fn internal(e: impl fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

/// Errors surfacing from an evaluation run. The corpora were already
/// loaded, so I/O can only mean an environment problem, and config bounds
/// were checked up front, so both map away from the data class.
fn eval_failure(e: lnb_core::Error) -> Failure {
    match e {
        lnb_core::Error::Io(_) => internal(e),
        lnb_core::Error::InvalidConfig(_) => Failure::Usage(e.to_string()),
        _ => data(e),
    }
}

// ---------------------------------------------------------------------------
// Invocation schema

#[derive(Parser)]
#[command(
    name = "lnb",
    version,
    about = "Lifelong naive-Bayes sentiment classification toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a raw review file and rewrite it in canonical form.
    Ingest(IngestArgs),
    /// Mine one labeled corpus into a knowledge base file.
    Learn(LearnArgs),
    /// Classify reviews with the lifelong model of a stored domain.
    Classify(ClassifyArgs),
    /// Print the tasks stored in a knowledge base.
    KbShow(KbShowArgs),
    /// Cross-validated comparison of every system on every domain.
    EvalNew(EvalNewArgs),
    /// Score earlier domains of each sequence from retained knowledge only.
    EvalPrev(EvalPrevArgs),
    /// Track a first domain's score as later domains accumulate.
    EvalTaskEffect(EvalTaskEffectArgs),
    /// Generate a shared-lexicon synthetic dataset.
    GenSynth(GenSynthArgs),
    /// Downsample a labeled corpus to equal class sizes.
    MakeBalanced(MakeBalancedArgs),
}

/// Smoothing and word-set thresholds, shared by every model-building
/// subcommand.
#[derive(Args)]
struct ModelFlags {
    /// Lidstone smoothing constant.
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    /// Class-ratio threshold a word must clear within a past domain.
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Target class-ratio threshold for trusting the target's own counts.
    #[arg(long, default_value_t = 3.0)]
    sigma: f64,
}

/// Experiment knobs on top of the model flags.
#[derive(Args)]
struct EvalFlags {
    #[command(flatten)]
    model: ModelFlags,
    /// Cross-validation fold count.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Root seed governing every randomized choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Score to report: "f1neg" (F1 of the negative class) or "acc".
    #[arg(long, default_value = "f1neg", value_parser = parse_metric)]
    metric: Metric,
    /// Past-domain knowledge source: "0.8" (per-fold train splits) or
    /// "full" (whole corpora).
    #[arg(long, default_value = "0.8", value_parser = parse_past_split)]
    past_split: PastSplit,
    /// Whether lifelong voting includes the target's own classifier.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    llv_include_target: bool,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    match s {
        "f1neg" => Ok(Metric::F1Negative),
        "acc" => Ok(Metric::Accuracy),
        _ => Err(format!("expected \"f1neg\" or \"acc\", got {s:?}")),
    }
}

fn parse_past_split(s: &str) -> Result<PastSplit, String> {
    match s {
        "full" => Ok(PastSplit::Full),
        "0.8" => Ok(PastSplit::TrainFolds),
        _ => Err(format!("expected \"full\" or \"0.8\", got {s:?}")),
    }
}

impl EvalFlags {
    fn to_config(&self, sequences: Vec<lnb_core::Sequence>) -> Result<ExperimentConfig, Failure> {
        let config = ExperimentConfig {
            lambda: self.model.lambda,
            gamma: self.model.gamma,
            sigma: self.model.sigma,
            folds: self.folds,
            seed: self.seed,
            metric: self.metric,
            past_split: self.past_split,
            llv_include_target: self.llv_include_target,
            sequences,
        };
        config
            .validate()
            .map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Args)]
struct IngestArgs {
    /// Raw review file, one JSON record per line.
    #[arg(long)]
    input: PathBuf,
    /// Rewrite every record to this domain id.
    #[arg(long)]
    domain: Option<String>,
    /// Canonical corpus file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LearnArgs {
    /// Labeled corpus file for exactly one domain.
    #[arg(long)]
    corpus: PathBuf,
    /// Knowledge base file to create or extend.
    #[arg(long)]
    kb: PathBuf,
    /// Domain id the corpus must carry and the task is stored under.
    #[arg(long)]
    domain: String,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Knowledge base file.
    #[arg(long)]
    kb: PathBuf,
    /// Stored domain whose classifier to apply.
    #[arg(long)]
    target: String,
    /// Review file to classify; labels, if present, are ignored.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    model: ModelFlags,
}

#[derive(Args)]
struct KbShowArgs {
    /// Knowledge base file.
    #[arg(long)]
    kb: PathBuf,
}

#[derive(Args)]
struct EvalNewArgs {
    /// Directory holding one `<domain>.jsonl` corpus per domain.
    #[arg(long)]
    data: PathBuf,
    /// Directory for result CSVs, created if absent.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    eval: EvalFlags,
}

#[derive(Args)]
struct EvalPrevArgs {
    /// Directory holding one `<domain>.jsonl` corpus per domain.
    #[arg(long)]
    data: PathBuf,
    /// Task-sequence file, one `NAME: dom dom ...` per line.
    #[arg(long)]
    sequences: PathBuf,
    /// Directory for result CSVs, created if absent.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    eval: EvalFlags,
}

#[derive(Args)]
struct EvalTaskEffectArgs {
    /// Directory holding one `<domain>.jsonl` corpus per domain.
    #[arg(long)]
    data: PathBuf,
    /// Task-sequence file, one `NAME: dom dom ...` per line.
    #[arg(long)]
    sequences: PathBuf,
    /// Directory for result CSVs, created if absent.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    eval: EvalFlags,
}

#[derive(Args)]
struct GenSynthArgs {
    /// Directory for the generated corpora, sequence file, and ground truth.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    domains: usize,
    /// Documents per domain; must be even.
    #[arg(long, default_value_t = 40)]
    docs_per_domain: usize,
    /// Shared sentiment words per polarity.
    #[arg(long, default_value_t = 40)]
    shared_vocab: usize,
    /// Domain-specific words per domain.
    #[arg(long, default_value_t = 20)]
    noise_vocab: usize,
    /// Probability mass in (0, 1] each class puts on the shared vocabulary.
    #[arg(long, default_value_t = 0.8)]
    strength: f64,
    /// Words per document.
    #[arg(long, default_value_t = 12)]
    doc_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MakeBalancedArgs {
    /// Labeled single-domain corpus file.
    #[arg(long)]
    input: PathBuf,
    /// Output corpus file.
    #[arg(long)]
    out: PathBuf,
    /// Documents kept per class.
    #[arg(long)]
    per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

// ---------------------------------------------------------------------------
// Entry

fn main() {
    env_logger::init();
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            eprintln!("{}", Failure::Usage(clap_summary(&e)));
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("{failure}");
            failure.code()
        }
    }
}

/// First informative line of a clap error; the rest is usage boilerplate.
fn clap_summary(e: &clap::Error) -> String {
    // A missing subcommand renders as a help page whose first line is the
    // about text, which reads nothing like an error.
    if matches!(
        e.kind(),
        ErrorKind::MissingSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
    ) {
        return "missing subcommand (see --help)".into();
    }
    let text = e.to_string();
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("invalid invocation");
    line.trim().trim_start_matches("error: ").to_string()
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ingest(args) => run_ingest(args),
        Command::Learn(args) => run_learn(args),
        Command::Classify(args) => run_classify(args),
        Command::KbShow(args) => run_kb_show(args),
        Command::EvalNew(args) => run_eval_new(args),
        Command::EvalPrev(args) => run_eval_prev(args),
        Command::EvalTaskEffect(args) => run_eval_task_effect(args),
        Command::GenSynth(args) => run_gen_synth(args),
        Command::MakeBalanced(args) => run_make_balanced(args),
    }
}

// ---------------------------------------------------------------------------
// Shared input plumbing

/// Reads a record-per-line file keeping 1-based line numbers, so later
/// validation failures can name the offending line. Blank lines are
/// skipped but still counted.
fn read_numbered_records(path: &Path) -> Result<Vec<(usize, RawReview)>, Failure> {
    let file = fs::File::open(path)
        .map_err(|e| Failure::Data(format!("cannot open {}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line =
            line.map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_record(&line, idx + 1).map_err(data)?;
        records.push((idx + 1, record));
    }
    Ok(records)
}

fn at_line(line: usize, detail: impl fmt::Display) -> Failure {
    Failure::Data(format!("invalid record at line {line}: {detail}"))
}

// ---------------------------------------------------------------------------
// Subcommands

fn run_ingest(args: IngestArgs) -> Result<(), Failure> {
    let mut records = read_numbered_records(&args.input)?;
    if records.is_empty() {
        return Err(Failure::Data(format!(
            "{} contains no records",
            args.input.display()
        )));
    }
    for (line, record) in &mut records {
        if let Some(domain) = &args.domain {
            record.domain = domain.clone();
        }
        if record.label.is_none() {
            return Err(at_line(*line, "missing label"));
        }
        // A record that survives parsing but yields no tokens would be
        // silently dropped at training time; intake is where to say so.
        featurize(record).map_err(|e| at_line(*line, e))?;
    }
    let reviews: Vec<RawReview> = records.into_iter().map(|(_, r)| r).collect();
    write_reviews(&args.out, &reviews).map_err(internal)?;
    println!(
        "ingested {} record(s) -> {}",
        reviews.len(),
        args.out.display()
    );
    Ok(())
}

/// Exclusive-create lock file next to the KB; removed on drop. Fail-fast
/// by design: a held lock is reported, never waited on.
struct KbLock {
    path: PathBuf,
}

impl KbLock {
    fn acquire(kb: &Path) -> Result<KbLock, Failure> {
        let mut name = kb.as_os_str().to_os_string();
        name.push(".lock");
        let path = PathBuf::from(name);
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(_) => Ok(KbLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Failure::Data(format!(
                "knowledge base {} is locked ({} exists; remove it if stale)",
                kb.display(),
                path.display()
            ))),
            Err(e) => Err(Failure::Internal(format!(
                "cannot create lock {}: {e}",
                path.display()
            ))),
        }
    }
}

impl Drop for KbLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn run_learn(args: LearnArgs) -> Result<(), Failure> {
    let _lock = KbLock::acquire(&args.kb)?;
    let mut kb = if args.kb.exists() {
        KnowledgeBase::load(&args.kb).map_err(data)?
    } else {
        KnowledgeBase::new()
    };
    let records = read_numbered_records(&args.corpus)?;
    for (line, record) in &records {
        if record.domain != args.domain {
            return Err(at_line(
                *line,
                format!("domain {:?}, expected {:?}", record.domain, args.domain),
            ));
        }
        if record.label.is_none() {
            return Err(at_line(*line, "missing label"));
        }
    }
    let reviews: Vec<RawReview> = records.into_iter().map(|(_, r)| r).collect();
    let docs = lnb_core::featurize_reviews(&args.domain, &reviews).map_err(data)?;
    let task = mine_knowledge(&args.domain, &docs).map_err(data)?;
    let doc_count = docs.len();
    let vocab_size = task.vocab_size;
    // add_task precedes save, so a duplicate domain leaves the file as it was.
    kb.add_task(task).map_err(data)?;
    kb.save(&args.kb).map_err(internal)?;
    println!(
        "learned {:?}: {} document(s), {} word type(s) -> {}",
        args.domain,
        doc_count,
        vocab_size,
        args.kb.display()
    );
    Ok(())
}

fn run_classify(args: ClassifyArgs) -> Result<(), Failure> {
    let config = ExperimentConfig {
        lambda: args.model.lambda,
        gamma: args.model.gamma,
        sigma: args.model.sigma,
        ..ExperimentConfig::default()
    };
    config
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let kb = KnowledgeBase::load(&args.kb).map_err(data)?;
    let target = kb
        .get(&args.target)
        .ok_or_else(|| data(lnb_core::Error::UnknownDomain(args.target.clone())))?;

    enum Model {
        Revised(lnb_core::RevisedModel),
        Plain(NBModel),
    }
    // With no other stored task there is no knowledge to transfer; the
    // lifelong model degenerates to the target's own counts.
    let model = if kb.len() >= 2 {
        Model::Revised(
            build_lnb_model(&kb, target, config.gamma, config.sigma, config.lambda)
                .map_err(data)?,
        )
    } else {
        Model::Plain(NBModel::from_counts(target.to_count_table(), config.lambda).map_err(data)?)
    };
    let classify = |doc: &Document| match &model {
        Model::Revised(m) => m.classify(doc),
        Model::Plain(m) => m.classify(doc),
    };

    let records = read_numbered_records(&args.input)?;
    if records.is_empty() {
        return Err(Failure::Data(format!(
            "{} contains no records",
            args.input.display()
        )));
    }
    // All-or-nothing: no labels are printed if any record is unusable.
    let mut labels = Vec::with_capacity(records.len());
    for (line, record) in &records {
        let doc = featurize(record).map_err(|e| at_line(*line, e))?;
        labels.push(classify(&doc).map_err(data)?);
    }
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    for label in labels {
        writeln!(out, "{}", label.as_str()).map_err(internal)?;
    }
    out.flush().map_err(internal)?;
    Ok(())
}

fn run_kb_show(args: KbShowArgs) -> Result<(), Failure> {
    let kb = KnowledgeBase::load(&args.kb).map_err(data)?;
    let union: std::collections::BTreeSet<&str> =
        kb.tasks().iter().flat_map(|t| t.vocab()).collect();
    println!(
        "knowledge base {}: {} task(s), union vocabulary {} word(s)",
        args.kb.display(),
        kb.len(),
        union.len()
    );
    let width = kb
        .tasks()
        .iter()
        .map(|t| t.domain_id.len())
        .chain(std::iter::once("domain".len()))
        .max()
        .unwrap_or(6);
    println!(
        "{:<width$}  {:>7} {:>7} {:>7} {:>9} {:>9}",
        "domain", "docs+", "docs-", "vocab", "tokens+", "tokens-"
    );
    for task in kb.tasks() {
        println!(
            "{:<width$}  {:>7} {:>7} {:>7} {:>9} {:>9}",
            task.domain_id,
            task.doc_counts.get(Polarity::Positive),
            task.doc_counts.get(Polarity::Negative),
            task.vocab_size,
            task.total(Polarity::Positive),
            task.total(Polarity::Negative)
        );
    }
    Ok(())
}

/// Per-system averages, one aligned line each, on the 0-100 scale the
/// CSVs use.
fn print_averages(average: impl Fn(SystemId) -> Option<f64>) {
    for system in SYSTEMS {
        match average(system) {
            Some(value) => println!("  {:<6} {:>6.2}", system.as_str(), value * 100.0),
            None => println!("  {:<6} {:>6}", system.as_str(), "-"),
        }
    }
}

fn print_skips(report: &EvalReport) {
    for skip in &report.skipped {
        println!("  skipped {}: {}", skip.domain, skip.reason);
    }
}

fn run_eval_new(args: EvalNewArgs) -> Result<(), Failure> {
    let config = args.eval.to_config(Vec::new())?;
    let corpora = load_dir(&args.data).map_err(data)?;
    let report = run_new_task_eval(&corpora, &config).map_err(eval_failure)?;
    fs::create_dir_all(&args.out).map_err(internal)?;
    write_new_task_csvs(&report, &args.out).map_err(internal)?;
    let domains = report.domain_values(SystemId::Lnb).len();
    println!(
        "new-task evaluation: {} over {} domain(s), {}-fold",
        report.metric.as_str(),
        domains,
        config.folds
    );
    print_averages(|s| report.system_average(s));
    print_skips(&report);
    println!("results -> {}", args.out.display());
    Ok(())
}

fn run_eval_prev(args: EvalPrevArgs) -> Result<(), Failure> {
    let sequences = load_sequences(&args.sequences).map_err(data)?;
    let config = args.eval.to_config(sequences)?;
    let corpora = load_dir(&args.data).map_err(data)?;
    // By-value hand-off: raw documents are consumed by mining and gone
    // before any past-domain scoring happens.
    let report = run_prev_task_eval(corpora, &config).map_err(eval_failure)?;
    fs::create_dir_all(&args.out).map_err(internal)?;
    write_prev_task_csvs(&report, &args.out).map_err(internal)?;
    println!(
        "previous-task evaluation: {} over {} sequence(s)",
        report.metric.as_str(),
        config.sequences.len()
    );
    print_averages(|s| report.grand_average(s));
    print_skips(&report);
    println!("results -> {}", args.out.display());
    Ok(())
}

fn run_eval_task_effect(args: EvalTaskEffectArgs) -> Result<(), Failure> {
    let sequences = load_sequences(&args.sequences).map_err(data)?;
    let config = args.eval.to_config(sequences)?;
    let corpora = load_dir(&args.data).map_err(data)?;
    let report = run_task_effect(&corpora, &config).map_err(eval_failure)?;
    fs::create_dir_all(&args.out).map_err(internal)?;
    write_task_effect_csvs(&report, &args.out).map_err(internal)?;
    println!(
        "task-effect evaluation: {} over {} sequence(s)",
        report.metric.as_str(),
        config.sequences.len()
    );
    println!("  mean score by number of future domains:");
    for (futures, value) in report.curve(SystemId::Lnb) {
        println!("  {:>4}  {:>6.2}", futures, value * 100.0);
    }
    print_skips(&report);
    println!("results -> {}", args.out.display());
    Ok(())
}

fn run_gen_synth(args: GenSynthArgs) -> Result<(), Failure> {
    let spec = SyntheticSpec {
        domains: args.domains,
        docs_per_domain: args.docs_per_domain,
        shared_vocab: args.shared_vocab,
        noise_vocab: args.noise_vocab,
        strength: args.strength,
        doc_len: args.doc_len,
        seed: args.seed,
    };
    // Spec bounds come straight from flags, so violations are usage errors.
    let dataset = generate_synthetic(&spec).map_err(|e| match e {
        lnb_core::Error::InvalidConfig(_) => Failure::Usage(e.to_string()),
        other => internal(other),
    })?;
    fs::create_dir_all(&args.out).map_err(internal)?;
    for (domain, reviews) in &dataset.reviews {
        write_reviews(&args.out.join(format!("{domain}.jsonl")), reviews).map_err(internal)?;
    }
    let mut sequences = String::from("# learning orders over the synthetic domains\n");
    for seq in &dataset.sequences {
        sequences.push_str(&format!("{}: {}\n", seq.name, seq.domains.join(" ")));
    }
    fs::write(args.out.join("sequences.txt"), sequences).map_err(internal)?;
    let truth = serde_json::to_string_pretty(&dataset.truth).map_err(internal)?;
    fs::write(args.out.join("truth.json"), truth + "\n").map_err(internal)?;
    println!(
        "synthetic dataset: {} domain(s) x {} document(s), {} sequence(s) -> {}",
        dataset.reviews.len(),
        spec.docs_per_domain,
        dataset.sequences.len(),
        args.out.display()
    );
    Ok(())
}

fn run_make_balanced(args: MakeBalancedArgs) -> Result<(), Failure> {
    let records = read_numbered_records(&args.input)?;
    if records.is_empty() {
        return Err(Failure::Data(format!(
            "{} contains no records",
            args.input.display()
        )));
    }
    let domain = records[0].1.domain.clone();
    let mut labels = Vec::with_capacity(records.len());
    for (line, record) in &records {
        if record.domain != domain {
            return Err(at_line(
                *line,
                format!("domain {:?}, expected {:?}", record.domain, domain),
            ));
        }
        match record.label {
            Some(label) => labels.push(label),
            None => return Err(at_line(*line, "missing label")),
        }
    }
    let indices = lnb_core::balanced_sample_indices(&labels, args.per_class, args.seed, &domain)
        .map_err(|e| match e {
            lnb_core::Error::InvalidConfig(_) => Failure::Usage(e.to_string()),
            other => data(other),
        })?;
    // Indices come back sorted, so file order survives the downsample.
    let selected: Vec<RawReview> = indices.into_iter().map(|i| records[i].1.clone()).collect();
    write_reviews(&args.out, &selected).map_err(internal)?;
    println!(
        "balanced corpus: {} per class from {:?} -> {}",
        args.per_class,
        domain,
        args.out.display()
    );
    Ok(())
}
