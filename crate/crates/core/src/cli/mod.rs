//! Command-line front end: proof inspection, dataset handling and
//! experiment runs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::circuit::{compile, AnsatzConfig};
use crate::dataset::{self, class_counts, DatasetEntry, Vocabulary};
use crate::diagram::{build_model_diagram, proof_to_diagram, Combination, Diagram, Model};
use crate::logic::{discourse_goal, prove, type_discourse, Lexicon, ProofTree, Sequent, DEFAULT_K0};
use crate::trainer::{all_cells, run_experiment_matrix, write_results_csv, SpsaConfig};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

/// Environment variable capping worker threads.
pub const THREADS_VAR: &str = "FOCKFLOW_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fockflow", version, about = "Discourse-aware QNLP pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a discourse and print its proof and diagram as JSON.
    Prove(ProveArgs),
    /// Train and evaluate model cells.
    Run(RunArgs),
    /// Generate or inspect the pronoun-resolution dataset.
    #[command(subcommand)]
    Dataset(DatasetCommand),
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    /// Discourse text; sentences end with '.'.
    pub text: String,
    /// Lexicon file (`word<TAB>type[<TAB>copula]` lines); defaults to the
    /// bundled example lexicon.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_K0)]
    pub k0: usize,
    #[arg(long, default_value_t = 32)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Model number, 1-4.
    #[arg(long, value_parser = parse_model)]
    pub model: Option<Model>,
    /// Sentence combination; both when omitted.
    #[arg(long, value_parser = parse_combination)]
    pub combination: Option<Combination>,
    /// Run all eight cells.
    #[arg(long, conflicts_with_all = ["model", "combination"])]
    pub all: bool,
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    #[arg(long = "spsa-a", default_value_t = 0.05)]
    pub spsa_a: f64,
    #[arg(long = "spsa-c", default_value_t = 0.06)]
    pub spsa_c: f64,
    /// Stability constant; 1% of the iteration count when omitted.
    #[arg(long = "spsa-A")]
    pub spsa_big_a: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_K0)]
    pub k0: usize,
    /// Dataset CSV, or `generate` for the built-in template set.
    #[arg(long, default_value = "generate")]
    pub dataset: String,
    /// Vocabulary file used with `--dataset generate`.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long)]
    pub dump_diagrams: bool,
    #[arg(long)]
    pub dump_circuits: bool,
    /// Base seed for the split and for every training run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Write the template dataset as CSV.
    Generate {
        #[arg(long, default_value = "dataset.csv")]
        out: PathBuf,
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Accept vocabularies that do not yield exactly 144 entries.
        #[arg(long)]
        relaxed: bool,
    },
    /// Print class and split counts of a dataset CSV.
    Inspect {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse()
}

fn parse_combination(s: &str) -> Result<Combination, String> {
    s.parse()
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(m: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: m.to_string(),
        }
    }

    pub fn data(m: impl ToString) -> Self {
        Self {
            code: EXIT_DATA,
            message: m.to_string(),
        }
    }

    pub fn internal(m: impl ToString) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: m.to_string(),
        }
    }
}

/// Parses `args` and runs the command, writing results to `stdout`.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(stdout, "{e}").map_err(CliError::internal)?;
                return Ok(());
            }
            return Err(CliError::usage(e.render().to_string().trim_end()));
        }
    };
    match cli.command {
        Command::Prove(a) => cmd_prove(&a, stdout),
        Command::Run(a) => cmd_run(&a, stdout),
        Command::Dataset(d) => cmd_dataset(&d, stdout),
    }
}

/// Process entry point.
pub fn main() -> ExitCode {
    configure_threads();
    let mut out = std::io::stdout().lock();
    match run_with(std::env::args_os(), &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // a second initialization only fails when a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Splits a token stream at `.` into sentences.
fn sentences(tokens: &[String]) -> Vec<Vec<String>> {
    tokens
        .split(|t| t == ".")
        .filter(|s| !s.is_empty())
        .map(<[String]>::to_vec)
        .collect()
}

/// The bundled lexicon re-keyed to storage bound `k0`.
pub fn builtin_lexicon(k0: usize) -> Result<Lexicon, CliError> {
    let mut lex = Lexicon::new(k0).map_err(CliError::usage)?;
    let builtin = Lexicon::builtin();
    for (w, f) in builtin.words() {
        if builtin.is_copula(w) {
            lex.insert_copula(w, f.clone());
        } else {
            lex.insert(w, f.clone());
        }
    }
    Ok(lex)
}

/// A proved discourse and its diagram, when one can be built.
#[derive(Serialize)]
pub struct Proved {
    pub tokens: Vec<String>,
    pub sequent: String,
    pub proof: ProofTree,
    pub diagram: Option<Diagram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagram_error: Option<String>,
}

/// Tokenizes, types and proves `text` against the goal `s.s...` with one
/// `s` per sentence.
pub fn prove_text(lexicon: &Lexicon, text: &str, depth: usize) -> Result<Proved, CliError> {
    let tokens = lexicon.tokenize(text).map_err(CliError::data)?;
    let parts = sentences(&tokens);
    let words: Vec<String> = parts.concat();
    let seq: Sequent =
        type_discourse(&words, lexicon, discourse_goal(parts.len().max(1))).map_err(CliError::data)?;
    let proof = prove(&seq, lexicon.k0(), depth)
        .ok_or_else(|| CliError::data(format!("no proof of {seq} within depth {depth}")))?;
    let diagram = proof_to_diagram(&proof, &words, lexicon);
    Ok(Proved {
        sequent: seq.to_string(),
        diagram_error: diagram.as_ref().err().map(ToString::to_string),
        diagram: diagram.ok(),
        tokens: words,
        proof,
    })
}

pub fn cmd_prove(a: &ProveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let lexicon = match &a.lexicon {
        Some(p) => Lexicon::load(p, a.k0).map_err(CliError::data)?,
        None => builtin_lexicon(a.k0)?,
    };
    let report = prove_text(&lexicon, &a.text, a.depth)?;
    serde_json::to_writer_pretty(&mut *out, &report).map_err(CliError::internal)?;
    writeln!(out).map_err(CliError::internal)
}

fn load_entries(a: &RunArgs) -> Result<Vec<DatasetEntry>, CliError> {
    if a.dataset == "generate" {
        let vocab = match &a.vocab {
            Some(p) => Vocabulary::load(p).map_err(CliError::data)?,
            None => Vocabulary::default(),
        };
        dataset::generate(&vocab).map_err(CliError::data)
    } else {
        dataset::load(Path::new(&a.dataset)).map_err(CliError::data)
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::internal)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cells: Vec<(Model, Combination)> = if a.all {
        all_cells()
    } else {
        let model = a
            .model
            .ok_or_else(|| CliError::usage("either --model or --all is required"))?;
        match a.combination {
            Some(op) => vec![(model, op)],
            None => Combination::ALL.iter().map(|&op| (model, op)).collect(),
        }
    };
    if a.seeds == 0 || a.k0 == 0 {
        return Err(CliError::usage("--seeds and --k0 must be positive"));
    }
    if !(a.spsa_a > 0.0 && a.spsa_c > 0.0) || a.spsa_big_a.is_some_and(|x| !(x >= 0.0)) {
        return Err(CliError::usage("SPSA gains must be positive"));
    }
    let entries = load_entries(a)?;
    let splits = if entries.len() == dataset::DATASET_SIZE {
        dataset::split(&entries, a.seed)
    } else {
        dataset::split_any(&entries, a.seed)
    }
    .map_err(CliError::data)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::data(format!("{}: {e}", a.out.display())))?;
    let ansatz = AnsatzConfig::default();
    if a.dump_diagrams || a.dump_circuits {
        dump(a, &cells, splits.all().cloned().collect(), &ansatz)?;
    }
    let cfg = SpsaConfig {
        a: a.spsa_a,
        c: a.spsa_c,
        big_a: a.spsa_big_a,
        iterations: a.iterations,
        seed: a.seed,
        ..SpsaConfig::default()
    };
    let results = run_experiment_matrix(&splits, &cells, &cfg, a.seeds, a.k0, &ansatz)
        .map_err(|e| match e {
            crate::trainer::TrainError::Diagram { .. } | crate::trainer::TrainError::EmptySplit => {
                CliError::data(e)
            }
            crate::trainer::TrainError::Config(_) => CliError::usage(e),
            _ => CliError::internal(e),
        })?;
    write_json(&a.out.join("results.json"), &results)?;
    let csv_path = a.out.join("results.csv");
    let file = fs::File::create(&csv_path).map_err(|e| CliError::data(format!("{}: {e}", csv_path.display())))?;
    write_results_csv(&results, file).map_err(CliError::internal)?;
    for r in &results {
        writeln!(
            out,
            "model {}: test accuracy {:.4} +- {:.4} over {} seed(s)",
            r.name(),
            r.test_accuracy_mean,
            r.test_accuracy_std,
            r.seeds
        )
        .map_err(CliError::internal)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Dumped<T: Serialize> {
    sentence: String,
    label: u8,
    value: T,
}

fn dump(
    a: &RunArgs,
    cells: &[(Model, Combination)],
    entries: Vec<DatasetEntry>,
    ansatz: &AnsatzConfig,
) -> Result<(), CliError> {
    for &(m, op) in cells {
        let name = format!("{m}{}", op.letter());
        let mut diagrams = Vec::new();
        let mut circuits = Vec::new();
        for e in &entries {
            let d = build_model_diagram(e, m, op, a.k0).map_err(CliError::data)?;
            if a.dump_circuits {
                circuits.push(Dumped {
                    sentence: e.sentence(),
                    label: e.label,
                    value: compile(&d, ansatz).map_err(CliError::internal)?,
                });
            }
            diagrams.push(Dumped {
                sentence: e.sentence(),
                label: e.label,
                value: d,
            });
        }
        if a.dump_diagrams {
            write_json(&a.out.join(format!("diagrams_{name}.json")), &diagrams)?;
        }
        if a.dump_circuits {
            write_json(&a.out.join(format!("circuits_{name}.json")), &circuits)?;
        }
    }
    Ok(())
}

pub fn cmd_dataset(d: &DatasetCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match d {
        DatasetCommand::Generate { out: path, vocab, relaxed } => {
            let vocab = match vocab {
                Some(p) => Vocabulary::load(p).map_err(CliError::data)?,
                None => Vocabulary::default(),
            };
            let entries = if *relaxed {
                dataset::generate_any(&vocab)
            } else {
                dataset::generate(&vocab)
            }
            .map_err(CliError::data)?;
            dataset::save(&entries, path).map_err(CliError::data)?;
            writeln!(out, "wrote {} entries to {}", entries.len(), path.display()).map_err(CliError::internal)
        }
        DatasetCommand::Inspect { path, seed } => {
            let entries = dataset::load(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            let (zeros, ones) = class_counts(&entries);
            writeln!(out, "entries: {}", entries.len()).map_err(CliError::internal)?;
            writeln!(out, "label 0 (subject): {zeros}").map_err(CliError::internal)?;
            writeln!(out, "label 1 (object): {ones}").map_err(CliError::internal)?;
            if let Ok(s) = dataset::split_any(&entries, *seed) {
                for (name, part) in [("train", &s.train), ("test", &s.test), ("val", &s.val)] {
                    let (z, o) = class_counts(part);
                    writeln!(out, "{name}: {} ({z}/{o})", part.len()).map_err(CliError::internal)?;
                }
            }
            Ok(())
        }
    }
}
