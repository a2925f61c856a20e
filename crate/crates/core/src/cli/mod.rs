//! The `odsl` command-line front end.
//!
//! Every subcommand is scriptable; only `repl` reads interactive input.
//! Exit codes: 0 success, 1 internal error, 2 diagnostics or grade failure,
//! 3 provider or network failure, 64 usage error.

mod providers;
mod repl;

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{check, diagnostics, entity_env, Diagnostic};
use crate::arm::{ClassifierMode, PromptBudget, RetrievalConfig, SampleBank, SynthesisError, Synthesizer};
use crate::doc::{
    execute, extract_context_with, transpile, undoability_audit, ActionLog, ContextOptions, ContextScope,
    PresentationDoc,
};
use crate::eval::{load_suite, offline_outputs, run_suite, EvalCase, GradeOptions, SuiteOptions};
use crate::fix::check_and_fix;
use crate::lang::{parse, pretty_print, Program};

pub use providers::{ProviderChoice, ProviderEnv};
pub use repl::{run_repl, ReplOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_PROVIDER: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "odsl", version, about = "Parse, check, fix, execute and synthesize ODSL programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a program and print its canonical form
    Parse {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Type-check a program
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Auto-correct a program and print the result
    Fix {
        file: PathBuf,
        /// Print the full fix report instead of the program
        #[arg(long, value_enum)]
        report: Option<Format>,
    },
    /// Execute a program against a document
    Run {
        file: PathBuf,
        #[arg(long)]
        doc: PathBuf,
        #[arg(long, value_enum, default_value = "doc")]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the action log a program would produce, leaving the document untouched
    Transpile {
        file: PathBuf,
        #[arg(long)]
        doc: PathBuf,
    },
    /// Print the context tree of a document
    Context {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long, default_value = "selection")]
        scope: ContextScope,
        /// Maximum characters of text per text node
        #[arg(long, default_value_t = 200)]
        text_budget: usize,
    },
    /// Verify that every record of an action log is undoable
    Audit { log: PathBuf },
    /// Sample bank maintenance
    Bank {
        #[command(subcommand)]
        command: BankCommand,
    },
    /// Analysis-retrieval synthesis
    Arm {
        #[command(subcommand)]
        command: ArmCommand,
    },
    /// Evaluation suites
    Eval {
        #[command(subcommand)]
        command: EvalCommand,
    },
    /// Interactive utterance, program and execution loop
    Repl {
        #[arg(long)]
        doc: PathBuf,
        #[command(flatten)]
        synth: SynthArgs,
        /// Snapshots kept for :undo
        #[arg(long, default_value_t = 20)]
        undo_depth: usize,
        /// Apply programs without asking
        #[arg(long)]
        yes: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum BankCommand {
    /// Recompute sample embeddings
    Index {
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "mock")]
        provider: ProviderChoice,
    },
}

#[derive(Debug, Subcommand)]
pub enum ArmCommand {
    /// Turn one utterance into a checked program
    Synthesize {
        #[arg(long)]
        utterance: String,
        #[arg(long)]
        doc: Option<PathBuf>,
        #[command(flatten)]
        synth: SynthArgs,
        /// Write the assembled prompt to this path (`-` for stderr)
        #[arg(long)]
        dump_prompt: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Grade a suite
    Run {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_enum, default_value = "offline")]
        mode: Mode,
        /// Write the JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Do not count subprogram matches
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        workers: Option<usize>,
        /// Exit 2 when the pass-rate center falls below this percentage
        #[arg(long)]
        fail_under: Option<f64>,
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Recompute pass rates of the bundled ablation counts
    Ablation,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub bank: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mock")]
    pub provider: ProviderChoice,
    /// Must match the embedder the bank was indexed with
    #[arg(long, value_enum, default_value = "mock")]
    pub embedder: ProviderChoice,
    /// Scripted completions for the mock provider
    #[arg(long)]
    pub mock_file: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 4097)]
    pub budget: usize,
    #[arg(long, default_value_t = 512)]
    pub completion_reserve: usize,
    #[arg(long, value_enum, default_value = "rules")]
    pub classifier: ClassifierArg,
    #[arg(long)]
    pub no_entity_classifier: bool,
    #[arg(long)]
    pub no_context_classifier: bool,
    #[arg(long)]
    pub no_code_correction: bool,
}

impl SynthArgs {
    pub fn config(&self) -> RetrievalConfig {
        RetrievalConfig {
            k: self.k,
            budget: PromptBudget { total: self.budget, completion_reserve: self.completion_reserve },
            classifier: match self.classifier {
                ClassifierArg::Rules => ClassifierMode::Rules,
                ClassifierArg::Llm => ClassifierMode::Llm,
            },
            entity_classifier: !self.no_entity_classifier,
            context_classifier: !self.no_context_classifier,
            code_correction: !self.no_code_correction,
            ..RetrievalConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Actions,
    Doc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Offline,
    Synthesize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierArg {
    Rules,
    Llm,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Failure(String),
    #[error("{0}")]
    Provider(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } | CliError::Internal(_) => EXIT_INTERNAL,
            CliError::Failure(_) => EXIT_FAILURE,
            CliError::Provider(_) => EXIT_PROVIDER,
        }
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        if e.is_provider() {
            CliError::Provider(e.to_string())
        } else {
            CliError::Failure(e.to_string())
        }
    }
}

/// Streams a command writes to.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Runs the command line `argv` (including the program name) against the
/// process environment and returns the exit code.
pub fn dispatch(argv: &[String], io: Io<'_>) -> i32 {
    dispatch_with(argv, io, &ProviderEnv::from_env())
}

pub fn dispatch_with(argv: &[String], io: Io<'_>, env: &ProviderEnv) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(io.stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(io.stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let Io { stdin, stdout, stderr } = io;
    match run(cli.command, stdin, stdout, stderr, env) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn out(w: &mut dyn Write, text: &str) -> Result<(), CliError> {
    w.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()))
}

fn load_program(path: &Path) -> Result<Program, CliError> {
    let src = read(path)?;
    parse(&src).map_err(|e| CliError::Failure(format!("{}:{e}", path.display())))
}

fn load_doc(path: &Path) -> Result<PresentationDoc, CliError> {
    PresentationDoc::from_json(&read(path)?).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn load_bank(path: Option<&Path>) -> Result<SampleBank, CliError> {
    match path {
        None => Ok(SampleBank::builtin()),
        Some(p) => SampleBank::from_json(&read(p)?).map_err(|e| CliError::Failure(format!("{}: {e}", p.display()))),
    }
}

fn diag_lines(file: &Path, diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{}:{d}\n", file.display())).collect()
}

fn json_line(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn checked(path: &Path, program: &Program, stderr: &mut dyn Write) -> Result<(), CliError> {
    let diags = diagnostics(program);
    if diags.is_empty() {
        return Ok(());
    }
    out(stderr, &diag_lines(path, &diags))?;
    Err(CliError::Failure(format!("{} diagnostic(s)", diags.len())))
}

fn run(
    command: Command,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    env: &ProviderEnv,
) -> Result<i32, CliError> {
    match command {
        Command::Parse { file, format } => {
            let p = load_program(&file)?;
            match format {
                Format::Text => out(stdout, &pretty_print(&p))?,
                Format::Json => out(stdout, &json_line(&p))?,
            }
            Ok(EXIT_OK)
        }
        Command::Check { file, format } => {
            let p = load_program(&file)?;
            let result = check(&p);
            match (&result, format) {
                (Ok(tp), Format::Text) => {
                    let mut text = String::from("ok\n");
                    for (var, ty) in entity_env(tp) {
                        text.push_str(&format!("  {var}: {ty}\n"));
                    }
                    out(stdout, &text)?;
                }
                (Ok(tp), Format::Json) => out(stdout, &json_line(&json!({"ok": true, "env": entity_env(tp)})))?,
                (Err(d), Format::Text) => out(stdout, &diag_lines(&file, d))?,
                (Err(d), Format::Json) => out(stdout, &json_line(&json!({"ok": false, "diagnostics": d})))?,
            }
            Ok(if result.is_ok() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Fix { file, report } => {
            let p = load_program(&file)?;
            let r = check_and_fix(&p);
            match report {
                Some(Format::Json) => out(
                    stdout,
                    &json_line(&json!({
                        "program": pretty_print(&r.program),
                        "applied": r.applied,
                        "residual": r.residual,
                    })),
                )?,
                Some(Format::Text) => {
                    out(stdout, &pretty_print(&r.program))?;
                    for a in &r.applied {
                        out(stderr, &format!("{}: {:?}: {} -> {}\n", a.span, a.rule, a.before, a.after))?;
                    }
                    out(stderr, &diag_lines(&file, &r.residual))?;
                }
                None => {
                    out(stdout, &pretty_print(&r.program))?;
                    out(stderr, &diag_lines(&file, &r.residual))?;
                }
            }
            Ok(if r.is_clean() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Run { file, doc, emit, out: out_path } => {
            let p = load_program(&file)?;
            checked(&file, &p, stderr)?;
            let tp = check(&p).expect("checked above");
            let d = load_doc(&doc)?;
            let (after, log) = execute(&tp, &d).map_err(|e| CliError::Internal(e.to_string()))?;
            let text = match emit {
                Emit::Doc => after.to_json() + "\n",
                Emit::Actions => log.to_json() + "\n",
            };
            match out_path {
                Some(path) => write_file(&path, &text)?,
                None => out(stdout, &text)?,
            }
            Ok(EXIT_OK)
        }
        Command::Transpile { file, doc } => {
            let p = load_program(&file)?;
            checked(&file, &p, stderr)?;
            let tp = check(&p).expect("checked above");
            let log = transpile(&tp, &load_doc(&doc)?).map_err(|e| CliError::Internal(e.to_string()))?;
            out(stdout, &(log.to_json() + "\n"))?;
            Ok(EXIT_OK)
        }
        Command::Context { doc, scope, text_budget } => {
            let d = load_doc(&doc)?;
            let tree = extract_context_with(&d, scope, ContextOptions { text_budget });
            out(stdout, &(tree.to_pretty_string() + "\n"))?;
            Ok(EXIT_OK)
        }
        Command::Audit { log } => {
            let text = read(&log)?;
            let log = ActionLog::from_json(&text).map_err(|e| CliError::Failure(e.to_string()))?;
            match undoability_audit(&log) {
                Ok(()) => {
                    out(stdout, &format!("ok: {} record(s) undoable\n", log.len()))?;
                    Ok(EXIT_OK)
                }
                Err(violations) => {
                    for v in &violations {
                        out(stdout, &format!("record {}: `{}` is not undoable\n", v.index, v.op))?;
                    }
                    Ok(EXIT_FAILURE)
                }
            }
        }
        Command::Bank { command: BankCommand::Index { bank, out: out_path, provider } } => {
            let mut b = load_bank(bank.as_deref())?;
            let embedder = env.embedder(provider)?;
            b.index(embedder.as_ref()).map_err(|e| match e {
                crate::arm::BankError::Provider(p) => CliError::Provider(p.to_string()),
                other => CliError::Failure(other.to_string()),
            })?;
            let text = b.to_json() + "\n";
            match out_path {
                Some(path) => write_file(&path, &text)?,
                None => out(stdout, &text)?,
            }
            Ok(EXIT_OK)
        }
        Command::Arm { command: ArmCommand::Synthesize { utterance, doc, synth, dump_prompt, format } } => {
            let bank = load_bank(synth.bank.as_deref())?;
            let llm = env.llm(synth.provider, synth.mock_file.as_deref())?;
            let embedder = env.embedder(synth.embedder)?;
            let d = match doc {
                Some(p) => load_doc(&p)?,
                None => PresentationDoc::default(),
            };
            let context = extract_context_with(&d, ContextScope::Selection, ContextOptions::default());
            let s = Synthesizer { bank: &bank, llm: llm.as_ref(), embedder: embedder.as_ref(), config: synth.config() };
            let result = s.synthesize(&utterance, &context)?;
            if let Some(path) = dump_prompt {
                let text = result.prompt.render();
                if path.as_os_str() == "-" {
                    out(stderr, &text)?;
                } else {
                    write_file(&path, &text)?;
                }
            }
            match format {
                Format::Text => {
                    out(stdout, &pretty_print(&result.program))?;
                    out(stderr, &diag_lines(Path::new("<generated>"), &result.report.residual))?;
                }
                Format::Json => out(
                    stdout,
                    &json_line(&json!({
                        "entities": result.analysis.entities,
                        "requiresContext": result.analysis.requires_context,
                        "samples": result.prompt.samples.iter().map(|s| &s.id).collect::<Vec<_>>(),
                        "estimatedTokens": result.prompt.estimated_tokens,
                        "program": pretty_print(&result.program),
                        "applied": result.report.applied,
                        "residual": result.report.residual,
                    })),
                )?,
            }
            Ok(if result.is_clean() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Eval { command: EvalCommand::Run { suite, mode, report, strict, workers, fail_under, synth } } => {
            let cases =
                load_suite(&read(&suite)?).map_err(|e| CliError::Failure(format!("{}: {e}", suite.display())))?;
            let opts = SuiteOptions { grade: GradeOptions { strict }, workers };
            let r = match mode {
                Mode::Offline => run_suite(&cases, offline_outputs, opts),
                Mode::Synthesize => {
                    let bank = load_bank(synth.bank.as_deref())?;
                    let llm = env.llm(synth.provider, synth.mock_file.as_deref())?;
                    let embedder = env.embedder(synth.embedder)?;
                    let s = Synthesizer {
                        bank: &bank,
                        llm: llm.as_ref(),
                        embedder: embedder.as_ref(),
                        config: synth.config(),
                    };
                    let generate = |c: &EvalCase| -> Result<String, String> {
                        let empty = crate::doc::ContextTree(json!({"slides": []}));
                        let ctx = c.context.as_ref().unwrap_or(&empty);
                        match s.synthesize(&c.utterance, ctx) {
                            Ok(out) if out.is_clean() => Ok(pretty_print(&out.program)),
                            Ok(out) => Err(format!("{} residual diagnostic(s)", out.report.residual.len())),
                            Err(e) => Err(e.to_string()),
                        }
                    };
                    run_suite(&cases, generate, opts)
                }
            }
            .map_err(|e| CliError::Failure(e.to_string()))?;
            if let Some(path) = report {
                write_file(&path, &(r.to_json() + "\n"))?;
            }
            out(stdout, &r.render())?;
            let below = fail_under.is_some_and(|t| r.pass_rate.center < t);
            Ok(if below { EXIT_FAILURE } else { EXIT_OK })
        }
        Command::Eval { command: EvalCommand::Ablation } => {
            let mut text = format!("| Configuration {}\n", crate::eval::EvalReport::table_header());
            let mut mismatches = 0;
            for row in crate::eval::ablation_rows() {
                let r = row.report();
                let ok = (r.pass_rate.center - row.pass_rate.center).abs() <= 0.01
                    && (r.pass_rate.halfwidth - row.pass_rate.halfwidth).abs() <= 0.01;
                if !ok {
                    mismatches += 1;
                }
                text.push_str(&format!("| {} {}{}\n", row.label(), r.table_row(), if ok { "" } else { " MISMATCH" }));
            }
            out(stdout, &text)?;
            Ok(if mismatches == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Repl { doc, synth, undo_depth, yes } => {
            let d = load_doc(&doc)?;
            let bank = load_bank(synth.bank.as_deref())?;
            let llm = env.llm(synth.provider, synth.mock_file.as_deref())?;
            let embedder = env.embedder(synth.embedder)?;
            let s = Synthesizer { bank: &bank, llm: llm.as_ref(), embedder: embedder.as_ref(), config: synth.config() };
            let opts = ReplOptions { undo_depth, auto_apply: yes, save_path: Some(doc) };
            run_repl(&s, d, opts, stdin, stdout).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(EXIT_OK)
        }
    }
}
