//! The `emg` command line: `parse`, `generate` and `check`.
//!
//! Exit status is 0 for accept / all pass, 1 for reject / some fail, and 2
//! for operational errors (unreadable files, bad grammar or corpus, search
//! cap exceeded).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::derivation::{generate_with, GenerateConfig};
use crate::grammar::{load_grammar, Grammar};
use crate::output::{to_dependencies, to_trace};
use crate::parsing::{parse, tokenize, ParseConfig, Strategy};

pub const MAX_BRANCHES_VAR: &str = "EMG_MAX_BRANCHES";

#[derive(Parser, Debug)]
#[command(name = "emg", version, about = "Top-down expectation-based minimalist grammar toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct SearchFlags {
    /// Keep only the K best states per word instead of searching exhaustively.
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
    beam: Option<u64>,
    /// Try every homophone, not only those fitting the pending expectation.
    #[arg(long)]
    no_priming: bool,
    /// Maximum number of empty items per derivation.
    #[arg(long, value_name = "N")]
    max_empty: Option<usize>,
    /// Postulate empty items even where the next word could not attach.
    #[arg(long)]
    eager_empties: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse one sentence and print its dependency graph.
    Parse {
        grammar: PathBuf,
        sentence: String,
        /// Print every analysis, not just the first.
        #[arg(long)]
        all: bool,
        /// Append the derivation trace.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// List every sentence of at most --max-len words.
    Generate {
        grammar: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Print each derivation's dependency graph under its sentence.
        #[arg(long)]
        trees: bool,
        #[arg(long, value_name = "N")]
        max_empty: Option<usize>,
    },
    /// Check a corpus of `SENTENCE<TAB>1|0[<TAB>COMMENT]` lines.
    Check {
        grammar: PathBuf,
        corpus: PathBuf,
        #[command(flatten)]
        search: SearchFlags,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Parse {
            grammar,
            sentence,
            all,
            trace,
            search,
        } => cmd_parse(&grammar, &sentence, all, trace, &search, out),
        Command::Generate {
            grammar,
            max_len,
            trees,
            max_empty,
        } => cmd_generate(&grammar, max_len, trees, max_empty, out),
        Command::Check {
            grammar,
            corpus,
            search,
        } => cmd_check(&grammar, &corpus, &search, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "emg: {msg}");
            2
        }
    }
}

fn read_grammar(path: &Path, err_ctx: &str) -> Result<Grammar, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(format!("{err_ctx} {}: {e}", path.display())))?;
    load_grammar(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn max_branches() -> Result<Option<usize>, Failure> {
    match std::env::var(MAX_BRANCHES_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure(format!("{MAX_BRANCHES_VAR} must be a count, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn parse_config(flags: &SearchFlags) -> Result<ParseConfig, Failure> {
    let mut cfg = ParseConfig::default();
    if let Some(k) = flags.beam {
        cfg.strategy = Strategy::Beam(k as usize);
    }
    cfg.priming = !flags.no_priming;
    cfg.eager_empties = flags.eager_empties;
    if let Some(n) = flags.max_empty {
        cfg.empties.max_total = n;
    }
    if let Some(n) = max_branches()? {
        cfg.max_branches = n;
    }
    Ok(cfg)
}

fn cmd_parse(
    path: &Path,
    sentence: &str,
    all: bool,
    trace: bool,
    flags: &SearchFlags,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let g = read_grammar(path, "cannot read grammar")?;
    let cfg = parse_config(flags)?;
    let forest = parse(&g, &tokenize(sentence), &cfg)?;
    let shown: Vec<_> = if all {
        forest.analyses.iter().map(|a| &a.derivation).collect()
    } else {
        forest.analyses.iter().take(1).map(|a| &a.derivation).collect()
    };
    for d in &shown {
        write!(out, "{}", to_dependencies(d))?;
        if trace {
            write!(out, "{}", to_trace(d))?;
        }
    }
    if forest.accepted() {
        writeln!(out, "# analyses: {}", forest.analyses.len())?;
        return Ok(0);
    }
    if let Some(d) = &forest.best_failure {
        write!(out, "{}", to_dependencies(d))?;
        if trace {
            write!(out, "{}", to_trace(d))?;
        }
    } else {
        writeln!(out, "# status: FAIL(no derivation started)")?;
    }
    Ok(1)
}

fn cmd_generate(
    path: &Path,
    max_len: usize,
    trees: bool,
    max_empty: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let g = read_grammar(path, "cannot read grammar")?;
    let mut cfg = GenerateConfig {
        max_len,
        ..GenerateConfig::default()
    };
    if let Some(n) = max_empty {
        cfg.empties.max_total = n;
    }
    if let Some(n) = max_branches()? {
        cfg.max_states = n;
    }
    let mut generated = generate_with(&g, &cfg)?;
    generated.sort_by_cached_key(|s| s.words.join(" "));
    let mut last: Option<String> = None;
    for s in &generated {
        let sentence = s.words.join(" ");
        if last.as_deref() != Some(sentence.as_str()) {
            writeln!(out, "{sentence}")?;
        }
        if trees {
            write!(out, "{}", to_dependencies(&s.derivation))?;
        }
        last = Some(sentence);
    }
    Ok(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub sentence: String,
    pub expected: bool,
    pub comment: Option<String>,
}

/// Reads `SENTENCE<TAB>1|0[<TAB>COMMENT]` lines; blank lines and `#`
/// comments are skipped.
pub fn read_corpus(text: &str) -> Result<Vec<CorpusEntry>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.splitn(3, '\t');
        let sentence = cols.next().unwrap_or_default().trim();
        let expected = match cols.next().map(str::trim) {
            Some("1") => true,
            Some("0") => false,
            Some(v) => return Err(format!("line {}: verdict must be 1 or 0, got `{v}`", i + 1)),
            None => return Err(format!("line {}: missing verdict column", i + 1)),
        };
        if sentence.is_empty() {
            return Err(format!("line {}: empty sentence", i + 1));
        }
        out.push(CorpusEntry {
            sentence: sentence.to_string(),
            expected,
            comment: cols.next().map(|c| c.trim().to_string()),
        });
    }
    Ok(out)
}

fn cmd_check(
    path: &Path,
    corpus: &Path,
    flags: &SearchFlags,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let g = read_grammar(path, "cannot read grammar")?;
    let text = std::fs::read_to_string(corpus)
        .map_err(|e| Failure(format!("cannot read corpus {}: {e}", corpus.display())))?;
    let entries = read_corpus(&text).map_err(|e| Failure(format!("{}: {e}", corpus.display())))?;
    let cfg = parse_config(flags)?;
    let verdicts: Vec<Result<bool, Failure>> = entries
        .par_iter()
        .map(|e| {
            parse(&g, &tokenize(&e.sentence), &cfg)
                .map(|f| f.accepted())
                .map_err(|err| Failure(format!("`{}`: {err}", e.sentence)))
        })
        .collect();
    let (mut pass, mut fail) = (0, 0);
    for (e, verdict) in entries.iter().zip(verdicts) {
        let got = verdict?;
        let ok = got == e.expected;
        if ok {
            pass += 1;
        } else {
            fail += 1;
        }
        let word = |b: bool| if b { "ACCEPT" } else { "REJECT" };
        write!(
            out,
            "{}\t{}\texpected={}\tgot={}",
            if ok { "PASS" } else { "FAIL" },
            e.sentence,
            word(e.expected),
            word(got)
        )?;
        match &e.comment {
            Some(c) => writeln!(out, "\t{c}")?,
            None => writeln!(out)?,
        }
    }
    writeln!(out, "# pass: {pass}\tfail: {fail}")?;
    Ok(if fail == 0 { 0 } else { 1 })
}
