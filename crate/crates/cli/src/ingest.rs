//! Reading observed symbol sequences from text files.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use entrate::{Alphabet, Sequence};
use serde::Serialize;

use crate::error::CliError;

/// How a sequence file is split into tokens. Lines starting with `#` are
/// comments in every format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// Whitespace-separated tokens.
    #[default]
    Tokens,
    /// One token per non-blank line; inner spaces are kept.
    Lines,
    /// Every non-whitespace character is a token.
    Chars,
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.trim_start().starts_with('#'))
}

pub fn tokenize(text: &str, format: Format) -> Vec<String> {
    let lines = content_lines(text);
    match format {
        Format::Tokens => lines.flat_map(str::split_whitespace).map(str::to_string).collect(),
        Format::Lines => lines.map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect(),
        Format::Chars => lines
            .flat_map(str::chars)
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect(),
    }
}

/// Merge runs of identical consecutive tokens into one.
pub fn collapse_repeats<T: PartialEq>(mut tokens: Vec<T>) -> Vec<T> {
    tokens.dedup();
    tokens
}

/// Treatment of the transition from the end of one file to the start of
/// the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundaries {
    /// Files form one long sequence. Repeats are collapsed per file, so a
    /// repeat across the join survives.
    #[default]
    Include,
    /// Files are separate windows; no transition spans two of them.
    Exclude,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub format: Format,
    pub collapse_repeats: bool,
    /// Ordered symbol list; when absent the sorted distinct tokens are used.
    pub alphabet: Option<Vec<String>>,
    pub boundaries: Boundaries,
}

/// Sequences read from one or more files over a shared alphabet.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub alphabet: Alphabet,
    /// One segment with boundaries included, otherwise one per file.
    pub segments: Vec<Sequence>,
    pub sources: Vec<PathBuf>,
}

impl Ingested {
    pub fn n_obs(&self) -> usize {
        self.segments.iter().map(Sequence::len).sum()
    }

    /// All observations as one sequence.
    pub fn joined(&self) -> Sequence {
        let states = self.segments.iter().flat_map(|s| s.states().iter().copied()).collect();
        Sequence::new(states, self.alphabet.kappa()).expect("states come from the alphabet")
    }
}

pub fn read_alphabet(path: &Path) -> Result<Vec<String>, CliError> {
    let text = read_text(path)?;
    let symbols = tokenize(&text, Format::Tokens);
    if symbols.is_empty() {
        return Err(CliError::input(format!("alphabet file {} is empty", path.display())));
    }
    Ok(symbols)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// Tokenize in-memory texts, one per observation window.
pub fn ingest_texts(texts: &[(PathBuf, String)], opts: &IngestOptions) -> Result<Ingested, CliError> {
    if texts.is_empty() {
        return Err(CliError::input("no sequence files given"));
    }
    let mut windows = Vec::with_capacity(texts.len());
    for (path, text) in texts {
        let mut tokens = tokenize(text, opts.format);
        if tokens.is_empty() {
            return Err(CliError::input(format!("{} contains no tokens", path.display())));
        }
        if opts.collapse_repeats {
            tokens = collapse_repeats(tokens);
        }
        windows.push(tokens);
    }
    let alphabet = match &opts.alphabet {
        Some(symbols) => {
            let alphabet = Alphabet::new(symbols.iter().cloned()).map_err(CliError::from)?;
            let unknown: BTreeSet<&str> = windows
                .iter()
                .flatten()
                .map(String::as_str)
                .filter(|t| alphabet.index_of(t).is_none())
                .collect();
            if !unknown.is_empty() {
                return Err(CliError::input(format!(
                    "tokens not in the declared alphabet: {}",
                    unknown.into_iter().collect::<Vec<_>>().join(", ")
                )));
            }
            alphabet
        }
        None => Alphabet::infer(windows.iter().flatten().map(String::as_str)).map_err(CliError::from)?,
    };
    let segments: Vec<Sequence> = match opts.boundaries {
        Boundaries::Include => {
            let all = windows.iter().flatten().map(String::as_str);
            vec![alphabet.encode(all).map_err(CliError::from)?]
        }
        Boundaries::Exclude => windows
            .iter()
            .map(|w| alphabet.encode(w.iter().map(String::as_str)))
            .collect::<Result<_, _>>()
            .map_err(CliError::from)?,
    };
    let n: usize = segments.iter().map(Sequence::len).sum();
    if n < 2 {
        return Err(CliError::input(format!("sequence has {n} observation(s); at least 2 are needed")));
    }
    Ok(Ingested { alphabet, segments, sources: texts.iter().map(|(p, _)| p.clone()).collect() })
}

pub fn ingest(paths: &[PathBuf], opts: &IngestOptions) -> Result<Ingested, CliError> {
    let texts = paths
        .iter()
        .map(|p| read_text(p).map(|t| (p.clone(), t)))
        .collect::<Result<Vec<_>, _>>()?;
    ingest_texts(&texts, opts)
}
