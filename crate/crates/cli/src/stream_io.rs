//! Reading numbers from text and cutting them into chunks.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("line {line}: cannot parse `{token}` as a finite number")]
    BadToken { line: u64, token: String },
    #[error("read error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// Whitespace-separated literals, any number per line.
    Plain,
    /// One value per row, taken from a 0-based column.
    Csv { column: usize, delimiter: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BadTokenPolicy {
    #[default]
    Error,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseConfig {
    pub format: InputFormat,
    pub on_bad_token: BadTokenPolicy,
}

impl ParseConfig {
    pub fn plain() -> Self {
        Self {
            format: InputFormat::Plain,
            on_bad_token: BadTokenPolicy::Error,
        }
    }

    /// CSV with an ASCII delimiter.
    pub fn csv(column: usize, delimiter: char) -> Result<Self, StreamError> {
        if !delimiter.is_ascii() || delimiter == '"' || delimiter == '\n' || delimiter == '\r' {
            return Err(StreamError::InvalidArgument(
                "delimiter must be a single ASCII character",
            ));
        }
        Ok(Self {
            format: InputFormat::Csv {
                column,
                delimiter: delimiter as u8,
            },
            on_bad_token: BadTokenPolicy::Error,
        })
    }

    pub fn skip_bad_tokens(mut self, skip: bool) -> Self {
        self.on_bad_token = if skip {
            BadTokenPolicy::Skip
        } else {
            BadTokenPolicy::Error
        };
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Parsed {
    pub values: Vec<f64>,
    pub bad_tokens: u64,
}

/// Parses every value from `source` into memory.
pub fn parse_stream<R: Read>(source: R, config: &ParseConfig) -> Result<Parsed, StreamError> {
    let mut values = Vec::new();
    let bad_tokens = for_each_value(source, config, |x| values.push(x))?;
    Ok(Parsed { values, bad_tokens })
}

/// Streams values from `source` into `sink` in input order and returns the number of skipped
/// tokens.
pub fn for_each_value<R: Read>(
    source: R,
    config: &ParseConfig,
    mut sink: impl FnMut(f64),
) -> Result<u64, StreamError> {
    let mut bad = 0u64;
    let mut reject = |line: u64, token: &str| match config.on_bad_token {
        BadTokenPolicy::Error => Err(StreamError::BadToken {
            line,
            token: token.to_owned(),
        }),
        BadTokenPolicy::Skip => {
            bad += 1;
            Ok(())
        }
    };

    match config.format {
        InputFormat::Plain => {
            for (idx, line) in BufReader::new(source).lines().enumerate() {
                let line = line?;
                for token in line.split_whitespace() {
                    match parse_finite(token) {
                        Some(x) => sink(x),
                        None => reject(idx as u64 + 1, token)?,
                    }
                }
            }
        }
        InputFormat::Csv { column, delimiter } => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .delimiter(delimiter)
                .trim(csv::Trim::All)
                .from_reader(source);
            let mut record = csv::StringRecord::new();
            let mut first = true;
            while reader.read_record(&mut record)? {
                let line = record.position().map_or(0, |p| p.line());
                let cell = record.get(column);
                let value = cell.and_then(parse_finite);
                if std::mem::take(&mut first) && value.is_none() {
                    // header row
                    continue;
                }
                match value {
                    Some(x) => sink(x),
                    None => reject(line, cell.unwrap_or(""))?,
                }
            }
        }
    }
    Ok(bad)
}

fn parse_finite(token: &str) -> Option<f64> {
    token.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Opens `path` for reading, with `-` meaning standard input.
pub fn open_input(path: &Path) -> io::Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdin().lock()))
    } else {
        Ok(Box::new(File::open(path)?))
    }
}

/// Fixed-size chunking by value index; the last chunk may be short.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkPlan {
    chunk_size: usize,
}

impl ChunkPlan {
    pub fn new(chunk_size: usize) -> Result<Self, StreamError> {
        if chunk_size == 0 {
            return Err(StreamError::InvalidArgument(
                "chunk size must be at least 1",
            ));
        }
        Ok(Self { chunk_size })
    }

    /// The smallest chunk size that splits `len` values into at most `chunks` chunks.
    pub fn for_chunk_count(len: usize, chunks: usize) -> Result<Self, StreamError> {
        if chunks == 0 {
            return Err(StreamError::InvalidArgument(
                "chunk count must be at least 1",
            ));
        }
        Self::new(len.div_ceil(chunks).max(1))
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }
}

pub fn chunk<'a>(values: &'a [f64], plan: &ChunkPlan) -> Vec<&'a [f64]> {
    values.chunks(plan.chunk_size).collect()
}
