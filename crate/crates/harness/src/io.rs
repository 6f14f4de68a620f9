//! Stream files.
//!
//! JSONL holds one round per line, either reduced (`{"p": [p1, ..., pN]}`)
//! or full (`{"dists": [[...], ...], "x": k}` with a 0-based symbol index,
//! reduced on ingestion). CSV holds a header row and then N probability
//! columns per round.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use softbayes_core::{Error as CoreError, ExpertStream, ReducedRound};

use crate::error::{HarnessError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineRecord {
    p: Option<Vec<f64>>,
    dists: Option<Vec<Vec<f64>>>,
    x: Option<usize>,
}

#[derive(Serialize)]
struct ReducedLine<'a> {
    p: &'a [f64],
}

fn line_error(line: usize, message: impl ToString) -> HarnessError {
    HarnessError::StreamLine { line, message: message.to_string() }
}

fn push_round(stream: &mut Option<ExpertStream>, round: ReducedRound, line: usize) -> Result<()> {
    let stream = match stream {
        Some(s) => s,
        None => stream.insert(ExpertStream::new(round.len()).map_err(|e| line_error(line, e))?),
    };
    stream.push(round).map_err(|e| line_error(line, e))
}

/// Parses a JSONL stream. Blank lines are skipped.
pub fn read_jsonl<R: Read>(reader: R) -> Result<ExpertStream> {
    let mut stream = None;
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let number = k + 1;
        let line = line.map_err(|e| line_error(number, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: LineRecord = serde_json::from_str(&line).map_err(|e| line_error(number, e))?;
        let round = match record {
            LineRecord { p: Some(p), dists: None, x: None } => ReducedRound::new(p),
            LineRecord { p: None, dists: Some(dists), x: Some(x) } => ReducedRound::from_distributions(&dists, x),
            _ => return Err(line_error(number, "expected either `p` or both `dists` and `x`")),
        }
        .map_err(|e| line_error(number, e))?;
        push_round(&mut stream, round, number)?;
    }
    stream.ok_or(HarnessError::Core(CoreError::EmptyStream))
}

/// Parses a CSV stream with a header row.
pub fn read_csv<R: Read>(reader: R) -> Result<ExpertStream> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let width = rdr.headers()?.len();
    let mut stream = None;
    for record in rdr.records() {
        let record = record?;
        let number = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(line_error(number, format!("expected {width} columns, found {}", record.len())));
        }
        let p = record
            .iter()
            .map(|field| field.parse::<f64>().map_err(|_| line_error(number, format!("invalid probability `{field}`"))))
            .collect::<Result<Vec<_>>>()?;
        let round = ReducedRound::new(p).map_err(|e| line_error(number, e))?;
        push_round(&mut stream, round, number)?;
    }
    stream.ok_or(HarnessError::Core(CoreError::EmptyStream))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a stream file, choosing CSV for a `.csv` extension and JSONL otherwise.
pub fn read_stream(path: &Path) -> Result<ExpertStream> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    if is_csv(path) {
        read_csv(file)
    } else {
        read_jsonl(file)
    }
}

/// Writes reduced JSONL. Values use shortest round-trip formatting, so
/// reading the file back reproduces the stream exactly.
pub fn write_jsonl<W: Write>(stream: &ExpertStream, mut writer: W) -> Result<()> {
    for round in stream.rounds() {
        serde_json::to_writer(&mut writer, &ReducedLine { p: round.as_slice() })?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(stream: &ExpertStream, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record((1..=stream.experts()).map(|i| format!("p{i}")))?;
    for round in stream.rounds() {
        wtr.write_record(round.as_slice().iter().map(|p| p.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes a stream file in the format implied by its extension.
pub fn write_stream(stream: &ExpertStream, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let writer = std::io::BufWriter::new(file);
    if is_csv(path) {
        write_csv(stream, writer)
    } else {
        write_jsonl(stream, writer)
    }
}
