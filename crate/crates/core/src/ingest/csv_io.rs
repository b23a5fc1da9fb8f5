use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::Recording;

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

/// Read a channel-per-column CSV. Returns channel names and per-channel
/// samples. Every cell must be a finite number.
pub fn read_recording_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| parse_error(path, 1, 1, format!("unreadable header: {e}")))?
        .clone();
    let channels: Vec<String> = header.iter().map(str::to_string).collect();
    if channels.is_empty() || channels.iter().all(String::is_empty) {
        return Err(parse_error(path, 1, 1, "missing header row"));
    }
    if let Some(i) = channels.iter().position(String::is_empty) {
        return Err(parse_error(path, 1, i + 1, "empty channel name"));
    }
    let mut samples = vec![Vec::new(); channels.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, 1, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for (col, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                parse_error(
                    path,
                    line,
                    col + 1,
                    format!("`{cell}` in channel {} is not a number", channels[col]),
                )
            })?;
            if !value.is_finite() {
                return Err(parse_error(
                    path,
                    line,
                    col + 1,
                    format!("non-finite sample `{cell}` in channel {}", channels[col]),
                ));
            }
            samples[col].push(value);
        }
    }
    Ok((channels, samples))
}

/// Write a recording as CSV with shortest round-trip number formatting.
pub fn write_recording(path: impl AsRef<Path>, recording: &Recording) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    {
        let mut header = csv::Writer::from_writer(&mut out);
        header
            .write_record(recording.channels())
            .and_then(|_| header.flush().map_err(Into::into))
            .map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    }
    let mut line = String::new();
    for i in 0..recording.len() {
        line.clear();
        for (c, data) in recording.samples().iter().enumerate() {
            if c > 0 {
                line.push(',');
            }
            use std::fmt::Write as _;
            let _ = write!(line, "{}", data[i]);
        }
        line.push('\n');
        out.write_all(line.as_bytes()).map_err(io)?;
    }
    out.flush().map_err(io)
}
