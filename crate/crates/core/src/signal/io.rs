//! On-disk formats for signals and window sets.
//!
//! Signals travel either as single-channel CSV (one sample per line, no
//! header; the rate is supplied out of band) or in a small binary
//! container: magic `GAS1`, a u32 format version, the rate as a 64-bit
//! float and the sample count as a 64-bit unsigned integer, all
//! little-endian, followed by the samples as 64-bit floats.
//!
//! Window sets are CSV with one window per row, sample columns named
//! `s0..s{len-1}`, plus a trailing `label` column when labels exist.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{Signal, WindowSet};

const MAGIC: [u8; 4] = *b"GAS1";
const VERSION: u32 = 1;

/// Reads a one-sample-per-line CSV signal; the rate comes from the caller.
pub fn read_signal_csv(path: impl AsRef<Path>, rate: f64) -> Result<Signal> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let reader = BufReader::new(File::open(path)?);
    let mut samples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            path: path_str.clone(),
            line: i as u64 + 1,
            msg: format!("cannot parse `{text}` as a sample"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                path: path_str,
                line: i as u64 + 1,
                msg: format!("sample {value} is not finite"),
            });
        }
        samples.push(value);
    }
    Signal::new(samples, rate)
}

pub fn write_signal_csv(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    for sample in signal.samples() {
        writeln!(writer, "{sample}")?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads the binary signal container.
pub fn read_signal_bin(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let bad = |msg: String| Error::File {
        path: path_str.clone(),
        msg,
    };

    let mut reader = BufReader::new(File::open(path)?);
    let mut header = [0u8; 24];
    reader
        .read_exact(&mut header)
        .map_err(|_| bad("truncated header".into()))?;
    if header[0..4] != MAGIC {
        return Err(bad("bad magic; not a signal container".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(bad(format!("unsupported container version {version}")));
    }
    let rate = f64::from_le_bytes(header[8..16].try_into().unwrap());
    let len = u64::from_le_bytes(header[16..24].try_into().unwrap());
    let len = usize::try_from(len).map_err(|_| bad(format!("length {len} does not fit")))?;

    let mut payload = vec![0u8; len * 8];
    reader
        .read_exact(&mut payload)
        .map_err(|_| bad(format!("truncated payload; expected {len} samples")))?;
    let mut trailing = [0u8; 1];
    if reader.read(&mut trailing)? != 0 {
        return Err(bad("trailing bytes after payload".into()));
    }

    let samples: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Signal::new(samples, rate).map_err(|e| bad(e.to_string()))
}

pub fn write_signal_bin(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(&MAGIC)?;
    writer.write_all(&VERSION.to_le_bytes())?;
    writer.write_all(&signal.rate().to_le_bytes())?;
    writer.write_all(&(signal.len() as u64).to_le_bytes())?;
    for sample in signal.samples() {
        writer.write_all(&sample.to_le_bytes())?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a window-set CSV; the rate is metadata supplied by the caller.
pub fn read_windows_csv(path: impl AsRef<Path>, rate: f64) -> Result<WindowSet> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Parse {
            path: path_str.clone(),
            line: 0,
            msg: e.to_string(),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path_str.clone(),
            line: 1,
            msg: e.to_string(),
        })?
        .clone();
    let has_labels = headers.iter().next_back() == Some("label");
    let sample_columns = headers.len() - usize::from(has_labels);
    for (i, name) in headers.iter().take(sample_columns).enumerate() {
        if name != format!("s{i}") {
            return Err(Error::Parse {
                path: path_str,
                line: 1,
                msg: format!("expected column `s{i}`, found `{name}`"),
            });
        }
    }

    let mut windows = Vec::new();
    let mut labels = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                return Err(Error::Parse {
                    path: path_str,
                    line: e.position().map_or(0, csv::Position::line),
                    msg: e.to_string(),
                })
            }
        }
        let line = record.position().map_or(0, |p| p.line());
        let mut samples = Vec::with_capacity(sample_columns);
        for field in record.iter().take(sample_columns) {
            let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path_str.clone(),
                line,
                msg: format!("cannot parse `{field}` as a sample"),
            })?;
            samples.push(value);
        }
        windows.push(samples);
        if has_labels {
            labels.push(record[sample_columns].to_string());
        }
    }

    let set = WindowSet::new(windows, sample_columns, rate)?;
    if has_labels {
        set.with_labels(labels)
    } else {
        Ok(set)
    }
}

pub fn write_windows_csv(path: impl AsRef<Path>, set: &WindowSet) -> Result<()> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let as_parse = |e: csv::Error| Error::Parse {
        path: path_str.clone(),
        line: 0,
        msg: e.to_string(),
    };
    let mut writer = csv::Writer::from_path(path).map_err(&as_parse)?;

    let mut header: Vec<String> = (0..set.length()).map(|i| format!("s{i}")).collect();
    if set.labels().is_some() {
        header.push("label".to_string());
    }
    writer.write_record(&header).map_err(&as_parse)?;

    for (i, window) in set.windows().iter().enumerate() {
        let mut row: Vec<String> = window.iter().map(|s| format!("{s}")).collect();
        if let Some(labels) = set.labels() {
            row.push(labels[i].clone());
        }
        writer.write_record(&row).map_err(&as_parse)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_csv_round_trips() {
        let signal = Signal::new(vec![0.5, -1.25, 1.0 / 3.0, 2e-7], 12_345.5).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        write_signal_csv(file.path(), &signal).unwrap();
        let back = read_signal_csv(file.path(), 12_345.5).unwrap();
        assert_eq!(signal, back);
    }

    #[test]
    fn signal_csv_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.csv");
        std::fs::write(&path, "0.5\nnot-a-number\n").unwrap();
        match read_signal_csv(&path, 100.0) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("expected Parse at line 2, got {other:?}"),
        }
        std::fs::write(&path, "0.5\ninf\n").unwrap();
        assert!(read_signal_csv(&path, 100.0).is_err());
    }

    #[test]
    fn signal_container_round_trips() {
        let signal = Signal::new(vec![1.0, -2.5, 3.75], 48_000.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.bin");
        write_signal_bin(&path, &signal).unwrap();
        let back = read_signal_bin(&path).unwrap();
        assert_eq!(signal, back);
    }

    #[test]
    fn signal_container_rejects_corruption() {
        let signal = Signal::new(vec![1.0, 2.0], 10.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.bin");

        write_signal_bin(&path, &signal).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_signal_bin(&path), Err(Error::File { .. })));

        write_signal_bin(&path, &signal).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 4);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_signal_bin(&path), Err(Error::File { .. })));
    }

    #[test]
    fn window_csv_round_trips_with_labels() {
        let set = WindowSet::new(vec![vec![0.0, 1.5], vec![2.0, -0.25]], 2, 100.0)
            .unwrap()
            .with_labels(vec!["healthy".into(), "faulty".into()])
            .unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        write_windows_csv(file.path(), &set).unwrap();
        let back = read_windows_csv(file.path(), 100.0).unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn window_csv_round_trips_without_labels() {
        let set = WindowSet::new(vec![vec![0.5; 3]; 4], 3, 1.0).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        write_windows_csv(file.path(), &set).unwrap();
        let back = read_windows_csv(file.path(), 1.0).unwrap();
        assert_eq!(set, back);
        assert!(back.labels().is_none());
    }
}
