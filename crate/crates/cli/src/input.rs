//! Signal ingestion from single-column CSV/text files and 16-bit PCM WAV.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use specrank::{Signal, Signal64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: line {line}: cannot parse `{content}` as a number", path.display())]
    Parse { path: PathBuf, line: u64, content: String },
    #[error("{}: line {line}: expected one column, found {columns}", path.display())]
    Columns { path: PathBuf, line: u64, columns: usize },
    #[error("{}: no samples", path.display())]
    Empty { path: PathBuf },
    #[error("{}: unsupported WAV format ({detail}); only 16-bit integer PCM is read", path.display())]
    UnsupportedWav { path: PathBuf, detail: String },
    #[error("{}: channel {channel} requested but the file has {channels}", path.display())]
    ChannelOutOfRange { path: PathBuf, channel: usize, channels: usize },
    #[error("{}: malformed WAV: {source}", path.display())]
    Wav { path: PathBuf, source: hound::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {source}", path.display())]
    Signal { path: PathBuf, source: specrank::Error },
}

fn is_numeric(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok()
}

/// Reads one sample per line. A non-numeric first line is taken as a header.
pub fn read_csv_signal(path: &Path) -> Result<Signal64, InputError> {
    let file = File::open(path).map_err(|source| InputError::Io { path: path.into(), source })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|source| InputError::Csv { path: path.into(), source })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.len() != 1 {
            return Err(InputError::Columns { path: path.into(), line, columns: record.len() });
        }
        let field = &record[0];
        if i == 0 && !is_numeric(field) {
            continue;
        }
        let value = field
            .parse::<f64>()
            .map_err(|_| InputError::Parse { path: path.into(), line, content: field.to_string() })?;
        samples.push(value);
    }
    if samples.is_empty() {
        return Err(InputError::Empty { path: path.into() });
    }
    Signal::new(samples).map_err(|source| InputError::Signal { path: path.into(), source })
}

/// Reads one channel of a 16-bit PCM WAV file, scaled to `[-1, 1)`.
pub fn read_wav_signal(path: &Path, channel: usize) -> Result<Signal64, InputError> {
    let reader = hound::WavReader::open(path).map_err(|source| match source {
        hound::Error::IoError(source) => InputError::Io { path: path.into(), source },
        hound::Error::Unsupported => InputError::UnsupportedWav { path: path.into(), detail: "unsupported encoding".into() },
        source => InputError::Wav { path: path.into(), source },
    })?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(InputError::UnsupportedWav {
            path: path.into(),
            detail: format!("{:?} with {} bits per sample", spec.sample_format, spec.bits_per_sample),
        });
    }
    let channels = spec.channels as usize;
    if channel >= channels {
        return Err(InputError::ChannelOutOfRange { path: path.into(), channel, channels });
    }
    let interleaved = reader
        .into_samples::<i16>()
        .collect::<Result<Vec<i16>, _>>()
        .map_err(|source| InputError::Wav { path: path.into(), source })?;
    let samples: Vec<f64> = interleaved.iter().skip(channel).step_by(channels).map(|&s| s as f64 / 32768.0).collect();
    if samples.is_empty() {
        return Err(InputError::Empty { path: path.into() });
    }
    Signal::new(samples)
        .and_then(|s| s.with_sample_rate(spec.sample_rate as f64))
        .map_err(|source| InputError::Signal { path: path.into(), source })
}

/// Dispatches on the file extension: `.wav` is read as audio, anything else as CSV.
pub fn read_signal(path: &Path, channel: usize) -> Result<Signal64, InputError> {
    let is_wav = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    if is_wav {
        read_wav_signal(path, channel)
    } else {
        read_csv_signal(path)
    }
}
