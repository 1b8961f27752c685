//! The `.cgsd` dataset file format.
//!
//! ```text
//! offset 0   "CGSD"
//! offset 4   version      u32 LE (= 1)
//! offset 8   header_len   u32 LE
//! offset 12  header       UTF-8 JSON, header_len bytes
//! payload    for split in train, valid, test:
//!              for sample in split:
//!                input   T*d_in  f32 LE, row-major
//!                target  T*d_out f32 LE, row-major
//!                mask    ceil(T/8) bytes, bit t at byte t/8, bit t%8 (LSB first)
//! ```
//!
//! The header records the task, configuration, seed, metric, dimensions,
//! slot layout, channel layout and every sample length, so the payload can
//! be read without any other context.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{self, Read, Write};
use thiserror::Error;

use crate::config::{TaskConfig, TaskId};
use crate::model::{Dataset, MetricKind, Sample, Slot, Split};
use crate::rng::Seed;
use crate::tasks::{channel_layout, ChannelLayout};

pub const MAGIC: &[u8; 4] = b"CGSD";
pub const VERSION: u32 = 1;
pub const EXTENSION: &str = "cgsd";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic at offset 0: expected \"CGSD\", found {found:?}")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported version {version} at offset 4")]
    BadVersion { version: u32 },
    #[error("malformed header at offset 12: {reason}")]
    BadHeader { reason: String },
    #[error("truncated file at byte offset {offset}: {what}")]
    Truncated { offset: u64, what: String },
    #[error("{extra} unexpected trailing bytes after payload at offset {offset}")]
    TrailingBytes { offset: u64, extra: u64 },
}

/// Sample counts and lengths of one split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitHeader {
    pub name: Split,
    pub n_samples: usize,
    /// Timeline length of every sample, in order.
    pub lengths: Vec<usize>,
}

/// JSON header of a `.cgsd` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub task: TaskId,
    pub config: TaskConfig,
    pub seed: Seed,
    pub metric: MetricKind,
    pub d_in: usize,
    pub d_out: usize,
    pub slot_layout: Option<Vec<Slot>>,
    pub splits: Vec<SplitHeader>,
    pub channel_layout: ChannelLayout,
}

impl Header {
    pub fn of(d: &Dataset) -> Self {
        Header {
            task: d.task,
            config: d.config.clone(),
            seed: d.seed,
            metric: d.metric,
            d_in: d.d_in,
            d_out: d.d_out,
            slot_layout: d.slot_layout.clone(),
            splits: d
                .splits()
                .iter()
                .map(|(name, samples)| SplitHeader {
                    name: *name,
                    n_samples: samples.len(),
                    lengths: samples.iter().map(Sample::len).collect(),
                })
                .collect(),
            channel_layout: channel_layout(&d.config),
        }
    }

    /// Payload bytes implied by the header.
    pub fn payload_len(&self) -> u64 {
        self.splits
            .iter()
            .flat_map(|s| s.lengths.iter())
            .map(|&t| sample_bytes(t, self.d_in, self.d_out))
            .sum()
    }
}

fn sample_bytes(t: usize, d_in: usize, d_out: usize) -> u64 {
    (t * (d_in + d_out) * 4 + t.div_ceil(8)) as u64
}

/// Writes `d` and returns the number of bytes written.
pub fn write_dataset<W: Write>(d: &Dataset, mut sink: W) -> Result<u64, FormatError> {
    let header = serde_json::to_vec(&Header::of(d)).map_err(|e| FormatError::BadHeader {
        reason: e.to_string(),
    })?;
    let mut n = 0u64;
    let mut put = |sink: &mut W, bytes: &[u8]| -> io::Result<()> {
        n += bytes.len() as u64;
        sink.write_all(bytes)
    };
    put(&mut sink, MAGIC)?;
    put(&mut sink, &VERSION.to_le_bytes())?;
    put(&mut sink, &(header.len() as u32).to_le_bytes())?;
    put(&mut sink, &header)?;
    let mut buf = Vec::new();
    for (_, samples) in d.splits() {
        for s in samples {
            buf.clear();
            for v in s.input.iter().chain(s.target.iter()) {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            let mut bits = vec![0u8; s.len().div_ceil(8)];
            for (t, m) in s.eval_mask.iter().enumerate() {
                if *m {
                    bits[t / 8] |= 1 << (t % 8);
                }
            }
            buf.extend_from_slice(&bits);
            put(&mut sink, &buf)?;
        }
    }
    sink.flush()?;
    Ok(n)
}

/// Serializes `d` into memory.
pub fn dataset_bytes(d: &Dataset) -> Vec<u8> {
    let mut out = Vec::new();
    write_dataset(d, &mut out).expect("writing to memory cannot fail");
    out
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content hash of the serialized dataset.
pub fn content_hash(d: &Dataset) -> String {
    sha256_hex(&dataset_bytes(d))
}

/// Hash of a task configuration's canonical JSON.
pub fn config_hash(config: &TaskConfig) -> String {
    sha256_hex(&serde_json::to_vec(config).expect("config serializes"))[..16].to_string()
}

struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Cursor<R> {
    fn take(&mut self, buf: &mut [u8], what: impl FnOnce() -> String) -> Result<(), FormatError> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => {
                    return Err(FormatError::Truncated {
                        offset: self.offset + filled as u64,
                        what: what(),
                    })
                }
                Ok(k) => filled += k,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }
}

/// Reads a dataset written by [`write_dataset`].
pub fn read_dataset<R: Read>(source: R) -> Result<Dataset, FormatError> {
    let mut cur = Cursor {
        inner: source,
        offset: 0,
    };
    let mut word = [0u8; 4];
    cur.take(&mut word, || "magic".into())?;
    if &word != MAGIC {
        return Err(FormatError::BadMagic { found: word });
    }
    cur.take(&mut word, || "version".into())?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(FormatError::BadVersion { version });
    }
    cur.take(&mut word, || "header length".into())?;
    let header_len = u32::from_le_bytes(word) as usize;
    let mut header = vec![0u8; header_len];
    cur.take(&mut header, || "header".into())?;
    let header: Header = serde_json::from_slice(&header).map_err(|e| FormatError::BadHeader {
        reason: e.to_string(),
    })?;
    let order: Vec<Split> = header.splits.iter().map(|s| s.name).collect();
    if order != Split::ALL {
        return Err(FormatError::BadHeader {
            reason: format!("splits must be train, valid, test; found {order:?}"),
        });
    }
    if header.splits.iter().any(|s| s.lengths.len() != s.n_samples) {
        return Err(FormatError::BadHeader {
            reason: "sample length list does not match n_samples".into(),
        });
    }

    let (d_in, d_out) = (header.d_in, header.d_out);
    let mut splits: Vec<Vec<Sample>> = Vec::with_capacity(3);
    let mut buf = Vec::new();
    for sh in &header.splits {
        let mut samples = Vec::with_capacity(sh.n_samples);
        for (i, &t) in sh.lengths.iter().enumerate() {
            buf.resize(sample_bytes(t, d_in, d_out) as usize, 0);
            cur.take(&mut buf, || {
                format!("split {} sample {i} of {}", sh.name, sh.n_samples)
            })?;
            let mut floats = buf
                .chunks_exact(4)
                .take(t * (d_in + d_out))
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]));
            let input: Vec<f32> = floats.by_ref().take(t * d_in).collect();
            let target: Vec<f32> = floats.collect();
            let bits = &buf[t * (d_in + d_out) * 4..];
            let mask: Vec<bool> = (0..t).map(|k| bits[k / 8] >> (k % 8) & 1 == 1).collect();
            samples.push(Sample {
                input: Array2::from_shape_vec((t, d_in), input).expect("sized by header"),
                target: Array2::from_shape_vec((t, d_out), target).expect("sized by header"),
                eval_mask: Array1::from(mask),
                metric: header.metric,
                slot_layout: header.slot_layout.clone(),
            });
        }
        splits.push(samples);
    }
    let mut rest = Vec::new();
    cur.inner.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(FormatError::TrailingBytes {
            offset: cur.offset,
            extra: rest.len() as u64,
        });
    }
    let test = splits.pop().unwrap();
    let valid = splits.pop().unwrap();
    let train = splits.pop().unwrap();
    Ok(Dataset {
        task: header.task,
        config: header.config,
        seed: header.seed,
        train,
        valid,
        test,
        metric: header.metric,
        d_in,
        d_out,
        slot_layout: header.slot_layout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{preset, Difficulty};
    use crate::tasks::generate;

    fn small_postcasting() -> Dataset {
        generate(
            &preset(TaskId::DiscretePostcasting, Difficulty::Small),
            Seed(1),
        )
        .unwrap()
    }

    #[test]
    fn header_reports_split_sizes() {
        let bytes = dataset_bytes(&small_postcasting());
        let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let header: Header = serde_json::from_slice(&bytes[12..12 + len]).unwrap();
        let counts: Vec<usize> = header.splits.iter().map(|s| s.n_samples).collect();
        assert_eq!(counts, [100, 20, 100]);
        assert!(header
            .splits
            .iter()
            .all(|s| s.lengths.iter().all(|&t| t == 50)));
        assert_eq!(
            header.config,
            preset(TaskId::DiscretePostcasting, Difficulty::Small)
        );
    }

    #[test]
    fn payload_size_arithmetic() {
        let d = small_postcasting();
        let bytes = dataset_bytes(&d);
        let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let payload = bytes.len() - 12 - len;
        // 220 samples * (50*(3+3)*4 + ceil(50/8))
        assert_eq!(payload, 220 * (50 * 6 * 4 + 7));
        assert_eq!(Header::of(&d).payload_len(), payload as u64);
    }

    #[test]
    fn writes_are_deterministic_and_round_trip() {
        let d = small_postcasting();
        let a = dataset_bytes(&d);
        assert_eq!(a, dataset_bytes(&d));
        assert_eq!(read_dataset(&a[..]).unwrap(), d);
    }

    #[test]
    fn corrupted_magic() {
        let mut bytes = dataset_bytes(&small_postcasting());
        bytes[0] = b'X';
        let err = read_dataset(&bytes[..]).unwrap_err();
        assert!(matches!(err, FormatError::BadMagic { .. }));
        assert!(err.to_string().contains("offset 0"));
    }

    #[test]
    fn bad_version() {
        let mut bytes = dataset_bytes(&small_postcasting());
        bytes[4] = 9;
        assert!(matches!(
            read_dataset(&bytes[..]),
            Err(FormatError::BadVersion { version: 9 })
        ));
    }

    #[test]
    fn truncation_names_split_and_sample() {
        let bytes = dataset_bytes(&small_postcasting());
        let per = 50 * 6 * 4 + 7;
        let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let payload_start = 12 + len;
        // cut inside valid sample 3
        let cut = payload_start + per * (100 + 3) + 11;
        match read_dataset(&bytes[..cut]) {
            Err(FormatError::Truncated { offset, what }) => {
                assert_eq!(offset, cut as u64);
                assert_eq!(what, "split valid sample 3 of 20");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            read_dataset(&bytes[..payload_start - 1]),
            Err(FormatError::Truncated { .. })
        ));
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let mut bytes = dataset_bytes(&small_postcasting());
        bytes.push(0);
        assert!(matches!(
            read_dataset(&bytes[..]),
            Err(FormatError::TrailingBytes { extra: 1, .. })
        ));
    }
}
