//! Raw planar frame container.
//!
//! Layout: the magic bytes `STRV1\n`, a single-line JSON header
//! `{"width":W,"height":H,"frames":N}`, then N frames stored as
//! channel-planar unsigned 8-bit (R plane, G plane, B plane, each
//! `H*W` bytes, row-major). Random access by frame index is a seek.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::round_half_up;
use crate::model::{Frame, Pixel};

pub const MAGIC: &[u8; 6] = b"STRV1\n";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerHeader {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
}

fn bad(path: &Path, message: impl Into<String>) -> Error {
    Error::Container {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Read the magic and header; returns the header and the byte offset of
/// the first frame.
fn read_header_inner(reader: &mut BufReader<File>, path: &Path) -> Result<(ContainerHeader, u64)> {
    let mut magic = [0u8; 6];
    reader
        .read_exact(&mut magic)
        .map_err(|_| bad(path, "file too short for magic"))?;
    if &magic != MAGIC {
        return Err(bad(path, "bad magic bytes"));
    }
    let mut line = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        reader
            .read_exact(&mut byte)
            .map_err(|_| bad(path, "unterminated header line"))?;
        if byte[0] == b'\n' {
            break;
        }
        if line.len() > 4096 {
            return Err(bad(path, "header line too long"));
        }
        line.push(byte[0]);
    }
    let header: ContainerHeader = serde_json::from_slice(&line)
        .map_err(|e| bad(path, format!("bad header JSON: {e}")))?;
    if header.width == 0 || header.height == 0 {
        return Err(bad(path, "zero-sized frames"));
    }
    Ok((header, (6 + line.len() + 1) as u64))
}

pub fn read_header(path: &Path) -> Result<ContainerHeader> {
    let mut reader = BufReader::new(File::open(path)?);
    Ok(read_header_inner(&mut reader, path)?.0)
}

/// Read frames `start..=end` (1-based, inclusive).
pub fn read_frames(path: &Path, start: usize, end: usize) -> Result<Vec<Frame>> {
    if start < 1 || end < start {
        return Err(bad(path, format!("bad frame range {start}..={end}")));
    }
    let mut reader = BufReader::new(File::open(path)?);
    let (header, data_offset) = read_header_inner(&mut reader, path)?;
    if end > header.frames {
        return Err(Error::MissingFrame {
            index: (header.frames + 1).max(start),
            path: path.to_path_buf(),
        });
    }
    let plane_len = header.width * header.height;
    let frame_len = 3 * plane_len;
    reader.seek(SeekFrom::Start(data_offset + ((start - 1) * frame_len) as u64))?;

    let mut frames = Vec::with_capacity(end - start + 1);
    let mut raw = vec![0u8; frame_len];
    for index in start..=end {
        reader.read_exact(&mut raw).map_err(|_| Error::MissingFrame {
            index,
            path: path.to_path_buf(),
        })?;
        let (r, rest) = raw.split_at(plane_len);
        let (g, b) = rest.split_at(plane_len);
        let data = (0..plane_len)
            .map(|i| Pixel::new(r[i] as f64, g[i] as f64, b[i] as f64))
            .collect();
        frames.push(Frame::new(header.width, header.height, data)?);
    }
    Ok(frames)
}

/// Write frames to a container. Channel values are rounded half-up and
/// clamped to `[0, 255]`; frames loaded from 8-bit sources round-trip
/// exactly.
pub fn write_frames(path: &Path, frames: &[Frame]) -> Result<()> {
    if frames.is_empty() {
        return Err(bad(path, "refusing to write an empty container"));
    }
    let (w, h) = (frames[0].width(), frames[0].height());
    for f in frames {
        if f.width() != w || f.height() != h {
            return Err(Error::DimensionMismatch {
                expected_width: w,
                expected_height: h,
                width: f.width(),
                height: f.height(),
            });
        }
    }
    let header = ContainerHeader {
        width: w,
        height: h,
        frames: frames.len(),
    };
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(MAGIC)?;
    serde_json::to_writer(&mut writer, &header)?;
    writer.write_all(b"\n")?;
    let quant = |v: f64| round_half_up(v).clamp(0.0, 255.0) as u8;
    let mut plane = vec![0u8; w * h];
    for frame in frames {
        for (select, _) in [(0, "r"), (1, "g"), (2, "b")] {
            for (dst, px) in plane.iter_mut().zip(frame.pixels()) {
                *dst = quant(match select {
                    0 => px.r,
                    1 => px.g,
                    _ => px.b,
                });
            }
            writer.write_all(&plane)?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_frames() -> Vec<Frame> {
        (0..4)
            .map(|k| {
                Frame::from_fn(3, 2, |i, j| {
                    Pixel::new(
                        (k * 10 + i) as f64,
                        (j * 5) as f64,
                        (k + i + j) as f64,
                    )
                })
            })
            .collect()
    }

    #[test]
    fn write_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clip.strv");
        let frames = sample_frames();
        write_frames(&path, &frames).unwrap();

        let header = read_header(&path).unwrap();
        assert_eq!(
            header,
            ContainerHeader {
                width: 3,
                height: 2,
                frames: 4
            }
        );

        let back = read_frames(&path, 1, 4).unwrap();
        assert_eq!(back, frames);

        // partial range
        let middle = read_frames(&path, 2, 3).unwrap();
        assert_eq!(middle[0], frames[1]);
        assert_eq!(middle[1], frames[2]);
    }

    #[test]
    fn missing_frames_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clip.strv");
        write_frames(&path, &sample_frames()).unwrap();
        match read_frames(&path, 3, 9) {
            Err(Error::MissingFrame { index, .. }) => assert_eq!(index, 5),
            other => panic!("expected MissingFrame, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.strv");
        std::fs::write(&path, b"NOTSTR\n{}").unwrap();
        assert!(matches!(
            read_header(&path),
            Err(Error::Container { .. })
        ));
    }
}
