//! Manifest-driven ingestion: locate clips, read frames from directories
//! or raw containers, and apply the geometric transforms.
//!
//! The manifest is JSON Lines: one object per line with `clip_id`,
//! `source`, `start_frame`, `end_frame` (1-based, inclusive) and `label`.
//! Unknown fields are ignored; validation failures carry the line number.

pub mod container;
pub mod transform;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ClipSource, Frame, Pixel};

/// One labeled gesture clip inside a longer source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub clip_id: String,
    pub source: PathBuf,
    /// First frame of the gesture, 1-based inclusive.
    pub start_frame: usize,
    /// Last frame of the gesture, 1-based inclusive.
    pub end_frame: usize,
    pub label: String,
}

impl ManifestEntry {
    pub fn frame_count(&self) -> usize {
        self.end_frame - self.start_frame + 1
    }

    /// Resolve a relative `source` against the manifest's directory.
    pub fn resolved_source(&self, base: &Path) -> PathBuf {
        if self.source.is_absolute() {
            self.source.clone()
        } else {
            base.join(&self.source)
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.clip_id.is_empty() {
            return Err("clip_id must not be empty".into());
        }
        // clip ids become output file names
        if !self
            .clip_id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return Err(format!(
                "clip_id {:?} may only contain ASCII letters, digits, '-', '_', '.'",
                self.clip_id
            ));
        }
        if self.start_frame < 1 {
            return Err("start_frame must be at least 1".into());
        }
        if self.end_frame < self.start_frame + 1 {
            return Err(format!(
                "end_frame {} must be at least start_frame + 1 = {}",
                self.end_frame,
                self.start_frame + 1
            ));
        }
        Ok(())
    }
}

/// Parse a JSON-Lines manifest. Blank lines are skipped; errors name the
/// offending line (1-based).
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry =
            serde_json::from_str(line).map_err(|e| Error::Manifest {
                line: line_no,
                message: e.to_string(),
            })?;
        entry.validate().map_err(|message| Error::Manifest {
            line: line_no,
            message,
        })?;
        entries.push(entry);
    }
    Ok(entries)
}

/// Serialize entries back to JSON Lines (inverse of [`parse_manifest`]).
pub fn serialize_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::new();
    for entry in entries {
        out.push_str(&serde_json::to_string(entry).expect("manifest entries serialize"));
        out.push('\n');
    }
    out
}

const FRAME_EXTENSIONS: [&str; 4] = ["png", "jpg", "jpeg", "bmp"];

fn frame_file(dir: &Path, index: usize) -> Option<PathBuf> {
    FRAME_EXTENSIONS.iter().find_map(|ext| {
        let path = dir.join(format!("{index:06}.{ext}"));
        path.is_file().then_some(path)
    })
}

/// Zero-padded frame file name used by the frame-directory layout.
pub fn frame_file_name(index: usize) -> String {
    format!("{index:06}.png")
}

/// Count frames stored in a directory: the largest contiguous run
/// `000001..` of numbered image files.
pub fn frame_dir_count(dir: &Path) -> usize {
    let mut n = 0;
    while frame_file(dir, n + 1).is_some() {
        n += 1;
    }
    n
}

fn read_frame_image(path: &Path) -> Result<Frame> {
    let img = image::open(path)?.to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = img
        .pixels()
        .map(|p| Pixel::new(p.0[0] as f64, p.0[1] as f64, p.0[2] as f64))
        .collect();
    Frame::new(w, h, data)
}

/// Load the frames a manifest entry points at.
///
/// Directory sources hold zero-padded numbered image files; file sources
/// are raw containers (see [`container`]). Frames are validated to share
/// one geometry.
pub fn load_clip(entry: &ManifestEntry) -> Result<ClipSource> {
    entry.validate().map_err(|message| Error::Manifest {
        line: 0,
        message,
    })?;
    let frames = if entry.source.is_dir() {
        let mut frames = Vec::with_capacity(entry.frame_count());
        for index in entry.start_frame..=entry.end_frame {
            let path = frame_file(&entry.source, index).ok_or(Error::MissingFrame {
                index,
                path: entry.source.clone(),
            })?;
            frames.push(read_frame_image(&path)?);
        }
        frames
    } else {
        container::read_frames(&entry.source, entry.start_frame, entry.end_frame)?
    };
    ClipSource::new(frames, entry.clip_id.clone(), Some(entry.label.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry_json(clip_id: &str, start: usize, end: usize) -> String {
        format!(
            r#"{{"clip_id":"{clip_id}","source":"frames","start_frame":{start},"end_frame":{end},"label":"wave"}}"#
        )
    }

    #[test]
    fn empty_manifest_parses_to_nothing() {
        assert!(parse_manifest("").unwrap().is_empty());
        assert!(parse_manifest("\n\n").unwrap().is_empty());
    }

    #[test]
    fn single_entry_parses() {
        let entries = parse_manifest(&entry_json("g01", 3, 7)).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].clip_id, "g01");
        assert_eq!(entries[0].frame_count(), 5);
    }

    #[test]
    fn degenerate_range_names_the_line() {
        let text = format!("{}\n{}", entry_json("a", 1, 4), entry_json("b", 5, 5));
        match parse_manifest(&text) {
            Err(Error::Manifest { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected manifest error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_names_the_line() {
        let text = format!("{}\nnot json", entry_json("a", 1, 4));
        match parse_manifest(&text) {
            Err(Error::Manifest { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected manifest error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let text = r#"{"clip_id":"x","source":"s","start_frame":1,"end_frame":3,"label":"l","extra":42}"#;
        assert_eq!(parse_manifest(text).unwrap().len(), 1);
    }

    #[test]
    fn hostile_clip_ids_are_rejected() {
        let text = r#"{"clip_id":"../esc","source":"s","start_frame":1,"end_frame":3,"label":"l"}"#;
        assert!(parse_manifest(text).is_err());
    }

    #[test]
    fn round_trip() {
        let text = format!("{}\n{}", entry_json("a-1", 1, 9), entry_json("b_2", 4, 12));
        let entries = parse_manifest(&text).unwrap();
        let again = parse_manifest(&serialize_manifest(&entries)).unwrap();
        assert_eq!(entries, again);
    }
}
