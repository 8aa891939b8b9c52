//! Materialize per-gesture frame directories out of longer sources.

use std::path::Path;

use serde::Serialize;
use star_core::corpus::{self, ManifestEntry};

use crate::args::SegmentArgs;
use crate::encode::ensure_writable_dir;
use crate::error::{CliError, CliResult};

#[derive(Serialize)]
struct SegmentSummary {
    clips: usize,
    frames: usize,
    manifest: std::path::PathBuf,
}

pub fn cmd_segment(args: &SegmentArgs) -> CliResult<()> {
    ensure_writable_dir(&args.out)?;
    let text = std::fs::read_to_string(&args.manifest)?;
    let mut entries = corpus::parse_manifest(&text)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    for entry in &mut entries {
        entry.source = entry.resolved_source(base);
    }

    let mut rewritten = Vec::with_capacity(entries.len());
    let mut frames_written = 0usize;
    for entry in &entries {
        let clip = corpus::load_clip(entry)?;
        let clip_dir = args.out.join(&entry.clip_id);
        std::fs::create_dir_all(&clip_dir)?;
        for (idx, frame) in clip.frames().iter().enumerate() {
            let mut img = image::RgbImage::new(frame.width() as u32, frame.height() as u32);
            for (dst, src) in img.pixels_mut().zip(frame.pixels()) {
                *dst = image::Rgb([
                    src.r.round().clamp(0.0, 255.0) as u8,
                    src.g.round().clamp(0.0, 255.0) as u8,
                    src.b.round().clamp(0.0, 255.0) as u8,
                ]);
            }
            img.save(clip_dir.join(corpus::frame_file_name(idx + 1)))
                .map_err(CliError::from)?;
            frames_written += 1;
        }
        log::info!("segmented {} ({} frames)", entry.clip_id, clip.len());
        rewritten.push(ManifestEntry {
            clip_id: entry.clip_id.clone(),
            source: entry.clip_id.clone().into(),
            start_frame: 1,
            end_frame: clip.len(),
            label: entry.label.clone(),
        });
    }

    let manifest_path = args.out.join("manifest.jsonl");
    std::fs::write(&manifest_path, corpus::serialize_manifest(&rewritten))?;

    println!(
        "{}",
        serde_json::to_string(&SegmentSummary {
            clips: rewritten.len(),
            frames: frames_written,
            manifest: manifest_path,
        })?
    );
    Ok(())
}
