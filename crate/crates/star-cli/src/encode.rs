//! Clip loading and artifact writing shared by `encode` and `batch`.

use std::path::{Path, PathBuf};

use serde::Serialize;
use star_core::corpus::{self, container, ManifestEntry};
use star_core::export::{self, SidecarHeader, SidecarKind, SIDECAR_VERSION};
use star_core::model::ClipSource;
use star_core::{encode_star_legacy, encode_star_rgb, EncodeConfig, Metric};

use crate::args::{EncodeArgs, EncodeMode};
use crate::error::{CliError, CliResult};

/// One-line JSON summary printed after a successful encode.
#[derive(Serialize)]
pub struct EncodeSummary {
    pub clip_id: String,
    pub n_frames: usize,
    pub metric: Metric,
    pub max_value: f64,
    pub outputs: Vec<PathBuf>,
}

/// Ensure the output directory exists and is writable before any work.
pub fn ensure_writable_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create output directory {dir:?}: {e}")))?;
    let probe = dir.join(format!(".write-probe-{}", std::process::id()));
    std::fs::write(&probe, b"probe")
        .map_err(|e| CliError::Io(format!("output directory {dir:?} is not writable: {e}")))?;
    let _ = std::fs::remove_file(&probe);
    Ok(())
}

/// Load the clip an `encode` invocation points at.
pub fn load_encode_clip(args: &EncodeArgs) -> CliResult<ClipSource> {
    if let Some(manifest_path) = &args.manifest {
        if args.source.is_some() || args.start.is_some() || args.end.is_some() {
            return Err(CliError::input(
                "--manifest takes the frame range from the entry; drop SOURCE/--start/--end",
            ));
        }
        let wanted = args.clip_id.as_deref().expect("clap requires clip_id");
        let text = std::fs::read_to_string(manifest_path)?;
        let entries = corpus::parse_manifest(&text)?;
        let base = manifest_path.parent().unwrap_or(Path::new("."));
        let mut entry = entries
            .into_iter()
            .find(|e| e.clip_id == wanted)
            .ok_or_else(|| CliError::input(format!("manifest has no entry {wanted:?}")))?;
        entry.source = entry.resolved_source(base);
        return Ok(corpus::load_clip(&entry)?);
    }

    let source = args
        .source
        .clone()
        .ok_or_else(|| CliError::input("pass a SOURCE path or --manifest with --clip-id"))?;
    let available = if source.is_dir() {
        corpus::frame_dir_count(&source)
    } else {
        container::read_header(&source)?.frames
    };
    if available == 0 {
        return Err(CliError::input(format!("{source:?} holds no frames")));
    }
    let start = args.start.unwrap_or(1);
    let end = args.end.unwrap_or(available);
    let clip_id = args.clip_id.clone().unwrap_or_else(|| {
        source
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "clip".into())
    });
    if end < start + 1 {
        return Err(CliError::input(format!(
            "frame range {start}..={end} holds no consecutive pair"
        )));
    }
    let entry = ManifestEntry {
        clip_id,
        source,
        start_frame: start,
        end_frame: end,
        label: String::new(),
    };
    Ok(corpus::load_clip(&entry)?)
}

/// Encode a clip and write its PNG(s) plus the float sidecar into
/// `out_dir`. File names derive from the clip id.
pub fn encode_and_write(
    clip: &ClipSource,
    mode: EncodeMode,
    config: &EncodeConfig,
    out_dir: &Path,
) -> CliResult<EncodeSummary> {
    let id = clip.clip_id().to_owned();
    let mut outputs = Vec::new();
    let sidecar_path = out_dir.join(format!("{id}.f32"));

    let max_value = match mode {
        EncodeMode::StarRgb => {
            let star = encode_star_rgb(clip, config)?;
            let png_path = out_dir.join(format!("{id}.png"));
            export::star_rgb_to_image(&star, config.normalization())
                .save(&png_path)
                .map_err(CliError::from)?;
            outputs.push(png_path);

            let header = SidecarHeader {
                version: SIDECAR_VERSION,
                width: star.width(),
                height: star.height(),
                channels: 3,
                clip_id: id.clone(),
                kind: SidecarKind::Rgb,
                metric: Some(config.metric()),
                normalization: Some(config.normalization().name().into()),
                segment_bounds: Some(star.segment_bounds),
            };
            let file = std::fs::File::create(&sidecar_path)?;
            export::write_sidecar(
                std::io::BufWriter::new(file),
                &header,
                &[&star.r, &star.g, &star.b],
            )?;
            outputs.push(sidecar_path);
            star.channels().iter().map(|c| c.max()).fold(0.0, f64::max)
        }
        EncodeMode::Legacy => {
            // weighted-shadow/Sobel encoding is abs-gray only; any other
            // metric yields the plain single-matrix accumulation
            let star = if config.metric() == Metric::AbsGray {
                encode_star_legacy(clip, config)?
            } else {
                star_core::StarGray {
                    m: star_core::accumulate(clip, config.metric(), false)?,
                    m_x: None,
                    m_y: None,
                }
            };
            let images = export::star_gray_to_images(&star, config.normalization());
            let m_path = out_dir.join(format!("{id}.m.png"));
            images.m.save(&m_path).map_err(CliError::from)?;
            outputs.push(m_path);
            if let Some(mx) = images.m_x {
                let path = out_dir.join(format!("{id}.mx.png"));
                mx.save(&path).map_err(CliError::from)?;
                outputs.push(path);
            }
            if let Some(my) = images.m_y {
                let path = out_dir.join(format!("{id}.my.png"));
                my.save(&path).map_err(CliError::from)?;
                outputs.push(path);
            }

            let mut planes: Vec<&star_core::Matrix> = vec![&star.m];
            planes.extend(star.m_x.as_ref());
            planes.extend(star.m_y.as_ref());
            let header = SidecarHeader {
                version: SIDECAR_VERSION,
                width: star.m.width(),
                height: star.m.height(),
                channels: planes.len(),
                clip_id: id.clone(),
                kind: if planes.len() == 3 {
                    SidecarKind::GraySobel
                } else {
                    SidecarKind::Gray
                },
                metric: Some(config.metric()),
                normalization: Some(config.normalization().name().into()),
                segment_bounds: None,
            };
            let file = std::fs::File::create(&sidecar_path)?;
            export::write_sidecar(std::io::BufWriter::new(file), &header, &planes)?;
            outputs.push(sidecar_path);
            star.m.max()
        }
    };

    Ok(EncodeSummary {
        clip_id: id,
        n_frames: clip.len(),
        metric: config.metric(),
        max_value,
        outputs,
    })
}

pub fn cmd_encode(args: &EncodeArgs) -> CliResult<()> {
    let (mode, config) = args.encode.resolve()?;
    ensure_writable_dir(&args.out)?;
    let clip = load_encode_clip(args)?;
    log::info!("encoding {} ({} frames)", clip.clip_id(), clip.len());
    let summary = encode_and_write(&clip, mode, &config, &args.out)?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}
