//! Difference diagnostics between two encoded images.
//!
//! Float sidecars are compared pre-quantization; PNGs fall back to their
//! 8-bit values. The difference is written both as a float sidecar and
//! as a visualization PNG normalized to the full byte range (otherwise
//! near-zero differences would be invisible).

use std::path::{Path, PathBuf};

use serde::Serialize;
use star_core::export::{self, SidecarHeader, SidecarKind, SIDECAR_VERSION};
use star_core::Matrix;

use crate::args::CompareArgs;
use crate::encode::ensure_writable_dir;
use crate::error::{CliError, CliResult};

struct LoadedImage {
    width: usize,
    height: usize,
    planes: Vec<Vec<f64>>,
}

fn load_image(path: &Path) -> CliResult<LoadedImage> {
    if path.extension().and_then(|e| e.to_str()) == Some("f32") {
        let file = std::fs::File::open(path)?;
        let (header, planes) = export::read_sidecar(std::io::BufReader::new(file))?;
        return Ok(LoadedImage {
            width: header.width,
            height: header.height,
            planes: planes
                .into_iter()
                .map(|p| p.into_iter().map(f64::from).collect())
                .collect(),
        });
    }
    match image::open(path)? {
        image::DynamicImage::ImageLuma8(img) => Ok(LoadedImage {
            width: img.width() as usize,
            height: img.height() as usize,
            planes: vec![img.pixels().map(|p| p.0[0] as f64).collect()],
        }),
        other => {
            let img = other.to_rgb8();
            let planes = (0..3)
                .map(|ch| img.pixels().map(|p| p.0[ch] as f64).collect())
                .collect();
            Ok(LoadedImage {
                width: img.width() as usize,
                height: img.height() as usize,
                planes,
            })
        }
    }
}

#[derive(Serialize)]
struct ChannelStats {
    max_abs: f64,
    mean_abs: f64,
}

#[derive(Serialize)]
struct CompareSummary {
    width: usize,
    height: usize,
    channels: usize,
    per_channel: Vec<ChannelStats>,
    max_abs: f64,
    mean_abs: f64,
    /// Scale of the first image (max absolute value), for relative reads.
    scale_a: f64,
    max_rel: f64,
    mean_rel: f64,
    outputs: Vec<PathBuf>,
}

pub fn cmd_compare(args: &CompareArgs) -> CliResult<()> {
    ensure_writable_dir(&args.out)?;
    let a = load_image(&args.image_a)?;
    let b = load_image(&args.image_b)?;
    if a.width != b.width || a.height != b.height {
        return Err(CliError::input(format!(
            "dimension mismatch: {}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    if a.planes.len() != b.planes.len() {
        return Err(CliError::input(format!(
            "channel mismatch: {} vs {}",
            a.planes.len(),
            b.planes.len()
        )));
    }

    let diff_planes: Vec<Matrix> = a
        .planes
        .iter()
        .zip(&b.planes)
        .map(|(pa, pb)| {
            let values = pa.iter().zip(pb).map(|(x, y)| (x - y).abs()).collect();
            Matrix::from_vec(a.width, a.height, values).expect("sized planes")
        })
        .collect::<Vec<_>>();

    let per_channel: Vec<ChannelStats> = diff_planes
        .iter()
        .map(|p| ChannelStats {
            max_abs: p.max_abs(),
            mean_abs: p.values().iter().sum::<f64>() / p.values().len() as f64,
        })
        .collect();
    let max_abs = per_channel.iter().fold(0.0f64, |m, c| m.max(c.max_abs));
    let mean_abs =
        per_channel.iter().map(|c| c.mean_abs).sum::<f64>() / per_channel.len() as f64;
    let scale_a = a
        .planes
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let denom = scale_a.max(f64::MIN_POSITIVE);

    let stem = |p: &Path| {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "image".into())
    };
    let base = format!("{}-vs-{}", stem(&args.image_a), stem(&args.image_b));

    // normalized visualization
    let viz_path = args.out.join(format!("{base}.png"));
    let viz_denom = max_abs;
    let bytes: Vec<Vec<u8>> = diff_planes
        .iter()
        .map(|p| export::quantize_plane(p, viz_denom))
        .collect();
    if bytes.len() == 1 {
        image::GrayImage::from_raw(a.width as u32, a.height as u32, bytes[0].clone())
            .expect("sized buffer")
            .save(&viz_path)
            .map_err(CliError::from)?;
    } else {
        let mut img = image::RgbImage::new(a.width as u32, a.height as u32);
        for (idx, px) in img.pixels_mut().enumerate() {
            *px = image::Rgb([bytes[0][idx], bytes[1][idx], bytes[2][idx]]);
        }
        img.save(&viz_path).map_err(CliError::from)?;
    }

    // raw difference sidecar
    let sidecar_path = args.out.join(format!("{base}.f32"));
    let header = SidecarHeader {
        version: SIDECAR_VERSION,
        width: a.width,
        height: a.height,
        channels: diff_planes.len(),
        clip_id: base,
        kind: if diff_planes.len() == 3 {
            SidecarKind::Rgb
        } else {
            SidecarKind::Gray
        },
        metric: None,
        normalization: None,
        segment_bounds: None,
    };
    let refs: Vec<&Matrix> = diff_planes.iter().collect();
    export::write_sidecar(
        std::io::BufWriter::new(std::fs::File::create(&sidecar_path)?),
        &header,
        &refs,
    )?;

    let summary = CompareSummary {
        width: a.width,
        height: a.height,
        channels: diff_planes.len(),
        per_channel,
        max_abs,
        mean_abs,
        scale_a,
        max_rel: max_abs / denom,
        mean_rel: mean_abs / denom,
        outputs: vec![viz_path, sidecar_path],
    };
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}
