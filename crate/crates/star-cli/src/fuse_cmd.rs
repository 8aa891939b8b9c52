//! Soft-attention fusion over feature-vector files.

use std::path::PathBuf;

use serde::Serialize;
use star_core::export::{self, SidecarHeader, SidecarKind, SIDECAR_VERSION};
use star_core::{fusion, Matrix};

use crate::args::FuseArgs;
use crate::encode::ensure_writable_dir;
use crate::error::{CliError, CliResult};

#[derive(Serialize)]
struct FuseSummary {
    n_maps: usize,
    dim: usize,
    weights: Vec<f64>,
    fused: PathBuf,
}

fn read_vector(path: &PathBuf) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let values: Vec<f64> = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{path:?}: expected a JSON array of numbers: {e}")))?;
    if values.is_empty() {
        return Err(CliError::input(format!("{path:?}: empty vector")));
    }
    Ok(values)
}

pub fn cmd_fuse(args: &FuseArgs) -> CliResult<()> {
    ensure_writable_dir(&args.out)?;
    let maps = args
        .vectors
        .iter()
        .map(read_vector)
        .collect::<CliResult<Vec<_>>>()?;
    let dim = maps[0].len();

    let params = match &args.params {
        Some(path) => {
            let file = std::fs::File::open(path)?;
            fusion::ScorerParams::from_json(std::io::BufReader::new(file))?
        }
        None => {
            log::info!("no --params given; using seeded initializer (seed {})", args.seed);
            fusion::ScorerParams::seeded(dim, args.seed)?
        }
    };

    let result = fusion::fuse(&maps, &params)?;

    let fused_path = args.out.join("fused.f32");
    let plane = Matrix::from_vec(dim, 1, result.fused.clone()).expect("vector plane");
    let header = SidecarHeader {
        version: SIDECAR_VERSION,
        width: dim,
        height: 1,
        channels: 1,
        clip_id: "fused".into(),
        kind: SidecarKind::Vector,
        metric: None,
        normalization: None,
        segment_bounds: None,
    };
    export::write_sidecar(
        std::io::BufWriter::new(std::fs::File::create(&fused_path)?),
        &header,
        &[&plane],
    )?;

    let summary = FuseSummary {
        n_maps: maps.len(),
        dim,
        weights: result.weights,
        fused: fused_path,
    };
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}
