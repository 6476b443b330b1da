use std::path::{Path, PathBuf};

use anyhow::Result;
use log::info;
use serde_json::json;

use tamp_core::ensembles::generate;
use tamp_core::Matrix;

use crate::config::ExperimentConfig;
use crate::output::write_json;
use crate::Status;

pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Status> {
    let spec = cfg.ensemble()?;
    let g = generate(spec)?;
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(format!("{}_n{}.tamp", spec.kind.name(), spec.n)));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    g.values.save(&path)?;

    let symmetry = g.values.sub(&g.values.transpose())?.max_abs();
    info!("{}: n = {}, max |A − Aᵀ| = {symmetry:.3e}", spec.kind.name(), spec.n);
    let involution = if spec.kind.is_involution() {
        let err = g.values.matmul(&g.values)?.sub(&Matrix::identity(spec.n))?.max_abs();
        info!("involution check: max |A² − I| = {err:.3e}");
        Some(err)
    } else {
        None
    };

    let mut sidecar = path.clone().into_os_string();
    sidecar.push(".json");
    write_json(
        Path::new(&sidecar),
        &json!({
            "spec": spec,
            "provenance": g.provenance,
            "config_sha256": cfg.hash(),
            "max_asymmetry": symmetry,
            "max_involution_error": involution,
        }),
    )?;
    info!("wrote {}", path.display());
    Ok(Status::Pass)
}
