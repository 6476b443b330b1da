use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use tamp_core::amp::AMPConfig;
use tamp_core::ensembles::EnsembleSpec;
use tamp_core::state_evolution::{BlockNormalization, DEFAULT_THRESHOLD};
use tamp_core::Diagram;

/// A catalog name, the text form, or an inline `{v, roots, edges}` object.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiagramRef {
    Text(String),
    Inline(Diagram),
}

impl DiagramRef {
    pub fn resolve(&self) -> Result<(String, Diagram)> {
        match self {
            DiagramRef::Text(s) => {
                let d = Diagram::parse(s).with_context(|| format!("diagram `{s}`"))?;
                Ok((s.clone(), d))
            }
            DiagramRef::Inline(d) => Ok((d.to_text(), d.clone())),
        }
    }
}

fn one() -> usize {
    1
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(default)]
    pub diagrams: Vec<DiagramRef>,
    #[serde(default)]
    pub amp: Option<AMPConfig>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub dimension_sweep: Vec<usize>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub block_normalization: BlockNormalization,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ensemble: None,
            diagrams: Vec::new(),
            amp: None,
            trials: 1,
            dimension_sweep: Vec::new(),
            output_dir: None,
            master_seed: 0,
            block_normalization: BlockNormalization::default(),
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if let Some(e) = &self.ensemble {
            e.validate()?;
        }
        if let Some(a) = &self.amp {
            a.validate()?;
        }
        Ok(())
    }

    pub fn ensemble(&self) -> Result<&EnsembleSpec> {
        self.ensemble.as_ref().context("no ensemble given (use --config or --kind/--n)")
    }

    pub fn amp(&self) -> Result<&AMPConfig> {
        self.amp.as_ref().context("the config has no `amp` section")
    }

    /// Dimension sweep, falling back to the ensemble's `n`.
    pub fn sweep(&self) -> Result<Vec<usize>> {
        if !self.dimension_sweep.is_empty() {
            return Ok(self.dimension_sweep.clone());
        }
        Ok(vec![self.ensemble()?.n])
    }

    pub fn diagrams(&self) -> Result<Vec<(String, Diagram)>> {
        self.diagrams.iter().map(DiagramRef::resolve).collect()
    }

    /// Hex SHA-256 of the effective configuration.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
