//! JSON experiment configuration shared by every config-driven subcommand.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sobstencil::analysis::{HGrid, StencilRecipe};
use sobstencil::functionals::Functional;
use sobstencil::kernels::KernelSpec;
use sobstencil::polyspace::NodeSet;
use sobstencil::stencils::{Stencil, StencilFile};

use crate::error::{CliError, CliResult};
use crate::nodes::read_nodes;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub functional: Option<Functional>,
    pub nodes: Option<NodeSource>,
    /// A stencil file written by `build`, used instead of `nodes` + `method`.
    pub stencil: Option<PathBuf>,
    pub method: Option<StencilRecipe>,
    pub space: Option<KernelSpec>,
    /// Build scale for Sobolev-optimal weights.
    pub h: Option<f64>,
    #[serde(default)]
    pub grid: HGrid,
    /// Method pairs for `compare`; each yields the ratio first/second.
    #[serde(default)]
    pub pairs: Vec<(StencilRecipe, StencilRecipe)>,
    pub precision_bits: Option<u32>,
    pub max_precision_bits: Option<u32>,
    #[serde(default)]
    pub output: Outputs,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NodeSource {
    File(PathBuf),
    Generate(Generator),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub count: usize,
    pub dim: usize,
    pub seed: u64,
    #[serde(default)]
    pub min_separation: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub stencil: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// A parsed config plus the directory its relative paths refer to.
pub struct Loaded {
    pub config: ExperimentConfig,
    pub path: PathBuf,
    base: PathBuf,
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub precision_bits: Option<u32>,
    pub seed: Option<u64>,
}

impl Loaded {
    pub fn read(path: &Path, overrides: Overrides) -> CliResult<Loaded> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })?;
        if let Some(bits) = overrides.precision_bits {
            config.precision_bits = Some(bits);
        }
        if let (Some(seed), Some(NodeSource::Generate(g))) = (overrides.seed, config.nodes.as_mut()) {
            g.seed = seed;
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Loaded { config, path: path.to_path_buf(), base })
    }

    pub fn error(&self, message: impl Into<String>) -> CliError {
        CliError::Config { path: self.path.clone(), message: message.into() }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn precision(&self, default: u32) -> u32 {
        self.config.precision_bits.unwrap_or(default)
    }

    pub fn functional(&self) -> CliResult<Functional> {
        self.config.functional.clone().ok_or_else(|| self.error("missing field `functional`"))
    }

    pub fn space(&self) -> CliResult<KernelSpec> {
        self.config.space.clone().ok_or_else(|| self.error("missing field `space`"))
    }

    pub fn method(&self) -> CliResult<StencilRecipe> {
        self.config.method.clone().ok_or_else(|| self.error("missing field `method`"))
    }

    pub fn nodes(&self, prec: u32) -> CliResult<NodeSet> {
        match &self.config.nodes {
            Some(NodeSource::File(p)) => read_nodes(&self.resolve(p), prec),
            Some(NodeSource::Generate(g)) => Ok(NodeSet::random_with_separation(
                g.count,
                g.dim,
                g.seed,
                g.min_separation,
                prec,
            )?),
            None => Err(self.error("missing field `nodes`")),
        }
    }

    pub fn stencil(&self) -> CliResult<Option<Stencil>> {
        let Some(p) = &self.config.stencil else {
            return Ok(None);
        };
        let path = self.resolve(p);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let file: StencilFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Config { path: path.clone(), message: e.to_string() })?;
        Ok(Some(Stencil::from_json(&file)?))
    }
}
