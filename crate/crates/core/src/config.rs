//! Scenario configuration.
//!
//! Configs are TOML. Every key is optional; missing keys take the reference
//! values (500 m field, 200 nodes, `p_opt = 0.05`, the reference radio). Radio
//! constants are written in datasheet units and converted to joules when the
//! simulation is built.
//!
//! ```toml
//! nodes = 200
//! field_side = 500.0
//! protocol = "becc"
//! seed = 7
//!
//! [heterogeneity]
//! kind = "two-level"
//! e0 = 1.0
//! lambda = 0.2
//! alpha = 3.0
//!
//! [radio]
//! e_elec_nj = 50.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::election::{Protocol, TwoLevelParams};
use crate::radio::{RadioError, RadioParams};
use crate::world::{advanced_count, HeterogeneitySpec, Position, WorldError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config syntax: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error("p_opt must lie in (0, 1), got {0}")]
    BadPOpt(f64),
    #[error("replicate count must be at least one")]
    NoReplicates,
    #[error("SEP needs a two-level network")]
    SepNeedsTwoLevel,
    #[error("sweep grid `{0}` is empty")]
    EmptyGrid(&'static str),
}

/// Radio constants as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSpec {
    /// nJ/bit
    pub e_elec_nj: f64,
    /// nJ/bit/signal
    pub e_da_nj: f64,
    /// pJ/bit/m²
    pub eps_fs_pj: f64,
    /// pJ/bit/m⁴
    pub eps_mp_pj: f64,
    pub msg_bits: u64,
}

impl Default for RadioSpec {
    fn default() -> Self {
        Self {
            e_elec_nj: 50.0,
            e_da_nj: 5.0,
            eps_fs_pj: 10.0,
            eps_mp_pj: 0.0013,
            msg_bits: 4000,
        }
    }
}

impl RadioSpec {
    pub fn to_params(&self) -> Result<RadioParams, RadioError> {
        RadioParams::from_datasheet_units(
            self.e_elec_nj,
            self.eps_fs_pj,
            self.eps_mp_pj,
            self.e_da_nj,
            self.msg_bits,
        )
    }
}

/// Grid points for the two-level sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            lambdas: (1..=9).map(|i| i as f64 / 10.0).collect(),
            alphas: (0..9).map(|i| 0.5 + i as f64 * 0.5).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub nodes: usize,
    pub field_side: f64,
    /// Defaults to the field center.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sink: Option<Position>,
    pub protocol: Protocol,
    pub p_opt: f64,
    /// Round budget. Unset runs until every node is dead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u64>,
    pub seed: u64,
    pub replicates: usize,
    pub heterogeneity: HeterogeneitySpec,
    pub radio: RadioSpec,
    pub sweep: SweepGrid,
}

impl Default for ScenarioConfig {
    /// Multi-level network with energies on [1 J, 5 J], equalized to a 600 J
    /// total.
    fn default() -> Self {
        Self {
            nodes: 200,
            field_side: 500.0,
            sink: None,
            protocol: Protocol::Becc,
            p_opt: 0.05,
            rounds: None,
            seed: 1,
            replicates: 20,
            heterogeneity: HeterogeneitySpec::MultiLevel {
                e_min: 1.0,
                e_max: 5.0,
                total_target: Some(600.0),
            },
            radio: RadioSpec::default(),
            sweep: SweepGrid::default(),
        }
    }
}

impl ScenarioConfig {
    /// Two-level base used by the sweeps: `E0 = 1 J`, `lambda = 0.2`,
    /// `alpha = 3`.
    pub fn two_level_default() -> Self {
        Self {
            heterogeneity: HeterogeneitySpec::TwoLevel {
                e0: 1.0,
                lambda: 0.2,
                alpha: 3.0,
            },
            ..Self::default()
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Single-line JSON rendering, used in output headers.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("config serializes to JSON")
    }

    pub fn radio_params(&self) -> Result<RadioParams, RadioError> {
        self.radio.to_params()
    }

    pub fn two_level_params(&self) -> Option<TwoLevelParams> {
        match self.heterogeneity {
            HeterogeneitySpec::TwoLevel { lambda, alpha, .. } => {
                Some(TwoLevelParams { lambda, alpha })
            }
            HeterogeneitySpec::MultiLevel { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.nodes == 0 {
            return Err(WorldError::NoNodes.into());
        }
        if !(self.field_side > 0.0 && self.field_side.is_finite()) {
            return Err(WorldError::BadSide(self.field_side).into());
        }
        if let Some(s) = self.sink {
            let side = self.field_side;
            if !(0.0..=side).contains(&s.x) || !(0.0..=side).contains(&s.y) {
                return Err(WorldError::SinkOutside { x: s.x, y: s.y, side }.into());
            }
        }
        if !(self.p_opt > 0.0 && self.p_opt < 1.0) {
            return Err(ConfigError::BadPOpt(self.p_opt));
        }
        if self.replicates == 0 {
            return Err(ConfigError::NoReplicates);
        }
        self.heterogeneity.validate()?;
        match self.heterogeneity {
            HeterogeneitySpec::TwoLevel { lambda, .. } => {
                let advanced = advanced_count(self.nodes, lambda);
                if advanced == 0 || advanced == self.nodes {
                    return Err(WorldError::DegenerateTwoLevel {
                        lambda,
                        n: self.nodes,
                        advanced,
                    }
                    .into());
                }
            }
            HeterogeneitySpec::MultiLevel {
                e_min,
                e_max,
                total_target: Some(target),
            } => {
                let n = self.nodes as f64;
                let (lo, hi) = (n * e_min, n * e_max);
                if !(target >= lo && target <= hi) {
                    return Err(WorldError::TargetOutOfRange { target, lo, hi }.into());
                }
            }
            HeterogeneitySpec::MultiLevel { .. } => {}
        }
        if self.protocol == Protocol::Sep && !self.heterogeneity.is_two_level() {
            return Err(ConfigError::SepNeedsTwoLevel);
        }
        self.radio_params()?;
        if self.sweep.lambdas.is_empty() {
            return Err(ConfigError::EmptyGrid("lambdas"));
        }
        if self.sweep.alphas.is_empty() {
            return Err(ConfigError::EmptyGrid("alphas"));
        }
        Ok(())
    }
}
