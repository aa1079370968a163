//! Run configuration and the named scenario presets.
//!
//! Config files are strict JSON: every key must be known. A file may name a
//! `"preset"`; its remaining keys are merged over that preset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::migration::MigrationParams;
use crate::opinion::{OpinionParams, CONSENSUS_EPS, CONSENSUS_WINDOW};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    #[default]
    SmallWorld,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub n: usize,
    /// Base lattice degree of the small-world graph.
    pub k: usize,
    pub p_rewire: f64,
}

impl Default for GraphSpec {
    fn default() -> Self {
        GraphSpec {
            kind: GraphKind::SmallWorld,
            n: 50,
            k: 4,
            p_rewire: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConsensusSpec {
    pub eps: f64,
    pub window: usize,
}

impl Default for ConsensusSpec {
    fn default() -> Self {
        ConsensusSpec {
            eps: CONSENSUS_EPS,
            window: CONSENSUS_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub scenario: String,
    pub graph: GraphSpec,
    pub opinion: OpinionParams,
    pub migration: MigrationParams,
    /// Number of steps `T`.
    pub horizon: usize,
    /// Opinion states and assignments are written every `record_stride` steps.
    pub record_stride: usize,
    pub seed: u64,
    pub replicates: usize,
    pub output_dir: Option<PathBuf>,
    pub consensus: ConsensusSpec,
    /// Window `P` for growth and migration rates.
    pub rate_window: usize,
    pub record_assignments: bool,
    /// Burn-in for fluctuation ranges; half the horizon when absent.
    pub burn_in: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scenario: "custom".into(),
            graph: GraphSpec::default(),
            opinion: OpinionParams::default(),
            migration: MigrationParams::default(),
            horizon: 50,
            record_stride: 1,
            seed: 0,
            replicates: 1,
            output_dir: None,
            consensus: ConsensusSpec::default(),
            rate_window: 5,
            record_assignments: false,
            burn_in: None,
        }
    }
}

impl SimConfig {
    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.horizon / 2)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.graph;
        match g.kind {
            GraphKind::SmallWorld => {
                if g.n < 3 {
                    return Err(Error::param("n", format!("small-world graph needs n >= 3, got {}", g.n)));
                }
                if !g.k.is_multiple_of(2) || g.k < 2 || g.k >= g.n {
                    return Err(Error::param("k", format!("need even k with 2 <= k < n, got {}", g.k)));
                }
                if !(0.0..=1.0).contains(&g.p_rewire) {
                    return Err(Error::param("p_rewire", format!("must lie in [0, 1], got {}", g.p_rewire)));
                }
            }
            GraphKind::Star if g.n < 2 => {
                return Err(Error::param("n", format!("star graph needs n >= 2, got {}", g.n)));
            }
            GraphKind::Star => {}
        }
        self.opinion.validate()?;
        self.migration.validate(g.n)?;
        if self.record_stride == 0 {
            return Err(Error::param("record_stride", "must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(Error::param("replicates", "must be at least 1"));
        }
        if self.consensus.eps.is_nan() || self.consensus.eps <= 0.0 {
            return Err(Error::param("eps", format!("must be positive, got {}", self.consensus.eps)));
        }
        if self.consensus.window == 0 {
            return Err(Error::param("window", "must be at least 1"));
        }
        if self.rate_window == 0 {
            return Err(Error::param("rate_window", "must be at least 1"));
        }
        if self.burn_in() > self.horizon {
            return Err(Error::param("burn_in", format!("{} exceeds horizon {}", self.burn_in(), self.horizon)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parse and validate a config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(config_error)?;
        Self::from_value(value)
    }

    fn from_value(mut value: Value) -> Result<Self> {
        let obj = value.as_object_mut().ok_or_else(|| Error::Config {
            field: "<root>".into(),
            reason: "config must be a JSON object".into(),
        })?;
        let merged = match obj.remove("preset") {
            None => value,
            Some(Value::String(name)) => {
                let mut base = serde_json::to_value(preset(&name)?)?;
                merge(&mut base, value);
                base
            }
            Some(other) => {
                return Err(Error::Config {
                    field: "preset".into(),
                    reason: format!("expected a preset name, got {other}"),
                })
            }
        };
        let cfg: SimConfig = serde_json::from_value(merged).map_err(config_error)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn config_error(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    let field = msg
        .strip_prefix("unknown field `")
        .and_then(|rest| rest.split('`').next())
        .unwrap_or("<document>")
        .to_string();
    Error::Config { field, reason: msg }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SimConfig::from_json(&text)
}

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> SimConfig,
}

impl Preset {
    pub fn config(&self) -> SimConfig {
        let mut c = (self.build)();
        c.scenario = self.name.to_string();
        c
    }
}

fn opinions(n: usize, d: f64, phi: f64, sigma: f64, horizon: usize) -> SimConfig {
    SimConfig {
        graph: GraphSpec { n, ..Default::default() },
        opinion: OpinionParams::new(d, phi, sigma),
        horizon,
        ..Default::default()
    }
}

fn compound(d: f64, phi: f64, sigma: f64, delta: f64, horizon: usize) -> SimConfig {
    SimConfig {
        migration: MigrationParams::with_delta(delta),
        ..opinions(50, d, phi, sigma, horizon)
    }
}

/// Every named scenario, one per figure panel.
pub fn list_presets() -> &'static [Preset] {
    macro_rules! p {
        ($name:literal, $summary:literal, $build:expr) => {
            Preset {
                name: $name,
                summary: $summary,
                build: || $build,
            }
        };
    }
    static PRESETS: &[Preset] = &[
        p!("fig1a", "n=50 d=1 phi=0.5 sigma=0.4", opinions(50, 1.0, 0.5, 0.4, 50)),
        p!("fig1b", "n=50 d=1 phi=0.4 sigma=0.5", opinions(50, 1.0, 0.4, 0.5, 50)),
        p!("fig1c", "n=50 d=0.8 phi=0.09 sigma=0.9", opinions(50, 0.8, 0.09, 0.9, 50)),
        p!("fig2a", "n=50 d=1 phi=0.5 sigma=0.9", opinions(50, 1.0, 0.5, 0.9, 50)),
        p!("fig2b", "n=50 d=0.3 phi=1 sigma=0.9", opinions(50, 0.3, 1.0, 0.9, 50)),
        p!("fig2c", "n=50 d=0.3 phi=1 sigma=0.8", opinions(50, 0.3, 1.0, 0.8, 50)),
        p!("fig3a", "n=50 d=1 phi=1 sigma=1", opinions(50, 1.0, 1.0, 1.0, 200)),
        p!("fig3b", "n=50 d=1 phi=1 sigma=0.99", opinions(50, 1.0, 1.0, 0.99, 200)),
        p!("fig3c", "n=50 d=1 phi=0.99 sigma=1", opinions(50, 1.0, 0.99, 1.0, 200)),
        p!("fig3d", "n=50 d=0.99 phi=1 sigma=1", opinions(50, 0.99, 1.0, 1.0, 200)),
        p!("fig3e", "n=50 d=0.5 phi=1 sigma=1", opinions(50, 0.5, 1.0, 1.0, 200)),
        p!("fig3f", "n=50 d=0.1 phi=1 sigma=1", opinions(50, 0.1, 1.0, 1.0, 200)),
        p!("fig4a", "n=500 d=1 phi=0.5 sigma=0.9", opinions(500, 1.0, 0.5, 0.9, 50)),
        p!("fig4b", "n=500 d=0.3 phi=1 sigma=0.9", opinions(500, 0.3, 1.0, 0.9, 50)),
        p!("fig4c", "n=500 d=0.3 phi=1 sigma=0.8", opinions(500, 0.3, 1.0, 0.8, 50)),
        p!("fig5a", "migration n=50 delta=0.3 d=1 phi=0.5 sigma=0.9", compound(1.0, 0.5, 0.9, 0.3, 75)),
        p!("fig5b", "migration n=50 delta=0.8 d=1 phi=0.5 sigma=0.9", compound(1.0, 0.5, 0.9, 0.8, 75)),
        p!("fig6", "migration n=50 delta=0 d=1 phi=0.5 sigma=0.9", compound(1.0, 0.5, 0.9, 0.0, 75)),
        p!("fig7-phase-a", "migration n=50 delta=0.8 d=phi=sigma=1", compound(1.0, 1.0, 1.0, 0.8, 200)),
        p!("fig7-phase-b", "migration n=50 delta=0.3 d=phi=sigma=1", compound(1.0, 1.0, 1.0, 0.3, 200)),
    ];
    PRESETS
}

pub fn preset(name: &str) -> Result<SimConfig> {
    list_presets()
        .iter()
        .find(|p| p.name == name)
        .map(Preset::config)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}
