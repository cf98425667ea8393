//! Run configuration: a versioned JSON document plus command-line overrides.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dynamics::{RigidState, ShapeCurve};
use crate::shape_space::PhysicalConstants;
use crate::strokes::{StrokeProgram, MOONWALK_OMEGA, STROKE_MODES};

pub const SCHEMA: &str = "amoeba.run/v1";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Must equal [`SCHEMA`].
    pub schema: String,
    /// Shape modes `N`; defaults to the smallest count the preset needs.
    pub n_modes: Option<usize>,
    pub mu: f64,
    pub rho_f: f64,
    pub rho_0: Option<f64>,
    pub neutral_buoyancy: Option<bool>,
    pub preset: Option<String>,
    /// Steering rate of the preset's active pair.
    pub steering: Option<f64>,
    /// High-frequency rate for `moonwalk_reverse`.
    pub omega: Option<f64>,
    /// CSV table `t, a1, b1, …` used instead of a preset.
    pub shape_table: Option<PathBuf>,
    pub t0: f64,
    /// End time; defaults to a preset-dependent horizon.
    pub t1: Option<f64>,
    pub dt: f64,
    pub q0: [f64; 3],
    pub record_every: usize,
    pub self_check: bool,
    /// Reject runs whose shapes leave `𝒟` (physically rather than mathematically allowable).
    pub require_domain: bool,
    pub seed: u64,
    pub round_trip: bool,
    pub ceilings: Ceilings,
    pub rank: RankConfig,
    pub maneuver: ManeuverConfig,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Ceilings {
    pub vol_drift: f64,
    pub constraint_f: f64,
    pub round_trip: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RankMode {
    /// Lifted fields on `Q × S_2`, brackets up to length `max_len`.
    Config,
    /// `{X^1, X^2, [X^1, X^2]}` on the shape sphere.
    Shape,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RankConfig {
    pub mode: RankMode,
    pub draws: usize,
    /// Explicit shape points; when empty, points are generated from the seed.
    pub points: Vec<Vec<f64>>,
    pub max_len: usize,
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ManeuverKind {
    Moonwalk,
    Commutator,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ManeuverConfig {
    pub kind: ManeuverKind,
    /// Two-mode field indices in `1..=4`.
    pub pair: [usize; 2],
    pub epsilon: f64,
    pub cycles: usize,
    pub c0: Vec<f64>,
    /// Phase lengths for the scaling table.
    pub epsilons: Vec<f64>,
    pub substeps: usize,
    /// Optional trajectory CSV for the demo run.
    pub trajectory_csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: SCHEMA.into(),
            n_modes: None,
            mu: 0.5,
            rho_f: 1.0,
            rho_0: None,
            neutral_buoyancy: None,
            preset: None,
            steering: None,
            omega: None,
            shape_table: None,
            t0: 0.0,
            t1: None,
            dt: 1e-2,
            q0: [0.0; 3],
            record_every: 1,
            self_check: false,
            require_domain: false,
            seed: 0,
            round_trip: false,
            ceilings: Ceilings::default(),
            rank: RankConfig::default(),
            maneuver: ManeuverConfig::default(),
        }
    }
}

impl Default for Ceilings {
    fn default() -> Self {
        Ceilings { vol_drift: 1e-9, constraint_f: 1e-8, round_trip: 1e-6 }
    }
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig { mode: RankMode::Config, draws: 20, points: Vec::new(), max_len: 4, tol: 1e-10 }
    }
}

impl Default for ManeuverConfig {
    fn default() -> Self {
        ManeuverConfig {
            kind: ManeuverKind::Commutator,
            pair: [1, 2],
            epsilon: 0.1,
            cycles: 50,
            c0: vec![0.5, 0.0, 0.0, 0.0],
            epsilons: vec![0.1, 0.05, 0.025],
            substeps: 20,
            trajectory_csv: None,
        }
    }
}

fn bad(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}

/// Modes a preset needs to carry its active coefficients.
pub fn preset_modes(name: &str) -> usize {
    match name {
        "straight" | "circular" => 2,
        "pair34" => 4,
        _ => STROKE_MODES,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad("config", e))?;
        if cfg.schema != SCHEMA {
            return Err(bad("schema", format!("expected `{SCHEMA}`, got `{}`", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn preset_name(&self) -> &str {
        self.preset.as_deref().unwrap_or("straight")
    }

    pub fn modes(&self) -> usize {
        self.n_modes.unwrap_or_else(|| preset_modes(self.preset_name()))
    }

    pub fn t_end(&self) -> f64 {
        self.t1.unwrap_or_else(|| {
            self.t0
                + match self.preset_name() {
                    "circular" => 24.0 * PI / self.steering.unwrap_or(1.0).abs().max(1e-3),
                    "straight" => 2.0 * PI,
                    _ => 4.0 * PI,
                }
        })
    }

    pub fn q0(&self) -> RigidState {
        RigidState::new(self.q0[0], self.q0[1], self.q0[2])
    }

    pub fn omega(&self) -> f64 {
        self.omega.unwrap_or(MOONWALK_OMEGA)
    }

    /// Checks shared by every command.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.dt > 0.0) {
            return Err(bad("dt", format!("must be positive, got {}", self.dt)));
        }
        let t1 = self.t_end();
        if !(t1 > self.t0) {
            return Err(bad("t1", format!("must exceed t0 = {}, got {t1}", self.t0)));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(bad("mu", format!("must lie in (0, 1), got {}", self.mu)));
        }
        if self.record_every == 0 {
            return Err(bad("record_every", "must be at least 1"));
        }
        self.constants()?;
        if self.shape_table.is_none() {
            let name = self.preset_name();
            if !crate::strokes::PRESETS.contains(&name) {
                return Err(bad("preset", format!("unknown preset `{name}`")));
            }
            let n = self.modes();
            if n < preset_modes(name) || n > STROKE_MODES {
                return Err(bad("n_modes", format!("preset `{name}` needs {}..={STROKE_MODES} modes, got {n}", preset_modes(name))));
            }
        }
        Ok(())
    }

    pub fn constants(&self) -> Result<PhysicalConstants, CliError> {
        let r = match (self.rho_0, self.neutral_buoyancy) {
            (Some(_), Some(true)) => return Err(bad("rho_0", "give either rho_0 or neutral_buoyancy, not both")),
            (None, Some(false)) => return Err(bad("rho_0", "required when neutral_buoyancy is false")),
            (Some(r0), _) => PhysicalConstants::new(self.rho_f, r0, self.mu),
            (None, _) => PhysicalConstants::neutral(self.rho_f, self.mu),
        };
        r.map_err(CliError::from)
    }

    pub fn stroke(&self) -> Result<StrokeProgram, CliError> {
        let mut p = StrokeProgram::preset(self.preset_name())?.with_mu(self.mu);
        if let Some(h) = self.steering {
            p = p.with_steering(h);
        }
        if p.name == "moonwalk_reverse" {
            p = p.with_omega(self.omega());
        }
        Ok(p.truncated(self.modes()))
    }

    /// The shape curve to drive: a preset or a loaded table.
    pub fn curve(&self) -> Result<Box<dyn ShapeCurve>, CliError> {
        match &self.shape_table {
            Some(path) => Ok(Box::new(TableCurve::load(path)?)),
            None => Ok(Box::new(self.stroke()?)),
        }
    }
}

/// Shape curve given by samples, linearly interpolated and held constant
/// outside the sampled range.
#[derive(Clone, Debug)]
pub struct TableCurve {
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl TableCurve {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| bad("shape_table", e))?;
        let mut times = Vec::new();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| bad("shape_table", e))?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| bad("shape_table", e))?;
            times.push(vals[0]);
            rows.push(vals[1..].to_vec());
        }
        Self::new(times, rows)
    }

    pub fn new(times: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self, CliError> {
        if times.len() < 2 {
            return Err(bad("shape_table", "need at least two rows"));
        }
        let width = rows[0].len();
        if width == 0 || !width.is_multiple_of(2) || rows.iter().any(|r| r.len() != width) {
            return Err(bad("shape_table", "every row needs t followed by the same even number of shape axes"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(bad("shape_table", "times must increase strictly"));
        }
        Ok(TableCurve { times, rows })
    }

    fn segment(&self, t: f64) -> (usize, f64) {
        let last = self.times.len() - 2;
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1).min(last);
        (i, self.times[i + 1] - self.times[i])
    }
}

impl ShapeCurve for TableCurve {
    fn n_modes(&self) -> usize {
        self.rows[0].len() / 2
    }
    fn shape(&self, t: f64, _aux: &[f64]) -> Vec<f64> {
        let t = t.clamp(self.times[0], *self.times.last().unwrap());
        let (i, h) = self.segment(t);
        let s = (t - self.times[i]) / h;
        self.rows[i].iter().zip(&self.rows[i + 1]).map(|(a, b)| a + s * (b - a)).collect()
    }
    fn velocity(&self, t: f64, _aux: &[f64]) -> Option<Vec<f64>> {
        if t < self.times[0] || t > *self.times.last().unwrap() {
            return Some(vec![0.0; self.rows[0].len()]);
        }
        let (i, h) = self.segment(t);
        Some(self.rows[i].iter().zip(&self.rows[i + 1]).map(|(a, b)| (b - a) / h).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn schema_is_checked() {
        let err = RunConfig::from_json(r#"{"schema": "amoeba.run/v0"}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(RunConfig::from_json(r#"{"schema": "amoeba.run/v1", "dt": 0.1}"#).is_ok());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(RunConfig::from_json(r#"{"schema": "amoeba.run/v1", "d_t": 0.1}"#).is_err());
    }

    #[test]
    fn zero_dt_names_the_field() {
        let cfg = RunConfig { dt: 0.0, ..Default::default() };
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("dt"), "{msg}");
    }

    #[test]
    fn density_choice_is_exclusive() {
        let both = RunConfig { rho_0: Some(0.7), neutral_buoyancy: Some(true), ..Default::default() };
        assert!(both.validate().is_err());
        let neither = RunConfig { neutral_buoyancy: Some(false), ..Default::default() };
        assert!(neither.validate().is_err());
        let explicit = RunConfig { rho_0: Some(0.7), ..Default::default() };
        assert_eq!(explicit.constants().unwrap().rho_0, 0.7);
    }

    #[test]
    fn preset_mode_counts() {
        let cfg = RunConfig { preset: Some("pair34".into()), n_modes: Some(2), ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { preset: Some("pair34".into()), ..Default::default() };
        assert_eq!(cfg.modes(), 4);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn table_interpolates() {
        let tc = TableCurve::new(vec![0.0, 1.0, 3.0], vec![vec![0.0, 0.0], vec![0.2, 0.0], vec![0.2, 0.4]]).unwrap();
        assert_eq!(tc.shape(0.5, &[]), vec![0.1, 0.0]);
        assert_eq!(tc.shape(2.0, &[]), vec![0.2, 0.2]);
        assert_eq!(tc.velocity(2.0, &[]).unwrap(), vec![0.0, 0.2]);
        assert_eq!(tc.shape(9.0, &[]), vec![0.2, 0.4]);
    }
}
