//! Scenario configuration: JSON with unknown-key rejection and cross-checks.

use enlarge_core::encoding::{AnalyticForm, Pauli};
use enlarge_core::evolvers::{BaseHamiltonian, HamiltonianSpec, Method};
use enlarge_core::grid::{make_grid, Grid1D, PacketParams};
use enlarge_core::observables::{ObservableKind, ObservableSpec};
use enlarge_core::transforms::{LinearCoordMap, MapKind};
use serde::{Deserialize, Serialize};

use crate::ScenarioError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum InitialConfig {
    Packet { packet: PacketParams },
    Analytic { analytic: AnalyticForm },
    Spin { spin: Vec<[f64; 2]> },
    RandomSpin { random_spin: RandomSpin },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpin {
    pub dim: usize,
    pub seed: u64,
}

impl InitialConfig {
    pub fn is_spin(&self) -> bool {
        matches!(self, InitialConfig::Spin { .. } | InitialConfig::RandomSpin { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TransformConfig {
    Named { named: String },
    Boost { boost: f64 },
    Coeffs { a00: f64, a10: f64, a11: f64 },
}

impl TransformConfig {
    pub fn resolve(&self) -> Result<LinearCoordMap, ScenarioError> {
        let m = match self {
            TransformConfig::Named { named } => LinearCoordMap::named(named),
            TransformConfig::Boost { boost } => LinearCoordMap::boost(*boost),
            TransformConfig::Coeffs { a00, a10, a11 } => LinearCoordMap::new(*a00, *a10, *a11),
        };
        m.map_err(|e| ScenarioError::config("transform", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_total: f64,
    #[serde(default)]
    pub method: Method,
    /// Number of equal checkpoint intervals; 100 if absent.
    #[serde(default)]
    pub checkpoints: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    pub time: f64,
    pub axis: String,
    pub pauli: Pauli,
}

/// Compare the upper spinor density with the effective nonrelativistic evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NrReference {
    pub parity_sign: i8,
    #[serde(default)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    pub initial: InitialConfig,
    /// Internal spinor for two-component dynamics, `[re, im]` entries; `(1, 0)` if absent.
    #[serde(default)]
    pub spinor: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub transform: Option<TransformConfig>,
    /// Symmetry-axis label; defaults to the map's kind name.
    #[serde(default)]
    pub axis_label: Option<String>,
    pub dynamics: HamiltonianSpec,
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub gate_schedule: Vec<GateConfig>,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    #[serde(default)]
    pub nr_reference: Option<NrReference>,
    #[serde(default)]
    pub norm_tolerance: Option<f64>,
    #[serde(default)]
    pub output: Option<String>,
}

pub const DEFAULT_CHECKPOINTS: usize = 100;
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-10;

impl ScenarioConfig {
    pub fn grid(&self) -> Result<Option<Grid1D>, ScenarioError> {
        self.grid
            .as_ref()
            .map(|g| make_grid(g.n, g.length).map_err(|e| ScenarioError::config("grid", e.to_string())))
            .transpose()
    }

    /// The enlargement map: explicit, or implied by the dynamics.
    pub fn map(&self) -> Result<LinearCoordMap, ScenarioError> {
        match &self.transform {
            Some(t) => t.resolve(),
            None => Ok(match self.dynamics {
                HamiltonianSpec::TimeParityEnlarged { .. } => LinearCoordMap::T_PARITY,
                HamiltonianSpec::DiracParityEnlarged { .. } => LinearCoordMap::X_PARITY,
                _ => LinearCoordMap::IDENTITY,
            }),
        }
    }

    pub fn axis_label(&self) -> Result<String, ScenarioError> {
        Ok(match &self.axis_label {
            Some(l) => l.clone(),
            None => self.map()?.classify().as_str().to_string(),
        })
    }

    pub fn checkpoints(&self) -> usize {
        self.evolution.checkpoints.unwrap_or(DEFAULT_CHECKPOINTS)
    }

    pub fn norm_tolerance(&self) -> f64 {
        self.norm_tolerance.unwrap_or(DEFAULT_NORM_TOLERANCE)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let cfg = |field: &str, msg: String| Err(ScenarioError::config(field, msg));
        if self.name.trim().is_empty() {
            return cfg("name", "must not be empty".into());
        }
        let ev = &self.evolution;
        if !(ev.t_total.is_finite() && ev.t_total > 0.0) {
            return cfg("evolution.t_total", format!("must be positive, got {}", ev.t_total));
        }
        if !(ev.dt.is_finite() && ev.dt > 0.0 && ev.dt <= ev.t_total) {
            return cfg("evolution.dt", format!("must lie in (0, t_total], got {}", ev.dt));
        }
        if ev.checkpoints == Some(0) {
            return cfg("evolution.checkpoints", "must be positive".into());
        }
        if let Some(tol) = self.norm_tolerance {
            if tol.is_nan() || tol <= 0.0 {
                return cfg("norm_tolerance", format!("must be positive, got {tol}"));
            }
        }
        self.dynamics
            .validate()
            .map_err(|e| ScenarioError::config("dynamics", e.to_string()))?;
        let grid = self.grid()?;
        let map = self.map()?;
        let kind = map.classify();
        let label = self.axis_label()?;

        let needs_spin = match &self.dynamics {
            HamiltonianSpec::SpinDense { .. } => true,
            HamiltonianSpec::TimeParityEnlarged { base } => matches!(base, BaseHamiltonian::SpinDense { .. }),
            _ => false,
        };
        if needs_spin != self.initial.is_spin() {
            let want = if needs_spin { "a spin state" } else { "a packet or analytic state" };
            return cfg("initial", format!("{} dynamics needs {want}", self.dynamics.kind_name()));
        }
        if !needs_spin && grid.is_none() {
            return cfg("grid", "required for field dynamics".into());
        }
        match &self.initial {
            InitialConfig::Packet { packet } => packet.validate(),
            InitialConfig::Analytic { analytic } => analytic.packet.validate(),
            _ => Ok(()),
        }
        .map_err(|e| ScenarioError::config("initial", e.to_string()))?;
        if let InitialConfig::Spin { spin } = &self.initial {
            if spin.is_empty() || spin.iter().all(|z| z[0] == 0.0 && z[1] == 0.0) {
                return cfg("initial.spin", "must be a nonzero vector".into());
            }
        }

        let expect_kind = |want: &[MapKind]| {
            if want.contains(&kind) {
                Ok(())
            } else {
                let names: Vec<&str> = want.iter().map(|k| k.as_str()).collect();
                Err(ScenarioError::config(
                    "transform",
                    format!("{} dynamics needs a {} map, got {kind}", self.dynamics.kind_name(), names.join(" or ")),
                ))
            }
        };
        match &self.dynamics {
            HamiltonianSpec::FreeTransportEnlarged { .. } => {
                if kind == MapKind::TimeParity || kind == MapKind::TimeDilation {
                    return cfg("transform", "free transport enlargement needs a map with a spatial partner at t = 0".into());
                }
            }
            HamiltonianSpec::DiracParityEnlarged { .. } => expect_kind(&[MapKind::SpatialParity])?,
            HamiltonianSpec::TimeParityEnlarged { .. } => expect_kind(&[MapKind::TimeParity])?,
            HamiltonianSpec::EffectiveNr { .. } | HamiltonianSpec::SpinDense { .. } => expect_kind(&[MapKind::Identity])?,
        }
        if self.spinor.is_some() && !matches!(self.dynamics, HamiltonianSpec::DiracParityEnlarged { .. }) {
            return cfg("spinor", "only used by dirac-parity-enlarged dynamics".into());
        }
        if let Some(s) = &self.spinor {
            if s.len() != 2 || s.iter().all(|z| z[0] == 0.0 && z[1] == 0.0) {
                return cfg("spinor", "must be a nonzero two-component vector".into());
            }
        }
        if let Some(nr) = &self.nr_reference {
            if !matches!(self.dynamics, HamiltonianSpec::DiracParityEnlarged { .. }) {
                return cfg("nr_reference", "only valid with dirac-parity-enlarged dynamics".into());
            }
            if nr.parity_sign.abs() != 1 {
                return cfg("nr_reference.parity_sign", format!("must be +1 or -1, got {}", nr.parity_sign));
            }
            if let HamiltonianSpec::DiracParityEnlarged { potential, .. } = &self.dynamics {
                if !potential.is_odd() {
                    return cfg("nr_reference", "the effective equation needs an odd potential".into());
                }
            }
        }

        let mut prev = f64::NEG_INFINITY;
        for (i, g) in self.gate_schedule.iter().enumerate() {
            let field = format!("gate_schedule[{i}]");
            if !(0.0..=ev.t_total).contains(&g.time) {
                return cfg(&format!("{field}.time"), format!("{} is outside [0, {}]", g.time, ev.t_total));
            }
            if g.time < prev {
                return cfg(&format!("{field}.time"), "schedule must be sorted by time".into());
            }
            prev = g.time;
            if g.axis != label {
                return cfg(&format!("{field}.axis"), format!("unknown axis {:?}; the scenario axis is {label:?}", g.axis));
            }
        }
        for (i, o) in self.observables.iter().enumerate() {
            let field = format!("observables[{i}]");
            o.validate().map_err(|e| ScenarioError::config(&field, e.to_string()))?;
            if let Some(axes) = &o.axes {
                if let Some(bad) = axes.iter().find(|a| **a != label) {
                    return cfg(&format!("{field}.axes"), format!("unknown axis {bad:?}"));
                }
            }
            let spatial = !matches!(o.kind, ObservableKind::Norm | ObservableKind::SpinMatrix { .. });
            if spatial && self.initial.is_spin() {
                return cfg(&field, "spatial observable on a spin scenario".into());
            }
        }
        let mut labels: Vec<String> = self.observables.iter().map(|o| o.label()).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return cfg("observables", format!("duplicate observable name {:?}", w[0]));
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| ScenarioError::config("json", e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"{
        "name": "identity-transport",
        "grid": {"n": 256, "length": 32.0},
        "initial": {"packet": {"x0": -4.0, "gamma_x": 1.0}},
        "transform": {"named": "identity"},
        "dynamics": {"kind": "free-transport-enlarged"},
        "evolution": {"dt": 0.1, "t_total": 4.0}
    }"#;

    #[test]
    fn minimal_config_parses() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.map().unwrap(), LinearCoordMap::IDENTITY);
        assert_eq!(c.axis_label().unwrap(), "identity");
        assert_eq!(c.checkpoints(), 100);
    }

    #[test]
    fn named_parity_resolves() {
        let text = MINIMAL.replace("\"identity\"}", "\"x-parity\"}");
        let c = parse_config(&text).unwrap();
        let m = c.map().unwrap();
        assert_eq!((m.a00, m.a10, m.a11), (1.0, 0.0, -1.0));
        assert_eq!(c.axis_label().unwrap(), "spatial-parity");
    }

    #[test]
    fn late_gate_rejected() {
        let text = MINIMAL.replace(
            "\"evolution\"",
            r#""gate_schedule": [{"time": 5.0, "axis": "identity", "pauli": "Z"}], "evolution""#,
        );
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("gate_schedule[0].time"), "{err}");
    }

    #[test]
    fn unsorted_and_unknown_axis_rejected() {
        let unsorted = MINIMAL.replace(
            "\"evolution\"",
            r#""gate_schedule": [{"time": 2.0, "axis": "identity", "pauli": "Z"}, {"time": 1.0, "axis": "identity", "pauli": "Z"}], "evolution""#,
        );
        assert!(parse_config(&unsorted).unwrap_err().to_string().contains("sorted"));
        let unknown = MINIMAL.replace(
            "\"evolution\"",
            r#""gate_schedule": [{"time": 1.0, "axis": "boost", "pauli": "Z"}], "evolution""#,
        );
        assert!(parse_config(&unknown).unwrap_err().to_string().contains("unknown axis"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("\"name\"", "\"nmae\": 1, \"name\"");
        assert!(parse_config(&text).is_err());
        let nested = MINIMAL.replace("\"t_total\": 4.0", "\"t_total\": 4.0, \"steps\": 3");
        assert!(parse_config(&nested).is_err());
    }

    #[test]
    fn dynamics_transform_compatibility() {
        let text = MINIMAL.replace(
            r#"{"kind": "free-transport-enlarged"}"#,
            r#"{"kind": "dirac-parity-enlarged", "mass": 1.0, "potential": {}}"#,
        );
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("spatial-parity"), "{err}");
    }

    #[test]
    fn spin_scenario_needs_spin_state() {
        let text = r#"{
            "name": "tp",
            "initial": {"packet": {"x0": 0.0, "gamma_x": 1.0}},
            "dynamics": {"kind": "time-parity-enlarged", "base": {"kind": "spin-dense", "matrix": {"pauli": 3}}},
            "evolution": {"dt": 0.1, "t_total": 1.0}
        }"#;
        assert!(parse_config(text).unwrap_err().to_string().contains("spin state"));
        let ok = text.replace(r#"{"packet": {"x0": 0.0, "gamma_x": 1.0}}"#, r#"{"spin": [[1,0],[1,0]]}"#);
        let c = parse_config(&ok).unwrap();
        assert_eq!(c.axis_label().unwrap(), "time-parity");
    }

    #[test]
    fn observable_validation() {
        let text = MINIMAL.replace(
            "\"evolution\"",
            r#""observables": [{"kind": {"kind": "position-moment", "order": 3}}], "evolution""#,
        );
        assert!(parse_config(&text).unwrap_err().to_string().contains("order"));
    }
}
