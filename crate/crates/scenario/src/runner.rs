//! Scenario execution: evolution segments between events, gates at events.

use std::fs;
use std::path::Path;
use std::time::Instant;

use enlarge_core::encoding::{
    even_odd_split, AnalyticForm, AxisKind, EnlargedState, InitialState, PauliAxisGate, SymmetryAxis,
};
use enlarge_core::evolvers::dense::{
    assemble_dirac_parity, assemble_free_enlarged, flatten, unflatten, DenseOracle, MAX_GRID_POINTS,
};
use enlarge_core::evolvers::{
    evolve_free_enlarged, evolve_plain, evolve_time_parity, BaseHamiltonian, DiracParityEvolver, EffectiveNrEvolver,
    EvolutionParams, HamiltonianSpec, Method, PlainEvolver,
};
use enlarge_core::grid::{ComplexField, Grid1D};
use enlarge_core::io::{fmt_f64, to_json_lines, write_field, write_state, TimeSeries};
use enlarge_core::observables::{density_profile, evaluate, ApplyOperator, ObservableKind};
use enlarge_core::spin::{random_state, SpinOperator, SpinVector};
use enlarge_core::transforms::{LinearCoordMap, MapKind};
use enlarge_core::Complex64;
use serde_json::json;

use crate::config::{InitialConfig, ScenarioConfig};
use crate::{Result, ScenarioError};

/// Series column holding `Σ_c ⟨Ψ_c|Ψ_c⟩`.
pub const NORM_COLUMN: &str = "enlarged_norm";
/// Series column holding the density discrepancy against the effective equation.
pub const NR_COLUMN: &str = "nr_discrepancy";

#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Field(EnlargedState),
    Spin(EnlargedState<SpinVector>),
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: ScenarioConfig,
    pub series: TimeSeries,
    pub final_state: FinalState,
    /// Density-profile observables at the final time.
    pub densities: Vec<(String, ComplexField)>,
    /// Largest relative change of the enlarged norm over all events.
    pub norm_drift: f64,
    pub passed: bool,
    pub warnings: Vec<String>,
    pub log: Vec<serde_json::Value>,
    pub wall_time_s: f64,
}

type Advance<'a, A> = Box<dyn Fn(&EnlargedState<A>, f64) -> enlarge_core::Result<EnlargedState<A>> + 'a>;
type Extra<'a, A> = Box<dyn FnMut(&EnlargedState<A>, f64) -> Result<Vec<Complex64>> + 'a>;

struct Trace<A> {
    series: TimeSeries,
    state: EnlargedState<A>,
    norm_drift: f64,
    log: Vec<serde_json::Value>,
}

/// Checkpoints `k·t_total/n` merged with gate times, ascending.
pub fn event_times(cfg: &ScenarioConfig) -> Vec<f64> {
    let total = cfg.evolution.t_total;
    let n = cfg.checkpoints();
    let tol = 1e-12 * total;
    let mut times: Vec<f64> = (0..=n).map(|k| total * k as f64 / n as f64).collect();
    times.extend(cfg.gate_schedule.iter().map(|g| g.time));
    times.sort_by(f64::total_cmp);
    times.dedup_by(|b, a| (*b - *a).abs() <= tol);
    times
}

fn nearest(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (i, s) in times.iter().enumerate() {
        if (s - t).abs() < (times[best] - t).abs() {
            best = i;
        }
    }
    best
}

fn simulate<A: ApplyOperator>(
    cfg: &ScenarioConfig,
    grid: Option<&Grid1D>,
    initial: EnlargedState<A>,
    advance: Advance<'_, A>,
    extra_names: &[&str],
    mut extra: Extra<'_, A>,
) -> Result<Trace<A>> {
    let times = event_times(cfg);
    let mut gates_at: Vec<Vec<PauliAxisGate>> = vec![Vec::new(); times.len()];
    for g in &cfg.gate_schedule {
        gates_at[nearest(&times, g.time)].push(PauliAxisGate::new(g.axis.clone(), g.pauli));
    }
    let scalar: Vec<_> = cfg
        .observables
        .iter()
        .filter(|o| !matches!(o.kind, ObservableKind::DensityProfile))
        .collect();
    let mut names: Vec<String> = scalar.iter().map(|o| o.label()).collect();
    names.push(NORM_COLUMN.to_string());
    names.extend(extra_names.iter().map(|s| s.to_string()));
    let mut series = TimeSeries::new(names);
    let mut log = vec![json!({"event": "start", "t": 0.0, "name": cfg.name, "events": times.len()})];

    let mut state = initial;
    let n0 = state.total_norm();
    if !(n0.is_finite() && n0 > 0.0) {
        return Err(ScenarioError::Numerical(format!("initial enlarged norm is {n0}")));
    }
    let mut drift = 0.0f64;
    let mut t_prev = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let seg = t - t_prev;
        if seg > 0.0 {
            state = advance(&state, seg)?;
            t_prev = t;
        }
        let extras = extra(&state, seg.max(0.0))?;
        for gate in &gates_at[i] {
            state = state.apply_axis_gate(gate)?;
            log.push(json!({"event": "gate", "t": t, "axis": gate.axis, "pauli": format!("{:?}", gate.pauli)}));
        }
        let norm = state.total_norm();
        let d = (norm - n0).abs() / n0;
        if !d.is_finite() {
            return Err(ScenarioError::Numerical(format!("enlarged norm became {norm} at t={t}")));
        }
        drift = drift.max(d);
        let mut row = Vec::with_capacity(series.names.len());
        for spec in &scalar {
            let v = evaluate(spec, &state, grid)?.expect("scalar observable");
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(ScenarioError::Numerical(format!("observable {} is {v} at t={t}", spec.label())));
            }
            row.push(v);
        }
        row.push(Complex64::new(norm, 0.0));
        row.extend(extras);
        series.push(t, row)?;
        log.push(json!({"event": "checkpoint", "t": t, "norm_drift": d}));
    }
    Ok(Trace {
        series,
        state,
        norm_drift: drift,
        log,
    })
}

fn build_axis(label: String, map: LinearCoordMap) -> SymmetryAxis {
    match map.classify() {
        MapKind::SpatialParity => SymmetryAxis::new(label, AxisKind::XParity),
        MapKind::TimeParity => SymmetryAxis::new(label, AxisKind::TimeParity),
        _ => SymmetryAxis::map(label, map),
    }
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|z| Complex64::new(z[0], z[1])).collect()
}

fn unit(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn dense_for(grid: &Grid1D, what: &str) -> Result<()> {
    if grid.n_points() > MAX_GRID_POINTS {
        return Err(ScenarioError::config(
            "evolution.method",
            format!("dense-expm {what} needs n <= {MAX_GRID_POINTS}, got {}", grid.n_points()),
        ));
    }
    Ok(())
}

fn dense_advance<'a>(oracle: DenseOracle) -> Advance<'a, ComplexField> {
    Box::new(move |s, seg| unflatten(s, &oracle.evolve(&flatten(s), seg)?))
}

/// Run one validated scenario; the norm-drift verdict is in [`RunResult::passed`].
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunResult> {
    cfg.validate()?;
    let clock = Instant::now();
    let map = cfg.map()?;
    let axis = build_axis(cfg.axis_label()?, map);
    let ev = &cfg.evolution;
    let mut warnings = Vec::new();

    let (trace_log, series, final_state, densities, drift) = if cfg.initial.is_spin() {
        let psi = match &cfg.initial {
            InitialConfig::Spin { spin } => SpinVector::new(unit(to_complex(spin))),
            InitialConfig::RandomSpin { random_spin } => random_state(random_spin.dim, random_spin.seed),
            _ => unreachable!("validated spin initial state"),
        };
        let state = EnlargedState::seeded(vec![axis], vec![psi])?;
        let advance: Advance<'_, SpinVector> = match &cfg.dynamics {
            HamiltonianSpec::TimeParityEnlarged { base } => {
                let h = base.spin_operator()?.expect("validated spin base");
                Box::new(move |s, seg| evolve_time_parity(s, &h, seg))
            }
            HamiltonianSpec::SpinDense { matrix } => {
                let h: SpinOperator = matrix.build()?;
                Box::new(move |s, seg| s.map_components(|c| evolve_plain(&h, c, seg)))
            }
            other => unreachable!("validated spin dynamics, got {}", other.kind_name()),
        };
        if ev.method != Method::ExactSpectral && ev.method != Method::DenseExpm {
            warnings.push("spin dynamics always use the exact propagator".to_string());
        }
        let tr = simulate(cfg, None, state, advance, &[], Box::new(|_, _| Ok(Vec::new())))?;
        (tr.log, tr.series, FinalState::Spin(tr.state), Vec::new(), tr.norm_drift)
    } else {
        let grid = cfg.grid()?.expect("validated field grid");
        let form = match &cfg.initial {
            InitialConfig::Packet { packet } => AnalyticForm::gaussian(*packet),
            InitialConfig::Analytic { analytic } => analytic.clone(),
            _ => unreachable!("validated field initial state"),
        };
        let init = InitialState::Analytic { grid, form };
        let mut state = even_odd_split(&init, axis)?;
        let split_note = |w: &mut Vec<String>| {
            if ev.method == Method::ExactSpectral {
                w.push("no exact propagator for this dynamics; using split-step".to_string());
            }
        };
        let mut nr_names: Vec<&str> = Vec::new();
        let mut extra: Extra<'_, ComplexField> = Box::new(|_, _| Ok(Vec::new()));
        let advance: Advance<'_, ComplexField> = match &cfg.dynamics {
            HamiltonianSpec::FreeTransportEnlarged { tilde } => {
                let tilde = match tilde {
                    Some(t) => *t,
                    None => map.tilde_coeffs()?,
                };
                if ev.method == Method::DenseExpm {
                    dense_for(&grid, "free transport")?;
                    dense_advance(DenseOracle::new(assemble_free_enlarged(&grid, tilde)?)?)
                } else {
                    Box::new(move |s, seg| evolve_free_enlarged(s, tilde, seg))
                }
            }
            HamiltonianSpec::DiracParityEnlarged { mass, potential } => {
                let spinor = match &cfg.spinor {
                    Some(s) => unit(to_complex(s)),
                    None => vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                };
                state = state.with_internal_spinor(&spinor)?;
                let evolver = DiracParityEvolver::new(&grid, *mass, potential)?;
                if ev.method == Method::DenseExpm {
                    dense_for(&grid, "dirac")?;
                    dense_advance(DenseOracle::new(assemble_dirac_parity(&grid, *mass, potential)?)?)
                } else {
                    if potential.coeffs.iter().any(|&c| c != 0.0) || potential.constant != 0.0 {
                        split_note(&mut warnings);
                    }
                    warnings.extend(evolver.stability_warning(ev.dt));
                    if let Some(nr) = &cfg.nr_reference {
                        let eff = EffectiveNrEvolver::new(&grid, *mass, potential, nr.parity_sign)?;
                        let nr_dt = nr.dt.unwrap_or(ev.dt);
                        let mut psi = init.sample()?;
                        nr_names.push(NR_COLUMN);
                        extra = Box::new(move |s: &EnlargedState, seg: f64| {
                            if seg > 0.0 {
                                psi = eff.evolve(&psi, &EvolutionParams::covering(seg, nr_dt, Method::StrangSplit)?)?;
                            }
                            let upper = &s.project_physical()[0];
                            let d = density(upper).l2_distance(&density(&psi))?;
                            Ok(vec![Complex64::new(d, 0.0)])
                        });
                    }
                    let dt = ev.dt;
                    Box::new(move |s, seg| evolver.evolve(s, &EvolutionParams::covering(seg, dt, Method::StrangSplit)?))
                }
            }
            HamiltonianSpec::TimeParityEnlarged { base } => {
                if ev.method == Method::DenseExpm {
                    return Err(ScenarioError::config(
                        "evolution.method",
                        "dense-expm is not available for field time-parity bases",
                    ));
                }
                if matches!(base, BaseHamiltonian::Schrodinger { .. }) {
                    split_note(&mut warnings);
                }
                let h: Box<dyn PlainEvolver<ComplexField>> =
                    base.field_evolver(&grid, ev.dt)?.expect("validated field base");
                Box::new(move |s, seg| evolve_time_parity(s, &h, seg))
            }
            HamiltonianSpec::EffectiveNr {
                mass,
                potential,
                parity_sign,
            } => {
                split_note(&mut warnings);
                let eff = EffectiveNrEvolver::new(&grid, *mass, potential, *parity_sign)?;
                let dt = ev.dt;
                Box::new(move |s, seg| {
                    let p = EvolutionParams::covering(seg, dt, Method::StrangSplit)?;
                    s.map_components(|c| eff.evolve(c, &p))
                })
            }
            HamiltonianSpec::SpinDense { .. } => unreachable!("validated field dynamics"),
        };
        let tr = simulate(cfg, Some(&grid), state, advance, &nr_names, extra)?;
        let labels: Vec<String> = tr.state.axes().iter().map(|a| a.label.clone()).collect();
        let mut densities = Vec::new();
        for o in cfg.observables.iter().filter(|o| matches!(o.kind, ObservableKind::DensityProfile)) {
            let subset: Vec<&str> = match &o.axes {
                Some(a) => a.iter().map(String::as_str).collect(),
                None => labels.iter().map(String::as_str).collect(),
            };
            densities.push((o.label(), density_profile(&tr.state, o.frame, &subset)?));
        }
        (tr.log, tr.series, FinalState::Field(tr.state), densities, tr.norm_drift)
    };

    let mut log = trace_log;
    for w in &warnings {
        log.push(json!({"event": "warning", "message": w}));
    }
    let passed = drift <= cfg.norm_tolerance();
    log.push(json!({"event": "finish", "t": ev.t_total, "norm_drift": drift, "passed": passed}));
    Ok(RunResult {
        config: cfg.clone(),
        series,
        final_state,
        densities,
        norm_drift: drift,
        passed,
        warnings,
        log,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

fn density(f: &ComplexField) -> ComplexField {
    f.map(|z| Complex64::new(z.norm_sqr(), 0.0))
}

fn spin_csv(v: &SpinVector) -> String {
    let mut out = String::from("index,re,im\n");
    for (i, z) in v.as_slice().iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", fmt_f64(z.re), fmt_f64(z.im)));
    }
    out
}

impl RunResult {
    /// Observable values at the last event.
    pub fn final_values(&self) -> Vec<(String, Complex64)> {
        match self.series.rows.last() {
            Some((_, v)) => self.series.names.iter().cloned().zip(v.iter().copied()).collect(),
            None => Vec::new(),
        }
    }

    pub fn final_value(&self, name: &str) -> Option<Complex64> {
        self.final_values().into_iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// The readout `(1, …, 1)Ψ` of the final state for field runs.
    pub fn final_projection(&self) -> Option<Vec<ComplexField>> {
        match &self.final_state {
            FinalState::Field(s) => Some(s.project_physical()),
            FinalState::Spin(_) => None,
        }
    }

    pub fn summary(&self) -> serde_json::Value {
        let finals: serde_json::Map<String, serde_json::Value> = self
            .final_values()
            .into_iter()
            .map(|(n, v)| (n, json!({"re": v.re, "im": v.im})))
            .collect();
        json!({
            "name": self.config.name,
            "passed": self.passed,
            "norm_drift": self.norm_drift,
            "norm_tolerance": self.config.norm_tolerance(),
            "final_time": self.config.evolution.t_total,
            "final_observables": finals,
            "warnings": self.warnings,
            "wall_time_s": self.wall_time_s,
            "config": self.config,
        })
    }

    /// `timeseries.csv`, `fields/*.csv`, `summary.json`, `run.log`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        let fields = dir.join("fields");
        fs::create_dir_all(&fields)?;
        fs::write(dir.join("timeseries.csv"), self.series.to_csv())?;
        match &self.final_state {
            FinalState::Field(s) => {
                write_state(&fields, s)?;
                let labels: Vec<&str> = s.axes().iter().map(|a| a.label.as_str()).collect();
                for (i, f) in s.project_physical().iter().enumerate() {
                    write_field(&fields.join(format!("projected_{i}.csv")), f)?;
                }
                for (i, f) in s.read_transformed(&labels)?.iter().enumerate() {
                    write_field(&fields.join(format!("transformed_{i}.csv")), f)?;
                }
                for (name, f) in &self.densities {
                    write_field(&fields.join(format!("{name}.csv")), f)?;
                }
            }
            FinalState::Spin(s) => {
                for (i, c) in s.components().iter().enumerate() {
                    fs::write(fields.join(format!("{}.csv", s.component_name(i))), spin_csv(c))?;
                }
                for (i, c) in s.project_physical().iter().enumerate() {
                    fs::write(fields.join(format!("projected_{i}.csv")), spin_csv(c))?;
                }
            }
        }
        let summary = serde_json::to_string_pretty(&self.summary()).map_err(enlarge_core::Error::from)?;
        fs::write(dir.join("summary.json"), summary)?;
        fs::write(dir.join("run.log"), to_json_lines(&self.log)?)?;
        Ok(())
    }
}

/// Distance between the final enlarged states of two runs.
pub fn final_distance(a: &RunResult, b: &RunResult) -> Result<f64> {
    Ok(match (&a.final_state, &b.final_state) {
        (FinalState::Field(x), FinalState::Field(y)) => x.distance(y)?,
        (FinalState::Spin(x), FinalState::Spin(y)) => x.distance(y)?,
        _ => return Err(ScenarioError::config("final_state", "runs have different state types")),
    })
}
