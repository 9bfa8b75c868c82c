//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use enlarge_core::encoding::{
    decompose_2d, even_odd_split, AnalyticForm, EnlargedState, InitialState, Pauli, PauliAxisGate, SymmetryAxis,
};
use enlarge_core::evolvers::dense::{assemble_dirac_parity, dense_oracle};
use enlarge_core::evolvers::{evolve_time_parity, DiracParityEvolver, EvolutionParams, Method, PotentialSpec};
use enlarge_core::grid::{make_grid, sample_packet, ComplexField, Field2D, Grid1D, Grid2D, PacketParams};
use enlarge_core::observables::{
    enlarged_matrix_element, expect_original, expect_transformed, propagator_expectation, self_correlation, CorrelationForm,
    Frame, Operator,
};
use enlarge_core::spin::{random_anticommuting_pair, random_hamiltonian, random_state, InstanceRng, SpinOperator, SpinVector};
use enlarge_core::transforms::LinearCoordMap;
use enlarge_core::Complex64;
use enlarge_scenario::config::parse_config;
use enlarge_scenario::runner::run_scenario;
use enlarge_scenario::sweep::run_sweep;
use enlarge_scenario::{run_check_suite, CheckHooks};
use nalgebra::{DMatrix, DVector};

const I: Complex64 = Complex64::new(0.0, 1.0);

struct Outcome {
    passed: bool,
    summary: String,
}

fn verdict(passed: bool, summary: String) -> Outcome {
    Outcome { passed, summary }
}

fn packet(grid: &Grid1D, x0: f64, gamma: f64) -> ComplexField {
    sample_packet(grid, &PacketParams::new(x0, gamma, 0.0).unwrap()).unwrap()
}

/// Dense propagator from nalgebra's Padé exponential, independent of the eigensolver path.
fn expm_propagator(h: &SpinOperator, t: f64) -> DMatrix<Complex64> {
    (h.matrix() * (-I * t)).exp()
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let grid = make_grid(256, 32.0).unwrap();
    let init = InitialState::Analytic {
        grid,
        form: AnalyticForm::gaussian(PacketParams::new(5.0, 1.0, 0.0).unwrap()),
    };
    let s = even_odd_split(&init, SymmetryAxis::x_parity()).unwrap();
    let x = Operator::Position(1);
    let orig = expect_original(&s, &x).unwrap().re;
    let trans = expect_transformed(&s, &x).unwrap().re;
    let err = (orig - 5.0).abs().max((trans + 5.0).abs());
    verdict(err < 1e-8, format!("<x>_orig = {orig:.12}, <x>_trans = {trans:.12}, max error {err:.2e} (tol 1e-8)"))
}

fn criterion_2() -> Outcome {
    let tilde = LinearCoordMap::IDENTITY.tilde_coeffs().unwrap();
    let exact = tilde.t1 == 1.0 && tilde.t2 == 0.0;
    let text = r#"{
        "name": "identity-transport",
        "grid": {"n": 256, "length": 32.0},
        "initial": {"packet": {"x0": -4.0, "gamma_x": 1.0}},
        "transform": {"named": "identity"},
        "dynamics": {"kind": "free-transport-enlarged"},
        "evolution": {"dt": 0.1, "t_total": 4.0}
    }"#;
    let res = run_scenario(&parse_config(text).unwrap()).unwrap();
    let psi = &res.final_projection().unwrap()[0];
    let want = packet(psi.grid(), 0.0, 1.0);
    let err = psi.l2_distance(&want).unwrap();
    verdict(
        exact && err < 1e-8,
        format!("tilde = ({}, {}), L2 error vs psi0(x - t) at t=4: {err:.2e} (tol 1e-8)", tilde.t1, tilde.t2),
    )
}

fn boost_config(t_total: f64, gate: f64) -> String {
    format!(
        r#"{{
        "name": "boost-gate",
        "grid": {{"n": 512, "length": 64.0}},
        "initial": {{"packet": {{"x0": -10.0, "gamma_x": 1.0}}}},
        "transform": {{"boost": 0.5}},
        "axis_label": "boost",
        "dynamics": {{"kind": "free-transport-enlarged"}},
        "evolution": {{"dt": 0.05, "t_total": {t_total}, "checkpoints": 40}},
        "gate_schedule": [{{"time": {gate}, "axis": "boost", "pauli": "Z"}}],
        "observables": [
            {{"kind": {{"kind": "position-moment", "order": 1}}}},
            {{"kind": {{"kind": "position-moment", "order": 1}}, "frame": "transformed"}}
        ]
    }}"#
    )
}

fn criterion_3() -> Outcome {
    let (x0, v) = (-10.0, 0.5);
    let mut l2 = 0.0f64;
    for tg in [1.0, 2.0, 3.0] {
        // gate at the final instant, then the plain projection
        let res = run_scenario(&parse_config(&boost_config(tg, tg)).unwrap()).unwrap();
        let psi = &res.final_projection().unwrap()[0];
        let want = packet(psi.grid(), x0 + (1.0 + v) * tg, 1.0);
        l2 = l2.max(psi.l2_distance(&want).unwrap());
    }
    // readout-frame center and the post-gate projection over a longer run
    let tg = 2.0;
    let res = run_scenario(&parse_config(&boost_config(4.0, tg)).unwrap()).unwrap();
    let mut center = 0.0f64;
    for (t, z) in res.series.column("x1_trans").unwrap() {
        let want = if t < tg { x0 + (1.0 + v) * t } else { x0 + tg + (1.0 + v) * (t - tg) };
        center = center.max((z.re - want).abs());
    }
    // the gate swaps the two readouts; each keeps its own frame velocity
    for (t, z) in res.series.column("x1_orig").unwrap() {
        let want = if t < tg { x0 + t } else { x0 + (1.0 + v) * tg + (t - tg) };
        center = center.max((z.re - want).abs());
    }
    verdict(
        l2 < 1e-6 && center < 1e-6,
        format!("gate at t in {{1,2,3}}: max L2 vs psi0(x-(1+v)t) {l2:.2e}; frame centers vs x0+(1+v)t max error {center:.2e} (tol 1e-6)"),
    )
}

fn criterion_4() -> Outcome {
    let mut worst_gate = 0.0f64;
    let mut worst_plain = 0.0f64;
    for k in 0..20u64 {
        let dim = 2 + (k as usize % 15);
        let h = random_hamiltonian(dim, 1000 + k).unwrap();
        let psi = random_state(dim, 2000 + k);
        let t = 0.3 + 0.25 * k as f64;
        let s = EnlargedState::seeded(vec![SymmetryAxis::time_parity()], vec![psi.clone()]).unwrap();
        let out = evolve_time_parity(&s, &h, t).unwrap();
        let gated = out.apply_axis_gate(&PauliAxisGate::new("time-parity", Pauli::Z)).unwrap();
        let back = SpinVector(expm_propagator(&h, -t) * &psi.0);
        let fwd = SpinVector(expm_propagator(&h, t) * &psi.0);
        worst_gate = worst_gate.max(gated.project_physical()[0].max_abs_diff(&back));
        worst_plain = worst_plain.max(out.project_physical()[0].max_abs_diff(&fwd));
    }
    // the same protocol through the scenario runner, H = σ_z
    let text = r#"{
        "name": "time-parity-sz",
        "initial": {"spin": [[0.6, 0.0], [0.0, 0.8]]},
        "dynamics": {"kind": "time-parity-enlarged", "base": {"kind": "spin-dense", "matrix": {"pauli": 3}}},
        "evolution": {"dt": 0.1, "t_total": 1.3},
        "gate_schedule": [{"time": 1.3, "axis": "time-parity", "pauli": "Z"}]
    }"#;
    let res = run_scenario(&parse_config(text).unwrap()).unwrap();
    let enlarge_scenario::runner::FinalState::Spin(s) = &res.final_state else {
        unreachable!("spin scenario")
    };
    let t: f64 = 1.3;
    let want = SpinVector::new(vec![Complex64::from_polar(0.6, t), Complex64::from_polar(0.8, PI / 2.0 - t)]);
    let cli = s.project_physical()[0].max_abs_diff(&want);
    let worst = worst_gate.max(worst_plain).max(cli);
    verdict(
        worst < 1e-10,
        format!("20 random H: gated vs e^{{+iHt}} {worst_gate:.2e}, ungated vs e^{{-iHt}} {worst_plain:.2e}; runner sigma_z {cli:.2e} (tol 1e-10)"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..200u64 {
        let dim = 2 + (k as usize % 15);
        let h = random_hamiltonian(dim, 5000 + k).unwrap();
        let psi = random_state(dim, 6000 + k);
        let t = 0.05 + 0.037 * k as f64;
        let got = propagator_expectation(&psi, &h, t).unwrap();
        let want = psi.0.dotc(&(expm_propagator(&h, 2.0 * t) * &psi.0));
        worst = worst.max((got - want).norm());
    }
    let z = SpinOperator::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ])))
    .unwrap();
    let plus = SpinVector::new(vec![Complex64::new(0.5f64.sqrt(), 0.0); 2]);
    let mut closed = 0.0f64;
    for t in [0.0, PI / 8.0, PI / 4.0] {
        let got = propagator_expectation(&plus, &z, t).unwrap();
        closed = closed.max((got - Complex64::new((2.0 * t).cos(), 0.0)).norm());
    }
    verdict(
        worst < 1e-10 && closed < 1e-10,
        format!("200 instances vs expm oracle {worst:.2e}; sigma_z closed form cos(2t) {closed:.2e} (tol 1e-10)"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut vs_initial = 0.0f64;
    let mut heisenberg = true;
    for k in 0..200u64 {
        let dim = 2 * (1 + k as usize % 8);
        let (h, sigma) = random_anticommuting_pair(dim, 7000 + k).unwrap();
        let psi = random_state(dim, 8000 + k);
        let t = 0.1 + 0.031 * k as f64;
        let sc = self_correlation(&psi, &h, &sigma, t).unwrap();
        heisenberg &= sc.form == CorrelationForm::Heisenberg;
        let flipped = sigma.apply(&psi).unwrap();
        let prop_flipped = flipped.0.dotc(&(expm_propagator(&h, 2.0 * t) * &flipped.0));
        let prop_initial = psi.0.dotc(&(expm_propagator(&h, 2.0 * t) * &psi.0));
        worst = worst.max((sc.value - prop_flipped.conj()).norm());
        vs_initial = vs_initial.max((sc.value - prop_initial).norm());
    }
    verdict(
        heisenberg && worst < 1e-10,
        format!(
            "200 pairs: Heisenberg form vs conj(<psi'|e^{{-2itH}}|psi'>) {worst:.2e} (tol 1e-10); \
             vs <psi0|e^{{-2itH}}|psi0> {vs_initial:.2e}"
        ),
    )
}

fn random_field(g: Grid1D, seed: u64) -> ComplexField {
    let mut rng = InstanceRng::new(seed);
    ComplexField::new(g, (0..g.n_points()).map(|_| rng.complex()).collect()).unwrap()
}

/// `-i d/dx` by a direct O(N²) DFT, Nyquist mode zeroed.
fn naive_momentum(f: &ComplexField) -> ComplexField {
    let g = *f.grid();
    let n = g.n_points();
    let dk = 2.0 * PI / g.length();
    let k = |j: usize| {
        if j < n / 2 {
            j as f64 * dk
        } else if j == n / 2 {
            0.0
        } else {
            (j as f64 - n as f64) * dk
        }
    };
    let a = f.amplitudes();
    let coef: Vec<Complex64> = (0..n)
        .map(|m| (0..n).map(|j| a[j] * Complex64::from_polar(1.0, -2.0 * PI * (m * j) as f64 / n as f64)).sum())
        .collect();
    let out = (0..n)
        .map(|j| {
            (0..n)
                .map(|m| coef[m] * k(m) * Complex64::from_polar(1.0, 2.0 * PI * (m * j) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    ComplexField::new(g, out).unwrap()
}

/// Grid quadrature `Σ_j conj(f_j) g_j dx`.
fn inner(f: &ComplexField, g: &ComplexField) -> Complex64 {
    f.amplitudes().iter().zip(g.amplitudes()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * f.grid().spacing()
}

fn criterion_7() -> Outcome {
    let g = make_grid(64, 12.0).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let (e, o) = (random_field(g, 10 + seed), random_field(g, 50 + seed));
        for axis in [SymmetryAxis::x_parity(), SymmetryAxis::map("boost", LinearCoordMap::boost(0.5).unwrap())] {
            let label = axis.label.clone();
            let s = EnlargedState::new(vec![axis], 1, vec![e.clone(), o.clone()]).unwrap();
            let psi = e.zip_with(&o, |a, b| a + b).unwrap();
            let psi_t = e.zip_with(&o, |a, b| a - b).unwrap();
            let ops: [(Operator, Box<dyn Fn(&ComplexField) -> ComplexField>); 3] = [
                (Operator::Identity, Box::new(|f: &ComplexField| f.clone())),
                (Operator::Position(1), Box::new(|f: &ComplexField| f.mul_by(|x| Complex64::new(x, 0.0)))),
                (Operator::momentum(&g, 1), Box::new(naive_momentum)),
            ];
            for (op, direct) in &ops {
                let cases = [
                    (Frame::Original, inner(&psi, &direct(&psi))),
                    (Frame::Transformed, inner(&psi_t, &direct(&psi_t))),
                    (Frame::Cross, inner(&psi, &direct(&psi_t))),
                ];
                for (frame, want) in cases {
                    let got = enlarged_matrix_element(&s, op, &[(&label, frame.axis_matrix())]).unwrap();
                    worst = worst.max((got - want).norm() / want.norm().max(1.0));
                }
            }
        }
    }
    verdict(worst < 1e-10, format!("(I±σx)⊗O and (σz−iσy)⊗O vs direct fields, O in {{I, x, p}}: {worst:.2e} (tol 1e-10)"))
}

fn criterion_8() -> Outcome {
    let g = make_grid(64, 16.0).unwrap();
    let grid = Grid2D { x: g, y: g };
    let mut rng = InstanceRng::new(21);
    let psi = Field2D::new(grid, (0..64 * 64).map(|_| rng.complex()).collect()).unwrap();
    let s = decompose_2d(&psi).unwrap();
    let recon = s.project_physical().remove(0);
    let dev = |a: &Field2D, b: &Field2D| max_abs(a.amplitudes().iter().zip(b.amplitudes()).map(|(u, v)| (u - v).norm()));
    let recon_err = dev(&recon, &psi);
    let mut bit_exact = true;
    let mut vs_psi = 0.0f64;
    let cases: [(&[&str], fn(&Field2D) -> Field2D); 3] = [
        (&["x-parity"], |f| f.mirror_x()),
        (&["y-parity"], |f| f.mirror_y()),
        (&["x-parity", "y-parity"], |f| f.mirror_x().mirror_y()),
    ];
    for (subset, mirror) in cases {
        let read = s.read_transformed(subset).unwrap().remove(0);
        bit_exact &= read == mirror(&recon);
        vs_psi = vs_psi.max(dev(&read, &mirror(&psi)));
    }
    verdict(
        recon_err < 1e-14 && bit_exact && vs_psi < 1e-14,
        format!(
            "reconstruction {recon_err:.2e} (tol 1e-14); gates bit-identical to mirrored readout: {bit_exact}; \
             vs mirrored input {vs_psi:.2e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let g = make_grid(32, 8.0).unwrap();
    let v = PotentialSpec::polynomial(0.0, vec![0.0, 0.0, 1.0]);
    let psi = packet(&g, 0.3, 0.6);
    let s = even_odd_split(&InitialState::Sampled(psi), SymmetryAxis::x_parity())
        .unwrap()
        .with_internal_spinor(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
        .unwrap();
    let t = 0.5;
    let h = assemble_dirac_parity(&g, 1.0, &v).unwrap();
    let dim = h.nrows();
    let exact = dense_oracle(h, &s, t).unwrap();
    let ev = DiracParityEvolver::new(&g, 1.0, &v).unwrap();
    let errs: Vec<f64> = [0.01, 0.005, 0.0025]
        .iter()
        .map(|&dt| {
            let p = EvolutionParams::covering(t, dt, Method::StrangSplit).unwrap();
            ev.evolve(&s, &p).unwrap().distance(&exact).unwrap()
        })
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let long = ev.evolve(&s, &EvolutionParams::new(1e-3, 1000, Method::StrangSplit).unwrap()).unwrap();
    let drift = (long.total_norm() - s.total_norm()).abs();
    let ok = orders.iter().all(|o| (o - 2.0).abs() <= 0.1) && drift < 1e-10;
    verdict(ok, format!("dim {dim}, observed orders {orders:.4?} (2 ± 0.1); norm drift over 1e3 steps {drift:.2e} (tol 1e-10)"))
}

fn criterion_10() -> Outcome {
    let template: serde_json::Value = serde_json::from_str(
        r#"{
        "name": "nr-limit",
        "grid": {"n": 64, "length": 16.0},
        "initial": {"packet": {"x0": 0.0, "gamma_x": 1.0}},
        "transform": {"named": "x-parity"},
        "dynamics": {"kind": "dirac-parity-enlarged", "mass": 10.0, "potential": {"coeffs": [1.0]}},
        "evolution": {"dt": 1e-4, "t_total": 1.0, "method": "strang-split", "checkpoints": 10},
        "nr_reference": {"parity_sign": -1, "dt": 1e-3}
    }"#,
    )
    .unwrap();
    let masses = [10.0, 20.0, 40.0, 80.0];
    let sweep = run_sweep(&template, "dynamics.mass", &masses).unwrap();
    let d: Vec<f64> = sweep.final_column("nr_discrepancy").iter().map(|(_, v)| v.unwrap_or(f64::NAN)).collect();
    let monotone = d.windows(2).all(|w| w[1] < w[0]);
    let listed: Vec<String> = d.iter().map(|e| format!("{e:.3e}")).collect();
    // least-squares fit of log d against log(1/m)
    let pts: Vec<(f64, f64)> = masses.iter().zip(&d).map(|(m, e)| ((1.0 / m).ln(), e.ln())).collect();
    let order = enlarge_scenario::sweep::slope(&pts);

    // harmonic period of the effective dynamics from zero crossings of <x>
    let (m, lambda) = (10.0, 1.0);
    let text = r#"{
        "name": "nr-period",
        "grid": {"n": 256, "length": 32.0},
        "initial": {"packet": {"x0": 3.0, "gamma_x": 1.4142135623730951}},
        "dynamics": {"kind": "effective-nr", "mass": 10.0, "potential": {"coeffs": [1.0]}, "parity_sign": -1},
        "evolution": {"dt": 0.05, "t_total": 140.0, "method": "strang-split", "checkpoints": 1400},
        "observables": [{"kind": {"kind": "position-moment", "order": 1}}]
    }"#;
    let res = run_scenario(&parse_config(text).unwrap()).unwrap();
    let x = res.series.column("x1_orig").unwrap();
    let crossings: Vec<f64> = x
        .windows(2)
        .filter(|w| w[0].1.re.signum() != w[1].1.re.signum())
        .map(|w| w[0].0 + (w[1].0 - w[0].0) * w[0].1.re / (w[0].1.re - w[1].1.re))
        .collect();
    let period = if crossings.len() >= 3 {
        2.0 * (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64
    } else {
        f64::NAN
    };
    let want = 2.0 * PI * m / lambda;
    let rel = (period - want).abs() / want;
    verdict(
        monotone && order >= 1.0 && rel < 0.02,
        format!(
            "discrepancy at m = 10,20,40,80: [{}]; fitted order {order:.3} (>= 1); \
             period {period:.4} vs 2πm/λ = {want:.4}, rel. error {rel:.2e} (tol 0.02)",
            listed.join(", ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_enlarge");
    let work = tempfile::tempdir().unwrap();
    let cfg_path = work.path().join("boost.json");
    fs::write(&cfg_path, boost_config(4.0, 2.0)).unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = work.path().join(format!("run{k}"));
        let status = Command::new(bin).arg("run").arg(&cfg_path).arg("--out").arg(&out).status().unwrap();
        runs.push((status.code(), out));
    }
    let read_csvs = |dir: &Path| {
        let mut files: Vec<_> = fs::read_dir(dir.join("fields"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        let mut all = vec![fs::read(dir.join("timeseries.csv")).unwrap()];
        all.extend(files.iter().map(|p| fs::read(p).unwrap()));
        all
    };
    let exit_ok = runs.iter().all(|(c, _)| *c == Some(0));
    let identical = exit_ok && read_csvs(&runs[0].1) == read_csvs(&runs[1].1);
    let check = Command::new(bin).args(["check", "--json"]).output().unwrap();
    let report: serde_json::Value = serde_json::from_slice(&check.stdout).unwrap_or_default();
    let n = report["checks"].as_array().map_or(0, |a| a.len());
    let all_pass = report["passed"] == true;
    let in_process = run_check_suite(&CheckHooks::default()).passed;
    verdict(
        identical && check.status.code() == Some(0) && all_pass && in_process,
        format!(
            "rerun exit codes {:?}, CSV byte-identical: {identical}; check exit {:?} with {n} invariants, all passing: {all_pass}",
            runs.iter().map(|(c, _)| *c).collect::<Vec<_>>(),
            check.status.code()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("frame readout identity", criterion_1),
        ("identity map reduction", criterion_2),
        ("galilean boost gate", criterion_3),
        ("time-parity gate", criterion_4),
        ("propagator protocol", criterion_5),
        ("self-correlation identity", criterion_6),
        ("observable extraction", criterion_7),
        ("2d parity decomposition", criterion_8),
        ("dirac parity evolver", criterion_9),
        ("nonrelativistic limit", criterion_10),
        ("cli determinism and contract", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name}: {}", i + 1, o.summary);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
