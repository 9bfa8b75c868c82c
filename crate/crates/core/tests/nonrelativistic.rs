use enlarge_core::encoding::{even_odd_split, EnlargedState, InitialState, SymmetryAxis};
use enlarge_core::evolvers::dense::{assemble_dirac_simulated, flatten_fields, unflatten_fields, DenseOracle};
use enlarge_core::evolvers::{evolve_effective_nr, DiracParityEvolver, EvolutionParams, Method, PotentialSpec};
use enlarge_core::grid::{make_grid, sample_packet, ComplexField, Grid1D, PacketParams};
use enlarge_core::Complex64;

fn grid() -> Grid1D {
    make_grid(64, 16.0).unwrap()
}

fn start(parity: i8) -> ComplexField {
    let g = grid();
    let p = PacketParams::new(0.0, 1.0, 0.0).unwrap();
    let base = sample_packet(&g, &p).unwrap();
    if parity > 0 {
        base
    } else {
        base.mul_by(|x| Complex64::new(x, 0.0)).normalized()
    }
}

fn encoded(phi: &ComplexField) -> EnlargedState {
    even_odd_split(&InitialState::Sampled(phi.clone()), SymmetryAxis::x_parity())
        .unwrap()
        .with_internal_spinor(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
        .unwrap()
}

fn density(f: &ComplexField) -> ComplexField {
    f.map(|z| Complex64::new(z.norm_sqr(), 0.0))
}

/// Upper-spinor density of the simulated equation, from the dense oracle.
fn full_density_dense(phi: &ComplexField, m: f64, v: &PotentialSpec, t: f64) -> ComplexField {
    let h = assemble_dirac_simulated(&grid(), m, v).unwrap();
    let zero = ComplexField::zeros(grid());
    let out = DenseOracle::new(h).unwrap().evolve(&flatten_fields(&[phi.clone(), zero]), t).unwrap();
    density(&unflatten_fields(&grid(), &out).unwrap()[0])
}

fn effective_density(phi: &ComplexField, m: f64, v: &PotentialSpec, sign: i8, t: f64) -> ComplexField {
    let params = EvolutionParams::covering(t, 1e-3, Method::StrangSplit).unwrap();
    density(&evolve_effective_nr(phi, m, v, sign, &params).unwrap())
}

#[test]
fn branch_sign_is_minus_parity_eigenvalue() {
    // a cubic potential makes ∂_xV^o position dependent, so the branch shows in the density
    let v = PotentialSpec::polynomial(0.0, vec![0.0, 0.0, 0.5]);
    let (m, t) = (40.0, 4.0);
    for parity in [1i8, -1] {
        let phi = start(parity);
        let full = full_density_dense(&phi, m, &v, t);
        let matched = full.l2_distance(&effective_density(&phi, m, &v, -parity, t)).unwrap();
        let opposite = full.l2_distance(&effective_density(&phi, m, &v, parity, t)).unwrap();
        assert!(matched < 0.05 * opposite, "parity {parity}: {matched:e} vs {opposite:e}");
    }
}

#[test]
fn strang_full_evolution_matches_dense_at_large_mass() {
    let v = PotentialSpec::linear(1.0);
    let phi = start(1);
    for m in [10.0, 80.0] {
        let ev = DiracParityEvolver::new(&grid(), m, &v).unwrap();
        let params = EvolutionParams::covering(1.0, 1e-4, Method::StrangSplit).unwrap();
        let out = ev.evolve(&encoded(&phi), &params).unwrap();
        let strang = density(&out.project_physical()[0]);
        let d = strang.l2_distance(&full_density_dense(&phi, m, &v, 1.0)).unwrap();
        assert!(d < 1e-7, "m={m}: {d:e}");
    }
}

#[test]
fn discrepancy_shrinks_with_mass() {
    let v = PotentialSpec::linear(1.0);
    let phi = start(1);
    let d: Vec<f64> = [10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&m| {
            let full = full_density_dense(&phi, m, &v, 1.0);
            full.l2_distance(&effective_density(&phi, m, &v, -1, 1.0)).unwrap()
        })
        .collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    let order = (d[0] / d[3]).ln() / 8f64.ln();
    assert!(order >= 1.0, "{order}");
}
