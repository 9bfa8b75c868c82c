use super::PlainEvolver;
use crate::encoding::{Amplitudes, AxisKind, EnlargedState};
use crate::{Error, Result};

/// `Ψ(t) = exp(-i t σ_x⊗H) Ψ(0)`.
///
/// The `σ_x = ±1` combinations `ψ^e ± ψ^o` evolve under `e^{∓iHt}`, so the
/// components become `(cos(Ht)ψ0, -i sin(Ht)ψ0)` for a seeded `(ψ0, 0)`.
pub fn evolve_time_parity<A: Amplitudes>(
    state: &EnlargedState<A>,
    base: &impl PlainEvolver<A>,
    t: f64,
) -> Result<EnlargedState<A>> {
    if state.axes().len() != 1 || state.axes()[0].kind != AxisKind::TimeParity {
        return Err(Error::Usage("time-parity evolution needs exactly one time-parity axis".into()));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let d = state.internal_dim();
    let mut comps = state.components().to_vec();
    for i in 0..d {
        let (e, o) = (state.component(0, i), state.component(1, i));
        let plus = base.propagate(&e.zip_amp(o, |a, b| a + b)?, t)?;
        let minus = base.propagate(&e.zip_amp(o, |a, b| a - b)?, -t)?;
        comps[i] = plus.zip_amp(&minus, |a, b| (a + b) * 0.5)?;
        comps[d + i] = plus.zip_amp(&minus, |a, b| (a - b) * 0.5)?;
    }
    state.with_components(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::SymmetryAxis;
    use crate::spin::{pauli, random_hamiltonian, random_state, SpinVector};
    use crate::Complex64;
    use nalgebra::DMatrix;

    fn seeded(psi: SpinVector) -> EnlargedState<SpinVector> {
        EnlargedState::seeded(vec![SymmetryAxis::time_parity()], vec![psi]).unwrap()
    }

    fn matrix_fn(h: &DMatrix<Complex64>, f: impl Fn(f64) -> Complex64) -> DMatrix<Complex64> {
        let eig = h.clone().symmetric_eigen();
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(&f));
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    }

    #[test]
    fn closed_form_components_random() {
        for seed in 0..20 {
            let dim = 2 + (seed as usize % 15);
            let h = random_hamiltonian(dim, seed).unwrap();
            let psi = random_state(dim, seed + 1000);
            let t = 0.3 + 0.1 * seed as f64;
            let out = evolve_time_parity(&seeded(psi.clone()), &h, t).unwrap();
            let cos = matrix_fn(h.matrix(), |e| Complex64::new((e * t).cos(), 0.0));
            let msin = matrix_fn(h.matrix(), |e| Complex64::new(0.0, -(e * t).sin()));
            assert!(out.component(0, 0).max_abs_diff(&SpinVector(&cos * &psi.0)) < 1e-10);
            assert!(out.component(1, 0).max_abs_diff(&SpinVector(&msin * &psi.0)) < 1e-10);
            let fwd = SpinVector(h.propagator(t) * &psi.0);
            let back = SpinVector(h.propagator(-t) * &psi.0);
            assert!(out.project_physical()[0].max_abs_diff(&fwd) < 1e-10);
            assert!(out.read_transformed(&["time-parity"]).unwrap()[0].max_abs_diff(&back) < 1e-10);
        }
    }

    #[test]
    fn sigma_z_base_closed_form() {
        let s = 0.5f64.sqrt();
        let psi = SpinVector::new(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        let t = 0.8;
        let out = evolve_time_parity(&seeded(psi.clone()), &pauli(3).unwrap(), t).unwrap();
        let expected = SpinVector::new(vec![Complex64::from_polar(s, -t), Complex64::from_polar(s, t)]);
        assert!(out.project_physical()[0].max_abs_diff(&expected) < 1e-14);
        assert_eq!(evolve_time_parity(&seeded(psi.clone()), &pauli(3).unwrap(), 0.0).unwrap(), seeded(psi));
    }

    #[test]
    fn rejects_spatial_axis() {
        let psi = random_state(2, 1);
        let s = EnlargedState::seeded(vec![SymmetryAxis::x_parity()], vec![psi]).unwrap();
        assert!(evolve_time_parity(&s, &pauli(3).unwrap(), 1.0).is_err());
    }
}
