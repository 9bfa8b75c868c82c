use num_complex::Complex64;

use crate::encoding::EnlargedState;
use crate::grid::{ComplexField, Spectral};
use crate::transforms::TildeCoeffs;
use crate::{Error, Result};

/// Exact solution of `i∂_tΨ = -i[t1·I + t2·σ_x]∂_xΨ`.
///
/// Each Fourier mode gets `exp(-i t k (t1·I + t2·σ_x))`.
pub fn evolve_free_enlarged(state: &EnlargedState, tilde: TildeCoeffs, t: f64) -> Result<EnlargedState> {
    if state.axes().len() != 1 || state.internal_dim() != 1 {
        return Err(Error::Usage(
            "free transport acts on one symmetry axis and a scalar field".into(),
        ));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let grid = *state.component(0, 0).grid();
    let spectral = Spectral::new(&grid);
    let mut e = state.component(0, 0).amplitudes().to_vec();
    let mut o = state.component(1, 0).amplitudes().to_vec();
    spectral.forward(&mut e);
    spectral.forward(&mut o);
    for (m, &k) in spectral.wavenumbers().iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -t * k * tilde.t1);
        let (c, s) = ((t * k * tilde.t2).cos(), (t * k * tilde.t2).sin());
        let mi_s = Complex64::new(0.0, -s);
        let (a, b) = (e[m], o[m]);
        e[m] = phase * (a * c + b * mi_s);
        o[m] = phase * (b * c + a * mi_s);
    }
    spectral.inverse(&mut e);
    spectral.inverse(&mut o);
    state.with_components(vec![ComplexField::new(grid, e)?, ComplexField::new(grid, o)?])
}

/// `ψ(x, t) = e^{-ipt}ψ(x, 0)`, i.e. `i∂_tψ = -i∂_xψ`.
pub fn evolve_free_plain(psi: &ComplexField, t: f64) -> ComplexField {
    if t == 0.0 {
        return psi.clone();
    }
    Spectral::new(psi.grid()).apply_multiplier(psi, |k| Complex64::from_polar(1.0, -k * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{even_odd_split, InitialState, SymmetryAxis};
    use crate::grid::{make_grid, sample_packet, PacketParams};
    use crate::transforms::LinearCoordMap;

    fn packet(x0: f64) -> (PacketParams, ComplexField) {
        let g = make_grid(256, 32.0).unwrap();
        let p = PacketParams::new(x0, 1.0, 0.0).unwrap();
        (p, sample_packet(&g, &p).unwrap())
    }

    fn shifted(psi: &ComplexField, p: &PacketParams, shift: f64) -> ComplexField {
        let norm = ComplexField::from_fn(*psi.grid(), |x| p.evaluate(x)).norm_sqr().sqrt();
        ComplexField::from_fn(*psi.grid(), |x| p.evaluate(x - shift) / norm)
    }

    #[test]
    fn identity_map_transports_packet() {
        let (p, psi) = packet(-4.0);
        let axis = SymmetryAxis::map("identity", LinearCoordMap::IDENTITY);
        let s = even_odd_split(&InitialState::Sampled(psi.clone()), axis).unwrap();
        let out = evolve_free_enlarged(&s, TildeCoeffs::IDENTITY, 4.0).unwrap();
        let err = out.project_physical()[0].l2_distance(&shifted(&psi, &p, 4.0)).unwrap();
        assert!(err < 1e-8, "{err}");
        assert!((out.total_norm() - s.total_norm()).abs() < 1e-12);
    }

    #[test]
    fn boost_readout_moves_with_relative_velocity() {
        let (p, psi) = packet(-6.0);
        let map = LinearCoordMap::boost(0.5).unwrap();
        let s = even_odd_split(&InitialState::Sampled(psi.clone()), SymmetryAxis::map("boost", map)).unwrap();
        let out = evolve_free_enlarged(&s, map.tilde_coeffs().unwrap(), 2.0).unwrap();
        let read = out.read_transformed(&["boost"]).unwrap().remove(0);
        assert!(read.l2_distance(&shifted(&psi, &p, 3.0)).unwrap() < 1e-8);
        let proj = out.project_physical().remove(0);
        assert!(proj.l2_distance(&shifted(&psi, &p, 2.0)).unwrap() < 1e-8);
    }

    #[test]
    fn zero_time_is_identity() {
        let (_, psi) = packet(1.0);
        let s = even_odd_split(&InitialState::Sampled(psi.clone()), SymmetryAxis::x_parity()).unwrap();
        assert_eq!(evolve_free_enlarged(&s, TildeCoeffs { t1: 0.0, t2: 1.0 }, 0.0).unwrap(), s);
        assert_eq!(evolve_free_plain(&psi, 0.0), psi);
    }

    #[test]
    fn plain_transport_matches_enlarged_identity() {
        let (_, psi) = packet(2.0);
        let s = EnlargedState::seeded(vec![SymmetryAxis::map("id", LinearCoordMap::IDENTITY)], vec![psi.clone()]).unwrap();
        let a = evolve_free_enlarged(&s, TildeCoeffs::IDENTITY, 1.5).unwrap().project_physical().remove(0);
        let b = evolve_free_plain(&psi, 1.5);
        assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
    }
}
