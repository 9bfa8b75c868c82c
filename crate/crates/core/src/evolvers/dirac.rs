use num_complex::Complex64;

use super::{EvolutionParams, PotentialSpec, SampledPotential};
use crate::encoding::EnlargedState;
use crate::grid::{ComplexField, Grid1D, Spectral};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Strang splitting for `p σ_y⊗σ_x + m I⊗σ_z + V^e I⊗σ_x + V^o σ_x⊗σ_x`.
///
/// The symmetry axis is the first tensor factor and the Dirac spinor the
/// second; component `c = 2·bit + spinor`.
#[derive(Debug, Clone)]
pub struct DiracParityEvolver {
    spectral: Spectral,
    mass: f64,
    potential: SampledPotential,
}

/// `(cos θ) v - i (sin θ) M v` for a permutation involution `M`.
#[inline]
fn rotate_pair(a: &mut Complex64, b: &mut Complex64, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let (x, y) = (*a, *b);
    *a = x * c - I * s * y;
    *b = y * c - I * s * x;
}

impl DiracParityEvolver {
    pub fn new(grid: &Grid1D, mass: f64, potential: &PotentialSpec) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        potential.validate()?;
        Ok(Self {
            spectral: Spectral::new(grid),
            mass,
            potential: potential.sample(grid),
        })
    }

    pub fn grid(&self) -> &Grid1D {
        self.spectral.grid()
    }

    pub fn potential(&self) -> &SampledPotential {
        &self.potential
    }

    /// Warning text when `dt` exceeds the crude stability heuristic.
    pub fn stability_warning(&self, dt: f64) -> Option<String> {
        let kmax = self.spectral.wavenumbers().iter().fold(0.0f64, |m, k| m.max(k.abs()));
        let radius = (kmax * kmax + self.mass * self.mass).sqrt() + self.potential.max_abs();
        (radius * dt > 1.0).then(|| {
            format!("dt={dt} exceeds 1/spectral radius ({radius:.3e}); splitting error may dominate")
        })
    }

    fn half_potential(&self, c: &mut [Vec<Complex64>; 4], dt: f64) {
        let [c0, c1, c2, c3] = c;
        for j in 0..c0.len() {
            let te = 0.5 * dt * self.potential.even[j];
            let to = 0.5 * dt * self.potential.odd[j];
            // I⊗σ_x and σ_x⊗σ_x commute, so the exponentials factor
            rotate_pair(&mut c0[j], &mut c1[j], te);
            rotate_pair(&mut c2[j], &mut c3[j], te);
            rotate_pair(&mut c0[j], &mut c3[j], to);
            rotate_pair(&mut c1[j], &mut c2[j], to);
        }
    }

    fn kinetic(&self, c: &mut [Vec<Complex64>; 4], dt: f64) {
        for v in c.iter_mut() {
            self.spectral.forward(v);
        }
        let m = self.mass;
        for (j, &k) in self.spectral.wavenumbers().iter().enumerate() {
            let e = (k * k + m * m).sqrt();
            let (cos, sinc) = ((e * dt).cos(), (e * dt).sin() / e);
            let v = [c[0][j], c[1][j], c[2][j], c[3][j]];
            // K v with K = k σ_y⊗σ_x + m I⊗σ_z; K² = (k² + m²)·I
            let kv = [
                -I * k * v[3] + m * v[0],
                -I * k * v[2] - m * v[1],
                I * k * v[1] + m * v[2],
                I * k * v[0] - m * v[3],
            ];
            for q in 0..4 {
                c[q][j] = v[q] * cos - I * sinc * kv[q];
            }
        }
        for v in c.iter_mut() {
            self.spectral.inverse(v);
        }
    }

    fn unpack(&self, state: &EnlargedState) -> Result<[Vec<Complex64>; 4]> {
        if state.axes().len() != 1 || state.internal_dim() != 2 {
            return Err(Error::Usage(
                "Dirac parity evolution needs one symmetry axis and a two-component spinor".into(),
            ));
        }
        if state.components()[0].grid() != self.grid() {
            return Err(Error::Usage("state grid differs from evolver grid".into()));
        }
        let c = state.components();
        Ok([0, 1, 2, 3].map(|q| c[q].amplitudes().to_vec()))
    }

    fn pack(&self, state: &EnlargedState, c: [Vec<Complex64>; 4]) -> Result<EnlargedState> {
        let g = *self.grid();
        let comps = c
            .into_iter()
            .map(|v| ComplexField::new(g, v))
            .collect::<Result<Vec<_>>>()?;
        state.with_components(comps)
    }

    pub fn evolve(&self, state: &EnlargedState, params: &EvolutionParams) -> Result<EnlargedState> {
        let mut c = self.unpack(state)?;
        let dt = params.dt;
        // consecutive half potentials merge into one full step
        self.half_potential(&mut c, dt);
        for step in 0..params.steps {
            self.kinetic(&mut c, dt);
            let last = step + 1 == params.steps;
            self.half_potential(&mut c, if last { dt } else { 2.0 * dt });
        }
        self.pack(state, c)
    }

    /// A single Strang step of size `dt`.
    pub fn step(&self, state: &EnlargedState, dt: f64) -> Result<EnlargedState> {
        let mut c = self.unpack(state)?;
        self.half_potential(&mut c, dt);
        self.kinetic(&mut c, dt);
        self.half_potential(&mut c, dt);
        self.pack(state, c)
    }
}
