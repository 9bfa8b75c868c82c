//! Even/odd encoding of a wavefunction into the enlarged space.
//!
//! An [`EnlargedState`] holds one amplitude container per
//! `(axis bitstring, internal index)`. Axis bits are big-endian in axis
//! construction order, bit 0 = even and bit 1 = odd, and the flat component
//! index is `bits * internal_dim + internal`. The internal spinor index is a
//! separate factor and never a symmetry axis.
//!
//! Projection onto the simulated space is the readout row `(1, …, 1)`;
//! preceding it with `σ_z` on a set of axes reads out the transformed frame.

use std::fmt::Debug;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{boundary_tail, parity_mirror, ComplexField, Field2D, Grid1D, PacketParams, TAIL_LIMIT};
use crate::spin::SpinVector;
use crate::transforms::{initial_condition_determined, LinearCoordMap};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Amplitude containers that can be stored as enlarged-state components.
pub trait Amplitudes: Clone + PartialEq + Debug {
    fn zeros_like(&self) -> Self;
    fn map_amp(&self, f: impl Fn(Complex64) -> Complex64) -> Self;
    fn zip_amp(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self>;
    fn inner(&self, other: &Self) -> Result<Complex64>;
}

impl Amplitudes for ComplexField {
    fn zeros_like(&self) -> Self {
        ComplexField::zeros(*self.grid())
    }
    fn map_amp(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        self.map(f)
    }
    fn zip_amp(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.zip_with(other, f)
    }
    fn inner(&self, other: &Self) -> Result<Complex64> {
        crate::grid::inner_product(self, other)
    }
}

impl Amplitudes for Field2D {
    fn zeros_like(&self) -> Self {
        self.map(|_| Complex64::new(0.0, 0.0))
    }
    fn map_amp(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        self.map(f)
    }
    fn zip_amp(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.zip_with(other, f)
    }
    fn inner(&self, other: &Self) -> Result<Complex64> {
        Field2D::inner(self, other)
    }
}

impl Amplitudes for SpinVector {
    fn zeros_like(&self) -> Self {
        SpinVector(self.0.map(|_| Complex64::new(0.0, 0.0)))
    }
    fn map_amp(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SpinVector(self.0.map(f))
    }
    fn zip_amp(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Usage("vector dimension mismatch".into()));
        }
        Ok(SpinVector(self.0.zip_map(&other.0, f)))
    }
    fn inner(&self, other: &Self) -> Result<Complex64> {
        SpinVector::inner(self, other)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisKind {
    Map(LinearCoordMap),
    TimeParity,
    XParity,
    YParity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryAxis {
    pub label: String,
    pub kind: AxisKind,
}

impl SymmetryAxis {
    pub fn new(label: impl Into<String>, kind: AxisKind) -> Self {
        Self {
            label: label.into(),
            kind,
        }
    }

    pub fn x_parity() -> Self {
        Self::new("x-parity", AxisKind::XParity)
    }

    pub fn y_parity() -> Self {
        Self::new("y-parity", AxisKind::YParity)
    }

    pub fn time_parity() -> Self {
        Self::new("time-parity", AxisKind::TimeParity)
    }

    pub fn map(label: impl Into<String>, map: LinearCoordMap) -> Self {
        Self::new(label, AxisKind::Map(map))
    }

    /// Spacetime map of the axis, for axes acting on `(t, x)`.
    pub fn linear_map(&self) -> Option<LinearCoordMap> {
        match self.kind {
            AxisKind::Map(m) => Some(m),
            AxisKind::TimeParity => Some(LinearCoordMap::T_PARITY),
            AxisKind::XParity => Some(LinearCoordMap::X_PARITY),
            AxisKind::YParity => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliAxisGate {
    pub axis: String,
    pub pauli: Pauli,
}

impl PauliAxisGate {
    pub fn new(axis: impl Into<String>, pauli: Pauli) -> Self {
        Self {
            axis: axis.into(),
            pauli,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnlargedState<A = ComplexField> {
    axes: Vec<SymmetryAxis>,
    internal_dim: usize,
    components: Vec<A>,
}

impl<A: Amplitudes> EnlargedState<A> {
    pub fn new(axes: Vec<SymmetryAxis>, internal_dim: usize, components: Vec<A>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.label == a.label) {
                return Err(Error::Usage(format!("duplicate axis label {:?}", a.label)));
            }
        }
        if internal_dim == 0 {
            return Err(Error::Usage("internal dimension must be positive".into()));
        }
        let expected = (1usize << axes.len()) * internal_dim;
        if components.len() != expected {
            return Err(Error::Usage(format!(
                "expected {expected} components for {} axes x internal {internal_dim}, got {}",
                axes.len(),
                components.len()
            )));
        }
        for c in &components[1..] {
            // same space check
            components[0].inner(c)?;
        }
        Ok(Self {
            axes,
            internal_dim,
            components,
        })
    }

    /// `Ψ = (1, 0, …, 0)^T ⊗ ψ`: everything in the all-even block.
    pub fn seeded(axes: Vec<SymmetryAxis>, internal: Vec<A>) -> Result<Self> {
        let internal_dim = internal.len();
        if internal_dim == 0 {
            return Err(Error::Usage("need at least one internal component".into()));
        }
        let blocks = 1usize << axes.len();
        let zero = internal[0].zeros_like();
        let mut components = internal;
        components.extend(std::iter::repeat_n(zero, (blocks - 1) * internal_dim));
        Self::new(axes, internal_dim, components)
    }

    pub fn axes(&self) -> &[SymmetryAxis] {
        &self.axes
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn n_blocks(&self) -> usize {
        1 << self.axes.len()
    }

    pub fn components(&self) -> &[A] {
        &self.components
    }

    pub fn into_components(self) -> Vec<A> {
        self.components
    }

    pub fn component(&self, bits: usize, internal: usize) -> &A {
        &self.components[bits * self.internal_dim + internal]
    }

    /// Same axes, new components (validated).
    pub fn with_components(&self, components: Vec<A>) -> Result<Self> {
        Self::new(self.axes.clone(), self.internal_dim, components)
    }

    /// Bitstring name of a flat index, e.g. `01_0`.
    pub fn component_name(&self, index: usize) -> String {
        let bits = index / self.internal_dim;
        let internal = index % self.internal_dim;
        let n = self.axes.len();
        let s: String = (0..n)
            .map(|p| if bits >> (n - 1 - p) & 1 == 1 { '1' } else { '0' })
            .collect();
        format!("{s}_{internal}")
    }

    pub fn axis_position(&self, label: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| Error::Usage(format!("unknown axis label {label:?}")))
    }

    /// Bit mask of the axis inside a block index.
    pub fn axis_mask(&self, label: &str) -> Result<usize> {
        let p = self.axis_position(label)?;
        Ok(1 << (self.axes.len() - 1 - p))
    }

    pub fn subset_mask(&self, labels: &[&str]) -> Result<usize> {
        labels
            .iter()
            .try_fold(0usize, |m, l| Ok(m | self.axis_mask(l)?))
    }

    /// `Σ_c ⟨Ψ_c|Ψ_c⟩`.
    pub fn total_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.inner(c).map(|z| z.re).unwrap_or(f64::NAN))
            .sum()
    }

    pub fn apply_axis_gate(&self, gate: &PauliAxisGate) -> Result<Self> {
        let mask = self.axis_mask(&gate.axis)?;
        let d = self.internal_dim;
        let comps = &self.components;
        let components = (0..comps.len())
            .map(|idx| {
                let bits = idx / d;
                let partner = (bits ^ mask) * d + idx % d;
                let odd = bits & mask != 0;
                match gate.pauli {
                    Pauli::I => comps[idx].clone(),
                    Pauli::X => comps[partner].clone(),
                    Pauli::Y if odd => comps[partner].map_amp(|z| z * I),
                    Pauli::Y => comps[partner].map_amp(|z| -(z * I)),
                    Pauli::Z if odd => comps[idx].map_amp(|z| -z),
                    Pauli::Z => comps[idx].clone(),
                }
            })
            .collect();
        Ok(Self {
            axes: self.axes.clone(),
            internal_dim: d,
            components,
        })
    }

    /// `ψ = (1, …, 1)Ψ`, one entry per internal index.
    pub fn project_physical(&self) -> Vec<A> {
        (0..self.internal_dim)
            .map(|i| {
                let mut acc = self.component(0, i).clone();
                for b in 1..self.n_blocks() {
                    acc = acc
                        .zip_amp(self.component(b, i), |a, c| a + c)
                        .expect("components share one space");
                }
                acc
            })
            .collect()
    }

    /// Projection after `σ_z` on each listed axis.
    pub fn read_transformed(&self, axes_subset: &[&str]) -> Result<Vec<A>> {
        let mut state = self.clone();
        for label in axes_subset {
            state = state.apply_axis_gate(&PauliAxisGate::new(*label, Pauli::Z))?;
        }
        Ok(state.project_physical())
    }

    /// Tensor the components with a constant internal spinor.
    pub fn with_internal_spinor(&self, spinor: &[Complex64]) -> Result<Self> {
        if self.internal_dim != 1 {
            return Err(Error::Usage("spinor can only be attached to scalar states".into()));
        }
        let components = self
            .components
            .iter()
            .flat_map(|c| spinor.iter().map(move |&s| c.map_amp(|z| z * s)))
            .collect();
        Self::new(self.axes.clone(), spinor.len(), components)
    }

    pub fn map_components(&self, f: impl Fn(&A) -> Result<A>) -> Result<Self> {
        let components = self.components.iter().map(f).collect::<Result<Vec<_>>>()?;
        self.with_components(components)
    }

    /// Largest component-wise deviation in the inner-product norm.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.components.len() != other.components.len() {
            return Err(Error::Usage("state layouts differ".into()));
        }
        let mut sum = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            let d = a.zip_amp(b, |x, y| x - y)?;
            sum += d.inner(&d)?.re;
        }
        Ok(sum.sqrt())
    }
}

/// `(ψ^e, ψ^o) = ½[ψ ± partner]` on a single axis.
pub fn split_with_partner<A: Amplitudes>(psi: &A, partner: &A, axis: SymmetryAxis) -> Result<EnlargedState<A>> {
    let even = psi.zip_amp(partner, |a, b| (a + b) * 0.5)?;
    let odd = psi.zip_amp(partner, |a, b| (a - b) * 0.5)?;
    EnlargedState::new(vec![axis], 1, vec![even, odd])
}

/// Closed form `poly(x)·exp[-(x-x0)²/γ²]·exp(i k0 x)`, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticForm {
    pub packet: PacketParams,
    #[serde(default = "unit_poly")]
    pub poly: Vec<f64>,
}

fn unit_poly() -> Vec<f64> {
    vec![1.0]
}

impl AnalyticForm {
    pub fn gaussian(packet: PacketParams) -> Self {
        Self {
            packet,
            poly: unit_poly(),
        }
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        let p = self.poly.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        self.packet.evaluate(x) * p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Sampled(ComplexField),
    /// Normalized to unit norm on `grid` over its original coordinate.
    Analytic { grid: Grid1D, form: AnalyticForm },
}

impl InitialState {
    pub fn grid(&self) -> &Grid1D {
        match self {
            InitialState::Sampled(f) => f.grid(),
            InitialState::Analytic { grid, .. } => grid,
        }
    }

    /// `ψ(x_j, 0)` on the grid.
    pub fn sample(&self) -> Result<ComplexField> {
        match self {
            InitialState::Sampled(f) => Ok(f.clone()),
            InitialState::Analytic { grid, form } => {
                let raw = ComplexField::from_fn(*grid, |x| form.evaluate(x));
                let tail = boundary_tail(&raw);
                if tail > TAIL_LIMIT {
                    return Err(Error::TailViolation {
                        tail,
                        limit: TAIL_LIMIT,
                    });
                }
                Ok(raw.normalized())
            }
        }
    }

    /// `ψ(a·x_j, 0)` with the same normalization as [`InitialState::sample`].
    pub fn sample_dilated(&self, a: f64) -> Result<ComplexField> {
        if a == 1.0 {
            return self.sample();
        }
        if a == -1.0 {
            return Ok(parity_mirror(&self.sample()?));
        }
        match self {
            InitialState::Sampled(f) => {
                if a.fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "dilation by {a} does not map grid nodes to nodes; \
                         supply the initial state in closed form"
                    )));
                }
                let g = *f.grid();
                let n = g.n_points() as i64;
                let amps = (0..n)
                    .map(|j| {
                        let src = ((j - n / 2) * a as i64 + n / 2).rem_euclid(n);
                        f.amplitudes()[src as usize]
                    })
                    .collect();
                ComplexField::new(g, amps)
            }
            InitialState::Analytic { grid, form } => {
                let raw = ComplexField::from_fn(*grid, |x| form.evaluate(x));
                let norm = raw.norm_sqr().sqrt();
                Ok(ComplexField::from_fn(*grid, |x| form.evaluate(a * x) / norm))
            }
        }
    }
}

/// `Ψ(x, 0) = ½[ψ(x, 0) ± ψ(x'(x, 0), 0)]` along one axis.
pub fn even_odd_split(psi0: &InitialState, axis: SymmetryAxis) -> Result<EnlargedState> {
    let map = axis.linear_map().ok_or_else(|| {
        Error::Usage(format!("axis {:?} does not act on a 1D coordinate", axis.label))
    })?;
    if !initial_condition_determined(&map) {
        return Err(Error::NeedsFullWavefunction);
    }
    let psi = psi0.sample()?;
    // t' = a00·0 = 0, so the partner is ψ(a11·x, 0)
    let partner = psi0.sample_dilated(map.a11)?;
    split_with_partner(&psi, &partner, axis)
}

/// Four-component parity decomposition of `ψ(x, y)`, ordered ee, eo, oe, oo.
pub fn decompose_2d(psi: &Field2D) -> Result<EnlargedState<Field2D>> {
    let a = psi;
    let b = psi.mirror_x();
    let c = psi.mirror_y();
    let d = b.mirror_y();
    let s1 = a.zip_amp(&b, |p, q| p + q)?;
    let s2 = c.zip_amp(&d, |p, q| p + q)?;
    let d1 = a.zip_amp(&b, |p, q| p - q)?;
    let d2 = c.zip_amp(&d, |p, q| p - q)?;
    let plus = |p: &Field2D, q: &Field2D| p.zip_amp(q, |u, v| (u + v) * 0.25);
    let minus = |p: &Field2D, q: &Field2D| p.zip_amp(q, |u, v| (u - v) * 0.25);
    EnlargedState::new(
        vec![SymmetryAxis::x_parity(), SymmetryAxis::y_parity()],
        1,
        vec![plus(&s1, &s2)?, minus(&s1, &s2)?, plus(&d1, &d2)?, minus(&d1, &d2)?],
    )
}
