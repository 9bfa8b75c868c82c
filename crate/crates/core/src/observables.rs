//! Expectation values in the original and transformed frames, cross-frame
//! correlations, the propagator protocol and self-correlations.
//!
//! Frame values are computed from readout fields: `ψ = (1,…,1)Ψ` and
//! `ψ' = (1,…,1)σ_zΨ` on the chosen axes. [`enlarged_matrix_element`]
//! evaluates the same quantities as `⟨Ψ|M⊗O|Ψ⟩` with `M` one of
//! `I ± σ_x`, `σ_z ∓ iσ_y`; the two agree by construction of the readout.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{Amplitudes, EnlargedState, SymmetryAxis};
use crate::evolvers::{evolve_time_parity, MatrixSpec, PlainEvolver};
use crate::grid::{inner_product, sample_packet, ComplexField, Grid1D, PacketParams, Spectral};
use crate::spin::{anticommutator_norm, pauli, SpinOperator, SpinVector, ANTICOMMUTE_TOL, HERMITIAN_TOL};
use crate::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObservableKind {
    Norm,
    PositionMoment { order: u8 },
    MomentumMoment { order: u8 },
    DensityProfile,
    OverlapWith { reference: PacketParams },
    SpinMatrix { matrix: MatrixSpec },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    #[default]
    Original,
    Transformed,
    Cross,
}

impl Frame {
    /// The 2×2 axis matrix of `⟨Ψ|M⊗O|Ψ⟩`.
    pub fn axis_matrix(self) -> Matrix2<Complex64> {
        let id = Matrix2::identity();
        match self {
            Frame::Original => id + pauli2(1),
            Frame::Transformed => id - pauli2(1),
            Frame::Cross => pauli2(3) - pauli2(2) * I,
        }
    }
}

/// `σ_z + iσ_y`, whose expectation on `Ψ̃` is `⟨ψ0|ψ(2t)⟩`.
pub fn propagator_axis_matrix() -> Matrix2<Complex64> {
    pauli2(3) + pauli2(2) * I
}

fn pauli2(j: u8) -> Matrix2<Complex64> {
    let m = pauli(j).expect("valid index").into_matrix();
    Matrix2::from_fn(|r, c| m[(r, c)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub kind: ObservableKind,
    #[serde(default)]
    pub frame: Frame,
    /// Axes on which `σ_z` precedes the transformed readout; all axes if absent.
    #[serde(default)]
    pub axes: Option<Vec<String>>,
}

impl ObservableSpec {
    pub fn new(kind: ObservableKind, frame: Frame) -> Self {
        Self {
            name: None,
            kind,
            frame,
            axes: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ObservableKind::PositionMoment { order } | ObservableKind::MomentumMoment { order }
                if !(1..=2).contains(order) =>
            {
                Err(Error::Config(format!("moment order must be 1 or 2, got {order}")))
            }
            ObservableKind::OverlapWith { reference } => reference.validate(),
            ObservableKind::SpinMatrix { matrix } => matrix.build().map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        let base = match &self.kind {
            ObservableKind::Norm => "norm".to_string(),
            ObservableKind::PositionMoment { order } => format!("x{order}"),
            ObservableKind::MomentumMoment { order } => format!("p{order}"),
            ObservableKind::DensityProfile => "density".to_string(),
            ObservableKind::OverlapWith { .. } => "overlap".to_string(),
            ObservableKind::SpinMatrix { .. } => "spin".to_string(),
        };
        let frame = match self.frame {
            Frame::Original => "orig",
            Frame::Transformed => "trans",
            Frame::Cross => "cross",
        };
        format!("{base}_{frame}")
    }
}

/// Operator acting on the simulated-space factor.
#[derive(Debug, Clone)]
pub enum Operator {
    Identity,
    Position(u8),
    Momentum(u8, Spectral),
    /// `|r⟩⟨r|` on the spatial factor.
    Projector(ComplexField),
    /// Pointwise multiplier on grid nodes.
    Diagonal(Vec<Complex64>),
    /// Matrix on the internal index (or the whole vector for spin states).
    Spin(SpinOperator),
}

impl Operator {
    pub fn momentum(grid: &Grid1D, order: u8) -> Self {
        Operator::Momentum(order, Spectral::new(grid))
    }

    /// Runtime operator for an observable kind; `None` for [`ObservableKind::DensityProfile`].
    pub fn from_kind(kind: &ObservableKind, grid: Option<&Grid1D>) -> Result<Option<Self>> {
        let need_grid = || grid.ok_or_else(|| Error::Unsupported("spatial observable on a spin state".into()));
        Ok(Some(match kind {
            ObservableKind::Norm => Operator::Identity,
            ObservableKind::PositionMoment { order } => {
                need_grid()?;
                Operator::Position(*order)
            }
            ObservableKind::MomentumMoment { order } => Operator::momentum(need_grid()?, *order),
            ObservableKind::OverlapWith { reference } => Operator::Projector(sample_packet(need_grid()?, reference)?),
            ObservableKind::SpinMatrix { matrix } => Operator::Spin(matrix.build()?),
            ObservableKind::DensityProfile => return Ok(None),
        }))
    }
}

/// Action of an [`Operator`] on the internal components of one block.
pub trait ApplyOperator: Amplitudes {
    fn apply_operator(op: &Operator, comps: &[Self]) -> Result<Vec<Self>>;
}

impl ApplyOperator for ComplexField {
    fn apply_operator(op: &Operator, comps: &[Self]) -> Result<Vec<Self>> {
        match op {
            Operator::Identity => Ok(comps.to_vec()),
            Operator::Position(order) => Ok(comps
                .iter()
                .map(|f| f.mul_by(|x| Complex64::new(x.powi(*order as i32), 0.0)))
                .collect()),
            Operator::Momentum(order, spectral) => Ok(comps
                .iter()
                .map(|f| spectral.apply_multiplier(f, |k| Complex64::new(k.powi(*order as i32), 0.0)))
                .collect()),
            Operator::Projector(r) => comps
                .iter()
                .map(|f| {
                    let c = inner_product(r, f)?;
                    Ok(r.map(|z| z * c))
                })
                .collect(),
            Operator::Diagonal(d) => comps
                .iter()
                .map(|f| {
                    if d.len() != f.amplitudes().len() {
                        return Err(Error::Usage("diagonal operator length differs from grid".into()));
                    }
                    let amps = f.amplitudes().iter().zip(d).map(|(a, b)| a * b).collect();
                    ComplexField::new(*f.grid(), amps)
                })
                .collect(),
            Operator::Spin(m) => {
                if m.dim() != comps.len() {
                    return Err(Error::Usage(format!(
                        "spin matrix of dimension {} on {} internal components",
                        m.dim(),
                        comps.len()
                    )));
                }
                let mat = m.matrix();
                (0..comps.len())
                    .map(|r| {
                        let mut acc = comps[0].map(|z| z * mat[(r, 0)]);
                        for (c, comp) in comps.iter().enumerate().skip(1) {
                            acc = acc.zip_with(comp, |a, b| a + b * mat[(r, c)])?;
                        }
                        Ok(acc)
                    })
                    .collect()
            }
        }
    }
}

impl ApplyOperator for SpinVector {
    fn apply_operator(op: &Operator, comps: &[Self]) -> Result<Vec<Self>> {
        match op {
            Operator::Identity => Ok(comps.to_vec()),
            Operator::Spin(m) => comps.iter().map(|v| m.apply(v)).collect(),
            _ => Err(Error::Unsupported("spatial observable on a spin state".into())),
        }
    }
}

fn multi_inner<A: Amplitudes>(f: &[A], g: &[A]) -> Result<Complex64> {
    f.iter().zip(g).try_fold(C0, |acc, (a, b)| Ok(acc + a.inner(b)?))
}

fn single_axis<A: Amplitudes>(state: &EnlargedState<A>) -> Result<&SymmetryAxis> {
    match state.axes() {
        [a] => Ok(a),
        _ => Err(Error::Usage(
            "single-axis frame observable on a multi-axis state; use expect_in_frame with an axes subset".into(),
        )),
    }
}

/// `⟨ψ|O|ψ⟩`, `⟨ψ'|O|ψ'⟩` or `⟨ψ|O|ψ'⟩` from readout fields.
pub fn expect_in_frame<A: ApplyOperator>(
    state: &EnlargedState<A>,
    op: &Operator,
    frame: Frame,
    axes_subset: &[&str],
) -> Result<Complex64> {
    let proj = state.project_physical();
    let read = state.read_transformed(axes_subset)?;
    let (left, right) = match frame {
        Frame::Original => (&proj, &proj),
        Frame::Transformed => (&read, &read),
        Frame::Cross => (&proj, &read),
    };
    multi_inner(left, &A::apply_operator(op, right)?)
}

pub fn expect_original<A: ApplyOperator>(state: &EnlargedState<A>, op: &Operator) -> Result<Complex64> {
    let axis = single_axis(state)?;
    expect_in_frame(state, op, Frame::Original, &[axis.label.as_str()])
}

pub fn expect_transformed<A: ApplyOperator>(state: &EnlargedState<A>, op: &Operator) -> Result<Complex64> {
    let axis = single_axis(state)?;
    expect_in_frame(state, op, Frame::Transformed, &[axis.label.as_str()])
}

/// `⟨ψ|O|ψ'⟩`; complex in general.
pub fn cross_correlation<A: ApplyOperator>(state: &EnlargedState<A>, op: &Operator) -> Result<Complex64> {
    let axis = single_axis(state)?;
    expect_in_frame(state, op, Frame::Cross, &[axis.label.as_str()])
}

/// `⟨Ψ| (⊗_a M_a) ⊗ O |Ψ⟩`, with `M_a = I + σ_x` on axes not listed.
pub fn enlarged_matrix_element<A: ApplyOperator>(
    state: &EnlargedState<A>,
    op: &Operator,
    axis_matrices: &[(&str, Matrix2<Complex64>)],
) -> Result<Complex64> {
    let n = state.axes().len();
    let mut mats = vec![Frame::Original.axis_matrix(); n];
    for (label, m) in axis_matrices {
        mats[state.axis_position(label)?] = *m;
    }
    let d = state.internal_dim();
    let blocks = state.n_blocks();
    let block = |b: usize| &state.components()[b * d..(b + 1) * d];
    let applied = (0..blocks)
        .map(|b| A::apply_operator(op, block(b)))
        .collect::<Result<Vec<_>>>()?;
    let mut total = C0;
    for (bl, left) in (0..blocks).map(|b| (b, block(b))) {
        for (br, right) in applied.iter().enumerate() {
            let weight = (0..n).fold(C1, |w, p| {
                let shift = n - 1 - p;
                w * mats[p][((bl >> shift) & 1, (br >> shift) & 1)]
            });
            if weight != C0 {
                total += weight * multi_inner(left, right)?;
            }
        }
    }
    Ok(total)
}

/// Frame value of a spec, or `None` for density profiles.
pub fn evaluate<A: ApplyOperator>(
    spec: &ObservableSpec,
    state: &EnlargedState<A>,
    grid: Option<&Grid1D>,
) -> Result<Option<Complex64>> {
    let Some(op) = Operator::from_kind(&spec.kind, grid)? else {
        return Ok(None);
    };
    let subset: Vec<&str> = match &spec.axes {
        Some(a) => a.iter().map(String::as_str).collect(),
        None => state.axes().iter().map(|a| a.label.as_str()).collect(),
    };
    expect_in_frame(state, &op, spec.frame, &subset).map(Some)
}

/// `Σ_s conj(f_s)·g_s` per node for the frame's readout pair.
pub fn density_profile(state: &EnlargedState, frame: Frame, axes_subset: &[&str]) -> Result<ComplexField> {
    let proj = state.project_physical();
    let read = state.read_transformed(axes_subset)?;
    let (left, right) = match frame {
        Frame::Original => (&proj, &proj),
        Frame::Transformed => (&read, &read),
        Frame::Cross => (&proj, &read),
    };
    let mut acc = ComplexField::zeros(*proj[0].grid());
    for (f, g) in left.iter().zip(right) {
        let term = f.zip_with(g, |a, b| a.conj() * b)?;
        acc = acc.zip_with(&term, |a, b| a + b)?;
    }
    Ok(acc)
}

/// `⟨ψ0|e^{-i2tH}|ψ0⟩` from `⟨Ψ̃|(σ_z + iσ_y)|Ψ̃⟩`.
///
/// `Ψ(0) = (ψ0, 0)` evolves under `σ_x⊗H` for `t`, then under `I⊗H` for
/// `Δ = t`, giving `Ψ̃ = ½(ψ(2t) + ψ0, ψ(2t) - ψ0)`.
pub fn propagator_expectation<A, E>(psi0: &A, base: &E, t: f64) -> Result<Complex64>
where
    A: ApplyOperator,
    E: PlainEvolver<A>,
{
    let axis = SymmetryAxis::time_parity();
    let label = axis.label.clone();
    let start = EnlargedState::seeded(vec![axis], vec![psi0.clone()])?;
    let evolved = evolve_time_parity(&start, base, t)?;
    let tilde = if t == 0.0 {
        evolved
    } else {
        evolved.map_components(|c| base.propagate(c, t))?
    };
    enlarged_matrix_element(&tilde, &Operator::Identity, &[(&label, propagator_axis_matrix())])
}

/// `σ_j(τ) = e^{-iτH} σ_j e^{iτH}`.
pub fn heisenberg_operator(h: &SpinOperator, sigma: &SpinOperator, tau: f64) -> Result<SpinOperator> {
    if h.dim() != sigma.dim() {
        return Err(Error::Usage("operator dimensions differ".into()));
    }
    if tau == 0.0 {
        return Ok(sigma.clone());
    }
    let m = h.propagator(tau) * sigma.matrix() * h.propagator(-tau);
    SpinOperator::new(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationForm {
    /// `⟨ψ'|σ_j(-t/2)σ_j(t/2)|ψ'⟩`, valid when `{H, σ_j} = 0`.
    Heisenberg,
    /// `⟨ψ'|σ_j e^{-i2tH} σ_j|ψ'⟩`.
    Propagator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfCorrelation {
    pub value: Complex64,
    pub form: CorrelationForm,
    pub anticommutator: f64,
}

fn is_unitary_hermitian(sigma: &SpinOperator) -> bool {
    let m = sigma.matrix();
    let n = m.nrows();
    let sq = m * m - DMatrix::<Complex64>::identity(n, n);
    sigma.is_hermitian() && sq.iter().all(|z| z.norm() <= HERMITIAN_TOL)
}

/// Self-correlation of `σ_j` on `|ψ'⟩ = σ_j|ψ0⟩` at separation `t`.
///
/// With `{H, σ_j} = 0` this is the Heisenberg product, equal to
/// `⟨ψ0|e^{-i2tH}|ψ0⟩` and to the conjugate of `⟨ψ'|e^{-i2tH}|ψ'⟩`.
/// Otherwise the propagator form is returned and flagged.
pub fn self_correlation(psi0: &SpinVector, h: &SpinOperator, sigma: &SpinOperator, t: f64) -> Result<SelfCorrelation> {
    if !is_unitary_hermitian(sigma) {
        return Err(Error::Config("σ_j must be hermitian with σ_j² = I".into()));
    }
    let anticommutator = anticommutator_norm(h, sigma)?;
    let psi1 = sigma.apply(psi0)?;
    if anticommutator < ANTICOMMUTE_TOL {
        let early = heisenberg_operator(h, sigma, -t / 2.0)?;
        let late = heisenberg_operator(h, sigma, t / 2.0)?;
        let v = early.apply(&late.apply(&psi1)?)?;
        Ok(SelfCorrelation {
            value: psi1.inner(&v)?,
            form: CorrelationForm::Heisenberg,
            anticommutator,
        })
    } else {
        let v = SpinVector(h.propagator(2.0 * t) * &sigma.apply(&psi1)?.0);
        Ok(SelfCorrelation {
            value: sigma.apply(&psi1)?.inner(&v)?,
            form: CorrelationForm::Propagator,
            anticommutator,
        })
    }
}
