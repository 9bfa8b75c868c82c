//! Uniform periodic grids and complex fields on them.
//!
//! Nodes sit at `x_j = (j - N/2)·Δx`, so the origin is node `N/2` and the
//! parity map `x → -x` is the exact index permutation `j → (N - j) mod N`.
//! Node 0 (`x = -L/2`) is its own mirror image under the periodic
//! identification `-L/2 ≡ L/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Largest boundary amplitude, relative to the peak, accepted for a sampled packet.
pub const TAIL_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    length: f64,
    spacing: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 8, got {n_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!(
                "grid length must be positive and finite, got {length}"
            )));
        }
        Ok(Self {
            n_points,
            length,
            spacing: length / n_points as f64,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Position of node `j`.
    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.n_points / 2) as f64) * self.spacing
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Index of the node at `-x_j`.
    #[inline]
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n_points - j) % self.n_points
    }

    /// Signed FFT wavenumbers `2πm/L`, with the Nyquist entry set to zero.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|m| {
                let signed = match m {
                    m if m < n / 2 => m as f64,
                    m if m == n / 2 => 0.0,
                    m => m as f64 - n as f64,
                };
                2.0 * PI * signed / self.length
            })
            .collect()
    }
}

impl fmt::Display for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid1D(n={}, L={})", self.n_points, self.length)
    }
}

pub fn make_grid(n_points: usize, length: f64) -> Result<Grid1D> {
    Grid1D::new(n_points, length)
}

/// A complex amplitude per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    amplitudes: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::Usage(format!(
                "field has {} amplitudes, grid has {} nodes",
                amplitudes.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|&a| f(a)).collect(),
        }
    }

    /// Pointwise combination. Both fields must share a grid.
    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self {
            grid: self.grid,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Multiply node `j` by `f(x_j)`.
    pub fn mul_by(&self, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            amplitudes: self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(j, &a)| a * f(self.grid.x(j)))
                .collect(),
        }
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Usage(format!(
                "grid mismatch: {} vs {}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `Δx·Σ|ψ_j|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.spacing() * self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        let sum: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((self.grid.spacing() * sum).sqrt())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn normalized(&self) -> Self {
        let norm = self.norm_sqr().sqrt();
        self.map(|a| a / norm)
    }

    /// `⟨x^order⟩` without normalization.
    pub fn position_moment(&self, order: i32) -> f64 {
        let dx = self.grid.spacing();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm_sqr() * self.grid.x(j).powi(order))
            .sum::<f64>()
            * dx
    }
}

pub fn inner_product(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    f.check_grid(g)?;
    let sum: Complex64 = f
        .amplitudes
        .iter()
        .zip(&g.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * f.grid.spacing())
}

/// `ψ(x) → ψ(-x)` as an index permutation.
pub fn parity_mirror(f: &ComplexField) -> ComplexField {
    let grid = f.grid;
    let amplitudes = (0..grid.n_points())
        .map(|j| f.amplitudes[grid.mirror_index(j)])
        .collect();
    ComplexField { grid, amplitudes }
}

/// Gaussian wavepacket `exp[-(x-x0)²/γ²]·exp(i k0 x)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PacketParams {
    pub x0: f64,
    pub gamma_x: f64,
    #[serde(default)]
    pub k0: f64,
}

impl PacketParams {
    pub fn new(x0: f64, gamma_x: f64, k0: f64) -> Result<Self> {
        let p = Self { x0, gamma_x, k0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_x.is_finite() && self.gamma_x > 0.0) {
            return Err(Error::Config(format!(
                "gamma_x must be positive, got {}",
                self.gamma_x
            )));
        }
        if !(self.x0.is_finite() && self.k0.is_finite()) {
            return Err(Error::Config("packet center and momentum must be finite".into()));
        }
        Ok(())
    }

    /// Unnormalized amplitude at `x`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let u = (x - self.x0) / self.gamma_x;
        Complex64::from_polar((-u * u).exp(), self.k0 * x)
    }
}

/// Largest boundary magnitude relative to the peak magnitude.
pub fn boundary_tail(f: &ComplexField) -> f64 {
    let a = f.amplitudes();
    let peak = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    a[0].norm().max(a[a.len() - 1].norm()) / peak
}

pub fn sample_packet(grid: &Grid1D, p: &PacketParams) -> Result<ComplexField> {
    p.validate()?;
    let raw = ComplexField::from_fn(*grid, |x| p.evaluate(x));
    let tail = boundary_tail(&raw);
    if tail > TAIL_LIMIT {
        return Err(Error::TailViolation {
            tail,
            limit: TAIL_LIMIT,
        });
    }
    Ok(raw.normalized())
}

/// Planned FFTs and wavenumbers for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid: *grid,
            forward: planner.plan_fft_forward(grid.n_points()),
            inverse: planner.plan_fft_inverse(grid.n_points()),
            wavenumbers: grid.wavenumbers(),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform including the `1/N` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.grid.n_points() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    /// Apply the Fourier multiplier `m(k)` to a field.
    pub fn apply_multiplier(
        &self,
        f: &ComplexField,
        mult: impl Fn(f64) -> Complex64,
    ) -> ComplexField {
        let mut data = f.amplitudes.clone();
        self.forward(&mut data);
        for (z, &k) in data.iter_mut().zip(&self.wavenumbers) {
            *z *= mult(k);
        }
        self.inverse(&mut data);
        ComplexField {
            grid: f.grid,
            amplitudes: data,
        }
    }

    pub fn derivative(&self, f: &ComplexField) -> ComplexField {
        self.apply_multiplier(f, |k| Complex64::new(0.0, k))
    }

    /// `p = -i∂_x`, i.e. multiplier `k`.
    pub fn momentum(&self, f: &ComplexField) -> ComplexField {
        self.apply_multiplier(f, |k| Complex64::new(k, 0.0))
    }
}

pub fn spectral_derivative(f: &ComplexField) -> ComplexField {
    Spectral::new(f.grid()).derivative(f)
}

/// Product of two periodic grids; `x` is the slow (row) index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    amplitudes: Vec<Complex64>,
}

impl Field2D {
    pub fn new(grid: Grid2D, amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = grid.x.n_points() * grid.y.n_points();
        if amplitudes.len() != len {
            return Err(Error::Usage(format!(
                "2D field has {} amplitudes, grid has {len} nodes",
                amplitudes.len()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let (nx, ny) = (grid.x.n_points(), grid.y.n_points());
        let mut amplitudes = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            for iy in 0..ny {
                amplitudes.push(f(grid.x.x(ix), grid.y.x(iy)));
            }
        }
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.grid.y.n_points() + iy
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.amplitudes[self.index(ix, iy)]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Usage("2D grid mismatch".into()));
        }
        Ok(Self {
            grid: self.grid,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    fn permuted(&self, mirror_x: bool, mirror_y: bool) -> Self {
        let (nx, ny) = (self.grid.x.n_points(), self.grid.y.n_points());
        let mut amplitudes = Vec::with_capacity(nx * ny);
        for ix in 0..nx {
            let sx = if mirror_x { self.grid.x.mirror_index(ix) } else { ix };
            for iy in 0..ny {
                let sy = if mirror_y { self.grid.y.mirror_index(iy) } else { iy };
                amplitudes.push(self.at(sx, sy));
            }
        }
        Self {
            grid: self.grid,
            amplitudes,
        }
    }

    /// `ψ(x, y) → ψ(-x, y)`.
    pub fn mirror_x(&self) -> Self {
        self.permuted(true, false)
    }

    /// `ψ(x, y) → ψ(x, -y)`.
    pub fn mirror_y(&self) -> Self {
        self.permuted(false, true)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::Usage("2D grid mismatch".into()));
        }
        let sum: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.x.spacing() * self.grid.y.spacing())
    }
}
