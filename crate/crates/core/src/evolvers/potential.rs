//! Polynomial potentials split into even and odd parts on a periodic grid.

use serde::{Deserialize, Serialize};

use crate::grid::Grid1D;
use crate::{Error, Result};

/// `V(x) = Σ_k coeffs[k-1]·x^k` for `k = 1..=d`, plus an optional constant.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub coeffs: Vec<f64>,
}

impl PotentialSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `V = λx`.
    pub fn linear(lambda: f64) -> Self {
        Self::polynomial(0.0, vec![lambda])
    }

    pub fn polynomial(constant: f64, coeffs: Vec<f64>) -> Self {
        Self { constant, coeffs }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.constant.is_finite() || self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("potential coefficients must be finite".into()));
        }
        Ok(())
    }

    fn coeff(&self, k: usize) -> f64 {
        if k == 0 {
            self.constant
        } else {
            self.coeffs.get(k - 1).copied().unwrap_or(0.0)
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Even part as a polynomial in `x²`, so `V^e(-x) = V^e(x)` bit for bit.
    pub fn even_part(&self, x: f64) -> f64 {
        let x2 = x * x;
        (0..self.degree() + 1)
            .step_by(2)
            .rev()
            .fold(0.0, |acc, k| acc * x2 + self.coeff(k))
    }

    /// Odd part as `x·q(x²)`, so `V^o(-x) = -V^o(x)` bit for bit.
    pub fn odd_part(&self, x: f64) -> f64 {
        let x2 = x * x;
        let q = (1..self.degree() + 1)
            .step_by(2)
            .rev()
            .fold(0.0, |acc, k| acc * x2 + self.coeff(k));
        x * q
    }

    pub fn value(&self, x: f64) -> f64 {
        self.even_part(x) + self.odd_part(x)
    }

    /// `∂_x V^o`, evaluated from the coefficients.
    pub fn odd_derivative(&self, x: f64) -> f64 {
        (1..=self.degree())
            .step_by(2)
            .map(|k| k as f64 * self.coeff(k) * x.powi(k as i32 - 1))
            .sum()
    }

    pub fn is_odd(&self) -> bool {
        (0..=self.degree()).step_by(2).all(|k| self.coeff(k) == 0.0)
    }

    pub fn is_even(&self) -> bool {
        (1..=self.degree()).step_by(2).all(|k| self.coeff(k) == 0.0)
    }

    pub fn max_even_coeff(&self) -> f64 {
        (0..=self.degree())
            .step_by(2)
            .map(|k| self.coeff(k).abs())
            .fold(0.0, f64::max)
    }

    pub fn sample(&self, grid: &Grid1D) -> SampledPotential {
        SampledPotential::new(self, grid)
    }
}

/// Potential tabulated on grid nodes.
///
/// Node 0 sits at `-L/2`, which is its own mirror image on the periodic
/// grid. The odd part is set to zero there and the full potential takes the
/// mean of its two one-sided values, so the tabulated odd part anticommutes
/// with the index parity exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    pub full: Vec<f64>,
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
    pub odd_derivative: Vec<f64>,
}

impl SampledPotential {
    pub fn new(spec: &PotentialSpec, grid: &Grid1D) -> Self {
        let n = grid.n_points();
        let even: Vec<f64> = (0..n).map(|j| spec.even_part(grid.x(j))).collect();
        let odd: Vec<f64> = (0..n)
            .map(|j| if j == 0 { 0.0 } else { spec.odd_part(grid.x(j)) })
            .collect();
        let full = even.iter().zip(&odd).map(|(e, o)| e + o).collect();
        let odd_derivative = (0..n).map(|j| spec.odd_derivative(grid.x(j))).collect();
        Self {
            full,
            even,
            odd,
            odd_derivative,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.full.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
