//! Linear coordinate maps `t' = a00·t`, `x' = a10·t + a11·x`.
//!
//! The coefficient `a01` (mixing `x` into `t'`) is not representable: such a
//! map makes `t'(x, 0) ≠ 0`, and the enlarged initial state would then depend
//! on the evolved wavefunction it is supposed to produce.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearCoordMap {
    pub a00: f64,
    pub a10: f64,
    pub a11: f64,
}

/// Coefficients of `i∂_tΨ = -i[t1·I + t2·σ_x]∂_xΨ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeCoeffs {
    pub t1: f64,
    pub t2: f64,
}

impl TildeCoeffs {
    pub const IDENTITY: TildeCoeffs = TildeCoeffs { t1: 1.0, t2: 0.0 };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Identity,
    SpatialParity,
    TimeParity,
    GalileanBoost,
    SpatialDilation,
    TimeDilation,
    General,
}

impl MapKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MapKind::Identity => "identity",
            MapKind::SpatialParity => "spatial-parity",
            MapKind::TimeParity => "time-parity",
            MapKind::GalileanBoost => "galilean-boost",
            MapKind::SpatialDilation => "spatial-dilation",
            MapKind::TimeDilation => "time-dilation",
            MapKind::General => "general",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl LinearCoordMap {
    pub const IDENTITY: LinearCoordMap = LinearCoordMap {
        a00: 1.0,
        a10: 0.0,
        a11: 1.0,
    };
    pub const X_PARITY: LinearCoordMap = LinearCoordMap {
        a00: 1.0,
        a10: 0.0,
        a11: -1.0,
    };
    pub const T_PARITY: LinearCoordMap = LinearCoordMap {
        a00: -1.0,
        a10: 0.0,
        a11: 1.0,
    };

    pub fn new(a00: f64, a10: f64, a11: f64) -> Result<Self> {
        let map = Self { a00, a10, a11 };
        validate_map(&map)?;
        Ok(map)
    }

    /// Build from the full 2×2 coefficient matrix; rejects any `a01 ≠ 0`.
    pub fn from_matrix(a00: f64, a01: f64, a10: f64, a11: f64) -> Result<Self> {
        if a01 != 0.0 {
            return Err(Error::NeedsFullWavefunction);
        }
        Self::new(a00, a10, a11)
    }

    /// `(t, x) → (t, x - v·t)`.
    pub fn boost(velocity: f64) -> Result<Self> {
        Self::new(1.0, -velocity, 1.0)
    }

    pub fn spatial_dilation(alpha: f64) -> Result<Self> {
        Self::new(1.0, 0.0, alpha)
    }

    pub fn time_dilation(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, 1.0)
    }

    /// Resolve a named map: `identity`, `x-parity`/`spatial-parity`,
    /// `t-parity`/`time-parity`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Self::IDENTITY),
            "x-parity" | "spatial-parity" => Ok(Self::X_PARITY),
            "t-parity" | "time-parity" => Ok(Self::T_PARITY),
            other => Err(Error::Config(format!("unknown named map {other:?}"))),
        }
    }

    pub fn tilde_coeffs(&self) -> Result<TildeCoeffs> {
        tilde_coeffs(self)
    }

    pub fn map_point(&self, t: f64, x: f64) -> (f64, f64) {
        map_point(self, t, x)
    }

    pub fn classify(&self) -> MapKind {
        classify(self)
    }

    /// `|a11| ≠ 1` rescales the readout norm by `1/|a11|`.
    pub fn is_norm_preserving(&self) -> bool {
        self.a11.abs() == 1.0
    }

    pub fn readout_norm_factor(&self) -> f64 {
        1.0 / self.a11.abs()
    }
}

pub fn validate_map(map: &LinearCoordMap) -> Result<()> {
    let LinearCoordMap { a00, a10, a11 } = *map;
    if !(a00.is_finite() && a10.is_finite() && a11.is_finite()) {
        return Err(Error::SingularMap("non-finite coefficient".into()));
    }
    if a00 == 0.0 {
        return Err(Error::SingularMap("a00 = 0".into()));
    }
    if a11 == 0.0 {
        return Err(Error::SingularMap("a11 = 0".into()));
    }
    Ok(())
}

/// `t1,2 = (a11 ± a00 ∓ a10) / (2·a11)`.
pub fn tilde_coeffs(map: &LinearCoordMap) -> Result<TildeCoeffs> {
    validate_map(map)?;
    let LinearCoordMap { a00, a10, a11 } = *map;
    Ok(TildeCoeffs {
        t1: (a11 + a00 - a10) / (2.0 * a11),
        t2: (a11 - a00 + a10) / (2.0 * a11),
    })
}

pub fn map_point(map: &LinearCoordMap, t: f64, x: f64) -> (f64, f64) {
    (map.a00 * t, map.a10 * t + map.a11 * x)
}

/// First match wins, in the order of [`MapKind`]'s variants.
pub fn classify(map: &LinearCoordMap) -> MapKind {
    let LinearCoordMap { a00, a10, a11 } = *map;
    if a00 == 1.0 && a10 == 0.0 && a11 == 1.0 {
        MapKind::Identity
    } else if a00 == 1.0 && a10 == 0.0 && a11 == -1.0 {
        MapKind::SpatialParity
    } else if a00 == -1.0 && a10 == 0.0 && a11 == 1.0 {
        MapKind::TimeParity
    } else if a00 == 1.0 && a11 == 1.0 && a10 != 0.0 {
        MapKind::GalileanBoost
    } else if a00 == 1.0 && a10 == 0.0 {
        MapKind::SpatialDilation
    } else if a11 == 1.0 && a10 == 0.0 {
        MapKind::TimeDilation
    } else {
        MapKind::General
    }
}

/// One term `c·x^p·t^q` of a polynomial spatial map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomialTerm {
    pub coeff: f64,
    pub x_power: u32,
    pub t_power: u32,
}

/// `t' = a00·t^k`, `x' = f(x, t)` with `f` a polynomial in `x` and `t`.
///
/// Only the initial-condition validity check is provided, there is no
/// evolution equation for these maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearCoordMap {
    pub a00: f64,
    pub k: u32,
    pub x_terms: Vec<MonomialTerm>,
}

impl NonlinearCoordMap {
    pub fn t_prime(&self, t: f64) -> f64 {
        self.a00 * t.powi(self.k as i32)
    }

    pub fn x_prime(&self, x: f64, t: f64) -> f64 {
        self.x_terms
            .iter()
            .map(|m| m.coeff * x.powi(m.x_power as i32) * t.powi(m.t_power as i32))
            .sum()
    }
}

/// Anything whose `t'(x, 0)` can be inspected.
pub trait InitialSlice {
    /// `t'` evaluated at `(t = 0, x)`.
    fn t_prime_at_start(&self, x: f64) -> f64;
}

impl InitialSlice for LinearCoordMap {
    fn t_prime_at_start(&self, _x: f64) -> f64 {
        self.a00 * 0.0
    }
}

impl InitialSlice for NonlinearCoordMap {
    fn t_prime_at_start(&self, _x: f64) -> f64 {
        self.t_prime(0.0)
    }
}

/// True when `t'(x, 0) = 0`, so `Ψ(x, 0)` follows from `ψ(x, 0)` alone.
///
/// Neither map type lets `t'` depend on `x`, so a single sample decides.
pub fn initial_condition_determined(map: &impl InitialSlice) -> bool {
    map.t_prime_at_start(0.0) == 0.0
}
