//! Uniform quadrature grids and sampled single-mode wavefunctions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::ChirpTransform;

/// Uniform grid `x_k = x_min + k·Δ`, `k = 0..n_points`, with `Δ = (x_max − x_min)/n_points`.
///
/// The upper bound is excluded, so a symmetric range puts the origin on the
/// grid at index `n_points/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridParams", into = "GridParams")]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    spacing: f64,
}

/// Serialized form of a [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            x_min: -10.0,
            x_max: 10.0,
            n_points: 1024,
        }
    }
}

impl TryFrom<GridParams> for GridSpec {
    type Error = Error;

    fn try_from(p: GridParams) -> Result<Self> {
        make_grid(p.x_min, p.x_max, p.n_points)
    }
}

impl From<GridSpec> for GridParams {
    fn from(g: GridSpec) -> Self {
        Self {
            x_min: g.x_min,
            x_max: g.x_max,
            n_points: g.n_points,
        }
    }
}

/// Validates and builds a grid.
pub fn make_grid(x_min: f64, x_max: f64, n_points: usize) -> Result<GridSpec> {
    if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
        return Err(Error::InvalidGrid(format!(
            "degenerate range [{x_min}, {x_max})"
        )));
    }
    if n_points < 16 || !n_points.is_power_of_two() {
        return Err(Error::InvalidGrid(format!(
            "n_points = {n_points} must be a power of two >= 16"
        )));
    }
    let spacing = (x_max - x_min) / n_points as f64;
    if spacing <= 0.0 {
        return Err(Error::InvalidGrid("non-positive spacing".into()));
    }
    Ok(GridSpec {
        x_min,
        x_max,
        n_points,
        spacing,
    })
}

impl Default for GridSpec {
    fn default() -> Self {
        make_grid(-10.0, 10.0, 1024).expect("default grid is valid")
    }
}

impl GridSpec {
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn coordinate(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.spacing
    }

    pub fn coordinates(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.coordinate(k))
    }

    /// Index of the grid point nearest to `x`, if `x` lies within half a
    /// spacing of the sampled range.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let t = ((x - self.x_min) / self.spacing).round();
        if t < 0.0 || t >= self.n_points as f64 {
            None
        } else {
            Some(t as usize)
        }
    }

    /// Fractional index of `x` relative to the first grid point.
    #[inline]
    pub fn fractional_index(&self, x: f64) -> f64 {
        (x - self.x_min) / self.spacing
    }

    /// Integral over `[lo, hi]` of the piecewise-linear interpolant through
    /// `values`; zero outside the sampled range.
    pub fn integrate_linear(&self, values: &[f64], lo: f64, hi: f64) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let last = (self.n_points - 1) as f64;
        let a = self.fractional_index(lo).clamp(0.0, last);
        let b = self.fractional_index(hi).clamp(0.0, last);
        if b <= a {
            return 0.0;
        }
        let lerp = |t: f64, k: usize| {
            let f = t - k as f64;
            values[k] * (1.0 - f) + values[(k + 1).min(self.n_points - 1)] * f
        };
        let mut total = 0.0;
        let first = a.floor() as usize;
        let end = (b.ceil() as usize).max(first + 1);
        for k in first..end {
            let s = a.max(k as f64);
            let t = b.min(k as f64 + 1.0);
            if t > s {
                total += (t - s) * 0.5 * (lerp(s, k) + lerp(t, k));
            }
        }
        total * self.spacing
    }

    /// Same range, every `stride`-th point.
    pub fn decimate(&self, stride: usize) -> Result<GridSpec> {
        if stride == 0 || !self.n_points.is_multiple_of(stride) {
            return Err(Error::InvalidGrid(format!(
                "stride {stride} does not divide {}",
                self.n_points
            )));
        }
        make_grid(self.x_min, self.x_max, self.n_points / stride)
    }
}

/// Which quadrature a [`Wavefunction`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Position,
    Momentum,
}

/// Complex amplitudes on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
    representation: Representation,
}

/// Fraction of the peak modulus allowed at either end of the grid.
pub const SUPPORT_TOLERANCE: f64 = 1e-6;

impl Wavefunction {
    pub fn new(
        grid: GridSpec,
        amplitudes: Vec<Complex64>,
        representation: Representation,
    ) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            amplitudes,
            representation,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `Σ|ψ_k|²·Δ`.
    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.spacing
    }

    pub fn max_modulus(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Scales to unit norm and returns the factor applied.
    pub fn normalize(&mut self) -> Result<f64> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::NothingToReconstruct);
        }
        let scale = n2.sqrt().recip();
        for a in &mut self.amplitudes {
            *a *= scale;
        }
        Ok(scale)
    }

    /// Fails when either end of the grid carries more than
    /// [`SUPPORT_TOLERANCE`] of the peak modulus.
    pub fn check_support(&self, context: &'static str) -> Result<()> {
        let peak = self.max_modulus();
        let first = self.amplitudes.first().map_or(0.0, |a| a.norm());
        let last = self.amplitudes.last().map_or(0.0, |a| a.norm());
        let edge = first.max(last);
        let limit = SUPPORT_TOLERANCE * peak;
        if edge > limit {
            return Err(Error::SupportOverflow {
                edge,
                limit,
                context,
            });
        }
        Ok(())
    }

    /// Position → momentum, `ψ(P) = (2π)^{-1/2} ∫dx e^{−iPx} ψ(x)`, sampled on
    /// the same grid.
    pub fn to_momentum(&self) -> Result<Wavefunction> {
        if self.representation != Representation::Position {
            return Err(Error::Mismatch);
        }
        let plan = ChirpTransform::quadrature(&self.grid, -1.0);
        Ok(Wavefunction {
            grid: self.grid,
            amplitudes: plan.apply(&self.amplitudes),
            representation: Representation::Momentum,
        })
    }

    /// Momentum → position, inverse of [`Wavefunction::to_momentum`].
    pub fn to_position(&self) -> Result<Wavefunction> {
        if self.representation != Representation::Momentum {
            return Err(Error::Mismatch);
        }
        let plan = ChirpTransform::quadrature(&self.grid, 1.0);
        Ok(Wavefunction {
            grid: self.grid,
            amplitudes: plan.apply(&self.amplitudes),
            representation: Representation::Position,
        })
    }

    /// Pointwise modulus.
    pub fn modulus(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm()).collect()
    }

    /// `|ψ|²` at each grid point.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `⟨a|b⟩ = Σ conj(a_k)·b_k·Δ`.
pub fn inner_product(a: &Wavefunction, b: &Wavefunction) -> Result<Complex64> {
    if a.grid != b.grid || a.representation != b.representation {
        return Err(Error::Mismatch);
    }
    let sum: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(sum * a.grid.spacing)
}
