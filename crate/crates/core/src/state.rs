//! Analytic states: finite superpositions of coherent states.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Representation, Wavefunction};

/// One term `coeff·|alpha⟩` of a superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentTerm {
    pub coeff: Complex64,
    pub alpha: Complex64,
}

/// `Σ_k c_k |α_k⟩`, optionally normalized when realized on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDescriptor")]
pub struct StateDescriptor {
    terms: Vec<CoherentTerm>,
    normalized: bool,
}

#[derive(Deserialize)]
struct RawDescriptor {
    terms: Vec<CoherentTerm>,
    #[serde(default = "default_true")]
    normalized: bool,
}

fn default_true() -> bool {
    true
}

impl TryFrom<RawDescriptor> for StateDescriptor {
    type Error = Error;

    fn try_from(raw: RawDescriptor) -> Result<Self> {
        Self::new(raw.terms, raw.normalized)
    }
}

impl StateDescriptor {
    pub fn new(terms: Vec<CoherentTerm>, normalized: bool) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidDescriptor("no terms".into()));
        }
        if terms.iter().all(|t| t.coeff.norm() == 0.0) {
            return Err(Error::InvalidDescriptor("all coefficients are zero".into()));
        }
        if terms.iter().any(|t| {
            !(t.coeff.re.is_finite()
                && t.coeff.im.is_finite()
                && t.alpha.re.is_finite()
                && t.alpha.im.is_finite())
        }) {
            return Err(Error::InvalidDescriptor("non-finite entry".into()));
        }
        Ok(Self { terms, normalized })
    }

    /// Normalized superposition built from `(coeff, alpha)` pairs.
    pub fn superposition(pairs: &[(Complex64, Complex64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(coeff, alpha)| CoherentTerm { coeff, alpha })
                .collect(),
            true,
        )
    }

    pub fn coherent(alpha: Complex64) -> Self {
        Self {
            terms: vec![CoherentTerm {
                coeff: Complex64::new(1.0, 0.0),
                alpha,
            }],
            normalized: true,
        }
    }

    pub fn vacuum() -> Self {
        Self::coherent(Complex64::new(0.0, 0.0))
    }

    /// `𝒩(|1⟩ + |2e^{i4π/5}⟩)`: a state with nontrivial modulus and phase in P.
    pub fn asymmetric_pair() -> Self {
        Self::superposition(&[
            (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
            (
                Complex64::new(1.0, 0.0),
                Complex64::from_polar(2.0, 0.8 * PI),
            ),
        ])
        .expect("static descriptor")
    }

    /// `𝒩(|2i⟩ − |−2i⟩)`: momentum distribution vanishes at `P = 0`.
    pub fn odd_cat() -> Self {
        Self::superposition(&[
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)),
            (Complex64::new(-1.0, 0.0), Complex64::new(0.0, -2.0)),
        ])
        .expect("static descriptor")
    }

    pub fn terms(&self) -> &[CoherentTerm] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn max_amplitude(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.alpha.norm())
            .fold(0.0, f64::max)
    }

    /// Unnormalized amplitude `Σ c_k ⟨x|α_k⟩` at an arbitrary position.
    pub fn evaluate_position(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * coherent_position(t.alpha, x))
            .sum()
    }
}

/// `⟨x|α⟩ = π^{-1/4} exp[−(x − √2 Re α)²/2 + i√2 Im α·x − i Re α·Im α]`.
///
/// The constant phase fixes `⟨α|β⟩ = exp(−|α|²/2 − |β|²/2 + α*β)`.
pub fn coherent_position(alpha: Complex64, x: f64) -> Complex64 {
    let q = SQRT_2 * alpha.re;
    let p = SQRT_2 * alpha.im;
    let d = x - q;
    Complex64::from_polar(
        PI.powf(-0.25) * (-0.5 * d * d).exp(),
        p * x - alpha.re * alpha.im,
    )
}

/// A descriptor sampled on a grid.
#[derive(Debug, Clone)]
pub struct RealizedState {
    pub psi: Wavefunction,
    /// Factor 𝒩 applied to the raw superposition (1 when not normalized).
    pub normalization: f64,
}

/// Samples the descriptor in the position representation.
pub fn realize_state(descriptor: &StateDescriptor, grid: &GridSpec) -> Result<RealizedState> {
    let half_width = (-grid.x_min()).min(grid.x_max());
    let reach = SQRT_2 * descriptor.max_amplitude() + 3.0;
    if reach > half_width {
        return Err(Error::SupportOverflow {
            edge: reach,
            limit: half_width,
            context: "coherent amplitude too large for the grid",
        });
    }
    let amplitudes = grid
        .coordinates()
        .map(|x| descriptor.evaluate_position(x))
        .collect();
    let mut psi = Wavefunction::new(*grid, amplitudes, Representation::Position)?;
    let normalization = if descriptor.normalized {
        psi.normalize()
            .map_err(|_| Error::InvalidDescriptor("superposition vanishes on the grid".into()))?
    } else {
        1.0
    };
    psi.check_support("realized state")?;
    Ok(RealizedState { psi, normalization })
}

/// Phase-space rotation `α_k ↦ α_k e^{−i·angle}`; coefficients unchanged.
pub fn rotate_descriptor(descriptor: &StateDescriptor, angle: f64) -> StateDescriptor {
    let phase = Complex64::from_polar(1.0, -angle);
    StateDescriptor {
        terms: descriptor
            .terms
            .iter()
            .map(|t| CoherentTerm {
                coeff: t.coeff,
                alpha: t.alpha * phase,
            })
            .collect(),
        normalized: descriptor.normalized,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::inner_product;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_peak() {
        let g = GridSpec::default();
        let r = realize_state(&StateDescriptor::vacuum(), &g).unwrap();
        let centre = r.psi.amplitudes()[g.len() / 2];
        assert!((centre.re - PI.powf(-0.25)).abs() < 1e-12);
        assert!((centre.re - 0.75113).abs() < 1e-5);
        assert!(centre.im.abs() < 1e-15);
        assert!((r.psi.norm_squared() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coherent_overlap_matches_closed_form() {
        let g = GridSpec::default();
        let alpha = c(1.0, 0.0);
        let beta = Complex64::from_polar(2.0, 0.8 * PI);
        let a = realize_state(&StateDescriptor::coherent(alpha), &g)
            .unwrap()
            .psi;
        let b = realize_state(&StateDescriptor::coherent(beta), &g)
            .unwrap()
            .psi;
        let overlap = inner_product(&a, &b).unwrap();
        let oracle = (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp();
        assert!((overlap - oracle).norm() < 1e-10);
        assert!((overlap.norm() - 0.0163).abs() < 5e-5);
        // |⟨α|β⟩| = exp(−|α−β|²/2)
        assert!((overlap.norm() - (-0.5 * (alpha - beta).norm_sqr()).exp()).abs() < 1e-10);
    }

    #[test]
    fn cat_parity_components_orthogonal() {
        let g = GridSpec::default();
        let alpha = c(1.5, 0.5);
        let even =
            StateDescriptor::superposition(&[(c(1.0, 0.0), alpha), (c(1.0, 0.0), -alpha)]).unwrap();
        let odd = StateDescriptor::superposition(&[(c(1.0, 0.0), alpha), (c(-1.0, 0.0), -alpha)])
            .unwrap();
        let e = realize_state(&even, &g).unwrap().psi;
        let o = realize_state(&odd, &g).unwrap().psi;
        assert!(inner_product(&e, &o).unwrap().norm() < 1e-8);
    }

    #[test]
    fn normalization_constant_of_pair() {
        let g = GridSpec::default();
        let r = realize_state(&StateDescriptor::asymmetric_pair(), &g).unwrap();
        let beta = Complex64::from_polar(2.0, 0.8 * PI);
        let overlap = (-0.5 - 0.5 * beta.norm_sqr() + beta).exp();
        let expected = (2.0 + 2.0 * overlap.re).sqrt().recip();
        assert!((r.normalization - expected).abs() < 1e-10);
    }

    #[test]
    fn rejects_oversized_amplitude() {
        let g = GridSpec::default();
        let big = StateDescriptor::coherent(c(6.0, 0.0));
        assert!(matches!(
            realize_state(&big, &g),
            Err(Error::SupportOverflow { .. })
        ));
    }

    #[test]
    fn descriptor_json_schema() {
        let d: StateDescriptor = serde_json::from_str(
            r#"{"terms":[{"coeff":[1,0],"alpha":[0,2]},{"coeff":[-1,0],"alpha":[0,-2]}],"normalized":true}"#,
        )
        .unwrap();
        assert_eq!(d, StateDescriptor::odd_cat());
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains(r#""coeff":[1.0,0.0]"#));
        assert!(serde_json::from_str::<StateDescriptor>(r#"{"terms":[]}"#).is_err());
        assert!(serde_json::from_str::<StateDescriptor>(
            r#"{"terms":[{"coeff":[0,0],"alpha":[1,0]}]}"#
        )
        .is_err());
    }

    #[test]
    fn rotation_cases() {
        let d = StateDescriptor::asymmetric_pair();
        assert_eq!(rotate_descriptor(&d, 0.0), d);
        let v = rotate_descriptor(&StateDescriptor::vacuum(), 1.234);
        assert_eq!(v.terms()[0].alpha.norm(), 0.0);
        let r = rotate_descriptor(&StateDescriptor::odd_cat(), PI / 2.0);
        assert!((r.terms()[0].alpha - c(2.0, 0.0)).norm() < 1e-15);
        assert!((r.terms()[1].alpha - c(-2.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.terms()[1].coeff, c(-1.0, 0.0));
    }
}
