#![allow(dead_code)]

use num_complex::Complex64;
use wvrecon::coupler::{beam_split_angle, joint_momentum_position, JointAmplitude};
use wvrecon::grid::{GridSpec, Representation, Wavefunction};
use wvrecon::state::{realize_state, StateDescriptor};

pub fn grid() -> GridSpec {
    GridSpec::default()
}

pub fn position(desc: &StateDescriptor) -> Wavefunction {
    realize_state(desc, &grid()).unwrap().psi
}

pub fn momentum(desc: &StateDescriptor) -> Wavefunction {
    position(desc).to_momentum().unwrap()
}

pub fn vacuum() -> Wavefunction {
    position(&StateDescriptor::vacuum())
}

pub fn joint(desc: &StateDescriptor, theta: f64) -> JointAmplitude {
    joint_momentum_position(&beam_split_angle(&position(desc), &vacuum(), theta).unwrap())
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Closed-form momentum amplitude of a coherent state,
/// `π^{-1/4} exp[−(P−p)²/2 − iPq + iqp/2]` with `q = √2 Re α`, `p = √2 Im α`.
pub fn coherent_momentum(alpha: Complex64, p: f64) -> Complex64 {
    let q0 = std::f64::consts::SQRT_2 * alpha.re;
    let p0 = std::f64::consts::SQRT_2 * alpha.im;
    let arg = c(-(p - p0).powi(2) / 2.0, -p * q0 + q0 * p0 / 2.0);
    arg.exp() * std::f64::consts::PI.powf(-0.25)
}

/// Analytic momentum amplitude of a descriptor, normalized with its grid constant.
pub fn descriptor_momentum(desc: &StateDescriptor, p: f64) -> Complex64 {
    let n = realize_state(desc, &grid()).unwrap().normalization;
    desc.terms()
        .iter()
        .map(|t| t.coeff * coherent_momentum(t.alpha, p))
        .sum::<Complex64>()
        * n
}

/// `dψ/dx` by multiplying with `iP` in the momentum representation.
pub fn spectral_derivative(psi: &Wavefunction) -> Vec<Complex64> {
    let mom = psi.to_momentum().unwrap();
    let g = *mom.grid();
    let scaled = mom
        .amplitudes()
        .iter()
        .zip(g.coordinates())
        .map(|(a, p)| a * c(0.0, p))
        .collect();
    Wavefunction::new(g, scaled, Representation::Momentum)
        .unwrap()
        .to_position()
        .unwrap()
        .into_amplitudes()
}

pub fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn states() -> Vec<(&'static str, StateDescriptor)> {
    vec![
        ("vacuum", StateDescriptor::vacuum()),
        ("coherent", StateDescriptor::coherent(c(1.0, 0.5))),
        ("asymmetric_pair", StateDescriptor::asymmetric_pair()),
        ("odd_cat", StateDescriptor::odd_cat()),
        (
            "three_term",
            StateDescriptor::superposition(&[
                (c(1.0, 0.0), c(-1.5, 0.3)),
                (c(0.4, -0.7), c(0.8, 1.2)),
                (c(0.0, 1.0), c(0.2, -1.9)),
            ])
            .unwrap(),
        ),
    ]
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}
