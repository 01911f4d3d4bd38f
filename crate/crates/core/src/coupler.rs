//! Beam-splitter coupling of system and meter, exact postselection
//! statistics and weak values.
//!
//! The unitary `exp[−iθ(X̂_S p̂_M − P̂_S x̂_M)]` generates a rigid rotation of
//! the two-mode position plane, `Ψ'(X, x) = Ψ(X cosθ + x sinθ, −X sinθ + x cosθ)`,
//! so it is applied exactly up to interpolation error.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bins::{BinLayout, BinnedStatistics};
use crate::error::{Error, Result};
use crate::fourier::ChirpTransform;
use crate::grid::{GridSpec, Representation, Wavefunction, SUPPORT_TOLERANCE};

/// Beam-splitter angle, `0 < θ ≤ π/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    theta: f64,
}

impl CouplingParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= FRAC_PI_4 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} outside (0, pi/4]"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Two-mode amplitude on a product grid, row-major with the system
/// coordinate as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGrid {
    system_axis: GridSpec,
    meter_axis: GridSpec,
    amplitudes: Vec<Complex64>,
}

/// Joint amplitude `Ψ(X, x)` in position representation for both modes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPosition(JointGrid);

/// Joint amplitude `Ψ(P, x)`: system momentum, meter position. This is the
/// representation read out by the two homodyne detectors.
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitude(JointGrid);

impl JointGrid {
    fn product(a: &Wavefunction, b: &Wavefunction) -> Self {
        let amplitudes = a
            .amplitudes()
            .iter()
            .flat_map(|x| b.amplitudes().iter().map(move |y| x * y))
            .collect();
        Self {
            system_axis: *a.grid(),
            meter_axis: *b.grid(),
            amplitudes,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.amplitudes[i * self.meter_axis.len() + j]
    }

    fn total_probability(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
            * self.system_axis.spacing()
            * self.meter_axis.spacing()
    }

    fn edge_ratio(&self) -> (f64, f64) {
        let (ns, nm) = (self.system_axis.len(), self.meter_axis.len());
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let mut edge: f64 = 0.0;
        for j in 0..nm {
            edge = edge
                .max(self.at(0, j).norm())
                .max(self.at(ns - 1, j).norm());
        }
        for i in 0..ns {
            edge = edge
                .max(self.at(i, 0).norm())
                .max(self.at(i, nm - 1).norm());
        }
        (edge, peak)
    }

    fn check_support(&self, context: &'static str) -> Result<()> {
        let (edge, peak) = self.edge_ratio();
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
}

macro_rules! joint_accessors {
    ($t:ty) => {
        impl $t {
            pub fn system_axis(&self) -> &GridSpec {
                &self.0.system_axis
            }

            pub fn meter_axis(&self) -> &GridSpec {
                &self.0.meter_axis
            }

            pub fn amplitudes(&self) -> &[Complex64] {
                &self.0.amplitudes
            }

            #[inline]
            pub fn at(&self, i: usize, j: usize) -> Complex64 {
                self.0.at(i, j)
            }

            /// `Σ|Ψ|²·ΔS·ΔM`.
            pub fn total_probability(&self) -> f64 {
                self.0.total_probability()
            }

            pub fn check_support(&self, context: &'static str) -> Result<()> {
                self.0.check_support(context)
            }
        }
    };
}

joint_accessors!(JointPosition);
joint_accessors!(JointAmplitude);

/// Cubic Lagrange weights for nodes `−1, 0, 1, 2` at offset `t ∈ [0, 1)`.
#[inline]
fn lagrange_weights(t: f64) -> [f64; 4] {
    let tm1 = t - 1.0;
    let tm2 = t - 2.0;
    let tp1 = t + 1.0;
    [
        -t * tm1 * tm2 / 6.0,
        tp1 * tm1 * tm2 / 2.0,
        -tp1 * t * tm2 / 2.0,
        tp1 * t * tm1 / 6.0,
    ]
}

/// Integer base and weights for interpolating at fractional index `u`;
/// `None` when the stencil lies entirely outside `0..n`.
#[inline]
fn stencil(u: f64, n: usize) -> Option<(i64, [f64; 4])> {
    if !(u > -2.0 && u < n as f64 + 1.0) {
        return None;
    }
    let base = u.floor();
    Some((base as i64, lagrange_weights(u - base)))
}

impl JointPosition {
    pub fn product(system: &Wavefunction, meter: &Wavefunction) -> Result<Self> {
        if system.representation() != Representation::Position
            || meter.representation() != Representation::Position
        {
            return Err(Error::Mismatch);
        }
        Ok(Self(JointGrid::product(system, meter)))
    }

    /// `Ψ'(X, x) = Ψ(X cos a + x sin a, −X sin a + x cos a)` by bicubic
    /// Lagrange interpolation; samples outside the grid count as zero.
    pub fn rotate(&self, angle: f64) -> JointPosition {
        let g = &self.0;
        let (sa, ca) = angle.sin_cos();
        let (ns, nm) = (g.system_axis.len(), g.meter_axis.len());
        let src = &g.amplitudes;
        let sample = |i: i64, j: i64| -> Complex64 {
            if i < 0 || j < 0 || i >= ns as i64 || j >= nm as i64 {
                Complex64::new(0.0, 0.0)
            } else {
                src[i as usize * nm + j as usize]
            }
        };
        let amplitudes: Vec<Complex64> = (0..ns)
            .into_par_iter()
            .flat_map_iter(|i| {
                let big_x = g.system_axis.coordinate(i);
                (0..nm).map(move |j| {
                    let x = g.meter_axis.coordinate(j);
                    let u = g.system_axis.fractional_index(big_x * ca + x * sa);
                    let v = g.meter_axis.fractional_index(-big_x * sa + x * ca);
                    let (Some((bu, wu)), Some((bv, wv))) = (stencil(u, ns), stencil(v, nm)) else {
                        return Complex64::new(0.0, 0.0);
                    };
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (a, wa) in wu.iter().enumerate() {
                        let mut row = Complex64::new(0.0, 0.0);
                        for (b, wb) in wv.iter().enumerate() {
                            row += sample(bu - 1 + a as i64, bv - 1 + b as i64) * *wb;
                        }
                        acc += row * *wa;
                    }
                    acc
                })
            })
            .collect();
        JointPosition(JointGrid {
            system_axis: g.system_axis,
            meter_axis: g.meter_axis,
            amplitudes,
        })
    }
}

/// Applies the beam splitter to `system ⊗ meter` for an arbitrary angle.
pub fn beam_split_angle(
    system: &Wavefunction,
    meter: &Wavefunction,
    angle: f64,
) -> Result<JointPosition> {
    let rotated = JointPosition::product(system, meter)?.rotate(angle);
    rotated.check_support("joint state after beam splitter")?;
    Ok(rotated)
}

/// Joint state after the beam splitter, both modes in position representation.
pub fn beam_split(
    system: &Wavefunction,
    meter: &Wavefunction,
    params: &CouplingParams,
) -> Result<JointPosition> {
    beam_split_angle(system, meter, params.theta)
}

/// Fourier transform over the system coordinate only, with the convention of
/// [`Wavefunction::to_momentum`].
pub fn joint_momentum_position(joint: &JointPosition) -> JointAmplitude {
    let g = &joint.0;
    let (ns, nm) = (g.system_axis.len(), g.meter_axis.len());
    let plan = ChirpTransform::quadrature(&g.system_axis, -1.0);
    let columns: Vec<Vec<Complex64>> = (0..nm)
        .into_par_iter()
        .map(|j| {
            let col: Vec<Complex64> = (0..ns).map(|i| g.at(i, j)).collect();
            plan.apply(&col)
        })
        .collect();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); ns * nm];
    for (j, col) in columns.iter().enumerate() {
        for (i, a) in col.iter().enumerate() {
            amplitudes[i * nm + j] = *a;
        }
    }
    JointAmplitude(JointGrid {
        system_axis: g.system_axis,
        meter_axis: g.meter_axis,
        amplitudes,
    })
}

/// Exact HDS outcome density `p(P_i) = Σ_j |Ψ(P_i, x_j)|²·Δx`.
pub fn postselection_density(joint: &JointAmplitude) -> Vec<f64> {
    let g = &joint.0;
    let dx = g.meter_axis.spacing();
    g.amplitudes
        .chunks(g.meter_axis.len())
        .map(|row| row.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx)
        .collect()
}

/// `Σ_j x_j·|Ψ(P_i, x_j)|²·Δx` at each `P_i`.
pub fn meter_weighted_density(joint: &JointAmplitude) -> Vec<f64> {
    let g = &joint.0;
    let dx = g.meter_axis.spacing();
    g.amplitudes
        .chunks(g.meter_axis.len())
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, a)| g.meter_axis.coordinate(j) * a.norm_sqr())
                .sum::<f64>()
                * dx
        })
        .collect()
}

/// Smallest bin probability for which a postselected mean is reported.
pub const POSTSELECTION_THRESHOLD: f64 = 1e-12;

/// Precomputed marginals of a joint amplitude for repeated bin queries.
#[derive(Debug, Clone)]
pub struct ExactStatistics {
    pub axis: GridSpec,
    pub density: Vec<f64>,
    pub weighted: Vec<f64>,
}

impl ExactStatistics {
    pub fn new(joint: &JointAmplitude) -> Self {
        Self {
            axis: *joint.system_axis(),
            density: postselection_density(joint),
            weighted: meter_weighted_density(joint),
        }
    }

    pub fn bin_probability(&self, lo: f64, hi: f64) -> f64 {
        self.axis.integrate_linear(&self.density, lo, hi)
    }

    /// Exact `E[x_M | P ∈ [lo, hi)]`.
    pub fn meter_mean(&self, lo: f64, hi: f64) -> Result<f64> {
        let probability = self.bin_probability(lo, hi);
        if probability.is_nan() || probability <= POSTSELECTION_THRESHOLD {
            return Err(Error::EmptyBin {
                lo,
                hi,
                probability,
            });
        }
        Ok(self.axis.integrate_linear(&self.weighted, lo, hi) / probability)
    }

    /// Pointwise conditional mean, `None` where the density is below threshold.
    pub fn pointwise_mean(&self) -> Vec<Option<f64>> {
        self.density
            .iter()
            .zip(&self.weighted)
            .map(|(p, w)| (*p > POSTSELECTION_THRESHOLD).then(|| w / p))
            .collect()
    }

    /// Bin-integrated density and means on a layout.
    pub fn binned(&self, layout: &BinLayout) -> BinnedStatistics {
        let width = layout.width();
        let (p_hat, e_hat) = (0..layout.len())
            .map(|k| {
                let (lo, hi) = (layout.lower_edge(k), layout.upper_edge(k));
                let prob = self.bin_probability(lo, hi);
                (prob / width, self.meter_mean(lo, hi).ok())
            })
            .unzip();
        BinnedStatistics {
            layout: *layout,
            p_hat,
            e_hat,
        }
    }
}

/// Exact postselected meter mean over a momentum interval `[lo, hi)`.
///
/// Interpolates the marginals linearly between grid points, so intervals
/// narrower than the grid spacing are allowed.
pub fn postselected_meter_mean(joint: &JointAmplitude, lo: f64, hi: f64) -> Result<f64> {
    ExactStatistics::new(joint).meter_mean(lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// Position quadrature `X̂_S`.
    X,
    /// Momentum quadrature `P̂_S`.
    P,
}

/// Weak value `⟨P|Â|ψ⟩/⟨P|ψ⟩` at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueSample {
    pub p: f64,
    pub value: Complex64,
    pub valid: bool,
}

/// Relative modulus below which weak values are flagged invalid.
pub const WEAK_VALUE_FLOOR: f64 = 1e-6;

/// Weak value at grid index `i` for a momentum-representation state.
fn weak_value_at(psi: &Wavefunction, i: usize, which: Observable, floor: f64) -> WeakValueSample {
    let grid = psi.grid();
    let amps = psi.amplitudes();
    let n = amps.len();
    let p = grid.coordinate(i);
    let denom = amps[i];
    let invalid = WeakValueSample {
        p,
        value: Complex64::new(f64::NAN, f64::NAN),
        valid: false,
    };
    if denom.norm() < floor {
        return invalid;
    }
    match which {
        Observable::X => {
            if i < 2 || i + 2 >= n {
                return invalid;
            }
            // ⟨P|X̂|ψ⟩ = i dψ/dP, fourth-order centred difference
            let d = (-amps[i + 2] + amps[i + 1] * 8.0 - amps[i - 1] * 8.0 + amps[i - 2])
                / (12.0 * grid.spacing());
            WeakValueSample {
                p,
                value: Complex64::i() * d / denom,
                valid: true,
            }
        }
        Observable::P => WeakValueSample {
            p,
            value: (denom * p) / denom,
            valid: true,
        },
    }
}

/// Weak value of `which` postselected on momentum `p` (nearest grid point).
pub fn weak_value(
    psi_momentum: &Wavefunction,
    p: f64,
    which: Observable,
) -> Result<WeakValueSample> {
    if psi_momentum.representation() != Representation::Momentum {
        return Err(Error::Mismatch);
    }
    let floor = WEAK_VALUE_FLOOR * psi_momentum.max_modulus();
    match psi_momentum.grid().nearest_index(p) {
        Some(i) => Ok(weak_value_at(psi_momentum, i, which, floor)),
        None => Ok(WeakValueSample {
            p,
            value: Complex64::new(f64::NAN, f64::NAN),
            valid: false,
        }),
    }
}

/// Weak values at every grid point.
pub fn weak_values(psi_momentum: &Wavefunction, which: Observable) -> Result<Vec<WeakValueSample>> {
    if psi_momentum.representation() != Representation::Momentum {
        return Err(Error::Mismatch);
    }
    let floor = WEAK_VALUE_FLOOR * psi_momentum.max_modulus();
    Ok((0..psi_momentum.grid().len())
        .map(|i| weak_value_at(psi_momentum, i, which, floor))
        .collect())
}

/// Linear-order postselected meter mean `θ·{Re X_w − Im P_w}`; `None` where
/// either weak value is invalid.
pub fn linear_order_prediction(
    psi_momentum: &Wavefunction,
    params: &CouplingParams,
    p: f64,
) -> Result<Option<f64>> {
    let xw = weak_value(psi_momentum, p, Observable::X)?;
    let pw = weak_value(psi_momentum, p, Observable::P)?;
    Ok((xw.valid && pw.valid).then_some(params.theta * (xw.value.re - pw.value.im)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{realize_state, StateDescriptor};

    #[test]
    fn lagrange_reproduces_cubics() {
        let f = |x: f64| 0.3 * x * x * x - x * x + 2.0 * x - 0.5;
        for t in [0.0, 0.25, 0.5, 0.9] {
            let w = lagrange_weights(t);
            let v: f64 = (0..4).map(|k| w[k] * f(k as f64 - 1.0)).sum();
            assert!((v - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_bounds() {
        assert!(CouplingParams::new(0.05).is_ok());
        assert!(CouplingParams::new(FRAC_PI_4).is_ok());
        assert!(CouplingParams::new(0.0).is_err());
        assert!(CouplingParams::new(0.8).is_err());
        assert!(CouplingParams::new(f64::NAN).is_err());
    }

    #[test]
    fn zero_angle_is_identity() {
        let g = GridSpec::default();
        let s = realize_state(&StateDescriptor::asymmetric_pair(), &g)
            .unwrap()
            .psi;
        let m = realize_state(&StateDescriptor::vacuum(), &g).unwrap().psi;
        let prod = JointPosition::product(&s, &m).unwrap();
        let rot = beam_split_angle(&s, &m, 0.0).unwrap();
        assert_eq!(prod, rot);
    }

    #[test]
    fn momentum_weak_value_is_real() {
        let g = GridSpec::default();
        let psi = realize_state(&StateDescriptor::asymmetric_pair(), &g)
            .unwrap()
            .psi
            .to_momentum()
            .unwrap();
        for w in weak_values(&psi, Observable::P).unwrap() {
            if w.valid {
                assert!(w.value.im.abs() <= 1e-10);
                assert!((w.value.re - w.p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weak_value_requires_momentum() {
        let g = GridSpec::default();
        let psi = realize_state(&StateDescriptor::vacuum(), &g).unwrap().psi;
        assert!(weak_value(&psi, 0.0, Observable::X).is_err());
    }

    #[test]
    fn empty_bin_is_an_error() {
        let g = GridSpec::default();
        let s = realize_state(&StateDescriptor::vacuum(), &g).unwrap().psi;
        let joint = joint_momentum_position(&beam_split_angle(&s, &s, 0.05).unwrap());
        assert!(matches!(
            postselected_meter_mean(&joint, 9.0, 9.5),
            Err(Error::EmptyBin { .. })
        ));
    }
}
