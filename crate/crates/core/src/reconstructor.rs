//! Modulus and phase reconstruction from binned postselection data.
//!
//! `|ψ(P)| = √p(P)` and `φ(P) = −(1/θ)∫_0^P E[x_M | P'] dP'`, integrated
//! outward from an anchor in each contiguous run of occupied bins.

use num_complex::Complex64;

use crate::bins::{BinLayout, BinnedStatistics, Segment};
use crate::error::{Error, Result};
use crate::grid::{inner_product, GridSpec, Representation, Wavefunction};

/// Reconstructed phase at the bin centers.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub p_values: Vec<f64>,
    /// `None` outside every segment.
    pub phase: Vec<Option<f64>>,
    pub segment_id: Vec<Option<usize>>,
    /// Momentum at which each segment's phase is pinned to zero.
    pub anchor_per_segment: Vec<f64>,
    /// Segments of a single bin; their phase is set to zero.
    pub single_bin_segments: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub modulus: Vec<f64>,
    pub phase_profile: PhaseProfile,
    pub psi_rec: Wavefunction,
    pub delta: f64,
    pub segments: usize,
    pub segment_list: Vec<Segment>,
    /// Set whenever the occupied bins split into more than one segment: the
    /// relative phase between segments is not fixed by the data.
    pub failed: bool,
}

/// Elementwise `√p̂`, zero where `p̂ ≤ 0`.
pub fn reconstruct_modulus(p_hat: &[f64]) -> Vec<f64> {
    p_hat
        .iter()
        .map(|&p| if p > 0.0 { p.sqrt() } else { 0.0 })
        .collect()
}

pub fn reconstruct_phase(
    e_hat: &[Option<f64>],
    theta: f64,
    segments: &[Segment],
    layout: &BinLayout,
) -> Result<PhaseProfile> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} must be positive"
        )));
    }
    if e_hat.len() != layout.len() {
        return Err(Error::InvalidParameter(format!(
            "{} means for {} bins",
            e_hat.len(),
            layout.len()
        )));
    }
    let n = layout.len();
    let w = layout.width();
    let mean = |k: usize| -> Result<f64> {
        e_hat[k].ok_or_else(|| {
            Error::InvalidParameter(format!("bin {k} lies in a segment but has no mean"))
        })
    };

    let mut phase = vec![None; n];
    let mut segment_id = vec![None; n];
    let mut anchors = Vec::with_capacity(segments.len());
    let mut single = Vec::new();
    let k0 = layout.anchor_bin();

    for (id, seg) in segments.iter().enumerate() {
        segment_id[seg.first..=seg.last].fill(Some(id));
        if seg.len() == 1 {
            phase[seg.first] = Some(0.0);
            anchors.push(layout.center(seg.first));
            single.push(id);
            continue;
        }

        let (first, last) = (seg.first as i64, seg.last as i64);
        let (left_start, right_start) = if first < k0 && last >= k0 {
            // The anchor edge is interior: start half a bin either side of it.
            let (kl, kr) = ((k0 - 1) as usize, k0 as usize);
            let edge_mean = 0.5 * (mean(kl)? + mean(kr)?);
            phase[kr] = Some(-(0.5 * (edge_mean + mean(kr)?)) * 0.5 * w / theta);
            phase[kl] = Some((0.5 * (edge_mean + mean(kl)?)) * 0.5 * w / theta);
            anchors.push(layout.anchor_edge());
            (kl, kr)
        } else {
            let inner = if first >= k0 { seg.first } else { seg.last };
            phase[inner] = Some(0.0);
            anchors.push(layout.center(inner));
            (inner, inner)
        };

        for k in right_start..seg.last {
            let step = 0.5 * (mean(k)? + mean(k + 1)?) * w / theta;
            phase[k + 1] = phase[k].map(|p| p - step);
        }
        for k in (seg.first + 1..=left_start).rev() {
            let step = 0.5 * (mean(k)? + mean(k - 1)?) * w / theta;
            phase[k - 1] = phase[k].map(|p| p + step);
        }
    }

    Ok(PhaseProfile {
        p_values: layout.centers(),
        phase,
        segment_id,
        anchor_per_segment: anchors,
        single_bin_segments: single,
    })
}

/// `ψ_rec(P) = |ψ(P)| e^{iφ(P)}` on `grid`, linearly interpolated from the bin
/// centers, renormalized. Zero outside the centers and between two bins
/// without a phase.
pub fn assemble_state(
    modulus: &[f64],
    profile: &PhaseProfile,
    grid: &GridSpec,
) -> Result<Wavefunction> {
    let centers = &profile.p_values;
    if modulus.len() != centers.len() || centers.is_empty() {
        return Err(Error::InvalidParameter(
            "modulus and phase must share bin centers".into(),
        ));
    }
    if modulus.iter().all(|&m| m == 0.0) {
        return Err(Error::NothingToReconstruct);
    }
    let nb = centers.len();
    let amplitudes = grid
        .coordinates()
        .map(|p| {
            if nb == 1 {
                let half = 0.5 * grid.spacing().max(1e-300);
                return if (p - centers[0]).abs() <= half {
                    Complex64::from_polar(modulus[0], profile.phase[0].unwrap_or(0.0))
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            if p < centers[0] || p > centers[nb - 1] {
                return Complex64::new(0.0, 0.0);
            }
            let k = centers.partition_point(|&c| c <= p).clamp(1, nb - 1) - 1;
            let t = (p - centers[k]) / (centers[k + 1] - centers[k]);
            let m = modulus[k] * (1.0 - t) + modulus[k + 1] * t;
            let phi = match (profile.phase[k], profile.phase[k + 1]) {
                (Some(a), Some(b)) => a * (1.0 - t) + b * t,
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => return Complex64::new(0.0, 0.0),
            };
            Complex64::from_polar(m, phi)
        })
        .collect();
    let mut psi = Wavefunction::new(*grid, amplitudes, Representation::Momentum)?;
    psi.normalize()?;
    Ok(psi)
}

/// `δ = 1 − |⟨ψ_exact|ψ_rec⟩|²`.
pub fn reconstruction_error(psi_exact: &Wavefunction, psi_rec: &Wavefunction) -> Result<f64> {
    let overlap = inner_product(psi_exact, psi_rec)?;
    Ok((1.0 - overlap.norm_sqr()).clamp(0.0, 1.0))
}

/// Full reconstruction from binned data, scored against `psi_exact`
/// (momentum representation, same grid).
pub fn reconstruct(
    stats: &BinnedStatistics,
    theta: f64,
    psi_exact: &Wavefunction,
) -> Result<ReconstructionResult> {
    let segment_list = stats.segments();
    if segment_list.is_empty() {
        return Err(Error::NothingToReconstruct);
    }
    let modulus = reconstruct_modulus(&stats.p_hat);
    let phase_profile = reconstruct_phase(&stats.e_hat, theta, &segment_list, &stats.layout)?;
    let psi_rec = assemble_state(&modulus, &phase_profile, psi_exact.grid())?;
    let delta = reconstruction_error(psi_exact, &psi_rec)?;
    Ok(ReconstructionResult {
        modulus,
        phase_profile,
        psi_rec,
        delta,
        segments: segment_list.len(),
        failed: segment_list.len() > 1,
        segment_list,
    })
}

/// Unwrapped `arg ψ(P)` of a momentum-representation state, zero at the
/// modulus maximum; `None` where `|ψ| < 1e−6·max`.
pub fn reference_phase(psi_momentum: &Wavefunction) -> Vec<Option<f64>> {
    let amps = psi_momentum.amplitudes();
    let floor = 1e-6 * psi_momentum.max_modulus();
    let peak = amps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map_or(0, |(i, _)| i);
    let mut out = vec![None; amps.len()];
    out[peak] = Some(0.0);
    let mut walk = |range: &mut dyn Iterator<Item = usize>| {
        let (mut last_k, mut last_phi) = (peak, 0.0);
        for k in range {
            if amps[k].norm() < floor {
                continue;
            }
            last_phi += (amps[k] * amps[last_k].conj()).arg();
            last_k = k;
            out[k] = Some(last_phi);
        }
    };
    walk(&mut (peak + 1..amps.len()));
    walk(&mut (0..peak).rev());
    out
}
