//! Monte Carlo homodyne runs, momentum binning and gap detection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bins::{segments_from_mask, BinLayout, BinnedStatistics, Segment};
use crate::coupler::JointAmplitude;
use crate::error::Result;
use crate::grid::GridSpec;

/// One run: HDS momentum reading and HDM position reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub p: f64,
    pub x: f64,
}

/// Records per RNG stream. Part of the reproducibility contract: changing it
/// changes every sampled data set.
pub const CHUNK_SIZE: usize = 1 << 14;

/// Inverse-CDF sampler over the cells of `|Ψ(P, x)|²`.
#[derive(Debug, Clone)]
pub struct JointSampler {
    p_axis: GridSpec,
    x_axis: GridSpec,
    cumulative: Vec<f64>,
}

impl JointSampler {
    pub fn new(joint: &JointAmplitude) -> Self {
        let mut acc = 0.0;
        let cumulative = joint
            .amplitudes()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Self {
            p_axis: *joint.system_axis(),
            x_axis: *joint.meter_axis(),
            cumulative,
        }
    }

    pub fn p_axis(&self) -> &GridSpec {
        &self.p_axis
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> MeasurementRecord {
        let total = *self.cumulative.last().expect("non-empty joint grid");
        let target = rng.random::<f64>() * total;
        let cell = self
            .cumulative
            .partition_point(|&c| c <= target)
            .min(self.cumulative.len() - 1);
        let nm = self.x_axis.len();
        let (i, j) = (cell / nm, cell % nm);
        let jitter = |axis: &GridSpec, k: usize, r: f64| {
            (axis.coordinate(k) + (r - 0.5) * axis.spacing()).clamp(axis.x_min(), axis.x_max())
        };
        let rp = rng.random::<f64>();
        let rx = rng.random::<f64>();
        MeasurementRecord {
            p: jitter(&self.p_axis, i, rp),
            x: jitter(&self.x_axis, j, rx),
        }
    }

    /// `n_runs` independent records. Chunk `c` draws from ChaCha8 stream `c`
    /// of `seed`, so the output does not depend on the thread count.
    pub fn sample(&self, n_runs: usize, seed: u64) -> Vec<MeasurementRecord> {
        let n_chunks = n_runs.div_ceil(CHUNK_SIZE);
        let chunks: Vec<Vec<MeasurementRecord>> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let len = CHUNK_SIZE.min(n_runs - c * CHUNK_SIZE);
                (0..len).map(|_| self.draw(&mut rng)).collect()
            })
            .collect();
        chunks.into_iter().flatten().collect()
    }
}

/// Draws `n_runs` records from the joint outcome distribution.
pub fn sample_joint(joint: &JointAmplitude, n_runs: usize, seed: u64) -> Vec<MeasurementRecord> {
    JointSampler::new(joint).sample(n_runs, seed)
}

/// Histogram of momentum readings with postselected meter statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedEstimates {
    pub layout: BinLayout,
    pub n_runs: usize,
    pub counts: Vec<u64>,
    /// `counts / (N·ΔP)`.
    pub p_hat: Vec<f64>,
    /// Mean meter reading per bin.
    pub e_hat: Vec<Option<f64>>,
    /// Sample standard deviation over `√count`; needs two records.
    pub stderr: Vec<Option<f64>>,
    /// Empty bins lying between nonempty bins.
    pub gap_flags: Vec<bool>,
}

impl BinnedEstimates {
    pub fn bin_width(&self) -> f64 {
        self.layout.width()
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.layout.centers()
    }

    pub fn gap_count(&self) -> usize {
        self.gap_flags.iter().filter(|g| **g).count()
    }

    pub fn statistics(&self) -> BinnedStatistics {
        BinnedStatistics {
            layout: self.layout,
            p_hat: self.p_hat.clone(),
            e_hat: self.e_hat.clone(),
        }
    }
}

/// Bins records on `P` with edges at `origin + k·bin_width` spanning `axis`.
pub fn bin_records(
    records: &[MeasurementRecord],
    bin_width: f64,
    origin: f64,
    axis: &GridSpec,
) -> Result<BinnedEstimates> {
    let layout = BinLayout::covering(axis, bin_width, origin)?;
    let n = layout.len();
    let mut counts = vec![0u64; n];
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for r in records {
        let k = layout
            .index_of(r.p)
            .unwrap_or(if r.p < layout.lower_edge(0) { 0 } else { n - 1 });
        counts[k] += 1;
        sum[k] += r.x;
        sum_sq[k] += r.x * r.x;
    }

    let n_runs = records.len();
    let norm = n_runs as f64 * bin_width;
    let p_hat = counts
        .iter()
        .map(|&c| if n_runs == 0 { 0.0 } else { c as f64 / norm })
        .collect();
    let e_hat = counts
        .iter()
        .zip(&sum)
        .map(|(&c, s)| (c > 0).then(|| s / c as f64))
        .collect();
    let stderr = (0..n)
        .map(|k| {
            let c = counts[k];
            (c > 1).then(|| {
                let cf = c as f64;
                let mean = sum[k] / cf;
                let var = ((sum_sq[k] - cf * mean * mean) / (cf - 1.0)).max(0.0);
                (var / cf).sqrt()
            })
        })
        .collect();

    let first = counts.iter().position(|&c| c > 0);
    let last = counts.iter().rposition(|&c| c > 0);
    let gap_flags = (0..n)
        .map(|k| match (first, last) {
            (Some(a), Some(b)) => k > a && k < b && counts[k] == 0,
            _ => false,
        })
        .collect();

    Ok(BinnedEstimates {
        layout,
        n_runs,
        counts,
        p_hat,
        e_hat,
        stderr,
        gap_flags,
    })
}

/// Maximal runs of nonempty bins, ordered by bin index.
pub fn detect_gaps(binned: &BinnedEstimates) -> Vec<Segment> {
    let mask: Vec<bool> = binned.counts.iter().map(|&c| c > 0).collect();
    segments_from_mask(&mask)
}
