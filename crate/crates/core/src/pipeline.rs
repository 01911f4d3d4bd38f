//! End-to-end runs: exact statistics, Monte Carlo, parameter sweeps.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bins::{BinLayout, BinnedStatistics};
use crate::coupler::{
    beam_split, joint_momentum_position, weak_values, CouplingParams, ExactStatistics,
    JointAmplitude, Observable,
};
use crate::error::{Error, Result};
use crate::grid::{GridParams, GridSpec, Wavefunction};
use crate::io::{fmt_f64, fmt_opt, sha256_file, write_csv, write_json, write_wigner_csv};
use crate::reconstructor::{reconstruct, reference_phase, ReconstructionResult};
use crate::sampler::{bin_records, BinnedEstimates, JointSampler, MeasurementRecord};
use crate::state::{realize_state, rotate_descriptor, StateDescriptor};
use crate::wigner::wigner;

/// Wigner export settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerSettings {
    pub p_axis: GridParams,
    /// Keep every `x_stride`-th X row in exported files.
    pub x_stride: usize,
}

impl Default for WignerSettings {
    fn default() -> Self {
        Self {
            p_axis: GridParams {
                x_min: -8.0,
                x_max: 8.0,
                n_points: 256,
            },
            x_stride: 4,
        }
    }
}

fn default_bin_width() -> f64 {
    0.1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs/out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub state: StateDescriptor,
    pub theta: f64,
    /// Zero selects the exact pipeline.
    #[serde(default)]
    pub n_runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bin_width")]
    pub bin_width: f64,
    #[serde(default)]
    pub grid: GridParams,
    /// Phase-space pre-rotation of the input state.
    #[serde(default)]
    pub rotation_angle: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit_records: bool,
    #[serde(default)]
    pub wigner: WignerSettings,
}

impl RunConfig {
    pub fn new(state: StateDescriptor, theta: f64) -> Self {
        Self {
            state,
            theta,
            n_runs: 0,
            seed: 0,
            bin_width: default_bin_width(),
            grid: GridParams::default(),
            rotation_angle: 0.0,
            output_dir: default_output_dir(),
            emit_records: false,
            wigner: WignerSettings::default(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        CouplingParams::new(self.theta).map_err(|e| Error::Config(e.to_string()))?;
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::Config(format!(
                "bin_width = {} must be positive",
                self.bin_width
            )));
        }
        if !self.rotation_angle.is_finite() {
            return Err(Error::Config("rotation_angle must be finite".into()));
        }
        GridSpec::try_from(self.grid).map_err(|e| Error::Config(e.to_string()))?;
        GridSpec::try_from(self.wigner.p_axis).map_err(|e| Error::Config(e.to_string()))?;
        if self.wigner.x_stride == 0 || !self.grid.n_points.is_multiple_of(self.wigner.x_stride) {
            return Err(Error::Config(
                "wigner.x_stride must divide grid.n_points".into(),
            ));
        }
        Ok(())
    }
}

/// Everything upstream of the measurement statistics for one configuration.
pub struct PreparedRun {
    pub grid: GridSpec,
    pub params: CouplingParams,
    pub descriptor: StateDescriptor,
    pub psi_position: Wavefunction,
    pub psi_momentum: Wavefunction,
    pub joint: JointAmplitude,
    pub exact: ExactStatistics,
    pub layout: BinLayout,
}

impl PreparedRun {
    /// Realizes the state, couples it to a vacuum meter and moves to the
    /// measured `(P, x)` representation.
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let grid = GridSpec::try_from(config.grid)?;
        let params = CouplingParams::new(config.theta)?;
        let descriptor = rotate_descriptor(&config.state, config.rotation_angle);
        let psi_position = realize_state(&descriptor, &grid)?.psi;
        let psi_momentum = psi_position.to_momentum()?;
        psi_momentum.check_support("system state in momentum representation")?;
        let meter = realize_state(&StateDescriptor::vacuum(), &grid)?.psi;
        let joint = joint_momentum_position(&beam_split(&psi_position, &meter, &params)?);
        joint.check_support("joint state in measured representation")?;
        let exact = ExactStatistics::new(&joint);
        let layout = BinLayout::covering(&grid, config.bin_width, 0.0)?;
        Ok(Self {
            grid,
            params,
            descriptor,
            psi_position,
            psi_momentum,
            joint,
            exact,
            layout,
        })
    }

    pub fn exact_bins(&self) -> BinnedStatistics {
        self.exact.binned(&self.layout)
    }

    /// Reconstruction from exact bin-integrated statistics (infinite-N limit).
    pub fn reconstruct_exact(&self) -> Result<ReconstructionResult> {
        reconstruct(&self.exact_bins(), self.params.theta(), &self.psi_momentum)
    }

    pub fn sampler(&self) -> JointSampler {
        JointSampler::new(&self.joint)
    }

    pub fn bin(&self, records: &[MeasurementRecord]) -> Result<BinnedEstimates> {
        bin_records(
            records,
            self.layout.width(),
            self.layout.origin(),
            &self.grid,
        )
    }

    /// Reconstruction from binned records.
    pub fn reconstruct_sampled(&self, binned: &BinnedEstimates) -> Result<ReconstructionResult> {
        reconstruct(
            &binned.statistics(),
            self.params.theta(),
            &self.psi_momentum,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub delta: f64,
    pub segments: usize,
    pub failed: bool,
    pub theta: f64,
    pub n_runs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub delta: f64,
    pub segments: usize,
    pub failed: bool,
    pub gap_count: usize,
    pub wall_clock_seconds: f64,
    pub tool_version: String,
    /// SHA-256 of every emitted data file, keyed by file name.
    pub files: BTreeMap<String, String>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub result: ReconstructionResult,
    pub summary: RunSummary,
    pub manifest: RunManifest,
}

struct Emitter {
    dir: PathBuf,
    files: Vec<String>,
}

impl Emitter {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn hashes(&self) -> Result<BTreeMap<String, String>> {
        self.files
            .iter()
            .map(|f| Ok((f.clone(), sha256_file(&self.dir.join(f))?)))
            .collect()
    }
}

fn write_reconstruction(path: &Path, r: &ReconstructionResult) -> Result<()> {
    let prof = &r.phase_profile;
    let rows = (0..prof.p_values.len()).map(|k| {
        vec![
            fmt_f64(prof.p_values[k]),
            fmt_f64(r.modulus[k]),
            fmt_opt(prof.phase[k]),
            prof.segment_id[k]
                .map(|s| s.to_string())
                .unwrap_or_default(),
        ]
    });
    write_csv(path, &["P", "modulus", "phase", "segment_id"], rows)
}

fn write_exact_bins(path: &Path, stats: &BinnedStatistics) -> Result<()> {
    let rows = (0..stats.layout.len()).map(|k| {
        vec![
            fmt_f64(stats.layout.center(k)),
            fmt_f64(stats.p_hat[k]),
            fmt_opt(stats.e_hat[k]),
        ]
    });
    write_csv(path, &["bin_center", "p_hat", "e_hat"], rows)
}

fn write_exact_statistics(path: &Path, run: &PreparedRun) -> Result<()> {
    let means = run.exact.pointwise_mean();
    let xw = weak_values(&run.psi_momentum, Observable::X)?;
    let rows = (0..run.grid.len()).map(|i| {
        let w = &xw[i];
        vec![
            fmt_f64(run.grid.coordinate(i)),
            fmt_f64(run.exact.density[i]),
            fmt_opt(means[i]),
            fmt_opt(w.valid.then_some(w.value.re)),
            fmt_opt(w.valid.then_some(w.value.im)),
            u8::from(w.valid).to_string(),
        ]
    });
    write_csv(
        path,
        &["P", "p_density", "E_meter", "ReXw", "ImXw", "valid"],
        rows,
    )
}

fn write_reference(path: &Path, psi: &Wavefunction) -> Result<()> {
    let phase = reference_phase(psi);
    let rows = psi.grid().coordinates().enumerate().map(|(i, p)| {
        vec![
            fmt_f64(p),
            fmt_f64(psi.amplitudes()[i].norm()),
            fmt_opt(phase[i]),
        ]
    });
    write_csv(path, &["P", "modulus", "phase"], rows)
}

fn write_binned(path: &Path, b: &BinnedEstimates) -> Result<()> {
    let rows = (0..b.layout.len()).map(|k| {
        vec![
            fmt_f64(b.layout.center(k)),
            b.counts[k].to_string(),
            fmt_f64(b.p_hat[k]),
            fmt_opt(b.e_hat[k]),
            fmt_opt(b.stderr[k]),
            u8::from(b.gap_flags[k]).to_string(),
        ]
    });
    write_csv(
        path,
        &["bin_center", "count", "p_hat", "e_hat", "stderr", "gap"],
        rows,
    )
}

fn write_records(path: &Path, records: &[MeasurementRecord]) -> Result<()> {
    let rows = records.iter().map(|r| vec![fmt_f64(r.p), fmt_f64(r.x)]);
    write_csv(path, &["P", "x"], rows)
}

fn finish(
    config: &RunConfig,
    emitter: &mut Emitter,
    result: ReconstructionResult,
    gap_count: usize,
    started: Instant,
) -> Result<RunOutcome> {
    let summary = RunSummary {
        delta: result.delta,
        segments: result.segments,
        failed: result.failed,
        theta: config.theta,
        n_runs: config.n_runs,
        seed: config.seed,
    };
    let summary_path = emitter.path("summary.json");
    write_json(&summary_path, &summary)?;
    let manifest = RunManifest {
        config: config.clone(),
        delta: result.delta,
        segments: result.segments,
        failed: result.failed,
        gap_count,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        files: emitter.hashes()?,
    };
    write_json(&emitter.dir.join("manifest.json"), &manifest)?;
    Ok(RunOutcome {
        result,
        summary,
        manifest,
    })
}

/// Exact-statistics pipeline; writes its artifacts to `config.output_dir`.
pub fn run_exact(config: &RunConfig) -> Result<RunOutcome> {
    if config.n_runs != 0 {
        return Err(Error::Config("run_exact requires n_runs = 0".into()));
    }
    let started = Instant::now();
    let run = PreparedRun::new(config)?;
    let stats = run.exact_bins();
    let result = reconstruct(&stats, run.params.theta(), &run.psi_momentum)?;

    let mut out = Emitter::new(&config.output_dir)?;
    write_exact_statistics(&out.path("exact_statistics.csv"), &run)?;
    write_exact_bins(&out.path("exact_bins.csv"), &stats)?;
    write_reference(&out.path("reference.csv"), &run.psi_momentum)?;
    write_reconstruction(&out.path("reconstruction.csv"), &result)?;

    let p_axis = GridSpec::try_from(config.wigner.p_axis)?;
    let stride = config.wigner.x_stride;
    let w_exact = wigner(&run.psi_position, &p_axis)?.decimate_x(stride)?;
    write_wigner_csv(&out.path("wigner_exact.csv"), &w_exact)?;
    let w_rec = wigner(&result.psi_rec.to_position()?, &p_axis)?.decimate_x(stride)?;
    write_wigner_csv(&out.path("wigner_reconstructed.csv"), &w_rec)?;

    finish(config, &mut out, result, 0, started)
}

/// Monte Carlo pipeline; writes its artifacts to `config.output_dir`.
pub fn run_monte_carlo(config: &RunConfig) -> Result<RunOutcome> {
    if config.n_runs == 0 {
        return Err(Error::Config("run_monte_carlo requires n_runs > 0".into()));
    }
    let started = Instant::now();
    let run = PreparedRun::new(config)?;
    let records = run.sampler().sample(config.n_runs, config.seed);
    let binned = run.bin(&records)?;
    let result = run.reconstruct_sampled(&binned)?;

    let mut out = Emitter::new(&config.output_dir)?;
    if config.emit_records {
        write_records(&out.path("records.csv"), &records)?;
    }
    write_binned(&out.path("binned.csv"), &binned)?;
    write_exact_bins(&out.path("exact_bins.csv"), &run.exact_bins())?;
    write_reconstruction(&out.path("reconstruction.csv"), &result)?;
    finish(config, &mut out, result, binned.gap_count(), started)
}

/// Exact pipeline when `n_runs == 0`, Monte Carlo otherwise.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    if config.n_runs == 0 {
        run_exact(config)
    } else {
        run_monte_carlo(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Theta,
    NRuns,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::Theta => "theta",
            SweepAxis::NRuns => "n_runs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub delta: Option<f64>,
    pub segments: Option<usize>,
    pub failed: bool,
    pub error: Option<String>,
}

/// Runs `template` once per value, each in its own subdirectory, and writes
/// `sweep_summary.csv`. A failing run is recorded and the sweep continues.
pub fn sweep(template: &RunConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    template.validate()?;
    let rows: Vec<SweepRow> = values
        .par_iter()
        .enumerate()
        .map(|(idx, &value)| {
            let mut config = template.clone();
            config.output_dir = template
                .output_dir
                .join(format!("{}_{idx:03}", axis.label()));
            match axis {
                SweepAxis::Theta => config.theta = value,
                SweepAxis::NRuns => config.n_runs = value as usize,
            }
            let outcome = if axis == SweepAxis::NRuns && !(value >= 0.0 && value.fract() == 0.0) {
                Err(Error::Config(format!(
                    "n_runs value {value} is not a count"
                )))
            } else {
                run(&config)
            };
            match outcome {
                Ok(o) => SweepRow {
                    axis_value: value,
                    delta: Some(o.summary.delta),
                    segments: Some(o.summary.segments),
                    failed: o.summary.failed,
                    error: None,
                },
                Err(e) => SweepRow {
                    axis_value: value,
                    delta: None,
                    segments: None,
                    failed: true,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    std::fs::create_dir_all(&template.output_dir)?;
    let csv_rows = rows.iter().map(|r| {
        vec![
            fmt_f64(r.axis_value),
            fmt_opt(r.delta),
            r.segments.map(|s| s.to_string()).unwrap_or_default(),
            r.failed.to_string(),
        ]
    });
    write_csv(
        &template.output_dir.join("sweep_summary.csv"),
        &["axis_value", "delta", "segments", "failed"],
        csv_rows,
    )?;
    Ok(rows)
}
