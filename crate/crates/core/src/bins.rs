//! Momentum bins shared by the exact and sampled pipelines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Bins `[origin + (first + k)·width, origin + (first + k + 1)·width)` covering a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinLayout {
    origin: f64,
    width: f64,
    first: i64,
    n_bins: usize,
}

impl BinLayout {
    /// Smallest set of bins with one edge at `origin` that covers the grid range.
    pub fn covering(grid: &GridSpec, width: f64, origin: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bin width {width} must be positive"
            )));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidParameter("bin origin must be finite".into()));
        }
        let first = ((grid.x_min() - origin) / width + 1e-9).floor() as i64;
        let last = ((grid.x_max() - origin) / width - 1e-9).ceil() as i64;
        Ok(Self {
            origin,
            width,
            first,
            n_bins: (last - first).max(1) as usize,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.n_bins
    }

    pub fn is_empty(&self) -> bool {
        self.n_bins == 0
    }

    pub fn lower_edge(&self, k: usize) -> f64 {
        self.origin + (self.first + k as i64) as f64 * self.width
    }

    pub fn upper_edge(&self, k: usize) -> f64 {
        self.lower_edge(k + 1)
    }

    pub fn center(&self, k: usize) -> f64 {
        self.lower_edge(k) + 0.5 * self.width
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_bins).map(|k| self.center(k)).collect()
    }

    pub fn index_of(&self, p: f64) -> Option<usize> {
        let k = ((p - self.origin) / self.width).floor() as i64 - self.first;
        (0..self.n_bins as i64).contains(&k).then_some(k as usize)
    }

    /// Index of the bin whose lower edge is the edge nearest `P = 0`.
    pub fn anchor_bin(&self) -> i64 {
        (-self.origin / self.width).round() as i64 - self.first
    }

    pub fn anchor_edge(&self) -> f64 {
        self.lower_edge_signed(self.anchor_bin())
    }

    fn lower_edge_signed(&self, k: i64) -> f64 {
        self.origin + (self.first + k) as f64 * self.width
    }
}

/// A maximal run of occupied bins, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub first: usize,
    pub last: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: usize) -> bool {
        (self.first..=self.last).contains(&k)
    }
}

/// Maximal contiguous runs of `true`, in index order.
pub fn segments_from_mask(occupied: &[bool]) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, &on) in occupied.iter().enumerate() {
        match (on, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                out.push(Segment {
                    first: s,
                    last: k - 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Segment {
            first: s,
            last: occupied.len() - 1,
        });
    }
    out
}

/// Per-bin density and postselected meter mean fed to the reconstructor.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedStatistics {
    pub layout: BinLayout,
    /// Probability density estimate per bin.
    pub p_hat: Vec<f64>,
    /// Postselected `⟨x_M⟩` per bin, `None` where the bin is empty.
    pub e_hat: Vec<Option<f64>>,
}

impl BinnedStatistics {
    pub fn segments(&self) -> Vec<Segment> {
        let mask: Vec<bool> = self.e_hat.iter().map(Option::is_some).collect();
        segments_from_mask(&mask)
    }
}
