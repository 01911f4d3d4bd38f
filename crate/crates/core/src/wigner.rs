//! Wigner function `W(X,P) = (1/π)∫dy conj(ψ(X+y))ψ(X−y)e^{2iPy}` on a grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{ChirpTransform, Lattice};
use crate::grid::{GridSpec, Representation, Wavefunction};

#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x_axis: GridSpec,
    pub p_axis: GridSpec,
    /// Row-major, `values[i * p_axis.len() + j] = W(X_i, P_j)`.
    pub values: Vec<f64>,
    /// Largest imaginary part discarded when taking the real value.
    pub max_imag_residue: f64,
}

impl WignerGrid {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_axis.len() + j]
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.x_axis.spacing() * self.p_axis.spacing()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `∫W dP` at each X.
    pub fn position_marginal(&self) -> Vec<f64> {
        let dp = self.p_axis.spacing();
        self.values
            .chunks(self.p_axis.len())
            .map(|row| row.iter().sum::<f64>() * dp)
            .collect()
    }

    /// `∫W dX` at each P.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        let np = self.p_axis.len();
        let dx = self.x_axis.spacing();
        let mut out = vec![0.0; np];
        for row in self.values.chunks(np) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|o| *o *= dx);
        out
    }

    /// Keeps every `stride`-th X row.
    pub fn decimate_x(&self, stride: usize) -> Result<WignerGrid> {
        let x_axis = self.x_axis.decimate(stride)?;
        let np = self.p_axis.len();
        let values = self
            .values
            .chunks(np)
            .step_by(stride)
            .flatten()
            .copied()
            .collect();
        Ok(WignerGrid {
            x_axis,
            p_axis: self.p_axis,
            values,
            max_imag_residue: self.max_imag_residue,
        })
    }
}

/// Evaluates the Wigner function at every X of `psi`'s grid and every P of `p_axis`.
pub fn wigner(psi: &Wavefunction, p_axis: &GridSpec) -> Result<WignerGrid> {
    if psi.representation() != Representation::Position {
        return Err(Error::Mismatch);
    }
    let grid = *psi.grid();
    let n = grid.len();
    let dx = grid.spacing();
    let half = n / 2;
    let plan = ChirpTransform::new(
        Lattice {
            start: -(half as f64) * dx,
            step: dx,
            len: n,
        },
        Lattice {
            start: 2.0 * p_axis.x_min(),
            step: 2.0 * p_axis.spacing(),
            len: p_axis.len(),
        },
        1.0,
        dx / PI,
    );
    let amps = psi.amplitudes();

    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let reach = i.min(n - 1 - i);
            let mut corr = vec![Complex64::new(0.0, 0.0); n];
            for m in 0..=reach.min(half - 1) {
                corr[half + m] = amps[i + m].conj() * amps[i - m];
                if m > 0 {
                    corr[half - m] = amps[i - m].conj() * amps[i + m];
                }
            }
            if reach >= half {
                corr[0] = amps[i - half].conj() * amps[i + half];
            }
            let out = plan.apply(&corr);
            let residue = out.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            (out.into_iter().map(|z| z.re).collect(), residue)
        })
        .collect();

    let max_imag_residue = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(WignerGrid {
        x_axis: grid,
        p_axis: *p_axis,
        values,
        max_imag_residue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::state::{realize_state, StateDescriptor};

    #[test]
    fn vacuum_peak_is_one_over_pi() {
        let g = GridSpec::default();
        let psi = realize_state(&StateDescriptor::vacuum(), &g).unwrap().psi;
        let p_axis = make_grid(-8.0, 8.0, 256).unwrap();
        let w = wigner(&psi, &p_axis).unwrap();
        let w00 = w.at(g.len() / 2, 128);
        assert!((w00 - 1.0 / PI).abs() < 1e-10);
        assert!(w.max_imag_residue < 1e-10);
        assert!((w.integral() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_momentum_input() {
        let g = GridSpec::default();
        let psi = realize_state(&StateDescriptor::vacuum(), &g).unwrap().psi;
        let mom = psi.to_momentum().unwrap();
        assert!(wigner(&mom, &g).is_err());
    }
}
