//! CSV/JSON artifact writers.
//!
//! Floats are written with 17 significant digits so every value round-trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::grid::Wavefunction;
use crate::wigner::WignerGrid;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes a header line followed by comma-joined rows.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.as_ref().join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// `coordinate,re,im`.
pub fn write_wavefunction_csv(path: &Path, psi: &Wavefunction) -> Result<()> {
    let rows = psi
        .grid()
        .coordinates()
        .zip(psi.amplitudes())
        .map(|(c, a)| vec![fmt_f64(c), fmt_f64(a.re), fmt_f64(a.im)]);
    write_csv(path, &["coordinate", "re", "im"], rows)
}

/// `X,P,W`, X-major.
pub fn write_wigner_csv(path: &Path, w: &WignerGrid) -> Result<()> {
    let rows = (0..w.x_axis.len()).flat_map(|i| {
        (0..w.p_axis.len()).map(move |j| {
            vec![
                fmt_f64(w.x_axis.coordinate(i)),
                fmt_f64(w.p_axis.coordinate(j)),
                fmt_f64(w.at(i, j)),
            ]
        })
    });
    write_csv(path, &["X", "P", "W"], rows)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
