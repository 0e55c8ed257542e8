//! File output with write-to-temp-then-rename, and CSV readers.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::assemble::{ScottEntry, ScottTable};
use crate::error::{LabError, Result};
use crate::lattice::GaugeLattice;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    {
        let mut f = fs::File::create(tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| LabError::Config(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn csv_err(e: csv::Error) -> LabError {
    LabError::Config(e.to_string())
}

/// Serialises records (structs or tuples) with a header row.
pub fn write_records<T: Serialize>(path: &Path, header: Option<&[&str]>, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(header.is_none()).from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h).map_err(csv_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Config(e.to_string()))?;
    write_atomic(path, &bytes)
}

/// Scott table with columns `kappa_arg, beta_arg, S, err`.
pub fn read_scott_table(path: &Path) -> Result<ScottTable> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut entries = Vec::new();
    for rec in r.deserialize::<(f64, f64, f64, f64)>() {
        let (kappa_arg, beta_arg, s, err) = rec.map_err(csv_err)?;
        entries.push(ScottEntry { kappa_arg, beta_arg, s, err });
    }
    Ok(ScottTable { entries })
}

pub fn write_scott_table(path: &Path, table: &ScottTable) -> Result<()> {
    write_records(
        path,
        Some(&["kappa_arg", "beta_arg", "S", "err"]),
        table.entries.iter().map(|e| (e.kappa_arg, e.beta_arg, e.s, e.err)),
    )
}

/// Site potential with columns `i, j, k, V`; unlisted sites are zero.
pub fn read_potential(path: &Path, lat: &GaugeLattice) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut v = vec![0.0; lat.sites()];
    for rec in r.deserialize::<(usize, usize, usize, f64)>() {
        let (i, j, k, val) = rec.map_err(csv_err)?;
        if i >= lat.n[0] || j >= lat.n[1] || k >= lat.n[2] {
            return Err(LabError::Config(format!("site ({i}, {j}, {k}) outside the lattice")));
        }
        v[lat.index([i, j, k])] = val;
    }
    Ok(v)
}

/// Vector potential as `i, j, k, A0, A1, A2`.
pub fn write_field(path: &Path, lat: &GaugeLattice) -> Result<()> {
    write_records(
        path,
        Some(&["i", "j", "k", "A0", "A1", "A2"]),
        (0..lat.sites()).map(|x| {
            let c = lat.coords(x);
            (c[0], c[1], c[2], lat.a[0][x], lat.a[1][x], lat.a[2][x])
        }),
    )
}
