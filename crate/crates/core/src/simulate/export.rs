//! Realization files: `values.csv` plus a `metadata.json` sidecar.
//!
//! The CSV has columns `point_index,time,component,value`, ordered by point,
//! then time, then component. Numbers use the shortest representation that
//! parses back to the same double, so a write/read cycle is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Realization;
use crate::error::{Error, Result};
use crate::spaces::{Point, SpaceParams};

pub const VALUES_FILE: &str = "values.csv";
pub const METADATA_FILE: &str = "metadata.json";

#[derive(Serialize, Deserialize)]
struct Metadata {
    space: String,
    m: usize,
    seed: u64,
    trunc: usize,
    model_hash: String,
    times: Vec<f64>,
    points: Vec<Point>,
    latent_u: Point,
    /// `coefficients[n][k]`: the degree-`n` random vector at `times[k]`.
    coefficients: Vec<Vec<Vec<f64>>>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Input(format!("{}: {e}", path.display()))
}

/// Renders the values table.
pub fn values_csv(r: &Realization) -> String {
    let mut out = String::from("point_index,time,component,value\n");
    let (np, nt, m) = r.shape();
    for p in 0..np {
        for t in 0..nt {
            for c in 0..m {
                writeln!(out, "{p},{},{c},{}", r.times[t], r.value(p, t, c)).expect("writing to a String");
            }
        }
    }
    out
}

/// Writes both files into `dir`, creating it if needed.
pub fn write_realization(r: &Realization, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let meta = Metadata {
        space: r.space.designation(),
        m: r.m,
        seed: r.seed,
        trunc: r.trunc,
        model_hash: r.model_hash.clone(),
        times: r.times.clone(),
        points: r.points.clone(),
        latent_u: r.latent_u.clone(),
        coefficients: r.coefficients.clone(),
    };
    let values = dir.join(VALUES_FILE);
    fs::write(&values, values_csv(r)).map_err(|e| io_err(&values, e))?;
    let meta_path = dir.join(METADATA_FILE);
    let text = serde_json::to_string_pretty(&meta).expect("plain data serialises");
    fs::write(&meta_path, text + "\n").map_err(|e| io_err(&meta_path, e))
}

/// Reads a realization written by [`write_realization`].
pub fn read_realization(dir: &Path) -> Result<Realization> {
    let meta_path = dir.join(METADATA_FILE);
    let text = fs::read_to_string(&meta_path).map_err(|e| io_err(&meta_path, e))?;
    let meta: Metadata = serde_json::from_str(&text).map_err(|e| Error::Parse {
        location: format!("{} line {} column {}", meta_path.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    let space: SpaceParams = meta.space.parse()?;

    let values_path = dir.join(VALUES_FILE);
    let csv = fs::read_to_string(&values_path).map_err(|e| io_err(&values_path, e))?;
    let (np, nt, m) = (meta.points.len(), meta.times.len(), meta.m);
    let mut values = vec![f64::NAN; np * nt * m];
    let mut seen = 0usize;
    for (i, line) in csv.lines().enumerate().skip(1) {
        let bad = |msg: &str| Error::Parse { location: format!("{} line {}", values_path.display(), i + 1), message: msg.into() };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(bad("expected 4 columns"));
        }
        let p: usize = cols[0].parse().map_err(|_| bad("bad point index"))?;
        let t: f64 = cols[1].parse().map_err(|_| bad("bad time"))?;
        let c: usize = cols[2].parse().map_err(|_| bad("bad component"))?;
        let v: f64 = cols[3].parse().map_err(|_| bad("bad value"))?;
        let k = meta.times.iter().position(|&x| x == t).ok_or_else(|| bad("time not in metadata"))?;
        if p >= np || c >= m {
            return Err(bad("index out of range"));
        }
        values[(p * nt + k) * m + c] = v;
        seen += 1;
    }
    if seen != values.len() {
        return Err(Error::Parse {
            location: values_path.display().to_string(),
            message: format!("{seen} rows, expected {}", values.len()),
        });
    }
    Ok(Realization {
        space,
        m,
        model_hash: meta.model_hash,
        points: meta.points,
        times: meta.times,
        values,
        latent_u: meta.latent_u,
        trunc: meta.trunc,
        seed: meta.seed,
        coefficients: meta.coefficients,
    })
}
