//! Point-set specifiers: `random:K`, `fibonacci:K`, or a coordinate file.

use std::path::Path;

use twopoint::rng::{stream_rng, POINTS_STREAM};
use twopoint::{Error, Point, Result, SpaceFamily, SpaceParams};

/// Resolves a point specifier for `space`.
///
/// * `random:K`: `K` uniform points drawn from a dedicated stream of `seed`.
/// * `fibonacci:K`: the spherical Fibonacci lattice (2-sphere only).
/// * `file:PATH` or `PATH`: one point per line, ambient coordinates separated
///   by commas or whitespace; blank lines and `#` comments are skipped.
pub fn resolve(spec: &str, space: &SpaceParams, seed: u64) -> Result<Vec<Point>> {
    if let Some(k) = spec.strip_prefix("random:") {
        let k = count(k, spec)?;
        let mut rng = stream_rng(seed, POINTS_STREAM);
        return (0..k).map(|_| space.sample_uniform(&mut rng)).collect();
    }
    if let Some(k) = spec.strip_prefix("fibonacci:") {
        let k = count(k, spec)?;
        if space.family != SpaceFamily::Sphere || space.d != 2 {
            return Err(Error::Usage(format!("fibonacci points exist only on sphere:2, not {space}")));
        }
        return Ok(fibonacci(k));
    }
    let path = spec.strip_prefix("file:").unwrap_or(spec);
    read_file(Path::new(path), space)
}

fn count(s: &str, spec: &str) -> Result<usize> {
    s.parse::<usize>()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| Error::Usage(format!("bad point count in '{spec}'")))
}

/// Quasi-uniform points `(r cos φ_i, r sin φ_i, z_i)` with `z_i = 1 - (2i+1)/K`
/// and golden-angle increments in `φ`.
pub fn fibonacci(k: usize) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / k as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Point::Real(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

fn read_file(path: &Path, space: &SpaceParams) -> Result<Vec<Point>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let coords = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse { location: format!("{} line {}", path.display(), i + 1), message: e.to_string() })?;
        let p = space.point_from_ambient(&coords).map_err(|e| match e {
            Error::UnsupportedGeometry(_) => e,
            other => Error::Parse { location: format!("{} line {}", path.display(), i + 1), message: other.to_string() },
        })?;
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::Input(format!("{} contains no points", path.display())));
    }
    Ok(points)
}
