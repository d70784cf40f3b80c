use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use zerocurve::numlab::{GridFunction, HamiltonianGrid};

use crate::report::GridParams;

/// Smallest accepted number of grid samples.
pub const MIN_GRID: usize = 16;

fn check_size(n: usize, path: &Path) -> Result<()> {
    if n < MIN_GRID {
        bail!("{}: {n} samples, need at least {MIN_GRID}", path.display());
    }
    Ok(())
}

pub fn read_potential(path: &Path) -> Result<GridFunction> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let v = GridFunction::read_csv(file).with_context(|| format!("reading {}", path.display()))?;
    check_size(v.len(), path)?;
    Ok(v)
}

pub fn read_hamiltonian(path: &Path) -> Result<HamiltonianGrid> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let h = HamiltonianGrid::read_csv(file).with_context(|| format!("reading {}", path.display()))?;
    check_size(h.len(), path)?;
    Ok(h)
}

pub fn potential_params(v: &GridFunction) -> GridParams {
    GridParams { x0: v.x0, dx: v.dx, n: v.len() }
}

pub fn hamiltonian_params(h: &HamiltonianGrid) -> GridParams {
    GridParams { x0: h.x0, dx: h.dx, n: h.len() }
}

/// Parses `re,im` (or a bare real number).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{text}` is not `re,im`"));
    match text.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(text)?, 0.0)),
    }
}

pub fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}
