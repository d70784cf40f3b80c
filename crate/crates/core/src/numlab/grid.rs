use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::NumError;

/// Real samples on the uniform grid `x0, x0 + dx, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

fn check_spacing(x0: f64, dx: f64, len: usize) -> Result<(), NumError> {
    if !(dx > 0.0) || !dx.is_finite() || !x0.is_finite() {
        return Err(NumError::InvalidGrid(format!(
            "spacing {dx} at origin {x0}"
        )));
    }
    if len < 2 {
        return Err(NumError::InvalidGrid(format!(
            "{len} samples, need at least 2"
        )));
    }
    Ok(())
}

fn check_finite(name: &str, values: &[f64]) -> Result<(), NumError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(NumError::InvalidGrid(format!("{name}[{i}] is not finite"))),
        None => Ok(()),
    }
}

/// Index of `x` if it sits on the grid (up to rounding).
fn grid_index(x0: f64, dx: f64, len: usize, x: f64) -> Option<usize> {
    let s = (x - x0) / dx;
    let i = s.round();
    if (s - i).abs() > 1e-6 || i < 0.0 || i as usize >= len {
        return None;
    }
    Some(i as usize)
}

/// Four-point Lagrange interpolation of `values` at `x`.
fn interpolate(x0: f64, dx: f64, values: &[f64], x: f64) -> Result<f64, NumError> {
    let n = values.len();
    let hi = x0 + dx * (n - 1) as f64;
    let slack = 1e-9 * dx;
    if x < x0 - slack || x > hi + slack {
        return Err(NumError::OutOfWindow { x, lo: x0, hi });
    }
    let s = ((x - x0) / dx).clamp(0.0, (n - 1) as f64);
    if n < 4 {
        let i = (s.floor() as usize).min(n - 2);
        let w = s - i as f64;
        return Ok(values[i] * (1.0 - w) + values[i + 1] * w);
    }
    let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - base as f64;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut weight = 1.0;
        for k in 0..4 {
            if k != j {
                weight *= (t - k as f64) / (j as f64 - k as f64);
            }
        }
        acc += weight * values[base + j];
    }
    Ok(acc)
}

impl GridFunction {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self, NumError> {
        check_spacing(x0, dx, values.len())?;
        check_finite("value", &values)?;
        Ok(GridFunction { x0, dx, values })
    }

    /// Samples `f` at `n` points starting at `x0`.
    pub fn from_fn(x0: f64, dx: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self, NumError> {
        GridFunction::new(x0, dx, (0..n).map(|i| f(x0 + dx * i as f64)).collect())
    }

    /// Grid covering `[lo, hi]` with spacing close to `dx` hitting both ends.
    pub fn on_interval(
        lo: f64,
        hi: f64,
        dx: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, NumError> {
        let n = ((hi - lo) / dx).round() as usize + 1;
        GridFunction::from_fn(lo, dx, n, f)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-9 * self.dx;
        x >= self.x0 - slack && x <= self.x_end() + slack
    }

    pub fn index_of(&self, x: f64) -> Option<usize> {
        grid_index(self.x0, self.dx, self.len(), x)
    }

    pub fn at(&self, x: f64) -> Result<f64, NumError> {
        interpolate(self.x0, self.dx, &self.values, x)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoidal integral over the window.
    pub fn integral(&self) -> f64 {
        let n = self.len();
        let inner: f64 = self.values[1..n - 1].iter().sum();
        self.dx * (inner + 0.5 * (self.values[0] + self.values[n - 1]))
    }

    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Reads `x,value` rows; the grid must be uniform.
    pub fn read_csv(reader: impl Read) -> Result<Self, NumError> {
        let columns = read_columns(reader, 2)?;
        let (x0, dx) = uniform_spacing(&columns[0])?;
        GridFunction::new(x0, dx, columns[1].clone())
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<(), NumError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "value"]).map_err(csv_error)?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([self.x(i).to_string(), v.to_string()])
                .map_err(csv_error)?;
        }
        w.flush().map_err(|e| NumError::Csv(e.to_string()))
    }
}

/// Symmetric 2x2 Hamiltonian `[[f, g], [g, h]]` sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianGrid {
    pub x0: f64,
    pub dx: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl HamiltonianGrid {
    pub fn new(x0: f64, dx: f64, f: Vec<f64>, g: Vec<f64>, h: Vec<f64>) -> Result<Self, NumError> {
        check_spacing(x0, dx, f.len())?;
        if g.len() != f.len() || h.len() != f.len() {
            return Err(NumError::InvalidGrid(
                "columns f, g, h differ in length".into(),
            ));
        }
        check_finite("f", &f)?;
        check_finite("g", &g)?;
        check_finite("h", &h)?;
        Ok(HamiltonianGrid { x0, dx, f, g, h })
    }

    pub fn from_fn(
        x0: f64,
        dx: f64,
        n: usize,
        entries: impl Fn(f64) -> [f64; 3],
    ) -> Result<Self, NumError> {
        let (mut f, mut g, mut h) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for i in 0..n {
            let [a, b, c] = entries(x0 + dx * i as f64);
            f.push(a);
            g.push(b);
            h.push(c);
        }
        HamiltonianGrid::new(x0, dx, f, g, h)
    }

    pub fn on_interval(
        lo: f64,
        hi: f64,
        dx: f64,
        entries: impl Fn(f64) -> [f64; 3],
    ) -> Result<Self, NumError> {
        let n = ((hi - lo) / dx).round() as usize + 1;
        HamiltonianGrid::from_fn(lo, dx, n, entries)
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-9 * self.dx;
        x >= self.x0 - slack && x <= self.x_end() + slack
    }

    pub fn index_of(&self, x: f64) -> Option<usize> {
        grid_index(self.x0, self.dx, self.len(), x)
    }

    /// Interpolated `(f, g, h)` at `x`.
    pub fn at(&self, x: f64) -> Result<[f64; 3], NumError> {
        Ok([
            interpolate(self.x0, self.dx, &self.f, x)?,
            interpolate(self.x0, self.dx, &self.g, x)?,
            interpolate(self.x0, self.dx, &self.h, x)?,
        ])
    }

    /// `f h - g^2` at every grid point.
    pub fn determinant(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.f[i] * self.h[i] - self.g[i] * self.g[i])
            .collect()
    }

    /// Reads `x,f,g,h` rows; the grid must be uniform.
    pub fn read_csv(reader: impl Read) -> Result<Self, NumError> {
        let mut columns = read_columns(reader, 4)?;
        let (x0, dx) = uniform_spacing(&columns[0])?;
        let h = columns.pop().unwrap_or_default();
        let g = columns.pop().unwrap_or_default();
        let f = columns.pop().unwrap_or_default();
        HamiltonianGrid::new(x0, dx, f, g, h)
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<(), NumError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "f", "g", "h"]).map_err(csv_error)?;
        for i in 0..self.len() {
            w.write_record([
                self.x(i).to_string(),
                self.f[i].to_string(),
                self.g[i].to_string(),
                self.h[i].to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush().map_err(|e| NumError::Csv(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> NumError {
    NumError::Csv(e.to_string())
}

fn read_columns(reader: impl Read, width: usize) -> Result<Vec<Vec<f64>>, NumError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut columns = vec![Vec::new(); width];
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        if record.len() != width {
            return Err(NumError::Csv(format!(
                "row {}: expected {width} columns, found {}",
                line + 2,
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| NumError::Csv(format!("row {}: bad number {field:?}", line + 2)))?;
            columns[col].push(v);
        }
    }
    Ok(columns)
}

fn uniform_spacing(xs: &[f64]) -> Result<(f64, f64), NumError> {
    if xs.len() < 2 {
        return Err(NumError::InvalidGrid(format!(
            "{} samples, need at least 2",
            xs.len()
        )));
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    for (i, x) in xs.iter().enumerate() {
        let expected = xs[0] + dx * i as f64;
        if (x - expected).abs() > 1e-6 * dx.abs().max(f64::MIN_POSITIVE) {
            return Err(NumError::InvalidGrid(format!(
                "x[{i}] = {x} breaks uniform spacing"
            )));
        }
    }
    Ok((xs[0], dx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_for_cubics() {
        let g = GridFunction::from_fn(-1.0, 0.1, 21, |x| x * x * x - 2.0 * x).unwrap();
        for &x in &[-0.95, -0.33, 0.0, 0.47, 0.99] {
            let want = x * x * x - 2.0 * x;
            assert!((g.at(x).unwrap() - want).abs() < 1e-12);
        }
        assert!(matches!(g.at(1.5), Err(NumError::OutOfWindow { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let g = GridFunction::from_fn(-2.0, 0.25, 17, |x| x.sin()).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = GridFunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), g.len());
        assert!(back.sup_distance(&g) == 0.0);
        assert!((back.dx - 0.25).abs() < 1e-15);

        let h = HamiltonianGrid::from_fn(0.0, 0.5, 5, |x| [1.0 + x, 0.1, 2.0]).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(HamiltonianGrid::read_csv(buf.as_slice()).unwrap(), h);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(0.0, -1.0, vec![0.0, 1.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![0.0, f64::NAN]).is_err());
        let text = "x,value\n0,1\n1,1\n3,1\n";
        assert!(GridFunction::read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn integral_of_linear() {
        let g = GridFunction::on_interval(0.0, 2.0, 0.01, |x| x).unwrap();
        assert!((g.integral() - 2.0).abs() < 1e-12);
        assert_eq!(g.index_of(1.0), Some(100));
        assert_eq!(g.index_of(1.005), None);
    }
}
