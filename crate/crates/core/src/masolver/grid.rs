//! Periodic grids on the unit torus and real sample fields over them.
//!
//! Real axes are ordered `(Re z_1, Im z_1, Re z_2, Im z_2, ...)` and samples are
//! row-major with the last axis varying fastest.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, ParseError, Result};

/// Upper bound on `res^(2d)` for a full grid.
pub const MAX_GRID_POINTS: usize = 1 << 24;
/// Upper bound on the number of points a solve may allocate.
pub const MAX_SOLVE_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusGrid {
    dim: usize,
    res: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, res: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Grid(format!("complex dimension {dim} outside 1..=3")));
        }
        if res < 8 || !res.is_power_of_two() {
            return Err(Error::Grid(format!("res {res} must be a power of two >= 8")));
        }
        let total = (res as u128).pow(2 * dim as u32);
        if total > MAX_GRID_POINTS as u128 {
            return Err(Error::Grid(format!(
                "res^{} = {total} exceeds the cap of {MAX_GRID_POINTS} points",
                2 * dim
            )));
        }
        Ok(TorusGrid { dim, res })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn axes(&self) -> usize {
        2 * self.dim
    }

    pub fn full_shape(&self) -> Vec<usize> {
        vec![self.res; self.axes()]
    }
}

/// Real samples on a grid whose axes have length `res` or `1`.
///
/// A length-one axis means the field is constant along it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: TorusGrid, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if shape.len() != grid.axes() {
            return Err(Error::Grid(format!(
                "shape has {} axes, grid has {}",
                shape.len(),
                grid.axes()
            )));
        }
        if let Some(&n) = shape.iter().find(|&&n| n != 1 && n != grid.res()) {
            return Err(Error::Grid(format!(
                "axis length {n} must be 1 or {}",
                grid.res()
            )));
        }
        let len: usize = shape.iter().product();
        if len != values.len() {
            return Err(Error::Grid(format!(
                "{} samples for shape {shape:?}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite sample".into()));
        }
        Ok(ScalarField { grid, shape, values })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        let shape = vec![1; grid.axes()];
        ScalarField { grid, shape, values: vec![0.0] }
    }

    /// Samples `sum_k Re(a_k exp(2 pi i k.x))` on the smallest shape that holds every mode.
    pub fn from_modes(grid: TorusGrid, modes: &[FourierMode]) -> Result<Self> {
        let axes = grid.axes();
        let half = (grid.res() / 2) as i64;
        let mut shape = vec![1; axes];
        for m in modes {
            if m.k.len() != axes {
                return Err(Error::Grid(format!(
                    "mode has {} indices, grid has {axes} axes",
                    m.k.len()
                )));
            }
            for (a, &k) in m.k.iter().enumerate() {
                if k.abs() >= half {
                    return Err(Error::Grid(format!(
                        "mode index {k} is not resolved at res {}",
                        grid.res()
                    )));
                }
                if k != 0 {
                    shape[a] = grid.res();
                }
            }
        }
        let len: usize = shape.iter().product();
        let mut values = vec![0.0; len];
        let mut x = vec![0.0; axes];
        for (idx, v) in values.iter_mut().enumerate() {
            coords(idx, &shape, &mut x);
            *v = modes
                .iter()
                .map(|m| {
                    let t: f64 = m.k.iter().zip(&x).map(|(&k, &xa)| k as f64 * xa).sum();
                    (m.amp * Complex64::from_polar(1.0, 2.0 * PI * t)).re
                })
                .sum();
        }
        ScalarField::new(grid, shape, values)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Collapses every axis along which the samples are constant.
    pub fn compact(&self) -> ScalarField {
        let mut out = self.clone();
        for a in 0..out.shape.len() {
            if out.shape[a] > 1 && out.constant_along(a) {
                out = out.drop_axis(a);
            }
        }
        out
    }

    /// Samples over `shape`, broadcasting length-one axes.
    pub fn broadcast(&self, shape: &[usize]) -> Result<ScalarField> {
        if shape.len() != self.shape.len()
            || shape
                .iter()
                .zip(&self.shape)
                .any(|(&n, &m)| m != 1 && m != n)
        {
            return Err(Error::Grid(format!(
                "cannot broadcast {:?} to {shape:?}",
                self.shape
            )));
        }
        let len: usize = shape.iter().product();
        let mut values = Vec::with_capacity(len);
        let mut ix = vec![0; shape.len()];
        for idx in 0..len {
            unravel(idx, shape, &mut ix);
            let mut src = 0;
            for (a, &m) in self.shape.iter().enumerate() {
                src = src * m + if m == 1 { 0 } else { ix[a] };
            }
            values.push(self.values[src]);
        }
        ScalarField::new(self.grid.clone(), shape.to_vec(), values)
    }

    /// Largest pointwise difference after broadcasting both to a common shape.
    pub fn max_diff(&self, other: &ScalarField) -> Result<f64> {
        let shape: Vec<usize> = self
            .shape
            .iter()
            .zip(&other.shape)
            .map(|(&a, &b)| a.max(b))
            .collect();
        let a = self.broadcast(&shape)?;
        let b = other.broadcast(&shape)?;
        Ok(a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn map_values(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            shape: self.shape.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn constant_along(&self, axis: usize) -> bool {
        let n = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        self.values.chunks(n * inner).all(|block| {
            (1..n).all(|j| block[j * inner..(j + 1) * inner] == block[..inner])
        })
    }

    fn drop_axis(&self, axis: usize) -> ScalarField {
        let n = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let values = self
            .values
            .chunks(n * inner)
            .flat_map(|block| block[..inner].iter().copied())
            .collect();
        let mut shape = self.shape.clone();
        shape[axis] = 1;
        ScalarField {
            grid: self.grid.clone(),
            shape,
            values,
        }
    }

    /// `shape n_0 .. n_{2d-1}` on the first line, then the samples.
    pub fn to_text(&self) -> String {
        let mut out = String::from("shape");
        for n in &self.shape {
            out.push_str(&format!(" {n}"));
        }
        out.push('\n');
        for row in self.values.chunks(*self.shape.last().unwrap_or(&1)) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// One term `Re(amp exp(2 pi i k.x))` of a trigonometric polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMode {
    pub k: Vec<i64>,
    pub amp: Complex64,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_f64(tok: &str, line: usize) -> std::result::Result<f64, ParseError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| ParseError::at(line, format!("bad number `{tok}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ParseError::at(line, format!("non-finite number `{tok}`")))
    }
}

/// Lines `mode k_1 .. k_2d re im`; every line must carry the same number of indices.
pub fn parse_modes(text: &str) -> std::result::Result<Vec<FourierMode>, ParseError> {
    let mut modes = Vec::new();
    let mut axes = None;
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks[0] != "mode" {
            return Err(ParseError::at(line, format!("unknown directive `{}`", toks[0])));
        }
        if toks.len() < 5 || (toks.len() - 3) % 2 != 0 {
            return Err(ParseError::at(
                line,
                "expected `mode k_1 .. k_2d re im` with an even number of indices",
            ));
        }
        let k = toks[1..toks.len() - 2]
            .iter()
            .map(|t| {
                t.parse::<i64>()
                    .ok()
                    .filter(|v| v.abs() <= 1 << 20)
                    .ok_or_else(|| ParseError::at(line, format!("bad mode index `{t}`")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if *axes.get_or_insert(k.len()) != k.len() {
            return Err(ParseError::at(line, "mode index count differs from earlier lines"));
        }
        let re = parse_f64(toks[toks.len() - 2], line)?;
        let im = parse_f64(toks[toks.len() - 1], line)?;
        modes.push(FourierMode {
            k,
            amp: Complex64::new(re, im),
        });
    }
    if modes.is_empty() {
        return Err(ParseError::msg("no modes"));
    }
    Ok(modes)
}

/// Sample file: `shape n_0 .. n_{m-1}` followed by `prod n_a` numbers.
pub fn parse_samples(text: &str) -> std::result::Result<(Vec<usize>, Vec<f64>), ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| ParseError::msg("empty sample file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks[0] != "shape" || toks.len() < 2 {
        return Err(ParseError::at(hline, "expected `shape n_0 .. n_{m-1}`"));
    }
    let shape = toks[1..]
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| ParseError::at(hline, format!("bad axis length `{t}`")))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let total = shape
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n).filter(|&t| t <= MAX_GRID_POINTS))
        .ok_or_else(|| ParseError::at(hline, "sample count exceeds the grid cap"))?;
    let mut values = Vec::with_capacity(total);
    let mut last = hline;
    for (line, l) in lines {
        last = line;
        for t in l.split_whitespace() {
            if values.len() == total {
                return Err(ParseError::at(line, format!("more than {total} samples")));
            }
            values.push(parse_f64(t, line)?);
        }
    }
    if values.len() != total {
        return Err(ParseError::at(
            last,
            format!("{} samples, shape needs {total}", values.len()),
        ));
    }
    Ok((shape, values))
}

/// Builds a field from a parsed sample file, checking it against `grid`.
pub fn field_from_samples(grid: TorusGrid, text: &str) -> Result<ScalarField> {
    let (shape, values) = parse_samples(text)?;
    ScalarField::new(grid, shape, values)
}

pub(crate) fn unravel(mut idx: usize, shape: &[usize], out: &mut [usize]) {
    for a in (0..shape.len()).rev() {
        out[a] = idx % shape[a];
        idx /= shape[a];
    }
}

fn coords(idx: usize, shape: &[usize], x: &mut [f64]) {
    let mut ix = vec![0; shape.len()];
    unravel(idx, shape, &mut ix);
    for a in 0..shape.len() {
        x[a] = ix[a] as f64 / shape[a] as f64;
    }
}

/// Multi-dimensional FFT over a fixed shape.
pub(crate) struct FftNd {
    shape: Vec<usize>,
    fwd: Vec<Arc<dyn Fft<f64>>>,
    inv: Vec<Arc<dyn Fft<f64>>>,
}

impl FftNd {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        FftNd {
            shape: shape.to_vec(),
            fwd: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inv: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    /// Forward transform scaled by `1/N`, so coefficient 0 is the mean.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        let total = self.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        for (a, &n) in self.shape.iter().enumerate() {
            if n == 1 {
                continue;
            }
            let inner: usize = self.shape[a + 1..].iter().product();
            let outer = total / (n * inner);
            for o in 0..outer {
                for i in 0..inner {
                    let line = (o * inner + i) * n;
                    for j in 0..n {
                        buf[line + j] = data[o * n * inner + j * inner + i];
                    }
                }
            }
            plans[a].process(&mut buf);
            for o in 0..outer {
                for i in 0..inner {
                    let line = (o * inner + i) * n;
                    for j in 0..n {
                        data[o * n * inner + j * inner + i] = buf[line + j];
                    }
                }
            }
        }
    }
}

/// Signed wavenumber of index `i` on an axis of length `n`; `None` at Nyquist.
pub(crate) fn wavenumber(i: usize, n: usize) -> Option<i64> {
    if n == 1 {
        Some(0)
    } else if 2 * i == n {
        None
    } else if 2 * i < n {
        Some(i as i64)
    } else {
        Some(i as i64 - n as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_limits() {
        assert!(TorusGrid::new(2, 64).is_ok());
        assert!(TorusGrid::new(2, 4).is_err());
        assert!(TorusGrid::new(1, 24).is_err());
        assert!(TorusGrid::new(3, 32).is_err());
        assert!(TorusGrid::new(3, 8).is_ok());
    }

    #[test]
    fn modes_collapse_unused_axes() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let f = ScalarField::from_modes(
            grid,
            &[FourierMode {
                k: vec![1, 0, 0, 0],
                amp: Complex64::new(0.1, 0.0),
            }],
        )
        .unwrap();
        assert_eq!(f.shape(), &[16, 1, 1, 1]);
        assert!((f.values()[4] - 0.1 * (2.0 * PI * 0.25).cos()).abs() < 1e-15);
        let full = f.broadcast(&[16, 16, 16, 16]).unwrap();
        assert_eq!(full.compact(), f);
    }

    #[test]
    fn text_formats() {
        let modes = parse_modes("# F\nmode 1 0 0 0 0.1 0\nmode 0 2 -1 0 0 0.5\n").unwrap();
        assert_eq!(modes[1].k, vec![0, 2, -1, 0]);
        assert_eq!(parse_modes("mode 1 0 0 1 0\n").unwrap_err().line, Some(1));
        assert_eq!(
            parse_modes("mode 1 0 1 0\nmode 1 0 0 0 1 0\n").unwrap_err().line,
            Some(2)
        );
        let grid = TorusGrid::new(1, 8).unwrap();
        let f = ScalarField::from_modes(
            grid.clone(),
            &[FourierMode {
                k: vec![1, -2],
                amp: Complex64::new(0.3, -0.2),
            }],
        )
        .unwrap();
        let back = field_from_samples(grid, &f.to_text()).unwrap();
        assert!(back.max_diff(&f).unwrap() < 1e-15);
        assert_eq!(parse_samples("shape 2 2\n1 2 3\n").unwrap_err().line, Some(2));
        assert!(parse_samples("shape 2\n1 2 3\n").is_err());
    }

    #[test]
    fn fft_round_trip() {
        let shape = [8, 1, 4];
        let fft = FftNd::new(&shape);
        let orig: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new(i as f64, (i * i % 7) as f64))
            .collect();
        let mut d = orig.clone();
        fft.forward(&mut d);
        let mean = orig.iter().sum::<Complex64>() / 32.0;
        assert!((d[0] - mean).norm() < 1e-12);
        fft.inverse(&mut d);
        assert!(d.iter().zip(&orig).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}
