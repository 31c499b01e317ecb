//! Spectral Newton solver for `det(g + Hess phi) / det g = C e^F` on flat tori.
//!
//! `Hess phi` is the complex Hessian `d^2 phi / dz_j dz̄_k`; `C = 1/mean(e^F)` is
//! the constant forced by integrating both sides over the torus.

mod grid;

pub use grid::{
    field_from_samples, parse_modes, parse_samples, FourierMode, ScalarField, TorusGrid,
    MAX_GRID_POINTS, MAX_SOLVE_POINTS,
};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use grid::{unravel, wavenumber, FftNd};

type C64 = Complex64;
const ZERO: C64 = C64::new(0.0, 0.0);
const MAX_HALVINGS: usize = 30;
const CONTINUATION_LEVELS: usize = 4;

/// Constant Hermitian coefficients `g_{jk̄}` of the background form.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatMetric {
    g: DMatrix<C64>,
    det: f64,
}

impl FlatMetric {
    pub fn new(g: DMatrix<C64>) -> Result<Self> {
        let d = g.nrows();
        if d == 0 || g.ncols() != d {
            return Err(Error::InvalidMetric("gram must be square and nonempty".into()));
        }
        if (&g - g.adjoint()).iter().any(|v| v.norm() > 1e-12) {
            return Err(Error::InvalidMetric("gram is not Hermitian".into()));
        }
        let min = g.clone().symmetric_eigenvalues().min();
        if min <= 0.0 {
            return Err(Error::InvalidMetric(format!(
                "gram is not positive definite (min eigenvalue {min:e})"
            )));
        }
        let det = g.determinant().re;
        Ok(FlatMetric { g, det })
    }

    pub fn identity(d: usize) -> Self {
        FlatMetric::new(DMatrix::identity(d, d)).expect("identity is a metric")
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.g
    }
}

/// Complex Hessian and related spectral operators over one shape.
struct Spectral {
    d: usize,
    fft: FftNd,
    /// `pi i (k_x - i k_y)` per complex axis, zero on unresolved modes.
    del: Vec<Vec<C64>>,
    resolved: Vec<bool>,
}

impl Spectral {
    fn new(d: usize, shape: &[usize]) -> Self {
        let n: usize = shape.iter().product();
        let mut del = vec![vec![ZERO; n]; d];
        let mut resolved = vec![true; n];
        let mut ix = vec![0; shape.len()];
        for idx in 0..n {
            unravel(idx, shape, &mut ix);
            let ks: Option<Vec<i64>> = ix
                .iter()
                .zip(shape)
                .map(|(&i, &len)| wavenumber(i, len))
                .collect();
            match ks {
                Some(ks) => {
                    for (j, row) in del.iter_mut().enumerate() {
                        let a = C64::new(ks[2 * j] as f64, -(ks[2 * j + 1] as f64));
                        row[idx] = C64::new(0.0, PI) * a;
                    }
                }
                None => resolved[idx] = false,
            }
        }
        Spectral {
            d,
            fft: FftNd::new(shape),
            del,
            resolved,
        }
    }

    fn len(&self) -> usize {
        self.resolved.len()
    }

    fn spectrum(&self, v: &[f64]) -> Vec<C64> {
        let mut h: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.fft.forward(&mut h);
        h
    }

    fn synth(&self, mut h: Vec<C64>) -> Vec<C64> {
        self.fft.inverse(&mut h);
        h
    }

    /// `d/dz_j` (or `d/dz̄_j`) applied to a spectrum.
    fn apply_del(&self, hat: &[C64], j: usize, bar: bool) -> Vec<C64> {
        hat.iter()
            .zip(&self.del[j])
            .map(|(&h, &s)| {
                let s = if bar { -s.conj() } else { s };
                h * s
            })
            .collect()
    }

    /// Upper-triangle entries `H_{jk}` for `j <= k`, row-major.
    fn hessian(&self, phi: &[f64]) -> Vec<Vec<C64>> {
        let hat = self.spectrum(phi);
        let mut out = Vec::new();
        for j in 0..self.d {
            let dj = self.apply_del(&hat, j, false);
            for k in j..self.d {
                out.push(self.synth(self.apply_del(&dj, k, true)));
            }
        }
        out
    }

    /// Removes the mean and every unresolved mode.
    fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut hat = self.spectrum(v);
        hat[0] = ZERO;
        for (h, &r) in hat.iter_mut().zip(&self.resolved) {
            if !r {
                *h = ZERO;
            }
        }
        self.synth(hat).iter().map(|z| z.re).collect()
    }
}

fn tri(d: usize, j: usize, k: usize) -> usize {
    // index of (j, k), j <= k, in the packed upper triangle
    j * d - j * (j + 1) / 2 + k
}

/// Pointwise `g + Hess phi`.
struct PointMatrices {
    d: usize,
    entries: Vec<Vec<C64>>,
}

impl PointMatrices {
    fn new(metric: &FlatMetric, hess: Vec<Vec<C64>>) -> Self {
        let d = metric.dim();
        let mut entries = hess;
        for j in 0..d {
            for k in j..d {
                let g = metric.g[(j, k)];
                entries[tri(d, j, k)].iter_mut().for_each(|v| *v += g);
            }
        }
        PointMatrices { d, entries }
    }

    fn len(&self) -> usize {
        self.entries[0].len()
    }

    fn at(&self, p: usize) -> [[C64; 3]; 3] {
        let mut m = [[ZERO; 3]; 3];
        for j in 0..self.d {
            m[j][j] = C64::new(self.entries[tri(self.d, j, j)][p].re, 0.0);
            for k in j + 1..self.d {
                let v = self.entries[tri(self.d, j, k)][p];
                m[j][k] = v;
                m[k][j] = v.conj();
            }
        }
        m
    }

    fn det(&self, p: usize) -> f64 {
        det3(&self.at(p), self.d)
    }

    /// Leading principal minors all positive.
    fn positive(&self, p: usize) -> bool {
        let m = self.at(p);
        (1..=self.d).all(|s| det3(&m, s) > 0.0)
    }

    fn min_eigenvalue(&self, p: usize) -> f64 {
        let m = self.at(p);
        let mat = DMatrix::from_fn(self.d, self.d, |j, k| m[j][k]);
        mat.symmetric_eigenvalues().min()
    }
}

/// Determinant of the leading `s x s` block; real for Hermitian input.
fn det3(m: &[[C64; 3]; 3], s: usize) -> f64 {
    match s {
        1 => m[0][0].re,
        2 => (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re,
        _ => (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            .re,
    }
}

/// Adjugate of the leading `s x s` block.
fn adj3(m: &[[C64; 3]; 3], s: usize) -> [[C64; 3]; 3] {
    let mut a = [[ZERO; 3]; 3];
    match s {
        1 => a[0][0] = C64::new(1.0, 0.0),
        2 => {
            a[0][0] = m[1][1];
            a[1][1] = m[0][0];
            a[0][1] = -m[0][1];
            a[1][0] = -m[1][0];
        }
        _ => {
            for (i, row) in a.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    // cofactor of entry (j, i)
                    let r: Vec<usize> = (0..3).filter(|&x| x != j).collect();
                    let c: Vec<usize> = (0..3).filter(|&x| x != i).collect();
                    let minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]];
                    *v = if (i + j) % 2 == 0 { minor } else { -minor };
                }
            }
        }
    }
    a
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaOptions {
    pub tol: f64,
    pub max_newton: usize,
    pub max_cg: usize,
    /// Starting iterate; zero when absent.
    pub initial: Option<ScalarField>,
}

impl Default for MaOptions {
    fn default() -> Self {
        MaOptions {
            tol: 1e-10,
            max_newton: 60,
            max_cg: 500,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaDiagnostics {
    /// Max-norm residual before each Newton step and after the last one.
    pub residual_history: Vec<f64>,
    pub cg_iterations: Vec<usize>,
    pub step_lengths: Vec<f64>,
    /// Successive residual ratios over the undamped tail.
    pub tail_ratios: Vec<f64>,
    /// Continuation levels used after a failed direct solve.
    pub restarts: usize,
    pub min_eigenvalue: f64,
    /// `|C mean(e^F) - mean(det(g + Hess phi)) / det g|`.
    pub conservation: f64,
    pub solve_shape: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaSolution {
    pub phi: ScalarField,
    pub c: f64,
    pub residual: f64,
    pub diagnostics: MaDiagnostics,
}

/// `C = 1 / mean(e^F)`.
pub fn normalizing_constant(f: &ScalarField) -> f64 {
    1.0 / f.map_values(f64::exp).mean()
}

struct Problem<'a> {
    spec: Spectral,
    metric: &'a FlatMetric,
    rhs: Vec<f64>,
}

struct State {
    phi: Vec<f64>,
    mats: PointMatrices,
    res: Vec<f64>,
    norm: f64,
    positive: bool,
}

impl Problem<'_> {
    fn state(&self, phi: Vec<f64>) -> State {
        let mats = PointMatrices::new(self.metric, self.spec.hessian(&phi));
        let det_g = self.metric.det();
        let res: Vec<f64> = (0..mats.len())
            .map(|p| mats.det(p) / det_g - self.rhs[p])
            .collect();
        let positive = (0..mats.len()).all(|p| mats.positive(p));
        let norm = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        State {
            phi,
            mats,
            res,
            norm,
            positive,
        }
    }

    /// `-Re sum_j D_j(adj_kj D̄_k v)` with pointwise adjugates.
    fn apply(&self, adj: &[Vec<C64>], v: &[f64]) -> Vec<f64> {
        let d = self.spec.d;
        let hat = self.spec.spectrum(v);
        let dbar: Vec<Vec<C64>> = (0..d)
            .map(|k| self.spec.synth(self.spec.apply_del(&hat, k, true)))
            .collect();
        let mut acc = vec![ZERO; self.spec.len()];
        for j in 0..d {
            let mut flux: Vec<C64> = (0..self.spec.len())
                .map(|p| (0..d).map(|k| adj[k * d + j][p] * dbar[k][p]).sum())
                .collect();
            self.spec.fft.forward(&mut flux);
            for (a, (f, s)) in acc.iter_mut().zip(flux.iter().zip(&self.spec.del[j])) {
                *a += f * s;
            }
        }
        self.spec.synth(acc).iter().map(|z| -z.re).collect()
    }

    /// Inverse of the operator with coefficients frozen at their means.
    fn precondition(&self, mean_adj: &[C64], v: &[f64]) -> Vec<f64> {
        let d = self.spec.d;
        let mut hat = self.spec.spectrum(v);
        for (idx, h) in hat.iter_mut().enumerate() {
            let mut sym = ZERO;
            for j in 0..d {
                for k in 0..d {
                    let dbar = -self.spec.del[k][idx].conj();
                    sym += mean_adj[k * d + j] * self.spec.del[j][idx] * dbar;
                }
            }
            let s = -sym.re;
            *h = if idx == 0 || !self.spec.resolved[idx] || s <= 0.0 {
                ZERO
            } else {
                *h / s
            };
        }
        self.spec.synth(hat).iter().map(|z| z.re).collect()
    }

    /// Preconditioned CG for the Newton correction; returns the step and iteration count.
    fn newton_direction(&self, st: &State, rel_tol: f64, max_cg: usize) -> (Vec<f64>, usize) {
        let d = self.spec.d;
        let n = self.spec.len();
        let mut adj = vec![vec![ZERO; n]; d * d];
        for p in 0..n {
            let a = adj3(&st.mats.at(p), d);
            for j in 0..d {
                for k in 0..d {
                    adj[j * d + k][p] = a[j][k];
                }
            }
        }
        let mean_adj: Vec<C64> = adj
            .iter()
            .map(|f| f.iter().sum::<C64>() / n as f64)
            .collect();
        let det_g = self.metric.det();
        let b = self
            .spec
            .project(&st.res.iter().map(|r| r * det_g).collect::<Vec<_>>());
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let bnorm = dot(&b, &b).sqrt();
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return (x, 0);
        }
        let mut r = b.clone();
        let mut z = self.precondition(&mean_adj, &r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for it in 1..=max_cg {
            let ap = self.spec.project(&self.apply(&adj, &p));
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                return (x, it);
            }
            let alpha = rz / pap;
            x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.iter_mut().zip(&ap).for_each(|(ri, ai)| *ri -= alpha * ai);
            if dot(&r, &r).sqrt() <= rel_tol * bnorm {
                return (x, it);
            }
            z = self.precondition(&mean_adj, &r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        (x, max_cg)
    }
}

struct Attempt {
    phi: Vec<f64>,
    history: Vec<f64>,
    cg: Vec<usize>,
    steps: Vec<f64>,
}

fn newton(
    prob: &Problem,
    phi0: Vec<f64>,
    opts: &MaOptions,
) -> std::result::Result<Attempt, (Attempt, String)> {
    let mut st = prob.state(phi0);
    let mut att = Attempt {
        phi: Vec::new(),
        history: vec![st.norm],
        cg: Vec::new(),
        steps: Vec::new(),
    };
    if !st.positive {
        att.phi = st.phi;
        return Err((att, "initial iterate is not positive".into()));
    }
    for _ in 0..opts.max_newton {
        if st.norm <= opts.tol {
            att.phi = st.phi;
            return Ok(att);
        }
        let forcing = st.norm.min(1e-2).max(1e-14);
        let (dir, its) = prob.newton_direction(&st, forcing, opts.max_cg);
        att.cg.push(its);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = st.phi.iter().zip(&dir).map(|(p, d)| p + t * d).collect();
            let cand = prob.state(trial);
            if cand.positive && cand.norm < st.norm {
                accepted = Some(cand);
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some(next) => {
                st = next;
                att.steps.push(t);
                att.history.push(st.norm);
            }
            None => {
                att.phi = st.phi;
                let reason = format!(
                    "line search found no decreasing positive step at residual {:.3e}",
                    st.norm
                );
                return Err((att, reason));
            }
        }
    }
    if st.norm <= opts.tol {
        att.phi = st.phi;
        return Ok(att);
    }
    let reason = format!("residual {:.3e} above tol {:.3e}", st.norm, opts.tol);
    att.phi = st.phi;
    Err((att, reason))
}

/// Solves `det(g + Hess phi)/det g = C e^F` with `sup phi = 0`.
pub fn solve_ma(f: &ScalarField, metric: &FlatMetric, opts: &MaOptions) -> Result<MaSolution> {
    let d = f.grid().dim();
    if metric.dim() != d {
        return Err(Error::DimensionMismatch(metric.dim(), d));
    }
    if !(opts.tol >= 1e-12) {
        return Err(Error::Grid(format!("tol {:e} below 1e-12", opts.tol)));
    }
    let f = f.compact();
    let init = match &opts.initial {
        Some(i) if i.grid() != f.grid() => {
            return Err(Error::Grid("initial iterate lives on another grid".into()))
        }
        Some(i) => i.compact(),
        None => ScalarField::zeros(f.grid().clone()),
    };
    let shape: Vec<usize> = f
        .shape()
        .iter()
        .zip(init.shape())
        .map(|(&a, &b)| a.max(b))
        .collect();
    let points: usize = shape.iter().product();
    if points > MAX_SOLVE_POINTS {
        return Err(Error::Grid(format!(
            "solve needs {points} points, cap is {MAX_SOLVE_POINTS}"
        )));
    }
    let fb = f.broadcast(&shape)?;
    let c = normalizing_constant(&fb);
    let spec = Spectral::new(d, &shape);
    let phi0 = init.broadcast(&shape)?.values().to_vec();

    let target = |scale: f64| -> Vec<f64> {
        let cs = 1.0 / fb.values().iter().map(|v| (scale * v).exp()).sum::<f64>()
            * fb.len() as f64;
        fb.values().iter().map(|v| cs * (scale * v).exp()).collect()
    };
    let mut prob = Problem {
        spec,
        metric,
        rhs: target(1.0),
    };

    let mut restarts = 0;
    let mut cg = Vec::new();
    let mut steps = Vec::new();
    let att = match newton(&prob, phi0.clone(), opts) {
        Ok(a) => a,
        Err((_, first_reason)) => {
            let mut last = Err(first_reason);
            for level in 1..=CONTINUATION_LEVELS {
                restarts = level;
                let parts = 1usize << level;
                let mut phi = phi0.clone();
                let mut ok = true;
                cg.clear();
                steps.clear();
                for s in 1..=parts {
                    prob.rhs = target(s as f64 / parts as f64);
                    match newton(&prob, phi, opts) {
                        Ok(a) => {
                            cg.extend(&a.cg);
                            steps.extend(&a.steps);
                            phi = a.phi.clone();
                            if s == parts {
                                last = Ok(a);
                            }
                        }
                        Err((_, reason)) => {
                            ok = false;
                            last = Err(format!(
                                "continuation level {level}, stage {s}/{parts}: {reason}"
                            ));
                            break;
                        }
                    }
                }
                if ok {
                    break;
                }
            }
            match last {
                Ok(a) => a,
                Err(reason) => {
                    return Err(Error::MaFailure {
                        iterations: opts.max_newton,
                        reason,
                    })
                }
            }
        }
    };

    let mut phi = att.phi.clone();
    let top = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    phi.iter_mut().for_each(|v| *v -= top);
    let final_state = prob.state(phi.clone());
    let det_g = metric.det();
    let mean_vol = (0..final_state.mats.len())
        .map(|p| final_state.mats.det(p))
        .sum::<f64>()
        / points as f64
        / det_g;
    let mean_ef = fb.map_values(f64::exp).mean();
    let min_eigenvalue = (0..final_state.mats.len())
        .map(|p| final_state.mats.min_eigenvalue(p))
        .fold(f64::INFINITY, f64::min);
    let history = att.history.clone();
    let first_full = att.steps.iter().rposition(|&t| t < 1.0).map_or(0, |i| i + 1);
    let tail_ratios = history[first_full..]
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let (cg_iterations, step_lengths) = if restarts == 0 {
        (att.cg, att.steps)
    } else {
        (cg, steps)
    };
    Ok(MaSolution {
        phi: ScalarField::new(f.grid().clone(), shape.clone(), phi)?,
        c,
        residual: final_state.norm,
        diagnostics: MaDiagnostics {
            residual_history: history,
            cg_iterations,
            step_lengths,
            tail_ratios,
            restarts,
            min_eigenvalue,
            conservation: (c * mean_ef - mean_vol).abs(),
            solve_shape: shape,
        },
    })
}

fn common(phi: &ScalarField, f: &ScalarField) -> Result<(Vec<usize>, ScalarField, ScalarField)> {
    if phi.grid() != f.grid() {
        return Err(Error::Grid("fields live on different grids".into()));
    }
    let shape: Vec<usize> = phi
        .shape()
        .iter()
        .zip(f.shape())
        .map(|(&a, &b)| a.max(b))
        .collect();
    if shape.iter().product::<usize>() > MAX_SOLVE_POINTS {
        return Err(Error::Grid("evaluation exceeds the point cap".into()));
    }
    let p = phi.broadcast(&shape)?;
    let q = f.broadcast(&shape)?;
    Ok((shape, p, q))
}

fn point_matrices(phi: &ScalarField, shape: &[usize], metric: &FlatMetric) -> Result<PointMatrices> {
    if metric.dim() != phi.grid().dim() {
        return Err(Error::DimensionMismatch(metric.dim(), phi.grid().dim()));
    }
    let spec = Spectral::new(metric.dim(), shape);
    Ok(PointMatrices::new(metric, spec.hessian(phi.values())))
}

/// `max |det(g + Hess phi) - C e^F det g| / det g` with `C = 1/mean(e^F)`.
pub fn residual(phi: &ScalarField, f: &ScalarField, metric: &FlatMetric) -> Result<f64> {
    let (shape, p, q) = common(&phi.compact(), &f.compact())?;
    let mats = point_matrices(&p, &shape, metric)?;
    let c = normalizing_constant(&q);
    Ok((0..mats.len())
        .map(|i| (mats.det(i) / metric.det() - c * q.values()[i].exp()).abs())
        .fold(0.0, f64::max))
}

/// Smallest eigenvalue of `g + Hess phi` over the grid.
pub fn positivity_check(phi: &ScalarField, metric: &FlatMetric) -> Result<f64> {
    let p = phi.compact();
    let shape = p.shape().to_vec();
    let mats = point_matrices(&p, &shape, metric)?;
    Ok((0..mats.len())
        .map(|i| mats.min_eigenvalue(i))
        .fold(f64::INFINITY, f64::min))
}
