//! Time stepping on a periodic mesh of K equal elements covering [0, 1].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{eval_monomial, make_nodes, NodeKind, NodeSet};
use crate::linalg::Lu;
use crate::operator::{assemble, CflReference, Discretization, ElementOperators, FluxWeight};
use crate::{Error, Result};

/// Any |Q| above this aborts the run.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Target number of norm samples per run (plus the endpoints).
const HISTORY_SAMPLES: usize = 256;

const QUADRATURE_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub elements: usize,
    pub dx: f64,
    pub nodeset: NodeSet,
}

impl Mesh {
    pub fn new(elements: usize, nodeset: NodeSet) -> Result<Self> {
        if elements == 0 {
            return Err(Error::InvalidDiscretization("mesh needs at least one element".into()));
        }
        Ok(Self { elements, dx: 1.0 / elements as f64, nodeset })
    }

    pub fn center(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dx
    }

    pub fn node_x(&self, k: usize, m: usize) -> f64 {
        self.center(k) + self.nodeset.nodes[m] * self.dx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimState {
    pub t: f64,
    /// q[k][m]: value at node m of element k.
    pub q: Vec<Vec<f64>>,
    pub steps: usize,
}

impl SimState {
    pub fn sample(mesh: &Mesh, t: f64, f: impl Fn(f64) -> f64) -> Self {
        let q = (0..mesh.elements).map(|k| (0..mesh.nodeset.len()).map(|m| f(mesh.node_x(k, m))).collect()).collect();
        Self { t, q, steps: 0 }
    }

    fn max_abs(&self) -> f64 {
        self.q.iter().flatten().fold(0.0, |acc: f64, v| if v.is_finite() { acc.max(v.abs()) } else { f64::INFINITY })
    }
}

pub fn exact_sine(x: f64, t: f64, a: f64) -> f64 {
    (2.0 * PI * (x - a * t)).sin()
}

pub fn init_sine(mesh: &Mesh) -> SimState {
    SimState::sample(mesh, 0.0, |x| exact_sine(x, 0.0, 1.0))
}

/// Advance all elements by one step with periodic wraparound.
pub fn step(state: &SimState, ops: &ElementOperators) -> Result<SimState> {
    let next = step_unchecked(state, ops);
    if next.max_abs() > DIVERGENCE_THRESHOLD {
        return Err(Error::DivergenceDetected { step: next.steps, t: next.t, history: Vec::new() });
    }
    Ok(next)
}

fn step_unchecked(state: &SimState, ops: &ElementOperators) -> SimState {
    let k_count = state.q.len();
    let q = (0..k_count)
        .map(|k| {
            let prev = &state.q[(k + k_count - 1) % k_count];
            let next = &state.q[(k + 1) % k_count];
            let mut out = ops.n_prev.mul_vec(prev);
            ops.n_self.mul_vec_add(&state.q[k], &mut out);
            ops.n_next.mul_vec_add(next, &mut out);
            out
        })
        .collect();
    SimState { t: state.t + ops.disc.dt, q, steps: state.steps + 1 }
}

/// Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Roots of P_n by Newton iteration from Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Integrals of the element polynomials, computed from monomial coefficients.
struct Reconstruction {
    lu: Lu,
    rule: GaussLegendre,
}

impl Reconstruction {
    fn new(mesh: &Mesh) -> Result<Self> {
        Ok(Self { lu: Lu::factor(&mesh.nodeset.vandermonde())?, rule: GaussLegendre::new(QUADRATURE_POINTS) })
    }

    fn l2_error(&self, mesh: &Mesh, state: &SimState, exact: &dyn Fn(f64) -> f64) -> f64 {
        let mut sum = 0.0;
        for (k, qk) in state.q.iter().enumerate() {
            let c = self.lu.solve(qk);
            for (xi, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let chi = 0.5 * xi;
                let e = eval_monomial(&c, chi) - exact(mesh.center(k) + chi * mesh.dx);
                sum += 0.5 * w * e * e * mesh.dx;
            }
        }
        sum.sqrt()
    }

    fn mass(&self, mesh: &Mesh, state: &SimState) -> f64 {
        state
            .q
            .iter()
            .map(|qk| {
                let c = self.lu.solve(qk);
                // ∫_{−½}^{½} χ^j dχ vanishes for odd j.
                let integral: f64 = c
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j % 2 == 0)
                    .map(|(j, cj)| cj * 0.5f64.powi(j as i32) / (j as f64 + 1.0))
                    .sum();
                integral * mesh.dx
            })
            .sum()
    }
}

/// L2 distance between the element polynomials and `exact` on [0, 1].
pub fn l2_error(mesh: &Mesh, state: &SimState, exact: impl Fn(f64) -> f64) -> Result<f64> {
    Ok(Reconstruction::new(mesh)?.l2_error(mesh, state, &exact))
}

/// Σ_k ∫ Q_k dx.
pub fn mass(mesh: &Mesh, state: &SimState) -> Result<f64> {
    Ok(Reconstruction::new(mesh)?.mass(mesh, state))
}

/// Root mean square of the nodal errors.
pub fn nodal_rms_error(mesh: &Mesh, state: &SimState, exact: impl Fn(f64) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0;
    for (k, qk) in state.q.iter().enumerate() {
        for (m, v) in qk.iter().enumerate() {
            let e = v - exact(mesh.node_x(k, m));
            sum += e * e;
            count += 1;
        }
    }
    (sum / count as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub degree: usize,
    pub kind: NodeKind,
    pub elements: usize,
    pub cfl: f64,
    pub cfl_ref: CflReference,
    pub flux: FluxWeight,
    pub t_end: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub mesh: Mesh,
    pub l2_error: f64,
    pub nodal_rms_error: f64,
    pub initial_mass: f64,
    pub mass: f64,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// (t, L2 norm of Q), strictly increasing in t.
    pub norm_history: Vec<(f64, f64)>,
    pub cond_vstar: f64,
    pub steps: usize,
    pub dt: f64,
    pub nu: f64,
    pub omega_resolved: f64,
    pub final_state: SimState,
}

/// Full steps plus, if needed, one shortened step that lands on t_end.
fn step_plan(t_end: f64, dt: f64) -> (usize, f64) {
    if dt <= 0.0 || t_end <= 0.0 {
        return (0, 0.0);
    }
    let ratio = t_end / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        return (rounded as usize, 0.0);
    }
    let n = ratio.floor() as usize;
    (n, t_end - n as f64 * dt)
}

pub fn run(config: &RunConfig) -> Result<RunReport> {
    if !(config.t_end >= 0.0 && config.t_end.is_finite()) {
        return Err(Error::InvalidDiscretization(format!("t_end = {}", config.t_end)));
    }
    let nodeset = make_nodes(config.degree, config.kind)?;
    let mesh = Mesh::new(config.elements, nodeset.clone())?;
    let disc = Discretization::new(&nodeset, config.a, mesh.dx, config.cfl, config.cfl_ref, config.flux)?;
    if !(disc.dt > 0.0) {
        return Err(Error::InvalidDiscretization("cfl must be positive for a run".into()));
    }
    let ops = assemble(&nodeset, &disc)?;
    let recon = Reconstruction::new(&mesh)?;
    let zero = |_: f64| 0.0;

    let (n_full, remainder) = step_plan(config.t_end, disc.dt);
    let total = n_full + usize::from(remainder > 0.0);
    let stride = total.div_ceil(HISTORY_SAMPLES).max(1);

    let mut state = init_sine(&mesh);
    let initial_norm = recon.l2_error(&mesh, &state, &zero);
    let initial_mass = recon.mass(&mesh, &state);
    let mut history = vec![(0.0, initial_norm)];

    // One step landing at `t`; on divergence the history gains the final
    // sample and moves into the error.
    let mut advance = |state: &SimState, ops: &ElementOperators, t: f64, record: bool| -> Result<SimState> {
        let mut next = step_unchecked(state, ops);
        next.t = t;
        let norm = || recon.l2_error(&mesh, &next, &zero);
        if next.max_abs() > DIVERGENCE_THRESHOLD {
            history.push((t, norm()));
            return Err(Error::DivergenceDetected { step: next.steps, t, history: std::mem::take(&mut history) });
        }
        if record {
            history.push((t, norm()));
        }
        Ok(next)
    };

    for n in 1..=n_full {
        state = advance(&state, &ops, n as f64 * disc.dt, n % stride == 0 || n == total)?;
    }
    if remainder > 0.0 {
        let short =
            Discretization::with_time_step(&nodeset, config.a, mesh.dx, remainder, config.cfl_ref, config.flux)?;
        state = advance(&state, &assemble(&nodeset, &short)?, config.t_end, true)?;
    }

    let exact = |x: f64| exact_sine(x, config.t_end, config.a);
    Ok(RunReport {
        config: config.clone(),
        l2_error: recon.l2_error(&mesh, &state, &exact),
        nodal_rms_error: nodal_rms_error(&mesh, &state, exact),
        initial_mass,
        mass: recon.mass(&mesh, &state),
        initial_norm,
        final_norm: history.last().map_or(initial_norm, |h| h.1),
        norm_history: history,
        cond_vstar: ops.cond_vstar,
        steps: state.steps,
        dt: disc.dt,
        nu: disc.nu(),
        omega_resolved: disc.omega_effective(),
        final_state: state,
        mesh,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub elements: usize,
    pub degree: usize,
    pub l2_error: f64,
    pub nodal_rms_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of log(error) against log(1/K).
    pub order: f64,
}

/// Runs `base` once per element count (in parallel) and fits the order.
pub fn convergence_study(base: &RunConfig, elements: &[usize]) -> Result<ConvergenceTable> {
    let rows = elements
        .par_iter()
        .map(|&k| {
            let report = run(&RunConfig { elements: k, ..base.clone() })?;
            Ok(ConvergenceRow {
                elements: k,
                degree: base.degree,
                l2_error: report.l2_error,
                nodal_rms_error: report.nodal_rms_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| ((1.0 / r.elements as f64).ln(), r.l2_error.ln())).collect();
    Ok(ConvergenceTable { order: least_squares_slope(&points), rows })
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
