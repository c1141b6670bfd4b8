use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::NodeSet;
use crate::linalg::{complex_eigenvalues, eigenvalues, Matrix};
use crate::operator::{
    assemble, periodic_operator, zero_neighbor_operator, CflReference, Discretization, ElementOperators, FluxWeight,
};
use crate::Result;

/// An eigenvalue counts as complex once |Im λ| exceeds this times (1 + |λ|).
pub const MERGE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryModel {
    /// Element is its own neighbour on both sides.
    Periodic,
    /// Neighbour data held at zero.
    ZeroNeighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Cfl,
    Omega,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub variable: SweepVariable,
    pub bc: BoundaryModel,
    pub values: Vec<f64>,
    /// Per sweep value, sorted by descending magnitude.
    pub eigenvalues: Vec<Vec<Complex64>>,
    pub max_abs: Vec<f64>,
    pub merge_point: Option<f64>,
}

fn recursion_matrix(ops: &ElementOperators, bc: BoundaryModel) -> Matrix {
    match bc {
        BoundaryModel::Periodic => periodic_operator(ops),
        BoundaryModel::ZeroNeighbor => zero_neighbor_operator(ops),
    }
}

fn sweep(
    variable: SweepVariable,
    bc: BoundaryModel,
    values: &[f64],
    build: impl Fn(f64) -> Result<ElementOperators> + Sync,
) -> Result<SpectrumReport> {
    let eigenvalues: Vec<Vec<Complex64>> = values
        .par_iter()
        .map(|&v| build(v).and_then(|ops| eigenvalues(&recursion_matrix(&ops, bc))).map_err(|e| e.at_cfl(v)))
        .collect::<Result<_>>()?;
    let max_abs = eigenvalues.iter().map(|l| l.iter().map(|z| z.norm()).fold(0.0, f64::max)).collect();
    let merge_point = values
        .iter()
        .zip(&eigenvalues)
        .find(|(_, l)| l.iter().any(|z| z.im.abs() > MERGE_THRESHOLD * (1.0 + z.norm())))
        .map(|(v, _)| *v);
    Ok(SpectrumReport { variable, bc, values: values.to_vec(), eigenvalues, max_abs, merge_point })
}

/// Recursion-matrix eigenvalues over a Courant grid.
pub fn spectrum_sweep(
    nodes: &NodeSet,
    dx: f64,
    flux: FluxWeight,
    bc: BoundaryModel,
    cfls: &[f64],
    cfl_ref: CflReference,
) -> Result<SpectrumReport> {
    sweep(SweepVariable::Cfl, bc, cfls, |cfl| {
        let disc = Discretization::new(nodes, 1.0, dx, cfl, cfl_ref, flux)?;
        assemble(nodes, &disc)
    })
}

/// Recursion-matrix eigenvalues over an ω grid at fixed Courant number.
pub fn spectrum_sweep_omega(
    nodes: &NodeSet,
    dx: f64,
    cfl: f64,
    cfl_ref: CflReference,
    bc: BoundaryModel,
    omegas: &[f64],
) -> Result<SpectrumReport> {
    sweep(SweepVariable::Omega, bc, omegas, |w| {
        let disc = Discretization::new(nodes, 1.0, dx, cfl, cfl_ref, FluxWeight::LaxFriedrichs(w))?;
        assemble(nodes, &disc)
    })
}

/// max over θ_e of the spectral radius of
/// G(θ_e) = N_prev·e^{−iθ_e} + N_self + N_next·e^{iθ_e}.
pub fn block_symbol_radius(ops: &ElementOperators, thetas: &[f64]) -> Result<f64> {
    let n = ops.n_self.rows();
    let mut radius: f64 = 0.0;
    for &t in thetas {
        let (em, ep) = (Complex64::from_polar(1.0, -t), Complex64::from_polar(1.0, t));
        let g: Vec<Complex64> = (0..n * n)
            .map(|i| {
                let (r, k) = (i / n, i % n);
                ops.n_prev[(r, k)] * em + ops.n_self[(r, k)] + ops.n_next[(r, k)] * ep
            })
            .collect();
        let rho = complex_eigenvalues(n, &g)?.first().map_or(0.0, |z| z.norm());
        radius = radius.max(rho);
    }
    Ok(radius)
}
