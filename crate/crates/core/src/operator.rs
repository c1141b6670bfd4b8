//! One-step element operators.
//!
//! Within a step each element advects its monomial interpolant by ν = aΔt/Δx,
//! samples it back on the fixed nodes, and fits a degree-P polynomial by least
//! squares to those P+1 values plus the two interface values. The interface
//! value is G = w_l·Q^l + w_r·Q^r with w_{l,r} = (1 ± ων)/2, where Q^l and Q^r
//! are the advected traces from the left and right elements. Upwind is the
//! special case ω = 1/ν.
//!
//! The result is linear in the nodal vectors of the element and its two
//! neighbours: Q^{k,n+1} = N_prev·Q^{k−1,n} + N_self·Q^{k,n} + N_next·Q^{k+1,n}.

use serde::Serialize;

use crate::basis::{monomial_row, vandermonde, NodeKind, NodeSet};
use crate::linalg::{condition_estimate, Lu, Matrix};
use crate::{Error, Result};

/// Stencil weights smaller than this are dropped.
pub const STENCIL_DROP_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CflReference {
    /// Δt = cfl·d_min·Δx/a.
    MinSpacing,
    /// Δt = cfl·Δx/a.
    Element,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxWeight {
    Upwind,
    LaxFriedrichs(f64),
}

impl std::fmt::Display for FluxWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FluxWeight::Upwind => write!(f, "upwind"),
            FluxWeight::LaxFriedrichs(w) => write!(f, "{w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discretization {
    pub a: f64,
    pub dx: f64,
    pub dt: f64,
    /// Courant number in the `cfl_ref` convention.
    pub cfl: f64,
    pub cfl_ref: CflReference,
    pub flux: FluxWeight,
    nu: f64,
}

impl Discretization {
    /// Time step from the Courant number. `cfl = 0` is accepted as the
    /// degenerate step in which nothing moves.
    pub fn new(nodes: &NodeSet, a: f64, dx: f64, cfl: f64, cfl_ref: CflReference, flux: FluxWeight) -> Result<Self> {
        if !(cfl >= 0.0 && cfl.is_finite()) {
            return Err(Error::InvalidDiscretization(format!("cfl = {cfl}")));
        }
        let dt = cfl * reference_length(nodes, cfl_ref) * dx / a;
        Self::with_time_step(nodes, a, dx, dt, cfl_ref, flux)
    }

    /// Fixed time step, e.g. a shortened final step. The Courant number is
    /// back-computed in the `cfl_ref` convention.
    pub fn with_time_step(
        nodes: &NodeSet,
        a: f64,
        dx: f64,
        dt: f64,
        cfl_ref: CflReference,
        flux: FluxWeight,
    ) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidDiscretization(format!("wave speed a = {a}")));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidDiscretization(format!("dx = {dx}")));
        }
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(Error::InvalidDiscretization(format!("dt = {dt}")));
        }
        if let FluxWeight::LaxFriedrichs(w) = flux {
            if !w.is_finite() {
                return Err(Error::InvalidDiscretization(format!("omega = {w}")));
            }
        }
        let nu = a * dt / dx;
        Ok(Self { a, dx, dt, cfl: nu / reference_length(nodes, cfl_ref), cfl_ref, flux, nu })
    }

    /// Shift ν = aΔt/Δx in element widths.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// ω actually applied: 1/ν for upwind.
    pub fn omega_effective(&self) -> f64 {
        match self.flux {
            FluxWeight::Upwind => 1.0 / self.nu,
            FluxWeight::LaxFriedrichs(w) => w,
        }
    }
}

fn reference_length(nodes: &NodeSet, cfl_ref: CflReference) -> f64 {
    match cfl_ref {
        CflReference::MinSpacing => nodes.min_spacing,
        CflReference::Element => 1.0,
    }
}

/// (w_l, w_r). Upwind is exactly (1, 0).
pub fn interface_weights(disc: &Discretization) -> (f64, f64) {
    match disc.flux {
        FluxWeight::Upwind => (1.0, 0.0),
        FluxWeight::LaxFriedrichs(w) => {
            let wn = w * disc.nu;
            (0.5 * (1.0 + wn), 0.5 * (1.0 - wn))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ElementOperators {
    pub nodeset: NodeSet,
    pub disc: Discretization,
    #[serde(skip)]
    pub v: Matrix,
    #[serde(skip)]
    pub vstar: Matrix,
    /// Constraint matrix: rows v(χ_b) for χ_b = (−½, χ_0, …, χ_P, ½).
    #[serde(skip)]
    pub x: Matrix,
    /// Normal matrix XᵀX.
    #[serde(skip)]
    pub a: Matrix,
    #[serde(skip)]
    pub n_prev: Matrix,
    #[serde(skip)]
    pub n_self: Matrix,
    #[serde(skip)]
    pub n_next: Matrix,
    pub cond_vstar: f64,
    /// Row 0 of (XᵀX)⁻¹Xᵀ composed with each sensitivity: the centre
    /// coefficient's dependence on the three nodal vectors.
    #[serde(skip)]
    center: [Vec<f64>; 3],
}

pub fn assemble(nodeset: &NodeSet, disc: &Discretization) -> Result<ElementOperators> {
    let n = nodeset.len();
    let nu = disc.nu();
    let (w_l, w_r) = interface_weights(disc);

    let v = nodeset.vandermonde();
    let shifted: Vec<f64> = nodeset.nodes.iter().map(|x| x + nu).collect();
    let vstar = vandermonde(&shifted, n);
    let vstar_lu = Lu::factor(&vstar)?;
    let vstar_inv = vstar_lu.inverse();
    let cond_vstar = condition_estimate(&vstar)?;

    // Advected interpolant sampled on the nodes, and its edge traces.
    let r = &v * &vstar_inv;
    let t_right = vstar_inv.vec_mul(&monomial_row(0.5, n));
    let t_left = vstar_inv.vec_mul(&monomial_row(-0.5, n));

    let mut points = Vec::with_capacity(n + 2);
    points.push(-0.5);
    points.extend_from_slice(&nodeset.nodes);
    points.push(0.5);
    let x = vandermonde(&points, n);
    let xt = x.transpose();
    let a = &xt * &x;
    let fit = Lu::factor(&a)?.solve_matrix(&xt);

    // Sensitivity of the constraint vector to each neighbour's nodal values.
    let rows = n + 2;
    let mut s_prev = Matrix::zeros(rows, n);
    let mut s_self = Matrix::zeros(rows, n);
    let mut s_next = Matrix::zeros(rows, n);
    for j in 0..n {
        s_prev[(0, j)] = w_l * t_right[j];
        s_self[(0, j)] = w_r * t_left[j];
        for m in 0..n {
            s_self[(m + 1, j)] = r[(m, j)];
        }
        s_self[(rows - 1, j)] = w_l * t_right[j];
        s_next[(rows - 1, j)] = w_r * t_left[j];
    }

    let vf = &v * &fit;
    let center_row = fit.row(0);
    let center = [s_prev.vec_mul(center_row), s_self.vec_mul(center_row), s_next.vec_mul(center_row)];
    Ok(ElementOperators {
        nodeset: nodeset.clone(),
        disc: disc.clone(),
        n_prev: &vf * &s_prev,
        n_self: &vf * &s_self,
        n_next: &vf * &s_next,
        v,
        vstar,
        x,
        a,
        cond_vstar,
        center,
    })
}

/// Single-element periodic recursion matrix.
pub fn periodic_operator(ops: &ElementOperators) -> Matrix {
    &(&ops.n_prev + &ops.n_self) + &ops.n_next
}

/// Recursion matrix with both neighbours held at zero.
pub fn zero_neighbor_operator(ops: &ElementOperators) -> Matrix {
    ops.n_self.clone()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StencilProvenance {
    pub degree: usize,
    pub kind: NodeKind,
    pub cfl: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StencilEntry {
    /// Offset from the element centre in units of Δx.
    pub delta: f64,
    pub weight: f64,
}

/// Weights giving the updated value at the element centre.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterStencil {
    pub entries: Vec<StencilEntry>,
    pub provenance: StencilProvenance,
}

impl CenterStencil {
    pub fn weight_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Σ c_j·δ_j^k.
    pub fn moment(&self, k: i32) -> f64 {
        self.entries.iter().map(|e| e.weight * e.delta.powi(k)).sum()
    }
}

pub fn center_stencil(ops: &ElementOperators) -> CenterStencil {
    let mut entries = Vec::new();
    for (shift, weights) in [-1.0, 0.0, 1.0].into_iter().zip(&ops.center) {
        for (chi, &c) in ops.nodeset.nodes.iter().zip(weights) {
            if c.abs() >= STENCIL_DROP_TOLERANCE {
                entries.push(StencilEntry { delta: chi + shift, weight: c });
            }
        }
    }
    CenterStencil {
        entries,
        provenance: StencilProvenance {
            degree: ops.nodeset.degree,
            kind: ops.nodeset.kind,
            cfl: ops.disc.cfl,
            omega: ops.disc.omega_effective(),
        },
    }
}
