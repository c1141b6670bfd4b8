use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{make_nodes, NodeKind};
use crate::linalg::{series_log, TruncatedSeries};
use crate::operator::{assemble, center_stencil, CenterStencil, CflReference, Discretization, FluxWeight};
use crate::{Error, Result};

/// g(θ) = Σ c_j·exp(iδ_jθ).
pub fn symbol(st: &CenterStencil, theta: f64) -> Complex64 {
    st.entries.iter().map(|e| Complex64::from_polar(e.weight, e.delta * theta)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeProvenance {
    pub degree: usize,
    pub kind: NodeKind,
    pub cfl: f64,
    pub omega: f64,
    pub dx: f64,
    pub a: f64,
    pub dt: f64,
}

/// Coefficients of ∂ₜQ = Σ_m a_m ∂ₓ^m Q for the centre-node update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeReport {
    pub provenance: MeProvenance,
    /// a_0..a_M; a_0 is always zero.
    pub a: Vec<f64>,
    /// Dimensionless log-symbol coefficients: log g = Σ b_m (iθ)^m.
    pub b: Vec<f64>,
    pub order: usize,
    /// Whether a_1 = −a, i.e. the stencil transports linear data exactly.
    pub consistent: bool,
}

impl MeReport {
    pub fn diffusion(&self) -> f64 {
        self.a[2]
    }

    pub fn dispersion(&self) -> f64 {
        self.a.get(3).copied().unwrap_or(0.0)
    }
}

/// Expands g(θ) = Σ G_n (iθ)^n with G_n = Σ c_j δ_j^n / n!, takes the series
/// logarithm, and rescales: a_m = b_m·Δx^m/Δt.
pub fn modified_equation(st: &CenterStencil, disc: &Discretization, order: usize) -> Result<MeReport> {
    if order < 2 {
        return Err(Error::InvalidDiscretization(format!("modified equation order {order} < 2")));
    }
    if !(disc.dt > 0.0) {
        return Err(Error::InvalidDiscretization("modified equation needs dt > 0".into()));
    }
    let mut g = vec![0.0; order + 1];
    let mut factorial = 1.0;
    for (n, gn) in g.iter_mut().enumerate() {
        if n > 0 {
            factorial *= n as f64;
        }
        *gn = st.moment(n as i32) / factorial;
    }
    let b = series_log(&TruncatedSeries::new(g))?.coeffs().to_vec();
    let a: Vec<f64> = b.iter().enumerate().map(|(m, bm)| bm * disc.dx.powi(m as i32) / disc.dt).collect();
    let consistent = (a[1] + disc.a).abs() <= 1e-9 * disc.a;
    Ok(MeReport {
        provenance: MeProvenance {
            degree: st.provenance.degree,
            kind: st.provenance.kind,
            cfl: disc.cfl,
            omega: disc.omega_effective(),
            dx: disc.dx,
            a: disc.a,
            dt: disc.dt,
        },
        a,
        b,
        order,
        consistent,
    })
}

/// ω at which the diffusion coefficient vanishes. a_2 is affine in ω
/// (first moments do not depend on ω), so two evaluations fix it.
pub fn zero_diffusion_omega(degree: usize, kind: NodeKind, cfl: f64, cfl_ref: CflReference) -> Result<f64> {
    if degree == 0 {
        // One-node stencils are only consistent for a single ω value.
        return Err(Error::InvalidDegree(0));
    }
    let nodes = make_nodes(degree, kind)?;
    let a2 = |omega: f64| -> Result<f64> {
        let disc = Discretization::new(&nodes, 1.0, 1.0, cfl, cfl_ref, FluxWeight::LaxFriedrichs(omega))?;
        let ops = assemble(&nodes, &disc)?;
        Ok(modified_equation(&center_stencil(&ops), &disc, 2)?.diffusion())
    };
    let f0 = a2(0.0)?;
    let f1 = a2(1.0)?;
    let slope = f1 - f0;
    if slope.abs() < 1e-14 {
        return Err(Error::DegenerateDependence(slope.abs()));
    }
    let mut omega = -f0 / slope;
    // One secant correction absorbs rounding in the two evaluations.
    let r = a2(omega)?;
    if r.abs() > 1e-9 * slope.abs() {
        omega -= r / slope;
    }
    Ok(omega)
}
