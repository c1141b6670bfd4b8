//! Reference-element node families and the monomial Vandermonde.
//!
//! Coordinates are dimensionless and centred on the element: χ ∈ [−½, ½],
//! with physical position x = x_center + χ·Δx.

use serde::Serialize;

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Largest supported polynomial degree (element operators are at most 16 wide).
pub const MAX_DEGREE: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Chebyshev,
    Uniform,
    /// Two nodes at ±α (degree 1 only).
    SymmetricAlpha(f64),
}

impl std::fmt::Display for NodeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeKind::Chebyshev => write!(f, "chebyshev"),
            NodeKind::Uniform => write!(f, "uniform"),
            NodeKind::SymmetricAlpha(a) => write!(f, "alpha:{a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeSet {
    pub degree: usize,
    pub kind: NodeKind,
    pub nodes: Vec<f64>,
    /// Smallest gap between nodes or between a node and an element edge.
    pub min_spacing: f64,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Square Vandermonde of the nodes.
    pub fn vandermonde(&self) -> Matrix {
        vandermonde(&self.nodes, self.len())
    }
}

pub fn make_nodes(degree: usize, kind: NodeKind) -> Result<NodeSet> {
    if degree > MAX_DEGREE {
        return Err(Error::InvalidDegree(degree));
    }
    let n = degree + 1;
    let nodes = match kind {
        NodeKind::SymmetricAlpha(alpha) => {
            if degree != 1 {
                return Err(Error::KindDegreeMismatch(degree));
            }
            if !(alpha > 0.0 && alpha < 0.5) {
                return Err(Error::AlphaOutOfRange(alpha));
            }
            vec![-alpha, alpha]
        }
        NodeKind::Chebyshev => symmetric(n, |m| -0.5 * ((m as f64 + 0.5) * std::f64::consts::PI / n as f64).cos()),
        NodeKind::Uniform => symmetric(n, |m| (m as f64 + 1.0) / (n as f64 + 1.0) - 0.5),
    };
    let min_spacing =
        nodes.windows(2).map(|w| w[1] - w[0]).chain([nodes[0] + 0.5, 0.5 - nodes[n - 1]]).fold(f64::INFINITY, f64::min);
    Ok(NodeSet { degree, kind, nodes, min_spacing })
}

/// Fill the left half from `f` and mirror it, so χ_m = −χ_{P−m} holds exactly.
fn symmetric(n: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut nodes = vec![0.0; n];
    for m in 0..n / 2 {
        let x = f(m);
        nodes[m] = x;
        nodes[n - 1 - m] = -x;
    }
    nodes
}

/// entry[r][j] = points[r]^j for j < width.
pub fn vandermonde(points: &[f64], width: usize) -> Matrix {
    Matrix::from_fn(points.len(), width, |r, j| points[r].powi(j as i32))
}

/// Row [1, χ, …, χ^{width−1}].
pub fn monomial_row(x: f64, width: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(width);
    let mut p = 1.0;
    for _ in 0..width {
        row.push(p);
        p *= x;
    }
    row
}

/// Horner evaluation of Σ coeffs[m]·χ^m.
pub fn eval_monomial(coeffs: &[f64], x: f64) -> f64 {
    assert!(!coeffs.is_empty());
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
