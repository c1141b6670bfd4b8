use rayon::prelude::*;
use serde::Serialize;

use super::symbol;
use crate::basis::NodeSet;
use crate::operator::{assemble, center_stencil, CenterStencil, CflReference, Discretization, FluxWeight};
use crate::{Error, Result};

/// A config counts as stable while max|g| ≤ 1 + STABILITY_SLACK.
pub const STABILITY_SLACK: f64 = 1e-10;

/// Bisection stops once the bracket is narrower than this.
const BISECTION_WIDTH: f64 = 1e-8;

/// Wavenumber grid for the amplification scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VnScan {
    pub theta_max: f64,
    pub points: usize,
}

impl Default for VnScan {
    fn default() -> Self {
        Self { theta_max: std::f64::consts::PI, points: 4096 }
    }
}

fn abs_g(st: &CenterStencil, theta: f64) -> f64 {
    symbol(st, theta).norm()
}

/// max |g(θ)| over the scan grid, refined by golden-section search around
/// the grid maximum.
pub fn stencil_max_amplification(st: &CenterStencil, scan: &VnScan) -> f64 {
    let n = scan.points.max(2);
    let h = scan.theta_max / (n - 1) as f64;
    let (mut best, mut best_j) = (f64::NEG_INFINITY, 0);
    for j in 0..n {
        let v = abs_g(st, j as f64 * h);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let lo = best_j.saturating_sub(1) as f64 * h;
    let hi = ((best_j + 1).min(n - 1)) as f64 * h;
    best.max(golden_max(|t| abs_g(st, t), lo, hi))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// max |g| for the centre stencil at one Courant number.
pub fn max_amplification(
    nodes: &NodeSet,
    flux: FluxWeight,
    cfl_ref: CflReference,
    cfl: f64,
    scan: &VnScan,
) -> Result<f64> {
    let disc = Discretization::new(nodes, 1.0, 1.0, cfl, cfl_ref, flux)?;
    let ops = assemble(nodes, &disc)?;
    Ok(stencil_max_amplification(&center_stencil(&ops), scan))
}

/// [`max_amplification`] over a Courant grid, evaluated in parallel and
/// returned in grid order.
pub fn vn_table(
    nodes: &NodeSet,
    flux: FluxWeight,
    cfl_ref: CflReference,
    cfls: &[f64],
    scan: &VnScan,
) -> Result<Vec<f64>> {
    cfls.par_iter().map(|&c| max_amplification(nodes, flux, cfl_ref, c, scan).map_err(|e| e.at_cfl(c))).collect()
}

/// Bisect for the Courant number at which max|g| first exceeds 1. The
/// bracket must be stable at `lo` and unstable at `hi`.
pub fn vn_stability_limit(
    nodes: &NodeSet,
    flux: FluxWeight,
    cfl_ref: CflReference,
    bracket: (f64, f64),
    scan: &VnScan,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    let stable = |c: f64| -> Result<bool> {
        Ok(max_amplification(nodes, flux, cfl_ref, c, scan).map_err(|e| e.at_cfl(c))? <= 1.0 + STABILITY_SLACK)
    };
    if !(lo < hi) || !stable(lo)? || stable(hi)? {
        return Err(Error::BracketInvalid { lo, hi });
    }
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
