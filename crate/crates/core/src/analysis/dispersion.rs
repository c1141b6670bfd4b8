use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{modified_equation, symbol};
use crate::operator::{CenterStencil, Discretization};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionMode {
    /// (i/ν)·Log g(θ), with the phase continued along the grid.
    ExactSymbol,
    /// (i/ν)·Σ_{m≤M} b_m (iθ)^m.
    MeTruncated(usize),
}

/// Effective wavenumber κ*Δx at θ = κΔx. `re_kstar_dx` compares to θ;
/// `im_kstar_dx < 0` is damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionSample {
    pub theta: f64,
    pub re_kstar_dx: f64,
    pub im_kstar_dx: f64,
    pub mode: DispersionMode,
}

pub fn dispersion_curve(
    st: &CenterStencil,
    disc: &Discretization,
    thetas: &[f64],
    mode: DispersionMode,
) -> Result<Vec<DispersionSample>> {
    let nu = disc.nu();
    if !(nu > 0.0) {
        return Err(Error::InvalidDiscretization("dispersion needs a positive shift".into()));
    }
    match mode {
        DispersionMode::ExactSymbol => {
            // |g| at rounding level of the weights has no meaningful phase.
            let floor = 1e-14 * st.entries.iter().map(|e| e.weight.abs()).sum::<f64>();
            let mut out = Vec::with_capacity(thetas.len());
            let mut phase: Option<(f64, f64)> = None; // (principal, continued)
            for &theta in thetas {
                let g = symbol(st, theta);
                let r = g.norm();
                if !(r > floor) || !r.is_finite() {
                    return Err(Error::BranchFailure { theta });
                }
                let arg = g.arg();
                let cont = match phase {
                    None => arg,
                    Some((prev_arg, prev_cont)) => {
                        let mut d = arg - prev_arg;
                        while d > PI {
                            d -= 2.0 * PI;
                        }
                        while d <= -PI {
                            d += 2.0 * PI;
                        }
                        prev_cont + d
                    }
                };
                phase = Some((arg, cont));
                // (i/ν)(ln r + iφ) = (−φ + i ln r)/ν
                out.push(DispersionSample { theta, re_kstar_dx: -cont / nu, im_kstar_dx: r.ln() / nu, mode });
            }
            Ok(out)
        }
        DispersionMode::MeTruncated(order) => {
            let me = modified_equation(st, disc, order)?;
            Ok(thetas
                .iter()
                .map(|&theta| {
                    let z = Complex64::new(0.0, theta);
                    let mut power = Complex64::new(1.0, 0.0);
                    let mut sum = Complex64::new(0.0, 0.0);
                    for bm in &me.b[1..] {
                        power *= z;
                        sum += bm * power;
                    }
                    let k = Complex64::new(0.0, 1.0 / nu) * sum;
                    DispersionSample { theta, re_kstar_dx: k.re, im_kstar_dx: k.im, mode }
                })
                .collect())
        }
    }
}
