//! Truncated formal power series in one variable.
//!
//! Coefficients are stored lowest order first; every operation truncates at
//! the order of its inputs and never reads past it.

use crate::{Error, Result};

/// Tolerance on the constant term for [`series_log`].
pub const CONSTANT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    /// Series from coefficients s_0..s_M.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least a constant term");
        Self { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        Self::new(vec![0.0; order + 1])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Product truncated to the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        let mut out = vec![0.0; m + 1];
        for (i, a) in self.coeffs.iter().take(m + 1).enumerate() {
            for (j, b) in other.coeffs.iter().take(m + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// exp(S), from n·E_n = Σ_{k=1..n} k·s_k·E_{n−k}.
    pub fn exp(&self) -> Self {
        let m = self.order();
        let s = &self.coeffs;
        let mut e = vec![0.0; m + 1];
        e[0] = s[0].exp();
        for n in 1..=m {
            let acc: f64 = (1..=n).map(|k| k as f64 * s[k] * e[n - k]).sum();
            e[n] = acc / n as f64;
        }
        Self::new(e)
    }

    /// log(S) for s_0 = 1; see [`series_log`].
    pub fn log(&self) -> Result<Self> {
        series_log(self)
    }
}

/// Logarithm of a series with unit constant term, via
/// n·L_n·s_0 = n·s_n − Σ_{k=1..n−1} k·L_k·s_{n−k}.
pub fn series_log(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    let s0 = s.coeff(0);
    if !((s0 - 1.0).abs() <= CONSTANT_TOLERANCE) {
        return Err(Error::InconsistentSymbol { constant: s0 });
    }
    let m = s.order();
    let c = s.coeffs();
    let mut l = vec![0.0; m + 1];
    for n in 1..=m {
        let acc: f64 = (1..n).map(|k| k as f64 * l[k] * c[n - k]).sum();
        l[n] = (n as f64 * c[n] - acc) / (n as f64 * s0);
    }
    Ok(TruncatedSeries::new(l))
}
