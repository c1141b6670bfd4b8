//! Small dense linear algebra and truncated power series.
//!
//! Everything here is sized for element operators, i.e. at most 16×16.

mod eigen;
mod lu;
mod matrix;
mod series;

pub use eigen::{complex_eigenvalues, eigenvalues, sort_eigenvalues, ComplexVector};
pub use lu::{condition_estimate, determinant, solve, Lu, PIVOT_TOLERANCE};
pub use matrix::Matrix;
pub use series::{series_log, TruncatedSeries};

pub use num_complex::Complex64;
