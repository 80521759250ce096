//! Exact algebra for tensor degenerations: truncated Laurent series, the
//! loop-group decomposition over `K[[t]]`, one-parameter subgroups and
//! Hilbert-Mumford witnesses, the pyramid degeneration certificate, and
//! closed-form subrank bounds.

pub mod bounds;
pub mod degeneration;
pub mod error;
pub mod field;
pub mod hm;
pub mod json;
pub mod loop_group;
pub mod matrix;
pub mod modp;
pub mod series;
pub mod series_matrix;
pub mod slices;
pub mod subgroup;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use matrix::Matrix;
pub use series::LaurentSeries;
pub use series_matrix::SeriesMatrix;
pub use tensor::Tensor;
