//! Frequency space, spectral fields and norms.

pub mod dilate;
pub mod field;
pub mod grid;
pub mod io;
pub mod norms;

pub use dilate::dilate;
pub use field::{HorizontalField, SpectralField};
pub use grid::{inverse_plancherel_constant, plancherel_constant, same_grid, FrequencyGrid, GridMode, NodeParams};
pub use norms::{inner_product, inner_product_h, sobolev_norm_sq, sobolev_norm_sq_h, NormKind};
