//! File formats: the binary amplitude container, CSV grids and tables,
//! portable pixmap heatmaps and the run manifest.

pub mod csv;
pub mod image;
pub mod manifest;
pub mod tensor;

pub use manifest::write_manifest;
pub use tensor::{read_tensor, write_tensor};
