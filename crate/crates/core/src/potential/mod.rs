//! Green functions, capacities, atomic measures and raster compacts.

mod functional;
mod green;
mod measure;
mod pixel;

pub use functional::*;
pub use green::*;
pub use measure::*;
pub use pixel::*;
