pub mod covering;
pub mod discriminant;
pub mod dsl;
pub mod entropy;
pub mod enumerate;
pub mod error;
pub mod isometry;
pub mod lattice;
pub mod matrix;
pub mod pipeline;
pub mod reference;
pub mod roots;

pub use error::{Error, Result};
pub use lattice::{Lattice, Signature, SublatticeBasis};
