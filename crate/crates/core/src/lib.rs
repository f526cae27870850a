pub mod dihedral;
pub mod error;
pub mod graph;
pub mod graph_space;
pub mod johnson;
pub mod lie;
pub mod linalg;
pub mod rep;
pub mod scalar;
pub mod symplectic;

pub use error::{Error, Result};
pub use scalar::Q;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
