pub mod cli;
pub mod dsl;
pub mod embedding;
pub mod error;
pub mod finite;
pub mod guard;
pub mod map;
pub mod oracle;
pub mod ray;
pub mod structure;
pub mod vertex;
pub mod vertex_set;
pub mod window;
pub mod zoo;

pub use embedding::{IsoCertificate, RemovableFamily, VerificationReport};
pub use error::{Error, Result};
pub use oracle::GraphOracle;
pub use vertex::{DegreeValue, VertexId};
pub use vertex_set::VertexSet;
pub use window::FiniteWindow;
