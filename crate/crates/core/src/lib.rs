pub mod analysis;
pub mod assembly;
pub mod element;
pub mod error;
pub mod mesh;
pub mod mfd;
pub mod polybasis;

pub use element::{LocalElement, StabilizationChoice};
pub use error::{Result, VemError};
pub use mesh::{Mesh, MeshKind, Point};
