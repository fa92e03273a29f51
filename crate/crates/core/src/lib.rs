//! Numerical toolkit for entanglement monogamy and polygamy relations of
//! multi-qubit states.

pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod monogamy;
pub mod qstate;
pub mod states;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use qstate::{Bipartition, BlockGrouping, DensityMatrix, PureState, State};
