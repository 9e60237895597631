//! Independence complexes of graphs: exact Betti numbers at small scale and
//! certified discrete Morse matchings realizing structural upper bounds on the
//! number of critical cells.

pub mod bounds;
pub mod canon;
pub mod complex;
pub mod cycles;
pub mod enumerate;
pub mod error;
pub mod family;
pub mod graph;
pub mod homology;
pub mod io;
pub mod lucas;
pub mod morse;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet, MAX_VERTICES};
