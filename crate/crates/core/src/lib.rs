//! Revenue-maximizing edge pricing for bounded-width grid road networks.
//!
//! Drivers travel between two grid vertices along a cheapest path and pay its
//! cost when it fits their budget. [`decomposition::solve`] computes a pricing
//! whose revenue is within a logarithmic factor of the best possible.

pub mod baseline;
pub mod block;
pub mod compression;
pub mod decomposition;
pub mod distmatrix;
pub mod error;
pub mod eval;
pub mod gen;
pub mod io;
pub mod model;
pub mod money;
pub mod oracle;
pub mod rooted;
pub mod rounding;

pub use error::{Error, ParseError, Result};
pub use eval::{revenue, shortest_path_cost};
pub use model::{Driver, EdgeId, EdgeKind, GridInstance, Pricing, VertexId};
pub use money::Money;
pub use rounding::PriceSet;
