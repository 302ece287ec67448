//! Graph immersions, fiber products, and stackings of immersed loops,
//! with executable checks of the W-cycles bound and nonpositive
//! immersions for one-relator presentation complexes.

pub mod cli;
pub mod error;
pub mod fold;
pub mod graph;
pub mod harness;
pub mod pullback;
pub mod render;
pub mod stacking;
pub mod theorems;
pub mod word;

pub use error::{Error, Result};
pub use fold::{fold, fold_words, Folded};
pub use graph::{Direction, Edge, EdgeId, Graph, GraphMorphism, SignedEdge, VertexId};
pub use word::{Loop, MultiLoop, Word};
