//! Exact computations behind tight contact structures on surgeries along knots:
//! contact surgery translation, surgery homology, Kirby moves to plumbings,
//! lattice embedding obstructions and L-space slope propagation.

mod bigser;
pub mod contact;
pub mod error;
pub mod exactnum;
pub mod floer;
pub mod homology;
pub mod kirby;
pub mod lattice;

pub use contact::{KnotInfo, LegendrianKnot};
pub use error::{Error, Result};
pub use exactnum::{neg_cf_eval, neg_cf_expand, NegCF, Rational};
pub use homology::{FirstHomology, IntegerMatrix, SnfResult};
pub use kirby::{Definiteness, GraphDiagram, PlumbingTree};
pub use lattice::{EmbeddingWitness, GramLattice};
