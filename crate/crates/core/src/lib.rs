//! Finite combinatorial 2-complexes with zero/one angle structures: links and
//! curvature, the coloring tests, fold-to-edge certification of
//! non-positive immersion, bounded immersion audits, and labeled oriented
//! trees.

pub mod angles;
pub mod cap;
pub mod certify;
pub mod coloring;
pub mod complex;
mod dsu;
pub mod error;
pub mod fold;
pub mod graph;
pub mod immersion;
pub mod lot;
pub mod map;
pub mod parse;
pub mod thin;

pub use angles::{standard_angles, AngleStructure, CurvatureReport};
pub use complex::{ComplexBuilder, CornerId, EdgeEnd, Letter, LinkGraph, Sign, Subcomplex, TwoComplex};
pub use error::{ComplexError, ParseError};
pub use map::CombMap;
pub use parse::{parse_complex, ComplexDocument};
