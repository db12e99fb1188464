//! Closeness scores between `n >= 2` graphs that respect generalized metric
//! properties.
//!
//! The library provides three tiers of machinery:
//!
//! - **Pairwise**: P-scores `s(A, B, P) = |||AP - PB|||` and SB-distances
//!   (exact over permutations, relaxed over the Birkhoff polytope), see
//!   [`pscore`].
//! - **Multi-way**: the Fermat distance `min_B sum_i d(A_i, B)` and the
//!   G-align distance `min_{P in S} sum_{i<j} s(A_i, A_j, P_{i,j})` over the
//!   alignment-consistency set `S`, with exact brute-force forms and spectral
//!   closed forms for orthogonal alignments, see [`multidist`]. Convex
//!   relaxations through PSD and nuclear-norm constraints on the block
//!   alignment matrix live in [`relax`].
//! - **Verification**: executable checks of the (pseudo) n-metric axioms,
//!   empirical (C, n)-metric constants, and diameter estimation, see
//!   [`metriclab`].
//!
//! Graphs are real symmetric `m x m` matrices ([`graphs::GraphMatrix`]);
//! alignments are permutation, doubly-stochastic, or orthogonal matrices
//! ([`pscore::Alignment`]); consistent alignment tuples are stored through
//! their Q-factors ([`consistency::ConsistentTuple`]).

pub mod consistency;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod metriclab;
pub mod multidist;
pub mod pscore;
pub mod relax;

pub use error::{Error, Result};
pub use graphs::{GraphMatrix, GraphModel, GraphSet};
pub use linalg::{NormKind, Spectrum};
pub use pscore::{Alignment, AlignmentKind};
