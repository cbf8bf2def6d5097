//! Percolation on amenable Cayley graphs: invariant edge orderings,
//! topological window functionals, and the statistics that make their
//! central limit behavior empirically checkable.
//!
//! The crate is organized bottom-up:
//!
//! * [`group`] — the three built-in group models in normal form;
//! * [`geometry`] — balls, edge universes, windows, growth profiles;
//! * [`order`] — the translation-invariant total edge order and the
//!   fundamental edge family;
//! * [`percolation`] — deterministic per-edge randomness, clusters,
//!   edge events;
//! * [`complexes`] / [`homology`] — graph-generated simplicial complexes
//!   and exact Betti numbers, including localized single-edge differences;
//! * [`functionals`], [`sigma2`], [`clt`], [`ergodic`] — the window
//!   functionals and their variance/normality diagnostics;
//! * [`cli`] — the command-line front end.
//!
//! Everything downstream of a seed is reproducible: randomness is
//! counter-based and keyed by content (group normal forms), never by
//! enumeration order, so restrictions to sub-balls and parallel replays
//! agree bit for bit.

pub mod cli;
pub mod clt;
pub mod complexes;
pub mod ergodic;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod group;
pub mod homology;
pub mod normal;
pub mod order;
pub mod par;
pub mod percolation;
pub mod rng;
pub mod sigma2;

pub use error::{Error, Result};
