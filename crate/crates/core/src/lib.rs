//! Cluster coalescence on complete and complete bipartite graphs: closed-form
//! Smoluchowski densities and minimal spanning tree limits, a reduced
//! Smoluchowski integrator, exact Marcus–Lushnikov simulation, Monte Carlo
//! MSTs and the experiment drivers used by the `coalesce-mst` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod coalescent;
pub mod error;
pub mod experiments;
pub mod graph_mst;
pub mod numerics;
pub mod seeding;
pub mod smoluchowski;
pub mod union_find;

pub use error::{Error, Result};
