//! Constructive search for matchings with prescribed per-color multiplicities
//! in a bipartite graph formed by three disjoint perfect matchings.
//!
//! Given permutations encoding the matchings `M1, M2, M3` on `2n` vertices
//! and a target `(a1, a2, a3)` with `a1 + a2 + a3 = n - 1`, the solver
//! produces a matching using exactly `a_i` edges of each `M_i`. The pipeline
//! peels components with a budgeted reduction to perfect matchings, then
//! trades color-3 edges one at a time along good nearly-alternating paths.
//! A brute-force oracle, seeded generators and fuzz campaigns back it all up
//! at small sizes.

pub mod components;
pub mod error;
pub mod instance;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod reduction;
pub mod solver;
pub mod structure;
pub mod switching;
pub mod trace;

pub use components::{block_instance, components, restrict, Component, Restriction};
pub use error::{Error, Result};
pub use instance::{validate_instance, BudgetTriple, Color, Edge, Instance, TargetTriple, Vertex};
pub use matching::{verify, verify_matching, Matching, VerifyReport, Violation};
pub use solver::{solve, solve_two_color, solve_with_stats, SolveStats};
pub use trace::Tracer;
