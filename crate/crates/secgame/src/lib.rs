//! Saddle-point solver for two-player zero-sum security games with
//! additive utility.
//!
//! An attacker picks `k_a` of `m` targets to hit and a defender picks
//! `k_d` to protect; the attacker collects the cost of every attacked,
//! unprotected target. The pure-action sets are exponentially large, but
//! expected payoffs depend on the players' mixed strategies only through
//! per-target marginals, and the optimal marginals have closed forms
//! indexed by a single structural breakpoint in sorted-cost order. This
//! crate finds the game value and both optimal strategies in time linear
//! in `m` (after sorting), and ships an exhaustive LP oracle that solves
//! the full matrix game at desk scale for validation.
//!
//! Typical use:
//!
//! ```
//! use secgame::{normalize, solve_fast};
//!
//! let game = normalize(&[3.0, 1.0, 2.0], 1, 1).unwrap();
//! let cert = solve_fast(&game).unwrap();
//! assert!((cert.value - 1.2).abs() < 1e-12);
//! ```
//!
//! The `examples/` directory walks through each capability: solving,
//! oracle cross-checks, strategy lifting and verification, active-set
//! structure, and scaling measurements. The `secgame` binary exposes the
//! same functionality over JSON files via `solve`, `verify`, and
//! `bench` subcommands.

pub mod attacker;
pub mod bench;
pub mod cli;
pub mod defender;
pub mod error;
pub mod game;
pub mod io;
pub mod lift;
mod numeric;
pub mod oracle;
pub mod solve;
mod tables;

pub use error::{Error, Result};
pub use game::{
    marginal_of_strategy, normalize, GameInstance, MarginalVector, Method, SaddleCertificate,
    SparseMixedStrategy, TargetSubset,
};
pub use solve::{solve_fast, solve_fast_with_stats, FastSolveStats};
