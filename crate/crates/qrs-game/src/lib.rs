//! Loss-tolerant, measurement-device-independent verification of quantum
//! steering as a refereed game.
//!
//! The referee encodes a sign `s` in qubit states `ω_{j,s} = (I + s b_j·σ)/2`
//! for `n` measurement directions `{b_j}`, and pays `(a·s − r·C_n(η_H))·b`
//! per round. The crate computes the heralding-dependent steering bound
//! `C_n(η_H)` by exhaustive sign enumeration plus a two-point mixture
//! program, the preparation-imperfection factor `r`, exact quantum scores
//! for honest players, closed-form and exhaustively searched scores for
//! local-hidden-state adversaries with one-way Bob→Alice communication,
//! and seeded Monte Carlo estimates of all of the above.
//!
//! Entry points:
//! - [`settings::builtin_directions`] / [`settings::load_directions`] for
//!   measurement-direction families;
//! - [`bounds::steering_bound`] and [`bounds::r_factor`];
//! - [`game::exact_honest_score`], [`game::cheat_score`],
//!   [`game::cheat_search`];
//! - [`montecarlo::simulate`] and [`montecarlo::sweep`].
//!
//! The `qrs` binary exposes the same surface as subcommands; the
//! `examples/` directory has one runnable example per capability.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod game;
pub mod linalg;
pub mod montecarlo;
pub mod policy;
pub mod settings;

pub use bounds::{steering_bound, BoundResult, PreparationReport};
pub use error::{Error, Result};
pub use game::{
    cheat_score, cheat_search, exact_honest_score, CheatStrategy, PreparationModel, ScoreSpec,
};
pub use linalg::{BlochVector, DensityMatrix, HermitianOp};
pub use montecarlo::{simulate, sweep, SimConfig};
pub use policy::NumericPolicy;
pub use settings::DirectionSet;
