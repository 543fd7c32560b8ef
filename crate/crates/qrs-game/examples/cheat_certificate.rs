//! Exhaustive search over one-way cheating strategies.
//!
//! A dishonest pair intercepts the referee's states, guesses the encoded
//! sign with a two-outcome POVM, and answers only on a favorable subset of
//! settings. The search enumerates every subset, answer rule, and report
//! weight over a dense POVM grid; a supremum at most zero certifies that
//! no such strategy beats the bound.
//!
//! Run with: cargo run --release --example cheat_certificate

use qrs_game::game::{cheat_search, PreparationModel, ScoreSpec, SearchGrid};
use qrs_game::settings::builtin_directions;

fn main() -> qrs_game::Result<()> {
    let ds = builtin_directions("orthogonal-3", 3)?;
    let spec = ScoreSpec::new(ds, 1.0, 1.0)?;
    let result = cheat_search(&spec, &PreparationModel::Exact, &SearchGrid::default())?;

    println!(
        "searched {} strategies over {} POVM directions",
        result.strategies_scored, result.povm_directions
    );
    println!("supremum  = {:+.3e}", result.supremum);
    println!("certified = {}", result.certified);
    let best = &result.best;
    println!(
        "best strategy: mu = {:.4}, m = ({:.3}, {:.3}, {:.3}), favorable = {:?}, weights = {:?}",
        best.mu, best.m.x, best.m.y, best.m.z, best.favorable, best.report_weight
    );
    Ok(())
}
