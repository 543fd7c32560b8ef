//! Exact scores for honest players sharing different two-qubit states.
//!
//! The maximally entangled state scores (1 - C_n)/4 at every heralding
//! efficiency, so it certifies steering whenever C_n < 1. A product state
//! never does, and Werner states cross over at intermediate visibility.
//!
//! Run with: cargo run --example honest_scores

use qrs_game::game::{exact_honest_score, phi_plus, product_state, werner, PreparationModel, ScoreSpec};
use qrs_game::settings::builtin_directions;
use qrs_game::BlochVector;

fn main() -> qrs_game::Result<()> {
    let ds = builtin_directions("icosahedron-6", 6)?;
    let states = [
        ("phi-plus", phi_plus()),
        ("product |00>", product_state(&BlochVector::Z, &BlochVector::Z)?),
        ("werner v=0.8", werner(0.8)?),
        ("werner v=0.5", werner(0.5)?),
    ];
    for eta_h in [0.3, 0.6, 1.0] {
        let spec = ScoreSpec::new(ds.clone(), eta_h, 1.0)?;
        println!("eta_h = {eta_h:.1}, C_6 = {:.6}", spec.bound_value());
        for (name, rho) in &states {
            let score = exact_honest_score(rho, &spec, &PreparationModel::Exact, 1.0)?;
            let verdict = if score.total > 0.0 { "steers" } else { "no" };
            println!("  {name:<14} score = {:+.6}  ({verdict})", score.total);
        }
        println!();
    }
    Ok(())
}
