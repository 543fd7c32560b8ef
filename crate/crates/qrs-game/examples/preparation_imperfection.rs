//! Compensating imperfect referee preparation with the r-factor.
//!
//! When tomography shows the referee prepares n_{j,s} instead of the ideal
//! s b_j, scaling the bound by r closes the loophole: with the computed r,
//! the cheat supremum returns to zero, at the cost of a smaller honest
//! score.
//!
//! Run with: cargo run --release --example preparation_imperfection

use qrs_game::bounds::{r_factor, steering_bound, PreparationReport};
use qrs_game::game::{cheat_search, exact_honest_score, phi_plus, PreparationModel, ScoreSpec, SearchGrid};
use qrs_game::settings::builtin_directions;

fn main() -> qrs_game::Result<()> {
    let ds = builtin_directions("orthogonal-2", 2)?;
    let bound = steering_bound(&ds, 1.0)?;
    let grid = SearchGrid {
        povm_subdivisions: 2,
        mu_points: 51,
    };

    for v in [1.0, 0.9, 0.7] {
        let report = PreparationReport::visibility(&ds, v)?;
        let r = r_factor(&report, &ds, &bound)?.value;
        let model = PreparationModel::Visibility(v);

        let naive = ScoreSpec::new(ds.clone(), 1.0, 1.0)?;
        let compensated = ScoreSpec::new(ds.clone(), 1.0, r)?;
        let cheat_naive = cheat_search(&naive, &model, &grid)?;
        let cheat_fixed = cheat_search(&compensated, &model, &grid)?;
        let honest = exact_honest_score(&phi_plus(), &compensated, &model, 1.0)?;

        println!("visibility v = {v:.1}: r = {r:.6}");
        println!(
            "  cheat supremum  r=1: {:+.4e} ({})",
            cheat_naive.supremum,
            if cheat_naive.certified { "safe" } else { "exploitable" }
        );
        println!(
            "  cheat supremum  r=r(v): {:+.4e} ({})",
            cheat_fixed.supremum,
            if cheat_fixed.certified { "safe" } else { "exploitable" }
        );
        println!("  honest phi-plus score with r(v): {:+.6}", honest.total);
        println!();
    }

    // The drastic failure mode: a referee that ignores the setting and
    // always encodes the sign along one axis. The sign is then perfectly
    // guessable, so the unscaled bound is exploitable; r = 1/C_n repairs it.
    let axis = qrs_game::BlochVector::Z;
    let report = PreparationReport::fixed_state(ds.n(), &axis)?;
    let r = r_factor(&report, &ds, &bound)?.value;
    let model = PreparationModel::FixedState(axis);
    let naive = cheat_search(&ScoreSpec::new(ds.clone(), 1.0, 1.0)?, &model, &grid)?;
    let fixed = cheat_search(&ScoreSpec::new(ds.clone(), 1.0, r)?, &model, &grid)?;
    println!("degenerate preparation along z: r = {r:.6}");
    println!(
        "  cheat supremum  r=1: {:+.4e} ({})",
        naive.supremum,
        if naive.certified { "safe" } else { "exploitable" }
    );
    println!(
        "  cheat supremum  r=1/C: {:+.4e} ({})",
        fixed.supremum,
        if fixed.certified { "safe" } else { "exploitable" }
    );
    Ok(())
}
