//! Seeded Monte Carlo estimates against their exact counterparts.
//!
//! The simulator streams single rounds from the exact per-setting
//! distributions, so estimates converge to the closed-form score at the
//! usual 1/sqrt(rounds) rate and identical seeds reproduce identical
//! output.
//!
//! Run with: cargo run --release --example monte_carlo

use qrs_game::game::{exact_honest_score, phi_plus, CheatStrategy, cheat_score, PreparationModel, ScoreSpec};
use qrs_game::montecarlo::{simulate, Players, SimConfig};
use qrs_game::settings::builtin_directions;
use qrs_game::BlochVector;

fn main() -> qrs_game::Result<()> {
    let ds = builtin_directions("orthogonal-2", 2)?;
    let spec = ScoreSpec::new(ds, 1.0, 1.0)?;

    let exact = exact_honest_score(&phi_plus(), &spec, &PreparationModel::Exact, 1.0)?.total;
    println!("honest phi-plus, exact score = {exact:+.6}");
    for rounds in [1_000u64, 100_000, 10_000_000] {
        let cfg = SimConfig {
            spec: spec.clone(),
            model: PreparationModel::Exact,
            players: Players::Honest { rho_ab: phi_plus(), eta_m: 1.0 },
            rounds,
            seed: 42,
        };
        let est = simulate(&cfg)?;
        println!(
            "  rounds = {rounds:>8}: mean = {:+.6} +- {:.6}, eta_h_hat = {:.4}",
            est.mean, est.std_error, est.eta_h_hat
        );
    }

    // A blind intercept-and-forward adversary guesses at chance and pays
    // the full bound penalty on every answered round.
    let strategy = CheatStrategy::forwarding(0.5, BlochVector::ZERO, vec![1, 2]);
    let exact_cheat = cheat_score(&strategy, &spec, &PreparationModel::Exact)?;
    let cfg = SimConfig {
        spec: spec.clone(),
        model: PreparationModel::Exact,
        players: Players::Cheat(strategy),
        rounds: 1_000_000,
        seed: 42,
    };
    let est = simulate(&cfg)?;
    println!("blind cheat, exact score = {exact_cheat:+.6}");
    println!(
        "  rounds = {:>8}: mean = {:+.6} +- {:.6}",
        cfg.rounds, est.mean, est.std_error
    );
    Ok(())
}
