//! Sweeping loss parameters: arbitrary heralding tolerance on Alice's
//! side, linear score scaling on Bob's.
//!
//! Because the bound adapts to the measured heralding efficiency, the
//! honest score stays strictly positive down to eta_h slightly above 1/n;
//! losses on Bob's side only shrink the score without flipping its sign.
//!
//! Run with: cargo run --release --example loss_sweep

use qrs_game::game::{phi_plus, PreparationModel, ScoreSpec};
use qrs_game::montecarlo::{sweep, Players, RPolicy, SimConfig, SweepAxis};
use qrs_game::settings::builtin_directions;

fn main() -> qrs_game::Result<()> {
    let ds = builtin_directions("orthogonal-3", 3)?;
    let base = SimConfig {
        spec: ScoreSpec::new(ds, 1.0, 1.0)?,
        model: PreparationModel::Exact,
        players: Players::Honest { rho_ab: phi_plus(), eta_m: 1.0 },
        rounds: 500_000,
        seed: 7,
    };

    println!("Alice heralding sweep (honest phi-plus, orthogonal-3):");
    let axis = SweepAxis::EtaH(vec![0.4, 0.6, 0.8, 1.0]);
    for row in sweep(&base, &axis, RPolicy::Fixed) {
        match row.result {
            Ok(est) => println!(
                "  eta_h = {}: mean = {:+.6} +- {:.6}",
                row.label, est.mean, est.std_error
            ),
            Err(err) => println!("  eta_h = {}: {err}", row.label),
        }
    }

    println!("\nBob measurement-loss sweep:");
    let axis = SweepAxis::EtaM(vec![0.25, 0.5, 0.75, 1.0]);
    for row in sweep(&base, &axis, RPolicy::Fixed) {
        match row.result {
            Ok(est) => println!(
                "  eta_m = {}: mean = {:+.6} +- {:.6}",
                row.label, est.mean, est.std_error
            ),
            Err(err) => println!("  eta_m = {}: {err}", row.label),
        }
    }
    Ok(())
}
