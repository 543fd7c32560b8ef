//! Steering bound C_n(eta_h) for every built-in direction family.
//!
//! The bound stays pinned at 1 until the heralding efficiency passes 1/n,
//! then decreases toward C_n(1); any score above it certifies steering.
//!
//! Run with: cargo run --example bound_curves

use qrs_game::bounds::{steering_bound_from_table, DTable};
use qrs_game::settings::{builtin_directions, BUILTIN_FAMILIES};

fn main() -> qrs_game::Result<()> {
    for &(family, n) in BUILTIN_FAMILIES.iter() {
        let ds = builtin_directions(family, n)?;
        let table = DTable::compute(&ds)?;
        println!("{family} (n = {n})");
        println!("  D_n(k): {:?}", table.values());
        for step in 1..=10 {
            let eta_h = step as f64 / 10.0;
            let bound = steering_bound_from_table(&table, eta_h)?;
            let support: Vec<String> = bound
                .optimal_weights
                .iter()
                .map(|&(k, w)| format!("k={k} w={w:.3}"))
                .collect();
            println!(
                "  eta_h = {eta_h:.1}  C_n = {:.6}  mixture: {}",
                bound.value,
                support.join(", ")
            );
        }
        println!();
    }
    Ok(())
}
