//! Independent oracles shared by the integration tests. These recompute
//! quantities the library optimizes, using only brute force and full-size
//! tensor algebra, so agreement is meaningful.

#![allow(dead_code)]

use num_complex::Complex64;
use qrs_game::game::pauli_projectors;
use qrs_game::linalg::{state_from_bloch, tensor, HermitianOp};
use qrs_game::{BlochVector, DensityMatrix, DirectionSet, PreparationModel};

/// `D_n(k)` for every k by enumerating all subsets and all 2^k sign
/// patterns with no symmetry pruning.
pub fn unpruned_d_table(ds: &DirectionSet) -> Vec<f64> {
    let n = ds.n();
    let dirs = ds.directions();
    (0..=n)
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let mut best = 0.0f64;
            for mask in 0u32..(1u32 << n) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let members: Vec<&BlochVector> =
                    (0..n).filter(|&j| mask >> j & 1 == 1).map(|j| &dirs[j]).collect();
                for signs in 0u32..(1u32 << k) {
                    let mut sum = BlochVector::ZERO;
                    for (bit, d) in members.iter().enumerate() {
                        let f = if signs >> bit & 1 == 1 { -1.0 } else { 1.0 };
                        sum = sum + d.scale(f);
                    }
                    best = best.max(sum.norm() / k as f64);
                }
            }
            best
        })
        .collect()
}

fn phi_plus_projector() -> HermitianOp {
    let half = Complex64::new(0.5, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    HermitianOp::from_entries(
        4,
        vec![
            half, zero, zero, half, //
            zero, zero, zero, zero, //
            zero, zero, zero, zero, //
            half, zero, zero, half,
        ],
    )
    .expect("valid projector")
}

/// Conditional `(corr, herald)` for one `(j, s)` round, computed on the
/// full 8-dimensional system in (Alice, Bob, Referee) qubit order: Alice
/// projects along `b_j`, Bob projects (Bob, Referee) onto the maximally
/// correlated Bell state, and a lost Bob qubit scales both outcomes by
/// `eta_m`.
pub fn trace_oracle_terms(
    rho_ab: &DensityMatrix,
    j: usize,
    s: i8,
    ds: &DirectionSet,
    model: &PreparationModel,
    eta_m: f64,
) -> (f64, f64) {
    let omega = state_from_bloch(&model.bloch(j, s, ds).unwrap()).unwrap();
    let full = tensor(rho_ab.op(), omega.op()).unwrap();
    let (pi_plus, pi_minus) = pauli_projectors(ds.direction(j)).unwrap();
    let bell = phi_plus_projector();
    let p = |alice: &HermitianOp| -> f64 {
        let effect = tensor(alice, &bell).unwrap();
        effect.trace_product(&full).unwrap().re
    };
    let p_plus = eta_m * p(&pi_plus);
    let p_minus = eta_m * p(&pi_minus);
    (p_plus - p_minus, p_plus + p_minus)
}

/// Assemble the exact score from oracle terms.
pub fn trace_oracle_score(
    rho_ab: &DensityMatrix,
    ds: &DirectionSet,
    model: &PreparationModel,
    eta_m: f64,
    r: f64,
    c: f64,
) -> f64 {
    let n = ds.n();
    let mut total = 0.0;
    for j in 1..=n {
        for s in [1i8, -1i8] {
            let (corr, herald) = trace_oracle_terms(rho_ab, j, s, ds, model, eta_m);
            total += s as f64 * corr - r * c * herald;
        }
    }
    total / (2.0 * n as f64)
}
