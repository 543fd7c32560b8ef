//! Seeded round-by-round simulation of the game.
//!
//! Each round samples `(j, s)` uniformly, draws player outcomes from the
//! exact single-round distributions (precomputed per `(j, s)`), and
//! accumulates the conditional score over Alice's valid rounds. The RNG is
//! ChaCha8 seeded from the config, single-threaded streaming accumulation,
//! so identical configs produce bit-identical estimates.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{steering_bound_from_table, DTable};
use crate::error::{Error, Result};
use crate::game::{
    honest_bob_effective_povm, pauli_projectors, referee_state, CheatStrategy, PreparationModel,
    ScoreSpec,
};
use crate::linalg::DensityMatrix;
use crate::settings::builtin_directions;

/// Who plays the game in a simulation.
#[derive(Debug, Clone)]
pub enum Players {
    Honest { rho_ab: DensityMatrix, eta_m: f64 },
    Cheat(CheatStrategy),
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub spec: ScoreSpec,
    pub model: PreparationModel,
    pub players: Players,
    pub rounds: u64,
    pub seed: u64,
}

/// Per-(j, s) tallies from a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsCount {
    pub j: usize,
    pub s: i8,
    /// Rounds with this (j, s) where Alice answered.
    pub valid: u64,
    /// Valid rounds where Bob reported 1.
    pub b1: u64,
    /// Sum of `a·b` over valid rounds.
    pub ab_sum: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEstimate {
    /// Conditional empirical score over Alice-valid rounds.
    pub mean: f64,
    /// Sample standard deviation of per-valid-round payoff over √rounds_valid.
    pub std_error: f64,
    /// Empirical non-null fraction of Alice's answers.
    pub eta_h_hat: f64,
    pub rounds_valid: u64,
    pub per_js_counts: Vec<JsCount>,
}

// Precomputed single-round distribution for one (j, s).
#[derive(Debug, Clone, Copy)]
struct RoundDist {
    // Probability Alice's outcome (honest) or answer (cheat) is +1,
    // conditioned on her answering at all.
    p_a_plus: f64,
    // Probability Alice answers at all for this (j, s).
    p_valid: f64,
    // P(b = 1 | a = +1) and P(b = 1 | a = −1), conditioned on valid.
    p_b1_given: [f64; 2],
    // Payoff constant r·C charged per round.
    rc: f64,
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

fn honest_round_dists(
    spec: &ScoreSpec,
    model: &PreparationModel,
    rho_ab: &DensityMatrix,
    eta_m: f64,
) -> Result<Vec<[RoundDist; 2]>> {
    if rho_ab.dim() != 4 {
        return Err(Error::DimensionMismatch(rho_ab.dim(), 4));
    }
    if !(0.0..=1.0).contains(&eta_m) {
        return Err(Error::InvalidEtaM(eta_m));
    }
    let n = spec.n();
    let rc = spec.r() * spec.bound_value();
    let mut dists = Vec::with_capacity(n);
    for j in 1..=n {
        let (proj_plus, proj_minus) = pauli_projectors(spec.ds().direction(j))?;
        let mut pair = [RoundDist {
            p_a_plus: 0.0,
            p_valid: spec.eta_h(),
            p_b1_given: [0.0, 0.0],
            rc,
        }; 2];
        for (si, s) in [(0usize, 1i8), (1, -1)] {
            let omega = referee_state(j, s, spec.ds(), model)?;
            let effective = honest_bob_effective_povm(&omega);
            let p_plus_joint = eta_m
                * proj_plus
                    .tensor(&effective)?
                    .trace_product(rho_ab.op())?
                    .re;
            let p_minus_joint = eta_m
                * proj_minus
                    .tensor(&effective)?
                    .trace_product(rho_ab.op())?
                    .re;
            // Alice's marginal outcome distribution is loss-independent.
            let p_plus_marginal = proj_plus
                .tensor(&crate::linalg::HermitianOp::identity(2)?)?
                .trace_product(rho_ab.op())?
                .re;
            let p_plus_marginal = clamp_prob(p_plus_marginal);
            pair[si] = RoundDist {
                p_a_plus: p_plus_marginal,
                p_valid: spec.eta_h(),
                p_b1_given: [
                    if p_plus_marginal > 0.0 {
                        clamp_prob(p_plus_joint / p_plus_marginal)
                    } else {
                        0.0
                    },
                    if p_plus_marginal < 1.0 {
                        clamp_prob(p_minus_joint / (1.0 - p_plus_marginal))
                    } else {
                        0.0
                    },
                ],
                rc,
            };
        }
        dists.push(pair);
    }
    Ok(dists)
}

fn cheat_round_dists(
    spec: &ScoreSpec,
    model: &PreparationModel,
    strategy: &CheatStrategy,
) -> Result<Vec<[RoundDist; 2]>> {
    let n = spec.n();
    strategy.validate(n)?;
    // Induced heralding, matching the closed-form convention in cheat_score.
    let mut valid_weight = 0.0;
    for &j in &strategy.favorable {
        for s in [1i8, -1i8] {
            let v = model.bloch(j, s, spec.ds())?;
            let p_plus = clamp_prob(strategy.mu * (1.0 + strategy.m.dot(&v)));
            for (sbar, p_sbar) in [(1i8, p_plus), (-1i8, 1.0 - p_plus)] {
                if strategy.rule(sbar).is_some() {
                    valid_weight += p_sbar;
                }
            }
        }
    }
    if valid_weight <= 0.0 {
        return Err(Error::InvalidStrategy(
            "strategy never produces a valid answer".into(),
        ));
    }
    let eta_induced = (valid_weight / (2.0 * n as f64)).min(1.0);
    let table = DTable::from_values(spec.bound().d_table.clone());
    let rc = spec.r() * steering_bound_from_table(&table, eta_induced)?.value;

    let mut dists = Vec::with_capacity(n);
    for j in 1..=n {
        let favorable = strategy.favorable.contains(&j);
        let mut pair = [RoundDist {
            p_a_plus: 0.0,
            p_valid: 0.0,
            p_b1_given: [0.0, 0.0],
            rc,
        }; 2];
        if favorable {
            for (si, s) in [(0usize, 1i8), (1, -1)] {
                let v = model.bloch(j, s, spec.ds())?;
                let p_sbar_plus = clamp_prob(strategy.mu * (1.0 + strategy.m.dot(&v)));
                // Distribution over (a, b) induced by forwarding s̄.
                let mut p_valid = 0.0;
                let mut p_a_plus_joint = 0.0;
                let mut p_b1_given_a = [0.0f64; 2];
                for (sbar, p_sbar) in [(1i8, p_sbar_plus), (-1i8, 1.0 - p_sbar_plus)] {
                    if let Some(a) = strategy.rule(sbar) {
                        p_valid += p_sbar;
                        if a > 0 {
                            p_a_plus_joint += p_sbar;
                            p_b1_given_a[0] += p_sbar * strategy.weight(sbar);
                        } else {
                            p_b1_given_a[1] += p_sbar * strategy.weight(sbar);
                        }
                    }
                }
                let p_a_plus = if p_valid > 0.0 { p_a_plus_joint / p_valid } else { 0.0 };
                // Normalize b-probabilities per answer value.
                let p_b1_plus = if p_a_plus_joint > 0.0 {
                    p_b1_given_a[0] / p_a_plus_joint
                } else {
                    0.0
                };
                let p_minus_joint = p_valid - p_a_plus_joint;
                let p_b1_minus = if p_minus_joint > 0.0 {
                    p_b1_given_a[1] / p_minus_joint
                } else {
                    0.0
                };
                pair[si] = RoundDist {
                    p_a_plus,
                    p_valid,
                    p_b1_given: [clamp_prob(p_b1_plus), clamp_prob(p_b1_minus)],
                    rc,
                };
            }
        }
        dists.push(pair);
    }
    Ok(dists)
}

/// Run the seeded simulation.
pub fn simulate(cfg: &SimConfig) -> Result<ScoreEstimate> {
    if cfg.rounds == 0 {
        return Err(Error::Config("rounds must be >= 1".into()));
    }
    let dists = match &cfg.players {
        Players::Honest { rho_ab, eta_m } => {
            honest_round_dists(&cfg.spec, &cfg.model, rho_ab, *eta_m)?
        }
        Players::Cheat(strategy) => cheat_round_dists(&cfg.spec, &cfg.model, strategy)?,
    };
    let n = cfg.spec.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut counts: Vec<JsCount> = (1..=n)
        .flat_map(|j| {
            [1i8, -1i8].map(|s| JsCount {
                j,
                s,
                valid: 0,
                b1: 0,
                ab_sum: 0,
            })
        })
        .collect();
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut rounds_valid = 0u64;
    for _ in 0..cfg.rounds {
        let j = rng.gen_range(0..n);
        let si = usize::from(rng.gen_bool(0.5));
        let s: i8 = if si == 0 { 1 } else { -1 };
        let dist = &dists[j][si];
        if !rng.gen_bool(clamp_prob(dist.p_valid)) {
            continue;
        }
        let a: i8 = if rng.gen_bool(clamp_prob(dist.p_a_plus)) { 1 } else { -1 };
        let b: u8 = u8::from(rng.gen_bool(clamp_prob(
            dist.p_b1_given[usize::from(a < 0)],
        )));
        let payoff = crate::game::payoff(a, b, s, 1.0, dist.rc);
        sum += payoff;
        sum_sq += payoff * payoff;
        rounds_valid += 1;
        let slot = &mut counts[j * 2 + si];
        slot.valid += 1;
        slot.b1 += u64::from(b);
        slot.ab_sum += i64::from(a) * i64::from(b);
    }
    if rounds_valid == 0 {
        return Err(Error::NoValidRounds);
    }
    let mean = sum / rounds_valid as f64;
    let std_error = if rounds_valid > 1 {
        let variance =
            (sum_sq - rounds_valid as f64 * mean * mean) / (rounds_valid - 1) as f64;
        (variance.max(0.0) / rounds_valid as f64).sqrt()
    } else {
        0.0
    };
    Ok(ScoreEstimate {
        mean,
        std_error,
        eta_h_hat: rounds_valid as f64 / cfg.rounds as f64,
        rounds_valid,
        per_js_counts: counts,
    })
}

/// Sweep axes. Each variant carries the values to visit.
#[derive(Debug, Clone)]
pub enum SweepAxis {
    /// Heralding efficiency; the bound and (when requested) the r-factor
    /// are recomputed per point.
    EtaH(Vec<f64>),
    /// Bob's measurement efficiency (honest players only).
    EtaM(Vec<f64>),
    /// Preparation visibility; replaces the model per point.
    Visibility(Vec<f64>),
    /// Built-in family names; rebuilds the settings per point.
    Family(Vec<String>),
}

/// Whether sweeps keep the base r or recompute it from the preparation
/// model at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RPolicy {
    Fixed,
    FromModel,
}

#[derive(Debug)]
pub struct SweepRow {
    /// The axis value, rendered for output.
    pub label: String,
    pub result: Result<ScoreEstimate>,
}

/// Deterministic child seed for sweep point `index`: a splitmix64 step of
/// the base seed offset by the golden-ratio constant times `index + 1`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add((index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn point_config(base: &SimConfig, axis: &SweepAxis, index: usize, r_policy: RPolicy) -> Result<SimConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::EtaH(values) => {
            let eta = values[index];
            let ds = base.spec.ds().clone();
            let bound = crate::bounds::steering_bound(&ds, eta)?;
            let r = match r_policy {
                RPolicy::Fixed => base.spec.r(),
                RPolicy::FromModel => base.model.r_factor(&ds, &bound)?,
            };
            cfg.spec = ScoreSpec::new(ds, eta, r)?;
        }
        SweepAxis::EtaM(values) => match &mut cfg.players {
            Players::Honest { eta_m, .. } => *eta_m = values[index],
            Players::Cheat(_) => {
                return Err(Error::Config(
                    "eta_m sweep applies to honest players only".into(),
                ))
            }
        },
        SweepAxis::Visibility(values) => {
            cfg.model = PreparationModel::Visibility(values[index]);
            if r_policy == RPolicy::FromModel {
                let r = cfg.model.r_factor(base.spec.ds(), base.spec.bound())?;
                cfg.spec = ScoreSpec::new(base.spec.ds().clone(), base.spec.eta_h(), r)?;
            }
        }
        SweepAxis::Family(names) => {
            let name = &names[index];
            let n = crate::settings::BUILTIN_FAMILIES
                .iter()
                .find(|(f, _)| f == name)
                .map(|&(_, n)| n)
                .ok_or_else(|| Error::UnknownFamily(name.clone(), "see BUILTIN_FAMILIES".into()))?;
            let ds = builtin_directions(name, n)?;
            let bound = crate::bounds::steering_bound(&ds, base.spec.eta_h())?;
            let r = match r_policy {
                RPolicy::Fixed => base.spec.r(),
                RPolicy::FromModel => base.model.r_factor(&ds, &bound)?,
            };
            cfg.spec = ScoreSpec::new(ds, base.spec.eta_h(), r)?;
        }
    }
    cfg.seed = derive_seed(base.seed, index as u64);
    Ok(cfg)
}

/// One estimate per axis value; per-point errors are reported in the row
/// and do not abort the sweep.
pub fn sweep(base: &SimConfig, axis: &SweepAxis, r_policy: RPolicy) -> Vec<SweepRow> {
    let labels: Vec<String> = match axis {
        SweepAxis::EtaH(v) | SweepAxis::EtaM(v) | SweepAxis::Visibility(v) => {
            v.iter().map(|x| format!("{x}")).collect()
        }
        SweepAxis::Family(names) => names.clone(),
    };
    labels
        .into_iter()
        .enumerate()
        .map(|(index, label)| SweepRow {
            label,
            result: point_config(base, axis, index, r_policy).and_then(|cfg| simulate(&cfg)),
        })
        .collect()
}
