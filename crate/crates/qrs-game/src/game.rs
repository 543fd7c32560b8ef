//! The quantum-refereed steering game: referee preparation, payoff and
//! score function, exact honest-player scores, and adversarial
//! (local-hidden-state plus one-way Bob→Alice communication) scores with
//! exhaustive cheat search.
//!
//! Conventions fixed here: honest Bob's joint measurement is the projection
//! of (Bob ⊗ referee) onto `(|00⟩ + |11⟩)/√2`, so the effective element on
//! Bob's shared qubit for outcome `b = 1` is `ωᵀ/2`. Alice handles losses
//! by reporting null (rounds excluded from the conditional score); Bob
//! reports `b = 0` on loss. A cheating strategy is scored against the
//! bound at its own induced heralding.

use std::collections::HashMap;

use crate::bounds::{
    steering_bound, steering_bound_from_table, BoundResult, DTable, PreparationReport, r_factor,
};
use crate::error::{Error, Result};
use crate::linalg::{pauli_dot, state_from_bloch, BlochVector, DensityMatrix, HermitianOp};
use crate::settings::DirectionSet;

/// Certificate tolerance: a cheat search passes when its supremum does not
/// exceed this.
pub const CERTIFICATE_TOL: f64 = 1e-9;
/// Hard cap on n for the exhaustive cheat search.
pub const CHEAT_SEARCH_CAP: usize = 10;

/// Game configuration: settings, heralding efficiency, preparation factor,
/// and the steering bound (always derived, never free).
#[derive(Debug, Clone)]
pub struct ScoreSpec {
    ds: DirectionSet,
    eta_h: f64,
    r: f64,
    bound: BoundResult,
}

impl ScoreSpec {
    /// Build a spec; the bound `C_n(η_H)` is computed from the directions.
    pub fn new(ds: DirectionSet, eta_h: f64, r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Config(format!("r = {r} must be a finite value >= 0")));
        }
        let bound = steering_bound(&ds, eta_h)?;
        Ok(ScoreSpec { ds, eta_h, r, bound })
    }

    pub fn ds(&self) -> &DirectionSet {
        &self.ds
    }

    pub fn n(&self) -> usize {
        self.ds.n()
    }

    pub fn eta_h(&self) -> f64 {
        self.eta_h
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `C_n(η_H)`.
    pub fn bound_value(&self) -> f64 {
        self.bound.value
    }

    pub fn bound(&self) -> &BoundResult {
        &self.bound
    }

    fn d_table(&self) -> DTable {
        DTable::from_values(self.bound.d_table.clone())
    }
}

/// How the referee actually prepares `ω_{j,s}`.
#[derive(Debug, Clone, PartialEq)]
pub enum PreparationModel {
    /// Perfect preparation `(I + s b_j·σ)/2`.
    Exact,
    /// Isotropic depolarization: `(I + v s b_j·σ)/2`.
    Visibility(f64),
    /// Degenerate preparation `(I + s v·σ)/2` independent of `j`.
    FixedState(BlochVector),
    /// Tomography report of the vectors actually prepared.
    Report(PreparationReport),
}

impl PreparationModel {
    /// Bloch vector of the state delivered for `(j, s)`.
    pub fn bloch(&self, j: usize, s: i8, ds: &DirectionSet) -> Result<BlochVector> {
        let sf = s as f64;
        match self {
            PreparationModel::Exact => Ok(ds.direction(j).scale(sf)),
            PreparationModel::Visibility(v) => {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::Config(format!("visibility {v} outside [0, 1]")));
                }
                Ok(ds.direction(j).scale(v * sf))
            }
            PreparationModel::FixedState(v) => {
                if v.norm() > 1.0 + 1e-9 {
                    return Err(Error::OutsideBlochBall(v.norm()));
                }
                Ok(v.scale(sf))
            }
            PreparationModel::Report(rep) => {
                if rep.n() != ds.n() {
                    return Err(Error::DimensionMismatch(rep.n(), ds.n()));
                }
                Ok(*rep.vector(j, s))
            }
        }
    }

    /// The preparation report induced by this model.
    pub fn to_report(&self, ds: &DirectionSet) -> Result<PreparationReport> {
        match self {
            PreparationModel::Exact => Ok(PreparationReport::perfect(ds)),
            PreparationModel::Visibility(v) => PreparationReport::visibility(ds, *v),
            PreparationModel::FixedState(v) => PreparationReport::fixed_state(ds.n(), v),
            PreparationModel::Report(rep) => Ok(rep.clone()),
        }
    }

    /// The r-factor appropriate for this model. `Exact` means trusted
    /// perfect preparation, so `r = 1`; every other kind runs the
    /// closed-form r on its induced report.
    pub fn r_factor(&self, ds: &DirectionSet, bound: &BoundResult) -> Result<f64> {
        match self {
            PreparationModel::Exact => Ok(1.0),
            other => Ok(r_factor(&other.to_report(ds)?, ds, bound)?.value),
        }
    }
}

/// Per-round payoff `(a·s − r·c)·b`.
pub fn payoff(a: i8, b: u8, s: i8, r: f64, c: f64) -> f64 {
    ((a as f64) * (s as f64) - r * c) * (b as f64)
}

/// The state the referee sends for `(j, s)` under a preparation model.
pub fn referee_state(
    j: usize,
    s: i8,
    ds: &DirectionSet,
    model: &PreparationModel,
) -> Result<DensityMatrix> {
    state_from_bloch(&model.bloch(j, s, ds)?)
}

/// Projectors `(I ± b·σ)/2` onto the ±1 outcomes of measuring along `b`.
pub fn pauli_projectors(b: &BlochVector) -> Result<(HermitianOp, HermitianOp)> {
    let i2 = HermitianOp::identity(2)?;
    let sigma = pauli_dot(b);
    Ok((i2.add(&sigma)?.scale(0.5), i2.sub(&sigma)?.scale(0.5)))
}

/// Effective POVM element on Bob's shared qubit for outcome `b = 1`:
/// projecting (Bob ⊗ referee) onto `(|00⟩ + |11⟩)/√2` with the referee
/// in state `ω` gives `ωᵀ/2`.
pub fn honest_bob_effective_povm(omega: &DensityMatrix) -> HermitianOp {
    omega.op().transpose().scale(0.5)
}

/// Per-(j, s) conditional terms and the assembled score.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingScore {
    pub j: usize,
    pub s: i8,
    /// `⟨ab⟩_{j,s}` conditioned on Alice answering.
    pub corr: f64,
    /// `⟨b⟩_{j,s}` conditioned on Alice answering.
    pub herald: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreBreakdown {
    pub per_setting: Vec<SettingScore>,
    /// `S = (1/2n) Σ_{j,s} [s·corr − r·C·herald]`.
    pub total: f64,
    /// Fraction of non-null answers by Alice.
    pub alice_herald: f64,
}

/// Exact quantum-mechanical score for honest players sharing `rho_ab`.
///
/// Honest Alice measures `b_j·σ` and answers with probability `η_H`
/// independent of the outcome, so conditioning on non-null answers leaves
/// the expectations unchanged. Honest Bob's measurement succeeds with
/// probability `eta_m`; failures are reported as `b = 0`.
pub fn exact_honest_score(
    rho_ab: &DensityMatrix,
    spec: &ScoreSpec,
    model: &PreparationModel,
    eta_m: f64,
) -> Result<ScoreBreakdown> {
    if rho_ab.dim() != 4 {
        return Err(Error::DimensionMismatch(rho_ab.dim(), 4));
    }
    if !(0.0..=1.0).contains(&eta_m) {
        return Err(Error::InvalidEtaM(eta_m));
    }
    let n = spec.n();
    let rc = spec.r() * spec.bound_value();
    let mut per_setting = Vec::with_capacity(2 * n);
    let mut total = 0.0;
    for j in 1..=n {
        let (proj_plus, proj_minus) = pauli_projectors(spec.ds().direction(j))?;
        for s in [1i8, -1i8] {
            let omega = referee_state(j, s, spec.ds(), model)?;
            let effective = honest_bob_effective_povm(&omega);
            let p_plus_b1 = proj_plus
                .tensor(&effective)?
                .trace_product(rho_ab.op())?
                .re;
            let p_minus_b1 = proj_minus
                .tensor(&effective)?
                .trace_product(rho_ab.op())?
                .re;
            let corr = eta_m * (p_plus_b1 - p_minus_b1);
            let herald = eta_m * (p_plus_b1 + p_minus_b1);
            total += (s as f64) * corr - rc * herald;
            per_setting.push(SettingScore { j, s, corr, herald });
        }
    }
    total /= 2.0 * n as f64;
    Ok(ScoreBreakdown {
        per_setting,
        total,
        alice_herald: spec.eta_h(),
    })
}

/// A local-hidden-state adversary: Bob measures a POVM on the delivered
/// state, forwards the guess `s̄`, and Alice answers on her favorable
/// settings only.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CheatStrategy {
    /// POVM weight, `0 ≤ μ ≤ 1/(1 + |m|)`.
    pub mu: f64,
    /// POVM direction, `|m| ≤ 1`.
    pub m: BlochVector,
    /// Favorable settings (1-based). Alice answers only on these.
    pub favorable: Vec<usize>,
    /// Alice's answer per forwarded guess: index 0 for `s̄ = +1`,
    /// index 1 for `s̄ = −1`; `None` means report null.
    pub report_rule: [Option<i8>; 2],
    /// Probability Bob reports `b = 1` per guess, same indexing.
    pub report_weight: [f64; 2],
}

impl CheatStrategy {
    /// The natural deterministic strategy: answer `a = s̄` on the given
    /// favorable set, Bob always reports 1.
    pub fn forwarding(mu: f64, m: BlochVector, favorable: Vec<usize>) -> Self {
        CheatStrategy {
            mu,
            m,
            favorable,
            report_rule: [Some(1), Some(-1)],
            report_weight: [1.0, 1.0],
        }
    }

    fn sbar_index(sbar: i8) -> usize {
        if sbar > 0 {
            0
        } else {
            1
        }
    }

    pub fn rule(&self, sbar: i8) -> Option<i8> {
        self.report_rule[Self::sbar_index(sbar)]
    }

    pub fn weight(&self, sbar: i8) -> f64 {
        self.report_weight[Self::sbar_index(sbar)]
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let m_norm = self.m.norm();
        if m_norm > 1.0 + 1e-12 {
            return Err(Error::InvalidStrategy(format!(
                "POVM direction norm {m_norm} exceeds 1"
            )));
        }
        if self.mu < 0.0 || self.mu * (1.0 + m_norm) > 1.0 + 1e-12 {
            return Err(Error::InvalidStrategy(format!(
                "mu = {} violates 0 <= mu(1+|m|) <= 1",
                self.mu
            )));
        }
        let any_answer = self.report_rule.iter().any(|r| r.is_some());
        if any_answer && self.favorable.is_empty() {
            return Err(Error::InvalidStrategy(
                "favorable set empty while Alice answers".into(),
            ));
        }
        let mut seen = vec![false; n + 1];
        for &j in &self.favorable {
            if j == 0 || j > n {
                return Err(Error::InvalidStrategy(format!(
                    "favorable setting {j} outside 1..={n}"
                )));
            }
            if seen[j] {
                return Err(Error::InvalidStrategy(format!(
                    "favorable setting {j} repeated"
                )));
            }
            seen[j] = true;
        }
        for (&a, &w) in self.report_rule.iter().zip(&self.report_weight) {
            if let Some(a) = a {
                if a != 1 && a != -1 {
                    return Err(Error::InvalidStrategy(format!(
                        "report value {a} must be +1 or -1"
                    )));
                }
            }
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidStrategy(format!(
                    "report weight {w} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Closed-form conditional score of a cheating strategy.
///
/// Bob measures `{μ(I + m·σ), I − μ(I + m·σ)}` on the delivered state and
/// forwards the guess; Alice answers per the rule on favorable settings and
/// null otherwise. The score is conditioned on Alice's non-null answers and
/// the strategy is charged `r·C_n(η)` at its own induced heralding `η`.
pub fn cheat_score(
    strategy: &CheatStrategy,
    spec: &ScoreSpec,
    model: &PreparationModel,
) -> Result<f64> {
    let n = spec.n();
    strategy.validate(n)?;
    // First pass: induced heralding.
    let mut valid_weight = 0.0;
    let mut terms: Vec<(f64, i8, i8)> = Vec::new(); // (probability, a, s)
    for &j in &strategy.favorable {
        for s in [1i8, -1i8] {
            let v = model.bloch(j, s, spec.ds())?;
            let p_plus = strategy.mu * (1.0 + strategy.m.dot(&v));
            for (sbar, p_sbar) in [(1i8, p_plus), (-1i8, 1.0 - p_plus)] {
                if let Some(a) = strategy.rule(sbar) {
                    valid_weight += p_sbar;
                    terms.push((p_sbar * strategy.weight(sbar), a, s));
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
    let c_induced = steering_bound_from_table(&spec.d_table(), eta_induced)?.value;
    let rc = spec.r() * c_induced;
    let numerator: f64 = terms
        .iter()
        .map(|&(w, a, s)| w * ((a as f64) * (s as f64) - rc))
        .sum();
    Ok(numerator / valid_weight)
}

/// Grid for the exhaustive cheat search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid {
    /// Icosphere subdivision level for POVM directions; level 3 gives 642.
    pub povm_subdivisions: u32,
    /// Number of μ samples on `[0, 1/(1+|m|)]`.
    pub mu_points: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            povm_subdivisions: 3,
            mu_points: 101,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheatSearchResult {
    /// Largest score found over the whole grid.
    pub supremum: f64,
    /// A strategy attaining the supremum (first in enumeration order).
    pub best: CheatStrategy,
    /// True when `supremum ≤ CERTIFICATE_TOL`.
    pub certified: bool,
    /// Number of POVM directions in the grid actually used.
    pub povm_directions: usize,
    /// Number of (subset, direction, μ, rule, weight) points scored.
    pub strategies_scored: u64,
}

/// Unit vectors from subdividing an icosahedron `level` times;
/// `10·4^level + 2` vertices.
pub fn icosphere_directions(level: u32) -> Vec<BlochVector> {
    let t = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut verts: Vec<BlochVector> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| BlochVector::new(x, y, z).normalized().unwrap())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoint_cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<BlochVector>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint_cache.entry(key).or_insert_with(|| {
                let mid = (verts[a] + verts[b]).scale(0.5).normalized().unwrap();
                verts.push(mid);
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    verts
}

/// Exhaustive deterministic-strategy search: every nonempty favorable set,
/// every answer rule, report weights at their {0, 1} endpoints, POVM
/// directions on an icosphere grid, μ sampled on its allowed interval.
///
/// The maximum is reduced in a fixed enumeration order (first strictly
/// greater strategy wins), so the result is deterministic.
pub fn cheat_search(
    spec: &ScoreSpec,
    model: &PreparationModel,
    grid: &SearchGrid,
) -> Result<CheatSearchResult> {
    let n = spec.n();
    if n > CHEAT_SEARCH_CAP {
        return Err(Error::TooManySettings {
            n,
            what: "cheat-strategy enumeration".into(),
            cap: CHEAT_SEARCH_CAP,
        });
    }
    if grid.mu_points < 2 {
        return Err(Error::Config("mu grid needs at least 2 points".into()));
    }
    let table = spec.d_table();
    // rc charged to a strategy answering on k settings: bound at heralding k/n.
    let mut rc_by_size = vec![0.0f64; n + 1];
    for (k, rc) in rc_by_size.iter_mut().enumerate().skip(1) {
        *rc = spec.r() * steering_bound_from_table(&table, k as f64 / n as f64)?.value;
    }
    let mut delivered = vec![[BlochVector::ZERO; 2]; n];
    for j in 1..=n {
        delivered[j - 1] = [
            model.bloch(j, 1, spec.ds())?,
            model.bloch(j, -1, spec.ds())?,
        ];
    }
    let dirs = icosphere_directions(grid.povm_subdivisions);
    let rules: [(i8, i8); 4] = [(1, -1), (1, 1), (-1, 1), (-1, -1)];
    let weights: [(f64, f64); 4] = [(1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)];

    let mut best_score = f64::NEG_INFINITY;
    let mut best: Option<CheatStrategy> = None;
    let mut scored: u64 = 0;
    for mask in 1u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).map(|j| j + 1).collect();
        let f = members.len();
        let ff = f as f64;
        let rc = rc_by_size[f];
        let mut sum_v = [BlochVector::ZERO; 2];
        for &j in &members {
            sum_v[0] = sum_v[0] + delivered[j - 1][0];
            sum_v[1] = sum_v[1] + delivered[j - 1][1];
        }
        for m in &dirs {
            let m_dot = [m.dot(&sum_v[0]), m.dot(&sum_v[1])];
            let mu_max = 1.0 / (1.0 + m.norm());
            for step in 0..grid.mu_points {
                let mu = mu_max * step as f64 / (grid.mu_points - 1) as f64;
                // Summed guess probabilities over the favorable set,
                // per true sign s (index 0: s = +1, 1: s = −1).
                let p_plus = [mu * (ff + m_dot[0]), mu * (ff + m_dot[1])];
                let p_minus = [ff - p_plus[0], ff - p_plus[1]];
                for &(a_plus, a_minus) in &rules {
                    for &(g_plus, g_minus) in &weights {
                        let mut numerator = 0.0;
                        for (si, s) in [(0usize, 1.0f64), (1, -1.0)] {
                            numerator += g_plus * ((a_plus as f64) * s - rc) * p_plus[si];
                            numerator += g_minus * ((a_minus as f64) * s - rc) * p_minus[si];
                        }
                        let score = numerator / (2.0 * ff);
                        scored += 1;
                        if score > best_score {
                            best_score = score;
                            best = Some(CheatStrategy {
                                mu,
                                m: *m,
                                favorable: members.clone(),
                                report_rule: [Some(a_plus), Some(a_minus)],
                                report_weight: [g_plus, g_minus],
                            });
                        }
                    }
                }
            }
        }
    }
    let best = best.expect("nonempty grid");
    Ok(CheatSearchResult {
        supremum: best_score,
        certified: best_score <= CERTIFICATE_TOL,
        povm_directions: dirs.len(),
        strategies_scored: scored,
        best,
    })
}

/// The maximally entangled state `(|00⟩ + |11⟩)/√2` as a density matrix.
pub fn phi_plus() -> DensityMatrix {
    let mut op = HermitianOp::zeros(4).unwrap();
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            op.set(i, j, num_complex::Complex64::new(0.5, 0.0));
        }
    }
    DensityMatrix::new(op).unwrap()
}

/// Product state of two qubits given by their Bloch vectors.
pub fn product_state(a: &BlochVector, b: &BlochVector) -> Result<DensityMatrix> {
    let rho = state_from_bloch(a)?.op().tensor(state_from_bloch(b)?.op())?;
    DensityMatrix::new(rho)
}

/// Werner state `v |Φ⁺⟩⟨Φ⁺| + (1 − v) I/4`.
pub fn werner(v: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Config(format!("werner parameter {v} outside [0, 1]")));
    }
    let op = phi_plus()
        .op()
        .scale(v)
        .add(&HermitianOp::identity(4)?.scale((1.0 - v) / 4.0))?;
    DensityMatrix::new(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::builtin_directions;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn spec(family: &str, n: usize, eta_h: f64, r: f64) -> ScoreSpec {
        ScoreSpec::new(builtin_directions(family, n).unwrap(), eta_h, r).unwrap()
    }

    #[test]
    fn payoff_examples() {
        assert_abs_diff_eq!(payoff(1, 1, 1, 1.0, 0.5), 0.5);
        assert_abs_diff_eq!(payoff(-1, 1, 1, 1.0, 0.5), -1.5);
        assert_abs_diff_eq!(payoff(1, 0, -1, 1.0, 0.9), 0.0);
    }

    #[test]
    fn referee_state_examples() {
        let ds = builtin_directions("orthogonal-2", 2).unwrap();
        let omega = referee_state(1, 1, &ds, &PreparationModel::Exact).unwrap();
        // (I + σx)/2
        assert_abs_diff_eq!(omega.op().get(0, 1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(omega.op().get(0, 0).re, 0.5, epsilon = 1e-15);

        let mixed = referee_state(1, 1, &ds, &PreparationModel::Visibility(0.0)).unwrap();
        assert_abs_diff_eq!(mixed.op().get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(mixed.op().get(0, 1).norm(), 0.0, epsilon = 1e-15);

        let fixed =
            referee_state(2, -1, &ds, &PreparationModel::FixedState(BlochVector::X)).unwrap();
        // (I − σx)/2
        assert_abs_diff_eq!(fixed.op().get(0, 1).re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn effective_povm_examples() {
        let up = state_from_bloch(&BlochVector::Z).unwrap();
        let m = honest_bob_effective_povm(&up);
        assert_abs_diff_eq!(m.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(1, 1).re, 0.0, epsilon = 1e-15);

        let mixed = state_from_bloch(&BlochVector::ZERO).unwrap();
        let m = honest_bob_effective_povm(&mixed);
        assert_abs_diff_eq!(m.get(0, 0).re, 0.25, epsilon = 1e-15);

        // transpose flips σ_y: ω = (I+σy)/2 → (I−σy)/4
        let y = state_from_bloch(&BlochVector::Y).unwrap();
        let m = honest_bob_effective_povm(&y);
        let expected = HermitianOp::identity(2)
            .unwrap()
            .sub(&pauli_dot(&BlochVector::Y))
            .unwrap()
            .scale(0.25);
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.get(i, j) - expected.get(i, j)).norm() <= 1e-15);
            }
        }
        // 0 ≤ effective ≤ I
        assert!(m.lambda_min() >= -1e-12);
        assert!(m.lambda_max() <= 1.0 + 1e-12);
    }

    #[test]
    fn honest_score_closed_form_orthogonal_2() {
        let spec = spec("orthogonal-2", 2, 1.0, 1.0);
        let result =
            exact_honest_score(&phi_plus(), &spec, &PreparationModel::Exact, 1.0).unwrap();
        // (1 − √2/2)/4, frozen from the 8-dimensional trace oracle
        assert_abs_diff_eq!(result.total, 0.073_223_304_703_363_12, epsilon = 1e-10);

        let half = exact_honest_score(&phi_plus(), &spec, &PreparationModel::Exact, 0.5).unwrap();
        assert_abs_diff_eq!(half.total, 0.036_611_652_351_681_56, epsilon = 1e-10);
    }

    #[test]
    fn honest_score_recomposes_from_terms() {
        let spec = spec("orthogonal-3", 3, 0.8, 1.0);
        let result =
            exact_honest_score(&phi_plus(), &spec, &PreparationModel::Exact, 0.7).unwrap();
        let rc = spec.r() * spec.bound_value();
        let recomposed: f64 = result
            .per_setting
            .iter()
            .map(|t| (t.s as f64) * t.corr - rc * t.herald)
            .sum::<f64>()
            / (2.0 * spec.n() as f64);
        assert_abs_diff_eq!(result.total, recomposed, epsilon = 1e-12);
        assert!(result
            .per_setting
            .iter()
            .all(|t| (0.0..=1.0).contains(&t.herald)));
    }

    #[test]
    fn product_state_never_positive() {
        let spec = spec("orthogonal-2", 2, 1.0, 1.0);
        let rho = product_state(&BlochVector::Z, &BlochVector::Z).unwrap();
        let result = exact_honest_score(&rho, &spec, &PreparationModel::Exact, 1.0).unwrap();
        assert!(result.total <= 1e-9, "score {}", result.total);
    }

    #[test]
    fn bob_loss_scales_every_term_linearly() {
        let spec = spec("cube-4", 4, 0.9, 1.0);
        let full = exact_honest_score(&phi_plus(), &spec, &PreparationModel::Exact, 1.0).unwrap();
        for eta_m in [0.0, 0.25, 0.5, 0.75] {
            let scaled =
                exact_honest_score(&phi_plus(), &spec, &PreparationModel::Exact, eta_m).unwrap();
            assert_abs_diff_eq!(scaled.total, eta_m * full.total, epsilon = 1e-12);
            for (a, b) in scaled.per_setting.iter().zip(&full.per_setting) {
                assert_abs_diff_eq!(a.corr, eta_m * b.corr, epsilon = 1e-12);
                assert_abs_diff_eq!(a.herald, eta_m * b.herald, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cheat_score_single_setting_scores_zero_against_induced_bound() {
        // Bob learns s perfectly on one favorable setting of two; the
        // strategy heralds at 1/2 where the bound is 1, so the score is 0.
        let spec = spec("orthogonal-2", 2, 1.0, 1.0);
        let strategy = CheatStrategy::forwarding(0.5, BlochVector::X, vec![1]);
        let score = cheat_score(&strategy, &spec, &PreparationModel::Exact).unwrap();
        assert_abs_diff_eq!(score, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cheat_score_blind_bob_is_negative() {
        let spec = spec("orthogonal-3", 3, 1.0, 1.0);
        let strategy = CheatStrategy::forwarding(0.0, BlochVector::Z, vec![1, 2, 3]);
        let score = cheat_score(&strategy, &spec, &PreparationModel::Exact).unwrap();
        assert_abs_diff_eq!(score, -spec.bound_value(), epsilon = 1e-12);
    }

    #[test]
    fn cheat_score_degenerate_preparation_example() {
        // Referee leaks: every setting prepared along b_1; Bob measures b_1
        // and knows s with certainty. With r = 1 the cheat scores 1 − C_n(1);
        // with r = 1/C_n(1) the elevation is fully suppressed.
        let spec_r1 = spec("orthogonal-3", 3, 1.0, 1.0);
        let model = PreparationModel::FixedState(BlochVector::X);
        let strategy = CheatStrategy::forwarding(0.5, BlochVector::X, vec![1, 2, 3]);
        let score = cheat_score(&strategy, &spec_r1, &model).unwrap();
        assert_abs_diff_eq!(score, 1.0 - spec_r1.bound_value(), epsilon = 1e-12);
        assert!(score > 0.0);

        let r = 1.0 / spec_r1.bound_value();
        let spec_suppressed = spec("orthogonal-3", 3, 1.0, r);
        let score = cheat_score(&strategy, &spec_suppressed, &model).unwrap();
        assert_abs_diff_eq!(score, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cheat_score_rejects_empty_favorable_with_answers() {
        let spec = spec("orthogonal-2", 2, 1.0, 1.0);
        let strategy = CheatStrategy::forwarding(0.5, BlochVector::X, vec![]);
        assert!(matches!(
            cheat_score(&strategy, &spec, &PreparationModel::Exact),
            Err(Error::InvalidStrategy(_))
        ));
    }

    #[test]
    fn weighted_report_never_beats_endpoints() {
        let spec = spec("orthogonal-2", 2, 1.0, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let m = BlochVector::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let m = if m.norm() > 1.0 { m.normalized().unwrap() } else { m };
            let mu = rng.gen_range(0.0..1.0) / (1.0 + m.norm());
            let favorable = if rng.gen_bool(0.5) { vec![1] } else { vec![1, 2] };
            let rule = [Some(if rng.gen_bool(0.5) { 1 } else { -1 }),
                        Some(if rng.gen_bool(0.5) { 1 } else { -1 })];
            let fractional = CheatStrategy {
                mu,
                m,
                favorable: favorable.clone(),
                report_rule: rule,
                report_weight: [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)],
            };
            let score = cheat_score(&fractional, &spec, &PreparationModel::Exact).unwrap();
            let endpoint_max = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
                .iter()
                .map(|&(g0, g1)| {
                    let endpoint = CheatStrategy {
                        report_weight: [g0, g1],
                        ..fractional.clone()
                    };
                    cheat_score(&endpoint, &spec, &PreparationModel::Exact).unwrap()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(score <= endpoint_max + 1e-12);
        }
    }

    #[test]
    fn icosphere_sizes() {
        assert_eq!(icosphere_directions(0).len(), 12);
        assert_eq!(icosphere_directions(1).len(), 42);
        assert_eq!(icosphere_directions(2).len(), 162);
        assert_eq!(icosphere_directions(3).len(), 642);
        for v in icosphere_directions(2) {
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cheat_search_coarse_grid_certifies_orthogonal_2() {
        let spec = spec("orthogonal-2", 2, 1.0, 1.0);
        let grid = SearchGrid {
            povm_subdivisions: 1,
            mu_points: 21,
        };
        let result = cheat_search(&spec, &PreparationModel::Exact, &grid).unwrap();
        assert!(result.certified, "supremum {}", result.supremum);
        assert!(result.supremum >= -1e-3);
    }

    #[test]
    fn cheat_search_refuses_large_n() {
        let ds = crate::settings::DirectionSet::new(
            (0..11)
                .map(|i| {
                    let theta = 0.2 + 0.12 * i as f64;
                    let phi = 0.6 * i as f64;
                    BlochVector::new(
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                        theta.cos(),
                    )
                })
                .collect(),
        )
        .unwrap();
        let spec = ScoreSpec::new(ds, 1.0, 1.0).unwrap();
        assert!(matches!(
            cheat_search(&spec, &PreparationModel::Exact, &SearchGrid::default()),
            Err(Error::TooManySettings { .. })
        ));
    }

    #[test]
    fn werner_states_validate() {
        assert!(werner(0.0).is_ok());
        assert!(werner(1.0).is_ok());
        assert!(werner(1.5).is_err());
    }
}
