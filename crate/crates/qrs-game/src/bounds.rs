//! Steering bounds for the loss-tolerant game.
//!
//! `D_n(k)` is the best average correlation an adversary gets by answering
//! on its best k of n settings with optimal signs; `C_n(η_H)` is the
//! concave mixture of those values at heralding `η_H`; the r-factor
//! compensates imperfect referee preparation.
//!
//! Preparation-report file format: plain text, lines `j s x y z` with
//! `s ∈ {+1, -1}`, `#` starts a comment line; all 2n pairs must be covered.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::BlochVector;
use crate::settings::DirectionSet;

/// Hard cap for exhaustive subset/sign enumeration in `D_n(k)`.
pub const ENUMERATION_CAP: usize = 16;
/// Hard cap for the 2^n sign enumeration in the r-factor.
pub const R_FACTOR_CAP: usize = 24;

/// Cached table of `D_n(k)` for `k = 0…n` over one direction set.
#[derive(Debug, Clone, PartialEq)]
pub struct DTable {
    n: usize,
    values: Vec<f64>,
}

impl DTable {
    /// Compute all `D_n(k)` by exhaustive enumeration. Refuses n above
    /// [`ENUMERATION_CAP`].
    pub fn compute(ds: &DirectionSet) -> Result<Self> {
        let n = ds.n();
        if n > ENUMERATION_CAP {
            return Err(Error::TooManySettings {
                n,
                what: "subset/sign enumeration".into(),
                cap: ENUMERATION_CAP,
            });
        }
        let values = (0..=n).map(|k| d_nk_inner(ds, k)).collect();
        Ok(DTable { n, values })
    }

    /// Rehydrate a table from previously computed values `D_n(0)…D_n(n)`.
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "d_table must cover k = 0..=n");
        DTable {
            n: values.len() - 1,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `D_n(k)`.
    pub fn get(&self, k: usize) -> Result<f64> {
        self.values
            .get(k)
            .copied()
            .ok_or(Error::KOutOfRange { k, n: self.n })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn d_nk_inner(ds: &DirectionSet, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let n = ds.n();
    let dirs = ds.directions();
    let mut best = 0.0f64;
    // Subsets of size k as bitmasks; the first selected direction keeps a
    // fixed + sign (global sign symmetry).
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let members: Vec<&BlochVector> = (0..n)
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| &dirs[j])
            .collect();
        for signs in 0u32..(1u32 << (k - 1)) {
            let mut sum = *members[0];
            for (bit, d) in members.iter().enumerate().skip(1) {
                if signs >> (bit - 1) & 1 == 1 {
                    sum = sum - **d;
                } else {
                    sum = sum + **d;
                }
            }
            best = best.max(sum.norm() / k as f64);
        }
    }
    best
}

/// `D_n(k)`: the exact maximum of `|Σ_{j∈F} A_j b_j| / k` over all size-k
/// subsets F and sign patterns `A_j = ±1`.
pub fn d_nk(ds: &DirectionSet, k: usize) -> Result<f64> {
    if k > ds.n() {
        return Err(Error::KOutOfRange { k, n: ds.n() });
    }
    if ds.n() > ENUMERATION_CAP {
        return Err(Error::TooManySettings {
            n: ds.n(),
            what: "subset/sign enumeration".into(),
            cap: ENUMERATION_CAP,
        });
    }
    Ok(d_nk_inner(ds, k))
}

/// The heralding-dependent steering bound and the mixture achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub n: usize,
    pub eta_h: f64,
    /// `C_n(η_H)`.
    pub value: f64,
    /// `D_n(k)` for `k = 0…n`.
    pub d_table: Vec<f64>,
    /// Sparse optimal weights `(k, w_k)` with `Σ w_k = 1`, `Σ w_k k/n = η_H`.
    pub optimal_weights: Vec<(usize, f64)>,
}

/// `C_n(η_H)` over a direction set: the maximum of
/// `(1/(n η_H)) Σ_k w_k k D_n(k)` over mixtures with `Σ w_k = 1` and
/// `Σ w_k (k/n) = η_H`, including `k = 0` (answer nothing).
pub fn steering_bound(ds: &DirectionSet, eta_h: f64) -> Result<BoundResult> {
    let table = DTable::compute(ds)?;
    steering_bound_from_table(&table, eta_h)
}

/// Same as [`steering_bound`], reusing a cached `D_n(k)` table.
pub fn steering_bound_from_table(table: &DTable, eta_h: f64) -> Result<BoundResult> {
    if !(eta_h > 0.0 && eta_h <= 1.0) || !eta_h.is_finite() {
        return Err(Error::InvalidEta(eta_h));
    }
    let n = table.n();
    let target = n as f64 * eta_h;
    // The objective is linear with two equality constraints, so the
    // optimum sits on a support of at most two k values.
    let mut best_value = f64::NEG_INFINITY;
    let mut best_weights: Vec<(usize, f64)> = Vec::new();
    for k1 in 0..=n {
        for k2 in k1..=n {
            let (w1, w2) = if k1 == k2 {
                if (k1 as f64 - target).abs() > 1e-9 {
                    continue;
                }
                (1.0, 0.0)
            } else {
                if (k1 as f64) > target + 1e-12 || (k2 as f64) < target - 1e-12 {
                    continue;
                }
                let w2 = (target - k1 as f64) / (k2 - k1) as f64;
                (1.0 - w2, w2)
            };
            let value = (w1 * k1 as f64 * table.values()[k1]
                + w2 * k2 as f64 * table.values()[k2])
                / target;
            if value > best_value + 1e-15 {
                best_value = value;
                best_weights = if k1 == k2 {
                    vec![(k1, 1.0)]
                } else {
                    [(k1, w1), (k2, w2)]
                        .into_iter()
                        .filter(|&(_, w)| w > 1e-12)
                        .collect()
                };
            }
        }
    }
    Ok(BoundResult {
        n,
        eta_h,
        value: best_value,
        d_table: table.values().to_vec(),
        optimal_weights: best_weights,
    })
}

/// Referee-preparation tomography: the Bloch vectors `n_{j,s}` actually
/// prepared for each setting and sign.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationReport {
    // vectors[j-1][0] is n_{j,+1}, vectors[j-1][1] is n_{j,-1}
    vectors: Vec<[BlochVector; 2]>,
}

impl PreparationReport {
    pub fn new(vectors: Vec<[BlochVector; 2]>) -> Result<Self> {
        for (idx, pair) in vectors.iter().enumerate() {
            for v in pair {
                if v.norm() > 1.0 + 1e-9 {
                    return Err(Error::OutsideBlochBall(v.norm()));
                }
            }
            let _ = idx;
        }
        Ok(PreparationReport { vectors })
    }

    /// The exact preparation `n_{j,s} = s b_j`.
    pub fn perfect(ds: &DirectionSet) -> Self {
        PreparationReport {
            vectors: ds
                .directions()
                .iter()
                .map(|b| [*b, -*b])
                .collect(),
        }
    }

    /// Isotropic visibility: `n_{j,s} = v s b_j`.
    pub fn visibility(ds: &DirectionSet, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Config(format!("visibility {v} outside [0, 1]")));
        }
        Ok(PreparationReport {
            vectors: ds
                .directions()
                .iter()
                .map(|b| [b.scale(v), b.scale(-v)])
                .collect(),
        })
    }

    /// Degenerate preparation: `n_{j,s} = s v` for every setting.
    pub fn fixed_state(n: usize, v: &BlochVector) -> Result<Self> {
        if v.norm() > 1.0 + 1e-9 {
            return Err(Error::OutsideBlochBall(v.norm()));
        }
        Ok(PreparationReport {
            vectors: (0..n).map(|_| [*v, -*v]).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    /// `n_{j,s}` for 1-based `j` and `s ∈ {+1, −1}`.
    pub fn vector(&self, j: usize, s: i8) -> &BlochVector {
        &self.vectors[j - 1][if s > 0 { 0 } else { 1 }]
    }
}

/// Parse a preparation report covering settings `1…n`.
pub fn parse_preparation_report(contents: &str, n: usize, source_name: &str) -> Result<PreparationReport> {
    let mut slots: Vec<[Option<BlochVector>; 2]> = vec![[None, None]; n];
    for (lineno, line) in contents.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: lineno + 1,
                msg: format!("expected 5 fields 'j s x y z', found {}", fields.len()),
            });
        }
        let parse_err = |field: &str| Error::Parse {
            source_name: source_name.to_string(),
            line: lineno + 1,
            msg: format!("'{field}' could not be parsed"),
        };
        let j: usize = fields[0].parse().map_err(|_| parse_err(fields[0]))?;
        let s: i64 = fields[1].parse().map_err(|_| parse_err(fields[1]))?;
        if j == 0 || j > n {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: lineno + 1,
                msg: format!("setting index {j} outside 1..={n}"),
            });
        }
        if s != 1 && s != -1 {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: lineno + 1,
                msg: format!("sign {s} must be +1 or -1"),
            });
        }
        let mut xyz = [0.0f64; 3];
        for (slot, field) in xyz.iter_mut().zip(&fields[2..]) {
            *slot = field.parse().map_err(|_| parse_err(field))?;
        }
        slots[j - 1][if s > 0 { 0 } else { 1 }] =
            Some(BlochVector::new(xyz[0], xyz[1], xyz[2]));
    }
    let mut vectors = Vec::with_capacity(n);
    for (idx, pair) in slots.iter().enumerate() {
        let plus = pair[0].ok_or(Error::MissingPreparation { j: idx + 1, s: 1 })?;
        let minus = pair[1].ok_or(Error::MissingPreparation { j: idx + 1, s: -1 })?;
        vectors.push([plus, minus]);
    }
    PreparationReport::new(vectors)
}

/// Load a preparation report from a file.
pub fn load_preparation_report(path: impl AsRef<Path>, n: usize) -> Result<PreparationReport> {
    let path = path.as_ref();
    let contents = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_preparation_report(&contents, n, &path.display().to_string())
}

/// The r-factor together with the sign assignment attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct RFactor {
    pub value: f64,
    /// Maximizing signs `a_j ∈ {+1, −1}` in setting order.
    pub signs: Vec<i8>,
}

/// The preparation-imperfection factor: with
/// `A = Σ_j a_j (n_{j+} − n_{j−})/2` and `B = Σ_j (n_{j+} + n_{j−})/2`,
/// the maximum over sign assignments of
/// `[−⟨A,B⟩ + sqrt(⟨A,B⟩² + ⟨A,A⟩(n² − ⟨B,B⟩))] / [C_n(η_H)(n² − ⟨B,B⟩)]`.
///
/// Errors when `⟨B,B⟩ ≥ n²` (the denominator vanishes). Ties in the argmax
/// go to the first assignment in enumeration order.
pub fn r_factor(prep: &PreparationReport, ds: &DirectionSet, bound: &BoundResult) -> Result<RFactor> {
    let n = ds.n();
    if prep.n() != n {
        return Err(Error::DimensionMismatch(prep.n(), n));
    }
    if bound.n != n {
        return Err(Error::DimensionMismatch(bound.n, n));
    }
    if n > R_FACTOR_CAP {
        return Err(Error::TooManySettings {
            n,
            what: "sign enumeration".into(),
            cap: R_FACTOR_CAP,
        });
    }
    if !bound.value.is_finite() || bound.value <= 0.0 {
        return Err(Error::Config(format!(
            "steering bound {} must be positive",
            bound.value
        )));
    }
    let halves: Vec<(BlochVector, BlochVector)> = (1..=n)
        .map(|j| {
            let plus = *prep.vector(j, 1);
            let minus = *prep.vector(j, -1);
            ((plus - minus).scale(0.5), (plus + minus).scale(0.5))
        })
        .collect();
    let b_total = halves
        .iter()
        .fold(BlochVector::ZERO, |acc, (_, b)| acc + *b);
    let bb = b_total.dot(&b_total);
    let n2 = (n * n) as f64;
    if bb >= n2 - 1e-12 {
        return Err(Error::DegeneratePreparation(bb));
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_signs = vec![1i8; n];
    for pattern in 0u32..(1u32 << n) {
        let mut a = BlochVector::ZERO;
        for (j, (diff, _)) in halves.iter().enumerate() {
            if pattern >> j & 1 == 0 {
                a = a + *diff;
            } else {
                a = a - *diff;
            }
        }
        let ab = a.dot(&b_total);
        let aa = a.dot(&a);
        let numerator = -ab + (ab * ab + aa * (n2 - bb)).sqrt();
        if numerator > best {
            best = numerator;
            for (j, sign) in best_signs.iter_mut().enumerate() {
                *sign = if pattern >> j & 1 == 0 { 1 } else { -1 };
            }
        }
    }
    Ok(RFactor {
        value: best / (bound.value * (n2 - bb)),
        signs: best_signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::{builtin_directions, BUILTIN_FAMILIES};
    use approx::assert_abs_diff_eq;

    const SQRT2_OVER_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn d_nk_orthogonal_examples() {
        let ds2 = builtin_directions("orthogonal-2", 2).unwrap();
        // |±x ± z| / 2 = √2/2, frozen from the sign-pattern enumeration
        assert_abs_diff_eq!(d_nk(&ds2, 2).unwrap(), SQRT2_OVER_2, epsilon = 1e-12);
        assert_abs_diff_eq!(d_nk(&ds2, 1).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d_nk(&ds2, 0).unwrap(), 0.0, epsilon = 0.0);

        let ds3 = builtin_directions("orthogonal-3", 3).unwrap();
        // |x + y + z| / 3 = 1/√3
        assert_abs_diff_eq!(
            d_nk(&ds3, 3).unwrap(),
            1.0 / 3.0f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn d_nk_out_of_range() {
        let ds = builtin_directions("orthogonal-2", 2).unwrap();
        assert!(matches!(d_nk(&ds, 3), Err(Error::KOutOfRange { .. })));
    }

    #[test]
    fn d_nk_sign_flip_invariance() {
        let ds = builtin_directions("cube-4", 4).unwrap();
        let mut flipped = ds.directions().to_vec();
        flipped[2] = -flipped[2];
        let ds_flipped = DirectionSet::new(flipped).unwrap();
        for k in 0..=4 {
            assert_abs_diff_eq!(
                d_nk(&ds, k).unwrap(),
                d_nk(&ds_flipped, k).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn steering_bound_examples() {
        let ds = builtin_directions("orthogonal-2", 2).unwrap();
        let b = steering_bound(&ds, 1.0).unwrap();
        assert_abs_diff_eq!(b.value, SQRT2_OVER_2, epsilon = 1e-12);
        assert_eq!(b.optimal_weights, vec![(2, 1.0)]);

        // eta = 1/n: the k = 1 mixture gives exactly 1
        for &(family, n) in &BUILTIN_FAMILIES {
            let ds = builtin_directions(family, n).unwrap();
            let b = steering_bound(&ds, 1.0 / n as f64).unwrap();
            assert_abs_diff_eq!(b.value, 1.0, epsilon = 1e-12);
            // eta = 1/(2n): k ∈ {0, 1} mixture keeps the bound at 1
            let b = steering_bound(&ds, 0.5 / n as f64).unwrap();
            assert_abs_diff_eq!(b.value, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn steering_bound_invalid_eta() {
        let ds = builtin_directions("orthogonal-2", 2).unwrap();
        assert!(matches!(steering_bound(&ds, 0.0), Err(Error::InvalidEta(_))));
        assert!(matches!(steering_bound(&ds, 1.5), Err(Error::InvalidEta(_))));
    }

    #[test]
    fn steering_bound_weight_constraints() {
        for &(family, n) in &BUILTIN_FAMILIES {
            let ds = builtin_directions(family, n).unwrap();
            for i in 1..=20 {
                let eta = i as f64 / 20.0;
                let b = steering_bound(&ds, eta).unwrap();
                assert!(b.value > 0.0 && b.value <= 1.0 + 1e-12);
                let total: f64 = b.optimal_weights.iter().map(|&(_, w)| w).sum();
                let herald: f64 = b
                    .optimal_weights
                    .iter()
                    .map(|&(k, w)| w * k as f64 / n as f64)
                    .sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
                assert_abs_diff_eq!(herald, eta, epsilon = 1e-9);
                assert!(b.optimal_weights.iter().all(|&(_, w)| w >= -1e-12));
            }
        }
    }

    #[test]
    fn steering_bound_monotone_in_eta() {
        for &(family, n) in &BUILTIN_FAMILIES {
            let ds = builtin_directions(family, n).unwrap();
            let mut prev = f64::INFINITY;
            for i in 1..=20 {
                let eta = 0.05 * i as f64;
                let value = steering_bound(&ds, eta).unwrap().value;
                assert!(
                    value <= prev + 1e-12,
                    "{family}: C({eta}) = {value} > previous {prev}"
                );
                prev = value;
            }
        }
    }

    #[test]
    fn steering_bound_permutation_invariant() {
        let ds = builtin_directions("cube-4", 4).unwrap();
        let mut permuted = ds.directions().to_vec();
        permuted.rotate_left(2);
        let ds_perm = DirectionSet::new(permuted).unwrap();
        for i in 1..=10 {
            let eta = 0.1 * i as f64;
            assert_abs_diff_eq!(
                steering_bound(&ds, eta).unwrap().value,
                steering_bound(&ds_perm, eta).unwrap().value,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn r_factor_perfect_is_one_at_full_heralding() {
        for &(family, n) in &BUILTIN_FAMILIES {
            let ds = builtin_directions(family, n).unwrap();
            let bound = steering_bound(&ds, 1.0).unwrap();
            let prep = PreparationReport::perfect(&ds);
            let r = r_factor(&prep, &ds, &bound).unwrap();
            assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn r_factor_fixed_state_is_inverse_bound() {
        let ds = builtin_directions("orthogonal-3", 3).unwrap();
        for eta in [0.5, 0.8, 1.0] {
            let bound = steering_bound(&ds, eta).unwrap();
            let prep = PreparationReport::fixed_state(3, ds.direction(1)).unwrap();
            let r = r_factor(&prep, &ds, &bound).unwrap();
            assert_abs_diff_eq!(r.value, 1.0 / bound.value, epsilon = 1e-9);
        }
    }

    #[test]
    fn r_factor_visibility_scales_linearly() {
        let ds = builtin_directions("cube-4", 4).unwrap();
        let bound = steering_bound(&ds, 1.0).unwrap();
        for v in [0.2, 0.5, 0.9, 1.0] {
            let prep = PreparationReport::visibility(&ds, v).unwrap();
            let r = r_factor(&prep, &ds, &bound).unwrap();
            assert_abs_diff_eq!(r.value, v, epsilon = 1e-9);
        }
    }

    #[test]
    fn r_factor_invariant_under_relabeling() {
        let ds = builtin_directions("orthogonal-3", 3).unwrap();
        let bound = steering_bound(&ds, 1.0).unwrap();
        let prep = PreparationReport::visibility(&ds, 0.7).unwrap();
        let r = r_factor(&prep, &ds, &bound).unwrap();

        let mut dirs = ds.directions().to_vec();
        dirs.rotate_left(1);
        let ds2 = DirectionSet::new(dirs).unwrap();
        let bound2 = steering_bound(&ds2, 1.0).unwrap();
        let prep2 = PreparationReport::visibility(&ds2, 0.7).unwrap();
        let r2 = r_factor(&prep2, &ds2, &bound2).unwrap();
        assert_abs_diff_eq!(r.value, r2.value, epsilon = 1e-12);
    }

    #[test]
    fn r_factor_degenerate_preparation_errors() {
        let ds = builtin_directions("orthogonal-2", 2).unwrap();
        let bound = steering_bound(&ds, 1.0).unwrap();
        // n_{j,s} = b_1 for every (j, s): B sums to n b_1, <B,B> = n^2.
        let prep =
            PreparationReport::new(vec![[BlochVector::X, BlochVector::X]; 2]).unwrap();
        assert!(matches!(
            r_factor(&prep, &ds, &bound),
            Err(Error::DegeneratePreparation(_))
        ));
    }

    #[test]
    fn preparation_report_parse_and_gaps() {
        let text = "# report\n1 +1 1 0 0\n1 -1 -1 0 0\n2 +1 0 0 1\n2 -1 0 0 -1\n";
        let rep = parse_preparation_report(text, 2, "test").unwrap();
        assert_eq!(rep.vector(2, -1), &BlochVector::new(0.0, 0.0, -1.0));

        let text = "1 +1 1 0 0\n1 -1 -1 0 0\n2 +1 0 0 1\n";
        let err = parse_preparation_report(text, 2, "test").unwrap_err();
        assert!(matches!(err, Error::MissingPreparation { j: 2, s: -1 }));
    }
}
