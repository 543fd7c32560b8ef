//! Numeric tolerances shared across the crate.

/// All tolerances used by validation and algebraic checks, in one place.
///
/// Defaults: algebraic identities at 1e-12, spectral/PSD checks at 1e-10,
/// unit-direction checks at 1e-9.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Elementwise tolerance for `H == H†`.
    pub hermitian_tol: f64,
    /// Slack allowed below zero for density-matrix eigenvalues.
    pub psd_slack: f64,
    /// Tolerance for `trace == 1` on density matrices.
    pub trace_tol: f64,
    /// Required residual `‖Hv − λv‖` of the eigensolver.
    pub eigen_residual: f64,
    /// Tolerance for `|norm − 1|` on measurement directions.
    pub unit_direction_tol: f64,
    /// Tolerance for exact algebraic identities (tensor/partial-trace round trips, score recomposition).
    pub algebra_tol: f64,
    /// Slack allowed above 1 for Bloch-ball membership.
    pub bloch_ball_slack: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            hermitian_tol: 1e-12,
            psd_slack: 1e-10,
            trace_tol: 1e-10,
            eigen_residual: 1e-10,
            unit_direction_tol: 1e-9,
            algebra_tol: 1e-12,
            bloch_ball_slack: 1e-12,
        }
    }
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        hermitian_tol: 1e-12,
        psd_slack: 1e-10,
        trace_tol: 1e-10,
        eigen_residual: 1e-10,
        unit_direction_tol: 1e-9,
        algebra_tol: 1e-12,
        bloch_ball_slack: 1e-12,
    };
}
