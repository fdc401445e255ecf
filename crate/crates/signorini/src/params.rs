//! Lamé constants and the derived quantities used by the half-space
//! kernels and the Dirichlet-to-Neumann symbol.

use crate::error::{Error, Result};

/// Material constants `μ, λ > 0` together with every derived constant
/// that appears in the half-space formulas.
///
/// * `kappa = (λ+μ) / (4μ(2μ+λ))`
/// * `nu = 1/(2μ) − kappa`
/// * `beta = (λ+μ) / (2μ+λ)`
/// * `dtn_constant = 2μ(λ+μ) / (λ+2μ)`, the constant in the symbol
///   `σ(P) = c·|ξ'|` of the Dirichlet-to-Neumann map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams {
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub nu: f64,
    pub beta: f64,
    pub dtn_constant: f64,
}

/// Builds [`LameParams`] from the two material constants.
pub fn derive_constants(mu: f64, lambda: f64) -> Result<LameParams> {
    LameParams::new(mu, lambda)
}

impl LameParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                requirement: "mu > 0",
                value: mu,
            });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                requirement: "lambda > 0",
                value: lambda,
            });
        }
        let kappa = (lambda + mu) / (4.0 * mu * (2.0 * mu + lambda));
        let nu = 1.0 / (2.0 * mu) - kappa;
        let beta = (lambda + mu) / (2.0 * mu + lambda);
        let dtn_constant = 2.0 * mu * (lambda + mu) / (lambda + 2.0 * mu);
        Ok(Self {
            mu,
            lambda,
            kappa,
            nu,
            beta,
            dtn_constant,
        })
    }

    /// `2μ + λ`, the combination that shows up in every kernel denominator.
    pub fn p_wave(&self) -> f64 {
        2.0 * self.mu + self.lambda
    }

    /// The Dirichlet-to-Neumann constant re-assembled from the boundary
    /// traces: `(κ−ν)/ν · [(2μ+λ)(2μκ−1) − λ(1−2μκ)]`.
    ///
    /// The tangential-trace factor must be `(1−2μκ)`; the variant with
    /// `(1−2μν)` does not reproduce `dtn_constant` (see
    /// [`crate::halfspace::resolve_trace_discrepancy`] for the check that
    /// pins this down against the boundary condition).
    pub fn assembled_dtn_constant(&self) -> f64 {
        let (mu, lambda) = (self.mu, self.lambda);
        let (kappa, nu) = (self.kappa, self.nu);
        (kappa - nu) / nu
            * ((2.0 * mu + lambda) * (2.0 * mu * kappa - 1.0)
                - lambda * (1.0 - 2.0 * mu * kappa))
    }

    /// Same assembly but with the tangential-trace factor `(1−2μν)`;
    /// kept only so the inconsistency can be demonstrated and recorded.
    pub fn assembled_dtn_constant_nu_variant(&self) -> f64 {
        let (mu, lambda) = (self.mu, self.lambda);
        let (kappa, nu) = (self.kappa, self.nu);
        (kappa - nu) / nu
            * ((2.0 * mu + lambda) * (2.0 * mu * kappa - 1.0) - lambda * (1.0 - 2.0 * mu * nu))
    }
}
