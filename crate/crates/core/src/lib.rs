//! Quantile-based risk measures and the p₀-tail-value-at-risk stochastic order.
//!
//! `X ≤_{p₀-tvar} Y` when `TVaR_p(X) ≤ TVaR_p(Y)` for every `p ≥ p₀`. With
//! `p₀ = 0` this is the increasing convex (stop-loss) order. The crate
//! computes TVaR, stop-loss transforms and related quantities for a catalog
//! of heavy- and light-tailed laws and for empirical samples, certifies the
//! order between two risks, finds the smallest admissible `p₀`, and runs an
//! empirical pipeline from price series to fitted laws.
//!
//! Modules:
//! - [`distributions`]: the [`RiskLaw`] trait, parametric families, empirical samples
//! - [`risk`]: TVaR, stop-loss, integrated survival, censoring and distortions
//! - [`orders`]: order certificates, minimal `p₀`, crossings and bridges
//! - [`inference`]: returns ingestion, runs/Wilcoxon tests, MLE fits, K-S
//! - [`oracle`]: Monte Carlo and naive-quadrature verifiers, fixture records

pub mod distributions;
pub mod error;
pub mod inference;
pub mod oracle;
pub mod orders;
pub mod quad;
pub mod risk;
pub mod roots;
pub mod special;

pub use distributions::{Distribution, EmpiricalSample, Family, RiskLaw, TailBehavior};
pub use error::{Error, Result};
pub use orders::{CrossingReport, OrderCertificate, OrderKind, Verdict};
