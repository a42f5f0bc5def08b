//! Transmit antenna selection from shadowing side information over
//! composite Gamma-Gamma (generalized-K) links.
//!
//! The received SNR on link ℓ is α_ℓ β_ℓ, with α_ℓ the shadowing power and
//! β_ℓ the small-scale fading power, both Gamma distributed. The transmitter
//! uses the link with the largest α. [`closed_form`] evaluates the resulting
//! metrics through a finite term expansion of the largest shadowing power,
//! [`oracle`] recomputes them by quadrature, and [`simulator`] samples them.
//!
//! Link indices are 0-based throughout.

pub mod asymptotics;
pub mod closed_form;
pub mod config;
pub mod error;
pub mod expansion;
pub mod oracle;
pub mod quad;
pub mod simulator;
pub mod specfun;
pub mod sum;
pub mod validate;

pub use asymptotics::{AsymptoticProfile, Regime};
pub use closed_form::{Family, Method, MetricResult, Model, Modulation, RoutedMetric};
pub use config::{AsymptoticConfig, ChannelConfig, Link, Scenario, SnrSpec, SweepSpec};
pub use error::{Error, Result};
pub use quad::QuadratureReport;
pub use simulator::{Policy, SimulationEstimate, SimulationOptions};
pub use validate::{Fault, ToleranceProfile, ValidationReport};
