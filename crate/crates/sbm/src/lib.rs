//! Numerics for subordinate Brownian motions driven by complete Bernstein
//! functions.
//!
//! The library evaluates the characteristic objects of the process
//! `X_t = W(S_t)` — the subordinator's Lévy and potential densities, the
//! jump density and Green function of `X`, the free and half-space heat
//! kernels, the ladder-height renewal function — and verifies at desk scale
//! the two-sided comparability estimates that hold under power-law scaling
//! of φ at zero and at infinity.
//!
//! ```
//! use sbm::bernstein::BernsteinSpec;
//!
//! // φ(λ) = λ^{1/2}: the Cauchy process in space
//! let spec = BernsteinSpec::pure_power(1.0)?;
//! assert!((spec.phi(4.0)? - 2.0).abs() < 1e-12);
//! // Φ(r) = 1/φ(r⁻²) converts a spatial scale into a time scale
//! assert!((spec.capital_phi(2.0)? - 2.0).abs() < 1e-12);
//! # Ok::<(), sbm::Error>(())
//! ```

pub mod bernstein;
pub mod error;
pub mod kernels;
pub mod laplace;
pub mod numeric;
pub mod renewal;

pub use error::{Error, ErrorClass, Result};
