//! Linear descriptor (differential-algebraic) systems
//!
//! ```text
//!     d/dt F x(t) - C(t) x(t) = f(t),    F x(a) = f0
//! ```
//!
//! with a constant, possibly rectangular `F`. The crate evaluates the induced
//! mapping `D x = (d/dt F x - C x, F x(a))` and its adjoint on uniform grids,
//! computes pseudosolutions (least-squares solutions of `D x = (f, f0)`) through
//! an `eps`-regularized two-point boundary value problem, and decides whether
//! the range of `D` is closed from the block structure of `C`.
//!
//! Modules:
//! - [`linalg`]: dense matrices, pseudoinverse, mod-norm, reduction of `F` to
//!   `diag(E_r, 0)`, pencil regularity and range inclusion.
//! - [`function_space`]: grid surrogate of `L2`, quadrature, differentiation,
//!   the Cantor function and Bernstein polynomials.
//! - [`operator`]: `D`, its adjoint, membership screens and the
//!   integration-by-parts identities.
//! - [`solver`]: the regularized boundary value problem, the pseudosolution
//!   probe, the Riccati sweep and the closed-range criterion.
//! - [`io`]: JSON system descriptions and CSV/JSON reports.

pub mod error;
pub mod function_space;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod solver;

pub use error::{Error, Result};
pub use function_space::{Grid, GridFn};
pub use linalg::Mat;
pub use operator::{AdjointElement, CoefSource, DescriptorSystem, RhsPair};
