//! Structure-agnostic numerics: integration, quadrature, root finding,
//! finite differences and small dense linear algebra.

pub mod diff;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod roots;

pub use diff::{fd_jacobian, try_fd_jacobian};
pub use linalg::{rank_nullspace, Matrix, RankResult, DEFAULT_RANK_TOL};
pub use ode::{integrate, OdeProblem, Trajectory, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};
pub use quad::quad;
pub use roots::{find_roots, find_roots_detailed, Root, DEFAULT_ROOT_TOL};
