//! Degree reduction of Bezier curves under endpoint continuity constraints.
//!
//! Given a degree-n Bezier curve, find the degree-m curve (m < n) closest in
//! a Jacobi-weighted L2 norm, subject to parametric (C), geometric (G) or
//! hybrid continuity of orders (k, l) at the endpoints. The library computes
//! the constrained least-squares projection through a constrained dual
//! Bernstein basis and determines the geometric continuity parameters with
//! small dense solvers; the `bezred` binary wraps it in a JSON/SVG CLI.

pub mod bernstein;
pub mod continuity;
pub mod dual;
pub mod error;
pub mod io;
pub mod reduction;
pub mod solver;
pub mod svg;

pub use bernstein::{BezierCurve, JacobiWeight, Point};
pub use continuity::{ContinuitySpec, Fixing, GParams};
pub use error::{Error, Result};
pub use reduction::{reduce, Mode, ReductionProblem, ReductionResult};
