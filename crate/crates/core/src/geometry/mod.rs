//! Point clouds, balls, chains along paths and the quasi-convexity
//! transport between (A1) and (A1)_Ω.

mod ball;
mod chain;
mod cloud;
mod domain;
mod quasiconvex;

pub use ball::{unit_ball_volume, Ball};
pub use chain::{
    a1_from_a1omega, a1omega_from_a1, chain_count_bound, chain_points, default_c_impl, Chain,
    TransportedA1,
};
pub use cloud::{distance, Point, PointCloud};
pub use domain::SpatialDomain;
pub use quasiconvex::{quasiconvexity_constant, shortest_path, QuasiConvexity};
