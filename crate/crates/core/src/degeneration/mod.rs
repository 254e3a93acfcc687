//! Periodic convex functions on `𝔞`, the Legendre-dual tessellation, the
//! floors of the nodal degeneration and theta-function checks.

mod cells;
mod convex;
mod floors;
mod tessellation;
mod theta;

pub use cells::{Cell, Complex};
pub use convex::{gram_matrix, hnf, legendre_qfun, parse_linear_forms, qfun, PeriodicConvexFunction};
pub use floors::{det_delta, floor_tessellations, nodal_floors, BoundaryBundle, FloorPlan, FloorStratum, InertiaData, Subgroup};
pub use tessellation::{legendre_dual_tessellation, Tessellation, Tile};
pub use theta::{
    elliptic_stab_rank1, nodal_limit, series_json, tate_cubic, tate_cubic_check, theta0, theta0_in, theta_check, theta_odd,
    theta_odd_shifted, theta_ring, EllipticMatrix, NodalLimit, ThetaCheck,
};
