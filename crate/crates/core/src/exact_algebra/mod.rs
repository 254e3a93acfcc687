//! Exact arithmetic: characters, Laurent polynomials over `Z[h^{±1/2}]`,
//! the field `Q(t)` used for elimination, truncated `q`-series and formal
//! theta classes.

mod laurent;
mod parse;
mod qseries;
mod ratfunc;
mod theta_class;
mod weight;

pub use laurent::{koszul_from_weights, restrict_to_subtorus, LaurentPoly};
pub use parse::{parse_poly, parse_weight};
pub use qseries::TruncatedQSeries;
pub use ratfunc::{RatFunc, TParam, UPoly};
pub use theta_class::ThetaClass;
pub use weight::{fmt_q, lcm_denoms, parse_q, q, qr, Ring, RingRef, Weight, Q};

use crate::error::{Error, Result};
use crate::lattice_geometry::LatticePolytope;

/// Convex hull of the exponents of `p`, projected to the A-coordinates.
pub fn newton_polytope(p: &LaurentPoly) -> Result<LatticePolytope> {
    if p.is_zero() {
        return Err(Error::EmptyPolytope);
    }
    let ai = p.ring().a_indices();
    let pts: Vec<Vec<Q>> = p.terms().keys().map(|w| w.select(&ai)).collect();
    Ok(LatticePolytope::hull(pts))
}
