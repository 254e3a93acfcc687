//! Lattice polytopes, shifted windows, chambers and the order on fixed points.

mod chamber;
pub mod linalg;
mod polytope;

pub use chamber::{ample_order, chamber_split, Chamber, OrderEdge, PartialOrder, Side, Split};
pub use polytope::{fmt_point, Cone, HalfSpace, LatticePolytope};

use crate::exact_algebra::Q;

/// `Δ + λ` with a rational shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedPolytope {
    pub base: LatticePolytope,
    pub shift: Vec<Q>,
}

impl ShiftedPolytope {
    pub fn new(base: LatticePolytope, shift: Vec<Q>) -> Self {
        ShiftedPolytope { base, shift }
    }

    pub fn shift_is_integral(&self) -> bool {
        self.shift.iter().all(|x| x.is_integer())
    }

    pub fn polytope(&self) -> LatticePolytope {
        self.base.translate(&self.shift)
    }

    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        self.base.lattice_points_shifted(&self.shift)
    }

    /// Some lattice point sits on the relative boundary, so moving the
    /// shift slightly can change the set of lattice points.
    pub fn on_wall(&self) -> bool {
        let p = self.polytope();
        self.lattice_points().iter().any(|x| {
            let xq: Vec<Q> = x.iter().map(|&v| Q::from_integer(v)).collect();
            !p.contains_interior(&xq)
        })
    }
}

pub fn lattice_points_shifted(d: &ShiftedPolytope) -> Vec<Vec<i64>> {
    d.lattice_points()
}

pub fn tangent_cone(d: &LatticePolytope, face: &[Vec<Q>]) -> crate::Result<Cone> {
    d.tangent_cone(face)
}
