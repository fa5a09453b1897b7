//! The valuation-algebra contract shared by all instances.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::Domain;

/// Default relative tolerance for equality of valuations.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Absolute floor under which values are treated as exact zeros.
pub const ZERO_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instance {
    Potential,
    Gaussian,
    Belief,
}

impl Instance {
    pub fn name(self) -> &'static str {
        match self {
            Instance::Potential => "potential",
            Instance::Gaussian => "gaussian",
            Instance::Belief => "belief",
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identity of the group δ(ψ) containing a valuation.
///
/// Tags form a join-semilattice: the tag of a combination is the join of the
/// factors' tags, and `a.leq(b)` iff `a.join(b) == b`.
pub trait GroupTag: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn join(&self, other: &Self) -> Self;

    fn leq(&self, other: &Self) -> bool {
        self.join(other) == *other
    }
}

/// A separative valuation algebra instance.
pub trait Valuation: Clone + fmt::Debug + Send + Sync + Sized {
    type Domain: Domain;
    type Tag: GroupTag;
    /// Extra data needed to build units and nulls (e.g. variable cardinalities).
    type Context: Clone + fmt::Debug + Send + Sync;

    const INSTANCE: Instance;
    /// Whether the strong combination axiom is declared for this instance.
    const STRONG_COMBINATION: bool = false;

    fn label(&self) -> Self::Domain;
    fn combine(&self, other: &Self) -> Result<Self>;
    /// Projection to `x <= label()`.
    fn project(&self, x: &Self::Domain) -> Result<Self>;
    fn group_tag(&self) -> Self::Tag;
    fn is_null(&self) -> bool;
    /// Same label and payload equal within relative tolerance `tol`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// The member `num * den^-1` of Ψ, if it exists and can be constructed.
    /// Callers guarantee `d(den) <= d(num)` and that `num` dominates `den`.
    fn reduce_quotient(num: &Self, den: &Self) -> Result<Self>;

    fn unit(_ctx: &Self::Context, _x: &Self::Domain) -> Result<Self> {
        Err(Error::Unsupported { instance: Self::INSTANCE.name(), what: "unit elements" })
    }

    fn null(_ctx: &Self::Context, _x: &Self::Domain) -> Result<Self> {
        Err(Error::Unsupported { instance: Self::INSTANCE.name(), what: "null elements" })
    }

    /// True iff δ(other) <= δ(self).
    fn dominates(&self, other: &Self) -> bool {
        other.group_tag().leq(&self.group_tag())
    }

    fn check_projection(&self, x: &Self::Domain) -> Result<()> {
        let d = self.label();
        if x.compatible(&d) && x.leq(&d) {
            Ok(())
        } else {
            Err(Error::ProjectionDomain { target: x.to_string(), label: d.to_string() })
        }
    }
}

/// `|a - b| <= max(tol * max(|a|, |b|), ZERO_FLOOR)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= (tol * scale).max(ZERO_FLOOR)
}

pub fn slices_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| close(x, y, tol))
}

/// Clamps magnitudes below [`ZERO_FLOOR`] to exact zero.
pub fn clamp_zero(v: f64) -> f64 {
    if v.abs() < ZERO_FLOOR {
        0.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_semantics() {
        assert!(close(1.0, 1.0 + 1e-12, DEFAULT_TOL));
        assert!(!close(1.0, 1.0 + 1e-6, DEFAULT_TOL));
        assert!(close(0.0, 5e-13, DEFAULT_TOL));
        assert!(!close(0.0, 1e-10, DEFAULT_TOL));
        assert_eq!(clamp_zero(3e-13), 0.0);
        assert_eq!(clamp_zero(-3e-13), 0.0);
        assert_eq!(clamp_zero(2e-12), 2e-12);
    }
}
