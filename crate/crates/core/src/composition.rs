//! The compositional operator `φ ⊳ ψ = φ · ψ · (π_{x∧y}(ψ))⁻¹` over
//! abstract densities.
//!
//! Results are reduced to members of Ψ whenever the instance can do so.
//! Otherwise they stay formal, together with a certificate of their
//! marginal on the left operand's domain (`π_x(φ ⊳ ψ) = φ`), which makes
//! projections below the denominator available without regularity.

use crate::algebra::{GroupTag, Valuation};
use crate::error::{Error, Result};
use crate::lattice::Domain;
use crate::quotient::Quotient;

#[derive(Clone, Debug)]
pub enum DensityElement<V: Valuation> {
    Member(V),
    Formal {
        q: Quotient<V>,
        /// An element known to equal the projection of `q` to its own label.
        marginal: Option<Box<DensityElement<V>>>,
    },
}

impl<V: Valuation> From<V> for DensityElement<V> {
    fn from(v: V) -> Self {
        DensityElement::Member(v)
    }
}

impl<V: Valuation> DensityElement<V> {
    /// Wraps a quotient, reducing it to a member when possible.
    pub fn from_quotient(q: Quotient<V>) -> Self {
        Self::with_marginal(q, None)
    }

    fn with_marginal(q: Quotient<V>, marginal: Option<Box<DensityElement<V>>>) -> Self {
        match q.reduce() {
            Ok(v) => DensityElement::Member(v),
            Err(_) => DensityElement::Formal { q, marginal },
        }
    }

    pub fn label(&self) -> V::Domain {
        match self {
            DensityElement::Member(v) => v.label(),
            DensityElement::Formal { q, .. } => q.label0(),
        }
    }

    pub fn group_tag(&self) -> V::Tag {
        match self {
            DensityElement::Member(v) => v.group_tag(),
            DensityElement::Formal { q, .. } => q.group_tag(),
        }
    }

    pub fn as_quotient(&self) -> Quotient<V> {
        match self {
            DensityElement::Member(v) => Quotient::member(v.clone()),
            DensityElement::Formal { q, .. } => q.clone(),
        }
    }

    pub fn as_member(&self) -> Option<&V> {
        match self {
            DensityElement::Member(v) => Some(v),
            DensityElement::Formal { .. } => None,
        }
    }

    pub fn equals0(&self, other: &Self, tol: f64) -> bool {
        self.as_quotient().equals0(&other.as_quotient(), tol)
    }

    /// Projection in Ψ⁰, routed as follows for a formal element with
    /// denominator domain `w`: directly when `w <= x`; through the marginal
    /// certificate when `x` lies below it; otherwise by projecting to
    /// `x ∨ w`, reducing into Ψ and projecting there.
    pub fn project(&self, x: &V::Domain) -> Result<Self> {
        let (q, marginal) = match self {
            DensityElement::Member(v) => return Ok(DensityElement::Member(v.project(x)?)),
            DensityElement::Formal { q, marginal } => (q, marginal),
        };
        let d = q.label0();
        if !(x.compatible(&d) && x.leq(&d)) {
            return Err(Error::ProjectionDomain { target: x.to_string(), label: d.to_string() });
        }
        if *x == d {
            return Ok(self.clone());
        }
        let w = q.den_label().expect("formal elements have a denominator");
        if w.leq(x) {
            let kept = match marginal {
                Some(m) => m.project(&x.meet(&m.label())).ok().map(Box::new),
                None => None,
            };
            return Ok(Self::with_marginal(q.project0(x)?, kept));
        }
        if let Some(m) = marginal {
            if x.leq(&m.label()) {
                return m.project(x);
            }
        }
        let u = x.join(&w);
        let at_u = q
            .project0(&u)?
            .reduce()
            .map_err(|e| Error::ProjectionUndefined(format!("{x} is not above the denominator domain {w} and {e}")))?;
        Ok(DensityElement::Member(at_u.project(x)?))
    }

    /// True iff the projection to the bottom domain exists.
    pub fn is_density(&self) -> bool {
        match self {
            DensityElement::Member(_) => true,
            DensityElement::Formal { .. } => self.project(&self.label().bottom()).is_ok(),
        }
    }
}

/// `φ ⊳ ψ`; requires both projections to `x ∧ y` and
/// `δ(π_{x∧y}(ψ)) <= δ(π_{x∧y}(φ))`.
pub fn compose<V: Valuation>(phi: &DensityElement<V>, psi: &DensityElement<V>) -> Result<DensityElement<V>> {
    let (x, y) = (phi.label(), psi.label());
    if !x.compatible(&y) {
        return Err(Error::ContextMismatch(format!("{x} and {y}")));
    }
    let u = x.meet(&y);
    let phi_u = phi.project(&u)?;
    let psi_u = psi.project(&u)?;
    if !psi_u.group_tag().leq(&phi_u.group_tag()) {
        return Err(Error::CompositionUndefined(format!(
            "the marginal of the right operand on {u} is not dominated by that of the left operand"
        )));
    }
    let q = phi.as_quotient().multiply(&psi.as_quotient())?.multiply(&psi_u.as_quotient().reciprocal())?;
    Ok(DensityElement::with_marginal(q, Some(Box::new(phi.clone()))))
}

/// Left fold `((φ1 ⊳ φ2) ⊳ φ3) ⊳ …`; errors carry the failing index.
pub fn compose_sequence<V: Valuation>(items: &[DensityElement<V>]) -> Result<DensityElement<V>> {
    let (first, rest) =
        items.split_first().ok_or_else(|| Error::CompositionUndefined("empty composition sequence".into()))?;
    rest.iter().enumerate().try_fold(first.clone(), |acc, (i, item)| compose(&acc, item).map_err(|e| e.at_step(i + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::MassFunction;
    use crate::gaussian::Gaussian;
    use crate::linalg::Matrix;
    use crate::potential::Potential;
    use crate::{Domain, Partition, VarSet};

    fn vs(v: &[u32]) -> VarSet {
        v.iter().copied().collect()
    }

    fn pot(scope: &[u32], values: &[f64]) -> DensityElement<Potential> {
        Potential::new(vs(scope), vec![2; scope.len()], values.to_vec()).unwrap().into()
    }

    #[test]
    fn potential_composition_example() {
        let p = pot(&[0], &[0.2, 0.8]);
        let q = pot(&[0, 1], &[1.0, 3.0, 2.0, 4.0]);
        let r = compose(&p, &q).unwrap();
        let v = r.as_member().unwrap();
        // p(a) q(a,b) / q(a)
        let expect = [0.2 * 1.0 / 4.0, 0.2 * 3.0 / 4.0, 0.8 * 2.0 / 6.0, 0.8 * 4.0 / 6.0];
        assert!(v.values().iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!((v.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composing_a_subdomain_is_identity() {
        let q = pot(&[0, 1], &[1.0, 3.0, 2.0, 4.0]);
        let p = pot(&[0], &[0.2, 0.8]);
        assert!(compose(&q, &p).unwrap().equals0(&q, 1e-12));
    }

    #[test]
    fn vacuous_left_operand() {
        let f = Partition::discrete(3);
        let m2 = MassFunction::new(f.clone(), [(0b001, 0.3), (0b110, 0.5), (0b111, 0.2)]).unwrap();
        // on the bottom frame the vacuous element only carries the total mass
        let unit = DensityElement::from(MassFunction::vacuous(f.bottom()).unwrap());
        let r = compose(&unit, &DensityElement::from(m2.clone())).unwrap();
        assert!(r.equals0(&DensityElement::from(m2.clone()), 1e-12));
        // on the same frame the left operand already covers everything
        let unit = DensityElement::from(MassFunction::vacuous(f).unwrap());
        assert!(compose(&unit, &DensityElement::from(m2)).unwrap().equals0(&unit, 1e-12));
    }

    #[test]
    fn sequences() {
        let p = pot(&[0], &[0.2, 0.8]);
        let q = pot(&[0, 1], &[1.0, 3.0, 2.0, 4.0]);
        let r = pot(&[1, 2], &[0.5, 1.5, 2.0, 1.0]);
        assert!(compose_sequence(std::slice::from_ref(&p)).unwrap().equals0(&p, 0.0));
        assert!(compose_sequence(&[p.clone(), q.clone()]).unwrap().equals0(&compose(&p, &q).unwrap(), 1e-12));
        let nested = compose(&compose(&p, &q).unwrap(), &r).unwrap();
        let seq = compose_sequence(&[p.clone(), q.clone(), r.clone()]).unwrap();
        assert!(seq.equals0(&nested, 1e-12));
        // brute force: p(a) q(a,b)/q(a) r(b,c)/r(b)
        let qa = [4.0, 6.0];
        let rb = [2.0, 3.0];
        let (pv, qv, rv) = ([0.2, 0.8], [1.0, 3.0, 2.0, 4.0], [0.5, 1.5, 2.0, 1.0]);
        let v = seq.as_member().unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let e = pv[a] * qv[2 * a + b] / qa[a] * rv[2 * b + c] / rb[b];
                    assert!((v.values()[4 * a + 2 * b + c] - e).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn domination_failure_reports_index() {
        let p = pot(&[0], &[1.0, 0.0]);
        let q = pot(&[0, 1], &[0.0, 0.0, 1.0, 1.0]);
        assert!(matches!(compose(&p, &q), Err(Error::CompositionUndefined(_))));
        let first = pot(&[2], &[1.0, 1.0]);
        let err = compose_sequence(&[first, p, q]).unwrap_err();
        assert!(matches!(err, Error::AtStep { index: 2, .. }));
    }

    #[test]
    fn gaussian_densities() {
        let k = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let a: DensityElement<Gaussian> = Gaussian::new(vs(&[0, 1]), vec![1.0, 0.0], k.clone()).unwrap().into();
        let b: DensityElement<Gaussian> = Gaussian::new(vs(&[1, 2]), vec![0.5, 2.0], k).unwrap().into();
        let r = compose(&a, &b).unwrap();
        assert!(r.as_member().is_some() && r.is_density());
        assert!(r.project(&vs(&[0, 1])).unwrap().equals0(&a, 1e-9));
        let inv = DensityElement::Formal { q: a.as_quotient().reciprocal(), marginal: None };
        assert!(!inv.is_density());
    }

    #[test]
    fn formal_results_project_through_the_marginal() {
        let cards = [2, 2];
        let fx = crate::belief::multivariate_frame(&cards, vs(&[0])).unwrap();
        let fxy = crate::belief::multivariate_frame(&cards, vs(&[0, 1])).unwrap();
        let phi = MassFunction::new(fx.clone(), [(0b01, 0.6), (0b11, 0.4)]).unwrap();
        let psi = MassFunction::new(fxy, [(0b0011, 0.3), (0b0110, 0.3), (0b1111, 0.4)]).unwrap();
        let r = compose(&DensityElement::from(phi.clone()), &DensityElement::from(psi)).unwrap();
        assert!(r.is_density());
        let back = r.project(&fx).unwrap();
        assert!(back.equals0(&DensityElement::from(phi), 1e-12));
    }
}
