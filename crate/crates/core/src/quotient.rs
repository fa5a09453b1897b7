//! The group extension Ψ⁰: formal quotients of valuations.
//!
//! A [`Quotient`] stands for `(Π num) · (Π den)⁻¹`. Both sides are kept as
//! factor lists so that factors appearing on both sides can be cancelled
//! without evaluating products, which keeps intermediate values small.
//! Invariants: the numerator is nonempty, `d(Π den) <= d(Π num)` and
//! `δ(Π den) <= δ(Π num)`.

use crate::algebra::{GroupTag, Valuation};
use crate::error::{Error, Result};
use crate::lattice::Domain;

/// Tolerance used to recognise the same factor on both sides of a quotient.
const CANCEL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Quotient<V: Valuation> {
    num: Vec<V>,
    den: Vec<V>,
}

fn product<V: Valuation>(factors: &[V]) -> Result<Option<V>> {
    let mut it = factors.iter();
    let Some(first) = it.next() else { return Ok(None) };
    it.try_fold(first.clone(), |acc, f| acc.combine(f)).map(Some)
}

fn joint_tag<V: Valuation>(factors: &[V]) -> Option<V::Tag> {
    let mut it = factors.iter();
    let first = it.next()?.group_tag();
    Some(it.fold(first, |acc, f| acc.join(&f.group_tag())))
}

fn joint_label<V: Valuation>(factors: &[V]) -> Result<Option<V::Domain>> {
    let mut it = factors.iter();
    let Some(first) = it.next() else { return Ok(None) };
    it.try_fold(first.label(), |acc, f| {
        let d = f.label();
        if acc.compatible(&d) {
            Ok(acc.join(&d))
        } else {
            Err(Error::ContextMismatch(format!("{acc} and {d}")))
        }
    })
    .map(Some)
}

impl<V: Valuation> Quotient<V> {
    /// `num · den⁻¹`, checking the label and domination invariants.
    pub fn new(num: V, den: V) -> Result<Self> {
        Self::from_factors(vec![num], vec![den])
    }

    pub fn from_factors(num: Vec<V>, den: Vec<V>) -> Result<Self> {
        let q = Quotient { num, den };
        q.validate()?;
        Ok(q)
    }

    /// A member of Ψ viewed as an element of Ψ⁰.
    pub fn member(v: V) -> Self {
        Quotient { num: vec![v], den: vec![] }
    }

    /// `ψ ↦ [ψ·ψ, ψ]`.
    pub fn embed(v: &V) -> Result<Self> {
        if v.is_null() {
            return Err(Error::NullInput("cannot embed a null valuation as a quotient".into()));
        }
        Self::new(v.combine(v)?, v.clone())
    }

    fn validate(&self) -> Result<()> {
        let num_label =
            joint_label(&self.num)?.ok_or_else(|| Error::InvalidValuation("quotient with empty numerator".into()))?;
        if let Some(dl) = joint_label(&self.den)? {
            if !(dl.compatible(&num_label) && dl.leq(&num_label)) {
                return Err(Error::DominationViolation(format!(
                    "denominator domain {dl} is not below numerator domain {num_label}"
                )));
            }
            if self.den.iter().any(|d| d.is_null()) {
                return Err(Error::NullInput("null denominator".into()));
            }
            let nt = joint_tag(&self.num).expect("nonempty");
            let dt = joint_tag(&self.den).expect("nonempty");
            if !dt.leq(&nt) {
                return Err(Error::DominationViolation(
                    "denominator group is not dominated by the numerator group".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn num_factors(&self) -> &[V] {
        &self.num
    }

    pub fn den_factors(&self) -> &[V] {
        &self.den
    }

    pub fn is_member(&self) -> bool {
        self.den.is_empty() && self.num.len() == 1
    }

    /// The combined numerator `Π num`.
    pub fn num_product(&self) -> Result<V> {
        Ok(product(&self.num)?.expect("numerator is nonempty"))
    }

    /// The combined denominator `Π den`, or `None` for a plain member.
    pub fn den_product(&self) -> Result<Option<V>> {
        product(&self.den)
    }

    /// `d(η) = d(Π num)`.
    pub fn label0(&self) -> V::Domain {
        joint_label(&self.num).ok().flatten().expect("validated numerator")
    }

    /// Domain of the denominator, if any.
    pub fn den_label(&self) -> Option<V::Domain> {
        joint_label(&self.den).ok().flatten()
    }

    /// The group δ(η) = δ(Π num).
    pub fn group_tag(&self) -> V::Tag {
        joint_tag(&self.num).expect("nonempty numerator")
    }

    /// Single-factor representative `(Π num, Π den)`.
    pub fn collapse(&self) -> Result<Self> {
        Ok(Quotient { num: vec![self.num_product()?], den: self.den_product()?.into_iter().collect() })
    }

    /// `[φ, ψ] · [φ', ψ'] = [φ·φ', ψ·ψ']`, followed by cancellation.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let a = self.label0();
        let b = other.label0();
        if !a.compatible(&b) {
            return Err(Error::ContextMismatch(format!("{a} and {b}")));
        }
        let mut q = Quotient {
            num: self.num.iter().chain(&other.num).cloned().collect(),
            den: self.den.iter().chain(&other.den).cloned().collect(),
        };
        q.cancel();
        Ok(q)
    }

    /// Removes a factor `B` appearing on both sides whenever the remaining
    /// numerator dominates it: `[N·B, D·B] = [N, D] · f_B = [N, D]`.
    fn cancel(&mut self) {
        let mut i = 0;
        while i < self.den.len() {
            let b = &self.den[i];
            let hit = (0..self.num.len()).find(|&j| {
                self.num.len() > 1 && self.num[j].approx_eq(b, CANCEL_TOL) && {
                    let rest: Vec<V> =
                        self.num.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| v.clone()).collect();
                    joint_tag(&rest).is_some_and(|t| b.group_tag().leq(&t))
                }
            });
            match hit {
                Some(j) => {
                    self.num.remove(j);
                    self.den.remove(i);
                }
                None => i += 1,
            }
        }
    }

    /// Strict inverse by swapping numerator and denominator; defined only
    /// when both lie in the same group.
    pub fn invert(&self) -> Result<Self> {
        let Some(dt) = joint_tag(&self.den) else { return Err(Error::GroupMismatch) };
        if dt != self.group_tag() {
            return Err(Error::GroupMismatch);
        }
        Ok(Quotient { num: self.den.clone(), den: self.num.clone() })
    }

    /// The group inverse `η⁻¹` of `η = N·D⁻¹`, represented as `(D·N)/(N·N)`.
    pub fn reciprocal(&self) -> Self {
        let mut q = Quotient {
            num: self.den.iter().chain(&self.num).cloned().collect(),
            den: self.num.iter().chain(&self.num).cloned().collect(),
        };
        q.cancel();
        q
    }

    /// The unit `f_η = [N, N]` of the group containing `η`.
    pub fn idempotent_of(&self) -> Self {
        Quotient { num: self.num.clone(), den: self.num.clone() }
    }

    /// `[φ, ψ] ≡ [φ', ψ']` iff same label and group and `φ·ψ' = φ'·ψ`.
    pub fn equals0(&self, other: &Self, tol: f64) -> bool {
        let (a, b) = (self.label0(), other.label0());
        if !a.compatible(&b) || a != b || self.group_tag() != other.group_tag() {
            return false;
        }
        let lhs: Vec<V> = self.num.iter().chain(&other.den).cloned().collect();
        let rhs: Vec<V> = other.num.iter().chain(&self.den).cloned().collect();
        match (product(&lhs), product(&rhs)) {
            (Ok(Some(l)), Ok(Some(r))) => l.approx_eq(&r, tol),
            _ => false,
        }
    }

    /// Partial projection `π_x(N·D⁻¹) = π_x(N)·D⁻¹`, defined for
    /// `d(D) <= x <= d(N)`.
    pub fn project0(&self, x: &V::Domain) -> Result<Self> {
        let d = self.label0();
        if !(x.compatible(&d) && x.leq(&d)) {
            return Err(Error::ProjectionUndefined(format!("{x} is not below the label {d}")));
        }
        if let Some(dl) = self.den_label() {
            if !dl.leq(x) {
                return Err(Error::ProjectionUndefined(format!("{x} is not above the denominator domain {dl}")));
            }
        }
        if *x == d {
            return Ok(self.clone());
        }
        let num = self.num_product()?.project(x)?;
        Ok(Quotient { num: vec![num], den: self.den.clone() })
    }

    /// The member of Ψ equal to this quotient, if it exists.
    pub fn reduce(&self) -> Result<V> {
        let num = self.num_product()?;
        match self.den_product()? {
            None => Ok(num),
            Some(den) => V::reduce_quotient(&num, &den),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::Gaussian;
    use crate::linalg::Matrix;
    use crate::potential::Potential;
    use crate::VarSet;

    fn vs(v: &[u32]) -> VarSet {
        v.iter().copied().collect()
    }

    fn pot(scope: &[u32], values: &[f64]) -> Potential {
        Potential::new(vs(scope), vec![2; scope.len()], values.to_vec()).unwrap()
    }

    fn g1(mu: f64, k: f64) -> Gaussian {
        Gaussian::new(vs(&[0]), vec![mu], Matrix::diag(&[k])).unwrap()
    }

    #[test]
    fn scalar_embedding() {
        let two = Potential::scalar(2.0).unwrap();
        let e = Quotient::embed(&two).unwrap();
        assert_eq!(e.num_product().unwrap().values(), &[4.0]);
        assert_eq!(e.den_product().unwrap().unwrap().values(), &[2.0]);
        assert!(e.reduce().unwrap().approx_eq(&two, 1e-12));
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let p = pot(&[0], &[0.2, 0.8]);
        let q = pot(&[0, 1], &[1.0, 3.0, 2.0, 4.0]);
        let lhs = Quotient::embed(&p).unwrap().multiply(&Quotient::embed(&q).unwrap()).unwrap();
        let rhs = Quotient::embed(&p.combine(&q).unwrap()).unwrap();
        assert!(lhs.equals0(&rhs, 1e-9));
        assert!(Quotient::embed(&p)
            .unwrap()
            .equals0(&Quotient::new(p.combine(&p).unwrap(), p.clone()).unwrap(), 1e-12));
    }

    #[test]
    fn group_laws() {
        let n = pot(&[0, 1], &[1.0, 3.0, 2.0, 0.0]);
        let d = pot(&[0], &[4.0, 2.0]);
        let q = Quotient::new(n, d).unwrap();
        let f = q.idempotent_of();
        assert!(q.multiply(&f).unwrap().equals0(&q, 1e-12));
        assert!(f.multiply(&f).unwrap().equals0(&f, 1e-12));
        assert!(q.multiply(&q.reciprocal()).unwrap().equals0(&f, 1e-12));
    }

    #[test]
    fn cross_multiplication_equality() {
        let p = pot(&[0], &[1.0, 2.0]);
        let q = pot(&[0], &[3.0, 5.0]);
        let two = pot(&[0], &[2.0, 2.0]);
        let a = Quotient::new(p.combine(&two).unwrap(), q.combine(&two).unwrap()).unwrap();
        let b = Quotient::new(p.clone(), q.clone()).unwrap();
        assert!(a.equals0(&b, 1e-12));
        let other_label = Quotient::member(pot(&[1], &[1.0, 2.0]));
        assert!(!Quotient::member(p).equals0(&other_label, 1e-12));
    }

    #[test]
    fn strict_inverse_requires_equal_groups() {
        let p = pot(&[0], &[1.0, 2.0]);
        let q = Quotient::new(p.combine(&p).unwrap(), p.combine(&p).unwrap().combine(&p).unwrap()).unwrap();
        let inv = q.invert().unwrap();
        let recip = invert_values(&q.reduce().unwrap());
        assert!(inv.reduce().unwrap().approx_eq(&recip, 1e-12));
        let f = q.idempotent_of();
        assert!(f.invert().unwrap().equals0(&f, 1e-12));
        let partial = pot(&[0], &[1.0, 0.0]);
        let mixed = Quotient::new(partial, p).unwrap();
        assert_eq!(mixed.invert().unwrap_err(), Error::GroupMismatch);
    }

    fn invert_values(p: &Potential) -> Potential {
        crate::potential::invert_table(p).unwrap()
    }

    #[test]
    fn partial_projection_bounds() {
        let n = pot(&[0, 1, 2], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let d = n.project(&vs(&[0])).unwrap();
        let q = Quotient::new(n.clone(), d.clone()).unwrap();
        assert!(q.project0(&vs(&[0, 1, 2])).unwrap().equals0(&q, 0.0));
        let p = q.project0(&vs(&[0, 1])).unwrap();
        assert_eq!(p.label0(), vs(&[0, 1]));
        assert!(matches!(q.project0(&vs(&[1])), Err(Error::ProjectionUndefined(_))));
        assert!(matches!(q.project0(&vs(&[])), Err(Error::ProjectionUndefined(_))));
        // another representative of the same element projects to the same result
        let chi = pot(&[0], &[0.5, 3.0]);
        let q2 = Quotient::new(n.combine(&chi).unwrap(), d.combine(&chi).unwrap()).unwrap();
        assert!(q2.equals0(&q, 1e-12));
        assert!(q2.project0(&vs(&[0, 1])).unwrap().equals0(&p, 1e-12));
    }

    #[test]
    fn gaussian_quotient_reduces_in_canonical_form() {
        let q = Quotient::new(g1(1.0, 2.0), g1(0.0, 1.0)).unwrap();
        assert!(q.reduce().unwrap().approx_eq(&g1(2.0, 1.0), 1e-12));
        assert!(matches!(Quotient::member(g1(0.0, 1.0)).reciprocal().reduce(), Err(Error::NotReducible(_))));
    }

    #[test]
    fn domination_is_enforced() {
        let n = pot(&[0], &[1.0, 0.0]);
        let d = pot(&[0], &[0.0, 1.0]);
        assert!(matches!(Quotient::new(n.clone(), d), Err(Error::DominationViolation(_))));
        let wide = pot(&[0, 1], &[1.0; 4]);
        assert!(matches!(Quotient::new(n.clone(), wide), Err(Error::DominationViolation(_))));
        let zero = pot(&[0], &[0.0, 0.0]);
        assert!(Quotient::new(n.clone(), zero.clone()).is_err());
        assert!(matches!(Quotient::embed(&zero), Err(Error::NullInput(_))));
    }

    #[test]
    fn cancellation_keeps_representatives_small() {
        let p = pot(&[0, 1], &[1.0, 3.0, 2.0, 4.0]);
        let m = p.project(&vs(&[0])).unwrap();
        let q = Quotient::member(p.clone()).multiply(&Quotient::member(m.clone()).reciprocal()).unwrap();
        assert_eq!(q.num_factors().len(), 1);
        assert_eq!(q.den_factors().len(), 1);
    }
}
