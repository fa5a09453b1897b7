//! Probability potentials: nonnegative tables over finite variable frames.
//!
//! Tables are dense and row-major with the lowest-index variable of the
//! scope most significant. Potentials form a regular algebra: every quotient
//! reduces back to a table (division is total, with `x / 0 = 0` off the
//! support).

use crate::algebra::{clamp_zero, close, GroupTag, Instance, Valuation};
use crate::error::{Error, Result};
use crate::lattice::VarSet;

/// Frame sizes for every variable of a model; variable `i` has `cards[i]` states.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VariableSpace {
    pub cards: Vec<usize>,
}

impl VariableSpace {
    pub fn new(cards: Vec<usize>) -> Self {
        VariableSpace { cards }
    }

    pub fn universe(&self) -> VarSet {
        VarSet::first_n(self.cards.len() as u32)
    }

    pub fn cards_of(&self, scope: VarSet) -> Result<Vec<usize>> {
        scope
            .iter()
            .map(|v| {
                self.cards
                    .get(v as usize)
                    .copied()
                    .ok_or_else(|| Error::ContextMismatch(format!("variable {v} is not declared")))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    scope: VarSet,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Potential {
    pub fn new(scope: VarSet, cards: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if cards.len() != scope.len() {
            return Err(Error::InvalidValuation(format!(
                "scope {scope} has {} variables but {} cardinalities were given",
                scope.len(),
                cards.len()
            )));
        }
        if cards.contains(&0) {
            return Err(Error::InvalidValuation("zero cardinality".into()));
        }
        let size: usize = cards.iter().product();
        if values.len() != size {
            return Err(Error::InvalidValuation(format!(
                "table over {scope} needs {size} values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidValuation(format!("negative or non-finite entry {v}")));
        }
        Ok(Self::raw(scope, cards, values))
    }

    fn raw(scope: VarSet, cards: Vec<usize>, values: Vec<f64>) -> Self {
        let values = values.into_iter().map(clamp_zero).collect();
        Potential { scope, cards, values }
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(VarSet::empty(), vec![], vec![value])
    }

    pub fn filled(space: &VariableSpace, scope: VarSet, value: f64) -> Result<Self> {
        let cards = space.cards_of(scope)?;
        let size = cards.iter().product();
        Self::new(scope, cards, vec![value; size])
    }

    pub fn scope(&self) -> VarSet {
        self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Per-configuration membership in supp(p).
    pub fn support(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v > 0.0).collect()
    }

    fn card_of(&self, var: u32) -> Option<usize> {
        self.scope.position(var).map(|i| self.cards[i])
    }
}

/// Scope and cardinalities of the union of two tables, checking shared
/// variables agree.
fn union_frame(s: VarSet, sc: &[usize], t: VarSet, tc: &[usize]) -> Result<(VarSet, Vec<usize>)> {
    let u = s.union(t);
    let cards = u
        .iter()
        .map(|v| {
            let a = s.position(v).map(|i| sc[i]);
            let b = t.position(v).map(|i| tc[i]);
            match (a, b) {
                (Some(x), Some(y)) if x != y => Err(Error::CardinalityMismatch { var: v, left: x, right: y }),
                (Some(x), _) | (_, Some(x)) => Ok(x),
                (None, None) => unreachable!(),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((u, cards))
}

/// For each configuration of `(scope, cards)` in row-major order, the index
/// of its restriction to `sub` in a table over `sub`.
pub(crate) fn restriction_indices(scope: VarSet, cards: &[usize], sub: VarSet) -> Vec<usize> {
    debug_assert!(sub.is_subset(scope));
    // stride of each scope variable inside the sub-table (0 if absent)
    let mut strides = vec![0usize; cards.len()];
    let mut acc = 1usize;
    for (i, v) in scope.iter().enumerate().collect::<Vec<_>>().into_iter().rev() {
        if sub.contains(v) {
            strides[i] = acc;
            acc *= cards[i];
        }
    }
    let size: usize = cards.iter().product();
    let mut out = Vec::with_capacity(size);
    let mut digits = vec![0usize; cards.len()];
    let mut idx = 0usize;
    for _ in 0..size {
        out.push(idx);
        // odometer increment, last variable fastest
        for i in (0..cards.len()).rev() {
            digits[i] += 1;
            idx += strides[i];
            if digits[i] < cards[i] {
                break;
            }
            idx -= strides[i] * digits[i];
            digits[i] = 0;
        }
    }
    out
}

/// Extends a table to a larger scope by repeating values (cylindric extension).
fn extend_to(p: &Potential, scope: VarSet, cards: &[usize]) -> Vec<f64> {
    restriction_indices(scope, cards, p.scope).into_iter().map(|i| p.values[i]).collect()
}

/// Pointwise product over the union scope.
pub fn combine_tables(p: &Potential, q: &Potential) -> Result<Potential> {
    let (u, cards) = union_frame(p.scope, &p.cards, q.scope, &q.cards)?;
    let a = extend_to(p, u, &cards);
    let b = extend_to(q, u, &cards);
    Ok(Potential::raw(u, cards, a.iter().zip(&b).map(|(x, y)| x * y).collect()))
}

/// Marginal sums onto `t`.
pub fn project_table(p: &Potential, t: VarSet) -> Result<Potential> {
    if !t.is_subset(p.scope) {
        return Err(Error::ProjectionDomain { target: t.to_string(), label: p.scope.to_string() });
    }
    let cards: Vec<usize> = t.iter().map(|v| p.card_of(v).expect("t within scope")).collect();
    let mut values = vec![0.0; cards.iter().product()];
    for (i, j) in restriction_indices(p.scope, &p.cards, t).into_iter().enumerate() {
        values[j] += p.values[i];
    }
    Ok(Potential::raw(t, cards, values))
}

/// Pointwise reciprocal on the support, zero elsewhere.
pub fn invert_table(p: &Potential) -> Result<Potential> {
    if p.is_null() {
        return Err(Error::NullInput("cannot invert the null table".into()));
    }
    let values = p.values.iter().map(|&v| if v > 0.0 { 1.0 / v } else { 0.0 }).collect();
    Ok(Potential::raw(p.scope, p.cards.clone(), values))
}

/// Group identity of a potential: its frame and support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialTag {
    pub scope: VarSet,
    pub cards: Vec<usize>,
    pub support: Vec<bool>,
}

impl GroupTag for PotentialTag {
    fn join(&self, other: &Self) -> Self {
        let (u, cards) =
            union_frame(self.scope, &self.cards, other.scope, &other.cards).expect("tags of combinable potentials");
        let a = restriction_indices(u, &cards, self.scope);
        let b = restriction_indices(u, &cards, other.scope);
        let support = a.iter().zip(&b).map(|(&i, &j)| self.support[i] && other.support[j]).collect();
        PotentialTag { scope: u, cards, support }
    }
}

impl Valuation for Potential {
    type Domain = VarSet;
    type Tag = PotentialTag;
    type Context = VariableSpace;

    const INSTANCE: Instance = Instance::Potential;

    fn label(&self) -> VarSet {
        self.scope
    }

    fn combine(&self, other: &Self) -> Result<Self> {
        combine_tables(self, other)
    }

    fn project(&self, x: &VarSet) -> Result<Self> {
        project_table(self, *x)
    }

    fn group_tag(&self) -> PotentialTag {
        PotentialTag { scope: self.scope, cards: self.cards.clone(), support: self.support() }
    }

    fn is_null(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.scope == other.scope
            && self.cards == other.cards
            && self.values.iter().zip(&other.values).all(|(&a, &b)| close(a, b, tol))
    }

    fn reduce_quotient(num: &Self, den: &Self) -> Result<Self> {
        if !den.scope.is_subset(num.scope) {
            return Err(Error::DominationViolation(format!(
                "denominator domain {} exceeds numerator domain {}",
                den.scope, num.scope
            )));
        }
        let d = extend_to(den, num.scope, &num.cards);
        let values = num
            .values
            .iter()
            .zip(&d)
            .map(|(&n, &d)| {
                if d > 0.0 {
                    Ok(n / d)
                } else if n > 0.0 {
                    Err(Error::DominationViolation("numerator is positive where the denominator vanishes".into()))
                } else {
                    Ok(0.0)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Potential::raw(num.scope, num.cards.clone(), values))
    }

    fn unit(ctx: &VariableSpace, x: &VarSet) -> Result<Self> {
        Potential::filled(ctx, *x, 1.0)
    }

    fn null(ctx: &VariableSpace, x: &VarSet) -> Result<Self> {
        Potential::filled(ctx, *x, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: u32 = 0;
    const B: u32 = 1;

    fn vs(v: &[u32]) -> VarSet {
        v.iter().copied().collect()
    }

    fn p() -> Potential {
        Potential::new(vs(&[A]), vec![2], vec![0.2, 0.8]).unwrap()
    }

    fn q() -> Potential {
        Potential::new(vs(&[A, B]), vec![2, 2], vec![1.0, 3.0, 2.0, 4.0]).unwrap()
    }

    fn space() -> VariableSpace {
        VariableSpace::new(vec![2, 2])
    }

    #[test]
    fn combine_example() {
        let r = p().combine(&q()).unwrap();
        assert_eq!(r.scope(), vs(&[A, B]));
        assert!(r.approx_eq(&Potential::new(vs(&[A, B]), vec![2, 2], vec![0.2, 0.6, 1.6, 3.2]).unwrap(), 1e-12));
    }

    #[test]
    fn combine_with_unit_and_null() {
        let u = Potential::unit(&space(), &vs(&[A])).unwrap();
        assert!(p().combine(&u).unwrap().approx_eq(&p(), 0.0));
        let z = Potential::null(&space(), &vs(&[A])).unwrap();
        assert!(p().combine(&z).unwrap().is_null());
    }

    #[test]
    fn projection_sums_over_dropped_variables() {
        let m = q().project(&vs(&[A])).unwrap();
        assert_eq!(m.values(), &[4.0, 6.0]);
        let m = q().project(&vs(&[B])).unwrap();
        assert_eq!(m.values(), &[3.0, 7.0]);
        assert!(q().project(&vs(&[A, B])).unwrap().approx_eq(&q(), 0.0));
        assert_eq!(q().project(&vs(&[])).unwrap().values(), &[10.0]);
        assert!(matches!(p().project(&vs(&[B])), Err(Error::ProjectionDomain { .. })));
    }

    #[test]
    fn projection_of_null_is_null() {
        let z = Potential::null(&space(), &vs(&[A, B])).unwrap();
        assert!(z.project(&vs(&[A])).unwrap().is_null());
    }

    #[test]
    fn inversion_on_support() {
        let m = Potential::new(vs(&[A]), vec![2], vec![4.0, 6.0]).unwrap();
        let inv = invert_table(&m).unwrap();
        assert!(close(inv.values()[0], 0.25, 1e-15) && close(inv.values()[1], 1.0 / 6.0, 1e-15));
        let half = Potential::new(vs(&[A]), vec![2], vec![2.0, 0.0]).unwrap();
        assert_eq!(invert_table(&half).unwrap().values(), &[0.5, 0.0]);
        let back = half.combine(&invert_table(&half).unwrap()).unwrap().combine(&half).unwrap();
        assert!(back.approx_eq(&half, 1e-12));
        assert!(matches!(invert_table(&Potential::null(&space(), &vs(&[A])).unwrap()), Err(Error::NullInput(_))));
    }

    #[test]
    fn support_and_tags() {
        let t = Potential::new(vs(&[A]), vec![2], vec![0.2, 0.0]).unwrap();
        assert_eq!(t.support(), vec![true, false]);
        assert_eq!(p().support(), vec![true, true]);
        assert_eq!(Potential::null(&space(), &vs(&[A])).unwrap().support(), vec![false, false]);
        // strictly positive on {A} is dominated by anything on {A}
        assert!(t.dominates(&p()));
        let s = Potential::new(vs(&[A]), vec![2], vec![0.0, 0.3]).unwrap();
        assert!(!t.dominates(&s) && !s.dominates(&t));
    }

    #[test]
    fn tiny_values_are_clamped() {
        let t = Potential::new(vs(&[A]), vec![2], vec![5e-13, 1.0]).unwrap();
        assert_eq!(t.values()[0], 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Potential::new(vs(&[A]), vec![2], vec![1.0]).is_err());
        assert!(Potential::new(vs(&[A]), vec![2], vec![1.0, -0.5]).is_err());
        let other = Potential::new(vs(&[A]), vec![3], vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(p().combine(&other), Err(Error::CardinalityMismatch { .. })));
    }

    #[test]
    fn restriction_index_layout() {
        // scope {0,1,2} with cards (2,3,2) restricted to {0,2}
        let idx = restriction_indices(vs(&[0, 1, 2]), &[2, 3, 2], vs(&[0, 2]));
        assert_eq!(idx, vec![0, 1, 0, 1, 0, 1, 2, 3, 2, 3, 2, 3]);
        let idx = restriction_indices(vs(&[0, 1]), &[2, 3], vs(&[1]));
        assert_eq!(idx, vec![0, 1, 2, 0, 1, 2]);
    }

    #[test]
    fn reduce_divides_on_support() {
        let joint = q();
        let marg = joint.project(&vs(&[A])).unwrap();
        let c = Potential::reduce_quotient(&joint, &marg).unwrap();
        let expect = [0.25, 0.75, 1.0 / 3.0, 2.0 / 3.0];
        assert!(c.values().iter().zip(expect).all(|(&a, b)| close(a, b, 1e-12)));
    }
}
