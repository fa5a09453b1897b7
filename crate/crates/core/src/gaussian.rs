//! Gaussian potentials `(μ, K)`: the cancellative instance.
//!
//! Valuations are mean/concentration pairs without normalization constants.
//! Quotients are handled in canonical form `(h, K)` with `h = Kμ`, where
//! division is subtraction; a quotient reduces to a member exactly when the
//! resulting concentration is positive definite.

use crate::algebra::{close, GroupTag, Instance, Valuation};
use crate::error::{Error, Result};
use crate::lattice::VarSet;
use crate::linalg::{cholesky, cholesky_scaled, invert_spd, solve, Matrix};

/// Symmetry tolerance for concentration matrices (relative to the largest entry).
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Gaussian {
    scope: VarSet,
    mean: Vec<f64>,
    conc: Matrix,
}

/// Canonical parameters `(h, K)`; `K` may be indefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalGaussian {
    pub scope: VarSet,
    pub h: Vec<f64>,
    pub k: Matrix,
}

fn positions(sub: VarSet, within: VarSet) -> Vec<usize> {
    sub.iter().map(|v| within.position(v).expect("sub within scope")).collect()
}

impl Gaussian {
    pub fn new(scope: VarSet, mean: Vec<f64>, conc: Matrix) -> Result<Self> {
        let n = scope.len();
        if mean.len() != n || conc.dim() != n {
            return Err(Error::InvalidValuation(format!(
                "scope {scope} has {n} variables; mean has {} entries and concentration is {}x{}",
                mean.len(),
                conc.dim(),
                conc.dim()
            )));
        }
        if mean.iter().chain(conc.as_slice()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidValuation("non-finite entry".into()));
        }
        if !conc.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::InvalidValuation("concentration matrix is not symmetric".into()));
        }
        cholesky(&conc).map_err(|_| Error::InvalidValuation("concentration matrix is not positive definite".into()))?;
        Ok(Gaussian { scope, mean, conc: conc.symmetrized() })
    }

    /// The Gaussian on the empty domain.
    pub fn vacuous() -> Self {
        Gaussian { scope: VarSet::empty(), mean: vec![], conc: Matrix::zeros(0) }
    }

    pub fn scope(&self) -> VarSet {
        self.scope
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn concentration(&self) -> &Matrix {
        &self.conc
    }

    pub fn to_canonical(&self) -> CanonicalGaussian {
        CanonicalGaussian { scope: self.scope, h: self.conc.mul_vec(&self.mean), k: self.conc.clone() }
    }

    pub fn from_canonical(c: &CanonicalGaussian) -> Result<Self> {
        Self::from_canonical_scaled(c, c.k.max_diag())
    }

    /// Like [`from_canonical`](Self::from_canonical) but judges definiteness
    /// against a caller-supplied scale (the operands of a subtraction).
    fn from_canonical_scaled(c: &CanonicalGaussian, scale: f64) -> Result<Self> {
        let k = c.k.symmetrized();
        cholesky_scaled(&k, scale)
            .map_err(|_| Error::NotReducible("canonical concentration is not positive definite".into()))?;
        let mean = solve(&k, &c.h)
            .map_err(|_| Error::NotReducible("canonical concentration is not positive definite".into()))?;
        Ok(Gaussian { scope: c.scope, mean, conc: k })
    }

    fn max_abs(&self) -> f64 {
        self.mean.iter().fold(self.conc.max_abs(), |m, v| m.max(v.abs()))
    }
}

impl CanonicalGaussian {
    /// Zero-pads to a larger scope.
    pub fn extend(&self, scope: VarSet) -> CanonicalGaussian {
        let pos = positions(self.scope, scope);
        let mut h = vec![0.0; scope.len()];
        for (a, &i) in pos.iter().enumerate() {
            h[i] = self.h[a];
        }
        CanonicalGaussian { scope, h, k: self.k.pad(scope.len(), &pos) }
    }

    pub fn add(&self, other: &CanonicalGaussian) -> CanonicalGaussian {
        let u = self.scope.union(other.scope);
        let (a, b) = (self.extend(u), other.extend(u));
        CanonicalGaussian { scope: u, h: a.h.iter().zip(&b.h).map(|(x, y)| x + y).collect(), k: a.k.add(&b.k) }
    }

    pub fn sub(&self, other: &CanonicalGaussian) -> CanonicalGaussian {
        let u = self.scope.union(other.scope);
        let (a, b) = (self.extend(u), other.extend(u));
        CanonicalGaussian { scope: u, h: a.h.iter().zip(&b.h).map(|(x, y)| x - y).collect(), k: a.k.sub(&b.k) }
    }
}

/// `K = K1↑ + K2↑`, `μ = K⁻¹(K1↑μ1↑ + K2↑μ2↑)`.
pub fn combine_gaussian(g1: &Gaussian, g2: &Gaussian) -> Result<Gaussian> {
    let c = g1.to_canonical().add(&g2.to_canonical());
    Gaussian::from_canonical(&c).map_err(|_| Error::NotPositiveDefinite)
}

/// `π_t(μ, K) = (μ_t, ((K⁻¹)_{t,t})⁻¹)`.
pub fn project_gaussian(g: &Gaussian, t: VarSet) -> Result<Gaussian> {
    if !t.is_subset(g.scope) {
        return Err(Error::ProjectionDomain { target: t.to_string(), label: g.scope.to_string() });
    }
    if t == g.scope {
        return Ok(g.clone());
    }
    let pos = positions(t, g.scope);
    let sigma = invert_spd(&g.conc)?;
    let conc = invert_spd(&sigma.select(&pos))?;
    Ok(Gaussian { scope: t, mean: pos.iter().map(|&i| g.mean[i]).collect(), conc })
}

impl GroupTag for VarSet {
    fn join(&self, other: &Self) -> Self {
        self.union(*other)
    }
}

impl Valuation for Gaussian {
    type Domain = VarSet;
    type Tag = VarSet;
    type Context = ();

    const INSTANCE: Instance = Instance::Gaussian;
    const STRONG_COMBINATION: bool = true;

    fn label(&self) -> VarSet {
        self.scope
    }

    fn combine(&self, other: &Self) -> Result<Self> {
        combine_gaussian(self, other)
    }

    fn project(&self, x: &VarSet) -> Result<Self> {
        project_gaussian(self, *x)
    }

    fn group_tag(&self) -> VarSet {
        self.scope
    }

    fn is_null(&self) -> bool {
        false
    }

    /// Entries are compared relative to the largest entry of either operand.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.scope != other.scope {
            return false;
        }
        let scale = self.max_abs().max(other.max_abs());
        let eq = |a: f64, b: f64| close(a, b, tol) || (a - b).abs() <= tol * scale;
        self.mean.iter().zip(&other.mean).all(|(&a, &b)| eq(a, b))
            && self.conc.as_slice().iter().zip(other.conc.as_slice()).all(|(&a, &b)| eq(a, b))
    }

    fn reduce_quotient(num: &Self, den: &Self) -> Result<Self> {
        if !den.scope.is_subset(num.scope) {
            return Err(Error::DominationViolation(format!(
                "denominator domain {} exceeds numerator domain {}",
                den.scope, num.scope
            )));
        }
        let diff = num.to_canonical().sub(&den.to_canonical());
        Gaussian::from_canonical_scaled(&diff, num.conc.max_diag())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(v: &[u32]) -> VarSet {
        v.iter().copied().collect()
    }

    fn g1(mu: f64, k: f64) -> Gaussian {
        Gaussian::new(vs(&[0]), vec![mu], Matrix::diag(&[k])).unwrap()
    }

    fn rows(r: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn one_dimensional_combination() {
        let r = g1(0.0, 1.0).combine(&g1(2.0, 1.0)).unwrap();
        assert!(r.approx_eq(&g1(1.0, 2.0), 1e-12));
    }

    #[test]
    fn disjoint_scopes_assemble_block_diagonally() {
        let a = g1(1.0, 2.0);
        let b = Gaussian::new(vs(&[1]), vec![-3.0], Matrix::diag(&[5.0])).unwrap();
        let r = a.combine(&b).unwrap();
        assert_eq!(r.scope(), vs(&[0, 1]));
        assert!(r.approx_eq(&Gaussian::new(vs(&[0, 1]), vec![1.0, -3.0], Matrix::diag(&[2.0, 5.0])).unwrap(), 1e-12));
    }

    #[test]
    fn self_combination_doubles_concentration() {
        let g = Gaussian::new(vs(&[0, 1]), vec![1.0, 2.0], rows(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        let r = g.combine(&g).unwrap();
        let expect = Gaussian::new(vs(&[0, 1]), vec![1.0, 2.0], rows(&[&[4.0, 2.0], &[2.0, 4.0]])).unwrap();
        assert!(r.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn projections() {
        let d = Gaussian::new(vs(&[0, 1]), vec![0.5, -1.0], Matrix::diag(&[3.0, 7.0])).unwrap();
        assert!(d.project(&vs(&[0])).unwrap().approx_eq(&g1(0.5, 3.0), 1e-12));
        assert!(d.project(&vs(&[0, 1])).unwrap().approx_eq(&d, 0.0));
        let c = Gaussian::new(vs(&[0, 1]), vec![0.0, 0.0], rows(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!(c.project(&vs(&[0])).unwrap().approx_eq(&g1(0.0, 1.5), 1e-12));
        assert_eq!(c.project(&vs(&[])).unwrap(), Gaussian::vacuous());
        assert!(matches!(c.project(&vs(&[2])), Err(Error::ProjectionDomain { .. })));
    }

    #[test]
    fn canonical_roundtrip_and_reduce() {
        let g = Gaussian::new(vs(&[0, 1]), vec![0.3, -0.7], rows(&[&[2.0, 0.4], &[0.4, 1.0]])).unwrap();
        assert!(Gaussian::from_canonical(&g.to_canonical()).unwrap().approx_eq(&g, 1e-12));
        let r = Gaussian::reduce_quotient(&g1(1.0, 2.0), &g1(0.0, 1.0)).unwrap();
        assert!(r.approx_eq(&g1(2.0, 1.0), 1e-12));
        assert!(matches!(Gaussian::reduce_quotient(&g1(0.0, 1.0), &g1(0.0, 2.0)), Err(Error::NotReducible(_))));
        // an idempotent is never a member
        assert!(Gaussian::reduce_quotient(&g, &g).is_err());
    }

    #[test]
    fn no_units_or_nulls() {
        assert!(matches!(Gaussian::unit(&(), &vs(&[0])), Err(Error::Unsupported { .. })));
        assert!(matches!(Gaussian::null(&(), &vs(&[0])), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn validation() {
        assert!(Gaussian::new(vs(&[0, 1]), vec![0.0, 0.0], rows(&[&[1.0, 0.5], &[0.4, 1.0]])).is_err());
        assert!(Gaussian::new(vs(&[0, 1]), vec![0.0, 0.0], rows(&[&[1.0, 2.0], &[2.0, 1.0]])).is_err());
        assert!(Gaussian::new(vs(&[0, 1]), vec![0.0], Matrix::identity(2)).is_err());
    }

    #[test]
    fn equal_domains_dominate_each_other() {
        let a = g1(0.0, 1.0);
        let b = g1(4.0, 9.0);
        assert!(a.dominates(&b) && b.dominates(&a));
    }
}
