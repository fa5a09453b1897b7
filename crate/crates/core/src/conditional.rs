//! Conditionals `φ_{x|y} = π_x(φ) · (π_y(φ))⁻¹`.

use crate::algebra::Valuation;
use crate::error::{Error, Result};
use crate::lattice::Domain;
use crate::quotient::Quotient;

/// A conditional together with the valuation and domains it came from.
#[derive(Clone, Debug)]
pub struct Conditional<V: Valuation> {
    pub base: V,
    pub upper: V::Domain,
    pub lower: V::Domain,
    pub body: Quotient<V>,
}

/// Conditional of `phi` for `x` given `y`; requires `y <= x <= d(phi)` and a
/// non-null marginal on `y`.
pub fn conditional<V: Valuation>(phi: &V, x: &V::Domain, y: &V::Domain) -> Result<Conditional<V>> {
    let d = phi.label();
    if !(y.compatible(x) && x.compatible(&d) && y.leq(x) && x.leq(&d)) {
        return Err(Error::OrderViolation(format!("conditional needs {y} <= {x} <= {d}")));
    }
    let upper = phi.project(x)?;
    let lower = phi.project(y)?;
    if lower.is_null() {
        return Err(Error::NullInput(format!("marginal on {y} is null")));
    }
    Ok(Conditional { base: phi.clone(), upper: x.clone(), lower: y.clone(), body: Quotient::new(upper, lower)? })
}

impl<V: Valuation> Conditional<V> {
    /// `φ_{x|y} · marginal`; with `marginal = π_y(φ)` this is `π_x(φ)`.
    pub fn continue_with(&self, marginal: &V) -> Result<Quotient<V>> {
        if marginal.label() != self.lower {
            return Err(Error::OrderViolation(format!(
                "marginal has domain {} but the conditional is given {}",
                marginal.label(),
                self.lower
            )));
        }
        self.body.multiply(&Quotient::member(marginal.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::Gaussian;
    use crate::linalg::Matrix;
    use crate::potential::{Potential, VariableSpace};
    use crate::VarSet;

    fn vs(v: &[u32]) -> VarSet {
        v.iter().copied().collect()
    }

    fn q() -> Potential {
        Potential::new(vs(&[0, 1]), vec![2, 2], vec![1.0, 3.0, 2.0, 4.0]).unwrap()
    }

    #[test]
    fn potential_conditional_example() {
        let c = conditional(&q(), &vs(&[0, 1]), &vs(&[0])).unwrap();
        assert_eq!(c.body.label0(), vs(&[0, 1]));
        let r = c.body.reduce().unwrap();
        let expect = [0.25, 0.75, 1.0 / 3.0, 2.0 / 3.0];
        assert!(r.values().iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn equal_domains_give_the_idempotent() {
        let c = conditional(&q(), &vs(&[0]), &vs(&[0])).unwrap();
        let m = q().project(&vs(&[0])).unwrap();
        assert!(c.body.equals0(&Quotient::member(m).idempotent_of(), 1e-12));
        let g = Gaussian::new(vs(&[0]), vec![1.0], Matrix::diag(&[2.0])).unwrap();
        let c = conditional(&g, &vs(&[0]), &vs(&[0])).unwrap();
        assert!(c.body.equals0(&Quotient::member(g).idempotent_of(), 1e-12));
    }

    #[test]
    fn continuation() {
        let c = conditional(&q(), &vs(&[0, 1]), &vs(&[0])).unwrap();
        let back = c.continue_with(&q().project(&vs(&[0])).unwrap()).unwrap();
        assert!(back.reduce().unwrap().approx_eq(&q(), 1e-12));
        let unit = Potential::unit(&VariableSpace::new(vec![2, 2]), &vs(&[0])).unwrap();
        let same = c.continue_with(&unit).unwrap().reduce().unwrap();
        assert!(same.approx_eq(&c.body.reduce().unwrap(), 1e-12));
        assert!(c.continue_with(&q()).is_err());
    }

    #[test]
    fn gaussian_continuation() {
        let k = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let g = Gaussian::new(vs(&[0, 1]), vec![1.0, -1.0], k).unwrap();
        let c = conditional(&g, &vs(&[0, 1]), &vs(&[1])).unwrap();
        let back = c.continue_with(&g.project(&vs(&[1])).unwrap()).unwrap();
        assert!(back.reduce().unwrap().approx_eq(&g, 1e-12));
    }

    #[test]
    fn preconditions() {
        assert!(matches!(conditional(&q(), &vs(&[0]), &vs(&[0, 1])), Err(Error::OrderViolation(_))));
        assert!(matches!(conditional(&q(), &vs(&[0, 2]), &vs(&[0])), Err(Error::OrderViolation(_))));
        let z = Potential::new(vs(&[0, 1]), vec![2, 2], vec![0.0; 4]).unwrap();
        assert!(matches!(conditional(&z, &vs(&[0, 1]), &vs(&[0])), Err(Error::NullInput(_))));
    }
}
