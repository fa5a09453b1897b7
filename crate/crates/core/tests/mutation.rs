//! A deliberately broken projection must be caught by the axiom suite.

use sepval::generators::PotentialGen;
use sepval::harness::{check_axioms, CaseRng, Generator};
use sepval::potential::{Potential, PotentialTag, VariableSpace};
use sepval::{Instance, Result, Valuation, VarSet};

/// Potentials whose projection adds one spurious unit to the first cell.
#[derive(Clone, Debug, PartialEq)]
struct Broken(Potential);

impl Valuation for Broken {
    type Domain = VarSet;
    type Tag = PotentialTag;
    type Context = VariableSpace;

    const INSTANCE: Instance = Instance::Potential;

    fn label(&self) -> VarSet {
        self.0.label()
    }

    fn combine(&self, other: &Self) -> Result<Self> {
        Ok(Broken(self.0.combine(&other.0)?))
    }

    fn project(&self, x: &VarSet) -> Result<Self> {
        let p = self.0.project(x)?;
        if *x == self.label() {
            return Ok(Broken(p));
        }
        let mut values = p.values().to_vec();
        values[0] += 1.0;
        Ok(Broken(Potential::new(p.scope(), p.cards().to_vec(), values)?))
    }

    fn group_tag(&self) -> PotentialTag {
        self.0.group_tag()
    }

    fn is_null(&self) -> bool {
        self.0.is_null()
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.0.approx_eq(&other.0, tol)
    }

    fn reduce_quotient(num: &Self, den: &Self) -> Result<Self> {
        Ok(Broken(Potential::reduce_quotient(&num.0, &den.0)?))
    }

    fn unit(ctx: &VariableSpace, x: &VarSet) -> Result<Self> {
        Ok(Broken(Potential::unit(ctx, x)?))
    }

    fn null(ctx: &VariableSpace, x: &VarSet) -> Result<Self> {
        Ok(Broken(Potential::null(ctx, x)?))
    }
}

struct BrokenGen(PotentialGen);

impl Generator for BrokenGen {
    type V = Broken;

    fn name(&self) -> String {
        "broken-potential".into()
    }
    fn tolerance(&self) -> f64 {
        self.0.tolerance()
    }
    fn domains(&self) -> &[VarSet] {
        self.0.domains()
    }
    fn is_modular(&self) -> bool {
        true
    }
    fn is_distributive(&self) -> bool {
        true
    }
    fn context(&self) -> VariableSpace {
        self.0.context()
    }
    fn random(&self, rng: &mut CaseRng, d: &VarSet, full: bool) -> Broken {
        Broken(self.0.random(rng, d, full))
    }
    fn perturb(&self, rng: &mut CaseRng, v: &Broken) -> Broken {
        Broken(self.0.perturb(rng, &v.0))
    }
}

#[test]
fn off_by_one_projection_is_reported() {
    let r = check_axioms(&BrokenGen(PotentialGen::default()), 200, 7);
    print!("{r}");
    assert!(!r.all_passed());
    let caught: Vec<_> = r.failures().map(|f| f.name.as_str()).collect();
    assert!(caught.contains(&"projection-transitive"), "{caught:?}");
    assert!(caught.contains(&"combination"), "{caught:?}");
    // the faithful instance passes the same run
    assert!(check_axioms(&PotentialGen::default(), 200, 7).all_passed());
}
