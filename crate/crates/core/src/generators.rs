//! Random valuation generators for the law harness.

use rand::Rng;

use crate::belief::{multivariate_lattice, MassFunction};
use crate::error::Result;
use crate::gaussian::Gaussian;
use crate::harness::{CaseRng, Generator};
use crate::lattice::{LatticeContext, Partition, PartitionLattice, SubsetLattice, VarSet};
use crate::linalg::Matrix;
use crate::potential::{Potential, VariableSpace};

/// Probability of a zero entry in a mixed-support table.
const ZERO_RATE: f64 = 0.15;

/// Potentials over a fixed variable space; domains are all variable subsets.
#[derive(Clone, Debug)]
pub struct PotentialGen {
    space: VariableSpace,
    domains: Vec<VarSet>,
    tol: f64,
}

impl PotentialGen {
    pub fn new(cards: Vec<usize>) -> Self {
        let space = VariableSpace::new(cards);
        let domains = SubsetLattice::new(space.universe()).elements();
        PotentialGen { space, domains, tol: 1e-9 }
    }

    fn table(&self, rng: &mut CaseRng, d: VarSet, mut value: impl FnMut(&mut CaseRng, usize) -> f64) -> Potential {
        let cards = self.space.cards_of(d).expect("domain within the space");
        let n = cards.iter().product::<usize>();
        let values = (0..n).map(|i| value(rng, i)).collect();
        Potential::new(d, cards, values).expect("generated table is valid")
    }
}

impl Default for PotentialGen {
    fn default() -> Self {
        Self::new(vec![2, 2, 3, 2])
    }
}

impl Generator for PotentialGen {
    type V = Potential;

    fn name(&self) -> String {
        "potential".into()
    }
    fn tolerance(&self) -> f64 {
        self.tol
    }
    fn domains(&self) -> &[VarSet] {
        &self.domains
    }
    fn is_modular(&self) -> bool {
        true
    }
    fn is_distributive(&self) -> bool {
        true
    }
    fn context(&self) -> VariableSpace {
        self.space.clone()
    }

    fn random(&self, rng: &mut CaseRng, d: &VarSet, full: bool) -> Potential {
        if full {
            return self.table(rng, *d, |r, _| r.gen_range(0.5..2.0));
        }
        let n = self.space.cards_of(*d).expect("domain").iter().product::<usize>();
        let keep = rng.gen_range(0..n);
        self.table(rng, *d, |r, i| if i != keep && r.gen_bool(ZERO_RATE) { 0.0 } else { r.gen_range(0.5..2.0) })
    }

    fn perturb(&self, rng: &mut CaseRng, v: &Potential) -> Potential {
        let support = v.support();
        self.table(rng, v.scope(), |r, i| if support[i] { r.gen_range(0.5..2.0) } else { 0.0 })
    }
}

/// Overrides the equality tolerance of a generator.
pub trait WithTolerance: Sized {
    fn with_tolerance(self, tol: f64) -> Self;
}

macro_rules! with_tolerance {
    ($($t:ty),*) => {$(
        impl WithTolerance for $t {
            fn with_tolerance(mut self, tol: f64) -> Self {
                self.tol = tol;
                self
            }
        }
    )*};
}

with_tolerance!(PotentialGen, GaussianGen, BeliefGen);

/// Gaussian potentials on up to a handful of real variables.
#[derive(Clone, Debug)]
pub struct GaussianGen {
    domains: Vec<VarSet>,
    tol: f64,
}

impl GaussianGen {
    pub fn new(n_vars: u32) -> Self {
        GaussianGen { domains: SubsetLattice::new(VarSet::first_n(n_vars)).elements(), tol: 1e-8 }
    }
}

impl Default for GaussianGen {
    fn default() -> Self {
        Self::new(4)
    }
}

impl Generator for GaussianGen {
    type V = Gaussian;

    fn name(&self) -> String {
        "gaussian".into()
    }
    fn tolerance(&self) -> f64 {
        self.tol
    }
    fn domains(&self) -> &[VarSet] {
        &self.domains
    }
    fn is_modular(&self) -> bool {
        true
    }
    fn is_distributive(&self) -> bool {
        true
    }
    fn context(&self) {}

    /// `K = AᵀA + 1e-6·I` with a diagonally dominated `A`, so the condition
    /// number stays moderate and the tolerances mean something.
    fn random(&self, rng: &mut CaseRng, d: &VarSet, _full: bool) -> Gaussian {
        let n = d.len();
        if n == 0 {
            return Gaussian::vacuous();
        }
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = if i == j { rng.gen_range(1.0..2.0) } else { rng.gen_range(-0.3..0.3) };
            }
        }
        let a = Matrix::from_rows(&a).expect("square");
        let k = a.transpose().mul(&a).add(&Matrix::identity(n).scale(1e-6)).symmetrized();
        let mean = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        Gaussian::new(*d, mean, k).expect("generated concentration is positive definite")
    }

    fn perturb(&self, rng: &mut CaseRng, v: &Gaussian) -> Gaussian {
        self.random(rng, &v.scope(), true)
    }
}

/// Mass functions on a lattice of frames.
#[derive(Clone, Debug)]
pub struct BeliefGen {
    lattice: PartitionLattice,
    domains: Vec<Partition>,
    tol: f64,
}

impl BeliefGen {
    pub fn new(lattice: PartitionLattice) -> Self {
        let domains = lattice.elements();
        BeliefGen { lattice, domains, tol: 1e-12 }
    }

    /// All partitions of `n` atoms.
    pub fn partitions(n_atoms: u32) -> Self {
        Self::new(PartitionLattice::new(n_atoms))
    }

    /// The frames of sets of variables with the given cardinalities.
    pub fn multivariate(cards: &[usize]) -> Result<Self> {
        Ok(Self::new(multivariate_lattice(cards)?))
    }

    fn masses(&self, rng: &mut CaseRng, frame: &Partition, focal: &[u64]) -> MassFunction {
        let entries: Vec<_> = focal.iter().map(|&s| (s, rng.gen_range(0.1..1.0))).collect();
        MassFunction::new(frame.clone(), entries).expect("generated masses are valid")
    }
}

impl Generator for BeliefGen {
    type V = MassFunction;

    fn name(&self) -> String {
        "belief".into()
    }
    fn tolerance(&self) -> f64 {
        self.tol
    }
    fn domains(&self) -> &[Partition] {
        &self.domains
    }
    fn is_modular(&self) -> bool {
        self.lattice.is_modular()
    }
    fn is_distributive(&self) -> bool {
        self.lattice.is_distributive()
    }
    fn context(&self) {}

    /// One to four random nonempty focal sets; the full frame is always
    /// focal with `full` and half of the time otherwise.
    fn random(&self, rng: &mut CaseRng, d: &Partition, full: bool) -> MassFunction {
        let all = d.full_set();
        let mut focal: Vec<u64> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..=all)).collect();
        if full || rng.gen_bool(0.5) {
            focal.push(all);
        }
        self.masses(rng, d, &focal)
    }

    fn perturb(&self, rng: &mut CaseRng, v: &MassFunction) -> MassFunction {
        let focal: Vec<u64> = v.masses().keys().copied().collect();
        self.masses(rng, v.frame(), &focal)
    }
}
