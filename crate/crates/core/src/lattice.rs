//! Domain lattices.
//!
//! Two families of domains are provided: finite sets of variables ordered by
//! inclusion ([`VarSet`], a distributive lattice) and partitions of a finite
//! universe ordered by refinement ([`Partition`], where `P1 <= P2` iff `P2`
//! is finer than `P1`). Subsets of a partition's block set are bitmasks over
//! the canonical block ordering (blocks sorted by least atom).

use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::report::{LawReport, LawResult};

/// A domain lattice element.
pub trait Domain: Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync {
    fn join(&self, other: &Self) -> Self;
    fn meet(&self, other: &Self) -> Self;
    fn leq(&self, other: &Self) -> bool;
    /// Least element of the lattice this domain lives in.
    fn bottom(&self) -> Self;
    /// True if both domains belong to the same lattice.
    fn compatible(&self, other: &Self) -> bool;
}

/// Finite set of variables with indices `0..64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VarSet(u64);

impl VarSet {
    pub const MAX_VARS: u32 = 64;

    pub const fn empty() -> Self {
        VarSet(0)
    }

    pub const fn from_bits(bits: u64) -> Self {
        VarSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: u32) -> Self {
        assert!(v < Self::MAX_VARS, "variable index {v} out of range");
        VarSet(1 << v)
    }

    pub fn first_n(n: u32) -> Self {
        assert!(n <= Self::MAX_VARS);
        if n == 64 {
            VarSet(u64::MAX)
        } else {
            VarSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, v: u32) -> bool {
        v < Self::MAX_VARS && self.0 & (1 << v) != 0
    }

    pub fn insert(&mut self, v: u32) {
        *self = self.union(Self::singleton(v));
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VarSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VarSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Variables in increasing index order.
    pub fn iter(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros();
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    /// Position of `v` within this set (its rank in increasing order).
    pub fn position(self, v: u32) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        let below = if v == 0 { 0 } else { self.0 & ((1u64 << v) - 1) };
        Some(below.count_ones() as usize)
    }

    /// All subsets of this set, in increasing bitmask order.
    pub fn subsets(self) -> Vec<VarSet> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = 0u64;
        loop {
            out.push(VarSet(sub));
            if sub == self.0 {
                break;
            }
            sub = (sub.wrapping_sub(self.0)) & self.0;
        }
        out
    }
}

impl FromIterator<u32> for VarSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut s = VarSet::empty();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl Domain for VarSet {
    fn join(&self, other: &Self) -> Self {
        self.union(*other)
    }

    fn meet(&self, other: &Self) -> Self {
        self.intersection(*other)
    }

    fn leq(&self, other: &Self) -> bool {
        self.is_subset(*other)
    }

    fn bottom(&self) -> Self {
        VarSet::empty()
    }

    fn compatible(&self, _other: &Self) -> bool {
        true
    }
}

/// Partition of the universe `{0, .., n_atoms - 1}` into nonempty blocks.
///
/// Blocks are atom bitmasks kept sorted by least atom; this ordering is the
/// canonical block indexing used by subset bitmasks over the frame.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n_atoms: u32,
    blocks: Vec<u64>,
}

impl Partition {
    pub const MAX_ATOMS: u32 = 64;

    /// Builds a partition from blocks given as atom lists.
    pub fn new(n_atoms: u32, blocks: &[Vec<u32>]) -> Result<Self> {
        let masks = blocks
            .iter()
            .map(|b| {
                let mut m = 0u64;
                for &a in b {
                    if a >= n_atoms {
                        return Err(Error::InvalidDomain(format!("atom {a} outside universe of {n_atoms} atoms")));
                    }
                    if m & (1 << a) != 0 {
                        return Err(Error::InvalidDomain(format!("atom {a} repeated in a block")));
                    }
                    m |= 1 << a;
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_masks(n_atoms, masks)
    }

    /// Builds a partition from atom bitmasks, validating disjointness and cover.
    pub fn from_masks(n_atoms: u32, mut blocks: Vec<u64>) -> Result<Self> {
        if n_atoms == 0 || n_atoms > Self::MAX_ATOMS {
            return Err(Error::InvalidDomain(format!("universe size {n_atoms} outside 1..={}", Self::MAX_ATOMS)));
        }
        let universe = universe_mask(n_atoms);
        let mut seen = 0u64;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::InvalidDomain("empty block".into()));
            }
            if b & !universe != 0 {
                return Err(Error::InvalidDomain("block outside universe".into()));
            }
            if seen & b != 0 {
                return Err(Error::InvalidDomain("blocks are not disjoint".into()));
            }
            seen |= b;
        }
        if seen != universe {
            return Err(Error::InvalidDomain("blocks do not cover the universe".into()));
        }
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(Partition { n_atoms, blocks })
    }

    /// The finest partition: every atom is its own block.
    pub fn discrete(n_atoms: u32) -> Self {
        Self::from_masks(n_atoms, (0..n_atoms).map(|a| 1u64 << a).collect()).expect("discrete partition is valid")
    }

    /// The coarsest partition: a single block.
    pub fn indiscrete(n_atoms: u32) -> Self {
        Self::from_masks(n_atoms, vec![universe_mask(n_atoms)]).expect("single block is valid")
    }

    pub fn n_atoms(&self) -> u32 {
        self.n_atoms
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    /// Number of blocks, i.e. the size of the frame.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Bitmask of the full frame (all block indices).
    pub fn full_set(&self) -> u64 {
        if self.blocks.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.blocks.len()) - 1
        }
    }

    pub fn block_of_atom(&self, atom: u32) -> usize {
        self.blocks.iter().position(|b| b & (1 << atom) != 0).expect("atom lies in some block")
    }

    /// Block atoms as lists, in canonical order.
    pub fn block_lists(&self) -> Vec<Vec<u32>> {
        self.blocks.iter().map(|&b| mask_atoms(b)).collect()
    }

    /// For `self <= finer`, the index of the block of `self` containing each
    /// block of `finer`.
    pub fn parent_map(&self, finer: &Partition) -> Result<Vec<usize>> {
        if !self.compatible(finer) {
            return Err(Error::ContextMismatch(format!(
                "partitions over {} and {} atoms",
                self.n_atoms, finer.n_atoms
            )));
        }
        finer
            .blocks
            .iter()
            .map(|&fb| {
                self.blocks
                    .iter()
                    .position(|&cb| fb & !cb == 0)
                    .ok_or_else(|| Error::OrderViolation(format!("{self} is not coarser than {finer}")))
            })
            .collect()
    }

    /// All partitions of an `n`-atom universe (Bell number many).
    pub fn enumerate_all(n_atoms: u32) -> Vec<Partition> {
        assert!((1..=12).contains(&n_atoms), "enumeration is for small universes");
        let mut out = Vec::new();
        let mut blocks: Vec<u64> = Vec::new();
        fn rec(atom: u32, n: u32, blocks: &mut Vec<u64>, out: &mut Vec<Partition>) {
            if atom == n {
                out.push(Partition::from_masks(n, blocks.clone()).expect("valid by construction"));
                return;
            }
            for i in 0..blocks.len() {
                blocks[i] |= 1 << atom;
                rec(atom + 1, n, blocks, out);
                blocks[i] &= !(1 << atom);
            }
            blocks.push(1 << atom);
            rec(atom + 1, n, blocks, out);
            blocks.pop();
        }
        rec(0, n_atoms, &mut blocks, &mut out);
        out
    }
}

fn universe_mask(n_atoms: u32) -> u64 {
    if n_atoms == 64 {
        u64::MAX
    } else {
        (1u64 << n_atoms) - 1
    }
}

fn mask_atoms(mut m: u64) -> Vec<u32> {
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros());
        m &= m - 1;
    }
    out
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.block_lists().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, a) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl Domain for Partition {
    /// Common refinement: the nonempty pairwise block intersections.
    fn join(&self, other: &Self) -> Self {
        assert!(self.compatible(other), "join across universes");
        let mut blocks = Vec::with_capacity(self.blocks.len() * other.blocks.len());
        for &a in &self.blocks {
            for &b in &other.blocks {
                if a & b != 0 {
                    blocks.push(a & b);
                }
            }
        }
        Partition::from_masks(self.n_atoms, blocks).expect("refinement is a partition")
    }

    /// Finest common coarsening: connected components of the overlap graph
    /// on the blocks of both partitions.
    fn meet(&self, other: &Self) -> Self {
        assert!(self.compatible(other), "meet across universes");
        let nodes: Vec<u64> = self.blocks.iter().chain(other.blocks.iter()).copied().collect();
        let mut uf = UnionFind::new(nodes.len());
        let offset = self.blocks.len();
        for (i, &a) in self.blocks.iter().enumerate() {
            for (j, &b) in other.blocks.iter().enumerate() {
                if a & b != 0 {
                    uf.union(i, offset + j);
                }
            }
        }
        let mut comps: Vec<(usize, u64)> = Vec::new();
        for (i, &m) in nodes.iter().enumerate() {
            let r = uf.find(i);
            match comps.iter_mut().find(|(root, _)| *root == r) {
                Some((_, acc)) => *acc |= m,
                None => comps.push((r, m)),
            }
        }
        Partition::from_masks(self.n_atoms, comps.into_iter().map(|(_, m)| m).collect())
            .expect("components form a partition")
    }

    fn leq(&self, other: &Self) -> bool {
        self.compatible(other) && other.blocks.iter().all(|&fb| self.blocks.iter().any(|&cb| fb & !cb == 0))
    }

    fn bottom(&self) -> Self {
        Partition::indiscrete(self.n_atoms)
    }

    fn compatible(&self, other: &Self) -> bool {
        self.n_atoms == other.n_atoms
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Refining map: the blocks of `lambda` contained in some block of `s`,
/// where `s` is a subset of the frame `theta <= lambda`.
pub fn refining_map(s: u64, theta: &Partition, lambda: &Partition) -> Result<u64> {
    let parent = theta.parent_map(lambda)?;
    Ok(refine_with(s, &parent))
}

/// Coarsening map: the blocks of `theta` whose refinement meets `t`, where
/// `t` is a subset of the frame `lambda >= theta`.
pub fn coarsening_map(t: u64, theta: &Partition, lambda: &Partition) -> Result<u64> {
    let parent = theta.parent_map(lambda)?;
    Ok(coarsen_with(t, &parent))
}

pub(crate) fn refine_with(s: u64, parent: &[usize]) -> u64 {
    parent.iter().enumerate().filter(|(_, &p)| s & (1 << p) != 0).fold(0u64, |acc, (i, _)| acc | (1 << i))
}

pub(crate) fn coarsen_with(mut t: u64, parent: &[usize]) -> u64 {
    let mut out = 0u64;
    while t != 0 {
        let i = t.trailing_zeros() as usize;
        out |= 1 << parent[i];
        t &= t - 1;
    }
    out
}

/// Coarsening images of every subset of the finer frame, indexed by subset.
pub(crate) fn coarsening_table(parent: &[usize]) -> Vec<u64> {
    let k = parent.len();
    let mut table = vec![0u64; 1 << k];
    for s in 1usize..(1 << k) {
        let low = s.trailing_zeros() as usize;
        table[s] = table[s & (s - 1)] | (1 << parent[low]);
    }
    table
}

/// A lattice of domains: membership test, fallible lattice operations and
/// declared modular/distributive flags.
pub trait LatticeContext {
    type Domain: Domain;

    fn contains(&self, x: &Self::Domain) -> bool;
    fn is_modular(&self) -> bool;
    fn is_distributive(&self) -> bool;
    fn describe(&self) -> String;

    fn check(&self, x: &Self::Domain) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!("{x} is not in {}", self.describe())))
        }
    }

    fn join(&self, x: &Self::Domain, y: &Self::Domain) -> Result<Self::Domain> {
        self.check(x)?;
        self.check(y)?;
        Ok(x.join(y))
    }

    fn meet(&self, x: &Self::Domain, y: &Self::Domain) -> Result<Self::Domain> {
        self.check(x)?;
        self.check(y)?;
        Ok(x.meet(y))
    }

    fn leq(&self, x: &Self::Domain, y: &Self::Domain) -> Result<bool> {
        self.check(x)?;
        self.check(y)?;
        Ok(x.leq(y))
    }
}

/// Powerset lattice of a finite variable universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetLattice {
    universe: VarSet,
}

impl SubsetLattice {
    pub fn new(universe: VarSet) -> Self {
        SubsetLattice { universe }
    }

    pub fn universe(&self) -> VarSet {
        self.universe
    }

    pub fn elements(&self) -> Vec<VarSet> {
        self.universe.subsets()
    }
}

impl LatticeContext for SubsetLattice {
    type Domain = VarSet;

    fn contains(&self, x: &VarSet) -> bool {
        x.is_subset(self.universe)
    }

    fn is_modular(&self) -> bool {
        true
    }

    fn is_distributive(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("subset lattice of {}", self.universe)
    }
}

/// Lattice of partitions of a finite universe, or a sublattice of it given
/// by an explicit member list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionLattice {
    n_atoms: u32,
    members: Option<Vec<Partition>>,
    modular: bool,
    distributive: bool,
}

impl PartitionLattice {
    /// Full partition lattice. Flags are verified exhaustively for universes
    /// of at most five atoms; larger ones contain the non-modular lattice of
    /// a four-atom universe as an interval, so both flags are false.
    pub fn new(n_atoms: u32) -> Self {
        let (modular, distributive) = if n_atoms <= 5 {
            let all = Partition::enumerate_all(n_atoms);
            (holds_modular(&all), holds_distributive(&all))
        } else {
            (false, false)
        };
        PartitionLattice { n_atoms, members: None, modular, distributive }
    }

    /// Sublattice given by its members; must be closed under join and meet.
    pub fn sublattice(n_atoms: u32, members: Vec<Partition>, distributive: bool) -> Result<Self> {
        for a in &members {
            if a.n_atoms() != n_atoms {
                return Err(Error::ContextMismatch("member over a different universe".into()));
            }
            for b in &members {
                if !members.contains(&a.join(b)) || !members.contains(&a.meet(b)) {
                    return Err(Error::InvalidDomain(format!("member list is not closed under join/meet at {a}, {b}")));
                }
            }
        }
        Ok(PartitionLattice { n_atoms, members: Some(members), modular: distributive, distributive })
    }

    pub fn n_atoms(&self) -> u32 {
        self.n_atoms
    }

    /// All lattice elements (enumerated for small universes).
    pub fn elements(&self) -> Vec<Partition> {
        match &self.members {
            Some(m) => m.clone(),
            None => Partition::enumerate_all(self.n_atoms),
        }
    }
}

impl LatticeContext for PartitionLattice {
    type Domain = Partition;

    fn contains(&self, x: &Partition) -> bool {
        x.n_atoms() == self.n_atoms && self.members.as_ref().is_none_or(|m| m.contains(x))
    }

    fn is_modular(&self) -> bool {
        self.modular
    }

    fn is_distributive(&self) -> bool {
        self.distributive
    }

    fn describe(&self) -> String {
        format!("partition lattice over {} atoms", self.n_atoms)
    }
}

fn holds_modular<D: Domain>(elems: &[D]) -> bool {
    elems.iter().all(|x| {
        elems.iter().all(|y| elems.iter().filter(|z| z.leq(y)).all(|z| y.meet(&x.join(z)) == x.meet(y).join(z)))
    })
}

fn holds_distributive<D: Domain>(elems: &[D]) -> bool {
    elems.iter().all(|x| elems.iter().all(|y| elems.iter().all(|z| x.meet(&y.join(z)) == x.meet(y).join(&x.meet(z)))))
}

/// Checks lattice laws on all triples drawn from `sample`.
///
/// Reported laws: `commutativity`, `associativity`, `absorption`,
/// `idempotence`, `order-consistency`, `modular` and `distributive`. The
/// last two are properties, not axioms; a FAIL there is information about
/// the lattice, not a defect.
pub fn check_lattice_laws<D: Domain>(sample: &[D]) -> LawReport {
    let mut report = LawReport::new("lattice", "domains");
    let pairs = sample.len() * sample.len();
    let triples = pairs * sample.len();

    let first_pair = |pred: &dyn Fn(&D, &D) -> bool| -> Option<String> {
        for x in sample {
            for y in sample {
                if !pred(x, y) {
                    return Some(format!("x={x} y={y}"));
                }
            }
        }
        None
    };
    let first_triple = |pred: &dyn Fn(&D, &D, &D) -> bool| -> Option<String> {
        for x in sample {
            for y in sample {
                for z in sample {
                    if !pred(x, y, z) {
                        return Some(format!("x={x} y={y} z={z}"));
                    }
                }
            }
        }
        None
    };

    report.push(LawResult::from_check(
        "commutativity",
        pairs,
        first_pair(&|x, y| x.join(y) == y.join(x) && x.meet(y) == y.meet(x)),
    ));
    report.push(LawResult::from_check(
        "associativity",
        triples,
        first_triple(&|x, y, z| x.join(y).join(z) == x.join(&y.join(z)) && x.meet(y).meet(z) == x.meet(&y.meet(z))),
    ));
    report.push(LawResult::from_check(
        "absorption",
        pairs,
        first_pair(&|x, y| x.meet(&x.join(y)) == *x && x.join(&x.meet(y)) == *x),
    ));
    report.push(LawResult::from_check(
        "idempotence",
        sample.len(),
        first_pair(&|x, _| x.join(x) == *x && x.meet(x) == *x),
    ));
    report.push(LawResult::from_check(
        "order-consistency",
        pairs,
        first_pair(&|x, y| {
            let le = x.leq(y);
            le == (x.join(y) == *y) && le == (x.meet(y) == *x)
        }),
    ));
    report.push(LawResult::from_check(
        "modular",
        triples,
        first_triple(&|x, y, z| !z.leq(y) || y.meet(&x.join(z)) == x.meet(y).join(z)),
    ));
    report.push(LawResult::from_check(
        "distributive",
        triples,
        first_triple(&|x, y, z| x.meet(&y.join(z)) == x.meet(y).join(&x.meet(z))),
    ));
    report
}
