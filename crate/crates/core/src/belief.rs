//! Unnormalized Dempster-Shafer belief functions on partition frames.
//!
//! A valuation is a mass function on the blocks of a frame; subsets of the
//! frame are bitmasks over the canonical block order. Combination lifts
//! focal sets to the joint frame with the refining map and intersects them
//! (no conflict renormalization). Commonalities turn combination into a
//! pointwise product, which is also how quotients are evaluated.

use std::collections::BTreeMap;

use crate::algebra::{clamp_zero, close, GroupTag, Instance, Valuation, ZERO_FLOOR};
use crate::error::{Error, Result};
use crate::lattice::{coarsen_with, coarsening_table, refine_with, Domain, Partition, PartitionLattice, VarSet};

/// Largest frame (in blocks) for which set functions are materialized.
pub const MAX_FRAME_BLOCKS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    frame: Partition,
    masses: BTreeMap<u64, f64>,
}

/// A real function on all subsets of a frame, indexed by subset bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction {
    frame: Partition,
    values: Vec<f64>,
}

fn check_frame(frame: &Partition) -> Result<()> {
    if frame.len() > MAX_FRAME_BLOCKS {
        return Err(Error::InvalidDomain(format!(
            "frame has {} blocks; at most {MAX_FRAME_BLOCKS} are supported",
            frame.len()
        )));
    }
    Ok(())
}

impl MassFunction {
    pub fn new(frame: Partition, masses: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        check_frame(&frame)?;
        let full = frame.full_set();
        let mut map = BTreeMap::new();
        for (s, m) in masses {
            if s & !full != 0 {
                return Err(Error::InvalidValuation(format!(
                    "subset {s:#b} refers to blocks outside a frame of {} blocks",
                    frame.len()
                )));
            }
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidValuation(format!("negative or non-finite mass {m}")));
            }
            *map.entry(s).or_insert(0.0) += m;
        }
        Ok(Self::from_map(frame, map))
    }

    fn from_map(frame: Partition, masses: BTreeMap<u64, f64>) -> Self {
        let masses = masses.into_iter().map(|(s, m)| (s, clamp_zero(m))).filter(|&(_, m)| m != 0.0).collect();
        MassFunction { frame, masses }
    }

    /// The vacuous belief function: all mass on the full frame.
    pub fn vacuous(frame: Partition) -> Result<Self> {
        let full = frame.full_set();
        Self::new(frame, [(full, 1.0)])
    }

    pub fn frame(&self) -> &Partition {
        &self.frame
    }

    /// Nonzero masses by focal set.
    pub fn masses(&self) -> &BTreeMap<u64, f64> {
        &self.masses
    }

    pub fn mass(&self, s: u64) -> f64 {
        self.masses.get(&s).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn to_dense(&self) -> SetFunction {
        let mut values = vec![0.0; 1 << self.frame.len()];
        for (&s, &m) in &self.masses {
            values[s as usize] = m;
        }
        SetFunction { frame: self.frame.clone(), values }
    }

    pub fn commonality(&self) -> SetFunction {
        mass_to_commonality(self)
    }
}

impl SetFunction {
    pub fn new(frame: Partition, values: Vec<f64>) -> Result<Self> {
        check_frame(&frame)?;
        if values.len() != 1 << frame.len() {
            return Err(Error::InvalidValuation(format!(
                "set function over {} blocks needs {} values",
                frame.len(),
                1usize << frame.len()
            )));
        }
        Ok(SetFunction { frame, values })
    }

    pub fn frame(&self) -> &Partition {
        &self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: u64) -> f64 {
        self.values[s as usize]
    }

    /// Entries below `-ZERO_FLOOR`, as `(subset, value)`.
    pub fn negative_entries(&self) -> Vec<(u64, f64)> {
        self.values.iter().enumerate().filter(|(_, &v)| v < -ZERO_FLOOR).map(|(s, &v)| (s as u64, v)).collect()
    }

    /// Interprets the values as masses; fails if any is negative.
    pub fn into_mass(self) -> Result<MassFunction> {
        if let Some(&(s, v)) = self.negative_entries().first() {
            return Err(Error::NotReducible(format!(
                "negative Moebius coefficient m({}) = {v}",
                subset_string(&self.frame, s)
            )));
        }
        let frame = self.frame;
        let masses = self.values.into_iter().enumerate().map(|(s, v)| (s as u64, v.max(0.0))).collect();
        Ok(MassFunction::from_map(frame, masses))
    }
}

/// Renders a subset of a frame as its blocks, e.g. `{[0,1],[3]}`.
pub fn subset_string(frame: &Partition, s: u64) -> String {
    let blocks = frame.block_lists();
    let parts: Vec<String> =
        (0..frame.len()).filter(|i| s & (1 << i) != 0).map(|i| format!("{:?}", blocks[i]).replace(' ', "")).collect();
    format!("{{{}}}", parts.join(","))
}

fn superset_sums(values: &mut [f64], k: usize) {
    for i in 0..k {
        let bit = 1usize << i;
        for s in 0..values.len() {
            if s & bit == 0 {
                values[s] += values[s | bit];
            }
        }
    }
}

fn superset_differences(values: &mut [f64], k: usize) {
    for i in 0..k {
        let bit = 1usize << i;
        for s in 0..values.len() {
            if s & bit == 0 {
                values[s] -= values[s | bit];
            }
        }
    }
}

fn subset_sums(values: &mut [f64], k: usize) {
    for i in 0..k {
        let bit = 1usize << i;
        for s in 0..values.len() {
            if s & bit != 0 {
                values[s] += values[s ^ bit];
            }
        }
    }
}

fn subset_differences(values: &mut [f64], k: usize) {
    for i in 0..k {
        let bit = 1usize << i;
        for s in 0..values.len() {
            if s & bit != 0 {
                values[s] -= values[s ^ bit];
            }
        }
    }
}

/// `q(S) = Σ_{T ⊇ S} m(T)`.
pub fn mass_to_commonality(m: &MassFunction) -> SetFunction {
    let mut f = m.to_dense();
    superset_sums(&mut f.values, m.frame.len());
    f
}

/// Inverse of [`mass_to_commonality`]; the result may have negative entries.
pub fn commonality_to_mass(q: &SetFunction) -> SetFunction {
    let mut f = q.clone();
    superset_differences(&mut f.values, q.frame.len());
    f.values.iter_mut().for_each(|v| *v = clamp_zero(*v));
    f
}

/// `b(S) = Σ_{T ⊆ S} m(T)`.
pub fn mass_to_belief(m: &MassFunction) -> SetFunction {
    let mut f = m.to_dense();
    subset_sums(&mut f.values, m.frame.len());
    f
}

/// `m(S) = Σ_{T ⊆ S} (-1)^{|S - T|} b(T)`.
pub fn belief_to_mass(b: &SetFunction) -> SetFunction {
    let mut f = b.clone();
    subset_differences(&mut f.values, b.frame.len());
    f.values.iter_mut().for_each(|v| *v = clamp_zero(*v));
    f
}

/// Unnormalized Dempster combination by lifting focal sets to the joint frame.
pub fn combine_mass(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let joint = joint_frame(&m1.frame, &m2.frame)?;
    let p1 = m1.frame.parent_map(&joint)?;
    let p2 = m2.frame.parent_map(&joint)?;
    let lift2: Vec<(u64, f64)> = m2.masses.iter().map(|(&s, &v)| (refine_with(s, &p2), v)).collect();
    let mut out: BTreeMap<u64, f64> = BTreeMap::new();
    for (&s1, &v1) in &m1.masses {
        let t1 = refine_with(s1, &p1);
        for &(t2, v2) in &lift2 {
            *out.entry(t1 & t2).or_insert(0.0) += v1 * v2;
        }
    }
    Ok(MassFunction::from_map(joint, out))
}

/// `q(S) = q1(v_Θ(S)) q2(v_Λ(S))` on the joint frame.
pub fn combine_commonality(q1: &SetFunction, q2: &SetFunction) -> Result<SetFunction> {
    let joint = joint_frame(&q1.frame, &q2.frame)?;
    let v1 = coarsening_table(&q1.frame.parent_map(&joint)?);
    let v2 = coarsening_table(&q2.frame.parent_map(&joint)?);
    let values = (0..1usize << joint.len()).map(|s| q1.values[v1[s] as usize] * q2.values[v2[s] as usize]).collect();
    Ok(SetFunction { frame: joint, values })
}

/// `π_Θ(m)(S) = Σ { m(T) : v_Θ(T) = S }`.
pub fn project_mass(m: &MassFunction, theta: &Partition) -> Result<MassFunction> {
    if !(theta.compatible(&m.frame) && theta.leq(&m.frame)) {
        return Err(Error::ProjectionDomain { target: theta.to_string(), label: m.frame.to_string() });
    }
    let parent = theta.parent_map(&m.frame)?;
    let mut out: BTreeMap<u64, f64> = BTreeMap::new();
    for (&t, &v) in &m.masses {
        *out.entry(coarsen_with(t, &parent)).or_insert(0.0) += v;
    }
    Ok(MassFunction::from_map(theta.clone(), out))
}

fn joint_frame(a: &Partition, b: &Partition) -> Result<Partition> {
    if !a.compatible(b) {
        return Err(Error::ContextMismatch(format!("frames over {} and {} atoms", a.n_atoms(), b.n_atoms())));
    }
    let j = a.join(b);
    check_frame(&j)?;
    Ok(j)
}

/// Group identity: the frame together with the support of the commonality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefTag {
    pub frame: Partition,
    /// Bitset over the subsets of the frame: bit `S` set iff `q(S) > 0`.
    pub support: Vec<u64>,
}

impl BeliefTag {
    fn from_commonality(q: &SetFunction) -> Self {
        let mut support = vec![0u64; q.values.len().div_ceil(64)];
        for (s, &v) in q.values.iter().enumerate() {
            if v > 0.0 {
                support[s / 64] |= 1 << (s % 64);
            }
        }
        BeliefTag { frame: q.frame.clone(), support }
    }

    pub fn contains(&self, s: u64) -> bool {
        let s = s as usize;
        self.support[s / 64] & (1 << (s % 64)) != 0
    }
}

impl GroupTag for BeliefTag {
    fn join(&self, other: &Self) -> Self {
        let joint = self.frame.join(&other.frame);
        let v1 = coarsening_table(&self.frame.parent_map(&joint).expect("joint refines frame"));
        let v2 = coarsening_table(&other.frame.parent_map(&joint).expect("joint refines frame"));
        let n = 1usize << joint.len();
        let mut support = vec![0u64; n.div_ceil(64)];
        for s in 0..n {
            if self.contains(v1[s]) && other.contains(v2[s]) {
                support[s / 64] |= 1 << (s % 64);
            }
        }
        BeliefTag { frame: joint, support }
    }
}

/// Focal-pair count above which combination goes through commonalities.
fn use_commonality_route(m1: &MassFunction, m2: &MassFunction) -> bool {
    let k = m1.frame.join(&m2.frame).len();
    let pairs = m1.masses.len() * m2.masses.len();
    pairs > (8 * (k + 1)) << k
}

impl Valuation for MassFunction {
    type Domain = Partition;
    type Tag = BeliefTag;
    type Context = ();

    const INSTANCE: Instance = Instance::Belief;

    fn label(&self) -> Partition {
        self.frame.clone()
    }

    fn combine(&self, other: &Self) -> Result<Self> {
        if use_commonality_route(self, other) {
            let q = combine_commonality(&self.commonality(), &other.commonality())?;
            let mut m = commonality_to_mass(&q);
            // the exact product is a mass function; only rounding can go negative
            m.values.iter_mut().for_each(|v| *v = v.max(0.0));
            m.into_mass()
        } else {
            combine_mass(self, other)
        }
    }

    fn project(&self, x: &Partition) -> Result<Self> {
        project_mass(self, x)
    }

    fn group_tag(&self) -> BeliefTag {
        BeliefTag::from_commonality(&self.commonality())
    }

    fn is_null(&self) -> bool {
        self.masses.is_empty()
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.frame == other.frame
            && self.masses.keys().chain(other.masses.keys()).all(|&s| close(self.mass(s), other.mass(s), tol))
    }

    fn reduce_quotient(num: &Self, den: &Self) -> Result<Self> {
        quotient_moebius(num, den)?.into_mass()
    }

    fn unit(_ctx: &(), x: &Partition) -> Result<Self> {
        MassFunction::vacuous(x.clone())
    }

    fn null(_ctx: &(), x: &Partition) -> Result<Self> {
        check_frame(x)?;
        Ok(MassFunction { frame: x.clone(), masses: BTreeMap::new() })
    }
}

/// Signed Möbius transform of the commonality quotient `q_num / q_den`
/// (the latter pulled back to the numerator's frame), with `0/0 = 0`.
pub fn quotient_moebius(num: &MassFunction, den: &MassFunction) -> Result<SetFunction> {
    if !(den.frame.compatible(&num.frame) && den.frame.leq(&num.frame)) {
        return Err(Error::DominationViolation(format!(
            "denominator frame {} is not coarser than numerator frame {}",
            den.frame, num.frame
        )));
    }
    let qn = num.commonality();
    let qd = den.commonality();
    let v = coarsening_table(&den.frame.parent_map(&num.frame)?);
    let values = qn
        .values
        .iter()
        .enumerate()
        .map(|(s, &n)| {
            let d = qd.values[v[s] as usize];
            if n <= 0.0 {
                Ok(0.0)
            } else if d > 0.0 {
                Ok(n / d)
            } else {
                Err(Error::DominationViolation(
                    "numerator commonality is positive where the denominator vanishes".into(),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(commonality_to_mass(&SetFunction { frame: num.frame.clone(), values }))
}

/// The frame induced by a set of variables on the configuration universe
/// of all variables: configurations are atoms (row-major, lowest-index
/// variable most significant) and blocks group configurations that agree on
/// `vars`.
pub fn multivariate_frame(cards: &[usize], vars: VarSet) -> Result<Partition> {
    let n: usize = cards.iter().product();
    if n == 0 || n > Partition::MAX_ATOMS as usize {
        return Err(Error::InvalidDomain(format!(
            "configuration universe of {n} atoms is outside 1..={}",
            Partition::MAX_ATOMS
        )));
    }
    let all = VarSet::first_n(cards.len() as u32);
    if !vars.is_subset(all) {
        return Err(Error::InvalidDomain(format!("variables {vars} not all declared")));
    }
    let idx = crate::potential::restriction_indices(all, cards, vars);
    let nblocks = vars.iter().map(|v| cards[v as usize]).product::<usize>();
    let mut blocks = vec![0u64; nblocks];
    for (atom, b) in idx.into_iter().enumerate() {
        blocks[b] |= 1 << atom;
    }
    Partition::from_masks(n as u32, blocks)
}

/// The distributive sublattice of multivariate frames for the given variables.
pub fn multivariate_lattice(cards: &[usize]) -> Result<PartitionLattice> {
    let all = VarSet::first_n(cards.len() as u32);
    let members = all.subsets().into_iter().map(|s| multivariate_frame(cards, s)).collect::<Result<Vec<_>>>()?;
    let n = cards.iter().product::<usize>() as u32;
    PartitionLattice::sublattice(n, members, true)
}

/// A stored quotient that does not reduce: the inverse of a non-vacuous
/// mass function on a two-element frame. Returns `(m, Möbius transform of
/// 1/q)`; the latter has a negative coefficient.
pub fn regularity_witness() -> (MassFunction, SetFunction) {
    let frame = Partition::discrete(2);
    let m = MassFunction::new(frame.clone(), [(0b01, 0.5), (0b11, 0.5)]).expect("valid mass");
    let q = m.commonality();
    let inv: Vec<f64> = q.values.iter().map(|&v| if v > 0.0 { 1.0 / v } else { 0.0 }).collect();
    let signed = commonality_to_mass(&SetFunction { frame, values: inv });
    (m, signed)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: u64 = 0b01;
    const B: u64 = 0b10;
    const AB: u64 = 0b11;

    fn ab() -> Partition {
        Partition::discrete(2)
    }

    fn m1() -> MassFunction {
        MassFunction::new(ab(), [(A, 0.5), (AB, 0.5)]).unwrap()
    }

    fn m2() -> MassFunction {
        MassFunction::new(ab(), [(B, 0.4), (AB, 0.6)]).unwrap()
    }

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn same_frame_combination() {
        let m = m1().combine(&m2()).unwrap();
        assert!(approx(m.mass(0), 0.2));
        assert!(approx(m.mass(A), 0.3));
        assert!(approx(m.mass(B), 0.2));
        assert!(approx(m.mass(AB), 0.3));
    }

    #[test]
    fn same_frame_commonality_product() {
        let q = combine_commonality(&m1().commonality(), &m2().commonality()).unwrap();
        assert!(approx(q.get(0), 1.0));
        assert!(approx(q.get(A), 0.6));
        assert!(approx(q.get(B), 0.5));
        assert!(approx(q.get(AB), 0.3));
    }

    #[test]
    fn commonality_examples() {
        let q = m1().commonality();
        assert_eq!(q.values(), &[1.0, 1.0, 0.5, 0.5]);
        let v = MassFunction::vacuous(Partition::discrete(3)).unwrap().commonality();
        assert!(v.values().iter().all(|&x| x == 1.0));
        let back = commonality_to_mass(&q).into_mass().unwrap();
        assert!(back.approx_eq(&m1(), 1e-12));
    }

    #[test]
    fn belief_examples() {
        let b = mass_to_belief(&m1());
        assert_eq!(b.get(A), 0.5);
        assert_eq!(b.get(AB), 1.0);
        assert_eq!(b.get(0), 0.0);
        let v = mass_to_belief(&MassFunction::vacuous(ab()).unwrap());
        assert_eq!(v.values(), &[0.0, 0.0, 0.0, 1.0]);
        let back = belief_to_mass(&b).into_mass().unwrap();
        assert!(back.approx_eq(&m1(), 1e-12));
    }

    #[test]
    fn unit_and_null() {
        let u = MassFunction::unit(&(), &ab()).unwrap();
        assert!(m1().combine(&u).unwrap().approx_eq(&m1(), 0.0));
        let z = MassFunction::null(&(), &ab()).unwrap();
        assert!(m1().combine(&z).unwrap().is_null());
        assert!(z.project(&Partition::indiscrete(2)).unwrap().is_null());
    }

    #[test]
    fn projection_coarsens_focal_sets() {
        let fine = Partition::discrete(4);
        let coarse = Partition::new(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let m = MassFunction::new(fine.clone(), [(0b0001, 1.0)]).unwrap();
        let p = m.project(&coarse).unwrap();
        assert_eq!(p.masses().iter().collect::<Vec<_>>(), vec![(&0b01, &1.0)]);
        assert!(m.project(&fine).unwrap().approx_eq(&m, 0.0));
        let other = Partition::new(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert!(matches!(MassFunction::vacuous(coarse).unwrap().project(&other), Err(Error::ProjectionDomain { .. })));
    }

    #[test]
    fn cross_frame_combination_agrees_with_commonalities() {
        let theta = Partition::new(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let lambda = Partition::discrete(4);
        let a = MassFunction::new(theta, [(0b01, 0.3), (0b11, 0.7)]).unwrap();
        let b = MassFunction::new(lambda, [(0b0011, 0.5), (0b0110, 0.25), (0b1111, 0.25)]).unwrap();
        let m = combine_mass(&a, &b).unwrap();
        // lifted {[0,1]} = atoms {0,1}: intersections by hand
        assert!(approx(m.mass(0b0011), 0.3 * 0.5 + 0.7 * 0.5 + 0.3 * 0.25));
        assert!(approx(m.mass(0b0010), 0.3 * 0.25));
        assert!(approx(m.mass(0b0110), 0.7 * 0.25));
        let q = combine_commonality(&a.commonality(), &b.commonality()).unwrap();
        let qm = m.commonality();
        assert!(q.values().iter().zip(qm.values()).all(|(x, y)| approx(*x, *y)));
    }

    #[test]
    fn reduce_quotients() {
        let u = MassFunction::reduce_quotient(&m1(), &m1()).unwrap();
        assert!(u.approx_eq(&MassFunction::vacuous(ab()).unwrap(), 1e-12));
        let (m, signed) = regularity_witness();
        assert!(approx(signed.get(A), -1.0));
        assert!(approx(signed.get(AB), 2.0));
        let mm = m.combine(&m).unwrap();
        assert!(matches!(MassFunction::reduce_quotient(&m, &mm), Err(Error::NotReducible(_))));
    }

    #[test]
    fn bayesian_conditional_keeps_potential_values_but_not_the_empty_set() {
        // singleton focal sets on the product of two binary variables
        let cards = [2, 2];
        let joint = multivariate_frame(&cards, VarSet::first_n(2)).unwrap();
        let a = multivariate_frame(&cards, VarSet::singleton(0)).unwrap();
        let table = [1.0, 3.0, 2.0, 4.0];
        let m = MassFunction::new(joint, table.iter().enumerate().map(|(i, &v)| (1u64 << i, v))).unwrap();
        let marg = m.project(&a).unwrap();
        assert_eq!(marg.mass(0b01), 4.0);
        assert_eq!(marg.mass(0b10), 6.0);
        // Singleton coefficients are the potential conditional, but the
        // unnormalized algebra also books 1 - sum = -1 on the empty set.
        let signed = quotient_moebius(&m, &marg).unwrap();
        let expect = [0.25, 0.75, 1.0 / 3.0, 2.0 / 3.0];
        for (i, e) in expect.iter().enumerate() {
            assert!(approx(signed.get(1 << i), *e));
        }
        assert!(approx(signed.get(0), -1.0));
        assert!(MassFunction::reduce_quotient(&m, &marg).is_err());
    }

    #[test]
    fn multivariate_frames_form_a_distributive_sublattice() {
        let l = multivariate_lattice(&[2, 2, 2]).unwrap();
        assert_eq!(l.elements().len(), 8);
        assert!(crate::lattice::check_lattice_laws(&l.elements()).all_passed());
        let f = multivariate_frame(&[2, 2], VarSet::singleton(1)).unwrap();
        assert_eq!(f.block_lists(), vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn rejects_invalid_masses() {
        assert!(MassFunction::new(ab(), [(0b100, 1.0)]).is_err());
        assert!(MassFunction::new(ab(), [(A, -0.1)]).is_err());
        assert!(MassFunction::new(Partition::discrete(17), [(1, 1.0)]).is_err());
    }

    #[test]
    fn commonality_route_agrees_on_dense_masses() {
        let f = Partition::discrete(3);
        let dense = MassFunction::new(f.clone(), (0..8).map(|s| (s, 0.1 + s as f64 / 10.0))).unwrap();
        let via_q = {
            let q = combine_commonality(&dense.commonality(), &dense.commonality()).unwrap();
            commonality_to_mass(&q).into_mass().unwrap()
        };
        assert!(combine_mass(&dense, &dense).unwrap().approx_eq(&via_q, 1e-12));
    }
}
