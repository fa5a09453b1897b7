//! Randomized law suites.
//!
//! Every law draws its cases from its own ChaCha stream, seeded from the
//! suite seed and the law name, so reports are reproducible and adding a
//! law never shifts the cases of another. Cases whose preconditions fail
//! (e.g. a domination requirement) are resampled, up to a cap.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GroupTag, Instance, Valuation};
use crate::composition::{compose, DensityElement};
use crate::conditional::conditional;
use crate::error::{Error, Result};
use crate::lattice::Domain;
use crate::quotient::Quotient;
use crate::report::{LawReport, LawResult};

pub type CaseRng = ChaCha8Rng;
pub type Dom<G> = <<G as Generator>::V as Valuation>::Domain;

/// Source of random domains and valuations for one instance.
pub trait Generator {
    type V: Valuation;

    /// Name used in reports.
    fn name(&self) -> String;
    fn tolerance(&self) -> f64;
    /// All domains of the lattice the instance lives on.
    fn domains(&self) -> &[Dom<Self>];
    fn is_modular(&self) -> bool;
    fn is_distributive(&self) -> bool;
    fn context(&self) -> <Self::V as Valuation>::Context;
    /// A random non-null valuation on `d`. With `full`, the valuation lies in
    /// the least group on `d` (strictly positive table, vacuous-including
    /// mass function), so any valuation on `d` dominates it.
    fn random(&self, rng: &mut CaseRng, d: &Dom<Self>, full: bool) -> Self::V;
    /// A random valuation in the same group as `v`.
    fn perturb(&self, rng: &mut CaseRng, v: &Self::V) -> Self::V;
    /// Whether each Ψ_x is cancellative.
    fn cancellative(&self) -> bool {
        Self::V::INSTANCE == Instance::Gaussian
    }
}

/// Outcome of one randomized case.
#[derive(Debug)]
pub enum Case {
    Pass,
    Fail(String),
    Skip,
}

impl Case {
    pub fn check(ok: bool, msg: impl FnOnce() -> String) -> Case {
        if ok {
            Case::Pass
        } else {
            Case::Fail(msg())
        }
    }
}

/// Stable 64-bit FNV-1a hash (law names → RNG streams).
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn law_rng(seed: u64, law: &str) -> CaseRng {
    CaseRng::seed_from_u64(seed ^ fnv1a(law))
}

/// Resampling cap: attempts per requested case.
const ATTEMPTS_PER_CASE: usize = 50;

/// Runs `n` cases of a law. Operation errors count as failures.
pub fn run_law(name: &str, n: usize, seed: u64, mut case: impl FnMut(&mut CaseRng) -> Result<Case>) -> LawResult {
    let mut rng = law_rng(seed, name);
    let (mut done, mut skipped) = (0usize, 0usize);
    while done < n {
        if done + skipped >= n.max(1) * ATTEMPTS_PER_CASE {
            let mut r = LawResult::fail(
                name,
                done,
                format!("only {done} of {n} cases met their preconditions after {skipped} resamples"),
            );
            r.skipped = skipped;
            return r;
        }
        match case(&mut rng) {
            Ok(Case::Pass) => done += 1,
            Ok(Case::Skip) => skipped += 1,
            Ok(Case::Fail(msg)) => {
                let mut r = LawResult::fail(name, done + 1, format!("case {}: {msg}", done + 1));
                r.skipped = skipped;
                return r;
            }
            Err(e) => {
                let mut r = LawResult::fail(name, done + 1, format!("case {}: error: {e}", done + 1));
                r.skipped = skipped;
                return r;
            }
        }
    }
    let mut r = LawResult::pass(name, n);
    r.skipped = skipped;
    r
}

fn pick<D: Clone>(rng: &mut CaseRng, from: &[D]) -> D {
    from.choose(rng).expect("nonempty domain list").clone()
}

fn below<D: Domain>(all: &[D], top: &D) -> Vec<D> {
    all.iter().filter(|d| d.leq(top)).cloned().collect()
}

fn between<D: Domain>(all: &[D], lo: &D, hi: &D) -> Vec<D> {
    all.iter().filter(|d| lo.leq(d) && d.leq(hi)).cloned().collect()
}

/// Either group (mixed) or least-group valuations, half and half.
fn any<G: Generator>(g: &G, rng: &mut CaseRng, d: &Dom<G>) -> G::V {
    let full = rng.gen_bool(0.5);
    g.random(rng, d, full)
}

/// Least-group valuations 70% of the time, so domination usually holds.
fn mostly_full<G: Generator>(g: &G, rng: &mut CaseRng, d: &Dom<G>) -> G::V {
    let full = rng.gen_bool(0.7);
    g.random(rng, d, full)
}

fn dbg<T: std::fmt::Debug>(t: &T) -> String {
    format!("{t:?}")
}

fn q_eq<V: Valuation>(a: &Quotient<V>, b: &Quotient<V>, tol: f64) -> Case {
    Case::check(a.equals0(b, tol), || format!("lhs={a:?} rhs={b:?}"))
}

fn d_eq<V: Valuation>(a: &DensityElement<V>, b: &DensityElement<V>, tol: f64) -> Case {
    Case::check(a.equals0(b, tol), || format!("lhs={a:?} rhs={b:?}"))
}

fn v_eq<V: Valuation>(a: &V, b: &V, tol: f64) -> Case {
    Case::check(a.approx_eq(b, tol), || format!("lhs={a:?} rhs={b:?}"))
}

/// A random quotient `ψ / perturb(π_w ψ)` with `w <= d(ψ)` drawn from `dens`.
fn random_quotient<G: Generator>(
    g: &G,
    rng: &mut CaseRng,
    top: &Dom<G>,
    den_domain: &Dom<G>,
) -> Result<Quotient<G::V>> {
    let psi = any(g, rng, top);
    let den = g.perturb(rng, &psi.project(den_domain)?);
    Quotient::new(psi, den)
}

/// The valuation-algebra axioms: lattice, semigroup, labeling, transitivity,
/// combination, units and nulls (strong combination only where declared).
pub fn check_axioms<G: Generator>(g: &G, n: usize, seed: u64) -> LawReport {
    let mut report = LawReport::new(g.name(), "axioms");
    let doms = g.domains();
    let tol = g.tolerance();

    let lattice = crate::lattice::check_lattice_laws(doms);
    let bad =
        lattice.results.iter().filter(|r| !matches!(r.name.as_str(), "modular" | "distributive")).find(|r| !r.passed);
    report.push(LawResult::from_check(
        "lattice",
        doms.len().pow(3),
        bad.map(|r| format!("{}: {}", r.name, r.counterexample.clone().unwrap_or_default())),
    ));

    report.push(run_law("combine-commutative", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let (a, b) = (any(g, rng, &x), any(g, rng, &y));
        Ok(v_eq(&a.combine(&b)?, &b.combine(&a)?, tol))
    }));
    report.push(run_law("combine-associative", n, seed, |rng| {
        let (x, y, z) = (pick(rng, doms), pick(rng, doms), pick(rng, doms));
        let (a, b, c) = (any(g, rng, &x), any(g, rng, &y), any(g, rng, &z));
        Ok(v_eq(&a.combine(&b)?.combine(&c)?, &a.combine(&b.combine(&c)?)?, tol))
    }));
    report.push(run_law("label-of-combination", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let ab = any(g, rng, &x).combine(&any(g, rng, &y))?;
        Ok(Case::check(ab.label() == x.join(&y), || format!("x={x} y={y} label={}", ab.label())))
    }));
    report.push(run_law("label-of-projection", n, seed, |rng| {
        let d = pick(rng, doms);
        let x = pick(rng, &below(doms, &d));
        let p = any(g, rng, &d).project(&x)?;
        Ok(Case::check(p.label() == x, || format!("x={x} label={}", p.label())))
    }));
    report.push(run_law("projection-transitive", n, seed, |rng| {
        let d = pick(rng, doms);
        let y = pick(rng, &below(doms, &d));
        let x = pick(rng, &below(doms, &y));
        let psi = any(g, rng, &d);
        Ok(v_eq(&psi.project(&y)?.project(&x)?, &psi.project(&x)?, tol))
    }));
    report.push(run_law("combination", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let (phi, psi) = (any(g, rng, &x), any(g, rng, &y));
        let lhs = phi.combine(&psi)?.project(&x)?;
        let rhs = phi.combine(&psi.project(&x.meet(&y))?)?;
        Ok(v_eq(&lhs, &rhs, tol))
    }));
    if G::V::STRONG_COMBINATION {
        report.push(check_strong_combination(g, n, seed));
    }

    let ctx = g.context();
    let probe = G::V::unit(&ctx, &doms[0]);
    match probe {
        Err(Error::Unsupported { .. }) => {
            report.push(run_law("units-unsupported", n.min(100), seed, |rng| {
                let x = pick(rng, doms);
                Ok(Case::check(matches!(G::V::unit(&ctx, &x), Err(Error::Unsupported { .. })), || {
                    format!("unit on {x} did not report unsupported")
                }))
            }));
        }
        _ => {
            report.push(run_law("units", n, seed, |rng| {
                let (x, y) = (pick(rng, doms), pick(rng, doms));
                let psi = any(g, rng, &x);
                let ux = G::V::unit(&ctx, &x)?;
                let uy = G::V::unit(&ctx, &y)?;
                let neutral = psi.combine(&ux)?.approx_eq(&psi, tol);
                let joins = ux.combine(&uy)?.approx_eq(&G::V::unit(&ctx, &x.join(&y))?, tol);
                Ok(Case::check(neutral && joins, || format!("x={x} y={y} psi={psi:?}")))
            }));
        }
    }
    match G::V::null(&ctx, &doms[0]) {
        Err(Error::Unsupported { .. }) => {
            report.push(run_law("nulls-unsupported", n.min(100), seed, |rng| {
                let x = pick(rng, doms);
                Ok(Case::check(matches!(G::V::null(&ctx, &x), Err(Error::Unsupported { .. })), || {
                    format!("null on {x} did not report unsupported")
                }))
            }));
        }
        _ => {
            report.push(run_law("nulls", n, seed, |rng| {
                let y = pick(rng, doms);
                let x = pick(rng, &below(doms, &y));
                let zy = G::V::null(&ctx, &y)?;
                let psi = if rng.gen_bool(0.25) { zy.clone() } else { any(g, rng, &y) };
                let absorbing = psi.combine(&zy)?.approx_eq(&zy, tol);
                let both_ways = psi.project(&x)?.is_null() == psi.is_null();
                let projects = zy.project(&x)?.approx_eq(&G::V::null(&ctx, &x)?, tol);
                Ok(Case::check(absorbing && both_ways && projects, || format!("x={x} psi={psi:?}")))
            }));
        }
    }
    report
}

/// Strong combination: `π_z(φ·ψ) = φ·π_{y∧z}(ψ)` for `x <= z <= x∨y`.
pub fn check_strong_combination<G: Generator>(g: &G, n: usize, seed: u64) -> LawResult {
    let doms = g.domains();
    let tol = g.tolerance();
    run_law("strong-combination", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let z = pick(rng, &between(doms, &x, &x.join(&y)));
        let (phi, psi) = (any(g, rng, &x), any(g, rng, &y));
        let lhs = phi.combine(&psi)?.project(&z)?;
        let rhs = phi.combine(&psi.project(&y.meet(&z))?)?;
        Ok(v_eq(&lhs, &rhs, tol))
    })
}

/// Separative structure: congruence, domination, cancellativity, the
/// quotient groups and partial projection.
pub fn check_separative<G: Generator>(g: &G, n: usize, seed: u64) -> LawReport {
    let mut report = LawReport::new(g.name(), "separative");
    let doms = g.domains();
    let tol = g.tolerance();

    report.push(run_law("congruence", n, seed, |rng| {
        let d = pick(rng, doms);
        let x = pick(rng, &below(doms, &d));
        let psi = any(g, rng, &d);
        let t = psi.combine(&psi.project(&x)?)?.group_tag();
        Ok(Case::check(t == psi.group_tag(), || format!("x={x} psi={psi:?}")))
    }));
    report.push(run_law("projection-domination", n, seed, |rng| {
        let d = pick(rng, doms);
        let x = pick(rng, &below(doms, &d));
        let psi = any(g, rng, &d);
        Ok(Case::check(psi.dominates(&psi.project(&x)?), || format!("x={x} psi={psi:?}")))
    }));
    report.push(run_law("tag-join", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let (a, b) = (any(g, rng, &x), any(g, rng, &y));
        let ok = a.combine(&b)?.group_tag() == a.group_tag().join(&b.group_tag());
        Ok(Case::check(ok, || format!("a={a:?} b={b:?}")))
    }));
    report.push(run_law("cancellative-groups", n, seed, |rng| {
        let d = pick(rng, doms);
        let phi = any(g, rng, &d);
        let psi = if rng.gen_bool(0.3) { phi.clone() } else { g.perturb(rng, &phi) };
        let eta = g.perturb(rng, &phi);
        let (ep, es) = (eta.combine(&phi)?, eta.combine(&psi)?);
        let agree = ep.approx_eq(&es, tol) == phi.approx_eq(&psi, tol);
        // constructive: (η·φ)·η⁻¹ = φ·f_η = φ within the group
        let recovered = Quotient::member(ep).multiply(&Quotient::member(eta).reciprocal())?;
        let ok = agree && recovered.equals0(&Quotient::member(phi.clone()), tol);
        Ok(Case::check(ok, || format!("phi={phi:?} psi={psi:?}")))
    }));
    report.push(run_law("embedding-homomorphism", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let (a, b) = (any(g, rng, &x), any(g, rng, &y));
        let ab = a.combine(&b)?;
        if ab.is_null() {
            return Ok(Case::Skip);
        }
        let lhs = Quotient::embed(&a)?.multiply(&Quotient::embed(&b)?)?;
        Ok(q_eq(&lhs, &Quotient::embed(&ab)?, tol))
    }));
    report.push(run_law("embedding-injective", n, seed, |rng| {
        let d = pick(rng, doms);
        let a = any(g, rng, &d);
        let b = if rng.gen_bool(0.5) { a.clone() } else { g.perturb(rng, &a) };
        let same = Quotient::embed(&a)?.equals0(&Quotient::embed(&b)?, tol);
        Ok(Case::check(same == a.approx_eq(&b, tol), || format!("a={a:?} b={b:?}")))
    }));

    let quotient_on = |rng: &mut CaseRng| -> Result<Quotient<G::V>> {
        let top = pick(rng, doms);
        let w = pick(rng, &below(doms, &top));
        random_quotient(g, rng, &top, &w)
    };
    report.push(run_law("group-associativity", n, seed, |rng| {
        let (a, b, c) = (quotient_on(rng)?, quotient_on(rng)?, quotient_on(rng)?);
        Ok(q_eq(&a.multiply(&b)?.multiply(&c)?, &a.multiply(&b.multiply(&c)?)?, tol))
    }));
    report.push(run_law("group-unit", n, seed, |rng| {
        let q = quotient_on(rng)?;
        let f = q.idempotent_of();
        let ok = q.multiply(&f)?.equals0(&q, tol) && f.multiply(&f)?.equals0(&f, tol);
        Ok(Case::check(ok, || dbg(&q)))
    }));
    report.push(run_law("group-inverse", n, seed, |rng| {
        let q = quotient_on(rng)?;
        Ok(q_eq(&q.multiply(&q.reciprocal())?, &q.idempotent_of(), tol))
    }));
    report.push(run_law("idempotent-product", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let (a, b) = (any(g, rng, &x), any(g, rng, &y));
        let fa = Quotient::member(a.clone()).idempotent_of();
        let fb = Quotient::member(b.clone()).idempotent_of();
        let fab = Quotient::member(a.combine(&b)?).idempotent_of();
        Ok(q_eq(&fa.multiply(&fb)?, &fab, tol))
    }));
    report.push(run_law("project0-representative-independence", n, seed, |rng| {
        let top = pick(rng, doms);
        let w = pick(rng, &below(doms, &top));
        let q = random_quotient(g, rng, &top, &w)?;
        let v = pick(rng, &below(doms, &w));
        let chi = g.perturb(rng, &q.num_product()?.project(&v)?);
        let q2 = Quotient::new(q.num_product()?.combine(&chi)?, q.den_product()?.expect("den").combine(&chi)?)?;
        let x = pick(rng, &between(doms, &w, &top));
        let ok = q.equals0(&q2, tol) && q.project0(&x)?.equals0(&q2.project0(&x)?, tol);
        Ok(Case::check(ok, || format!("q={q:?} chi={chi:?} x={x}")))
    }));
    report.push(run_law("project0-extends-projection", n, seed, |rng| {
        let d = pick(rng, doms);
        let x = pick(rng, &below(doms, &d));
        let psi = any(g, rng, &d);
        let px = psi.project(&x)?;
        let q = Quotient::new(psi.combine(&px)?, px.clone())?;
        Ok(q_eq(&q.project0(&x)?, &Quotient::member(px), tol))
    }));
    report.push(run_law("project0-transitive", n, seed, |rng| {
        let top = pick(rng, doms);
        let w = pick(rng, &below(doms, &top));
        let q = random_quotient(g, rng, &top, &w)?;
        let y = pick(rng, &between(doms, &w, &top));
        let x = pick(rng, &between(doms, &w, &y));
        Ok(q_eq(&q.project0(&y)?.project0(&x)?, &q.project0(&x)?, tol))
    }));
    report.push(run_law("project0-combination", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let w1 = pick(rng, &below(doms, &x));
        let w2 = pick(rng, &below(doms, &x.meet(&y)));
        let q1 = random_quotient(g, rng, &x, &w1)?;
        let q2 = random_quotient(g, rng, &y, &w2)?;
        let lhs = q1.multiply(&q2)?.project0(&x)?;
        let rhs = q1.multiply(&q2.project0(&x.meet(&y))?)?;
        Ok(q_eq(&lhs, &rhs, tol))
    }));
    report
}

/// A random chain `z <= y <= x <= top` from the lattice.
fn chain<D: Domain>(rng: &mut CaseRng, doms: &[D], top: &D) -> (D, D, D) {
    let x = pick(rng, &below(doms, top));
    let y = pick(rng, &below(doms, &x));
    let z = pick(rng, &below(doms, &y));
    (x, y, z)
}

/// The five properties of conditionals.
pub fn check_conditional_laws<G: Generator>(g: &G, n: usize, seed: u64) -> LawReport {
    let mut report = LawReport::new(g.name(), "conditionals");
    let doms = g.domains();
    let tol = g.tolerance();

    report.push(run_law("conditional-marginal-idempotent", n, seed, |rng| {
        let top = pick(rng, doms);
        let (x, y, _) = chain(rng, doms, &top);
        let phi = any(g, rng, &top);
        let c = conditional(&phi, &x, &y)?;
        let f = Quotient::member(phi.project(&y)?).idempotent_of();
        Ok(q_eq(&c.body.project0(&y)?, &f, tol))
    }));
    report.push(run_law("conditional-chain", n, seed, |rng| {
        let top = pick(rng, doms);
        let (x, y, z) = chain(rng, doms, &top);
        let phi = any(g, rng, &top);
        let lhs = conditional(&phi, &x, &z)?.body;
        let rhs = conditional(&phi, &x, &y)?.body.multiply(&conditional(&phi, &y, &z)?.body)?;
        Ok(q_eq(&lhs, &rhs, tol))
    }));
    report.push(run_law("conditional-projection", n, seed, |rng| {
        let top = pick(rng, doms);
        let (x, y, z) = chain(rng, doms, &top);
        let phi = any(g, rng, &top);
        let lhs = conditional(&phi, &x, &z)?.body.project0(&y)?;
        Ok(q_eq(&lhs, &conditional(&phi, &y, &z)?.body, tol))
    }));
    report.push(run_law("conditional-update", n, seed, |rng| {
        let top = pick(rng, doms);
        let (x, y, _) = chain(rng, doms, &top);
        let phi = any(g, rng, &top);
        let psi = any(g, rng, &y);
        let updated = phi.project(&x)?.combine(&psi)?;
        if updated.project(&y)?.is_null() {
            return Ok(Case::Skip);
        }
        let lhs = conditional(&updated, &x, &y)?.body;
        let rhs = conditional(&phi, &x, &y)?.body.multiply(&Quotient::member(psi).idempotent_of())?;
        Ok(q_eq(&lhs, &rhs, tol))
    }));
    report.push(run_law("conditional-projected-chain", n, seed, |rng| {
        let top = pick(rng, doms);
        let (x, y, z) = chain(rng, doms, &top);
        let w = pick(rng, &between(doms, &z, &x));
        let phi = any(g, rng, &top);
        let prod = conditional(&phi, &x, &y)?.body.multiply(&conditional(&phi, &y, &z)?.body)?;
        Ok(q_eq(&prod.project0(&w)?, &conditional(&phi, &w, &z)?.body, tol))
    }));
    report.push(run_law("conditional-continuation", n, seed, |rng| {
        let top = pick(rng, doms);
        let (x, y, _) = chain(rng, doms, &top);
        let phi = any(g, rng, &top);
        let c = conditional(&phi, &x, &y)?;
        let back = c.continue_with(&phi.project(&y)?)?;
        let dom = c.body.num_product()?.dominates(&phi.project(&y)?);
        Ok(Case::check(dom && back.equals0(&Quotient::member(phi.project(&x)?), tol), || dbg(&phi)))
    }));
    report
}

type Pair<V> = (DensityElement<V>, DensityElement<V>);

/// `(φ, ψ)` densities on random domains with `δ(π_{x∧y} ψ) <= δ(π_{x∧y} φ)`,
/// or `None` when the drawn pair violates domination.
fn dominated_pair<G: Generator>(g: &G, rng: &mut CaseRng, x: &Dom<G>, y: &Dom<G>) -> Result<Option<Pair<G::V>>> {
    let phi = any(g, rng, x);
    let psi = mostly_full(g, rng, y);
    let u = x.meet(y);
    if !phi.project(&u)?.dominates(&psi.project(&u)?) {
        return Ok(None);
    }
    Ok(Some((phi.into(), psi.into())))
}

fn dominates_at<V: Valuation>(a: &DensityElement<V>, b: &DensityElement<V>, u: &V::Domain) -> Result<bool> {
    Ok(b.project(u)?.group_tag().leq(&a.project(u)?.group_tag()))
}

/// Treats a projection the partial extension cannot perform as a skipped case.
fn undefined_is_skip(r: Result<Case>) -> Result<Case> {
    match r {
        Err(e) if matches!(e.root(), Error::ProjectionUndefined(_)) => Ok(Case::Skip),
        other => other,
    }
}

fn mark(r: LawResult, exploratory: bool) -> LawResult {
    if exploratory {
        r.exploratory()
    } else {
        r
    }
}

/// Composition laws that hold whenever the domain lattice is modular.
/// On non-modular lattices the laws are run in exploration mode.
pub fn check_composition_laws_modular<G: Generator>(g: &G, n: usize, seed: u64) -> LawReport {
    let mut report = LawReport::new(g.name(), "composition-modular");
    let doms = g.domains();
    let tol = g.tolerance();
    let explore = !g.is_modular();
    if explore {
        report.note("lattice is not modular: results are exploratory");
    }

    report.push(mark(
        run_law("composition-marginal", n, seed, |rng| {
            let (x, y) = (pick(rng, doms), pick(rng, doms));
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            let r = compose(&phi, &psi)?;
            let u = x.meet(&y);
            let bottom = x.bottom();
            let ok = r.project(&u)?.equals0(&phi.project(&u)?, tol)
                && r.project(&bottom)?.equals0(&phi.project(&bottom)?, tol)
                && r.is_density();
            Ok(Case::check(ok, || format!("phi={phi:?} psi={psi:?}")))
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-label", n, seed, |rng| {
            let (x, y) = (pick(rng, doms), pick(rng, doms));
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            let l = compose(&phi, &psi)?.label();
            Ok(Case::check(l == x.join(&y), || format!("x={x} y={y} label={l}")))
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-left-marginal", n, seed, |rng| {
            let (x, y) = (pick(rng, doms), pick(rng, doms));
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            Ok(d_eq(&compose(&phi, &psi)?.project(&x)?, &phi, tol))
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-absorbs-subdomain", n, seed, |rng| {
            let x = pick(rng, doms);
            let y = pick(rng, &below(doms, &x));
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            Ok(d_eq(&compose(&phi, &psi)?, &phi, tol))
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-consistent-commute", n, seed, |rng| {
            let (x, y) = (pick(rng, doms), pick(rng, doms));
            let u = x.meet(&y);
            let phi: DensityElement<G::V> = any(g, rng, &x).into();
            let psi0: DensityElement<G::V> = g.random(rng, &y, true).into();
            let psi = compose(&phi.project(&u)?, &psi0)?;
            Ok(d_eq(&compose(&phi, &psi)?, &compose(&psi, &phi)?, tol))
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-update", n, seed, |rng| {
            let (x, y) = (pick(rng, doms), pick(rng, doms));
            let z = pick(rng, &between(doms, &x.meet(&y), &y));
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            let (phi, psi) = (phi.as_member().expect("member").clone(), psi.as_member().expect("member").clone());
            let left: DensityElement<G::V> = phi.combine(&psi.project(&z)?)?.into();
            let lhs = compose(&left, &psi.clone().into())?;
            Ok(d_eq(&lhs, &phi.combine(&psi)?.into(), tol))
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-intermediate", n, seed, |rng| {
            let (x, y) = (pick(rng, doms), pick(rng, doms));
            let z = pick(rng, &between(doms, &x.meet(&y), &y));
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            let lhs = compose(&compose(&phi, &psi.project(&z)?)?, &psi)?;
            Ok(d_eq(&lhs, &compose(&phi, &psi)?, tol))
        }),
        explore,
    ));
    if g.cancellative() {
        report.push(mark(
            run_law("commute-implies-consistent", n, seed, |rng| {
                let (x, y) = (pick(rng, doms), pick(rng, doms));
                let u = x.meet(&y);
                let phi: DensityElement<G::V> = any(g, rng, &x).into();
                let psi: DensityElement<G::V> = if rng.gen_bool(0.5) {
                    compose(&phi.project(&u)?, &g.random(rng, &y, true).into())?
                } else {
                    g.random(rng, &y, true).into()
                };
                let commute = compose(&phi, &psi)?.equals0(&compose(&psi, &phi)?, tol);
                let consistent = phi.project(&u)?.equals0(&psi.project(&u)?, tol);
                Ok(Case::check(!commute || consistent, || format!("phi={phi:?} psi={psi:?}")))
            }),
            explore,
        ));
    }
    report
}

/// The distributive-lattice properties of `⊳`. On non-distributive
/// lattices the laws are run in exploration mode.
pub fn check_composition_laws_distributive<G: Generator>(g: &G, n: usize, seed: u64) -> LawReport {
    let mut report = LawReport::new(g.name(), "composition-distributive");
    let doms = g.domains();
    let tol = g.tolerance();
    let explore = !g.is_distributive();
    if explore {
        report.note("lattice is not distributive: results are exploratory");
    }

    report.push(mark(
        run_law("composition-idempotent", n, seed, |rng| {
            let (x, y) = (pick(rng, doms), pick(rng, doms));
            let phi: DensityElement<G::V> = any(g, rng, &x).into();
            Ok(d_eq(&compose(&phi.project(&x.meet(&y))?, &phi)?, &phi, tol))
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-exchange", n, seed, |rng| {
            let (x, y, z) = (pick(rng, doms), pick(rng, doms), pick(rng, doms));
            if !y.meet(&z).leq(&x) {
                return Ok(Case::Skip);
            }
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            let tau: DensityElement<G::V> = mostly_full(g, rng, &z).into();
            if !dominates_at(&phi, &tau, &x.meet(&z))? {
                return Ok(Case::Skip);
            }
            undefined_is_skip((|| {
                let lhs = compose(&compose(&phi, &psi)?, &tau)?;
                let rhs = compose(&compose(&phi, &tau)?, &psi)?;
                Ok(d_eq(&lhs, &rhs, tol))
            })())
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-projection", n, seed, |rng| {
            let (x, y) = (pick(rng, doms), pick(rng, doms));
            let z = pick(rng, &between(doms, &x.meet(&y), &x.join(&y)));
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            undefined_is_skip((|| {
                let lhs = compose(&phi, &psi)?.project(&z)?;
                let rhs = compose(&phi.project(&x.meet(&z))?, &psi.project(&y.meet(&z))?)?;
                Ok(d_eq(&lhs, &rhs, tol))
            })())
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-associative-left", n, seed, |rng| {
            let (x, y, z) = (pick(rng, doms), pick(rng, doms), pick(rng, doms));
            if !y.meet(&z).leq(&x) {
                return Ok(Case::Skip);
            }
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            let tau: DensityElement<G::V> = mostly_full(g, rng, &z).into();
            // (φ ⊳ ψ) ⊳ τ also glues τ onto φ over x∧z, which the stated
            // hypotheses do not make well defined on their own
            if !dominates_at(&psi, &tau, &y.meet(&z))? || !dominates_at(&phi, &tau, &x.meet(&z))? {
                return Ok(Case::Skip);
            }
            undefined_is_skip((|| {
                let lhs = compose(&compose(&phi, &psi)?, &tau)?;
                let rhs = compose(&phi, &compose(&psi, &tau)?)?;
                Ok(d_eq(&lhs, &rhs, tol))
            })())
        }),
        explore,
    ));
    report.push(mark(
        run_law("composition-associative-right", n, seed, |rng| {
            let (x, y, z) = (pick(rng, doms), pick(rng, doms), pick(rng, doms));
            if !x.meet(&z).leq(&y) {
                return Ok(Case::Skip);
            }
            let Some((phi, psi)) = dominated_pair(g, rng, &x, &y)? else { return Ok(Case::Skip) };
            let tau: DensityElement<G::V> = mostly_full(g, rng, &z).into();
            if !dominates_at(&phi, &tau, &x.meet(&z))? || !dominates_at(&psi, &tau, &y.meet(&z))? {
                return Ok(Case::Skip);
            }
            undefined_is_skip((|| {
                let lhs = compose(&compose(&phi, &psi)?, &tau)?;
                let rhs = compose(&phi, &compose(&psi, &tau)?)?;
                Ok(d_eq(&lhs, &rhs, tol))
            })())
        }),
        explore,
    ));
    report
}

/// Potentials are regular: `ψ = ψ · π_x(ψ) · χ` with `χ` the reciprocal of
/// the marginal on its support. Every random quotient also reduces.
pub fn check_regularity(g: &crate::generators::PotentialGen, n: usize, seed: u64) -> LawReport {
    use crate::potential::invert_table;
    let mut report = LawReport::new(g.name(), "regularity");
    let doms = g.domains();
    let tol = g.tolerance();
    report.push(run_law("regularity-certificate", n, seed, |rng| {
        let d = pick(rng, doms);
        let x = pick(rng, &below(doms, &d));
        let psi = g.random(rng, &d, false);
        let px = psi.project(&x)?;
        let chi = invert_table(&px)?;
        Ok(v_eq(&psi.combine(&px)?.combine(&chi)?, &psi, tol))
    }));
    report.push(run_law("quotients-reduce", n, seed, |rng| {
        let top = pick(rng, doms);
        let w = pick(rng, &below(doms, &top));
        let q = random_quotient(g, rng, &top, &w)?;
        let r = q.reduce()?;
        // the reduced member represents the same group element
        Ok(q_eq(&Quotient::member(r).multiply(&q.idempotent_of())?, &q, tol))
    }));
    report
}

/// Gaussians are cancellative: `g·g1 = g·g2` iff `g1 = g2`, and the factor
/// is recovered by subtracting canonical parameters.
pub fn check_cancellativity(g: &crate::generators::GaussianGen, n: usize, seed: u64) -> LawReport {
    use crate::gaussian::Gaussian;
    let mut report = LawReport::new(g.name(), "cancellativity");
    let doms: Vec<_> = g.domains().iter().filter(|d| !d.is_empty()).copied().collect();
    let tol = g.tolerance();
    report.push(run_law("cancellativity", n, seed, |rng| {
        let d = pick(rng, &doms);
        let base = g.random(rng, &d, true);
        let g1 = g.random(rng, &d, true);
        let g2 = if rng.gen_bool(0.5) { g1.clone() } else { g.random(rng, &d, true) };
        let (a, b) = (base.combine(&g1)?, base.combine(&g2)?);
        let recovered = Gaussian::reduce_quotient(&a, &base)?;
        let ok = a.approx_eq(&b, tol) == g1.approx_eq(&g2, tol)
            && recovered.approx_eq(&g1, tol)
            && (a.concentration().sub(base.concentration()).max_abs() - g1.concentration().max_abs()).abs()
                <= tol * a.concentration().max_abs();
        Ok(Case::check(ok, || format!("g={base:?} g1={g1:?} g2={g2:?}")))
    }));
    report.push(run_law("units-unsupported", 1, seed, |_| {
        Ok(Case::check(matches!(Gaussian::unit(&(), &doms[0]), Err(Error::Unsupported { .. })), || {
            "a Gaussian unit was produced".into()
        }))
    }));
    report
}

/// Transform identities for mass functions: the commonality route of
/// combination agrees with the focal-set route, and the Möbius inversions
/// round-trip.
pub fn check_belief_transforms(g: &crate::generators::BeliefGen, n: usize, seed: u64) -> LawReport {
    use crate::belief::*;
    let mut report = LawReport::new(g.name(), "transforms");
    let doms = g.domains();
    let tol = g.tolerance();
    report.push(run_law("commonality-route", n, seed, |rng| {
        let (x, y) = (pick(rng, doms), pick(rng, doms));
        let (a, b) = (any(g, rng, &x), any(g, rng, &y));
        let direct = combine_mass(&a, &b)?;
        let q = combine_commonality(&a.commonality(), &b.commonality())?;
        let via = commonality_to_mass(&q).into_mass()?;
        Ok(v_eq(&direct, &via, tol))
    }));
    report.push(run_law("moebius-roundtrip", n, seed, |rng| {
        let d = pick(rng, doms);
        let m = any(g, rng, &d);
        let from_q = commonality_to_mass(&mass_to_commonality(&m)).into_mass()?;
        let from_b = belief_to_mass(&mass_to_belief(&m)).into_mass()?;
        let ok = from_q.approx_eq(&m, tol) && from_b.approx_eq(&m, tol);
        Ok(Case::check(ok, || format!("m={m:?} via q={from_q:?} via b={from_b:?}")))
    }));
    report
}

/// The stored non-reducible belief quotient `1_{δ(m)} / m`.
pub fn belief_regularity_witness() -> LawReport {
    use crate::belief::{regularity_witness, subset_string};
    let mut report = LawReport::new("belief", "regularity-witness");
    let (m, signed) = regularity_witness();
    let q = Quotient::member(m.clone()).reciprocal();
    let failure = q.reduce().err();
    let negative = signed.negative_entries();
    report.note(format!("quotient 1/m with m = {m:?}"));
    for (s, v) in &negative {
        report.note(format!("negative Moebius coefficient m({}) = {v}", subset_string(signed.frame(), *s)));
    }
    if let Some(e) = &failure {
        report.note(format!("reduce: {e}"));
    }
    let ok = matches!(failure, Some(Error::NotReducible(_))) && !negative.is_empty();
    report.push(LawResult::from_check("belief-not-regular", 1, (!ok).then(|| "the stored quotient reduced".into())));
    report
}
