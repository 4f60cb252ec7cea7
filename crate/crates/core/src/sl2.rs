//! Finite models of SL2(Z_p): exact arithmetic in SL2(Z/p^n), principal
//! congruence subgroups, subgroup closure by breadth-first generation, and
//! the finite-level shadow of the congruence-subgroup lifting lemma (the
//! `verify-lemma34` CLI subcommand).
//!
//! Subgroups are stored as sets of canonically packed matrix keys, so the
//! modulus p^n must fit in 16 bits for any set-building operation; closure
//! growth is capped by an explicit element budget and overruns are an error,
//! never a truncation.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use thiserror::Error;

use crate::primality::{inv_mod, is_prime, mul_mod};

/// Default cap on materialized subgroup elements; admits all of SL2(Z/343)
/// (order 16,515,072) with headroom.
pub const DEFAULT_ELEMENT_BUDGET: usize = 40_000_000;

/// Primes accepted by [`level_lift_check`]; level-3 subgroup enumeration for
/// larger primes grows past what the check needs.
pub const LEVEL_LIFT_PRIMES: &[u64] = &[5, 7];

/// Largest p^n whose matrices pack into a u64 set key (four 16-bit lanes).
const MAX_PACKED_MODULUS: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Sl2Error {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("level n = {0} must be >= 1")]
    InvalidLevel(u32),
    #[error("depth m = {m} must satisfy 1 <= m <= n = {n}")]
    InvalidDepth { m: u32, n: u32 },
    #[error("modulus p^n overflows u64 for p = {p}, n = {n}")]
    ModulusOverflow { p: u64, n: u32 },
    #[error("modulus {0} is too large to pack matrices into set keys (max 2^16)")]
    ModulusTooLarge(u64),
    #[error("matrix [[{a}, {b}], [{c}, {d}]] has determinant != 1 mod {modulus}")]
    DetNotOne { a: u64, b: u64, c: u64, d: u64, modulus: u64 },
    #[error("group order p^(3n-2)(p^2-1) overflows u64 for p = {p}, n = {n}")]
    OrderOverflow { p: u64, n: u32 },
    #[error("enumerating {needed} elements exceeds the element budget {budget}")]
    BudgetExceeded { needed: u128, budget: usize },
    #[error("subgroup closure exceeded the element budget {budget}")]
    ClosureBudgetExceeded { budget: usize },
    #[error("generators do not share one (p, n) context")]
    MixedContext,
    #[error("closure needs at least one generator to fix the (p, n) context")]
    NoGenerators,
    #[error("p = {0} is not in the configured prime set for the level-lift check")]
    UnsupportedLiftPrime(u64),
    #[error("the level-lift check needs at least one trial")]
    NoTrials,
    #[error("internal: standard generators failed to generate the level-2 principal congruence subgroup for p = {0}")]
    GeneratorCheckFailed(u64),
}

fn checked_modulus(p: u64, n: u32) -> Result<u64, Sl2Error> {
    if !is_prime(p) {
        return Err(Sl2Error::NotPrime(p));
    }
    if n < 1 {
        return Err(Sl2Error::InvalidLevel(n));
    }
    p.checked_pow(n).ok_or(Sl2Error::ModulusOverflow { p, n })
}

/// A 2x2 matrix over Z/p^n with determinant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2ModPn {
    p: u64,
    n: u32,
    modulus: u64,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
}

impl Mat2ModPn {
    pub fn new(p: u64, n: u32, entries: [u64; 4]) -> Result<Self, Sl2Error> {
        let modulus = checked_modulus(p, n)?;
        let [a, b, c, d] = entries.map(|e| e % modulus);
        let det_lhs = mul_mod(a, d, modulus);
        let det = if det_lhs >= mul_mod(b, c, modulus) {
            det_lhs - mul_mod(b, c, modulus)
        } else {
            det_lhs + modulus - mul_mod(b, c, modulus)
        };
        if det != 1 % modulus {
            return Err(Sl2Error::DetNotOne { a, b, c, d, modulus });
        }
        Ok(Mat2ModPn { p, n, modulus, a, b, c, d })
    }

    pub fn identity(p: u64, n: u32) -> Result<Self, Sl2Error> {
        Self::new(p, n, [1, 0, 0, 1])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_identity(&self) -> bool {
        (self.a, self.b, self.c, self.d) == (1 % self.modulus, 0, 0, 1 % self.modulus)
    }

    fn same_context(&self, rhs: &Self) -> bool {
        self.p == rhs.p && self.n == rhs.n
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert!(self.same_context(rhs), "matrices over different rings");
        let m = self.modulus;
        let add = |x: u64, y: u64| if x + y >= m { x + y - m } else { x + y };
        Mat2ModPn {
            p: self.p,
            n: self.n,
            modulus: m,
            a: add(mul_mod(self.a, rhs.a, m), mul_mod(self.b, rhs.c, m)),
            b: add(mul_mod(self.a, rhs.b, m), mul_mod(self.b, rhs.d, m)),
            c: add(mul_mod(self.c, rhs.a, m), mul_mod(self.d, rhs.c, m)),
            d: add(mul_mod(self.c, rhs.b, m), mul_mod(self.d, rhs.d, m)),
        }
    }

    /// Inverse via the adjugate; the determinant is 1 by invariant.
    pub fn inverse(&self) -> Self {
        let m = self.modulus;
        Mat2ModPn {
            p: self.p,
            n: self.n,
            modulus: m,
            a: self.d,
            b: (m - self.b) % m,
            c: (m - self.c) % m,
            d: self.a,
        }
    }

    /// Entrywise reduction to a lower (or equal) level.
    pub fn reduce_level(&self, target: u32) -> Result<Self, Sl2Error> {
        if target < 1 || target > self.n {
            return Err(Sl2Error::InvalidDepth { m: target, n: self.n });
        }
        let modulus = self.p.pow(target);
        Ok(Mat2ModPn {
            p: self.p,
            n: target,
            modulus,
            a: self.a % modulus,
            b: self.b % modulus,
            c: self.c % modulus,
            d: self.d % modulus,
        })
    }

    /// True when the matrix is congruent to the identity mod p^depth.
    pub fn congruent_to_identity(&self, depth: u32) -> bool {
        debug_assert!(depth <= self.n);
        let pm = self.p.pow(depth);
        self.a % pm == 1 % pm
            && self.b.is_multiple_of(pm)
            && self.c.is_multiple_of(pm)
            && self.d % pm == 1 % pm
    }

    fn key(&self) -> u64 {
        debug_assert!(self.modulus <= MAX_PACKED_MODULUS);
        let m = self.modulus;
        ((self.a * m + self.b) * m + self.c) * m + self.d
    }

    fn from_key(key: u64, p: u64, n: u32, modulus: u64) -> Self {
        let d = key % modulus;
        let c = key / modulus % modulus;
        let b = key / (modulus * modulus) % modulus;
        let a = key / (modulus * modulus * modulus);
        Mat2ModPn { p, n, modulus, a, b, c, d }
    }
}

/// A finite subgroup of SL2(Z/p^n), stored as the set of all its elements.
#[derive(Debug, Clone)]
pub struct SubgroupClosure {
    p: u64,
    n: u32,
    modulus: u64,
    generators: Vec<Mat2ModPn>,
    elements: HashSet<u64>,
}

impl SubgroupClosure {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Mat2ModPn] {
        &self.generators
    }

    pub fn contains(&self, m: &Mat2ModPn) -> bool {
        m.p == self.p && m.n == self.n && self.elements.contains(&m.key())
    }

    pub fn is_subset_of(&self, other: &SubgroupClosure) -> bool {
        self.p == other.p
            && self.n == other.n
            && self.elements.is_subset(&other.elements)
    }

    pub fn set_eq(&self, other: &SubgroupClosure) -> bool {
        self.p == other.p && self.n == other.n && self.elements == other.elements
    }

    /// Elements in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = Mat2ModPn> + '_ {
        self.elements
            .iter()
            .map(move |&k| Mat2ModPn::from_key(k, self.p, self.n, self.modulus))
    }

    /// The image subgroup at a lower (or equal) level.
    pub fn reduce_level(&self, target: u32) -> Result<SubgroupClosure, Sl2Error> {
        if target < 1 || target > self.n {
            return Err(Sl2Error::InvalidDepth { m: target, n: self.n });
        }
        if target == self.n {
            return Ok(self.clone());
        }
        let generators = self
            .generators
            .iter()
            .map(|g| g.reduce_level(target))
            .collect::<Result<Vec<_>, _>>()?;
        let elements = self
            .iter()
            .map(|m| m.reduce_level(target).expect("target validated"))
            .map(|m| m.key())
            .collect();
        Ok(SubgroupClosure {
            p: self.p,
            n: target,
            modulus: self.p.pow(target),
            generators,
            elements,
        })
    }
}

/// |SL2(Z/p^n)| = p^(3n-2) (p^2 - 1).
pub fn group_order(p: u64, n: u32) -> Result<u64, Sl2Error> {
    if !is_prime(p) {
        return Err(Sl2Error::NotPrime(p));
    }
    if n < 1 {
        return Err(Sl2Error::InvalidLevel(n));
    }
    let overflow = Sl2Error::OrderOverflow { p, n };
    let exponent = n.checked_mul(3).and_then(|t| t.checked_sub(2)).ok_or(overflow.clone())?;
    let power = p.checked_pow(exponent).ok_or(overflow.clone())?;
    let p2m1 = p.checked_mul(p).and_then(|s| s.checked_sub(1)).ok_or(overflow.clone())?;
    power.checked_mul(p2m1).ok_or(overflow)
}

fn pcs_count(p: u64, m: u32, n: u32) -> u128 {
    (p as u128).pow(3 * (n - m))
}

fn validate_depth(p: u64, m: u32, n: u32) -> Result<u64, Sl2Error> {
    let modulus = checked_modulus(p, n)?;
    if m < 1 || m > n {
        return Err(Sl2Error::InvalidDepth { m, n });
    }
    if modulus > MAX_PACKED_MODULUS {
        return Err(Sl2Error::ModulusTooLarge(modulus));
    }
    Ok(modulus)
}

/// Enumerates the parameters of the principal congruence subgroup of depth m
/// at level n: a = 1 + p^m alpha, b = p^m beta, c = p^m gamma with the last
/// entry solved from the determinant. Every element arises from exactly one
/// parameter triple.
fn for_each_pcs_element(
    p: u64,
    m: u32,
    n: u32,
    modulus: u64,
    mut visit: impl FnMut(Mat2ModPn) -> bool,
) -> bool {
    let pm = p.pow(m);
    let q = p.pow(n - m);
    for alpha in 0..q {
        let a = (1 + pm * alpha) % modulus;
        let a_inv = inv_mod(a, modulus).expect("a = 1 mod p is a unit mod p^n");
        for beta in 0..q {
            let b = pm * beta % modulus;
            for gamma in 0..q {
                let c = pm * gamma % modulus;
                let d = mul_mod(1 + mul_mod(b, c, modulus), a_inv, modulus);
                let mat = Mat2ModPn { p, n, modulus, a, b, c, d };
                debug_assert!(mat.congruent_to_identity(m));
                if !visit(mat) {
                    return false;
                }
            }
        }
    }
    true
}

/// The principal congruence subgroup {A = I mod p^m} inside SL2(Z/p^n),
/// materialized; its order is p^(3(n-m)).
pub fn pcs_elements(p: u64, m: u32, n: u32, budget: usize) -> Result<SubgroupClosure, Sl2Error> {
    let modulus = validate_depth(p, m, n)?;
    let needed = pcs_count(p, m, n);
    if needed > budget as u128 {
        return Err(Sl2Error::BudgetExceeded { needed, budget });
    }
    let mut elements = HashSet::with_capacity(needed as usize);
    for_each_pcs_element(p, m, n, modulus, |mat| {
        elements.insert(mat.key());
        true
    });
    debug_assert_eq!(elements.len() as u128, needed);
    Ok(SubgroupClosure { p, n, modulus, generators: Vec::new(), elements })
}

/// The subgroup generated by `generators`, by breadth-first multiplication
/// until no new elements appear.
pub fn closure(generators: &[Mat2ModPn], budget: usize) -> Result<SubgroupClosure, Sl2Error> {
    let first = generators.first().ok_or(Sl2Error::NoGenerators)?;
    if !generators.iter().all(|g| first.same_context(g)) {
        return Err(Sl2Error::MixedContext);
    }
    let (p, n, modulus) = (first.p, first.n, first.modulus);
    if modulus > MAX_PACKED_MODULUS {
        return Err(Sl2Error::ModulusTooLarge(modulus));
    }
    let identity = Mat2ModPn::identity(p, n)?;
    let mut elements = HashSet::new();
    elements.insert(identity.key());
    let mut frontier = VecDeque::new();
    frontier.push_back(identity);
    while let Some(x) = frontier.pop_front() {
        for g in generators {
            let y = x.mul(g);
            if elements.insert(y.key()) {
                if elements.len() > budget {
                    return Err(Sl2Error::ClosureBudgetExceeded { budget });
                }
                frontier.push_back(y);
            }
        }
    }
    Ok(SubgroupClosure { p, n, modulus, generators: generators.to_vec(), elements })
}

/// True iff every element of the principal congruence subgroup of depth m
/// (at X's level) lies in X. Streams the enumeration; the budget is still
/// honored so oversized depths error exactly like [`pcs_elements`].
pub fn contains_pcs(x: &SubgroupClosure, m: u32, budget: usize) -> Result<bool, Sl2Error> {
    validate_depth(x.p, m, x.n)?;
    let needed = pcs_count(x.p, m, x.n);
    if needed > budget as u128 {
        return Err(Sl2Error::BudgetExceeded { needed, budget });
    }
    Ok(for_each_pcs_element(x.p, m, x.n, x.modulus, |mat| {
        x.elements.contains(&mat.key())
    }))
}

/// S = [[0, -1], [1, 0]] and T = [[1, 1], [0, 1]], which generate
/// SL2(Z/p^n).
pub fn sl2_standard_generators(p: u64, n: u32) -> Result<[Mat2ModPn; 2], Sl2Error> {
    let modulus = checked_modulus(p, n)?;
    Ok([
        Mat2ModPn::new(p, n, [0, modulus - 1, 1, 0])?,
        Mat2ModPn::new(p, n, [1, 1, 0, 1])?,
    ])
}

/// The standard generating set of the level-2 principal congruence subgroup:
/// I + p e12, I + p e21, and diag(1+p, (1+p)^{-1}). These three are
/// independent in the kernel of reduction mod p, which is elementary abelian
/// of rank 3.
pub fn pcs_level2_generators(p: u64) -> Result<[Mat2ModPn; 3], Sl2Error> {
    let modulus = checked_modulus(p, 2)?;
    let unit = 1 + p;
    let unit_inv = inv_mod(unit, modulus).expect("1 + p is a unit mod p^2");
    Ok([
        Mat2ModPn::new(p, 2, [1, p, 0, 1])?,
        Mat2ModPn::new(p, 2, [1, 0, p, 1])?,
        Mat2ModPn::new(p, 2, [unit, 0, 0, unit_inv])?,
    ])
}

/// A seeded-random lift of `mat` one level up: three entries gain arbitrary
/// multiples of p^n and the fourth is solved from the determinant. Every
/// element of the fiber over `mat` is reachable.
pub fn random_lift<R: Rng>(mat: &Mat2ModPn, rng: &mut R) -> Result<Mat2ModPn, Sl2Error> {
    let p = mat.p;
    let lifted_modulus = checked_modulus(p, mat.n + 1)?;
    let pn = mat.modulus;
    let [a, b, c, d] = mat.entries();
    let mut bump = |e: u64| (e + pn * rng.random_range(0..p)) % lifted_modulus;
    if a % p != 0 {
        let (la, lb, lc) = (bump(a), bump(b), bump(c));
        let a_inv = inv_mod(la, lifted_modulus).expect("unit entry stays a unit");
        let ld = mul_mod(
            (1 + mul_mod(lb, lc, lifted_modulus)) % lifted_modulus,
            a_inv,
            lifted_modulus,
        );
        debug_assert_eq!(ld % pn, d);
        Mat2ModPn::new(p, mat.n + 1, [la, lb, lc, ld])
    } else {
        // det = ad - bc = 1 with a = 0 mod p forces b to be a unit
        let (la, lb, ld) = (bump(a), bump(b), bump(d));
        let b_inv = inv_mod(lb, lifted_modulus).expect("unit entry stays a unit");
        let ad = mul_mod(la, ld, lifted_modulus);
        let lc = mul_mod((ad + lifted_modulus - 1) % lifted_modulus, b_inv, lifted_modulus);
        debug_assert_eq!(lc % pn, c);
        Mat2ModPn::new(p, mat.n + 1, [la, lb, lc, ld])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    /// Hypothesis established and conclusion holds.
    Pass,
    /// The lifted set did not even cover the level-2 principal congruence
    /// subgroup, so the trial tests nothing.
    InsufficientGenerators,
    /// Hypothesis established but conclusion failed; the finite shadow of
    /// the lifting lemma predicts this never happens.
    LemmaViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LiftTrial {
    pub trial: u32,
    /// The closure's image at level 2 contains the level-2 principal
    /// congruence subgroup.
    pub hypothesis_level2_pcs: bool,
    /// The closure itself contains the level-3 principal congruence
    /// subgroup.
    pub contains_level3_pcs: bool,
    pub outcome: TrialOutcome,
}

/// Verdict of the finite-level lifting check.
#[derive(Debug, Clone, Serialize)]
pub struct LevelLiftVerdict {
    pub p: u64,
    pub trials: u32,
    pub seed: u64,
    pub element_budget: usize,
    pub generators_generate_level2_pcs: bool,
    pub results: Vec<LiftTrial>,
    pub all_pass: bool,
}

/// One trial of the level 2 -> 3 lifting check against an explicit set of
/// level-3 generators (exposed so callers can feed deliberately deficient
/// sets and observe the `InsufficientGenerators` outcome).
pub fn lift_trial(
    p: u64,
    trial: u32,
    level3_generators: &[Mat2ModPn],
    budget: usize,
) -> Result<LiftTrial, Sl2Error> {
    let first = level3_generators.first().ok_or(Sl2Error::NoGenerators)?;
    if first.p != p {
        return Err(Sl2Error::MixedContext);
    }
    if first.n != 3 {
        return Err(Sl2Error::InvalidLevel(first.n));
    }
    let x3 = closure(level3_generators, budget)?;
    let x2 = x3.reduce_level(2)?;
    let hypothesis = contains_pcs(&x2, 1, budget)?;
    let conclusion = contains_pcs(&x3, 1, budget)?;
    let outcome = match (hypothesis, conclusion) {
        (true, true) => TrialOutcome::Pass,
        (false, _) => TrialOutcome::InsufficientGenerators,
        (true, false) => TrialOutcome::LemmaViolation,
    };
    Ok(LiftTrial {
        trial,
        hypothesis_level2_pcs: hypothesis,
        contains_level3_pcs: conclusion,
        outcome,
    })
}

/// Finite shadow of the congruence-subgroup lifting lemma at levels 2 -> 3:
/// for each trial, lift the standard generating set of the level-2 principal
/// congruence subgroup to seeded arbitrary level-3 representatives, close
/// them up, and check the closure contains the full level-3 principal
/// congruence subgroup. The standard set is verified to generate before any
/// lifting happens.
pub fn level_lift_check(
    p: u64,
    trials: u32,
    seed: u64,
    budget: usize,
) -> Result<LevelLiftVerdict, Sl2Error> {
    if !LEVEL_LIFT_PRIMES.contains(&p) {
        return Err(Sl2Error::UnsupportedLiftPrime(p));
    }
    if trials < 1 {
        return Err(Sl2Error::NoTrials);
    }
    let generators2 = pcs_level2_generators(p)?;
    let generated = closure(&generators2, budget)?;
    let pcs2 = pcs_elements(p, 1, 2, budget)?;
    let generators_ok = generated.set_eq(&pcs2);
    if !generators_ok {
        return Err(Sl2Error::GeneratorCheckFailed(p));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut results = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let lifts = generators2
            .iter()
            .map(|g| random_lift(g, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        results.push(lift_trial(p, trial, &lifts, budget)?);
    }
    let all_pass = results.iter().all(|r| r.outcome == TrialOutcome::Pass);
    Ok(LevelLiftVerdict {
        p,
        trials,
        seed,
        element_budget: budget,
        generators_generate_level2_pcs: generators_ok,
        results,
        all_pass,
    })
}
