//! The per-prime eligibility criterion: which odd eigenspace indices a prime
//! admits, and the full qualification verdict.
//!
//! A prime qualifies when it is at least 5, irregular, congruent to 1 mod 4,
//! Vandiver's conjecture is accepted for it under the configured policy, and
//! at least one admissible index survives the exclusions. Each irregular pair
//! (p, k) proposes the index i = p - k; the exclusions i != 1 and i != p-2
//! hold automatically for pairs produced by the Bernoulli engine (k <= p-3
//! forces i >= 3, and k = 2 is impossible since B_2 = 1/6 is a unit), while
//! i = (p-1)/2 is filtered explicitly. Nonvanishing of the eigenspace at a
//! surviving index rests on the converse of Herbrand's theorem, due to Ribet,
//! so indices are labelled accordingly.

use serde::Serialize;
use thiserror::Error;

use crate::bernoulli::{irregular_pairs, BernoulliError, IrregularPair};
use crate::primality::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CriterionError {
    #[error(transparent)]
    Bernoulli(#[from] BernoulliError),
    #[error("p = {0} is not a prime >= 5")]
    InvalidPrime(u64),
    #[error("inconsistent irregular pair (p = {p}, k = {k}): {reason}")]
    InconsistentPair { p: u64, k: u64, reason: &'static str },
    #[error("index i = {i} out of range [{lo}, {hi}] for p = {p}")]
    IndexRange { p: u64, i: u64, lo: u64, hi: u64 },
    #[error("strict Vandiver policy rejects p = {p}: at or beyond the verified bound {bound}")]
    PolicyViolation { p: u64, bound: u64 },
    #[error("determinant exponent i + p^2(p-1) exceeds u64 for p = {p}, i = {i}")]
    DetExponentOverflow { p: u64, i: u64 },
    #[error("internal: reported index i = {i} for p = {p} fails lifting condition {id}")]
    LiftingConditionFailed { p: u64, i: u64, id: &'static str },
}

/// How the nonvanishing of the chosen eigenspace is certified. The scanner
/// only ever produces `RibetCertified`: the Bernoulli criterion detects the
/// index, and the converse of Herbrand's theorem upgrades divisibility to
/// eigenspace nonvanishing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    HerbrandNecessary,
    RibetCertified,
}

/// Text attached to every report: the direction of Herbrand/Ribet actually
/// used to certify the indices.
pub const CERTIFICATION_NOTE: &str =
    "indices certified via Ribet's converse to Herbrand's theorem: B_{p-i} = 0 mod p implies the odd eigenspace at i is nonzero";

/// An odd index i, 3 <= i <= p-4, surviving all exclusions, together with
/// the irregular pair it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdmissibleIndex {
    pub i: u64,
    pub source_pair: IrregularPair,
    pub certification: Certification,
}

/// Whether Vandiver's conjecture is accepted from published verification or
/// left unchecked. The artifact never verifies the conjecture itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VandiverStatus {
    AssumedFromLiterature,
    NotChecked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VandiverMode {
    /// Accept primes below the bound; report larger ones as unchecked
    /// (and therefore not qualifying).
    Assume,
    /// Error out on primes at or beyond the bound instead of proceeding.
    Strict,
}

/// Published verification frontier for Vandiver's conjecture; primes below
/// this have been checked in the literature.
pub const DEFAULT_VANDIVER_BOUND: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VandiverPolicy {
    pub mode: VandiverMode,
    pub bound: u64,
}

impl Default for VandiverPolicy {
    fn default() -> Self {
        VandiverPolicy { mode: VandiverMode::Assume, bound: DEFAULT_VANDIVER_BOUND }
    }
}

impl VandiverPolicy {
    fn status_for(&self, p: u64) -> Result<VandiverStatus, CriterionError> {
        if p < self.bound {
            Ok(VandiverStatus::AssumedFromLiterature)
        } else {
            match self.mode {
                VandiverMode::Assume => Ok(VandiverStatus::NotChecked),
                VandiverMode::Strict => {
                    Err(CriterionError::PolicyViolation { p, bound: self.bound })
                }
            }
        }
    }
}

/// The full verdict for one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeReport {
    pub p: u64,
    pub residue_mod_4: u8,
    pub irregular_pairs: Vec<IrregularPair>,
    pub admissible_indices: Vec<AdmissibleIndex>,
    /// i + p^2(p-1) for each admissible index, parallel to
    /// `admissible_indices`.
    pub det_exponents: Vec<u64>,
    pub vandiver_status: VandiverStatus,
    pub qualifies: bool,
}

/// Turns irregular pairs into admissible indices. `pairs` must be the full
/// output of `irregular_pairs(p)`; structurally impossible pairs (odd k, out
/// of range, or k = 2, which a correct Bernoulli engine can never emit) are
/// reported as inconsistencies rather than filtered silently.
pub fn admissible_indices(
    p: u64,
    pairs: &[IrregularPair],
) -> Result<Vec<AdmissibleIndex>, CriterionError> {
    if p < 5 || !is_prime(p) {
        return Err(CriterionError::InvalidPrime(p));
    }
    let mut out = Vec::with_capacity(pairs.len());
    for pair in pairs {
        if pair.p != p {
            return Err(CriterionError::InconsistentPair {
                p: pair.p,
                k: pair.k,
                reason: "pair belongs to a different prime",
            });
        }
        if pair.k % 2 != 0 || pair.k < 2 || pair.k > p - 3 {
            return Err(CriterionError::InconsistentPair {
                p: pair.p,
                k: pair.k,
                reason: "index must be even and within [2, p-3]",
            });
        }
        if pair.k == 2 {
            // B_2 = 1/6 is a unit mod every p >= 5; a pair here means the
            // Bernoulli engine miscomputed
            return Err(CriterionError::InconsistentPair {
                p: pair.p,
                k: pair.k,
                reason: "B_2 = 1/6 is a unit, so k = 2 can never be irregular",
            });
        }
        let i = p - pair.k;
        debug_assert!(i % 2 == 1 && (3..=p - 4).contains(&i));
        if i == (p - 1) / 2 {
            continue;
        }
        out.push(AdmissibleIndex {
            i,
            source_pair: *pair,
            certification: Certification::RibetCertified,
        });
    }
    Ok(out)
}

fn det_exponent(p: u64, i: u64) -> Result<u64, CriterionError> {
    (p as u128)
        .checked_mul(p as u128)
        .and_then(|sq| sq.checked_mul((p - 1) as u128))
        .and_then(|t| t.checked_add(i as u128))
        .and_then(|t| u64::try_from(t).ok())
        .ok_or(CriterionError::DetExponentOverflow { p, i })
}

/// Builds the report for a prime from its already-computed irregular pairs.
pub fn report_from_pairs(
    p: u64,
    pairs: Vec<IrregularPair>,
    policy: &VandiverPolicy,
) -> Result<PrimeReport, CriterionError> {
    if p < 5 || !is_prime(p) {
        return Err(CriterionError::InvalidPrime(p));
    }
    let vandiver_status = policy.status_for(p)?;
    let indices = admissible_indices(p, &pairs)?;
    let det_exponents = indices
        .iter()
        .map(|idx| det_exponent(p, idx.i))
        .collect::<Result<Vec<u64>, _>>()?;
    let qualifies = !pairs.is_empty()
        && p % 4 == 1
        && vandiver_status == VandiverStatus::AssumedFromLiterature
        && !indices.is_empty();
    if qualifies {
        // a qualifying index must clear every computable lifting condition;
        // anything else is an internal inconsistency
        for idx in &indices {
            let conditions = hr_conditions(p, idx.i)?;
            if let Some(failed) = conditions.iter().find(|c| c.status == HrStatus::Fail) {
                return Err(CriterionError::LiftingConditionFailed {
                    p,
                    i: idx.i,
                    id: failed.id,
                });
            }
        }
    }
    Ok(PrimeReport {
        p,
        residue_mod_4: (p % 4) as u8,
        irregular_pairs: pairs,
        admissible_indices: indices,
        det_exponents,
        vandiver_status,
        qualifies,
    })
}

/// Full verdict for one prime, computing the Bernoulli table with the
/// default method.
pub fn scan_prime(p: u64, policy: &VandiverPolicy) -> Result<PrimeReport, CriterionError> {
    if p < 5 || !is_prime(p) {
        return Err(CriterionError::InvalidPrime(p));
    }
    let pairs = irregular_pairs(p)?;
    report_from_pairs(p, pairs, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HrStatus {
    Pass,
    Fail,
    /// True by construction for representations built from class-group
    /// lines; reported without computation.
    Structural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HrCondition {
    pub id: &'static str,
    pub status: HrStatus,
}

/// The computable subset of the Hamblen-Ramakrishna lifting conditions for
/// the character power i at p:
///
/// * (0) p != 2
/// * (2) 2i != 0 mod (p-1), i.e. the character squared is nontrivial
/// * (3) i != +-1 mod (p-1)
/// * (5a) i odd
/// * (5b) i != 0 mod (p-1)
///
/// Conditions (1) and (4) hold by construction and are reported as
/// structural.
pub fn hr_conditions(p: u64, i: u64) -> Result<Vec<HrCondition>, CriterionError> {
    if !is_prime(p) || p < 3 {
        return Err(CriterionError::InvalidPrime(p));
    }
    if i < 1 || i > p - 2 {
        return Err(CriterionError::IndexRange { p, i, lo: 1, hi: p - 2 });
    }
    let m = p - 1;
    let pass_fail = |ok: bool| if ok { HrStatus::Pass } else { HrStatus::Fail };
    Ok(vec![
        HrCondition { id: "0", status: pass_fail(p != 2) },
        HrCondition { id: "1", status: HrStatus::Structural },
        HrCondition { id: "2", status: pass_fail(!(2 * i).is_multiple_of(m)) },
        HrCondition { id: "3", status: pass_fail(i % m != 1 && i % m != m - 1) },
        HrCondition { id: "4", status: HrStatus::Structural },
        HrCondition { id: "5a", status: pass_fail(i % 2 == 1) },
        HrCondition { id: "5b", status: pass_fail(!i.is_multiple_of(m)) },
    ])
}

/// True when no computable condition failed (structural entries count as
/// satisfied).
pub fn all_conditions_hold(conditions: &[HrCondition]) -> bool {
    conditions.iter().all(|c| c.status != HrStatus::Fail)
}
