//! Bernoulli numbers B_2, B_4, ..., B_{p-3} modulo p and irregular-pair
//! detection.
//!
//! Two algorithmically independent computations are provided and are checked
//! against each other in the test suite: the classical recurrence
//! `sum_{j=0}^{n} C(n+1, j) B_j = 0` solved for B_n, and inversion of the
//! truncated series `sum_n x^n / (n+1)!` (the generating function of
//! x/(e^x - 1)), reading off `B_n = n! * [x^n]` of the inverse. Odd-index
//! values and B_1 are computed as a side effect and checked before being
//! discarded.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::fp::{factorial_table, FieldElement, FpError, PrimeField, Series};
use crate::primality::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BernoulliError {
    #[error("p = {0} is not a prime >= 5")]
    InvalidPrime(u64),
    #[error("fast series inversion is not compiled in (enable the fast-series feature)")]
    FastPathUnavailable,
    #[error("self-check failed mod {p}: B_{index} should reduce to {expected}")]
    SelfCheck { p: u64, index: u64, expected: &'static str },
    #[error(transparent)]
    Fp(#[from] FpError),
}

/// How a Bernoulli table is computed. The recurrence is the oracle the other
/// methods are diffed against; plain series inversion is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum BernoulliMethod {
    #[serde(rename = "oracle")]
    Recurrence,
    #[default]
    #[serde(rename = "series")]
    SeriesInversion,
    #[serde(rename = "fast")]
    FastSeriesInversion,
}

/// A pair (p, k) with k even, 2 <= k <= p-3, and B_k = 0 mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IrregularPair {
    pub p: u64,
    pub k: u64,
}

/// B_k mod p for every even k in [2, p-3].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliTable {
    p: u64,
    method: BernoulliMethod,
    values: BTreeMap<u64, u64>,
}

impl BernoulliTable {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn method(&self) -> BernoulliMethod {
        self.method
    }

    /// B_k for even k in [2, p-3]; `None` outside the table.
    pub fn get(&self, k: u64) -> Option<FieldElement> {
        let field = PrimeField::new(self.p).expect("table prime validated at construction");
        self.values.get(&k).map(|&v| field.elem(v))
    }

    /// (k, B_k) ascending by k.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One line per k as `p,k,B_k` in decimal, ascending k. This is the
    /// format the CLI's `--dump-bernoulli` flag writes.
    pub fn dump_lines(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.iter() {
            out.push_str(&format!("{},{},{}\n", self.p, k, v));
        }
        out
    }

    /// The even indices whose Bernoulli number vanishes mod p, ascending.
    pub fn irregular_pairs(&self) -> Vec<IrregularPair> {
        self.iter()
            .filter(|&(_, v)| v == 0)
            .map(|(k, _)| IrregularPair { p: self.p, k })
            .collect()
    }
}

fn validated_field(p: u64) -> Result<PrimeField, BernoulliError> {
    if p < 5 || !is_prime(p) {
        return Err(BernoulliError::InvalidPrime(p));
    }
    Ok(PrimeField::new(p).expect("p already validated prime"))
}

/// B_0..B_{p-3} by the recurrence sum_{j=0}^{n} C(n+1, j) B_j = 0. Binomial
/// rows are grown incrementally so no factorial inverses are needed.
fn all_bernoulli_recurrence(field: PrimeField) -> Vec<u64> {
    let p = field.modulus();
    let n_max = (p - 3) as usize;
    let mut b = vec![0u64; n_max + 1];
    b[0] = 1;
    // row holds C(n+1, 0..=n+1) mod p at the top of each iteration
    let mut row: Vec<u64> = vec![1, 1];
    for n in 1..=n_max {
        row.push(1);
        for j in (1..=n).rev() {
            row[j] = field.add_raw(row[j], row[j - 1]);
        }
        let mut acc = 0u64;
        for j in 0..n {
            if b[j] != 0 {
                acc = field.add_raw(acc, field.mul_raw(row[j], b[j]));
            }
        }
        // n+1 <= p-2, so it is a unit mod p
        let inv = field
            .inv_raw((n as u64 + 1) % p)
            .expect("n+1 is a unit below p");
        b[n] = field.sub_raw(0, field.mul_raw(inv, acc));
    }
    b
}

#[cfg(feature = "fast-series")]
fn invert_fast(series: &Series) -> Result<Series, BernoulliError> {
    Ok(series.inverse_fast()?)
}

#[cfg(not(feature = "fast-series"))]
fn invert_fast(_series: &Series) -> Result<Series, BernoulliError> {
    Err(BernoulliError::FastPathUnavailable)
}

/// B_0..B_{p-3} by inverting E(x) = sum_{n=0}^{p-3} x^n/(n+1)! and reading
/// B_n = n! * [x^n] E^{-1}.
fn all_bernoulli_series(field: PrimeField, fast: bool) -> Result<Vec<u64>, BernoulliError> {
    let p = field.modulus();
    let n_max = (p - 3) as usize;
    let facts = factorial_table(field, p - 2)?;
    let coeffs: Vec<u64> = (0..=n_max).map(|n| facts.fact_inv_raw()[n + 1]).collect();
    let series = Series::from_residues(field, coeffs);
    let inverse = if fast { invert_fast(&series)? } else { series.inverse()? };
    Ok((0..=n_max)
        .map(|n| field.mul_raw(facts.fact_raw()[n], inverse.residues()[n]))
        .collect())
}

/// The values outside [2, p-3] even are fully determined; a disagreement
/// means the engine is broken, so fail loudly before discarding them.
fn check_known_values(field: PrimeField, b: &[u64]) -> Result<(), BernoulliError> {
    let p = field.modulus();
    if b[0] != 1 {
        return Err(BernoulliError::SelfCheck { p, index: 0, expected: "1" });
    }
    let minus_half = field.sub_raw(0, field.inv_raw(2).expect("2 is a unit"));
    if b[1] != minus_half {
        return Err(BernoulliError::SelfCheck { p, index: 1, expected: "-1/2" });
    }
    for n in (3..b.len()).step_by(2) {
        if b[n] != 0 {
            return Err(BernoulliError::SelfCheck { p, index: n as u64, expected: "0" });
        }
    }
    Ok(())
}

/// Computes the table of B_k mod p for all even k in [2, p-3].
pub fn bernoulli_mod_p(p: u64, method: BernoulliMethod) -> Result<BernoulliTable, BernoulliError> {
    let field = validated_field(p)?;
    let all = match method {
        BernoulliMethod::Recurrence => all_bernoulli_recurrence(field),
        BernoulliMethod::SeriesInversion => all_bernoulli_series(field, false)?,
        BernoulliMethod::FastSeriesInversion => all_bernoulli_series(field, true)?,
    };
    check_known_values(field, &all)?;
    let values: BTreeMap<u64, u64> = (2..=p - 3)
        .step_by(2)
        .map(|k| (k, all[k as usize]))
        .collect();
    Ok(BernoulliTable { p, method, values })
}

/// All (p, k) with B_k = 0 mod p, k even in [2, p-3], ascending by k; empty
/// means p is regular. Uses the default (series inversion) method.
pub fn irregular_pairs(p: u64) -> Result<Vec<IrregularPair>, BernoulliError> {
    irregular_pairs_with(p, BernoulliMethod::default())
}

pub fn irregular_pairs_with(
    p: u64,
    method: BernoulliMethod,
) -> Result<Vec<IrregularPair>, BernoulliError> {
    Ok(bernoulli_mod_p(p, method)?.irregular_pairs())
}

/// The number of irregular pairs for p.
pub fn index_of_irregularity(p: u64) -> Result<usize, BernoulliError> {
    Ok(irregular_pairs(p)?.len())
}
