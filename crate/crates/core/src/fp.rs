//! Exact arithmetic in the prime field F_p and on truncated power series
//! over it.
//!
//! Residues are kept in canonical form `[0, p)` at every module boundary so
//! that equality and serialized output are bit-stable. The series inverse has
//! a quadratic baseline that is always present; a Newton/NTT path lives
//! behind the `fast-series` feature and must agree with the baseline
//! coefficient for coefficient.

use crate::primality::{is_prime, mul_mod, pow_mod};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("modulus {0} is not an odd prime")]
    NotPrime(u64),
    #[error("0 has no multiplicative inverse mod {0}")]
    ZeroInverse(u64),
    #[error("series has zero constant term, not invertible mod x^{{N+1}}")]
    NonUnitConstant,
    #[error("factorial table bound {n} exceeds p-2 = {max} for p = {p}")]
    FactorialRange { n: u64, max: u64, p: u64 },
    #[cfg(feature = "fast-series")]
    #[error("fast convolution capacity exceeded for modulus {p} and length {len}")]
    FastPathCapacity { p: u64, len: usize },
}

/// An ambient prime field context. Primality of the modulus is checked once
/// here, by a deterministic test valid for all 64-bit inputs; elements and
/// series constructed through the context can rely on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FpError> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
            return Err(FpError::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.p
    }

    /// Canonical element from an arbitrary 64-bit value.
    #[inline]
    pub fn elem(self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.p,
            modulus: self.p,
        }
    }

    #[inline]
    pub fn zero(self) -> FieldElement {
        self.elem(0)
    }

    #[inline]
    pub fn one(self) -> FieldElement {
        self.elem(1)
    }

    // Raw helpers on canonical u64 residues. Inputs must already be < p;
    // outputs are canonical.

    #[inline]
    pub(crate) fn add_raw(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        let (s, carry) = a.overflowing_add(b);
        if carry || s >= self.p {
            s.wrapping_sub(self.p)
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    #[inline]
    pub(crate) fn mul_raw(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        mul_mod(a, b, self.p)
    }

    #[inline]
    pub(crate) fn pow_raw(self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }

    /// Inverse by Fermat's little theorem; the modulus is known prime.
    pub(crate) fn inv_raw(self, a: u64) -> Result<u64, FpError> {
        if a == 0 {
            return Err(FpError::ZeroInverse(self.p));
        }
        Ok(self.pow_raw(a, self.p - 2))
    }
}

/// A residue mod an odd prime, always stored canonically in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    #[inline]
    fn field(self) -> PrimeField {
        PrimeField { p: self.modulus }
    }

    pub fn pow(self, e: u64) -> FieldElement {
        FieldElement {
            value: self.field().pow_raw(self.value, e),
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inverse(self) -> Result<FieldElement, FpError> {
        Ok(FieldElement {
            value: self.field().inv_raw(self.value)?,
            modulus: self.modulus,
        })
    }
}

macro_rules! impl_elem_binop {
    ($trait:ident, $method:ident, $raw:ident) => {
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(
                    self.modulus, rhs.modulus,
                    "field elements from different prime fields"
                );
                FieldElement {
                    value: self.field().$raw(self.value, rhs.value),
                    modulus: self.modulus,
                }
            }
        }
    };
}

impl_elem_binop!(Add, add, add_raw);
impl_elem_binop!(Sub, sub, sub_raw);
impl_elem_binop!(Mul, mul, mul_raw);

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field().sub_raw(0, self.value),
            modulus: self.modulus,
        }
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A power series over F_p truncated at a fixed degree N. The coefficient
/// vector always has length exactly N+1; trailing zeros are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl Series {
    /// Builds a series from arbitrary residues, reducing each one. The vector
    /// length fixes the truncation degree; it must be nonempty.
    pub fn from_residues(field: PrimeField, mut coeffs: Vec<u64>) -> Series {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        let p = field.modulus();
        for c in &mut coeffs {
            *c %= p;
        }
        Series { field, coeffs }
    }

    /// The constant series `c` truncated at degree `n`.
    pub fn constant(field: PrimeField, c: u64, n: usize) -> Series {
        let mut coeffs = vec![0u64; n + 1];
        coeffs[0] = c % field.modulus();
        Series { field, coeffs }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Truncation degree N; the series stores coefficients 0..=N.
    #[inline]
    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.field.elem(self.coeffs[i])
    }

    #[inline]
    pub fn residues(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Product truncated to this series' degree.
    pub fn mul_truncated(&self, rhs: &Series) -> Series {
        assert_eq!(self.field, rhs.field, "series over different prime fields");
        let f = self.field;
        let n = self.coeffs.len();
        let mut out = vec![0u64; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().take(n - i).enumerate() {
                out[i + j] = f.add_raw(out[i + j], f.mul_raw(a, b));
            }
        }
        Series { field: f, coeffs: out }
    }

    /// Multiplicative inverse mod x^{N+1} by the quadratic recurrence
    /// t_n = -s_0^{-1} * sum_{k=1..=n} s_k t_{n-k}. This is the reference
    /// path; the optional fast path must reproduce it exactly.
    pub fn inverse(&self) -> Result<Series, FpError> {
        let f = self.field;
        if self.coeffs[0] == 0 {
            return Err(FpError::NonUnitConstant);
        }
        let c0_inv = f.inv_raw(self.coeffs[0])?;
        let n = self.coeffs.len();
        let mut out = vec![0u64; n];
        out[0] = c0_inv;
        for i in 1..n {
            let mut acc = 0u64;
            for k in 1..=i {
                if self.coeffs[k] != 0 {
                    acc = f.add_raw(acc, f.mul_raw(self.coeffs[k], out[i - k]));
                }
            }
            out[i] = f.sub_raw(0, f.mul_raw(c0_inv, acc));
        }
        Ok(Series { field: f, coeffs: out })
    }

    /// Newton-iteration inverse over NTT convolution. Exact arithmetic, so it
    /// returns the same coefficients as [`Series::inverse`].
    #[cfg(feature = "fast-series")]
    pub fn inverse_fast(&self) -> Result<Series, FpError> {
        if self.coeffs[0] == 0 {
            return Err(FpError::NonUnitConstant);
        }
        let coeffs = crate::fastconv::series_inverse_newton(self.field, &self.coeffs)?;
        Ok(Series { field: self.field, coeffs })
    }
}

/// Tables of n! mod p and (n!)^{-1} mod p for 0 <= n <= n_max.
#[derive(Debug, Clone)]
pub struct FactorialTable {
    field: PrimeField,
    fact: Vec<u64>,
    fact_inv: Vec<u64>,
}

/// Precomputes factorials and inverse factorials. Requires `n_max <= p - 2`
/// so that every factorial in the table is a unit mod p.
pub fn factorial_table(field: PrimeField, n_max: u64) -> Result<FactorialTable, FpError> {
    let p = field.modulus();
    if n_max > p - 2 {
        return Err(FpError::FactorialRange { n: n_max, max: p - 2, p });
    }
    let len = (n_max + 1) as usize;
    let mut fact = vec![1u64; len];
    for n in 1..len {
        fact[n] = field.mul_raw(fact[n - 1], n as u64);
    }
    let mut fact_inv = vec![1u64; len];
    fact_inv[len - 1] = field.inv_raw(fact[len - 1])?;
    for n in (1..len).rev() {
        fact_inv[n - 1] = field.mul_raw(fact_inv[n], n as u64);
    }
    Ok(FactorialTable { field, fact, fact_inv })
}

impl FactorialTable {
    #[inline]
    pub fn factorial(&self, n: usize) -> FieldElement {
        self.field.elem(self.fact[n])
    }

    #[inline]
    pub fn factorial_inv(&self, n: usize) -> FieldElement {
        self.field.elem(self.fact_inv[n])
    }

    #[inline]
    pub(crate) fn fact_raw(&self) -> &[u64] {
        &self.fact
    }

    #[inline]
    pub(crate) fn fact_inv_raw(&self) -> &[u64] {
        &self.fact_inv
    }

    pub fn len(&self) -> usize {
        self.fact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fact.is_empty()
    }
}
