//! Exact polynomial convolution mod an arbitrary odd prime, built from
//! number-theoretic transforms over three fixed word-size moduli and CRT
//! reconstruction, plus the Newton iteration for series inversion on top.
//!
//! Everything here is exact integer arithmetic: per-coefficient convolution
//! sums are bounded by `(p-1)^2 * len`, which must stay below the product of
//! the three NTT moduli. Inputs outside that envelope are rejected rather
//! than silently wrapped, so results always agree with the quadratic path.

use crate::fp::{FpError, PrimeField};
use crate::primality::{mul_mod, pow_mod};

// NTT-friendly primes with primitive root 3:
//   167772161 = 5 * 2^25 + 1
//   469762049 = 7 * 2^26 + 1
//   998244353 = 119 * 2^23 + 1
const NTT_MODULI: [u64; 3] = [167_772_161, 469_762_049, 998_244_353];
const NTT_ROOT: u64 = 3;

/// Largest supported transform size, limited by the 2-adic valuation of
/// 998244353 - 1.
const MAX_TRANSFORM: usize = 1 << 23;

fn ntt(a: &mut [u64], m: u64, invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w_len = pow_mod(NTT_ROOT, (m - 1) / len as u64, m);
        if invert {
            w_len = pow_mod(w_len, m - 2, m);
        }
        for start in (0..n).step_by(len) {
            let mut w = 1u64;
            for k in start..start + len / 2 {
                let u = a[k];
                let v = mul_mod(a[k + len / 2], w, m);
                a[k] = if u + v >= m { u + v - m } else { u + v };
                a[k + len / 2] = if u >= v { u - v } else { u + m - v };
                w = mul_mod(w, w_len, m);
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = pow_mod(n as u64, m - 2, m);
        for x in a.iter_mut() {
            *x = mul_mod(*x, n_inv, m);
        }
    }
}

fn convolve_single_mod(a: &[u64], b: &[u64], m: u64, size: usize) -> Vec<u64> {
    let mut fa = vec![0u64; size];
    let mut fb = vec![0u64; size];
    for (dst, &src) in fa.iter_mut().zip(a) {
        *dst = src % m;
    }
    for (dst, &src) in fb.iter_mut().zip(b) {
        *dst = src % m;
    }
    ntt(&mut fa, m, false);
    ntt(&mut fb, m, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = mul_mod(*x, *y, m);
    }
    ntt(&mut fa, m, true);
    fa
}

/// Convolution of canonical residue vectors mod `field`, exact via
/// three-modulus CRT. The output has length `a.len() + b.len() - 1`.
pub(crate) fn convolve(field: PrimeField, a: &[u64], b: &[u64]) -> Result<Vec<u64>, FpError> {
    let p = field.modulus();
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let terms = a.len().min(b.len()) as u128;
    let [m1, m2, m3] = NTT_MODULI;
    let crt_modulus = m1 as u128 * m2 as u128 * m3 as u128;
    let coeff_bound = ((p - 1) as u128)
        .checked_mul((p - 1) as u128)
        .and_then(|sq| sq.checked_mul(terms));
    if size > MAX_TRANSFORM || !coeff_bound.is_some_and(|bound| bound < crt_modulus) {
        return Err(FpError::FastPathCapacity { p, len: out_len });
    }

    let r1 = convolve_single_mod(a, b, m1, size);
    let r2 = convolve_single_mod(a, b, m2, size);
    let r3 = convolve_single_mod(a, b, m3, size);

    // Garner reconstruction: x = v1 + M1*v2 + M1*M2*v3 with x < M1*M2*M3.
    let c12 = pow_mod(m1 % m2, m2 - 2, m2);
    let c13 = pow_mod(mul_mod(m1 % m3, m2 % m3, m3), m3 - 2, m3);
    let m1m2 = m1 as u128 * m2 as u128;
    let mut out = vec![0u64; out_len];
    for i in 0..out_len {
        let v1 = r1[i];
        let d2 = if r2[i] >= v1 % m2 { r2[i] - v1 % m2 } else { r2[i] + m2 - v1 % m2 };
        let v2 = mul_mod(d2, c12, m2);
        let x12 = v1 as u128 + m1 as u128 * v2 as u128;
        let x12_mod = (x12 % m3 as u128) as u64;
        let d3 = if r3[i] >= x12_mod { r3[i] - x12_mod } else { r3[i] + m3 - x12_mod };
        let v3 = mul_mod(d3, c13, m3);
        let x = x12 + m1m2 * v3 as u128;
        out[i] = (x % p as u128) as u64;
    }
    Ok(out)
}

/// Series inverse mod x^{s.len()} by Newton doubling: given t correct to k
/// terms, t*(2 - s*t) is correct to 2k terms.
pub(crate) fn series_inverse_newton(field: PrimeField, s: &[u64]) -> Result<Vec<u64>, FpError> {
    debug_assert!(s[0] != 0);
    let n = s.len();
    let mut t = vec![field.inv_raw(s[0])?];
    while t.len() < n {
        let k = (2 * t.len()).min(n);
        let st = convolve(field, &s[..k], &t)?;
        let mut e = vec![0u64; k];
        for (i, slot) in e.iter_mut().enumerate() {
            let have = if i < st.len() { st[i] } else { 0 };
            let want = if i == 0 { 2 % field.modulus() } else { 0 };
            *slot = field.sub_raw(want, have);
        }
        let refined = convolve(field, &t, &e)?;
        t = refined[..k].to_vec();
    }
    Ok(t)
}
