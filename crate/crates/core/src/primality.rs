//! Deterministic 64-bit primality testing and prime generation for range scans.

/// `(a * b) mod m` without overflow for any 64-bit operands.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square-and-multiply.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `a^-1 mod m` by extended Euclid, for any modulus; `None` when
/// `gcd(a, m) != 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// The first twelve primes witness compositeness for every composite below
/// 3.3 * 10^24, so this base set is deterministic over the full u64 range.
const MILLER_RABIN_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin primality test, exact for all `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MILLER_RABIN_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to and including `n` by a bit-packed sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![0u64; n / 64 + 1];
    let is_set = |bits: &[u64], i: usize| bits[i / 64] >> (i % 64) & 1 == 1;
    let mut primes = Vec::new();
    for i in 2..=n {
        if !is_set(&composite, i) {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j / 64] |= 1 << (j % 64);
                j += i;
            }
        }
    }
    primes
}

/// Threshold above which the segmented sieve's base-prime table would be
/// larger than is worth allocating; beyond it each candidate is tested
/// individually instead.
const SIEVE_BASE_LIMIT: u64 = 1 << 26;

/// All primes in the inclusive range `[lo, hi]`, ascending.
///
/// Uses a segmented sieve for ranges whose square root is small enough to
/// sieve cheaply, and falls back to per-candidate deterministic testing for
/// astronomically placed ranges.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = hi.isqrt();
    if root > SIEVE_BASE_LIMIT {
        return (lo..=hi).filter(|&n| is_prime(n)).collect();
    }
    let base = primes_up_to(root);
    let mut primes = Vec::new();
    const SEGMENT: u64 = 1 << 20;
    let mut seg_lo = lo;
    loop {
        let seg_hi = seg_lo.saturating_add(SEGMENT - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        let mut composite = vec![false; len];
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            // first multiple of p in [seg_lo, seg_hi], at least p*p
            let Some(mut start) = seg_lo.div_ceil(p).checked_mul(p) else {
                continue; // no multiple of p at or above seg_lo fits in u64
            };
            if start < p * p {
                start = p * p;
            }
            let mut j = start;
            while j <= seg_hi {
                composite[(j - seg_lo) as usize] = true;
                if j > seg_hi - p {
                    break;
                }
                j += p;
            }
        }
        for (off, &c) in composite.iter().enumerate() {
            if !c {
                let n = seg_lo + off as u64;
                if n >= 2 {
                    primes.push(n);
                }
            }
        }
        if seg_hi == hi {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    primes
}
