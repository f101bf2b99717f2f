//! Prime-field evaluation context for the solver's validity checks.
//!
//! Each reconstruction step is cross-checked by evaluating polynomial
//! identities at a primitive element `λ` of `F_q` and at `λ⁻¹`. The context
//! holds the prime, the generator, and power tables covering every exponent
//! the solver can produce (up to `2n+2`).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {q} must exceed the string length {n}")]
    TooSmall { q: u64, n: usize },
}

/// Prime selection policy.
///
/// The validity checks only need `q > n`, but with the minimum prime the
/// exponent comparisons behind the two-choice analysis can wrap around the
/// group order and admit spurious branches. `Safe` picks the smallest prime
/// with `q − 1 > 2n + 2` so that no exponent the solver forms can collide
/// modulo the group order; `PaperMin` keeps the minimal choice for
/// experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldPolicy {
    PaperMin,
    #[default]
    Safe,
}

/// Evaluation context: prime `q`, primitive element, and `λ^±j` tables.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    prime: u64,
    generator: u64,
    pow: Vec<u64>,
    inv_pow: Vec<u64>,
}

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    let mut f = 3u64;
    while f * f <= x {
        if x % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1u64 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest primitive root of the prime `q`, by the factored-exponent test.
pub fn primitive_root(q: u64) -> u64 {
    if q == 2 {
        return 1;
    }
    let exps: Vec<u64> = distinct_prime_factors(q - 1)
        .into_iter()
        .map(|p| (q - 1) / p)
        .collect();
    'candidate: for g in 2..q {
        for &e in &exps {
            if pow_mod(g, e, q) == 1 {
                continue 'candidate;
            }
        }
        return g;
    }
    unreachable!("every prime field has a primitive root")
}

fn next_prime(mut x: u64) -> u64 {
    loop {
        if is_prime(x) {
            return x;
        }
        x += 1;
    }
}

impl FieldCtx {
    /// Build a context for strings of length `n` under the given policy.
    pub fn new(n: usize, policy: FieldPolicy) -> FieldCtx {
        let q = match policy {
            FieldPolicy::PaperMin => next_prime(n as u64 + 1),
            FieldPolicy::Safe => next_prime(2 * n as u64 + 4),
        };
        FieldCtx::with_prime(n, q).expect("policy primes are valid by construction")
    }

    /// Build a context with an explicit prime (CLI override); the prime must
    /// still exceed `n`.
    pub fn with_prime(n: usize, q: u64) -> Result<FieldCtx, FieldError> {
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        if q <= n as u64 {
            return Err(FieldError::TooSmall { q, n });
        }
        let generator = primitive_root(q);
        let table_len = 2 * n + 3;
        let mut pow = Vec::with_capacity(table_len);
        let mut inv_pow = Vec::with_capacity(table_len);
        let gen_inv = pow_mod(generator, q - 2, q);
        let (mut p, mut ip) = (1u64, 1u64);
        for _ in 0..table_len {
            pow.push(p);
            inv_pow.push(ip);
            p = mul_mod(p, generator, q);
            ip = mul_mod(ip, gen_inv, q);
        }
        Ok(FieldCtx {
            prime: q,
            generator,
            pow,
            inv_pow,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// `λ^e`, table lookup with a modpow fallback past the table.
    pub fn pow(&self, e: u64) -> u64 {
        match self.pow.get(e as usize) {
            Some(&v) => v,
            None => pow_mod(self.generator, e % (self.prime - 1), self.prime),
        }
    }

    /// `λ^{-e}`.
    pub fn inv_pow(&self, e: u64) -> u64 {
        match self.inv_pow.get(e as usize) {
            Some(&v) => v,
            None => {
                let r = (self.prime - 1) - (e % (self.prime - 1));
                pow_mod(self.generator, r % (self.prime - 1), self.prime)
            }
        }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.prime {
            s - self.prime
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.prime - b
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.prime)
    }

    fn inv(&self, a: u64) -> u64 {
        pow_mod(a, self.prime - 2, self.prime)
    }

    /// Geometric block sum `λ^start + λ^(start+1) + … + λ^(start+len−1)`,
    /// via the closed form `λ^start (λ^len − 1) / (λ − 1)`.
    pub fn geo_sum(&self, start: u64, len: u64) -> u64 {
        if len == 0 {
            return 0;
        }
        let num = self.sub(self.pow(start + len), self.pow(start));
        self.mul(num, self.inv(self.sub(self.generator, 1)))
    }

    /// Same block sum evaluated at `λ⁻¹`.
    pub fn geo_sum_inv(&self, start: u64, len: u64) -> u64 {
        if len == 0 {
            return 0;
        }
        let num = self.sub(self.inv_pow(start + len), self.inv_pow(start));
        self.mul(num, self.inv(self.sub(self.inv_pow(1), 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_examples() {
        let ctx = FieldCtx::new(4, FieldPolicy::PaperMin);
        assert_eq!((ctx.prime(), ctx.generator()), (5, 2));
        let ctx = FieldCtx::new(2, FieldPolicy::PaperMin);
        assert_eq!((ctx.prime(), ctx.generator()), (3, 2));
        let ctx = FieldCtx::new(10, FieldPolicy::Safe);
        assert_eq!(ctx.prime(), 29);
        assert_eq!(ctx.generator(), 2);
    }

    #[test]
    fn with_prime_validation() {
        assert!(FieldCtx::with_prime(4, 9).is_err());
        assert!(FieldCtx::with_prime(10, 7).is_err());
        assert!(FieldCtx::with_prime(4, 7).is_ok());
    }

    #[test]
    fn generator_has_full_order() {
        for n in [2usize, 5, 17, 100, 1000] {
            for policy in [FieldPolicy::PaperMin, FieldPolicy::Safe] {
                let ctx = FieldCtx::new(n, policy);
                let q = ctx.prime();
                let g = ctx.generator();
                // Direct order check via the factored-exponent test.
                for p in distinct_prime_factors(q - 1) {
                    assert_ne!(pow_mod(g, (q - 1) / p, q), 1, "q={q} g={g}");
                }
                assert_eq!(pow_mod(g, q - 1, q), 1);
            }
        }
    }

    #[test]
    fn tables_are_inverse_pairs() {
        let ctx = FieldCtx::new(12, FieldPolicy::Safe);
        for j in 0..=(2 * 12 + 2) as u64 {
            assert_eq!(ctx.mul(ctx.pow(j), ctx.inv_pow(j)), 1);
        }
    }

    #[test]
    fn geo_sum_examples() {
        let ctx = FieldCtx::with_prime(4, 5).unwrap();
        assert_eq!(ctx.generator(), 2);
        assert_eq!(ctx.geo_sum(0, 1), 1);
        assert_eq!(ctx.geo_sum(1, 2), 1); // 2 + 4 mod 5
        // Full multiplicative group sums to zero.
        for n in [4usize, 10, 30] {
            let ctx = FieldCtx::new(n, FieldPolicy::Safe);
            assert_eq!(ctx.geo_sum(0, ctx.prime() - 1), 0);
        }
    }

    #[test]
    fn geo_sum_matches_direct_sum() {
        let ctx = FieldCtx::new(20, FieldPolicy::Safe);
        for start in 0..30u64 {
            for len in 0..30u64 {
                let mut want = 0u64;
                for e in start..start + len {
                    want = ctx.add(want, ctx.pow(e));
                }
                assert_eq!(ctx.geo_sum(start, len), want);
                let mut want_inv = 0u64;
                for e in start..start + len {
                    want_inv = ctx.add(want_inv, ctx.inv_pow(e));
                }
                assert_eq!(ctx.geo_sum_inv(start, len), want_inv);
            }
        }
    }

    #[test]
    fn geo_sum_telescoping() {
        // (λ − 1)·geo(s, l) = λ^(s+l) − λ^s
        let ctx = FieldCtx::new(16, FieldPolicy::Safe);
        for s in 0..20u64 {
            for l in 0..20u64 {
                let lhs = ctx.mul(ctx.sub(ctx.generator(), 1), ctx.geo_sum(s, l));
                let rhs = ctx.sub(ctx.pow(s + l), ctx.pow(s));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
