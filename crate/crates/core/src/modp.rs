//! Arithmetic in prime fields with word-sized moduli.

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least generator of the multiplicative group of `F_p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("prime field has a primitive root")
}

/// Primes `l` with `l ≡ 1 (mod e)` and `l > lower`, in increasing order.
pub fn primes_one_mod(e: u64, lower: u64) -> impl Iterator<Item = u64> {
    let start = lower / e + 1;
    (start..).map(move |t| t * e + 1).filter(|&l| is_prime(l))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_and_roots() {
        for p in [3u64, 7, 13, 97, 1009] {
            for a in 1..p.min(50) {
                assert_eq!(mul_mod(a, inv_mod(a, p).unwrap(), p), 1);
            }
            let g = primitive_root(p);
            let mut seen = std::collections::HashSet::new();
            for k in 0..p - 1 {
                seen.insert(pow_mod(g, k, p));
            }
            assert_eq!(seen.len() as u64, p - 1);
        }
        assert_eq!(inv_mod(4, 8), None);
    }

    #[test]
    fn admissible_primes_are_one_mod_e() {
        let ps: Vec<u64> = primes_one_mod(12, 20).take(3).collect();
        assert_eq!(ps, vec![37, 61, 73]);
    }
}
