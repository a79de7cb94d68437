//! Integer helpers: square roots, valuations and factorization of the
//! moderately sized integers that show up in gcds and radicands.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// p-adic valuation of a nonzero integer. Returns `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn pow_mod(base: &BigUint, exp: &BigUint, m: &BigUint) -> BigUint {
    base.modpow(exp, m)
}

/// Miller-Rabin with the first twelve prime bases; deterministic below 3.3e24.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let bp = BigUint::from(p);
        if *n == bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(&BigUint::from(a), &d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant of Pollard rho; returns a nontrivial factor of composite n.
fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let m = 128u32;
        let mut g = BigUint::one();
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min((r - k) as u32) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m as u64;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1u32;
    }
}

/// Prime factorization `(prime, exponent)` sorted by prime.
pub fn factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut m = n.clone();
    let mut p = 2u64;
    while p < 1000 {
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![];
    if !m.is_one() {
        stack.push(m);
    }
    while let Some(x) = stack.pop() {
        if x.is_one() {
            continue;
        }
        if is_probable_prime(&x) {
            match out.iter_mut().find(|(q, _)| *q == x) {
                Some(entry) => entry.1 += 1,
                None => out.push((x, 1)),
            }
            continue;
        }
        let r = x.sqrt();
        if &r * &r == x {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let f = pollard_brent(&x);
        let g = &x / &f;
        stack.push(f);
        stack.push(g);
    }
    out.sort();
    out
}

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factor(&BigUint::from(n))
        .into_iter()
        .map(|(p, e)| (p.to_u64().expect("factor of u64 fits"), e))
        .collect()
}

pub fn prime_divisors_u64(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

/// Largest `t > 0` with `t | g` and `t^2 | d` (both nonzero).
pub fn largest_root_divisor(g: &BigInt, d: &BigInt) -> BigInt {
    let g = g.abs();
    let d = d.abs();
    let c = g.gcd(&d);
    if c.is_one() || c.is_zero() {
        return BigInt::one();
    }
    let mut t = BigInt::one();
    let (_, cu) = c.into_parts();
    for (p, _) in factor(&cu) {
        let p = BigInt::from_biguint(Sign::Plus, p);
        let vp = |x: &BigInt| {
            let mut x = x.clone();
            let mut v = 0u32;
            while (&x % &p).is_zero() {
                x /= &p;
                v += 1;
            }
            v
        };
        let e = vp(&g).min(vp(&d) / 2);
        t *= num_traits::pow(p.clone(), e as usize);
    }
    t
}

/// Write `n = s^2 * f` with `f` square-free; returns `(s, f)`.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    let sign = if n.is_negative() { -1 } else { 1 };
    let (_, nu) = n.clone().into_parts();
    let mut s = BigUint::one();
    let mut f = BigUint::one();
    for (p, e) in factor(&nu) {
        s *= num_traits::pow(p.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            f *= p;
        }
    }
    (
        BigInt::from_biguint(Sign::Plus, s),
        BigInt::from_biguint(Sign::Plus, f) * sign,
    )
}

pub fn is_squarefree(n: &BigInt) -> bool {
    let (s, _) = squarefree_decompose(n);
    s.is_one()
}

/// Dedekind psi: `h * prod_{p | h} (1 + 1/p)`, the number of cyclic
/// sublattices of index `h` in `Z^2`.
pub fn dedekind_psi(h: u64) -> u64 {
    let mut out = h;
    for p in prime_divisors_u64(h) {
        out = out / p * (p + 1);
    }
    out
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Floor of `ln |n|` for big integers, accurate to f64 precision.
pub fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(|x| x.abs().ln()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
