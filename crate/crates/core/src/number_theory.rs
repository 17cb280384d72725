//! Arbitrary-precision modular arithmetic: factorization, totients,
//! primitive roots, CRT and discrete logarithms.
//!
//! Everything in here is a pure function of its inputs; values are plain
//! [`BigUint`]s and safe to share across threads.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumberTheoryError {
    #[error("input must be at least {min}, got {got}")]
    InputTooSmall { min: u64, got: BigUint },
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(BigUint, BigUint),
    #[error("moduli {0} and {1} are not coprime")]
    ModuliNotCoprime(BigUint, BigUint),
    #[error("no congruences given")]
    EmptyCongruences,
    #[error("the group of units of Z_{0} is not cyclic")]
    NotCyclic(BigUint),
    #[error("{target} is not a power of {base} modulo {modulus}")]
    NotInSubgroup {
        base: BigUint,
        target: BigUint,
        modulus: BigUint,
    },
}

pub type Result<T> = std::result::Result<T, NumberTheoryError>;

/// Prime factorization as strictly increasing (prime, exponent) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub pairs: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// The factored number, recomputed from the pairs.
    pub fn product(&self) -> BigUint {
        self.pairs
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.pairs.iter().map(|(p, _)| p)
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Deterministic Miller-Rabin, exact for inputs below 3.3 * 10^24
/// (covers everything past 2^64 that this crate is meant for).
pub fn is_prime(n: &BigUint) -> bool {
    if *n < big(2) {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = big(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    // n - 1 = d * 2^s with d odd
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = big(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard's rho with Brent's cycle detection; `n` must be composite,
/// odd and not a prime power of a tiny prime (callers strip those first).
fn pollard_rho(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = big(1);
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = big(2);
        let mut y = big(2);
        let mut d = one.clone();
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if d != one && d != *n {
            return d;
        }
        c += 1u32;
    }
}

fn factor_into(n: BigUint, out: &mut HashMap<BigUint, u32>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_rho(&n);
    let q = &n / &d;
    factor_into(d, out);
    factor_into(q, out);
}

/// Prime factorization of `n >= 2`: trial division over small primes,
/// then Pollard's rho on whatever survives.
pub fn factorize(n: &BigUint) -> Result<Factorization> {
    if *n < big(2) {
        return Err(NumberTheoryError::InputTooSmall {
            min: 2,
            got: n.clone(),
        });
    }
    let mut rest = n.clone();
    let mut map: HashMap<BigUint, u32> = HashMap::new();
    let mut d = 2u64;
    while d <= 1_000_000 {
        let bd = big(d);
        if &bd * &bd > rest {
            break;
        }
        while (&rest % &bd).is_zero() {
            rest /= &bd;
            *map.entry(bd.clone()).or_insert(0) += 1;
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    factor_into(rest, &mut map);
    let mut pairs: Vec<(BigUint, u32)> = map.into_iter().collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization { pairs })
}

/// Euler's totient, computed from the factorization; `euler_phi(1) = 1`.
pub fn euler_phi(n: &BigUint) -> Result<BigUint> {
    if n.is_zero() {
        return Err(NumberTheoryError::InputTooSmall {
            min: 1,
            got: n.clone(),
        });
    }
    if n.is_one() {
        return Ok(BigUint::one());
    }
    let mut phi = BigUint::one();
    for (p, e) in &factorize(n)?.pairs {
        phi *= p.pow(*e - 1) * (p - 1u32);
    }
    Ok(phi)
}

/// phi applied `k` times; `k = 0` returns `n` unchanged.
pub fn iterated_phi(n: &BigUint, k: u32) -> Result<BigUint> {
    let mut v = n.clone();
    for _ in 0..k {
        v = euler_phi(&v)?;
    }
    Ok(v)
}

/// `base^exp mod m` for `m >= 2`.
pub fn mod_pow(base: &BigUint, exp: &BigUint, m: &BigUint) -> Result<BigUint> {
    if *m < big(2) {
        return Err(NumberTheoryError::InputTooSmall {
            min: 2,
            got: m.clone(),
        });
    }
    Ok(base.modpow(exp, m))
}

/// Like [`mod_pow`] but tolerates a modulus of 1 (everything is 0 there).
/// The tower machinery hits degenerate levels where phi collapses to 1.
pub(crate) fn pow_mod_tolerant(base: &BigUint, exp: &BigUint, m: &BigUint) -> BigUint {
    if m.is_one() {
        BigUint::zero()
    } else {
        base.modpow(exp, m)
    }
}

/// Modular inverse by the extended Euclidean algorithm.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    if *m < big(2) {
        return Err(NumberTheoryError::InputTooSmall {
            min: 2,
            got: m.clone(),
        });
    }
    let a_int = BigInt::from(a % m);
    let m_int = BigInt::from(m.clone());
    let ext = a_int.extended_gcd(&m_int);
    if !ext.gcd.is_one() {
        return Err(NumberTheoryError::NotInvertible(a.clone(), m.clone()));
    }
    let x = ((ext.x % &m_int) + &m_int) % &m_int;
    Ok(x.to_biguint().expect("reduced residue is non-negative"))
}

/// Chinese remainder theorem for pairwise coprime moduli.
/// Returns the unique solution in `[0, product of moduli)`.
pub fn crt_solve(congruences: &[(BigUint, BigUint)]) -> Result<BigUint> {
    if congruences.is_empty() {
        return Err(NumberTheoryError::EmptyCongruences);
    }
    let (mut x, mut modulus) = {
        let (r, m) = &congruences[0];
        if *m < big(2) {
            return Err(NumberTheoryError::InputTooSmall {
                min: 2,
                got: m.clone(),
            });
        }
        (r % m, m.clone())
    };
    for (r, m) in &congruences[1..] {
        if *m < big(2) {
            return Err(NumberTheoryError::InputTooSmall {
                min: 2,
                got: m.clone(),
            });
        }
        if !modulus.gcd(m).is_one() {
            return Err(NumberTheoryError::ModuliNotCoprime(modulus, m.clone()));
        }
        // x + modulus * t = r (mod m)
        let target = ((r % m) + m - (&x % m)) % m;
        let t = (mod_inverse(&(&modulus % m), m)? * target) % m;
        x += &modulus * t;
        modulus *= m;
    }
    Ok(x)
}

/// Classification of the moduli whose group of units is cyclic:
/// 1, 2, 4, p^a and 2p^a for odd prime p.
pub fn is_cyclic_unit_group(n: &BigUint) -> bool {
    if n.is_zero() {
        return false;
    }
    if *n <= big(4) {
        return true; // 1, 2, 3, 4
    }
    let odd_part = if n.is_even() {
        let half: BigUint = n >> 1;
        if half.is_even() {
            return false;
        }
        half
    } else {
        n.clone()
    };
    match factorize(&odd_part) {
        Ok(f) => f.pairs.len() == 1 && f.pairs[0].0.is_odd(),
        Err(_) => false, // odd part is 1, i.e. n = 2
    }
}

/// Smallest generator of U(Z_n) for cyclic unit groups.
/// Returns 1 for n in {1, 2} where the group is trivial.
pub fn find_primitive_root(n: &BigUint) -> Result<BigUint> {
    if *n <= big(2) && !n.is_zero() {
        return Ok(BigUint::one());
    }
    if !is_cyclic_unit_group(n) {
        return Err(NumberTheoryError::NotCyclic(n.clone()));
    }
    let phi = euler_phi(n)?;
    let phi_primes: Vec<BigUint> = factorize(&phi)?.primes().cloned().collect();
    let mut g = big(2);
    while g < *n {
        if g.gcd(n).is_one() {
            let primitive = phi_primes
                .iter()
                .all(|q| !g.modpow(&(&phi / q), n).is_one());
            if primitive {
                return Ok(g);
            }
        }
        g += 1u32;
    }
    // Unreachable for a correct classification check.
    Err(NumberTheoryError::NotCyclic(n.clone()))
}

/// Multiplicative order of `a` modulo `n`; requires gcd(a, n) = 1.
pub fn multiplicative_order(a: &BigUint, n: &BigUint) -> Result<BigUint> {
    if !a.gcd(n).is_one() {
        return Err(NumberTheoryError::NotInvertible(a.clone(), n.clone()));
    }
    if n.is_one() {
        return Ok(BigUint::one());
    }
    let phi = euler_phi(n)?;
    if phi.is_one() {
        return Ok(BigUint::one());
    }
    let mut order = phi.clone();
    for (p, e) in &factorize(&phi)?.pairs {
        for _ in 0..*e {
            let candidate = &order / p;
            if a.modpow(&candidate, n).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Discrete-log strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlogMethod {
    BruteForce,
    Bsgs,
    PohligHellman,
}

impl std::str::FromStr for DlogMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "brute" | "brute-force" => Ok(Self::BruteForce),
            "bsgs" => Ok(Self::Bsgs),
            "pohlig-hellman" | "ph" => Ok(Self::PohligHellman),
            other => Err(format!("unknown discrete-log method '{other}'")),
        }
    }
}

/// `e` with `g^e = target (mod m)`, canonical in `[0, order)`.
/// `order` must be the multiplicative order of `g` modulo `m`.
pub fn discrete_log(
    g: &BigUint,
    target: &BigUint,
    m: &BigUint,
    order: &BigUint,
    method: DlogMethod,
) -> Result<BigUint> {
    if *m < big(2) {
        return Err(NumberTheoryError::InputTooSmall {
            min: 2,
            got: m.clone(),
        });
    }
    let target = target % m;
    match method {
        DlogMethod::BruteForce => dlog_brute(g, &target, m, order),
        DlogMethod::Bsgs => dlog_bsgs(g, &target, m, order),
        DlogMethod::PohligHellman => dlog_pohlig_hellman(g, &target, m, order),
    }
}

/// Dispatcher: brute force below order 2^16, Pohlig-Hellman above.
pub fn discrete_log_auto(
    g: &BigUint,
    target: &BigUint,
    m: &BigUint,
    order: &BigUint,
) -> Result<BigUint> {
    let method = if *order < big(1 << 16) {
        DlogMethod::BruteForce
    } else {
        DlogMethod::PohligHellman
    };
    discrete_log(g, target, m, order, method)
}

fn not_in_subgroup(g: &BigUint, target: &BigUint, m: &BigUint) -> NumberTheoryError {
    NumberTheoryError::NotInSubgroup {
        base: g.clone(),
        target: target.clone(),
        modulus: m.clone(),
    }
}

fn dlog_brute(g: &BigUint, target: &BigUint, m: &BigUint, order: &BigUint) -> Result<BigUint> {
    let mut acc = BigUint::one();
    let mut e = BigUint::zero();
    while e < *order {
        if acc == *target {
            return Ok(e);
        }
        acc = (acc * g) % m;
        e += 1u32;
    }
    Err(not_in_subgroup(g, target, m))
}

fn dlog_bsgs(g: &BigUint, target: &BigUint, m: &BigUint, order: &BigUint) -> Result<BigUint> {
    if order.is_one() {
        return if target.is_one() {
            Ok(BigUint::zero())
        } else {
            Err(not_in_subgroup(g, target, m))
        };
    }
    let step = order.sqrt() + 1u32;
    let step_u = step
        .to_u64()
        .expect("BSGS table size exceeds addressable memory");
    // baby steps: g^j for 0 <= j < step
    let mut table: HashMap<BigUint, u64> = HashMap::with_capacity(step_u as usize);
    let mut e = BigUint::one();
    for j in 0..step_u {
        table.entry(e.clone()).or_insert(j);
        e = (e * g) % m;
    }
    // giant steps: target * (g^-step)^i
    let giant = mod_inverse(g, m)?.modpow(&step, m);
    let mut gamma = target.clone();
    let mut i = BigUint::zero();
    while &i * &step <= *order {
        if let Some(&j) = table.get(&gamma) {
            let exp = (&i * &step + j) % order;
            return Ok(exp);
        }
        gamma = (gamma * &giant) % m;
        i += 1u32;
    }
    Err(not_in_subgroup(g, target, m))
}

fn dlog_pohlig_hellman(
    g: &BigUint,
    target: &BigUint,
    m: &BigUint,
    order: &BigUint,
) -> Result<BigUint> {
    if order.is_one() {
        return if target.is_one() {
            Ok(BigUint::zero())
        } else {
            Err(not_in_subgroup(g, target, m))
        };
    }
    let mut congruences = Vec::new();
    for (p, e) in &factorize(order)?.pairs {
        let pe = p.pow(*e);
        let cofactor = order / &pe;
        let g_sub = g.modpow(&cofactor, m);
        let h_sub = target.modpow(&cofactor, m);
        // digit-lift x mod p^e using the order-p subgroup
        let gamma = g.modpow(&(order / p), m);
        let g_sub_inv = mod_inverse(&g_sub, m)?;
        let mut x = BigUint::zero();
        for j in 0..*e {
            let shift = pe.clone() / p.pow(j + 1);
            let partial = (&h_sub * g_sub_inv.modpow(&x, m)) % m;
            let h_j = partial.modpow(&shift, m);
            let digit = dlog_bsgs(&gamma, &h_j, m, p)
                .map_err(|_| not_in_subgroup(g, target, m))?;
            x += digit * p.pow(j);
        }
        congruences.push((x, pe));
    }
    let x = crt_solve(&congruences)?;
    // Pohlig-Hellman presumes target is in <g>; a wrong assumption only
    // surfaces here, so verify the candidate.
    if g.modpow(&x, m) == *target {
        Ok(x % order)
    } else {
        Err(not_in_subgroup(g, target, m))
    }
}
