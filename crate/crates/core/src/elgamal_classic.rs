//! Baseline ElGamal over Z_p*, used as the reference scheme.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::RngCore;
use thiserror::Error;

use crate::number_theory::{find_primitive_root, is_prime, NumberTheoryError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassicError {
    #[error("{0} is not a prime of at least 5")]
    NotPrime(BigUint),
    #[error("message {m} is outside the range [0, {p})")]
    MessageOutOfRange { m: BigUint, p: BigUint },
    #[error("ciphertext component out of range")]
    ComponentOutOfRange,
    #[error("forced exponent {0} is outside its valid range")]
    ForcedExponentOutOfRange(BigUint),
    #[error(transparent)]
    NumberTheory(#[from] NumberTheoryError),
}

pub type Result<T> = std::result::Result<T, ClassicError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicPublicKey {
    pub p: BigUint,
    pub alpha: BigUint,
    pub alpha_a: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicKeyPair {
    pub public: ClassicPublicKey,
    pub a: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicCiphertext {
    pub gamma: BigUint,
    pub delta: BigUint,
}

/// Key generation: alpha is the smallest primitive root mod p, the
/// private exponent is uniform in [1, p-2] unless forced.
pub fn classic_keygen<R: RngCore + ?Sized>(
    p: &BigUint,
    rng: &mut R,
    forced_a: Option<&BigUint>,
) -> Result<ClassicKeyPair> {
    if *p < BigUint::from(5u32) || !is_prime(p) {
        return Err(ClassicError::NotPrime(p.clone()));
    }
    let one = BigUint::one();
    let hi = p - 2u32; // inclusive
    let a = match forced_a {
        Some(a) => {
            if a.is_zero() || *a > hi {
                return Err(ClassicError::ForcedExponentOutOfRange(a.clone()));
            }
            a.clone()
        }
        None => rng.gen_biguint_range(&one, &(&hi + 1u32)),
    };
    let alpha = find_primitive_root(p)?;
    let alpha_a = alpha.modpow(&a, p);
    Ok(ClassicKeyPair {
        public: ClassicPublicKey {
            p: p.clone(),
            alpha,
            alpha_a,
        },
        a,
    })
}

/// gamma = alpha^k, delta = m * (alpha^a)^k mod p for fresh k.
/// m = 0 is accepted per the message range [0, p) but leaks itself
/// (delta = 0).
pub fn classic_encrypt<R: RngCore + ?Sized>(
    public: &ClassicPublicKey,
    m: &BigUint,
    rng: &mut R,
    forced_k: Option<&BigUint>,
) -> Result<ClassicCiphertext> {
    if *m >= public.p {
        return Err(ClassicError::MessageOutOfRange {
            m: m.clone(),
            p: public.p.clone(),
        });
    }
    let one = BigUint::one();
    let hi = &public.p - 2u32;
    let k = match forced_k {
        Some(k) => {
            if k.is_zero() || *k > hi {
                return Err(ClassicError::ForcedExponentOutOfRange(k.clone()));
            }
            k.clone()
        }
        None => rng.gen_biguint_range(&one, &(&hi + 1u32)),
    };
    let gamma = public.alpha.modpow(&k, &public.p);
    let delta = (m * public.alpha_a.modpow(&k, &public.p)) % &public.p;
    Ok(ClassicCiphertext { gamma, delta })
}

/// m = gamma^(p-1-a) * delta mod p.
pub fn classic_decrypt(keypair: &ClassicKeyPair, c: &ClassicCiphertext) -> Result<BigUint> {
    let p = &keypair.public.p;
    if c.gamma.is_zero() || c.gamma >= *p || c.delta >= *p {
        return Err(ClassicError::ComponentOutOfRange);
    }
    let exp = p - 1u32 - &keypair.a;
    let mask_inv = c.gamma.modpow(&exp, p);
    Ok((mask_inv * &c.delta) % p)
}
