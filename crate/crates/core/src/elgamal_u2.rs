//! ElGamal over the second group of units U^2(Z_n).
//!
//! Case 1: both U(Z_n) and U^2(Z_n) are cyclic; everything runs mod n.
//! Case 2: U^2 cyclic while U is not, for moduli of the shape n = 3p with
//! p an odd prime > 3; the arithmetic runs inside the prime component
//! mod p and the CRT supplies the U(Z_n) representative of the generator.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use thiserror::Error;

use crate::number_theory::{
    crt_solve, discrete_log_auto, euler_phi, factorize, find_primitive_root,
    pow_mod_tolerant, NumberTheoryError,
};
use crate::unit_groups::TowerLevel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum U2Error {
    #[error("unit group is not cyclic at level {0}")]
    TowerNotCyclic(TowerLevel),
    #[error("{0} is not of the case-2 shape 3p with p an odd prime > 3")]
    InvalidCase2Modulus(BigUint),
    #[error("message {0} is not an element of U^2")]
    MessageNotInU2(BigUint),
    #[error("ciphertext component out of range")]
    ComponentOutOfRange,
    #[error("forced exponent {0} is outside its valid range")]
    ForcedExponentOutOfRange(BigUint),
    #[error(transparent)]
    NumberTheory(#[from] NumberTheoryError),
}

pub type Result<T> = std::result::Result<T, U2Error>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum U2Case {
    Case1,
    Case2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct U2PublicKey {
    pub case: U2Case,
    pub n: BigUint,
    /// Case 2 only: the odd prime p with n = 3p.
    pub p: Option<BigUint>,
    pub theta1: BigUint,
    pub s: BigUint,
    pub f: BigUint,
    /// Case 2 only: the CRT representative theta of theta1^s in U(Z_n).
    pub theta: Option<BigUint>,
}

impl U2PublicKey {
    /// The modulus the exponent arithmetic lives in: n for case 1,
    /// p for case 2.
    pub fn working_modulus(&self) -> &BigUint {
        self.p.as_ref().unwrap_or(&self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct U2KeyPair {
    pub public: U2PublicKey,
    pub a: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct U2Ciphertext {
    pub q: BigUint,
    pub delta: BigUint,
}

fn require_cyclic(m: &BigUint, level: fn(BigUint) -> TowerLevel) -> Result<()> {
    if crate::number_theory::is_cyclic_unit_group(m) {
        Ok(())
    } else {
        Err(U2Error::TowerNotCyclic(level(m.clone())))
    }
}

/// Rejection-samples s in [0, phi(m)) with gcd(s, phi(m)) = 1 until s
/// generates U(Z_phi(m)), i.e. theta1^(s^(N/p_j)) never collapses back
/// to theta1 for any prime p_j of the group order N = phi^2(m).
fn sample_generator_exponent<R: RngCore + ?Sized>(
    phi: &BigUint,
    phi2: &BigUint,
    rng: &mut R,
) -> Result<BigUint> {
    if phi.is_one() {
        return Ok(BigUint::zero());
    }
    let primes: Vec<BigUint> = if phi2.is_one() {
        Vec::new()
    } else {
        factorize(phi2)?.primes().cloned().collect()
    };
    loop {
        let s = rng.gen_biguint_below(phi);
        if !s.gcd(phi).is_one() {
            continue;
        }
        let generates = primes
            .iter()
            .all(|q| !pow_mod_tolerant(&s, &(phi2 / q), phi).is_one());
        if generates {
            return Ok(s);
        }
    }
}

/// Case-1 setup: the generator theta1 of U(Z_n) and an exponent s with
/// theta1^s a generator of U^2(Z_n).
pub fn u2_find_generator_exponent<R: RngCore + ?Sized>(
    n: &BigUint,
    rng: &mut R,
) -> Result<(BigUint, BigUint)> {
    require_cyclic(n, TowerLevel::N)?;
    let phi = euler_phi(n)?;
    require_cyclic(&phi, TowerLevel::Phi1)?;
    let phi2 = euler_phi(&phi)?;
    let theta1 = find_primitive_root(n)?;
    let s = sample_generator_exponent(&phi, &phi2, rng)?;
    Ok((theta1, s))
}

fn sample_private_exponent<R: RngCore + ?Sized>(
    phi2: &BigUint,
    rng: &mut R,
    forced: Option<&BigUint>,
) -> Result<BigUint> {
    if let Some(a) = forced {
        if a.is_zero() || *a > *phi2 {
            return Err(U2Error::ForcedExponentOutOfRange(a.clone()));
        }
        return Ok(a.clone());
    }
    let two = BigUint::from(2u32);
    // [2, phi2 - 1] when the range is nonempty, else the degenerate
    // group forces [1, phi2]
    if *phi2 >= BigUint::from(4u32) {
        Ok(rng.gen_biguint_range(&two, phi2))
    } else {
        Ok(rng.gen_biguint_range(&BigUint::one(), &(phi2 + 1u32)))
    }
}

/// Key generation for either case. Case 2 validates the 3p modulus
/// shape and solves x = 2 (mod 3), x = theta1^s (mod p) by CRT.
pub fn u2_keygen<R: RngCore + ?Sized>(
    n: &BigUint,
    case: U2Case,
    rng: &mut R,
    forced_a: Option<&BigUint>,
) -> Result<U2KeyPair> {
    match case {
        U2Case::Case1 => {
            let (theta1, s) = u2_find_generator_exponent(n, rng)?;
            let phi = euler_phi(n)?;
            let phi2 = euler_phi(&phi)?;
            let a = sample_private_exponent(&phi2, rng, forced_a)?;
            let f = pow_mod_tolerant(&s, &a, &phi);
            Ok(U2KeyPair {
                public: U2PublicKey {
                    case,
                    n: n.clone(),
                    p: None,
                    theta1,
                    s,
                    f,
                    theta: None,
                },
                a,
            })
        }
        U2Case::Case2 => {
            let three = BigUint::from(3u32);
            let pairs = factorize(n)?.pairs;
            let valid_shape = pairs.len() == 2
                && pairs[0] == (three.clone(), 1)
                && pairs[1].1 == 1
                && pairs[1].0 > three;
            if !valid_shape {
                return Err(U2Error::InvalidCase2Modulus(n.clone()));
            }
            let p = pairs[1].0.clone();
            let phi = euler_phi(&p)?;
            require_cyclic(&phi, TowerLevel::Phi1)?;
            let phi2 = euler_phi(&phi)?;
            let theta1 = find_primitive_root(&p)?;
            let s = sample_generator_exponent(&phi, &phi2, rng)?;
            let theta_p = pow_mod_tolerant(&theta1, &s, &p);
            let theta = crt_solve(&[(BigUint::from(2u32), three), (theta_p, p.clone())])?;
            let a = sample_private_exponent(&phi2, rng, forced_a)?;
            let f = pow_mod_tolerant(&s, &a, &phi);
            Ok(U2KeyPair {
                public: U2PublicKey {
                    case,
                    n: n.clone(),
                    p: Some(p),
                    theta1,
                    s,
                    f,
                    theta: Some(theta),
                },
                a,
            })
        }
    }
}

/// Membership test with the witness exponent: m = theta1^i with
/// gcd(i, phi) = 1.
fn u2_membership(public: &U2PublicKey, m: &BigUint) -> Result<BigUint> {
    let modulus = public.working_modulus();
    let m = m % modulus;
    if !m.gcd(modulus).is_one() {
        return Err(U2Error::MessageNotInU2(m));
    }
    let phi = euler_phi(modulus)?;
    let i = discrete_log_auto(&public.theta1, &m, modulus, &phi)
        .map_err(|_| U2Error::MessageNotInU2(m.clone()))?;
    if !i.gcd(&phi).is_one() {
        return Err(U2Error::MessageNotInU2(m));
    }
    Ok(i)
}

/// q = s^k mod phi, delta = m^(f^k mod phi) mod modulus, fresh k.
pub fn u2_encrypt<R: RngCore + ?Sized>(
    public: &U2PublicKey,
    m: &BigUint,
    rng: &mut R,
    forced_k: Option<&BigUint>,
) -> Result<U2Ciphertext> {
    u2_membership(public, m)?;
    let modulus = public.working_modulus();
    let phi = euler_phi(modulus)?;
    let phi2 = euler_phi(&phi)?;
    let k = sample_private_exponent(&phi2, rng, forced_k)?;
    let q = pow_mod_tolerant(&public.s, &k, &phi);
    let r = pow_mod_tolerant(&public.f, &k, &phi);
    if cfg!(debug_assertions) {
        // gamma = theta1^q never leaves this function; the wire format
        // is (q, delta) only.
        let _gamma = pow_mod_tolerant(&public.theta1, &q, modulus);
    }
    let delta = (m % modulus).modpow(&r, modulus);
    Ok(U2Ciphertext { q, delta })
}

/// t = q^(phi^2 - a) mod phi; m = delta^t mod modulus.
pub fn u2_decrypt(keypair: &U2KeyPair, c: &U2Ciphertext) -> Result<BigUint> {
    let public = &keypair.public;
    let modulus = public.working_modulus();
    let phi = euler_phi(modulus)?;
    let phi2 = euler_phi(&phi)?;
    if (!phi.is_one() && (c.q >= phi || !c.q.gcd(&phi).is_one()))
        || c.delta.is_zero()
        || c.delta >= *modulus
    {
        return Err(U2Error::ComponentOutOfRange);
    }
    let b = &phi2 - &keypair.a % &phi2;
    let b = if b == phi2 { BigUint::zero() } else { b };
    let t = pow_mod_tolerant(&c.q, &b, &phi);
    Ok(c.delta.modpow(&t, modulus))
}
