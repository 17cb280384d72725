//! ElGamal over the third group of units U^3(Z_n).
//!
//! Keys, ciphertexts and messages all live in (U^3(Z_n), otimes), the
//! group carried over from Z_{phi^3(n)} through the tower isomorphism.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::RngCore;
use thiserror::Error;

use crate::unit_groups::{GroupElement, UnitGroupError, UnitGroupTower};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum U3Error {
    #[error("U^3(Z_{0}) is the trivial group; nothing can be encrypted")]
    DegenerateGroup(BigUint),
    #[error("message is not an element of U^3(Z_n)")]
    MessageNotInU3,
    #[error("ciphertext component is not an element of U^3(Z_n)")]
    ComponentNotInU3,
    #[error("residue {value} is out of range [0, {bound})")]
    OutOfRange { value: BigUint, bound: BigUint },
    #[error("forced exponent {0} is outside [1, phi^3(n)]")]
    ForcedExponentOutOfRange(BigUint),
    #[error(transparent)]
    Group(#[from] UnitGroupError),
}

pub type Result<T> = std::result::Result<T, U3Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct U3PublicKey {
    pub g: GroupElement,
    pub big_b: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct U3KeyPair {
    pub tower: UnitGroupTower,
    pub public: U3PublicKey,
    pub b: BigUint,
}

impl U3KeyPair {
    /// b = phi^3(n) makes B the identity; the key still decrypts but
    /// the mask s is always trivial.
    pub fn is_weak(&self) -> bool {
        self.b == *self.tower.phi3()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct U3Ciphertext {
    pub a: GroupElement,
    pub x: GroupElement,
}

fn sample_exponent<R: RngCore + ?Sized>(
    phi3: &BigUint,
    rng: &mut R,
    forced: Option<&BigUint>,
) -> Result<BigUint> {
    match forced {
        Some(e) => {
            if e.is_zero() || *e > *phi3 {
                Err(U3Error::ForcedExponentOutOfRange(e.clone()))
            } else {
                Ok(e.clone())
            }
        }
        None => Ok(rng.gen_biguint_range(&BigUint::one(), &(phi3 + 1u32))),
    }
}

/// b uniform in [1, phi^3(n)], B = g^b under the otimes power.
pub fn u3_keygen<R: RngCore + ?Sized>(
    tower: &UnitGroupTower,
    rng: &mut R,
    forced_b: Option<&BigUint>,
) -> Result<U3KeyPair> {
    let phi3 = tower.phi3();
    if *phi3 < BigUint::from(2u32) {
        return Err(U3Error::DegenerateGroup(tower.n().clone()));
    }
    let b = sample_exponent(phi3, rng, forced_b)?;
    let g = tower.u3_generator();
    let big_b = tower.op_pow(&g, &b);
    Ok(U3KeyPair {
        tower: tower.clone(),
        public: U3PublicKey { g, big_b },
        b,
    })
}

/// A = g^a, X = m (x) B^a for fresh a in [1, phi^3(n)].
pub fn u3_encrypt<R: RngCore + ?Sized>(
    public: &U3PublicKey,
    tower: &UnitGroupTower,
    m: &GroupElement,
    rng: &mut R,
    forced_a: Option<&BigUint>,
) -> Result<U3Ciphertext> {
    if tower.iso_f(m.value()).is_err() {
        return Err(U3Error::MessageNotInU3);
    }
    let a = sample_exponent(tower.phi3(), rng, forced_a)?;
    let s = tower.op_pow(&public.big_b, &a);
    let big_a = tower.op_pow(&public.g, &a);
    let x = tower.op_otimes(m, &s);
    Ok(U3Ciphertext { a: big_a, x })
}

/// s = A^b; m = X (x) s^-1.
pub fn u3_decrypt(keypair: &U3KeyPair, c: &U3Ciphertext) -> Result<GroupElement> {
    let tower = &keypair.tower;
    if tower.iso_f(c.a.value()).is_err() || tower.iso_f(c.x.value()).is_err() {
        return Err(U3Error::ComponentNotInU3);
    }
    let s = tower.op_pow(&c.a, &keypair.b);
    Ok(tower.op_otimes(&c.x, &tower.op_inverse(&s)))
}

/// Message encoding: the residue t in [0, phi^3(n)) names the element
/// iso_f_inv(t).
pub fn u3_encode_message(tower: &UnitGroupTower, t: &BigUint) -> Result<GroupElement> {
    match tower.iso_f_inv(t) {
        Ok(v) => Ok(tower.element(v)?),
        Err(UnitGroupError::OutOfRange { value, bound }) => {
            Err(U3Error::OutOfRange { value, bound })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn u3_decode_message(tower: &UnitGroupTower, m: &GroupElement) -> Result<BigUint> {
    Ok(tower.iso_f(m.value())?)
}

/// Byte strings ride as base-phi^3(n) digit blocks. A leading 0x01
/// sentinel keeps leading zero bytes intact across the round trip.
pub fn u3_encode_bytes(tower: &UnitGroupTower, bytes: &[u8]) -> Result<Vec<GroupElement>> {
    let base = tower.phi3();
    if *base < BigUint::from(2u32) {
        return Err(U3Error::DegenerateGroup(tower.n().clone()));
    }
    let mut buf = Vec::with_capacity(bytes.len() + 1);
    buf.push(1u8);
    buf.extend_from_slice(bytes);
    let mut value = BigUint::from_bytes_be(&buf);
    let mut blocks = Vec::new();
    while !value.is_zero() {
        let digit = &value % base;
        value /= base;
        blocks.push(u3_encode_message(tower, &digit)?);
    }
    Ok(blocks)
}

pub fn u3_decode_bytes(tower: &UnitGroupTower, blocks: &[GroupElement]) -> Result<Vec<u8>> {
    let base = tower.phi3();
    let mut value = BigUint::zero();
    for block in blocks.iter().rev() {
        value = value * base + u3_decode_message(tower, block)?;
    }
    let bytes = value.to_bytes_be();
    if bytes.first() != Some(&1u8) {
        return Err(U3Error::MessageNotInU3);
    }
    Ok(bytes[1..].to_vec())
}

/// Encrypts each block with a fresh nonce; reusing one nonce across
/// blocks would expose the otimes-differences of the plaintext.
pub fn u3_encrypt_bytes<R: RngCore + ?Sized>(
    public: &U3PublicKey,
    tower: &UnitGroupTower,
    bytes: &[u8],
    rng: &mut R,
) -> Result<Vec<U3Ciphertext>> {
    u3_encode_bytes(tower, bytes)?
        .iter()
        .map(|block| u3_encrypt(public, tower, block, rng, None))
        .collect()
}

pub fn u3_decrypt_bytes(keypair: &U3KeyPair, blocks: &[U3Ciphertext]) -> Result<Vec<u8>> {
    let decrypted: Vec<GroupElement> = blocks
        .iter()
        .map(|c| u3_decrypt(keypair, c))
        .collect::<Result<_>>()?;
    u3_decode_bytes(&keypair.tower, &decrypted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unit_groups::enumerate_u_k;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn tower81() -> UnitGroupTower {
        UnitGroupTower::build(&n(81)).unwrap()
    }

    #[test]
    fn keygen_known_values() {
        let t = tower81();
        let mut rng = ChaCha20Rng::seed_from_u64(20);
        let kp = u3_keygen(&t, &mut rng, Some(&n(4))).unwrap();
        assert_eq!(kp.public.g.value(), &n(50));
        assert_eq!(kp.public.big_b.value(), &n(5));
        assert!(!kp.is_weak());
        let kp1 = u3_keygen(&t, &mut rng, Some(&n(1))).unwrap();
        assert_eq!(kp1.public.big_b, kp1.public.g);
        let kp_weak = u3_keygen(&t, &mut rng, Some(&n(6))).unwrap();
        assert!(kp_weak.is_weak());
    }

    #[test]
    fn keygen_rejects_degenerate_group() {
        let t = UnitGroupTower::build(&n(5)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        assert!(matches!(
            u3_keygen(&t, &mut rng, None),
            Err(U3Error::DegenerateGroup(_))
        ));
    }

    #[test]
    fn worked_example_n81() {
        let t = tower81();
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        let kp = u3_keygen(&t, &mut rng, Some(&n(4))).unwrap();
        let m = t.element(n(77)).unwrap();
        let c = u3_encrypt(&kp.public, &t, &m, &mut rng, Some(&n(2))).unwrap();
        assert_eq!(c.a.value(), &n(59));
        assert_eq!(c.x.value(), &n(50));
        assert_eq!(u3_decrypt(&kp, &c).unwrap().value(), &n(77));
    }

    #[test]
    fn identity_message_exposes_mask() {
        let t = tower81();
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        let kp = u3_keygen(&t, &mut rng, Some(&n(4))).unwrap();
        let id = t.identity();
        let c = u3_encrypt(&kp.public, &t, &id, &mut rng, Some(&n(2))).unwrap();
        // X = identity (x) s = s
        let s = t.op_pow(&kp.public.big_b, &n(2));
        assert_eq!(c.x, s);
        assert_eq!(u3_decrypt(&kp, &c).unwrap(), id);
    }

    #[test]
    fn exhaustive_round_trip_n81() {
        let t = tower81();
        let mut rng = ChaCha20Rng::seed_from_u64(24);
        let kp = u3_keygen(&t, &mut rng, None).unwrap();
        for m in enumerate_u_k(&n(81), 3).unwrap() {
            let elem = t.element(m.clone()).unwrap();
            let c = u3_encrypt(&kp.public, &t, &elem, &mut rng, None).unwrap();
            assert_eq!(u3_decrypt(&kp, &c).unwrap().into_value(), m);
        }
    }

    #[test]
    fn encode_decode_known_values() {
        let t = tower81();
        assert_eq!(u3_encode_message(&t, &n(5)).unwrap().value(), &n(77));
        assert_eq!(u3_encode_message(&t, &n(0)).unwrap().value(), &n(32));
        assert!(matches!(
            u3_encode_message(&t, &n(6)),
            Err(U3Error::OutOfRange { .. })
        ));
        for tval in 0..6u64 {
            let m = u3_encode_message(&t, &n(tval)).unwrap();
            assert_eq!(u3_decode_message(&t, &m).unwrap(), n(tval));
        }
    }

    #[test]
    fn byte_round_trip() {
        let t = tower81();
        let mut rng = ChaCha20Rng::seed_from_u64(25);
        let kp = u3_keygen(&t, &mut rng, None).unwrap();
        for msg in [&b""[..], b"\x00", b"\x00\x01hello", b"unit groups"] {
            let blocks = u3_encrypt_bytes(&kp.public, &t, msg, &mut rng).unwrap();
            assert_eq!(u3_decrypt_bytes(&kp, &blocks).unwrap(), msg);
        }
    }

    #[test]
    fn homomorphic_under_shared_randomness() {
        let t = tower81();
        let mut rng = ChaCha20Rng::seed_from_u64(26);
        let kp = u3_keygen(&t, &mut rng, Some(&n(3))).unwrap();
        let all: Vec<BigUint> = enumerate_u_k(&n(81), 3).unwrap().into_iter().collect();
        for m1 in &all {
            for m2 in &all {
                let e1 = t.element(m1.clone()).unwrap();
                let e2 = t.element(m2.clone()).unwrap();
                let c1 = u3_encrypt(&kp.public, &t, &e1, &mut rng, Some(&n(2))).unwrap();
                let c2 = u3_encrypt(&kp.public, &t, &e2, &mut rng, Some(&n(2))).unwrap();
                let combined = U3Ciphertext {
                    a: t.op_otimes(&c1.a, &c2.a),
                    x: t.op_otimes(&c1.x, &c2.x),
                };
                // shared nonce a means the combined ciphertext is an
                // encryption of m1 (x) m2 under nonce 2a
                let got = u3_decrypt(&kp, &combined).unwrap();
                assert_eq!(got, t.op_otimes(&e1, &e2));
            }
        }
    }
}
