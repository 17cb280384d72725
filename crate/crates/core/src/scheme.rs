//! Runtime registry of the encryption schemes. Every scheme sits behind
//! the same trait: keys travel as [`KeyFile`]s, messages as integers in
//! the scheme's canonical encoding, ciphertexts as a pair of decimals.
//!
//! Message encodings: `classic` carries the integer itself in [0, p);
//! `u2-case1`/`u2-case2` carry the index into the sorted enumeration of
//! U^2; `u3` carries the residue t in [0, phi^3(n)) naming iso_f_inv(t).

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

use crate::elgamal_classic::{
    classic_decrypt, classic_encrypt, classic_keygen, ClassicCiphertext, ClassicError,
    ClassicKeyPair, ClassicPublicKey,
};
use crate::elgamal_u2::{
    u2_decrypt, u2_encrypt, u2_keygen, U2Case, U2Ciphertext, U2Error, U2KeyPair, U2PublicKey,
};
use crate::elgamal_u3::{
    u3_decrypt, u3_encrypt, u3_keygen, U3Ciphertext, U3Error, U3PublicKey,
};
use crate::keyfile::{KeyFile, KeyFileError};
use crate::unit_groups::{enumerate_u_k, UnitGroupError, UnitGroupTower};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed key file: {0}")]
    MalformedKeyFile(String),
    #[error("message out of range: {0}")]
    MessageOutOfRange(String),
}

impl SchemeError {
    /// Stable CLI exit code: 2 invalid parameters, 3 malformed files,
    /// 4 message out of range.
    pub fn exit_code(&self) -> i32 {
        match self {
            SchemeError::UnknownScheme(_) | SchemeError::InvalidParams(_) => 2,
            SchemeError::MalformedKeyFile(_) => 3,
            SchemeError::MessageOutOfRange(_) => 4,
        }
    }
}

impl From<KeyFileError> for SchemeError {
    fn from(e: KeyFileError) -> Self {
        SchemeError::MalformedKeyFile(e.to_string())
    }
}

impl From<ClassicError> for SchemeError {
    fn from(e: ClassicError) -> Self {
        match e {
            ClassicError::MessageOutOfRange { .. } => SchemeError::MessageOutOfRange(e.to_string()),
            other => SchemeError::InvalidParams(other.to_string()),
        }
    }
}

impl From<U2Error> for SchemeError {
    fn from(e: U2Error) -> Self {
        match e {
            U2Error::MessageNotInU2(_) => SchemeError::MessageOutOfRange(e.to_string()),
            other => SchemeError::InvalidParams(other.to_string()),
        }
    }
}

impl From<U3Error> for SchemeError {
    fn from(e: U3Error) -> Self {
        match e {
            U3Error::MessageNotInU3 | U3Error::OutOfRange { .. } => {
                SchemeError::MessageOutOfRange(e.to_string())
            }
            other => SchemeError::InvalidParams(other.to_string()),
        }
    }
}

impl From<UnitGroupError> for SchemeError {
    fn from(e: UnitGroupError) -> Self {
        SchemeError::InvalidParams(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SchemeError>;

#[derive(Debug, Clone)]
pub struct KeyPairFiles {
    pub public: KeyFile,
    pub private: KeyFile,
    /// True when the drawn private exponent collapses the public
    /// element to the identity.
    pub weak_key: bool,
}

/// One interchangeable encryption scheme, selected by name at runtime.
pub trait Scheme: Sync {
    fn name(&self) -> &'static str;

    fn keygen(
        &self,
        n: &BigUint,
        rng: &mut dyn RngCore,
        forced_private: Option<&BigUint>,
    ) -> Result<KeyPairFiles>;

    fn encrypt(
        &self,
        key: &KeyFile,
        message: &BigUint,
        rng: &mut dyn RngCore,
        forced_nonce: Option<&BigUint>,
    ) -> Result<(BigUint, BigUint)>;

    fn decrypt(&self, key: &KeyFile, ciphertext: (&BigUint, &BigUint)) -> Result<BigUint>;
}

static SCHEMES: [&dyn Scheme; 4] = [&ClassicScheme, &U2Case1Scheme, &U2Case2Scheme, &U3Scheme];

pub fn registry() -> &'static [&'static dyn Scheme] {
    &SCHEMES
}

pub fn lookup(name: &str) -> Result<&'static dyn Scheme> {
    registry()
        .iter()
        .find(|s| s.name() == name)
        .copied()
        .ok_or_else(|| SchemeError::UnknownScheme(name.to_string()))
}

fn check_scheme_field(key: &KeyFile, expected: &str) -> Result<()> {
    let scheme = key.scheme()?;
    if scheme != expected {
        return Err(SchemeError::MalformedKeyFile(format!(
            "key file is for scheme '{scheme}', expected '{expected}'"
        )));
    }
    Ok(())
}

fn require_private(key: &KeyFile) -> Result<()> {
    if key.visibility()? != "private" {
        return Err(SchemeError::MalformedKeyFile(
            "decryption needs a private key file".into(),
        ));
    }
    Ok(())
}

// ---- classic ----

pub struct ClassicScheme;

impl ClassicScheme {
    fn public_from(key: &KeyFile) -> Result<ClassicPublicKey> {
        Ok(ClassicPublicKey {
            p: key.get_nat("p")?,
            alpha: key.get_nat("alpha")?,
            alpha_a: key.get_nat("alpha_a")?,
        })
    }
}

impl Scheme for ClassicScheme {
    fn name(&self) -> &'static str {
        "classic"
    }

    fn keygen(
        &self,
        n: &BigUint,
        rng: &mut dyn RngCore,
        forced_private: Option<&BigUint>,
    ) -> Result<KeyPairFiles> {
        let kp = classic_keygen(n, rng, forced_private)?;
        let mut public = KeyFile::new();
        public.push("scheme", self.name());
        public.push("visibility", "public");
        public.push("p", &kp.public.p);
        public.push("alpha", &kp.public.alpha);
        public.push("alpha_a", &kp.public.alpha_a);
        let mut private = KeyFile::new();
        private.push("scheme", self.name());
        private.push("visibility", "private");
        private.push("p", &kp.public.p);
        private.push("alpha", &kp.public.alpha);
        private.push("alpha_a", &kp.public.alpha_a);
        private.push("a", &kp.a);
        Ok(KeyPairFiles {
            public,
            private,
            weak_key: false,
        })
    }

    fn encrypt(
        &self,
        key: &KeyFile,
        message: &BigUint,
        rng: &mut dyn RngCore,
        forced_nonce: Option<&BigUint>,
    ) -> Result<(BigUint, BigUint)> {
        check_scheme_field(key, self.name())?;
        let public = Self::public_from(key)?;
        let c = classic_encrypt(&public, message, rng, forced_nonce)?;
        Ok((c.gamma, c.delta))
    }

    fn decrypt(&self, key: &KeyFile, ciphertext: (&BigUint, &BigUint)) -> Result<BigUint> {
        check_scheme_field(key, self.name())?;
        require_private(key)?;
        let kp = ClassicKeyPair {
            public: Self::public_from(key)?,
            a: key.get_nat("a")?,
        };
        let c = ClassicCiphertext {
            gamma: ciphertext.0.clone(),
            delta: ciphertext.1.clone(),
        };
        Ok(classic_decrypt(&kp, &c)?)
    }
}

// ---- u2, both cases ----

fn u2_public_from(key: &KeyFile, case: U2Case) -> Result<U2PublicKey> {
    let (p, theta) = match case {
        U2Case::Case1 => (None, None),
        U2Case::Case2 => (Some(key.get_nat("p")?), Some(key.get_nat("theta")?)),
    };
    Ok(U2PublicKey {
        case,
        n: key.get_nat("n")?,
        p,
        theta1: key.get_nat("theta1")?,
        s: key.get_nat("s")?,
        f: key.get_nat("f")?,
        theta,
    })
}

fn u2_files(name: &str, kp: &U2KeyPair) -> KeyPairFiles {
    let mut public = KeyFile::new();
    public.push("scheme", name);
    public.push("visibility", "public");
    public.push("n", &kp.public.n);
    if let Some(p) = &kp.public.p {
        public.push("p", p);
    }
    public.push("theta1", &kp.public.theta1);
    public.push("s", &kp.public.s);
    public.push("f", &kp.public.f);
    if let Some(theta) = &kp.public.theta {
        public.push("theta", theta);
    }
    let mut private = KeyFile::new();
    private.push("scheme", name);
    private.push("visibility", "private");
    private.push("n", &kp.public.n);
    if let Some(p) = &kp.public.p {
        private.push("p", p);
    }
    private.push("theta1", &kp.public.theta1);
    private.push("s", &kp.public.s);
    private.push("f", &kp.public.f);
    if let Some(theta) = &kp.public.theta {
        private.push("theta", theta);
    }
    private.push("a", &kp.a);
    KeyPairFiles {
        public,
        private,
        weak_key: false,
    }
}

/// Sorted enumeration of the U^2 message space for the index encoding.
fn u2_message_space(public: &U2PublicKey) -> Result<Vec<BigUint>> {
    let modulus = public.working_modulus();
    Ok(enumerate_u_k(modulus, 2)?.into_iter().collect())
}

fn u2_encrypt_indexed(
    name: &str,
    case: U2Case,
    key: &KeyFile,
    message: &BigUint,
    rng: &mut dyn RngCore,
    forced_nonce: Option<&BigUint>,
) -> Result<(BigUint, BigUint)> {
    check_scheme_field(key, name)?;
    let public = u2_public_from(key, case)?;
    let space = u2_message_space(&public)?;
    let idx = message
        .try_into()
        .ok()
        .filter(|i: &usize| *i < space.len())
        .ok_or_else(|| {
            SchemeError::MessageOutOfRange(format!(
                "index {message} exceeds the {} elements of U^2",
                space.len()
            ))
        })?;
    let c = u2_encrypt(&public, &space[idx], rng, forced_nonce)?;
    Ok((c.q, c.delta))
}

fn u2_decrypt_indexed(
    name: &str,
    case: U2Case,
    key: &KeyFile,
    ciphertext: (&BigUint, &BigUint),
) -> Result<BigUint> {
    check_scheme_field(key, name)?;
    require_private(key)?;
    let public = u2_public_from(key, case)?;
    let kp = U2KeyPair {
        public,
        a: key.get_nat("a")?,
    };
    let c = U2Ciphertext {
        q: ciphertext.0.clone(),
        delta: ciphertext.1.clone(),
    };
    let m = u2_decrypt(&kp, &c)?;
    let space = u2_message_space(&kp.public)?;
    match space.binary_search(&m) {
        Ok(idx) => Ok(BigUint::from(idx)),
        Err(_) => Err(SchemeError::InvalidParams(format!(
            "decrypted value {m} is not in U^2; ciphertext does not match this key"
        ))),
    }
}

pub struct U2Case1Scheme;

impl Scheme for U2Case1Scheme {
    fn name(&self) -> &'static str {
        "u2-case1"
    }

    fn keygen(
        &self,
        n: &BigUint,
        rng: &mut dyn RngCore,
        forced_private: Option<&BigUint>,
    ) -> Result<KeyPairFiles> {
        let kp = u2_keygen(n, U2Case::Case1, rng, forced_private)?;
        Ok(u2_files(self.name(), &kp))
    }

    fn encrypt(
        &self,
        key: &KeyFile,
        message: &BigUint,
        rng: &mut dyn RngCore,
        forced_nonce: Option<&BigUint>,
    ) -> Result<(BigUint, BigUint)> {
        u2_encrypt_indexed(self.name(), U2Case::Case1, key, message, rng, forced_nonce)
    }

    fn decrypt(&self, key: &KeyFile, ciphertext: (&BigUint, &BigUint)) -> Result<BigUint> {
        u2_decrypt_indexed(self.name(), U2Case::Case1, key, ciphertext)
    }
}

pub struct U2Case2Scheme;

impl Scheme for U2Case2Scheme {
    fn name(&self) -> &'static str {
        "u2-case2"
    }

    fn keygen(
        &self,
        n: &BigUint,
        rng: &mut dyn RngCore,
        forced_private: Option<&BigUint>,
    ) -> Result<KeyPairFiles> {
        let kp = u2_keygen(n, U2Case::Case2, rng, forced_private)?;
        Ok(u2_files(self.name(), &kp))
    }

    fn encrypt(
        &self,
        key: &KeyFile,
        message: &BigUint,
        rng: &mut dyn RngCore,
        forced_nonce: Option<&BigUint>,
    ) -> Result<(BigUint, BigUint)> {
        u2_encrypt_indexed(self.name(), U2Case::Case2, key, message, rng, forced_nonce)
    }

    fn decrypt(&self, key: &KeyFile, ciphertext: (&BigUint, &BigUint)) -> Result<BigUint> {
        u2_decrypt_indexed(self.name(), U2Case::Case2, key, ciphertext)
    }
}

// ---- u3 ----

pub struct U3Scheme;

impl U3Scheme {
    fn tower_from(key: &KeyFile) -> Result<UnitGroupTower> {
        Ok(UnitGroupTower::build(&key.get_nat("n")?)?)
    }
}

impl Scheme for U3Scheme {
    fn name(&self) -> &'static str {
        "u3"
    }

    fn keygen(
        &self,
        n: &BigUint,
        rng: &mut dyn RngCore,
        forced_private: Option<&BigUint>,
    ) -> Result<KeyPairFiles> {
        let tower = UnitGroupTower::build(n)?;
        let kp = u3_keygen(&tower, rng, forced_private)?;
        let mut public = KeyFile::new();
        public.push("scheme", self.name());
        public.push("visibility", "public");
        public.push("n", n);
        public.push("g", kp.public.g.value());
        public.push("B", kp.public.big_b.value());
        let mut private = KeyFile::new();
        private.push("scheme", self.name());
        private.push("visibility", "private");
        private.push("n", n);
        private.push("g", kp.public.g.value());
        private.push("B", kp.public.big_b.value());
        private.push("b", &kp.b);
        Ok(KeyPairFiles {
            public,
            private,
            weak_key: kp.is_weak(),
        })
    }

    fn encrypt(
        &self,
        key: &KeyFile,
        message: &BigUint,
        rng: &mut dyn RngCore,
        forced_nonce: Option<&BigUint>,
    ) -> Result<(BigUint, BigUint)> {
        check_scheme_field(key, self.name())?;
        let tower = Self::tower_from(key)?;
        let public = U3PublicKey {
            g: tower.element(key.get_nat("g")?)?,
            big_b: tower.element(key.get_nat("B")?)?,
        };
        let m = crate::elgamal_u3::u3_encode_message(&tower, message)?;
        let c = u3_encrypt(&public, &tower, &m, rng, forced_nonce)?;
        Ok((c.a.into_value(), c.x.into_value()))
    }

    fn decrypt(&self, key: &KeyFile, ciphertext: (&BigUint, &BigUint)) -> Result<BigUint> {
        check_scheme_field(key, self.name())?;
        require_private(key)?;
        let tower = Self::tower_from(key)?;
        let kp = crate::elgamal_u3::U3KeyPair {
            public: U3PublicKey {
                g: tower.element(key.get_nat("g")?)?,
                big_b: tower.element(key.get_nat("B")?)?,
            },
            b: key.get_nat("b")?,
            tower,
        };
        let a = kp
            .tower
            .element(ciphertext.0.clone())
            .map_err(|_| SchemeError::InvalidParams("ciphertext component A is not in U^3".into()))?;
        let x = kp
            .tower
            .element(ciphertext.1.clone())
            .map_err(|_| SchemeError::InvalidParams("ciphertext component X is not in U^3".into()))?;
        let m = u3_decrypt(&kp, &U3Ciphertext { a, x })?;
        Ok(crate::elgamal_u3::u3_decode_message(&kp.tower, &m)?)
    }
}
