//! The totient tower of a modulus n, the isomorphism between the third
//! group of units U^3(Z_n) and Z_{phi^3(n)}, and the group operations
//! carried over through that isomorphism.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::number_theory::{
    self as nt, discrete_log_auto, euler_phi, find_primitive_root, is_cyclic_unit_group,
    pow_mod_tolerant, NumberTheoryError,
};

/// Upper bound on phi(n) for exhaustive enumeration.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

/// Which level of the tower failed the cyclicity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerLevel {
    N(BigUint),
    Phi1(BigUint),
    Phi2(BigUint),
}

impl fmt::Display for TowerLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerLevel::N(v) => write!(f, "n = {v}"),
            TowerLevel::Phi1(v) => write!(f, "phi(n) = {v}"),
            TowerLevel::Phi2(v) => write!(f, "phi^2(n) = {v}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UnitGroupError {
    #[error("unit group is not cyclic at level {0}")]
    TowerNotCyclic(TowerLevel),
    #[error("modulus must be at least 5, got {0}")]
    ModulusTooSmall(BigUint),
    #[error("{0} is not an element of U^2(Z_n)")]
    NotInU2(BigUint),
    #[error("{0} is not an element of U^3(Z_n)")]
    NotInU3(BigUint),
    #[error("residue {value} is out of range [0, {bound})")]
    OutOfRange { value: BigUint, bound: BigUint },
    #[error("phi(n) = {0} exceeds the enumeration limit")]
    EnumerationTooLarge(BigUint),
    #[error(transparent)]
    NumberTheory(#[from] NumberTheoryError),
}

pub type Result<T> = std::result::Result<T, UnitGroupError>;

/// An element of U^3(Z_n), validated against a tower at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElement {
    value: BigUint,
}

impl GroupElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// A modulus n with its totient tower phi(n), phi^2(n), phi^3(n), the
/// generators g1, g2, g3 of the unit groups at each level, and the
/// resulting generator g of U^3(Z_n). Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroupTower {
    n: BigUint,
    phi1: BigUint,
    phi2: BigUint,
    phi3: BigUint,
    g1: BigUint,
    g2: BigUint,
    g3: BigUint,
    g: BigUint,
    identity: BigUint,
}

/// Cyclicity of the whole tower: U(Z_n), U(Z_phi(n)) and U(Z_phi^2(n)).
/// Defined for every n >= 1, unlike [`UnitGroupTower::build`].
pub fn tower_is_cyclic(n: &BigUint) -> Result<bool> {
    if !is_cyclic_unit_group(n) {
        return Ok(false);
    }
    let phi1 = euler_phi(n)?;
    if !is_cyclic_unit_group(&phi1) {
        return Ok(false);
    }
    let phi2 = euler_phi(&phi1)?;
    Ok(is_cyclic_unit_group(&phi2))
}

impl UnitGroupTower {
    /// Builds and validates the tower for `n >= 5`. Generators are the
    /// smallest primitive roots at each level.
    pub fn build(n: &BigUint) -> Result<Self> {
        if *n < BigUint::from(5u32) {
            return Err(UnitGroupError::ModulusTooSmall(n.clone()));
        }
        if !is_cyclic_unit_group(n) {
            return Err(UnitGroupError::TowerNotCyclic(TowerLevel::N(n.clone())));
        }
        let phi1 = euler_phi(n)?;
        if !is_cyclic_unit_group(&phi1) {
            return Err(UnitGroupError::TowerNotCyclic(TowerLevel::Phi1(phi1)));
        }
        let phi2 = euler_phi(&phi1)?;
        if !is_cyclic_unit_group(&phi2) {
            return Err(UnitGroupError::TowerNotCyclic(TowerLevel::Phi2(phi2)));
        }
        let phi3 = euler_phi(&phi2)?;
        let g1 = find_primitive_root(n)?;
        let g2 = find_primitive_root(&phi1)?;
        let g3 = find_primitive_root(&phi2)?;
        // g = g1^(g2^g3 mod phi(n)) mod n
        let inner = pow_mod_tolerant(&g2, &g3, &phi1);
        let g = pow_mod_tolerant(&g1, &inner, n);
        let mut tower = Self {
            n: n.clone(),
            phi1,
            phi2,
            phi3,
            g1,
            g2,
            g3,
            g,
            identity: BigUint::zero(),
        };
        tower.identity = tower.iso_f_inv(&BigUint::zero())?;
        Ok(tower)
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }
    pub fn phi1(&self) -> &BigUint {
        &self.phi1
    }
    pub fn phi2(&self) -> &BigUint {
        &self.phi2
    }
    pub fn phi3(&self) -> &BigUint {
        &self.phi3
    }
    pub fn g1(&self) -> &BigUint {
        &self.g1
    }
    pub fn g2(&self) -> &BigUint {
        &self.g2
    }
    pub fn g3(&self) -> &BigUint {
        &self.g3
    }

    /// The generator g1^(g2^g3 mod phi(n)) mod n of U^3(Z_n).
    pub fn u3_generator(&self) -> GroupElement {
        GroupElement {
            value: self.g.clone(),
        }
    }

    /// The identity of (U^3(Z_n), otimes), i.e. iso_f_inv(0).
    pub fn identity(&self) -> GroupElement {
        GroupElement {
            value: self.identity.clone(),
        }
    }

    /// Validates U^3 membership and wraps the residue.
    pub fn element(&self, value: BigUint) -> Result<GroupElement> {
        let value = value % &self.n;
        self.iso_f(&value)?;
        Ok(GroupElement { value })
    }

    fn unit_dlog(
        &self,
        g: &BigUint,
        target: &BigUint,
        modulus: &BigUint,
        order: &BigUint,
    ) -> nt::Result<BigUint> {
        if modulus.is_one() {
            return Ok(BigUint::zero());
        }
        let t = target % modulus;
        if order.is_one() {
            if t.is_one() {
                Ok(BigUint::zero())
            } else {
                Err(NumberTheoryError::NotInSubgroup {
                    base: g.clone(),
                    target: t,
                    modulus: modulus.clone(),
                })
            }
        } else {
            discrete_log_auto(g, &t, modulus, order)
        }
    }

    /// The isomorphism f(a) = log_g3 log_g2 log_g1 a, a residue in
    /// [0, phi^3(n)).
    pub fn iso_f(&self, a: &BigUint) -> Result<BigUint> {
        let a = a % &self.n;
        if !a.gcd(&self.n).is_one() {
            return Err(UnitGroupError::NotInU3(a));
        }
        let i = self
            .unit_dlog(&self.g1, &a, &self.n, &self.phi1)
            .map_err(|_| UnitGroupError::NotInU3(a.clone()))?;
        if !i.gcd(&self.phi1).is_one() {
            return Err(UnitGroupError::NotInU3(a));
        }
        let j = self
            .unit_dlog(&self.g2, &i, &self.phi1, &self.phi2)
            .map_err(|_| UnitGroupError::NotInU3(a.clone()))?;
        if !j.gcd(&self.phi2).is_one() {
            return Err(UnitGroupError::NotInU3(a));
        }
        let t = self
            .unit_dlog(&self.g3, &j, &self.phi2, &self.phi3)
            .map_err(|_| UnitGroupError::NotInU3(a.clone()))?;
        Ok(t)
    }

    /// Inverse of f: t -> g1^(g2^(g3^t mod phi^2(n)) mod phi(n)) mod n.
    pub fn iso_f_inv(&self, t: &BigUint) -> Result<BigUint> {
        if *t >= self.phi3 {
            return Err(UnitGroupError::OutOfRange {
                value: t.clone(),
                bound: self.phi3.clone(),
            });
        }
        let j = pow_mod_tolerant(&self.g3, t, &self.phi2);
        let i = pow_mod_tolerant(&self.g2, &j, &self.phi1);
        Ok(pow_mod_tolerant(&self.g1, &i, &self.n))
    }

    /// iso_f on a validated element (cannot fail membership).
    fn f_of(&self, x: &GroupElement) -> BigUint {
        self.iso_f(&x.value)
            .expect("GroupElement was validated at construction")
    }

    fn from_residue(&self, t: &BigUint) -> GroupElement {
        GroupElement {
            value: self
                .iso_f_inv(t)
                .expect("residue reduced into [0, phi3)"),
        }
    }

    /// x (+) y = x^(log_g1 y) mod n, the exponent-multiplication
    /// operation closed on U^2(Z_n).
    pub fn op_oplus(&self, x: &BigUint, y: &BigUint) -> Result<BigUint> {
        let log_x = self.u2_log(x)?;
        let log_y = self.u2_log(y)?;
        let exp = (log_x * log_y) % &self.phi1;
        Ok(pow_mod_tolerant(&self.g1, &exp, &self.n))
    }

    /// log_g1 of a U^2 element; errors with NotInU2 otherwise.
    pub fn u2_log(&self, x: &BigUint) -> Result<BigUint> {
        let x = x % &self.n;
        if !x.gcd(&self.n).is_one() {
            return Err(UnitGroupError::NotInU2(x));
        }
        let i = self
            .unit_dlog(&self.g1, &x, &self.n, &self.phi1)
            .map_err(|_| UnitGroupError::NotInU2(x.clone()))?;
        if !i.gcd(&self.phi1).is_one() {
            return Err(UnitGroupError::NotInU2(x));
        }
        Ok(i)
    }

    /// x (x) y = f^-1(f(x) + f(y)), the group operation of U^3(Z_n).
    pub fn op_otimes(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let t = (self.f_of(x) + self.f_of(y)) % &self.phi3;
        self.from_residue(&t)
    }

    /// x^e = f^-1(e * f(x)).
    pub fn op_pow(&self, x: &GroupElement, e: &BigUint) -> GroupElement {
        let t = (e % &self.phi3) * self.f_of(x) % &self.phi3;
        self.from_residue(&t)
    }

    /// Group inverse: f^-1(-f(x) mod phi^3(n)).
    pub fn op_inverse(&self, x: &GroupElement) -> GroupElement {
        let fx = self.f_of(x);
        let t = if fx.is_zero() {
            fx
        } else {
            &self.phi3 - fx
        };
        self.from_residue(&t)
    }
}

/// Enumerates U^k(Z_n) for k in 1..=3 as a sorted set.
///
/// k = 1 is the plain units; k = 2 uses the closed form
/// {g1^i : gcd(i, phi(n)) = 1}; k = 3 uses
/// {g1^(g2^i mod phi(n)) : gcd(i, phi^2(n)) = 1}.
pub fn enumerate_u_k(n: &BigUint, k: u8) -> Result<BTreeSet<BigUint>> {
    assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
    let phi1 = euler_phi(n)?;
    if phi1 > BigUint::from(ENUMERATION_LIMIT) {
        return Err(UnitGroupError::EnumerationTooLarge(phi1));
    }
    if k == 1 {
        let mut set = BTreeSet::new();
        let mut a = BigUint::one();
        while a < *n {
            if a.gcd(n).is_one() {
                set.insert(a.clone());
            }
            a += 1u32;
        }
        if n.is_one() {
            set.insert(BigUint::zero()); // U(Z_1) is the trivial group {0}
        }
        return Ok(set);
    }
    if !is_cyclic_unit_group(n) {
        return Err(UnitGroupError::TowerNotCyclic(TowerLevel::N(n.clone())));
    }
    let g1 = find_primitive_root(n)?;
    if k == 2 {
        let mut set = BTreeSet::new();
        let mut i = BigUint::zero();
        while i < phi1 {
            if i.gcd(&phi1).is_one() {
                set.insert(pow_mod_tolerant(&g1, &i, n));
            }
            i += 1u32;
        }
        return Ok(set);
    }
    if !is_cyclic_unit_group(&phi1) {
        return Err(UnitGroupError::TowerNotCyclic(TowerLevel::Phi1(phi1)));
    }
    let phi2 = euler_phi(&phi1)?;
    let g2 = find_primitive_root(&phi1)?;
    let mut set = BTreeSet::new();
    let mut i = BigUint::zero();
    loop {
        if phi2.is_one() {
            // trivial exponent group: only i = 0
            let e = pow_mod_tolerant(&g2, &i, &phi1);
            set.insert(pow_mod_tolerant(&g1, &e, n));
            break;
        }
        if i >= phi2 {
            break;
        }
        if i.gcd(&phi2).is_one() {
            let e = pow_mod_tolerant(&g2, &i, &phi1);
            set.insert(pow_mod_tolerant(&g1, &e, n));
        }
        i += 1u32;
    }
    Ok(set)
}
