//! Elements of the divisible hull `G̃ = ⊕ Ã_τ` as rational coordinates over the
//! r-basis, and the membership tests for `A = Reg G` and `G = ⟨d, A⟩`.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{crt, reduce_mod, Rational, Residue};
use crate::error::Error;
use crate::group::{Group, TypeIdx};

/// Basis index `(τ, i)` naming `e_i^(τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub ty: TypeIdx,
    pub idx: u32,
}

impl Key {
    pub const fn new(ty: TypeIdx, idx: u32) -> Self {
        Self { ty, idx }
    }
}

/// A finitely supported rational vector; zero coordinates are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct AmbientElement {
    coords: BTreeMap<Key, Rational>,
}

impl AmbientElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(key: Key) -> Self {
        Self::monomial(key, Rational::from_integer(1.into()))
    }

    pub fn monomial(key: Key, c: Rational) -> Self {
        let mut x = Self::zero();
        x.set(key, c);
        x
    }

    pub fn from_coords(coords: impl IntoIterator<Item = (Key, Rational)>) -> Self {
        let mut x = Self::zero();
        for (k, c) in coords {
            x.add_at(k, &c);
        }
        x
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, key: Key) -> Rational {
        self.coords.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coord(&self, key: Key) -> Option<&Rational> {
        self.coords.get(&key)
    }

    pub fn set(&mut self, key: Key, c: Rational) {
        if c.is_zero() {
            self.coords.remove(&key);
        } else {
            self.coords.insert(key, c);
        }
    }

    pub fn add_at(&mut self, key: Key, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coords.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coords.remove(&key);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Key, &Rational)> {
        self.coords.iter().map(|(k, c)| (*k, c))
    }

    /// Coordinates of type `ty`.
    pub fn iter_type(&self, ty: TypeIdx) -> impl Iterator<Item = (u32, &Rational)> {
        self.coords.range(Key::new(ty, 0)..=Key::new(ty, u32::MAX)).map(|(k, c)| (k.idx, c))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { coords: self.coords.iter().map(|(key, c)| (*key, c * k)).collect() }
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&Rational::from_integer(k.clone()))
    }

    /// `π_τ(x)`, without key checks.
    pub fn project_unchecked(&self, ty: TypeIdx) -> Self {
        Self { coords: self.iter_type(ty).map(|(i, c)| (Key::new(ty, i), c.clone())).collect() }
    }

    /// Re-keys every coordinate; keys mapped to `None` are dropped.
    pub fn remap(&self, f: impl Fn(Key) -> Option<Key>) -> Self {
        Self::from_coords(self.coords.iter().filter_map(|(k, c)| f(*k).map(|k| (k, c.clone()))))
    }
}

impl Add for &AmbientElement {
    type Output = AmbientElement;
    fn add(self, rhs: &AmbientElement) -> AmbientElement {
        let mut out = self.clone();
        for (k, c) in rhs.iter() {
            out.add_at(k, c);
        }
        out
    }
}

impl Sub for &AmbientElement {
    type Output = AmbientElement;
    fn sub(self, rhs: &AmbientElement) -> AmbientElement {
        let mut out = self.clone();
        for (k, c) in rhs.iter() {
            out.add_at(k, &-c);
        }
        out
    }
}

impl Neg for &AmbientElement {
    type Output = AmbientElement;
    fn neg(self) -> AmbientElement {
        AmbientElement { coords: self.coords.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

/// The class `β mod n` of an element `g ∈ G` with `g − βd ∈ A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub beta: Residue,
}

impl Group {
    pub fn check_keys(&self, x: &AmbientElement) -> Result<(), Error> {
        match x.iter().find(|(k, _)| !self.has_key(*k)) {
            Some((k, _)) => Err(Error::UnknownKey(k)),
            None => Ok(()),
        }
    }

    /// `x ∈ A`: every coordinate lies in its `R_τ`.
    pub fn in_a(&self, x: &AmbientElement) -> Result<bool, Error> {
        self.check_keys(x)?;
        Ok(self.in_a_unchecked(x))
    }

    pub(crate) fn in_a_unchecked(&self, x: &AmbientElement) -> bool {
        x.iter().all(|(k, c)| self.in_r(k.ty, c))
    }

    /// Decides `x ∈ G`, returning the unique class `β mod n` with `x − βd ∈ A`.
    pub fn member_g(&self, x: &AmbientElement) -> Result<Option<MembershipCertificate>, Error> {
        self.check_keys(x)?;
        Ok(self.member_g_unchecked(x))
    }

    pub(crate) fn member_g_unchecked(&self, x: &AmbientElement) -> Option<MembershipCertificate> {
        let mut constraints = Vec::new();
        for (key, c) in x.iter() {
            match self.b(key.ty) {
                Some(b) if key.idx == 0 => {
                    // r_τ = m_τ·coord must lie in R_τ; β ≡ s_τ⁻¹·[r_τ] mod m_τ
                    let r = c * Rational::from_integer(b.m.clone());
                    if !self.in_r(key.ty, &r) {
                        return None;
                    }
                    let class = reduce_mod(&r, &b.m)?;
                    constraints.push(Residue::new(class * &b.s_inv, b.m.clone()).ok()?);
                }
                _ => {
                    if !self.in_r(key.ty, c) {
                        return None;
                    }
                }
            }
        }
        // B-types absent from x impose β ≡ 0 mod m_τ
        for (ty, b) in self.b_types() {
            if x.coord(Key::new(ty, 0)).is_none() {
                constraints.push(Residue::new(0, b.m.clone()).ok()?);
            }
        }
        let beta = crt(&constraints)?;
        debug_assert_eq!(beta.modulus(), self.n());
        Some(MembershipCertificate { beta })
    }

    /// `π_τ(x)`.
    pub fn project(&self, ty: TypeIdx, x: &AmbientElement) -> Result<AmbientElement, Error> {
        if ty >= self.type_count() {
            return Err(Error::UnknownType(ty));
        }
        self.check_keys(x)?;
        Ok(x.project_unchecked(ty))
    }
}
