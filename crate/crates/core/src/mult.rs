//! Multiplications on `Reg G` given by structure constants `u_ij^(τ) = e_i^(τ) × e_j^(τ)`,
//! the syntactic extension criterion, an exact semantic extendability decision, and
//! the constructor multiplications used to show `L ⊆ ⟨g⟩_AI`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{crt, ext_gcd, modulo, reduce_mod, Rational, Residue};
use crate::element::{AmbientElement, Key};
use crate::error::Error;
use crate::group::{Group, TypeIdx};

/// `(τ, i, j)` naming the product `e_i^(τ) × e_j^(τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub ty: TypeIdx,
    pub i: u32,
    pub j: u32,
}

impl PairKey {
    pub const fn new(ty: TypeIdx, i: u32, j: u32) -> Self {
        Self { ty, i, j }
    }
}

/// Structure constants; absent entries are zero, cross-type products are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct StructureConstants {
    u: BTreeMap<PairKey, AmbientElement>,
}

impl StructureConstants {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: PairKey, value: AmbientElement) {
        if value.is_zero() {
            self.u.remove(&key);
        } else {
            self.u.insert(key, value);
        }
    }

    pub fn with(mut self, key: PairKey, value: AmbientElement) -> Self {
        self.set(key, value);
        self
    }

    pub fn get(&self, key: PairKey) -> Option<&AmbientElement> {
        self.u.get(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PairKey, &AmbientElement)> {
        self.u.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn remove(&mut self, key: PairKey) -> Option<AmbientElement> {
        self.u.remove(&key)
    }
}

impl Group {
    /// Checks that every `u_ij^(τ)` names valid indices and lies in `A_τ`.
    pub fn check_constants(&self, u: &StructureConstants) -> Result<(), Error> {
        for (k, v) in u.iter() {
            if !self.has_key(Key::new(k.ty, k.i)) || !self.has_key(Key::new(k.ty, k.j)) {
                return Err(Error::InvalidConstants(format!("unknown index ({}, {}, {})", k.ty, k.i, k.j)));
            }
            self.check_keys(v)?;
            if let Some((key, c)) = v.iter().find(|(key, c)| key.ty != k.ty || !self.in_r(key.ty, c)) {
                return Err(Error::InvalidConstants(format!(
                    "u({},{},{}) has coordinate {c} at ({}, {}) outside A_τ",
                    k.ty, k.i, k.j, key.ty, key.idx
                )));
            }
        }
        Ok(())
    }
}

/// `x × y = Σ_τ Σ_{i,j} x_{τi} y_{τj} u_ij^(τ)`, defined on all of `G̃` by bilinearity.
pub fn product(u: &StructureConstants, x: &AmbientElement, y: &AmbientElement) -> AmbientElement {
    let mut out = AmbientElement::zero();
    for (k, v) in u.iter() {
        let (Some(a), Some(b)) = (x.coord(Key::new(k.ty, k.i)), y.coord(Key::new(k.ty, k.j))) else {
            continue;
        };
        let coef = a * b;
        for (key, c) in v.iter() {
            out.add_at(key, &(c * &coef));
        }
    }
    out
}

/// The class `α mod n` a multiplication corresponds to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaWitness {
    pub alpha: Residue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause24 {
    /// `u_i0 ∉ m_τ A_τ`.
    LeftNotDivisible { i: u32 },
    /// `u_0i ∉ m_τ A_τ`.
    RightNotDivisible { i: u32 },
    /// A non-`e₀` coordinate of `v_00` is not in `m_τ R_τ`.
    OffDiagonal { j: u32 },
    /// The `α` classes of the `B`-types cannot be combined.
    AlphaConflict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fails24 {
    pub ty: TypeIdx,
    pub clause: Clause24,
}

impl fmt::Display for Fails24 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.clause {
            Clause24::LeftNotDivisible { i } => write!(f, "type #{}: u_{i}0 is not in m·A_τ", self.ty),
            Clause24::RightNotDivisible { i } => write!(f, "type #{}: u_0{i} is not in m·A_τ", self.ty),
            Clause24::OffDiagonal { j } => write!(f, "type #{}: coordinate {j} of v_00 is not in m·R_τ", self.ty),
            Clause24::AlphaConflict => write!(f, "type #{}: no common alpha", self.ty),
        }
    }
}

fn in_multiple(group: &Group, ty: TypeIdx, x: &AmbientElement, m: &BigInt) -> bool {
    let m = Rational::from_integer(m.clone());
    x.iter().all(|(k, c)| group.in_r(ty, &(c / &m)) && k.ty == ty)
}

/// The syntactic criterion: `u_i0 = m v_i0`, `u_0i = m v_0i`, `v_00 = α s⁻¹ e₀ + m a_00`
/// for one common integer `α`. Returns the class of `α` modulo `n`.
pub fn check_24(group: &Group, u: &StructureConstants) -> Result<AlphaWitness, Fails24> {
    let zero = AmbientElement::zero();
    let mut constraints = Vec::new();
    for (ty, b) in group.b_types() {
        for &i in group.indices(ty) {
            let left = u.get(PairKey::new(ty, i, 0)).unwrap_or(&zero);
            if !in_multiple(group, ty, left, &b.m) {
                return Err(Fails24 { ty, clause: Clause24::LeftNotDivisible { i } });
            }
            let right = u.get(PairKey::new(ty, 0, i)).unwrap_or(&zero);
            if !in_multiple(group, ty, right, &b.m) {
                return Err(Fails24 { ty, clause: Clause24::RightNotDivisible { i } });
            }
        }
        let m = Rational::from_integer(b.m.clone());
        let v00 = u.get(PairKey::new(ty, 0, 0)).unwrap_or(&zero).scale(&m.recip());
        for (j, c) in v00.iter_type(ty) {
            if j != 0 && !group.in_r(ty, &(c / &m)) {
                return Err(Fails24 { ty, clause: Clause24::OffDiagonal { j } });
            }
        }
        // [v_00 at e₀] ≡ α s⁻¹  ⇔  α ≡ s·[v_00 at e₀]  (mod m)
        let class = reduce_mod(&v00.get(Key::new(ty, 0)), &b.m).expect("v_00 ∈ A_τ");
        constraints.push((ty, Residue::new(class * &b.s, b.m.clone()).expect("m > 1")));
    }
    let mut acc = Residue::new(0, 1).expect("unit modulus");
    for (ty, r) in constraints {
        acc = crt(&[acc, r]).ok_or(Fails24 { ty, clause: Clause24::AlphaConflict })?;
    }
    Ok(AlphaWitness { alpha: acc })
}

/// Which product of the extension failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProductRef {
    /// `d × d`.
    DD,
    /// `d × e_i^(τ)`.
    DLeft(Key),
    /// `e_i^(τ) × d`.
    DRight(Key),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SaturationFailure {
    NotInG,
    /// A non-`e₀` coordinate is outside `R_τ`.
    Coordinate(u32),
    /// `m_τ·(e₀-coordinate)` is outside `R_τ`.
    Denominator,
    /// `gcd(m_τ, lcm_{σ≠τ} m_σ)` does not divide the class of the product.
    Saturation {
        gcd: BigInt,
        class: BigInt,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticFailure {
    pub product: ProductRef,
    pub reason: SaturationFailure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticCertificate {
    /// The class of `d × d` modulo `A`.
    pub dd_beta: Residue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticVerdict {
    Extendable(SemanticCertificate),
    NotExtendable(SemanticFailure),
}

impl SemanticVerdict {
    pub fn is_extendable(&self) -> bool {
        matches!(self, SemanticVerdict::Extendable(_))
    }
}

/// Decides whether the bilinear extension of `u` maps `G × G` into `G`.
///
/// With `x = βd + a`, `y = β'd + a'` this holds iff `d × d ∈ G` and `R_τ·(d × e_i)` and
/// `R_τ·(e_i × d)` lie in `G` for every basis vector (`A × A ⊆ A` is automatic).
pub fn semantic_extendable(group: &Group, u: &StructureConstants) -> SemanticVerdict {
    let d = group.d();
    let dd = product(u, d, d);
    let Some(cert) = group.member_g_unchecked(&dd) else {
        return SemanticVerdict::NotExtendable(SemanticFailure { product: ProductRef::DD, reason: SaturationFailure::NotInG });
    };
    for (ty, _) in group.b_types() {
        for &i in group.indices(ty) {
            let e = AmbientElement::basis(Key::new(ty, i));
            for (t, which) in
                [(product(u, d, &e), ProductRef::DLeft(Key::new(ty, i))), (product(u, &e, d), ProductRef::DRight(Key::new(ty, i)))]
            {
                if let Err(reason) = saturated(group, ty, &t) {
                    return SemanticVerdict::NotExtendable(SemanticFailure { product: which, reason });
                }
            }
        }
    }
    SemanticVerdict::Extendable(SemanticCertificate { dd_beta: cert.beta })
}

// t is supported on the B-type ty; decides R_τ·t ⊆ G.
fn saturated(group: &Group, ty: TypeIdx, t: &AmbientElement) -> Result<(), SaturationFailure> {
    let b = group.b(ty).expect("B-type");
    for (j, c) in t.iter_type(ty) {
        if j != 0 && !group.in_r(ty, c) {
            return Err(SaturationFailure::Coordinate(j));
        }
    }
    let r = t.get(Key::new(ty, 0)) * Rational::from_integer(b.m.clone());
    if !group.in_r(ty, &r) {
        return Err(SaturationFailure::Denominator);
    }
    // r·t ∈ G needs β ≡ s⁻¹[ρ r] (mod m_τ) and β ≡ 0 modulo every other m_σ, for all ρ ∈ R_τ;
    // solvable for all ρ iff gcd(m_τ, lcm others) divides the class at ρ = 1.
    let class = modulo(&(reduce_mod(&r, &b.m).expect("unit denominator") * &b.s_inv), &b.m);
    let gcd = b.m.gcd(&b.others_lcm);
    if !(&class % &gcd).is_zero() {
        return Err(SaturationFailure::Saturation { gcd, class });
    }
    Ok(())
}

/// Case 1, `τ ∈ T(B) ∩ T(C)`: `e₀ × e_t = e_t × e₀ = m_τ e_k`.
pub fn mk_case1(group: &Group, ty: TypeIdx, t: u32, k: u32) -> Result<StructureConstants, Error> {
    let b = group.b(ty).ok_or_else(|| Error::Precondition("case 1 needs a B-type".into()))?;
    if !group.c_indices(ty).contains(&t) {
        return Err(Error::Precondition(format!("{t} is not a C-index of type #{ty}")));
    }
    if !group.has_key(Key::new(ty, k)) {
        return Err(Error::UnknownKey(Key::new(ty, k)));
    }
    let v = AmbientElement::monomial(Key::new(ty, k), Rational::from_integer(b.m.clone()));
    Ok(StructureConstants::zero().with(PairKey::new(ty, 0, t), v.clone()).with(PairKey::new(ty, t, 0), v))
}

/// Form of the `B`-diagonal constants of the case-2 multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case2Form {
    /// `e₀^(σ) × e₀^(σ) = m_σ(s_τ s_σ⁻¹ + m_σ y_σ) e₀^(σ)`.
    Corrected,
    /// `e₀^(σ) × e₀^(σ) = (s_τ s_σ⁻¹ m_τ + m_σ² y_σ) e₀^(σ)`; not a multiplication on `G`
    /// in general.
    Literal,
}

/// Bézout data `s s⁻¹ + m y = 1` with `s⁻¹ = s0 + shift·m`, `y = y0 − shift·s`.
pub fn bezout(s: &BigInt, m: &BigInt, shift: &BigInt) -> (BigInt, BigInt) {
    let (_, x, y) = ext_gcd(s, m);
    (x + shift * m, y - shift * s)
}

/// Case 2 (`τ ∈ T(B)`), in corrected form with the canonical Bézout choice.
pub fn mk_case2(group: &Group, ty: TypeIdx) -> Result<StructureConstants, Error> {
    mk_case2_with(group, ty, Case2Form::Corrected, &BTreeMap::new())
}

/// Case 2 with an explicit form and per-type Bézout shifts (see [`bezout`]).
pub fn mk_case2_with(group: &Group, ty: TypeIdx, form: Case2Form, shifts: &BTreeMap<TypeIdx, BigInt>) -> Result<StructureConstants, Error> {
    let tau = group.b(ty).ok_or_else(|| Error::Precondition("case 2 needs a B-type".into()))?;
    let mut u = StructureConstants::zero();
    for (sigma, b) in group.b_types() {
        let shift = shifts.get(&sigma).cloned().unwrap_or_else(BigInt::zero);
        let (s_inv, y) = bezout(&b.s, &b.m, &shift);
        debug_assert!((&b.s * &s_inv + &b.m * &y).is_one());
        let coef = match form {
            Case2Form::Corrected => &b.m * (&tau.s * &s_inv + &b.m * &y),
            Case2Form::Literal => &tau.s * &s_inv * &tau.m + &b.m * &b.m * &y,
        };
        let e0 = Key::new(sigma, 0);
        u.set(PairKey::new(sigma, 0, 0), AmbientElement::monomial(e0, Rational::from_integer(coef)));
    }
    Ok(u)
}

/// The `C`-component construction: `e_i × e_i = e_k`.
pub fn mk_c_case(group: &Group, ty: TypeIdx, i: u32, k: u32) -> Result<StructureConstants, Error> {
    if !group.c_indices(ty).contains(&i) {
        return Err(Error::Precondition(format!("{i} is not a C-index of type #{ty}")));
    }
    if !group.has_key(Key::new(ty, k)) {
        return Err(Error::UnknownKey(Key::new(ty, k)));
    }
    Ok(StructureConstants::zero().with(PairKey::new(ty, i, i), AmbientElement::basis(Key::new(ty, k))))
}

/// Some other `B`-type `σ` has `m_σ ∤ s_τ m_τ`. Then `m_σ·(d × d)(σ, 0) ∉ R_σ` under the
/// literal case-2 constants for `ty`, so they do not extend to `G`. The converse fails.
pub fn literal_case2_breaks(group: &Group, ty: TypeIdx) -> bool {
    let Some(tau) = group.b(ty) else { return false };
    let target = &tau.s * &tau.m;
    group.b_types().any(|(sigma, b)| sigma != ty && !(&target % &b.m).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::group::GroupSpec;
    use crate::instances::g_ex;

    fn e(ty: usize, i: u32) -> Key {
        Key::new(ty, i)
    }

    fn mono(ty: usize, i: u32, c: i64) -> AmbientElement {
        AmbientElement::monomial(e(ty, i), rat(c, 1))
    }

    #[test]
    fn check_24_examples() {
        let g = g_ex();
        let u = StructureConstants::zero().with(PairKey::new(0, 0, 0), mono(0, 0, 3)).with(PairKey::new(1, 0, 0), mono(1, 0, 2));
        assert_eq!(check_24(&g, &u).unwrap().alpha, Residue::new(1, 6).unwrap());

        let u = StructureConstants::zero().with(PairKey::new(0, 0, 1), mono(0, 0, 1));
        assert_eq!(check_24(&g, &u), Err(Fails24 { ty: 0, clause: Clause24::RightNotDivisible { i: 1 } }));

        assert_eq!(check_24(&g, &StructureConstants::zero()).unwrap().alpha, Residue::new(0, 6).unwrap());
    }

    #[test]
    fn check_24_alpha_conflict_and_off_diagonal() {
        let g = g_ex();
        // v_00 at e₁ is 1, not in 3·Z[1/2]
        let u = StructureConstants::zero().with(PairKey::new(0, 0, 0), mono(0, 1, 3));
        assert_eq!(check_24(&g, &u), Err(Fails24 { ty: 0, clause: Clause24::OffDiagonal { j: 1 } }));
        // α ≡ 1 mod 3 and α ≡ 0 mod 2 is solvable (α = 4)
        let u = StructureConstants::zero().with(PairKey::new(0, 0, 0), mono(0, 0, 3));
        assert_eq!(check_24(&g, &u).unwrap().alpha, Residue::new(4, 6).unwrap());
    }

    #[test]
    fn semantic_examples() {
        let g = g_ex();
        let u = StructureConstants::zero().with(PairKey::new(0, 0, 1), mono(0, 0, 1));
        assert!(semantic_extendable(&g, &u).is_extendable());
        // d × e₁ = (1/3) e₀^(τ1) is in G with β = 4
        let t = product(&u, g.d(), &AmbientElement::basis(e(0, 1)));
        assert_eq!(t, AmbientElement::monomial(e(0, 0), rat(1, 3)));
        for r in [rat(1, 1), rat(1, 2), rat(1, 4), rat(3, 1)] {
            assert!(g.member_g(&t.scale(&r)).unwrap().is_some());
        }

        let u = StructureConstants::zero().with(PairKey::new(0, 0, 1), mono(0, 1, 1));
        assert_eq!(
            semantic_extendable(&g, &u),
            SemanticVerdict::NotExtendable(SemanticFailure {
                product: ProductRef::DLeft(e(0, 1)),
                reason: SaturationFailure::Coordinate(1)
            })
        );
        assert!(g.member_g(&product(&u, g.d(), &AmbientElement::basis(e(0, 1)))).unwrap().is_none());

        assert!(semantic_extendable(&g, &StructureConstants::zero()).is_extendable());
    }

    #[test]
    fn saturation_needs_more_than_membership() {
        // m = (4, 2): saturation needs gcd(4, 2) = 2 to divide the class of d × e₁
        use crate::group::GroupSpec;
        let spec = GroupSpec::default().with_type("a", &[3]).with_type("b", &[5]).with_b(0, 4, 1).with_b(1, 2, 1).with_c(0, &[1]);
        let g = Group::new(spec).unwrap();
        // d × e₁ = (1/4)·1 e₀^(a): class 1 mod 4, gcd(4, 2) = 2 ∤ 1
        let u = StructureConstants::zero().with(PairKey::new(0, 0, 1), mono(0, 0, 1));
        assert!(matches!(
            semantic_extendable(&g, &u),
            SemanticVerdict::NotExtendable(SemanticFailure { reason: SaturationFailure::Saturation { .. }, .. })
        ));
        // class 2: (1/2)e₀^(a) = 2d − e₀^(b), in G, and every R-multiple stays in G
        let u = StructureConstants::zero().with(PairKey::new(0, 0, 1), mono(0, 0, 2));
        assert!(semantic_extendable(&g, &u).is_extendable());
        assert!(check_24(&g, &u).is_err());
    }

    #[test]
    fn product_examples() {
        let g = g_ex();
        let u = StructureConstants::zero().with(PairKey::new(0, 0, 0), mono(0, 0, 3)).with(PairKey::new(1, 0, 0), mono(1, 0, 2));
        assert_eq!(&product(&u, g.d(), g.d()), g.d());
        assert!(product(&u, g.d(), &AmbientElement::zero()).is_zero());
        assert!(product(&StructureConstants::zero(), g.d(), g.d()).is_zero());
        // cross-type products vanish
        assert!(product(&u, &mono(0, 0, 1), &mono(1, 0, 1)).is_zero());
    }

    #[test]
    fn constructors() {
        let g = g_ex();
        let c1 = mk_case1(&g, 0, 1, 1).unwrap();
        assert_eq!(c1.get(PairKey::new(0, 0, 1)), Some(&mono(0, 1, 3)));
        assert_eq!(c1.get(PairKey::new(0, 1, 0)), Some(&mono(0, 1, 3)));
        assert_eq!(check_24(&g, &c1).unwrap().alpha, Residue::new(0, 6).unwrap());

        let c2 = mk_case2(&g, 0).unwrap();
        assert_eq!(c2.get(PairKey::new(0, 0, 0)), Some(&mono(0, 0, 3)));
        assert_eq!(c2.get(PairKey::new(1, 0, 0)), Some(&mono(1, 0, 2)));
        assert_eq!(check_24(&g, &c2).unwrap().alpha, Residue::new(1, 6).unwrap());
        assert_eq!(&product(&c2, g.d(), g.d()), g.d());

        let cc = mk_c_case(&g, 0, 1, 0).unwrap();
        assert_eq!(cc.get(PairKey::new(0, 1, 1)), Some(&mono(0, 0, 1)));
        assert_eq!(check_24(&g, &cc).unwrap().alpha, Residue::new(0, 6).unwrap());

        for u in [&c1, &c2, &cc] {
            assert!(semantic_extendable(&g, u).is_extendable());
            g.check_constants(u).unwrap();
        }
        assert!(mk_case1(&g, 1, 1, 0).is_err());
        assert!(mk_c_case(&g, 1, 1, 0).is_err());
    }

    #[test]
    fn literal_case2_on_g_ex() {
        let g = g_ex();
        assert!(literal_case2_breaks(&g, 0));
        let lit = mk_case2_with(&g, 0, Case2Form::Literal, &BTreeMap::new()).unwrap();
        let dd = product(&lit, g.d(), g.d());
        assert_eq!(dd, AmbientElement::from_coords([(e(0, 0), rat(1, 3)), (e(1, 0), rat(3, 4))]));
        assert!(!semantic_extendable(&g, &lit).is_extendable());
        assert!(check_24(&g, &lit).is_err());
    }

    #[test]
    fn literal_case2_can_break_without_the_divisibility_test() {
        // m_σ | s_τ m_τ, yet d × d has classes 1 mod 4 and 0 mod 2
        let spec = GroupSpec::default().with_type("a", &[3]).with_type("b", &[5]).with_b(0, 4, 1).with_b(1, 2, 1);
        let g = Group::new(spec).unwrap();
        assert!(!literal_case2_breaks(&g, 0));
        let lit = mk_case2_with(&g, 0, Case2Form::Literal, &BTreeMap::new()).unwrap();
        assert!(!semantic_extendable(&g, &lit).is_extendable());
        let fixed = mk_case2(&g, 0).unwrap();
        assert!(semantic_extendable(&g, &fixed).is_extendable());
        assert_eq!(check_24(&g, &fixed).unwrap().alpha, Residue::new(1, 4).unwrap());
    }

    #[test]
    fn bezout_shifts() {
        for shift in -3..=3 {
            let (si, y) = bezout(&int(5), &int(12), &int(shift));
            assert_eq!(int(5) * si + int(12) * y, int(1));
        }
    }

    #[test]
    fn invalid_constants_rejected() {
        let g = g_ex();
        let bad = StructureConstants::zero().with(PairKey::new(0, 0, 0), AmbientElement::monomial(e(0, 0), rat(1, 3)));
        assert!(g.check_constants(&bad).is_err());
        let cross = StructureConstants::zero().with(PairKey::new(0, 0, 0), mono(1, 0, 1));
        assert!(g.check_constants(&cross).is_err());
    }
}
