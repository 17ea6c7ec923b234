//! Endomorphisms of `G` in the parametric form
//! `φ(e₀^(τ)) = (α + m_τ y₀^(τ)) e₀^(τ) + Σ_{i∈I_τ(C)} m_τ y_i^(τ) e_i^(τ)`,
//! `φ(e_i^(τ)) = Σ_j w_ij^(τ) e_j^(τ)` for `i ∈ I_τ(C)`, and the afi check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::element::{AmbientElement, Key};
use crate::error::Error;
use crate::group::{Group, TypeIdx};
use crate::ideal::{ideal_member, ideal_of};

/// `(τ, i, j)` naming the coefficient `w_ij^(τ)` of `e_j` in `φ(e_i)`.
pub type EndoKey = (TypeIdx, u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Endomorphism {
    pub alpha: BigInt,
    /// `y_i^(τ)` for `τ ∈ T(B)`, `i ∈ I_τ`; absent entries are zero.
    pub y: BTreeMap<Key, Rational>,
    /// `w_ij^(τ)` for `i ∈ I_τ(C)`, `j ∈ I_τ`; absent entries are zero.
    pub w: BTreeMap<EndoKey, Rational>,
}

impl Endomorphism {
    pub fn identity(group: &Group) -> Self {
        let mut w = BTreeMap::new();
        for ty in 0..group.type_count() {
            for &i in group.c_indices(ty) {
                w.insert((ty, i, i), Rational::one());
            }
        }
        Self { alpha: BigInt::one(), y: BTreeMap::new(), w }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn validate(&self, group: &Group) -> Result<(), Error> {
        for (k, c) in &self.y {
            if group.b(k.ty).is_none() || !group.has_key(*k) {
                return Err(Error::InvalidEndomorphism(format!("y has no slot ({}, {})", k.ty, k.idx)));
            }
            if !group.in_r(k.ty, c) {
                return Err(Error::InvalidEndomorphism(format!("y({}, {}) = {c} is not in R_τ", k.ty, k.idx)));
            }
        }
        for (&(ty, i, j), c) in &self.w {
            if !group.has_key(Key::new(ty, i)) || i == 0 || !group.has_key(Key::new(ty, j)) {
                return Err(Error::InvalidEndomorphism(format!("w has no slot ({ty}, {i}, {j})")));
            }
            if !group.in_r(ty, c) {
                return Err(Error::InvalidEndomorphism(format!("w({ty}, {i}, {j}) = {c} is not in R_τ")));
            }
        }
        Ok(())
    }

    /// `φ(e_i^(τ))`.
    pub fn image_of_basis(&self, group: &Group, key: Key) -> AmbientElement {
        let ty = key.ty;
        let mut out = AmbientElement::zero();
        if key.idx == 0 {
            let Some(b) = group.b(ty) else { return out };
            let m = Rational::from_integer(b.m.clone());
            let y = |i: u32| self.y.get(&Key::new(ty, i)).cloned().unwrap_or_else(Rational::zero);
            out.set(Key::new(ty, 0), Rational::from_integer(self.alpha.clone()) + &m * y(0));
            for &i in group.c_indices(ty) {
                out.set(Key::new(ty, i), &m * y(i));
            }
        } else {
            for (&(_, _, j), c) in self.w.range((ty, key.idx, 0)..=(ty, key.idx, u32::MAX)) {
                out.add_at(Key::new(ty, j), c);
            }
        }
        out
    }

    /// Linear extension of the basis images to all of `G̃`.
    pub fn apply_unchecked(&self, group: &Group, x: &AmbientElement) -> AmbientElement {
        let mut out = AmbientElement::zero();
        for (key, c) in x.iter() {
            for (k, v) in self.image_of_basis(group, key).iter() {
                out.add_at(k, &(v * c));
            }
        }
        out
    }

    /// `φ ∘ ψ` (apply `psi` first), again in the parametric form: the new `α` is `α_φ α_ψ`.
    pub fn compose(&self, psi: &Endomorphism, group: &Group) -> Endomorphism {
        let alpha = &self.alpha * &psi.alpha;
        let mut y = BTreeMap::new();
        let mut w = BTreeMap::new();
        for ty in 0..group.type_count() {
            let image = |key: Key| self.apply_unchecked(group, &psi.image_of_basis(group, key));
            if let Some(b) = group.b(ty) {
                let m = Rational::from_integer(b.m.clone());
                let img = image(Key::new(ty, 0));
                let y0 = (img.get(Key::new(ty, 0)) - Rational::from_integer(alpha.clone())) / &m;
                y.insert(Key::new(ty, 0), y0);
                for &i in group.c_indices(ty) {
                    y.insert(Key::new(ty, i), img.get(Key::new(ty, i)) / &m);
                }
            }
            for &i in group.c_indices(ty) {
                for (k, c) in image(Key::new(ty, i)).iter() {
                    w.insert((ty, i, k.idx), c.clone());
                }
            }
        }
        y.retain(|_, c| !c.is_zero());
        Endomorphism { alpha, y, w }
    }
}

/// `φ(x)` for `x ∈ G`; the result is certified to lie in `G`.
pub fn endo_apply(group: &Group, phi: &Endomorphism, x: &AmbientElement) -> Result<AmbientElement, Error> {
    phi.validate(group)?;
    if group.member_g(x)?.is_none() {
        return Err(Error::NotMember);
    }
    let image = phi.apply_unchecked(group, x);
    if group.member_g(&image)?.is_none() {
        return Err(Error::InvalidEndomorphism("image leaves G".into()));
    }
    Ok(image)
}

/// `φ(g) ∈ ⟨g⟩_AI`, with the witness `k` of `φ(g) − k·g ∈ L`.
pub fn afi_check(group: &Group, g: &AmbientElement, phi: &Endomorphism) -> Result<Option<BigInt>, Error> {
    let ideal = ideal_of(group, g)?;
    let image = endo_apply(group, phi, g)?;
    ideal_member(group, &ideal, &image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, Residue};
    use crate::instances::g_ex;

    fn e(ty: usize, i: u32) -> Key {
        Key::new(ty, i)
    }

    fn x_ex() -> AmbientElement {
        AmbientElement::from_coords([(e(0, 0), rat(2, 3)), (e(0, 1), rat(4, 1)), (e(1, 0), rat(3, 2))])
    }

    fn g2() -> AmbientElement {
        AmbientElement::from_coords([(e(0, 0), rat(5, 3)), (e(0, 1), rat(10, 1))])
    }

    #[test]
    fn identity_and_zero() {
        let g = g_ex();
        let id = Endomorphism::identity(&g);
        assert_eq!(endo_apply(&g, &id, &x_ex()).unwrap(), x_ex());
        assert!(endo_apply(&g, &Endomorphism::zero(), &x_ex()).unwrap().is_zero());
        assert_eq!(afi_check(&g, &g2(), &id).unwrap(), Some(int(1)));
        assert_eq!(afi_check(&g, &g2(), &Endomorphism::zero()).unwrap(), Some(int(0)));
    }

    #[test]
    fn killing_the_c_summand() {
        let g = g_ex();
        let phi = Endomorphism { alpha: int(1), ..Default::default() };
        let image = endo_apply(&g, &phi, &x_ex()).unwrap();
        assert_eq!(image, AmbientElement::from_coords([(e(0, 0), rat(2, 3)), (e(1, 0), rat(3, 2))]));
        assert_eq!(g.member_g(&image).unwrap().unwrap().beta, Residue::new(5, 6).unwrap());
    }

    #[test]
    fn afi_example() {
        let g = g_ex();
        let mut phi = Endomorphism { alpha: int(3), ..Default::default() };
        phi.y.insert(e(0, 0), rat(1, 1));
        let image = endo_apply(&g, &phi, &g2()).unwrap();
        assert_eq!(image, AmbientElement::monomial(e(0, 0), rat(10, 1)));
        let k = afi_check(&g, &g2(), &phi).unwrap().unwrap();
        // 10e₀ − k·g2 ∈ 5A_τ1
        let rest = &image - &g2().scale_int(&k);
        assert!(crate::ideal::in_l(&g, &[int(5), int(0)], &rest));
    }

    #[test]
    fn phi_of_d_is_alpha_d_plus_a() {
        let g = g_ex();
        let mut phi = Endomorphism { alpha: int(-2), ..Default::default() };
        phi.y.insert(e(0, 1), rat(3, 4));
        phi.y.insert(e(1, 0), rat(5, 9));
        phi.w.insert((0, 1, 0), rat(-7, 2));
        let image = endo_apply(&g, &phi, g.d()).unwrap();
        assert!(g.in_a(&(&image - &g.d().scale_int(&int(-2)))).unwrap());
    }

    #[test]
    fn invalid_data_rejected() {
        let g = g_ex();
        let mut phi = Endomorphism::identity(&g);
        phi.y.insert(e(0, 0), rat(1, 3));
        assert!(matches!(endo_apply(&g, &phi, &x_ex()), Err(Error::InvalidEndomorphism(_))));
        let mut phi = Endomorphism::identity(&g);
        phi.w.insert((1, 1, 0), rat(1, 1));
        assert!(phi.validate(&g).is_err());
        assert!(matches!(endo_apply(&g, &Endomorphism::zero(), &AmbientElement::monomial(e(0, 0), rat(1, 9))), Err(Error::NotMember)));
    }

    #[test]
    fn composition() {
        let g = g_ex();
        let mut phi = Endomorphism { alpha: int(5), ..Default::default() };
        phi.y.insert(e(0, 1), rat(1, 2));
        phi.w.insert((0, 1, 1), rat(3, 1));
        phi.w.insert((0, 1, 0), rat(1, 4));
        let mut psi = Endomorphism { alpha: int(7), ..Default::default() };
        psi.y.insert(e(0, 0), rat(-1, 8));
        psi.y.insert(e(1, 0), rat(2, 3));
        psi.w.insert((0, 1, 1), rat(-1, 1));
        let comp = phi.compose(&psi, &g);
        comp.validate(&g).unwrap();
        assert_eq!(comp.alpha, int(35));
        for x in [x_ex(), g2(), g.d().clone()] {
            let seq = phi.apply_unchecked(&g, &psi.apply_unchecked(&g, &x));
            assert_eq!(comp.apply_unchecked(&g, &x), seq);
        }
    }
}
