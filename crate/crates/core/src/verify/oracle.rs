//! Exhaustive-search oracles. They share no decision logic with the main path beyond
//! the definitional tests `x ∈ A` and `z ∈ L`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{factorize, int, Rational};
use crate::element::{AmbientElement, Key};
use crate::group::{Group, TypeIdx};
use crate::ideal::in_l;
use crate::mult::{product, StructureConstants};

fn n_of(group: &Group) -> i64 {
    group.n().try_into().expect("desk-scale n")
}

/// The least `β ∈ 0..n` with `x − βd ∈ A`.
pub fn brute_beta(group: &Group, x: &AmbientElement) -> Option<BigInt> {
    (0..n_of(group)).map(int).find(|b| group.in_a(&(x - &group.d().scale_int(b))).unwrap_or(false))
}

/// The least `k ∈ 0..n` with `x − k·g ∈ L`.
pub fn brute_k(group: &Group, ell: &[BigInt], g: &AmbientElement, x: &AmbientElement) -> Option<BigInt> {
    if group.check_keys(x).is_err() {
        return None;
    }
    (0..n_of(group)).map(int).find(|k| in_l(group, ell, &(x - &g.scale_int(k))))
}

/// The `P₀(τ)`-part of `a`, from a full factorization of its numerator.
pub fn brute_p0(group: &Group, ty: TypeIdx, a: &Rational) -> BigInt {
    if a.is_zero() {
        return BigInt::zero();
    }
    factorize(&a.numer().abs())
        .into_iter()
        .filter(|(p, _)| !group.p_inf(ty).iter().any(|&q| *p == BigInt::from(q)))
        .map(|(p, e)| p.pow(e))
        .product()
}

/// `ℓ_τ(g)` recomputed from factorizations.
pub fn brute_ell(group: &Group, g: &AmbientElement) -> Vec<BigInt> {
    (0..group.type_count())
        .map(|ty| {
            let mut acc = BigInt::zero();
            for &i in group.indices(ty) {
                let mut c = g.get(Key::new(ty, i));
                if let (0, Some(b)) = (i, group.b(ty)) {
                    c *= Rational::from_integer(b.m.clone());
                }
                acc = acc.gcd(&brute_p0(group, ty, &c));
            }
            acc
        })
        .collect()
}

// multiplicative order of p modulo m (p ∤ m)
fn order_mod(p: u64, m: &BigInt) -> i32 {
    let p = BigInt::from(p);
    let mut acc = &p % m;
    let mut k = 1;
    while !acc.is_one() && k < 64 {
        acc = (&acc * &p) % m;
        k += 1;
    }
    k
}

/// Multipliers used to saturate products: `±1`, `p^{-k}` for `p ∈ P∞(τ)` and `k` up to
/// the order of `p` in `(ℤ/m_τ)ˣ`, and a few integers.
pub fn saturation_scalars(group: &Group, ty: TypeIdx) -> Vec<Rational> {
    let mut out = vec![Rational::from_integer(int(1)), Rational::from_integer(int(-1))];
    for &p in group.p_inf(ty) {
        let order = group.b(ty).map_or(1, |b| order_mod(p, &b.m));
        for k in 1..=order {
            out.push(Rational::from_integer(BigInt::from(p)).pow(-k));
        }
    }
    out.extend([2, 3, 5].map(|k| Rational::from_integer(int(k))));
    out
}

/// Searches products of saturated generators `d`, `r·e_i` for one outside `G`, deciding
/// membership by [`brute_beta`]. Returns a description of the first offending product.
pub fn sampled_non_extendable(group: &Group, u: &StructureConstants) -> Option<String> {
    let mut gens: Vec<(String, AmbientElement)> = vec![("d".into(), group.d().clone())];
    for key in group.keys() {
        for r in saturation_scalars(group, key.ty) {
            gens.push((format!("({r})e({},{})", key.ty, key.idx), AmbientElement::basis(key).scale(&r)));
        }
    }
    let d = group.d();
    for (name, x) in &gens {
        for (left, right, label) in [(d, x, format!("d × {name}")), (x, d, format!("{name} × d"))] {
            if brute_beta(group, &product(u, left, right)).is_none() {
                return Some(label);
            }
        }
    }
    None
}
