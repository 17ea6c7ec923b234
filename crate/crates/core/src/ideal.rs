//! Principal absolute ideals `⟨g⟩_AI = ⟨g⟩ + ⊕ ℓ_τ(g) A_τ`, their membership test,
//! finite sums of them, and the identity `Σ b_i A_τ = ℓ A_τ` with explicit certificates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{crt, ext_gcd, gcd_all, modulo, p0_part, reduce_mod, solve_linear, Rational, Residue};
use crate::element::{AmbientElement, Key};
use crate::error::Error;
use crate::group::{Group, TypeIdx};

/// The `τ`-data of `x`: `r_τ = m_τ·x(τ,0)` first when `τ ∈ T(B)`, then `a_i^(τ)` for each
/// `i ∈ I_τ(C)` (zeros included).
pub fn tau_data(group: &Group, x: &AmbientElement, ty: TypeIdx) -> Vec<Rational> {
    let mut out = Vec::with_capacity(group.indices(ty).len());
    if let Some(b) = group.b(ty) {
        out.push(x.get(Key::new(ty, 0)) * Rational::from_integer(b.m.clone()));
    }
    out.extend(group.c_indices(ty).iter().map(|&i| x.get(Key::new(ty, i))));
    out
}

/// `ℓ_τ(g) = gcd(r̄_τ, {ā_i^(τ)})` for every type, indexed by type.
pub fn ell_tau(group: &Group, g: &AmbientElement) -> Result<Vec<BigInt>, Error> {
    if group.member_g(g)?.is_none() {
        return Err(Error::NotMember);
    }
    (0..group.type_count())
        .map(|ty| {
            let bars = tau_data(group, g, ty).iter().map(|a| p0_part(group.p_inf(ty), a)).collect::<Result<Vec<_>, _>>()?;
            Ok(gcd_all(&bars))
        })
        .collect()
}

/// `⟨g⟩ + ⊕_τ ℓ_τ A_τ`, stored as the pair `(g, {ℓ_τ})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalIdeal {
    pub g: AmbientElement,
    pub beta: Residue,
    pub ell: Vec<BigInt>,
}

pub fn ideal_of(group: &Group, g: &AmbientElement) -> Result<PrincipalIdeal, Error> {
    let cert = group.member_g(g)?.ok_or(Error::NotMember)?;
    let ell = ell_tau(group, g)?;
    Ok(PrincipalIdeal { g: g.clone(), beta: cert.beta, ell })
}

/// `z ∈ L = ⊕ ℓ_τ A_τ`, coordinate-wise.
pub fn in_l(group: &Group, ell: &[BigInt], z: &AmbientElement) -> bool {
    z.iter().all(|(k, c)| {
        let l = &ell[k.ty];
        !l.is_zero() && group.in_r(k.ty, &(c / Rational::from_integer(l.clone())))
    })
}

/// Decides `x ∈ ⟨g⟩ + L`; the witness `k ∈ 0..n` satisfies `x − k·g ∈ L`.
pub fn ideal_member(group: &Group, ideal: &PrincipalIdeal, x: &AmbientElement) -> Result<Option<BigInt>, Error> {
    let Some(cx) = group.member_g(x)? else {
        return Ok(None);
    };
    Ok(solve_multiplier(group, &ideal.ell, &ideal.g, ideal.beta.residue(), x, cx.beta.residue()))
}

// Finds k with x − k·g ∈ L. Searching k modulo n is complete: n·g ∈ L because every m_τ
// divides n (clearing the e₀-denominators) and ℓ_τ divides each τ-datum of g.
fn solve_multiplier(
    group: &Group,
    ell: &[BigInt],
    g: &AmbientElement,
    beta_g: &BigInt,
    x: &AmbientElement,
    beta_x: &BigInt,
) -> Option<BigInt> {
    let n = group.n();
    // x − k·g ∈ A  ⇔  k·β_g ≡ β_x (mod n)
    let k_class = solve_linear(beta_g, beta_x, n)?;
    let step = k_class.modulus().clone();
    let z0 = x - &g.scale_int(k_class.residue());
    let w = g.scale_int(&step);
    // remaining freedom k = k0 + t·step; each coordinate gives t·[w] ≡ [z0] (mod ℓ_τ)
    let mut constraints = Vec::new();
    for (ty, l) in ell.iter().enumerate() {
        for &i in group.indices(ty) {
            let key = Key::new(ty, i);
            let (zc, wc) = (z0.get(key), w.get(key));
            if l.is_zero() {
                if !zc.is_zero() || !wc.is_zero() {
                    return None;
                }
                continue;
            }
            let a = reduce_mod(&wc, l).expect("w ∈ A");
            let b = reduce_mod(&zc, l).expect("z0 ∈ A");
            constraints.push(solve_linear(&a, &b, l)?);
        }
    }
    let t = crt(&constraints)?;
    let k = modulo(&(k_class.residue() + t.residue() * &step), n);
    debug_assert!(in_l(group, ell, &(x - &g.scale_int(&k))));
    Some(k)
}

/// Unit factorization `b = ā·u` with `ā = ℓ·cofactor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitFactor {
    pub abar: BigInt,
    pub unit: Rational,
    pub cofactor: BigInt,
}

/// Certificates for `Σ b_i A_τ = ℓ A_τ`: (⊆) the unit factorizations, (⊇) Bézout
/// coefficients with `Σ y_i ā_i = ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdSumCertificate {
    pub ty: TypeIdx,
    pub ell: BigInt,
    pub factors: Vec<UnitFactor>,
    pub bezout: Vec<BigInt>,
}

pub fn gcd_sum_identity(group: &Group, ty: TypeIdx, b: &[Rational]) -> Result<GcdSumCertificate, Error> {
    if ty >= group.type_count() {
        return Err(Error::UnknownType(ty));
    }
    let p_inf = group.p_inf(ty);
    let bars = b.iter().map(|x| p0_part(p_inf, x)).collect::<Result<Vec<_>, _>>()?;
    let mut ell = BigInt::zero();
    let mut bezout: Vec<BigInt> = Vec::with_capacity(bars.len());
    for a in &bars {
        let (g, x, y) = ext_gcd(&ell, a);
        for c in bezout.iter_mut() {
            *c *= &x;
        }
        bezout.push(y);
        ell = g;
    }
    let factors = b
        .iter()
        .zip(&bars)
        .map(|(x, abar)| {
            let unit = if abar.is_zero() { Rational::one() } else { x / Rational::from_integer(abar.clone()) };
            let cofactor = if ell.is_zero() { BigInt::zero() } else { abar / &ell };
            UnitFactor { abar: abar.clone(), unit, cofactor }
        })
        .collect();
    Ok(GcdSumCertificate { ty, ell, factors, bezout })
}

impl GcdSumCertificate {
    /// Checks both certificates against `b`.
    pub fn verify(&self, group: &Group, b: &[Rational]) -> bool {
        let p_inf = group.p_inf(self.ty);
        if b.len() != self.factors.len() || b.len() != self.bezout.len() {
            return false;
        }
        let factorizations = b.iter().zip(&self.factors).all(|(x, f)| {
            crate::arith::is_unit(p_inf, &f.unit)
                && *x == Rational::from_integer(f.abar.clone()) * &f.unit
                && &self.ell * &f.cofactor == f.abar
        });
        let combination: BigInt = self.factors.iter().zip(&self.bezout).map(|(f, y)| &f.abar * y).sum();
        factorizations && combination == self.ell
    }

    /// Given `x ∈ A_τ`, returns `x_i ∈ A_τ` with `Σ b_i x_i = ℓ x` (namely `x_i = y_i u_i⁻¹ x`).
    pub fn express(&self, x: &AmbientElement) -> Vec<AmbientElement> {
        self.factors.iter().zip(&self.bezout).map(|(f, y)| x.scale(&(Rational::from_integer(y.clone()) / &f.unit))).collect()
    }
}

/// A finitely generated absolute ideal `Σ_j ⟨g_j⟩_AI = Σ_j ⟨g_j⟩ + ⊕_τ gcd_j(ℓ_τ(g_j)) A_τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbsoluteIdeal {
    pub generators: Vec<PrincipalIdeal>,
    pub ell: Vec<BigInt>,
}

pub const MAX_SUM_GENERATORS: usize = 3;

pub fn ideal_sum(group: &Group, ideals: &[PrincipalIdeal]) -> Result<FiniteAbsoluteIdeal, Error> {
    if ideals.len() > MAX_SUM_GENERATORS {
        return Err(Error::TooManyGenerators { max: MAX_SUM_GENERATORS, got: ideals.len() });
    }
    let ell = (0..group.type_count()).map(|ty| ideals.iter().fold(BigInt::zero(), |acc, i| acc.gcd(&i.ell[ty]))).collect();
    Ok(FiniteAbsoluteIdeal { generators: ideals.to_vec(), ell })
}

impl FiniteAbsoluteIdeal {
    /// Decides membership; the witness gives one multiplier per generator, each in `0..n`.
    pub fn member(&self, group: &Group, x: &AmbientElement) -> Result<Option<Vec<BigInt>>, Error> {
        let Some(cx) = group.member_g(x)? else {
            return Ok(None);
        };
        let Some((last, rest)) = self.generators.split_last() else {
            return Ok(in_l(group, &self.ell, x).then(Vec::new));
        };
        let n = group.n().clone();
        // the first generators are searched exhaustively, the last one is solved for
        let mut ks = vec![BigInt::zero(); rest.len()];
        loop {
            let mut y = x.clone();
            let mut beta = cx.beta.residue().clone();
            for (k, gen) in ks.iter().zip(rest) {
                y = &y - &gen.g.scale_int(k);
                beta -= k * gen.beta.residue();
            }
            let beta = modulo(&beta, &n);
            if let Some(k_last) = solve_multiplier(group, &self.ell, &last.g, last.beta.residue(), &y, &beta) {
                let mut out = ks.clone();
                out.push(k_last);
                return Ok(Some(out));
            }
            let mut pos = 0;
            loop {
                if pos == ks.len() {
                    return Ok(None);
                }
                ks[pos] += 1;
                if ks[pos] < n {
                    break;
                }
                ks[pos] = BigInt::zero();
                pos += 1;
            }
        }
    }
}
