//! Random instances: groups, elements, structure constants and endomorphisms.
//! Every generator is a pure function of the RNG state.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FuzzConfig;
use crate::arith::{int, lcm_all, PrimeSet, Rational};
use crate::element::{AmbientElement, Key};
use crate::endo::Endomorphism;
use crate::group::{BData, Group, GroupSpec, IdempotentType, TypeIdx};
use crate::mult::{PairKey, StructureConstants};

pub type FuzzRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of instance `index` of stream `stream` under the campaign seed `seed`.
pub fn instance_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ stream) ^ index)
}

pub fn rng(seed: u64) -> FuzzRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coprime_to(primes: &PrimeSet, x: i64) -> bool {
    x != 0 && primes.iter().all(|&p| x % p as i64 != 0)
}

fn incomparable(sets: &[PrimeSet]) -> bool {
    sets.iter().enumerate().all(|(i, a)| sets.iter().skip(i + 1).all(|b| !a.is_subset(b) && !b.is_subset(a)))
}

fn gen_prime_sets(cfg: &FuzzConfig, rng: &mut FuzzRng, count: usize) -> Option<Vec<PrimeSet>> {
    let pool: Vec<u64> = cfg.prime_pool.iter().copied().collect();
    if count == 1 {
        // a single type may be ℤ itself
        let size = rng.gen_range(0..=pool.len().min(2));
        return Some(pool.choose_multiple(rng, size).copied().collect::<PrimeSet>()).map(|s| vec![s]);
    }
    for _ in 0..64 {
        let sets: Vec<PrimeSet> = (0..count)
            .map(|_| {
                let size = rng.gen_range(1..=pool.len().min(2));
                pool.choose_multiple(rng, size).copied().collect()
            })
            .collect();
        if incomparable(&sets) {
            return Some(sets);
        }
    }
    None
}

fn m_candidates(cfg: &FuzzConfig, p_inf: &PrimeSet) -> Vec<i64> {
    (2..=cfg.max_m as i64).filter(|&m| coprime_to(p_inf, m)).collect()
}

fn pick_s(cfg: &FuzzConfig, rng: &mut FuzzRng, p_inf: &PrimeSet, m: i64) -> i64 {
    let bound = cfg.max_m as i64;
    let choices: Vec<i64> = (-bound..=bound).filter(|&s| coprime_to(p_inf, s) && s.gcd(&m) == 1).collect();
    *choices.choose(rng).expect("±1 always qualifies")
}

fn regulating(ms: &[i64]) -> bool {
    ms.iter().enumerate().all(|(i, m)| {
        let others: Vec<BigInt> = ms.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &x)| int(x)).collect();
        (lcm_all(&others) % m).is_zero()
    })
}

fn assemble(cfg: &FuzzConfig, rng: &mut FuzzRng, sets: Vec<PrimeSet>, b: BTreeMap<TypeIdx, i64>) -> GroupSpec {
    let mut spec = GroupSpec {
        types: sets.into_iter().enumerate().map(|(i, p)| IdempotentType::new(format!("t{i}"), p)).collect(),
        ..Default::default()
    };
    for (&ty, &m) in &b {
        let s = pick_s(cfg, rng, &spec.types[ty].p_inf, m);
        spec.b.insert(ty, BData { m: int(m), s: int(s) });
    }
    for ty in 0..spec.types.len() {
        let min_rank = usize::from(!b.contains_key(&ty));
        let rank = rng.gen_range(min_rank..=cfg.max_c_rank.max(min_rank));
        let slots: Vec<u32> = (1..=(cfg.max_c_rank as u32 + 2)).collect();
        let set: BTreeSet<u32> = slots.choose_multiple(rng, rank).copied().collect();
        if !set.is_empty() {
            spec.c.insert(ty, set);
        }
    }
    spec
}

/// A valid group with at least `min_b` `B`-types (no regulator condition).
pub fn gen_group_any(cfg: &FuzzConfig, rng: &mut FuzzRng, min_b: usize) -> Group {
    for _ in 0..256 {
        let count = rng.gen_range(min_b.max(1)..=cfg.max_types.max(min_b).max(1));
        let Some(sets) = gen_prime_sets(cfg, rng, count) else { continue };
        let mut b = BTreeMap::new();
        for (ty, p) in sets.iter().enumerate() {
            let ms = m_candidates(cfg, p);
            if !ms.is_empty() && rng.gen_bool(0.75) {
                b.insert(ty, *ms.choose(rng).expect("nonempty"));
            }
        }
        if b.len() < min_b {
            continue;
        }
        if let Ok(g) = Group::new(assemble(cfg, rng, sets, b)) {
            return g;
        }
    }
    panic!("configuration admits no group with {min_b} B-types: {cfg:?}");
}

/// A valid group whose `m_τ` each divide the lcm of the others, so that `A` is the
/// regulator of `G` (in particular `|T(B)| ≠ 1`).
pub fn gen_group(cfg: &FuzzConfig, rng: &mut FuzzRng) -> Group {
    for _ in 0..256 {
        let count = rng.gen_range(1..=cfg.max_types.max(1));
        let Some(sets) = gen_prime_sets(cfg, rng, count) else { continue };
        let cands: Vec<Vec<i64>> = sets.iter().map(|p| m_candidates(cfg, p)).collect();
        let eligible: Vec<TypeIdx> = (0..count).filter(|&t| !cands[t].is_empty()).collect();
        let mut b = BTreeMap::new();
        if eligible.len() >= 2 && rng.gen_bool(0.9) {
            let mut chosen: Vec<TypeIdx> = eligible.iter().copied().filter(|_| rng.gen_bool(0.8)).collect();
            if chosen.len() < 2 {
                chosen = eligible.choose_multiple(rng, 2).copied().collect();
                chosen.sort();
            }
            let draw = |rng: &mut FuzzRng| chosen.iter().map(|&t| *cands[t].choose(rng).expect("eligible")).collect::<Vec<_>>();
            let mut ms = None;
            for _ in 0..64 {
                let attempt = draw(rng);
                if regulating(&attempt) {
                    ms = Some(attempt);
                    break;
                }
            }
            if ms.is_none() {
                // a common value always regulates
                let common: Vec<i64> = (2..=cfg.max_m as i64).filter(|&m| chosen.iter().all(|&t| cands[t].contains(&m))).collect();
                ms = common.choose(rng).map(|&m| vec![m; chosen.len()]);
            }
            let Some(ms) = ms else { continue };
            b = chosen.into_iter().zip(ms).collect();
        }
        let group = match Group::new(assemble(cfg, rng, sets, b)) {
            Ok(g) => g,
            Err(_) => continue,
        };
        debug_assert!(group.regulator_exact());
        return group;
    }
    panic!("configuration admits no regulating group: {cfg:?}");
}

fn pool_vec(cfg: &FuzzConfig) -> Vec<u64> {
    cfg.prime_pool.iter().copied().collect()
}

/// A random element of `R_τ`, zero with probability `zero`.
pub fn gen_r(cfg: &FuzzConfig, rng: &mut FuzzRng, p_inf: &PrimeSet, zero: f64) -> Rational {
    if rng.gen_bool(zero) {
        return Rational::zero();
    }
    let mut num = int(rng.gen_range(1..=9));
    if rng.gen_bool(0.3) {
        num *= *pool_vec(cfg).choose(rng).expect("nonempty pool");
    }
    if rng.gen_bool(0.5) {
        num = -num;
    }
    let mut den = BigInt::one();
    for &p in p_inf {
        if rng.gen_bool(0.4) {
            den *= BigInt::from(p).pow(rng.gen_range(1..=2));
        }
    }
    Rational::new(num, den)
}

/// A unit `±∏ p^k` of `R_τ`, `|k| ≤ 2`.
pub fn gen_unit(rng: &mut FuzzRng, p_inf: &PrimeSet) -> Rational {
    let mut u = Rational::one();
    for &p in p_inf {
        let k: i32 = rng.gen_range(-2..=2);
        u *= Rational::from_integer(p.into()).pow(k);
    }
    if rng.gen_bool(0.5) {
        u = -u;
    }
    u
}

/// A random element of `A_τ` (support on type `ty`).
pub fn gen_a_tau(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group, ty: TypeIdx, zero: f64) -> AmbientElement {
    let p_inf = group.p_inf(ty).clone();
    AmbientElement::from_coords(group.indices(ty).iter().map(|&i| (Key::new(ty, i), gen_r(cfg, rng, &p_inf, zero))))
}

/// A random element of `A`.
pub fn gen_a(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group, zero: f64) -> AmbientElement {
    let mut out = AmbientElement::zero();
    for ty in 0..group.type_count() {
        out = &out + &gen_a_tau(cfg, rng, group, ty, zero);
    }
    out
}

/// `βd + a` with `β ∈ 0..n` and `a ∈ A` random.
pub fn gen_element(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group) -> AmbientElement {
    let n: u64 = group.n().try_into().expect("desk-scale n");
    let beta = int(rng.gen_range(0..n) as i64);
    let zero = [0.2, 0.5, 0.8].choose(rng).copied().expect("nonempty");
    &group.d().scale_int(&beta) + &gen_a(cfg, rng, group, zero)
}

/// An element of `G̃` that is usually outside `G`: a member plus a coordinate with a
/// foreign denominator.
pub fn gen_perturbed(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group) -> AmbientElement {
    let mut x = gen_element(cfg, rng, group);
    let keys: Vec<Key> = group.keys().collect();
    let key = *keys.choose(rng).expect("groups have a basis");
    let den: i64 = *[2i64, 3, 4, 5, 6, 7, 9, 11, 12].choose(rng).expect("nonempty");
    x.add_at(key, &Rational::new(int(rng.gen_range(1..den)), int(den)));
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultMode {
    /// Built from `(α, v, a)` witnesses, so the syntactic criterion holds.
    Conforming,
    /// Random `A_τ`-valued constants scaled by random divisors of `m_τ²`.
    Unconstrained,
    /// A conforming table with one entry replaced by an unconstrained one.
    Perturbed,
}

fn divisors(m: &BigInt) -> Vec<BigInt> {
    let m: i64 = m.try_into().expect("desk-scale m");
    (1..=m).filter(|d| m % d == 0).map(int).collect()
}

fn gen_conforming(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group) -> StructureConstants {
    let n: u64 = group.n().try_into().expect("desk-scale n");
    let alpha = int(rng.gen_range(0..n) as i64);
    let mut u = StructureConstants::zero();
    for ty in 0..group.type_count() {
        let b = group.b(ty).cloned();
        let m = b.as_ref().map(|b| Rational::from_integer(b.m.clone()));
        for &i in group.indices(ty) {
            for &j in group.indices(ty) {
                let value = match (&b, &m) {
                    (Some(b), Some(m)) if i == 0 && j == 0 => {
                        // m·(α s⁻¹ e₀ + m a₀₀)
                        let head = AmbientElement::monomial(Key::new(ty, 0), Rational::from_integer(&alpha * &b.s_inv));
                        let tail = gen_a_tau(cfg, rng, group, ty, 0.5).scale(m);
                        (&head + &tail).scale(m)
                    }
                    (Some(_), Some(m)) if i == 0 || j == 0 => {
                        if rng.gen_bool(0.5) {
                            gen_a_tau(cfg, rng, group, ty, 0.4).scale(m)
                        } else {
                            AmbientElement::zero()
                        }
                    }
                    _ => {
                        if rng.gen_bool(0.4) {
                            gen_a_tau(cfg, rng, group, ty, 0.5)
                        } else {
                            AmbientElement::zero()
                        }
                    }
                };
                u.set(PairKey::new(ty, i, j), value);
            }
        }
    }
    u
}

fn gen_unconstrained_entry(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group, ty: TypeIdx) -> AmbientElement {
    let a = gen_a_tau(cfg, rng, group, ty, 0.5);
    match group.b(ty) {
        Some(b) => {
            let ds = divisors(&(&b.m * &b.m));
            a.scale_int(ds.choose(rng).expect("1 divides"))
        }
        None => a,
    }
}

pub fn gen_mult(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group, mode: MultMode) -> StructureConstants {
    match mode {
        MultMode::Conforming => gen_conforming(cfg, rng, group),
        MultMode::Unconstrained => {
            let mut u = StructureConstants::zero();
            for ty in 0..group.type_count() {
                for &i in group.indices(ty) {
                    for &j in group.indices(ty) {
                        if rng.gen_bool(0.35) {
                            u.set(PairKey::new(ty, i, j), gen_unconstrained_entry(cfg, rng, group, ty));
                        }
                    }
                }
            }
            u
        }
        MultMode::Perturbed => {
            let mut u = gen_conforming(cfg, rng, group);
            let ty = rng.gen_range(0..group.type_count());
            let idx = group.indices(ty);
            let (i, j) = (*idx.choose(rng).expect("types have indices"), *idx.choose(rng).expect("types have indices"));
            u.set(PairKey::new(ty, i, j), gen_unconstrained_entry(cfg, rng, group, ty));
            u
        }
    }
}

/// A random member of the endomorphism family.
pub fn gen_endo(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group) -> Endomorphism {
    let n: i64 = group.n().try_into().expect("desk-scale n");
    let mut phi = Endomorphism { alpha: int(rng.gen_range(-n - 2..=n + 2)), ..Default::default() };
    for ty in 0..group.type_count() {
        let p_inf = group.p_inf(ty).clone();
        if group.b(ty).is_some() {
            for &i in group.indices(ty) {
                let c = gen_r(cfg, rng, &p_inf, 0.5);
                if !c.is_zero() {
                    phi.y.insert(Key::new(ty, i), c);
                }
            }
        }
        for &i in group.c_indices(ty) {
            for &j in group.indices(ty) {
                let c = gen_r(cfg, rng, &p_inf, 0.5);
                if !c.is_zero() {
                    phi.w.insert((ty, i, j), c);
                }
            }
        }
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mult::check_24;

    #[test]
    fn generators_respect_their_contracts() {
        let cfg = FuzzConfig::default();
        for i in 0..200 {
            let mut r = rng(instance_seed(7, 0, i));
            let g = gen_group(&cfg, &mut r);
            assert!(g.regulator_exact());
            assert!(g.type_count() <= cfg.max_types);
            assert!(g.b_types().all(|(_, b)| b.m <= int(cfg.max_m as i64)));
            assert!((0..g.type_count()).all(|t| g.c_indices(t).len() <= cfg.max_c_rank));
            let x = gen_element(&cfg, &mut r, &g);
            assert!(g.member_g(&x).unwrap().is_some());
            let u = gen_mult(&cfg, &mut r, &g, MultMode::Conforming);
            g.check_constants(&u).unwrap();
            assert!(check_24(&g, &u).is_ok());
            gen_endo(&cfg, &mut r, &g).validate(&g).unwrap();
            let any = gen_group_any(&cfg, &mut r, 2);
            assert!(any.b_types().count() >= 2);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let cfg = FuzzConfig::default();
        let run = |seed| {
            let mut r = rng(seed);
            let g = gen_group_any(&cfg, &mut r, 0);
            (g.spec().clone(), gen_element(&cfg, &mut r, &g))
        };
        assert_eq!(run(11), run(11));
        assert_ne!(instance_seed(1, 2, 3), instance_seed(1, 3, 2));
    }
}
