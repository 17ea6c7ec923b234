//! Algebraic invariants under proptest. Group-level properties draw a seed and build the
//! instance with the campaign generators, so a failing seed reproduces exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use absideal_core::arith::{crt, int, lcm_all, mod_inverse, modulo, p0_part, PrimeSet, Rational, Residue};
use absideal_core::element::AmbientElement;
use absideal_core::endo::endo_apply;
use absideal_core::ideal::{ideal_member, ideal_of, in_l};
use absideal_core::verify::gen::{gen_element, gen_endo, gen_group_any, rng};
use absideal_core::verify::FuzzConfig;

fn primes() -> impl Strategy<Value = PrimeSet> {
    proptest::sample::subsequence(vec![2u64, 3, 5, 7], 0..=2).prop_map(|v| v.into_iter().collect())
}

// a nonzero element of Z[1/p : p ∈ primes]
fn ring_element(primes: PrimeSet) -> impl Strategy<Value = (PrimeSet, Rational)> {
    let pool: Vec<u64> = primes.iter().copied().collect();
    (-500i64..500, proptest::collection::vec(0usize..4, pool.len())).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(move |(n, exps)| {
        let den: BigInt = pool.iter().zip(&exps).map(|(&p, &e)| BigInt::from(p).pow(e as u32)).product();
        (primes.clone(), Rational::new(int(n), den))
    })
}

fn config() -> FuzzConfig {
    FuzzConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn p0_part_is_multiplicative(
        (p, a) in primes().prop_flat_map(ring_element),
        b in -500i64..500,
        e in 0u32..4,
    ) {
        prop_assume!(b != 0);
        let den = p.iter().next().map_or(BigInt::one(), |&q| BigInt::from(q).pow(e));
        let b = Rational::new(int(b), den);
        let ab = p0_part(&p, &(&a * &b)).unwrap();
        prop_assert_eq!(ab, p0_part(&p, &a).unwrap() * p0_part(&p, &b).unwrap());
        let abar = p0_part(&p, &a).unwrap();
        prop_assert!(p.iter().all(|&q| !(&abar % BigInt::from(q)).is_zero()));
    }

    #[test]
    fn crt_agrees_with_search(system in proptest::collection::vec((0i64..100, 1i64..25), 0..4)) {
        let residues: Vec<Residue> = system.iter().map(|&(r, m)| Residue::new(r, m).unwrap()).collect();
        let moduli: Vec<BigInt> = system.iter().map(|&(_, m)| int(m)).collect();
        let l = lcm_all(&moduli);
        prop_assume!(l <= int(10_000));
        let first = (0..i64::try_from(&l).unwrap()).find(|&x| residues.iter().all(|r| r.contains(&int(x))));
        match crt(&residues) {
            Some(sol) => {
                prop_assert_eq!(sol.modulus(), &l);
                prop_assert_eq!(Some(sol.residue().clone()), first.map(int));
            }
            None => prop_assert_eq!(first, None),
        }
    }

    #[test]
    fn mod_inverse_inverts_units(s in -1000i64..1000, m in 1i64..500) {
        let (s, m) = (int(s), int(m));
        match mod_inverse(&s, &m) {
            Ok(inv) => {
                prop_assert!(s.gcd(&m).is_one());
                prop_assert_eq!(modulo(&(&s * &inv), &m), modulo(&int(1), &m));
                prop_assert!(inv >= BigInt::zero() && inv < m);
            }
            Err(_) => prop_assert!(!s.gcd(&m).is_one()),
        }
    }

    #[test]
    fn membership_is_additive(seed in any::<u64>()) {
        let cfg = config();
        let mut r = rng(seed);
        let group = gen_group_any(&cfg, &mut r, 0);
        let (x, y) = (gen_element(&cfg, &mut r, &group), gen_element(&cfg, &mut r, &group));
        let bx = group.member_g(&x).unwrap().expect("generated member").beta;
        let by = group.member_g(&y).unwrap().expect("generated member").beta;
        let bs = group.member_g(&(&x + &y)).unwrap().expect("sums stay in G").beta;
        prop_assert_eq!(bs.residue(), &modulo(&(bx.residue() + by.residue()), group.n()));
        let bn = group.member_g(&-&x).unwrap().expect("negatives stay in G").beta;
        prop_assert_eq!(bn.residue(), &modulo(&-bx.residue(), group.n()));
    }

    #[test]
    fn projections_sum_to_the_element(seed in any::<u64>()) {
        let cfg = config();
        let mut r = rng(seed);
        let group = gen_group_any(&cfg, &mut r, 0);
        let x = gen_element(&cfg, &mut r, &group);
        let mut sum = AmbientElement::zero();
        for ty in 0..group.type_count() {
            let p = group.project(ty, &x).unwrap();
            prop_assert!(p.iter().all(|(k, _)| k.ty == ty));
            sum = &sum + &p;
        }
        prop_assert_eq!(sum, x);
    }

    #[test]
    fn principal_ideals_are_subgroups(seed in any::<u64>(), k in 0i64..50) {
        let cfg = config();
        let mut r = rng(seed);
        let group = gen_group_any(&cfg, &mut r, 0);
        let g = gen_element(&cfg, &mut r, &group);
        let ideal = ideal_of(&group, &g).unwrap();
        let kx = g.scale_int(&int(k));
        prop_assert!(ideal_member(&group, &ideal, &kx).unwrap().is_some());
        let y = gen_element(&cfg, &mut r, &group);
        let z = &(&kx + &y) - &y;
        let kz = ideal_member(&group, &ideal, &z).unwrap().expect("kg ∈ ⟨g⟩+L");
        prop_assert!(in_l(&group, &ideal.ell, &g.scale_int(&(kz - k))));
        let x = gen_element(&cfg, &mut r, &group);
        if let Some(kx) = ideal_member(&group, &ideal, &x).unwrap() {
            let ks = ideal_member(&group, &ideal, &(&x + &g)).unwrap().expect("closed under + g");
            // witnesses are unique modulo the order of g in G/L
            prop_assert!(in_l(&group, &ideal.ell, &g.scale_int(&(ks - kx - 1))));
            prop_assert!(ideal_member(&group, &ideal, &-&x).unwrap().is_some());
        }
    }

    #[test]
    fn endomorphisms_are_additive(seed in any::<u64>()) {
        let cfg = config();
        let mut r = rng(seed);
        let group = gen_group_any(&cfg, &mut r, 0);
        let phi = gen_endo(&cfg, &mut r, &group);
        let (x, y) = (gen_element(&cfg, &mut r, &group), gen_element(&cfg, &mut r, &group));
        let fx = endo_apply(&group, &phi, &x).unwrap();
        let fy = endo_apply(&group, &phi, &y).unwrap();
        prop_assert_eq!(endo_apply(&group, &phi, &(&x + &y)).unwrap(), &fx + &fy);
        prop_assert!(group.member_g(&fx).unwrap().is_some());
    }
}
