//! Exact integer and rational arithmetic over the rings `R_τ = Z[1/p : p ∈ P∞(τ)]`.
//!
//! Integers are arbitrary precision (`num-bigint`); rationals are `num-rational`
//! ratios, always kept in lowest terms with a positive denominator.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// A finite set of primes, e.g. `P∞(τ)`.
pub type PrimeSet = BTreeSet<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{value} is not an element of the ring (denominator is not a P∞-number)")]
    NotInRing { value: String },
    #[error("{s} is not invertible modulo {m}")]
    NotInvertible { s: BigInt, m: BigInt },
    #[error("modulus must be positive, got {0}")]
    BadModulus(BigInt),
}

/// Returns `|n|` with every prime of `primes` divided out. Zero maps to zero.
pub fn strip_primes(primes: &PrimeSet, n: &BigInt) -> BigInt {
    let mut rest = n.abs();
    if rest.is_zero() {
        return rest;
    }
    for &p in primes {
        let p = BigInt::from(p);
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
        }
    }
    rest
}

/// True iff `n ≠ 0` and every prime factor of `|n|` lies in `primes`.
pub fn is_p_number(primes: &PrimeSet, n: &BigInt) -> bool {
    !n.is_zero() && strip_primes(primes, n).is_one()
}

/// True iff the denominator of `a` is a `primes`-number, i.e. `a ∈ Z[1/p : p ∈ primes]`.
pub fn in_ring(primes: &PrimeSet, a: &Rational) -> bool {
    is_p_number(primes, a.denom())
}

/// The positive `P₀`-part `ā` of `a ∈ R_τ`: the unique positive integer with no
/// prime factor in `p_inf` such that `a / ā` is a unit of `R_τ`; `0̄ = 0`.
pub fn p0_part(p_inf: &PrimeSet, a: &Rational) -> Result<BigInt, ArithError> {
    if !in_ring(p_inf, a) {
        return Err(ArithError::NotInRing { value: a.to_string() });
    }
    Ok(strip_primes(p_inf, a.numer()))
}

/// The unit `u` of `R_τ` with `a = ā·u`, for nonzero `a ∈ R_τ`.
pub fn unit_part(p_inf: &PrimeSet, a: &Rational) -> Result<Rational, ArithError> {
    let abar = p0_part(p_inf, a)?;
    if abar.is_zero() {
        return Err(ArithError::NotInRing { value: "0 has no unit part".into() });
    }
    Ok(a / Rational::from_integer(abar))
}

/// True iff `a` is a unit of `R_τ`: numerator and denominator are both `p_inf`-numbers.
pub fn is_unit(p_inf: &PrimeSet, a: &Rational) -> bool {
    is_p_number(p_inf, a.numer()) && is_p_number(p_inf, a.denom())
}

/// Least nonnegative representative of `a mod m`.
pub fn modulo(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Extended gcd with a nonnegative gcd: returns `(g, x, y)` with `a·x + b·y = g`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// The inverse of `s` modulo `m`, in `0..m`.
pub fn mod_inverse(s: &BigInt, m: &BigInt) -> Result<BigInt, ArithError> {
    if !m.is_positive() {
        return Err(ArithError::BadModulus(m.clone()));
    }
    let (g, x, _) = ext_gcd(s, m);
    if !g.is_one() {
        return Err(ArithError::NotInvertible { s: s.clone(), m: m.clone() });
    }
    Ok(modulo(&x, m))
}

/// The class of `a ∈ R_τ` in `R_τ / m R_τ ≅ Z/m`, for `m` a `P₀(τ)`-number.
///
/// Returns `None` when the denominator of `a` is not invertible modulo `m`.
pub fn reduce_mod(a: &Rational, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(a.denom(), m).ok()?;
    Some(modulo(&(a.numer() * inv), m))
}

/// A residue class `residue mod modulus` with `0 ≤ residue < modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    residue: BigInt,
    modulus: BigInt,
}

impl Residue {
    pub fn new(residue: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Result<Self, ArithError> {
        let modulus = modulus.into();
        if !modulus.is_positive() {
            return Err(ArithError::BadModulus(modulus));
        }
        let residue = modulo(&residue.into(), &modulus);
        Ok(Self { residue, modulus })
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        modulo(x, &self.modulus) == self.residue
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Generalized CRT by pairwise merging. `None` means the system is unsolvable.
/// An empty system is the vacuous class `0 mod 1`.
pub fn crt(constraints: &[Residue]) -> Option<Residue> {
    let mut acc = Residue { residue: BigInt::zero(), modulus: BigInt::one() };
    for c in constraints {
        acc = crt_pair(&acc, c)?;
    }
    Some(acc)
}

fn crt_pair(a: &Residue, b: &Residue) -> Option<Residue> {
    let (g, p, _) = ext_gcd(&a.modulus, &b.modulus);
    let diff = &b.residue - &a.residue;
    let (q, r) = diff.div_rem(&g);
    if !r.is_zero() {
        return None;
    }
    let step = &b.modulus / &g;
    let t = modulo(&(q * p), &step);
    let lcm = &a.modulus * &step;
    Some(Residue { residue: modulo(&(&a.residue + &a.modulus * t), &lcm), modulus: lcm })
}

/// Solves `a·x ≡ b (mod m)`; the solution set is a residue class modulo `m / gcd(a, m)`.
pub fn solve_linear(a: &BigInt, b: &BigInt, m: &BigInt) -> Option<Residue> {
    let (g, x, _) = ext_gcd(&modulo(a, m), m);
    let (q, r) = b.div_rem(&g);
    if !r.is_zero() {
        return None;
    }
    Residue::new(q * x, m / &g).ok()
}

pub fn lcm_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x))
}

/// gcd of a family of integers; the empty / all-zero family has gcd 0.
pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

const SIEVE_LIMIT: usize = 1000;

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT + 1];
        let mut primes = Vec::new();
        for i in 2..=SIEVE_LIMIT {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= SIEVE_LIMIT {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization of `|n|` by trial division (table of primes below 1000,
/// then odd trial divisors). Only intended for desk-scale values.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    if rest.is_zero() {
        return out;
    }
    let mut push = |rest: &mut BigInt, p: BigInt| {
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            *rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    for &p in small_primes() {
        if rest.is_one() {
            return out;
        }
        push(&mut rest, BigInt::from(p));
    }
    let mut d = BigInt::from(SIEVE_LIMIT as u64 + 1);
    while &d * &d <= rest {
        push(&mut rest, d.clone());
        d += 2;
    }
    if !rest.is_one() {
        out.push((rest, 1));
    }
    out
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// `n` as an `i64` when it fits.
pub fn small(n: &BigInt) -> Option<i64> {
    n.to_i64()
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn primes(ps: &[u64]) -> PrimeSet {
        ps.iter().copied().collect()
    }

    #[test]
    fn p0_part_examples() {
        let two = primes(&[2]);
        assert_eq!(p0_part(&two, &rat(0, 1)).unwrap(), int(0));
        assert_eq!(p0_part(&two, &rat(3, 2)).unwrap(), int(3));
        assert_eq!(p0_part(&two, &rat(-6, 1)).unwrap(), int(3));
        assert!(p0_part(&two, &rat(1, 3)).is_err());
    }

    #[test]
    fn crt_examples() {
        let r = |a: i64, m: i64| Residue::new(a, m).unwrap();
        assert_eq!(crt(&[r(2, 3), r(1, 2)]), Some(r(5, 6)));
        assert_eq!(crt(&[r(1, 4), r(2, 6)]), None);
        assert_eq!(crt(&[r(0, 1)]), Some(r(0, 1)));
        assert_eq!(crt(&[r(3, 4), r(1, 6)]), Some(r(7, 12)));
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(&int(1), &int(3)).unwrap(), int(1));
        assert_eq!(mod_inverse(&int(5), &int(12)).unwrap(), int(5));
        assert!(mod_inverse(&int(3), &int(6)).is_err());
        assert_eq!(mod_inverse(&int(-1), &int(7)).unwrap(), int(6));
        assert_eq!(mod_inverse(&int(4), &int(1)).unwrap(), int(0));
    }

    #[test]
    fn p_number_examples() {
        assert!(is_p_number(&primes(&[2, 3]), &int(12)));
        assert!(!is_p_number(&primes(&[2]), &int(6)));
        assert!(is_p_number(&primes(&[]), &int(1)));
        assert!(is_p_number(&primes(&[]), &int(-1)));
        assert!(!is_p_number(&primes(&[2]), &int(0)));
    }

    #[test]
    fn reduce_mod_clears_unit_denominators() {
        // 1/2 mod 3 = 2
        assert_eq!(reduce_mod(&rat(1, 2), &int(3)), Some(int(2)));
        assert_eq!(reduce_mod(&rat(-5, 4), &int(3)), Some(int(1)));
        assert_eq!(reduce_mod(&rat(1, 3), &int(3)), None);
    }

    #[test]
    fn linear_congruences() {
        assert_eq!(solve_linear(&int(4), &int(2), &int(6)), Some(Residue::new(2, 3).unwrap()));
        assert_eq!(solve_linear(&int(4), &int(3), &int(6)), None);
        assert_eq!(solve_linear(&int(0), &int(0), &int(5)), Some(Residue::new(0, 1).unwrap()));
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(&int(360)), vec![(int(2), 3), (int(3), 2), (int(5), 1)]);
        assert_eq!(factorize(&int(1_000_003 * 2)), vec![(int(2), 1), (int(1_000_003), 1)]);
        assert!(factorize(&int(1)).is_empty());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("6/4"), Some(rat(3, 2)));
        assert_eq!(parse_rational("-7"), Some(rat(-7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(rat(3, 2).to_string(), "3/2");
        assert_eq!(rat(4, 2).to_string(), "2");
    }
}
