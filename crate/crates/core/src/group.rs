//! Groups in standard representation: critical types, the `B`/`C` split,
//! the invariants `m_τ`, the numerators `s_τ`, and the derived data `n(G)` and `d`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{self, is_prime, lcm_all, mod_inverse, PrimeSet, Rational};
use crate::element::{AmbientElement, Key};

/// Position of a type in [`GroupSpec::types`].
pub type TypeIdx = usize;

/// An idempotent type, represented by the finite set `P∞(τ)` of primes inverted in `R_τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdempotentType {
    pub name: String,
    pub p_inf: PrimeSet,
}

impl IdempotentType {
    pub fn new(name: impl Into<String>, p_inf: impl IntoIterator<Item = u64>) -> Self {
        Self { name: name.into(), p_inf: p_inf.into_iter().collect() }
    }
}

/// True iff `a ∈ R_τ`.
pub fn in_r_tau(tau: &IdempotentType, a: &Rational) -> bool {
    arith::in_ring(&tau.p_inf, a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BData {
    pub m: BigInt,
    pub s: BigInt,
}

/// The principal-decomposition data of a group `G = ⟨d, A⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupSpec {
    pub types: Vec<IdempotentType>,
    /// `τ ↦ (m_τ, s_τ)` for `τ ∈ T(B)`.
    pub b: BTreeMap<TypeIdx, BData>,
    /// `τ ↦ I_τ(C)`; empty sets are allowed and mean `τ ∉ T(C)`.
    pub c: BTreeMap<TypeIdx, BTreeSet<u32>>,
}

impl GroupSpec {
    pub fn type_index(&self, name: &str) -> Option<TypeIdx> {
        self.types.iter().position(|t| t.name == name)
    }

    pub fn with_type(mut self, name: &str, p_inf: &[u64]) -> Self {
        self.types.push(IdempotentType::new(name, p_inf.iter().copied()));
        self
    }

    pub fn with_b(mut self, ty: TypeIdx, m: i64, s: i64) -> Self {
        self.b.insert(ty, BData { m: m.into(), s: s.into() });
        self
    }

    pub fn with_c(mut self, ty: TypeIdx, indices: &[u32]) -> Self {
        self.c.entry(ty).or_default().extend(indices.iter().copied());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotPrime { ty: String, p: u64 },
    DuplicateName(String),
    UnknownTypeIndex(TypeIdx),
    Comparable { smaller: String, larger: String },
    DeadType(String),
    ModulusNotAboveOne(String),
    NotCoprime(String),
    MNotP0Number(String),
    SNotP0Number(String),
    ZeroCIndex(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotPrime { ty, p } => write!(f, "{ty}: {p} in p_inf is not a prime"),
            Violation::DuplicateName(n) => write!(f, "duplicate type name {n}"),
            Violation::UnknownTypeIndex(i) => write!(f, "reference to unknown type #{i}"),
            Violation::Comparable { smaller, larger } => {
                write!(f, "types {smaller} and {larger} are comparable (p_inf of {smaller} is a subset of {larger})")
            }
            Violation::DeadType(n) => write!(f, "{n}: neither m > 1 nor a nonempty C index set"),
            Violation::ModulusNotAboveOne(n) => write!(f, "{n}: m must be greater than 1"),
            Violation::NotCoprime(n) => write!(f, "{n}: gcd(s, m) != 1"),
            Violation::MNotP0Number(n) => write!(f, "{n}: m is not a P0-number"),
            Violation::SNotP0Number(n) => write!(f, "{n}: s is not a P0-number"),
            Violation::ZeroCIndex(n) => write!(f, "{n}: index 0 is reserved for the B-summand"),
        }
    }
}

/// `n(G)` and the element `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedData {
    pub n: BigInt,
    pub d: AmbientElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub derived: Option<DerivedData>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Per-type data of a `B`-type, cached at validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BInfo {
    pub m: BigInt,
    pub s: BigInt,
    /// `s_τ⁻¹ mod m_τ`, in `0..m_τ`.
    pub s_inv: BigInt,
    /// `lcm{m_σ : σ ∈ T(B), σ ≠ τ}` (1 if there is no other `B`-type).
    pub others_lcm: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeInfo {
    pub b: Option<BInfo>,
    /// `I_τ(C)`, sorted.
    pub c: Vec<u32>,
    /// `I_τ = I_τ(B) ∪ I_τ(C)`, sorted (so `0` comes first for `B`-types).
    pub indices: Vec<u32>,
}

/// A validated group. Immutable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    spec: GroupSpec,
    n: BigInt,
    d: AmbientElement,
    info: Vec<TypeInfo>,
}

pub fn validate(spec: &GroupSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let count = spec.types.len();
    let name = |i: TypeIdx| spec.types[i].name.clone();

    let mut seen = BTreeSet::new();
    for t in &spec.types {
        if !seen.insert(t.name.as_str()) {
            violations.push(Violation::DuplicateName(t.name.clone()));
        }
        for &p in &t.p_inf {
            if !is_prime(p) {
                violations.push(Violation::NotPrime { ty: t.name.clone(), p });
            }
        }
    }
    for &i in spec.b.keys().chain(spec.c.keys()) {
        if i >= count {
            violations.push(Violation::UnknownTypeIndex(i));
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations, derived: None };
    }

    for a in 0..count {
        for b in 0..count {
            if a != b && spec.types[a].p_inf.is_subset(&spec.types[b].p_inf) {
                // equal sets are reported once
                if spec.types[a].p_inf == spec.types[b].p_inf && a > b {
                    continue;
                }
                violations.push(Violation::Comparable { smaller: name(a), larger: name(b) });
            }
        }
    }
    for i in 0..count {
        let c_nonempty = spec.c.get(&i).is_some_and(|s| !s.is_empty());
        if !spec.b.contains_key(&i) && !c_nonempty {
            violations.push(Violation::DeadType(name(i)));
        }
        if spec.c.get(&i).is_some_and(|s| s.contains(&0)) {
            violations.push(Violation::ZeroCIndex(name(i)));
        }
    }
    for (&i, bd) in &spec.b {
        let p_inf = &spec.types[i].p_inf;
        if bd.m <= BigInt::one() {
            violations.push(Violation::ModulusNotAboveOne(name(i)));
            continue;
        }
        if !bd.s.gcd(&bd.m).is_one() {
            violations.push(Violation::NotCoprime(name(i)));
        }
        if !coprime_to(p_inf, &bd.m) {
            violations.push(Violation::MNotP0Number(name(i)));
        }
        if bd.s.is_zero() || !coprime_to(p_inf, &bd.s) {
            violations.push(Violation::SNotP0Number(name(i)));
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations, derived: None };
    }
    let n = lcm_all(spec.b.values().map(|b| &b.m));
    let mut d = AmbientElement::zero();
    for (&i, bd) in &spec.b {
        d.set(Key::new(i, 0), Rational::new(bd.s.clone(), bd.m.clone()));
    }
    ValidationReport { violations, derived: Some(DerivedData { n, d }) }
}

// A P₀(τ)-number is a nonzero integer with no prime factor in P∞(τ).
fn coprime_to(p_inf: &PrimeSet, x: &BigInt) -> bool {
    !x.is_zero() && p_inf.iter().all(|&p| !(x % BigInt::from(p)).is_zero())
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self, ValidationReport> {
        let report = validate(&spec);
        let Some(DerivedData { n, d }) = report.derived.clone() else {
            return Err(report);
        };
        let info = (0..spec.types.len())
            .map(|i| {
                let b = spec.b.get(&i).map(|bd| {
                    let others_lcm = lcm_all(spec.b.iter().filter(|(&j, _)| j != i).map(|(_, o)| &o.m));
                    BInfo { m: bd.m.clone(), s: bd.s.clone(), s_inv: mod_inverse(&bd.s, &bd.m).expect("validated coprime"), others_lcm }
                });
                let c: Vec<u32> = spec.c.get(&i).map(|s| s.iter().copied().collect()).unwrap_or_default();
                let mut indices = Vec::with_capacity(c.len() + 1);
                if b.is_some() {
                    indices.push(0);
                }
                indices.extend(c.iter().copied());
                TypeInfo { b, c, indices }
            })
            .collect();
        Ok(Self { spec, n, d, info })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// The regulator index `n(G) = lcm{m_τ}`.
    pub fn n(&self) -> &BigInt {
        &self.n
    }

    /// `d = Σ (s_τ/m_τ) e₀^(τ)`.
    pub fn d(&self) -> &AmbientElement {
        &self.d
    }

    pub fn derived(&self) -> DerivedData {
        DerivedData { n: self.n.clone(), d: self.d.clone() }
    }

    pub fn type_count(&self) -> usize {
        self.spec.types.len()
    }

    pub fn ty(&self, i: TypeIdx) -> &IdempotentType {
        &self.spec.types[i]
    }

    pub fn p_inf(&self, i: TypeIdx) -> &PrimeSet {
        &self.spec.types[i].p_inf
    }

    pub fn info(&self, i: TypeIdx) -> &TypeInfo {
        &self.info[i]
    }

    pub fn b(&self, i: TypeIdx) -> Option<&BInfo> {
        self.info[i].b.as_ref()
    }

    pub fn b_types(&self) -> impl Iterator<Item = (TypeIdx, &BInfo)> {
        self.info.iter().enumerate().filter_map(|(i, t)| t.b.as_ref().map(|b| (i, b)))
    }

    pub fn c_indices(&self, i: TypeIdx) -> &[u32] {
        &self.info[i].c
    }

    /// `I_τ`.
    pub fn indices(&self, i: TypeIdx) -> &[u32] {
        &self.info[i].indices
    }

    /// All basis keys `(τ, i)`, `i ∈ I_τ`.
    pub fn keys(&self) -> impl Iterator<Item = Key> + '_ {
        (0..self.type_count()).flat_map(move |t| self.indices(t).iter().map(move |&i| Key::new(t, i)))
    }

    pub fn has_key(&self, key: Key) -> bool {
        key.ty < self.type_count() && self.indices(key.ty).binary_search(&key.idx).is_ok()
    }

    pub fn in_r(&self, i: TypeIdx, a: &Rational) -> bool {
        arith::in_ring(self.p_inf(i), a)
    }

    /// True iff every `m_τ` divides `lcm{m_σ : σ ≠ τ}`. This is exactly the case where
    /// `A = ⊕ R_τ e_i^(τ)` is the regulator of `G` (equivalently `A_τ = G ∩ Ã_τ` for all
    /// `τ`), so that the `m_τ` are the actual invariants of `G`.
    pub fn regulator_exact(&self) -> bool {
        self.b_types().all(|(_, b)| (&b.others_lcm % &b.m).is_zero())
    }
}
