//! The verification campaigns. Each generated group is an independent unit of work with
//! its own derived seed; results are merged in index order, so reports only depend on
//! the configuration.

use std::collections::BTreeMap;
use std::io;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::corpus::{self, Record};
use super::gen::{
    self, gen_a_tau, gen_element, gen_endo, gen_group, gen_group_any, gen_mult, gen_perturbed, gen_r, gen_unit, FuzzRng, MultMode,
};
use super::oracle::{brute_beta, brute_ell, brute_k, brute_p0, sampled_non_extendable};
use super::shrink::{run, shrink, Check, Instance, Outcome};
use super::FuzzConfig;
use crate::arith::{int, modulo, reduce_mod, Rational};
use crate::element::{AmbientElement, Key};
use crate::endo::afi_check;
use crate::group::{Group, TypeIdx};
use crate::ideal::{gcd_sum_identity, ideal_member, ideal_of, in_l, tau_data};
use crate::instances::{discrepancy_constants, g_ex_spec};
use crate::json::{ConstantsJson, ElementJson, EndomorphismJson, GroupSpecJson, Rat};
use crate::mult::{
    bezout, check_24, literal_case2_breaks, mk_c_case, mk_case1, mk_case2_with, product, semantic_extendable, Case2Form, PairKey,
    StructureConstants,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Campaign {
    Thm24,
    Thm32,
    Errata,
    Soundness,
    Membership,
    Identity,
    Rescaling,
}

impl Campaign {
    pub const ALL: [Campaign; 7] = [
        Campaign::Thm24,
        Campaign::Thm32,
        Campaign::Errata,
        Campaign::Soundness,
        Campaign::Membership,
        Campaign::Identity,
        Campaign::Rescaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Campaign::Thm24 => "thm24",
            Campaign::Thm32 => "thm32",
            Campaign::Errata => "errata",
            Campaign::Soundness => "soundness",
            Campaign::Membership => "membership",
            Campaign::Identity => "identity",
            Campaign::Rescaling => "rescaling",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

/// Elements `g` drawn per group in the ideal campaigns.
pub const ELEMENTS_PER_GROUP: usize = 10;
/// Semantically extendable multiplications per group for the upper bound.
pub const MULTS_PER_GROUP: usize = 20;
/// Elements `x` per multiplication for the upper bound.
pub const XS_PER_MULT: usize = 20;
/// `(g, φ)` pairs per group.
pub const TRIPLES_PER_GROUP: usize = 100;
pub const COMPOSITIONS_PER_GROUP: usize = 10;
/// Structure constants per group in the soundness campaign.
pub const SOUNDNESS_MULTS_PER_GROUP: usize = 20;
pub const PAIRS_PER_MULT: usize = 10;
/// Queries per group in the membership campaign (half `member_g`, half `ideal_member`).
pub const QUERIES_PER_GROUP: usize = 100;
pub const MAX_MEMBERSHIP_N: u64 = 720;
pub const SAMPLES_PER_GROUP: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub campaign: String,
    pub seed: u64,
    pub samples: usize,
    pub instances: usize,
    pub checks: u64,
    pub passes: u64,
    pub failures: u64,
    pub discrepancies: u64,
    pub counters: BTreeMap<String, u64>,
    pub failure_records: Vec<Record>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutput {
    pub report: Report,
    /// Failures and discrepancies in instance order, for the corpus.
    pub records: Vec<Record>,
}

struct Tally {
    campaign: Campaign,
    index: usize,
    seed: u64,
    checks: u64,
    passes: u64,
    failures: Vec<Record>,
    discrepancies: Vec<Record>,
    counters: BTreeMap<String, u64>,
}

fn datum_json(inst: &Instance) -> Value {
    let Ok(group) = Group::new(inst.spec.clone()) else {
        return json!({ "invalid": format!("{inst:?}") });
    };
    let mut out = serde_json::Map::new();
    if !inst.elements.is_empty() {
        out.insert("elements".into(), json!(inst.elements.iter().map(|x| ElementJson::from_element(&group, x)).collect::<Vec<_>>()));
    }
    if !inst.constants.is_empty() {
        out.insert("constants".into(), json!(inst.constants.iter().map(|u| ConstantsJson::from_constants(&group, u)).collect::<Vec<_>>()));
    }
    if !inst.endos.is_empty() {
        out.insert(
            "endomorphisms".into(),
            json!(inst.endos.iter().map(|p| EndomorphismJson::from_endomorphism(&group, p)).collect::<Vec<_>>()),
        );
    }
    if let Some(ty) = inst.ty {
        out.insert("type".into(), json!(group.ty(ty).name));
    }
    if !inst.values.is_empty() {
        out.insert("values".into(), json!(inst.values.iter().map(|v| Rat(v.clone())).collect::<Vec<_>>()));
    }
    Value::Object(out)
}

impl Tally {
    fn new(campaign: Campaign, index: usize, seed: u64) -> Self {
        Self { campaign, index, seed, checks: 0, passes: 0, failures: Vec::new(), discrepancies: Vec::new(), counters: BTreeMap::new() }
    }

    fn record(&self, kind: &str, check: &str, detail: String, inst: &Instance, verdicts: Value) -> Record {
        Record {
            campaign: self.campaign.name().into(),
            instance: self.index,
            seed: self.seed,
            kind: kind.into(),
            check: check.into(),
            detail,
            spec: GroupSpecJson::from_spec(&inst.spec),
            datum: datum_json(inst),
            verdicts,
        }
    }

    fn count(&mut self, key: &str) {
        *self.counters.entry(key.into()).or_default() += 1;
    }

    fn check(&mut self, name: &str, group: &Group, inst: Instance, check: &Check) -> bool {
        self.checks += 1;
        self.count(&format!("checks.{name}"));
        match check(group, &inst) {
            Outcome::Pass => {
                self.passes += 1;
                true
            }
            Outcome::Fail(detail) => {
                let small = shrink(&inst, check);
                let detail = match run(&small, check) {
                    Outcome::Fail(d) => d,
                    _ => detail,
                };
                let kind = if name == "thm32.afi" { "alarm" } else { "failure" };
                let rec = self.record(kind, name, detail, &small, json!({ "outcome": "fail" }));
                self.failures.push(rec);
                false
            }
            Outcome::Vacuous(detail) => {
                let rec = self.record(
                    "failure",
                    name,
                    format!("generator broke a precondition: {detail}"),
                    &inst,
                    json!({ "outcome": "vacuous" }),
                );
                self.failures.push(rec);
                false
            }
        }
    }

    fn discrepancy(&mut self, name: &str, inst: &Instance, verdicts: Value) {
        let rec = self.record("discrepancy", name, "semantically extendable but the syntactic criterion fails".into(), inst, verdicts);
        self.discrepancies.push(rec);
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Outcome::Fail(format!($($msg)+));
        }
    };
}

macro_rules! need {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Outcome::Vacuous(e.to_string()),
        }
    };
}

fn n_u64(group: &Group) -> u64 {
    group.n().try_into().expect("desk-scale n")
}

// ---------------------------------------------------------------- thm24

// The constructor multiplication for datum `pos` of tau_data at target `k`, with the
// basis index the datum is multiplied against.
fn constructor(group: &Group, ty: TypeIdx, pos: usize, k: u32) -> crate::Result<(u32, StructureConstants)> {
    let c = group.c_indices(ty);
    match group.b(ty) {
        Some(_) if pos == 0 => match c.first() {
            Some(&t) => Ok((t, mk_case1(group, ty, t, k)?)),
            None => Ok((0, mk_case2_with(group, ty, Case2Form::Corrected, &BTreeMap::new())?)),
        },
        Some(_) => Ok((c[pos - 1], mk_c_case(group, ty, c[pos - 1], k)?)),
        None => Ok((c[pos], mk_c_case(group, ty, c[pos], k)?)),
    }
}

fn lower_check(group: &Group, inst: &Instance) -> Outcome {
    let g = &inst.elements[0];
    let Some(ty) = inst.ty.filter(|&t| t < group.type_count()) else { return Outcome::Vacuous("no type".into()) };
    let ideal = need!(ideal_of(group, g));
    ensure!(brute_ell(group, g) == ideal.ell, "ℓ differs from the factorization oracle");
    let data = tau_data(group, g, ty);
    let cert = need!(gcd_sum_identity(group, ty, &data));
    ensure!(cert.verify(group, &data), "gcd-sum certificate does not verify");
    ensure!(cert.ell == ideal.ell[ty], "certificate ℓ = {} but ℓ_τ = {}", cert.ell, ideal.ell[ty]);
    let one = Rational::one();
    for &k in group.indices(ty) {
        let ek = Key::new(ty, k);
        let mut reconstruction = AmbientElement::zero();
        for (pos, datum) in data.iter().enumerate() {
            let (basis, u) = match constructor(group, ty, pos, k) {
                Ok(c) => c,
                Err(e) => return Outcome::Fail(format!("constructor for datum {pos}, k = {k}: {e}")),
            };
            ensure!(check_24(group, &u).is_ok(), "constructor for datum {pos}, k = {k} fails the syntactic criterion");
            ensure!(semantic_extendable(group, &u).is_extendable(), "constructor for datum {pos}, k = {k} does not extend");
            let eb = Key::new(ty, basis);
            for b in std::iter::once(&one).chain(&inst.values) {
                let p = product(&u, g, &AmbientElement::monomial(eb, b.clone()));
                ensure!(p == AmbientElement::monomial(ek, datum * b), "g × ({b})e_{basis} = {p:?}, expected datum·b·e_{k}");
                ensure!(need!(ideal_member(group, &ideal, &p)).is_some(), "g × ({b})e_{basis} ∉ ⟨g⟩+L");
            }
            let f = &cert.factors[pos];
            let b = Rational::from_integer(cert.bezout[pos].clone()) / &f.unit;
            reconstruction = &reconstruction + &product(&u, g, &AmbientElement::monomial(eb, b));
        }
        let target = AmbientElement::monomial(ek, Rational::from_integer(ideal.ell[ty].clone()));
        ensure!(reconstruction == target, "Bézout combination of products is {reconstruction:?}, not ℓ·e_{k}");
        ensure!(need!(ideal_member(group, &ideal, &target)).is_some(), "ℓ·e_{k} ∉ ⟨g⟩+L");
        ensure!(brute_k(group, &ideal.ell, g, &target).is_some(), "oracle rejects ℓ·e_{k}");
    }
    Outcome::Pass
}

fn upper_check(group: &Group, inst: &Instance, oracle: bool) -> Outcome {
    let (g, x, u) = (&inst.elements[0], &inst.elements[1], &inst.constants[0]);
    need!(group.check_constants(u));
    if !semantic_extendable(group, u).is_extendable() {
        return Outcome::Vacuous("multiplication does not extend".into());
    }
    let ideal = need!(ideal_of(group, g));
    if need!(group.member_g(x)).is_none() {
        return Outcome::Vacuous("x ∉ G".into());
    }
    let p = product(u, g, x);
    ensure!(group.member_g(&p).ok().flatten().is_some(), "g × x ∉ G");
    let Some(k) = need!(ideal_member(group, &ideal, &p)) else {
        return Outcome::Fail("g × x ∉ ⟨g⟩+L".into());
    };
    ensure!(k < *group.n() && in_l(group, &ideal.ell, &(&p - &g.scale_int(&k))), "witness k = {k} does not verify");
    if oracle {
        ensure!(brute_k(group, &ideal.ell, g, &p).is_some(), "oracle finds no k");
        ensure!(brute_beta(group, &p).is_some(), "oracle puts g × x outside G");
    }
    Outcome::Pass
}

const MODES: [MultMode; 3] = [MultMode::Conforming, MultMode::Unconstrained, MultMode::Perturbed];

fn mode_name(m: MultMode) -> &'static str {
    match m {
        MultMode::Conforming => "conforming",
        MultMode::Unconstrained => "unconstrained",
        MultMode::Perturbed => "perturbed",
    }
}

fn thm24(cfg: &FuzzConfig, t: &mut Tally, rng: &mut FuzzRng) {
    let group = gen_group(cfg, rng);
    let spec = group.spec().clone();
    let gs: Vec<AmbientElement> = (0..ELEMENTS_PER_GROUP).map(|_| gen_element(cfg, rng, &group)).collect();
    for g in &gs {
        for ty in 0..group.type_count() {
            let p_inf = group.p_inf(ty).clone();
            let values = (0..2).map(|_| gen_r(cfg, rng, &p_inf, 0.0)).collect();
            let inst = Instance { spec: spec.clone(), elements: vec![g.clone()], ty: Some(ty), values, ..Default::default() };
            t.check("thm24.lower", &group, inst, &lower_check);
        }
    }
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < MULTS_PER_GROUP && attempts < 20 * MULTS_PER_GROUP {
        let mode = MODES[attempts % MODES.len()];
        attempts += 1;
        let u = gen_mult(cfg, rng, &group, mode);
        if !semantic_extendable(&group, &u).is_extendable() {
            t.count(&format!("upper.{}.not_extendable", mode_name(mode)));
            continue;
        }
        t.count(&format!("upper.{}.extendable", mode_name(mode)));
        for xi in 0..XS_PER_MULT {
            let x = gen_element(cfg, rng, &group);
            let g = gs[(accepted + xi) % gs.len()].clone();
            let inst = Instance { spec: spec.clone(), elements: vec![g, x], constants: vec![u.clone()], ..Default::default() };
            if xi < 2 {
                t.check("thm24.upper", &group, inst, &|g, i| upper_check(g, i, true));
            } else {
                t.check("thm24.upper", &group, inst, &|g, i| upper_check(g, i, false));
            }
        }
        accepted += 1;
    }
    if accepted < MULTS_PER_GROUP {
        let inst = Instance { spec, ..Default::default() };
        t.check("thm24.upper.supply", &group, inst, &move |_, _| Outcome::Fail(format!("only {accepted} extendable multiplications")));
    }
}

// ---------------------------------------------------------------- thm32

fn afi_instance_check(group: &Group, inst: &Instance, oracle: bool) -> Outcome {
    let (g, x, phi) = (&inst.elements[0], &inst.elements[1], &inst.endos[0]);
    need!(phi.validate(group));
    if need!(group.member_g(g)).is_none() || need!(group.member_g(x)).is_none() {
        return Outcome::Vacuous("sample ∉ G".into());
    }
    let d = group.d();
    let image_d = phi.apply_unchecked(group, d);
    ensure!(group.in_a(&(&image_d - &d.scale_int(&phi.alpha))).unwrap_or(false), "φ(d) − αd ∉ A");
    let additive = phi.apply_unchecked(group, &(g + x)) == &phi.apply_unchecked(group, g) + &phi.apply_unchecked(group, x);
    ensure!(additive, "φ(g + x) ≠ φ(g) + φ(x)");
    let image = phi.apply_unchecked(group, g);
    let ideal = need!(ideal_of(group, g));
    match afi_check(group, g, phi) {
        Ok(Some(k)) => {
            ensure!(k < *group.n() && in_l(group, &ideal.ell, &(&image - &g.scale_int(&k))), "afi witness k = {k} does not verify");
        }
        Ok(None) => return Outcome::Fail("φ(g) ∉ ⟨g⟩_AI".into()),
        Err(e) => return Outcome::Fail(format!("afi check errored: {e}")),
    }
    if oracle {
        ensure!(brute_k(group, &ideal.ell, g, &image).is_some(), "oracle finds no k for φ(g)");
    }
    Outcome::Pass
}

fn compose_check(group: &Group, inst: &Instance) -> Outcome {
    let g = &inst.elements[0];
    let (phi, psi) = (&inst.endos[0], &inst.endos[1]);
    need!(phi.validate(group));
    need!(psi.validate(group));
    let comp = phi.compose(psi, group);
    ensure!(comp.validate(group).is_ok(), "composition leaves the family");
    let alpha = &phi.alpha * &psi.alpha;
    ensure!(comp.alpha == alpha, "α of the composition is {}, not {alpha}", comp.alpha);
    for (ty, b) in group.b_types() {
        let e0 = Key::new(ty, 0);
        let diag = comp.image_of_basis(group, e0).get(e0);
        let class = reduce_mod(&diag, &b.m);
        ensure!(class == Some(modulo(&alpha, &b.m)), "e₀-diagonal of the composition ≢ α_φ α_ψ mod {}", b.m);
    }
    for x in [g, group.d()] {
        let seq = phi.apply_unchecked(group, &psi.apply_unchecked(group, x));
        ensure!(comp.apply_unchecked(group, x) == seq, "composition differs from sequential application");
    }
    match afi_check(group, g, &comp) {
        Ok(Some(_)) => Outcome::Pass,
        Ok(None) => Outcome::Fail("φψ(g) ∉ ⟨g⟩_AI".into()),
        Err(e) => Outcome::Fail(format!("afi check errored: {e}")),
    }
}

fn thm32(cfg: &FuzzConfig, t: &mut Tally, rng: &mut FuzzRng) {
    let group = gen_group(cfg, rng);
    let spec = group.spec().clone();
    let gs: Vec<AmbientElement> = (0..ELEMENTS_PER_GROUP).map(|_| gen_element(cfg, rng, &group)).collect();
    for j in 0..TRIPLES_PER_GROUP {
        let phi = gen_endo(cfg, rng, &group);
        let elements = vec![gs[j % gs.len()].clone(), gs[(j + 1) % gs.len()].clone()];
        let inst = Instance { spec: spec.clone(), elements, endos: vec![phi], ..Default::default() };
        if j < ELEMENTS_PER_GROUP {
            t.check("thm32.afi", &group, inst, &|g, i| afi_instance_check(g, i, true));
        } else {
            t.check("thm32.afi", &group, inst, &|g, i| afi_instance_check(g, i, false));
        }
    }
    for j in 0..COMPOSITIONS_PER_GROUP {
        let endos = vec![gen_endo(cfg, rng, &group), gen_endo(cfg, rng, &group)];
        let inst = Instance { spec: spec.clone(), elements: vec![gs[j % gs.len()].clone()], endos, ..Default::default() };
        t.check("thm32.compose", &group, inst, &compose_check);
    }
}

// ---------------------------------------------------------------- errata

fn shifts_of(group: &Group, values: &[Rational]) -> BTreeMap<TypeIdx, BigInt> {
    group.b_types().zip(values).map(|((ty, _), v)| (ty, v.to_integer())).collect()
}

fn errata_check(group: &Group, inst: &Instance) -> Outcome {
    let Some(ty) = inst.ty.filter(|&t| group.b(t).is_some()) else { return Outcome::Vacuous("no B-type".into()) };
    let tau = group.b(ty).expect("checked").clone();
    let shifts = shifts_of(group, &inst.values);
    let fixed = need!(mk_case2_with(group, ty, Case2Form::Corrected, &shifts));
    let e0 = Key::new(ty, 0);
    ensure!(
        fixed.get(PairKey::new(ty, 0, 0)) == Some(&AmbientElement::monomial(e0, Rational::from_integer(tau.m.clone()))),
        "corrected coefficient at τ is not m_τ"
    );
    match check_24(group, &fixed) {
        Ok(w) => ensure!(*w.alpha.residue() == modulo(&tau.s, group.n()), "corrected α = {} ≢ s_τ", w.alpha),
        Err(f) => return Outcome::Fail(format!("corrected constants fail the syntactic criterion: {f}")),
    }
    ensure!(semantic_extendable(group, &fixed).is_extendable(), "corrected constants do not extend");
    if literal_case2_breaks(group, ty) {
        let lit = need!(mk_case2_with(group, ty, Case2Form::Literal, &shifts));
        ensure!(!semantic_extendable(group, &lit).is_extendable(), "literal constants extend although m_σ ∤ s_τ m_τ");
        let dd = product(&lit, group.d(), group.d());
        ensure!(group.member_g(&dd).ok().flatten().is_none(), "literal d × d ∈ G");
        ensure!(brute_beta(group, &dd).is_none(), "oracle puts literal d × d in G");
    }
    Outcome::Pass
}

fn g_ex_errata_check(group: &Group, inst: &Instance) -> Outcome {
    let base = errata_check(group, inst);
    if base != Outcome::Pass {
        return base;
    }
    if group.spec() != &g_ex_spec() || inst.ty != Some(0) {
        return Outcome::Vacuous("not the fixed instance".into());
    }
    let shifts = shifts_of(group, &inst.values);
    let (_, y2) = bezout(&int(1), &int(2), shifts.get(&1).unwrap_or(&BigInt::zero()));
    let lit = need!(mk_case2_with(group, 0, Case2Form::Literal, &shifts));
    let dd = product(&lit, group.d(), group.d());
    let expected = AmbientElement::from_coords([
        (Key::new(0, 0), Rational::new(int(1), int(3))),
        (Key::new(1, 0), Rational::new(int(3) - int(2) * &y2, int(4))),
    ]);
    ensure!(dd == expected, "literal d × d = {dd:?} for y_τ2 = {y2}");
    ensure!(need!(group.member_g(&dd)).is_none() && brute_beta(group, &dd).is_none(), "literal d × d ∈ G for y_τ2 = {y2}");
    let fixed = need!(mk_case2_with(group, 0, Case2Form::Corrected, &shifts));
    ensure!(product(&fixed, group.d(), group.d()) == *group.d(), "corrected d × d ≠ d");
    Outcome::Pass
}

fn errata(cfg: &FuzzConfig, t: &mut Tally, rng: &mut FuzzRng, index: usize) {
    if index == 0 {
        let group = Group::new(g_ex_spec()).expect("fixed instance");
        for s1 in -3..=3 {
            for s2 in -3..=3 {
                let values = vec![Rational::from_integer(int(s1)), Rational::from_integer(int(s2))];
                let inst = Instance { spec: group.spec().clone(), ty: Some(0), values, ..Default::default() };
                t.check("errata.g_ex", &group, inst, &g_ex_errata_check);
            }
        }
    }
    if cfg.max_types < 2 {
        return;
    }
    let group = gen_group_any(cfg, rng, 2);
    let b_types: Vec<TypeIdx> = group.b_types().map(|(ty, _)| ty).collect();
    for &ty in &b_types {
        let values: Vec<Rational> = b_types.iter().map(|_| Rational::from_integer(int(rng.gen_range(-3..=3)))).collect();
        let shifts = shifts_of(&group, &values);
        if literal_case2_breaks(&group, ty) {
            t.count("literal.breaks");
        } else {
            let lit = mk_case2_with(&group, ty, Case2Form::Literal, &shifts).expect("B-type");
            let ok = semantic_extendable(&group, &lit).is_extendable();
            t.count(if ok { "literal.divides.extendable" } else { "literal.divides.not_extendable" });
        }
        let inst = Instance { spec: group.spec().clone(), ty: Some(ty), values, ..Default::default() };
        t.check("errata.generated", &group, inst, &errata_check);
    }
}

// ---------------------------------------------------------------- soundness

fn soundness_check(group: &Group, inst: &Instance) -> Outcome {
    let u = &inst.constants[0];
    need!(group.check_constants(u));
    let syntactic = check_24(group, u).is_ok();
    let semantic = semantic_extendable(group, u).is_extendable();
    let sampled = sampled_non_extendable(group, u);
    ensure!(semantic == sampled.is_none(), "semantic = {semantic} but sampling found {sampled:?}");
    ensure!(!syntactic || semantic, "syntactic criterion accepts a non-extendable multiplication");
    if semantic {
        for pair in inst.elements.chunks(2) {
            if let [x, y] = pair {
                let p = product(u, x, y);
                ensure!(group.member_g(&p).ok().flatten().is_some(), "generator product leaves G");
                ensure!(brute_beta(group, &p).is_some(), "oracle puts a generator product outside G");
            }
        }
    }
    Outcome::Pass
}

fn discrepancy_check(group: &Group, inst: &Instance) -> Outcome {
    let u = &inst.constants[0];
    ensure!(check_24(group, u).is_err(), "syntactic criterion accepts the canonical instance");
    ensure!(semantic_extendable(group, u).is_extendable(), "canonical instance does not extend");
    ensure!(sampled_non_extendable(group, u).is_none(), "sampling finds a product outside G");
    Outcome::Pass
}

fn gen_generator(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group) -> AmbientElement {
    if rng.gen_bool(0.25) {
        return group.d().clone();
    }
    let keys: Vec<Key> = group.keys().collect();
    let key = *keys.choose(rng).expect("groups have a basis");
    let r = gen_r(cfg, rng, group.p_inf(key.ty), 0.0);
    AmbientElement::monomial(key, r)
}

fn soundness(cfg: &FuzzConfig, t: &mut Tally, rng: &mut FuzzRng, index: usize) {
    if index == 0 {
        let group = Group::new(g_ex_spec()).expect("fixed instance");
        let inst = Instance { spec: group.spec().clone(), constants: vec![discrepancy_constants()], ..Default::default() };
        if t.check("soundness.canonical", &group, inst.clone(), &discrepancy_check) {
            t.discrepancy("soundness.canonical", &inst, json!({ "syntactic_24": false, "semantic": true }));
        }
    }
    let group = gen_group_any(cfg, rng, 0);
    for j in 0..SOUNDNESS_MULTS_PER_GROUP {
        let u = gen_mult(cfg, rng, &group, MODES[j % MODES.len()]);
        let elements = (0..2 * PAIRS_PER_MULT).map(|_| gen_generator(cfg, rng, &group)).collect();
        let inst = Instance { spec: group.spec().clone(), elements, constants: vec![u.clone()], ..Default::default() };
        let syntactic = check_24(&group, &u).is_ok();
        let semantic = semantic_extendable(&group, &u).is_extendable();
        t.count(match (syntactic, semantic) {
            (true, true) => "both",
            (false, true) => "semantic_only",
            (false, false) => "neither",
            (true, false) => "syntactic_only",
        });
        if syntactic {
            *t.counters.entry("generator_pairs".into()).or_default() += PAIRS_PER_MULT as u64;
        }
        if t.check("soundness", &group, inst.clone(), &soundness_check) && semantic && !syntactic {
            let discrepancy = Instance { elements: Vec::new(), ..inst };
            t.discrepancy("soundness", &discrepancy, json!({ "syntactic_24": false, "semantic": true }));
        }
    }
}

// ---------------------------------------------------------------- membership

fn member_check(group: &Group, inst: &Instance) -> Outcome {
    let x = &inst.elements[0];
    let fast = need!(group.member_g(x)).map(|c| c.beta.residue().clone());
    let slow = brute_beta(group, x);
    ensure!(fast == slow, "member_g gives {fast:?}, exhaustive search {slow:?}");
    Outcome::Pass
}

fn ideal_check(group: &Group, inst: &Instance) -> Outcome {
    let (g, x) = (&inst.elements[0], &inst.elements[1]);
    let ideal = need!(ideal_of(group, g));
    need!(group.check_keys(x));
    let fast = need!(ideal_member(group, &ideal, x));
    let slow = brute_k(group, &ideal.ell, g, x);
    ensure!(fast.is_some() == slow.is_some(), "ideal_member gives {fast:?}, exhaustive search {slow:?}");
    if let Some(k) = fast {
        ensure!(k < *group.n() && in_l(group, &ideal.ell, &(x - &g.scale_int(&k))), "witness k = {k} does not verify");
    }
    Outcome::Pass
}

fn gen_in_ideal(cfg: &FuzzConfig, rng: &mut FuzzRng, group: &Group, g: &AmbientElement, ell: &[BigInt]) -> AmbientElement {
    let n = n_u64(group);
    let mut x = g.scale_int(&int(rng.gen_range(0..n) as i64));
    for key in group.keys() {
        if !ell[key.ty].is_zero() {
            let r = gen_r(cfg, rng, group.p_inf(key.ty), 0.5);
            x.add_at(key, &(r * Rational::from_integer(ell[key.ty].clone())));
        }
    }
    x
}

fn membership(cfg: &FuzzConfig, t: &mut Tally, rng: &mut FuzzRng) {
    let mut group = gen_group_any(cfg, rng, 0);
    for _ in 0..64 {
        if n_u64(&group) <= MAX_MEMBERSHIP_N {
            break;
        }
        group = gen_group_any(cfg, rng, 0);
    }
    if n_u64(&group) > MAX_MEMBERSHIP_N {
        t.count("skipped_large_n");
        return;
    }
    let spec = group.spec().clone();
    for q in 0..QUERIES_PER_GROUP / 2 {
        let x = if q % 2 == 0 { gen_element(cfg, rng, &group) } else { gen_perturbed(cfg, rng, &group) };
        t.count(if group.member_g(&x).ok().flatten().is_some() { "member.true" } else { "member.false" });
        let inst = Instance { spec: spec.clone(), elements: vec![x], ..Default::default() };
        t.check("membership.member_g", &group, inst, &member_check);
    }
    for q in 0..QUERIES_PER_GROUP - QUERIES_PER_GROUP / 2 {
        let g = gen_element(cfg, rng, &group);
        let ell = ideal_of(&group, &g).expect("generated member").ell;
        let x = match q % 3 {
            0 => gen_in_ideal(cfg, rng, &group, &g, &ell),
            1 => gen_element(cfg, rng, &group),
            _ => gen_perturbed(cfg, rng, &group),
        };
        let ideal = ideal_of(&group, &g).expect("generated member");
        t.count(if ideal_member(&group, &ideal, &x).ok().flatten().is_some() { "ideal.true" } else { "ideal.false" });
        let inst = Instance { spec: spec.clone(), elements: vec![g, x], ..Default::default() };
        t.check("membership.ideal_member", &group, inst, &ideal_check);
    }
}

// ---------------------------------------------------------------- identity

fn supported_on(x: &AmbientElement, ty: TypeIdx) -> bool {
    x.iter().all(|(k, _)| k.ty == ty)
}

fn divisible(group: &Group, ty: TypeIdx, ell: &BigInt, c: &Rational) -> bool {
    if ell.is_zero() {
        c.is_zero()
    } else {
        (brute_p0(group, ty, c) % ell).is_zero()
    }
}

fn identity_check(group: &Group, inst: &Instance) -> Outcome {
    let Some(ty) = inst.ty.filter(|&t| t < group.type_count()) else { return Outcome::Vacuous("no type".into()) };
    let b = &inst.values;
    if !b.iter().all(|x| group.in_r(ty, x)) || inst.elements.is_empty() {
        return Outcome::Vacuous("b ⊄ R_τ".into());
    }
    let cert = need!(gcd_sum_identity(group, ty, b));
    ensure!(cert.verify(group, b), "certificate does not verify");
    let oracle = b.iter().fold(BigInt::zero(), |acc, x| acc.gcd(&brute_p0(group, ty, x)));
    ensure!(oracle == cert.ell, "ℓ = {} but the factorization oracle gives {oracle}", cert.ell);
    // ⊆: Σ b_i x_i ∈ ℓA_τ for sampled x_i ∈ A_τ
    let mut sum = AmbientElement::zero();
    for (bi, xi) in b.iter().zip(inst.elements.iter().skip(1)) {
        sum = &sum + &xi.scale(bi);
    }
    ensure!(sum.iter().all(|(_, c)| divisible(group, ty, &cert.ell, c)), "Σ b_i x_i ∉ ℓA_τ");
    // ⊆ on the integer grid {−2..2}^3
    let head: Vec<&Rational> = b.iter().take(3).collect();
    let mut digits = vec![-2i64; head.len()];
    loop {
        let c: Rational = head.iter().zip(&digits).map(|(bi, &d)| *bi * Rational::from_integer(int(d))).sum();
        ensure!(divisible(group, ty, &cert.ell, &c), "grid combination {digits:?} ∉ ℓR_τ");
        let Some(pos) = digits.iter().position(|&d| d < 2) else { break };
        digits[pos] += 1;
        digits[..pos].fill(-2);
    }
    // ⊇: ℓx as an explicit combination
    let x = &inst.elements[0];
    ensure!(supported_on(x, ty) && group.in_a(x).unwrap_or(false), "x ∉ A_τ");
    let parts = cert.express(x);
    ensure!(parts.iter().all(|p| supported_on(p, ty) && group.in_a(p).unwrap_or(false)), "Bézout coefficients leave A_τ");
    let mut total = AmbientElement::zero();
    for (bi, p) in b.iter().zip(&parts) {
        total = &total + &p.scale(bi);
    }
    ensure!(total == x.scale_int(&cert.ell), "Σ b_i x_i ≠ ℓx for the Bézout coefficients");
    Outcome::Pass
}

fn identity(cfg: &FuzzConfig, t: &mut Tally, rng: &mut FuzzRng) {
    let group = gen_group_any(cfg, rng, 0);
    for _ in 0..SAMPLES_PER_GROUP {
        let ty = rng.gen_range(0..group.type_count());
        let p_inf = group.p_inf(ty).clone();
        let len = rng.gen_range(1..=4);
        let values: Vec<Rational> = (0..len).map(|_| gen_r(cfg, rng, &p_inf, 0.2)).collect();
        let mut elements = vec![gen_a_tau(cfg, rng, &group, ty, 0.3)];
        elements.extend((0..len).map(|_| gen_a_tau(cfg, rng, &group, ty, 0.3)));
        let inst = Instance { spec: group.spec().clone(), elements, ty: Some(ty), values, ..Default::default() };
        t.check("identity", &group, inst, &identity_check);
    }
}

// ---------------------------------------------------------------- rescaling

fn rescale_check(group: &Group, inst: &Instance) -> Outcome {
    let g = &inst.elements[0];
    let keys: Vec<Key> = group.keys().collect();
    if keys.len() != inst.values.len() {
        return Outcome::Vacuous("one unit per basis vector".into());
    }
    let units: BTreeMap<Key, Rational> = keys.into_iter().zip(inst.values.iter().cloned()).collect();
    let mut spec = group.spec().clone();
    for (ty, b) in spec.b.iter_mut() {
        let eps = &units[&Key::new(*ty, 0)];
        if eps.abs() != Rational::one() {
            return Outcome::Vacuous("e₀ is rescaled by ±1 only".into());
        }
        // d = (s/m)e₀ = (εs/m)(εe₀)
        b.s *= eps.to_integer();
    }
    let Ok(rescaled) = Group::new(spec) else { return Outcome::Fail("sign change of s_τ breaks validity".into()) };
    let g2 = AmbientElement::from_coords(g.iter().map(|(k, c)| (k, c / &units[&k])));
    let before = need!(ideal_of(group, g));
    let after = match ideal_of(&rescaled, &g2) {
        Ok(i) => i,
        Err(e) => return Outcome::Fail(format!("rewritten g rejected: {e}")),
    };
    ensure!(after.beta == before.beta, "β changes under rescaling");
    ensure!(after.ell == before.ell, "ℓ changes under rescaling: {:?} → {:?}", before.ell, after.ell);
    Outcome::Pass
}

trait AbsExt {
    fn abs(&self) -> Self;
}

impl AbsExt for Rational {
    fn abs(&self) -> Self {
        if self < &Rational::zero() {
            -self
        } else {
            self.clone()
        }
    }
}

fn rescaling(cfg: &FuzzConfig, t: &mut Tally, rng: &mut FuzzRng) {
    let group = gen_group_any(cfg, rng, 0);
    for _ in 0..SAMPLES_PER_GROUP {
        let g = gen_element(cfg, rng, &group);
        let keys: Vec<Key> = group.keys().collect();
        let values = keys
            .iter()
            .map(|k| {
                if k.idx == 0 {
                    Rational::from_integer(int(if rng.gen_bool(0.5) { 1 } else { -1 }))
                } else {
                    gen_unit(rng, group.p_inf(k.ty))
                }
            })
            .collect();
        let inst = Instance { spec: group.spec().clone(), elements: vec![g], values, ..Default::default() };
        t.check("rescaling", &group, inst, &rescale_check);
    }
}

// ---------------------------------------------------------------- driver

fn run_instance(campaign: Campaign, cfg: &FuzzConfig, index: usize) -> Tally {
    let seed = gen::instance_seed(cfg.seed, campaign.stream(), index as u64);
    let mut rng = gen::rng(seed);
    let mut t = Tally::new(campaign, index, seed);
    match campaign {
        Campaign::Thm24 => thm24(cfg, &mut t, &mut rng),
        Campaign::Thm32 => thm32(cfg, &mut t, &mut rng),
        Campaign::Errata => errata(cfg, &mut t, &mut rng, index),
        Campaign::Soundness => soundness(cfg, &mut t, &mut rng, index),
        Campaign::Membership => membership(cfg, &mut t, &mut rng),
        Campaign::Identity => identity(cfg, &mut t, &mut rng),
        Campaign::Rescaling => rescaling(cfg, &mut t, &mut rng),
    }
    t
}

/// Runs `campaign` over `cfg.samples` generated groups.
pub fn run_campaign(campaign: Campaign, cfg: &FuzzConfig) -> CampaignOutput {
    let tallies: Vec<Tally> = (0..cfg.samples).into_par_iter().map(|i| run_instance(campaign, cfg, i)).collect();
    let mut report = Report {
        campaign: campaign.name().into(),
        seed: cfg.seed,
        samples: cfg.samples,
        instances: tallies.len(),
        checks: 0,
        passes: 0,
        failures: 0,
        discrepancies: 0,
        counters: BTreeMap::new(),
        failure_records: Vec::new(),
    };
    let mut records = Vec::new();
    for t in tallies {
        report.checks += t.checks;
        report.passes += t.passes;
        report.failures += t.failures.len() as u64;
        report.discrepancies += t.discrepancies.len() as u64;
        for (k, v) in t.counters {
            *report.counters.entry(k).or_default() += v;
        }
        report.failure_records.extend(t.failures.iter().cloned());
        records.extend(t.failures);
        records.extend(t.discrepancies);
    }
    CampaignOutput { report, records }
}

/// Runs `campaign` and appends its failures and discrepancies to `cfg.corpus`, if set.
pub fn run_and_persist(campaign: Campaign, cfg: &FuzzConfig) -> io::Result<Report> {
    let out = run_campaign(campaign, cfg);
    if let Some(path) = &cfg.corpus {
        corpus::append(path, &out.records)?;
    }
    Ok(out.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FuzzConfig {
        FuzzConfig { samples: 3, ..FuzzConfig::default() }
    }

    #[test]
    fn zero_samples_give_an_empty_report() {
        let cfg = FuzzConfig { samples: 0, ..FuzzConfig::default() };
        for c in Campaign::ALL {
            let out = run_campaign(c, &cfg);
            assert_eq!(out.report.instances, 0);
            assert_eq!(out.report.checks, 0);
            assert!(out.report.ok());
        }
    }

    #[test]
    fn small_campaigns_pass() {
        for c in Campaign::ALL {
            let out = run_campaign(c, &small());
            assert!(out.report.ok(), "{}", out.report.to_json());
            assert!(out.report.checks > 0);
        }
    }

    #[test]
    fn canonical_discrepancy_is_recorded() {
        let out = run_campaign(Campaign::Soundness, &FuzzConfig { samples: 1, ..FuzzConfig::default() });
        let first = &out.records[0];
        assert_eq!(first.kind, "discrepancy");
        assert_eq!(first.check, "soundness.canonical");
        assert_eq!(first.verdicts, json!({ "syntactic_24": false, "semantic": true }));
    }

    #[test]
    fn names_round_trip() {
        for c in Campaign::ALL {
            assert_eq!(Campaign::parse(c.name()), Some(c));
        }
        assert_eq!(Campaign::parse("nope"), None);
    }

    #[test]
    fn failures_are_shrunk_and_recorded() {
        let group = Group::new(g_ex_spec()).unwrap();
        let mut t = Tally::new(Campaign::Soundness, 0, 0);
        let mut u = discrepancy_constants();
        u.set(PairKey::new(1, 0, 0), AmbientElement::monomial(Key::new(1, 0), Rational::from_integer(int(2))));
        let inst = Instance { spec: group.spec().clone(), constants: vec![u], ..Default::default() };
        let check = |g: &Group, i: &Instance| {
            if check_24(g, &i.constants[0]).is_err() {
                Outcome::Fail("rejected".into())
            } else {
                Outcome::Pass
            }
        };
        assert!(!t.check("synthetic", &group, inst, &check));
        let rec = &t.failures[0];
        assert_eq!(rec.spec.types.len(), 1);
        assert_eq!(rec.kind, "failure");
    }
}
