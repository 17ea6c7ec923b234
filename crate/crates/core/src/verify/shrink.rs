//! Greedy minimization of failing instances: fewer types, then smaller `m_τ`, then
//! sparser data. A candidate is accepted only if it is valid and still fails.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::element::{AmbientElement, Key};
use crate::endo::Endomorphism;
use crate::group::{Group, GroupSpec, TypeIdx};
use crate::mult::{PairKey, StructureConstants};

/// Everything a single check depends on.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Instance {
    pub spec: GroupSpec,
    pub elements: Vec<AmbientElement>,
    pub constants: Vec<StructureConstants>,
    pub endos: Vec<Endomorphism>,
    /// A distinguished type with a list of `R_τ` values attached to it.
    pub ty: Option<TypeIdx>,
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    /// The instance violates a precondition of the check.
    Vacuous(String),
}

impl Outcome {
    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail(_))
    }
}

pub type Check<'a> = dyn Fn(&Group, &Instance) -> Outcome + Sync + 'a;

pub fn run(inst: &Instance, check: &Check) -> Outcome {
    match Group::new(inst.spec.clone()) {
        Ok(g) => check(&g, inst),
        Err(report) => Outcome::Vacuous(report.to_string()),
    }
}

const MAX_STEPS: usize = 400;

/// Shrinks `inst` while `check` keeps failing. Returns `inst` unchanged if it does not fail.
pub fn shrink(inst: &Instance, check: &Check) -> Instance {
    let mut current = inst.clone();
    if !run(&current, check).is_fail() {
        return current;
    }
    for _ in 0..MAX_STEPS {
        let Some(next) = candidates(&current).into_iter().find(|c| run(c, check).is_fail()) else {
            break;
        };
        current = next;
    }
    current
}

fn remap(inst: &Instance, spec: GroupSpec, f: impl Fn(Key) -> Option<Key> + Copy) -> Option<Instance> {
    let ty = match inst.ty {
        Some(t) => Some(f(Key::new(t, u32::MAX)).map(|k| k.ty)?),
        None => None,
    };
    let constants = inst
        .constants
        .iter()
        .map(|u| {
            let mut out = StructureConstants::zero();
            for (k, v) in u.iter() {
                if let (Some(a), Some(b)) = (f(Key::new(k.ty, k.i)), f(Key::new(k.ty, k.j))) {
                    out.set(PairKey::new(a.ty, a.idx, b.idx), v.remap(f));
                }
            }
            out
        })
        .collect();
    let endos = inst
        .endos
        .iter()
        .map(|phi| Endomorphism {
            alpha: phi.alpha.clone(),
            y: phi.y.iter().filter_map(|(k, c)| f(*k).map(|k| (k, c.clone()))).collect(),
            w: phi
                .w
                .iter()
                .filter_map(|(&(t, i, j), c)| match (f(Key::new(t, i)), f(Key::new(t, j))) {
                    (Some(a), Some(b)) => Some(((a.ty, a.idx, b.idx), c.clone())),
                    _ => None,
                })
                .collect(),
        })
        .collect();
    Some(Instance { spec, elements: inst.elements.iter().map(|x| x.remap(f)).collect(), constants, endos, ty, values: inst.values.clone() })
}

fn drop_type(inst: &Instance, t: TypeIdx) -> Option<Instance> {
    let mut spec = inst.spec.clone();
    spec.types.remove(t);
    let shift = |x: TypeIdx| if x > t { x - 1 } else { x };
    spec.b = inst.spec.b.iter().filter(|(&x, _)| x != t).map(|(&x, b)| (shift(x), b.clone())).collect();
    spec.c = inst.spec.c.iter().filter(|(&x, _)| x != t).map(|(&x, c)| (shift(x), c.clone())).collect();
    remap(inst, spec, |k| (k.ty != t).then(|| Key::new(shift(k.ty), k.idx)))
}

fn drop_index(inst: &Instance, t: TypeIdx, idx: u32) -> Option<Instance> {
    let mut spec = inst.spec.clone();
    if idx == 0 {
        spec.b.remove(&t)?;
    } else if !spec.c.get_mut(&t)?.remove(&idx) {
        return None;
    }
    remap(inst, spec, |k| (k != Key::new(t, idx)).then_some(k))
}

fn smaller_m(inst: &Instance) -> Vec<Instance> {
    let mut out = Vec::new();
    for (&t, b) in &inst.spec.b {
        let m: i64 = (&b.m).try_into().unwrap_or(0);
        for m2 in 2..m {
            let mut spec = inst.spec.clone();
            let entry = spec.b.get_mut(&t).expect("present");
            entry.m = BigInt::from(m2);
            if !entry.s.gcd(&entry.m).is_one() {
                entry.s = BigInt::one();
            }
            out.push(Instance { spec, ..inst.clone() });
        }
    }
    out
}

fn sparser(inst: &Instance) -> Vec<Instance> {
    let mut out = Vec::new();
    for (n, u) in inst.constants.iter().enumerate() {
        for (k, _) in u.iter() {
            let mut c = inst.clone();
            c.constants[n].remove(k);
            out.push(c);
        }
    }
    for (n, x) in inst.elements.iter().enumerate() {
        for (k, _) in x.iter() {
            let mut c = inst.clone();
            c.elements[n].set(k, Rational::zero());
            out.push(c);
        }
    }
    for (n, phi) in inst.endos.iter().enumerate() {
        for k in phi.y.keys() {
            let mut c = inst.clone();
            c.endos[n].y.remove(k);
            out.push(c);
        }
        for k in phi.w.keys() {
            let mut c = inst.clone();
            c.endos[n].w.remove(k);
            out.push(c);
        }
    }
    for n in 0..inst.values.len() {
        if inst.values.len() > 1 {
            let mut c = inst.clone();
            c.values.remove(n);
            out.push(c);
        }
    }
    out
}

fn candidates(inst: &Instance) -> Vec<Instance> {
    let mut out: Vec<Instance> = (0..inst.spec.types.len()).filter_map(|t| drop_type(inst, t)).collect();
    out.extend(smaller_m(inst));
    for t in 0..inst.spec.types.len() {
        if inst.spec.b.contains_key(&t) {
            out.extend(drop_index(inst, t, 0));
        }
        for &i in inst.spec.c.get(&t).into_iter().flatten() {
            out.extend(drop_index(inst, t, i));
        }
    }
    out.extend(sparser(inst));
    out
}
