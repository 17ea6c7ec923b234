//! JSON wire formats. Types and basis indices are addressed by name (`"tau1"`) and by
//! decimal index strings (`"0"`); rationals travel as `"p/q"` strings; integers are
//! accepted as JSON numbers or decimal strings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{parse_rational, Rational};
use crate::element::{AmbientElement, Key};
use crate::endo::Endomorphism;
use crate::error::Error;
use crate::group::{BData, Group, GroupSpec, IdempotentType, TypeIdx};
use crate::ideal::{ideal_of, PrincipalIdeal};
use crate::mult::{PairKey, StructureConstants};

/// An integer; serialized as a JSON number when it fits in `i64`, else as a string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Int(pub BigInt);

/// An integer that is always serialized as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntStr(pub BigInt);

/// A rational, serialized as `"p/q"` or `"p"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub Rational);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl Serialize for IntStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        v.trim().parse().map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor).map(Int)
    }
}

impl<'de> Deserialize<'de> for IntStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor).map(IntStr)
    }
}

struct RatVisitor;

impl Visitor<'_> for RatVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational \"p/q\" or an integer")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::from_integer(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational::from_integer(v.into()))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        parse_rational(v).ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(RatVisitor).map(Rat)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeJson {
    pub name: String,
    pub p_inf: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BJson {
    #[serde(rename = "type")]
    pub ty: String,
    pub m: Int,
    pub s: Int,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CJson {
    #[serde(rename = "type")]
    pub ty: String,
    pub indices: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpecJson {
    pub types: Vec<TypeJson>,
    #[serde(rename = "B", default)]
    pub b: Vec<BJson>,
    #[serde(rename = "C", default)]
    pub c: Vec<CJson>,
}

/// `type name → index string → value`.
pub type Coords<T> = BTreeMap<String, BTreeMap<String, T>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub coords: Coords<Rat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantJson {
    #[serde(rename = "type")]
    pub ty: String,
    pub i: u32,
    pub j: u32,
    pub value: ElementJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsJson {
    pub u: Vec<ConstantJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndomorphismJson {
    pub alpha: Int,
    #[serde(default)]
    pub y: Coords<Rat>,
    /// `type → i → j → w_ij`.
    #[serde(default)]
    pub w: BTreeMap<String, BTreeMap<String, BTreeMap<String, Rat>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealBodyJson {
    pub g: ElementJson,
    #[serde(default)]
    pub ell: BTreeMap<String, IntStr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealJson {
    pub ideal: IdealBodyJson,
}

/// Deserializes `text`, reporting failures with the JSON path of the offending value.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T, Error> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::json(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
    })
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("wire types always serialize")
}

fn type_of(group: &Group, name: &str, path: &str) -> Result<TypeIdx, Error> {
    group.spec().type_index(name).ok_or_else(|| Error::json(path, format!("unknown type {name:?}")))
}

fn index_of(text: &str, path: &str) -> Result<u32, Error> {
    text.parse().map_err(|_| Error::json(path, format!("{text:?} is not a basis index")))
}

impl GroupSpecJson {
    pub fn into_spec(self) -> Result<GroupSpec, Error> {
        let mut spec =
            GroupSpec { types: self.types.into_iter().map(|t| IdempotentType::new(t.name, t.p_inf)).collect(), ..Default::default() };
        let lookup = |spec: &GroupSpec, name: &str, path: String| {
            spec.type_index(name).ok_or_else(|| Error::json(path, format!("unknown type {name:?}")))
        };
        for (n, b) in self.b.into_iter().enumerate() {
            let ty = lookup(&spec, &b.ty, format!("B[{n}].type"))?;
            if spec.b.insert(ty, BData { m: b.m.0, s: b.s.0 }).is_some() {
                return Err(Error::json(format!("B[{n}].type"), format!("duplicate entry for {:?}", b.ty)));
            }
        }
        for (n, c) in self.c.into_iter().enumerate() {
            let ty = lookup(&spec, &c.ty, format!("C[{n}].type"))?;
            let set: BTreeSet<u32> = c.indices.into_iter().collect();
            if spec.c.insert(ty, set).is_some() {
                return Err(Error::json(format!("C[{n}].type"), format!("duplicate entry for {:?}", c.ty)));
            }
        }
        Ok(spec)
    }

    pub fn from_spec(spec: &GroupSpec) -> Self {
        let name = |ty: &TypeIdx| spec.types[*ty].name.clone();
        Self {
            types: spec.types.iter().map(|t| TypeJson { name: t.name.clone(), p_inf: t.p_inf.iter().copied().collect() }).collect(),
            b: spec.b.iter().map(|(ty, b)| BJson { ty: name(ty), m: Int(b.m.clone()), s: Int(b.s.clone()) }).collect(),
            c: spec
                .c
                .iter()
                .filter(|(_, set)| !set.is_empty())
                .map(|(ty, set)| CJson { ty: name(ty), indices: set.iter().copied().collect() })
                .collect(),
        }
    }
}

/// Parses and validates a group spec.
pub fn parse_group(text: &str) -> Result<Group, Error> {
    let spec = from_str::<GroupSpecJson>(text)?.into_spec()?;
    Group::new(spec).map_err(Error::InvalidGroup)
}

fn coords_from<T>(group: &Group, coords: Coords<T>, path: &str, mut f: impl FnMut(Key, T, &str) -> Result<(), Error>) -> Result<(), Error> {
    for (name, entries) in coords {
        let tpath = format!("{path}.{name}");
        let ty = type_of(group, &name, &tpath)?;
        for (idx, value) in entries {
            let ipath = format!("{tpath}.{idx}");
            let key = Key::new(ty, index_of(&idx, &ipath)?);
            if !group.has_key(key) {
                return Err(Error::json(ipath, "no such basis index"));
            }
            f(key, value, &ipath)?;
        }
    }
    Ok(())
}

impl ElementJson {
    pub fn into_element(self, group: &Group) -> Result<AmbientElement, Error> {
        self.into_element_at(group, "coords")
    }

    fn into_element_at(self, group: &Group, path: &str) -> Result<AmbientElement, Error> {
        let mut x = AmbientElement::zero();
        coords_from(group, self.coords, path, |key, value, _| {
            x.add_at(key, &value.0);
            Ok(())
        })?;
        Ok(x)
    }

    pub fn from_element(group: &Group, x: &AmbientElement) -> Self {
        let mut coords: Coords<Rat> = BTreeMap::new();
        for (key, c) in x.iter() {
            coords.entry(group.ty(key.ty).name.clone()).or_default().insert(key.idx.to_string(), Rat(c.clone()));
        }
        Self { coords }
    }
}

pub fn parse_element(group: &Group, text: &str) -> Result<AmbientElement, Error> {
    from_str::<ElementJson>(text)?.into_element(group)
}

impl ConstantsJson {
    pub fn into_constants(self, group: &Group) -> Result<StructureConstants, Error> {
        let mut u = StructureConstants::zero();
        for (n, entry) in self.u.into_iter().enumerate() {
            let path = format!("u[{n}]");
            let ty = type_of(group, &entry.ty, &format!("{path}.type"))?;
            for (field, idx) in [("i", entry.i), ("j", entry.j)] {
                if !group.has_key(Key::new(ty, idx)) {
                    return Err(Error::json(format!("{path}.{field}"), "no such basis index"));
                }
            }
            let key = PairKey::new(ty, entry.i, entry.j);
            let value = entry.value.into_element_at(group, &format!("{path}.value.coords"))?;
            if value.iter().any(|(k, _)| k.ty != ty) {
                return Err(Error::json(format!("{path}.value"), "product must be supported on its own type"));
            }
            if u.get(key).is_some() {
                return Err(Error::json(path, "duplicate entry"));
            }
            u.set(key, value);
        }
        group.check_constants(&u)?;
        Ok(u)
    }

    pub fn from_constants(group: &Group, u: &StructureConstants) -> Self {
        Self {
            u: u.iter()
                .map(|(k, v)| ConstantJson { ty: group.ty(k.ty).name.clone(), i: k.i, j: k.j, value: ElementJson::from_element(group, v) })
                .collect(),
        }
    }
}

pub fn parse_constants(group: &Group, text: &str) -> Result<StructureConstants, Error> {
    from_str::<ConstantsJson>(text)?.into_constants(group)
}

impl EndomorphismJson {
    pub fn into_endomorphism(self, group: &Group) -> Result<Endomorphism, Error> {
        let mut phi = Endomorphism { alpha: self.alpha.0, ..Default::default() };
        coords_from(group, self.y, "y", |key, value, path| {
            if group.b(key.ty).is_none() {
                return Err(Error::json(path, "y is only defined on B-types"));
            }
            phi.y.insert(key, value.0);
            Ok(())
        })?;
        for (name, rows) in self.w {
            let tpath = format!("w.{name}");
            let ty = type_of(group, &name, &tpath)?;
            for (i, row) in rows {
                let ipath = format!("{tpath}.{i}");
                let i = index_of(&i, &ipath)?;
                if !group.c_indices(ty).contains(&i) {
                    return Err(Error::json(ipath, "w rows are indexed by C-indices"));
                }
                for (j, value) in row {
                    let jpath = format!("{ipath}.{j}");
                    let j = index_of(&j, &jpath)?;
                    if !group.has_key(Key::new(ty, j)) {
                        return Err(Error::json(jpath, "no such basis index"));
                    }
                    if !value.0.is_zero() {
                        phi.w.insert((ty, i, j), value.0);
                    }
                }
            }
        }
        phi.y.retain(|_, c| !c.is_zero());
        phi.validate(group)?;
        Ok(phi)
    }

    pub fn from_endomorphism(group: &Group, phi: &Endomorphism) -> Self {
        let name = |ty: TypeIdx| group.ty(ty).name.clone();
        let mut y: Coords<Rat> = BTreeMap::new();
        for (k, c) in &phi.y {
            y.entry(name(k.ty)).or_default().insert(k.idx.to_string(), Rat(c.clone()));
        }
        let mut w: BTreeMap<String, BTreeMap<String, BTreeMap<String, Rat>>> = BTreeMap::new();
        for (&(ty, i, j), c) in &phi.w {
            w.entry(name(ty)).or_default().entry(i.to_string()).or_default().insert(j.to_string(), Rat(c.clone()));
        }
        Self { alpha: Int(phi.alpha.clone()), y, w }
    }
}

pub fn parse_endomorphism(group: &Group, text: &str) -> Result<Endomorphism, Error> {
    from_str::<EndomorphismJson>(text)?.into_endomorphism(group)
}

impl IdealJson {
    /// Rebuilds the ideal from `g`; listed `ℓ` values must agree with `ℓ_τ(g)`.
    pub fn into_ideal(self, group: &Group) -> Result<PrincipalIdeal, Error> {
        let g = self.ideal.g.into_element_at(group, "ideal.g.coords")?;
        let ideal = ideal_of(group, &g).map_err(|e| match e {
            Error::NotMember => Error::json("ideal.g", "generator is not in G"),
            other => other,
        })?;
        for (name, l) in self.ideal.ell {
            let path = format!("ideal.ell.{name}");
            let ty = type_of(group, &name, &path)?;
            if l.0 != ideal.ell[ty] {
                return Err(Error::json(path, format!("ℓ is {} for this generator, not {}", ideal.ell[ty], l.0)));
            }
        }
        Ok(ideal)
    }

    pub fn from_ideal(group: &Group, ideal: &PrincipalIdeal) -> Self {
        Self {
            ideal: IdealBodyJson {
                g: ElementJson::from_element(group, &ideal.g),
                ell: ideal.ell.iter().enumerate().map(|(ty, l)| (group.ty(ty).name.clone(), IntStr(l.clone()))).collect(),
            },
        }
    }
}

pub fn parse_ideal(group: &Group, text: &str) -> Result<PrincipalIdeal, Error> {
    from_str::<IdealJson>(text)?.into_ideal(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::instances::{discrepancy_constants, g2, g_ex, g_ex_spec, x_ex};

    const G_EX: &str = r#"{"types":[{"name":"tau1","p_inf":[2]},{"name":"tau2","p_inf":[3]}],"B":[{"type":"tau1","m":3,"s":1},{"type":"tau2","m":2,"s":1}],"C":[{"type":"tau1","indices":[1]}]}"#;

    #[test]
    fn group_round_trip() {
        let g = parse_group(G_EX).unwrap();
        assert_eq!(g.spec(), &g_ex_spec());
        assert_eq!(to_string(&GroupSpecJson::from_spec(g.spec())), G_EX);
    }

    #[test]
    fn numbers_and_strings() {
        let a: Int = from_str(r#""123456789012345678901234567890""#).unwrap();
        assert_eq!(to_string(&a), r#""123456789012345678901234567890""#);
        let b: Int = from_str("-7").unwrap();
        assert_eq!(b.0, int(-7));
        let r: Rat = from_str(r#""-6/4""#).unwrap();
        assert_eq!(r.0, rat(-3, 2));
        assert_eq!(to_string(&r), r#""-3/2""#);
        assert!(from_str::<Rat>(r#""1/0""#).is_err());
    }

    #[test]
    fn element_round_trip() {
        let g = g_ex();
        let text = r#"{"coords":{"tau1":{"0":"2/3","1":"4"},"tau2":{"0":"3/2"}}}"#;
        let x = parse_element(&g, text).unwrap();
        assert_eq!(x, x_ex());
        assert_eq!(to_string(&ElementJson::from_element(&g, &x)), text);
    }

    #[test]
    fn error_paths() {
        let g = g_ex();
        let path = |r: Result<AmbientElement, Error>| match r {
            Err(Error::Json { path, .. }) => path,
            other => panic!("expected a JSON error, got {other:?}"),
        };
        assert_eq!(path(parse_element(&g, r#"{"coords":{"tau3":{"0":"1"}}}"#)), "coords.tau3");
        assert_eq!(path(parse_element(&g, r#"{"coords":{"tau2":{"1":"1"}}}"#)), "coords.tau2.1");
        assert_eq!(path(parse_element(&g, r#"{"coords":{"tau1":{"0":"x"}}}"#)), "coords.tau1.0");
        assert!(matches!(parse_group(r#"{"types":[{"name":"a","p_inf":[2]}],"B":[{"type":"b","m":3,"s":1}]}"#),
            Err(Error::Json { path, .. }) if path == "B[0].type"));
        assert!(matches!(
            parse_group(r#"{"types":[{"name":"a","p_inf":[2]}],"B":[{"type":"a","m":2,"s":1}]}"#),
            Err(Error::InvalidGroup(_))
        ));
    }

    #[test]
    fn constants_round_trip() {
        let g = g_ex();
        let text = r#"{"u":[{"type":"tau1","i":0,"j":1,"value":{"coords":{"tau1":{"0":"1"}}}}]}"#;
        let u = parse_constants(&g, text).unwrap();
        assert_eq!(u, discrepancy_constants());
        assert_eq!(to_string(&ConstantsJson::from_constants(&g, &u)), text);
        let cross = r#"{"u":[{"type":"tau1","i":0,"j":1,"value":{"coords":{"tau2":{"0":"1"}}}}]}"#;
        assert!(matches!(parse_constants(&g, cross), Err(Error::Json { path, .. }) if path == "u[0].value"));
    }

    #[test]
    fn endomorphism_round_trip() {
        let g = g_ex();
        let phi = parse_endomorphism(&g, r#"{"alpha":3,"y":{"tau1":{"0":"1"}},"w":{"tau1":{"1":{"1":"0"}}}}"#).unwrap();
        assert_eq!(phi.alpha, int(3));
        assert_eq!(phi.y.len(), 1);
        assert!(phi.w.is_empty());
        let text = to_string(&EndomorphismJson::from_endomorphism(&g, &phi));
        assert_eq!(parse_endomorphism(&g, &text).unwrap(), phi);
        assert!(parse_endomorphism(&g, r#"{"alpha":1,"y":{"tau1":{"0":"1/3"}}}"#).is_err());
    }

    #[test]
    fn ideal_round_trip() {
        let g = g_ex();
        let ideal = ideal_of(&g, &g2()).unwrap();
        let text = to_string(&IdealJson::from_ideal(&g, &ideal));
        assert_eq!(text, r#"{"ideal":{"g":{"coords":{"tau1":{"0":"5/3","1":"10"}}},"ell":{"tau1":"5","tau2":"0"}}}"#);
        assert_eq!(parse_ideal(&g, &text).unwrap(), ideal);
        let wrong = r#"{"ideal":{"g":{"coords":{"tau1":{"0":"5/3","1":"10"}}},"ell":{"tau1":"1"}}}"#;
        assert!(matches!(parse_ideal(&g, wrong), Err(Error::Json { path, .. }) if path == "ideal.ell.tau1"));
    }
}
