//! JSON documents naming modules, morphisms, diagrams, hexagon frames and
//! diagram extensions.
//!
//! ```json
//! {
//!   "ring": {"kind": "Zmod", "m": 4},
//!   "modules": {"Z2": {"generators": 1, "relations": [[2]]}},
//!   "morphisms": {"dbl": {"source": "Z2", "target": "Z4", "matrix": [[2]]}},
//!   "diagrams": {"D": {"P": "Z2", ..., "rowTop": {"inject": "dbl", "project": "red"}, ...}},
//!   "frames": {"F": {"A1": ..., "alpha": ..., "topB": ..., ...}},
//!   "extensions": {"X1": {"diagram": "D", "X": "M", "i": ..., "j": ..., "m": ..., "n": ...}}
//! }
//! ```
//!
//! Relations are listed as columns, morphism matrices as rows (one per
//! target generator). Integers below 2^53 in magnitude are JSON numbers,
//! larger ones decimal strings.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, ToPrimitive};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::diagram::{Diagram3x3, DiagramExtension, SequenceMaps};
use crate::fgmod::{ModuleMorphism, PresentedModule};
use crate::hexagon::HexagonFrame;
use crate::linalg::{ExactMatrix, Int, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{context}: {reason}")]
pub struct SemanticError {
    pub context: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("semantic error in {0}")]
    Semantic(#[from] SemanticError),
}

/// An exact integer, written as a JSON number when it fits a double.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonInt(pub Int);

const SAFE: i64 = 1 << 53;

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) if v.abs() < SAFE => s.serialize_i64(v),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
                if v.abs() >= SAFE {
                    return Err(E::custom(format!("{v} must be written as a string")));
                }
                Ok(JsonInt(Int::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
                if v >= SAFE as u64 {
                    return Err(E::custom(format!("{v} must be written as a string")));
                }
                Ok(JsonInt(Int::from(v)))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<JsonInt, E> {
                Err(E::custom(format!("{v} is not an integer")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
                let n: Int = v.parse().map_err(|_| E::custom(format!("'{v}' is not an integer")))?;
                if n.abs() < Int::from(SAFE) {
                    return Err(E::custom(format!("'{v}' must be written as a number")));
                }
                Ok(JsonInt(n))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RawRing {
    Z,
    Zmod { m: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModule {
    pub generators: usize,
    pub relations: Vec<Vec<JsonInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMorphism {
    pub source: String,
    pub target: String,
    pub matrix: Vec<Vec<JsonInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSequence {
    pub inject: String,
    pub project: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDiagram {
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "E")]
    pub e: String,
    #[serde(rename = "R")]
    pub r: String,
    #[serde(rename = "H")]
    pub h: String,
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "S")]
    pub s: String,
    #[serde(rename = "G")]
    pub g: String,
    #[serde(rename = "Q")]
    pub q: String,
    #[serde(rename = "rowTop")]
    pub row_top: RawSequence,
    #[serde(rename = "rowBottom")]
    pub row_bottom: RawSequence,
    #[serde(rename = "colLeft")]
    pub col_left: RawSequence,
    #[serde(rename = "colRight")]
    pub col_right: RawSequence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFrame {
    #[serde(rename = "A1")]
    pub a1: String,
    #[serde(rename = "B1")]
    pub b1: String,
    #[serde(rename = "B2")]
    pub b2: String,
    #[serde(rename = "A2")]
    pub a2: String,
    #[serde(rename = "A3")]
    pub a3: String,
    #[serde(rename = "A4")]
    pub a4: String,
    pub alpha: String,
    pub beta: String,
    #[serde(rename = "topB")]
    pub top_b: String,
    pub d: String,
    pub r: String,
    pub s: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExtension {
    pub diagram: String,
    #[serde(rename = "X")]
    pub x: String,
    pub i: String,
    pub j: String,
    pub m: String,
    pub n: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    pub ring: RawRing,
    #[serde(default)]
    pub modules: BTreeMap<String, RawModule>,
    #[serde(default)]
    pub morphisms: BTreeMap<String, RawMorphism>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagrams: BTreeMap<String, RawDiagram>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub frames: BTreeMap<String, RawFrame>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extensions: BTreeMap<String, RawExtension>,
}

/// A resolved document. Every morphism is re-checked on load; diagrams,
/// frames and extensions are only checked for matching ends, so that
/// `validate` can report their violations.
#[derive(Debug, Clone)]
pub struct DocumentModel {
    pub raw: RawDocument,
    pub ring: RingSpec,
    pub modules: BTreeMap<String, PresentedModule>,
    pub morphisms: BTreeMap<String, ModuleMorphism>,
    pub diagrams: BTreeMap<String, Diagram3x3>,
    pub frames: BTreeMap<String, HexagonFrame>,
    pub extensions: BTreeMap<String, (String, DiagramExtension)>,
}

impl PartialEq for DocumentModel {
    fn eq(&self, other: &Self) -> bool {
        self.raw == other.raw
    }
}

fn sem(context: impl Into<String>, reason: impl Into<String>) -> SemanticError {
    SemanticError {
        context: context.into(),
        reason: reason.into(),
    }
}

pub fn parse_raw(text: &str) -> Result<RawDocument, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError {
        line: e.line(),
        reason: e.to_string(),
    })
}

pub fn parse(text: &str) -> Result<DocumentModel, DocumentError> {
    Ok(resolve(parse_raw(text)?)?)
}

pub fn serialize(model: &DocumentModel) -> String {
    serialize_raw(&model.raw)
}

pub fn serialize_raw(raw: &RawDocument) -> String {
    to_json_text(&serde_json::to_value(raw).expect("documents serialize"))
}

/// Indented JSON with arrays of scalars kept on one line.
pub fn to_json_text(v: &serde_json::Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.iter().any(|x| x.is_array() || x.is_object()) => {
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(|x| x.to_string()).collect();
            out.push('[');
            out.push_str(&inner.join(", "));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn ints(v: &[JsonInt]) -> Vec<Int> {
    v.iter().map(|x| x.0.clone()).collect()
}

pub fn resolve(raw: RawDocument) -> Result<DocumentModel, SemanticError> {
    let ring = match raw.ring {
        RawRing::Z => RingSpec::Integers,
        RawRing::Zmod { m } => RingSpec::zmod(m).map_err(|e| sem("ring", e.to_string()))?,
    };
    let mut modules = BTreeMap::new();
    for (name, m) in &raw.modules {
        let ctx = format!("module '{name}'");
        for (k, col) in m.relations.iter().enumerate() {
            if col.len() != m.generators {
                return Err(sem(
                    &ctx,
                    format!("relation {k} has {} entries for {} generators", col.len(), m.generators),
                ));
            }
        }
        let cols: Vec<Vec<Int>> = m.relations.iter().map(|c| ints(c)).collect();
        modules.insert(
            name.clone(),
            PresentedModule::from_relation_columns(ring, m.generators, &cols),
        );
    }
    let module = |ctx: &str, name: &str| {
        modules
            .get(name)
            .cloned()
            .ok_or_else(|| sem(ctx, format!("unknown module '{name}'")))
    };
    let mut morphisms = BTreeMap::new();
    for (name, f) in &raw.morphisms {
        let ctx = format!("morphism '{name}'");
        let s = module(&ctx, &f.source)?;
        let t = module(&ctx, &f.target)?;
        if f.matrix.len() != t.generators() {
            return Err(sem(
                &ctx,
                format!("matrix has {} rows, target has {} generators", f.matrix.len(), t.generators()),
            ));
        }
        if let Some(r) = f.matrix.iter().position(|row| row.len() != s.generators()) {
            return Err(sem(
                &ctx,
                format!("row {r} has {} entries, source has {} generators", f.matrix[r].len(), s.generators()),
            ));
        }
        let entries: Vec<Int> = f.matrix.iter().flat_map(|r| ints(r)).collect();
        let matrix = ExactMatrix::new(ring, t.generators(), s.generators(), entries)
            .map_err(|e| sem(&ctx, e.to_string()))?;
        let m = ModuleMorphism::new(s, t, matrix).map_err(|e| sem(&ctx, e.to_string()))?;
        morphisms.insert(name.clone(), m);
    }
    let morphism = |ctx: &str, name: &str| {
        morphisms
            .get(name)
            .cloned()
            .ok_or_else(|| sem(ctx, format!("unknown morphism '{name}'")))
    };
    let ends = |ctx: &str, f: &ModuleMorphism, fname: &str, src: &str, tgt: &str| {
        if f.source() != &module(ctx, src)? || f.target() != &module(ctx, tgt)? {
            return Err(sem(ctx, format!("'{fname}' is not a map {src} → {tgt}")));
        }
        Ok(())
    };

    let mut diagrams = BTreeMap::new();
    for (name, d) in &raw.diagrams {
        let ctx = format!("diagram '{name}'");
        let seq = |s: &RawSequence, l: &str, mid: &str, r: &str| -> Result<SequenceMaps, SemanticError> {
            let a = morphism(&ctx, &s.inject)?;
            let b = morphism(&ctx, &s.project)?;
            ends(&ctx, &a, &s.inject, l, mid)?;
            ends(&ctx, &b, &s.project, mid, r)?;
            Ok(SequenceMaps::new(a, b))
        };
        let diagram = Diagram3x3::new(
            seq(&d.row_top, &d.p, &d.e, &d.r)?,
            seq(&d.row_bottom, &d.s, &d.g, &d.q)?,
            seq(&d.col_left, &d.p, &d.h, &d.s)?,
            seq(&d.col_right, &d.r, &d.f, &d.q)?,
        );
        diagrams.insert(name.clone(), diagram);
    }

    let mut frames = BTreeMap::new();
    for (name, f) in &raw.frames {
        let ctx = format!("frame '{name}'");
        let get = |fname: &str, src: &str, tgt: &str| -> Result<ModuleMorphism, SemanticError> {
            let m = morphism(&ctx, fname)?;
            ends(&ctx, &m, fname, src, tgt)?;
            Ok(m)
        };
        let frame = HexagonFrame {
            alpha: get(&f.alpha, &f.a1, &f.b1)?,
            beta: get(&f.beta, &f.a1, &f.a2)?,
            top_b: get(&f.top_b, &f.b1, &f.b2)?,
            d: get(&f.d, &f.a2, &f.a3)?,
            r: get(&f.r, &f.b2, &f.a4)?,
            s: get(&f.s, &f.a3, &f.a4)?,
        };
        frames.insert(name.clone(), frame);
    }

    let mut extensions = BTreeMap::new();
    for (name, e) in &raw.extensions {
        let ctx = format!("extension '{name}'");
        let rd = raw
            .diagrams
            .get(&e.diagram)
            .ok_or_else(|| sem(&ctx, format!("unknown diagram '{}'", e.diagram)))?;
        let get = |fname: &str, src: &str, tgt: &str| -> Result<ModuleMorphism, SemanticError> {
            let m = morphism(&ctx, fname)?;
            ends(&ctx, &m, fname, src, tgt)?;
            Ok(m)
        };
        let ext = DiagramExtension {
            x: module(&ctx, &e.x)?,
            i: get(&e.i, &rd.h, &e.x)?,
            j: get(&e.j, &rd.e, &e.x)?,
            m: get(&e.m, &e.x, &rd.f)?,
            n: get(&e.n, &e.x, &rd.g)?,
        };
        extensions.insert(name.clone(), (e.diagram.clone(), ext));
    }

    Ok(DocumentModel {
        raw,
        ring,
        modules,
        morphisms,
        diagrams,
        frames,
        extensions,
    })
}

fn raw_ints(v: &[Int]) -> Vec<JsonInt> {
    v.iter().map(|x| JsonInt(x.clone())).collect()
}

/// Builds raw documents from in-memory objects.
#[derive(Debug, Clone)]
pub struct DocumentBuilder {
    raw: RawDocument,
}

impl DocumentBuilder {
    pub fn new(ring: RingSpec) -> Self {
        let ring = match ring {
            RingSpec::Integers => RawRing::Z,
            RingSpec::IntegersMod(m) => RawRing::Zmod { m },
        };
        DocumentBuilder {
            raw: RawDocument {
                ring,
                modules: BTreeMap::new(),
                morphisms: BTreeMap::new(),
                diagrams: BTreeMap::new(),
                frames: BTreeMap::new(),
                extensions: BTreeMap::new(),
            },
        }
    }

    /// Name of `m`, reusing an existing module with the same presentation.
    pub fn module(&mut self, name: &str, m: &PresentedModule) -> String {
        let raw = RawModule {
            generators: m.generators(),
            relations: m.relations().columns().iter().map(|c| raw_ints(c)).collect(),
        };
        if let Some((k, _)) = self.raw.modules.iter().find(|(_, v)| **v == raw) {
            return k.clone();
        }
        self.raw.modules.insert(name.to_string(), raw);
        name.to_string()
    }

    pub fn morphism(&mut self, name: &str, f: &ModuleMorphism, source: &str, target: &str) -> String {
        let s = self.module(source, f.source());
        let t = self.module(target, f.target());
        let matrix = (0..f.matrix().rows()).map(|r| raw_ints(&f.matrix().row(r))).collect();
        self.raw.morphisms.insert(
            name.to_string(),
            RawMorphism {
                source: s,
                target: t,
                matrix,
            },
        );
        name.to_string()
    }

    pub fn diagram(&mut self, name: &str, d: &Diagram3x3) -> &mut Self {
        let n = |x: &str| format!("{name}.{x}");
        let objects: Vec<String> = [
            ("P", d.p()),
            ("E", d.e()),
            ("R", d.r()),
            ("H", d.h()),
            ("F", d.f()),
            ("S", d.s()),
            ("G", d.g()),
            ("Q", d.q()),
        ]
        .iter()
        .map(|(k, m)| self.module(&n(k), m))
        .collect();
        let [p, e, r, h, f, s, g, q] = <[String; 8]>::try_from(objects).expect("eight objects");
        let seq = |b: &mut Self, key: &str, maps: &SequenceMaps, l: &str, mid: &str, rt: &str| RawSequence {
            inject: b.morphism(&n(&format!("{key}.inject")), &maps.inject, l, mid),
            project: b.morphism(&n(&format!("{key}.project")), &maps.project, mid, rt),
        };
        let row_top = seq(self, "rowTop", &d.row_top, &p, &e, &r);
        let row_bottom = seq(self, "rowBottom", &d.row_bottom, &s, &g, &q);
        let col_left = seq(self, "colLeft", &d.col_left, &p, &h, &s);
        let col_right = seq(self, "colRight", &d.col_right, &r, &f, &q);
        self.raw.diagrams.insert(
            name.to_string(),
            RawDiagram {
                p,
                e,
                r,
                h,
                f,
                s,
                g,
                q,
                row_top,
                row_bottom,
                col_left,
                col_right,
            },
        );
        self
    }

    pub fn frame(&mut self, name: &str, fr: &HexagonFrame) -> &mut Self {
        let n = |x: &str| format!("{name}.{x}");
        let a1 = self.module(&n("A1"), fr.a1());
        let b1 = self.module(&n("B1"), fr.b1());
        let b2 = self.module(&n("B2"), fr.b2());
        let a2 = self.module(&n("A2"), fr.a2());
        let a3 = self.module(&n("A3"), fr.a3());
        let a4 = self.module(&n("A4"), fr.a4());
        let raw = RawFrame {
            alpha: self.morphism(&n("alpha"), &fr.alpha, &a1, &b1),
            beta: self.morphism(&n("beta"), &fr.beta, &a1, &a2),
            top_b: self.morphism(&n("topB"), &fr.top_b, &b1, &b2),
            d: self.morphism(&n("d"), &fr.d, &a2, &a3),
            r: self.morphism(&n("r"), &fr.r, &b2, &a4),
            s: self.morphism(&n("s"), &fr.s, &a3, &a4),
            a1,
            b1,
            b2,
            a2,
            a3,
            a4,
        };
        self.raw.frames.insert(name.to_string(), raw);
        self
    }

    /// `diagram` must already be present.
    pub fn extension(&mut self, name: &str, diagram: &str, ext: &DiagramExtension) -> &mut Self {
        let rd = self.raw.diagrams[diagram].clone();
        let n = |x: &str| format!("{name}.{x}");
        let x = self.module(&n("X"), &ext.x);
        let raw = RawExtension {
            diagram: diagram.to_string(),
            i: self.morphism(&n("i"), &ext.i, &rd.h, &x),
            j: self.morphism(&n("j"), &ext.j, &rd.e, &x),
            m: self.morphism(&n("m"), &ext.m, &x, &rd.f),
            n: self.morphism(&n("n"), &ext.n, &x, &rd.g),
            x,
        };
        self.raw.extensions.insert(name.to_string(), raw);
        self
    }

    pub fn build(&self) -> RawDocument {
        self.raw.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{all_split, example_a};

    #[test]
    fn minimal_document() {
        let m = parse(r#"{"ring": {"kind": "Zmod", "m": 4}, "modules": {"Z2": {"generators": 1, "relations": [[2]]}}}"#)
            .unwrap();
        assert_eq!(m.modules.len(), 1);
        assert_eq!(m.ring, RingSpec::IntegersMod(4));
    }

    #[test]
    fn wrong_dimensions_are_semantic() {
        let text = r#"{"ring": {"kind": "Z"},
            "modules": {"A": {"generators": 1, "relations": []}},
            "morphisms": {"f": {"source": "A", "target": "A", "matrix": [[1, 2]]}}}"#;
        assert!(matches!(parse(text), Err(DocumentError::Semantic(_))));
        let bad = r#"{"ring": {"kind": "Z"},
            "modules": {"A": {"generators": 1, "relations": [[2]]}},
            "morphisms": {"f": {"source": "A", "target": "A", "matrix": [[1]], }}}"#;
        match parse(bad) {
            Err(DocumentError::Parse(e)) => assert_eq!(e.line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ill_defined_morphism_is_rejected() {
        let text = r#"{"ring": {"kind": "Z"},
            "modules": {"A": {"generators": 1, "relations": [[2]]}, "B": {"generators": 1, "relations": []}},
            "morphisms": {"f": {"source": "A", "target": "B", "matrix": [[1]]}}}"#;
        assert!(matches!(parse(text), Err(DocumentError::Semantic(_))));
    }

    #[test]
    fn big_integers() {
        let text = r#"{"ring": {"kind": "Z"},
            "modules": {"A": {"generators": 1, "relations": [["123456789012345678901234567890"]]}}}"#;
        let m = parse(text).unwrap();
        assert_eq!(serialize(&m).matches("123456789012345678901234567890").count(), 1);
        assert_eq!(parse(&serialize(&m)).unwrap(), m);
        let small_string = r#"{"ring": {"kind": "Z"}, "modules": {"A": {"generators": 1, "relations": [["7"]]}}}"#;
        assert!(matches!(parse(small_string), Err(DocumentError::Parse(_))));
    }

    #[test]
    fn diagrams_round_trip() {
        let mut b = DocumentBuilder::new(RingSpec::IntegersMod(4));
        b.diagram("A", &example_a()).diagram("S", &all_split());
        let text = serialize_raw(&b.build());
        let m = parse(&text).unwrap();
        assert_eq!(m.diagrams.len(), 2);
        assert_eq!(serialize(&m), text);
        let d = &m.diagrams["A"];
        let a = example_a();
        assert!(d.row_top.inject.equals(&a.row_top.inject));
        assert_eq!(d.q(), a.q());
    }
}
