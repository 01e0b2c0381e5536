//! The JSON file format.
//!
//! Every document carries `"schema_version": 1` and a `"type"` tag
//! (`decomposition`, `circle_morse`, `morse`, `pconnection` or `matrix`).
//! When the tag is absent the type is inferred from the keys present.
//! Integers are JSON numbers, or decimal strings when they do not fit in
//! 64 bits. Decoding errors name the offending location as a JSON path.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::algebra::group::{DeckGroup, FiniteTable, GroupElement, GroupKind, NormalForm};
use crate::algebra::group_ring::GroupRingElem;
use crate::algebra::novikov::NovikovSeries;
use crate::algebra::ring::{Regime, Ring, RingElem};
use crate::error::{Error, Result};
use crate::flow::decomposition::{Generator, MorseDecomposition, MorseSet, OrbitRecord};
use crate::flow::gain_graph::{GainEdge, GainGraph, PathStep};
use crate::homology::complex::GradedModule;
use crate::homology::matrix::RingMatrix;
use crate::novikov_pipeline::{CircleMorseData, CriticalPoint, Incidence, MorseData};
use crate::pconnection::assembly::PConnectionMatrix;

pub const SCHEMA_VERSION: u64 = 1;

/// A decomposition together with the optional extras its file may carry.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionDoc {
    pub name: Option<String>,
    pub decomposition: MorseDecomposition,
    pub gain_graph: Option<GainGraph>,
    /// The classical connection matrix to compare projections against.
    pub reference: Option<RingMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Decomposition(Box<DecompositionDoc>),
    CircleMorse(CircleMorseData),
    Morse(MorseData),
    PConnection(PConnectionMatrix),
    Matrix(RingMatrix),
}

impl Document {
    pub fn type_name(&self) -> &'static str {
        match self {
            Document::Decomposition(_) => "decomposition",
            Document::CircleMorse(_) => "circle_morse",
            Document::Morse(_) => "morse",
            Document::PConnection(_) => "pconnection",
            Document::Matrix(_) => "matrix",
        }
    }
}

fn schema(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Schema(format!("{path}: {msg}"))
}

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(path, format!("missing field \"{key}\"")))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn boolean(v: &Value, path: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| schema(path, "expected true or false"))
}

fn strings(v: &Value, path: &str) -> Result<Vec<String>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| string(x, &format!("{path}[{i}]")).map(str::to_string))
        .collect()
}

fn opt<'a>(obj: &'a Value, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

pub fn decode_int(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(schema(path, "expected an integer"))
            }
        }
        Value::String(s) => BigInt::from_str(s.trim()).map_err(|_| schema(path, format!("`{s}` is not an integer"))),
        _ => Err(schema(path, "expected an integer")),
    }
}

fn small_int(v: &Value, path: &str) -> Result<i64> {
    decode_int(v, path)?.to_i64().ok_or_else(|| schema(path, "integer out of range"))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    let n = small_int(v, path)?;
    usize::try_from(n).map_err(|_| schema(path, "expected a non-negative integer"))
}

pub fn encode_int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => json!(i),
        None => json!(x.to_string()),
    }
}

// groups

pub fn decode_group(v: &Value, path: &str) -> Result<Arc<DeckGroup>> {
    object(v, path)?;
    let kind = string(field(v, "kind", path)?, &format!("{path}.kind"))?;
    let names = |key: &str| -> Result<Option<Vec<String>>> {
        opt(v, key).map(|x| strings(x, &format!("{path}.{key}"))).transpose()
    };
    let rank = || count(field(v, "rank", path)?, &format!("{path}.rank"));
    let group = match kind {
        "finite" => {
            let elements = strings(field(v, "elements", path)?, &format!("{path}.elements"))?;
            let tpath = format!("{path}.table");
            let rows = array(field(v, "table", path)?, &tpath)?;
            let mut table = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let rpath = format!("{tpath}[{i}]");
                let row = array(row, &rpath)?
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let cpath = format!("{rpath}[{j}]");
                        match x {
                            Value::String(s) => elements
                                .iter()
                                .position(|e| e == s)
                                .ok_or_else(|| schema(&cpath, format!("unknown element `{s}`"))),
                            _ => count(x, &cpath),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                table.push(row);
            }
            let generators = names("generators")?.unwrap_or_default();
            DeckGroup::finite(FiniteTable::new(elements, table)?, generators)?
        }
        "free_abelian" => DeckGroup::free_abelian(rank()?, names("generators")?)?,
        "free" => DeckGroup::free(rank()?, names("generators")?)?,
        "infinite_cyclic" => {
            let gen = match (opt(v, "generator"), names("generators")?) {
                (Some(g), _) => Some(string(g, &format!("{path}.generator"))?.to_string()),
                (None, Some(mut gs)) if gs.len() == 1 => gs.pop(),
                (None, Some(_)) => return Err(schema(path, "an infinite cyclic group has one generator")),
                (None, None) => None,
            };
            DeckGroup::infinite_cyclic(gen)?
        }
        "klein_bottle" => DeckGroup::klein_bottle(names("generators")?)?,
        other => return Err(schema(&format!("{path}.kind"), format!("unknown group kind `{other}`"))),
    };
    Ok(Arc::new(group))
}

pub fn encode_group(g: &DeckGroup) -> Value {
    let gens = g.generators().to_vec();
    match g.kind() {
        GroupKind::Finite(t) => {
            let names = t.names();
            let table: Vec<Vec<&str>> = (0..t.order())
                .map(|i| (0..t.order()).map(|j| names[t.product(i, j)].as_str()).collect())
                .collect();
            json!({"kind": "finite", "elements": names, "table": table, "generators": gens})
        }
        GroupKind::FreeAbelian { rank } => json!({"kind": "free_abelian", "rank": rank, "generators": gens}),
        GroupKind::Free { rank } => json!({"kind": "free", "rank": rank, "generators": gens}),
        GroupKind::InfiniteCyclic => json!({"kind": "infinite_cyclic", "generators": gens}),
        GroupKind::KleinBottle => json!({"kind": "klein_bottle", "generators": gens}),
    }
}

/// Words for every group; also `{"b": n, "a": m}` for the Klein bottle group,
/// exponent arrays for free abelian groups and integers for the infinite
/// cyclic group.
pub fn decode_element(g: &Arc<DeckGroup>, v: &Value, path: &str) -> Result<GroupElement> {
    let nf = match (g.kind(), v) {
        (_, Value::String(s)) => g.parse_word(s).map_err(|e| schema(path, e))?,
        (GroupKind::KleinBottle, Value::Object(_)) => NormalForm::Klein {
            b: opt(v, "b").map(|x| small_int(x, &format!("{path}.b"))).transpose()?.unwrap_or(0),
            a: opt(v, "a").map(|x| small_int(x, &format!("{path}.a"))).transpose()?.unwrap_or(0),
        },
        (GroupKind::FreeAbelian { .. }, Value::Array(xs)) => NormalForm::FreeAbelian(
            xs.iter().enumerate().map(|(i, x)| small_int(x, &format!("{path}[{i}]"))).collect::<Result<_>>()?,
        ),
        (GroupKind::InfiniteCyclic, Value::Number(_)) => NormalForm::Cyclic(small_int(v, path)?),
        _ => return Err(schema(path, format!("not an element encoding for a {} group", g.kind().name()))),
    };
    GroupElement::new(g, nf).map_err(|e| schema(path, e))
}

pub fn encode_element(x: &GroupElement) -> Value {
    match x.normal_form() {
        NormalForm::Klein { b, a } => json!({"b": b, "a": a}),
        _ => json!(x.to_string()),
    }
}

// rings and their elements

pub fn encode_ring(r: &Ring) -> Value {
    match r {
        Ring::Integer => json!({"kind": "integer"}),
        Ring::GroupRing(g) => json!({"kind": "group_ring", "group": encode_group(g)}),
        Ring::Novikov { variable, precision } => {
            json!({"kind": "novikov", "variable": variable, "precision": precision})
        }
    }
}

pub fn decode_ring(v: &Value, path: &str) -> Result<Ring> {
    object(v, path)?;
    match string(field(v, "kind", path)?, &format!("{path}.kind"))? {
        "integer" => Ok(Ring::Integer),
        "group_ring" => Ok(Ring::GroupRing(decode_group(field(v, "group", path)?, &format!("{path}.group"))?)),
        "novikov" => Ok(Ring::Novikov {
            variable: opt(v, "variable")
                .map(|x| string(x, &format!("{path}.variable")).map(str::to_string))
                .transpose()?
                .unwrap_or_else(|| "t".into()),
            precision: count(field(v, "precision", path)?, &format!("{path}.precision"))?,
        }),
        other => Err(schema(&format!("{path}.kind"), format!("unknown ring kind `{other}`"))),
    }
}

pub fn encode_series(s: &NovikovSeries) -> Value {
    let coeffs: Vec<Value> = if s.is_exact() {
        let last = s.coeffs().iter().rposition(|c| !num_traits::Zero::is_zero(c));
        s.coeffs()[..last.map_or(0, |l| l + 1)].iter().map(encode_int).collect()
    } else {
        s.coeffs().iter().map(encode_int).collect()
    };
    json!({"min_degree": s.min_degree(), "coeffs": coeffs, "precision": s.precision(), "exact": s.is_exact()})
}

pub fn decode_series(v: &Value, default_precision: usize, path: &str) -> Result<NovikovSeries> {
    object(v, path)?;
    let min = opt(v, "min_degree").map(|x| small_int(x, &format!("{path}.min_degree"))).transpose()?.unwrap_or(0);
    let cpath = format!("{path}.coeffs");
    let coeffs = array(field(v, "coeffs", path)?, &cpath)?
        .iter()
        .enumerate()
        .map(|(i, x)| decode_int(x, &format!("{cpath}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let exact = opt(v, "exact").map(|x| boolean(x, &format!("{path}.exact"))).transpose()?.unwrap_or(true);
    let precision = opt(v, "precision").map(|x| count(x, &format!("{path}.precision"))).transpose()?;
    if exact {
        Ok(NovikovSeries::laurent(min, coeffs, precision.unwrap_or(default_precision)))
    } else {
        if coeffs.is_empty() {
            return Err(schema(&cpath, "a truncated series needs at least one coefficient"));
        }
        Ok(NovikovSeries::truncated(min, coeffs))
    }
}

pub fn encode_ring_elem(x: &RingElem) -> Value {
    match x {
        RingElem::Int(n) => encode_int(n),
        RingElem::Series(s) => encode_series(s),
        RingElem::Group(e) => {
            let terms: Vec<Value> =
                e.terms().map(|(g, c)| json!({"element": encode_element(&g), "coeff": encode_int(c)})).collect();
            json!({ "terms": terms })
        }
    }
}

pub fn decode_ring_elem(ring: &Ring, v: &Value, path: &str) -> Result<RingElem> {
    match ring {
        Ring::Integer => Ok(RingElem::Int(decode_int(v, path)?)),
        Ring::Novikov { precision, .. } => Ok(RingElem::Series(decode_series(v, *precision, path)?)),
        Ring::GroupRing(g) => {
            let tpath = format!("{path}.terms");
            let terms = array(field(v, "terms", path)?, &tpath)?
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let p = format!("{tpath}[{i}]");
                    let el = decode_element(g, field(t, "element", &p)?, &format!("{p}.element"))?;
                    Ok((el, decode_int(field(t, "coeff", &p)?, &format!("{p}.coeff"))?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RingElem::Group(GroupRingElem::from_terms(g, terms)?))
        }
    }
}

// matrices

pub fn encode_triplets(m: &RingMatrix) -> Value {
    let entries: Vec<Value> = m
        .entries()
        .map(|(i, j, v)| json!({"row": m.rows()[i], "col": m.cols()[j], "value": encode_ring_elem(v)}))
        .collect();
    Value::Array(entries)
}

fn decode_triplets(ring: &Ring, rows: Vec<String>, cols: Vec<String>, v: &Value, path: &str) -> Result<RingMatrix> {
    let mut m = RingMatrix::zero(ring, rows, cols);
    for (n, t) in array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{n}]");
        let row = string(field(t, "row", &p)?, &format!("{p}.row"))?;
        let col = string(field(t, "col", &p)?, &format!("{p}.col"))?;
        let i = m.row_index(row).ok_or_else(|| schema(&format!("{p}.row"), format!("unknown row `{row}`")))?;
        let j = m.col_index(col).ok_or_else(|| schema(&format!("{p}.col"), format!("unknown column `{col}`")))?;
        let value = decode_ring_elem(ring, field(t, "value", &p)?, &format!("{p}.value"))?;
        m.add_to(i, j, &value)?;
    }
    Ok(m)
}

pub fn encode_matrix(m: &RingMatrix) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "type": "matrix",
        "ring": encode_ring(m.ring()),
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": encode_triplets(m),
    })
}

fn decode_matrix(v: &Value, path: &str) -> Result<RingMatrix> {
    let ring = match opt(v, "ring") {
        Some(r) => decode_ring(r, &format!("{path}.ring"))?,
        None => Ring::Integer,
    };
    let rows = strings(field(v, "rows", path)?, &format!("{path}.rows"))?;
    let cols = strings(field(v, "cols", path)?, &format!("{path}.cols"))?;
    decode_triplets(&ring, rows, cols, field(v, "entries", path)?, &format!("{path}.entries"))
}

/// A classical reference: a `matrix` document, or a bare triplet list
/// over `Z` whose ids are taken from `ids`.
pub fn decode_reference(v: &Value, ids: &[String], path: &str) -> Result<RingMatrix> {
    match v {
        Value::Array(_) => decode_triplets(&Ring::Integer, ids.to_vec(), ids.to_vec(), v, path),
        Value::Object(_) => decode_matrix(v, path),
        _ => Err(schema(path, "expected a matrix document or a list of entries")),
    }
}

// decompositions

fn decode_set(v: &Value, path: &str) -> Result<MorseSet> {
    object(v, path)?;
    let id = string(field(v, "id", path)?, &format!("{path}.id"))?.to_string();
    let gpath = format!("{path}.generators");
    let generators = array(field(v, "generators", path)?, &gpath)?
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let p = format!("{gpath}[{i}]");
            let degree = small_int(field(g, "degree", &p)?, &format!("{p}.degree"))?;
            let degree = i32::try_from(degree).map_err(|_| schema(&format!("{p}.degree"), "degree out of range"))?;
            Ok(Generator { id: string(field(g, "id", &p)?, &format!("{p}.id"))?.to_string(), degree })
        })
        .collect::<Result<Vec<_>>>()?;
    let flag = |key: &str, default: bool| -> Result<bool> {
        opt(v, key).map(|x| boolean(x, &format!("{path}.{key}"))).transpose().map(|b| b.unwrap_or(default))
    };
    Ok(MorseSet { id, generators, evenly_covered: flag("evenly_covered", true)?, index_trivial: flag("index_trivial", false)? })
}

fn decode_gain_graph(g: &Arc<DeckGroup>, v: &Value, path: &str) -> Result<GainGraph> {
    object(v, path)?;
    let vertices = strings(field(v, "vertices", path)?, &format!("{path}.vertices"))?;
    let epath = format!("{path}.edges");
    let edges = array(field(v, "edges", path)?, &epath)?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let p = format!("{epath}[{i}]");
            let s = |key: &str| -> Result<String> { Ok(string(field(e, key, &p)?, &format!("{p}.{key}"))?.to_string()) };
            Ok(GainEdge {
                id: s("id")?,
                from: s("from")?,
                to: s("to")?,
                label: decode_element(g, field(e, "label", &p)?, &format!("{p}.label"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut morse_vertices = BTreeMap::new();
    if let Some(mv) = opt(v, "morse_vertices") {
        let mpath = format!("{path}.morse_vertices");
        for (set, vert) in object(mv, &mpath)? {
            morse_vertices.insert(set.clone(), string(vert, &format!("{mpath}.{set}"))?.to_string());
        }
    }
    GainGraph::new(g, vertices, edges, morse_vertices)
}

fn decode_path(v: &Value, path: &str) -> Result<Vec<PathStep>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = format!("{path}[{i}]");
            match s {
                Value::String(e) => Ok(PathStep { edge: e.clone(), reverse: false }),
                Value::Object(_) => Ok(PathStep {
                    edge: string(field(s, "edge", &p)?, &format!("{p}.edge"))?.to_string(),
                    reverse: opt(s, "reverse").map(|x| boolean(x, &format!("{p}.reverse"))).transpose()?.unwrap_or(false),
                }),
                _ => Err(schema(&p, "expected an edge id or {\"edge\", \"reverse\"}")),
            }
        })
        .collect()
}

/// Resolves the generator of an orbit end: named explicitly, or the only
/// generator of its set.
fn orbit_end(v: &Value, side: &str, sets: &[MorseSet], path: &str) -> Result<(String, String)> {
    let set = string(field(v, &format!("{side}_set"), path)?, &format!("{path}.{side}_set"))?.to_string();
    let key = format!("{side}_generator");
    let gen = match opt(v, &key) {
        Some(g) => string(g, &format!("{path}.{key}"))?.to_string(),
        None => match sets.iter().find(|s| s.id == set).map(|s| s.generators.as_slice()) {
            Some([g]) => g.id.clone(),
            Some(_) => return Err(schema(path, format!("\"{key}\" is required when '{set}' has several generators"))),
            None => return Err(schema(&format!("{path}.{side}_set"), format!("unknown Morse set '{set}'"))),
        },
    };
    Ok((set, gen))
}

fn decode_decomposition(v: &Value) -> Result<DecompositionDoc> {
    let group = decode_group(field(v, "group", "$")?, "$.group")?;
    let regime_text = string(field(v, "regime", "$")?, "$.regime")?;
    let regime = Regime::parse(regime_text).ok_or_else(|| schema("$.regime", format!("unknown regime `{regime_text}`")))?;
    let sets = array(field(v, "morse_sets", "$")?, "$.morse_sets")?
        .iter()
        .enumerate()
        .map(|(i, s)| decode_set(s, &format!("$.morse_sets[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let gain_graph = opt(v, "gain_graph").map(|g| decode_gain_graph(&group, g, "$.gain_graph")).transpose()?;
    let mut orbits = Vec::new();
    if let Some(list) = opt(v, "orbits") {
        for (i, o) in array(list, "$.orbits")?.iter().enumerate() {
            let p = format!("$.orbits[{i}]");
            object(o, &p)?;
            let (from_set, from_gen) = orbit_end(o, "from", &sets, &p)?;
            let (to_set, to_gen) = orbit_end(o, "to", &sets, &p)?;
            let label = match (opt(o, "label"), opt(o, "path")) {
                (Some(l), None) => decode_element(&group, l, &format!("{p}.label"))?,
                (None, Some(route)) => {
                    let gg = gain_graph
                        .as_ref()
                        .ok_or_else(|| schema(&format!("{p}.path"), "a path needs a \"gain_graph\""))?;
                    let steps = decode_path(route, &format!("{p}.path"))?;
                    if let Some((start, end)) = gg.endpoints(&steps)? {
                        for (set, at, side) in [(&from_set, &start, "start"), (&to_set, &end, "end")] {
                            if let Some(want) = gg.morse_vertex(set) {
                                if want != at {
                                    return Err(Error::NonConsecutivePath(format!(
                                        "orbit {i}: path {side}s at '{at}' but '{set}' sits at '{want}'"
                                    )));
                                }
                            }
                        }
                    }
                    gg.lift_path(&steps)?
                }
                _ => return Err(schema(&p, "exactly one of \"label\" and \"path\" is required")),
            };
            let coeff = match opt(o, "coeff") {
                Some(c) => decode_int(c, &format!("{p}.coeff"))?,
                None => BigInt::from(1),
            };
            orbits.push(OrbitRecord { from_set, from_gen, to_set, to_gen, label, coeff });
        }
    }
    let order = opt(v, "order")
        .map(|o| {
            array(o, "$.order")?
                .iter()
                .enumerate()
                .map(|(i, pair)| {
                    let p = format!("$.order[{i}]");
                    match strings(pair, &p)?.as_slice() {
                        [lo, hi] => Ok((lo.clone(), hi.clone())),
                        _ => Err(schema(&p, "expected [lower, upper]")),
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let mut decomposition = MorseDecomposition::new(&group, regime, sets, orbits, order.as_deref())?;
    if let Some(b) = opt(v, "base_lift") {
        decomposition = decomposition.with_base_lift(decode_element(&group, b, "$.base_lift")?)?;
    }
    let ids: Vec<String> = {
        let m = decomposition.module();
        m.degrees().flat_map(|k| m.generators(k).to_vec()).collect()
    };
    let reference = opt(v, "reference_classical")
        .map(|r| decode_reference(r, &ids, "$.reference_classical"))
        .transpose()?;
    let name = opt(v, "name").map(|n| string(n, "$.name").map(str::to_string)).transpose()?;
    Ok(DecompositionDoc { name, decomposition, gain_graph, reference })
}

pub fn encode_decomposition(doc: &DecompositionDoc) -> Value {
    let d = &doc.decomposition;
    let sets: Vec<Value> = d
        .sets()
        .iter()
        .map(|s| {
            let gens: Vec<Value> = s.generators.iter().map(|g| json!({"id": g.id, "degree": g.degree})).collect();
            json!({"id": s.id, "generators": gens, "index_trivial": s.index_trivial})
        })
        .collect();
    let orbits: Vec<Value> = d
        .orbits()
        .iter()
        .map(|o| {
            json!({
                "from_set": o.from_set, "from_generator": o.from_gen,
                "to_set": o.to_set, "to_generator": o.to_gen,
                "label": encode_element(&o.label), "coeff": encode_int(&o.coeff),
            })
        })
        .collect();
    let p = d.poset();
    let order: Vec<Value> =
        p.relations().into_iter().map(|(a, b)| json!([p.elements()[a], p.elements()[b]])).collect();
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "type": "decomposition",
        "group": encode_group(d.group()),
        "regime": d.regime().as_str(),
        "morse_sets": sets,
        "order": order,
        "orbits": orbits,
        "base_lift": encode_element(d.base_lift()),
    });
    if let Some(n) = &doc.name {
        out["name"] = json!(n);
    }
    if let Some(r) = &doc.reference {
        out["reference_classical"] = encode_triplets(r);
    }
    out
}

// Morse data

fn decode_points(v: &Value) -> Result<Vec<CriticalPoint>> {
    array(field(v, "critical_points", "$")?, "$.critical_points")?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let path = format!("$.critical_points[{i}]");
            let index = small_int(field(p, "index", &path)?, &format!("{path}.index"))?;
            Ok(CriticalPoint {
                id: string(field(p, "id", &path)?, &format!("{path}.id"))?.to_string(),
                index: i32::try_from(index).map_err(|_| schema(&format!("{path}.index"), "index out of range"))?,
            })
        })
        .collect()
}

fn ends(r: &Value, path: &str) -> Result<(String, String)> {
    Ok((
        string(field(r, "from", path)?, &format!("{path}.from"))?.to_string(),
        string(field(r, "to", path)?, &format!("{path}.to"))?.to_string(),
    ))
}

fn decode_circle(v: &Value) -> Result<CircleMorseData> {
    let points = decode_points(v)?;
    let mut incidences = Vec::new();
    if let Some(list) = opt(v, "incidences") {
        for (i, r) in array(list, "$.incidences")?.iter().enumerate() {
            let p = format!("$.incidences[{i}]");
            let (from, to) = ends(r, &p)?;
            incidences.push(Incidence {
                from,
                to,
                level: small_int(field(r, "level", &p)?, &format!("{p}.level"))?,
                count: decode_int(field(r, "count", &p)?, &format!("{p}.count"))?,
            });
        }
    }
    CircleMorseData::new(points, incidences)
}

pub fn encode_circle(d: &CircleMorseData) -> Value {
    let points: Vec<Value> = d.points().iter().map(|p| json!({"id": p.id, "index": p.index})).collect();
    let inc: Vec<Value> = d
        .incidences()
        .iter()
        .map(|r| json!({"from": r.from, "to": r.to, "level": r.level, "count": encode_int(&r.count)}))
        .collect();
    json!({"schema_version": SCHEMA_VERSION, "type": "circle_morse", "critical_points": points, "incidences": inc})
}

fn decode_morse(v: &Value) -> Result<MorseData> {
    let points = decode_points(v)?;
    let mut counts = Vec::new();
    if let Some(list) = opt(v, "counts") {
        for (i, r) in array(list, "$.counts")?.iter().enumerate() {
            let p = format!("$.counts[{i}]");
            let (from, to) = ends(r, &p)?;
            counts.push((from, to, decode_int(field(r, "count", &p)?, &format!("{p}.count"))?));
        }
    }
    Ok(MorseData { points, counts })
}

// p-connection matrices

pub fn encode_pconnection(m: &PConnectionMatrix) -> Value {
    let module = m.module();
    let generators: Vec<Value> = module
        .degrees()
        .flat_map(|k| module.generators(k).iter().map(move |g| (k, g)))
        .map(|(k, g)| json!({"id": g, "degree": k, "set": m.owners().get(g)}))
        .collect();
    let blocks: Vec<Value> = m
        .blocks()
        .iter()
        .map(|((r, a), b)| {
            json!({"repeller": r, "attractor": a, "rows": b.rows(), "cols": b.cols(), "entries": encode_triplets(b)})
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "type": "pconnection",
        "ring": encode_ring(m.ring()),
        "generators": generators,
        "blocks": blocks,
    })
}

fn decode_pconnection(v: &Value) -> Result<PConnectionMatrix> {
    let ring = decode_ring(field(v, "ring", "$")?, "$.ring")?;
    let mut owner = BTreeMap::new();
    let mut pairs = Vec::new();
    for (i, g) in array(field(v, "generators", "$")?, "$.generators")?.iter().enumerate() {
        let p = format!("$.generators[{i}]");
        let id = string(field(g, "id", &p)?, &format!("{p}.id"))?.to_string();
        let degree = small_int(field(g, "degree", &p)?, &format!("{p}.degree"))? as i32;
        let set = string(field(g, "set", &p)?, &format!("{p}.set"))?.to_string();
        owner.insert(id.clone(), set);
        pairs.push((degree, id));
    }
    let mut by_degree: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    for (k, id) in pairs {
        by_degree.entry(k).or_default().push(id);
    }
    let module = GradedModule::new(by_degree)?;
    let mut blocks = BTreeMap::new();
    for (i, b) in array(field(v, "blocks", "$")?, "$.blocks")?.iter().enumerate() {
        let p = format!("$.blocks[{i}]");
        let (r, a) = (
            string(field(b, "repeller", &p)?, &format!("{p}.repeller"))?.to_string(),
            string(field(b, "attractor", &p)?, &format!("{p}.attractor"))?.to_string(),
        );
        let rows = strings(field(b, "rows", &p)?, &format!("{p}.rows"))?;
        let cols = strings(field(b, "cols", &p)?, &format!("{p}.cols"))?;
        let m = decode_triplets(&ring, rows, cols, field(b, "entries", &p)?, &format!("{p}.entries"))?;
        blocks.insert((r, a), m);
    }
    PConnectionMatrix::from_blocks(ring, module, owner, blocks)
}

// documents

/// Parses a document. Syntax errors and shape errors are [`Error::Schema`];
/// data that parses but violates the model keeps its own error.
pub fn parse_document(text: &str) -> Result<Document> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Schema(format!("invalid JSON: {e}")))?;
    decode_document(&v)
}

pub fn decode_document(v: &Value) -> Result<Document> {
    object(v, "$")?;
    let version = field(v, "schema_version", "$")?;
    if version.as_u64() != Some(SCHEMA_VERSION) {
        return Err(schema("$.schema_version", format!("unsupported version {version}; expected {SCHEMA_VERSION}")));
    }
    let tag = match opt(v, "type") {
        Some(t) => string(t, "$.type")?.to_string(),
        None if v.get("incidences").is_some() => "circle_morse".into(),
        None if v.get("counts").is_some() => "morse".into(),
        None if v.get("blocks").is_some() => "pconnection".into(),
        None if v.get("entries").is_some() => "matrix".into(),
        None => "decomposition".into(),
    };
    Ok(match tag.as_str() {
        "decomposition" => Document::Decomposition(Box::new(decode_decomposition(v)?)),
        "circle_morse" => Document::CircleMorse(decode_circle(v)?),
        "morse" => Document::Morse(decode_morse(v)?),
        "pconnection" => Document::PConnection(decode_pconnection(v)?),
        "matrix" => Document::Matrix(decode_matrix(v, "$")?),
        other => return Err(schema("$.type", format!("unknown document type `{other}`"))),
    })
}
