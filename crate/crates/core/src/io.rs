//! Exchange formats.
//!
//! * Multivector JSON: `{"p":2,"q":0,"field":"R","coeffs":{"":1.0,"1":0.5}}`
//!   with blade keys as concatenated ascending generator digits (empty key =
//!   identity) and complex coefficients as `[re, im]` pairs. Zero
//!   coefficients are omitted. Round-trips are bit exact at double
//!   precision (shortest round-trip decimal printing).
//! * Generator sets: `{"signature":{...},"generators":[<multivector>,...]}`.
//! * Field containers: a JSON header `{signature, grid, kind}` plus row-major
//!   node payloads, either as `.field.json` (payload inline) or
//!   `.field.bin` (the same header as a JSON preamble, then flat
//!   little-endian f64 payload, complex interleaved re,im).

use std::io::{Read, Write};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::blade;
use crate::fields::{ConnectionField, FrameField, MultivectorField};
use crate::generators::GeneratorSet;
use crate::grid::Grid;
use crate::multivector::Multivector;
use crate::pauli::{IntertwinerCase, IntertwinerResult};
use crate::scalar::{ClScalar, ScalarField};
use crate::signature::Signature;

const BIN_MAGIC: &[u8; 8] = b"CLFIELD\0";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error("scalar field mismatch: data is {data}, expected {expected}")]
    FieldMismatch { data: String, expected: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Malformed(msg.into())
}

/// The scalar-field tag of a serialized object, for runtime dispatch.
pub fn peek_scalar_field(value: &Value) -> Result<ScalarField, IoError> {
    let tag = value
        .get("field")
        .or_else(|| value.get("signature").and_then(|s| s.get("field")))
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing \"field\" tag"))?;
    match tag {
        "R" => Ok(ScalarField::Real),
        "C" => Ok(ScalarField::Complex),
        other => Err(bad(format!("unknown field tag {other:?}"))),
    }
}

fn scalar_to_value<S: ClScalar>(c: S) -> Value {
    match S::FIELD {
        ScalarField::Real => json!(c.re()),
        ScalarField::Complex => json!([c.re(), c.im()]),
    }
}

fn scalar_from_value<S: ClScalar>(v: &Value) -> Result<S, IoError> {
    match v {
        Value::Number(x) => {
            let re = x.as_f64().ok_or_else(|| bad("non-finite coefficient"))?;
            S::try_from_parts(re, 0.0).ok_or_else(|| bad("field cannot hold value"))
        }
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| bad("bad complex pair"))?;
            let im = pair[1].as_f64().ok_or_else(|| bad("bad complex pair"))?;
            S::try_from_parts(re, im)
                .ok_or_else(|| bad("imaginary part in a real-field object"))
        }
        _ => Err(bad("coefficient must be a number or [re, im]")),
    }
}

fn signature_value(sig: Signature, field: ScalarField) -> Value {
    json!({"p": sig.p, "q": sig.q, "field": field.to_string()})
}

fn signature_from_value<S: ClScalar>(v: &Value) -> Result<Signature, IoError> {
    let p = v.get("p").and_then(Value::as_u64).ok_or_else(|| bad("missing p"))?;
    let q = v.get("q").and_then(Value::as_u64).ok_or_else(|| bad("missing q"))?;
    let tag = peek_scalar_field(v)?;
    if tag != S::FIELD {
        return Err(IoError::FieldMismatch {
            data: tag.to_string(),
            expected: S::FIELD.to_string(),
        });
    }
    Signature::new(p as usize, q as usize).map_err(|e| bad(e.to_string()))
}

/// Multivector -> JSON value in the documented format.
pub fn multivector_to_value<S: ClScalar>(mv: &Multivector<S>) -> Value {
    let mut coeffs = Map::new();
    for a in 0..mv.signature().dim() {
        let c = mv.coeff(a);
        if c == S::zero() {
            continue;
        }
        coeffs.insert(blade::blade_label(a), scalar_to_value(c));
    }
    let mut obj = Map::new();
    obj.insert("p".into(), json!(mv.signature().p));
    obj.insert("q".into(), json!(mv.signature().q));
    obj.insert("field".into(), json!(S::FIELD.to_string()));
    obj.insert("coeffs".into(), Value::Object(coeffs));
    Value::Object(obj)
}

pub fn multivector_from_value<S: ClScalar>(v: &Value) -> Result<Multivector<S>, IoError> {
    let sig = signature_from_value::<S>(v)?;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("missing coeffs map"))?;
    let mut mv = Multivector::zero(sig);
    for (key, value) in coeffs {
        let mask = blade::parse_blade_label(key, sig.n())
            .ok_or_else(|| bad(format!("bad blade key {key:?} for n={}", sig.n())))?;
        mv.set_coeff(mask, scalar_from_value(value)?);
    }
    Ok(mv)
}

pub fn multivector_to_string<S: ClScalar>(mv: &Multivector<S>) -> String {
    serde_json::to_string(&multivector_to_value(mv)).expect("serializable")
}

pub fn multivector_from_str<S: ClScalar>(s: &str) -> Result<Multivector<S>, IoError> {
    multivector_from_value(&serde_json::from_str(s)?)
}

pub fn generator_set_to_value<S: ClScalar>(set: &GeneratorSet<S>) -> Value {
    json!({
        "signature": signature_value(set.signature(), S::FIELD),
        "generators": set
            .gens()
            .iter()
            .map(multivector_to_value)
            .collect::<Vec<_>>(),
    })
}

pub fn generator_set_from_value<S: ClScalar>(v: &Value) -> Result<GeneratorSet<S>, IoError> {
    let sig = signature_from_value::<S>(
        v.get("signature").ok_or_else(|| bad("missing signature"))?,
    )?;
    let gens_v = v
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing generators array"))?;
    if gens_v.len() != sig.n() {
        return Err(bad(format!(
            "expected {} generators, found {}",
            sig.n(),
            gens_v.len()
        )));
    }
    let mut gens = Vec::with_capacity(sig.n());
    for gv in gens_v {
        let mv = multivector_from_value::<S>(gv)?;
        if mv.signature() != sig {
            return Err(bad("generator signature differs from the set signature"));
        }
        gens.push(mv);
    }
    Ok(GeneratorSet::new(sig, gens))
}

pub fn intertwiner_result_to_value<S: ClScalar>(result: &IntertwinerResult<S>) -> Value {
    let mut obj = Map::new();
    obj.insert("T".into(), multivector_to_value(&result.t));
    obj.insert("T_inv".into(), multivector_to_value(&result.t_inv));
    obj.insert("case".into(), json!(result.case.label()));
    if let IntertwinerCase::Odd { factor, .. } = &result.case {
        obj.insert("factor".into(), multivector_to_value(factor));
    }
    obj.insert("residual".into(), json!(result.residual));
    obj.insert("chosen_F".into(), json!(result.chosen_f));
    Value::Object(obj)
}

/// What a field container holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Frame,
    Connection,
    Multivector,
}

impl FieldKind {
    fn tag(self) -> &'static str {
        match self {
            FieldKind::Frame => "frame",
            FieldKind::Connection => "connection",
            FieldKind::Multivector => "multivector",
        }
    }

    fn from_tag(tag: &str) -> Result<Self, IoError> {
        match tag {
            "frame" => Ok(FieldKind::Frame),
            "connection" => Ok(FieldKind::Connection),
            "multivector" => Ok(FieldKind::Multivector),
            other => Err(bad(format!("unknown field kind {other:?}"))),
        }
    }

    fn comps(self, sig: Signature, grid: &Grid) -> usize {
        match self {
            FieldKind::Frame => sig.n(),
            FieldKind::Connection => grid.r(),
            FieldKind::Multivector => 1,
        }
    }
}

/// Any of the three field flavors, for format-level dispatch.
#[derive(Clone, Debug)]
pub enum AnyField<S: ClScalar> {
    Frame(FrameField<S>),
    Connection(ConnectionField<S>),
    Single(MultivectorField<S>),
}

impl<S: ClScalar> AnyField<S> {
    pub fn kind(&self) -> FieldKind {
        match self {
            AnyField::Frame(_) => FieldKind::Frame,
            AnyField::Connection(_) => FieldKind::Connection,
            AnyField::Single(_) => FieldKind::Multivector,
        }
    }

    fn grid(&self) -> &Grid {
        match self {
            AnyField::Frame(f) => f.grid(),
            AnyField::Connection(f) => f.grid(),
            AnyField::Single(f) => f.grid(),
        }
    }

    fn signature(&self) -> Signature {
        match self {
            AnyField::Frame(f) => f.signature(),
            AnyField::Connection(f) => f.signature(),
            AnyField::Single(f) => f.signature(),
        }
    }

    fn elements(&self) -> &[Multivector<S>] {
        match self {
            AnyField::Frame(f) => f.data(),
            AnyField::Connection(f) => f.data(),
            AnyField::Single(f) => f.data(),
        }
    }

    fn assemble(
        kind: FieldKind,
        grid: Grid,
        sig: Signature,
        data: Vec<Multivector<S>>,
    ) -> Result<Self, IoError> {
        let out = match kind {
            FieldKind::Frame => AnyField::Frame(
                FrameField::new(grid, sig, data).map_err(|e| bad(e.to_string()))?,
            ),
            FieldKind::Connection => AnyField::Connection(
                ConnectionField::new(grid, sig, data).map_err(|e| bad(e.to_string()))?,
            ),
            FieldKind::Multivector => AnyField::Single(
                MultivectorField::new(grid, sig, data).map_err(|e| bad(e.to_string()))?,
            ),
        };
        Ok(out)
    }
}

fn field_header<S: ClScalar>(field: &AnyField<S>) -> Value {
    let grid = field.grid();
    json!({
        "signature": signature_value(field.signature(), S::FIELD),
        "grid": {
            "r": grid.r(),
            "shape": grid.shape,
            "origin": grid.origin,
            "spacing": grid.spacing,
        },
        "kind": field.kind().tag(),
    })
}

fn header_parts<S: ClScalar>(header: &Value) -> Result<(Signature, Grid, FieldKind), IoError> {
    let sig = signature_from_value::<S>(
        header.get("signature").ok_or_else(|| bad("missing signature"))?,
    )?;
    let g = header.get("grid").ok_or_else(|| bad("missing grid"))?;
    let to_usizes = |v: &Value| -> Result<Vec<usize>, IoError> {
        v.as_array()
            .ok_or_else(|| bad("grid arrays"))?
            .iter()
            .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| bad("grid shape")))
            .collect()
    };
    let to_f64s = |v: &Value| -> Result<Vec<f64>, IoError> {
        v.as_array()
            .ok_or_else(|| bad("grid arrays"))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| bad("grid reals")))
            .collect()
    };
    let shape = to_usizes(g.get("shape").ok_or_else(|| bad("missing shape"))?)?;
    let origin = to_f64s(g.get("origin").ok_or_else(|| bad("missing origin"))?)?;
    let spacing = to_f64s(g.get("spacing").ok_or_else(|| bad("missing spacing"))?)?;
    let grid = Grid::new(shape, origin, spacing).map_err(|e| bad(e.to_string()))?;
    let kind = FieldKind::from_tag(
        header
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing kind"))?,
    )?;
    Ok((sig, grid, kind))
}

/// Serialize a field with the payload inline (`.field.json`).
pub fn field_to_json<S: ClScalar>(field: &AnyField<S>) -> Value {
    let mut header = field_header(field);
    let payload: Vec<Value> = field
        .elements()
        .iter()
        .map(|mv| Value::Array((0..mv.signature().dim()).map(|a| scalar_to_value(mv.coeff(a))).collect()))
        .collect();
    header
        .as_object_mut()
        .expect("header is an object")
        .insert("payload".into(), Value::Array(payload));
    header
}

pub fn field_from_json<S: ClScalar>(value: &Value) -> Result<AnyField<S>, IoError> {
    let (sig, grid, kind) = header_parts::<S>(value)?;
    let comps = kind.comps(sig, &grid);
    let expected = grid.node_count() * comps;
    let payload = value
        .get("payload")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing payload"))?;
    if payload.len() != expected {
        return Err(bad(format!(
            "payload holds {} elements, expected {}",
            payload.len(),
            expected
        )));
    }
    let mut data = Vec::with_capacity(expected);
    for entry in payload {
        let arr = entry.as_array().ok_or_else(|| bad("payload entry"))?;
        if arr.len() != sig.dim() {
            return Err(bad("payload entry has wrong coefficient count"));
        }
        let mut mv = Multivector::zero(sig);
        for (a, cv) in arr.iter().enumerate() {
            mv.set_coeff(a, scalar_from_value(cv)?);
        }
        data.push(mv);
    }
    AnyField::assemble(kind, grid, sig, data)
}

/// Write the binary container: magic, u32 LE header length, header JSON,
/// flat little-endian f64 payload.
pub fn write_field_bin<S: ClScalar>(
    w: &mut impl Write,
    field: &AnyField<S>,
) -> Result<(), IoError> {
    let header = serde_json::to_vec(&field_header(field))?;
    w.write_all(BIN_MAGIC)?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    for mv in field.elements() {
        for a in 0..mv.signature().dim() {
            let c = mv.coeff(a);
            w.write_all(&c.re().to_le_bytes())?;
            if S::FIELD == ScalarField::Complex {
                w.write_all(&c.im().to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_field_bin<S: ClScalar>(r: &mut impl Read) -> Result<AnyField<S>, IoError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BIN_MAGIC {
        return Err(bad("not a field binary (bad magic)"));
    }
    let mut len_bytes = [0u8; 4];
    r.read_exact(&mut len_bytes)?;
    let header_len = u32::from_le_bytes(len_bytes) as usize;
    let mut header_bytes = vec![0u8; header_len];
    r.read_exact(&mut header_bytes)?;
    let header: Value = serde_json::from_slice(&header_bytes)?;
    let (sig, grid, kind) = header_parts::<S>(&header)?;
    let comps = kind.comps(sig, &grid);
    let count = grid.node_count() * comps;
    let scalars_per = if S::FIELD == ScalarField::Complex { 2 } else { 1 };
    let mut payload = vec![0u8; count * sig.dim() * scalars_per * 8];
    r.read_exact(&mut payload)?;
    let mut reals = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")));
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        let mut mv = Multivector::zero(sig);
        for a in 0..sig.dim() {
            let re = reals.next().ok_or_else(|| bad("payload truncated"))?;
            let im = if scalars_per == 2 {
                reals.next().ok_or_else(|| bad("payload truncated"))?
            } else {
                0.0
            };
            mv.set_coeff(
                a,
                S::try_from_parts(re, im).ok_or_else(|| bad("bad scalar in payload"))?,
            );
        }
        data.push(mv);
    }
    AnyField::assemble(kind, grid, sig, data)
}
