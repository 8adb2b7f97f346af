//! Line-delimited JSON records, one sketch per line.
//!
//! Field names follow the Onshape attribute names (`pntX`, `startParam`,
//! `halfSpace0`, ...). Known fields are written in a fixed order; unknown
//! fields are kept and written after them.

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use super::IngestError;
use crate::model::{
    Constraint, ConstraintType, Direction, EntityRef, Geometry, HalfSpace, Primitive, PrimitiveType, Provenance,
    Sketch,
};
use crate::units::Length;
use crate::Vec2;

const PRIMITIVE_KEYS: [&str; 3] = ["id", "type", "isConstruction"];
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn geometry_fields(g: &Geometry) -> Vec<(&'static str, Value)> {
    match *g {
        Geometry::Point { x, y } => vec![("x", num(x)), ("y", num(y))],
        Geometry::Line {
            dir_x,
            dir_y,
            pnt_x,
            pnt_y,
            start_param,
            end_param,
        } => vec![
            ("dirX", num(dir_x)),
            ("dirY", num(dir_y)),
            ("pntX", num(pnt_x)),
            ("pntY", num(pnt_y)),
            ("startParam", num(start_param)),
            ("endParam", num(end_param)),
        ],
        Geometry::Circle {
            x_center,
            y_center,
            x_dir,
            y_dir,
            radius,
            clockwise,
        } => vec![
            ("xCenter", num(x_center)),
            ("yCenter", num(y_center)),
            ("xDir", num(x_dir)),
            ("yDir", num(y_dir)),
            ("radius", num(radius)),
            ("clockwise", Value::Bool(clockwise)),
        ],
        Geometry::Arc {
            x_center,
            y_center,
            x_dir,
            y_dir,
            radius,
            clockwise,
            start_param,
            end_param,
        } => vec![
            ("xCenter", num(x_center)),
            ("yCenter", num(y_center)),
            ("xDir", num(x_dir)),
            ("yDir", num(y_dir)),
            ("radius", num(radius)),
            ("clockwise", Value::Bool(clockwise)),
            ("startParam", num(start_param)),
            ("endParam", num(end_param)),
        ],
        Geometry::Ellipse {
            x_center,
            y_center,
            x_dir,
            y_dir,
            radius,
            minor_radius,
            clockwise,
        } => vec![
            ("xCenter", num(x_center)),
            ("yCenter", num(y_center)),
            ("xDir", num(x_dir)),
            ("yDir", num(y_dir)),
            ("radius", num(radius)),
            ("minorRadius", num(minor_radius)),
            ("clockwise", Value::Bool(clockwise)),
        ],
        Geometry::Spline { ref control_points } => vec![(
            "controlPoints",
            Value::Array(
                control_points
                    .iter()
                    .map(|p| Value::Array(vec![num(p.x), num(p.y)]))
                    .collect(),
            ),
        )],
    }
}

fn geometry_keys(kind: PrimitiveType) -> &'static [&'static str] {
    match kind {
        PrimitiveType::Point => &["x", "y"],
        PrimitiveType::Line => &["dirX", "dirY", "pntX", "pntY", "startParam", "endParam"],
        PrimitiveType::Circle => &["xCenter", "yCenter", "xDir", "yDir", "radius", "clockwise"],
        PrimitiveType::Arc => &[
            "xCenter",
            "yCenter",
            "xDir",
            "yDir",
            "radius",
            "clockwise",
            "startParam",
            "endParam",
        ],
        PrimitiveType::Ellipse => &["xCenter", "yCenter", "xDir", "yDir", "radius", "minorRadius", "clockwise"],
        PrimitiveType::Spline => &["controlPoints"],
    }
}

fn primitive_to_json(p: &Primitive) -> Value {
    let mut m = Map::new();
    m.insert("id".into(), Value::String(p.id.clone()));
    m.insert("type".into(), Value::String(p.kind().name().into()));
    m.insert("isConstruction".into(), Value::Bool(p.is_construction));
    for (k, v) in geometry_fields(&p.geometry) {
        m.insert(k.into(), v);
    }
    for (k, v) in &p.extra {
        m.insert(k.clone(), v.clone());
    }
    Value::Object(m)
}

fn constraint_to_json(c: &Constraint) -> Value {
    let mut m = Map::new();
    m.insert("type".into(), Value::String(c.kind.name().into()));
    for (i, r) in c.locals.iter().enumerate() {
        m.insert(format!("local{i}"), Value::String(r.to_string()));
    }
    if let Some(l) = c.length {
        m.insert("length".into(), Value::String(l.to_string()));
    }
    if let Some(a) = c.angle {
        m.insert("angle".into(), num(a));
    }
    if let Some(d) = c.direction {
        m.insert("direction".into(), Value::String(d.name().into()));
    }
    if let Some(h) = c.half_space0 {
        m.insert("halfSpace0".into(), Value::String(h.name().into()));
    }
    if let Some(h) = c.half_space1 {
        m.insert("halfSpace1".into(), Value::String(h.name().into()));
    }
    if let Some(b) = c.aligned {
        m.insert("aligned".into(), Value::Bool(b));
    }
    if let Some(b) = c.clockwise {
        m.insert("clockwise".into(), Value::Bool(b));
    }
    if let Some(p) = c.provenance {
        m.insert("provenance".into(), Value::String(p.name().into()));
    }
    for (k, v) in &c.extra {
        m.insert(k.clone(), v.clone());
    }
    Value::Object(m)
}

/// JSON object for one sketch.
pub fn sketch_to_json(s: &Sketch) -> Value {
    let mut m = Map::new();
    m.insert("id".into(), Value::String(s.id.clone()));
    m.insert(
        "primitives".into(),
        Value::Array(s.primitives.iter().map(primitive_to_json).collect()),
    );
    m.insert(
        "constraints".into(),
        Value::Array(s.constraints.iter().map(constraint_to_json).collect()),
    );
    for (k, v) in &s.extra {
        m.insert(k.clone(), v.clone());
    }
    Value::Object(m)
}

fn get_f64(m: &Map<String, Value>, key: &str) -> Result<f64, String> {
    m.get(key)
        .ok_or_else(|| format!("missing field {key:?}"))?
        .as_f64()
        .ok_or_else(|| format!("field {key:?} is not a number"))
}

fn get_bool(m: &Map<String, Value>, key: &str) -> Result<bool, String> {
    match m.get(key) {
        None => Ok(false),
        Some(v) => v.as_bool().ok_or_else(|| format!("field {key:?} is not a boolean")),
    }
}

fn get_str<'a>(m: &'a Map<String, Value>, key: &str) -> Result<&'a str, String> {
    m.get(key)
        .ok_or_else(|| format!("missing field {key:?}"))?
        .as_str()
        .ok_or_else(|| format!("field {key:?} is not a string"))
}

fn parse_geometry(kind: PrimitiveType, m: &Map<String, Value>) -> Result<Geometry, String> {
    let f = |k: &str| get_f64(m, k);
    Ok(match kind {
        PrimitiveType::Point => Geometry::Point { x: f("x")?, y: f("y")? },
        PrimitiveType::Line => Geometry::Line {
            dir_x: f("dirX")?,
            dir_y: f("dirY")?,
            pnt_x: f("pntX")?,
            pnt_y: f("pntY")?,
            start_param: f("startParam")?,
            end_param: f("endParam")?,
        },
        PrimitiveType::Circle => Geometry::Circle {
            x_center: f("xCenter")?,
            y_center: f("yCenter")?,
            x_dir: f("xDir")?,
            y_dir: f("yDir")?,
            radius: f("radius")?,
            clockwise: get_bool(m, "clockwise")?,
        },
        PrimitiveType::Arc => Geometry::Arc {
            x_center: f("xCenter")?,
            y_center: f("yCenter")?,
            x_dir: f("xDir")?,
            y_dir: f("yDir")?,
            radius: f("radius")?,
            clockwise: get_bool(m, "clockwise")?,
            start_param: f("startParam")?,
            end_param: f("endParam")?,
        },
        PrimitiveType::Ellipse => Geometry::Ellipse {
            x_center: f("xCenter")?,
            y_center: f("yCenter")?,
            x_dir: f("xDir")?,
            y_dir: f("yDir")?,
            radius: f("radius")?,
            minor_radius: f("minorRadius")?,
            clockwise: get_bool(m, "clockwise")?,
        },
        PrimitiveType::Spline => {
            let pts = m
                .get("controlPoints")
                .and_then(Value::as_array)
                .ok_or("missing array \"controlPoints\"")?;
            let control_points = pts
                .iter()
                .map(|p| match p.as_array().map(|a| a.as_slice()) {
                    Some([x, y]) => match (x.as_f64(), y.as_f64()) {
                        (Some(x), Some(y)) => Ok(Vec2::new(x, y)),
                        _ => Err("control point is not numeric".to_string()),
                    },
                    _ => Err("control point is not an [x, y] pair".to_string()),
                })
                .collect::<Result<_, _>>()?;
            Geometry::Spline { control_points }
        }
    })
}

fn parse_primitive(v: &Value) -> Result<Primitive, String> {
    let m = v.as_object().ok_or("primitive is not an object")?;
    let kind: PrimitiveType = get_str(m, "type")?.parse().map_err(|e| format!("{e}"))?;
    let geometry = parse_geometry(kind, m)?;
    let known = geometry_keys(kind);
    let extra = m
        .iter()
        .filter(|(k, _)| !PRIMITIVE_KEYS.contains(&k.as_str()) && !known.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(Primitive {
        id: get_str(m, "id")?.to_string(),
        is_construction: get_bool(m, "isConstruction")?,
        geometry,
        extra,
    })
}

fn local_index(key: &str) -> Option<usize> {
    match key {
        "localFirst" => Some(0),
        "localSecond" => Some(1),
        _ => key.strip_prefix("local")?.parse().ok(),
    }
}

fn parse_length(v: &Value) -> Result<Length, String> {
    match v {
        Value::String(s) => s.parse().map_err(|e| format!("length {s:?}: {e}")),
        Value::Number(n) => Ok(Length::from_meters(n.as_f64().unwrap_or(f64::NAN))),
        _ => Err("length is neither a string nor a number".into()),
    }
}

fn parse_constraint(v: &Value) -> Result<Constraint, String> {
    let m = v.as_object().ok_or("constraint is not an object")?;
    let kind: ConstraintType = get_str(m, "type")?.parse().map_err(|e| format!("{e}"))?;
    let mut locals = BTreeMap::new();
    let mut c = Constraint::new(kind, Vec::new());
    for (k, v) in m {
        if let Some(i) = local_index(k) {
            let r = v.as_str().ok_or_else(|| format!("{k} is not a string"))?;
            if locals.insert(i, EntityRef::parse(r)).is_some() {
                return Err(format!("reference {i} given twice"));
            }
            continue;
        }
        let enum_str = || v.as_str().ok_or_else(|| format!("{k} is not a string"));
        let flag = || v.as_bool().ok_or_else(|| format!("{k} is not a boolean"));
        match k.as_str() {
            "type" => {}
            "length" => c.length = Some(parse_length(v)?),
            "angle" => c.angle = Some(v.as_f64().ok_or("angle is not a number")?),
            "direction" => {
                c.direction = Some(Direction::parse(enum_str()?).ok_or_else(|| format!("bad direction {v}"))?)
            }
            "halfSpace0" => {
                c.half_space0 = Some(HalfSpace::parse(enum_str()?).ok_or_else(|| format!("bad halfSpace0 {v}"))?)
            }
            "halfSpace1" => {
                c.half_space1 = Some(HalfSpace::parse(enum_str()?).ok_or_else(|| format!("bad halfSpace1 {v}"))?)
            }
            "aligned" => c.aligned = Some(flag()?),
            "clockwise" => c.clockwise = Some(flag()?),
            "provenance" => {
                c.provenance = Some(Provenance::parse(enum_str()?).ok_or_else(|| format!("bad provenance {v}"))?)
            }
            _ => {
                c.extra.insert(k.clone(), v.clone());
            }
        }
    }
    for (n, (i, r)) in locals.into_iter().enumerate() {
        if i != n {
            return Err(format!("reference local{n} missing"));
        }
        c.locals.push(r);
    }
    Ok(c)
}

/// Parse and validate one sketch object.
pub fn sketch_from_json(v: &Value) -> Result<Sketch, String> {
    let m = v.as_object().ok_or("record is not an object")?;
    let id = match m.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err("missing field \"id\"".into()),
    };
    let list = |k: &str| -> Result<&[Value], String> {
        match m.get(k) {
            None => Ok(&[]),
            Some(Value::Array(a)) => Ok(a),
            Some(_) => Err(format!("{k} is not an array")),
        }
    };
    let primitives = list("primitives")?
        .iter()
        .enumerate()
        .map(|(i, p)| parse_primitive(p).map_err(|e| format!("primitive {i}: {e}")))
        .collect::<Result<_, _>>()?;
    let constraints = list("constraints")?
        .iter()
        .enumerate()
        .map(|(i, c)| parse_constraint(c).map_err(|e| format!("constraint {i}: {e}")))
        .collect::<Result<_, _>>()?;
    let extra = m
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "id" | "primitives" | "constraints"))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let s = Sketch {
        id,
        primitives,
        constraints,
        extra,
    };
    s.validate().map_err(|e| e.to_string())?;
    Ok(s)
}

/// Parse one line of a corpus file.
pub fn parse_record(line: &str, line_no: usize) -> Result<Sketch, IngestError> {
    let malformed = |cause: String| IngestError::MalformedRecord { line: line_no, cause };
    let v: Value = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
    sketch_from_json(&v).map_err(malformed)
}

/// Lazy reader over a corpus. Blank lines are skipped; a bad record yields
/// an error item and reading continues with the next line.
pub struct CorpusReader<R> {
    lines: io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R) -> Self {
        CorpusReader {
            lines: reader.lines(),
            line_no: 0,
        }
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Sketch, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line_no += 1;
            match line {
                Err(e) => return Some(Err(IngestError::Io(e))),
                Ok(l) if l.trim().is_empty() => continue,
                Ok(l) => return Some(parse_record(&l, self.line_no)),
            }
        }
    }
}

/// Open a corpus file for streaming.
pub fn parse_corpus(path: impl AsRef<Path>) -> Result<CorpusReader<BufReader<File>>, IngestError> {
    Ok(CorpusReader::new(BufReader::new(File::open(path)?)))
}

/// Write one record and its newline.
pub fn write_record<W: Write>(w: &mut W, s: &Sketch) -> io::Result<()> {
    serde_json::to_writer(&mut *w, &sketch_to_json(s))?;
    w.write_all(b"\n")
}

/// Write every sketch as one line; returns the record count.
pub fn write_corpus<W, I>(w: W, sketches: I) -> io::Result<usize>
where
    W: Write,
    I: IntoIterator,
    I::Item: Borrow<Sketch>,
{
    let mut w = BufWriter::new(w);
    let mut n = 0;
    for s in sketches {
        write_record(&mut w, s.borrow())?;
        n += 1;
    }
    w.flush()?;
    Ok(n)
}

/// [`write_corpus`] to a file, created or truncated.
pub fn write_corpus_file<I>(path: impl AsRef<Path>, sketches: I) -> io::Result<usize>
where
    I: IntoIterator,
    I::Item: Borrow<Sketch>,
{
    write_corpus(File::create(path)?, sketches)
}

