//! Integer encoding of construction sequences.
//!
//! Token layout, in id order:
//!
//! | range | meaning |
//! |---|---|
//! | 0 | stop |
//! | 1..=6 | add node of a primitive type |
//! | 7..=23 | add edge of a constraint type |
//! | refs | primitive index * 4 + selector (none, start, end, center) |
//! | 3 | direction |
//! | 2 + 2 | half space of local 0 and local 1 |
//! | 2 + 2 | aligned, clockwise |
//! | lengths | quantized length table |
//! | angles | quantized angle table |
//!
//! Primitive indices are implied by the order of add-node tokens and
//! constraint indices by the order of add-edge tokens.

use std::collections::HashMap;
use std::io::{self, Write};

use serde_json::{json, Value};

use super::{ConstructionOp, ConstructionSequence, EdgeParams, SequenceError};
use crate::model::{ConstraintType, Direction, HalfSpace, PrimitiveType, Selector};

const STOP: u32 = 0;
const NODE_BASE: u32 = 1;
const EDGE_BASE: u32 = NODE_BASE + PrimitiveType::ALL.len() as u32;
const REF_BASE: u32 = EDGE_BASE + ConstraintType::ALL.len() as u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VocabularyOptions {
    /// Largest primitive count a sequence may have; `None` takes the corpus
    /// maximum.
    pub max_primitives: Option<usize>,
    /// Most frequent values kept verbatim per table.
    pub top_values: usize,
    /// Evenly spaced values added across the observed range.
    pub fallback_bins: usize,
}

impl Default for VocabularyOptions {
    fn default() -> Self {
        VocabularyOptions {
            max_primitives: None,
            top_values: 300,
            fallback_bins: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TokenVocabulary {
    pub max_primitives: usize,
    /// Sorted, meters.
    pub lengths: Vec<f64>,
    /// Sorted, degrees.
    pub angles: Vec<f64>,
}

fn selector_code(sel: Option<Selector>) -> u32 {
    match sel {
        None => 0,
        Some(Selector::Start) => 1,
        Some(Selector::End) => 2,
        Some(Selector::Center) => 3,
    }
}

fn selector_of(code: u32) -> Option<Selector> {
    match code {
        1 => Some(Selector::Start),
        2 => Some(Selector::End),
        3 => Some(Selector::Center),
        _ => None,
    }
}

fn direction_code(d: Direction) -> u32 {
    Direction::ALL.iter().position(|&x| x == d).unwrap_or(0) as u32
}

fn half_code(h: HalfSpace) -> u32 {
    match h {
        HalfSpace::Left => 0,
        HalfSpace::Right => 1,
    }
}

/// Frequent values plus uniform bins over the observed range.
fn value_table(values: &[f64], key_scale: f64, opts: &VocabularyOptions) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut counts: HashMap<i64, u64> = HashMap::new();
    for &v in values {
        *counts.entry((v * key_scale).round() as i64).or_default() += 1;
    }
    let mut ranked: Vec<(i64, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut table: Vec<f64> = ranked
        .iter()
        .take(opts.top_values)
        .map(|&(k, _)| k as f64 / key_scale)
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = opts.fallback_bins;
    if bins == 1 || (bins > 1 && hi == lo) {
        table.push(lo);
    } else if bins > 1 {
        table.extend((0..bins).map(|i| {
            if i + 1 == bins {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (bins - 1) as f64
            }
        }));
    }
    table.sort_by(f64::total_cmp);
    table.dedup();
    table
}

fn nearest(table: &[f64], v: f64) -> Option<usize> {
    if table.is_empty() || !v.is_finite() {
        return None;
    }
    let i = table.partition_point(|&t| t < v);
    let cands = [i.checked_sub(1), (i < table.len()).then_some(i)];
    cands
        .into_iter()
        .flatten()
        .min_by(|&a, &b| (table[a] - v).abs().total_cmp(&(table[b] - v).abs()))
}

impl TokenVocabulary {
    pub fn build<'a, I>(sequences: I, opts: &VocabularyOptions) -> Self
    where
        I: IntoIterator<Item = &'a ConstructionSequence>,
    {
        let mut lengths = Vec::new();
        let mut angles = Vec::new();
        let mut max_nodes = 0;
        for seq in sequences {
            max_nodes = max_nodes.max(seq.node_count());
            for op in &seq.ops {
                if let ConstructionOp::AddEdge { params, .. } = op {
                    lengths.extend(params.length.filter(|v| v.is_finite()));
                    angles.extend(params.angle.filter(|v| v.is_finite()));
                }
            }
        }
        TokenVocabulary {
            max_primitives: opts.max_primitives.unwrap_or(max_nodes).max(1),
            lengths: value_table(&lengths, 1e9, opts),
            angles: value_table(&angles, 1e6, opts),
        }
    }

    fn dir_base(&self) -> u32 {
        REF_BASE + 4 * self.max_primitives as u32
    }
    fn hs0_base(&self) -> u32 {
        self.dir_base() + 3
    }
    fn hs1_base(&self) -> u32 {
        self.hs0_base() + 2
    }
    fn aligned_base(&self) -> u32 {
        self.hs1_base() + 2
    }
    fn clockwise_base(&self) -> u32 {
        self.aligned_base() + 2
    }
    fn length_base(&self) -> u32 {
        self.clockwise_base() + 2
    }
    fn angle_base(&self) -> u32 {
        self.length_base() + self.lengths.len() as u32
    }

    /// Number of distinct token ids.
    pub fn size(&self) -> u32 {
        self.angle_base() + self.angles.len() as u32
    }

    pub fn stop_token(&self) -> u32 {
        STOP
    }

    pub fn node_token(&self, kind: PrimitiveType) -> u32 {
        NODE_BASE + kind.index() as u32
    }

    pub fn edge_token(&self, kind: ConstraintType) -> u32 {
        EDGE_BASE + kind.index() as u32
    }

    /// Nearest table entry for a length in meters.
    pub fn quantize_length(&self, v: f64) -> Option<f64> {
        nearest(&self.lengths, v).map(|i| self.lengths[i])
    }

    pub fn quantize_angle(&self, v: f64) -> Option<f64> {
        nearest(&self.angles, v).map(|i| self.angles[i])
    }

    pub fn tokenize(&self, seq: &ConstructionSequence) -> Result<Vec<u32>, SequenceError> {
        let oov = |s: String| SequenceError::OutOfVocabulary(s);
        let mut out = Vec::with_capacity(seq.ops.len() * 4);
        let mut nodes = 0;
        for op in &seq.ops {
            match op {
                ConstructionOp::AddNode { primitive, kind } => {
                    if *primitive != nodes {
                        return Err(oov(format!("primitive {primitive} inserted out of order")));
                    }
                    if nodes >= self.max_primitives {
                        return Err(oov(format!("primitive {primitive} beyond {}", self.max_primitives)));
                    }
                    nodes += 1;
                    out.push(self.node_token(*kind));
                }
                ConstructionOp::AddEdge { kind, refs, params, .. } => {
                    out.push(self.edge_token(*kind));
                    for &(p, sel) in refs {
                        if p >= self.max_primitives {
                            return Err(oov(format!("reference to primitive {p}")));
                        }
                        out.push(REF_BASE + 4 * p as u32 + selector_code(sel));
                    }
                    self.push_params(params, &mut out)?;
                }
                ConstructionOp::Stop => {
                    out.push(STOP);
                    return Ok(out);
                }
            }
        }
        out.push(STOP);
        Ok(out)
    }

    fn push_params(&self, p: &EdgeParams, out: &mut Vec<u32>) -> Result<(), SequenceError> {
        if let Some(d) = p.direction {
            out.push(self.dir_base() + direction_code(d));
        }
        if let Some(h) = p.half_space0 {
            out.push(self.hs0_base() + half_code(h));
        }
        if let Some(h) = p.half_space1 {
            out.push(self.hs1_base() + half_code(h));
        }
        if let Some(a) = p.aligned {
            out.push(self.aligned_base() + a as u32);
        }
        if let Some(c) = p.clockwise {
            out.push(self.clockwise_base() + c as u32);
        }
        if let Some(v) = p.length {
            let i = nearest(&self.lengths, v).ok_or_else(|| SequenceError::OutOfVocabulary(format!("length {v}")))?;
            out.push(self.length_base() + i as u32);
        }
        if let Some(v) = p.angle {
            let i = nearest(&self.angles, v).ok_or_else(|| SequenceError::OutOfVocabulary(format!("angle {v}")))?;
            out.push(self.angle_base() + i as u32);
        }
        Ok(())
    }

    /// Inverse of [`TokenVocabulary::tokenize`] up to quantization;
    /// constraint indices come out numbered by appearance.
    pub fn detokenize(&self, tokens: &[u32]) -> Result<ConstructionSequence, SequenceError> {
        let bad = |position: usize, detail: &str| SequenceError::MalformedTokens {
            position,
            detail: detail.to_string(),
        };
        // (node id, kind) per inserted primitive
        let mut prims: Vec<(usize, PrimitiveType)> = Vec::new();
        let mut next_node = 0;
        let mut edges = 0;
        let mut ops = Vec::new();
        let mut i = 0;
        let in_range = |t: u32, base: u32, n: u32| t >= base && t < base + n;
        while i < tokens.len() {
            let t = tokens[i];
            if t == STOP {
                if i + 1 != tokens.len() {
                    return Err(bad(i + 1, "tokens after stop"));
                }
                ops.push(ConstructionOp::Stop);
                return Ok(ConstructionSequence { ops });
            }
            if in_range(t, NODE_BASE, PrimitiveType::ALL.len() as u32) {
                let kind = PrimitiveType::ALL[(t - NODE_BASE) as usize];
                ops.push(ConstructionOp::AddNode {
                    primitive: prims.len(),
                    kind,
                });
                prims.push((next_node, kind));
                next_node += 1 + kind.sub_selectors().len();
                i += 1;
                continue;
            }
            if !in_range(t, EDGE_BASE, ConstraintType::ALL.len() as u32) {
                return Err(bad(i, "expected node, edge or stop"));
            }
            let kind = ConstraintType::ALL[(t - EDGE_BASE) as usize];
            i += 1;
            let mut refs = Vec::new();
            let mut members = Vec::new();
            while i < tokens.len() && in_range(tokens[i], REF_BASE, 4 * self.max_primitives as u32) {
                let code = tokens[i] - REF_BASE;
                let p = (code / 4) as usize;
                let sel = selector_of(code % 4);
                let &(node, pk) = prims.get(p).ok_or_else(|| bad(i, "reference to a primitive not yet inserted"))?;
                let member = match sel {
                    None => node,
                    Some(s) => {
                        let k = pk
                            .sub_selectors()
                            .iter()
                            .position(|&x| x == s)
                            .ok_or_else(|| bad(i, "selector not available on primitive"))?;
                        node + 1 + k
                    }
                };
                refs.push((p, sel));
                members.push(member);
                i += 1;
            }
            if refs.is_empty() {
                return Err(bad(i, "edge without references"));
            }
            let mut params = EdgeParams::default();
            let mut take = |base: u32, n: u32| -> Option<u32> {
                let t = *tokens.get(i)?;
                in_range(t, base, n).then(|| {
                    i += 1;
                    t - base
                })
            };
            params.direction = take(self.dir_base(), 3).map(|c| Direction::ALL[c as usize]);
            params.half_space0 = take(self.hs0_base(), 2).map(|c| if c == 0 { HalfSpace::Left } else { HalfSpace::Right });
            params.half_space1 = take(self.hs1_base(), 2).map(|c| if c == 0 { HalfSpace::Left } else { HalfSpace::Right });
            params.aligned = take(self.aligned_base(), 2).map(|c| c == 1);
            params.clockwise = take(self.clockwise_base(), 2).map(|c| c == 1);
            params.length = take(self.length_base(), self.lengths.len() as u32).map(|c| self.lengths[c as usize]);
            params.angle = take(self.angle_base(), self.angles.len() as u32).map(|c| self.angles[c as usize]);
            ops.push(ConstructionOp::AddEdge {
                constraint: edges,
                kind,
                refs,
                members,
                params,
            });
            edges += 1;
        }
        Err(bad(tokens.len(), "missing stop token"))
    }

    pub fn to_json(&self) -> Value {
        let names = |v: Vec<&str>| Value::from(v);
        json!({
            "stop": STOP,
            "nodeBase": NODE_BASE,
            "nodeTypes": names(PrimitiveType::ALL.iter().map(|k| k.name()).collect()),
            "edgeBase": EDGE_BASE,
            "edgeTypes": names(ConstraintType::ALL.iter().map(|k| k.name()).collect()),
            "refBase": REF_BASE,
            "refSelectors": ["none", "start", "end", "center"],
            "maxPrimitives": self.max_primitives,
            "directionBase": self.dir_base(),
            "directions": names(Direction::ALL.iter().map(|d| d.name()).collect()),
            "halfSpace0Base": self.hs0_base(),
            "halfSpace1Base": self.hs1_base(),
            "halfSpaces": ["left", "right"],
            "alignedBase": self.aligned_base(),
            "clockwiseBase": self.clockwise_base(),
            "lengthBase": self.length_base(),
            "lengths": self.lengths,
            "angleBase": self.angle_base(),
            "angles": self.angles,
            "size": self.size(),
        })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let floats = |key: &str| -> Option<Vec<f64>> {
            v.get(key)?.as_array()?.iter().map(Value::as_f64).collect()
        };
        Some(TokenVocabulary {
            max_primitives: v.get("maxPrimitives")?.as_u64()? as usize,
            lengths: floats("lengths")?,
            angles: floats("angles")?,
        })
    }
}

/// One sketch per line, space-separated decimal token ids.
pub fn write_token_stream<W: Write>(mut w: W, streams: &[Vec<u32>]) -> io::Result<()> {
    for s in streams {
        let line: Vec<String> = s.iter().map(u32::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}
