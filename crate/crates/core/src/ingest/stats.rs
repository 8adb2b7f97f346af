//! Streaming corpus statistics with a commutative merge.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::dof::{sketch_dof_report, Pearson};
use crate::model::{ConstraintType, PrimitiveType, Sketch};
use crate::units::Length;

/// Percentiles of constraint count reported per primitive count.
pub const PERCENTILES: [u32; 4] = [50, 69, 84, 93];

#[derive(Clone, Debug, Default)]
pub struct StatsAccumulator {
    sketches: u64,
    primitives: [u64; PrimitiveType::ALL.len()],
    constraints: [u64; ConstraintType::ALL.len()],
    joint: BTreeMap<(usize, usize), u64>,
    /// Keyed by nanometers.
    lengths: HashMap<i64, u64>,
    /// Keyed by micro-degrees.
    angles: HashMap<i64, u64>,
    dof: Pearson,
}

fn length_key(m: f64) -> i64 {
    (m * 1e9).round() as i64
}

fn angle_key(deg: f64) -> i64 {
    (deg * 1e6).round() as i64
}

impl StatsAccumulator {
    pub fn push(&mut self, s: &Sketch) {
        self.sketches += 1;
        for p in &s.primitives {
            self.primitives[p.kind().index()] += 1;
        }
        for c in &s.constraints {
            self.constraints[c.kind.index()] += 1;
            if let Some(l) = c.length {
                *self.lengths.entry(length_key(l.meters())).or_default() += 1;
            }
            if let Some(a) = c.angle {
                *self.angles.entry(angle_key(a)).or_default() += 1;
            }
        }
        *self.joint.entry((s.primitives.len(), s.constraints.len())).or_default() += 1;
        let r = sketch_dof_report(s);
        self.dof.push(r.total_dof as f64, r.removed_dof as f64);
    }

    pub fn merge(&mut self, o: &StatsAccumulator) {
        self.sketches += o.sketches;
        for (a, b) in self.primitives.iter_mut().zip(&o.primitives) {
            *a += b;
        }
        for (a, b) in self.constraints.iter_mut().zip(&o.constraints) {
            *a += b;
        }
        for (k, v) in &o.joint {
            *self.joint.entry(*k).or_default() += v;
        }
        for (k, v) in &o.lengths {
            *self.lengths.entry(*k).or_default() += v;
        }
        for (k, v) in &o.angles {
            *self.angles.entry(*k).or_default() += v;
        }
        self.dof.merge(&o.dof);
    }

    pub fn sketch_count(&self) -> u64 {
        self.sketches
    }

    pub fn finish(&self) -> StatsReport {
        let mut prim_hist: BTreeMap<usize, u64> = BTreeMap::new();
        let mut cons_hist: BTreeMap<usize, u64> = BTreeMap::new();
        let mut by_prims: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
        for (&(p, c), &n) in &self.joint {
            *prim_hist.entry(p).or_default() += n;
            *cons_hist.entry(c).or_default() += n;
            by_prims.entry(p).or_default().push((c, n));
        }
        let percentiles = by_prims
            .into_iter()
            .map(|(primitives, hist)| {
                let sketches = hist.iter().map(|x| x.1).sum();
                PercentileRow {
                    primitives,
                    sketches,
                    values: PERCENTILES.map(|p| nearest_rank(&hist, sketches, p)),
                }
            })
            .collect();
        let lengths = value_table(&self.lengths, |k| Length::shortest(k as f64 * 1e-9).to_string(), |k| {
            k as f64 * 1e-9
        });
        let angles = value_table(&self.angles, |k| crate::units::format_trimmed(k as f64 * 1e-6, 6), |k| {
            k as f64 * 1e-6
        });
        StatsReport {
            sketch_count: self.sketches,
            primitive_types: type_table(PrimitiveType::ALL.iter().map(|t| t.name()), &self.primitives),
            constraint_types: type_table(ConstraintType::ALL.iter().map(|t| t.name()), &self.constraints),
            primitive_count_histogram: prim_hist.into_iter().collect(),
            constraint_count_histogram: cons_hist.into_iter().collect(),
            percentiles,
            length_coverage: coverage(&lengths),
            angle_coverage: coverage(&angles),
            lengths,
            angles,
            dof_correlation: self.dof.coefficient().ok(),
        }
    }
}

/// Smallest value whose cumulative count reaches `p` percent of `total`.
fn nearest_rank(sorted_hist: &[(usize, u64)], total: u64, p: u32) -> usize {
    let rank = (p as u64 * total).div_ceil(100).max(1);
    let mut seen = 0;
    for &(v, n) in sorted_hist {
        seen += n;
        if seen >= rank {
            return v;
        }
    }
    sorted_hist.last().map_or(0, |x| x.0)
}

fn type_table<'a>(names: impl Iterator<Item = &'a str>, counts: &[u64]) -> Vec<TypeFrequency> {
    let total: u64 = counts.iter().sum();
    names
        .zip(counts)
        .filter(|(_, &n)| n > 0)
        .map(|(name, &count)| TypeFrequency {
            name: name.to_string(),
            count,
            percent: 100.0 * count as f64 / total as f64,
        })
        .collect()
}

fn value_table(
    counts: &HashMap<i64, u64>,
    label: impl Fn(i64) -> String,
    value: impl Fn(i64) -> f64,
) -> Vec<ValueFrequency> {
    let total: u64 = counts.values().sum();
    let mut rows: Vec<(i64, u64)> = counts.iter().map(|(&k, &n)| (k, n)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    rows.into_iter()
        .map(|(k, count)| ValueFrequency {
            label: label(k),
            value: value(k),
            count,
            percent: 100.0 * count as f64 / total as f64,
        })
        .collect()
}

fn coverage(rows: &[ValueFrequency]) -> Vec<f64> {
    let total: u64 = rows.iter().map(|r| r.count).sum();
    let mut acc = 0;
    rows.iter()
        .map(|r| {
            acc += r.count;
            acc as f64 / total as f64
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeFrequency {
    pub name: String,
    pub count: u64,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueFrequency {
    /// Lengths in the unit needing the fewest digits; angles in degrees.
    pub label: String,
    /// Meters or degrees.
    pub value: f64,
    pub count: u64,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PercentileRow {
    pub primitives: usize,
    pub sketches: u64,
    /// Constraint counts at each of [`PERCENTILES`].
    pub values: [usize; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatsReport {
    pub sketch_count: u64,
    pub primitive_types: Vec<TypeFrequency>,
    pub constraint_types: Vec<TypeFrequency>,
    pub primitive_count_histogram: Vec<(usize, u64)>,
    pub constraint_count_histogram: Vec<(usize, u64)>,
    pub percentiles: Vec<PercentileRow>,
    /// Most frequent first.
    pub lengths: Vec<ValueFrequency>,
    pub angles: Vec<ValueFrequency>,
    /// Fraction of values covered by the top `k + 1` distinct values.
    pub length_coverage: Vec<f64>,
    pub angle_coverage: Vec<f64>,
    /// Pearson r between total and removed DOF.
    pub dof_correlation: Option<f64>,
}

/// Single pass over a stream of sketches.
pub fn corpus_stats<'a, I: IntoIterator<Item = &'a Sketch>>(sketches: I) -> StatsReport {
    let mut acc = StatsAccumulator::default();
    for s in sketches {
        acc.push(s);
    }
    acc.finish()
}

const TOP_VALUES: usize = 10;

impl StatsReport {
    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "sketches: {}", self.sketch_count);
        for (title, rows) in [("primitive types", &self.primitive_types), ("constraint types", &self.constraint_types)] {
            let _ = writeln!(o, "\n{title}:");
            for r in rows {
                let _ = writeln!(o, "  {:<14} {:>7.2}%  {}", r.name, r.percent, r.count);
            }
        }
        let _ = writeln!(o, "\nconstraints per primitive count (p50 p69 p84 p93):");
        for r in &self.percentiles {
            let v = r.values;
            let _ = writeln!(
                o,
                "  {:>4} primitives  n={:<8} {} {} {} {}",
                r.primitives, r.sketches, v[0], v[1], v[2], v[3]
            );
        }
        for (title, rows, cov) in [
            ("lengths", &self.lengths, &self.length_coverage),
            ("angles (deg)", &self.angles, &self.angle_coverage),
        ] {
            let _ = writeln!(o, "\ntop {title}:");
            for (r, c) in rows.iter().zip(cov).take(TOP_VALUES) {
                let _ = writeln!(o, "  {:<12} {:>7.2}%  cumulative {:.4}", r.label, r.percent, c);
            }
        }
        match self.dof_correlation {
            Some(r) => {
                let _ = writeln!(o, "\ndof correlation (total vs removed): {r:.4}");
            }
            None => {
                let _ = writeln!(o, "\ndof correlation (total vs removed): n/a");
            }
        }
        o
    }

    /// Comma-separated tables with a header row, by file stem.
    pub fn csv_tables(&self) -> Vec<(&'static str, String)> {
        let types = |rows: &[TypeFrequency]| {
            let mut s = String::from("type,count,percent\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{}", r.name, r.count, r.percent);
            }
            s
        };
        let hist = |rows: &[(usize, u64)]| {
            let mut s = String::from("size,sketches\n");
            for (k, n) in rows {
                let _ = writeln!(s, "{k},{n}");
            }
            s
        };
        let values = |rows: &[ValueFrequency], cov: &[f64]| {
            let mut s = String::from("rank,label,value,count,percent,cumulative\n");
            for (i, (r, c)) in rows.iter().zip(cov).enumerate() {
                let _ = writeln!(s, "{},{},{},{},{},{}", i + 1, r.label, r.value, r.count, r.percent, c);
            }
            s
        };
        let mut pct = String::from("primitives,sketches,p50,p69,p84,p93\n");
        for r in &self.percentiles {
            let v = r.values;
            let _ = writeln!(pct, "{},{},{},{},{},{}", r.primitives, r.sketches, v[0], v[1], v[2], v[3]);
        }
        vec![
            ("primitive_types", types(&self.primitive_types)),
            ("constraint_types", types(&self.constraint_types)),
            ("primitive_counts", hist(&self.primitive_count_histogram)),
            ("constraint_counts", hist(&self.constraint_count_histogram)),
            ("percentiles", pct),
            ("lengths", values(&self.lengths, &self.length_coverage)),
            ("angles", values(&self.angles, &self.angle_coverage)),
        ]
    }
}
