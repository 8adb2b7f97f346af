use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{parse_corpus, write_record, IngestError};
use crate::model::{PrimitiveType, Sketch};

#[derive(Clone, Debug, PartialEq)]
pub struct FilterOptions {
    pub min_primitives: usize,
    pub min_constraints: usize,
    /// Counts primitives only, not sub-primitive nodes.
    pub max_primitives: Option<usize>,
    /// `None` allows every type.
    pub allowed_types: Option<HashSet<PrimitiveType>>,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions {
            min_primitives: 1,
            min_constraints: 1,
            max_primitives: None,
            allowed_types: None,
        }
    }
}

impl FilterOptions {
    pub fn accepts(&self, s: &Sketch) -> bool {
        let n = s.primitives.len();
        n >= self.min_primitives
            && s.constraints.len() >= self.min_constraints
            && self.max_primitives.is_none_or(|m| n <= m)
            && self
                .allowed_types
                .as_ref()
                .is_none_or(|t| s.primitives.iter().all(|p| t.contains(&p.kind())))
    }
}

/// Order-preserving filter.
pub fn filter_corpus<'a, I>(sketches: I, opts: &'a FilterOptions) -> impl Iterator<Item = Sketch> + 'a
where
    I: IntoIterator<Item = Sketch>,
    I::IntoIter: 'a,
{
    sketches.into_iter().filter(move |s| opts.accepts(s))
}

/// Shuffle key of a sketch: SHA-256 of the little-endian seed followed by
/// the id.
pub fn split_key(id: &str, seed: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    h.finalize().into()
}

/// Marks the `test_count` sketches with the smallest keys as test. Equal
/// ids fall back to file position.
pub fn assign_test<S: AsRef<str>>(ids: &[S], test_count: usize, seed: u64) -> Result<Vec<bool>, IngestError> {
    if test_count > ids.len() {
        return Err(IngestError::InsufficientCorpus {
            requested: test_count,
            available: ids.len(),
        });
    }
    let mut order: Vec<([u8; 32], usize)> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (split_key(id.as_ref(), seed), i))
        .collect();
    order.sort_unstable();
    let mut test = vec![false; ids.len()];
    for &(_, i) in &order[..test_count] {
        test[i] = true;
    }
    Ok(test)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitCounts {
    pub train: usize,
    pub test: usize,
}

/// Two passes over `input`: one for the ids, one to write both outputs in
/// input order. Malformed records abort the split.
pub fn split_corpus(
    input: &Path,
    test_count: usize,
    seed: u64,
    train_path: &Path,
    test_path: &Path,
) -> Result<SplitCounts, IngestError> {
    let mut ids = Vec::new();
    for s in parse_corpus(input)? {
        ids.push(s?.id);
    }
    let test = assign_test(&ids, test_count, seed)?;
    drop(ids);
    let mut train_w = BufWriter::new(File::create(train_path)?);
    let mut test_w = BufWriter::new(File::create(test_path)?);
    let mut counts = SplitCounts { train: 0, test: 0 };
    for (s, is_test) in parse_corpus(input)?.zip(test) {
        let s = s?;
        if is_test {
            write_record(&mut test_w, &s)?;
            counts.test += 1;
        } else {
            write_record(&mut train_w, &s)?;
            counts.train += 1;
        }
    }
    train_w.flush()?;
    test_w.flush()?;
    Ok(counts)
}
