//! Corpus files: parsing, writing, filtering, splitting, statistics and
//! synthetic generation.

mod format;
mod select;
mod stats;
mod synth;

use std::io;

use thiserror::Error;

pub use format::{
    parse_corpus, parse_record, sketch_from_json, sketch_to_json, write_corpus, write_corpus_file, write_record,
    CorpusReader,
};
pub use select::{assign_test, filter_corpus, split_corpus, split_key, FilterOptions, SplitCounts};
pub use stats::{
    corpus_stats, PercentileRow, StatsAccumulator, StatsReport, TypeFrequency, ValueFrequency, PERCENTILES,
};
pub use synth::{perturb_geometry, synth_corpus, synth_nth, synth_sketch, GeneratorProfile, Template};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {cause}")]
    MalformedRecord { line: usize, cause: String },
    #[error("asked for {requested} test sketches but the corpus has {available}")]
    InsufficientCorpus { requested: usize, available: usize },
}

#[cfg(test)]
mod tests;
