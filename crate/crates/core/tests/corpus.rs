use std::fs;
use std::path::Path;

use sg_core::ingest::{parse_corpus, write_corpus};

#[test]
fn fixture_corpus_rewrites_byte_identically() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/render.sgl");
    let sketches: Vec<_> = parse_corpus(&path).unwrap().collect::<Result<_, _>>().unwrap();
    let mut out = Vec::new();
    assert_eq!(write_corpus(&mut out, &sketches).unwrap(), sketches.len());
    assert_eq!(String::from_utf8(out).unwrap(), fs::read_to_string(&path).unwrap());
}
