use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spikepair::bpcm::{self, BpcmError};
use spikepair::export;
use spikepair_core::ingest::PairMode;
use spikepair_core::{CountBuilder, CountMatrix};

fn random_matrix(seed: u64, pairs: usize, days: u32, mode: PairMode) -> CountMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = CountBuilder::new(days, 17_167).unwrap().with_mode(mode);
    let mut made = std::collections::HashSet::new();
    while made.len() < pairs {
        let (x, y) = (rng.random_range(0..200u32), rng.random_range(0..200u32));
        if x == y || (mode == PairMode::Canonical && format!("t{x}") > format!("t{y}")) || !made.insert((x, y)) {
            continue;
        }
        let (a, c) = (format!("t{x}"), format!("t{y}"));
        let density = rng.random_range(0.0..0.5);
        for d in 0..days {
            if rng.random_bool(density) {
                b.add_count(&a, &c, d, rng.random_range(1..4)).unwrap();
            }
        }
    }
    b.finish().unwrap()
}

#[test]
fn thousand_pairs_by_640_days_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, mode) in [(1, PairMode::Ordered), (2, PairMode::Canonical)] {
        let m = random_matrix(seed, 1000, 640, mode);
        let path = dir.path().join(format!("m{seed}.bpcm"));
        bpcm::save(&m, &path).unwrap();
        let back = bpcm::load(&path).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.mode(), mode);
        assert_eq!(back.day_zero(), 17_167);
        let mut again = Vec::new();
        bpcm::write(&back, &mut again).unwrap();
        assert_eq!(again, std::fs::read(&path).unwrap());
    }
}

#[test]
fn empty_matrix_round_trips() {
    let m = CountMatrix::new(640, 0).unwrap();
    let mut buf = Vec::new();
    bpcm::write(&m, &mut buf).unwrap();
    assert_eq!(bpcm::read(buf.as_slice()).unwrap(), m);
}

#[test]
fn corrupted_headers_are_format_errors() {
    let m = random_matrix(3, 20, 30, PairMode::Ordered);
    let mut buf = Vec::new();
    bpcm::write(&m, &mut buf).unwrap();
    let cases: [(usize, u8, u64); 3] = [(1, b'Q', 0), (4, 9, 4), (6, 4, 6)];
    for (at, byte, offset) in cases {
        let mut bad = buf.clone();
        bad[at] = byte;
        match bpcm::read(bad.as_slice()) {
            Err(BpcmError::Format { offset: o, .. }) => assert_eq!(o, offset),
            other => panic!("byte {at}: {other:?}"),
        }
    }
    let err = bpcm::read(&buf[..buf.len() - 3]).unwrap_err().to_string();
    assert!(err.contains("truncated"), "{err}");
}

#[test]
fn csv_export_lists_every_cell_once() {
    let m = random_matrix(4, 50, 40, PairMode::Ordered);
    let mut out = Vec::new();
    export::write_count_triplets(&m, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), m.nonzero_cells());
    let total: u64 = rows.iter().map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, m.column_sums().iter().sum::<u64>());
}
