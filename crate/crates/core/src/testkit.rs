//! Deterministic random generators for tests and benches.

use crate::interval::{rat, Interval, IntervalSet};
use crate::ndsys::MapSequence;
use crate::plmap::PLMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random map with up to `max_interior` interior nodes on the 1/64 grid.
pub fn random_plmap(r: &mut ChaCha8Rng, max_interior: usize) -> PLMap {
    random_map_impl(r, max_interior, false)
}

/// Random map with no zero-slope segment.
pub fn random_feeble_plmap(r: &mut ChaCha8Rng, max_interior: usize) -> PLMap {
    random_map_impl(r, max_interior, true)
}

fn random_map_impl(r: &mut ChaCha8Rng, max_interior: usize, feeble: bool) -> PLMap {
    // a coarse node grid keeps orbit denominators from exploding over long
    // exact iterations while still varying slopes and breakpoints freely
    const DEN: i64 = 16;
    let k = r.gen_range(0..=max_interior);
    let mut xs: Vec<i64> = Vec::new();
    while xs.len() < k {
        let c = r.gen_range(1..DEN);
        if !xs.contains(&c) {
            xs.push(c);
        }
    }
    xs.sort_unstable();
    let mut nodes = Vec::with_capacity(k + 2);
    let mut prev_y: Option<i64> = None;
    for x in std::iter::once(0).chain(xs).chain(std::iter::once(DEN)) {
        let y = loop {
            let y = r.gen_range(0..=DEN);
            if !feeble || prev_y != Some(y) {
                break y;
            }
        };
        prev_y = Some(y);
        nodes.push((rat(x, DEN), rat(y, DEN)));
    }
    PLMap::new(nodes).expect("generated nodes are valid")
}

/// Union of one or two random open dyadic cells at a random depth ≤ `max_depth`.
pub fn random_dyadic_set(r: &mut ChaCha8Rng, max_depth: u32, max_cells: usize) -> IntervalSet {
    let depth = r.gen_range(1..=max_depth);
    let n = 1i64 << depth;
    let count = r.gen_range(1..=max_cells.max(1));
    let mut parts = Vec::new();
    for _ in 0..count {
        let i = r.gen_range(0..n);
        parts.push(Interval::open(rat(i, n), rat(i + 1, n)).expect("cell is non-empty"));
    }
    IntervalSet::from_parts(parts)
}

/// Random cycle of `len` maps.
pub fn random_cycle(r: &mut ChaCha8Rng, len: usize, feeble: bool, max_interior: usize) -> MapSequence {
    let maps = (0..len)
        .map(|_| {
            if feeble {
                random_feeble_plmap(r, max_interior)
            } else {
                random_plmap(r, max_interior)
            }
        })
        .collect();
    MapSequence::cycle(maps).expect("len >= 1")
}
