//! Independent reference implementations used to check the library.
//! Shared by the core integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

/// Straightforward per-pixel bilinear resampler over a raw interleaved
/// buffer. Half-pixel centers, clamped source coordinates, f64 blend,
/// round half away from zero.
pub fn reference_resize(src: &[u8], w: usize, h: usize, c: usize, tw: usize, th: usize) -> Vec<u8> {
    let at = |x: usize, y: usize, ch: usize| src[(y * w + x) * c + ch] as f64;
    let mut out = vec![0u8; tw * th * c];
    for yt in 0..th {
        for xt in 0..tw {
            let mut xs = (xt as f64 + 0.5) * (w as f64 / tw as f64) - 0.5;
            let mut ys = (yt as f64 + 0.5) * (h as f64 / th as f64) - 0.5;
            if xs < 0.0 {
                xs = 0.0;
            }
            if xs > (w - 1) as f64 {
                xs = (w - 1) as f64;
            }
            if ys < 0.0 {
                ys = 0.0;
            }
            if ys > (h - 1) as f64 {
                ys = (h - 1) as f64;
            }
            let x0 = xs.floor() as usize;
            let y0 = ys.floor() as usize;
            let x1 = if x0 + 1 < w { x0 + 1 } else { w - 1 };
            let y1 = if y0 + 1 < h { y0 + 1 } else { h - 1 };
            let fx = xs - x0 as f64;
            let fy = ys - y0 as f64;
            for ch in 0..c {
                let p00 = at(x0, y0, ch);
                let p10 = at(x1, y0, ch);
                let p01 = at(x0, y1, ch);
                let p11 = at(x1, y1, ch);
                let v = (1.0 - fy) * ((1.0 - fx) * p00 + fx * p10) + fy * ((1.0 - fx) * p01 + fx * p11);
                // v >= 0, so adding 0.5 and truncating rounds half away from zero
                let r = (v + 0.5).floor();
                out[(yt * tw + xt) * c + ch] = r.min(255.0) as u8;
            }
        }
    }
    out
}

/// splitmix64 written from its textbook definition.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// First 20 outputs of splitmix64 from state 0, from the published
/// reference sequence.
pub const SPLITMIX64_SEED0: [u64; 20] = [
    0xE220A8397B1DCDAF,
    0x6E789E6AA1B965F4,
    0x06C45D188009454F,
    0xF88BB8A8724C81EC,
    0x1B39896A51A8749B,
    0x53CB9F0C747EA2EA,
    0x2C829ABE1F4532E1,
    0xC584133AC916AB3C,
    0x3EE5789041C98AC3,
    0xF3B8488C368CB0A6,
    0x657EECDD3CB13D09,
    0xC2D326E0055BDEF6,
    0x8621A03FE0BBDB7B,
    0x8E1F7555983AA92F,
    0xB54E0F1600CC4D19,
    0x84BB3F97971D80AB,
    0x7D29825C75521255,
    0xC3CF17102B7F7F86,
    0x3466E9A083914F64,
    0xD81A8D2B5A4485AC,
];

/// Is `anc` reachable from `node` along child->parent edges? Plain BFS over
/// the raw edge list, no precomputed closure.
pub fn reachable(edges: &[(String, String)], node: &str, anc: &str) -> bool {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([node.to_string()]);
    while let Some(n) = queue.pop_front() {
        for (c, p) in edges {
            if *c == n {
                if p == anc {
                    return true;
                }
                if seen.insert(p.clone()) {
                    queue.push_back(p.clone());
                }
            }
        }
    }
    false
}

/// Clean selection by exhaustive pairwise scan.
pub fn brute_force_clean(classes: &BTreeSet<String>, edges: &[(String, String)]) -> BTreeSet<String> {
    classes
        .iter()
        .filter(|a| !classes.iter().any(|b| a != &b && reachable(edges, b, a)))
        .cloned()
        .collect()
}

/// Small deterministic generator for test fixtures (xorshift64*).
pub struct Fixtures(pub u64);

impl Fixtures {
    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn bytes(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| self.next() as u8).collect()
    }
}

/// Random DAG over `n` classes named `c0..`: edges only point from a higher
/// index to a lower one, so no cycles.
pub fn random_dag(rng: &mut Fixtures, n: usize, edge_prob_pct: u64) -> Vec<(String, String)> {
    let mut edges = Vec::new();
    for child in 1..n {
        for parent in 0..child {
            if rng.below(100) < edge_prob_pct {
                edges.push((format!("c{child}"), format!("c{parent}")));
            }
        }
    }
    edges
}
