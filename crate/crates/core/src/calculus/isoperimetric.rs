use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Largest graph the exhaustive search accepts.
pub const EXHAUSTIVE_LIMIT: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoMode {
    /// Every proper nonempty vertex subset.
    Exhaustive,
    /// Breadth-first balls grown from random seeds; gives a lower bound.
    Sampled { seeds: usize, rng_seed: u64 },
}

/// Smallest `C` with `min(|V₀|, |V| − |V₀|) ≤ C |∂V₀|²` over the subsets the
/// mode visits, where `|V₀| = Σ l²` over edges inside `V₀` and `|∂V₀| = Σ l`
/// over edges leaving it.
pub fn isoperimetric_constant(graph: &Graph, lengths: &[f64], mode: IsoMode) -> Result<f64> {
    if !graph.is_connected(true) {
        return Err(Error::UnsupportedTopology("graph is disconnected".into()));
    }
    match mode {
        IsoMode::Exhaustive => exhaustive(graph, lengths),
        IsoMode::Sampled { seeds, rng_seed } => Ok(sampled(graph, lengths, seeds, rng_seed)),
    }
}

fn ratio(inside: f64, total: f64, boundary: f64) -> f64 {
    let small = inside.min(total - inside);
    if small <= 0.0 {
        0.0
    } else {
        small / (boundary * boundary)
    }
}

/// Visits every proper nonempty subset as a bitmask and sums its inside area
/// and boundary length over the edge list in order, so values are exact
/// functions of the subset.
fn exhaustive(graph: &Graph, lengths: &[f64]) -> Result<f64> {
    let n = graph.num_vertices();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLargeForExhaustive {
            limit: EXHAUSTIVE_LIMIT,
            got: n,
        });
    }
    let total: f64 = lengths.iter().map(|l| l * l).sum();
    let edges = graph.edges();
    let full = (1u64 << n) - 1;
    let mut best: f64 = 0.0;
    for mask in 1..full {
        let (mut inside, mut boundary) = (0.0, 0.0);
        for (&[a, b], l) in edges.iter().zip(lengths) {
            match ((mask >> a) & 1, (mask >> b) & 1) {
                (1, 1) => inside += l * l,
                (0, 0) => {}
                _ => boundary += l,
            }
        }
        if boundary > 0.0 {
            best = best.max(ratio(inside, total, boundary));
        }
    }
    Ok(best)
}

fn sampled(graph: &Graph, lengths: &[f64], seeds: usize, rng_seed: u64) -> f64 {
    let n = graph.num_vertices();
    let total: f64 = lengths.iter().map(|l| l * l).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best: f64 = 0.0;
    for _ in 0..seeds {
        let seed = rng.gen_range(0..n);
        let mut member = vec![false; n];
        let mut queued = vec![false; n];
        let mut queue = VecDeque::from([seed]);
        queued[seed] = true;
        let (mut inside, mut boundary) = (0.0, 0.0);
        let mut count = 0;
        while let Some(v) = queue.pop_front() {
            for &(w, e) in graph.neighbors(v) {
                let l = lengths[e];
                if member[w] {
                    inside += l * l;
                    boundary -= l;
                } else {
                    boundary += l;
                    if !queued[w] {
                        queued[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            member[v] = true;
            count += 1;
            // ratio is symmetric under complement, so every prefix also
            // covers the complementary sweep
            if count < n && boundary > 0.0 {
                best = best.max(ratio(inside, total, boundary));
            }
        }
    }
    best
}

/// `|u|∞ / (|l|∞ · |V|^{1/2})` with `|V| = Σ l²`.
pub fn elliptic_ratio(u: &[f64], lengths: &[f64]) -> f64 {
    let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lmax = lengths.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let area: f64 = lengths.iter().map(|l| l * l).sum();
    umax / (lmax * area.sqrt())
}
