//! Seeded random instance generator for the benchmark families.
//!
//! Topology and label costs are drawn from independent ChaCha8 substreams of
//! the same seed, so the corpus is bit-reproducible across platforms.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Edge, LabeledGraph};

/// Label-cost scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// All removal costs 1.
    Unicost,
    /// Uniform on [0.01, 0.99].
    Random,
    /// Normal, mean 0.5 and variance 0.20, truncated to [0.01, 0.99].
    Normal,
}

impl std::str::FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unicost" => Ok(Scenario::Unicost),
            "random" => Ok(Scenario::Random),
            "normal" => Ok(Scenario::Normal),
            other => Err(format!("unknown scenario `{other}`")),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::Unicost => "unicost",
            Scenario::Random => "random",
            Scenario::Normal => "normal",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InstanceSpec {
    pub n: usize,
    pub num_labels: usize,
    pub density: f64,
    pub scenario: Scenario,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("edge budget {m} below n-1 = {min}; graph cannot be connected")]
    TooSparse { m: usize, min: usize },
    #[error("{num_labels} labels exceed edge budget {m}")]
    TooManyLabels { num_labels: usize, m: usize },
}

/// Target edge count for a spec.
pub fn edge_count(n: usize, density: f64) -> usize {
    (density * (n * (n - 1)) as f64 / 2.0).round() as usize
}

/// Generates a connected instance with every label used at least once.
/// Identical specs produce bit-identical graphs.
pub fn generate(spec: &InstanceSpec) -> Result<LabeledGraph, GenError> {
    if spec.n < 2 {
        return Err(GenError::InvalidSpec(format!("n = {} < 2", spec.n)));
    }
    if spec.num_labels < 1 {
        return Err(GenError::InvalidSpec("L < 1".into()));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(GenError::InvalidSpec(format!(
            "density {} not in (0, 1]",
            spec.density
        )));
    }
    let n = spec.n;
    let m = edge_count(n, spec.density);
    if m < n - 1 {
        return Err(GenError::TooSparse { m, min: n - 1 });
    }
    if spec.num_labels > m {
        return Err(GenError::TooManyLabels {
            num_labels: spec.num_labels,
            m,
        });
    }

    let mut topo_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    topo_rng.set_stream(0);

    // Uniform random spanning tree of K_n via a random Pruefer sequence.
    let mut pairs: Vec<(usize, usize)> = if n == 2 {
        vec![(0, 1)]
    } else {
        let seq: Vec<usize> = (0..n - 2).map(|_| topo_rng.gen_range(0..n)).collect();
        prufer_to_tree(&seq)
    };
    debug_assert_eq!(pairs.len(), n - 1);

    // Remaining edges: sample non-tree pairs uniformly without replacement.
    let in_tree: std::collections::BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|p| !in_tree.contains(p))
        .collect();
    rest.shuffle(&mut topo_rng);
    pairs.extend(rest.into_iter().take(m - (n - 1)));

    // Each label claims one distinct edge, then the rest draw uniformly.
    let mut label_of = vec![usize::MAX; m];
    let mut slots: Vec<usize> = (0..m).collect();
    slots.shuffle(&mut topo_rng);
    for (label, &slot) in slots.iter().take(spec.num_labels).enumerate() {
        label_of[slot] = label;
    }
    for l in label_of.iter_mut() {
        if *l == usize::MAX {
            *l = topo_rng.gen_range(0..spec.num_labels);
        }
    }

    let edges: Vec<Edge> = pairs
        .iter()
        .zip(&label_of)
        .map(|(&(u, v), &label)| Edge::new(u, v, label))
        .collect();

    let mut cost_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    cost_rng.set_stream(1);
    let costs: Vec<f64> = (0..spec.num_labels)
        .map(|_| sample_cost(spec.scenario, &mut cost_rng))
        .collect();

    let g = LabeledGraph::new(n, edges, spec.num_labels, costs)
        .expect("generated instance violates graph invariants");
    debug_assert!(g.is_connected());
    debug_assert!(g.unused_labels().is_empty());
    Ok(g)
}

fn sample_cost(scenario: Scenario, rng: &mut ChaCha8Rng) -> f64 {
    match scenario {
        Scenario::Unicost => 1.0,
        Scenario::Random => rng.gen_range(0.01..=0.99),
        Scenario::Normal => {
            // Box-Muller; resample out-of-range draws, clamp as a last resort.
            let sd = 0.20f64.sqrt();
            for _ in 0..100 {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                let c = 0.5 + sd * z;
                if (0.01..=0.99).contains(&c) {
                    return c;
                }
            }
            0.5
        }
    }
}

/// Decodes a Pruefer sequence over 0..n-1 into its tree edges.
fn prufer_to_tree(seq: &[usize]) -> Vec<(usize, usize)> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    // leaf = smallest index with degree 1 not yet consumed
    let mut ptr = 0;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &x in seq {
        edges.push(if leaf < x { (leaf, x) } else { (x, leaf) });
        degree[x] -= 1;
        if degree[x] == 1 && x < ptr {
            leaf = x;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    // vertex n-1 is never consumed inside the loop
    edges.push((leaf.min(n - 1), leaf.max(n - 1)));
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::serialize_instance;

    #[test]
    fn complete_graph_at_density_one() {
        let spec = InstanceSpec {
            n: 4,
            num_labels: 2,
            density: 1.0,
            scenario: Scenario::Unicost,
            seed: 7,
        };
        let g = generate(&spec).unwrap();
        assert_eq!(g.num_edges(), 6);
        assert!(g.unused_labels().is_empty());
        assert!(g.label_costs().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn deterministic_for_fixed_spec() {
        let spec = InstanceSpec {
            n: 9,
            num_labels: 6,
            density: 0.5,
            scenario: Scenario::Random,
            seed: 42,
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(serialize_instance(&a), serialize_instance(&b));
    }

    #[test]
    fn connected_exact_edge_count_all_labels_used() {
        for seed in 0..20 {
            for &(n, l, d) in &[(5, 3, 0.5), (8, 6, 0.2), (12, 12, 0.8), (2, 1, 1.0)] {
                let spec = InstanceSpec {
                    n,
                    num_labels: l,
                    density: d,
                    scenario: Scenario::Unicost,
                    seed,
                };
                match generate(&spec) {
                    Ok(g) => {
                        assert_eq!(g.num_edges(), edge_count(n, d));
                        assert!(g.is_connected());
                        assert!(g.unused_labels().is_empty());
                    }
                    Err(GenError::TooSparse { .. }) => {
                        assert!(edge_count(n, d) < n - 1);
                    }
                    Err(e) => panic!("unexpected error {e}"),
                }
            }
        }
    }

    #[test]
    fn rejects_impossible_specs() {
        let bad = InstanceSpec {
            n: 10,
            num_labels: 3,
            density: 0.05,
            scenario: Scenario::Unicost,
            seed: 0,
        };
        assert!(matches!(generate(&bad), Err(GenError::TooSparse { .. })));
        let bad = InstanceSpec {
            n: 3,
            num_labels: 10,
            density: 1.0,
            scenario: Scenario::Unicost,
            seed: 0,
        };
        assert!(matches!(generate(&bad), Err(GenError::TooManyLabels { .. })));
    }

    #[test]
    fn normal_costs_center_near_half() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..100 {
            let spec = InstanceSpec {
                n: 8,
                num_labels: 10,
                density: 0.8,
                scenario: Scenario::Normal,
                seed,
            };
            let g = generate(&spec).unwrap();
            for &c in g.label_costs() {
                assert!((0.01..=0.99).contains(&c));
                sum += c;
                count += 1;
            }
        }
        let mean = sum / count as f64;
        assert!((mean - 0.5).abs() < 0.1, "sample mean {mean}");
    }

    #[test]
    fn parse_serialize_round_trip_on_generated() {
        for seed in 0..50 {
            let spec = InstanceSpec {
                n: 7,
                num_labels: 5,
                density: 0.6,
                scenario: if seed % 2 == 0 {
                    Scenario::Unicost
                } else {
                    Scenario::Random
                },
                seed,
            };
            let g = generate(&spec).unwrap();
            let text = serialize_instance(&g);
            let parsed = crate::graph::parse_instance(&text).unwrap();
            assert_eq!(serialize_instance(&parsed.graph), text);
            assert!(parsed.warnings.is_empty());
        }
    }
}
