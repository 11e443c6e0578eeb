//! Exhaustive exact solver; ground truth for the other methods.

use thiserror::Error;

use crate::graph::{CutSolution, LabelSet, LabeledGraph};

pub const DEFAULT_LABEL_CAP: usize = 22;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {num_labels} labels, above the enumeration cap {cap}")]
    CapExceeded { num_labels: usize, cap: usize },
}

/// Exact optimum by subset enumeration. Unicost instances enumerate by
/// increasing cardinality and stop at the first feasible level; weighted
/// instances scan all subsets. Ties go to the lexicographically smallest
/// label set.
pub fn brute_force(g: &LabeledGraph, cap: usize) -> Result<CutSolution, OracleError> {
    let num_labels = g.num_labels();
    if num_labels > cap {
        return Err(OracleError::CapExceeded { num_labels, cap });
    }
    if !g.is_connected() {
        return Ok(g.validate_cut(&LabelSet::new()).expect("empty set is valid"));
    }

    if g.costs_integral() && g.label_costs().iter().all(|&c| c == 1.0) {
        for k in 1..=num_labels {
            let mut best: Option<LabelSet> = None;
            enumerate_subsets_of_size(num_labels, k, &mut |mask| {
                let labels = mask_to_set(mask);
                if g.components_after_removal(&labels).0 >= 2 {
                    match &best {
                        Some(b) if *b <= labels => {}
                        _ => best = Some(labels),
                    }
                }
            });
            if let Some(labels) = best {
                return Ok(g.validate_cut(&labels).expect("labels in range"));
            }
        }
        unreachable!("removing all labels always disconnects an n >= 2 graph");
    }

    let mut best: Option<(f64, LabelSet)> = None;
    for mask in 1u64..(1 << num_labels) {
        let labels = mask_to_set(mask);
        let cost = g.cut_cost(&labels);
        if let Some((bc, bl)) = &best {
            if cost > *bc + 1e-12 {
                continue;
            }
            if (cost - *bc).abs() <= 1e-12 && *bl <= labels {
                continue;
            }
        }
        if g.components_after_removal(&labels).0 >= 2 {
            best = Some((cost, labels));
        }
    }
    let (_, labels) = best.expect("removing all labels disconnects the graph");
    Ok(g.validate_cut(&labels).expect("labels in range"))
}

/// All feasible cuts, as label sets. Used to check separator soundness on
/// small instances.
pub fn enumerate_feasible_cuts(g: &LabeledGraph, cap: usize) -> Result<Vec<LabelSet>, OracleError> {
    let num_labels = g.num_labels();
    if num_labels > cap {
        return Err(OracleError::CapExceeded { num_labels, cap });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1 << num_labels) {
        let labels = mask_to_set(mask);
        if g.components_after_removal(&labels).0 >= 2 {
            out.push(labels);
        }
    }
    Ok(out)
}

fn mask_to_set(mask: u64) -> LabelSet {
    (0..64).filter(|l| mask >> l & 1 == 1).collect()
}

/// Visits every size-k subset of 0..n as a bitmask, in ascending mask order.
fn enumerate_subsets_of_size(n: usize, k: usize, visit: &mut dyn FnMut(u64)) {
    if k == 0 {
        visit(0);
        return;
    }
    // Gosper's hack
    let mut mask: u64 = (1 << k) - 1;
    let limit: u64 = 1 << n;
    while mask < limit {
        visit(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn single_edge() {
        let g = LabeledGraph::unicost(2, vec![Edge::new(0, 1, 0)], 1).unwrap();
        let cut = brute_force(&g, DEFAULT_LABEL_CAP).unwrap();
        assert_eq!(cut.labels, [0].into_iter().collect());
        assert_eq!(cut.cost, 1.0);
    }

    #[test]
    fn disconnected_input_costs_zero() {
        let g = LabeledGraph::unicost(3, vec![Edge::new(0, 1, 0)], 1).unwrap();
        let cut = brute_force(&g, DEFAULT_LABEL_CAP).unwrap();
        assert!(cut.labels.is_empty());
        assert_eq!(cut.cost, 0.0);
        assert!(cut.is_feasible());
    }

    #[test]
    fn triangle_distinct_labels_needs_two() {
        let g = LabeledGraph::unicost(
            3,
            vec![Edge::new(0, 1, 0), Edge::new(1, 2, 1), Edge::new(0, 2, 2)],
            3,
        )
        .unwrap();
        // every singleton leaves a spanning path; some pair disconnects
        for l in 0..3 {
            let s: LabelSet = [l].into_iter().collect();
            assert_eq!(g.components_after_removal(&s).0, 1);
        }
        let cut = brute_force(&g, DEFAULT_LABEL_CAP).unwrap();
        assert_eq!(cut.cost, 2.0);
        assert!(cut.is_feasible());
    }

    #[test]
    fn weighted_prefers_cheaper_cut() {
        // triangle: labels 0 and 1 cut vertex 2 off for 0.3, label 2 alone is useless
        let g = LabeledGraph::new(
            3,
            vec![Edge::new(0, 1, 2), Edge::new(1, 2, 0), Edge::new(0, 2, 1)],
            3,
            vec![0.1, 0.2, 5.0],
        )
        .unwrap();
        let cut = brute_force(&g, DEFAULT_LABEL_CAP).unwrap();
        assert_eq!(cut.labels, [0, 1].into_iter().collect());
        assert!((cut.cost - 0.3).abs() < 1e-12);
    }

    #[test]
    fn cap_enforced() {
        let g = LabeledGraph::unicost(2, vec![Edge::new(0, 1, 0)], 1).unwrap();
        assert!(matches!(
            brute_force(&g, 0),
            Err(OracleError::CapExceeded { .. })
        ));
    }
}
