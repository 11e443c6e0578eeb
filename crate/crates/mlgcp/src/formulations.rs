//! The PART, PART2, P3E and EAC formulations and their separation routines.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bnc::ModelInstance;
use crate::graph::{LabelSet, LabeledGraph, UnionFind, VertexPartition};
use crate::heuristics::{mvca, spanning_tree_in_labels};
use crate::lp::{LpProblem, LpRow, Sense};

pub const P3_ROW_CAP: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    Part,
    Part2,
    P3e,
    Eac,
}

/// Where each model symbol lives in the LP variable vector.
#[derive(Debug, Clone, Default)]
pub struct VariableMap {
    /// label id -> z variable
    pub label_vars: Vec<usize>,
    /// vertex -> w variable (PART / PART2)
    pub vertex_vars: Vec<usize>,
    /// (u, v) with u < v -> x variable (PART per edge; P3E all pairs)
    pub edge_vars: BTreeMap<(usize, usize), usize>,
}

/// A formulation instantiated on a graph, ready for the engine. Keeps the
/// variable map and an embedding of label cuts into LP space so tests can
/// check emitted rows against known-feasible solutions.
pub struct BuiltModel {
    pub kind: Formulation,
    pub instance: ModelInstance,
    pub vars: VariableMap,
    graph: Arc<LabeledGraph>,
}

impl BuiltModel {
    /// Canonical LP-space point for a feasible cut: vertex side / clique
    /// membership comes from the components left after removing the labels.
    pub fn embed_solution(&self, labels: &LabelSet) -> Vec<f64> {
        let g = &self.graph;
        let (_, comp) = g.components_after_removal(labels);
        let mut values = vec![0.0; self.instance.problem.num_vars];
        for (l, &zv) in self.vars.label_vars.iter().enumerate() {
            values[zv] = if labels.contains(&l) { 1.0 } else { 0.0 };
        }
        // left side = the component of vertex 0
        for (v, &wv) in self.vars.vertex_vars.iter().enumerate() {
            values[wv] = if comp[v] == comp[0] { 1.0 } else { 0.0 };
        }
        for (&(u, v), &xv) in &self.vars.edge_vars {
            let crossing = match self.kind {
                Formulation::Part | Formulation::Part2 => comp[u] == comp[0] && comp[v] != comp[0]
                    || comp[v] == comp[0] && comp[u] != comp[0],
                _ => comp[u] != comp[v],
            };
            values[xv] = if crossing { 1.0 } else { 0.0 };
        }
        values
    }
}

fn base_problem(g: &LabeledGraph, extra_vars: usize) -> (LpProblem, Vec<usize>) {
    let num_labels = g.num_labels();
    let num_vars = num_labels + extra_vars;
    let mut objective = vec![0.0; num_vars];
    objective[..num_labels].copy_from_slice(g.label_costs());
    let problem = LpProblem::new(num_vars, objective, vec![(0.0, 1.0); num_vars]);
    ((problem), (0..num_labels).collect())
}

fn extract_from_partition(g: Arc<LabeledGraph>, vertex_vars: Vec<usize>) -> crate::bnc::ExtractFn {
    Box::new(move |values| {
        let side: Vec<bool> = vertex_vars.iter().map(|&wv| values[wv] > 0.5).collect();
        let p = VertexPartition::new(side);
        let labels = g
            .crossing_labels(&p)
            .expect("cardinality rows keep both sides nonempty");
        g.validate_cut(&labels).expect("labels in range")
    })
}

fn extract_from_labels(g: Arc<LabeledGraph>, label_vars: Vec<usize>) -> crate::bnc::ExtractFn {
    Box::new(move |values| {
        let labels: LabelSet = label_vars
            .iter()
            .enumerate()
            .filter(|(_, &zv)| values[zv] > 0.5)
            .map(|(l, _)| l)
            .collect();
        g.validate_cut(&labels).expect("labels in range")
    })
}

fn no_separation() -> crate::bnc::SeparateFn {
    Box::new(|_| Vec::new())
}

/// PART: vertex bipartition with explicit edge variables (z, x, w).
pub fn build_part(g: &LabeledGraph) -> BuiltModel {
    let g = Arc::new(g.clone());
    let n = g.num_vertices();
    let m = g.num_edges();
    let num_labels = g.num_labels();
    let (mut problem, label_vars) = base_problem(&g, m + n);
    let edge_var = |k: usize| num_labels + k;
    let w_var = |v: usize| num_labels + m + v;

    // 1 <= sum(w) <= n - 1  (strict < n over binary w)
    problem.rows.push(LpRow::new(
        (0..n).map(|v| (w_var(v), 1.0)).collect(),
        Sense::Ge,
        1.0,
    ));
    problem.rows.push(LpRow::new(
        (0..n).map(|v| (w_var(v), 1.0)).collect(),
        Sense::Le,
        (n - 1) as f64,
    ));
    for (k, e) in g.edges().iter().enumerate() {
        problem.rows.push(LpRow::new(
            vec![(label_vars[e.label], 1.0), (edge_var(k), -1.0)],
            Sense::Ge,
            0.0,
        ));
    }
    for (k, e) in g.edges().iter().enumerate() {
        problem.rows.push(LpRow::new(
            vec![(edge_var(k), 1.0), (w_var(e.u), -1.0), (w_var(e.v), 1.0)],
            Sense::Ge,
            0.0,
        ));
        problem.rows.push(LpRow::new(
            vec![(edge_var(k), 1.0), (w_var(e.v), -1.0), (w_var(e.u), 1.0)],
            Sense::Ge,
            0.0,
        ));
    }

    let w_vars: Vec<usize> = (0..n).map(w_var).collect();
    let mut edge_vars = BTreeMap::new();
    for (k, e) in g.edges().iter().enumerate() {
        edge_vars.entry(e.pair()).or_insert(edge_var(k));
    }
    let costs_integral = g.costs_integral();
    BuiltModel {
        kind: Formulation::Part,
        vars: VariableMap {
            label_vars: label_vars.clone(),
            vertex_vars: w_vars.clone(),
            edge_vars,
        },
        instance: ModelInstance {
            problem,
            integer_vars: w_vars.clone(),
            branch_priority: w_vars.clone(),
            costs_integral,
            separate_integer: no_separation(),
            separate_fractional: no_separation(),
            extract_solution: extract_from_partition(g.clone(), w_vars),
        },
        graph: g,
    }
}

/// PART2: edge variables eliminated, w_0 fixed to 1 for symmetry breaking.
pub fn build_part2(g: &LabeledGraph) -> BuiltModel {
    let g = Arc::new(g.clone());
    let n = g.num_vertices();
    let num_labels = g.num_labels();
    let (mut problem, label_vars) = base_problem(&g, n);
    let w_var = |v: usize| num_labels + v;
    problem.bounds[w_var(0)] = (1.0, 1.0);

    problem.rows.push(LpRow::new(
        (0..n).map(|v| (w_var(v), 1.0)).collect(),
        Sense::Le,
        (n - 1) as f64,
    ));
    for e in g.edges() {
        problem.rows.push(LpRow::new(
            vec![(label_vars[e.label], 1.0), (w_var(e.u), -1.0), (w_var(e.v), 1.0)],
            Sense::Ge,
            0.0,
        ));
        problem.rows.push(LpRow::new(
            vec![(label_vars[e.label], 1.0), (w_var(e.v), -1.0), (w_var(e.u), 1.0)],
            Sense::Ge,
            0.0,
        ));
    }

    let w_vars: Vec<usize> = (0..n).map(w_var).collect();
    let costs_integral = g.costs_integral();
    BuiltModel {
        kind: Formulation::Part2,
        vars: VariableMap {
            label_vars: label_vars.clone(),
            vertex_vars: w_vars.clone(),
            edge_vars: BTreeMap::new(),
        },
        instance: ModelInstance {
            problem,
            integer_vars: w_vars.clone(),
            branch_priority: w_vars.clone(),
            costs_integral,
            separate_integer: no_separation(),
            separate_fractional: no_separation(),
            extract_solution: extract_from_partition(g.clone(), w_vars),
        },
        graph: g,
    }
}

/// P3E with lazy P3 elimination at integral points only (the default).
pub fn build_p3e(g: &LabeledGraph) -> BuiltModel {
    build_p3e_with(g, false)
}

/// P3E: clique partitioning over the completed graph. Triangle rows are
/// never added statically; they are separated at integral points, and at
/// fractional points too when `fractional_p3` is set.
pub fn build_p3e_with(g: &LabeledGraph, fractional_p3: bool) -> BuiltModel {
    let g = Arc::new(g.clone());
    let n = g.num_vertices();
    let num_labels = g.num_labels();
    let npairs = n * (n - 1) / 2;
    let (mut problem, label_vars) = base_problem(&g, npairs);

    let mut edge_vars = BTreeMap::new();
    let mut next = num_labels;
    for u in 0..n {
        for v in u + 1..n {
            edge_vars.insert((u, v), next);
            next += 1;
        }
    }

    for e in g.edges() {
        problem.rows.push(LpRow::new(
            vec![(label_vars[e.label], 1.0), (edge_vars[&e.pair()], -1.0)],
            Sense::Ge,
            0.0,
        ));
    }
    // nonempty cut over the real edges (distinct pairs)
    let real_pairs: std::collections::BTreeSet<(usize, usize)> =
        g.edges().iter().map(|e| e.pair()).collect();
    problem.rows.push(LpRow::new(
        real_pairs.iter().map(|p| (edge_vars[p], 1.0)).collect(),
        Sense::Ge,
        1.0,
    ));

    let x_vars: Vec<usize> = edge_vars.values().copied().collect();
    let vars = VariableMap {
        label_vars,
        vertex_vars: Vec::new(),
        edge_vars,
    };
    let sep_vars = vars.edge_vars.clone();
    let sep_integer: crate::bnc::SeparateFn =
        Box::new(move |values| separate_p3(n, &sep_vars, values));
    let sep_fractional: crate::bnc::SeparateFn = if fractional_p3 {
        let sep_vars = vars.edge_vars.clone();
        Box::new(move |values| separate_p3(n, &sep_vars, values))
    } else {
        no_separation()
    };
    let costs_integral = g.costs_integral();
    let zvars = vars.label_vars.clone();
    BuiltModel {
        kind: Formulation::P3e,
        instance: ModelInstance {
            problem,
            integer_vars: x_vars.clone(),
            branch_priority: x_vars,
            costs_integral,
            separate_integer: sep_integer,
            separate_fractional: sep_fractional,
            extract_solution: extract_from_labels(g.clone(), zvars),
        },
        vars,
        graph: g,
    }
}

/// Enumerates every P3 elimination row `x_ab + x_bc - x_ac >= 0` over
/// ordered triangles and returns the ones violated by more than 1e-6,
/// most violated first, capped at [`P3_ROW_CAP`].
pub fn separate_p3(
    n: usize,
    edge_vars: &BTreeMap<(usize, usize), usize>,
    values: &[f64],
) -> Vec<LpRow> {
    let var = |a: usize, b: usize| edge_vars[&(a.min(b), a.max(b))];
    let x = |a: usize, b: usize| values[var(a, b)];
    let mut found: Vec<(f64, LpRow)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                // each of the three pairs in turn plays the "cut" role
                for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                    // x_ab + x_bc - x_ca >= 0 forbids a-b and b-c kept, c-a cut
                    let violation = x(c, a) - x(a, b) - x(b, c);
                    if violation > 1e-6 {
                        found.push((
                            violation,
                            LpRow::new(
                                vec![(var(a, b), 1.0), (var(b, c), 1.0), (var(c, a), -1.0)],
                                Sense::Ge,
                                0.0,
                            ),
                        ));
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| b.0.total_cmp(&a.0));
    found.truncate(P3_ROW_CAP);
    found.into_iter().map(|(_, row)| row).collect()
}

/// EAC: only z variables, all spanning trees eliminated lazily.
pub fn build_eac(g: &LabeledGraph) -> BuiltModel {
    let g = Arc::new(g.clone());
    let (problem, label_vars) = base_problem(&g, 0);
    let zvars = label_vars.clone();
    let gi = g.clone();
    let sep_integer: crate::bnc::SeparateFn =
        Box::new(move |values| separate_tree_integer(&gi, values));
    let gf = g.clone();
    let sep_fractional: crate::bnc::SeparateFn =
        Box::new(move |values| separate_tree_fractional(&gf, values));
    let costs_integral = g.costs_integral();
    BuiltModel {
        kind: Formulation::Eac,
        vars: VariableMap {
            label_vars: label_vars.clone(),
            vertex_vars: Vec::new(),
            edge_vars: BTreeMap::new(),
        },
        instance: ModelInstance {
            problem,
            integer_vars: label_vars.clone(),
            branch_priority: label_vars,
            costs_integral,
            separate_integer: sep_integer,
            separate_fractional: sep_fractional,
            extract_solution: extract_from_labels(g.clone(), zvars),
        },
        graph: g,
    }
}

/// Integral tree separation: drop the selected labels; if the rest still
/// connects the graph, find a frugal spanning tree with MVCA and forbid its
/// label set. The emitted row has violation exactly 1 at the queried point.
pub fn separate_tree_integer(g: &LabeledGraph, values: &[f64]) -> Vec<LpRow> {
    let removed: LabelSet = (0..g.num_labels()).filter(|&l| values[l] >= 0.5).collect();
    if g.components_after_removal(&removed).0 >= 2 {
        return Vec::new();
    }
    let allowed: LabelSet = (0..g.num_labels())
        .filter(|l| !removed.contains(l))
        .collect();
    let chosen = mvca(g, &allowed).expect("remaining labels connect the graph");
    let tree = spanning_tree_in_labels(g, &chosen).expect("MVCA result spans the graph");
    let tree_labels: LabelSet = tree.iter().map(|e| e.label).collect();
    vec![LpRow::new(
        tree_labels.iter().map(|&l| (l, 1.0)).collect(),
        Sense::Ge,
        1.0,
    )]
}

/// Fractional greedy separation: add labels in ascending relaxation value
/// until the graph connects; if their relaxation mass is below 1 the tree
/// elimination row over those labels is violated.
pub fn separate_tree_fractional(g: &LabeledGraph, values: &[f64]) -> Vec<LpRow> {
    let mut order: Vec<usize> = (0..g.num_labels()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut edges_of: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.num_labels()];
    for e in g.edges() {
        edges_of[e.label].push((e.u, e.v));
    }
    let mut uf = UnionFind::new(g.num_vertices());
    let mut added = Vec::new();
    let mut sum = 0.0;
    for l in order {
        for &(u, v) in &edges_of[l] {
            uf.union(u, v);
        }
        added.push(l);
        sum += values[l];
        if uf.num_components() == 1 {
            if sum < 1.0 - 1e-6 {
                return vec![LpRow::new(
                    added.into_iter().map(|l| (l, 1.0)).collect(),
                    Sense::Ge,
                    1.0,
                )];
            }
            return Vec::new();
        }
    }
    Vec::new() // disconnected graph: H never connects
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnc::{bnc_solve, Limits};
    use crate::graph::Edge;
    use crate::oracle::brute_force;

    fn triangle_distinct() -> LabeledGraph {
        LabeledGraph::unicost(
            3,
            vec![Edge::new(0, 1, 0), Edge::new(1, 2, 1), Edge::new(0, 2, 2)],
            3,
        )
        .unwrap()
    }

    fn single_edge() -> LabeledGraph {
        LabeledGraph::unicost(2, vec![Edge::new(0, 1, 0)], 1).unwrap()
    }

    #[test]
    fn part_shape_on_triangle() {
        let built = build_part(&triangle_distinct());
        let p = &built.instance.problem;
        assert_eq!(p.num_vars, 9); // 3 z + 3 x + 3 w
        assert_eq!(p.rows.len(), 2 + 3 + 6); // cardinality + z rows + edge rows
        assert_eq!(built.instance.branch_priority, built.vars.vertex_vars);
    }

    #[test]
    fn part2_shape_on_triangle() {
        let built = build_part2(&triangle_distinct());
        let p = &built.instance.problem;
        assert_eq!(p.num_vars, 6); // 3 z + 3 w
        assert_eq!(p.rows.len(), 7); // 2|E| + 1
        assert_eq!(p.bounds[built.vars.vertex_vars[0]], (1.0, 1.0));
    }

    #[test]
    fn part_single_edge_optimum_one() {
        let built = build_part(&single_edge());
        let r = bnc_solve(&built.instance, &Limits::default(), None).unwrap();
        assert!((r.best.unwrap().cost - 1.0).abs() < 1e-9);
    }

    #[test]
    fn part2_triangle_optimum_two() {
        let built = build_part2(&triangle_distinct());
        let r = bnc_solve(&built.instance, &Limits::default(), None).unwrap();
        assert!((r.best.unwrap().cost - 2.0).abs() < 1e-9);
    }

    #[test]
    fn p3_separation_flags_forbidden_path() {
        // path 0-1-2 kept (x=0), chord 0-2 cut (x=1): one violated row
        let g = LabeledGraph::unicost(3, vec![Edge::new(0, 1, 0), Edge::new(1, 2, 1)], 2).unwrap();
        let built = build_p3e(&g);
        let mut values = vec![0.0; built.instance.problem.num_vars];
        values[built.vars.edge_vars[&(0, 2)]] = 1.0;
        let rows = separate_p3(3, &built.vars.edge_vars, &values);
        assert_eq!(rows.len(), 1);
        assert!((rows[0].violation(&values) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p3_separation_clean_on_uniform_points() {
        let built = build_p3e(&triangle_distinct());
        let nv = built.instance.problem.num_vars;
        let zeros = vec![0.0; nv];
        assert!(separate_p3(3, &built.vars.edge_vars, &zeros).is_empty());
        let ones = vec![1.0; nv];
        assert!(separate_p3(3, &built.vars.edge_vars, &ones).is_empty());
    }

    #[test]
    fn p3e_matches_oracle_on_small_instances() {
        use crate::gen::{generate, InstanceSpec, Scenario};
        for seed in 0..10 {
            let g = generate(&InstanceSpec {
                n: 6,
                num_labels: 5,
                density: 0.5,
                scenario: Scenario::Unicost,
                seed,
            })
            .unwrap();
            let built = build_p3e(&g);
            let r = bnc_solve(&built.instance, &Limits::default(), None).unwrap();
            let want = brute_force(&g, 22).unwrap();
            assert!(
                (r.best.unwrap().cost - want.cost).abs() < 1e-6,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn eac_single_edge_first_round() {
        let g = single_edge();
        let rows = separate_tree_integer(&g, &[0.0]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].coeffs, vec![(0, 1.0)]);
        let built = build_eac(&g);
        let r = bnc_solve(&built.instance, &Limits::default(), None).unwrap();
        assert!((r.best.unwrap().cost - 1.0).abs() < 1e-9);
        assert!(r.cuts >= 1);
    }

    #[test]
    fn eac_triangle_optimum_two() {
        let built = build_eac(&triangle_distinct());
        let r = bnc_solve(&built.instance, &Limits::default(), None).unwrap();
        assert!((r.best.unwrap().cost - 2.0).abs() < 1e-9);
    }

    #[test]
    fn tree_separation_respects_feasible_points() {
        let g = triangle_distinct();
        // all labels removed: graph empty, nothing to separate
        assert!(separate_tree_integer(&g, &[1.0, 1.0, 1.0]).is_empty());
        // nothing removed on a connected graph: must separate
        let rows = separate_tree_integer(&g, &[0.0, 0.0, 0.0]);
        assert_eq!(rows.len(), 1);
        assert!(rows[0].coeffs.len() <= 3);
    }

    #[test]
    fn tree_separation_accepts_bridge_cut() {
        // two triangles joined by a bridge with its own label
        let g = LabeledGraph::unicost(
            6,
            vec![
                Edge::new(0, 1, 0),
                Edge::new(1, 2, 0),
                Edge::new(0, 2, 1),
                Edge::new(2, 3, 2), // bridge
                Edge::new(3, 4, 3),
                Edge::new(4, 5, 3),
                Edge::new(3, 5, 4),
            ],
            5,
        )
        .unwrap();
        let removed: LabelSet = [2].into_iter().collect();
        assert_eq!(g.components_after_removal(&removed).0, 2);
        let z = [0.0, 0.0, 1.0, 0.0, 0.0];
        assert!(separate_tree_integer(&g, &z).is_empty());
    }

    #[test]
    fn fractional_tree_greedy_trace() {
        let g = triangle_distinct();
        // zero relaxation: one row with violation 1.0
        let rows = separate_tree_fractional(&g, &[0.0, 0.0, 0.0]);
        assert_eq!(rows.len(), 1);
        assert!((rows[0].violation(&[0.0, 0.0, 0.0]) - 1.0).abs() < 1e-12);

        // greedy adds label 0 (0.2) then label 1 (0.3); sum 0.5 < 1
        let z = [0.2, 0.3, 0.9];
        let rows = separate_tree_fractional(&g, &z);
        assert_eq!(rows.len(), 1);
        let support: Vec<usize> = rows[0].coeffs.iter().map(|&(j, _)| j).collect();
        assert_eq!(support, vec![0, 1]);

        // enough mass on a hitting set: no row
        assert!(separate_tree_fractional(&g, &[1.0, 1.0, 0.0]).is_empty());
    }

    #[test]
    fn fractional_tree_on_disconnected_graph() {
        let g = LabeledGraph::unicost(3, vec![Edge::new(0, 1, 0)], 1).unwrap();
        assert!(separate_tree_fractional(&g, &[0.0]).is_empty());
    }

    #[test]
    fn cross_model_agreement_small_random() {
        use crate::gen::{generate, InstanceSpec, Scenario};
        for seed in 0..10 {
            let g = generate(&InstanceSpec {
                n: 7,
                num_labels: 6,
                density: 0.4,
                scenario: Scenario::Unicost,
                seed: 1000 + seed,
            })
            .unwrap();
            let want = brute_force(&g, 22).unwrap().cost;
            for built in [build_part(&g), build_part2(&g), build_eac(&g)] {
                let r = bnc_solve(&built.instance, &Limits::default(), None).unwrap();
                assert!(
                    (r.best.unwrap().cost - want).abs() < 1e-6,
                    "seed {seed} kind {:?}",
                    built.kind
                );
            }
        }
    }

    #[test]
    fn embedded_solutions_satisfy_emitted_rows() {
        use crate::gen::{generate, InstanceSpec, Scenario};
        use crate::oracle::enumerate_feasible_cuts;
        let g = generate(&InstanceSpec {
            n: 6,
            num_labels: 5,
            density: 0.6,
            scenario: Scenario::Unicost,
            seed: 3,
        })
        .unwrap();
        let feasible = enumerate_feasible_cuts(&g, 10).unwrap();
        for built in [build_eac(&g), build_p3e(&g)] {
            let r = bnc_solve(&built.instance, &Limits::default(), None).unwrap();
            for cut in &feasible {
                let point = built.embed_solution(cut);
                for row in &r.cut_rows {
                    assert!(
                        row.violation(&point) <= 1e-9,
                        "row violated by feasible cut {cut:?} under {:?}",
                        built.kind
                    );
                }
            }
        }
    }
}
