//! Upper-bound machinery: the MVCA connected-subgraph label heuristic and a
//! multistart bipartition local search driven by a color-frequency counter.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{
    CutSolution, Edge, LabelSet, LabeledGraph, UnionFind, VertexId, VertexPartition,
};

/// Greedy label selection: repeatedly add the allowed label that minimizes
/// the component count of the selected subgraph, until it spans the graph.
/// Returns `None` when the allowed labels cannot connect it.
///
/// Ties: fewer edges added, then lowest label id.
pub fn mvca(g: &LabeledGraph, allowed: &LabelSet) -> Option<LabelSet> {
    let n = g.num_vertices();
    if n == 0 {
        return Some(LabelSet::new());
    }
    let mut edges_of: Vec<Vec<&Edge>> = vec![Vec::new(); g.num_labels()];
    for e in g.edges() {
        edges_of[e.label].push(e);
    }
    let mut chosen = LabelSet::new();
    let mut uf = UnionFind::new(n);
    while uf.num_components() > 1 {
        let mut best: Option<(usize, usize, usize)> = None; // (components, edges, label)
        for &l in allowed {
            if chosen.contains(&l) {
                continue;
            }
            let mut trial = uf.clone();
            for e in &edges_of[l] {
                trial.union(e.u, e.v);
            }
            let key = (trial.num_components(), edges_of[l].len(), l);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let Some((comps, _, label)) = best else {
            return None;
        };
        if comps == uf.num_components() {
            return None; // no label makes progress
        }
        for e in &edges_of[label] {
            uf.union(e.u, e.v);
        }
        chosen.insert(label);
    }
    Some(chosen)
}

/// Spanning tree restricted to edges whose label is in `labels`; `None` when
/// those edges do not span the graph. Returned edges form a forest scan in
/// input order.
pub fn spanning_tree_in_labels<'g>(
    g: &'g LabeledGraph,
    labels: &LabelSet,
) -> Option<Vec<&'g Edge>> {
    let mut uf = UnionFind::new(g.num_vertices());
    let mut tree = Vec::with_capacity(g.num_vertices().saturating_sub(1));
    for e in g.edges() {
        if labels.contains(&e.label) && uf.union(e.u, e.v) {
            tree.push(e);
        }
    }
    if uf.num_components() == 1 {
        Some(tree)
    } else {
        None
    }
}

/// Per-label count of crossing edges under a vertex partition. Gives O(1)
/// cost bookkeeping per incident edge when a vertex moves.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorCounter {
    counts: Vec<usize>,
    distinct: usize,
    cost: f64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("move would empty a partition side")]
    EmptiesSide,
    #[error("interchange endpoints are on the same side")]
    SameSide,
}

impl ColorCounter {
    pub fn new(g: &LabeledGraph, p: &VertexPartition) -> Self {
        let mut counts = vec![0usize; g.num_labels()];
        for e in g.edges() {
            if p.side(e.u) != p.side(e.v) {
                counts[e.label] += 1;
            }
        }
        let mut distinct = 0;
        let mut cost = 0.0;
        for (l, &c) in counts.iter().enumerate() {
            if c > 0 {
                distinct += 1;
                cost += g.label_cost(l);
            }
        }
        ColorCounter {
            counts,
            distinct,
            cost,
        }
    }

    pub fn distinct(&self) -> usize {
        self.distinct
    }

    /// Sum of label costs over labels with a positive crossing count.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn crossing_set(&self) -> LabelSet {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(l, _)| l)
            .collect()
    }

    fn bump(&mut self, g: &LabeledGraph, label: usize, delta: isize) {
        let c = &mut self.counts[label];
        if delta > 0 {
            if *c == 0 {
                self.distinct += 1;
                self.cost += g.label_cost(label);
            }
            *c += delta as usize;
        } else {
            *c -= (-delta) as usize;
            if *c == 0 {
                self.distinct -= 1;
                self.cost -= g.label_cost(label);
            }
        }
    }

    /// Moves `v` to the other side, updating counter and partition. Returns
    /// the new cut cost. Applying the same move again reverts it exactly.
    pub fn apply_change_partition(
        &mut self,
        g: &LabeledGraph,
        p: &mut VertexPartition,
        v: VertexId,
    ) -> Result<f64, MoveError> {
        let from_left = p.side(v);
        let occupied = if from_left {
            p.left_count()
        } else {
            p.right_count()
        };
        if occupied <= 1 {
            return Err(MoveError::EmptiesSide);
        }
        for e in g.incident_edges(v) {
            let other = if e.u == v { e.v } else { e.u };
            if p.side(other) != p.side(v) {
                self.bump(g, e.label, -1); // was crossing, now internal
            } else {
                self.bump(g, e.label, 1);
            }
        }
        p.flip(v);
        Ok(self.cost)
    }

    /// Swaps two vertices across the partition. The edge (u, v), if present,
    /// stays crossing and is not touched.
    pub fn apply_interchange(
        &mut self,
        g: &LabeledGraph,
        p: &mut VertexPartition,
        u: VertexId,
        v: VertexId,
    ) -> Result<f64, MoveError> {
        if p.side(u) == p.side(v) {
            return Err(MoveError::SameSide);
        }
        for &moved in &[u, v] {
            let still = if moved == u { v } else { u };
            for e in g.incident_edges(moved) {
                let other = if e.u == moved { e.v } else { e.u };
                if other == still {
                    continue; // both endpoints swap sides: stays crossing
                }
                if p.side(other) != p.side(moved) {
                    self.bump(g, e.label, -1);
                } else {
                    self.bump(g, e.label, 1);
                }
            }
        }
        p.flip(u);
        p.flip(v);
        Ok(self.cost)
    }
}

/// Best solution found by multistart descent, plus the cost of the best
/// starting partition (before any move) for regression checks.
#[derive(Debug, Clone)]
pub struct LocalSearchOutcome {
    pub best: CutSolution,
    pub best_initial_cost: f64,
}

/// Default restart count: 10 * ceil(log2 n).
pub fn default_restarts(n: usize) -> usize {
    10 * (usize::BITS - (n.max(2) - 1).leading_zeros()) as usize
}

/// Multistart best-improvement descent over the change- and
/// interchange-partition neighborhoods. Always returns a feasible cut; on a
/// disconnected input it short-circuits to the empty cut.
pub fn local_search(g: &LabeledGraph, restarts: usize, seed: u64) -> LocalSearchOutcome {
    let n = g.num_vertices();
    assert!(n >= 2, "local search needs at least two vertices");
    if !g.is_connected() {
        let best = g.validate_cut(&LabelSet::new()).expect("empty cut is valid");
        let cost = best.cost;
        return LocalSearchOutcome {
            best,
            best_initial_cost: cost,
        };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<CutSolution> = None;
    let mut best_initial = f64::INFINITY;
    for _ in 0..restarts.max(1) {
        let mut p = random_partition(n, &mut rng);
        let mut counter = ColorCounter::new(g, &p);
        best_initial = best_initial.min(counter.cost());
        descend(g, &mut p, &mut counter);
        let labels = counter.crossing_set();
        let cut = g.validate_cut(&labels).expect("labels in range");
        debug_assert!(cut.is_feasible());
        if best.as_ref().map_or(true, |b| cut.cost < b.cost - 1e-12) {
            best = Some(cut);
        }
    }
    LocalSearchOutcome {
        best: best.expect("at least one restart"),
        best_initial_cost: best_initial,
    }
}

fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> VertexPartition {
    loop {
        let side: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let left = side.iter().filter(|&&s| s).count();
        if left > 0 && left < n {
            return VertexPartition::new(side);
        }
    }
}

/// Best-improvement descent; deterministic scan order. Each accepted move is
/// cross-checked against a full recount in debug builds.
fn descend(g: &LabeledGraph, p: &mut VertexPartition, counter: &mut ColorCounter) {
    let n = g.num_vertices();
    loop {
        let current = counter.cost();
        let mut best_move: Option<(f64, Move)> = None;
        for v in 0..n {
            if let Some(cost) = probe(g, p, counter, Move::Change(v)) {
                if cost < current - 1e-12
                    && best_move.as_ref().map_or(true, |(c, _)| cost < c - 1e-12)
                {
                    best_move = Some((cost, Move::Change(v)));
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                if p.side(u) && !p.side(v) {
                    if let Some(cost) = probe(g, p, counter, Move::Interchange(u, v)) {
                        if cost < current - 1e-12
                            && best_move.as_ref().map_or(true, |(c, _)| cost < c - 1e-12)
                        {
                            best_move = Some((cost, Move::Interchange(u, v)));
                        }
                    }
                }
            }
        }
        let Some((_, mv)) = best_move else {
            return;
        };
        apply(g, p, counter, mv).expect("probed move must be legal");
        debug_assert_eq!(counter.crossing_set(), g.crossing_labels(p).unwrap());
        debug_assert!({
            let fresh = ColorCounter::new(g, p);
            fresh.counts == counter.counts
                && fresh.distinct == counter.distinct
                && (fresh.cost - counter.cost).abs() < 1e-9
        });
    }
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Change(VertexId),
    Interchange(VertexId, VertexId),
}

fn apply(
    g: &LabeledGraph,
    p: &mut VertexPartition,
    c: &mut ColorCounter,
    mv: Move,
) -> Result<f64, MoveError> {
    match mv {
        Move::Change(v) => c.apply_change_partition(g, p, v),
        Move::Interchange(u, v) => c.apply_interchange(g, p, u, v),
    }
}

/// Cost after a move, without leaving it applied. `None` for illegal moves.
fn probe(g: &LabeledGraph, p: &mut VertexPartition, c: &mut ColorCounter, mv: Move) -> Option<f64> {
    let cost = apply(g, p, c, mv).ok()?;
    apply(g, p, c, mv).expect("revert of a legal move is legal");
    Some(cost)
}
