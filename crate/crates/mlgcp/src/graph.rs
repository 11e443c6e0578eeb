//! Edge-labeled graph data model: construction, connectivity, cut validation
//! and the text instance format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

pub type VertexId = usize;
pub type LabelId = usize;

/// Ordered set of label ids; deterministic iteration keeps solvers reproducible.
pub type LabelSet = BTreeSet<LabelId>;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex id {id} out of range (n = {n})")]
    VertexOutOfRange { id: VertexId, n: usize },
    #[error("label id {id} out of range (L = {num_labels})")]
    LabelOutOfRange { id: LabelId, num_labels: usize },
    #[error("expected {expected} label costs, got {got}")]
    CostCount { expected: usize, got: usize },
    #[error("label cost {cost} for label {id} is not positive")]
    NonPositiveCost { id: LabelId, cost: f64 },
    #[error("partition side is empty")]
    EmptyPartitionSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub label: LabelId,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, label: LabelId) -> Self {
        Edge { u, v, label }
    }

    /// Endpoints with the smaller id first.
    pub fn pair(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }
}

/// An edge-labeled graph: `n` vertices, edges carrying a label id, and a
/// removal cost per label. Immutable after construction.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    n: usize,
    edges: Vec<Edge>,
    num_labels: usize,
    label_costs: Vec<f64>,
    incident: Vec<Vec<usize>>, // edge indices per vertex
}

impl LabeledGraph {
    /// Builds a graph, checking invariants. Exact duplicate `(u, v, label)`
    /// triples (in either endpoint order) are deduplicated.
    pub fn new(
        n: usize,
        edges: Vec<Edge>,
        num_labels: usize,
        label_costs: Vec<f64>,
    ) -> Result<Self, GraphError> {
        if label_costs.len() != num_labels {
            return Err(GraphError::CostCount {
                expected: num_labels,
                got: label_costs.len(),
            });
        }
        for (id, &cost) in label_costs.iter().enumerate() {
            if !(cost > 0.0) {
                return Err(GraphError::NonPositiveCost { id, cost });
            }
        }
        let mut seen = BTreeSet::new();
        let mut deduped = Vec::with_capacity(edges.len());
        for e in edges {
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if e.u >= n {
                return Err(GraphError::VertexOutOfRange { id: e.u, n });
            }
            if e.v >= n {
                return Err(GraphError::VertexOutOfRange { id: e.v, n });
            }
            if e.label >= num_labels {
                return Err(GraphError::LabelOutOfRange {
                    id: e.label,
                    num_labels,
                });
            }
            let (a, b) = e.pair();
            if seen.insert((a, b, e.label)) {
                deduped.push(e);
            }
        }
        let mut incident = vec![Vec::new(); n];
        for (i, e) in deduped.iter().enumerate() {
            incident[e.u].push(i);
            incident[e.v].push(i);
        }
        Ok(LabeledGraph {
            n,
            edges: deduped,
            num_labels,
            label_costs,
            incident,
        })
    }

    /// Unicost convenience constructor.
    pub fn unicost(n: usize, edges: Vec<Edge>, num_labels: usize) -> Result<Self, GraphError> {
        Self::new(n, edges, num_labels, vec![1.0; num_labels])
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges incident to a vertex.
    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.incident[v].iter().map(move |&i| &self.edges[i])
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn label_costs(&self) -> &[f64] {
        &self.label_costs
    }

    pub fn label_cost(&self, label: LabelId) -> f64 {
        self.label_costs[label]
    }

    /// True when every label cost is (numerically) a whole number.
    pub fn costs_integral(&self) -> bool {
        self.label_costs.iter().all(|c| (c - c.round()).abs() < 1e-9)
    }

    pub fn cut_cost(&self, labels: &LabelSet) -> f64 {
        labels.iter().map(|&l| self.label_costs[l]).sum()
    }

    /// Label ids that appear on no edge.
    pub fn unused_labels(&self) -> Vec<LabelId> {
        let mut used = vec![false; self.num_labels];
        for e in &self.edges {
            used[e.label] = true;
        }
        (0..self.num_labels).filter(|&l| !used[l]).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components_after_removal(&LabelSet::new()).0 == 1
    }

    /// Connected components of the graph restricted to edges whose label is
    /// not in `removed`. Returns the component count and a per-vertex
    /// component id (ids are dense, assigned in vertex order).
    pub fn components_after_removal(&self, removed: &LabelSet) -> (usize, Vec<usize>) {
        let mut uf = UnionFind::new(self.n);
        for e in &self.edges {
            if !removed.contains(&e.label) {
                uf.union(e.u, e.v);
            }
        }
        uf.component_ids()
    }

    /// Recomputes cost and component count for a label set. Feasibility is
    /// not required; inspect `components_after` on the result.
    pub fn validate_cut(&self, labels: &LabelSet) -> Result<CutSolution, GraphError> {
        for &l in labels {
            if l >= self.num_labels {
                return Err(GraphError::LabelOutOfRange {
                    id: l,
                    num_labels: self.num_labels,
                });
            }
        }
        let (count, _) = self.components_after_removal(labels);
        Ok(CutSolution {
            labels: labels.clone(),
            cost: self.cut_cost(labels),
            components_after: count,
        })
    }

    /// Labels on edges whose endpoints lie on opposite sides of the
    /// partition. The result is always a feasible cut.
    pub fn crossing_labels(&self, p: &VertexPartition) -> Result<LabelSet, GraphError> {
        if p.left_count() == 0 || p.right_count() == 0 {
            return Err(GraphError::EmptyPartitionSide);
        }
        let mut labels = LabelSet::new();
        for e in &self.edges {
            if p.side(e.u) != p.side(e.v) {
                labels.insert(e.label);
            }
        }
        Ok(labels)
    }
}

/// A label subset with its recomputed cost and the component count of the
/// graph after removing its edges. Feasible when the graph splits.
#[derive(Debug, Clone, PartialEq)]
pub struct CutSolution {
    pub labels: LabelSet,
    pub cost: f64,
    pub components_after: usize,
}

impl CutSolution {
    pub fn is_feasible(&self) -> bool {
        self.components_after >= 2
    }
}

/// Binary vertex bipartition; `true` means the left side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    side: Vec<bool>,
}

impl VertexPartition {
    pub fn new(side: Vec<bool>) -> Self {
        VertexPartition { side }
    }

    pub fn from_left_set(n: usize, left: &[VertexId]) -> Self {
        let mut side = vec![false; n];
        for &v in left {
            side[v] = true;
        }
        VertexPartition { side }
    }

    pub fn side(&self, v: VertexId) -> bool {
        self.side[v]
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }

    pub fn left_count(&self) -> usize {
        self.side.iter().filter(|&&s| s).count()
    }

    pub fn right_count(&self) -> usize {
        self.side.len() - self.left_count()
    }

    pub fn flip(&mut self, v: VertexId) {
        self.side[v] = !self.side[v];
    }
}

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two elements were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn num_components(&self) -> usize {
        self.components
    }

    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Dense component ids in vertex order.
    pub fn component_ids(&mut self) -> (usize, Vec<usize>) {
        let n = self.parent.len();
        let mut id_of_root = vec![usize::MAX; n];
        let mut ids = vec![0; n];
        let mut next = 0;
        for v in 0..n {
            let r = self.find(v);
            if id_of_root[r] == usize::MAX {
                id_of_root[r] = next;
                next += 1;
            }
            ids[v] = id_of_root[r];
        }
        (next, ids)
    }
}

/// Parse result: the graph plus non-fatal findings (deduplicated edges,
/// labels that appear on no edge).
#[derive(Debug)]
pub struct ParsedInstance {
    pub graph: LabeledGraph,
    pub warnings: Vec<String>,
}

/// Parses the text instance format:
///
/// ```text
/// n m L
/// u v label     (m lines)
/// costs c_0 ... c_{L-1}   (optional)
/// ```
pub fn parse_instance(text: &str) -> Result<ParsedInstance, GraphError> {
    let perr = |line: usize, msg: String| GraphError::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| perr(1, "empty instance".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 {
        return Err(perr(hline, format!("expected header `n m L`, got `{header}`")));
    }
    let parse_usize = |s: &str, what: &str, line: usize| {
        s.parse::<usize>()
            .map_err(|_| perr(line, format!("invalid {what} `{s}`")))
    };
    let n = parse_usize(head[0], "vertex count", hline)?;
    let m = parse_usize(head[1], "edge count", hline)?;
    let num_labels = parse_usize(head[2], "label count", hline)?;

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (eline, ltext) = lines
            .next()
            .ok_or_else(|| perr(hline, format!("expected {m} edge lines")))?;
        let parts: Vec<&str> = ltext.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(perr(eline, format!("expected `u v label`, got `{ltext}`")));
        }
        let u = parse_usize(parts[0], "vertex id", eline)?;
        let v = parse_usize(parts[1], "vertex id", eline)?;
        let label = parse_usize(parts[2], "label id", eline)?;
        if u == v {
            return Err(perr(eline, format!("self-loop at vertex {u}")));
        }
        if u >= n || v >= n {
            return Err(perr(eline, format!("vertex id out of range (n = {n})")));
        }
        if label >= num_labels {
            return Err(perr(eline, format!("label id out of range (L = {num_labels})")));
        }
        edges.push(Edge::new(u, v, label));
    }

    let mut costs: Option<Vec<f64>> = None;
    for (cline, ltext) in lines {
        let parts: Vec<&str> = ltext.split_whitespace().collect();
        if parts[0] != "costs" {
            return Err(perr(cline, format!("unexpected trailing line `{ltext}`")));
        }
        if costs.is_some() {
            return Err(perr(cline, "duplicate cost section".into()));
        }
        if parts.len() != num_labels + 1 {
            return Err(perr(
                cline,
                format!("expected {num_labels} costs, got {}", parts.len() - 1),
            ));
        }
        let mut c = Vec::with_capacity(num_labels);
        for s in &parts[1..] {
            c.push(
                s.parse::<f64>()
                    .map_err(|_| perr(cline, format!("invalid cost `{s}`")))?,
            );
        }
        costs = Some(c);
    }

    let raw_count = edges.len();
    let graph = LabeledGraph::new(
        n,
        edges,
        num_labels,
        costs.unwrap_or_else(|| vec![1.0; num_labels]),
    )?;

    let mut warnings = Vec::new();
    if graph.num_edges() < raw_count {
        warnings.push(format!(
            "{} duplicate edge(s) removed",
            raw_count - graph.num_edges()
        ));
    }
    let unused = graph.unused_labels();
    if !unused.is_empty() {
        warnings.push(format!("unused label(s): {unused:?}"));
    }
    Ok(ParsedInstance { graph, warnings })
}

/// Canonical text form; `parse_instance` round-trips it.
pub fn serialize_instance(g: &LabeledGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", g.num_vertices(), g.num_edges(), g.num_labels());
    for e in g.edges() {
        let (u, v) = e.pair();
        let _ = writeln!(out, "{} {} {}", u, v, e.label);
    }
    if !g.label_costs().iter().all(|&c| c == 1.0) {
        out.push_str("costs");
        for c in g.label_costs() {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}

/// Solution file format: `cost k` on the first line, then the k label ids.
pub fn serialize_solution(cut: &CutSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", cut.cost, cut.labels.len());
    let ids: Vec<String> = cut.labels.iter().map(|l| l.to_string()).collect();
    let _ = writeln!(out, "{}", ids.join(" "));
    out
}

/// Reads a solution file back as `(claimed cost, labels)`.
pub fn parse_solution(text: &str) -> Result<(f64, LabelSet), GraphError> {
    let perr = |line: usize, msg: String| GraphError::Parse { line, msg };
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| perr(1, "empty solution file".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(perr(1, format!("expected `cost k`, got `{header}`")));
    }
    let cost: f64 = parts[0]
        .parse()
        .map_err(|_| perr(1, format!("invalid cost `{}`", parts[0])))?;
    let k: usize = parts[1]
        .parse()
        .map_err(|_| perr(1, format!("invalid label count `{}`", parts[1])))?;
    let mut labels = LabelSet::new();
    if k > 0 {
        let lline = lines
            .next()
            .ok_or_else(|| perr(2, "missing label line".into()))?;
        for s in lline.split_whitespace() {
            labels.insert(
                s.parse::<usize>()
                    .map_err(|_| perr(2, format!("invalid label id `{s}`")))?,
            );
        }
        if labels.len() != k {
            return Err(perr(2, format!("expected {k} labels, got {}", labels.len())));
        }
    }
    Ok((cost, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_distinct() -> LabeledGraph {
        // K3, edge i gets label i
        LabeledGraph::unicost(
            3,
            vec![Edge::new(0, 1, 0), Edge::new(1, 2, 1), Edge::new(0, 2, 2)],
            3,
        )
        .unwrap()
    }

    #[test]
    fn parse_triangle() {
        let parsed = parse_instance("3 3 2\n0 1 0\n1 2 1\n0 2 1\n").unwrap();
        let g = parsed.graph;
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.num_labels(), 2);
        assert!(g.label_costs().iter().all(|&c| c == 1.0));
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn parse_rejects_self_loop() {
        let err = parse_instance("2 1 1\n0 0 0\n").unwrap_err();
        match err {
            GraphError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("self-loop"), "{msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_bad_ids_and_duplicate_costs() {
        assert!(parse_instance("2 1 1\n0 5 0\n").is_err());
        assert!(parse_instance("2 1 1\n0 1 3\n").is_err());
        let dup = "2 1 1\n0 1 0\ncosts 1.0\ncosts 2.0\n";
        assert!(matches!(
            parse_instance(dup),
            Err(GraphError::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn parse_warns_on_duplicates_and_unused_labels() {
        let p = parse_instance("3 2 3\n0 1 0\n1 0 0\n").unwrap();
        assert_eq!(p.graph.num_edges(), 1);
        assert_eq!(p.warnings.len(), 2);
        assert_eq!(p.graph.unused_labels(), vec![1, 2]);
    }

    #[test]
    fn components_triangle() {
        let g = triangle_distinct();
        assert_eq!(g.components_after_removal(&LabelSet::new()).0, 1);
        let all: LabelSet = (0..3).collect();
        assert_eq!(g.components_after_removal(&all).0, 3);
        let two: LabelSet = [0, 1].into_iter().collect();
        // hand oracle: remaining edge (0,2) leaves {0,2} and {1}
        assert_eq!(g.components_after_removal(&two).0, 2);
    }

    #[test]
    fn components_monotone_under_superset() {
        let g = triangle_distinct();
        let subsets: Vec<LabelSet> = (0u32..8)
            .map(|mask| (0..3).filter(|l| mask >> l & 1 == 1).collect())
            .collect();
        for a in &subsets {
            for b in &subsets {
                if a.is_subset(b) {
                    assert!(
                        g.components_after_removal(a).0 <= g.components_after_removal(b).0
                    );
                }
            }
        }
    }

    #[test]
    fn validate_cut_basics() {
        let g = LabeledGraph::unicost(2, vec![Edge::new(0, 1, 0)], 1).unwrap();
        let cut = g.validate_cut(&[0].into_iter().collect()).unwrap();
        assert!(cut.is_feasible());
        assert_eq!(cut.cost, 1.0);
        assert_eq!(cut.components_after, 2);

        let g = triangle_distinct();
        let empty = g.validate_cut(&LabelSet::new()).unwrap();
        assert!(!empty.is_feasible());
        assert_eq!(empty.components_after, 1);

        assert!(g.validate_cut(&[9].into_iter().collect()).is_err());
    }

    #[test]
    fn crossing_labels_examples() {
        let g = LabeledGraph::unicost(2, vec![Edge::new(0, 1, 0)], 1).unwrap();
        let p = VertexPartition::from_left_set(2, &[0]);
        assert_eq!(g.crossing_labels(&p).unwrap(), [0].into_iter().collect());

        let g = triangle_distinct();
        let p = VertexPartition::from_left_set(3, &[0]);
        // edges at vertex 0: (0,1,label 0) and (0,2,label 2)
        assert_eq!(g.crossing_labels(&p).unwrap(), [0, 2].into_iter().collect());

        let empty = VertexPartition::from_left_set(3, &[]);
        assert!(g.crossing_labels(&empty).is_err());
    }

    #[test]
    fn crossing_labels_always_feasible() {
        let g = triangle_distinct();
        for mask in 1u32..7 {
            let left: Vec<usize> = (0..3).filter(|v| mask >> v & 1 == 1).collect();
            let p = VertexPartition::from_left_set(3, &left);
            let labels = g.crossing_labels(&p).unwrap();
            assert!(g.validate_cut(&labels).unwrap().components_after >= 2);
        }
    }

    #[test]
    fn solution_round_trip() {
        let cut = CutSolution {
            labels: [1, 3].into_iter().collect(),
            cost: 2.0,
            components_after: 2,
        };
        let text = serialize_solution(&cut);
        let (cost, labels) = parse_solution(&text).unwrap();
        assert_eq!(cost, 2.0);
        assert_eq!(labels, cut.labels);
    }
}
