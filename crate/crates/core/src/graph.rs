//! Primal graph of a system, its connected components, and betweenness
//! centrality used for branching.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::system::{RowId, System, VarId};

/// Variables as vertices, with an edge between any two variables sharing a row.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimalGraph {
    adjacency: BTreeMap<VarId, BTreeSet<VarId>>,
}

impl PrimalGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: VarId) {
        self.adjacency.entry(v).or_default();
    }

    /// Adds an undirected edge; self-loops are ignored.
    pub fn add_edge(&mut self, a: VarId, b: VarId) {
        self.add_vertex(a);
        self.add_vertex(b);
        if a != b {
            self.adjacency.get_mut(&a).expect("vertex").insert(b);
            self.adjacency.get_mut(&b).expect("vertex").insert(a);
        }
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VarId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn neighbors(&self, v: VarId) -> impl Iterator<Item = VarId> + '_ {
        self.adjacency.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: VarId) -> usize {
        self.adjacency.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn has_edge(&self, a: VarId, b: VarId) -> bool {
        self.adjacency.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<VarId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertices() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if seen.insert(w) {
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

pub fn build_primal_graph(s: &System) -> PrimalGraph {
    let mut g = PrimalGraph::new();
    for v in s.vars() {
        g.add_vertex(v);
    }
    for (_, row) in s.rows() {
        let support: Vec<VarId> = row.support().collect();
        for (k, &a) in support.iter().enumerate() {
            for &b in &support[k + 1..] {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// One independent piece of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub vars: Vec<VarId>,
    pub rows: Vec<RowId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub components: Vec<Component>,
}

impl Partition {
    pub fn is_decomposable(&self) -> bool {
        self.components.len() > 1
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Splits `s` along connected components of its primal graph. Variables in
/// no row become singleton components without rows.
///
/// Rows with empty support are not assigned to any component.
pub fn decompose(s: &System) -> Partition {
    let graph = build_primal_graph(s);
    let comps = graph.components();
    let mut owner: BTreeMap<VarId, usize> = BTreeMap::new();
    for (k, comp) in comps.iter().enumerate() {
        for v in comp {
            owner.insert(*v, k);
        }
    }
    let mut rows: Vec<Vec<RowId>> = vec![Vec::new(); comps.len()];
    for (id, row) in s.rows() {
        if let Some(v) = row.support().next() {
            rows[owner[&v]].push(id);
        }
    }
    Partition {
        components: comps
            .into_iter()
            .zip(rows)
            .map(|(vars, rows)| Component { vars, rows })
            .collect(),
    }
}

/// Shortest-path betweenness of every vertex, counting each unordered
/// source/target pair once. Exact rational arithmetic throughout.
pub fn betweenness_scores(g: &PrimalGraph) -> BTreeMap<VarId, BigRational> {
    let verts: Vec<VarId> = g.vertices().collect();
    let n = verts.len();
    let index: BTreeMap<VarId, usize> = verts.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let adj: Vec<Vec<usize>> = verts
        .iter()
        .map(|v| g.neighbors(*v).map(|w| index[&w]).collect())
        .collect();

    let mut score = vec![BigRational::zero(); n];
    for source in 0..n {
        let mut order = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![BigInt::zero(); n];
        let mut dist: Vec<Option<usize>> = vec![None; n];
        sigma[source] = BigInt::one();
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let dv = dist[v].expect("reached");
            for &w in &adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
                if dist[w] == Some(dv + 1) {
                    let add = sigma[v].clone();
                    sigma[w] += add;
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![BigRational::zero(); n];
        for &w in order.iter().rev() {
            let factor =
                (BigRational::one() + &delta[w]) / BigRational::from_integer(sigma[w].clone());
            for &v in &preds[w] {
                let gain = BigRational::from_integer(sigma[v].clone()) * &factor;
                delta[v] += gain;
            }
            if w != source {
                score[w] += &delta[w];
            }
        }
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    verts
        .into_iter()
        .zip(score)
        .map(|(v, s)| (v, s * &half))
        .collect()
}

/// Picks the branching variable: highest betweenness, then highest degree
/// when every score is zero, then smallest id.
///
/// Panics if the system has no variables.
pub fn select_variable(s: &System) -> VarId {
    select_by_betweenness(&build_primal_graph(s))
}

pub(crate) fn select_by_betweenness(g: &PrimalGraph) -> VarId {
    let scores = betweenness_scores(g);
    let mut best: Option<(&BigRational, VarId)> = None;
    for (v, sc) in &scores {
        if best.is_none_or(|(b, _)| sc > b) {
            best = Some((sc, *v));
        }
    }
    match best {
        Some((sc, v)) if !sc.is_zero() => v,
        Some(_) => select_by_degree(g),
        None => panic!("no variables to select"),
    }
}

pub(crate) fn select_by_degree(g: &PrimalGraph) -> VarId {
    let mut best: Option<(usize, VarId)> = None;
    for v in g.vertices() {
        let d = g.degree(v);
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, v));
        }
    }
    best.expect("no variables to select").1
}
