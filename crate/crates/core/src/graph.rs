//! Dynamic graph state: the arriving edge stream, adjacency, and an
//! incremental component index with member lists and recolored-vertex counts.

use serde::{Deserialize, Serialize};

use crate::error::{RecolorError, Result};

/// An arriving edge. Endpoint order is significant: algorithms that must
/// pick one endpoint (marking or promotion) always pick `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub const fn new(u: usize, v: usize) -> Self {
        Edge { u, v }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        for w in [self.u, self.v] {
            if w >= n {
                return Err(RecolorError::VertexOutOfRange { vertex: w, n });
            }
        }
        if self.u == self.v {
            return Err(RecolorError::SelfLoop(self.u));
        }
        Ok(())
    }

    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

impl From<[usize; 2]> for Edge {
    fn from([u, v]: [usize; 2]) -> Self {
        Edge { u, v }
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.u, e.v]
    }
}

/// Adjacency of everything that has arrived so far. Neighbour lists are
/// kept in arrival order and carry the arrival index of each edge.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    adjacency: Vec<Vec<(usize, usize)>>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n], edges: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &e in edges {
            g.add_edge(e)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Appends an edge and returns its arrival index.
    pub fn add_edge(&mut self, e: Edge) -> Result<usize> {
        e.check(self.n())?;
        let idx = self.edges.len();
        self.edges.push(e);
        self.adjacency[e.u].push((e.v, idx));
        self.adjacency[e.v].push((e.u, idx));
        Ok(idx)
    }

    /// Degree counting parallel edges with multiplicity.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    /// `(neighbor, arrival index)` pairs in arrival order.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for y in self.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// What happened when an edge was applied to a [`ComponentIndex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeReport {
    pub root_u: usize,
    pub root_v: usize,
    pub size_u: usize,
    pub size_v: usize,
    pub marked_u: usize,
    pub marked_v: usize,
    /// Root after the edge; equals both pre-roots when the edge was internal.
    pub root: usize,
    pub merged: bool,
}

impl MergeReport {
    pub fn merged_size(&self) -> usize {
        if self.merged {
            self.size_u + self.size_v
        } else {
            self.size_u
        }
    }

    pub fn merged_marked(&self) -> usize {
        if self.merged {
            self.marked_u + self.marked_v
        } else {
            self.marked_u
        }
    }
}

const NIL: usize = usize::MAX;

/// Union-by-size partition without path compression. Each root owns an
/// intrusive member list (head/tail/next) so whole components can be walked
/// and concatenated in O(1). A per-vertex mark set (the recolored set R) is
/// counted per root.
#[derive(Clone, Debug)]
pub struct ComponentIndex {
    parent: Vec<usize>,
    size: Vec<usize>,
    marked_count: Vec<usize>,
    min_vertex: Vec<usize>,
    head: Vec<usize>,
    tail: Vec<usize>,
    next: Vec<usize>,
    marked: Vec<bool>,
    total_marked: usize,
}

impl ComponentIndex {
    pub fn new(n: usize) -> Self {
        ComponentIndex {
            parent: (0..n).collect(),
            size: vec![1; n],
            marked_count: vec![0; n],
            min_vertex: (0..n).collect(),
            head: (0..n).collect(),
            tail: (0..n).collect(),
            next: vec![NIL; n],
            marked: vec![false; n],
            total_marked: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn size_of(&self, v: usize) -> usize {
        self.size[self.find(v)]
    }

    pub fn marked_in(&self, v: usize) -> usize {
        self.marked_count[self.find(v)]
    }

    pub fn min_vertex_of(&self, v: usize) -> usize {
        self.min_vertex[self.find(v)]
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.marked[v]
    }

    pub fn total_marked(&self) -> usize {
        self.total_marked
    }

    /// Adds `v` to the mark set; returns false if it was already there.
    pub fn mark(&mut self, v: usize) -> bool {
        if self.marked[v] {
            return false;
        }
        self.marked[v] = true;
        self.total_marked += 1;
        let r = self.find(v);
        self.marked_count[r] += 1;
        true
    }

    /// Members of the component containing `v`, in list order.
    pub fn members(&self, v: usize) -> Members<'_> {
        let r = self.find(v);
        Members { index: self, cursor: self.head[r] }
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&v| self.parent[v] == v)
    }

    /// Unions the components of the edge's endpoints.
    pub fn apply_edge(&mut self, e: Edge) -> Result<MergeReport> {
        e.check(self.n())?;
        let (ru, rv) = (self.find(e.u), self.find(e.v));
        let mut report = MergeReport {
            root_u: ru,
            root_v: rv,
            size_u: self.size[ru],
            size_v: self.size[rv],
            marked_u: self.marked_count[ru],
            marked_v: self.marked_count[rv],
            root: ru,
            merged: false,
        };
        if ru == rv {
            return Ok(report);
        }
        let (big, small) = if self.size[ru] >= self.size[rv] { (ru, rv) } else { (rv, ru) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.marked_count[big] += self.marked_count[small];
        self.min_vertex[big] = self.min_vertex[big].min(self.min_vertex[small]);
        self.next[self.tail[big]] = self.head[small];
        self.tail[big] = self.tail[small];
        report.root = big;
        report.merged = true;
        Ok(report)
    }
}

pub struct Members<'a> {
    index: &'a ComponentIndex,
    cursor: usize,
}

impl Iterator for Members<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cursor == NIL {
            return None;
        }
        let v = self.cursor;
        self.cursor = self.index.next[v];
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn singletons_merge_to_pair() {
        let mut idx = ComponentIndex::new(4);
        let r = idx.apply_edge(Edge::new(0, 1)).unwrap();
        assert!(r.merged);
        assert_eq!(r.merged_size(), 2);
        assert_eq!(idx.size_of(1), 2);
    }

    #[test]
    fn sizes_and_marks_add_up() {
        let mut idx = ComponentIndex::new(8);
        for (a, b) in [(0, 1), (1, 2), (3, 4), (4, 5), (5, 6), (6, 7)] {
            idx.apply_edge(Edge::new(a, b)).unwrap();
        }
        idx.mark(0);
        idx.mark(4);
        idx.mark(7);
        let r = idx.apply_edge(Edge::new(2, 3)).unwrap();
        assert_eq!((r.size_u, r.size_v), (3, 5));
        assert_eq!(r.merged_size(), 8);
        assert_eq!(r.merged_marked(), 3);
        assert_eq!(idx.marked_in(5), 3);
        let mut members: Vec<_> = idx.members(6).collect();
        members.sort_unstable();
        assert_eq!(members, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn self_edge_rejected() {
        let mut idx = ComponentIndex::new(3);
        assert!(matches!(idx.apply_edge(Edge::new(1, 1)), Err(RecolorError::SelfLoop(1))));
        assert!(matches!(
            idx.apply_edge(Edge::new(1, 3)),
            Err(RecolorError::VertexOutOfRange { vertex: 3, .. })
        ));
    }

    #[test]
    fn duplicate_edge_is_internal() {
        let mut idx = ComponentIndex::new(2);
        idx.apply_edge(Edge::new(0, 1)).unwrap();
        let r = idx.apply_edge(Edge::new(1, 0)).unwrap();
        assert!(!r.merged);
        assert_eq!(r.merged_size(), 2);
    }

    proptest! {
        #[test]
        fn index_matches_recomputation(
            n in 1usize..30,
            raw in prop::collection::vec((0usize..30, 0usize..30), 0..60),
            marks in prop::collection::vec(0usize..30, 0..20),
        ) {
            let edges: Vec<Edge> = raw.into_iter()
                .map(|(a, b)| Edge::new(a % n, b % n))
                .filter(|e| e.u != e.v)
                .collect();
            let mut idx = ComponentIndex::new(n);
            for &e in &edges {
                idx.apply_edge(e).unwrap();
            }
            let mut marked = vec![false; n];
            for m in marks {
                idx.mark(m % n);
                marked[m % n] = true;
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let comps = g.components();
            let total: usize = idx.roots().map(|r| idx.size_of(r)).sum();
            prop_assert_eq!(total, n);
            for comp in comps {
                let r = idx.find(comp[0]);
                prop_assert!(comp.iter().all(|&v| idx.find(v) == r));
                prop_assert_eq!(idx.size_of(r), comp.len());
                let m = comp.iter().filter(|&&v| marked[v]).count();
                prop_assert_eq!(idx.marked_in(r), m);
                prop_assert_eq!(idx.min_vertex_of(r), comp[0]);
                let mut members: Vec<_> = idx.members(r).collect();
                members.sort_unstable();
                prop_assert_eq!(members, comp);
            }
        }
    }
}
