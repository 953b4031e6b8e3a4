//! Support digraphs and strongly connected components.
//!
//! Edges point from infector to infectee: `K[i][j] > threshold` gives the
//! edge `j → i`.

use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            succ: vec![Vec::new(); n],
        }
    }

    /// Support digraph of a nonnegative matrix: `j → i` iff `m[i][j] > threshold`.
    pub fn from_support(m: &Matrix, threshold: f64) -> Self {
        let n = m.dim();
        let mut g = Digraph::new(n);
        for j in 0..n {
            for i in 0..n {
                if m[(i, j)] > threshold {
                    g.succ[j].push(i);
                }
            }
        }
        g
    }

    /// Support digraph restricted to `keep`; vertex ids stay global and
    /// vertices outside `keep` are isolated.
    pub fn from_support_on(m: &Matrix, threshold: f64, keep: &[bool]) -> Self {
        let n = m.dim();
        let mut g = Digraph::new(n);
        for j in (0..n).filter(|&j| keep[j]) {
            for i in (0..n).filter(|&i| keep[i]) {
                if m[(i, j)] > threshold {
                    g.succ[j].push(i);
                }
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].contains(&to)
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    /// All edges as `(from, to)` pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .succ
            .iter()
            .enumerate()
            .flat_map(|(j, s)| s.iter().map(move |&i| (j, i)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Strongly connected components (Tarjan), restricted to vertices with
    /// `active[v]`. Each component is sorted; components are returned in
    /// reverse topological order of the condensation (sinks first), as
    /// Tarjan's algorithm emits them.
    pub fn scc_on(&self, active: &[bool]) -> Vec<Vec<usize>> {
        let n = self.len();
        const UNVISITED: usize = usize::MAX;
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0usize;
        // explicit call stack of (vertex, next successor position)
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if !active[root] || index[root] != UNVISITED {
                continue;
            }
            call.push((root, 0));
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(top) = call.last_mut() {
                let (v, pos) = *top;
                if let Some(&w) = self.succ[v].get(pos) {
                    top.1 += 1;
                    if !active[w] {
                        continue;
                    }
                    if index[w] == UNVISITED {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }

    pub fn scc(&self) -> Vec<Vec<usize>> {
        self.scc_on(&vec![true; self.len()])
    }

    /// Whether the subgraph induced by `active` is strongly connected.
    /// An empty vertex set is not; a single vertex is.
    pub fn is_strongly_connected_on(&self, active: &[bool]) -> bool {
        if !active.iter().any(|&a| a) {
            return false;
        }
        self.scc_on(active).len() == 1
    }

    /// Vertices reachable from `sources` (sources included) within `active`.
    pub fn reachable_from(&self, sources: &[usize], active: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut todo: Vec<usize> = sources.iter().copied().filter(|&s| active[s]).collect();
        for &s in &todo {
            seen[s] = true;
        }
        while let Some(v) = todo.pop() {
            for &w in &self.succ[v] {
                if active[w] && !seen[w] {
                    seen[w] = true;
                    todo.push(w);
                }
            }
        }
        seen
    }

    /// Whether the graph contains a directed cycle (self loops included).
    pub fn has_cycle(&self) -> bool {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for s in &self.succ {
            for &w in s {
                indeg[w] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop() {
            removed += 1;
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        removed < n
    }
}
