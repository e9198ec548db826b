//! Fixed-point-free functional digraphs and the undirected graphs derived from them.
//!
//! Vertices are stored 0-based. The `from_one_based` / `to_one_based` pair converts to the
//! 1-based convention used by every external format.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a function needs at least 2 points, got {0}")]
    TooSmall(usize),
    #[error("image of {index} is {value}, outside [1, {n}]")]
    OutOfRange { index: usize, value: usize, n: usize },
    #[error("{0} is a fixed point")]
    FixedPoint(usize),
    #[error("f and g disagree in size ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("f({0}) = g({0})")]
    PointwiseCollision(usize),
    #[error("cycle of length {} found: {cycle:?}", cycle.len())]
    LongCycle { cycle: Vec<usize> },
    #[error("shadows share {} edges, expected at most one: {edges:?}", edges.len())]
    MultipleCommonEdges { edges: Vec<(usize, usize)> },
}

/// A function on `[n]` without fixed points, viewed as the digraph `i -> f(i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FuncMap {
    image: Vec<usize>,
}

impl FuncMap {
    /// Builds from 0-based images.
    pub fn new(image: Vec<usize>) -> Result<Self, GraphError> {
        let n = image.len();
        if n < 2 {
            return Err(GraphError::TooSmall(n));
        }
        for (i, &v) in image.iter().enumerate() {
            if v >= n {
                return Err(GraphError::OutOfRange { index: i + 1, value: v + 1, n });
            }
            if v == i {
                return Err(GraphError::FixedPoint(i + 1));
            }
        }
        Ok(Self { image })
    }

    pub fn from_one_based(image: &[usize]) -> Result<Self, GraphError> {
        let n = image.len();
        let mut zero = Vec::with_capacity(n);
        for (i, &v) in image.iter().enumerate() {
            if v == 0 || v > n {
                return Err(GraphError::OutOfRange { index: i + 1, value: v, n });
            }
            zero.push(v - 1);
        }
        Self::new(zero)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.image.iter().map(|v| v + 1).collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for &v in &self.image {
            deg[v] += 1;
        }
        deg
    }

    /// Some directed cycle of length at least 3, if one exists.
    pub fn long_cycle(&self) -> Option<Vec<usize>> {
        // 0 = unseen, 1 = on the current walk, 2 = finished
        let n = self.n();
        let mut state = vec![0u8; n];
        let mut walk = Vec::new();
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            walk.clear();
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                walk.push(v);
                v = self.image[v];
            }
            if state[v] == 1 {
                let pos = walk.iter().position(|&w| w == v).expect("v is on the walk");
                if walk.len() - pos >= 3 {
                    return Some(walk[pos..].to_vec());
                }
            }
            for &w in &walk {
                state[w] = 2;
            }
        }
        None
    }

    /// The level decomposition of a map whose cycles all have length two.
    pub fn level_partition(&self) -> Result<LevelPartition, GraphError> {
        if let Some(cycle) = self.long_cycle() {
            return Err(GraphError::LongCycle { cycle });
        }
        let n = self.n();
        let mut level: Vec<Option<usize>> = (0..n)
            .map(|i| (self.image[self.image[i]] == i).then_some(0))
            .collect();
        let mut stack = Vec::new();
        for start in 0..n {
            let mut v = start;
            while level[v].is_none() {
                stack.push(v);
                v = self.image[v];
            }
            let mut l = level[v].expect("resolved");
            while let Some(w) = stack.pop() {
                l += 1;
                level[w] = Some(l);
            }
        }
        let level: Vec<usize> = level.into_iter().map(|l| l.expect("every vertex reaches a 2-cycle")).collect();
        let max_level = level.iter().copied().max().unwrap_or(0);
        Ok(LevelPartition { max_level, level })
    }

    /// `H_f`: the undirected graph with an edge `{i, f(i)}` for every `i`.
    pub fn shadow(&self) -> EdgeSet {
        let mut e = EdgeSet::empty(self.n());
        for (i, &j) in self.image.iter().enumerate() {
            e.insert(i, j);
        }
        e
    }

    /// Vertices of in-degree zero.
    pub fn sources(&self) -> BTreeSet<usize> {
        self.in_degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// Splits `[n]` by the 2-cycle each vertex eventually reaches. Each entry is
    /// `((a0, b0), members)` with `a0 < b0`, members ascending. Requires no long cycles.
    pub fn components(&self) -> Result<Vec<Component>, GraphError> {
        let part = self.level_partition()?;
        let n = self.n();
        let mut root = vec![usize::MAX; n];
        let mut cycles: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            if part.level[i] == 0 && i < self.image[i] {
                cycles.push((i, self.image[i]));
            }
        }
        for (c, &(a, b)) in cycles.iter().enumerate() {
            root[a] = c;
            root[b] = c;
        }
        // ascending level order resolves parents first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| part.level[i]);
        for i in order {
            if root[i] == usize::MAX {
                root[i] = root[self.image[i]];
            }
        }
        let mut out: Vec<((usize, usize), Vec<usize>)> = cycles.iter().map(|&c| (c, Vec::new())).collect();
        for i in 0..n {
            out[root[i]].1.push(i);
        }
        Ok(out)
    }
}

impl fmt::Debug for FuncMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FuncMap{:?}", self.to_one_based())
    }
}

/// A 2-cycle `(a0, b0)` and the vertices that reach it.
pub type Component = ((usize, usize), Vec<usize>);

/// `F_0, ..., F_m`: `F_0` is the 2-cycle core and every other vertex sits one level above its image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelPartition {
    pub max_level: usize,
    pub level: Vec<usize>,
}

impl LevelPartition {
    pub fn members(&self, l: usize) -> Vec<usize> {
        (0..self.level.len()).filter(|&i| self.level[i] == l).collect()
    }
}

/// Undirected simple graph on `[n]`, edges stored as `(i, j)` with `i < j`.
#[derive(Clone, PartialEq, Eq)]
pub struct EdgeSet {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// Number of unordered pairs of distinct points in `[n]`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of the pair `{i, j}` in the lexicographic list of pairs of `[n]`.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = canonical(i, j);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)`, `i < j`, in lexicographic order (the order `pair_index` counts in).
pub fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[inline]
pub fn canonical(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl EdgeSet {
    pub fn empty(n: usize) -> Self {
        Self { n, edges: BTreeSet::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize, j: usize) -> bool {
        assert!(i != j && i < self.n && j < self.n, "bad edge ({i}, {j}) for n = {}", self.n);
        self.edges.insert(canonical(i, j))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i != j && self.edges.contains(&canonical(i, j))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet { n: self.n, edges: self.edges.union(&other.edges).copied().collect() }
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet { n: self.n, edges: self.edges.intersection(&other.edges).copied().collect() }
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet { n: self.n, edges: self.edges.difference(&other.edges).copied().collect() }
    }

    pub fn is_superset(&self, other: &EdgeSet) -> bool {
        self.edges.is_superset(&other.edges)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(i, j) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Whether the graph is a forest (union-find over the edges).
    pub fn is_acyclic(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    /// Edges as 1-based pairs.
    pub fn to_one_based(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.to_one_based()).finish()
    }
}

/// A realizability instance: nearest map `f` and farthest map `g` on the same `[n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FuncPair {
    pub f: FuncMap,
    pub g: FuncMap,
}

impl FuncPair {
    pub fn new(f: FuncMap, g: FuncMap) -> Result<Self, GraphError> {
        if f.n() != g.n() {
            return Err(GraphError::SizeMismatch(f.n(), g.n()));
        }
        if let Some(i) = (0..f.n()).find(|&i| f.at(i) == g.at(i)) {
            return Err(GraphError::PointwiseCollision(i + 1));
        }
        Ok(Self { f, g })
    }

    pub fn from_one_based(f: &[usize], g: &[usize]) -> Result<Self, GraphError> {
        Self::new(FuncMap::from_one_based(f)?, FuncMap::from_one_based(g)?)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// The common edge of `H_f` and `H_g` as `(k1, k2)` with `f(k1) = k2`, `g(k2) = k1`.
    ///
    /// More than one common edge means the pair is not nice; all of them are reported.
    pub fn common_edge(&self) -> Result<Option<(usize, usize)>, GraphError> {
        let found: Vec<(usize, usize)> = (0..self.n())
            .filter_map(|u| {
                let v = self.f.at(u);
                (self.g.at(v) == u).then_some((u, v))
            })
            .collect();
        match found.len() {
            0 => Ok(None),
            1 => Ok(Some(found[0])),
            _ => Err(GraphError::MultipleCommonEdges { edges: found.iter().map(|&(a, b)| (a + 1, b + 1)).collect() }),
        }
    }

    /// `H_{f,g}`: `H_f ∪ H_g`, plus every edge at `k1` and at `k2` when the shadows share `k1 k2`.
    pub fn constraint_graph(&self) -> EdgeSet {
        let mut e = self.f.shadow().union(&self.g.shadow());
        let n = self.n();
        for (u, &v) in self.f.images().iter().enumerate() {
            if self.g.at(v) == u {
                for w in 0..n {
                    if w != u {
                        e.insert(u, w);
                    }
                    if w != v {
                        e.insert(v, w);
                    }
                }
            }
        }
        e
    }

    /// `{ i | f(g(i)) = i }`.
    pub fn compose_fixed_points(&self) -> BTreeSet<usize> {
        (0..self.n()).filter(|&i| self.f.at(self.g.at(i)) == i).collect()
    }
}

impl fmt::Debug for FuncPair {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "FuncPair {{ f: {:?}, g: {:?} }}", self.f.to_one_based(), self.g.to_one_based())
    }
}
