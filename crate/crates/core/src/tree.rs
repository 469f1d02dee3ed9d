//! Trees on dense vertex indices, their text format, and instance generators.
//!
//! Every tree has at least one edge. Vertices are `0..n` and neighbour lists
//! are kept in ascending order so that everything built on top of a [`Tree`]
//! is deterministic.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("edge ({0}, {1}) closes a cycle")]
    CycleDetected(usize, usize),
    #[error("vertex {0} is not connected to vertex 0")]
    Disconnected(usize),
    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("a tree needs at least two vertices")]
    TooSmall,
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected `u v`, found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("block starting at line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: TreeError,
    },
    #[error("no edges found")]
    Empty,
}

/// An undirected tree on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Tree {
    /// Validates an edge list and builds the adjacency structure.
    ///
    /// The vertex set is `0..=max index`. Edges are stored as `(min, max)`
    /// pairs sorted lexicographically.
    pub fn from_edges(edge_list: &[(usize, usize)]) -> Result<Self, TreeError> {
        let n = match edge_list.iter().map(|&(u, v)| u.max(v)).max() {
            Some(m) => m + 1,
            None => return Err(TreeError::TooSmall),
        };
        if n < 2 {
            // only possible edge is (0, 0)
            return Err(TreeError::SelfLoop(0));
        }

        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            if u == v {
                return Err(TreeError::SelfLoop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        let mut sorted = edges.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(TreeError::DuplicateEdge(w[0].0, w[0].1));
        }

        let mut components = DisjointSets::new(n);
        for &(u, v) in &edges {
            if !components.union(u, v) {
                return Err(TreeError::CycleDetected(u, v));
            }
        }
        if let Some(v) = (1..n).find(|&v| components.find(v) != components.find(0)) {
            return Err(TreeError::Disconnected(v));
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &sorted {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        Ok(Tree {
            n,
            edges: sorted,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Largest vertex degree, always at least 1.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Lowest-index vertex attaining the maximum degree.
    pub fn max_degree_vertex(&self) -> usize {
        let delta = self.max_degree();
        (0..self.n).find(|&v| self.degree(v) == delta).unwrap_or(0)
    }

    /// Breadth-first order from `root` together with each vertex's parent.
    pub fn bfs(&self, root: usize) -> (Vec<usize>, Vec<Option<usize>>) {
        let mut order = Vec::with_capacity(self.n);
        let mut parent = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        (order, parent)
    }

    /// Largest edge distance from `root`.
    pub fn eccentricity(&self, root: usize) -> usize {
        let (order, parent) = self.bfs(root);
        let mut depth = vec![0usize; self.n];
        for &v in &order {
            if let Some(p) = parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Serializes in the edge-list text format: one `u v` line per edge,
    /// `u < v`, sorted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false when `u` and `v` were already joined.
    fn union(&mut self, u: usize, v: usize) -> bool {
        let (a, b) = (self.find(u), self.find(v));
        if a == b {
            return false;
        }
        self.parent[a.max(b)] = a.min(b);
        true
    }
}

pub fn tree_from_edges(edge_list: &[(usize, usize)]) -> Result<Tree, TreeError> {
    Tree::from_edges(edge_list)
}

pub fn max_degree(t: &Tree) -> usize {
    t.max_degree()
}

/// Parses blank-line-separated blocks of `u v` lines into trees.
///
/// Lines starting with `#` are comments. A block holding only comments is
/// skipped.
pub fn parse_trees(text: &str) -> Result<Vec<Tree>, ParseError> {
    let mut trees = Vec::new();
    let mut block: Vec<(usize, usize)> = Vec::new();
    let mut block_start = 0;

    let mut flush = |block: &mut Vec<(usize, usize)>, start: usize| -> Result<(), ParseError> {
        if !block.is_empty() {
            let tree = Tree::from_edges(block).map_err(|source| ParseError::Invalid {
                line: start,
                source,
            })?;
            trees.push(tree);
            block.clear();
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut block, block_start)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let malformed = || ParseError::Malformed {
            line: line_no,
            text: raw.to_string(),
        };
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed());
        };
        let u = parse_index(a).ok_or_else(malformed)?;
        let v = parse_index(b).ok_or_else(malformed)?;
        if block.is_empty() {
            block_start = line_no;
        }
        block.push((u, v));
    }
    flush(&mut block, block_start)?;

    if trees.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(trees)
}

fn parse_index(s: &str) -> Option<usize> {
    if s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok()
    } else {
        None
    }
}

/// Parses text that must contain exactly one tree.
pub fn parse_tree(text: &str) -> Result<Tree, ParseError> {
    let mut trees = parse_trees(text)?;
    if trees.len() > 1 {
        let second = text
            .lines()
            .position(|l| l.trim().is_empty())
            .map_or(0, |i| i + 1);
        return Err(ParseError::Malformed {
            line: second,
            text: "more than one tree block".into(),
        });
    }
    Ok(trees.remove(0))
}

/// Writes several trees as blank-line-separated blocks.
pub fn trees_to_text(trees: &[Tree]) -> String {
    trees
        .iter()
        .map(Tree::to_text)
        .collect::<Vec<_>>()
        .join("\n")
}

// ---------------------------------------------------------------------------
// Prüfer sequences

/// Decodes a Prüfer sequence over `0..n` into the labelled tree it encodes.
/// `n = seq.len() + 2`.
pub fn prufer_decode(seq: &[usize]) -> Result<Tree, TreeError> {
    let n = seq.len() + 2;
    if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
        return Err(TreeError::InvalidParams(format!(
            "Prüfer entry {bad} out of range for {n} vertices"
        )));
    }
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    // linear-time decoding: `leaf` tracks the smallest current leaf
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = (0..n).find(|&v| degree[v] == 1).unwrap_or(0);
    let mut leaf = ptr;
    for &x in seq {
        edges.push((leaf, x));
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
    edges.push((leaf, n - 1));
    Tree::from_edges(&edges)
}

/// Encodes a tree as its Prüfer sequence (length `n - 2`).
pub fn prufer_encode(t: &Tree) -> Vec<usize> {
    let n = t.n();
    let mut degree: Vec<usize> = (0..n).map(|v| t.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut seq = Vec::with_capacity(n.saturating_sub(2));
    let mut ptr = (0..n).find(|&v| degree[v] == 1).unwrap_or(0);
    let mut leaf = ptr;
    for _ in 0..n.saturating_sub(2) {
        removed[leaf] = true;
        let next = t
            .neighbours(leaf)
            .iter()
            .copied()
            .find(|&w| !removed[w])
            .expect("leaf has a live neighbour");
        seq.push(next);
        degree[next] -= 1;
        if degree[next] == 1 && next < ptr {
            leaf = next;
        } else {
            ptr += 1;
            while degree[ptr] != 1 || removed[ptr] {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    seq
}

/// Relabels vertices in breadth-first order from vertex 0 (neighbours taken
/// in ascending order), so vertex 0 stays the root and parents precede
/// children.
pub fn relabel_bfs(t: &Tree) -> Tree {
    let (order, _) = t.bfs(0);
    let mut label = vec![0usize; t.n()];
    for (new, &old) in order.iter().enumerate() {
        label[old] = new;
    }
    let edges: Vec<_> = t
        .edges()
        .iter()
        .map(|&(u, v)| (label[u], label[v]))
        .collect();
    Tree::from_edges(&edges).expect("relabelling preserves tree structure")
}

// ---------------------------------------------------------------------------
// Generators

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    Path,
    Star,
    /// A spine path with `legs` pendant leaves hanging off every spine vertex.
    Caterpillar,
    /// Uniform over labelled trees on `size` vertices.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateParams {
    /// Vertex count, or spine length for caterpillars.
    pub size: usize,
    pub legs: usize,
    pub seed: Option<u64>,
}

impl GenerateParams {
    pub fn sized(size: usize) -> Self {
        GenerateParams {
            size,
            legs: 1,
            seed: None,
        }
    }

    pub fn seeded(size: usize, seed: u64) -> Self {
        GenerateParams {
            size,
            legs: 1,
            seed: Some(seed),
        }
    }
}

pub fn generate(kind: TreeKind, params: GenerateParams) -> Result<Tree, TreeError> {
    let n = params.size;
    let too_small = || TreeError::InvalidParams(format!("size must be at least 2, got {n}"));
    match kind {
        TreeKind::Path => {
            if n < 2 {
                return Err(too_small());
            }
            let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            Tree::from_edges(&edges)
        }
        TreeKind::Star => {
            if n < 2 {
                return Err(too_small());
            }
            let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
            Tree::from_edges(&edges)
        }
        TreeKind::Caterpillar => {
            let total = n.checked_mul(params.legs + 1).unwrap_or(0);
            if n < 1 || total < 2 {
                return Err(TreeError::InvalidParams(format!(
                    "caterpillar with spine {n} and {} legs has fewer than 2 vertices",
                    params.legs
                )));
            }
            let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            let mut next = n;
            for spine in 0..n {
                for _ in 0..params.legs {
                    edges.push((spine, next));
                    next += 1;
                }
            }
            Tree::from_edges(&edges)
        }
        TreeKind::Random => {
            if n < 2 {
                return Err(too_small());
            }
            let seed = params
                .seed
                .ok_or_else(|| TreeError::InvalidParams("random trees need a seed".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(random_tree(n, &mut rng))
        }
    }
}

/// Draws a uniformly random labelled tree on `n >= 2` vertices and relabels
/// it in breadth-first order.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tree {
    assert!(n >= 2, "random_tree needs n >= 2");
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let t = prufer_decode(&seq).expect("sequence entries are in range");
    relabel_bfs(&t)
}
