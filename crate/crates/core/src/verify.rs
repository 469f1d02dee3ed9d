//! Independent checks for the product colouring: explicit product and square
//! graphs, properness and span checks, the clique lower-bound certificate,
//! and an exact chromatic number search.
//!
//! Nothing here calls into the colouring construction. Span windows are
//! recomputed from the trees' degrees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::product::ProductInstance;
use crate::spancol::Colour;
use crate::tree::Tree;

/// Largest explicit graph [`build_product_graph`] and [`square`] will build.
pub const DEFAULT_EXPLICIT_CAP: usize = 50_000;
/// Largest graph [`chi_exact`] will search by default.
pub const DEFAULT_EXACT_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("{n} vertices exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("no colour given for vertex {0}")]
    MissingColour(usize),
}

/// A simple undirected graph with sorted, duplicate-free neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExplicitGraph {
    adjacency: Vec<Vec<usize>>,
}

impl ExplicitGraph {
    /// Builds from an edge list on `0..n`, symmetrizing and dropping loops
    /// and duplicates.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        Self::normalized(adjacency)
    }

    pub fn from_tree(t: &Tree) -> Self {
        Self::from_edges(t.n(), t.edges())
    }

    fn normalized(mut adjacency: Vec<Vec<usize>>) -> Self {
        for row in &mut adjacency {
            row.sort_unstable();
            row.dedup();
        }
        ExplicitGraph { adjacency }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Subgraph induced on `vertices`, relabelled `0..len` in the given
    /// order.
    pub fn induced(&self, vertices: &[usize]) -> ExplicitGraph {
        let mut label = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            label[v] = i;
        }
        let adjacency = vertices
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter_map(|&w| (label[w] != usize::MAX).then_some(label[w]))
                    .collect()
            })
            .collect();
        Self::normalized(adjacency)
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..]
                .iter()
                .all(|&v| u != v && self.has_edge(u, v))
        })
    }
}

fn check_cap(n: usize, cap: usize) -> Result<(), VerifyError> {
    if n > cap {
        Err(VerifyError::TooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// Materializes `T_1 □ ... □ T_d` over little-endian flat indices.
pub fn build_product_graph(
    instance: &ProductInstance,
    cap: usize,
) -> Result<ExplicitGraph, VerifyError> {
    let total = instance.total();
    check_cap(total, cap)?;
    let dims = instance.dims();
    let mut stride = 1usize;
    let mut adjacency = vec![Vec::new(); total];
    for (i, t) in instance.trees().iter().enumerate() {
        for (v, row) in adjacency.iter_mut().enumerate() {
            let coord = (v / stride) % dims[i];
            let base = v - coord * stride;
            row.extend(t.neighbours(coord).iter().map(|&w| base + w * stride));
        }
        stride *= dims[i];
    }
    Ok(ExplicitGraph::normalized(adjacency))
}

/// The square: `u ~ v` when they are adjacent or share a neighbour.
pub fn square(g: &ExplicitGraph, cap: usize) -> Result<ExplicitGraph, VerifyError> {
    check_cap(g.n(), cap)?;
    let adjacency = (0..g.n())
        .map(|v| {
            let mut row: Vec<usize> = g.neighbours(v).to_vec();
            for &w in g.neighbours(v) {
                row.extend(g.neighbours(w).iter().copied().filter(|&x| x != v));
            }
            row
        })
        .collect();
    Ok(ExplicitGraph::normalized(adjacency))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProperCheck {
    Ok,
    /// Lexicographically first monochromatic edge.
    Conflict {
        u: usize,
        v: usize,
        colour: Colour,
    },
}

impl ProperCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, ProperCheck::Ok)
    }
}

pub fn check_proper(g: &ExplicitGraph, colours: &[Colour]) -> Result<ProperCheck, VerifyError> {
    if colours.len() < g.n() {
        return Err(VerifyError::MissingColour(colours.len()));
    }
    Ok(g.edges()
        .find(|&(u, v)| colours[u] == colours[v])
        .map_or(ProperCheck::Ok, |(u, v)| ProperCheck::Conflict {
            u,
            v,
            colour: colours[u],
        }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanCheck {
    Ok,
    /// Lexicographically first product edge whose span misses its window.
    OutOfWindow {
        u: usize,
        v: usize,
        dimension: usize,
        span: u64,
        window: (u64, u64),
    },
}

impl SpanCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, SpanCheck::Ok)
    }
}

/// Span windows `[s_i + 1, s_i + ⌈Δ_i/2⌉]`, one per factor.
pub fn expected_windows(instance: &ProductInstance) -> Vec<(u64, u64)> {
    let mut base = 0u64;
    instance
        .trees()
        .iter()
        .map(|t| {
            let half = (t.max_degree() as u64).div_ceil(2);
            let w = (base + 1, base + half);
            base += half;
            w
        })
        .collect()
}

/// Checks every product edge of dimension `i` has span inside window `i`.
/// `colours` are the unwrapped colours in flat-index order.
pub fn check_spans(
    instance: &ProductInstance,
    colours: &[Colour],
) -> Result<SpanCheck, VerifyError> {
    let total = instance.total();
    if colours.len() < total {
        return Err(VerifyError::MissingColour(colours.len()));
    }
    let windows = expected_windows(instance);
    let dims = instance.dims();
    let strides = instance.strides();
    let mut forward: Vec<(usize, usize)> = Vec::new();
    for u in 0..total {
        forward.clear();
        for (i, t) in instance.trees().iter().enumerate() {
            let coord = (u / strides[i]) % dims[i];
            for &w in t.neighbours(coord).iter().filter(|&&w| w > coord) {
                forward.push((u + (w - coord) * strides[i], i));
            }
        }
        forward.sort_unstable();
        for &(v, i) in &forward {
            let span = colours[u].abs_diff(colours[v]);
            let (lo, hi) = windows[i];
            if span < lo || span > hi {
                return Ok(SpanCheck::OutOfWindow {
                    u,
                    v,
                    dimension: i,
                    span,
                    window: (lo, hi),
                });
            }
        }
    }
    Ok(SpanCheck::Ok)
}

/// A product vertex of maximum degree and its closed neighbourhood in `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueCertificate {
    pub vertex: usize,
    pub coords: Vec<usize>,
    /// The vertex followed by its neighbours in `G`, ascending.
    pub members: Vec<usize>,
}

impl CliqueCertificate {
    /// `1 + ΣΔ_i`.
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Whether the members are pairwise adjacent in `square`.
    pub fn verify_in(&self, square: &ExplicitGraph) -> bool {
        self.members.iter().all(|&v| v < square.n()) && square.is_clique(&self.members)
    }
}

pub fn clique_certificate(instance: &ProductInstance) -> CliqueCertificate {
    let coords: Vec<usize> = instance
        .trees()
        .iter()
        .map(Tree::max_degree_vertex)
        .collect();
    let strides = instance.strides();
    let vertex: usize = coords.iter().zip(&strides).map(|(c, s)| c * s).sum();
    let mut members = vec![vertex];
    for (i, t) in instance.trees().iter().enumerate() {
        let base = vertex - coords[i] * strides[i];
        members.extend(
            t.neighbours(coords[i])
                .iter()
                .map(|&w| base + w * strides[i]),
        );
    }
    members[1..].sort_unstable();
    CliqueCertificate {
        vertex,
        coords,
        members,
    }
}

/// Builds the explicit square and checks the certificate against it.
pub fn clique_certificate_checked(
    instance: &ProductInstance,
    cap: usize,
) -> Result<(CliqueCertificate, bool), VerifyError> {
    let cert = clique_certificate(instance);
    let sq = square(&build_product_graph(instance, cap)?, cap)?;
    let ok = cert.verify_in(&sq);
    Ok((cert, ok))
}

/// Exact chromatic number by branch and bound.
pub fn chi_exact(g: &ExplicitGraph, limit: usize) -> Result<usize, VerifyError> {
    chi_exact_seeded(g, limit, &[])
}

/// [`chi_exact`] with a candidate clique to start the lower bound from. The
/// hint is only used after confirming it is a clique of `g`.
pub fn chi_exact_seeded(
    g: &ExplicitGraph,
    limit: usize,
    clique_hint: &[usize],
) -> Result<usize, VerifyError> {
    check_cap(g.n(), limit)?;
    if g.n() == 0 {
        return Ok(0);
    }
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));

    let mut clique = greedy_clique(g, &order);
    let mut hint: Vec<usize> = clique_hint.to_vec();
    hint.sort_unstable();
    hint.dedup();
    if hint.len() > clique.len() && hint.iter().all(|&v| v < g.n()) && g.is_clique(&hint) {
        clique = hint;
    }

    let lower = clique.len();
    let mut upper = dsatur_greedy(g, &order);
    // Colourings found here are only witnesses for the upper bound; every k
    // below it is still decided by the exhaustive search.
    while upper > lower && tabu_colour(g, upper - 1, TABU_ITERATIONS, TABU_SEED).is_some() {
        upper -= 1;
    }
    for k in lower..upper {
        if ColourSearch::new(g, &order, k).run(&clique) {
            return Ok(k);
        }
    }
    Ok(upper)
}

const TABU_ITERATIONS: usize = 200_000;
const TABU_SEED: u64 = 0x5eed;

/// Tabu search for a proper `k`-colouring. Returns the colouring when one
/// is found within `iterations` moves.
pub fn tabu_colour(
    g: &ExplicitGraph,
    k: usize,
    iterations: usize,
    seed: u64,
) -> Option<Vec<usize>> {
    let n = g.n();
    if n == 0 {
        return Some(Vec::new());
    }
    if k == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colour: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    // conflicts[v * k + c]: neighbours of v coloured c
    let mut conflicts = vec![0i64; n * k];
    for v in 0..n {
        for &w in g.neighbours(v) {
            conflicts[v * k + colour[w]] += 1;
        }
    }
    let mut total: i64 = (0..n).map(|v| conflicts[v * k + colour[v]]).sum::<i64>() / 2;
    let mut best_total = total;
    let mut tabu_until = vec![0usize; n * k];

    for it in 0..iterations {
        if total == 0 {
            return Some(colour);
        }
        let mut best: Option<(i64, usize, usize)> = None;
        let mut ties = 0u32;
        for v in 0..n {
            let current = colour[v];
            let here = conflicts[v * k + current];
            if here == 0 {
                continue;
            }
            for c in (0..k).filter(|&c| c != current) {
                let delta = conflicts[v * k + c] - here;
                // aspiration: a tabu move is allowed if it beats the best seen
                if tabu_until[v * k + c] > it && total + delta >= best_total {
                    continue;
                }
                match best {
                    Some((d, _, _)) if delta > d => {}
                    Some((d, _, _)) if delta == d => {
                        ties += 1;
                        if rng.gen_range(0..ties) == 0 {
                            best = Some((delta, v, c));
                        }
                    }
                    _ => {
                        best = Some((delta, v, c));
                        ties = 1;
                    }
                }
            }
        }
        let Some((delta, v, c)) = best else {
            continue;
        };
        let old = colour[v];
        colour[v] = c;
        for &w in g.neighbours(v) {
            conflicts[w * k + old] -= 1;
            conflicts[w * k + c] += 1;
        }
        total += delta;
        best_total = best_total.min(total);
        let tenure = 10 + rng.gen_range(0..10) + 6 * total as usize / 10;
        tabu_until[v * k + old] = it + tenure;
    }
    (total == 0).then_some(colour)
}

/// Whether `g` has a proper colouring with `k` colours.
pub fn is_k_colourable(g: &ExplicitGraph, k: usize) -> bool {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let clique = greedy_clique(g, &order);
    ColourSearch::new(g, &order, k).run(&clique)
}

fn greedy_clique(g: &ExplicitGraph, order: &[usize]) -> Vec<usize> {
    let mut clique: Vec<usize> = Vec::new();
    for &v in order {
        if clique.iter().all(|&u| g.has_edge(u, v)) {
            clique.push(v);
        }
    }
    clique
}

/// Colour count of a greedy DSATUR colouring.
fn dsatur_greedy(g: &ExplicitGraph, order: &[usize]) -> usize {
    let n = g.n();
    let mut rank = vec![0usize; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut colour = vec![usize::MAX; n];
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut saturation = vec![0usize; n];
    let mut used = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colour[v] == usize::MAX)
            .max_by_key(|&v| (saturation[v], std::cmp::Reverse(rank[v])))
            .expect("an uncoloured vertex remains");
        let c = (0..)
            .find(|&c| !seen[v].get(c).copied().unwrap_or(false))
            .unwrap();
        colour[v] = c;
        used = used.max(c + 1);
        for &w in g.neighbours(v) {
            let row = &mut seen[w];
            if row.len() <= c {
                row.resize(c + 1, false);
            }
            if !row[c] {
                row[c] = true;
                saturation[w] += 1;
            }
        }
    }
    used
}

/// Backtracking `k`-colourability test.
///
/// Branches on the uncoloured vertex with the most distinct neighbour
/// colours, breaking ties by the static degree order. A vertex may only
/// open colour `used` (the next unused colour), never a later one, which
/// removes colour permutations. The seed clique is precoloured `0..q`.
struct ColourSearch<'a> {
    g: &'a ExplicitGraph,
    k: usize,
    rank: Vec<usize>,
    colour: Vec<usize>,
    /// `counts[v * k + c]`: neighbours of `v` currently coloured `c`.
    counts: Vec<u32>,
    saturation: Vec<usize>,
    uncoloured: usize,
}

const NONE: usize = usize::MAX;

impl<'a> ColourSearch<'a> {
    fn new(g: &'a ExplicitGraph, order: &[usize], k: usize) -> Self {
        let n = g.n();
        let mut rank = vec![0usize; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        ColourSearch {
            g,
            k,
            rank,
            colour: vec![NONE; n],
            counts: vec![0; n * k],
            saturation: vec![0; n],
            uncoloured: n,
        }
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.colour[v] = c;
        self.uncoloured -= 1;
        for &w in self.g.neighbours(v) {
            let slot = &mut self.counts[w * self.k + c];
            if *slot == 0 {
                self.saturation[w] += 1;
            }
            *slot += 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colour[v];
        self.colour[v] = NONE;
        self.uncoloured += 1;
        for &w in self.g.neighbours(v) {
            let slot = &mut self.counts[w * self.k + c];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[w] -= 1;
            }
        }
    }

    fn run(mut self, clique: &[usize]) -> bool {
        if clique.len() > self.k {
            return false;
        }
        for (c, &v) in clique.iter().enumerate() {
            self.assign(v, c);
        }
        self.search(clique.len())
    }

    fn pick(&self) -> usize {
        let mut best = NONE;
        for v in 0..self.g.n() {
            if self.colour[v] != NONE {
                continue;
            }
            if best == NONE
                || (self.saturation[v], std::cmp::Reverse(self.rank[v]))
                    > (self.saturation[best], std::cmp::Reverse(self.rank[best]))
            {
                best = v;
            }
        }
        best
    }

    fn search(&mut self, used: usize) -> bool {
        if self.uncoloured == 0 {
            return true;
        }
        let v = self.pick();
        if self.saturation[v] >= self.k {
            return false;
        }
        let top = (used + 1).min(self.k);
        for c in 0..top {
            if self.counts[v * self.k + c] != 0 {
                continue;
            }
            self.assign(v, c);
            let found = self.search(used.max(c + 1));
            self.unassign(v);
            if found {
                return true;
            }
        }
        false
    }
}
