//! Colourings of a tree's square whose edge spans stay inside a window.
//!
//! For a base `s` and maximum degree `Δ`, every tree edge gets a span in
//! `[s + 1, s + ⌈Δ/2⌉]`. The offset set `X` of signed spans has
//! `2⌈Δ/2⌉ >= Δ` elements, so a vertex can always hand each of its children
//! an offset that differs from every other offset already used around it.

use thiserror::Error;

use crate::tree::Tree;

pub type Colour = i64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("maximum degree must be at least 1, got {0}")]
    InvalidDelta(usize),
    #[error("no free offset left at vertex {vertex}; the window is too narrow")]
    OffsetExhausted { vertex: usize },
}

/// The window `[lo, hi] = [s + 1, s + ⌈Δ/2⌉]` and its signed offsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanWindow {
    base: u64,
    half_delta: u64,
    offsets: Vec<Colour>,
}

impl SpanWindow {
    pub fn base(&self) -> u64 {
        self.base
    }

    /// `⌈Δ/2⌉`.
    pub fn half_delta(&self) -> u64 {
        self.half_delta
    }

    pub fn lo(&self) -> u64 {
        self.base + 1
    }

    pub fn hi(&self) -> u64 {
        self.base + self.half_delta
    }

    /// Ordered `lo, -lo, lo+1, -(lo+1), ..., hi, -hi`.
    pub fn offsets(&self) -> &[Colour] {
        &self.offsets
    }

    pub fn contains_span(&self, span: u64) -> bool {
        (self.lo()..=self.hi()).contains(&span)
    }
}

pub fn make_window(s: u64, delta: usize) -> Result<SpanWindow, SpanError> {
    if delta < 1 {
        return Err(SpanError::InvalidDelta(delta));
    }
    let half_delta = (delta as u64).div_ceil(2);
    let offsets = (s + 1..=s + half_delta)
        .flat_map(|x| [x as Colour, -(x as Colour)])
        .collect();
    Ok(SpanWindow {
        base: s,
        half_delta,
        offsets,
    })
}

/// A colouring of one tree's square, rooted at `root` with colour 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeSquareColouring {
    tree: Tree,
    window: SpanWindow,
    colours: Vec<Colour>,
    root: usize,
}

impl TreeSquareColouring {
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn window(&self) -> &SpanWindow {
        &self.window
    }

    pub fn colour(&self, v: usize) -> Colour {
        self.colours[v]
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// `|c(u) - c(v)|` for the tree edge `uv`.
    pub fn span(&self, u: usize, v: usize) -> u64 {
        self.colours[u].abs_diff(self.colours[v])
    }
}

/// Colours `t²` so that every edge of `t` has span in
/// `[s + 1, s + ⌈Δ(t)/2⌉]`.
///
/// Root at vertex 0 with colour 0, then sweep breadth-first: each vertex
/// gives its children (ascending index) the first offsets of the window, in
/// canonical order, not already taken by its parent edge.
pub fn colour_tree_square(t: &Tree, s: u64) -> Result<TreeSquareColouring, SpanError> {
    let window = make_window(s, t.max_degree())?;
    let root = 0;
    let (order, parent) = t.bfs(root);
    let mut colours = vec![0 as Colour; t.n()];

    for &w in &order {
        // offset from w to its parent; always an element of the window
        let back = parent[w].map(|p| colours[p] - colours[w]);
        let mut free = window
            .offsets()
            .iter()
            .copied()
            .filter(|&x| Some(x) != back);
        for &child in t.neighbours(w) {
            if Some(child) == parent[w] {
                continue;
            }
            let x = free
                .next()
                .ok_or(SpanError::OffsetExhausted { vertex: w })?;
            colours[child] = colours[w] + x;
        }
    }

    Ok(TreeSquareColouring {
        tree: t.clone(),
        window,
        colours,
        root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{generate, tree_from_edges, GenerateParams, TreeKind};

    #[test]
    fn window_examples() {
        let w = make_window(0, 1).unwrap();
        assert_eq!((w.lo(), w.hi()), (1, 1));
        assert_eq!(w.offsets(), &[1, -1]);

        let w = make_window(0, 3).unwrap();
        assert_eq!((w.lo(), w.hi()), (1, 2));
        assert_eq!(w.offsets(), &[1, -1, 2, -2]);

        let w = make_window(2, 4).unwrap();
        assert_eq!((w.lo(), w.hi()), (3, 4));
        assert_eq!(w.offsets(), &[3, -3, 4, -4]);

        assert_eq!(make_window(0, 0), Err(SpanError::InvalidDelta(0)));
    }

    #[test]
    fn window_offsets_are_symmetric_and_large_enough() {
        for s in 0..6 {
            for delta in 1..12 {
                let w = make_window(s, delta).unwrap();
                let x = w.offsets();
                assert_eq!(x.len() as u64, 2 * w.half_delta());
                assert!(x.len() >= delta);
                assert!(!x.contains(&0));
                assert!(x.iter().all(|v| x.contains(&-v)));
            }
        }
    }

    #[test]
    fn single_edge_golden() {
        let t = tree_from_edges(&[(0, 1)]).unwrap();
        let c = colour_tree_square(&t, 0).unwrap();
        assert_eq!(c.colours(), &[0, 1]);
        assert_eq!(c.span(0, 1), 1);
    }

    #[test]
    fn star_golden() {
        let t = tree_from_edges(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        let c = colour_tree_square(&t, 0).unwrap();
        assert_eq!(c.colours(), &[0, 1, -1, 2]);
    }

    #[test]
    fn path_golden_with_base_one() {
        let t = generate(TreeKind::Path, GenerateParams::sized(4)).unwrap();
        let c = colour_tree_square(&t, 1).unwrap();
        assert_eq!(c.colours(), &[0, 2, 4, 6]);
        assert!(t.edges().iter().all(|&(u, v)| c.span(u, v) == 2));
    }

    #[test]
    fn deterministic() {
        let t = generate(TreeKind::Random, GenerateParams::seeded(30, 7)).unwrap();
        assert_eq!(colour_tree_square(&t, 3), colour_tree_square(&t, 3));
    }

    #[test]
    fn incident_offsets_distinct_and_bounded() {
        for seed in 0..50 {
            let t = generate(TreeKind::Random, GenerateParams::seeded(25, seed)).unwrap();
            for s in [0, 1, 4] {
                let c = colour_tree_square(&t, s).unwrap();
                assert_eq!(c.colour(c.root()), 0);
                let w = c.window();
                for v in 0..t.n() {
                    let mut used: Vec<Colour> = t
                        .neighbours(v)
                        .iter()
                        .map(|&u| c.colour(u) - c.colour(v))
                        .collect();
                    assert!(used.iter().all(|x| w.offsets().contains(x)));
                    used.sort_unstable();
                    used.dedup();
                    assert_eq!(used.len(), t.degree(v));
                }
                let bound = (w.hi() * t.eccentricity(0) as u64) as Colour;
                assert!(c.colours().iter().all(|x| x.abs() <= bound));
            }
        }
    }
}
