//! Distance-2 colourings of cartesian products of trees.
//!
//! [`spancol`] colours a single tree's square with every edge span inside a
//! prescribed window. [`product`] sums those colourings over a product of
//! trees, using disjoint windows per factor, and wraps the result into
//! `1 + 2Σ⌈Δ_i/2⌉` colours. [`verify`] rebuilds everything explicitly and
//! checks it, including an exact chromatic number search for small inputs.

pub mod product;
pub mod spancol;
pub mod tree;
pub mod verify;

pub use product::{
    bounds, colour_product, wrap, Bounds, ProductColouring, ProductError, ProductInstance,
};
pub use spancol::{colour_tree_square, make_window, Colour, SpanWindow, TreeSquareColouring};
pub use tree::{generate, tree_from_edges, GenerateParams, Tree, TreeError, TreeKind};
