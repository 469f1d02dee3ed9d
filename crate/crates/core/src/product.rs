//! Cartesian products of trees: indexing, the summed colouring, wrapping,
//! and the closed-form bounds on `χ(G²)`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::spancol::{colour_tree_square, Colour, SpanError, TreeSquareColouring};
use crate::tree::{parse_trees, trees_to_text, ParseError, Tree};

/// Products with at most this many vertices get a dense colour array.
pub const DEFAULT_MATERIALIZE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("a product needs at least one tree")]
    Empty,
    #[error("product of dimensions {0:?} overflows the index type")]
    Overflow(Vec<usize>),
    #[error("index {index:?} out of range for dimensions {dims:?}")]
    OutOfRange { index: Vec<usize>, dims: Vec<usize> },
    #[error("edge ({u}, {v}) of tree {dimension} has span {span}, exceeding the bound {bound}")]
    SpanBoundViolated {
        dimension: usize,
        u: usize,
        v: usize,
        span: u64,
        bound: u64,
    },
    #[error("tree colouring {0} does not belong to the instance")]
    Mismatch(usize),
    #[error(transparent)]
    Span(#[from] SpanError),
}

/// `T_1 □ ... □ T_d`, with vertices addressed by little-endian mixed-radix
/// flat indices (dimension 1 varies fastest).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductInstance {
    trees: Vec<Tree>,
    dims: Vec<usize>,
    total: usize,
}

impl ProductInstance {
    pub fn new(trees: Vec<Tree>) -> Result<Self, ProductError> {
        if trees.is_empty() {
            return Err(ProductError::Empty);
        }
        let dims: Vec<usize> = trees.iter().map(Tree::n).collect();
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| ProductError::Overflow(dims.clone()))?;
        Ok(ProductInstance { trees, dims, total })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn tree(&self, i: usize) -> &Tree {
        &self.trees[i]
    }

    /// Number of factors `d`.
    pub fn dimension(&self) -> usize {
        self.trees.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `Π n_i`.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn max_degrees(&self) -> Vec<usize> {
        self.trees.iter().map(Tree::max_degree).collect()
    }

    /// Flat-index step for each dimension.
    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    pub fn encode(&self, coords: &[usize]) -> Result<usize, ProductError> {
        mixed_radix_encode(coords, &self.dims)
    }

    pub fn decode(&self, flat: usize) -> Result<Vec<usize>, ProductError> {
        mixed_radix_decode(flat, &self.dims)
    }

    /// Parses blank-line-separated tree blocks; block order is dimension
    /// order.
    pub fn parse(text: &str) -> Result<Self, InstanceParseError> {
        let trees = parse_trees(text)?;
        Ok(ProductInstance::new(trees)?)
    }

    pub fn to_text(&self) -> String {
        trees_to_text(&self.trees)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    let mut acc = 1usize;
    for &n in dims {
        out.push(acc);
        acc = acc.saturating_mul(n);
    }
    out
}

pub fn mixed_radix_encode(coords: &[usize], dims: &[usize]) -> Result<usize, ProductError> {
    let out_of_range = || ProductError::OutOfRange {
        index: coords.to_vec(),
        dims: dims.to_vec(),
    };
    if coords.len() != dims.len() {
        return Err(out_of_range());
    }
    let mut flat = 0usize;
    let mut stride = 1usize;
    for (&c, &n) in coords.iter().zip(dims) {
        if c >= n {
            return Err(out_of_range());
        }
        flat = c
            .checked_mul(stride)
            .and_then(|x| x.checked_add(flat))
            .ok_or_else(out_of_range)?;
        stride = stride.saturating_mul(n);
    }
    Ok(flat)
}

pub fn mixed_radix_decode(flat: usize, dims: &[usize]) -> Result<Vec<usize>, ProductError> {
    let total = dims.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
    if total.is_some_and(|t| flat >= t) || dims.contains(&0) {
        return Err(ProductError::OutOfRange {
            index: vec![flat],
            dims: dims.to_vec(),
        });
    }
    let mut rest = flat;
    Ok(dims
        .iter()
        .map(|&n| {
            let c = rest % n;
            rest /= n;
            c
        })
        .collect())
}

/// Window bases `s_i = Σ_{j<i} ⌈Δ_j/2⌉`.
pub fn span_offsets(instance: &ProductInstance) -> Vec<u64> {
    instance
        .trees()
        .iter()
        .scan(0u64, |acc, t| {
            let s = *acc;
            *acc += (t.max_degree() as u64).div_ceil(2);
            Some(s)
        })
        .collect()
}

/// `S = Σ ⌈Δ_i/2⌉`, the largest span any product edge can have.
pub fn total_span_bound(instance: &ProductInstance) -> u64 {
    instance
        .trees()
        .iter()
        .map(|t| (t.max_degree() as u64).div_ceil(2))
        .sum()
}

/// Integer colouring of a product, either as raw coordinate sums or wrapped
/// into `[0, 2S]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductColouring {
    instance: ProductInstance,
    per_tree: Vec<TreeSquareColouring>,
    span_bound: u64,
    wrapped: bool,
    dense: Option<Vec<Colour>>,
}

impl ProductColouring {
    /// Sums arbitrary per-tree colourings. `span_bound` is the `S` that
    /// [`wrap`] will reduce modulo `2S + 1`.
    pub fn from_tree_colourings(
        instance: &ProductInstance,
        per_tree: Vec<TreeSquareColouring>,
        span_bound: u64,
        materialize_cap: usize,
    ) -> Result<Self, ProductError> {
        if per_tree.len() != instance.dimension() {
            return Err(ProductError::Mismatch(
                per_tree.len().min(instance.dimension()),
            ));
        }
        if let Some(i) = (0..per_tree.len()).find(|&i| per_tree[i].tree() != instance.tree(i)) {
            return Err(ProductError::Mismatch(i));
        }
        let mut pc = ProductColouring {
            instance: instance.clone(),
            per_tree,
            span_bound,
            wrapped: false,
            dense: None,
        };
        if instance.total() <= materialize_cap {
            pc.dense = Some(pc.compute_all());
        }
        Ok(pc)
    }

    pub fn instance(&self) -> &ProductInstance {
        &self.instance
    }

    pub fn per_tree(&self) -> &[TreeSquareColouring] {
        &self.per_tree
    }

    /// `S`.
    pub fn span_bound(&self) -> u64 {
        self.span_bound
    }

    /// `2S + 1`.
    pub fn modulus(&self) -> Colour {
        2 * self.span_bound as Colour + 1
    }

    pub fn is_wrapped(&self) -> bool {
        self.wrapped
    }

    pub fn is_materialized(&self) -> bool {
        self.dense.is_some()
    }

    /// Colour of the vertex with flat index `flat`.
    pub fn colour(&self, flat: usize) -> Colour {
        if let Some(dense) = &self.dense {
            return dense[flat];
        }
        let mut rest = flat;
        let mut sum = 0;
        for (c, &n) in self.per_tree.iter().zip(self.instance.dims()) {
            sum += c.colour(rest % n);
            rest /= n;
        }
        self.finish(sum)
    }

    pub fn colour_at(&self, coords: &[usize]) -> Result<Colour, ProductError> {
        Ok(self.colour(self.instance.encode(coords)?))
    }

    /// Dense colours when materialized.
    pub fn colours(&self) -> Option<&[Colour]> {
        self.dense.as_deref()
    }

    /// All colours in flat-index order, materializing if needed.
    pub fn to_vec(&self) -> Vec<Colour> {
        match &self.dense {
            Some(d) => d.clone(),
            None => self.compute_all(),
        }
    }

    /// Number of distinct colour values.
    pub fn distinct_colours(&self) -> usize {
        if self.wrapped {
            let mut seen = vec![false; self.modulus() as usize];
            self.for_each_colour(|c| seen[c as usize] = true);
            seen.into_iter().filter(|&b| b).count()
        } else {
            let mut seen = BTreeSet::new();
            self.for_each_colour(|c| {
                seen.insert(c);
            });
            seen.len()
        }
    }

    fn finish(&self, raw: Colour) -> Colour {
        if self.wrapped {
            raw.rem_euclid(self.modulus())
        } else {
            raw
        }
    }

    fn for_each_colour(&self, f: impl FnMut(Colour)) {
        match &self.dense {
            Some(d) => d.iter().copied().for_each(f),
            None => self.sweep(f),
        }
    }

    fn compute_all(&self) -> Vec<Colour> {
        let mut out = Vec::with_capacity(self.instance.total());
        self.sweep(|c| out.push(c));
        out
    }

    /// Odometer over all vertices in flat order, keeping a running sum.
    fn sweep(&self, mut f: impl FnMut(Colour)) {
        let dims = self.instance.dims();
        let d = dims.len();
        let mut coords = vec![0usize; d];
        let mut sum: Colour = self.per_tree.iter().map(|c| c.colour(0)).sum();
        for _ in 0..self.instance.total() {
            f(self.finish(sum));
            for i in 0..d {
                let c = &self.per_tree[i];
                sum -= c.colour(coords[i]);
                coords[i] += 1;
                if coords[i] < dims[i] {
                    sum += c.colour(coords[i]);
                    break;
                }
                coords[i] = 0;
                sum += c.colour(0);
            }
        }
    }
}

impl fmt::Display for ProductColouring {
    /// One line per vertex in flat order: `v_1,...,v_d<TAB>colour`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims = self.instance.dims();
        let mut coords = vec![0usize; dims.len()];
        let mut flat = 0usize;
        let mut emit = |coords: &[usize], colour: Colour| -> fmt::Result {
            for (i, c) in coords.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            writeln!(f, "\t{colour}")
        };
        for _ in 0..self.instance.total() {
            emit(&coords, self.colour(flat))?;
            flat += 1;
            for i in 0..dims.len() {
                coords[i] += 1;
                if coords[i] < dims[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
        Ok(())
    }
}

/// Sums the per-tree span-window colourings, tree `i` using window base
/// `s_i` from [`span_offsets`].
pub fn colour_product(instance: &ProductInstance) -> Result<ProductColouring, ProductError> {
    colour_product_with_cap(instance, DEFAULT_MATERIALIZE_CAP)
}

pub fn colour_product_with_cap(
    instance: &ProductInstance,
    materialize_cap: usize,
) -> Result<ProductColouring, ProductError> {
    let per_tree = instance
        .trees()
        .iter()
        .zip(span_offsets(instance))
        .map(|(t, s)| colour_tree_square(t, s))
        .collect::<Result<Vec<_>, _>>()?;
    ProductColouring::from_tree_colourings(
        instance,
        per_tree,
        total_span_bound(instance),
        materialize_cap,
    )
}

/// Reduces every colour modulo `2S + 1` into `[0, 2S]`.
///
/// Fails if some product edge has span above `S`; in that case two vertices
/// at distance 2 could land on the same residue.
pub fn wrap(pc: &ProductColouring) -> Result<ProductColouring, ProductError> {
    // A product edge in dimension i has the span of the matching edge of T_i.
    for (i, c) in pc.per_tree.iter().enumerate() {
        for &(u, v) in c.tree().edges() {
            let span = c.span(u, v);
            if span > pc.span_bound {
                return Err(ProductError::SpanBoundViolated {
                    dimension: i,
                    u,
                    v,
                    span,
                    bound: pc.span_bound,
                });
            }
        }
    }
    let mut out = pc.clone();
    out.wrapped = true;
    if let Some(dense) = &mut out.dense {
        let m = pc.modulus();
        dense.iter_mut().for_each(|c| *c = c.rem_euclid(m));
    }
    Ok(out)
}

/// Closed-form bounds on `χ(G²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bounds {
    /// `1 + ΣΔ_i`.
    pub lower: u64,
    /// `1 + 2Σ⌈Δ_i/2⌉`.
    pub upper: u64,
    /// `1 + 2Σ(Δ_i − 1)`, the earlier bound; only defined when every
    /// `Δ_i >= 2`.
    pub jmv: Option<u64>,
}

pub fn bounds_from_degrees(degrees: &[usize]) -> Bounds {
    let degrees: Vec<u64> = degrees.iter().map(|&d| d as u64).collect();
    let lower = 1 + degrees.iter().sum::<u64>();
    let upper = 1 + 2 * degrees.iter().map(|d| d.div_ceil(2)).sum::<u64>();
    let jmv = degrees
        .iter()
        .all(|&d| d >= 2)
        .then(|| 1 + 2 * degrees.iter().map(|d| d - 1).sum::<u64>());
    Bounds { lower, upper, jmv }
}

pub fn bounds(instance: &ProductInstance) -> Bounds {
    bounds_from_degrees(&instance.max_degrees())
}
