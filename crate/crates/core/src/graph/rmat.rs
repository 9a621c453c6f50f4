use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EdgeList, GraphError, VertexId, MAX_VERTICES};

/// Quadrant probabilities for recursive-matrix sampling. `a` is the top-left
/// quadrant (both ids keep a 0 bit), `b` top-right, `c` bottom-left and `d`
/// bottom-right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmatParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for RmatParams {
    /// Graph500 Kronecker initiator.
    fn default() -> Self {
        RmatParams {
            a: 0.57,
            b: 0.19,
            c: 0.19,
            d: 0.05,
        }
    }
}

impl RmatParams {
    fn validate(&self) -> Result<(), GraphError> {
        let probs = [self.a, self.b, self.c, self.d];
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(GraphError::InvalidRmat(format!("negative or non-finite probability in {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GraphError::InvalidRmat(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// R-MAT edge list with the Graph500 initiator. See [`generate_rmat_with`].
pub fn generate_rmat(scale: u32, edge_factor: usize, seed: u64) -> Result<EdgeList, GraphError> {
    generate_rmat_with(scale, edge_factor, seed, RmatParams::default())
}

/// Samples `edge_factor * 2^scale` directed edges over `2^scale` vertices.
///
/// Each edge descends `scale` levels of the adjacency matrix, choosing one of
/// the four quadrants at each level; the level-`k` choice fixes bit
/// `scale - 1 - k` of the source and destination ids. The output is a pure
/// function of the arguments and may contain self-edges and duplicates.
pub fn generate_rmat_with(
    scale: u32,
    edge_factor: usize,
    seed: u64,
    params: RmatParams,
) -> Result<EdgeList, GraphError> {
    if scale == 0 || edge_factor == 0 {
        return Err(GraphError::InvalidRmat("scale and edge_factor must be >= 1".into()));
    }
    if scale >= 64 || (1u64 << scale) > MAX_VERTICES {
        return Err(GraphError::ScaleTooLarge(scale));
    }
    params.validate()?;

    let num_vertices = 1usize << scale;
    let num_edges = edge_factor
        .checked_mul(num_vertices)
        .ok_or(GraphError::ScaleTooLarge(scale))?;

    let ab = params.a + params.b;
    let abc = ab + params.c;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(num_edges);
    for _ in 0..num_edges {
        let mut src: VertexId = 0;
        let mut dst: VertexId = 0;
        for bit in (0..scale).rev() {
            let r: f64 = rng.random();
            let (s, d) = if r < params.a {
                (0, 0)
            } else if r < ab {
                (0, 1)
            } else if r < abc {
                (1, 0)
            } else {
                (1, 1)
            };
            src |= s << bit;
            dst |= d << bit;
        }
        edges.push((src, dst));
    }
    Ok(EdgeList { edges, num_vertices })
}
