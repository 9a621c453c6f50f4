use std::ops::Range;

use super::{Graph, GraphError, VertexId};

/// Contiguous vertex-id ranges, one per compute node.
///
/// Part `g` owns `boundaries[g]..boundaries[g + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    boundaries: Vec<VertexId>,
}

impl Partition {
    /// Wraps explicit boundaries. They must start at 0 and be non-decreasing.
    pub fn from_boundaries(boundaries: Vec<VertexId>) -> Option<Partition> {
        let valid = boundaries.len() >= 2
            && boundaries[0] == 0
            && boundaries.windows(2).all(|w| w[0] <= w[1]);
        valid.then_some(Partition { boundaries })
    }

    pub fn num_parts(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        *self.boundaries.last().unwrap() as usize
    }

    pub fn boundaries(&self) -> &[VertexId] {
        &self.boundaries
    }

    pub fn range(&self, part: usize) -> Range<VertexId> {
        self.boundaries[part]..self.boundaries[part + 1]
    }

    /// Part that owns `v`. Empty parts never own anything, so the search
    /// picks the last part whose start is `<= v`.
    pub fn owner(&self, v: VertexId) -> usize {
        debug_assert!((v as usize) < self.num_vertices());
        self.boundaries.partition_point(|&b| b <= v) - 1
    }

    pub fn owned_edges(&self, g: &Graph, part: usize) -> usize {
        g.edges_in(self.range(part))
    }
}

/// Splits `g` into `num_parts` contiguous ranges with near-equal directed
/// edge counts.
///
/// Boundary `p + 1` is the first vertex whose prefix edge count reaches
/// `round(|E| * (p + 1) / num_parts)`; the last boundary is always `|V|` so
/// trailing isolated vertices land in the last part. Each part therefore owns
/// at most `ceil(|E| / num_parts) + max_degree` edges.
pub fn partition_1d(g: &Graph, num_parts: usize) -> Result<Partition, GraphError> {
    let n = g.num_vertices();
    if num_parts == 0 || (n > 0 && num_parts > n) {
        return Err(GraphError::InvalidPartCount {
            num_parts,
            num_vertices: n,
        });
    }
    let offsets = g.offsets();
    let total = g.num_edges() as u128;

    let mut boundaries = Vec::with_capacity(num_parts + 1);
    boundaries.push(0 as VertexId);
    let mut v = 0usize;
    for part in 0..num_parts - 1 {
        let numerator = total * (part as u128 + 1);
        let parts = num_parts as u128;
        // Round half up.
        let target = ((2 * numerator + parts) / (2 * parts)) as usize;
        while v < n && offsets[v] < target {
            v += 1;
        }
        boundaries.push(v as VertexId);
    }
    boundaries.push(n as VertexId);
    Ok(Partition { boundaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_rmat, synthetic, EdgeList};

    #[test]
    fn single_part_is_identity() {
        let g = synthetic::path(7);
        assert_eq!(partition_1d(&g, 1).unwrap().boundaries(), &[0, 7]);
    }

    #[test]
    fn path_splits_evenly() {
        let g = synthetic::path(4);
        assert_eq!(g.num_edges(), 6);
        let p = partition_1d(&g, 2).unwrap();
        assert_eq!(p.boundaries(), &[0, 2, 4]);
        assert_eq!(p.owned_edges(&g, 0), 3);
        assert_eq!(p.owned_edges(&g, 1), 3);
    }

    #[test]
    fn empty_graph() {
        let g = Graph::from_edge_list(&EdgeList::default());
        assert_eq!(partition_1d(&g, 3).unwrap().boundaries(), &[0, 0, 0, 0]);
    }

    #[test]
    fn rejects_bad_part_counts() {
        let g = synthetic::path(3);
        assert!(partition_1d(&g, 0).is_err());
        assert!(partition_1d(&g, 4).is_err());
    }

    #[test]
    fn rmat_edge_balance() {
        let g = Graph::from_edge_list(&generate_rmat(12, 8, 5).unwrap());
        let p = partition_1d(&g, 8).unwrap();
        let bound = g.num_edges().div_ceil(8) + g.max_degree();
        let mut total = 0;
        for part in 0..8 {
            let e = p.owned_edges(&g, part);
            assert!(e <= bound, "part {part}: {e} > {bound}");
            total += e;
        }
        assert_eq!(total, g.num_edges());
    }

    #[test]
    fn owner_lookup_skips_empty_parts() {
        let p = Partition::from_boundaries(vec![0, 2, 2, 5]).unwrap();
        assert_eq!(p.owner(0), 0);
        assert_eq!(p.owner(1), 0);
        assert_eq!(p.owner(2), 2);
        assert_eq!(p.owner(4), 2);
    }

    proptest::proptest! {
        #[test]
        fn parts_cover_and_balance(
            edges in proptest::collection::vec((0u32..80, 0u32..80), 0..400),
            parts in 1usize..12,
        ) {
            let g = Graph::from_edge_list(&EdgeList::new(edges, 80));
            let p = partition_1d(&g, parts).unwrap();
            proptest::prop_assert_eq!(p.num_parts(), parts);
            proptest::prop_assert_eq!(p.boundaries()[0], 0);
            proptest::prop_assert_eq!(p.num_vertices(), 80);
            let bound = g.num_edges().div_ceil(parts) + g.max_degree();
            let mut total = 0;
            for part in 0..parts {
                let r = p.range(part);
                proptest::prop_assert!(r.start <= r.end);
                for v in r.clone() {
                    proptest::prop_assert_eq!(p.owner(v), part);
                }
                let e = p.owned_edges(&g, part);
                proptest::prop_assert!(e <= bound);
                total += e;
            }
            proptest::prop_assert_eq!(total, g.num_edges());
        }
    }
}
