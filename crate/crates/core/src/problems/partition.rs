use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matkit::CsrMatrix;

/// Non-overlapping owner sets plus overlapping read sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    nparts: usize,
    owner: Vec<usize>,
    owned: Vec<Vec<usize>>,
    overlap: Vec<Vec<usize>>,
}

impl Partition {
    /// Owner sets from `owner`, each extended by `layers` breadth-first
    /// layers in the graph of `adjacency`.
    pub fn new(owner: Vec<usize>, nparts: usize, adjacency: &CsrMatrix, layers: usize) -> Result<Self> {
        let n = owner.len();
        if adjacency.rows() != n || adjacency.cols() != n {
            return Err(Error::DimensionMismatch(format!("owner map of {n} nodes with a {}x{} graph", adjacency.rows(), adjacency.cols())));
        }
        let mut owned = vec![Vec::new(); nparts];
        for (i, &p) in owner.iter().enumerate() {
            if p >= nparts {
                return Err(Error::InvalidPartition(format!("node {i} assigned to part {p} of {nparts}")));
            }
            owned[p].push(i);
        }
        if let Some(p) = owned.iter().position(Vec::is_empty) {
            return Err(Error::InvalidPartition(format!("part {p} owns no nodes")));
        }
        let overlap = owned.iter().map(|set| extend(set, adjacency, layers, n)).collect();
        Ok(Self { nparts, owner, owned, overlap })
    }

    /// One part owning every node.
    pub fn single(n: usize) -> Self {
        let all: Vec<usize> = (0..n).collect();
        Self { nparts: 1, owner: vec![0; n], owned: vec![all.clone()], overlap: vec![all] }
    }

    pub fn n(&self) -> usize {
        self.owner.len()
    }

    pub fn nparts(&self) -> usize {
        self.nparts
    }

    /// Owning part of every node.
    pub fn owner(&self) -> &[usize] {
        &self.owner
    }

    /// Sorted nodes owned by part `i`.
    pub fn owned(&self, i: usize) -> &[usize] {
        &self.owned[i]
    }

    /// Sorted nodes read by part `i`.
    pub fn overlap(&self, i: usize) -> &[usize] {
        &self.overlap[i]
    }
}

fn extend(set: &[usize], adjacency: &CsrMatrix, layers: usize, n: usize) -> Vec<usize> {
    let mut depth = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &i in set {
        depth[i] = 0;
        queue.push_back(i);
    }
    while let Some(i) = queue.pop_front() {
        if depth[i] == layers {
            continue;
        }
        for &j in adjacency.row(i).0 {
            if depth[j] == usize::MAX {
                depth[j] = depth[i] + 1;
                queue.push_back(j);
            }
        }
    }
    (0..n).filter(|&i| depth[i] != usize::MAX).collect()
}

/// Tile counts (px along x, py along y) for the supported part counts.
pub fn tile_shape(nparts: usize) -> Result<(usize, usize)> {
    match nparts {
        16 => Ok((4, 4)),
        32 => Ok((8, 4)),
        64 => Ok((8, 8)),
        128 => Ok((16, 8)),
        _ => Err(Error::UnsupportedPartCount(nparts)),
    }
}

/// Splits 0..len into `parts` contiguous ranges whose lengths differ by at most one.
fn split(len: usize, parts: usize) -> Vec<(usize, usize)> {
    (0..parts).map(|k| (k * len / parts, (k + 1) * len / parts)).collect()
}

/// Rectangular tiles of the `grid`×`grid` node lattice, overlapped by two
/// breadth-first layers over the 5-point stencil graph.
pub fn tile_partition(grid: usize, nparts: usize) -> Result<Partition> {
    let (px, py) = tile_shape(nparts)?;
    if px > grid || py > grid {
        return Err(Error::InvalidPartition(format!("{px}x{py} tiles on a {grid}x{grid} grid")));
    }
    let xs = split(grid, px);
    let ys = split(grid, py);
    let n = grid * grid;
    let mut owner = vec![0; n];
    for (ty, &(y0, y1)) in ys.iter().enumerate() {
        for (tx, &(x0, x1)) in xs.iter().enumerate() {
            for j in y0..y1 {
                for i in x0..x1 {
                    owner[j * grid + i] = ty * px + tx;
                }
            }
        }
    }
    Partition::new(owner, nparts, &stencil_graph(grid), 2)
}

/// Adjacency of the 5-point stencil on the node lattice.
pub fn stencil_graph(grid: usize) -> CsrMatrix {
    let mut t = Vec::with_capacity(5 * grid * grid);
    for j in 0..grid {
        for i in 0..grid {
            let k = j * grid + i;
            t.push((k, k, 1.0));
            if i > 0 {
                t.push((k, k - 1, 1.0));
            }
            if i + 1 < grid {
                t.push((k, k + 1, 1.0));
            }
            if j > 0 {
                t.push((k, k - grid, 1.0));
            }
            if j + 1 < grid {
                t.push((k, k + grid, 1.0));
            }
        }
    }
    CsrMatrix::from_triplets(grid * grid, grid * grid, &t).expect("valid stencil")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_tiles() {
        let p = tile_partition(101, 16).unwrap();
        assert_eq!(p.nparts(), 16);
        let sizes: Vec<usize> = (0..16).map(|i| p.owned(i).len()).collect();
        let (lo, hi) = (*sizes.iter().min().unwrap(), *sizes.iter().max().unwrap());
        assert!(hi - lo <= 101);
        assert_eq!(sizes.iter().sum::<usize>(), 10201);
        let mut seen = vec![false; 10201];
        for i in 0..16 {
            for &k in p.owned(i) {
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(p.owner()[k], i);
            }
            assert!(p.owned(i).iter().all(|k| p.overlap(i).binary_search(k).is_ok()));
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn interior_tile_overlap_geometry() {
        let p = tile_partition(101, 16).unwrap();
        // tile (1,1): x in 25..50, y in 25..50 → 25×25
        let t = 4 + 1;
        assert_eq!(p.owned(t).len(), 25 * 25);
        // two stencil layers: (w+4)(h+4) minus the three cells each corner
        // cannot reach within Manhattan distance 2
        assert_eq!(p.overlap(t).len(), 29 * 29 - 12);
        // corner tile touches two boundaries
        assert_eq!(p.overlap(0).len(), 27 * 27 - 3);
    }

    #[test]
    fn supported_counts() {
        for (np, shape) in [(16, (4, 4)), (32, (8, 4)), (64, (8, 8)), (128, (16, 8))] {
            assert_eq!(tile_shape(np).unwrap(), shape);
            let p = tile_partition(101, np).unwrap();
            assert_eq!((0..np).map(|i| p.owned(i).len()).sum::<usize>(), 10201);
        }
        assert_eq!(tile_partition(101, 20), Err(Error::UnsupportedPartCount(20)));
    }

    #[test]
    fn bad_owner_maps() {
        let g = stencil_graph(2);
        assert!(Partition::new(vec![0, 0, 0, 3], 2, &g, 1).is_err());
        assert!(Partition::new(vec![0, 0, 0, 0], 2, &g, 1).is_err());
        assert!(Partition::new(vec![0, 0, 1], 2, &g, 1).is_err());
    }
}
