use super::{dist2, PointCloud};
use rayon::prelude::*;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Median-split k-d tree over a point cloud, for exact self-excluding
/// nearest-neighbour queries.
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    /// Original row index of each stored point.
    index: Vec<usize>,
    /// Coordinates in tree order.
    coords: Vec<f64>,
    nodes: Vec<Node>,
    source: Vec<f64>,
}

impl KdTree {
    pub fn build(pc: &PointCloud) -> Self {
        let dim = pc.dim();
        let mut index: Vec<usize> = (0..pc.len()).collect();
        let mut nodes = Vec::new();
        build_node(pc, &mut index, 0, pc.len(), &mut nodes);
        let mut coords = Vec::with_capacity(pc.coords().len());
        for &i in &index {
            coords.extend_from_slice(pc.point(i));
        }
        Self {
            dim,
            index,
            coords,
            nodes,
            source: pc.coords().to_vec(),
        }
    }

    /// Squared distance from row `i` to its nearest other row.
    pub fn nearest_to_row(&self, i: usize) -> f64 {
        let q = &self.source[i * self.dim..(i + 1) * self.dim];
        let mut best = f64::INFINITY;
        self.search(0, q, i, &mut best);
        best
    }

    /// Squared nearest-neighbour distance for every row, in row order.
    pub fn nearest_all(&self) -> Vec<f64> {
        (0..self.index.len())
            .into_par_iter()
            .map(|i| self.nearest_to_row(i))
            .collect()
    }

    fn search(&self, node: usize, q: &[f64], skip: usize, best: &mut f64) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    if self.index[slot] == skip {
                        continue;
                    }
                    let p = &self.coords[slot * self.dim..(slot + 1) * self.dim];
                    let d = dist2(q, p);
                    if d < *best {
                        *best = d;
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, skip, best);
                if diff * diff < *best {
                    self.search(far, q, skip, best);
                }
            }
        }
    }
}

fn build_node(
    pc: &PointCloud,
    index: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let id = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return id;
    }
    let dim = widest_dim(pc, &index[start..end]);
    let mid = start + (end - start) / 2;
    index[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        pc.point(a)[dim].total_cmp(&pc.point(b)[dim])
    });
    let value = pc.point(index[mid])[dim];
    nodes.push(Node::Leaf { start, end }); // placeholder until children exist
    let left = build_node(pc, index, start, mid, nodes);
    let right = build_node(pc, index, mid, end, nodes);
    nodes[id] = Node::Split {
        dim,
        value,
        left,
        right,
    };
    id
}

fn widest_dim(pc: &PointCloud, rows: &[usize]) -> usize {
    let m = pc.dim();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for &r in rows {
        for (j, &c) in pc.point(r).iter().enumerate() {
            lo[j] = lo[j].min(c);
            hi[j] = hi[j].max(c);
        }
    }
    (0..m)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0)
}
