use super::{dist2, PointCloud};
use rayon::prelude::*;

/// Queries handled together by one task.
const QUERY_BLOCK: usize = 64;
/// Candidate rows streamed per tile; sized so a tile of 30-dimensional
/// points stays within L2.
const CANDIDATE_BLOCK: usize = 512;

/// Squared nearest-neighbour distance of every row by exhaustive tiled scan.
pub(super) fn nearest_all(pc: &PointCloud) -> Vec<f64> {
    let k = pc.len();
    let mut best = vec![f64::INFINITY; k];
    best.par_chunks_mut(QUERY_BLOCK)
        .enumerate()
        .for_each(|(block, out)| {
            let q0 = block * QUERY_BLOCK;
            for c0 in (0..k).step_by(CANDIDATE_BLOCK) {
                let c1 = (c0 + CANDIDATE_BLOCK).min(k);
                for (off, slot) in out.iter_mut().enumerate() {
                    let qi = q0 + off;
                    let q = pc.point(qi);
                    for cj in c0..c1 {
                        if cj == qi {
                            continue;
                        }
                        let d = dist2(q, pc.point(cj));
                        if d < *slot {
                            *slot = d;
                        }
                    }
                }
            }
        });
    best
}
