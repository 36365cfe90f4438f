use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::pnorm::support;

/// `S₀ = support(x*)` followed by size-`k` blocks of the remaining indices in
/// order of decreasing `|hᵢ|`; the last block holds the remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPartition {
    pub k: usize,
    pub s0: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl SupportPartition {
    /// `S₀` followed by the blocks.
    pub fn all_blocks(&self) -> impl Iterator<Item = &Vec<usize>> {
        std::iter::once(&self.s0).chain(&self.blocks)
    }

    /// Complement of `S₀` in magnitude order.
    pub fn complement(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }
}

pub fn support_partition(x_star: &[f64], h: &[f64], k: usize) -> Result<SupportPartition> {
    if x_star.len() != h.len() {
        return Err(Error::Dimension(format!(
            "x has length {} but h has length {}",
            x_star.len(),
            h.len()
        )));
    }
    let s0 = support(x_star);
    if k == 0 || s0.len() != k {
        return Err(Error::InvalidInput(format!(
            "block size must equal ‖x‖₀ = {} and be positive, got {k}",
            s0.len()
        )));
    }
    let mut rest: Vec<usize> = (0..h.len())
        .filter(|i| s0.binary_search(i).is_err())
        .collect();
    // Stable sort keeps lower indices first among equal magnitudes.
    rest.sort_by(|&i, &j| h[j].abs().total_cmp(&h[i].abs()));
    let blocks = rest.chunks(k).map(<[usize]>::to_vec).collect();
    Ok(SupportPartition { k, s0, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn blocks_follow_magnitudes_with_index_ties() {
        let x = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let h = [0.5, 9.0, -0.5, 2.0, 0.1, -2.0];
        let p = support_partition(&x, &h, 1).unwrap();
        assert_eq!(p.s0, vec![1]);
        assert_eq!(p.blocks, vec![vec![3], vec![5], vec![0], vec![2], vec![4]]);
    }

    #[test]
    fn kernel_inside_support_leaves_zero_blocks() {
        let x = [1.0, -2.0, 0.0, 0.0, 0.0];
        let h = [0.3, 0.4, 0.0, 0.0, 0.0];
        let p = support_partition(&x, &h, 2).unwrap();
        assert_eq!(p.blocks, vec![vec![2, 3], vec![4]]);
        assert!(p.complement().iter().all(|&i| h[i] == 0.0));
    }

    #[test]
    fn wrong_block_size_is_rejected() {
        assert!(support_partition(&[1.0, 0.0], &[0.0, 1.0], 2).is_err());
        assert!(support_partition(&[0.0, 0.0], &[0.0, 1.0], 0).is_err());
    }

    proptest! {
        #[test]
        fn partition_covers_and_orders(
            h in prop::collection::vec(-5.0f64..5.0, 2..16),
            mask in prop::collection::vec(any::<bool>(), 16),
        ) {
            let n = h.len();
            let mut x: Vec<f64> = (0..n).map(|i| if mask[i] { 1.0 } else { 0.0 }).collect();
            if x.iter().all(|v| *v == 0.0) {
                x[0] = 1.0;
            }
            let k = x.iter().filter(|v| **v != 0.0).count();
            let p = support_partition(&x, &h, k).unwrap();
            let mut all: Vec<usize> = p.all_blocks().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            for w in p.blocks.windows(2) {
                let low = w[0].iter().map(|&i| h[i].abs()).fold(f64::INFINITY, f64::min);
                let high = w[1].iter().map(|&i| h[i].abs()).fold(0.0, f64::max);
                prop_assert!(low >= high);
            }
            prop_assert!(p.blocks.iter().all(|b| b.len() <= k && !b.is_empty()));
        }
    }
}
