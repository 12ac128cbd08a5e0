//! Reference data sets.

use alloc::vec;

use crate::censoring::CensoredSample;

/// Survival of 112 plasma cell myeloma patients, inspected at monthly
/// boundaries with progressive withdrawals.
pub fn plasma_cell_myeloma() -> CensoredSample {
    CensoredSample::new(
        vec![5.5, 10.5, 15.5, 20.5, 25.5, 30.5, 40.5, 50.5, 60.5],
        vec![18, 16, 18, 10, 11, 8, 13, 4, 1],
        vec![1, 1, 3, 0, 0, 1, 2, 3, 2],
        112,
    )
    .expect("built-in data set is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_add_up() {
        let s = plasma_cell_myeloma();
        assert_eq!(s.total_failures(), 99);
        assert_eq!(s.withdrawals().iter().sum::<u64>(), 13);
        assert_eq!(s.len(), 9);
    }
}
