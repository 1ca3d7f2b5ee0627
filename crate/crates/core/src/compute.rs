//! Compute kernels run during `prepare`: data extent and histogram binning.
//!
//! [`CpuBackend`] is the scalar reference. [`WorkgroupBackend`] runs the same
//! kernels the way a compute shader dispatch would (fixed-size workgroups
//! with local accumulators merged at the end) and must agree with the
//! reference exactly.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComputeError {
    #[error("no finite values to take an extent of")]
    NoExtent,
    #[error("invalid bin range [{lo}, {hi}]: need finite lo < hi")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("bin count must be >= 1")]
    ZeroBins,
}

pub trait ComputeBackend: Send + Sync {
    fn name(&self) -> &str;

    /// `(min, max)` over the finite values. NaN and infinities are ignored;
    /// `-0.0` and `0.0` compare equal and a zero result is reported as `0.0`.
    fn extent(&self, values: &[f64]) -> Result<(f64, f64), ComputeError>;

    /// Counts per bin for `n_bins` equal-width bins over `[lo, hi]`. Bins are
    /// half-open except the last, which includes `hi`. Values outside the
    /// range and NaN are skipped.
    fn bin_counts(&self, values: &[f64], lo: f64, hi: f64, n_bins: usize) -> Result<Vec<u64>, ComputeError>;
}

/// Bin for `v`, or `None` when it falls outside `[lo, hi]` or is NaN.
#[inline]
pub fn bin_index(v: f64, lo: f64, hi: f64, n_bins: usize) -> Option<usize> {
    if !(v >= lo && v <= hi) {
        return None;
    }
    let i = ((v - lo) / (hi - lo) * n_bins as f64).floor() as usize;
    Some(i.min(n_bins - 1))
}

fn check_bins(lo: f64, hi: f64, n_bins: usize) -> Result<(), ComputeError> {
    if n_bins == 0 {
        return Err(ComputeError::ZeroBins);
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ComputeError::InvalidRange { lo, hi });
    }
    Ok(())
}

fn merge_extent(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
        (x, None) | (None, x) => x,
    }
}

fn scan_extent(values: &[f64]) -> Option<(f64, f64)> {
    let mut acc: Option<(f64, f64)> = None;
    for &v in values {
        if v.is_finite() {
            acc = merge_extent(acc, Some((v, v)));
        }
    }
    acc
}

fn finish_extent(acc: Option<(f64, f64)>) -> Result<(f64, f64), ComputeError> {
    // Adding +0.0 folds -0.0 into +0.0 and leaves everything else alone.
    acc.map(|(lo, hi)| (lo + 0.0, hi + 0.0)).ok_or(ComputeError::NoExtent)
}

/// Scalar single-threaded reference implementation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CpuBackend;

impl ComputeBackend for CpuBackend {
    fn name(&self) -> &str {
        "cpu"
    }

    fn extent(&self, values: &[f64]) -> Result<(f64, f64), ComputeError> {
        finish_extent(scan_extent(values))
    }

    fn bin_counts(&self, values: &[f64], lo: f64, hi: f64, n_bins: usize) -> Result<Vec<u64>, ComputeError> {
        check_bins(lo, hi, n_bins)?;
        let mut counts = vec![0u64; n_bins];
        for &v in values {
            if let Some(i) = bin_index(v, lo, hi, n_bins) {
                counts[i] += 1;
            }
        }
        Ok(counts)
    }
}

/// Workgroup-structured implementation: each workgroup of
/// `workgroup_size` elements reduces into local accumulators, which are
/// then merged. Workgroups run in parallel when the `parallel` feature is on.
#[derive(Debug, Clone, Copy)]
pub struct WorkgroupBackend {
    pub workgroup_size: usize,
}

impl Default for WorkgroupBackend {
    fn default() -> Self {
        Self { workgroup_size: 4096 }
    }
}

impl WorkgroupBackend {
    fn group_size(&self) -> usize {
        self.workgroup_size.max(1)
    }
}

impl ComputeBackend for WorkgroupBackend {
    fn name(&self) -> &str {
        "workgroup"
    }

    fn extent(&self, values: &[f64]) -> Result<(f64, f64), ComputeError> {
        #[cfg(feature = "parallel")]
        let acc = values
            .par_chunks(self.group_size())
            .map(scan_extent)
            .reduce(|| None, merge_extent);
        #[cfg(not(feature = "parallel"))]
        let acc = values
            .chunks(self.group_size())
            .map(scan_extent)
            .fold(None, merge_extent);
        finish_extent(acc)
    }

    fn bin_counts(&self, values: &[f64], lo: f64, hi: f64, n_bins: usize) -> Result<Vec<u64>, ComputeError> {
        check_bins(lo, hi, n_bins)?;
        let local = |group: &[f64]| {
            let mut counts = vec![0u64; n_bins];
            for &v in group {
                if let Some(i) = bin_index(v, lo, hi, n_bins) {
                    counts[i] += 1;
                }
            }
            counts
        };
        let merge = |mut a: Vec<u64>, b: Vec<u64>| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        };
        #[cfg(feature = "parallel")]
        let counts = values
            .par_chunks(self.group_size())
            .map(local)
            .reduce(|| vec![0u64; n_bins], merge);
        #[cfg(not(feature = "parallel"))]
        let counts = values
            .chunks(self.group_size())
            .map(local)
            .fold(vec![0u64; n_bins], merge);
        Ok(counts)
    }
}

/// `n_bins + 1` equally spaced edges from `lo` to `hi`.
pub fn bin_edges(lo: f64, hi: f64, n_bins: usize) -> Vec<f64> {
    (0..=n_bins)
        .map(|i| {
            if i == n_bins {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n_bins as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn backends() -> Vec<Box<dyn ComputeBackend>> {
        vec![
            Box::new(CpuBackend),
            Box::new(WorkgroupBackend { workgroup_size: 3 }),
            Box::new(WorkgroupBackend::default()),
        ]
    }

    #[test]
    fn extent_examples() {
        for b in backends() {
            assert_eq!(b.extent(&[3.0, 1.0, 2.0]), Ok((1.0, 3.0)));
            assert_eq!(b.extent(&[7.0]), Ok((7.0, 7.0)));
            assert_eq!(b.extent(&[f64::NAN, 2.0, f64::NAN]), Ok((2.0, 2.0)));
            assert_eq!(b.extent(&[]), Err(ComputeError::NoExtent));
            assert_eq!(b.extent(&[f64::NAN]), Err(ComputeError::NoExtent));
            let (lo, hi) = b.extent(&[-0.0, -0.0]).unwrap();
            assert!(lo.is_sign_positive() && hi.is_sign_positive());
        }
    }

    #[test]
    fn bin_count_examples() {
        for b in backends() {
            assert_eq!(b.bin_counts(&[1.0, 2.0, 3.0, 4.0], 1.0, 4.0, 3), Ok(vec![1, 1, 2]));
            assert_eq!(b.bin_counts(&[], 0.0, 1.0, 4), Ok(vec![0; 4]));
            assert_eq!(b.bin_counts(&[1.0], 0.0, 1.0, 5), Ok(vec![0, 0, 0, 0, 1]));
            assert_eq!(
                b.bin_counts(&[-1.0, 2.0, f64::NAN, f64::INFINITY], 0.0, 1.0, 2),
                Ok(vec![0, 0])
            );
            assert_eq!(
                b.bin_counts(&[1.0], 1.0, 1.0, 2),
                Err(ComputeError::InvalidRange { lo: 1.0, hi: 1.0 })
            );
            assert_eq!(b.bin_counts(&[1.0], 0.0, 1.0, 0), Err(ComputeError::ZeroBins));
        }
    }

    #[test]
    fn edges_hit_both_ends() {
        assert_eq!(bin_edges(0.0, 1.0, 4), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    fn values_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(
            prop_oneof![
                8 => -100.0f64..100.0,
                1 => Just(f64::NAN),
                1 => Just(0.0f64),
            ],
            0..2000,
        )
    }

    proptest! {
        #[test]
        fn backends_agree(values in values_strategy(), n in 1usize..70, wg in 1usize..300) {
            let cpu = CpuBackend;
            let wgb = WorkgroupBackend { workgroup_size: wg };
            let e1 = cpu.extent(&values);
            let e2 = wgb.extent(&values);
            match (e1, e2) {
                (Ok((a0, a1)), Ok((b0, b1))) => {
                    prop_assert_eq!(a0.to_bits(), b0.to_bits());
                    prop_assert_eq!(a1.to_bits(), b1.to_bits());
                }
                (a, b) => prop_assert_eq!(a, b),
            }
            prop_assert_eq!(cpu.bin_counts(&values, -50.0, 50.0, n), wgb.bin_counts(&values, -50.0, 50.0, n));
        }

        #[test]
        fn counts_conserve_in_range_values(values in values_strategy(), n in 1usize..70) {
            let counts = CpuBackend.bin_counts(&values, -50.0, 50.0, n).unwrap();
            let expected = values.iter().filter(|v| **v >= -50.0 && **v <= 50.0).count() as u64;
            prop_assert_eq!(counts.iter().sum::<u64>(), expected);
        }

        #[test]
        fn permutation_invariant(mut values in values_strategy(), seed in any::<u64>()) {
            let before = (CpuBackend.extent(&values), CpuBackend.bin_counts(&values, -10.0, 10.0, 16));
            // Deterministic Fisher-Yates driven by a tiny LCG.
            let mut s = seed | 1;
            for i in (1..values.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                values.swap(i, (s >> 33) as usize % (i + 1));
            }
            let after = (CpuBackend.extent(&values), CpuBackend.bin_counts(&values, -10.0, 10.0, 16));
            prop_assert_eq!(before, after);
        }
    }
}
