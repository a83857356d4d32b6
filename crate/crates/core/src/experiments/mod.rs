//! Benchmark problem generators and the benchmark runner.

pub mod bench;
pub mod partconn;
pub mod unitsquare;

pub use bench::{run_bench, summarize, write_csv, write_summary_json, BenchClass, BenchConfig, BenchRecord, SelectorSummary};
pub use partconn::{gen_partconn, PartConnConfig};
pub use unitsquare::{segment_hits_box, Aabb, UnitSquare, UnitSquareConfig};

/// A 64-bit seed for sub-stream `stream` of `seed` (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Radical inverse of `index` in `base`: element `index` of the Halton
/// sequence for that base.
pub fn halton(index: u64, base: u64) -> f64 {
    assert!(base >= 2, "Halton base must be at least 2");
    let mut result = 0.0;
    let mut scale = 1.0 / base as f64;
    let mut i = index;
    while i > 0 {
        result += (i % base) as f64 * scale;
        i /= base;
        scale /= base as f64;
    }
    result
}

/// Sample mean and standard error (sample standard deviation over
/// `sqrt(n)`). The standard error is 0 for fewer than two values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_values() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(halton(2, 2), 0.25);
        assert!((halton(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn stats_match_textbook_values() {
        let (m, se) = mean_stderr(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        // Sample variance 32/7.
        assert!((se - (32.0f64 / 7.0 / 8.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stderr(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
