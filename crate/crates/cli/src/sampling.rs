//! Demonstration-only Monte-Carlo draws of homodyne outcomes from the
//! tabulated P(q). Nothing load-bearing is stochastic, so there is no seed
//! flag; the stream constant is fixed.

use cubic_core::gate::HomodyneRecord;

const STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64, counter mode.
fn unit_uniform(counter: u64) -> f64 {
    let mut z = STREAM.wrapping_add(counter.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Inverse-CDF draws from the piecewise-linear CDF over the homodyne
/// records. Returns `n` outcomes q.
pub fn sample_outcomes(records: &[HomodyneRecord], n: usize) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(records.len());
    let mut acc = 0.0;
    for r in records {
        acc += r.weight * r.density;
        cdf.push(acc);
    }
    let total = acc.max(1e-300);
    (0..n)
        .map(|i| {
            let u = unit_uniform(i as u64) * total;
            let idx = cdf.partition_point(|&c| c < u).min(records.len() - 1);
            records[idx].q
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_reproducible_and_tracks_the_density() {
        // A discrete triangle density peaked at q = 0.
        let records: Vec<HomodyneRecord> = (-10..=10)
            .map(|i| {
                let q = i as f64 / 2.0;
                HomodyneRecord { q, density: (5.0 - q.abs()).max(0.0), weight: 0.5 }
            })
            .collect();
        let a = sample_outcomes(&records, 2000);
        let b = sample_outcomes(&records, 2000);
        assert_eq!(a, b);
        let mean: f64 = a.iter().sum::<f64>() / a.len() as f64;
        assert!(mean.abs() < 0.2, "mean {mean}");
    }
}
