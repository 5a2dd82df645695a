//! Random instances and the expected-size experiment `E{F_k} = Θ(n)`.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{coupled_triangulation, CoupledComplex, PointCloudPair};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Homogeneous Poisson process of intensity `n` on the unit cube `[0, 1)^d`.
/// `n <= 0` gives the empty set.
pub fn sample_poisson<R: Rng + ?Sized>(n: f64, d: usize, rng: &mut R) -> Vec<Point> {
    if n <= 0.0 || !n.is_finite() {
        return Vec::new();
    }
    let count = Poisson::new(n).expect("positive finite intensity").sample(rng) as usize;
    (0..count).map(|_| Point((0..d).map(|_| rng.random::<f64>()).collect())).collect()
}

/// Independent generator for one `(intensity index, trial)` cell of an experiment.
pub fn trial_rng(seed: u64, n_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n_index as u64) << 32) | trial as u64);
    rng
}

/// Checks that every cell of the triangulation behind `A^co_∞` has an
/// empty circumsphere with margin, which is the part of coupled general
/// position the construction relies on. Linear in the output size times the
/// input size, unlike the exhaustive check.
pub fn certify_general_position(pair: &PointCloudPair, eps: f64) -> Result<()> {
    coupled_triangulation(pair, eps)?.check_empty_circumspheres(eps)
}

/// One trial of the scaling experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRecord {
    pub n: f64,
    pub trial: usize,
    pub seed: u64,
    pub n_x: usize,
    pub n_y: usize,
    /// `F_k` for `k = 0..=d+1`.
    pub counts: Vec<usize>,
    /// Seconds spent building the complex.
    pub wall_time: f64,
}

/// `F̄_k ≈ slope · n` by least squares through the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub dim: usize,
    pub slope: f64,
    /// `‖F̄ - slope·n‖ / ‖F̄‖`; `None` with fewer than two intensities.
    pub relative_residual: Option<f64>,
}

/// `F̄_k(n_to) / F̄_k(n_from)` for consecutive intensities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRatio {
    pub n_from: f64,
    pub n_to: f64,
    /// Per dimension; `None` where `F̄_k(n_from) = 0`.
    pub ratios: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub d: usize,
    pub records: Vec<ScalingRecord>,
    /// `(n, F̄_0..F̄_{d+1})` per intensity.
    pub mean_counts: Vec<(f64, Vec<f64>)>,
    pub fits: Vec<LinearFit>,
    pub ratios: Vec<GrowthRatio>,
}

/// Samples `X` and `Y` independently with intensity `n`, builds `A^co_∞` and
/// counts its simplexes. With `certify`, also runs
/// [`certify_general_position`].
pub fn run_trial(n: f64, d: usize, seed: u64, n_index: usize, trial: usize, eps: f64, certify: bool) -> Result<ScalingRecord> {
    let mut rng = trial_rng(seed, n_index, trial);
    let x = sample_poisson(n, d, &mut rng);
    let y = sample_poisson(n, d, &mut rng);
    let (n_x, n_y) = (x.len(), y.len());
    let start = Instant::now();
    let mut counts = vec![0; d + 2];
    if n_x + n_y > 0 {
        let pair = PointCloudPair::new(x, y)?;
        let tri = coupled_triangulation(&pair, eps)?;
        if certify {
            tri.check_empty_circumspheres(eps)?;
        }
        let complex = CoupledComplex::from_triangulation(&pair, &tri);
        for (k, c) in complex.complex().counts_by_dim().into_iter().enumerate() {
            counts[k] = c;
        }
    }
    Ok(ScalingRecord {
        n,
        trial,
        seed,
        n_x,
        n_y,
        counts,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Runs `trials` trials per intensity in parallel and fits each mean count
/// linearly in `n`.
pub fn scaling_experiment(n_list: &[f64], trials: usize, d: usize, seed: u64, eps: f64, certify: bool) -> Result<ScalingReport> {
    if d == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let cells: Vec<(usize, usize)> = (0..n_list.len()).flat_map(|i| (0..trials).map(move |t| (i, t))).collect();
    let records: Vec<ScalingRecord> = cells
        .par_iter()
        .map(|&(i, t)| run_trial(n_list[i], d, seed, i, t, eps, certify))
        .collect::<Result<_>>()?;

    let mean_counts: Vec<(f64, Vec<f64>)> = n_list
        .iter()
        .map(|&n| {
            let rows: Vec<&ScalingRecord> = records.iter().filter(|r| r.n == n).collect();
            let means = (0..d + 2)
                .map(|k| rows.iter().map(|r| r.counts[k] as f64).sum::<f64>() / rows.len().max(1) as f64)
                .collect();
            (n, means)
        })
        .collect();

    let fits = (0..d + 2)
        .map(|k| {
            let sxx: f64 = mean_counts.iter().map(|(n, _)| n * n).sum();
            let sxy: f64 = mean_counts.iter().map(|(n, f)| n * f[k]).sum();
            let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            let relative_residual = (mean_counts.len() >= 2).then(|| {
                let res: f64 = mean_counts.iter().map(|(n, f)| (f[k] - slope * n).powi(2)).sum();
                let norm: f64 = mean_counts.iter().map(|(_, f)| f[k] * f[k]).sum();
                if norm > 0.0 { (res / norm).sqrt() } else { 0.0 }
            });
            LinearFit { dim: k, slope, relative_residual }
        })
        .collect();

    let ratios = mean_counts
        .windows(2)
        .map(|w| GrowthRatio {
            n_from: w[0].0,
            n_to: w[1].0,
            ratios: w[0].1.iter().zip(&w[1].1).map(|(a, b)| (*a > 0.0).then(|| b / a)).collect(),
        })
        .collect();

    Ok(ScalingReport { d, records, mean_counts, fits, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DEFAULT_EPSILON as EPS;

    #[test]
    fn poisson_counts_have_the_right_mean() {
        let total: usize = (0..1000).map(|t| sample_poisson(100.0, 2, &mut trial_rng(1, 0, t)).len()).sum();
        let mean = total as f64 / 1000.0;
        // Standard error of the mean is 10 / sqrt(1000).
        assert!((mean - 100.0).abs() < 3.0 * 10.0 / 1000f64.sqrt(), "{mean}");
    }

    #[test]
    fn sampling_is_reproducible_and_in_the_cube() {
        let a = sample_poisson(50.0, 3, &mut trial_rng(9, 2, 4));
        let b = sample_poisson(50.0, 3, &mut trial_rng(9, 2, 4));
        assert_eq!(a, b);
        assert_ne!(a, sample_poisson(50.0, 3, &mut trial_rng(9, 2, 5)));
        assert!(a.iter().all(|p| p.dim() == 3 && p.coords().iter().all(|&c| (0.0..1.0).contains(&c))));
        assert!(sample_poisson(0.0, 2, &mut trial_rng(0, 0, 0)).is_empty());
    }

    #[test]
    fn empty_draws_are_counted_as_zero() {
        let record = run_trial(0.0, 2, 3, 0, 0, EPS, true).unwrap();
        assert_eq!(record.counts, vec![0, 0, 0, 0]);
    }

    #[test]
    fn single_intensity_reports_slope_only() {
        let report = scaling_experiment(&[30.0], 2, 2, 11, EPS, true).unwrap();
        assert_eq!(report.records.len(), 2);
        assert!(report.ratios.is_empty());
        assert!(report.fits.iter().all(|f| f.relative_residual.is_none()));
        let (n, means) = &report.mean_counts[0];
        assert!((report.fits[1].slope - means[1] / n).abs() < 1e-12);
    }

    #[test]
    fn counts_vanish_above_d_plus_one_and_follow_euler() {
        let report = scaling_experiment(&[40.0, 80.0], 3, 1, 5, EPS, true).unwrap();
        for r in &report.records {
            assert_eq!(r.counts.len(), 3);
            // The complex is contractible, so its Euler characteristic is 1.
            let chi: i64 = r.counts.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
            assert_eq!(chi, 1, "{r:?}");
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let a = scaling_experiment(&[20.0, 40.0], 3, 2, 42, EPS, false).unwrap();
        let b = scaling_experiment(&[20.0, 40.0], 3, 2, 42, EPS, false).unwrap();
        assert_eq!(a.mean_counts, b.mean_counts);
        assert_eq!(a.records.iter().map(|r| &r.counts).collect::<Vec<_>>(), b.records.iter().map(|r| &r.counts).collect::<Vec<_>>());
    }
}
