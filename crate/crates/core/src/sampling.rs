//! Sensor deployment and the ordered, location-free sample view.
//!
//! [`DeploymentDraw`] is the simulator's ground truth and carries the hidden
//! locations. [`SampleSet`] is what the estimator receives: field values in
//! increasing order of location, with the locations themselves dropped.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{dimension, FourierCoefficients};

/// `n` i.i.d. Uniform[0, 1] sensor locations, in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentDraw {
    locations: Vec<f64>,
    seed: Option<u64>,
}

impl DeploymentDraw {
    /// Wraps explicit locations. Simulation and test use only; the estimator
    /// never sees a draw.
    pub fn from_locations(locations: Vec<f64>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::EmptyDeployment);
        }
        if let Some(&bad) = locations.iter().find(|u| !(0.0..=1.0).contains(*u)) {
            return Err(Error::InvalidArgument(format!("location {bad} outside [0, 1]")));
        }
        Ok(DeploymentDraw {
            locations,
            seed: None,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    #[inline]
    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    #[inline]
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Locations in ascending order.
    pub fn sorted_locations(&self) -> Vec<f64> {
        let mut sorted = self.locations.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        sorted
    }

    /// The order statistics `U_{r:n}` at one-based `ranks`.
    ///
    /// Uses successive selection rather than a full sort, so it is linear in
    /// `n` for a fixed number of ranks.
    pub fn order_statistics(&self, ranks: &[usize]) -> Result<Vec<f64>> {
        let n = self.len();
        for &r in ranks {
            if r == 0 || r > n {
                return Err(Error::RankOutOfRange { rank: r, n });
            }
        }
        let mut order: Vec<usize> = (0..ranks.len()).collect();
        order.sort_unstable_by_key(|&i| ranks[i]);

        let mut work = self.locations.clone();
        let mut out = vec![0.0; ranks.len()];
        let mut lo = 0usize;
        for i in order {
            let idx = ranks[i] - 1;
            if idx >= lo {
                let (_, nth, _) = work[lo..].select_nth_unstable_by(idx - lo, f64::total_cmp);
                out[i] = *nth;
                lo = idx;
            } else {
                // repeated rank
                out[i] = work[idx];
            }
        }
        Ok(out)
    }
}

/// Draws `n` independent Uniform[0, 1] locations.
pub fn deploy<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DeploymentDraw> {
    if n == 0 {
        return Err(Error::EmptyDeployment);
    }
    let locations = (0..n).map(|_| rng.gen::<f64>()).collect();
    Ok(DeploymentDraw {
        locations,
        seed: None,
    })
}

/// [`deploy`] with a fresh ChaCha8 stream, recording the seed.
pub fn deploy_seeded(n: usize, seed: u64) -> Result<DeploymentDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = deploy(n, &mut rng)?;
    draw.seed = Some(seed);
    Ok(draw)
}

/// Field values listed by increasing (hidden) location.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<Complex64>,
    source_bandwidth: Option<usize>,
    seed: Option<u64>,
}

impl SampleSet {
    /// Ordered values from an external source.
    pub fn from_ordered_values(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDeployment);
        }
        Ok(SampleSet {
            values,
            source_bandwidth: None,
            seed: None,
        })
    }

    pub fn with_metadata(mut self, source_bandwidth: Option<usize>, seed: Option<u64>) -> Self {
        self.source_bandwidth = source_bandwidth;
        self.seed = seed;
        self
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn source_bandwidth(&self) -> Option<usize> {
        self.source_bandwidth
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// Evaluates the field at the sorted locations and discards the locations.
///
/// Equal locations give equal values, so tie order cannot affect the output.
pub fn observe(field: &FourierCoefficients, draw: &DeploymentDraw) -> SampleSet {
    let values = draw
        .sorted_locations()
        .into_iter()
        .map(|u| field.eval(u))
        .collect();
    SampleSet {
        values,
        source_bandwidth: Some(field.bandwidth()),
        seed: draw.seed,
    }
}

/// One-based ranks `floor(n·l / (2b+1)) + 1` for `l = 0..=2b`.
pub fn quantile_indices(n: usize, b: usize) -> Result<Vec<usize>> {
    let dim = dimension(b);
    if n < dim {
        return Err(Error::InsufficientSamples {
            n,
            b,
            required: dim,
        });
    }
    // integer division is the exact floor of n·l·s_b
    Ok((0..dim).map(|l| n * l / dim + 1).collect())
}

/// The vector of order-statistic values at `ranks`.
pub fn extract_quantile_samples(s: &SampleSet, ranks: &[usize]) -> Result<Vec<Complex64>> {
    let n = s.len();
    ranks
        .iter()
        .map(|&r| {
            if r == 0 || r > n {
                Err(Error::RankOutOfRange { rank: r, n })
            } else {
                Ok(s.values[r - 1])
            }
        })
        .collect()
}
