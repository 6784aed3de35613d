//! Piecewise-constant-mean series with Gaussian noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    /// Mean level of each consecutive segment.
    pub segment_means: Vec<f64>,
    pub segment_length: usize,
    pub noise_std: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segment_means.is_empty() {
            return Err(invalid("segment_means", "need at least one segment"));
        }
        if self.segment_means.iter().any(|m| !m.is_finite()) {
            return Err(invalid("segment_means", "all means must be finite"));
        }
        if self.segment_length == 0 {
            return Err(invalid("segment_length", "must be positive"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(invalid("noise_std", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Generates `segments * segment_length` observations; segment `s` is
/// `segment_means[s]` plus i.i.d. `N(0, noise_std^2)` noise. Output is a pure
/// function of the config.
pub fn synthesize(config: &SynthConfig) -> Result<TimeSeries> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut values = Vec::with_capacity(config.segment_means.len() * config.segment_length);
    for &mean in &config.segment_means {
        for _ in 0..config.segment_length {
            let z: f64 = StandardNormal.sample(&mut rng);
            values.push(mean + config.noise_std * z);
        }
    }
    TimeSeries::new(values)
}
