//! Deterministic substream construction.
//!
//! Every stochastic pipeline keys its draws by (seed, domain, index) so results
//! are independent of execution order and worker count. ChaCha8 supports 2^64
//! independent streams per seed; the domain tag keeps calibration, trial, and
//! epoch streams from colliding when they share a user seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream namespaces, one per stochastic pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    CalibrationAnchor,
    MonteCarloTrial,
    SyntheticEpoch,
    SampleSet,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::CalibrationAnchor => 1,
            Domain::MonteCarloTrial => 2,
            Domain::SyntheticEpoch => 3,
            Domain::SampleSet => 4,
        }
    }
}

/// RNG for substream `index` of `domain` under `seed`.
pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(domain.tag() << 48 | index);
    rng
}
