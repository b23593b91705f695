//! Shared input builders for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cascade_core::{generate, ClassProfile, LabeledCorpus, WeightVector};

/// A random weight-vector sequence of the given length.
pub fn random_sequence(len: usize, seed: u64) -> Vec<WeightVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| WeightVector {
            follow: rng.gen_range(0.0..=1.0),
            mention: rng.gen_range(0.0..=1.0),
            retweet: rng.gen_range(0.0..=1.0),
        })
        .collect()
}

/// Two moderately separable classes at the benchmark's default scale.
pub fn benchmark_profiles() -> Vec<ClassProfile> {
    vec![
        ClassProfile {
            label: "a".to_string(),
            depth_range: (2, 4),
            branching_range: (1, 3),
            weight_means: (0.9, 0.1, 0.1),
            weight_noise: 0.05,
            merge_probability: 0.0,
        },
        ClassProfile {
            label: "b".to_string(),
            depth_range: (2, 4),
            branching_range: (1, 3),
            weight_means: (0.1, 0.1, 0.9),
            weight_noise: 0.05,
            merge_probability: 0.0,
        },
    ]
}

pub fn benchmark_corpus(n_per_class: usize, seed: u64) -> LabeledCorpus {
    generate(&benchmark_profiles(), n_per_class, seed).expect("valid benchmark profiles")
}
