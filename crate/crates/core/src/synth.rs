//! Deterministic generator of labeled synthetic propagation networks with
//! class-conditional structure, for exercising the classification pipeline
//! at desk scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};
use crate::prnet::{Arc, PropagationNetwork, WeightVector};

/// Structural and weight parameters of one synthetic class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassProfile {
    pub label: String,
    /// Inclusive range of tree depths (levels below the source).
    pub depth_range: (u32, u32),
    /// Inclusive range of per-node child counts.
    pub branching_range: (u32, u32),
    /// Mean follow/mention/retweet weight per arc.
    pub weight_means: (f64, f64, f64),
    /// Half-width of the uniform noise added to each weight component
    /// before clamping to [0, 1].
    pub weight_noise: f64,
    /// Probability that a non-source node gains one extra parent from the
    /// previous level, turning the tree into a DAG. Default 0.
    #[serde(default)]
    pub merge_probability: f64,
}

impl ClassProfile {
    fn check(&self) -> Result<()> {
        let (dmin, dmax) = self.depth_range;
        let (bmin, bmax) = self.branching_range;
        if dmin > dmax {
            return Err(Error::domain(format!(
                "class {}: depth_range min {dmin} exceeds max {dmax}",
                self.label
            )));
        }
        if bmin > bmax {
            return Err(Error::domain(format!(
                "class {}: branching_range min {bmin} exceeds max {bmax}",
                self.label
            )));
        }
        if dmax >= 1 && bmax == 0 {
            return Err(Error::domain(format!(
                "class {}: cannot reach depth {dmax} with zero branching",
                self.label
            )));
        }
        let means = [self.weight_means.0, self.weight_means.1, self.weight_means.2];
        if means.iter().any(|m| !m.is_finite() || !(0.0..=1.0).contains(m)) {
            return Err(Error::domain(format!(
                "class {}: weight means must lie in [0, 1]",
                self.label
            )));
        }
        if !self.weight_noise.is_finite() || self.weight_noise < 0.0 {
            return Err(Error::domain(format!(
                "class {}: weight noise must be nonnegative",
                self.label
            )));
        }
        if !(0.0..=1.0).contains(&self.merge_probability) {
            return Err(Error::domain(format!(
                "class {}: merge probability must lie in [0, 1]",
                self.label
            )));
        }
        Ok(())
    }
}

/// Generates `n_per_class` networks per profile, fully determined by `seed`.
pub fn generate(
    profiles: &[ClassProfile],
    n_per_class: usize,
    seed: u64,
) -> Result<LabeledCorpus> {
    if profiles.is_empty() {
        return Err(Error::domain("at least one class profile is required"));
    }
    if n_per_class == 0 {
        return Err(Error::domain("n_per_class must be at least 1"));
    }
    for (i, profile) in profiles.iter().enumerate() {
        profile.check()?;
        if profiles[..i].iter().any(|p| p.label == profile.label) {
            return Err(Error::domain(format!(
                "duplicate profile label: {}",
                profile.label
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut networks = Vec::with_capacity(profiles.len() * n_per_class);
    for profile in profiles {
        for _ in 0..n_per_class {
            networks.push(generate_network(profile, &mut rng));
        }
    }
    LabeledCorpus::new(networks)
}

fn sample_weight(profile: &ClassProfile, rng: &mut ChaCha8Rng) -> WeightVector {
    let noisy = |mean: f64, rng: &mut ChaCha8Rng| {
        let noise = if profile.weight_noise > 0.0 {
            rng.gen_range(-profile.weight_noise..=profile.weight_noise)
        } else {
            0.0
        };
        (mean + noise).clamp(0.0, 1.0)
    };
    WeightVector {
        follow: noisy(profile.weight_means.0, rng),
        mention: noisy(profile.weight_means.1, rng),
        retweet: noisy(profile.weight_means.2, rng),
    }
}

fn generate_network(profile: &ClassProfile, rng: &mut ChaCha8Rng) -> PropagationNetwork {
    let depth = rng.gen_range(profile.depth_range.0..=profile.depth_range.1);
    let (bmin, bmax) = profile.branching_range;

    let mut arcs: Vec<Arc> = Vec::new();
    let mut next_id = 1usize;
    let mut previous_level: Vec<String> = vec!["u0".to_string()];

    for level in 1..=depth {
        let mut current_level: Vec<String> = Vec::new();
        for parent in &previous_level {
            let children = rng.gen_range(bmin..=bmax);
            for _ in 0..children {
                let child = format!("u{next_id}");
                next_id += 1;
                arcs.push(Arc::new(
                    parent.clone(),
                    child.clone(),
                    sample_weight(profile, rng),
                    level,
                ));
                current_level.push(child);
            }
        }
        if current_level.is_empty() {
            // All parents drew zero children; force one chain onward so the
            // sampled depth is reached.
            let parent = previous_level[rng.gen_range(0..previous_level.len())].clone();
            let child = format!("u{next_id}");
            next_id += 1;
            arcs.push(Arc::new(
                parent,
                child.clone(),
                sample_weight(profile, rng),
                level,
            ));
            current_level.push(child);
        }
        if profile.merge_probability > 0.0 && previous_level.len() > 1 {
            for child in &current_level {
                if rng.gen_range(0.0..1.0) < profile.merge_probability {
                    let parent = &previous_level[rng.gen_range(0..previous_level.len())];
                    if !arcs
                        .iter()
                        .any(|a| &a.src == parent && a.dst == *child)
                    {
                        arcs.push(Arc::new(
                            parent.clone(),
                            child.clone(),
                            sample_weight(profile, rng),
                            level,
                        ));
                    }
                }
            }
        }
        previous_level = current_level;
    }

    PropagationNetwork::new("u0", Some(profile.label.clone()), arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtw::{prnet_dtw, DtwConfig};
    use crate::prnet::write_networks;

    fn profile(label: &str, means: (f64, f64, f64)) -> ClassProfile {
        ClassProfile {
            label: label.to_string(),
            depth_range: (2, 4),
            branching_range: (1, 3),
            weight_means: means,
            weight_noise: 0.05,
            merge_probability: 0.0,
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let profiles = [profile("a", (0.9, 0.0, 0.0)), profile("b", (0.0, 0.0, 0.9))];
        let first = generate(&profiles, 5, 99).unwrap();
        let second = generate(&profiles, 5, 99).unwrap();
        assert_eq!(first, second);

        let mut buf1 = Vec::new();
        let mut buf2 = Vec::new();
        write_networks(&mut buf1, first.networks()).unwrap();
        write_networks(&mut buf2, second.networks()).unwrap();
        assert_eq!(buf1, buf2);

        let third = generate(&profiles, 5, 100).unwrap();
        assert_ne!(first, third);
    }

    #[test]
    fn corpus_size_and_balance() {
        let profiles = [
            profile("a", (0.5, 0.5, 0.5)),
            profile("b", (0.2, 0.2, 0.2)),
            profile("c", (0.8, 0.8, 0.8)),
        ];
        let corpus = generate(&profiles, 5, 1).unwrap();
        assert_eq!(corpus.len(), 15);
        for label in ["a", "b", "c"] {
            assert_eq!(corpus.members_of(label).len(), 5);
        }
    }

    #[test]
    fn generated_networks_are_valid_with_weights_in_range() {
        let mut p = profile("a", (0.97, 0.5, 0.02));
        p.weight_noise = 0.3;
        p.merge_probability = 0.4;
        let corpus = generate(&[p], 30, 5).unwrap();
        for net in corpus.networks() {
            assert!(net.is_valid());
            for arc in net.arcs() {
                for c in arc.weight.as_array() {
                    assert!((0.0..=1.0).contains(&c));
                }
            }
        }
    }

    #[test]
    fn separable_profiles_have_larger_cross_class_distance() {
        let profiles = [profile("a", (0.9, 0.0, 0.0)), profile("b", (0.0, 0.0, 0.9))];
        let corpus = generate(&profiles, 10, 7).unwrap();
        let cfg = DtwConfig::default();
        let mut within = Vec::new();
        let mut cross = Vec::new();
        for i in 0..corpus.len() {
            for j in 0..corpus.len() {
                if i == j {
                    continue;
                }
                let d = prnet_dtw(corpus.get(i), corpus.get(j), &cfg).unwrap();
                if corpus.label_of(i) == corpus.label_of(j) {
                    within.push(d);
                } else {
                    cross.push(d);
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(
            mean(&cross) > mean(&within),
            "cross {} within {}",
            mean(&cross),
            mean(&within)
        );
    }

    #[test]
    fn zero_noise_yields_exact_means() {
        let mut p = profile("a", (0.4, 0.2, 0.6));
        p.weight_noise = 0.0;
        let corpus = generate(&[p], 3, 11).unwrap();
        for net in corpus.networks() {
            for arc in net.arcs() {
                assert_eq!(arc.weight.as_array(), [0.4, 0.2, 0.6]);
            }
        }
    }

    #[test]
    fn impossible_ranges_are_rejected() {
        let mut p = profile("a", (0.5, 0.5, 0.5));
        p.depth_range = (4, 2);
        assert!(generate(&[p], 1, 0).is_err());

        let mut p = profile("a", (0.5, 0.5, 0.5));
        p.branching_range = (0, 0);
        assert!(generate(&[p], 1, 0).is_err());

        let mut p = profile("a", (0.5, 0.5, 0.5));
        p.weight_means = (1.5, 0.0, 0.0);
        assert!(generate(&[p], 1, 0).is_err());

        assert!(generate(&[], 1, 0).is_err());
        assert!(generate(
            &[profile("a", (0.5, 0.5, 0.5)), profile("a", (0.1, 0.1, 0.1))],
            1,
            0
        )
        .is_err());
    }

    #[test]
    fn profile_file_fields_are_verbatim() {
        let json = r#"{"label":"a","depth_range":[2,4],"branching_range":[1,3],"weight_means":[0.9,0.1,0.1],"weight_noise":0.05}"#;
        let p: ClassProfile = serde_json::from_str(json).unwrap();
        assert_eq!(p.label, "a");
        assert_eq!(p.depth_range, (2, 4));
        assert_eq!(p.branching_range, (1, 3));
        assert_eq!(p.weight_means, (0.9, 0.1, 0.1));
        assert_eq!(p.merge_probability, 0.0);
    }
}
