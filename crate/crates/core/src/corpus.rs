//! Labeled collections of propagation networks used for training and
//! evaluation.

use crate::error::{Error, Result};
use crate::prnet::PropagationNetwork;

/// A set of labeled, structurally valid propagation networks.
///
/// Construction validates every member and requires a label on each; the
/// distinct label set is kept sorted for deterministic frame construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    networks: Vec<PropagationNetwork>,
    labels: Vec<String>,
}

impl LabeledCorpus {
    pub fn new(networks: Vec<PropagationNetwork>) -> Result<LabeledCorpus> {
        let mut labels: Vec<String> = Vec::new();
        for (i, net) in networks.iter().enumerate() {
            let violations = net.validate();
            if !violations.is_empty() {
                return Err(Error::Data(format!(
                    "corpus network {i} is invalid: {}",
                    Error::InvalidNetwork(violations)
                )));
            }
            match net.label() {
                Some(label) => {
                    if !labels.iter().any(|l| l == label) {
                        labels.push(label.to_string());
                    }
                }
                None => {
                    return Err(Error::Data(format!("corpus network {i} has no label")));
                }
            }
        }
        if networks.is_empty() {
            return Err(Error::domain("corpus must contain at least one network"));
        }
        labels.sort();
        Ok(LabeledCorpus { networks, labels })
    }

    pub fn len(&self) -> usize {
        self.networks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty()
    }

    pub fn networks(&self) -> &[PropagationNetwork] {
        &self.networks
    }

    pub fn get(&self, index: usize) -> &PropagationNetwork {
        &self.networks[index]
    }

    /// Sorted distinct class labels present in the corpus.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_of(&self, index: usize) -> &str {
        self.networks[index].label().expect("validated at construction")
    }

    /// Indices of all members carrying the given label.
    pub fn members_of(&self, label: &str) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.label_of(i) == label)
            .collect()
    }

    /// A new corpus from a subset of member indices, preserving order.
    pub fn subset(&self, indices: &[usize]) -> LabeledCorpus {
        let networks = indices.iter().map(|&i| self.networks[i].clone()).collect();
        LabeledCorpus::new(networks).expect("subset of a valid corpus")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prnet::{Arc, WeightVector};

    fn labeled(label: &str, weight: f64) -> PropagationNetwork {
        PropagationNetwork::new(
            "s",
            Some(label.to_string()),
            vec![Arc::new("s", "a", WeightVector::new(weight, 0.0, 0.0).unwrap(), 1)],
        )
    }

    #[test]
    fn collects_sorted_distinct_labels() {
        let corpus = LabeledCorpus::new(vec![
            labeled("b", 0.1),
            labeled("a", 0.2),
            labeled("b", 0.3),
        ])
        .unwrap();
        assert_eq!(corpus.labels(), ["a", "b"]);
        assert_eq!(corpus.members_of("b"), vec![0, 2]);
    }

    #[test]
    fn rejects_unlabeled_and_invalid_members() {
        let unlabeled = PropagationNetwork::new("s", None, vec![]);
        assert!(LabeledCorpus::new(vec![unlabeled]).is_err());

        let invalid = PropagationNetwork::new(
            "s",
            Some("a".into()),
            vec![
                Arc::new("s", "a", WeightVector::ZERO, 1),
                Arc::new("a", "s", WeightVector::ZERO, 2),
            ],
        );
        assert!(LabeledCorpus::new(vec![invalid]).is_err());
        assert!(LabeledCorpus::new(vec![]).is_err());
    }

    #[test]
    fn subset_preserves_order() {
        let corpus = LabeledCorpus::new(vec![
            labeled("a", 0.1),
            labeled("b", 0.2),
            labeled("a", 0.3),
        ])
        .unwrap();
        let sub = corpus.subset(&[2, 0]);
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.get(0).arcs()[0].weight.follow, 0.3);
        assert_eq!(sub.labels(), ["a"]);
    }
}
