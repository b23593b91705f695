//! Probabilistic and evidential k-nearest-neighbor classifiers over the
//! propagation-network distance.
//!
//! The probabilistic classifier takes a majority vote among the k nearest
//! training networks. The evidential classifier turns each neighbor into a
//! simple BBA whose singleton mass decays with distance,
//! `alpha = alpha0 * exp(-gamma_i * d^beta)`, fuses the k BBAs with a
//! combination rule and decides by maximum pignistic probability.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::belief::{attenuated_bba, pignistic, CombinationRule, Frame, MassRecord};
use crate::corpus::LabeledCorpus;
use crate::dtw::{dipath_set_distance, DtwConfig};
use crate::error::{Error, Result};
use crate::prnet::{extract_dipaths_capped, Dipath, PropagationNetwork};

/// Per-class attenuation coefficient for the evidential classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaMode {
    /// Estimate gamma per class from intra-class training distances.
    Auto,
    /// One coefficient shared by every class.
    Global(f64),
    /// Explicit per-class coefficients.
    PerClass(BTreeMap<String, f64>),
}

/// Hyperparameters of the evidential k-NN decision rule.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidentialParams {
    pub alpha0: f64,
    pub beta: u32,
    pub gamma: GammaMode,
}

impl Default for EvidentialParams {
    fn default() -> Self {
        EvidentialParams {
            alpha0: 0.95,
            beta: 1,
            gamma: GammaMode::Auto,
        }
    }
}

impl EvidentialParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0 < 1.0) {
            return Err(Error::domain(format!(
                "alpha0 must lie in (0, 1), got {}",
                self.alpha0
            )));
        }
        if self.beta == 0 {
            return Err(Error::domain("beta must be a positive integer"));
        }
        match &self.gamma {
            GammaMode::Auto => {}
            GammaMode::Global(g) => {
                if !(g.is_finite() && *g > 0.0) {
                    return Err(Error::domain(format!("gamma must be positive, got {g}")));
                }
            }
            GammaMode::PerClass(map) => {
                for (label, g) in map {
                    if !(g.is_finite() && *g > 0.0) {
                        return Err(Error::domain(format!(
                            "gamma for class {label} must be positive, got {g}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One training network ranked by its distance to the query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborRecord {
    pub train_index: usize,
    pub label: String,
    pub distance: f64,
}

/// A classification decision with its per-class scores and the neighbors
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub predicted: String,
    /// Per-class probability: pignistic for evidential, vote fraction for
    /// probabilistic.
    pub scores: BTreeMap<String, f64>,
    pub neighbors: Vec<NeighborRecord>,
    pub tie_broken: bool,
    /// Fused mass function (evidential only), for `--explain` output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combined_mass: Option<Vec<MassRecord>>,
}

/// Distance attenuation of neighbor evidence: `alpha0 * exp(-gamma * d^beta)`.
/// Strictly decreasing in `d`; an infinite distance yields 0.
pub fn evidence_alpha(alpha0: f64, gamma: f64, beta: u32, distance: f64) -> f64 {
    alpha0 * (-gamma * distance.powi(beta as i32)).exp()
}

/// The k training networks closest to the query under the network distance,
/// ascending by distance with ties broken by corpus index.
pub fn nearest_neighbors(
    query: &PropagationNetwork,
    corpus: &LabeledCorpus,
    k: usize,
    cfg: &DtwConfig,
) -> Result<Vec<NeighborRecord>> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if k > corpus.len() {
        return Err(Error::domain(format!(
            "k = {k} exceeds corpus size {}",
            corpus.len()
        )));
    }
    let query_paths = extract_dipaths_capped(query, cfg.dipath_cap)?;
    let distances: Result<Vec<f64>> = corpus
        .networks()
        .par_iter()
        .map(|net| {
            let train_paths = extract_dipaths_capped(net, cfg.dipath_cap)?;
            dipath_set_distance(&query_paths, &train_paths, cfg)
        })
        .collect();
    let mut records: Vec<NeighborRecord> = distances?
        .into_iter()
        .enumerate()
        .map(|(i, distance)| NeighborRecord {
            train_index: i,
            label: corpus.label_of(i).to_string(),
            distance,
        })
        .collect();
    sort_neighbors(&mut records);
    records.truncate(k);
    Ok(records)
}

pub(crate) fn sort_neighbors(records: &mut [NeighborRecord]) {
    records.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(Ordering::Equal)
            .then(a.train_index.cmp(&b.train_index))
    });
}

/// Majority vote over the k nearest neighbors. Vote ties are broken by the
/// smallest mean distance among the tied classes, then lexicographically.
pub fn classify_probabilistic(
    query: &PropagationNetwork,
    corpus: &LabeledCorpus,
    k: usize,
    cfg: &DtwConfig,
) -> Result<ClassificationResult> {
    let neighbors = nearest_neighbors(query, corpus, k, cfg)?;
    Ok(decide_probabilistic(neighbors, corpus.labels()))
}

pub(crate) fn decide_probabilistic(
    neighbors: Vec<NeighborRecord>,
    class_labels: &[String],
) -> ClassificationResult {
    let k = neighbors.len();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut dist_sums: BTreeMap<&str, f64> = BTreeMap::new();
    for n in &neighbors {
        *counts.entry(n.label.as_str()).or_insert(0) += 1;
        *dist_sums.entry(n.label.as_str()).or_insert(0.0) += n.distance;
    }
    let top_count = counts.values().copied().max().expect("k >= 1");
    let tied: Vec<&str> = counts
        .iter()
        .filter(|(_, c)| **c == top_count)
        .map(|(l, _)| *l)
        .collect();
    let tie_broken = tied.len() > 1;
    // `tied` is in label order, so strict < resolves remaining mean-distance
    // ties lexicographically.
    let mut predicted = tied[0];
    let mut best_mean = dist_sums[predicted] / top_count as f64;
    for &label in &tied[1..] {
        let mean = dist_sums[label] / top_count as f64;
        if mean < best_mean {
            predicted = label;
            best_mean = mean;
        }
    }
    let scores: BTreeMap<String, f64> = class_labels
        .iter()
        .map(|l| {
            let c = counts.get(l.as_str()).copied().unwrap_or(0);
            (l.clone(), c as f64 / k as f64)
        })
        .collect();
    ClassificationResult {
        predicted: predicted.to_string(),
        scores,
        neighbors,
        tie_broken,
        combined_mass: None,
    }
}

/// Evidential k-NN: fuse one distance-attenuated simple BBA per neighbor
/// and decide by maximum pignistic probability, ties broken
/// lexicographically.
pub fn classify_evidential(
    query: &PropagationNetwork,
    corpus: &LabeledCorpus,
    k: usize,
    cfg: &DtwConfig,
    params: &EvidentialParams,
    rule: CombinationRule,
) -> Result<ClassificationResult> {
    params.validate()?;
    let gamma = resolve_gamma(params, corpus, cfg)?;
    let neighbors = nearest_neighbors(query, corpus, k, cfg)?;
    decide_evidential(neighbors, corpus.labels(), params.alpha0, params.beta, &gamma, rule)
}

pub(crate) fn decide_evidential(
    neighbors: Vec<NeighborRecord>,
    class_labels: &[String],
    alpha0: f64,
    beta: u32,
    gamma: &BTreeMap<String, f64>,
    rule: CombinationRule,
) -> Result<ClassificationResult> {
    if class_labels.len() == 1 {
        // The frame is a single class; the decision is forced.
        let label = class_labels[0].clone();
        let mut scores = BTreeMap::new();
        scores.insert(label.clone(), 1.0);
        return Ok(ClassificationResult {
            predicted: label,
            scores,
            neighbors,
            tie_broken: false,
            combined_mass: None,
        });
    }

    let frame = Frame::new(class_labels.iter().cloned())?;
    let mut combined = None;
    for n in &neighbors {
        let g = *gamma
            .get(&n.label)
            .ok_or_else(|| Error::domain(format!("no gamma for class {}", n.label)))?;
        let alpha = evidence_alpha(alpha0, g, beta, n.distance);
        let bba = attenuated_bba(&frame, &n.label, alpha)?;
        combined = Some(match combined {
            None => bba,
            Some(acc) => rule.combine(&acc, &bba)?,
        });
    }
    let combined = combined.ok_or_else(|| Error::domain("k must be at least 1"))?;
    let scores = pignistic(&combined)?;

    let best = scores
        .values()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut top = scores.iter().filter(|(_, s)| **s == best).map(|(l, _)| l);
    let predicted = top.next().expect("scores non-empty").clone();
    let tie_broken = top.next().is_some();

    Ok(ClassificationResult {
        predicted,
        scores,
        neighbors,
        tie_broken,
        combined_mass: Some(combined.to_records()),
    })
}

/// Resolves the gamma mode against a training corpus: `Auto` estimates per
/// class, `Global` broadcasts one value, `PerClass` is checked for coverage.
pub fn resolve_gamma(
    params: &EvidentialParams,
    corpus: &LabeledCorpus,
    cfg: &DtwConfig,
) -> Result<BTreeMap<String, f64>> {
    params.validate()?;
    match &params.gamma {
        GammaMode::Auto => estimate_gamma(corpus, cfg, params.beta),
        GammaMode::Global(g) => Ok(corpus
            .labels()
            .iter()
            .map(|l| (l.clone(), *g))
            .collect()),
        GammaMode::PerClass(map) => {
            for label in corpus.labels() {
                if !map.contains_key(label) {
                    return Err(Error::domain(format!("no gamma for class {label}")));
                }
            }
            Ok(map.clone())
        }
    }
}

/// Per-class attenuation estimate: `gamma_i = 1 / mean(d^beta)` over the
/// ordered intra-class network distances of class i.
///
/// Non-finite distances are excluded from the mean; a class whose mean is
/// zero (or has no finite pair) falls back to `gamma = 1` with a warning.
pub fn estimate_gamma(
    corpus: &LabeledCorpus,
    cfg: &DtwConfig,
    beta: u32,
) -> Result<BTreeMap<String, f64>> {
    if beta == 0 {
        return Err(Error::domain("beta must be a positive integer"));
    }
    let dipaths: Result<Vec<Vec<Dipath>>> = corpus
        .networks()
        .par_iter()
        .map(|net| extract_dipaths_capped(net, cfg.dipath_cap))
        .collect();
    let dipaths = dipaths?;

    let mut gammas = BTreeMap::new();
    for label in corpus.labels() {
        let members = corpus.members_of(label);
        if members.len() < 2 {
            return Err(Error::domain(format!(
                "class {label} has fewer than 2 corpus members; cannot estimate gamma"
            )));
        }
        let mut total = 0.0;
        let mut count = 0usize;
        for &i in &members {
            for &j in &members {
                if i == j {
                    continue;
                }
                let d = dipath_set_distance(&dipaths[i], &dipaths[j], cfg)?;
                if d.is_finite() {
                    total += d.powi(beta as i32);
                    count += 1;
                }
            }
        }
        let gamma = if count == 0 || total == 0.0 {
            log::warn!(
                "class {label}: intra-class distances are all zero or non-finite; falling back to gamma = 1"
            );
            1.0
        } else {
            count as f64 / total
        };
        gammas.insert(label.clone(), gamma);
    }
    Ok(gammas)
}
