//! Mass functions over a frame of class labels, combination rules, and the
//! pignistic transform.
//!
//! Subsets of the frame are bitmasks over its ordered labels, so set algebra
//! is exact and combination cost scales with the focal sets actually
//! present rather than the full power set.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Mass-sum drift below this is renormalized away; above it is rejected.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Maximum number of labels a frame can hold (subsets are u64 bitmasks).
pub const MAX_FRAME_LABELS: usize = 32;

/// A subset of the frame, one bit per label in frame order.
pub type Subset = u64;

/// The frame of discernment: the exhaustive, ordered set of class labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Frame>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::domain("frame requires at least 2 labels"));
        }
        if labels.len() > MAX_FRAME_LABELS {
            return Err(Error::domain(format!(
                "frame supports at most {MAX_FRAME_LABELS} labels, got {}",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::domain(format!("duplicate frame label: {label}")));
            }
        }
        Ok(Frame { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The full frame as a subset mask.
    pub fn omega(&self) -> Subset {
        (1u64 << self.labels.len()) - 1
    }

    pub fn singleton(&self, label: &str) -> Result<Subset> {
        self.index(label)
            .map(|i| 1u64 << i)
            .ok_or_else(|| Error::domain(format!("label not in frame: {label}")))
    }

    /// Labels contained in a subset mask, in frame order.
    pub fn subset_labels(&self, subset: Subset) -> Vec<&str> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(i, _)| subset & (1u64 << i) != 0)
            .map(|(_, l)| l.as_str())
            .collect()
    }
}

/// One focal set and its mass, in the label-list form used by CLI output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassRecord {
    pub focal: Vec<String>,
    pub mass: f64,
}

/// A basic belief assignment: masses over subsets of the frame summing
/// to 1. Mass on the empty set (conflict) is representable so that the
/// conjunctive rule can be used unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    masses: BTreeMap<Subset, f64>,
}

impl MassFunction {
    /// Builds a mass function, dropping zero entries and renormalizing
    /// drift within [`MASS_TOLERANCE`]. Larger drift and negative or
    /// out-of-frame masses are rejected.
    pub fn new(frame: Frame, masses: BTreeMap<Subset, f64>) -> Result<MassFunction> {
        let omega = frame.omega();
        let mut total = 0.0;
        for (&subset, &mass) in &masses {
            if subset & !omega != 0 {
                return Err(Error::domain(format!(
                    "subset {subset:#b} is not within the frame"
                )));
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::domain(format!("mass must be in [0, 1], got {mass}")));
            }
            total += mass;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::domain(format!(
                "masses must sum to 1 within {MASS_TOLERANCE}, got {total}"
            )));
        }
        let masses = masses
            .into_iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|(s, m)| (s, m / total))
            .collect();
        Ok(MassFunction { frame, masses })
    }

    /// The vacuous mass function: all mass on the full frame.
    pub fn vacuous(frame: Frame) -> MassFunction {
        let mut masses = BTreeMap::new();
        masses.insert(frame.omega(), 1.0);
        MassFunction { frame, masses }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, subset: Subset) -> f64 {
        self.masses.get(&subset).copied().unwrap_or(0.0)
    }

    /// Mass assigned to the empty set by an unnormalized combination.
    pub fn conflict(&self) -> f64 {
        self.mass(0)
    }

    /// Focal sets: subsets with strictly positive mass.
    pub fn focal_sets(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.masses.iter().map(|(&s, &m)| (s, m))
    }

    pub fn is_vacuous(&self) -> bool {
        self.masses.len() == 1 && self.mass(self.frame.omega()) > 0.0
    }

    pub fn to_records(&self) -> Vec<MassRecord> {
        self.focal_sets()
            .map(|(subset, mass)| MassRecord {
                focal: self
                    .frame
                    .subset_labels(subset)
                    .into_iter()
                    .map(String::from)
                    .collect(),
                mass,
            })
            .collect()
    }
}

/// The simple BBA of evidential k-NN: mass `alpha` on one singleton and
/// `1 - alpha` on the whole frame, with `0 < alpha < 1`.
pub fn simple_bba(frame: &Frame, label: &str, alpha: f64) -> Result<MassFunction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in the open interval (0, 1), got {alpha}"
        )));
    }
    let singleton = frame.singleton(label)?;
    let mut masses = BTreeMap::new();
    masses.insert(singleton, alpha);
    masses.insert(frame.omega(), 1.0 - alpha);
    MassFunction::new(frame.clone(), masses)
}

/// As [`simple_bba`] but accepting `alpha = 0`, which degenerates to the
/// vacuous mass function. Used for distance-attenuated evidence where an
/// infinitely far neighbor contributes nothing.
pub(crate) fn attenuated_bba(frame: &Frame, label: &str, alpha: f64) -> Result<MassFunction> {
    if alpha == 0.0 {
        frame.singleton(label)?;
        return Ok(MassFunction::vacuous(frame.clone()));
    }
    simple_bba(frame, label, alpha)
}

fn check_frames(m1: &MassFunction, m2: &MassFunction) -> Result<()> {
    if m1.frame != m2.frame {
        return Err(Error::FrameMismatch(format!(
            "[{}] vs [{}]",
            m1.frame.labels().join(", "),
            m2.frame.labels().join(", ")
        )));
    }
    Ok(())
}

fn combine_with(
    m1: &MassFunction,
    m2: &MassFunction,
    set_op: impl Fn(Subset, Subset) -> Subset,
) -> Result<MassFunction> {
    check_frames(m1, m2)?;
    let mut masses: BTreeMap<Subset, f64> = BTreeMap::new();
    for (s1, v1) in m1.focal_sets() {
        for (s2, v2) in m2.focal_sets() {
            *masses.entry(set_op(s1, s2)).or_insert(0.0) += v1 * v2;
        }
    }
    MassFunction::new(m1.frame.clone(), masses)
}

/// Conjunctive rule of combination (unnormalized): mass products accumulate
/// on set intersections, and conflict stays on the empty set.
pub fn combine_conjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    combine_with(m1, m2, |a, b| a & b)
}

/// Dempster's rule: conjunctive combination with the conflict mass
/// redistributed over the non-empty focal sets.
pub fn combine_dempster(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let combined = combine_conjunctive(m1, m2)?;
    let conflict = combined.conflict();
    if 1.0 - conflict <= MASS_TOLERANCE {
        return Err(Error::TotalConflict);
    }
    let masses = combined
        .masses
        .into_iter()
        .filter(|(s, _)| *s != 0)
        .map(|(s, m)| (s, m / (1.0 - conflict)))
        .collect();
    MassFunction::new(combined.frame, masses)
}

/// Disjunctive rule of combination: mass products accumulate on set unions.
pub fn combine_disjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    combine_with(m1, m2, |a, b| a | b)
}

/// The pignistic transform: each focal set's mass is split equally among
/// its elements (after conditioning away any conflict), yielding a
/// probability distribution over the frame labels.
pub fn pignistic(m: &MassFunction) -> Result<BTreeMap<String, f64>> {
    let conflict = m.conflict();
    if 1.0 - conflict <= MASS_TOLERANCE {
        return Err(Error::domain(
            "pignistic transform undefined: all mass on the empty set",
        ));
    }
    let mut probs: BTreeMap<String, f64> =
        m.frame.labels().iter().map(|l| (l.clone(), 0.0)).collect();
    for (subset, mass) in m.focal_sets() {
        if subset == 0 {
            continue;
        }
        let share = mass / (subset.count_ones() as f64 * (1.0 - conflict));
        for label in m.frame.subset_labels(subset) {
            *probs.get_mut(label).expect("frame label") += share;
        }
    }
    Ok(probs)
}

/// Selectable combination rule for fusing neighbor evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinationRule {
    Dempster,
    Conjunctive,
    Disjunctive,
}

impl CombinationRule {
    pub fn combine(self, m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
        match self {
            CombinationRule::Dempster => combine_dempster(m1, m2),
            CombinationRule::Conjunctive => combine_conjunctive(m1, m2),
            CombinationRule::Disjunctive => combine_disjunctive(m1, m2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CombinationRule::Dempster => "dempster",
            CombinationRule::Conjunctive => "conjunctive",
            CombinationRule::Disjunctive => "disjunctive",
        }
    }
}
