//! Dynamic time warping over weight-vector sequences, and the
//! propagation-network distance built on it.
//!
//! `dtw` is the memoized O(|A|·|B|) recursion; `dtw_naive` is the direct
//! exponential recursion kept as a test oracle. `prnet_dtw` lifts the
//! sequence distance to whole networks: the mean, over dipaths of the first
//! network, of the minimum DTW distance to any dipath of the second.

use crate::error::{Error, Result};
use crate::prnet::{extract_dipaths_capped, Dipath, PropagationNetwork, WeightVector, DEFAULT_DIPATH_CAP};

/// Element distance applied between two arc weight vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementDistance {
    Euclidean,
    Manhattan,
}

/// Configuration for the sequence and network distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtwConfig {
    pub element_distance: ElementDistance,
    /// Distance reported when exactly one of two dipath sets is empty.
    /// Defaults to +inf so arc-less networks sort last in neighbor lists.
    pub empty_vs_nonempty_distance: f64,
    /// Average the two directed network distances instead of using the
    /// asymmetric query-driven form.
    pub symmetrize: bool,
    /// Guard against path explosion when decomposing dense networks.
    pub dipath_cap: usize,
}

impl Default for DtwConfig {
    fn default() -> Self {
        DtwConfig {
            element_distance: ElementDistance::Euclidean,
            empty_vs_nonempty_distance: f64::INFINITY,
            symmetrize: false,
            dipath_cap: DEFAULT_DIPATH_CAP,
        }
    }
}

impl DtwConfig {
    fn check(&self) -> Result<()> {
        if self.empty_vs_nonempty_distance.is_nan() || self.empty_vs_nonempty_distance < 0.0 {
            return Err(Error::domain(
                "empty_vs_nonempty_distance must be nonnegative",
            ));
        }
        Ok(())
    }
}

/// Distance between two sequence elements.
pub fn delta(a: WeightVector, b: WeightVector, cfg: &DtwConfig) -> f64 {
    let d = [
        a.follow - b.follow,
        a.mention - b.mention,
        a.retweet - b.retweet,
    ];
    match cfg.element_distance {
        ElementDistance::Euclidean => d.iter().map(|x| x * x).sum::<f64>().sqrt(),
        ElementDistance::Manhattan => d.iter().map(|x| x.abs()).sum(),
    }
}

/// Memoization table for the DTW recursion: an (|A|+1) x (|B|+1) grid with
/// `cost(0, 0) = 0` and +inf along the first row and column.
#[derive(Debug, Clone)]
pub struct DtwMatrix {
    costs: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl DtwMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.costs[i * self.cols + j]
    }

    /// The DTW distance: the bottom-right cell.
    pub fn final_cost(&self) -> f64 {
        self.cost(self.rows - 1, self.cols - 1)
    }
}

/// Fills the full memoization table for `dtw(a, b)`.
pub fn dtw_matrix(a: &[WeightVector], b: &[WeightVector], cfg: &DtwConfig) -> Result<DtwMatrix> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySequence);
    }
    let rows = a.len() + 1;
    let cols = b.len() + 1;
    let mut costs = vec![f64::INFINITY; rows * cols];
    costs[0] = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let idx = (i + 1) * cols + (j + 1);
            let best = costs[i * cols + j]
                .min(costs[i * cols + j + 1])
                .min(costs[(i + 1) * cols + j]);
            costs[idx] = delta(ai, bj, cfg) + best;
        }
    }
    Ok(DtwMatrix { costs, rows, cols })
}

/// Memoized DTW distance between two non-empty sequences: the minimum over
/// all monotone warping paths of the summed element distances.
pub fn dtw(a: &[WeightVector], b: &[WeightVector], cfg: &DtwConfig) -> Result<f64> {
    Ok(dtw_matrix(a, b, cfg)?.final_cost())
}

/// Length guard for the naive recursion.
pub const NAIVE_MAX_LEN: usize = 8;

/// Direct recursion with no memoization; exponential, test oracle only.
pub fn dtw_naive(a: &[WeightVector], b: &[WeightVector], cfg: &DtwConfig) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySequence);
    }
    if a.len() > NAIVE_MAX_LEN || b.len() > NAIVE_MAX_LEN {
        return Err(Error::NaiveLengthGuard {
            len_a: a.len(),
            len_b: b.len(),
            max: NAIVE_MAX_LEN,
        });
    }
    fn rec(a: &[WeightVector], b: &[WeightVector], i: usize, j: usize, cfg: &DtwConfig) -> f64 {
        if i == 0 && j == 0 {
            return 0.0;
        }
        if i == 0 || j == 0 {
            return f64::INFINITY;
        }
        let step = rec(a, b, i - 1, j - 1, cfg)
            .min(rec(a, b, i, j - 1, cfg))
            .min(rec(a, b, i - 1, j, cfg));
        delta(a[i - 1], b[j - 1], cfg) + step
    }
    Ok(rec(a, b, a.len(), b.len(), cfg))
}

/// Directed dipath-set distance: the mean, over paths in `d1`, of the
/// minimum DTW distance to any path in `d2`.
fn directed_mean(d1: &[Dipath], d2: &[Dipath], cfg: &DtwConfig) -> Result<f64> {
    let mut total = 0.0;
    for p in d1 {
        let mut best = f64::INFINITY;
        for q in d2 {
            best = best.min(dtw(&p.elements, &q.elements, cfg)?);
        }
        total += best;
    }
    Ok(total / d1.len() as f64)
}

/// Network distance over pre-extracted dipath sets.
///
/// Both sets empty yields 0; exactly one empty yields
/// `cfg.empty_vs_nonempty_distance`. Honors `cfg.symmetrize`.
pub fn dipath_set_distance(d1: &[Dipath], d2: &[Dipath], cfg: &DtwConfig) -> Result<f64> {
    cfg.check()?;
    match (d1.is_empty(), d2.is_empty()) {
        (true, true) => Ok(0.0),
        (true, false) | (false, true) => Ok(cfg.empty_vs_nonempty_distance),
        (false, false) => {
            if cfg.symmetrize {
                Ok((directed_mean(d1, d2, cfg)? + directed_mean(d2, d1, cfg)?) / 2.0)
            } else {
                directed_mean(d1, d2, cfg)
            }
        }
    }
}

/// The propagation-network distance: decompose both networks into dipaths,
/// then take the mean over `p1`'s dipaths of the minimal DTW distance to
/// `p2`'s dipaths. Asymmetric unless `cfg.symmetrize` is set.
pub fn prnet_dtw(
    p1: &PropagationNetwork,
    p2: &PropagationNetwork,
    cfg: &DtwConfig,
) -> Result<f64> {
    let d1 = extract_dipaths_capped(p1, cfg.dipath_cap)?;
    let d2 = extract_dipaths_capped(p2, cfg.dipath_cap)?;
    dipath_set_distance(&d1, &d2, cfg)
}
