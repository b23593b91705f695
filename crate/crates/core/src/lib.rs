//! Classification of message-propagation networks from their spread alone.
//!
//! A propagation network records who relayed a message to whom, as a
//! single-source time-ordered DAG whose arcs carry follow/mention/retweet
//! relationship weights. This crate measures the distance between two such
//! networks by dynamic time warping over their source-to-leaf paths and
//! feeds that distance to probabilistic and evidential (belief-function)
//! k-NN classifiers. It also ships the surrounding tooling: ingestion of
//! raw interaction event logs, a synthetic cascade generator, and an
//! evaluation harness with repeated-holdout accuracy reports.

pub mod belief;
pub mod corpus;
pub mod dtw;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod knn;
pub mod prnet;
pub mod synth;

pub use belief::{
    combine_conjunctive, combine_dempster, combine_disjunctive, pignistic, simple_bba,
    CombinationRule, Frame, MassFunction, MassRecord,
};
pub use corpus::LabeledCorpus;
pub use dtw::{
    delta, dipath_set_distance, dtw, dtw_matrix, dtw_naive, prnet_dtw, DtwConfig, DtwMatrix,
    ElementDistance,
};
pub use error::{Error, Result};
pub use eval::{
    evaluate, split, split_stratified, sweep_k, wald_halfwidth, ClassifierSpec, ConfusionMatrix,
    EvalOptions, EvalReport, Evaluator,
};
pub use ingest::{
    build_traces, compute_weights, dataset_stats, DatasetStats, Event, FollowWeightMode,
    IngestConfig, InteractionLog,
};
pub use knn::{
    classify_evidential, classify_probabilistic, estimate_gamma, evidence_alpha,
    nearest_neighbors, resolve_gamma, ClassificationResult, EvidentialParams, GammaMode,
    NeighborRecord,
};
pub use prnet::{
    extract_dipaths, extract_dipaths_capped, read_networks, write_networks, Arc, Dipath,
    PropagationNetwork, Violation, WeightVector, DEFAULT_DIPATH_CAP,
};
pub use synth::{generate, ClassProfile};
