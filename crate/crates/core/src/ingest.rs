//! Reconstruction of labeled propagation networks from raw interaction
//! event logs.
//!
//! A message of class `a` propagated from `u` to `v` iff `u` posted a tweet
//! of class `a` strictly before `v`'s earliest class-`a` tweet, and at least
//! one of these relations holds: `v` follows `u`, `u` mentioned `v` in a
//! class-`a` tweet, or `v` retweeted a class-`a` tweet of `u`. The resulting
//! trace graph is split into one single-source network per in-degree-0 node.
//!
//! Follow-graph orientation: `S_u` is the set of users `u` follows and
//! `P_u` the set of `u`'s followers. The follow weight uses the reciprocal
//! reading `w_f(u, v) = |S_u ∩ P_u| / |S_u|` when `v` follows `u`
//! ([`FollowWeightMode::Reciprocal`]); the literal, degenerate formula
//! `|S_u ∩ (P_u ∩ {u})| / |S_u|` stays available for audit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prnet::{Arc, PropagationNetwork, WeightVector};

/// One line of the event log.
///
/// Wire schema (JSON Lines, one event per line):
/// ```text
/// {"type":"follow","src":"<user>","dst":"<user>"}
/// {"type":"tweet","id":"<tid>","user":"<user>","label":"<class>","ts":<int>}
/// {"type":"retweet","user":"<user>","orig":"<tid>","ts":<int>}
/// {"type":"mention","tweet":"<tid>","by":"<user>","of":"<user>"}
/// ```
/// Unknown `type` values are a hard parse error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Event {
    Follow { src: String, dst: String },
    Tweet { id: String, user: String, label: String, ts: i64 },
    Retweet { user: String, orig: String, ts: i64 },
    Mention { tweet: String, by: String, of: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TweetRecord {
    pub id: String,
    pub user: String,
    pub label: String,
    pub ts: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetweetRecord {
    pub user: String,
    pub orig: String,
    pub ts: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MentionRecord {
    pub tweet: String,
    pub by: String,
    pub of: String,
}

/// A validated interaction log: unique tweet ids, and every retweet and
/// mention referencing an existing tweet (mentions by the tweet's author).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InteractionLog {
    pub follows: BTreeSet<(String, String)>,
    pub tweets: Vec<TweetRecord>,
    pub retweets: Vec<RetweetRecord>,
    pub mentions: Vec<MentionRecord>,
}

impl InteractionLog {
    /// Parses JSON Lines events; malformed or inconsistent lines are
    /// reported with their line number.
    pub fn parse_jsonl<R: BufRead>(reader: R) -> Result<InteractionLog> {
        let mut events = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let event: Event = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
            events.push((idx + 1, event));
        }
        Self::from_numbered_events(events)
    }

    /// Builds a log from in-memory events; "line" numbers in errors are
    /// event ordinals.
    pub fn from_events(events: Vec<Event>) -> Result<InteractionLog> {
        Self::from_numbered_events(events.into_iter().enumerate().map(|(i, e)| (i + 1, e)))
    }

    fn from_numbered_events(
        events: impl IntoIterator<Item = (usize, Event)>,
    ) -> Result<InteractionLog> {
        let events: Vec<(usize, Event)> = events.into_iter().collect();

        let mut log = InteractionLog::default();
        let mut tweet_index: BTreeMap<String, usize> = BTreeMap::new();
        for (line, event) in &events {
            if let Event::Tweet { id, user, label, ts } = event {
                if tweet_index.contains_key(id) {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("duplicate tweet id: {id}"),
                    });
                }
                tweet_index.insert(id.clone(), log.tweets.len());
                log.tweets.push(TweetRecord {
                    id: id.clone(),
                    user: user.clone(),
                    label: label.clone(),
                    ts: *ts,
                });
            }
        }

        for (line, event) in events {
            match event {
                Event::Tweet { .. } => {}
                Event::Follow { src, dst } => {
                    log.follows.insert((src, dst));
                }
                Event::Retweet { user, orig, ts } => {
                    if !tweet_index.contains_key(&orig) {
                        return Err(Error::Parse {
                            line,
                            message: format!("retweet references unknown tweet id: {orig}"),
                        });
                    }
                    log.retweets.push(RetweetRecord { user, orig, ts });
                }
                Event::Mention { tweet, by, of } => {
                    let author = match tweet_index.get(&tweet) {
                        Some(&i) => log.tweets[i].user.clone(),
                        None => {
                            return Err(Error::Parse {
                                line,
                                message: format!("mention references unknown tweet id: {tweet}"),
                            });
                        }
                    };
                    if author != by {
                        return Err(Error::Parse {
                            line,
                            message: format!(
                                "mention by {by} on tweet {tweet} written by {author}"
                            ),
                        });
                    }
                    log.mentions.push(MentionRecord { tweet, by, of });
                }
            }
        }
        Ok(log)
    }

}

/// Interpretation of the follow weight numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FollowWeightMode {
    /// `|S_u ∩ P_u| / |S_u|` gated on `v follows u`.
    Reciprocal,
    /// The printed formula `|S_u ∩ (P_u ∩ {u})| / |S_u|`, identically 0
    /// unless `u` follows itself. Audit only.
    Literal,
}

/// Options for trace reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestConfig {
    pub follow_weight: FollowWeightMode,
    /// Keep only the arc from each node's nearest earlier propagator,
    /// yielding trees instead of DAGs.
    pub tree_mode: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            follow_weight: FollowWeightMode::Reciprocal,
            tree_mode: false,
        }
    }
}

/// Per-user relationship sets derived from a log: who each user follows,
/// their followers, their tweets, and per-pair mention/retweet tweet sets.
#[derive(Debug)]
pub struct UserStats<'a> {
    users: BTreeSet<&'a str>,
    following: BTreeMap<&'a str, BTreeSet<&'a str>>,
    followers: BTreeMap<&'a str, BTreeSet<&'a str>>,
    tweet_count: BTreeMap<&'a str, usize>,
    mention_tweets: BTreeMap<&'a str, BTreeSet<&'a str>>,
    mention_pair: BTreeMap<(&'a str, &'a str), BTreeSet<&'a str>>,
    retweet_pair: BTreeMap<(&'a str, &'a str), BTreeSet<&'a str>>,
}

impl<'a> UserStats<'a> {
    pub fn build(log: &'a InteractionLog) -> UserStats<'a> {
        let mut stats = UserStats {
            users: BTreeSet::new(),
            following: BTreeMap::new(),
            followers: BTreeMap::new(),
            tweet_count: BTreeMap::new(),
            mention_tweets: BTreeMap::new(),
            mention_pair: BTreeMap::new(),
            retweet_pair: BTreeMap::new(),
        };
        for (src, dst) in &log.follows {
            stats.users.insert(src);
            stats.users.insert(dst);
            stats.following.entry(src).or_default().insert(dst);
            stats.followers.entry(dst).or_default().insert(src);
        }
        for tweet in &log.tweets {
            stats.users.insert(&tweet.user);
            *stats.tweet_count.entry(&tweet.user).or_insert(0) += 1;
        }
        for mention in &log.mentions {
            stats.users.insert(&mention.of);
            stats
                .mention_tweets
                .entry(&mention.by)
                .or_default()
                .insert(&mention.tweet);
            stats
                .mention_pair
                .entry((&mention.by, &mention.of))
                .or_default()
                .insert(&mention.tweet);
        }
        let author_of: BTreeMap<&str, &str> = log
            .tweets
            .iter()
            .map(|t| (t.id.as_str(), t.user.as_str()))
            .collect();
        for retweet in &log.retweets {
            stats.users.insert(&retweet.user);
            let author = author_of[retweet.orig.as_str()];
            stats
                .retweet_pair
                .entry((author, &retweet.user))
                .or_default()
                .insert(&retweet.orig);
        }
        stats
    }

    pub fn knows(&self, user: &str) -> bool {
        self.users.contains(user)
    }

    fn set_len(map: &BTreeMap<(&str, &str), BTreeSet<&str>>, key: (&str, &str)) -> usize {
        map.get(&key).map(BTreeSet::len).unwrap_or(0)
    }

    /// The `(w_f, w_m, w_r)` weight vector for the ordered pair `(u, v)`.
    pub fn weight(&self, u: &str, v: &str, mode: FollowWeightMode) -> WeightVector {
        let empty = BTreeSet::new();
        let following = self.following.get(u).unwrap_or(&empty);
        let followers = self.followers.get(u).unwrap_or(&empty);

        let w_f = if following.is_empty() {
            0.0
        } else {
            match mode {
                FollowWeightMode::Reciprocal => {
                    if followers.contains(v) {
                        let reciprocal = following.intersection(followers).count();
                        reciprocal as f64 / following.len() as f64
                    } else {
                        0.0
                    }
                }
                FollowWeightMode::Literal => {
                    let numerator =
                        usize::from(following.contains(u) && followers.contains(u));
                    numerator as f64 / following.len() as f64
                }
            }
        };

        let mention_total = self.mention_tweets.get(u).map(BTreeSet::len).unwrap_or(0);
        let w_m = if mention_total == 0 {
            0.0
        } else {
            Self::set_len(&self.mention_pair, (u, v)) as f64 / mention_total as f64
        };

        let tweet_total = self.tweet_count.get(u).copied().unwrap_or(0);
        let w_r = if tweet_total == 0 {
            0.0
        } else {
            Self::set_len(&self.retweet_pair, (u, v)) as f64 / tweet_total as f64
        };

        WeightVector {
            follow: w_f,
            mention: w_m,
            retweet: w_r,
        }
    }
}

/// Relationship-weight vector for the pair `(u, v)`, built over the whole
/// log (weights are not label-filtered).
pub fn compute_weights(
    log: &InteractionLog,
    u: &str,
    v: &str,
    mode: FollowWeightMode,
) -> Result<WeightVector> {
    if u == v {
        return Err(Error::domain("weight pair requires two distinct users"));
    }
    let stats = UserStats::build(log);
    for user in [u, v] {
        if !stats.knows(user) {
            return Err(Error::domain(format!("unknown user: {user}")));
        }
    }
    Ok(stats.weight(u, v, mode))
}

/// Reconstructs every propagation network of the given class from the log.
///
/// Zero-arc (isolated-source) networks are dropped: they carry no dipaths
/// and therefore no distance signal.
pub fn build_traces(
    log: &InteractionLog,
    label: &str,
    cfg: &IngestConfig,
) -> Result<Vec<PropagationNetwork>> {
    let stats = UserStats::build(log);

    // Earliest class tweet per user; propagation requires strict precedence.
    let mut earliest: BTreeMap<&str, i64> = BTreeMap::new();
    for tweet in &log.tweets {
        if tweet.label == label {
            earliest
                .entry(&tweet.user)
                .and_modify(|t| *t = (*t).min(tweet.ts))
                .or_insert(tweet.ts);
        }
    }

    let tweet_index: BTreeMap<&str, &TweetRecord> =
        log.tweets.iter().map(|t| (t.id.as_str(), t)).collect();
    let mut mention_pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
    for m in &log.mentions {
        if tweet_index[m.tweet.as_str()].label == label {
            mention_pairs.insert((&m.by, &m.of));
        }
    }
    let mut retweet_pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
    for r in &log.retweets {
        let orig = tweet_index[r.orig.as_str()];
        if orig.label == label {
            retweet_pairs.insert((&orig.user, &r.user));
        }
    }

    let follows: BTreeSet<(&str, &str)> = log
        .follows
        .iter()
        .map(|(src, dst)| (src.as_str(), dst.as_str()))
        .collect();

    let mut arcs: Vec<(&str, &str)> = Vec::new();
    for (&u, &tu) in &earliest {
        for (&v, &tv) in &earliest {
            if u == v || tu >= tv {
                continue;
            }
            let related = follows.contains(&(v, u))
                || mention_pairs.contains(&(u, v))
                || retweet_pairs.contains(&(u, v));
            if related {
                arcs.push((u, v));
            }
        }
    }

    if cfg.tree_mode {
        // Keep only the nearest earlier propagator per node: the parent with
        // the latest earliest-class tweet, ties to the smallest user id.
        let mut best: BTreeMap<&str, (&str, i64)> = BTreeMap::new();
        for &(u, v) in &arcs {
            let candidate = (u, earliest[u]);
            best.entry(v)
                .and_modify(|cur| {
                    if candidate.1 > cur.1 || (candidate.1 == cur.1 && candidate.0 < cur.0) {
                        *cur = candidate;
                    }
                })
                .or_insert(candidate);
        }
        arcs = best.iter().map(|(&v, &(u, _))| (u, v)).collect();
    }

    let mut out_arcs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut has_incoming: BTreeSet<&str> = BTreeSet::new();
    for &(u, v) in &arcs {
        out_arcs.entry(u).or_default().push(v);
        has_incoming.insert(v);
    }

    let mut networks = Vec::new();
    for &source in earliest.keys() {
        if has_incoming.contains(source) {
            continue;
        }
        // Nodes reachable from this source; isolated sources are dropped.
        let mut reachable: BTreeSet<&str> = BTreeSet::new();
        reachable.insert(source);
        let mut frontier = vec![source];
        while let Some(node) = frontier.pop() {
            for &next in out_arcs.get(node).map(Vec::as_slice).unwrap_or(&[]) {
                if reachable.insert(next) {
                    frontier.push(next);
                }
            }
        }
        let induced: Vec<(&str, &str)> = arcs
            .iter()
            .copied()
            .filter(|(u, _)| reachable.contains(u))
            .collect();
        if induced.is_empty() {
            continue;
        }

        // Propagation level per node: longest-path depth from the source.
        // Processing nodes in timestamp order is a topological order, since
        // every arc goes strictly forward in time.
        let mut order: Vec<&str> = reachable.iter().copied().collect();
        order.sort_by_key(|u| (earliest[u], *u));
        let mut depth: BTreeMap<&str, u32> = BTreeMap::new();
        depth.insert(source, 0);
        for &u in &order {
            let du = match depth.get(u) {
                Some(&d) => d,
                None => continue,
            };
            for &v in out_arcs.get(u).map(Vec::as_slice).unwrap_or(&[]) {
                let entry = depth.entry(v).or_insert(0);
                *entry = (*entry).max(du + 1);
            }
        }

        let network_arcs: Vec<Arc> = induced
            .iter()
            .map(|&(u, v)| {
                Arc::new(
                    u,
                    v,
                    stats.weight(u, v, cfg.follow_weight),
                    depth[v],
                )
            })
            .collect();
        networks.push(PropagationNetwork::new(
            source,
            Some(label.to_string()),
            network_arcs,
        ));
    }
    Ok(networks)
}

/// Per-class corpus counts: distinct users, propagation links, networks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassStats {
    pub users: usize,
    pub links: usize,
    pub networks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub per_class: BTreeMap<String, ClassStats>,
}

/// Summarizes a set of networks per class label.
pub fn dataset_stats(networks: &[PropagationNetwork]) -> DatasetStats {
    let mut users: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    let mut per_class: BTreeMap<String, ClassStats> = BTreeMap::new();
    for net in networks {
        let label = net.label().unwrap_or("(unlabeled)").to_string();
        let entry = per_class.entry(label.clone()).or_insert(ClassStats {
            users: 0,
            links: 0,
            networks: 0,
        });
        entry.links += net.arc_count();
        entry.networks += 1;
        let seen = users.entry(label).or_default();
        for node in net.nodes() {
            seen.insert(node);
        }
    }
    for (label, seen) in users {
        per_class.get_mut(&label).expect("same keys").users = seen.len();
    }
    DatasetStats { per_class }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:>8} {:>12} {:>8}", "class", "users", "prop links", "prnets")?;
        for (label, stats) in &self.per_class {
            writeln!(
                f,
                "{:<16} {:>8} {:>12} {:>8}",
                label, stats.users, stats.links, stats.networks
            )?;
        }
        Ok(())
    }
}
