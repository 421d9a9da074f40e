//! Best-response sets.
//!
//! Since Pₛᵢ(xₛ) only depends on the player's own links and τ·ˢ only on the
//! others', maximizing uₛ is minimizing Σ_{i∈xₛ} τᵢˢ. The minimizers are the
//! m-subsets made of the m smallest hitting times, with ties expanded.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::centrality::hitting_times;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::model::Game;
use crate::scalar::{binomial, Scalar};

/// Upper bound on the number of materialized best responses.
pub const MAX_BEST_RESPONSES: u128 = 1_000_000;

/// ℬₛ(x₋ₛ): every optimal action of `player`, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseSet<S> {
    pub player: usize,
    pub actions: Vec<Vec<usize>>,
    /// (1/m) Σ_{i∈a} τᵢˢ for any member `a`.
    pub min_value: S,
}

impl<S> BestResponseSet<S> {
    pub fn contains(&self, action: &[usize]) -> bool {
        self.actions
            .binary_search_by(|a| a.as_slice().cmp(action))
            .is_ok()
    }

    pub fn is_singleton(&self) -> bool {
        self.actions.len() == 1
    }
}

pub fn best_response_set<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
    s: usize,
) -> Result<BestResponseSet<S>> {
    let times = hitting_times(game, config, s)?;
    best_response_from_times(game.m(), s, &times.tau)
}

/// Best responses given τ·ˢ. Values are grouped into tie classes by sorting
/// and chaining `Scalar::ties` between neighbours; over rationals that is
/// exact equality.
pub fn best_response_from_times<S: Scalar>(
    m: usize,
    s: usize,
    tau: &[S],
) -> Result<BestResponseSet<S>> {
    let mut order: Vec<usize> = (0..tau.len()).filter(|&i| i != s).collect();
    order.sort_by(|&a, &b| {
        tau[a]
            .partial_cmp(&tau[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    // Tie class containing the m-th smallest value.
    let mut start = m - 1;
    while start > 0 && tau[order[start - 1]].ties(&tau[order[start]]) {
        start -= 1;
    }
    let mut end = m;
    while end < order.len() && tau[order[end - 1]].ties(&tau[order[end]]) {
        end += 1;
    }
    let forced = &order[..start];
    let mut pool: Vec<usize> = order[start..end].to_vec();
    pool.sort_unstable();
    let pick = m - start;

    let count = binomial(pool.len(), pick);
    if count > MAX_BEST_RESPONSES {
        return Err(Error::TooManyBestResponses(count));
    }

    let mut actions = Vec::with_capacity(count as usize);
    for chosen in combinations(&pool, pick) {
        let mut action: Vec<usize> = forced.iter().copied().chain(chosen).collect();
        action.sort_unstable();
        actions.push(action);
    }
    actions.sort();

    let sum = order[..m]
        .iter()
        .fold(S::zero(), |acc, &i| acc + tau[i].clone());
    let min_value = sum / S::from_usize(m);
    Ok(BestResponseSet {
        player: s,
        actions,
        min_value,
    })
}

/// All k-subsets of `items`, in lexicographic order of positions.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    if k > n {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Best responses for m = 1 read off the graph: the in-neighbours of `s` if
/// there are any, otherwise every other node. No linear solve.
pub fn structural_best_response_m1(config: &Configuration, s: usize) -> Result<Vec<Vec<usize>>> {
    if config.m() != 1 {
        return Err(Error::WrongOutDegree {
            expected: 1,
            actual: config.m(),
        });
    }
    let in_first = config.in_neighbors(s);
    let nodes: Vec<usize> = if in_first.is_empty() {
        (0..config.n()).filter(|&v| v != s).collect()
    } else {
        in_first
    };
    Ok(nodes.into_iter().map(|v| vec![v]).collect())
}

/// Where the best responses of `s` can lie when m = 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportM2 {
    /// N⁻²ₛ = ∅: every pair is optimal.
    AllPairs,
    /// N⁻²ₛ = {r}: the optimal actions are exactly the pairs containing r.
    Anchored { r: usize },
    /// |N⁻²ₛ| ≥ 2: optimal actions are among pairs inside N⁻ₛ, or an
    /// in-neighbour v together with one of v's in-neighbours.
    Local { pairs: BTreeSet<(usize, usize)> },
}

impl SupportM2 {
    pub fn admits(&self, action: &[usize]) -> bool {
        match (self, action) {
            (SupportM2::AllPairs, _) => true,
            (SupportM2::Anchored { r }, _) => action.contains(r),
            (SupportM2::Local { pairs }, &[a, b]) => pairs.contains(&(a.min(b), a.max(b))),
            _ => false,
        }
    }

    /// Exact best-response set where the structure pins it down.
    pub fn exact_actions(&self, n: usize, s: usize) -> Option<Vec<Vec<usize>>> {
        let others = || (0..n).filter(move |&v| v != s);
        match self {
            SupportM2::AllPairs => Some(
                others()
                    .flat_map(|v| others().filter(move |&w| w > v).map(move |w| vec![v, w]))
                    .collect(),
            ),
            SupportM2::Anchored { r } => Some(
                others()
                    .filter(|v| v != r)
                    .map(|v| {
                        let mut a = vec![*r, v];
                        a.sort_unstable();
                        a
                    })
                    .collect(),
            ),
            SupportM2::Local { .. } => None,
        }
    }
}

pub fn structural_br_support_m2(config: &Configuration, s: usize) -> Result<SupportM2> {
    if config.m() != 2 {
        return Err(Error::WrongOutDegree {
            expected: 2,
            actual: config.m(),
        });
    }
    let (in_first, in_second) = config.in_neighborhoods(s);
    match in_second.len() {
        0 => Ok(SupportM2::AllPairs),
        1 => Ok(SupportM2::Anchored {
            r: *in_first
                .iter()
                .next()
                .expect("N⁻² nonempty implies N⁻ nonempty"),
        }),
        _ => {
            let mut pairs = BTreeSet::new();
            for &v in &in_first {
                for &w in &in_first {
                    if v < w {
                        pairs.insert((v, w));
                    }
                }
                for w in config.in_neighbors(v) {
                    if w != s {
                        pairs.insert((v.min(w), v.max(w)));
                    }
                }
            }
            Ok(SupportM2::Local { pairs })
        }
    }
}
