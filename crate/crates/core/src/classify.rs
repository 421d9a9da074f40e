//! Nash tests and structural recognition of the equilibrium graph classes.

use std::fmt;

use serde::Serialize;

use crate::best_response::{best_response_set, BestResponseSet};
use crate::condensation::{condensation, Condensation};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::model::Game;
use crate::scalar::Scalar;

/// Structural tag of G(x). Depends only on the graph, never on β or η.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind")]
pub enum GraphClass {
    /// m = 1: `l` mutual pairs plus `r` zero-in-degree nodes linking into them.
    C2lr {
        l: usize,
        r: usize,
    },
    /// m = 2: undirected, every component a ring. Lengths in descending order.
    RingUnion {
        lengths: Vec<usize>,
    },
    /// m = 2: 3-rings plus one Butterfly, or plus one 2-clique whose outside
    /// links land on 3-ring nodes.
    GB3Member,
    /// m = 2: rings of any length plus one Butterfly (when not `GB3Member`).
    ButterflyComposite,
    Other,
}

impl GraphClass {
    /// Compact tag used in CSV output and histograms.
    pub fn tag(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphClass::C2lr { l, r } => write!(f, "C2lr({l},{r})"),
            GraphClass::RingUnion { lengths } => {
                let parts: Vec<String> = lengths.iter().map(ToString::to_string).collect();
                write!(f, "RingUnion({})", parts.join(","))
            }
            GraphClass::GB3Member => write!(f, "GB3Member"),
            GraphClass::ButterflyComposite => write!(f, "ButterflyComposite"),
            GraphClass::Other => write!(f, "Other"),
        }
    }
}

pub fn classify(config: &Configuration) -> GraphClass {
    match config.m() {
        1 => classify_m1(config),
        2 => classify_m2(config),
        _ => GraphClass::Other,
    }
}

/// Recognizes C₂^{l,r}: every node is in a mutual pair, or has no in-links
/// and points at a pair node.
pub fn classify_m1(config: &Configuration) -> GraphClass {
    if config.m() != 1 {
        return GraphClass::Other;
    }
    let n = config.n();
    let target = |i: usize| config.action(i)[0];
    let paired: Vec<bool> = (0..n).map(|i| target(target(i)) == i).collect();
    let in_deg = config.in_degrees();
    let mut r = 0;
    for i in 0..n {
        if paired[i] {
            continue;
        }
        if in_deg[i] != 0 || !paired[target(i)] {
            return GraphClass::Other;
        }
        r += 1;
    }
    GraphClass::C2lr { l: (n - r) / 2, r }
}

/// What a strongly connected component looks like in an m = 2 graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentShape {
    Singleton,
    TwoClique,
    Ring(usize),
    Butterfly,
    Irregular,
}

fn is_closed(config: &Configuration, members: &[usize]) -> bool {
    members
        .iter()
        .all(|&v| config.action(v).iter().all(|t| members.contains(t)))
}

/// The 5-node Butterfly: a centre c receiving links from the other four,
/// whose remaining links form two mutual pairs, each pair holding exactly
/// one of c's targets.
fn is_butterfly(config: &Configuration, members: &[usize]) -> bool {
    if members.len() != 5 || config.m() != 2 || !is_closed(config, members) {
        return false;
    }
    let in_deg = |v: usize| members.iter().filter(|&&u| config.links(u, v)).count();
    let Some(&centre) = members.iter().find(|&&v| in_deg(v) == 4) else {
        return false;
    };
    let centre_targets = config.action(centre);
    let partner = |v: usize| -> usize {
        let a = config.action(v);
        if a[0] == centre {
            a[1]
        } else {
            a[0]
        }
    };
    members.iter().filter(|&&v| v != centre).all(|&v| {
        let p = partner(v);
        p != centre
            && partner(p) == v
            && (centre_targets.contains(&v) != centre_targets.contains(&p))
    })
}

pub fn component_shape(config: &Configuration, members: &[usize]) -> ComponentShape {
    match members.len() {
        1 => return ComponentShape::Singleton,
        2 => return ComponentShape::TwoClique,
        _ => {}
    }
    if config.m() == 2
        && is_closed(config, members)
        && members
            .iter()
            .all(|&v| config.action(v).iter().all(|&t| config.links(t, v)))
    {
        return ComponentShape::Ring(members.len());
    }
    if is_butterfly(config, members) {
        return ComponentShape::Butterfly;
    }
    ComponentShape::Irregular
}

fn shapes(config: &Configuration, h: &Condensation) -> Vec<ComponentShape> {
    h.components
        .iter()
        .map(|members| component_shape(config, members))
        .collect()
}

pub fn classify_m2(config: &Configuration) -> GraphClass {
    if config.m() != 2 {
        return GraphClass::Other;
    }
    if config.is_undirected() {
        let h = condensation(config);
        let mut lengths: Vec<usize> = h.components.iter().map(Vec::len).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        return GraphClass::RingUnion { lengths };
    }
    let h = condensation(config);
    let shapes = shapes(config, &h);

    let mut special = None;
    let mut all_rings_are_triangles = true;
    for (c, shape) in shapes.iter().enumerate() {
        match shape {
            ComponentShape::Ring(len) => all_rings_are_triangles &= *len == 3,
            ComponentShape::Butterfly | ComponentShape::TwoClique => {
                if special.is_some() {
                    return GraphClass::Other;
                }
                special = Some((c, *shape));
            }
            _ => return GraphClass::Other,
        }
    }
    match special {
        Some((_, ComponentShape::Butterfly)) => {
            if all_rings_are_triangles {
                GraphClass::GB3Member
            } else {
                GraphClass::ButterflyComposite
            }
        }
        Some((c, ComponentShape::TwoClique)) => {
            let lands_on_triangles = h.components[c].iter().all(|&v| {
                config
                    .action(v)
                    .iter()
                    .filter(|t| !h.components[c].contains(t))
                    .all(|&t| shapes[h.component_of[t]] == ComponentShape::Ring(3))
            });
            if all_rings_are_triangles && lands_on_triangles {
                GraphClass::GB3Member
            } else {
                GraphClass::Other
            }
        }
        _ => GraphClass::Other,
    }
}

/// Whether `class` lies in the set the best-response dynamics is eventually
/// trapped in, for a game with `n` nodes and out-degree `m`.
pub fn in_limit_class(n: usize, m: usize, class: &GraphClass) -> bool {
    match (m, class) {
        (1, GraphClass::C2lr { l, r }) => *l == n / 2 && *r == n % 2,
        (2, GraphClass::RingUnion { .. } | GraphClass::GB3Member) => true,
        _ => false,
    }
}

/// A player not playing a best response, with an optimal alternative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub player: usize,
    pub current: Vec<usize>,
    pub improvement: Vec<usize>,
}

/// Every player's best-response set, computed once.
pub fn all_best_responses<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
) -> Result<Vec<BestResponseSet<S>>> {
    (0..game.n())
        .map(|s| best_response_set(game, config, s))
        .collect()
}

fn witness_from<S>(config: &Configuration, br: &BestResponseSet<S>) -> Option<Witness> {
    let current = config.action(br.player);
    (!br.contains(current)).then(|| Witness {
        player: br.player,
        current: current.to_vec(),
        improvement: br.actions[0].clone(),
    })
}

/// Nash test. The witness is the smallest deviating player together with
/// its lexicographically smallest optimal action.
pub fn is_nash<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
) -> Result<(bool, Option<Witness>)> {
    game.check(config)?;
    for s in 0..game.n() {
        let br = best_response_set(game, config, s)?;
        if let Some(w) = witness_from(config, &br) {
            return Ok((false, Some(w)));
        }
    }
    Ok((true, None))
}

pub fn is_strict_nash<S: Scalar>(game: &Game<S>, config: &Configuration) -> Result<bool> {
    game.check(config)?;
    for s in 0..game.n() {
        let br = best_response_set(game, config, s)?;
        if !(br.is_singleton() && br.actions[0] == config.action(s)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Necessary conditions on ℋ(x) for an m = 2 equilibrium, checked on the
/// graph alone: every component is a source or a sink, non-sink components
/// are singletons or 2-cliques, sink components are rings or the Butterfly.
pub fn condensation_conditions(config: &Configuration) -> Result<bool> {
    if config.m() != 2 {
        return Err(Error::WrongOutDegree {
            expected: 2,
            actual: config.m(),
        });
    }
    let h = condensation(config);
    let ok = h.components.iter().enumerate().all(|(c, members)| {
        let shape = component_shape(config, members);
        if h.is_sink(c) {
            matches!(shape, ComponentShape::Ring(_) | ComponentShape::Butterfly)
        } else {
            h.is_source(c) && matches!(shape, ComponentShape::Singleton | ComponentShape::TwoClique)
        }
    });
    Ok(ok)
}

/// [`condensation_conditions`] with the equilibrium precondition enforced.
pub fn check_condensation_necessary<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
) -> Result<bool> {
    let (nash, _) = is_nash(game, config)?;
    if !nash {
        return Err(Error::NotNash);
    }
    condensation_conditions(config)
}

/// Known non-equilibrium patterns among graphs that satisfy the condensation
/// conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RingAttachment {
    /// A singleton linking to two adjacent nodes of a ring of length ≥ 4.
    SingletonOnAdjacentPair,
    /// A 2-clique whose two outside links hit the same node of a ring of
    /// length ≥ 4.
    CliqueOnSingleNode,
}

pub fn find_ring_attachments(config: &Configuration) -> Vec<RingAttachment> {
    if config.m() != 2 {
        return Vec::new();
    }
    let h = condensation(config);
    let long_ring = |v: usize| {
        matches!(
            component_shape(config, &h.components[h.component_of[v]]),
            ComponentShape::Ring(len) if len >= 4
        )
    };
    let in_deg = config.in_degrees();
    let mut found = Vec::new();
    for members in &h.components {
        match *members.as_slice() {
            [s] if in_deg[s] == 0 => {
                let a = config.action(s);
                if long_ring(a[0])
                    && h.component_of[a[0]] == h.component_of[a[1]]
                    && config.is_mutual(a[0], a[1])
                {
                    found.push(RingAttachment::SingletonOnAdjacentPair);
                }
            }
            [j, k] => {
                let outside = |v: usize, partner: usize| {
                    config.action(v).iter().copied().find(|&t| t != partner)
                };
                if let (Some(a), Some(b)) = (outside(j, k), outside(k, j)) {
                    if a == b && long_ring(a) {
                        found.push(RingAttachment::CliqueOnSingleNode);
                    }
                }
            }
            _ => {}
        }
    }
    found
}

/// Verdict on a single configuration.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub is_nash: bool,
    pub is_strict: bool,
    pub witness: Option<Witness>,
    pub class: GraphClass,
    /// m = 2 only.
    pub condensation_ok: Option<bool>,
    /// Players whose best response is not unique.
    pub non_unique_players: Vec<usize>,
}

pub fn analyze<S: Scalar>(game: &Game<S>, config: &Configuration) -> Result<EquilibriumReport> {
    game.check(config)?;
    let brs = all_best_responses(game, config)?;
    let witness = brs.iter().find_map(|br| witness_from(config, br));
    let is_nash = witness.is_none();
    let is_strict = is_nash && brs.iter().all(BestResponseSet::is_singleton);
    let condensation_ok = match game.m() {
        2 => Some(condensation_conditions(config)?),
        _ => None,
    };
    Ok(EquilibriumReport {
        is_nash,
        is_strict,
        witness,
        class: classify(config),
        condensation_ok,
        non_unique_players: brs
            .iter()
            .filter(|br| !br.is_singleton())
            .map(|br| br.player)
            .collect(),
    })
}
