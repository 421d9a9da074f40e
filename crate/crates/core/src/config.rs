//! Strategy profiles and the graph they induce.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

/// A strategy profile: node `i` links to the `m` distinct targets in
/// `action(i)`, never to itself. Actions are kept sorted, so two profiles
/// with the same action sets compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    n: usize,
    m: usize,
    // Row-major: targets[i*m .. (i+1)*m] is node i's action.
    targets: Vec<usize>,
}

impl Configuration {
    /// Builds a profile from 0-based target lists, canonicalizing the order.
    pub fn new(n: usize, m: usize, actions: Vec<Vec<usize>>) -> Result<Self> {
        if actions.len() != n {
            return Err(Error::InvalidConfig(format!(
                "expected {n} actions, got {}",
                actions.len()
            )));
        }
        let mut targets = Vec::with_capacity(n * m);
        for (i, mut action) in actions.into_iter().enumerate() {
            action.sort_unstable();
            validate_action(n, m, i, &action)?;
            targets.extend(action);
        }
        Ok(Self { n, m, targets })
    }

    /// Profile from already sorted, valid actions laid out node by node.
    pub(crate) fn from_flat(n: usize, m: usize, targets: Vec<usize>) -> Self {
        debug_assert_eq!(targets.len(), n * m);
        Self { n, m, targets }
    }

    /// Draws every action uniformly from the m-subsets of V∖{i}.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        if m == 0 || n <= m {
            return Err(Error::InvalidConfig(format!(
                "no valid actions for n = {n}, m = {m}"
            )));
        }
        let mut targets = Vec::with_capacity(n * m);
        for i in 0..n {
            let mut action: Vec<usize> = index::sample(rng, n - 1, m)
                .into_iter()
                .map(|k| if k < i { k } else { k + 1 })
                .collect();
            action.sort_unstable();
            targets.extend(action);
        }
        Ok(Self { n, m, targets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn action(&self, i: usize) -> &[usize] {
        &self.targets[i * self.m..(i + 1) * self.m]
    }

    pub fn actions(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.targets.chunks(self.m)
    }

    pub fn to_actions(&self) -> Vec<Vec<usize>> {
        self.actions().map(<[usize]>::to_vec).collect()
    }

    /// Replaces node `i`'s action. The action must be valid for `i`.
    pub fn set_action(&mut self, i: usize, action: &[usize]) -> Result<()> {
        let mut action = action.to_vec();
        action.sort_unstable();
        validate_action(self.n, self.m, i, &action)?;
        self.targets[i * self.m..(i + 1) * self.m].copy_from_slice(&action);
        Ok(())
    }

    pub fn with_action(&self, i: usize, action: &[usize]) -> Result<Self> {
        let mut next = self.clone();
        next.set_action(i, action)?;
        Ok(next)
    }

    pub fn links(&self, i: usize, j: usize) -> bool {
        self.action(i).contains(&j)
    }

    /// Directed edge set ℰ(x) in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.action(i).iter().map(move |&j| (i, j)))
    }

    /// In-neighbours of `s`: the nodes whose action contains `s`.
    pub fn in_neighbors(&self, s: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.links(i, s)).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &j in &self.targets {
            deg[j] += 1;
        }
        deg
    }

    /// (N⁻ₛ, N⁻²ₛ). Neither depends on `s`'s own action; `s` itself is never
    /// a member of N⁻²ₛ.
    pub fn in_neighborhoods(&self, s: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let first: BTreeSet<usize> = self.in_neighbors(s).into_iter().collect();
        let mut second = first.clone();
        for &t in &first {
            second.extend(self.in_neighbors(t).into_iter().filter(|&v| v != s));
        }
        (first, second)
    }

    /// Edge (i, j) is undirected when (j, i) is also present.
    pub fn is_mutual(&self, i: usize, j: usize) -> bool {
        self.links(i, j) && self.links(j, i)
    }

    /// Every edge is reciprocated.
    pub fn is_undirected(&self) -> bool {
        self.edges().all(|(i, j)| self.links(j, i))
    }
}

fn validate_action(n: usize, m: usize, i: usize, sorted: &[usize]) -> Result<()> {
    if sorted.len() != m {
        return Err(Error::InvalidConfig(format!(
            "node {} has {} targets, expected {m}",
            i + 1,
            sorted.len()
        )));
    }
    if let Some(&bad) = sorted.iter().find(|&&j| j >= n) {
        return Err(Error::InvalidConfig(format!(
            "node {} links to {}, outside 1..={n}",
            i + 1,
            bad + 1
        )));
    }
    if sorted.contains(&i) {
        return Err(Error::InvalidConfig(format!(
            "node {} links to itself",
            i + 1
        )));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfig(format!(
            "node {} lists a target twice",
            i + 1
        )));
    }
    Ok(())
}

/// 1-based `i->a+b` rendering, used in logs and assertion messages.
impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, action) in self.actions().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}->{}", i + 1, format_action(action))?;
        }
        write!(f, "]")
    }
}

/// Sorted 1-based targets joined by `+`, e.g. `2+5`.
pub fn format_action(action: &[usize]) -> String {
    action
        .iter()
        .map(|j| (j + 1).to_string())
        .collect::<Vec<_>>()
        .join("+")
}
