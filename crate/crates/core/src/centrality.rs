//! Bonacich centrality and expected hitting times of the walk P(x).

use serde::Serialize;

use crate::config::Configuration;
use crate::error::Result;
use crate::linalg::{solve, Matrix};
use crate::model::Game;
use crate::scalar::{Scalar, FLOAT_REL_TOL};

/// π: a probability vector with strictly positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector<S> {
    pub pi: Vec<S>,
}

impl<S: Scalar> CentralityVector<S> {
    pub fn total(&self) -> S {
        self.pi.iter().cloned().fold(S::zero(), |a, b| a + b)
    }
}

/// τ·ˢ: expected steps for the walk started at each node to reach `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimeVector<S> {
    pub target: usize,
    pub tau: Vec<S>,
}

/// Solves (I − βRᵀ) π = (1 − β) η.
pub fn bonacich_direct<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
) -> Result<CentralityVector<S>> {
    game.check(config)?;
    let n = game.n();
    let mut a = Matrix::<S>::identity(n);
    // Row j of (I − βRᵀ) collects the in-links of j.
    for (i, j) in config.edges() {
        a[(j, i)] = a[(j, i)].clone() - game.link_weight().clone();
    }
    let pi = solve(a, game.teleport().to_vec())?;
    Ok(CentralityVector { pi })
}

/// (1 − β) Σ_{k=0..K} βᵏ (Rᵀ)ᵏ η. The L1 truncation error is at most βᴷ⁺¹.
pub fn bonacich_power_series<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
    terms: usize,
) -> Result<CentralityVector<S>> {
    game.check(config)?;
    let n = game.n();
    // term_k = (1 − β) βᵏ (Rᵀ)ᵏ η, advanced by one βRᵀ multiplication per step.
    let mut term = game.teleport().to_vec();
    let mut pi = term.clone();
    for _ in 0..terms {
        let mut next = vec![S::zero(); n];
        for (i, j) in config.edges() {
            if !term[i].is_zero() {
                next[j] = next[j].clone() + game.link_weight().clone() * term[i].clone();
            }
        }
        for (p, t) in pi.iter_mut().zip(&next) {
            *p = p.clone() + t.clone();
        }
        term = next;
    }
    Ok(CentralityVector { pi })
}

/// Solves τᵢ = 1 + Σⱼ Pᵢⱼ τⱼ for i ≠ s with τₛ = 0, i.e. (I − P₋ₛ) τ = 𝟙 on
/// the other n − 1 nodes. Only the actions of nodes other than `s` matter.
pub fn hitting_times<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
    s: usize,
) -> Result<HittingTimeVector<S>> {
    game.check(config)?;
    game.check_node(s)?;
    let n = game.n();
    let others: Vec<usize> = (0..n).filter(|&v| v != s).collect();
    // Position of each node in the reduced system.
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in others.iter().enumerate() {
        slot[v] = k;
    }
    let size = n - 1;
    let mut a = Matrix::zeros(size, size);
    for (row, &i) in others.iter().enumerate() {
        for (col, &j) in others.iter().enumerate() {
            let mut entry = S::zero() - game.teleport()[j].clone();
            if row == col {
                entry = entry + S::one();
            }
            a[(row, col)] = entry;
        }
        for &j in config.action(i) {
            if j != s {
                let col = slot[j];
                a[(row, col)] = a[(row, col)].clone() - game.link_weight().clone();
            }
        }
    }
    let reduced = solve(a, vec![S::one(); size])?;
    let mut tau = vec![S::zero(); n];
    for (k, v) in others.into_iter().enumerate() {
        tau[v] = reduced[k].clone();
    }
    Ok(HittingTimeVector { target: s, tau })
}

/// uₛ(x) = (1 + Σᵢ Pₛᵢ(xₛ) τᵢˢ(x₋ₛ))⁻¹, which equals πₛ.
pub fn utility<S: Scalar>(game: &Game<S>, config: &Configuration, s: usize) -> Result<S> {
    let times = hitting_times(game, config, s)?;
    Ok(utility_from_times(game, config, s, &times.tau))
}

pub(crate) fn utility_from_times<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
    s: usize,
    tau: &[S],
) -> S {
    let mut expected_return = S::one();
    for (i, t) in tau.iter().enumerate() {
        if i != s {
            expected_return = expected_return + game.transition(config, s, i) * t.clone();
        }
    }
    S::one() / expected_return
}

/// Outcome of checking the hitting-time upper bounds for one target.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub target: usize,
    /// 1 / ((1 − β) ηₛ), the bound on every τᵢˢ.
    pub uniform_bound: f64,
    /// Nodes i ≠ s with τᵢˢ above the uniform bound.
    pub uniform_violations: Vec<usize>,
    /// Nodes attaining the uniform bound with equality.
    pub uniform_tight: Vec<usize>,
    pub in_neighbors_empty: bool,
    /// The uniform bound is attained somewhere only if N⁻ₛ = ∅.
    pub tightness_consistent: bool,
    pub local: Option<LocalBoundReport>,
}

/// Sharper bounds available when some k links to s (m ≤ 2).
#[derive(Debug, Clone, Serialize)]
pub struct LocalBoundReport {
    pub k: usize,
    /// T₁ = (1 − β/2)(1 − β)⁻¹(ηₛ + βη_k/2)⁻¹, the bound on τ_kˢ.
    pub t1: f64,
    /// T₂ = (1 − β)⁻¹(ηₛ + βη_k/2)⁻¹, the bound on every other τᵢˢ.
    pub t2: f64,
    pub violations: Vec<usize>,
    /// τ_k = T₁ and τᵢ = T₂ for all i ≠ k, s.
    pub all_tight: bool,
    pub second_neighborhood_size: usize,
    /// Joint tightness implies |N⁻²ₛ| = 1.
    pub tightness_consistent: bool,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.uniform_violations.is_empty()
            && self.tightness_consistent
            && self
                .local
                .as_ref()
                .is_none_or(|l| l.violations.is_empty() && l.tightness_consistent)
    }
}

/// `a ≤ b`, with relative slack on the float backend.
fn at_most<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        a <= b
    } else {
        a.to_f64() <= b.to_f64() * (1.0 + FLOAT_REL_TOL)
    }
}

/// Checks τᵢˢ ≤ ((1 − β) ηₛ)⁻¹ for all i, and, when `k ∈ N⁻ₛ` is given (or
/// N⁻ₛ is nonempty, in which case its smallest member is used) and m ≤ 2, the
/// T₁/T₂ bounds. Any violation indicates a solver bug.
pub fn check_hitting_bounds<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
    s: usize,
    k: Option<usize>,
) -> Result<BoundReport> {
    let times = hitting_times(game, config, s)?;
    let tau = &times.tau;
    let one = S::one();
    let one_minus_beta = one.clone() - game.beta().clone();
    let eta = game.eta();
    let bound = one.clone() / (one_minus_beta.clone() * eta[s].clone());

    let others = || (0..game.n()).filter(move |&i| i != s);
    let uniform_violations: Vec<usize> = others().filter(|&i| !at_most(&tau[i], &bound)).collect();
    let uniform_tight: Vec<usize> = others().filter(|&i| tau[i].ties(&bound)).collect();
    let (in_first, in_second) = config.in_neighborhoods(s);
    let tightness_consistent = uniform_tight.is_empty() || in_first.is_empty();

    let k = match k {
        Some(k) if in_first.contains(&k) => Some(k),
        Some(_) => None,
        None => in_first.iter().next().copied(),
    };
    let local = match k {
        Some(k) if game.m() <= 2 => {
            let half_beta = game.beta().clone() / S::from_usize(2);
            let mass = eta[s].clone() + half_beta.clone() * eta[k].clone();
            let t2 = one.clone() / (one_minus_beta * mass);
            let t1 = (one - half_beta) * t2.clone();
            let mut violations = Vec::new();
            let mut all_tight = true;
            for i in others() {
                let cap = if i == k { &t1 } else { &t2 };
                if !at_most(&tau[i], cap) {
                    violations.push(i);
                }
                all_tight &= tau[i].ties(cap);
            }
            Some(LocalBoundReport {
                k,
                t1: t1.to_f64(),
                t2: t2.to_f64(),
                violations,
                all_tight,
                second_neighborhood_size: in_second.len(),
                tightness_consistent: !all_tight || in_second.len() == 1,
            })
        }
        _ => None,
    };

    Ok(BoundReport {
        target: s,
        uniform_bound: bound.to_f64(),
        uniform_violations,
        uniform_tight,
        in_neighbors_empty: in_first.is_empty(),
        tightness_consistent,
        local,
    })
}
