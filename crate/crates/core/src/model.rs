//! Numeric view of a game and the matrices R(x) and P(x).

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::params::GameParams;
use crate::scalar::Scalar;

/// [`GameParams`] converted into a numeric backend, with the constants every
/// solve needs precomputed.
#[derive(Debug, Clone)]
pub struct Game<S> {
    params: GameParams,
    beta: S,
    eta: Vec<S>,
    /// (1 − β)·η_j: teleport mass into j from any state.
    teleport: Vec<S>,
    /// β / m: weight of each out-link.
    link_weight: S,
}

impl<S: Scalar> Game<S> {
    pub fn new(params: &GameParams) -> Self {
        let beta = S::from_rational(params.beta());
        let eta: Vec<S> = params.eta().iter().map(S::from_rational).collect();
        let one_minus_beta = S::one() - beta.clone();
        let teleport = eta
            .iter()
            .map(|e| one_minus_beta.clone() * e.clone())
            .collect();
        let link_weight = beta.clone() / S::from_usize(params.m());
        Self {
            params: params.clone(),
            beta,
            eta,
            teleport,
            link_weight,
        }
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn m(&self) -> usize {
        self.params.m()
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    pub fn eta(&self) -> &[S] {
        &self.eta
    }

    pub fn teleport(&self) -> &[S] {
        &self.teleport
    }

    pub fn link_weight(&self) -> &S {
        &self.link_weight
    }

    /// Checks that `config` is a profile of this game.
    pub fn check(&self, config: &Configuration) -> Result<()> {
        if config.n() != self.n() || config.m() != self.m() {
            return Err(Error::InvalidConfig(format!(
                "profile has n = {}, m = {} but the game has n = {}, m = {}",
                config.n(),
                config.m(),
                self.n(),
                self.m()
            )));
        }
        Ok(())
    }

    pub fn check_node(&self, s: usize) -> Result<()> {
        if s >= self.n() {
            return Err(Error::InvalidConfig(format!(
                "node {} outside 1..={}",
                s + 1,
                self.n()
            )));
        }
        Ok(())
    }

    /// P_ij(x) = β R_ij + (1 − β) η_j, read directly from the profile.
    pub fn transition(&self, config: &Configuration, i: usize, j: usize) -> S {
        if config.links(i, j) {
            self.link_weight.clone() + self.teleport[j].clone()
        } else {
            self.teleport[j].clone()
        }
    }
}

/// R(x): 1/m on every chosen link.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<S>(pub Matrix<S>);

/// P(x) = β R(x) + (1 − β) 𝟙ηᵀ.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<S>(pub Matrix<S>);

pub fn build_matrices<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
) -> Result<(WeightMatrix<S>, TransitionMatrix<S>)> {
    game.check(config)?;
    let n = game.n();
    let inv_m = S::one() / S::from_usize(game.m());
    let mut r = Matrix::zeros(n, n);
    for (i, j) in config.edges() {
        r[(i, j)] = inv_m.clone();
    }
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] = game.beta().clone() * r[(i, j)].clone() + game.teleport()[j].clone();
        }
    }
    Ok((WeightMatrix(r), TransitionMatrix(p)))
}
