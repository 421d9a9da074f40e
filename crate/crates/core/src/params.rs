use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, Rational, FLOAT_SUM_TOL};

/// Parameters of the game: node count, out-degree, discount and intrinsic
/// centrality. Stored exactly; numeric backends convert on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameParams {
    n: usize,
    m: usize,
    beta: Rational,
    eta: Vec<Rational>,
}

impl GameParams {
    /// Validates `n ≥ m + 1`, `0 < β < 1`, and `η > 0` summing to exactly 1.
    /// A missing `eta` means the uniform vector.
    pub fn new(n: usize, m: usize, beta: Rational, eta: Option<Vec<Rational>>) -> Result<Self> {
        Self::build(n, m, beta, eta, false)
    }

    /// Like [`GameParams::new`] but accepts `|Σ η − 1| ≤ 1e-12`, for input that
    /// was produced by floating-point tools.
    pub fn new_lenient(
        n: usize,
        m: usize,
        beta: Rational,
        eta: Option<Vec<Rational>>,
    ) -> Result<Self> {
        Self::build(n, m, beta, eta, true)
    }

    pub fn uniform(n: usize, m: usize, beta: Rational) -> Result<Self> {
        Self::new(n, m, beta, None)
    }

    fn build(
        n: usize,
        m: usize,
        beta: Rational,
        eta: Option<Vec<Rational>>,
        lenient: bool,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("out-degree m must be positive".into()));
        }
        if n <= m {
            return Err(Error::InvalidParams(format!(
                "need n >= m + 1, got n = {n}, m = {m}"
            )));
        }
        if !beta.is_positive() || beta >= Rational::one() {
            return Err(Error::InvalidParams(format!(
                "beta must lie in (0, 1), got {}",
                format_rational(&beta)
            )));
        }
        let eta = match eta {
            None => {
                let share = Rational::new(1.into(), n.into());
                vec![share; n]
            }
            Some(eta) => {
                if eta.len() != n {
                    return Err(Error::InvalidParams(format!(
                        "eta has {} entries, expected {n}",
                        eta.len()
                    )));
                }
                if let Some(i) = eta.iter().position(|e| !e.is_positive()) {
                    return Err(Error::InvalidParams(format!(
                        "eta entries must be strictly positive (entry {} is {})",
                        i + 1,
                        format_rational(&eta[i])
                    )));
                }
                let sum: Rational = eta.iter().sum();
                let ok = if lenient {
                    (sum.clone() - Rational::one())
                        .abs()
                        .to_f64()
                        .is_some_and(|d| d <= FLOAT_SUM_TOL)
                } else {
                    sum.is_one()
                };
                if !ok {
                    return Err(Error::InvalidParams(format!(
                        "eta must sum to 1, sums to {}",
                        format_rational(&sum)
                    )));
                }
                eta
            }
        };
        Ok(Self { n, m, beta, eta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn eta(&self) -> &[Rational] {
        &self.eta
    }

    pub fn is_uniform(&self) -> bool {
        self.eta.windows(2).all(|w| w[0] == w[1])
    }

    /// Same β and η with a different out-degree.
    pub fn with_m(&self, m: usize) -> Result<Self> {
        Self::new(self.n, m, self.beta.clone(), Some(self.eta.clone()))
    }
}
