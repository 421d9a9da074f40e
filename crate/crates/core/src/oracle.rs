//! Brute-force ground truth over the whole configuration space.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::best_response::best_response_set;
use crate::classify::{
    classify, condensation_conditions, find_ring_attachments, GraphClass, RingAttachment,
};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::model::Game;
use crate::params::GameParams;
use crate::scalar::{binomial, format_rational, Rational};

/// Largest configuration space the oracle will walk.
pub const MAX_CONFIGURATIONS: u128 = 100_000_000;

/// Every profile for (n, m) in lexicographic order, addressable by index.
/// Node 0's action is the most significant digit.
#[derive(Debug, Clone)]
pub struct ConfigurationSpace {
    n: usize,
    m: usize,
    /// Per node: the m-subsets of V∖{i}, sorted.
    actions: Vec<Vec<Vec<usize>>>,
    total: u128,
}

impl ConfigurationSpace {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m == 0 || n <= m {
            return Err(Error::InvalidParams(format!(
                "no profiles for n = {n}, m = {m}"
            )));
        }
        let per_node = binomial(n - 1, m);
        let total = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(per_node));
        let total = match total {
            Some(t) if t <= MAX_CONFIGURATIONS => t,
            Some(t) => return Err(Error::SpaceTooLarge(t)),
            None => return Err(Error::SpaceTooLarge(u128::MAX)),
        };
        let actions = (0..n)
            .map(|i| {
                let others: Vec<usize> = (0..n).filter(|&v| v != i).collect();
                subsets(&others, m)
            })
            .collect();
        Ok(Self {
            n,
            m,
            actions,
            total,
        })
    }

    pub fn len(&self) -> u128 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn get(&self, mut index: u64) -> Configuration {
        let radix = self.actions[0].len() as u64;
        let mut digits = vec![0usize; self.n];
        for d in digits.iter_mut().rev() {
            *d = (index % radix) as usize;
            index /= radix;
        }
        let mut flat = Vec::with_capacity(self.n * self.m);
        for (i, d) in digits.into_iter().enumerate() {
            flat.extend_from_slice(&self.actions[i][d]);
        }
        Configuration::from_flat(self.n, self.m, flat)
    }

    pub fn iter(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.total as u64).map(move |i| self.get(i))
    }
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (pos, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[pos + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Exhaustive, duplicate-free stream of profiles, guarded at 10⁸.
pub fn enumerate_configurations(n: usize, m: usize) -> Result<impl Iterator<Item = Configuration>> {
    let space = ConfigurationSpace::new(n, m)?;
    Ok((0..space.len() as u64).map(move |i| space.get(i)))
}

#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    #[serde(serialize_with = "serialize_config")]
    pub config: Configuration,
    pub check: String,
    pub oracle: String,
    pub structural: String,
}

fn serialize_config<S: serde::Serializer>(
    c: &Configuration,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    let one_based: Vec<Vec<usize>> = c
        .actions()
        .map(|a| a.iter().map(|j| j + 1).collect())
        .collect();
    one_based.serialize(ser)
}

fn serialize_configs<S: serde::Serializer>(
    cs: &[Configuration],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct One<'a>(&'a Configuration);
    impl Serialize for One<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            serialize_config(self.0, s)
        }
    }
    let mut seq = ser.serialize_seq(Some(cs.len()))?;
    for c in cs {
        seq.serialize_element(&One(c))?;
    }
    seq.end()
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationResult {
    pub n: usize,
    pub m: usize,
    pub beta: String,
    pub eta: Vec<String>,
    pub total_configs: u128,
    #[serde(serialize_with = "serialize_configs")]
    pub nash: Vec<Configuration>,
    #[serde(serialize_with = "serialize_configs")]
    pub strict: Vec<Configuration>,
    /// Class tag → number of Nash equilibria with that tag.
    pub class_histogram: BTreeMap<String, usize>,
    pub mismatches: Vec<Mismatch>,
}

struct Verdict {
    nash: bool,
    strict: bool,
}

fn judge(game: &Game<Rational>, config: &Configuration) -> Result<Verdict> {
    let mut strict = true;
    for s in 0..game.n() {
        let br = best_response_set(game, config, s)?;
        if !br.contains(config.action(s)) {
            return Ok(Verdict {
                nash: false,
                strict: false,
            });
        }
        strict &= br.is_singleton();
    }
    Ok(Verdict { nash: true, strict })
}

/// What the classification theorems predict for a profile, if anything.
fn predicted(config: &Configuration, class: &GraphClass) -> (Option<bool>, Option<bool>) {
    let n = config.n();
    match config.m() {
        1 => {
            let nash = matches!(class, GraphClass::C2lr { .. });
            let strict = *class == GraphClass::C2lr { l: n / 2, r: 0 } && n.is_multiple_of(2);
            (Some(nash), Some(strict))
        }
        2 => (None, Some(matches!(class, GraphClass::RingUnion { .. }))),
        _ => (None, None),
    }
}

/// Runs the exact Nash and strict-Nash tests on every profile, on the
/// rational backend, and diffs the result against the structural classifier.
pub fn enumerate_nash(params: &GameParams) -> Result<EnumerationResult> {
    enumerate_nash_with_progress(params, None)
}

/// Called with (profiles done, total) roughly every 1% of the space.
pub type Progress<'a> = &'a (dyn Fn(u64, u128) + Sync);

pub fn enumerate_nash_with_progress(
    params: &GameParams,
    progress: Option<Progress<'_>>,
) -> Result<EnumerationResult> {
    let space = ConfigurationSpace::new(params.n(), params.m())?;
    let done = AtomicU64::new(0);
    let stride = (space.len() as u64 / 100).max(1);
    let game = Game::<Rational>::new(params);

    struct Row {
        config: Configuration,
        class: GraphClass,
        verdict: Verdict,
    }
    // Indexed parallel collect keeps lexicographic order.
    let rows: Vec<Row> = (0..space.len() as u64)
        .into_par_iter()
        .map(|i| {
            let config = space.get(i);
            let verdict = judge(&game, &config)?;
            if let Some(report) = progress {
                let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                if d.is_multiple_of(stride) {
                    report(d, space.len());
                }
            }
            let class = classify(&config);
            Ok(Row {
                config,
                class,
                verdict,
            })
        })
        .collect::<Result<_>>()?;

    let mut nash = Vec::new();
    let mut strict = Vec::new();
    let mut class_histogram = BTreeMap::new();
    let mut mismatches = Vec::new();
    for row in rows {
        let (pred_nash, pred_strict) = predicted(&row.config, &row.class);
        let mut mismatch = |check: &str, oracle: bool, structural: bool| {
            mismatches.push(Mismatch {
                config: row.config.clone(),
                check: check.to_string(),
                oracle: oracle.to_string(),
                structural: format!("{structural} ({})", row.class),
            });
        };
        if let Some(p) = pred_nash {
            if p != row.verdict.nash {
                mismatch("nash", row.verdict.nash, p);
            }
        }
        if let Some(p) = pred_strict {
            if p != row.verdict.strict {
                mismatch("strict", row.verdict.strict, p);
            }
        }
        if row.verdict.nash && params.m() == 2 {
            if !condensation_conditions(&row.config)? {
                mismatch("condensation", true, false);
            }
            if !find_ring_attachments(&row.config).is_empty() {
                mismatch("ring_attachment", true, false);
            }
        }
        if row.verdict.nash {
            *class_histogram.entry(row.class.tag()).or_insert(0) += 1;
            if row.verdict.strict {
                strict.push(row.config.clone());
            }
            nash.push(row.config);
        }
    }

    Ok(EnumerationResult {
        n: params.n(),
        m: params.m(),
        beta: format_rational(params.beta()),
        eta: params.eta().iter().map(format_rational).collect(),
        total_configs: space.len(),
        nash,
        strict,
        class_histogram,
        mismatches,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(serialize_with = "serialize_configs")]
    pub counterexamples: Vec<Configuration>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub m: usize,
    pub beta: String,
    pub eta: Vec<String>,
    pub total_configs: u128,
    pub nash_count: usize,
    pub strict_count: usize,
    pub checks: Vec<TheoremCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "n={} m={} beta={} configs={} nash={} strict={}\n",
            self.n, self.m, self.beta, self.total_configs, self.nash_count, self.strict_count
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<4} {:<34} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out
    }
}

/// n! / (2ᵏ k!) for n = 2k: the number of perfect matchings.
pub fn perfect_matchings(n: usize) -> u128 {
    if n % 2 == 1 {
        return 0;
    }
    // (n − 1)!! computed directly; equals n!/(2ᵏ k!).
    (1..n).step_by(2).map(|v| v as u128).product()
}

fn check(name: &str, counterexamples: Vec<Configuration>, detail: String) -> TheoremCheck {
    TheoremCheck {
        name: name.to_string(),
        passed: counterexamples.is_empty(),
        detail,
        counterexamples: counterexamples.into_iter().take(10).collect(),
    }
}

/// Checks the m = 1 and m = 2 classification theorems against the oracle.
pub fn verify_theorems(params: &GameParams) -> Result<VerificationReport> {
    theorem_checks(params, &enumerate_nash(params)?)
}

/// The theorem checks applied to an existing enumeration of `params`.
pub fn theorem_checks(
    params: &GameParams,
    result: &EnumerationResult,
) -> Result<VerificationReport> {
    let n = params.n();
    let of = |check: &str| -> Vec<Configuration> {
        result
            .mismatches
            .iter()
            .filter(|mm| mm.check == check)
            .map(|mm| mm.config.clone())
            .collect()
    };
    let mut checks = Vec::new();
    match params.m() {
        1 => {
            let bad = of("nash");
            let detail = format!("{} equilibria, {} mismatches", result.nash.len(), bad.len());
            checks.push(check("nash set = C2(l,r) class", bad, detail));
            let bad = of("strict");
            let expected = if n.is_multiple_of(2) {
                format!("C2({},0)", n / 2)
            } else {
                "empty".into()
            };
            let detail = format!("expected {expected}, {} mismatches", bad.len());
            checks.push(check("strict set = C2(n/2,0) or empty", bad, detail));
            let expected = perfect_matchings(n);
            let got = result.strict.len() as u128;
            checks.push(TheoremCheck {
                name: "strict count = n!/(2^k k!)".into(),
                passed: got == expected,
                detail: format!("expected {expected}, found {got}"),
                counterexamples: Vec::new(),
            });
        }
        2 => {
            let bad = of("strict");
            let detail = format!("{} strict, {} mismatches", result.strict.len(), bad.len());
            checks.push(check("strict set = ring unions", bad, detail));
            let bad = of("condensation");
            let detail = format!("{} equilibria checked", result.nash.len());
            checks.push(check("nash pass condensation conditions", bad, detail));
            let bad = of("ring_attachment");
            let detail = format!(
                "patterns: {:?}, {:?}",
                RingAttachment::SingletonOnAdjacentPair,
                RingAttachment::CliqueOnSingleNode
            );
            checks.push(check("ring attachments are not nash", bad, detail));
        }
        m => {
            return Err(Error::InvalidParams(format!(
                "theorem verification covers m = 1 and m = 2, got m = {m}"
            )))
        }
    }
    Ok(VerificationReport {
        n,
        m: params.m(),
        beta: result.beta.clone(),
        eta: result.eta.clone(),
        total_configs: result.total_configs,
        nash_count: result.nash.len(),
        strict_count: result.strict.len(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    #[test]
    fn space_sizes() {
        assert_eq!(ConfigurationSpace::new(3, 1).unwrap().len(), 8);
        assert_eq!(ConfigurationSpace::new(5, 2).unwrap().len(), 7776);
        assert_eq!(ConfigurationSpace::new(6, 1).unwrap().len(), 15625);
        assert!(matches!(
            ConfigurationSpace::new(12, 2),
            Err(Error::SpaceTooLarge(_))
        ));
    }

    #[test]
    fn enumeration_is_lexicographic_and_unique() {
        let all: Vec<Configuration> = enumerate_configurations(4, 2).unwrap().collect();
        assert_eq!(all.len(), 81);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0].action(0), &[1, 2]);
        assert_eq!(all[0].action(3), &[0, 1]);
    }

    #[test]
    fn matchings() {
        assert_eq!(perfect_matchings(4), 3);
        assert_eq!(perfect_matchings(6), 15);
        assert_eq!(perfect_matchings(7), 0);
    }

    #[test]
    fn three_nodes_one_link() {
        let params = GameParams::uniform(3, 1, parse_rational("1/2").unwrap()).unwrap();
        let result = enumerate_nash(&params).unwrap();
        assert_eq!(result.total_configs, 8);
        assert_eq!(result.nash.len(), 6);
        assert!(result.strict.is_empty());
        assert!(result.mismatches.is_empty());
        assert_eq!(result.class_histogram.get("C2lr(1,1)"), Some(&6));
        assert!(verify_theorems(&params).unwrap().passed());
    }
}
