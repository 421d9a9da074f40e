//! File formats: the JSON configuration document, DOT export and trajectory
//! CSV. Node labels are 1-based in every external format.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{format_action, Configuration};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::params::GameParams;
use crate::scalar::{format_rational, parse_rational, Rational};

/// `{"n":..,"m":..,"beta":..,"eta":[..]|"uniform","actions":[[..],..]}`.
/// Numbers may be JSON numbers or strings (`"p/q"` or decimal).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub n: usize,
    pub m: usize,
    pub beta: Value,
    #[serde(default = "uniform_eta")]
    pub eta: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<Vec<usize>>>,
}

fn uniform_eta() -> Value {
    Value::String("uniform".into())
}

/// Reads a JSON scalar as an exact rational.
pub fn value_to_rational(v: &Value) -> Result<Rational> {
    match v {
        // serde_json prints floats in shortest round-trip form, so `0.85`
        // comes back as the text "0.85" and parses exactly.
        Value::Number(num) => parse_rational(&num.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Document(format!("expected a number, got {other}"))),
    }
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    /// Builds the document for a game and (optionally) a profile. β and η
    /// are written as exact `p/q` strings.
    pub fn from_parts(params: &GameParams, config: Option<&Configuration>) -> Self {
        let eta = if params.is_uniform() {
            uniform_eta()
        } else {
            Value::Array(
                params
                    .eta()
                    .iter()
                    .map(|e| Value::String(format_rational(e)))
                    .collect(),
            )
        };
        Self {
            n: params.n(),
            m: params.m(),
            beta: Value::String(format_rational(params.beta())),
            eta,
            actions: config.map(|c| {
                c.actions()
                    .map(|a| a.iter().map(|j| j + 1).collect())
                    .collect()
            }),
        }
    }

    /// Game parameters; `lenient` accepts Σ η within 1e-12 of 1.
    pub fn params(&self, lenient: bool) -> Result<GameParams> {
        let beta = value_to_rational(&self.beta)?;
        let eta = match &self.eta {
            Value::String(s) if s == "uniform" => None,
            Value::Array(items) => Some(
                items
                    .iter()
                    .map(value_to_rational)
                    .collect::<Result<Vec<_>>>()?,
            ),
            Value::Null => None,
            other => {
                return Err(Error::Document(format!(
                    "eta must be an array or \"uniform\", got {other}"
                )))
            }
        };
        if lenient {
            GameParams::new_lenient(self.n, self.m, beta, eta)
        } else {
            GameParams::new(self.n, self.m, beta, eta)
        }
    }

    pub fn configuration(&self) -> Result<Option<Configuration>> {
        let Some(actions) = &self.actions else {
            return Ok(None);
        };
        let mut zero_based = Vec::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            if a.contains(&0) {
                return Err(Error::Document(format!(
                    "node {} lists target 0; labels are 1-based",
                    i + 1
                )));
            }
            zero_based.push(a.iter().map(|j| j - 1).collect());
        }
        Configuration::new(self.n, self.m, zero_based).map(Some)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// Graphviz rendering of G(x). A mutual pair becomes one undirected edge
/// (`dir=none`), every other link an arrow.
pub fn to_dot(config: &Configuration) -> String {
    let mut out = String::from("digraph G {\n");
    for i in 0..config.n() {
        let _ = writeln!(out, "  {};", i + 1);
    }
    for (i, j) in config.edges() {
        if config.links(j, i) {
            if i < j {
                let _ = writeln!(out, "  {} -> {} [dir=none];", i + 1, j + 1);
            }
        } else {
            let _ = writeln!(out, "  {} -> {};", i + 1, j + 1);
        }
    }
    out.push_str("}\n");
    out
}

/// `t,player,action,class` rows; players 1-based, actions `+`-joined.
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::from("t,player,action,class\n");
    for rec in &trajectory.steps {
        let _ = writeln!(
            out,
            "{},{},{},\"{}\"",
            rec.t,
            rec.player + 1,
            format_action(&rec.action),
            rec.class
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_document_with_rationals() {
        let doc = ConfigDocument::parse(
            r#"{"n":3,"m":1,"beta":"1/2","eta":[0.5,"1/4",0.25],"actions":[[2],[1],[1]]}"#,
        )
        .unwrap();
        let params = doc.params(false).unwrap();
        assert_eq!(params.beta(), &parse_rational("1/2").unwrap());
        assert_eq!(params.eta()[1], parse_rational("0.25").unwrap());
        let x = doc.configuration().unwrap().unwrap();
        assert_eq!(x.action(2), &[0]);
    }

    #[test]
    fn decimal_beta_is_exact() {
        let doc = ConfigDocument::parse(r#"{"n":4,"m":2,"beta":0.85}"#).unwrap();
        let params = doc.params(false).unwrap();
        assert_eq!(params.beta(), &parse_rational("17/20").unwrap());
        assert!(params.is_uniform());
        assert!(doc.configuration().unwrap().is_none());
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = ConfigDocument::parse("{\"n\": 3,\n \"m\": }").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("column"), "{msg}");
    }

    #[test]
    fn zero_label_is_rejected() {
        let doc =
            ConfigDocument::parse(r#"{"n":2,"m":1,"beta":"1/2","actions":[[0],[1]]}"#).unwrap();
        assert!(doc.configuration().is_err());
    }

    #[test]
    fn round_trip_document() {
        let params = GameParams::new(
            3,
            1,
            parse_rational("0.3").unwrap(),
            Some(vec![
                parse_rational("1/2").unwrap(),
                parse_rational("1/3").unwrap(),
                parse_rational("1/6").unwrap(),
            ]),
        )
        .unwrap();
        let x = Configuration::new(3, 1, vec![vec![1], vec![0], vec![1]]).unwrap();
        let doc = ConfigDocument::from_parts(&params, Some(&x));
        let back = ConfigDocument::parse(&doc.to_json()).unwrap();
        assert_eq!(back.params(false).unwrap(), params);
        assert_eq!(back.configuration().unwrap().unwrap(), x);
    }

    #[test]
    fn dot_merges_mutual_links() {
        let x = Configuration::new(3, 1, vec![vec![1], vec![0], vec![0]]).unwrap();
        let dot = to_dot(&x);
        assert!(dot.contains("1 -> 2 [dir=none];"));
        assert!(!dot.contains("2 -> 1"));
        assert!(dot.contains("3 -> 1;"));
    }
}
