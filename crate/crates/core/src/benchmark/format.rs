//! Plain-text exchange format for networks and sampled round parameters.
//!
//! Network:
//! ```text
//! nodes 15
//! source 0
//! arc 0 3
//! ```
//! Round parameters, one value per line as `t kind index value` where kind is
//! `load`, `alpha` or `beta`. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use super::network::{Arc, NetworkSpec};
use super::sampling::RoundParams;
use crate::error::{Error, Result};

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("line {line}: {msg}"))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| bad(line, format!("cannot parse `{s}`")))
}

pub fn write_network(net: &NetworkSpec) -> String {
    let mut out = String::from("# radial network\n");
    let _ = writeln!(out, "nodes {}", net.node_count());
    let _ = writeln!(out, "source {}", net.source());
    for a in net.arcs() {
        let _ = writeln!(out, "arc {} {}", a.tail, a.head);
    }
    out
}

pub fn read_network(text: &str) -> Result<NetworkSpec> {
    let mut nodes = None;
    let mut source = None;
    let mut arcs = Vec::new();
    for (line, fields) in content_lines(text) {
        match fields.as_slice() {
            ["nodes", n] => nodes = Some(parse(line, n)?),
            ["source", s] => source = Some(parse(line, s)?),
            ["arc", t, h] => arcs.push(Arc {
                tail: parse(line, t)?,
                head: parse(line, h)?,
            }),
            _ => return Err(bad(line, "expected `nodes N`, `source S` or `arc T H`")),
        }
    }
    let nodes = nodes.ok_or_else(|| Error::InvalidArgument("missing `nodes` line".into()))?;
    let source = source.ok_or_else(|| Error::InvalidArgument("missing `source` line".into()))?;
    NetworkSpec::new(nodes, arcs, source)
}

pub fn write_params(params: &[RoundParams]) -> String {
    let mut out = String::from("# t kind index value\n");
    for p in params {
        for (kind, values) in [("load", &p.loads), ("alpha", &p.alpha), ("beta", &p.beta_cost)] {
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(out, "{} {kind} {i} {v}", p.t);
            }
        }
    }
    out
}

/// Inverse of [`write_params`]; rounds come back sorted by `t`.
pub fn read_params(text: &str) -> Result<Vec<RoundParams>> {
    let mut rounds: std::collections::BTreeMap<usize, [Vec<(usize, f64)>; 3]> = Default::default();
    for (line, fields) in content_lines(text) {
        let [t, kind, i, v] = fields.as_slice() else {
            return Err(bad(line, "expected `t kind index value`"));
        };
        let slot = match *kind {
            "load" => 0,
            "alpha" => 1,
            "beta" => 2,
            other => return Err(bad(line, format!("unknown kind `{other}`"))),
        };
        let v: f64 = parse(line, v)?;
        if !v.is_finite() {
            return Err(bad(line, "non-finite value"));
        }
        rounds.entry(parse(line, t)?).or_default()[slot].push((parse(line, i)?, v));
    }
    rounds
        .into_iter()
        .map(|(t, mut slots)| {
            let mut dense = slots.iter_mut().map(|entries| {
                entries.sort_by_key(|e| e.0);
                if entries.iter().enumerate().any(|(k, e)| e.0 != k) {
                    return Err(Error::InvalidArgument(format!("round {t}: indices not contiguous")));
                }
                Ok(entries.iter().map(|e| e.1).collect::<Vec<_>>())
            });
            Ok(RoundParams {
                t,
                loads: dense.next().unwrap()?,
                alpha: dense.next().unwrap()?,
                beta_cost: dense.next().unwrap()?,
            })
        })
        .collect()
}
