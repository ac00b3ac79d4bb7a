//! File formats: the plain-text instance format and the matching JSON.
//!
//! Instance text (bit-exact): line 1 is `n`; each following line is one
//! permutation as `n` space-separated 0-based integers. Solver instances
//! have three permutation lines; generated 4-matching instances have four.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, TargetTriple};
use crate::matching::Matching;

/// Parse `n` plus any number of permutation rows.
pub fn parse_raw(text: &str) -> Result<(usize, Vec<Vec<i64>>)> {
    let mut lines = text.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let n: usize = first
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad vertex count {first:?}")))?;
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<i64>, _> =
            line.split_whitespace().map(str::parse).collect();
        let row =
            row.map_err(|_| Error::Parse(format!("bad integer on permutation line {}", idx + 1)))?;
        rows.push(row);
    }
    Ok((n, rows))
}

/// Parse and validate a three-matching instance.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let (n, rows) = parse_raw(text)?;
    if rows.len() != 3 {
        return Err(Error::Parse(format!(
            "expected 3 permutation lines, found {}",
            rows.len()
        )));
    }
    crate::instance::validate_instance(n, &rows)
}

pub fn format_instance(inst: &Instance) -> String {
    let rows: Vec<Vec<u32>> = crate::instance::Color::ALL
        .iter()
        .map(|&c| inst.perm(c).to_vec())
        .collect();
    format_raw(inst.n(), &rows)
}

pub fn format_raw(n: usize, rows: &[Vec<u32>]) -> String {
    let mut out = String::new();
    out.push_str(&n.to_string());
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Wire form of a matching: `{"edges":[[u,color],...],"counts":[c1,c2,c3]}`
/// with edges sorted by A-vertex and 1-based color labels.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatchingDoc {
    pub edges: Vec<(i64, i64)>,
    pub counts: [usize; 3],
}

impl MatchingDoc {
    pub fn from_matching(m: &Matching) -> MatchingDoc {
        MatchingDoc {
            edges: m
                .edges()
                .iter()
                .map(|e| (e.u as i64, e.color.label() as i64))
                .collect(),
            counts: m.counts(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matching serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<MatchingDoc> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad matching JSON: {e}")))
    }
}

/// Parse a target triple from three integers, checking nonnegativity only;
/// the sum constraint is the solver's to enforce.
pub fn target_from_ints(a1: i64, a2: i64, a3: i64) -> Result<TargetTriple> {
    if a1 < 0 || a2 < 0 || a3 < 0 {
        return Err(Error::Parse("target multiplicities must be nonnegative".into()));
    }
    Ok(TargetTriple::new(a1 as usize, a2 as usize, a3 as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Color, Edge};

    #[test]
    fn instance_text_roundtrip() {
        let inst = Instance::cyclic(4);
        let text = format_instance(&inst);
        assert_eq!(text, "4\n0 1 2 3\n1 2 3 0\n2 3 0 1\n");
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn matching_json_shape() {
        let inst = Instance::cyclic(3);
        let m = Matching::from_edges(
            &inst,
            &[Edge::new(1, Color::C3), Edge::new(0, Color::C3)],
        )
        .unwrap();
        let doc = MatchingDoc::from_matching(&m);
        assert_eq!(doc.to_json(), r#"{"edges":[[0,3],[1,3]],"counts":[0,0,2]}"#);
        let back = MatchingDoc::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_instance("").is_err());
        assert!(parse_instance("x\n").is_err());
        assert!(parse_instance("3\n0 1 2\n1 2 0\n").is_err());
        assert!(parse_instance("3\n0 1 2\n1 2 0\n2 0 1\n0 1 2\n").is_err());
    }
}
