//! Interchange formats.
//!
//! Text vertex files:
//!
//! ```text
//! # scenario 2 2 2
//! # representation corr
//! -1 -1 1 1
//! ```
//!
//! Text inequality files add `# kind inequality` and one `b : c_1 … c_d` line
//! per inequality. Entries are exact rationals `p/q`, integers without `/q`.
//! Both have JSON mirrors; [`parse_vertices`] and [`parse_inequalities`]
//! accept either form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Inequality;
use crate::rational::{format, parse, serde_rational_vec, Rational};
use crate::scenario::{Behavior, Representation, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord(#[serde(with = "serde_rational_vec")] pub Vec<Rational>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexExport {
    pub scenario: Scenario,
    pub representation: Representation,
    pub vertices: Vec<VertexRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityExport {
    pub scenario: Scenario,
    pub representation: Representation,
    pub kind: String,
    pub inequalities: Vec<Inequality>,
}

fn header(scenario: &Scenario, rep: Representation) -> String {
    format!(
        "# scenario {} {} {}\n# representation {}\n",
        scenario.n_parties,
        scenario.n_settings,
        scenario.n_outcomes,
        rep.tag()
    )
}

fn row(entries: &[Rational]) -> String {
    entries.iter().map(format).collect::<Vec<_>>().join(" ")
}

pub fn vertices_to_text(scenario: &Scenario, rep: Representation, points: &[Behavior]) -> String {
    let mut out = header(scenario, rep);
    for p in points {
        out.push_str(&row(&p.entries));
        out.push('\n');
    }
    out
}

pub fn inequalities_to_text(scenario: &Scenario, rep: Representation, ineqs: &[Inequality]) -> String {
    let mut out = header(scenario, rep);
    out.push_str("# kind inequality\n");
    for f in ineqs {
        out.push_str(&format!("{} : {}\n", format(&f.bound), row(&f.coefficients)));
    }
    out
}

pub fn vertices_to_json(scenario: &Scenario, rep: Representation, points: &[Behavior]) -> String {
    let export = VertexExport {
        scenario: *scenario,
        representation: rep,
        vertices: points.iter().map(|p| VertexRecord(p.entries.clone())).collect(),
    };
    serde_json::to_string_pretty(&export).expect("serializable") + "\n"
}

pub fn inequalities_to_json(scenario: &Scenario, rep: Representation, ineqs: &[Inequality]) -> String {
    let export = InequalityExport {
        scenario: *scenario,
        representation: rep,
        kind: "inequality".into(),
        inequalities: ineqs.to_vec(),
    };
    serde_json::to_string_pretty(&export).expect("serializable") + "\n"
}

struct TextFile<'a> {
    scenario: Scenario,
    rep: Representation,
    kind: Option<String>,
    body: Vec<(usize, &'a str)>,
}

fn parse_text(input: &str) -> Result<TextFile<'_>> {
    let mut scenario = None;
    let mut rep = None;
    let mut kind = None;
    let mut body = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let Some(comment) = line.strip_prefix('#') else {
            body.push((line_no, line));
            continue;
        };
        let mut words = comment.split_whitespace();
        match words.next() {
            Some("scenario") => {
                let nums: Vec<usize> = words
                    .map(|w| w.parse().map_err(|_| Error::Parse { line: line_no, msg: format!("bad integer {w:?}") }))
                    .collect::<Result<_>>()?;
                let [n, m, k] = nums[..] else {
                    return Err(Error::Parse { line: line_no, msg: "scenario needs N M K".into() });
                };
                scenario = Some(Scenario::new(n, m, k)?);
            }
            Some("representation") => {
                let tag = words.next().unwrap_or("");
                rep = Some(tag.parse().map_err(|_| Error::Parse { line: line_no, msg: format!("bad representation {tag:?}") })?);
            }
            Some("kind") => kind = words.next().map(str::to_string),
            _ => {}
        }
    }
    let scenario = scenario.ok_or(Error::Parse { line: 0, msg: "missing `# scenario` header".into() })?;
    let rep = rep.ok_or(Error::Parse { line: 0, msg: "missing `# representation` header".into() })?;
    scenario.check_representation(rep)?;
    Ok(TextFile { scenario, rep, kind, body })
}

fn parse_row(line_no: usize, text: &str, len: usize) -> Result<Vec<Rational>> {
    let entries: Vec<Rational> = text
        .split_whitespace()
        .map(|w| parse(w).ok_or_else(|| Error::Parse { line: line_no, msg: format!("bad rational {w:?}") }))
        .collect::<Result<_>>()?;
    if entries.len() != len {
        return Err(Error::Parse { line: line_no, msg: format!("expected {len} entries, found {}", entries.len()) });
    }
    Ok(entries)
}

fn is_json(input: &str) -> bool {
    input.trim_start().starts_with('{')
}

/// Points (vertices or queries) from a text or JSON vertex file.
pub fn parse_vertices(input: &str) -> Result<(Scenario, Representation, Vec<Behavior>)> {
    if is_json(input) {
        let export: VertexExport =
            serde_json::from_str(input).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let points = export
            .vertices
            .into_iter()
            .map(|VertexRecord(v)| Behavior::new(export.scenario, export.representation, v))
            .collect::<Result<_>>()?;
        return Ok((export.scenario, export.representation, points));
    }
    let file = parse_text(input)?;
    if file.kind.as_deref() == Some("inequality") {
        return Err(Error::Parse { line: 0, msg: "expected a vertex file, found an inequality file".into() });
    }
    let len = file.scenario.vector_len(file.rep);
    let points = file
        .body
        .iter()
        .map(|&(no, text)| Behavior::new(file.scenario, file.rep, parse_row(no, text, len)?))
        .collect::<Result<_>>()?;
    Ok((file.scenario, file.rep, points))
}

pub fn parse_inequalities(input: &str) -> Result<(Scenario, Representation, Vec<Inequality>)> {
    if is_json(input) {
        let export: InequalityExport =
            serde_json::from_str(input).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        for f in &export.inequalities {
            if f.scenario != export.scenario || f.representation != export.representation {
                return Err(Error::RepresentationMismatch("inequality record disagrees with file header".into()));
            }
            Inequality::new(f.scenario, f.representation, f.coefficients.clone(), f.bound.clone())?;
        }
        return Ok((export.scenario, export.representation, export.inequalities));
    }
    let file = parse_text(input)?;
    let len = file.scenario.vector_len(file.rep);
    let ineqs = file
        .body
        .iter()
        .map(|&(no, text)| {
            let (b, c) = text
                .split_once(':')
                .ok_or_else(|| Error::Parse { line: no, msg: "expected `b : c_1 … c_d`".into() })?;
            let bound = parse(b).ok_or_else(|| Error::Parse { line: no, msg: format!("bad bound {:?}", b.trim()) })?;
            Inequality::new(file.scenario, file.rep, parse_row(no, c, len)?, bound)
        })
        .collect::<Result<_>>()?;
    Ok((file.scenario, file.rep, ineqs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::scenario::{enumerate_vertices, DEFAULT_STRATEGY_CAP};
    use proptest::prelude::*;

    #[test]
    fn vertex_text_layout() {
        let s = Scenario::new(1, 2, 2).unwrap();
        let v = enumerate_vertices(&s, Representation::FullCorrelation, DEFAULT_STRATEGY_CAP).unwrap();
        let text = vertices_to_text(&s, Representation::FullCorrelation, &v);
        assert_eq!(text, "# scenario 1 2 2\n# representation corr\n-1 -1\n-1 1\n1 -1\n1 1\n");
        let (s2, r2, back) = parse_vertices(&text).unwrap();
        assert_eq!((s2, r2, back), (s, Representation::FullCorrelation, v));
    }

    #[test]
    fn inequality_text_layout() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let chsh = Inequality::from_ints(s, Representation::FullCorrelation, &[1, 1, 1, -1], 2).unwrap();
        let text = inequalities_to_text(&s, Representation::FullCorrelation, std::slice::from_ref(&chsh));
        assert_eq!(text, "# scenario 2 2 2\n# representation corr\n# kind inequality\n2 : 1 1 1 -1\n");
        assert_eq!(parse_inequalities(&text).unwrap().2, vec![chsh.clone()]);
        let json = inequalities_to_json(&s, Representation::FullCorrelation, std::slice::from_ref(&chsh));
        assert!(json.contains("\"bound\": \"2\""));
        assert_eq!(parse_inequalities(&json).unwrap().2, vec![chsh]);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_vertices("1 2\n").is_err());
        assert!(parse_vertices("# scenario 1 2 2\n# representation corr\n1 2 3\n").is_err());
        assert!(parse_vertices("# scenario 1 2 3\n# representation corr\n").is_err());
        assert!(parse_vertices("# scenario 1 2\n# representation corr\n").is_err());
        assert!(parse_inequalities("# scenario 1 2 2\n# representation corr\n# kind inequality\n1 1 0\n").is_err());
        assert!(parse_inequalities("# scenario 1 2 2\n# representation corr\n# kind inequality\nx : 1 0\n").is_err());
        let err = parse_vertices("# scenario 1 2 2\n# representation corr\n1 1\n1 z\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    proptest! {
        #[test]
        fn points_round_trip(raw in proptest::collection::vec((-50i64..50, 1i64..20), 4..=4), json in any::<bool>()) {
            let s = Scenario::new(2, 2, 2).unwrap();
            let entries: Vec<Rational> = raw.iter().map(|&(n, d)| ratio(n, d)).collect();
            let b = Behavior::new(s, Representation::FullCorrelation, entries).unwrap();
            let text = if json {
                vertices_to_json(&s, Representation::FullCorrelation, std::slice::from_ref(&b))
            } else {
                vertices_to_text(&s, Representation::FullCorrelation, std::slice::from_ref(&b))
            };
            prop_assert_eq!(parse_vertices(&text).unwrap().2, vec![b]);
        }

        #[test]
        fn inequalities_round_trip(c in proptest::collection::vec(-9i64..9, 4..=4), b in -9i64..9, json in any::<bool>()) {
            let s = Scenario::new(2, 2, 2).unwrap();
            let f = Inequality::from_ints(s, Representation::FullCorrelation, &c, b).unwrap().normalized();
            let text = if json {
                inequalities_to_json(&s, Representation::FullCorrelation, std::slice::from_ref(&f))
            } else {
                inequalities_to_text(&s, Representation::FullCorrelation, std::slice::from_ref(&f))
            };
            prop_assert_eq!(parse_inequalities(&text).unwrap().2, vec![f]);
        }
    }
}
