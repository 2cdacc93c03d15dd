//! Scheme-definition documents: the JSON interchange format for parameter
//! families and level schedules.
//!
//! ```json
//! {
//!   "name": "four-point",
//!   "dim": 1,
//!   "m": 2,
//!   "base": [[[-1], "1/2"], [[0], "1"], [[1], "1/2"]],
//!   "directions": [[[[-3], "-1"], [[-1], "1"], [[1], "1"], [[3], "-1"]]],
//!   "domain_vertices": [["0"], ["1/16"]],
//!   "schedule": { "kind": "random-uniform", "seed": 7,
//!                 "lo": ["3/64"], "hi": ["1/16"], "prefix": [["0"], ["0"]] },
//!   "notes": "optional free text"
//! }
//! ```
//!
//! Every numeric payload is a string — `"p/q"`, integer, or decimal — parsed
//! exactly; nothing round-trips through floating point.  Terms are
//! `[exponent-tuple, coefficient]` pairs; `directions` and `domain_vertices`
//! may be omitted for stationary schemes.  Malformed JSON reports line and
//! column; semantically invalid documents (dilation below 2, mismatched
//! dimensions, schedules over the wrong parameter count) are rejected with a
//! description.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::ParameterSchedule;
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Q};
use crate::laurent::{LaurentPoly, ParamSymbol};

/// One symbol term: integer exponent tuple plus an exact coefficient string.
pub type SchemeTerm = (Vec<i64>, String);

/// Level-schedule description; `kind` selects the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleSpec {
    /// The same parameter point at every level.
    Fixed { value: Vec<String> },
    /// Explicit per-level points; the last entry repeats.
    List { values: Vec<Vec<String>> },
    /// Fixed opening levels, then per-level uniform draws from `[lo, hi)`.
    RandomUniform {
        seed: u64,
        lo: Vec<String>,
        hi: Vec<String>,
        #[serde(default)]
        prefix: Vec<Vec<String>>,
    },
    /// Geometric approach from `start` towards `target`.
    ConvergentTo {
        start: Vec<String>,
        target: Vec<String>,
        ratio: String,
    },
}

/// A parameter family plus metadata and an optional level schedule, as read
/// from or written to a scheme JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub m: i64,
    pub base: Vec<SchemeTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directions: Vec<Vec<SchemeTerm>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain_vertices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

fn parse_point(coords: &[String], what: &str, index: usize) -> Result<Vec<Q>> {
    coords
        .iter()
        .map(|s| {
            parse_rational(s).map_err(|_| {
                Error::SchemeInvalid(format!("{what} {index} has unparsable coordinate {s:?}"))
            })
        })
        .collect()
}

impl SchemeDocument {
    /// Parse a document from JSON text; syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SchemeDocument = serde_json::from_str(text).map_err(|e| Error::SchemeJson {
            msg: e.to_string(),
            line: e.line(),
            column: e.column(),
        })?;
        doc.validate()?;
        Ok(doc)
    }

    /// Read and parse a scheme file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::arg(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Pretty JSON with deterministic field order.
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("document serializes");
        out.push('\n');
        out
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::SchemeInvalid(format!(
                "dilation m = {} must be at least 2",
                self.m
            )));
        }
        if self.dim == 0 {
            return Err(Error::SchemeInvalid("dim must be at least 1".into()));
        }
        if self.base.is_empty() {
            return Err(Error::SchemeInvalid("base symbol has no terms".into()));
        }
        if self.directions.is_empty() && !self.domain_vertices.is_empty() {
            return Err(Error::SchemeInvalid(
                "domain_vertices given but there are no directions".into(),
            ));
        }
        Ok(())
    }

    fn parse_terms(&self, terms: &[SchemeTerm], what: &str) -> Result<LaurentPoly> {
        let mut parsed = Vec::with_capacity(terms.len());
        for (exps, coeff) in terms {
            if exps.len() != self.dim {
                return Err(Error::SchemeInvalid(format!(
                    "{what}: exponent tuple {exps:?} has {} entries, dim is {}",
                    exps.len(),
                    self.dim
                )));
            }
            let c = parse_rational(coeff).map_err(|_| {
                Error::SchemeInvalid(format!("{what}: unparsable coefficient {coeff:?}"))
            })?;
            parsed.push((exps.clone(), c));
        }
        LaurentPoly::from_terms(self.dim, parsed)
    }

    /// Build the parameter family the document describes.
    pub fn to_param_symbol(&self) -> Result<ParamSymbol> {
        let base = self.parse_terms(&self.base, "base")?;
        if self.directions.is_empty() {
            return Ok(ParamSymbol::stationary(base));
        }
        let mut directions = Vec::with_capacity(self.directions.len());
        for (i, terms) in self.directions.iter().enumerate() {
            directions.push(self.parse_terms(terms, &format!("direction {i}"))?);
        }
        let mut domain = Vec::with_capacity(self.domain_vertices.len());
        for (i, v) in self.domain_vertices.iter().enumerate() {
            let point = parse_point(v, "domain vertex", i)?;
            if point.len() != directions.len() {
                return Err(Error::SchemeInvalid(format!(
                    "domain vertex {i} has {} coordinates, expected {}",
                    point.len(),
                    directions.len()
                )));
            }
            domain.push(point);
        }
        ParamSymbol::new(base, directions, domain)
    }

    /// Build the level schedule, if the document declares one.
    pub fn to_schedule(&self) -> Result<Option<ParameterSchedule>> {
        let p = self.directions.len();
        let check = |len: usize, what: &str| -> Result<()> {
            if len != p {
                return Err(Error::SchemeInvalid(format!(
                    "schedule {what} has {len} coordinates, family has {p} parameters"
                )));
            }
            Ok(())
        };
        let Some(spec) = &self.schedule else {
            return Ok(None);
        };
        let schedule = match spec {
            ScheduleSpec::Fixed { value } => {
                check(value.len(), "value")?;
                ParameterSchedule::Fixed(parse_point(value, "schedule value", 0)?)
            }
            ScheduleSpec::List { values } => {
                let mut parsed = Vec::with_capacity(values.len());
                for (i, v) in values.iter().enumerate() {
                    check(v.len(), "list entry")?;
                    parsed.push(parse_point(v, "schedule entry", i)?);
                }
                ParameterSchedule::List(parsed)
            }
            ScheduleSpec::RandomUniform {
                seed,
                lo,
                hi,
                prefix,
            } => {
                check(lo.len(), "lo")?;
                check(hi.len(), "hi")?;
                let mut parsed_prefix = Vec::with_capacity(prefix.len());
                for (i, v) in prefix.iter().enumerate() {
                    check(v.len(), "prefix entry")?;
                    parsed_prefix.push(parse_point(v, "schedule prefix", i)?);
                }
                ParameterSchedule::RandomUniform {
                    seed: *seed,
                    lo: parse_point(lo, "schedule lo", 0)?,
                    hi: parse_point(hi, "schedule hi", 0)?,
                    prefix: parsed_prefix,
                }
            }
            ScheduleSpec::ConvergentTo {
                start,
                target,
                ratio,
            } => {
                check(start.len(), "start")?;
                check(target.len(), "target")?;
                ParameterSchedule::ConvergentTo {
                    start: parse_point(start, "schedule start", 0)?,
                    target: parse_point(target, "schedule target", 0)?,
                    ratio: parse_rational(ratio).map_err(|_| {
                        Error::SchemeInvalid(format!("unparsable schedule ratio {ratio:?}"))
                    })?,
                }
            }
        };
        Ok(Some(schedule))
    }

    /// Describe an in-memory family (plus optional schedule) as a document,
    /// with all coefficients rendered exactly.
    pub fn from_family(
        name: Option<&str>,
        m: i64,
        family: &ParamSymbol,
        schedule: Option<&ParameterSchedule>,
        notes: Option<&str>,
    ) -> Self {
        let render_terms = |p: &LaurentPoly| -> Vec<SchemeTerm> {
            p.terms()
                .map(|(e, c)| (e.clone(), format_rational(c)))
                .collect()
        };
        let render_point = |v: &[Q]| -> Vec<String> { v.iter().map(format_rational).collect() };
        let schedule = schedule.map(|s| match s {
            ParameterSchedule::Fixed(v) => ScheduleSpec::Fixed {
                value: render_point(v),
            },
            ParameterSchedule::List(vs) => ScheduleSpec::List {
                values: vs.iter().map(|v| render_point(v)).collect(),
            },
            ParameterSchedule::RandomUniform {
                seed,
                lo,
                hi,
                prefix,
            } => ScheduleSpec::RandomUniform {
                seed: *seed,
                lo: render_point(lo),
                hi: render_point(hi),
                prefix: prefix.iter().map(|v| render_point(v)).collect(),
            },
            ParameterSchedule::ConvergentTo {
                start,
                target,
                ratio,
            } => ScheduleSpec::ConvergentTo {
                start: render_point(start),
                target: render_point(target),
                ratio: format_rational(ratio),
            },
        });
        SchemeDocument {
            name: name.map(str::to_owned),
            dim: family.dim(),
            m,
            base: render_terms(family.base()),
            directions: family.directions().iter().map(render_terms).collect(),
            // A parameterless family keeps one empty vertex internally; the
            // document form omits the domain entirely.
            domain_vertices: if family.param_dim() == 0 {
                Vec::new()
            } else {
                family.domain().iter().map(|v| render_point(v)).collect()
            },
            schedule,
            notes: notes.map(str::to_owned),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{
        bspline_symbol, butterfly_family, dd6_blend_family, four_point_family,
        four_point_random_schedule, haar_symbol,
    };

    fn fixture(name: &str) -> String {
        format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    #[test]
    fn four_point_fixture_parses_to_the_preset_family() {
        let doc = SchemeDocument::load(fixture("fourpoint.json")).unwrap();
        assert_eq!(doc.m, 2);
        assert_eq!(doc.to_param_symbol().unwrap(), four_point_family());
        assert!(doc.to_schedule().unwrap().is_none());
    }

    #[test]
    fn example_schedule_fixture_round_trips_to_the_preset_schedule() {
        let doc = SchemeDocument::load(fixture("example38.json")).unwrap();
        assert_eq!(doc.to_param_symbol().unwrap(), four_point_family());
        assert_eq!(
            doc.to_schedule().unwrap(),
            Some(four_point_random_schedule(20_260_815))
        );
    }

    #[test]
    fn all_shipped_fixtures_parse_to_their_presets() {
        use crate::laurent::ParamSymbol;
        let cases: Vec<(&str, ParamSymbol)> = vec![
            ("haar.json", ParamSymbol::stationary(haar_symbol())),
            ("bspline.json", ParamSymbol::stationary(bspline_symbol())),
            ("fourpoint.json", four_point_family()),
            ("example38.json", four_point_family()),
            ("dd6blend.json", dd6_blend_family()),
            ("butterfly.json", butterfly_family()),
        ];
        for (file, expected) in cases {
            let doc = SchemeDocument::load(fixture(file)).unwrap();
            assert_eq!(doc.to_param_symbol().unwrap(), expected, "fixture {file}");
        }
    }

    #[test]
    fn malformed_json_reports_line_and_column() {
        let text = "{\n  \"dim\": 1,,\n}\n";
        match SchemeDocument::from_json(text) {
            Err(Error::SchemeJson { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn semantic_problems_are_described() {
        let small_m = r#"{"dim": 1, "m": 1, "base": [[[0], "1"]]}"#;
        assert!(matches!(
            SchemeDocument::from_json(small_m),
            Err(Error::SchemeInvalid(_))
        ));

        let bad_exponent = SchemeDocument {
            name: None,
            dim: 2,
            m: 2,
            base: vec![(vec![0], "1".into())],
            directions: vec![],
            domain_vertices: vec![],
            schedule: None,
            notes: None,
        };
        assert!(matches!(
            bad_exponent.to_param_symbol(),
            Err(Error::SchemeInvalid(_))
        ));

        let orphan_domain = r#"{"dim": 1, "m": 2, "base": [[[0], "1"]],
                               "domain_vertices": [["0"]]}"#;
        assert!(matches!(
            SchemeDocument::from_json(orphan_domain),
            Err(Error::SchemeInvalid(_))
        ));

        let doc = SchemeDocument::load(fixture("fourpoint.json")).unwrap();
        let mut wrong_arity = doc.clone();
        wrong_arity.schedule = Some(ScheduleSpec::Fixed {
            value: vec!["0".into(), "0".into()],
        });
        assert!(matches!(
            wrong_arity.to_schedule(),
            Err(Error::SchemeInvalid(_))
        ));
    }

    #[test]
    fn documents_round_trip_through_json() {
        let family = dd6_blend_family();
        let schedule = ParameterSchedule::ConvergentTo {
            start: vec![crate::exact::qi(0)],
            target: vec![crate::exact::qi(1)],
            ratio: crate::exact::q(1, 2),
        };
        let doc = SchemeDocument::from_family(
            Some("blend"),
            2,
            &family,
            Some(&schedule),
            Some("round-trip check"),
        );
        let text = doc.to_json_string();
        let back = SchemeDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_param_symbol().unwrap(), family);
        assert_eq!(back.to_schedule().unwrap(), Some(schedule));
    }
}
