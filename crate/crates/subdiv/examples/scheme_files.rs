//! Scheme files: the JSON interchange format behind the `subdiv` binary.
//!
//! A scheme file records a mask family with exact rational coefficients —
//! base mask, parameter directions, domain vertices — plus an optional
//! per-level parameter schedule.  Coefficients travel as strings ("p/q",
//! integers, or finite decimals), so nothing is lost to floating point and
//! round trips are exact.  The same documents drive the command-line
//! interface:
//!
//! ```text
//! subdiv analyze  four_point.json --interval 3/64 1/16
//! subdiv support  four_point.json
//! subdiv render   four_point.json --levels 8 --out curve.csv
//! ```
//!
//! Run with `cargo run --example scheme_files`.

use subdiv::engine::ParameterSchedule;
use subdiv::error::Result;
use subdiv::exact::{q, qi};
use subdiv::presets::four_point_family;
use subdiv::scheme::SchemeDocument;

fn main() -> Result<()> {
    // Wrap a family and a schedule into a document and serialize it.
    let family = four_point_family();
    let schedule = ParameterSchedule::ConvergentTo {
        start: vec![qi(0)],
        target: vec![q(1, 16)],
        ratio: q(1, 2),
    };
    let doc = SchemeDocument::from_family(
        Some("four-point, tension ramping to 1/16"),
        2,
        &family,
        Some(&schedule),
        Some("weights approach the interpolatory rule geometrically"),
    );
    let text = doc.to_json_string();
    println!("{text}");

    // Parse it back: the family and the schedule survive exactly.
    let parsed = SchemeDocument::from_json(&text)?;
    assert_eq!(parsed.to_param_symbol()?, family);
    assert_eq!(parsed.to_schedule()?, Some(schedule));
    println!("round trip: exact");

    // Malformed input is rejected with position information, and documents
    // that parse but make no sense are rejected with a reason.
    let err = SchemeDocument::from_json("{\n  \"dim\": 1,,\n}").unwrap_err();
    println!("syntax error reported as: {err}");
    let orphan = r#"{"dim": 1, "m": 1, "base": [[[0], "1"], [[1], "1"]]}"#;
    let err = SchemeDocument::from_json(orphan).unwrap_err();
    println!("semantic error reported as: {err}");
    Ok(())
}
