//! Number encoding in CSV cells and JSON reports.

use proptest::prelude::*;
use serde::{Deserialize, Serialize};
use wdmlink::num::{cell, cell_opt};

#[derive(Debug, Serialize, Deserialize)]
struct Wrapped {
    #[serde(with = "wdmlink::num::real")]
    x: f64,
    #[serde(with = "wdmlink::num::real_opt")]
    y: Option<f64>,
}

fn round_trip(x: f64, y: Option<f64>) -> Wrapped {
    let text = serde_json::to_string(&Wrapped { x, y }).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn non_finite_values_use_strings() {
    let text = serde_json::to_string(&Wrapped { x: f64::NEG_INFINITY, y: Some(f64::INFINITY) }).unwrap();
    assert_eq!(text, r#"{"x":"-inf","y":"inf"}"#);
    let back = round_trip(f64::NAN, None);
    assert!(back.x.is_nan());
    assert_eq!(back.y, None);
    assert!(serde_json::from_str::<Wrapped>(r#"{"x":"infinity","y":null}"#).is_err());
}

#[test]
fn cells_for_special_values() {
    assert_eq!(cell(f64::NEG_INFINITY), "-inf");
    assert_eq!(cell(23.0), "23");
    assert_eq!(cell_opt(None), "");
}

proptest! {
    #[test]
    fn json_round_trip_is_exact(bits in any::<u64>(), y in proptest::option::of(any::<f64>())) {
        let x = f64::from_bits(bits);
        let back = round_trip(x, y);
        prop_assert_eq!(back.x.to_bits() == x.to_bits() || (x.is_nan() && back.x.is_nan()), true);
        match (y, back.y) {
            (Some(a), Some(b)) => prop_assert!(a == b || (a.is_nan() && b.is_nan())),
            (None, None) => {}
            _ => prop_assert!(false),
        }
    }

    #[test]
    fn csv_cells_parse_back_exactly(x in any::<f64>()) {
        let parsed: f64 = cell(x).parse().unwrap();
        prop_assert!(parsed == x || (x.is_nan() && parsed.is_nan()));
    }
}
