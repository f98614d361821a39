mod common;

use cellforge::solver::{recognize, RecognitionDictionary};
use common::{certified_equal, recognition_table, unrecognized};

#[test]
fn table_readings_evaluate_to_their_values() {
    let rows = recognition_table();
    assert_eq!(rows.len(), 31);
    for r in &rows {
        let (v, im) = r.reading().to_c64().unwrap();
        assert!(im.abs() < 1e-15);
        assert!((v - r.value).abs() < 5e-6, "{} vs {}", r.value, v);
    }
    // the one printed guess that disagrees with its value
    let bad: Vec<f64> = rows.iter().filter(|r| (r.printed.to_c64().unwrap().0 - r.value).abs() > 5e-6).map(|r| r.value).collect();
    assert_eq!(bad, vec![0.341081]);
}

#[test]
fn table_values_recognize_to_their_readings() {
    let dict = RecognitionDictionary::default();
    for r in recognition_table() {
        let got = recognize(r.value, &dict).unwrap_or_else(|| panic!("{} unmatched", r.value));
        assert!(certified_equal(&got, r.reading()), "{}: {} vs {}", r.value, got, r.reading());
    }
}

#[test]
fn unrecognized_values_mostly_have_no_match() {
    let dict = RecognitionDictionary::default();
    let matched: Vec<(f64, String)> = unrecognized()
        .into_iter()
        .filter_map(|x| dict.recognize(x).matched.map(|e| (x, e.text)))
        .collect();
    let values: Vec<f64> = matched.iter().map(|m| m.0).collect();
    // these three have closed forms inside the grammar
    assert_eq!(values, vec![0.578665, 0.633931, 0.72676], "{matched:?}");
}

#[test]
fn dump_lists_every_entry() {
    let dict = RecognitionDictionary::new(5);
    assert_eq!(dict.dump().lines().count(), dict.len());
}
