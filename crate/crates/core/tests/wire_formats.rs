mod common;

use bijcorr::exact::Fraction;
use bijcorr::oracle::{worst_case_search, Bijection, BijectionProbe, SearchMode};
use bijcorr::remainder::asymptotic_scan;
use bijcorr::report::{remainder_csv, spectrum_csv, RemainderSummary, REMAINDER_HEADER, SPECTRUM_HEADER};
use bijcorr::spectrum::spectrum_summary;
use bijcorr::tensor::{tensor_min_search, TensorInstance};
use serde_json::Value;

#[test]
fn probe_record_keeps_fractions_as_strings() {
    let probe = BijectionProbe::new(Bijection::identity(2).unwrap()).unwrap();
    let v: Value = serde_json::to_value(probe.record(false)).unwrap();
    assert_eq!(v["probability"]["num"], "3");
    assert_eq!(v["probability"]["den"], "4");
    assert_eq!(v["family"], "identity");
    assert_eq!(v["permutation"].as_array().unwrap().len(), 4);
    let back: Fraction = serde_json::from_value(v["margin"].clone()).unwrap();
    assert_eq!(back.to_rational().unwrap(), common::q(1, 4));
}

#[test]
fn large_probe_omits_permutation_unless_asked() {
    let probe = BijectionProbe::new(Bijection::random(11, 3).unwrap()).unwrap();
    let v: Value = serde_json::to_value(probe.record(false)).unwrap();
    assert!(v.get("permutation").is_none());
    let v: Value = serde_json::to_value(probe.record(true)).unwrap();
    assert_eq!(v["permutation"].as_array().unwrap().len(), 2048);
}

#[test]
fn search_record_has_trace() {
    let probe = worst_case_search(2, SearchMode::Exhaustive, 0, 0).unwrap();
    let v: Value = serde_json::to_value(probe.record(false)).unwrap();
    assert_eq!(v["family"], "search");
    assert_eq!(v["trace"]["mode"], "exhaustive");
    assert_eq!(v["trace"]["evaluated"], 24);
}

#[test]
fn tensor_result_shape() {
    let inst = TensorInstance::from_spectrum(&spectrum_summary(2).unwrap(), false).unwrap();
    let res = tensor_min_search(&inst, 1, 2, 100).unwrap();
    let v: Value = serde_json::to_value(&res).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["best_objective", "iters", "order", "r", "restarts", "seed", "square"]);
    assert_eq!(v["r"], 3);
    let square = v["square"].as_array().unwrap();
    assert_eq!(square.len(), 3);
    assert!(square.iter().all(|row| row.as_array().unwrap().len() == 3));
}

#[test]
fn csv_layout() {
    let tables = [spectrum_summary(3).unwrap(), spectrum_summary(4).unwrap()];
    let csv = spectrum_csv(&tables);
    assert!(csv.starts_with(&format!("{SPECTRUM_HEADER}\n")));
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().count(), 1 + 4 + 5);
    assert!(csv.lines().all(|l| l.split(',').count() == 5));

    let scan = asymptotic_scan(&[2, 4, 8, 16]).unwrap();
    let csv = remainder_csv(&scan);
    assert!(csv.starts_with(&format!("{REMAINDER_HEADER}\n")));
    assert!(csv.lines().any(|l| l.starts_with("4,-25,256,")));
    assert!(csv.ends_with('\n'));
}

#[test]
fn remainder_summary_json() {
    let scan = asymptotic_scan(&[4, 8, 64]).unwrap();
    let v: Value = serde_json::to_value(RemainderSummary::from(&scan)).unwrap();
    assert!(v["envelope_constant"].as_f64().unwrap() > 0.0);
    assert_eq!(v["reports"][0]["r"]["num"], "-25");
    assert_eq!(v["reports"][2]["float_route"], "log-beta");
}
