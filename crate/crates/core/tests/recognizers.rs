mod common;

use pdtb_lab::cli::cmd_synth;
use pdtb_lab::recognizers::{binary_report, majority_baseline};

#[test]
fn sentence_labels_match_raw_annotation() {
    let dir = tempfile::tempdir().unwrap();
    cmd_synth(9, 60, dir.path()).unwrap();
    for seed in [0, 9] {
        let r = common::sentence_labels_recomputed(dir.path(), seed);
        assert!(r.is_ok(), "{r:?}");
    }
}

#[test]
fn majority_accuracy_equals_frequency() {
    let r = common::majority_accuracy_is_frequency(500, 1);
    assert!(r.is_ok(), "{r:?}");
}

#[test]
fn all_zero_baseline_scores() {
    // 9 of 10 negative: accuracy 0.9, nothing predicted positive
    let golds = [vec![false; 9], vec![true]].concat();
    let m = majority_baseline(&golds).unwrap();
    assert!(!m);
    let r = binary_report(&golds, &vec![m; golds.len()]).unwrap();
    assert_eq!((r.accuracy, r.precision, r.recall, r.f1), (0.9, 0.0, 0.0, 0.0));
}

#[test]
fn naive_bayes_hand_example() {
    let r = common::naive_bayes_hand_example();
    assert!(r.is_ok(), "{r:?}");
}
