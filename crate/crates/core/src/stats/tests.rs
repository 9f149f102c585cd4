use super::*;
use crate::evaluator::CheckpointEval;

fn run(id: &str, counts: &[(u32, usize)]) -> RunRecord {
    let checkpoints = counts
        .iter()
        .map(|&(epoch, correct_count)| CheckpointEval {
            run_id: id.into(),
            translator: "m".into(),
            dataset: "d".into(),
            epoch,
            outcomes: Default::default(),
            correct_count,
        })
        .collect();
    RunRecord::new(id.into(), 0, checkpoints)
}

fn model(name: &str, bests: &[usize]) -> TranslatorRuns {
    TranslatorRuns {
        translator: name.into(),
        dataset: "organizational".into(),
        runs: bests
            .iter()
            .enumerate()
            .map(|(i, &b)| run(&format!("R{:02}", i + 1), &[(5, b)]))
            .collect(),
    }
}

#[test]
fn best_of_run_examples() {
    assert_eq!(
        best_of_run(&run("R01", &[(5, 3), (10, 7), (15, 5)])),
        Some(BestOfRun { best: 7, epoch: 10 })
    );
    assert_eq!(
        best_of_run(&run("R01", &[(5, 4), (10, 4), (15, 4)])),
        Some(BestOfRun { best: 4, epoch: 5 })
    );
    assert_eq!(
        best_of_run(&run("R01", &[(20, 9)])),
        Some(BestOfRun { best: 9, epoch: 20 })
    );
    assert_eq!(best_of_run(&run("R01", &[])), None);
}

#[test]
fn aggregate_examples() {
    let a = aggregate(&[7.0; 10]).unwrap();
    assert_eq!(
        (a.average, a.std_dev, a.std_dev_percent),
        (7.0, 0.0, Some(0.0))
    );
    assert_eq!(aggregate(&[0.0, 0.0]).unwrap().std_dev_percent, None);
    assert!(aggregate(&[]).is_none());
    assert_eq!(present(std_dev_percent(13.30, 0.64).unwrap()), "4.81");
    assert_eq!(present(std_dev_percent(19.30, 0.90).unwrap()), "4.66");
}

#[test]
fn summary_marks_best_model_and_absent_percent() {
    let results = vec![model("B", &[2, 4]), model("A", &[0, 0])];
    let md = summary_markdown(&summarize(&results).unwrap());
    assert!(md.contains("| A | 0.00 | 0.00 | n/a |"), "{md}");
    assert!(
        md.contains("| **B** | **3.00** | **1.00** | **33.33** |"),
        "{md}"
    );
    assert!(md.find("| A |").unwrap() < md.find("| **B** |").unwrap());
}

#[test]
fn curves_has_one_row_per_checkpoint() {
    let epochs: Vec<(u32, usize)> = (1..=20).map(|i| (i * 5, i as usize)).collect();
    let results = vec![TranslatorRuns {
        translator: "m".into(),
        dataset: "d".into(),
        runs: vec![run("R01", &epochs)],
    }];
    let csv = curves_csv(&results).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 21);
    assert_eq!(lines[0], "model,run,epoch,correct_count");
    assert_eq!(lines[20], "m,R01,100,20");
    assert_eq!(bestof_csv(&results).unwrap(), "model,run,best\nm,R01,20\n");
}

#[test]
fn empty_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        emit_reports(&[], dir.path()),
        Err(StatsError::NoRuns)
    ));
}

#[test]
fn json_numbers_reround_to_markdown() {
    let results = vec![
        model("BART", &[10, 12, 13, 13, 13, 13, 13, 14, 14, 14]),
        model("X", &[1, 2, 2]),
    ];
    let summaries = summarize(&results).unwrap();
    let md = summary_markdown(&summaries);
    let json: serde_json::Value = serde_json::from_str(&summary_json(&summaries)).unwrap();
    for m in json["datasets"][0]["models"].as_array().unwrap() {
        let name = m["model"].as_str().unwrap();
        let avg = present(m["average"].as_f64().unwrap());
        let sd = present(m["std_dev"].as_f64().unwrap());
        let pct = present(m["std_dev_percent"].as_f64().unwrap());
        let row = md
            .lines()
            .find(|l| {
                l.trim_start_matches("| ")
                    .trim_start_matches("**")
                    .starts_with(name)
            })
            .unwrap();
        let plain = row.replace("**", "");
        assert_eq!(plain, format!("| {name} | {avg} | {sd} | {pct} |"));
    }
    assert_eq!(json["metadata"]["aggregation"], "best-of-run");
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn aggregate_is_permutation_invariant(mut v in proptest::collection::vec(0u32..30, 1..12), seed in any::<u64>()) {
            let a = aggregate(&v.iter().map(|&x| x as f64).collect::<Vec<_>>()).unwrap();
            crate::dataset::shuffle(&mut v, seed);
            let b = aggregate(&v.iter().map(|&x| x as f64).collect::<Vec<_>>()).unwrap();
            prop_assert!((a.average - b.average).abs() < 1e-12);
            prop_assert!((a.std_dev - b.std_dev).abs() < 1e-12);
        }
    }
}
