use rml::formats::*;
use rml::Method;
use rml_core::{Metric, SolverTrace, SymmetricMatrix, TraceRecord};

#[test]
fn metric_round_trip_is_exact() {
    let m = Metric::new(
        SymmetricMatrix::from_rows(&[vec![2.0, 0.1 + 0.2], vec![0.1 + 0.2, 1.0 / 3.0]]).unwrap(),
    )
    .unwrap();
    let text = metric_to_json(&m);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["dim"], 2);
    assert_eq!(value["rows"].as_array().unwrap().len(), 2);
    assert_eq!(metric_from_json(&text).unwrap(), m);
}

#[test]
fn bad_metric_files_are_rejected() {
    for text in [
        r#"{"dim": 2, "rows": [[1.0, 0.0]]}"#,
        r#"{"dim": 2, "rows": [[1.0, 0.5], [0.0, 1.0]]}"#,
        r#"{"dim": 1, "rows": [[-1.0]]}"#,
        r#"{"dim": 1, "rows": [[1.0, 2.0]]}"#,
        r#"{"rows": [[1.0]]}"#,
        "not json",
    ] {
        assert!(metric_from_json(text).is_err(), "{text}");
    }
}

#[test]
fn trace_round_trip_is_exact() {
    let mut trace = SolverTrace::default();
    trace.push(TraceRecord {
        iter: 0,
        objective: -0.1,
        dual: -1.0 / 7.0,
        gap: 1.0 / 7.0 - 0.1,
        seconds: 0.0,
    });
    trace.push(TraceRecord {
        iter: 5,
        objective: -3e-17,
        dual: -2.5e10,
        gap: 2.5e10,
        seconds: 0.25,
    });
    let text = trace_to_csv(&trace);
    assert!(text.starts_with("iter,objective,dual,gap,seconds\n"));
    assert_eq!(text.lines().count(), 3);
    assert_eq!(trace_from_csv(&text).unwrap(), trace);
    assert!(trace_from_csv("iter,objective\n1,2\n").is_err());
    assert!(trace_from_csv("iter,objective,dual,gap,seconds\nx,1,1,1,1\n").is_err());
}

#[test]
fn report_and_per_seed_round_trip() {
    let rows = vec![
        ReportRow {
            method: Method::Nesterov,
            mean: 0.03,
            std: 0.011,
            n_seeds: 10,
        },
        ReportRow {
            method: Method::Euclidean,
            mean: 1.0 / 30.0,
            std: 0.0,
            n_seeds: 10,
        },
    ];
    let text = report_to_csv(&rows);
    assert_eq!(text.lines().next(), Some(REPORT_HEADER));
    assert_eq!(report_from_csv(&text).unwrap(), rows);

    let per_seed = vec![
        SeedResult {
            method: Method::Subgradient,
            seed: 3,
            lambda: Some(0.125),
            test_error: 0.1,
        },
        SeedResult {
            method: Method::Euclidean,
            seed: 3,
            lambda: None,
            test_error: 2.0 / 27.0,
        },
    ];
    let text = per_seed_to_csv(&per_seed);
    assert!(text.contains("EUCL,3,,"));
    assert_eq!(per_seed_from_csv(&text).unwrap(), per_seed);
    assert!(report_from_csv("method,mean,std,n_seeds\nLMNN,0,0,1\n").is_err());
}

#[test]
fn sweep_round_trip() {
    let rows = vec![
        SweepRow {
            eta: 0.8,
            method: Method::Nesterov,
            mean: 0.05,
            std: 0.01,
        },
        SweepRow {
            eta: 1.0,
            method: Method::Euclidean,
            mean: 0.04,
            std: 0.02,
        },
    ];
    let text = sweep_to_csv(&rows);
    assert_eq!(text.lines().next(), Some(SWEEP_HEADER));
    assert_eq!(sweep_from_csv(&text).unwrap(), rows);
}

#[test]
fn table_shows_percentages() {
    let rows = vec![ReportRow {
        method: Method::Nesterov,
        mean: 0.0345,
        std: 0.0123,
        n_seeds: 10,
    }];
    let table = report_table("wine", &rows);
    assert!(table.starts_with("wine\n"));
    assert!(table.contains("RML-nesterov"));
    assert!(table.contains("3.45 ± 1.23"));
}
