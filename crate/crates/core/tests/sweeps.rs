use wmdistill::sweep::{
    figure_preset, meta_path, run_sweep, write_outputs, Param, Protocol, SweepConfig,
};

fn small(protocol: Protocol) -> SweepConfig {
    let cfg = SweepConfig::new(protocol);
    match protocol {
        Protocol::OptimalW => cfg.axis(Param::D, "0.1:0.4:0.1").unwrap(),
        Protocol::Validate => {
            let mut cfg = cfg;
            cfg.fixed.samples = 2;
            cfg
        }
        _ => cfg
            .axis(Param::D, "0.1:0.4:0.1")
            .unwrap()
            .axis(Param::W, "0:0.5:0.25")
            .unwrap(),
    }
}

#[test]
fn every_protocol_produces_rows() {
    for p in Protocol::ALL {
        let t = run_sweep(&small(p)).unwrap();
        assert!(!t.rows.is_empty(), "{p}");
        assert!(t.rows.iter().all(|r| r.len() == t.header.len()), "{p}");
    }
}

#[test]
fn undistillable_points_do_not_abort() {
    let t = run_sweep(&small(Protocol::WRatio)).unwrap();
    let status = t.column("status").unwrap();
    let tags: Vec<&str> = t.rows.iter().map(|r| r[status].as_str()).collect();
    assert!(tags.contains(&"ok"));
    assert!(tags.contains(&"nrwm-only"));
    let t = run_sweep(&small(Protocol::WState)).unwrap();
    let status = t.column("status").unwrap();
    let stuck = t
        .rows
        .iter()
        .find(|r| r[status] == "not-distillable")
        .unwrap();
    // filtered fidelity is still reported
    assert!(!stuck[t.column("F_w").unwrap()].is_empty());
    assert!(stuck[t.column("m").unwrap()].is_empty());
}

#[test]
fn rows_follow_axis_order() {
    let t = run_sweep(&small(Protocol::Ghz)).unwrap();
    let firsts: Vec<(&str, &str)> = t
        .rows
        .iter()
        .take(4)
        .map(|r| (r[0].as_str(), r[1].as_str()))
        .collect();
    assert_eq!(
        firsts,
        [("0.1", "0"), ("0.1", "0.25"), ("0.1", "0.5"), ("0.2", "0")]
    );
}

#[test]
fn worker_count_does_not_change_output() {
    let mut cfg = figure_preset("6").unwrap();
    cfg.jobs = 1;
    let one = run_sweep(&cfg).unwrap().to_csv();
    cfg.jobs = 6;
    let six = run_sweep(&cfg).unwrap().to_csv();
    assert_eq!(one, six);
}

#[test]
fn outputs_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested").join("ghz.csv");
    let cfg = small(Protocol::Ghz);
    let t = run_sweep(&cfg).unwrap();
    let meta = write_outputs(&t, &cfg, &out).unwrap();
    assert_eq!(meta, meta_path(&out));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("d,w,P_w,E,status\n"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&meta).unwrap()).unwrap();
    assert_eq!(json["config"]["protocol"], "ghz");
    assert_eq!(json["rows"], 12);
    let again = SweepConfig::load(&{
        let p = dir.path().join("cfg.json");
        std::fs::write(&p, serde_json::to_string(&json["config"]).unwrap()).unwrap();
        p
    })
    .unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn invalid_configs_fail_before_work() {
    let cfg = SweepConfig::new(Protocol::Ghz)
        .axis(Param::W, "0:0.5:0.1")
        .unwrap();
    assert!(run_sweep(&cfg).is_ok());
    let mut bad = cfg;
    bad.fixed.m = 0;
    assert!(matches!(run_sweep(&bad), Err(wmdistill::Error::Config(_))));
}
