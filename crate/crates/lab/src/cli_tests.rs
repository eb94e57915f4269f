use std::fs;
use std::path::{Path, PathBuf};

use crate::format::*;
use crate::{default_sidecar, dispatch_with};
use csflab_core::flow::{evolve, SolverOptions};
use csflab_core::{Curve, FlowHistory, Topology, Vec2};
use proptest::prelude::*;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut argv = vec!["csflab"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch_with(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let r = run(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.err);
    r.out
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn json(path: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn circle_file(dir: &Path, name: &str, r: f64, n: usize) -> String {
    let path = p(dir, name);
    write_curve(Path::new(&path), &Curve::circle(Vec2::ZERO, r, n).unwrap()).unwrap();
    path
}

fn point_sets() -> impl Strategy<Value = (Vec<Vec2>, bool, bool)> {
    (5usize..40, any::<bool>(), any::<bool>(), -1e3f64..1e3).prop_flat_map(|(n, closed, trunc, scale)| {
        (
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
                v.into_iter()
                    .enumerate()
                    .map(|(i, (x, y))| Vec2::new(i as f64 + x * scale.abs().max(1e-3), y * scale))
                    .collect()
            }),
            Just(closed),
            Just(trunc),
        )
    })
}

proptest! {
    #[test]
    fn curves_round_trip_exactly((pts, closed, trunc) in point_sets()) {
        let topo = if closed { Topology::Closed } else { Topology::Open };
        let c = Curve::new(pts, topo, trunc).unwrap();
        let text = curve_to_string(&c);
        let back = curve_from_str(Path::new("mem"), &text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(curve_to_string(&back), text);
    }

    #[test]
    fn histories_round_trip_exactly((pts, closed, trunc) in point_sets(), dts in proptest::collection::vec(1e-6f64..1.0, 1..5), singular in any::<bool>()) {
        let topo = if closed { Topology::Closed } else { Topology::Open };
        let c = Curve::new(pts, topo, trunc).unwrap();
        let mut h = FlowHistory::new(-0.3, c.clone()).unwrap();
        let mut t = -0.3;
        for (k, dt) in dts.iter().enumerate() {
            t += dt;
            let moved = c.points().iter().map(|&q| q * (1.0 + k as f64 * 0.1)).collect();
            h.push(t, c.with_points(moved).unwrap()).unwrap();
        }
        if singular {
            h.singular_time = Some(t);
            h.resample_events = vec![t - dts[0] / 2.0];
        }
        let text = history_to_string(&h);
        let back = history_from_str(Path::new("mem"), &text).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(history_to_string(&back), text);
    }
}

#[test]
fn format_errors_report_byte_offsets() {
    let text = "{\"topology\":\"closed\",\"points\":[[0,0],[1,0],\"x\"]}";
    let e = curve_from_str(Path::new("c.json"), text).unwrap_err();
    assert_eq!(e.code, "format");
    let at: usize = e.message.split("at byte ").nth(1).unwrap().split(':').next().unwrap().parse().unwrap();
    assert!((43..=46).contains(&at), "{}", e.message);

    // second slice line of a history is broken
    let h = FlowHistory::from_slices(vec![
        (0.0, Curve::circle(Vec2::ZERO, 1.0, 4).unwrap()),
        (1.0, Curve::circle(Vec2::ZERO, 0.5, 4).unwrap()),
    ])
    .unwrap();
    let good = history_to_string(&h);
    let cut = good.rfind("\"points\"").unwrap();
    let bad = format!("{}\"pts\"{}", &good[..cut], &good[cut + 8..]);
    let e = history_from_str(Path::new("h.jsonl"), &bad).unwrap_err();
    let at: usize = e.message.split("at byte ").nth(1).unwrap().split(':').next().unwrap().parse().unwrap();
    let line_start = good[..cut].rfind('\n').unwrap() + 1;
    assert!(at >= line_start && at <= cut + 6, "{} vs line at {line_start}", e.message);

    let wrong_count = good.replacen("\"count\":4", "\"count\":5", 1);
    assert!(history_from_str(Path::new("h"), &wrong_count).unwrap_err().message.contains("at byte"));
    assert!(history_from_str(Path::new("h"), "").is_err());
}

#[test]
fn errors_are_one_machine_readable_line() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["evolve", "--no-such-flag"]);
    assert_eq!(r.code, 2);
    assert!(r.err.starts_with("E:usage:") && r.err.lines().count() == 1, "{}", r.err);
    assert_eq!(run(&["frobnicate"]).code, 2);

    let bad = p(dir.path(), "bad.json");
    fs::write(&bad, "{\"topology\": \"closed\", \"points\": [[0, 0], [1, 0]").unwrap();
    let r = run(&["rotator-check", "--input", &bad, "--omega", "-1"]);
    assert_eq!(r.code, 2);
    assert!(r.err.starts_with("E:format:") && r.err.contains("at byte"), "{}", r.err);

    let c = circle_file(dir.path(), "c.json", 1.0, 32);
    let r = run(&["sup-entropy", "--input", &c, "--t", "1", "--t0", "1"]);
    assert!(r.err.starts_with("E:kernel_domain:") || r.err.starts_with("E:invalid_parameter:"), "{}", r.err);
    let r = run(&["gamma-check", "--alpha", "0.5"]);
    assert!(r.code == 2 && r.err.starts_with("E:usage:"));
    let r = run(&["gamma-check", "--alpha", "1.5", "--t1", "0", "--t2", "1"]);
    assert!(r.code == 2 && r.err.starts_with("E:invalid_parameter:"));
    let r = run(&["evolve", "--input", &p(dir.path(), "missing.json"), "--t1", "1", "--output", &p(dir.path(), "o")]);
    assert!(r.code == 2 && r.err.starts_with("E:io:"));
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn threshold_is_printed_to_five_places() {
    let out = ok(&["gamma-check", "--alpha", "0.7071", "--t1", "0", "--t2", "1"]);
    let v: f64 = out.trim().strip_prefix("threshold ").unwrap().parse().unwrap();
    assert!((v - 0.125).abs() < 1e-5);
    assert_eq!(out, "threshold 0.12500\n");
}

#[test]
fn shrinker_circle_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let c = p(dir.path(), "sc.json");
    ok(&["soliton", "--kind", "shrinker-circle", "--output", &c, "--report", &p(dir.path(), "r.json")]);
    let curve = read_curve(Path::new(&c)).unwrap();
    assert!(curve.is_closed());
    let worst = curve.points().iter().map(|q| (q.norm() - 2f64.sqrt()).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-5);
    assert!(json(&p(dir.path(), "r.json"))["residual"].as_f64().unwrap() < 1e-6);
    let r = run(&["soliton", "--kind", "shrinker-circle", "--omega", "1", "--output", &c]);
    assert_eq!(r.code, 2);
}

#[test]
fn translator_pipeline_reaches_equality() {
    let dir = tempfile::tempdir().unwrap();
    let (gr, h, csv) = (p(dir.path(), "gr.json"), p(dir.path(), "gr.jsonl"), p(dir.path(), "h.csv"));
    ok(&["soliton", "--kind", "grim-reaper", "--output", &gr]);
    ok(&[
        "evolve", "--input", &gr, "--n", "1024", "--t0", "0", "--t1", "1", "--scheme", "semi-implicit", "--dt", "0.001",
        "--record-every", "10", "--output", &h,
    ]);
    let summary = p(dir.path(), "s.json");
    ok(&["harnack", "--history", &h, "--quantity", "steady", "--v-mode", "optimal", "--t", "0.5", "--report", &csv, "--summary", &summary]);
    let s = json(&summary);
    assert!(s["valid_samples"].as_u64().unwrap() > 100);
    assert!(s["max_abs_quantity"].as_f64().unwrap() < 5e-3);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), crate::HARNACK_CSV_HEADER);
    assert_eq!(text.lines().count(), 1025);
}

#[test]
fn every_written_file_reads_back_identically() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let c = circle_file(d, "c.json", 2.0, 128);
    let h = p(d, "h.jsonl");
    ok(&["evolve", "--input", &c, "--t1", "1", "--record-every", "50", "--output", &h]);
    ok(&["breather-detect", "--history", &h, "--report", &p(d, "s.json")]);
    ok(&["splice", "--history", &h, "--similarity", &p(d, "s.json"), "--mode", "shrinking", "--copies", "3", "--output", &p(d, "sp.jsonl")]);
    ok(&["rescale", "--splice", &p(d, "sp.jsonl"), "--j", "1", "--output", &p(d, "r.jsonl"), "--report", &p(d, "r.json")]);
    ok(&["soliton", "--kind", "yin-yang", "--output", &p(d, "yy.json")]);

    for f in ["h.jsonl", "sp.jsonl", "r.jsonl"] {
        let path = PathBuf::from(p(d, f));
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(history_to_string(&read_history(&path).unwrap()), text, "{f}");
    }
    for f in ["c.json", "yy.json"] {
        let path = PathBuf::from(p(d, f));
        assert_eq!(curve_to_string(&read_curve(&path).unwrap()), fs::read_to_string(&path).unwrap());
    }
    let side_path = default_sidecar(Path::new(&p(d, "sp.jsonl")));
    let side: Sidecar = read_json(&side_path).unwrap();
    write_json(Path::new(&p(d, "copy.json")), &side).unwrap();
    assert_eq!(fs::read(&side_path).unwrap(), fs::read(p(d, "copy.json")).unwrap());
    // detect reports and sidecars both serve as similarity inputs
    let s1 = read_similarity(Path::new(&p(d, "s.json"))).unwrap();
    let s2 = read_similarity(&side_path).unwrap();
    assert_eq!(s1, s2);
    assert!((s1.alpha - 0.5f64.sqrt()).abs() < 1e-3);
}

#[test]
fn splice_outputs_must_differ() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let c = circle_file(d, "c.json", 2.0, 32);
    let h = p(d, "h.jsonl");
    let hist = evolve(&read_curve(Path::new(&c)).unwrap(), 0.0, 1.0, &SolverOptions { record_every: 100, ..Default::default() }).unwrap();
    write_history(Path::new(&h), &hist).unwrap();
    ok(&["breather-detect", "--history", &h, "--report", &p(d, "s.json")]);
    let r = run(&["splice", "--history", &h, "--similarity", &p(d, "s.json"), "--mode", "shrinking", "--copies", "2", "--output", &p(d, "x"), "--sidecar", &p(d, "x")]);
    assert!(r.code == 2 && r.err.starts_with("E:usage:"));
}

#[test]
fn remaining_subcommands_produce_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let c = circle_file(d, "c.json", 2.0, 128);
    let h = p(d, "h.jsonl");
    ok(&["evolve", "--input", &c, "--t1", "1", "--record-every", "20", "--output", &h]);
    ok(&["entropy-verify", "--history", &h, "--center", "0,0", "--t0", "2", "--report", &p(d, "e.json")]);
    let e = json(&p(d, "e.json"));
    assert!(e["monotonicity"]["discrepancy"].as_f64().unwrap() < 1e-2);
    assert!(e["quantities"]["deficit"].is_string());

    let out = ok(&["entropy", "--history", &h, "--center", "-0.5,0", "--t0", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["slices"].as_array().unwrap().len(), read_history(Path::new(&h)).unwrap().len());

    let s: serde_json::Value = serde_json::from_str(&ok(&["sup-entropy", "--input", &c, "--t", "0", "--t0", "2"])).unwrap();
    assert!(s["value"].as_f64().unwrap() > 1.5);

    let g: serde_json::Value = serde_json::from_str(&ok(&["gamma-check", "--input", &c, "--gamma", "0.1", "--windows", "1,2,4,8,100"])).unwrap();
    assert_eq!(g["integral"]["verdict"], "convergent");

    ok(&["breather-detect", "--slice1", &c, "--slice2", &c, "--report", &p(d, "id.json")]);
    assert_eq!(json(&p(d, "id.json"))["alpha"].as_f64(), Some(1.0));
    // a shrinking period is not a steady breather: the junction gap says so
    ok(&["splice", "--history", &h, "--similarity", &p(d, "id.json"), "--mode", "eternal", "--copies", "1", "--output", &p(d, "x.jsonl")]);
    let side = json(&p(d, "x.jsonl.sidecar.json"));
    assert_eq!(side["mode"], "eternal");
    assert!(side["junctions"].as_array().unwrap().iter().all(|j| j["gap"].as_f64().unwrap() > 0.1));

    let yy = p(d, "yy.json");
    ok(&["soliton", "--kind", "yin-yang", "--output", &yy, "--gamma", "0.1"]);
    let r: serde_json::Value = serde_json::from_str(&ok(&["rotator-check", "--input", &yy, "--omega", "-1"])).unwrap();
    assert_eq!(r["pass"], true);
    let yh = p(d, "yy.jsonl");
    write_history(Path::new(&yh), &FlowHistory::new(0.0, read_curve(Path::new(&yy)).unwrap()).unwrap()).unwrap();
    let o: serde_json::Value =
        serde_json::from_str(&ok(&["orbit", "--history", &yh, "--similarity", &p(d, "id.json"), "--p0", "7", "--j", "5"])).unwrap();
    assert_eq!(o["bounded"], true);

    // the first slice sits at t = 0 where sqrt(t) H is not defined
    let r = run(&["harnack", "--history", &h, "--quantity", "sqrtTH", "--index", "0,5"]);
    assert!(r.code == 2 && r.err.starts_with("E:invalid_parameter:"), "{}", r.err);
    let late = p(d, "late.jsonl");
    ok(&["evolve", "--input", &c, "--t0", "1", "--t1", "1.5", "--record-every", "20", "--output", &late]);
    let csv = ok(&["harnack", "--history", &late, "--quantity", "sqrtTH", "--index", "0,5"]);
    assert!(csv.starts_with(crate::SQRT_T_H_CSV_HEADER));
    let slopes: Vec<f64> = csv.lines().skip(1).filter_map(|l| l.split(',').nth(4).and_then(|s| s.parse().ok())).collect();
    assert!(!slopes.is_empty() && slopes.iter().all(|&s| s > 0.0));
}
