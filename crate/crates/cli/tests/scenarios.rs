use std::fs;
use std::path::PathBuf;

use monorep_cli::{parse_scenario, run, RunOptions, RunReport};
use serde_json::Value;

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run_file(name: &str) -> RunReport {
    let text = fs::read_to_string(scenario_path(name)).unwrap();
    run(&parse_scenario(&text).unwrap(), &RunOptions::default()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn every_shipped_scenario_parses_and_round_trips() {
    for entry in fs::read_dir(scenario_path("")).unwrap() {
        let path = entry.unwrap().path();
        let s = parse_scenario(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(parse_scenario(&s.to_string()).unwrap(), s, "{}", path.display());
    }
}

#[test]
fn strict_br_on_identity_lands_on_the_diagonal_window() {
    let r = run_file("strict_br_identity.scn");
    let p = &r.outputs["point"];
    let (x, xs) = (num(&p["x"][0]), num(&p["xstar"][0]));
    assert!(x > 0.4 && x < 0.5, "{x}");
    assert!((x - xs).abs() < 1e-12);
    assert_eq!(r.outputs["within_bounds"], true);
    assert!(r.trace.is_some());
}

#[test]
fn dual_condition_on_half_square_holds_with_zero_gaps() {
    let r = run_file("dual_condition_half_square.scn");
    assert_eq!(r.outputs["verdict"], true);
    assert!(num(&r.outputs["primal_min_gap"]).abs() <= 1e-12);
    assert!(num(&r.outputs["dual_min_gap"]).abs() <= 1e-12);
    assert_eq!(r.outputs["tol_class"], "closed-form");
}

#[test]
fn fitz_eval_identity_on_graph_is_pairing() {
    let r = run_file("fitz_eval_identity.scn");
    assert!((num(&r.outputs["value"]) - 1.0).abs() <= 1e-12);
}

#[test]
fn shifted_pairing_fails_and_serializes_infinity_as_text() {
    let r = run_file("shifted_pairing.scn");
    assert_eq!(r.outputs["verdict"], false);
    assert_eq!(r.outputs["dual_min_gap"], "inf");
    assert!((num(&r.outputs["primal_min_gap"]) + 0.1).abs() < 1e-12);
}

#[test]
fn rotation_grid_passes_the_dual_condition() {
    let r = run_file("dual_condition_rotation.scn");
    assert_eq!(r.outputs["verdict"], true);
    assert_eq!(r.tol_class, monorep::TolClass::Grid);
    assert!(num(&r.outputs["primal_min_gap"]) >= -1e-6);
}

#[test]
fn scaled_refinement_and_probe_scenarios() {
    let r = run_file("br_refine_scaled.scn");
    let t = num(&r.outputs["limit"]["x"][0]);
    assert!(t > 0.48 && t < 0.5, "{t}");
    assert_eq!(r.outputs["summary"]["final_ok"], true);

    let r = run_file("maximality_probe.scn");
    assert_eq!(r.outputs["verdict"], true);
    let d = r.outputs["distances"].as_array().unwrap();
    assert!(num(d.last().unwrap()) <= 1e-3);
}

#[test]
fn translation_and_duality_scenarios() {
    let r = run_file("translate_check.scn");
    assert_eq!(r.outputs["gap_identity_holds"], true);
    assert_eq!(r.outputs["conjugate_identity_holds"], true);

    let r = run_file("fenchel_duality.scn");
    assert!(num(&r.outputs["gap"]).abs() <= 1e-6);
    assert_eq!(r.outputs["attainment_verified"], true);
}

#[test]
fn rejected_probe_is_a_precondition_error() {
    let text = fs::read_to_string(scenario_path("rejected_probe.scn")).unwrap();
    let e = run(&parse_scenario(&text).unwrap(), &RunOptions::default()).unwrap_err();
    match &e {
        monorep::Error::NotMonotonicallyRelated { inf, .. } => assert!((inf + 0.25).abs() < 1e-6),
        other => panic!("{other}"),
    }
    assert_eq!(monorep_cli::exit_code(&e), monorep_cli::ExitCode::Precondition);
}

#[test]
fn sampled_operators_flag_lower_bounds() {
    let text = "SCENARIO s\nDIMENSION 1\nOBJECT t identity\nOBJECT ts graph-sample base=t r=2 m=9\n\
                OBJECT phi fitzpatrick op=ts\nCOMMAND check-family h=phi op=t m=9\n";
    let r = run(&parse_scenario(text).unwrap(), &RunOptions::default()).unwrap();
    assert_eq!(r.outputs["lower_bound"], true);
    assert_eq!(r.outputs["member"], true);
    assert!(r.warnings.iter().any(|w| w.contains("lower bound")));
}

#[test]
fn grid_tolerance_floor_loosens_verdicts() {
    // Gap −1e−7 fails the closed-form tolerance but passes the grid one.
    let text = "SCENARIO s\nDIMENSION 1\nOBJECT h pairing shift=1e-7\nCOMMAND dual-condition h=h\n";
    let s = parse_scenario(text).unwrap();
    let strict = run(&s, &RunOptions::default()).unwrap();
    assert_eq!(strict.outputs["verdict"], false);
    let opts = RunOptions {
        tol_class: Some(monorep::TolClass::Grid),
        ..RunOptions::default()
    };
    let grid = run(&s, &opts).unwrap();
    assert_eq!(grid.outputs["verdict"], true);
    assert_eq!(grid.tol_class, monorep::TolClass::Grid);
}

#[test]
fn reports_are_deterministic_up_to_timing() {
    let text = fs::read_to_string(scenario_path("translate_check.scn")).unwrap();
    let s = parse_scenario(&text).unwrap();
    let strip = |r: RunReport| {
        let mut v: Value = serde_json::from_str(&r.to_json()).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(run(&s, &RunOptions::default()).unwrap());
    let b = strip(run(&s, &RunOptions::default()).unwrap());
    assert_eq!(a, b);
    let other = RunOptions {
        seed: Some(12),
        ..RunOptions::default()
    };
    let c = strip(run(&s, &other).unwrap());
    assert_ne!(a, c);
}
