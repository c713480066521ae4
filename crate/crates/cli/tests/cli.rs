use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabplane"))
        .args(args)
        .env_remove("STABPLANE_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gldim_examples() {
    let o = run(&["gldim", "--s", "0", "--q", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2.0 ParabolaInterior O_x -> O_x[2]\n");

    let o = run(&["gldim", "--json", r#"{"triple":{"center":"0","shape":"consecutive"},"m":[1,1,1],"phi":[0,1.2,2.5]}"#]);
    assert!(stdout(&o).starts_with("2.5 AlgebraicPure"), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["gldim", "--s", "1/0", "--q", "1"]).status.code(), Some(2));
    assert_eq!(run(&["gldim", "--s", "0", "--q", "-5"]).status.code(), Some(2));
    assert_eq!(run(&["gldim", "--triple", "0", "--phi", "0,1"]).status.code(), Some(2));
    // In the depth-0 gap between O and O(1), just under Δ = 1/2.
    let o = run(&["gldim", "--s", "1/2", "--q", "-0.425", "--depth", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "NaN Uncertain\n");
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn exc_text_and_json() {
    let o = run(&["exc", "--window", "-1,1", "--depth", "1"]);
    assert!(stdout(&o).contains("E(1/2)\t[\"2\",\"1\",\"-1/2\"]\n"));
    assert_eq!(stdout(&o).lines().count(), 5);

    let o = run(&["exc", "--window", "0,1", "--depth", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[3]["label"], "3/4");
    assert_eq!(rows[3]["ch"], serde_json::json!(["5", "3", "-3/2"]));
}

#[test]
fn region_example() {
    let o = run(&["region", "--s", "0.01", "--q", "-0.9", "--depth", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("RightLeg owner=E(0)"));
}

#[test]
fn lepotier_csv_header() {
    let o = run(&["lepotier", "--window", "0,1", "--depth", "1"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "owner_label,s_el,s_eplus,q_eplus,s_er,s_el_exact,s_eplus_exact,q_eplus_exact,s_er_exact"
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn wall_output() {
    let o = run(&["wall", "--s", "1/2", "--q", "0", "--ch", "1,0,0"]);
    let text = stdout(&o);
    assert!(text.contains("start\t0.000000000000\t0.000000000000\tSegment"), "{text}");
    assert!(text.contains("end\t1.000000000000\t0.000000000000\tSegment"), "{text}");
}

#[test]
fn parallel_scan_matches_serial() {
    let serial = run(&["scan", "--grid", "-1,1,-1,1/2", "--res", "9,7", "--depth", "3"]);
    let parallel = run(&["scan", "--s-range", "-1,1", "--q-range", "-1,1/2", "--res", "9,7", "--depth", "3", "--jobs", "4"]);
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(serial.stdout, parallel.stdout);
    assert_eq!(stdout(&serial).lines().count(), 1 + 63);
}

#[test]
fn plot_structure_and_determinism() {
    let a = run(&["plot", "--window", "-1.6,1.6", "--depth", "1", "--overlay", "regions"]);
    let b = run(&["plot", "--window", "-1.6,1.6", "--depth", "1", "--overlay", "regions"]);
    assert_eq!(a.stdout, b.stdout);
    let svg = stdout(&a);
    assert!(svg.starts_with("<svg"));
    assert!(svg.ends_with("</svg>\n"));
    // O(-1), O, O(1) and the rank-2 bundles E(±1/2), E(±3/2).
    assert_eq!(svg.matches(r#"class="piece""#).count(), 7);
    let core: Vec<_> = svg.lines().filter(|l| l.contains(r#"class="core""#)).collect();
    assert_eq!(core.len(), 1);
    assert_eq!(core[0].matches('L').count(), 4, "pentagon: one move and four lines");
}

#[test]
fn plot_walls_and_heat() {
    let o = run(&[
        "plot", "--window", "-1,1", "--depth", "2", "--overlay", "walls", "--overlay", "gldim", "--res", "8",
        "--wall", "1/2,0,1,0,0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = stdout(&o);
    assert_eq!(svg.matches(r#"class="wall""#).count(), 3);
    assert!(svg.contains(r#"class="cell""#));
}

#[test]
fn tampered_cache_fails_closed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.json");
    let p = path.to_str().unwrap();
    assert!(run(&["exc", "--depth", "3", "--save-cache", p]).status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    // E(1/2) is (2, 1, -1/2); bumping ch2 breaks χ(E, E) = 1.
    let bad = text.replacen("\"-1/2\"", "\"1/2\"", 1);
    assert_ne!(text, bad);
    std::fs::write(&path, bad).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_stabplane"))
        .args(["exc", "--depth", "1"])
        .env("STABPLANE_CACHE", p)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cache"));
}
