use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn shotflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shotflow")).args(args).env_remove("SHOTFLOW_CONFIG").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn ingest_fixture() {
    let out = shotflow(&["ingest", p(&fixture("season.csv"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let metrics = json(&out);
    let rows = metrics.as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows[0].get("ts_pct").is_some() && rows[0].get("fts").is_some());
    assert!(stderr(&out).contains("zero_minutes"));
}

#[test]
fn ingest_missing_file() {
    let out = shotflow(&["ingest", "/no/such/logs.csv"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("/no/such/logs.csv"));
}

#[test]
fn ingest_malformed_row_names_index() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(
        &path,
        "player_id,game_id,minutes,started,fga,fta,points\n\
         a,g1,30,1,10,4,12\n\
         b,g1,30,1,ten,4,12\n",
    )
    .unwrap();
    let out = shotflow(&["ingest", p(&path)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("row 2"), "{}", stderr(&out));
}

#[test]
fn ingest_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("metrics.json");
    let out = shotflow(&["ingest", p(&fixture("season.csv")), "--out", p(&dest)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let written: serde_json::Value = serde_json::from_str(&fs::read_to_string(&dest).unwrap()).unwrap();
    assert!(written.is_array());
}

fn metrics_file(dir: &Path) -> PathBuf {
    let dest = dir.join("metrics.json");
    let out = shotflow(&["ingest", p(&fixture("season.csv")), "--out", p(&dest)]);
    assert_eq!(code(&out), 0);
    dest
}

#[test]
fn fit_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let metrics = metrics_file(dir.path());
    let out = shotflow(&["fit", p(&metrics)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let profiles = json(&out);
    assert_eq!(profiles.as_array().unwrap().len(), 14);
    let err = stderr(&out);
    assert!(err.contains("p15") && err.contains("p16"));

    let committed = fs::read_to_string(fixture("profiles_14.json")).unwrap();
    assert_eq!(stdout(&out), committed);
}

#[test]
fn fit_nobody_qualifies() {
    let dir = tempfile::tempdir().unwrap();
    let metrics = metrics_file(dir.path());
    let out = shotflow(&["fit", p(&metrics), "--min-games-fit", "500"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn fit_constant_usage_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("metrics.json");
    let mut rows = Vec::new();
    for g in 0..12 {
        rows.push(serde_json::json!({
            "player_id": "flat", "game_id": format!("g{g:02}"),
            "ts_pct": 0.5 + 0.01 * f64::from(g), "fts": 0.2, "total_shots": 10
        }));
        rows.push(serde_json::json!({
            "player_id": "vary", "game_id": format!("g{g:02}"),
            "ts_pct": 0.6 - 0.2 * (0.1 + 0.02 * f64::from(g)), "fts": 0.1 + 0.02 * f64::from(g), "total_shots": 10
        }));
    }
    fs::write(&path, serde_json::to_string(&rows).unwrap()).unwrap();
    let out = shotflow(&["fit", p(&path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let profiles = json(&out);
    let ids: Vec<_> = profiles.as_array().unwrap().iter().map(|p| p["player_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["vary"]);
    assert!(stderr(&out).contains("flat"));
}

#[test]
fn compare_fixture_lineup() {
    let out = shotflow(&["compare", p(&fixture("profiles_14.json")), "--players", "p01,p02,p03,p04,p05"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 5);
    let payoffs: Vec<f64> = reports.iter().map(|r| r["payoff"].as_f64().unwrap()).collect();
    assert!(payoffs.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(reports[0]["strategy"], "optimal");
    assert!(v["poa"]["ratio"].as_f64().unwrap() >= 1.0);
}

#[test]
fn compare_csv_and_verify() {
    let out = shotflow(&[
        "compare",
        p(&fixture("lineup_mixed.json")),
        "--players",
        "ace,big,flat,hot,wing",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("strategy,payoff,feasible,x1,x2,x3,x4,x5"));
    assert!(lines.next().unwrap().starts_with("optimal,"));

    let out =
        shotflow(&["compare", p(&fixture("lineup_mixed.json")), "--players", "ace,big,flat,hot,wing", "--verify"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let gap = v["oracle"]["gap"].as_f64().unwrap();
    assert!(gap.abs() <= 5e-3);
}

#[test]
fn compare_unknown_player() {
    let out = shotflow(&["compare", p(&fixture("profiles_14.json")), "--players", "p01,p02,p03,p04,zzz"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("zzz"));
}

#[test]
fn compare_wrong_arity() {
    let out = shotflow(&["compare", p(&fixture("profiles_14.json")), "--players", "p01,p02,p03"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn compare_infeasible_lineup() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    let profiles: Vec<_> = (1..=5)
        .map(|i| serde_json::json!({"player_id": format!("z{i}"), "slope": -0.5, "intercept": 0.0, "n_games": 0, "r_squared": 1.0}))
        .collect();
    fs::write(&path, serde_json::to_string(&profiles).unwrap()).unwrap();
    let out = shotflow(&["compare", p(&path), "--players", "z1,z2,z3,z4,z5"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn enumerate_roster_of_fourteen() {
    let out = shotflow(&["enumerate", p(&fixture("profiles_14.json")), "--group", "roster"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["lineup_count"], 2002);
    assert_eq!(v["group_size"], 14);
    assert_eq!(v["group"], "roster");
}

#[test]
fn enumerate_seven_starters() {
    let out = shotflow(&["enumerate", p(&fixture("profiles_7.json")), "--group", "starters"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["lineup_count"], 21);

    let out = shotflow(&[
        "enumerate",
        p(&fixture("profiles_14.json")),
        "--group",
        "starters",
        "--logs",
        p(&fixture("season.csv")),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["group_size"], 7);
    assert_eq!(v["lineup_count"], 21);
}

#[test]
fn enumerate_roster_from_logs() {
    let out = shotflow(&[
        "enumerate",
        p(&fixture("profiles_14.json")),
        "--group",
        "roster",
        "--logs",
        p(&fixture("season.csv")),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["lineup_count"], 2002);
}

#[test]
fn enumerate_too_few() {
    let out = shotflow(&["enumerate", p(&fixture("profiles_4.json"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn enumerate_lineups_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("lineups.csv");
    let out = shotflow(&["enumerate", p(&fixture("profiles_7.json")), "--lineups-csv", p(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lineup,strategy,payoff,feasible"));
    assert_eq!(lines.count(), 21 * 5);
}

#[test]
fn braess_defaults() {
    let out = shotflow(&["braess"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["equilibrium"]["total_cost"].as_f64(), Some(100.0));
    assert_eq!(v["optimal_lane_agents"], 5);
    assert_eq!(v["optimal_total_cost"].as_f64(), Some(75.0));
}

#[test]
fn braess_rejects_negative_agents() {
    let out = shotflow(&["braess", "--agents", "-3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "shot_cap = 0.35\nmin_games_fit = 12\n").unwrap();

    let out = shotflow(&["config", "--config", p(&path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("shot_cap = 0.35"));
    assert!(text.contains("min_games_fit = 12"));

    let out = Command::new(env!("CARGO_BIN_EXE_shotflow"))
        .args(["config", "--shot-cap", "0.3"])
        .env("SHOTFLOW_CONFIG", &path)
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("shot_cap = 0.3\n"));
    assert!(text.contains("min_games_fit = 12"));
}

#[test]
fn config_rejects_unknown_key_and_bad_cap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "shot_capp = 0.35\n").unwrap();
    assert_eq!(code(&shotflow(&["config", "--config", p(&path)])), 2);
    assert_eq!(code(&shotflow(&["config", "--shot-cap", "0.1"])), 2);
}
