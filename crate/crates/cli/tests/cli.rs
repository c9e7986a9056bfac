use std::process::{Command, Output};

use serde_json::Value;

fn ffmoment(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffmoment"))
        .args(args)
        .env_remove("FFMOMENT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn verify_afe_g1() {
    let o = ffmoment(&["verify", "afe", "--q", "5", "--g", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["result"][0]["cases"], 100);
    assert_eq!(v["result"][0]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn moment_q13_ensemble_size() {
    let o = ffmoment(&["moment", "--q", "13", "--g", "1", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["report"]["ensemble_size"], 2028);
    assert_eq!(v["q"], 13);
}

#[test]
fn moment_fixture_and_theory_columns() {
    let o = ffmoment(&["moment", "--q", "5", "--g", "1", "--theory", "--nodes", "16", "--workers", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json(&o)["result"]["report"];
    assert_eq!(r["exact_sum"]["a"], "20456/5");
    assert_eq!(r["exact_sum"]["b"], "0");
    let conj = r["theory_conjecture"].as_f64().unwrap();
    assert!((conj / 4091.2 - 1.0).abs() < 2e-3, "{conj}");
    assert!(r["theory_thm1"].as_f64().unwrap() > 0.0);
}

#[test]
fn coeffs_flags() {
    let o = ffmoment(&["coeffs", "--q", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["all_pass"], true);
    let checks = v["result"]["checks"].as_array().unwrap();
    for name in ["a10 = b10", "a9 = b9", "a8 = b8"] {
        let c = checks.iter().find(|c| c["name"] == name).unwrap();
        assert_eq!(c["pass"], true, "{name}");
    }
}

#[test]
fn exit_codes() {
    // q ≡ 3 mod 4
    assert_eq!(ffmoment(&["moment", "--q", "7"]).status.code(), Some(2));
    // odd k
    assert_eq!(ffmoment(&["moment", "--k", "3"]).status.code(), Some(2));
    assert_eq!(ffmoment(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(ffmoment(&["frobnicate"]).status.code(), Some(2));
    let o = ffmoment(&["moment", "--q", "5", "--g", "9", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    // too small a cutoff for the coefficient tails
    assert_eq!(ffmoment(&["coeffs", "--cutoff", "4"]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical_with_warm_cache() {
    let dir = tempfile::tempdir().unwrap();
    let run = |format: &str| {
        Command::new(env!("CARGO_BIN_EXE_ffmoment"))
            .args(["moment", "--q", "5", "--g", "2", "--shards", "3", "--format", format])
            .env("FFMOMENT_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let cold = run("json");
    assert_eq!(cold.status.code(), Some(0));
    assert!(dir.path().join("lpoly-q5-g2-s0of3.csv").exists());
    let warm = run("json");
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(run("csv").stdout, run("csv").stdout);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "q = 13\ng = 1\nformat = csv\n").unwrap();
    let o = ffmoment(&["moment", "--config", conf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(2).unwrap().starts_with("13,1,4,2028,"), "{text}");
    // flags override the file
    let o = ffmoment(&["moment", "--config", conf.to_str().unwrap(), "--q", "5"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(2).unwrap().starts_with("5,1,4,100,"), "{text}");
    std::fs::write(&conf, "q = 13\nnot_a_key = 1\n").unwrap();
    assert_eq!(ffmoment(&["moment", "--config", conf.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn export_csv_has_one_exact_row_per_discriminant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sub/values.csv");
    let o = ffmoment(&["export", "--q", "5", "--g", "1", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("q=5 g=1") && header.contains("content_hash="));
    assert_eq!(lines.next().unwrap(), "D_code,g,a,b");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 100);
    for r in rows {
        let cells: Vec<&str> = r.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[1], "1");
    }
}

#[test]
fn lpoly_single_discriminant() {
    // x³ + x + 1 over F₅: digits constant term first
    let o = ffmoment(&["lpoly", "--q", "5", "--d", "1101"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let rec = &v["result"][0];
    assert_eq!(rec["g"], 1);
    let c = rec["coeffs"].as_array().unwrap();
    assert_eq!(c.len(), 3);
    assert_eq!(c[0], 1);
    assert_eq!(c[2], 5);
    assert!(rec["zeros"]["modulus_deviation"].as_f64().unwrap() < 1e-8);
    // not square-free
    assert_eq!(ffmoment(&["lpoly", "--q", "5", "--d", "0001"]).status.code(), Some(2));
}

#[test]
fn bounds_report_rows() {
    let o = ffmoment(&["bounds-report", "--q", "5", "--g", "1", "--N", "4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2 + 100);
    assert!(text.lines().nth(1).unwrap().starts_with("D_code,alpha,t,N,lhs"));
}

#[test]
fn conjecture_and_compare() {
    let o = ffmoment(&["conjecture", "--q", "5", "--nodes", "16", "--workers", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["result"]["x_coeffs"].as_array().unwrap().len(), 11);
    let o = ffmoment(&["compare", "--q", "5", "--g", "2", "--nodes", "16", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("1,20456/5,0,"));
}

#[test]
fn verify_minorant_narrowed() {
    let o = ffmoment(&["verify", "minorant", "--q", "5", "--N", "20", "--alpha", "0.75"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}
