use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rowcode::pbm::read_pbm;

const SMALL: &[&str] = &["height=24", "width=20", "images=3", "burn_in=30", "spacing=3", "max_rows=3", "contexts=1-3"];

fn rowcode(args: &[&str], sets: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rowcode"));
    cmd.args(args);
    for s in sets {
        cmd.args(["--set", s]);
    }
    cmd.output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn failure_kind(out: &Output) -> String {
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err.lines().find(|l| l.starts_with("error: kind=")).unwrap_or_else(|| panic!("no error line in {err:?}"));
    line["error: kind=".len()..].split_whitespace().next().unwrap().to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn sample_into(dir: &Path, theta: &str, seed: &str) -> PathBuf {
    let out = dir.join(format!("corpus-{theta}-{seed}"));
    ok(&rowcode(&["sample", "-o", p(&out), "--theta", theta, "--seed", seed], SMALL));
    out
}

#[test]
fn sample_is_deterministic() {
    let t = tempfile::tempdir().unwrap();
    let a = sample_into(t.path(), "0.4", "5");
    let b = t.path().join("again");
    ok(&rowcode(&["sample", "-o", p(&b), "--theta", "0.4", "--seed", "5"], SMALL));
    for i in 0..3 {
        let name = format!("img_{i:03}.pbm");
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
    }
    let config = fs::read_to_string(a.join("config.txt")).unwrap();
    assert!(config.contains("theta=0.4") && config.contains("seed=5"));
}

#[test]
fn independent_samples_are_half_ones() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("c");
    ok(&rowcode(&["sample", "-o", p(&out), "--theta", "0"], &["height=100", "width=100", "images=2", "burn_in=5", "spacing=2"]));
    let img = read_pbm(out.join("img_001.pbm")).unwrap();
    let ones = img.pixels().iter().filter(|&&s| s == 1).count() as f64 / 10_000.0;
    assert!((ones - 0.5).abs() < 0.02, "{ones}");
}

#[test]
fn calibrate_zero_coupling_and_rerun() {
    let t = tempfile::tempdir().unwrap();
    let corpus = t.path().join("c");
    ok(&rowcode(&["sample", "-o", p(&corpus), "--theta", "0"], &["height=60", "width=60", "images=4", "burn_in=5", "spacing=2"]));
    let sets = ["height=60", "width=60", "images=4", "max_rows=3"];
    let (a, b) = (t.path().join("a.csv"), t.path().join("b.csv"));
    let c = format!("corpus={}", p(&corpus));
    let with_corpus: Vec<&str> = sets.iter().copied().chain([c.as_str()]).collect();
    ok(&rowcode(&["calibrate", "-o", p(&a), "--theta", "0"], &with_corpus));
    ok(&rowcode(&["calibrate", "-o", p(&b), "--theta", "0"], &with_corpus));
    let text = fs::read_to_string(&a).unwrap();
    let without_out = |t: &str| t.lines().filter(|l| !l.starts_with("# config out=")).collect::<Vec<_>>().join("\n");
    assert_eq!(without_out(&text), without_out(&fs::read_to_string(&b).unwrap()));
    assert!(text.contains("# config theta=0"));
    let table = rowcode::calibrate::CalibrationTable::from_csv(&text).unwrap();
    assert!(!table.entries.is_empty());
    for r in table.entries.values() {
        assert!(r.theta_star < 0.05, "{r:?}");
    }
}

#[test]
fn every_scheme_round_trips() {
    let t = tempfile::tempdir().unwrap();
    let corpus = sample_into(t.path(), "0.4", "1");
    let training = sample_into(t.path(), "0.4", "2");
    let img = corpus.join("img_002.pbm");
    let cal = t.path().join("cal.csv");
    let c = format!("corpus={}", p(&corpus));
    let sets: Vec<&str> = SMALL.iter().copied().chain([c.as_str()]).collect();
    ok(&rowcode(&["calibrate", "-o", p(&cal)], &sets));

    let tr = format!("training_corpus={}", p(&training));
    let cases: Vec<Vec<&str>> = vec![
        vec!["scheme=model0", "n_rows=3"],
        vec!["scheme=model1", "n_rows=2"],
        vec!["scheme=rcc", "line_rows=2", "strip_rows=1"],
        vec!["scheme=empirical", "context=3", &tr],
        vec!["scheme=empirical", "context=2", &tr, "embed_table=true"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let stream = t.path().join(format!("s{i}.rc"));
        let back = t.path().join(format!("s{i}.pbm"));
        let enc = ok(&rowcode(&["encode", "-i", p(&img), "-o", p(&stream), "--calibration", p(&cal)], case));
        // an embedded table needs nothing at decode time
        let dec_sets: Vec<&str> = if case.contains(&"embed_table=true") { vec![] } else { vec![tr.as_str()] };
        let dec = ok(&rowcode(&["decode", "-i", p(&stream), "-o", p(&back)], &dec_sets));
        assert_eq!(read_pbm(&back).unwrap(), read_pbm(&img).unwrap(), "{case:?}");
        assert_eq!(enc, dec);
        assert!(enc.contains("ideal_bpp=") && enc.contains("actual_bpp="));
    }
}

#[test]
fn error_paths_are_machine_readable() {
    let t = tempfile::tempdir().unwrap();
    let corpus = sample_into(t.path(), "0.4", "3");
    let img = corpus.join("img_000.pbm");
    let stream = t.path().join("s.rc");

    assert_eq!(failure_kind(&rowcode(&["encode", "-i", p(&img), "-o", p(&stream), "--scheme", "model1"], &[])), "config");
    assert_eq!(failure_kind(&rowcode(&["encode"], &["no_such_key=1"])), "config");

    // a calibration without the needed block height
    let cal = t.path().join("cal.csv");
    fs::write(&cal, "# theta=0.4\n0,1,0.6,0,0,0,1\n").unwrap();
    let out = rowcode(&["encode", "-i", p(&img), "-o", p(&stream), "--calibration", p(&cal)], &["scheme=model1", "n_rows=2"]);
    assert_eq!(failure_kind(&out), "missing_calibration");

    ok(&rowcode(&["encode", "-i", p(&img), "-o", p(&stream)], &["scheme=model1", "n_rows=2", "theta_star=0.45"]));
    let bytes = fs::read(&stream).unwrap();
    let cut = t.path().join("cut.rc");
    fs::write(&cut, &bytes[..bytes.len() - 3]).unwrap();
    assert_eq!(failure_kind(&rowcode(&["decode", "-i", p(&cut), "-o", p(&t.path().join("x.pbm"))], &[])), "bitstream");
    assert_eq!(failure_kind(&rowcode(&["decode", "-i", "/nonexistent/x.rc", "-o", "x.pbm"], &[])), "io");
}

#[test]
fn sweep_and_analyze_write_figures() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("sweep");
    ok(&rowcode(&["sweep", "-o", p(&out)], SMALL));
    for f in ["config.txt", "calibration.csv", "rates.csv", "fig2_params.csv", "fig3_model_rates.csv", "fig4_1sided.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let fig3 = fs::read_to_string(out.join("fig3_model_rates.csv")).unwrap();
    assert!(fig3.starts_with("n,r0m,r0m_se,r02,r02_se,r1m,r1m_se,r2m,r2m_se"));
    assert_eq!(fig3.lines().count(), 4);
    let fig4 = fs::read_to_string(out.join("fig4_1sided.csv")).unwrap();
    assert!(fig4.starts_with("c,r1e,r1e_se,r1m_1,r1m_1_se"));

    // the same corpus through analyze, reusing the calibration
    let an = t.path().join("analyze");
    let cal = format!("calibration={}", p(&out.join("calibration.csv")));
    let sets: Vec<&str> = SMALL.iter().copied().chain([cal.as_str()]).collect();
    let stdout = ok(&rowcode(&["analyze", "-o", p(&an)], &sets));
    assert!(stdout.contains("div_0m=") && stdout.contains("info_adjacent="));
    let red = fs::read_to_string(an.join("redundancy.csv")).unwrap();
    assert!(red.contains("info_gap_1,") && red.contains("info_gap_2,unavailable"));
    assert!(an.join("info_gap_exact.csv").exists());
}

#[test]
fn verify_passes_on_narrow_strips() {
    let t = tempfile::tempdir().unwrap();
    let ledger = t.path().join("ledger.txt");
    let stdout = ok(&rowcode(&["verify", "-o", p(&ledger)], &["widths=2-4", "lemma_cases=20"]));
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
    assert_eq!(stdout.lines().count(), 3 * 8 + 1);
    assert!(fs::read_to_string(&ledger).unwrap().starts_with("# config "));
}

#[test]
fn checked_in_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let out = rowcode(&["verify", "-c", p(&dir.join("verify.conf"))], &["widths=2", "lemma_cases=1"]);
    ok(&out);
    for f in fs::read_dir(&dir).unwrap() {
        let path = f.unwrap().path();
        // an unknown key would fail before any work is done
        let out = rowcode(&["encode", "-c", p(&path)], &[]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(!err.contains("unknown key"), "{}: {err}", path.display());
    }
}
