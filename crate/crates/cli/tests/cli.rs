use std::path::{Path, PathBuf};

use assert_cmd::Command;
use lrip::exact::lp::parse_lp;
use lrip::front::Front;
use lrip::instance::{Instance, SizeSpec};
use lrip::metrics::read_metrics_csv;
use lrip::moea::AlgorithmConfig;

fn lrip(out: &Path) -> Command {
    let mut cmd = Command::cargo_bin("lrip").unwrap();
    cmd.arg("--out").arg(out);
    cmd
}

fn tiny_instance(dir: &Path, seed: u64) -> PathBuf {
    let path = dir.join(format!("tiny{seed}.json"));
    Instance::generate(SizeSpec::new(2, 4, 3, 3), seed).unwrap().save(&path).unwrap();
    path
}

fn front(path: &Path) -> Front {
    Front::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn manifest(dir: &Path, command: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{command}.manifest.json"))).unwrap()).unwrap()
}

#[test]
fn gen_writes_the_standard_suite_reproducibly() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    lrip(a.path()).args(["--seed", "4", "gen"]).assert().success();
    lrip(b.path()).args(["--seed", "4", "gen"]).assert().success();
    for i in 1..=12 {
        let name = format!("test{i:02}.json");
        let text = std::fs::read_to_string(a.path().join(&name)).unwrap();
        assert_eq!(text, std::fs::read_to_string(b.path().join(&name)).unwrap());
        let inst = Instance::from_json(&text).unwrap();
        assert_eq!(inst.size(), SizeSpec::STANDARD_SUITE[i - 1]);
    }
    let m = manifest(a.path(), "gen");
    assert_eq!(m["outputs"].as_array().unwrap().len(), 12);
    assert_eq!(m["exit_code"], 0);
}

#[test]
fn gen_with_sizes_writes_one_file() {
    let dir = tempfile::tempdir().unwrap();
    lrip(dir.path()).args(["gen", "--sizes", "2,4,3,3"]).assert().success();
    assert!(dir.path().join("test-2-4-3-3.json").exists());
    assert!(!dir.path().join("test01.json").exists());
}

#[test]
fn solve_is_deterministic_and_hashed() {
    let work = tempfile::tempdir().unwrap();
    let inst = tiny_instance(work.path(), 1);
    let (a, b) = (work.path().join("a"), work.path().join("b"));
    for out in [&a, &b] {
        lrip(out)
            .args(["--seed", "7", "solve", "--algorithm", "nsga2", "--runs", "2", "--fe-budget", "1500", "--n-max", "4"])
            .arg("--instance")
            .arg(&inst)
            .assert()
            .success();
    }
    for r in 1..=2 {
        let name = format!("tiny1-NSGA2-run{r}.front.json");
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
        assert!(a.join(format!("tiny1-NSGA2-run{r}.log.csv")).exists());
        assert_eq!(front(&a.join(&name)).instance_id.as_deref(), Some("tiny1"));
    }
    let m = manifest(&a, "solve");
    for file in m["outputs"].as_array().unwrap() {
        let bytes = std::fs::read(a.join(file["path"].as_str().unwrap())).unwrap();
        let digest: String = sha2_hex(&bytes);
        assert_eq!(file["sha256"].as_str().unwrap(), digest);
    }
    assert_eq!(m["inputs"].as_array().unwrap().len(), 1);
}

fn sha2_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn exact_modes_agree_and_export_parses() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny_instance(dir.path(), 2);
    for mode in ["enumerate", "epsc", "export-lp"] {
        lrip(dir.path())
            .args(["exact", mode, "--n-max", "3"])
            .arg("--instance")
            .arg(&inst)
            .assert()
            .success();
    }
    let e = front(&dir.path().join("tiny2-enumerate.front.json"));
    let c = front(&dir.path().join("tiny2-epsc.front.json"));
    assert!(!e.is_empty());
    assert_eq!(e.points.len(), c.points.len());
    for (p, q) in e.points.iter().zip(&c.points) {
        assert!((p.z1 - q.z1).abs() <= 1e-6 * p.z1.abs() && (p.z2 - q.z2).abs() <= 1e-6 * p.z2.abs());
    }
    let lp = std::fs::read_to_string(dir.path().join("tiny2.lp")).unwrap();
    assert!(parse_lp(&lp).is_ok());
}

#[test]
fn compare_scores_identical_fronts_alike() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny_instance(dir.path(), 3);
    lrip(dir.path())
        .args(["exact", "enumerate", "--n-max", "3"])
        .arg("--instance")
        .arg(&inst)
        .assert()
        .success();
    let base = front(&dir.path().join("tiny3-enumerate.front.json"));
    let mut paths = Vec::new();
    for alg in ["NSGA2", "PESA2"] {
        let mut f = base.clone();
        f.algorithm = alg.into();
        let p = dir.path().join(format!("{alg}.json"));
        std::fs::write(&p, f.to_json()).unwrap();
        paths.push(p);
    }
    lrip(dir.path()).arg("compare").args(&paths).assert().success();
    let rows = read_metrics_csv(std::fs::File::open(dir.path().join("metrics.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.qm == 1.0 && r.test == "tiny3" && r.run == 1));
    assert_eq!(rows[0].dm, rows[1].dm);

    let mut other = base.clone();
    other.instance_id = Some("elsewhere".into());
    let p = dir.path().join("other.json");
    std::fs::write(&p, other.to_json()).unwrap();
    lrip(dir.path()).arg("compare").arg(&paths[0]).arg(&p).assert().code(2);
}

#[test]
fn stats_reports_no_difference_for_identical_values() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("test,run,algorithm,QM,SM,MID,DM\n");
    for alg in ["NSGA2", "NRGA", "SPEA2"] {
        for run in 1..=5 {
            text.push_str(&format!("t1,{run},{alg},1,0.5,0.25,3\n"));
        }
    }
    let path = dir.path().join("m.csv");
    std::fs::write(&path, &text).unwrap();
    lrip(dir.path()).arg("stats").arg("--metrics").arg(&path).assert().success();
    let omnibus = std::fs::read_to_string(dir.path().join("stats-omnibus.csv")).unwrap();
    assert_eq!(omnibus.lines().count(), 5);
    for line in omnibus.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[3], "1");
        assert_eq!(cols[4], "false");
    }
    let pairwise = std::fs::read_to_string(dir.path().join("stats-pairwise-QM.csv")).unwrap();
    assert!(pairwise.starts_with("metric,sample1-sample2,test_statistic,std_error,std_test_statistic,sig,adj_sig"));
    assert!(!pairwise.contains("true"));

    let single = dir.path().join("one.csv");
    std::fs::write(&single, "test,run,algorithm,QM,SM,MID,DM\nt1,1,NSGA2,1,,,3\nt1,2,NSGA2,1,,,3\n").unwrap();
    lrip(dir.path()).arg("stats").arg("--metrics").arg(&single).assert().code(2);
}

#[test]
fn tuned_config_feeds_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny_instance(dir.path(), 4);
    lrip(dir.path())
        .args(["tune", "--algorithm", "nsga2", "--repetitions", "1", "--fe-budget", "300", "--snr-form", "larger-is-better"])
        .arg("--instance")
        .arg(&inst)
        .assert()
        .success();
    let csv = std::fs::read_to_string(dir.path().join("NSGA2-tuning.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    let cfg_path = dir.path().join("NSGA2-config.json");
    let cfg = AlgorithmConfig::from_json(&std::fs::read_to_string(&cfg_path).unwrap()).unwrap();
    assert_eq!(cfg.fe_budget, 300);
    lrip(dir.path())
        .args(["solve", "--runs", "1", "--n-max", "3"])
        .arg("--config")
        .arg(&cfg_path)
        .arg("--instance")
        .arg(&inst)
        .assert()
        .success();
    assert!(dir.path().join("tiny4-NSGA2-run1.front.json").exists());
}

#[test]
fn sweep_writes_one_front_per_multiplier() {
    let dir = tempfile::tempdir().unwrap();
    let inst = tiny_instance(dir.path(), 1);
    lrip(dir.path())
        .args(["sweep-demand", "--method", "enumerate", "--n-max", "3", "--multipliers", "1,1.2"])
        .arg("--instance")
        .arg(&inst)
        .assert()
        .success();
    let low = front(&dir.path().join("tiny1-demand-1.front.json"));
    let high = front(&dir.path().join("tiny1-demand-1.2.front.json"));
    assert!(high.points[0].z1 >= low.points[0].z1);
    assert!(dir.path().join("tiny1-demand.csv").exists());
    lrip(dir.path())
        .args(["sweep-demand", "--multipliers", "1,-2"])
        .arg("--instance")
        .arg(&inst)
        .assert()
        .code(2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema\": 1}").unwrap();
    lrip(dir.path()).args(["exact", "enumerate"]).arg("--instance").arg(&bad).assert().code(2);
    lrip(dir.path()).args(["solve", "--algorithm", "nsga2"]).arg("--instance").arg(&bad).assert().code(2);

    // Four large retailers and three outbound vehicles, none able to carry two.
    let tight = tiny_instance(dir.path(), 9);
    lrip(dir.path())
        .args(["exact", "enumerate", "--n-max", "1"])
        .arg("--instance")
        .arg(&tight)
        .assert()
        .code(3);

    let inst = tiny_instance(dir.path(), 1);
    lrip(dir.path())
        .args(["--time-limit", "0.000001", "solve", "--algorithm", "spea2", "--runs", "1"])
        .arg("--instance")
        .arg(&inst)
        .assert()
        .code(4);
    assert!(front(&dir.path().join("tiny1-SPEA2-run1.front.json")).incomplete);
}
