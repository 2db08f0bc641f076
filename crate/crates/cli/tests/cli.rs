use std::path::PathBuf;
use std::process::{Command, Output};

fn focal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_focal"))
        .args(args)
        .env_remove("FOCAL_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = focal(args);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against the stored file; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
    assert!(expected == actual, "{} differs from golden output", name);
}

/// Data rows of a CSV artifact, skipping `#` lines and the header.
fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(csv.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn header(csv: &str) -> String {
    csv.lines().find(|l| !l.starts_with('#')).unwrap().to_string()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn figure_goldens() {
    for (id, name) in [
        ("3", "fig3_minimizer_bars.csv"),
        ("4", "fig4_recursion.csv"),
        ("5", "fig5_max_probability.csv"),
        ("6", "fig6_asymptote.csv"),
        ("9", "fig9_binary_bounds.csv"),
        ("10", "fig10_limit.csv"),
    ] {
        check_golden(name, &stdout(&["figure", id]));
    }
    check_golden(
        "fig7_simplex_scan_r20.csv",
        &stdout(&["figure", "7", "--resolution", "20"]),
    );
    check_golden(
        "minimize_fig3_gamma1.json",
        &stdout(&["minimize", "--gamma", "1", "--pmf", "0.182059,0.462129,0.355812"]),
    );
}

#[test]
fn figure_schemas_match_help() {
    let help = stdout(&["figure", "--help"]);
    for (id, cols) in [
        ("3", "gamma,label,p,p_star"),
        ("4", "step,p0,p1,p2,p3"),
        ("5", "support_size,gamma,p_max,max_p_star"),
        ("6", "support_size,gamma,alpha_star,alpha_asymptotic"),
        ("7", "p1,p2,p3,alpha_star,p_gamma_a,pmin_minus_pa,d1"),
        ("9", "gamma,q_gamma,p_star_1,q_gamma_plus1,gap_bound"),
        ("10", "q_index,gamma,value,target"),
    ] {
        assert!(help.contains(cols), "help lacks {}", cols);
        let args: Vec<&str> = if id == "7" {
            vec!["figure", id, "--resolution", "10"]
        } else {
            vec!["figure", id]
        };
        let csv = stdout(&args);
        assert_eq!(header(&csv), cols);
        assert!(csv.starts_with("# seed=0\n"));
    }
}

#[test]
fn names_address_the_same_figures() {
    for (id, name) in [("3", "minimizer-bars"), ("4", "recursion"), ("9", "binary-bounds"), ("10", "limit")] {
        assert_eq!(stdout(&["figure", id]), stdout(&["figure", "--name", name]));
        assert_eq!(stdout(&["figure", id]), stdout(&["figure", name]));
    }
}

#[test]
fn minimize_matches_fig3_bars() {
    let out = stdout(&["minimize", "--gamma", "1", "--pmf", "0.182059,0.462129,0.355812"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let got: Vec<f64> = v["p_star"]["probs"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in got.iter().zip([0.205601, 0.433151, 0.361249]) {
        assert!((a - b).abs() < 1e-3);
    }
    assert_eq!(v["seed"], 0);
    for key in ["alpha_star", "residual", "iterations", "bracket"] {
        assert!(v.get(key).is_some());
    }
}

#[test]
fn figure_values_match_reference_series() {
    let fig3 = rows(&stdout(&["figure", "3"]));
    let bars = [
        0.192363988704074, 0.447518135736118, 0.360117875560263,
        0.205600699256593, 0.433150548776666, 0.361248751966286,
        0.230977415445977, 0.410466794963668, 0.3585557895899,
    ];
    assert_eq!(fig3.len(), 9);
    for (r, b) in fig3.iter().zip(bars) {
        assert!((num(&r[3]) - b).abs() < 1e-6, "{:?} vs {}", r, b);
    }

    let fig4 = rows(&stdout(&["figure", "4"]));
    let steps = [
        [0.441756579555843, 0.261915248957649, 0.245980274388615, 0.0503478970978921],
        [0.410292024188029, 0.275033035196676, 0.260648104474101, 0.0540268361411944],
        [0.386988832865333, 0.284036599989397, 0.271449668947819, 0.057524898197451],
    ];
    for (k, expect) in steps.iter().enumerate() {
        for (j, e) in expect.iter().enumerate() {
            assert!((num(&fig4[k + 1][j + 1]) - e).abs() < 1e-6);
        }
    }

    let fig5 = rows(&stdout(&["figure", "5"]));
    let s4 = [
        0.349909007183214, 0.349766375040872, 0.349382950863855, 0.348279919546712, 0.344872717657836,
        0.334799646263946, 0.312935514269611, 0.28564690983103, 0.266426926257282, 0.256898306657604,
    ];
    let four: Vec<_> = fig5.iter().filter(|r| r[0] == "4").collect();
    for (r, e) in four.iter().zip(s4) {
        assert!((num(&r[3]) - e).abs() < 1e-6, "{:?} vs {}", r, e);
    }
    assert!((num(&fig5[0][3]) - 0.649127146500632).abs() < 1e-6);
    assert!((num(&fig5[9][3]) - 0.503768920898437).abs() < 1e-4);
    assert!((num(&fig5[10][3]) - 0.429786847961168).abs() < 1e-6);
    assert!((num(&fig5[19][3]) - 0.337882975290995).abs() < 1e-6);

    let fig9 = rows(&stdout(&["figure", "9"]));
    for (k, e) in [(4, 0.175307945852179), (9, 0.277449537058942), (19, 0.370787405133542)] {
        assert!((num(&fig9[k][2]) - e).abs() < 1e-6);
    }

    let fig10 = rows(&stdout(&["figure", "10"]));
    let last: Vec<_> = fig10.iter().filter(|r| num(&r[1]) == 100.0).collect();
    assert!((num(&last[0][2]) - 0.98806).abs() < 1e-4);
    assert!((num(&last[1][2]) - 0.955345).abs() < 1e-4);
}

#[test]
fn negative_gamma_is_usage_error() {
    let out = focal(&["minimize", "--gamma", "-1", "--pmf", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--gamma"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_name_the_flag() {
    for (args, flag) in [
        (vec!["minimize", "--gamma", "1", "--pmf", "0.5,0.6"], "--pmf"),
        (vec!["minimize", "--gamma", "abc", "--pmf", "0.5,0.5"], "--gamma"),
        (vec!["scan", "--gamma", "1", "--resolution", "3"], "--resolution"),
        (vec!["figure", "8"], "unknown figure"),
        (vec!["figure", "3", "--resolution", "20"], "--resolution"),
        (vec!["entropy", "--gamma", "1", "--pmf", "0.5,0.5", "--q", "0.2,0.3,0.5"], "--q"),
        (vec!["loss", "--gamma", "1", "--p", "0.5", "--t", "-1", "--format", "csv"], "--format"),
        (vec!["train-mnist", "--images", "/nonexistent", "--labels", "/nonexistent"], "--images"),
        (vec!["minimize", "--gamma", "1", "--pmf", "0.5,0.5", "--unknown"], "--unknown"),
    ] {
        let out = focal(&args);
        assert_eq!(out.status.code(), Some(64), "{:?}", args);
        assert!(String::from_utf8_lossy(&out.stderr).contains(flag), "{:?}", args);
    }
}

#[test]
fn numerical_failure_exits_2_with_json() {
    let out = focal(&["analyze", "--gamma", "1e308", "--pmf", "0.9,0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["command"], "analyze");
    assert!(v["error"]["kind"].is_string() && v["error"]["message"].is_string());
}

#[test]
fn help_exits_zero() {
    for args in [vec!["--help"], vec!["figure", "--help"], vec!["--version"]] {
        assert_eq!(focal(&args).status.code(), Some(0));
    }
}

#[test]
fn deterministic_and_thread_independent() {
    let a = stdout(&["scan", "--gamma", "0.5", "--resolution", "24", "--jobs", "1"]);
    let b = stdout(&["scan", "--gamma", "0.5", "--resolution", "24", "--jobs", "4"]);
    let c = stdout(&["scan", "--gamma", "0.5", "--resolution", "24"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(!a.contains('\r'));
    assert_eq!(rows(&a).len(), 253);
}

#[test]
fn output_flag_and_alias_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    for (flag, path) in [("--out", &p1), ("--output", &p2)] {
        let out = focal(&["figure", "4", flag, path.to_str().unwrap()]);
        assert!(out.status.success() && out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(String::from_utf8(std::fs::read(&p1).unwrap()).unwrap(), stdout(&["figure", "4"]));
}

#[test]
fn pmf_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, r#"{"labels":["a","b","c"],"probs":[0.182059,0.462129,0.355812]}"#).unwrap();
    let from_file = stdout(&["minimize", "--gamma", "1", "--pmf-file", path.to_str().unwrap(), "--format", "csv"]);
    assert!(from_file.contains("\na,"));
    let inline = stdout(&["minimize", "--gamma", "1", "--pmf", "0.182059,0.462129,0.355812", "--format", "csv"]);
    let col = |s: &str| rows(s).iter().map(|r| r[2].clone()).collect::<Vec<_>>();
    assert_eq!(col(&from_file), col(&inline));
}

#[test]
fn counterexample_through_cli() {
    let out = stdout(&["analyze", "--gamma", "0.2", "--pmf", "0.0196078431372549,0.392156862745098,0.196078431372549,0.392156862745098"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["over_suppression"], true);
    assert_eq!(v["sign_changes"], 2);
    assert_eq!(v["sufficient_conditions"]["prop14"], false);
    let tags: Vec<&str> = v["tags"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
    assert_eq!(tags, ["SUPPRESSED_HIGH", "SUPPRESSED_HIGH", "AMPLIFIED", "OVER_SUPPRESSED"]);
}

#[test]
fn command_tables() {
    for (args, cols) in [
        (vec!["loss", "--gamma", "1", "--p", "0.5", "--format", "csv"], "p,loss,d1,d2,phi,kappa"),
        (vec!["loss", "--gamma", "1", "--t", "-2", "--format", "csv"], "t,p"),
        (vec!["entropy", "--gamma", "1", "--pmf", "0.5,0.5", "--format", "csv"], "quantity,value"),
        (vec!["bounds", "--gamma", "1", "--pmf", "0.7,0.3", "--format", "csv"], "quantity,value"),
        (vec!["binary", "--gamma", "1,2", "--format", "csv"], "gamma,q_gamma,p_star_1,q_gamma_plus1,gap_bound"),
        (vec!["asymptote", "--gamma", "5,10", "--pmf", "0.65,0.35", "--format", "csv"], "gamma,alpha_star,alpha_asymptotic,relative_gap"),
        (vec!["recurse", "--gamma", "1", "--pmf", "0.7,0.3", "--format", "csv"], "step,label,prob"),
        (vec!["limit", "--gamma", "1,10", "--pmf", "0.4,0.58,0.02", "--q", "0.2,0.02,0.78", "--format", "csv"], "gamma,value,target"),
    ] {
        let csv = stdout(&args);
        assert_eq!(header(&csv), cols, "{:?}", args);
        assert!(csv.starts_with("# seed=0\n"));
    }
    let loss = stdout(&["loss", "--gamma", "1", "--p", "0.5"]);
    let v: serde_json::Value = serde_json::from_str(&loss).unwrap();
    assert_eq!(v["points"][0]["d2"].as_f64().unwrap(), 6.0);
}

#[test]
fn seed_is_echoed() {
    let csv = stdout(&["figure", "4", "--seed", "17"]);
    assert!(csv.starts_with("# seed=17\n"));
    let json = stdout(&["binary", "--gamma", "1", "--seed", "17"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["seed"], 17);
}

#[test]
fn synthetic_training_artifacts() {
    let args = ["train-synthetic", "--samples", "400", "--epochs", "2", "--seed", "5"];
    let json = stdout(&args);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["run"]["config"]["seed"], 5);
    assert_eq!(v["run"]["config"]["epochs"], 2);
    assert_eq!(v["run"]["loss_trajectory"].as_array().unwrap().len(), 2);
    assert_eq!(json, stdout(&args));
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv", "--table", "theory"]);
    let csv = stdout(&csv_args);
    assert!(csv.starts_with("# seed=5\n"));
    assert_eq!(header(&csv), "f1_bin,f2_bin,count,p_c0,p_c1");
    assert_eq!(rows(&csv).len(), 16);
}

fn idx_images(images: &[[u8; 16]]) -> Vec<u8> {
    let mut b = vec![0, 0, 8, 3];
    b.extend((images.len() as u32).to_be_bytes());
    b.extend(4u32.to_be_bytes());
    b.extend(4u32.to_be_bytes());
    for im in images {
        b.extend_from_slice(im);
    }
    b
}

fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut b = vec![0, 0, 8, 1];
    b.extend((labels.len() as u32).to_be_bytes());
    b.extend_from_slice(labels);
    b
}

#[test]
fn mnist_training_from_idx_files() {
    let dir = tempfile::tempdir().unwrap();
    let images: Vec<[u8; 16]> = (0..64u8)
        .map(|i| {
            let mut im = [0u8; 16];
            for (k, px) in im.iter_mut().enumerate() {
                *px = i.wrapping_mul(37).wrapping_add(k as u8 * 11);
            }
            im
        })
        .collect();
    let labels: Vec<u8> = (0..64u8).map(|i| i % 10).collect();
    let (ip, lp) = (dir.path().join("img"), dir.path().join("lbl"));
    std::fs::write(&ip, idx_images(&images)).unwrap();
    std::fs::write(&lp, idx_labels(&labels)).unwrap();
    let json = stdout(&[
        "train-mnist",
        "--images",
        ip.to_str().unwrap(),
        "--labels",
        lp.to_str().unwrap(),
        "--epochs",
        "1",
        "--min-count",
        "1",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let ones = labels.iter().filter(|&&l| l == 1).count() as u64;
    assert_eq!(v["mnist"]["class_counts"][1].as_u64().unwrap(), ones);
    assert_eq!(v["mnist"]["class_counts"][0].as_u64().unwrap(), 64 - ones);

    std::fs::write(&lp, idx_labels(&labels[..10])).unwrap();
    let out = focal(&["train-mnist", "--images", ip.to_str().unwrap(), "--labels", lp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
