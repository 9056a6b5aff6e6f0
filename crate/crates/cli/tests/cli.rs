use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn zcz_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_zcz"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .expect("spawn zcz");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn zcz(args: &[&str]) -> Run {
    zcz_env(args, &[])
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn seq_files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.join("family")];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn construct_example1_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let r = zcz(&["construct", "--example1", "-o", s(&tmp.path().join("a"))]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("family: 2 sets, K=8 Z=16 L=256 Zc=7"), "{}", r.stdout);
    assert!(r.stdout.contains("set 1: (8,16,256) rho=1 optimal pass"));
    assert!(r.stdout.contains("union: (16,7,256)"));
    assert!(r.stdout.contains("result: PASS"));
}

#[test]
fn construct_four_set_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let r = zcz(&[
        "construct",
        "-q",
        "2",
        "-m",
        "4",
        "-k",
        "2",
        "-s",
        "2",
        "-o",
        s(tmp.path()),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("family: 4 sets, K=8 Z=16 L=256 Zc=3"), "{}", r.stdout);
    assert_eq!(seq_files(tmp.path()).len(), 32);
}

#[test]
fn usage_and_constraint_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let r = zcz(&["construct", "-m", "3", "-k", "2", "-s", "3", "-o", s(tmp.path())]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("s=3 exceeds k=2"), "{}", r.stderr);
    assert_eq!(
        zcz(&["construct", "-m", "3", "-k", "2", "-s", "0", "-o", s(tmp.path())]).code,
        1
    );
    assert_eq!(zcz(&["construct", "--bogus"]).code, 1);
    assert_eq!(zcz(&["verify", s(&tmp.path().join("missing"))]).code, 1);
    assert_eq!(zcz(&["--help"]).code, 0);
    assert_eq!(
        zcz_env(
            &["construct", "--example1", "-o", s(tmp.path())],
            &[("ZCZ_THREADS", "x")]
        )
        .code,
        1
    );
}

#[test]
fn existing_output_needs_force() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("a");
    assert_eq!(zcz(&["construct", "--example1", "-o", s(&dir)]).code, 0);
    assert_eq!(
        zcz(&["construct", "-m", "4", "-k", "2", "-s", "2", "-o", s(&dir)]).code,
        1
    );
    assert_eq!(
        zcz(&["construct", "-m", "4", "-k", "2", "-s", "2", "-o", s(&dir), "--force"]).code,
        0
    );
    assert_eq!(seq_files(&dir).len(), 32);
    assert_eq!(zcz(&["verify", s(&dir)]).code, 0);
}

#[test]
fn verify_deep_and_claims() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("ex1");
    assert_eq!(zcz(&["construct", "--example1", "-o", s(&dir)]).code, 0);
    let r = zcz(&["verify", s(&dir), "--deep"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let cert: Value = serde_json::from_str(&fs::read_to_string(dir.join("certificates.json")).unwrap()).unwrap();
    assert_eq!(cert["deep"]["pass"], true);
    assert_eq!(cert["deep"]["shift_identity"]["pass"], true);
    assert_eq!(cert["deep"]["chunk_checks"], 2 * 2 * 8 * 8 * 17);

    assert_eq!(zcz(&["verify", s(&dir), "--zc", "8"]).code, 2);
    assert_eq!(zcz(&["verify", s(&dir), "--z", "17"]).code, 2);
    assert_eq!(zcz(&["verify", s(&dir), "--zc", "6", "--z", "10"]).code, 0);
}

#[test]
fn corrupted_sequence_fails_with_witness() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("ex1");
    assert_eq!(zcz(&["construct", "--example1", "-o", s(&dir)]).code, 0);
    let file = dir.join("family/0/2.seq");
    let text = fs::read_to_string(&file).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[17] = if lines[17] == "0" { "1" } else { "0" };
    fs::write(&file, lines.join("\n") + "\n").unwrap();
    let r = zcz(&["verify", s(&dir)]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("witness"), "{}", r.stdout);
    let cert: Value = serde_json::from_str(&fs::read_to_string(dir.join("certificates.json")).unwrap()).unwrap();
    assert_eq!(cert["pass"], false);
    assert_eq!(cert["stale_files"][0], "family/0/2.seq");

    fs::write(&file, "q=2 L=3 Z=16 Zc=7\n0\n").unwrap();
    assert_eq!(zcz(&["verify", s(&dir)]).code, 1);
}

#[test]
fn construct_output_verifies_across_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let mut n = 0;
    for q in ["2", "4"] {
        for m in 3..=5usize {
            for k in 1..=m - 2 {
                for sv in 0..=k {
                    let dir = tmp.path().join(format!("{q}-{m}-{k}-{sv}"));
                    let (m, k, sv, seed) = (m.to_string(), k.to_string(), sv.to_string(), n.to_string());
                    let args = [
                        "construct",
                        "-q",
                        q,
                        "-m",
                        &m,
                        "-k",
                        &k,
                        "-s",
                        &sv,
                        "--random-seed",
                        &seed,
                        "-o",
                        s(&dir),
                    ];
                    let r = zcz(&args);
                    assert_eq!(r.code, 0, "{args:?}: {}{}", r.stdout, r.stderr);
                    let r = zcz(&["verify", s(&dir), "--deep"]);
                    assert_eq!(r.code, 0, "{args:?}: {}{}", r.stdout, r.stderr);
                    n += 1;
                }
            }
        }
    }
    assert_eq!(n, 32);
}

#[test]
fn manifest_reproduces_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    let r = zcz(&[
        "construct",
        "-q",
        "4",
        "-m",
        "5",
        "-k",
        "2",
        "-s",
        "1",
        "--random-seed",
        "9",
        "-o",
        s(&first),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        zcz(&["construct", "--from-manifest", s(&first), "-o", s(&second)]).code,
        0
    );
    assert_eq!(seq_files(&first), seq_files(&second));

    let manifest: Value = serde_json::from_str(&fs::read_to_string(first.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "construct");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 16);
    assert_eq!(manifest["certificates"]["family"]["pass"], true);
    let params = tmp.path().join("params.json");
    fs::write(&params, manifest["params"].to_string()).unwrap();
    let third = tmp.path().join("third");
    assert_eq!(zcz(&["construct", "--params", s(&params), "-o", s(&third)]).code, 0);
    assert_eq!(seq_files(&first), seq_files(&third));
}

#[test]
fn overrides_rebuild_example1() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("f.txt");
    fs::write(
        &f,
        "q=2 m=4\n1 * x0*x1\n1 * x0*x2\n1 * x0*x3\n1 * x1\n1 * x1*x2\n1 * x2\n",
    )
    .unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(zcz(&["construct", "--example1", "-o", s(&a)]).code, 0);
    let r = zcz(&[
        "construct",
        "-m",
        "4",
        "-k",
        "2",
        "-s",
        "1",
        "--j",
        "0",
        "--pi",
        "1,0",
        "--f",
        s(&f),
        "--h",
        r#"{"c":[1,1,1],"e":[1,0,0,0]}"#,
        "-o",
        s(&b),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(seq_files(&a), seq_files(&b));

    let cubic = tmp.path().join("cubic.txt");
    fs::write(&cubic, "q=2 m=4\n1 * x0*x1*x2\n").unwrap();
    let r = zcz(&[
        "construct",
        "-m",
        "4",
        "-k",
        "2",
        "-s",
        "1",
        "--f",
        s(&cubic),
        "-o",
        s(&tmp.path().join("c")),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("not a path"), "{}", r.stderr);
    let r = zcz(&[
        "construct",
        "-m",
        "4",
        "-k",
        "2",
        "-s",
        "1",
        "--j",
        "2",
        "--pi",
        "1,0",
        "-o",
        s(&tmp.path().join("d")),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn spectrum_of_constant_toy_set() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir_all(tmp.path().join("family/0")).unwrap();
    fs::write(tmp.path().join("family/0/0.seq"), "q=2 L=4 Z=0 Zc=0\n0\n0\n0\n0\n").unwrap();
    let r = zcz(&["spectrum", s(tmp.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "pair_i,pair_j,shift,re,im\n0,0,0,4,0\n0,0,1,4,0\n0,0,2,4,0\n0,0,3,4,0\n"
    );
}

#[test]
fn spectrum_of_example1_is_zero_inside_zones() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("ex1");
    assert_eq!(zcz(&["construct", "--example1", "-o", s(&dir)]).code, 0);
    let out = tmp.path().join("spectrum.csv");
    assert_eq!(zcz(&["spectrum", s(&dir), "--out", s(&out)]).code, 0);
    let rows = parse_csv(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 16 * 16 * 256);
    for row in rows {
        let (i, j, u): (usize, usize, usize) = (
            row[0].parse().unwrap(),
            row[1].parse().unwrap(),
            row[2].parse().unwrap(),
        );
        let lag = u.min(256 - u);
        let zone = if i / 8 == j / 8 { 16 } else { 7 };
        if lag <= zone && !(i == j && u == 0) {
            assert_eq!(
                (row[3].as_str(), row[4].as_str()),
                ("0", "0"),
                "pair ({i},{j}) shift {u}"
            );
        }
    }
    let r = zcz(&["spectrum", s(&dir), "--max-entries", "1000"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("65536"), "{}", r.stderr);
}

#[test]
fn spectrum_of_random_set_matches_naive_correlation() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (q, len, count) = (4u32, 12usize, 3usize);
    let mut seqs = Vec::new();
    fs::create_dir_all(tmp.path().join("family/0")).unwrap();
    for t2 in 0..count {
        let e: Vec<u32> = (0..len).map(|_| rng.random_range(0..q)).collect();
        let body: String = e.iter().map(|x| format!("{x}\n")).collect();
        fs::write(
            tmp.path().join(format!("family/0/{t2}.seq")),
            format!("q={q} L={len} Z=0 Zc=0\n{body}"),
        )
        .unwrap();
        seqs.push(e);
    }
    let r = zcz(&["spectrum", s(tmp.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = parse_csv(&r.stdout);
    assert_eq!(rows.len(), count * count * len);
    for row in rows {
        let (i, j, u): (usize, usize, usize) = (
            row[0].parse().unwrap(),
            row[1].parse().unwrap(),
            row[2].parse().unwrap(),
        );
        let (mut re, mut im) = (0i64, 0i64);
        for n in 0..len {
            match (seqs[i][n] + q - seqs[j][(n + u) % len]) % q {
                0 => re += 1,
                1 => im += 1,
                2 => re -= 1,
                _ => im -= 1,
            }
        }
        assert_eq!(
            (row[3].parse::<i64>().unwrap(), row[4].parse::<i64>().unwrap()),
            (re, im),
            "{row:?}"
        );
    }
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const SMALL: &str = r#"
seed = 5
clusters = 4
users_per_cluster = 8
max_delay_chips = 3
snr_db = [0.0, 2.0]
bits_per_user = 200
iterations = 10

[family]
kind = "params"
q = 2
m = 4
k = 2
s = 2
"#;

#[test]
fn simulate_writes_curve_per_observed_user() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = tmp.path().join("run");
    let r = zcz(&["simulate", s(&cfg), "-o", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = fs::read_to_string(out.join("ber.csv")).unwrap();
    let rows = parse_csv(&csv);
    assert_eq!(rows.len(), 8);
    let users: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(users.into_iter().collect::<Vec<_>>(), ["0", "16", "24", "8"]);
    assert!(rows.iter().all(|r| r[4] == "2000" && r[6] == "per-bit"));

    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["params"]["seed"], 5);
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["mai_free_expected"], true);
    assert_eq!(summary["curves"].as_array().unwrap().len(), 4);
}

#[test]
fn simulate_is_reproducible_across_runs_and_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let mut outputs = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let out = tmp.path().join(name);
        let r = zcz_env(&["simulate", s(&cfg), "-o", s(&out)], &[("ZCZ_THREADS", threads)]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        outputs.push(fs::read(out.join("ber.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn noiseless_simulation_has_zero_ber() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL.replace("seed = 5", "seed = 6\nnoiseless = true");
    let cfg = write_config(tmp.path(), "quiet.toml", &body);
    let out = tmp.path().join("run");
    assert_eq!(zcz(&["simulate", s(&cfg), "-o", s(&out)]).code, 0);
    let rows = parse_csv(&fs::read_to_string(out.join("ber.csv")).unwrap());
    assert!(rows.iter().all(|r| r[2] == "0"), "{rows:?}");
}

#[test]
fn simulate_from_exported_family_directory() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        zcz(&["construct", "--example1", "-o", s(&tmp.path().join("ex1"))]).code,
        0
    );
    let body = "seed = 3\nclusters = 2\nusers_per_cluster = 8\nmax_delay_chips = 7\nsnr_db = [0.0]\nnoiseless = true\n\
                bits_per_user = 100\niterations = 4\n[family]\nkind = \"dir\"\npath = \"ex1\"\n";
    let cfg = write_config(tmp.path(), "dir.toml", body);
    let r = zcz(&["simulate", s(&cfg), "-o", s(&tmp.path().join("run"))]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("16 users"), "{}", r.stdout);
}

#[test]
fn simulate_rejects_bad_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("noseed.toml", SMALL.replace("seed = 5\n", "")),
        ("unknown.toml", SMALL.replace("seed = 5", "seed = 5\ncolour = 1")),
        ("toomany.toml", SMALL.replace("clusters = 4", "clusters = 5")),
        ("quaternary.toml", SMALL.replace("q = 2", "q = 4")),
        (
            "axis.toml",
            SMALL.replace("seed = 5", "seed = 5\nsnr_axis = \"sideways\""),
        ),
    ];
    for (name, body) in cases {
        let cfg = write_config(tmp.path(), name, &body);
        let r = zcz(&[
            "simulate",
            s(&cfg),
            "-o",
            s(&tmp.path().join(name).with_extension("out")),
        ]);
        assert_eq!(r.code, 1, "{name}: {}", r.stdout);
        assert!(r.stderr.starts_with("error:"), "{name}: {}", r.stderr);
    }
}
