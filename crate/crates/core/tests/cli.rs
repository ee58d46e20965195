use std::path::Path;
use std::process::{Command, Output};

use graphon::io;
use graphon::{LabeledGraph, StepGraphon};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphon"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Value of `key=` in printed output.
fn field(stdout: &str, key: &str) -> f64 {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {stdout}"))
        .parse()
        .unwrap()
}

#[test]
fn sample_zero_one_sbm_gives_two_cliques() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample", "sbm", "--pi", "0.5,0.5", "--B", "1,0,0,1", "--n", "100", "--seed", "7"]);
    let g = io::read_edge_list(&dir.path().join("sample.edges")).unwrap();
    let side = io::read_sidecar(&dir.path().join("sample.json")).unwrap();
    let graphon::Latents::Species(s) = side.latents().unwrap() else { panic!("expected species") };
    for i in 0..100 {
        for j in (i + 1)..100 {
            assert_eq!(g.has_edge(i, j), s[i] == s[j]);
        }
    }
}

#[test]
fn sample_sparse_from_grid_hits_target_density() {
    let dir = tempfile::tempdir().unwrap();
    let w = StepGraphon::from_rows(&[vec![0.9, 0.2], vec![0.2, 0.5]]).unwrap();
    io::write_grid(&dir.path().join("w.json"), &w).unwrap();
    let out = ok(dir.path(), &["sample", "sparse", "--grid", "w.json", "--n", "1000", "--rho", "0.01", "--seed", "1"]);
    // uniform latents: expected density 0.01 * mean(grid) up to the n/(n-1) diagonal factor
    let target = 0.01 * w.mean() * 999.0 / 1000.0;
    let density = field(&out, "density");
    assert!((density - target).abs() < 0.1 * target, "{density} vs {target}");
}

#[test]
fn sample_graphex_keeps_no_isolated_vertices() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample", "graphex", "--kernel", "exp", "--lambda", "5", "--T", "4", "--xmax", "5", "--seed", "3"]);
    let g = io::read_edge_list(&dir.path().join("sample.edges")).unwrap();
    assert!(g.n() > 0);
    assert_eq!(g.isolated_count(), 0);
    let side = io::read_sidecar(&dir.path().join("sample.json")).unwrap();
    assert!(matches!(side.latents().unwrap(), graphon::Latents::Graphex { .. }));
}

#[test]
fn sample_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["sample", "dense", "--kernel", "nope", "--n", "5"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["sample", "dense", "--kernel", "product"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["sample", "dense", "--grid", "missing.json", "--n", "5"]).status.code(), Some(3));
    assert_eq!(run(dir.path(), &["sample", "sbm", "--pi", "0.5,0.5", "--B", "1,0", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn distance_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    io::write_edge_list(&p.join("k4.edges"), &LabeledGraph::complete(4)).unwrap();
    io::write_edge_list(&p.join("e4.edges"), &LabeledGraph::empty(4)).unwrap();
    io::write_edge_list(&p.join("p9.edges"), &LabeledGraph::path(9)).unwrap();
    assert_eq!(field(&ok(p, &["distance", "k4.edges", "k4.edges"]), "distance"), 0.0);
    let out = ok(p, &["distance", "k4.edges", "e4.edges", "--mode", "exact"]);
    assert_eq!(field(&out, "distance"), 0.75);
    assert!(out.contains("mode=exact"));

    let big = run(p, &["distance", "p9.edges", "p9.edges", "--mode", "exact"]);
    assert_eq!(big.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&big.stderr).contains("heuristic"));
}

#[test]
fn labeled_distance_to_constant_shrinks_with_n() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    io::write_grid(&p.join("half.json"), &StepGraphon::constant(1, 0.5).unwrap()).unwrap();
    let mean = |n: usize| {
        (0..5)
            .map(|s| {
                let (n, s) = (n.to_string(), s.to_string());
                ok(p, &["sample", "dense", "--kernel", "const:0.5", "--n", &n, "--seed", &s, "--name", "g"]);
                field(&ok(p, &["distance", "g.edges", "half.json", "--labeled"]), "distance")
            })
            .sum::<f64>()
    };
    assert!(mean(64) < mean(32));
}

#[test]
fn density_of_grid_and_graph() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    io::write_grid(&p.join("half.json"), &StepGraphon::constant(1, 0.5).unwrap()).unwrap();
    io::write_edge_list(&p.join("k5.edges"), &LabeledGraph::complete(5)).unwrap();
    assert_eq!(field(&ok(p, &["density", "half.json"]), "density"), 0.125);
    assert!((field(&ok(p, &["density", "k5.edges"]), "density") - 0.48).abs() < 1e-15);
    assert_eq!(run(p, &["density", "k5.edges", "--motif", "blob"]).status.code(), Some(2));
}

#[test]
fn estimate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let cliques = LabeledGraph::from_fn(40, |i, j| (i < 20) == (j < 20));
    io::write_edge_list(&p.join("cliques.edges"), &cliques).unwrap();
    ok(p, &["estimate", "cliques.edges", "--method", "histogram", "--b", "4"]);
    let w = io::read_grid(&p.join("estimate.w_hat.json")).unwrap();
    for a in 0..4 {
        for c in 0..4 {
            assert_eq!(w.get(a, c), if (a < 2) == (c < 2) { 1.0 } else { 0.0 });
        }
    }

    let n = 30;
    io::write_edge_list(&p.join("k.edges"), &LabeledGraph::complete(n)).unwrap();
    ok(p, &["estimate", "k.edges", "--method", "usvt", "--name", "u"]);
    let m = io::read_matrix_csv(&p.join("u.p_hat.csv")).unwrap();
    let expect = (n - 1) as f64 / n as f64;
    for i in 0..n {
        for j in 0..n {
            let v = if i == j { 0.0 } else { expect };
            assert!((m[(i, j)] - v).abs() < 1e-12);
        }
    }
    assert!(!p.join("u.w_hat.json").exists());

    ok(p, &["sample", "sbm", "--pi", "0.5,0.5", "--B", "0.8,0.1,0.1,0.8", "--n", "300", "--seed", "5", "--name", "sbm"]);
    let out = ok(p, &["estimate", "sbm.edges", "--method", "blockmodel", "--k", "2", "--truth", "sbm.json"]);
    assert!(field(&out, "mse") < 0.01);

    assert_ne!(run(p, &["estimate", "k.edges", "--method", "magic"]).status.code(), Some(0));
}

#[test]
fn complete_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let mut blocks = String::from("n=40\n");
    for i in 0..40 {
        for j in (i + 1)..40 {
            blocks.push_str(&format!("{i}\t{j}\t{}\n", u8::from((i < 20) == (j < 20))));
        }
    }
    std::fs::write(p.join("blocks.obs"), blocks).unwrap();
    let out = ok(p, &["complete", "blocks.obs"]);
    assert!(out.contains("fallback_pairs=0"));
    let m = io::read_matrix_csv(&p.join("completed.csv")).unwrap();
    for i in 0..40 {
        for j in 0..40 {
            let v = if i == j { 0.0 } else { f64::from(u8::from((i < 20) == (j < 20))) };
            assert_eq!(m[(i, j)], v, "({i},{j})");
        }
    }
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(p.join("completed.meta.json")).unwrap()).unwrap();
    for key in ["r", "h", "q", "fallback_pairs", "warning"] {
        assert!(meta.get(key).is_some(), "{key}");
    }

    std::fs::write(p.join("single.obs"), "n=10\n0\t1\t1\n").unwrap();
    let single = run(p, &["complete", "single.obs", "--name", "one"]);
    assert!(single.status.success());
    assert!(String::from_utf8_lossy(&single.stderr).contains("warning"));
    let m = io::read_matrix_csv(&p.join("one.csv")).unwrap();
    assert!((0..10).all(|i| (0..10).all(|j| m[(i, j)] == if i == j { 0.0 } else { 1.0 })));

    std::fs::write(p.join("bip.obs"), "n=4\nbipartite=2,2\n0\t2\t1\n1\t3\t0\n").unwrap();
    let odd = run(p, &["complete", "bip.obs", "--radius", "3"]);
    assert_eq!(odd.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&odd.stderr).contains("even radius"));

    std::fs::write(p.join("empty.obs"), "n=4\n").unwrap();
    assert_eq!(run(p, &["complete", "empty.obs"]).status.code(), Some(3));
    std::fs::write(p.join("bad.obs"), "n=4\n0\t1\t2\n").unwrap();
    assert_eq!(run(p, &["complete", "bad.obs"]).status.code(), Some(3));
}

#[test]
fn sweep_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = ok(p, &["sweep", "consistency", "--kernel", "product", "--n-list", "60", "--seeds", "1"]);
    assert!(out.ends_with("monotone-decreasing: yes\n"));
    let csv = std::fs::read_to_string(p.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(csv.lines().next(), Some("n,rho,seed_count,mse_mean,mse_std"));

    ok(p, &["sweep", "consistency", "--kernel", "const:0.5", "--n-list", "100,400", "--method", "usvt", "--seeds", "3", "--name", "u"]);
    let csv = std::fs::read_to_string(p.join("u.csv")).unwrap();
    let last: f64 = csv.lines().last().unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!(last < 0.01);

    let out = ok(
        p,
        &["sweep", "completion", "--kernel", "product", "--n", "500", "--p-list", "0.05,0.1,0.2,0.4", "--seeds", "10", "--name", "c"],
    );
    assert!(out.contains("monotone-decreasing: yes"));
    assert_eq!(std::fs::read_to_string(p.join("c.csv")).unwrap().lines().count(), 5);

    assert_eq!(run(p, &["sweep", "consistency", "--kernel", "product", "--n-list", "10,x"]).status.code(), Some(2));
    assert_eq!(run(p, &["sweep", "completion", "--kernel", "product", "--n", "50"]).status.code(), Some(2));
}

#[test]
fn json_format_writes_json_tables() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = ok(p, &["--format", "json", "sweep", "consistency", "--kernel", "product", "--n-list", "50", "--seeds", "1"]);
    assert!(out.contains("monotone-decreasing: yes"));
    let rows: serde_json::Value = serde_json::from_slice(&std::fs::read(p.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
    let rec: serde_json::Value = serde_json::from_slice(&std::fs::read(p.join("sweep.run.json")).unwrap()).unwrap();
    assert_eq!(rec["command"], "sweep");
}
