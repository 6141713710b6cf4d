//! End-to-end tests of the `normsim` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use normsim::output::{CONTOUR_SCHEMA, SERIES_MEAN_HEADER, SERIES_RUNS_HEADER, SERIES_SCHEMA, SUMMARY_HEADER, SUMMARY_SCHEMA};

fn normsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normsim"))
        .args(args)
        .env_remove("NORMSIM_WORKERS")
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec!["run", "--quiet", "--runs", "2", "--periods", "30", "--out-dir", out];
    args.extend_from_slice(extra);
    normsim(&args)
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn default_grid_writes_one_summary_and_four_contours() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let mut names: Vec<String> = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["contour_high.csv", "contour_internal.csv", "contour_low.csv", "contour_moderate.csv", "summary.csv"]
    );

    let summary = lines(&tmp.path().join("summary.csv"));
    assert_eq!(summary[0], SUMMARY_SCHEMA);
    assert_eq!(summary[1], SUMMARY_HEADER);
    assert_eq!(summary.len(), 2 + 48);
    assert!(summary[2].starts_with("0,internal,3,0,0,1,0,1,0,0.3,2,30,"));

    let contour = lines(&tmp.path().join("contour_low.csv"));
    assert_eq!(contour[0], CONTOUR_SCHEMA);
    assert_eq!(contour[1], "# complexity=low K=1 C=1 S=1 rho=0.3");
    assert_eq!(contour[2], "w_inc/w_soc,1/0,0.75/0.25,0.5/0.5,0.25/0.75");
    let rows: Vec<&str> = contour[3..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rows, ["1/0", "0.7/0.3", "0.5/0.5"]);
    assert!(contour[3..].iter().all(|l| l.split(',').count() == 5));
}

#[test]
fn contour_cells_match_summary_rows() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run_in(tmp.path(), &[]).status.code(), Some(0));
    let summary = lines(&tmp.path().join("summary.csv"));
    let contour = lines(&tmp.path().join("contour_moderate.csv"));
    let find = |w_soc: &str, alpha: &str| {
        summary[2..]
            .iter()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|f| f[1] == "moderate" && f[6] == w_soc && f[7] == alpha)
            .map(|f| f[12].to_string())
            .unwrap()
    };
    let row = |i: usize| contour[3 + i].split(',').map(String::from).collect::<Vec<_>>();
    assert_eq!(row(0)[1], find("0", "1"));
    assert_eq!(row(2)[4], find("0.5", "0.25"));
    assert_eq!(row(1)[2], find("0.3", "0.75"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run_in(a.path(), &["--emit-series", "--workers", "1"]).status.code(), Some(0));
    assert_eq!(run_in(b.path(), &["--emit-series", "--workers", "4"]).status.code(), Some(0));
    for name in ["summary.csv", "contour_high.csv", "series_mean.csv", "series_runs.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let mean = lines(&a.path().join("series_mean.csv"));
    assert_eq!((mean[0].as_str(), mean[1].as_str()), (SERIES_SCHEMA, SERIES_MEAN_HEADER));
    assert_eq!(mean.len(), 2 + 48 * 30);
    let runs = lines(&a.path().join("series_runs.csv"));
    assert_eq!(runs[1], SERIES_RUNS_HEADER);
    assert_eq!(runs.len(), 2 + 48 * 2 * 30);
}

#[test]
fn config_file_selects_a_subgrid() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("grid.toml");
    fs::write(
        &cfg,
        "seed = 7\nruns = 2\n\n[model]\nperiods = 25\n\n[grid]\ncouplings = [[1, 1, 1]]\nweights = [[1.0, 0.0]]\nschemes = [[1.0, 0.0], [0.5, 0.5]]\nrho = [0.3, 0.9]\n",
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = normsim(&["run", "-q", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(lines(&out_dir.join("summary.csv")).len(), 2 + 4);
    assert!(out_dir.join("contour_low_rho0.3.csv").exists());
    assert!(out_dir.join("contour_low_rho0.9.csv").exists());
}

#[test]
fn invalid_configuration_exits_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        "[grid]\ncouplings = [[4, 0, 0]]\n",
        "[grid]\nschemes = [[0.6, 0.6]]\n",
        "[grid]\nweights = [[0.5, 0.4]]\n",
        "[grid]\nrho = [1.5]\n",
        "[model]\nnetwork_degree = 3\n",
        "unknown_key = 1\n",
        "runs = 0\n",
        "not toml at all [",
    ];
    for (i, doc) in cases.iter().enumerate() {
        let cfg = tmp.path().join(format!("bad{i}.toml"));
        fs::write(&cfg, doc).unwrap();
        let out = normsim(&["run", "-q", cfg.to_str().unwrap(), "--out-dir", tmp.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "case {i}: {doc}");
        assert!(!out.stderr.is_empty());
    }
    let missing = normsim(&["run", "-q", "/nonexistent/grid.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(normsim(&["run", "--runs", "-3"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_code_3() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = run_in(&blocker.join("sub"), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn landscape_dump_round_trips_through_the_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let dump = tmp.path().join("l.bin");
    let dump = dump.to_str().unwrap();
    let sampled = normsim(&["landscape", "--k", "2", "--c", "2", "--s", "2", "--seed", "11", "--out", dump]);
    assert_eq!(sampled.status.code(), Some(0));
    let loaded = normsim(&["landscape", "--load", dump]);
    assert_eq!(loaded.status.code(), Some(0));
    assert_eq!(sampled.stdout, loaded.stdout);
    let text = String::from_utf8(sampled.stdout).unwrap();
    assert!(text.starts_with("N=4 P=4 K=2 C=2 S=2 rho=0.3 seed=11\nglobal_max="));

    fs::write(tmp.path().join("junk.bin"), b"not a landscape").unwrap();
    let junk = normsim(&["landscape", "--load", tmp.path().join("junk.bin").to_str().unwrap()]);
    assert_eq!(junk.status.code(), Some(3));
    assert_eq!(normsim(&["landscape", "--k", "4"]).status.code(), Some(2));
}
