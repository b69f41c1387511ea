use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use sgmor::commands::{reduce_file, run_assemble, run_reduce, run_report, run_verify, REDUCE_HEADER, VERIFY_HEADER};
use sgmor::config::InputSignal;
use sgmor::{ExperimentConfig, ReducerKind};
use sgmor_core::galerkin::assemble;
use sgmor_core::msd::{build_msd, MsdConfig};
use sgmor_core::polychaos::PcBasis;
use tempfile::TempDir;

fn small(dir: &Path, degree: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig { degree, out: dir.to_path_buf(), ..Default::default() };
    cfg.r_max = 6;
    cfg.simulation.t_end = 5.0;
    cfg.simulation.h = 0.01;
    cfg.simulation.verify_r = vec![2, 4];
    cfg
}

fn sgmor(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sgmor")).args(args).output().unwrap()
}

/// Parses a coordinate Matrix Market file into a dense row-major matrix.
fn read_mtx(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let dims: Vec<usize> = lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
    let mut m = vec![vec![0.0; dims[1]]; dims[0]];
    let mut count = 0;
    for line in lines {
        let t: Vec<&str> = line.split(' ').collect();
        let (i, j): (usize, usize) = (t[0].parse().unwrap(), t[1].parse().unwrap());
        m[i - 1][j - 1] = t[2].parse().unwrap();
        if header.ends_with("symmetric") {
            assert!(i >= j);
            m[j - 1][i - 1] = m[i - 1][j - 1];
        }
        count += 1;
    }
    assert_eq!(count, dims[2]);
    (header, m)
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn mean_value_system_summary() {
    let dir = TempDir::new().unwrap();
    let s = run_assemble(&small(dir.path(), 0)).unwrap();
    assert_eq!((s.s, s.dim), (1, 4));
    // diagonal mass, tridiagonal damping, tridiagonal stiffness plus the 1-3 coupling
    assert_eq!(s.nnz_percent, [25.0, 62.5, 75.0]);
    let summary = csv_rows(&dir.path().join("summary.csv"));
    assert_eq!(summary[1], ["0", "14", "1", "4", "25.00", "62.50", "75.00"]);
}

#[test]
fn matrix_market_files_reproduce_the_assembly() {
    let dir = TempDir::new().unwrap();
    let s = run_assemble(&small(dir.path(), 1)).unwrap();
    assert_eq!((s.s, s.dim), (15, 60));
    let sys = build_msd(&MsdConfig::default()).unwrap();
    let g = assemble(&sys, &PcBasis::new(14, 1).unwrap()).unwrap();
    for (name, m) in [("mass.mtx", &g.mass), ("damping.mtx", &g.damping), ("stiffness.mtx", &g.stiffness)] {
        let (header, read) = read_mtx(&dir.path().join(name));
        assert_eq!(header, "%%MatrixMarket matrix coordinate real symmetric");
        let dense = m.to_dense();
        for (i, row) in read.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(v.to_bits(), dense[(i, j)].to_bits(), "{name} ({i}, {j})");
            }
        }
    }
    let (header, b) = read_mtx(&dir.path().join("input.mtx"));
    assert_eq!(header, "%%MatrixMarket matrix coordinate real general");
    assert_eq!(b[3][0], 100.0);
    assert_eq!(b.iter().flatten().filter(|&&v| v != 0.0).count(), 1);
}

#[test]
fn bt_reduce_is_stable_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = small(dir.path(), 1);
    let (path, report) = run_reduce(&cfg).unwrap();
    assert_eq!(path, dir.path().join("reduce_bt.csv"));
    assert_eq!(report.rows.len(), 6);
    let first = fs::read(&path).unwrap();
    let rows = csv_rows(&path);
    assert_eq!(rows[0], REDUCE_HEADER);
    for row in &rows[1..] {
        assert_eq!(row[5], "true");
        assert!(row[1..5].iter().all(|f| !f.is_empty()));
        // 17 significant digits
        assert_eq!(row[3].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
    let rel: Vec<f64> = rows[1..].iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(rel[5] < rel[0]);
    run_reduce(&cfg).unwrap();
    assert_eq!(fs::read(&path).unwrap(), first);
}

#[test]
fn empty_range_writes_header_only() {
    let dir = TempDir::new().unwrap();
    let mut cfg = small(dir.path(), 1);
    cfg.r_max = 0;
    let (path, report) = run_reduce(&cfg).unwrap();
    assert!(report.rows.is_empty());
    assert_eq!(fs::read_to_string(path).unwrap(), "r,sigma_r,h2_abs,h2_rel,lambda_max,stable\n");
}

#[test]
fn arnoldi_rows_and_report_merge() {
    let dir = TempDir::new().unwrap();
    let mut cfg = small(dir.path(), 0);
    run_reduce(&cfg).unwrap();
    cfg.reducer = ReducerKind::Arnoldi;
    cfg.r_max = 8;
    let (path, _) = run_reduce(&cfg).unwrap();
    assert_eq!(path, dir.path().join(reduce_file(ReducerKind::Arnoldi)));
    let arnoldi = csv_rows(&path);
    for row in &arnoldi[1..] {
        assert!(row[1].is_empty());
        assert_eq!(row[2].is_empty(), row[5] == "false");
    }
    // the full Krylov space reproduces the system
    assert!(arnoldi[8][3].parse::<f64>().unwrap() < 1e-6);

    let table = csv_rows(&run_report(&cfg).unwrap());
    assert_eq!(table.len(), 9);
    let bt = csv_rows(&dir.path().join("reduce_bt.csv"));
    assert_eq!(table[3][..4], [bt[3][0].clone(), bt[3][1].clone(), bt[3][3].clone(), bt[3][4].clone()]);
    assert_eq!(table[8][1], "");
    assert_eq!(table[8][4..], arnoldi[8][3..6]);
}

#[test]
fn report_without_results_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run_report(&small(dir.path(), 0)).unwrap_err().exit_code(), 2);
}

#[test]
fn verify_bound_and_full_order_row() {
    let dir = TempDir::new().unwrap();
    let cfg = small(dir.path(), 0);
    let rows = run_verify(&cfg).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.holds == Some(true)));
    assert!(rows.iter().all(|r| r.certificate_residual.unwrap() <= 1e-12));
    let fom = rows.last().unwrap();
    assert_eq!(fom.r, 8);
    assert!(fom.passive && fom.lambda_max <= 1e-10);
    assert_eq!(csv_rows(&dir.path().join("verify.csv"))[0], VERIFY_HEADER);
    let traj = csv_rows(&dir.path().join("trajectory_r4.csv"));
    assert_eq!(traj[0], ["t", "y", "ybar", "abs_err"]);
    assert_eq!(traj.len(), 502);
}

#[test]
fn zero_input_gives_zero_columns() {
    let dir = TempDir::new().unwrap();
    let mut cfg = small(dir.path(), 0);
    cfg.simulation.input = InputSignal::Zero;
    for row in run_verify(&cfg).unwrap() {
        assert_eq!((row.observed, row.bound, row.holds), (Some(0.0), Some(0.0), Some(true)));
        assert_eq!(row.certificate_residual, Some(0.0));
    }
}

#[test]
fn binary_runs_from_config_file() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("model.toml");
    fs::write(&model, sgmor::model::ModelFile::from(&MsdConfig::default()).to_toml()).unwrap();
    let config = dir.path().join("exp.toml");
    fs::write(&config, "model = \"model.toml\"\ndegree = 0\nout = \"res\"\n[reduce]\nr_max = 3\n").unwrap();
    let c = config.to_str().unwrap();

    let out = sgmor(&["assemble", "--config", c]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "d=0 q=14 s=1 dim=4 nnz% M=25.00 D=62.50 K=75.00");

    let other: PathBuf = dir.path().join("other");
    let out = sgmor(&["reduce", "--config", c, "--rmax", "2", "--out", other.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(csv_rows(&other.join("reduce_bt.csv")).len(), 3);
    assert!(dir.path().join("res/summary.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let write = |name: &str, text: &str| {
        let p = d.join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };

    let bad = write("bad.toml", "degree = \"two\"");
    assert_eq!(sgmor(&["assemble", "--config", &bad]).status.code(), Some(2));
    let range = write("range.toml", "degree = 0\n[reduce]\nr_max = 9");
    assert_eq!(sgmor(&["reduce", "--config", &range]).status.code(), Some(2));
    assert_eq!(sgmor(&["reduce", "--reducer", "pod"]).status.code(), Some(2));

    // without dampers the system is not asymptotically stable
    write("undamped.toml", "masses = [1.0]\nsprings = [{ ends = [0, 1], value = 4.0 }]\ninput_spring = 1\ndelta = 0.1");
    let undamped = write(
        "u.toml",
        &format!("model = \"undamped.toml\"\nout = \"{}\"\ndegree = 1\n[reduce]\nr_max = 2", d.join("u").display()),
    );
    assert_eq!(sgmor(&["reduce", "--config", &undamped]).status.code(), Some(3));

    let missing = d.join("missing.toml");
    assert_eq!(sgmor(&["assemble", "--config", missing.to_str().unwrap()]).status.code(), Some(4));
    let file = write("plain", "");
    assert_eq!(sgmor(&["assemble", "--degree", "0", "--rmax", "4", "--out", &file]).status.code(), Some(4));
}
