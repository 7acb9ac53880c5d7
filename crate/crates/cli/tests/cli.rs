use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thz-fec")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn records(text: &str) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers().unwrap().clone();
    (header, r.records().map(Result::unwrap).collect())
}

fn column(header: &csv::StringRecord, name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn link_sweep_reference_system_has_forty_rows_per_channel() {
    let text =
        stdout(&run(&["link-sweep", "--system", "ref-5x2.16", "--d-min", "0.5", "--d-max", "20", "--d-step", "0.5"]));
    assert!(text.starts_with("# command = link-sweep\n"));
    let (header, rows) = records(&text);
    assert_eq!(rows.len(), 200);
    let ch = column(&header, "channel");
    assert_eq!(rows.iter().filter(|r| &r[ch] == "ch-299.16").count(), 40);
}

#[test]
fn oversized_step_gives_one_distance() {
    let (_, rows) = records(&stdout(&run(&["link-sweep", "--d-min", "3", "--d-max", "4", "--d-step", "10"])));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| &r[0] == "3"));
}

#[test]
fn underflowed_ber_prints_as_zero() {
    let text = stdout(&run(&["link-sweep", "--system", "ref-5x2.16", "--d-min", "0.5", "--d-max", "0.5"]));
    let (header, rows) = records(&text);
    assert!(rows.iter().all(|r| &r[column(&header, "ber")] == "0"));
}

#[test]
fn errors_go_to_stderr_with_nonzero_exit() {
    let cases: [&[&str]; 6] = [
        &["link-sweep", "--system", "ref-7x1.00"],
        &["link-sweep", "--d-min", "0"],
        &["link-sweep", "--d-step", "-1"],
        &["analyze", "--code", "mdpc:2"],
        &["analyze", "--code", "rs:8:224:16", "--optimize"],
        &["simulate", "--code", "mdpc:2:2", "--p-main", "0.1", "--blocks", "0"],
    ];
    for args in cases {
        let out = run(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "), "{args:?}");
    }
    let out = run(&["analyze", "--code", "ldpc:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = run(&["link-sweep", "--out", target.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.csv");
    let args = ["simulate", "--code", "rs:8:28:2", "--p-main", "0.002", "--blocks", "3000", "--seed", "5"];
    let direct = stdout(&run(&args));
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let quiet = run(&with_out);
    assert!(quiet.status.success() && quiet.stdout.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn simulate_metadata_and_error_free_zeros() {
    let text = stdout(&run(&[
        "simulate", "--code", "mdpc:2:2", "--p-main", "0", "--p-aux", "0", "--blocks", "100", "--seed", "1",
    ]));
    for line in ["# seed = 1", "# rng = ChaCha8Rng", "# code = mdpc(2D/2L) k_bits=4 r_bits=5 t=1"] {
        assert!(text.lines().any(|l| l.starts_with(line)), "missing {line}");
    }
    let (header, rows) = records(&text);
    assert_eq!(rows.len(), 1);
    for col in ["residual_ber", "block_error_rate", "failed_blocks", "bit_errors", "oracle_block_error"] {
        assert_eq!(&rows[0][column(&header, col)], "0", "{col}");
    }
    assert_eq!(&rows[0][column(&header, "corrected_blocks")], "100");
}

#[test]
fn different_seeds_differ() {
    let a = stdout(&run(&["simulate", "--code", "mdpc:2:4", "--p-main", "0.05", "--blocks", "4000", "--seed", "1"]));
    let b = stdout(&run(&["simulate", "--code", "mdpc:2:4", "--p-main", "0.05", "--blocks", "4000", "--seed", "2"]));
    assert_ne!(a, b);
}

#[test]
fn analyze_fixed_mdpc_at_ten_meters() {
    let text = stdout(&run(&["analyze", "--code", "mdpc:2:28", "--d-min", "10", "--d-max", "10"]));
    let (header, rows) = records(&text);
    let r = &rows[0];
    let num = |c: &str| r[column(&header, c)].parse::<f64>().unwrap();
    assert!((num("code_rate") - 0.9322).abs() < 5e-5);
    assert_eq!(num("rate_ratio"), 16.0);
    let (pm, pa) = (num("ber_main"), num("ber_aux"));
    let p_re = ((784.0 * pm + 57.0 * pa - 1.0) / 841.0).max(0.0);
    assert!((num("p_re") - p_re).abs() <= 1e-15);
    assert!((num("p_b") - (1.0 - (1.0 - p_re).powi(784))).abs() < 1e-12);
    assert_eq!(&r[column(&header, "infeasible")], "false");
    assert_eq!(&r[column(&header, "mc_blocks")], "");
}

#[test]
fn analyze_optimize_keeps_infeasible_points() {
    let text = stdout(&run(&["analyze", "--code", "rs:8:2", "--optimize"]));
    let (header, rows) = records(&text);
    assert_eq!(rows.len(), 40);
    let rf: Vec<f64> = rows.iter().map(|r| r[column(&header, "code_rate")].parse().unwrap()).collect();
    assert!(rf.windows(2).all(|w| w[0] >= w[1]));
    let flags: Vec<&str> = rows.iter().map(|r| &r[column(&header, "infeasible")]).collect();
    assert!(flags.contains(&"true") && flags.contains(&"false"));
}

#[test]
fn analyze_with_monte_carlo_columns() {
    let text = stdout(&run(&[
        "analyze",
        "--code",
        "rs:8:28:2",
        "--d-min",
        "6",
        "--d-max",
        "7",
        "--d-step",
        "1",
        "--d-aux",
        "1",
        "--blocks",
        "4000",
    ]));
    let (header, rows) = records(&text);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(&r[column(&header, "mc_blocks")], "4000");
        assert_eq!(&r[column(&header, "d_aux_m")], "1");
        assert_eq!(&r[column(&header, "oracle_kind")], "rs_binomial");
        let mc: f64 = r[column(&header, "mc_block_error_rate")].parse().unwrap();
        let se: f64 = r[column(&header, "mc_block_error_rate_se")].parse().unwrap();
        let oracle: f64 = r[column(&header, "p_b_oracle")].parse().unwrap();
        assert!((mc - oracle).abs() <= 4.0 * se.max(1e-3), "{mc} {oracle} {se}");
    }
}

#[test]
fn config_file_overrides_a_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.cfg");
    fs::write(&path, "# bench\npreset = main-aux\nlabel = bench\nnoise_figure_db = 7\naux.tx_power_dbm = -8\n")
        .unwrap();
    let text = stdout(&run(&["link-sweep", "--system", path.to_str().unwrap(), "--d-min", "1", "--d-max", "1"]));
    let (header, rows) = records(&text);
    let aux = rows.iter().find(|r| &r[column(&header, "channel")] == "aux").unwrap();
    assert_eq!(&aux[column(&header, "tx_power_dbm")], "-8");
    assert_eq!(&aux[column(&header, "system")], "bench");
    let noise: f64 = aux[column(&header, "noise_dbm")].parse().unwrap();
    assert!((noise - (-77.530_360_472_726_41)).abs() < 1e-9, "{noise}");

    fs::write(&path, "preset = main-aux\nmain.bandwidth = 1\n").unwrap();
    let out = run(&["link-sweep", "--system", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn analyze_reference_system_with_chosen_channels() {
    let text = stdout(&run(&[
        "analyze",
        "--system",
        "ref-5x2.16",
        "--main",
        "ch-297.00",
        "--aux",
        "ch-294.84",
        "--code",
        "mdpc:2:28",
        "--d-max",
        "2",
    ]));
    let (header, rows) = records(&text);
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][column(&header, "rate_ratio")], "1");
    let out = run(&["analyze", "--system", "ref-1x10.80", "--code", "mdpc:2:28"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no channel 'main'"));
}
