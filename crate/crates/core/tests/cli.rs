use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use stx_vote::sweep::{read_csv, CSV_COLUMNS};

fn stx_vote(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stx-vote"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const SMALL: &[&str] = &[
    "--packets",
    "8",
    "--phys",
    "ble-1m,ieee802154",
    "--seed",
    "42",
];

#[test]
fn sweep_csv_is_deterministic_and_schema_valid() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for out in ["a.csv", "b.csv"] {
        let mut args = vec!["sweep", "--preset", "sim-narrow-strong", "--out", out];
        args.extend_from_slice(SMALL);
        let o = stx_vote(&args, dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(dir.path().join(out)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);

    let header = String::from_utf8(outputs[0].clone()).unwrap();
    assert_eq!(header.lines().next().unwrap(), CSV_COLUMNS.join(","));
    let rows = read_csv(&outputs[0][..]).unwrap();
    // 2 PHYs x 7 offsets x voting off/on.
    assert_eq!(rows.len(), 28);
    for r in &rows {
        assert_eq!(r.num_packets, 8);
        assert!((0.0..=1.0).contains(&r.per));
        assert!((r.per + r.pdr - 1.0).abs() < 1e-6);
        assert!(r.corrections <= r.num_packets && r.false_accepts <= r.num_packets);
    }
}

#[test]
fn config_file_and_default_output_name() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "preset = sim-wide-weak\nname = tiny\nphys = ble-500k\ncfo_values_hz = 800\nnum_packets = 4\n",
    )
    .unwrap();
    let o = stx_vote(
        &["sweep", "--config", "run.cfg", "--voting", "on"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("ble-500k"));
    let rows = read_csv(fs::File::open(dir.path().join("tiny.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].voting);
    assert_eq!(rows[0].power_delta_db, 6.0);
}

#[test]
fn failed_cells_give_a_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let o = stx_vote(
        &[
            "sweep",
            "--preset",
            "local-255B",
            "--packets",
            "2",
            "--phys",
            "ble-2m",
            "--set",
            "power_deltas_db=0,20",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("capture"));
    // The cells that did run are still written.
    let rows = read_csv(fs::File::open(dir.path().join("local-255B.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
}

#[test]
fn bad_arguments_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = stx_vote(&["sweep", "--preset", "sim-diagonal"], dir.path());
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("sim-diagonal") && err.contains("sim-wide-strong"),
        "{err}"
    );

    let o = stx_vote(
        &[
            "sweep",
            "--preset",
            "sim-wide-weak",
            "--set",
            "slots_per_round=0",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("slots_per_round"));
}

#[test]
fn presets_and_round_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = stx_vote(&["presets"], dir.path());
    let listing = String::from_utf8_lossy(&o.stdout);
    for name in stx_vote::sweep::PRESET_NAMES {
        assert!(listing.contains(name));
    }

    let o = stx_vote(&["round", "--phy", "ble-2m", "--snr-db", "60"], dir.path());
    assert!(o.status.success());
    let trace = String::from_utf8_lossy(&o.stdout);
    assert!(trace.contains("slot 1: crc ok"), "{trace}");
    assert!(trace.contains("delivered on air"));
}
