//! End-to-end runs of the command line, in process.

use std::path::Path;

use clap::Parser;

use crate::{execute, main_with_args, Cli, ConfigFile, Outcome, Overrides};

fn args<'a>(rest: &'a [&'a str]) -> impl Iterator<Item = &'a str> {
    std::iter::once("sechgate").chain(rest.iter().copied())
}

fn exit_code(rest: &[&str]) -> i32 {
    main_with_args(args(rest))
}

fn run(rest: &[&str]) -> Outcome {
    execute(&Cli::try_parse_from(args(rest)).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn shipped_config_is_the_default() {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("config/reference.toml");
    let file = ConfigFile::load(&shipped).unwrap();
    assert_eq!(file, ConfigFile::default());
    let resolved = file.resolve().unwrap();
    let reference = sechgate::SimConfig::default();
    let mut gate = resolved.gate_config().unwrap();
    crate::config::tests::assert_same_lifetimes(&gate.dissipation, &reference.dissipation);
    gate.dissipation = reference.dissipation;
    assert_eq!(gate, reference);
}

#[test]
fn waveform_quantization_bound() {
    let dir = tempfile::tempdir().unwrap();
    for bits in ["0", "8"] {
        run(&[
            "waveform-dump",
            "--bit-depth",
            bits,
            "--out",
            path(dir.path()),
        ]);
    }
    let read = |name: &str| -> Vec<(f64, f64)> {
        let mut r = csv::Reader::from_path(dir.path().join(name)).unwrap();
        r.records()
            .map(|rec| {
                let rec = rec.unwrap();
                (rec[0].parse().unwrap(), rec[1].parse().unwrap())
            })
            .collect()
    };
    let (raw, coded) = (read("waveform_sech_b0.csv"), read("waveform_sech_b8.csv"));
    assert_eq!(raw.len(), 201);
    assert_eq!(raw.len(), coded.len());
    let peak = raw.iter().map(|p| p.1).fold(0.0, f64::max);
    for (a, b) in raw.iter().zip(&coded) {
        assert_eq!(a.0, b.0);
        assert!((a.1 - b.1).abs() <= peak / (2.0 * 255.0) * (1.0 + 1e-9));
    }
}

#[test]
fn summaries_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "cyclic-amplitude",
        "--shape",
        "sech",
        "--out",
        path(dir.path()),
    ]);
    assert!(
        out.summary.starts_with("cyclic-amplitude"),
        "{}",
        out.summary
    );
    assert!(dir.path().join("cyclic_sech.csv").exists());
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("cyclic_sech.json")).unwrap())
            .unwrap();
    assert!(meta["generated_at"].is_string());
    assert_eq!(meta["command"], "cyclic-amplitude");
    let v = meta["results"]["variation_percent"].as_f64().unwrap();
    assert!((4.0..=13.0).contains(&v), "{v}");

    let out = run(&["fidelity-sweep", "--out", path(dir.path())]);
    assert_eq!(out.failed_checks, 0);
    let mut r = csv::Reader::from_path(dir.path().join("fidelity_sech.csv")).unwrap();
    let f: Vec<f64> = r
        .records()
        .map(|rec| rec.unwrap()[1].parse().unwrap())
        .collect();
    assert_eq!(f.len(), 40);
    assert!(f.iter().all(|&x| x > 0.99 && x <= 1.0 + 1e-12));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "[pulse]\nshape = \"gaussian\"\nbit_depth = 6\n[output]\ndir = \"ignored\"\n",
    )
    .unwrap();
    let target = dir.path().join("run");
    run(&[
        "waveform-dump",
        "--config",
        path(&cfg),
        "--shape",
        "square",
        "--out",
        path(&target),
    ]);
    assert!(target.join("waveform_square_b6.csv").exists());
    assert!(!dir.path().join("ignored").exists());

    let mut file = ConfigFile::from_toml("[pulse]\nbit_depth = 6\n").unwrap();
    file.apply(&Overrides {
        bit_depth: Some(3),
        ..Overrides::default()
    });
    assert_eq!(file.pulse.bit_depth, 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exit_code(&["no-such-command"]), 2);
    assert_eq!(exit_code(&["--help"]), 0);
    assert_eq!(exit_code(&["waveform-dump", "--bit-depth", "many"]), 2);

    let missing = dir.path().join("missing.toml");
    assert_eq!(exit_code(&["waveform-dump", "--config", path(&missing)]), 2);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[pulse]\nsigma_ns = -1.0\n").unwrap();
    assert_eq!(exit_code(&["waveform-dump", "--config", path(&bad)]), 2);
    std::fs::write(&bad, "[pulse\n").unwrap();
    assert_eq!(exit_code(&["waveform-dump", "--config", path(&bad)]), 2);

    // A regular file where the output directory should be.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    assert_eq!(
        exit_code(&["waveform-dump", "--out", path(&blocker.join("sub"))]),
        2
    );

    // Step budget too small for the adaptive integrator.
    let tight = dir.path().join("tight.toml");
    std::fs::write(
        &tight,
        "[evolution]\nmethod = \"adaptive-rk\"\nmax_steps = 5\n",
    )
    .unwrap();
    assert_eq!(
        exit_code(&[
            "phase-curve",
            "--config",
            path(&tight),
            "--out",
            path(dir.path())
        ]),
        3
    );

    assert_eq!(exit_code(&["selftest", "--out", path(dir.path())]), 0);
}

#[test]
fn thread_count_does_not_change_results() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, threads) in [(&a, "1"), (&b, "4")] {
        run(&[
            "rabi-scan",
            "--shape",
            "gaussian",
            "--levels",
            "3",
            "--parallelism",
            threads,
            "--out",
            path(dir.path()),
        ]);
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("rabi_gaussian.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}
