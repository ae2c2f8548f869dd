//! Front-end contracts: config round-trip, manifest completeness, the
//! shipped config files, and the linearization text format.

use std::collections::BTreeSet;
use std::path::Path;

use monotrack_cli::config::{parse_config, parse_config_str};
use monotrack_cli::runner;

#[test]
fn parse_of_emitted_config_is_equal() {
    let config = parse_config_str(
        r#"{
            "study": { "kind": "sweep-scale", "coupling": "single" },
            "simulation": { "dt": 0.0001, "contact_stiffness": 90000.0 },
            "output": { "directory": "elsewhere", "formats": ["csv"] },
            "seed": 7
        }"#,
    )
    .unwrap();
    let emitted = config.canonical_json();
    let reparsed = parse_config_str(&emitted).unwrap();
    assert_eq!(config, reparsed);
    assert_eq!(config.config_hash(), reparsed.config_hash());
}

#[test]
fn manifest_lists_every_written_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_config_str(r#"{ "study": { "kind": "jump" } }"#).unwrap();
    let manifest = runner::run(&config, dir.path(), 1, false).unwrap();

    let on_disk: BTreeSet<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let listed: BTreeSet<String> = manifest.outputs.iter().cloned().collect();
    assert_eq!(on_disk, listed, "orphan or missing files");
    // The hash reproduces from the emitted config copy.
    let copy = parse_config(&dir.path().join("config.json")).unwrap();
    assert_eq!(copy.config_hash(), manifest.config_sha256);
}

#[test]
fn shipped_configs_parse_and_match_the_builtin_nominal() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in [
        "nominal-morphology.json",
        "jump.json",
        "sweep-gear.json",
        "balance-psi.json",
    ] {
        let config = parse_config(&root.join(name)).unwrap_or_else(|e| {
            panic!("configs/{name}: {e}");
        });
        config.validate().unwrap();
    }
    let nominal = parse_config(&root.join("nominal-morphology.json")).unwrap();
    assert_eq!(
        nominal.morphology,
        monotrack_core::MorphologySpec::nominal(),
        "shipped morphology file drifted from the built-in nominal"
    );
}

#[test]
fn strict_mode_fails_on_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    // A mass grid reaching into negative masses produces failure markers.
    let config = parse_config_str(
        r#"{
            "study": {
                "kind": "sweep-mass",
                "link": "neck",
                "masses": { "min": -0.5, "max": 1.5, "points": 3 }
            },
            "output": { "formats": ["csv"] }
        }"#,
    )
    .unwrap();
    let err = runner::run(&config, dir.path(), 1, true).unwrap_err();
    assert!(err.message.contains("strict"), "{}", err.message);
    // Non-strict records the failures instead.
    let manifest = runner::run(&config, dir.path(), 1, false).unwrap();
    assert!(manifest.points_failed > 0);
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.lines().any(|l| l.contains(",1,")), "failure rows missing");
}

#[test]
fn linearized_system_text_format_round_trips() {
    use monotrack_core::balance::{
        default_pitch_grid, find_static_configs, linearize, WheelieModel,
    };
    let model = WheelieModel::new(monotrack_core::MorphologySpec::nominal(), 0.33).unwrap();
    let configs = find_static_configs(&model, &default_pitch_grid(), &[1.3]).unwrap();
    let sys = linearize(&model, &configs[0], 1e-6).unwrap();
    let text = sys.to_matrix_text();

    // Header carries dimensions and state ordering; the blocks parse back
    // to the exact matrices.
    let mut lines = text.lines();
    let dims = lines.next().unwrap();
    assert!(dims.starts_with("# n 12 m 4"), "{dims}");
    let states = lines.next().unwrap();
    assert!(states.contains("roll") && states.contains("q_h_rate"));
    let numbers: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|tok| tok.parse::<f64>().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(numbers.len(), 24); // 12 rows of A then 12 rows of B
    for i in 0..12 {
        for j in 0..12 {
            assert_eq!(numbers[i][j], sys.a[(i, j)]);
        }
        for j in 0..4 {
            assert_eq!(numbers[12 + i][j], sys.b[(i, j)]);
        }
    }
}

#[test]
fn jump_trace_json_is_a_record_stream() {
    use monotrack_core::jump::{simulate_jump, ExtensionPolicy};
    let m = monotrack_core::MorphologySpec::nominal();
    let cfg = monotrack_core::SimConfig::default();
    let trace = simulate_jump(&m, &ExtensionPolicy::nominal(&m), &cfg).unwrap();
    let text = monotrack_cli::emit::trace_json(&trace);
    let mut lines = text.lines();
    let meta: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(meta["samples"].as_u64().unwrap() as usize, trace.samples.len());
    let first: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert!(first["state"]["time"].is_number());
    assert!(first["kinematics"]["h_com"].is_number());
    assert_eq!(lines.count(), trace.samples.len() - 1);
}
