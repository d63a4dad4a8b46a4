//! The bundled model files are the presets of the core crate, serialized.
//! `TOPOBAND_BLESS=1` rewrites them.

use std::path::PathBuf;
use topoband::{load_model, model_to_json};
use topoband_core::models::{bhz, harper, qwz, ssh, BulkModel};

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

fn presets() -> Vec<(&'static str, BulkModel)> {
    vec![
        ("ssh_topological.json", ssh(0.5, 1.0)),
        ("ssh_trivial.json", ssh(1.5, 1.0)),
        ("qwz_m1.json", qwz(1.0)),
        ("qwz_m-1.json", qwz(-1.0)),
        ("qwz_m3.json", qwz(3.0)),
        ("gapless.json", qwz(2.0)),
        ("bhz_m1.json", bhz(1.0)),
        ("bhz_m3.json", bhz(3.0)),
        ("harper.json", harper(1.0, 0.0)),
    ]
}

#[test]
fn golden_files_match_presets() {
    let bless = std::env::var_os("TOPOBAND_BLESS").is_some();
    for (name, model) in presets() {
        let path = models_dir().join(name);
        if bless {
            std::fs::write(&path, model_to_json(&model)).unwrap();
        }
        let loaded = load_model(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(loaded, model, "{name}");
        assert_eq!(std::fs::read_to_string(&path).unwrap(), model_to_json(&model), "{name} is not canonical");
    }
}
