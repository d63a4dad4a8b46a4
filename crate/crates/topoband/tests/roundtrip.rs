use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use topoband::{model_to_json, parse_model, LoadError};
use topoband_core::models::{BulkModel, SymClass};
use topoband_core::random::{chiral_1d, dirac_2band, stream_seed, tri_dirac_4band};

fn draw(kind: u8, seed: u64) -> BulkModel {
    let mut rng = ChaCha8Rng::from_seed(stream_seed(seed, 0));
    match kind {
        0 => chiral_1d(&mut rng).unwrap(),
        1 => dirac_2band(&mut rng).unwrap().to_bulk(SymClass::A, 1).unwrap(),
        _ => tri_dirac_4band(&mut rng).unwrap().to_bulk(SymClass::AII, 2).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn serialize_then_parse_is_identity(kind in 0u8..3, seed in any::<u64>()) {
        let model = draw(kind, seed);
        let text = model_to_json(&model);
        prop_assert_eq!(parse_model(&text).unwrap(), model);
    }

    #[test]
    fn parse_then_serialize_preserves_structure(kind in 0u8..3, seed in any::<u64>()) {
        // compact, reordered input; the canonical form must carry the same values
        let v: Value = serde_json::from_str(&model_to_json(&draw(kind, seed))).unwrap();
        let compact = serde_json::to_string(&v).unwrap();
        let again: Value = serde_json::from_str(&model_to_json(&parse_model(&compact).unwrap())).unwrap();
        prop_assert_eq!(again, v);
    }

    #[test]
    fn garbage_never_panics(text in ".{0,64}") {
        let _ = parse_model(&text);
    }
}

#[test]
fn missing_field_is_a_schema_error() {
    let v: Value = serde_json::from_str(&model_to_json(&topoband_core::models::qwz(1.0))).unwrap();
    for field in ["d", "N", "class", "filling", "V", "A"] {
        let mut w = v.clone();
        w.as_object_mut().unwrap().remove(field);
        match parse_model(&w.to_string()) {
            Err(LoadError::Schema { field: f, .. }) => assert_eq!(f, field),
            other => panic!("{field}: {other:?}"),
        }
    }
}
