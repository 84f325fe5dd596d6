mod common;

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vpc_core::bundle::{
    layer_file_name, read_bundle, write_bundle, Violation, LAYERS_DIR, META_FILE,
};
use vpc_core::error::BundleError;

use common::random_bundle;

fn write_fixture(dir: &Path) -> std::path::PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut bundle = random_bundle(&mut rng, 0);
    while bundle.num_layers() < 3 {
        bundle = random_bundle(&mut rng, 0);
    }
    bundle.includes_embedding_layer = false;
    let path = dir.join("bundle");
    write_bundle(&bundle, &path).unwrap();
    path
}

#[test]
fn random_bundles_round_trip_bit_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..50 {
        let bundle = random_bundle(&mut rng, i);
        let path = tmp.path().join(format!("b{i}"));
        write_bundle(&bundle, &path).unwrap();
        let back = read_bundle(&path).unwrap();
        assert_eq!(back.samples, bundle.samples);
        assert_eq!(back.model_id, bundle.model_id);
        assert_eq!(
            back.includes_embedding_layer,
            bundle.includes_embedding_layer
        );
        for (a, b) in back.layers.iter().zip(&bundle.layers) {
            let a: Vec<u32> = a.iter().map(|v| v.to_bits()).collect();
            let b: Vec<u32> = b.iter().map(|v| v.to_bits()).collect();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn spec_sized_bundle_has_expected_files() {
    use vpc_core::bundle::{BundleSample, EmbeddingBundle};
    let tmp = tempfile::tempdir().unwrap();
    let sample = |id: &str| BundleSample {
        id: id.into(),
        clean_text: "give up".into(),
        construction: "give_up".into(),
        verb_category: "give".into(),
        subword_span: [0, 1],
    };
    let bundle = EmbeddingBundle {
        model_id: "m".into(),
        hidden_dim: 3,
        includes_embedding_layer: false,
        samples: vec![sample("a"), sample("b")],
        layers: vec![vec![0.0; 6], vec![1.0; 6]],
    };
    let path = tmp.path().join("out");
    write_bundle(&bundle, &path).unwrap();
    assert!(path.join(META_FILE).is_file());
    for name in ["layer_01.f32", "layer_02.f32"] {
        assert_eq!(
            fs::metadata(path.join(LAYERS_DIR).join(name))
                .unwrap()
                .len(),
            24
        );
    }
    assert!(matches!(
        write_bundle(&bundle, &path),
        Err(BundleError::AlreadyExists(_))
    ));
}

#[test]
fn truncated_layer_is_a_shape_mismatch_naming_the_layer() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_fixture(tmp.path());
    let file = path.join(LAYERS_DIR).join(layer_file_name(2));
    let bytes = fs::read(&file).unwrap();
    fs::write(&file, &bytes[..bytes.len() - 4]).unwrap();
    match read_bundle(&path) {
        Err(e @ BundleError::ShapeMismatch { layer: 2, .. }) => {
            assert!(e.to_string().contains("layer 2"))
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_layer_file_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_fixture(tmp.path());
    fs::remove_file(path.join(LAYERS_DIR).join(layer_file_name(3))).unwrap();
    assert!(matches!(
        read_bundle(&path),
        Err(BundleError::MissingLayer { layer: 3, .. })
    ));
}

#[test]
fn nan_entry_is_rejected_with_coordinates() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_fixture(tmp.path());
    let file = path.join(LAYERS_DIR).join(layer_file_name(1));
    let mut bytes = fs::read(&file).unwrap();
    bytes[..4].copy_from_slice(&f32::NAN.to_le_bytes());
    fs::write(&file, bytes).unwrap();
    match read_bundle(&path) {
        Err(BundleError::Invalid(report)) => assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::NonFinite {
                layer: 1,
                row: 0,
                col: 0,
                ..
            }
        ))),
        other => panic!("unexpected {other:?}"),
    }
}

fn edit_meta(path: &Path, f: impl FnOnce(&mut serde_json::Value)) {
    let meta = path.join(META_FILE);
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&meta).unwrap()).unwrap();
    f(&mut v);
    fs::write(&meta, serde_json::to_string(&v).unwrap()).unwrap();
}

#[test]
fn meta_lies_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();

    let path = write_fixture(&tmp.path().join("a"));
    edit_meta(&path, |v| {
        v["hidden_dim"] = (v["hidden_dim"].as_u64().unwrap() + 1).into()
    });
    assert!(matches!(
        read_bundle(&path),
        Err(BundleError::ShapeMismatch { layer: 1, .. })
    ));

    let path = write_fixture(&tmp.path().join("b"));
    edit_meta(&path, |v| {
        v["num_layers"] = (v["num_layers"].as_u64().unwrap() + 1).into()
    });
    assert!(matches!(
        read_bundle(&path),
        Err(BundleError::MissingLayer { .. })
    ));

    let path = write_fixture(&tmp.path().join("c"));
    edit_meta(&path, |v| {
        v["samples"].as_array_mut().unwrap().pop();
    });
    assert!(matches!(
        read_bundle(&path),
        Err(BundleError::ShapeMismatch { .. })
    ));

    let path = write_fixture(&tmp.path().join("d"));
    edit_meta(&path, |v| v["format_version"] = 2.into());
    assert!(matches!(
        read_bundle(&path),
        Err(BundleError::UnsupportedVersion(2))
    ));

    let path = write_fixture(&tmp.path().join("e"));
    edit_meta(&path, |v| {
        v["samples"][0]["construction"] = "give_over".into()
    });
    assert!(matches!(read_bundle(&path), Err(BundleError::Invalid(_))));

    let path = write_fixture(&tmp.path().join("f"));
    fs::write(path.join(META_FILE), "{ not json").unwrap();
    assert!(matches!(read_bundle(&path), Err(BundleError::Meta { .. })));
}
