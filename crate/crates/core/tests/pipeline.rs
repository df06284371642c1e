use qsteg::camera::{capture, capture_pair, make_scene, ScenePattern, SensorConfig, DEFAULT_FULL_WELL};
use qsteg::codec::CodecError;
use qsteg::imageio::{read_pgm16, write_pgm16};
use qsteg::stego::{extract, StegoParams};
use qsteg::{hide, reveal, stego_params, Error};

fn message(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = qsteg::rng::SplitMix64::new(seed);
    (0..len).map(|_| rng.next_u64() as u8).collect()
}

#[test]
fn flat_scene_round_trip_through_pgm() {
    let scene = make_scene(256, 256, ScenePattern::Flat, 10_000.0).unwrap();
    let (k, c) = capture_pair(&scene, &SensorConfig::with_seed(5)).unwrap();
    let msg = message(3000, 1);
    let s = hide(&k, &c, &msg, 24, 77, 1, Some(DEFAULT_FULL_WELL)).unwrap();
    let s = read_pgm16(&write_pgm16(&s)).unwrap();
    let got = reveal(&s, &k, 24, 77, 1, Some(DEFAULT_FULL_WELL)).unwrap();
    assert_eq!(got.payload, msg);
    assert!(got.corrected_symbols > 0, "collisions should need correcting");
}

#[test]
fn masked_pcb_scene_round_trip() {
    let scene = make_scene(256, 256, ScenePattern::Pcb, 10_000.0).unwrap();
    let (k, c) = capture_pair(&scene, &SensorConfig::with_seed(8)).unwrap();
    let msg = message(1000, 2);
    let s = hide(&k, &c, &msg, 32, 3, 1, Some(DEFAULT_FULL_WELL)).unwrap();
    let params = stego_params(&k, 1, Some(DEFAULT_FULL_WELL));
    // Masked pixels always carry the key value.
    for (i, usable) in params.usable_mask.as_ref().unwrap().iter().enumerate() {
        if !usable {
            assert_eq!(s.pixels()[i], k.pixels()[i]);
        }
    }
    let got = reveal(&s, &k, 32, 3, 1, Some(DEFAULT_FULL_WELL)).unwrap();
    assert_eq!(got.payload, msg);
}

#[test]
fn block_mode_round_trip() {
    let scene = make_scene(128, 128, ScenePattern::Gradient, 5_000.0).unwrap();
    let (k, c) = capture_pair(&scene, &SensorConfig::with_seed(13)).unwrap();
    let msg = b"block mode".to_vec();
    let s = hide(&k, &c, &msg, 8, 9, 16, None).unwrap();
    let got = reveal(&s, &k, 8, 9, 16, None).unwrap();
    assert_eq!(got.payload, msg);
    assert_eq!(got.corrected_symbols, 0);
}

#[test]
fn wrong_mixing_seed_fails() {
    let scene = make_scene(128, 128, ScenePattern::Flat, 10_000.0).unwrap();
    let (k, c) = capture_pair(&scene, &SensorConfig::with_seed(21)).unwrap();
    let s = hide(&k, &c, b"secret", 8, 1, 1, None).unwrap();
    match reveal(&s, &k, 8, 2, 1, None) {
        Err(Error::Codec(e)) => assert!(e.is_decode_failure(), "{e}"),
        other => panic!("expected decode failure, got {other:?}"),
    }
}

#[test]
fn wrong_key_fails() {
    let scene = make_scene(128, 128, ScenePattern::Flat, 10_000.0).unwrap();
    let sensor = SensorConfig::with_seed(34);
    let (k, c) = capture_pair(&scene, &sensor).unwrap();
    let third = capture(&scene, &sensor, 2).unwrap();
    let s = hide(&k, &c, b"secret", 8, 1, 1, None).unwrap();
    match reveal(&s, &third, 8, 1, 1, None) {
        Err(Error::Codec(e)) => assert!(e.is_decode_failure(), "{e}"),
        other => panic!("expected decode failure, got {other:?}"),
    }
}

#[test]
fn message_too_long() {
    let scene = make_scene(32, 32, ScenePattern::Flat, 10_000.0).unwrap();
    let (k, c) = capture_pair(&scene, &SensorConfig::with_seed(1)).unwrap();
    let err = hide(&k, &c, &[0u8; 200], 8, 1, 1, None).unwrap_err();
    assert!(matches!(err, Error::Codec(CodecError::CapacityExceeded { .. })), "{err}");
}

#[test]
fn stego_pixels_come_from_key_or_cover() {
    let scene = make_scene(64, 64, ScenePattern::Gradient, 2_000.0).unwrap();
    let (k, c) = capture_pair(&scene, &SensorConfig::with_seed(55)).unwrap();
    let s = hide(&k, &c, b"provenance", 8, 4, 1, None).unwrap();
    for i in 0..s.len() {
        let v = s.pixels()[i];
        assert!(v == k.pixels()[i] || v == c.pixels()[i]);
    }
    let bits = extract(&s, &k, &StegoParams::new(1)).unwrap();
    assert_eq!(bits.bits.len(), 64 * 64);
}
