use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qsteg::camera::{capture, make_scene, ScenePattern, SensorConfig};
use qsteg::codec::{mixing_permutation, rs_decode, rs_encode, BitVector};
use qsteg::statcheck::{chi_square_attack, Rect};
use qsteg::stego::{embed, extract, StegoParams};

fn camera(c: &mut Criterion) {
    let scene = make_scene(512, 512, ScenePattern::Flat, 10_000.0).unwrap();
    let sensor = SensorConfig::with_seed(1);
    c.bench_function("capture 512x512", |b| b.iter(|| capture(&scene, &sensor, 0).unwrap()));
}

fn codec(c: &mut Criterion) {
    let payload: Vec<u8> = (0..16_384u32).map(|i| i as u8).collect();
    let coded = rs_encode(&payload, 8).unwrap();
    c.bench_function("rs_encode 16 kB", |b| b.iter(|| rs_encode(black_box(&payload), 8).unwrap()));
    c.bench_function("rs_decode 16 kB", |b| b.iter(|| rs_decode(black_box(&coded), 8).unwrap()));
    c.bench_function("mixing_permutation 32768", |b| {
        b.iter(|| mixing_permutation(black_box(32_768), 7).unwrap())
    });
}

fn stego(c: &mut Criterion) {
    let scene = make_scene(512, 512, ScenePattern::Flat, 10_000.0).unwrap();
    let sensor = SensorConfig::with_seed(2);
    let k = capture(&scene, &sensor, 0).unwrap();
    let cv = capture(&scene, &sensor, 1).unwrap();
    let params = StegoParams::new(1);
    let bits = BitVector::random(k.len(), 3);
    let s = embed(&k, &cv, &bits, &params).unwrap();
    c.bench_function("embed 512x512", |b| b.iter(|| embed(&k, &cv, &bits, &params).unwrap()));
    c.bench_function("extract 512x512", |b| b.iter(|| extract(&s, &k, &params).unwrap()));
    c.bench_function("chi_square_attack 512x512", |b| {
        b.iter(|| chi_square_attack(&s, Rect::full(&s)).unwrap())
    });
}

criterion_group!(benches, camera, codec, stego);
criterion_main!(benches);
