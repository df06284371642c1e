//! Bit-exact vectors recorded from an independent Python implementation
//! (`data/generate.py`: reedsolo, zlib.crc32, hand-written SplitMix64).

use qsteg::codec::{gather, mixing_permutation, rs_decode, rs_encode, scatter};

fn data(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn perm_file(name: &str) -> Vec<usize> {
    data(name).lines().map(|l| l.trim().parse().unwrap()).collect()
}

fn hex(name: &str) -> Vec<u8> {
    let s = data(name);
    let s = s.trim();
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap())
        .collect()
}

#[test]
fn permutation_eight_slots() {
    assert_eq!(mixing_permutation(8, 1).unwrap(), perm_file("perm_8_seed1.txt"));
    assert_eq!(perm_file("perm_8_seed1.txt"), vec![4, 3, 2, 7, 5, 6, 0, 1]);
}

#[test]
fn permutation_thousand_slots() {
    assert_eq!(
        mixing_permutation(1000, 0xDEAD_BEEF).unwrap(),
        perm_file("perm_1000_seed_deadbeef.txt")
    );
}

#[test]
fn short_payload_wire_format() {
    let golden = hex("rs_short_t8.hex");
    assert_eq!(rs_encode(b"hello, shot noise", 8).unwrap(), golden);
    assert_eq!(rs_decode(&golden, 8).unwrap(), b"hello, shot noise");
}

#[test]
fn multi_block_wire_format() {
    let payload: Vec<u8> = (0..600).map(|i| ((i * 31 + 7) % 256) as u8).collect();
    let golden = hex("rs_multi_t16.hex");
    assert_eq!(golden.len(), 608 + 3 * 16);
    assert_eq!(rs_encode(&payload, 16).unwrap(), golden);
    assert_eq!(rs_decode(&golden, 16).unwrap(), payload);
}

#[test]
fn scatter_with_filler() {
    let coded = rs_encode(b"hi", 8).unwrap();
    let perm = mixing_permutation(203 / 8, 42).unwrap();
    let bits = scatter(&coded, &perm, 203, 42).unwrap();
    let golden: Vec<bool> = data("scatter_hi_t8_cap203_seed42.txt")
        .trim()
        .chars()
        .map(|c| c == '1')
        .collect();
    assert_eq!(bits.bits(), golden.as_slice());
    assert_eq!(gather(&bits, &perm, coded.len()).unwrap(), coded);
}
