//! Systematic Reed–Solomon coding over GF(2^8) and the framed payload format.
//!
//! Codewords are `data || parity`, with the first byte as the highest-degree
//! coefficient. The generator polynomial has consecutive roots
//! `alpha^0 .. alpha^(parity-1)`. Decoding is errors-only:
//! Berlekamp–Massey, Chien search, then Forney.
//!
//! The framed stream is `[len: u32 BE][crc32: u32 BE][payload]`, cut into
//! blocks of `255 - parity` bytes (the last one may be short), each block
//! followed directly by its parity bytes.

use super::gf256 as gf;
use super::CodecError;

/// Length-and-CRC header prepended to the payload.
pub const HEADER_LEN: usize = 8;
/// Codeword length of a full block.
pub const BLOCK_LEN: usize = 255;

pub fn check_parity(parity_symbols: usize) -> Result<(), CodecError> {
    if !(2..=254).contains(&parity_symbols) || parity_symbols % 2 != 0 {
        return Err(CodecError::ParityOutOfRange(parity_symbols));
    }
    Ok(())
}

/// Generator polynomial, lowest degree first; monic of degree `nsym`.
pub fn generator(nsym: usize) -> Vec<u8> {
    (0..nsym).fold(vec![1u8], |g, i| gf::poly_mul(&g, &[gf::exp(i), 1]))
}

/// Parity bytes for one block of data.
pub fn encode_block(data: &[u8], generator: &[u8]) -> Vec<u8> {
    let nsym = generator.len() - 1;
    let mut rem = vec![0u8; nsym];
    for &d in data {
        let feedback = d ^ rem[0];
        rem.rotate_left(1);
        rem[nsym - 1] = 0;
        if feedback != 0 {
            for (j, r) in rem.iter_mut().enumerate() {
                *r ^= gf::mul(feedback, generator[nsym - 1 - j]);
            }
        }
    }
    rem
}

fn syndromes(codeword: &[u8], nsym: usize) -> Vec<u8> {
    (0..nsym)
        .map(|j| {
            let x = gf::exp(j);
            codeword.iter().fold(0u8, |acc, &c| gf::mul(acc, x) ^ c)
        })
        .collect()
}

fn berlekamp_massey(synd: &[u8]) -> Vec<u8> {
    let mut c = vec![1u8];
    let mut b = vec![1u8];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last_d = 1u8;
    for n in 0..synd.len() {
        let mut d = synd[n];
        for i in 1..=l.min(c.len() - 1) {
            d ^= gf::mul(c[i], synd[n - i]);
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = gf::div(d, last_d);
        let mut next = c.clone();
        if next.len() < b.len() + m {
            next.resize(b.len() + m, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            next[i + m] ^= gf::mul(coef, bi);
        }
        if 2 * l <= n {
            b = c;
            l = n + 1 - l;
            last_d = d;
            m = 1;
        } else {
            m += 1;
        }
        c = next;
    }
    c.truncate(l + 1);
    c
}

/// Correct a codeword in place. Returns the number of corrected symbols.
pub fn decode_block(codeword: &mut [u8], nsym: usize) -> Result<usize, ()> {
    let n = codeword.len();
    if n <= nsym || n > BLOCK_LEN {
        return Err(());
    }
    let synd = syndromes(codeword, nsym);
    if synd.iter().all(|&s| s == 0) {
        return Ok(0);
    }
    let locator = berlekamp_massey(&synd);
    let errors = locator.len() - 1;
    if errors == 0 || 2 * errors > nsym {
        return Err(());
    }

    let mut positions = Vec::with_capacity(errors);
    for i in 0..n {
        let power = n - 1 - i;
        let x_inv = gf::exp(255 - power % 255);
        if gf::poly_eval(&locator, x_inv) == 0 {
            positions.push(i);
        }
    }
    if positions.len() != errors {
        return Err(());
    }

    let mut omega = gf::poly_mul(&synd, &locator);
    omega.truncate(nsym);
    // Formal derivative: only odd powers survive in characteristic 2.
    let derivative: Vec<u8> = locator
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| if j % 2 == 1 { c } else { 0 })
        .collect();

    for &i in &positions {
        let power = n - 1 - i;
        let x = gf::exp(power);
        let x_inv = gf::inv(x);
        let denom = gf::poly_eval(&derivative, x_inv);
        if denom == 0 {
            return Err(());
        }
        let magnitude = gf::mul(x, gf::div(gf::poly_eval(&omega, x_inv), denom));
        codeword[i] ^= magnitude;
    }
    if syndromes(codeword, nsym).iter().any(|&s| s != 0) {
        return Err(());
    }
    Ok(errors)
}

/// Length of the coded stream for a payload of `payload_len` bytes.
pub fn coded_len(payload_len: usize, parity_symbols: usize) -> usize {
    let framed = payload_len + HEADER_LEN;
    let k = BLOCK_LEN - parity_symbols;
    framed + framed.div_ceil(k) * parity_symbols
}

/// Codeword lengths making up a coded stream of `len` bytes.
pub fn block_lengths(len: usize, parity_symbols: usize) -> Result<Vec<usize>, CodecError> {
    check_parity(parity_symbols)?;
    let full = len / BLOCK_LEN;
    let rem = len % BLOCK_LEN;
    if len == 0 || (rem != 0 && rem <= parity_symbols) {
        return Err(CodecError::InvalidCodedLength(len));
    }
    let mut out = vec![BLOCK_LEN; full];
    if rem != 0 {
        out.push(rem);
    }
    Ok(out)
}

pub fn rs_encode(payload: &[u8], parity_symbols: usize) -> Result<Vec<u8>, CodecError> {
    check_parity(parity_symbols)?;
    let len = u32::try_from(payload.len()).map_err(|_| CodecError::PayloadTooLong(payload.len()))?;
    let mut framed = Vec::with_capacity(payload.len() + HEADER_LEN);
    framed.extend_from_slice(&len.to_be_bytes());
    framed.extend_from_slice(&crc32fast::hash(payload).to_be_bytes());
    framed.extend_from_slice(payload);

    let gen = generator(parity_symbols);
    let mut out = Vec::with_capacity(coded_len(payload.len(), parity_symbols));
    for chunk in framed.chunks(BLOCK_LEN - parity_symbols) {
        out.extend_from_slice(chunk);
        out.extend_from_slice(&encode_block(chunk, &gen));
    }
    Ok(out)
}

/// Decode a coded stream, returning the payload and the number of symbols
/// corrected along the way.
pub fn rs_decode_counted(coded: &[u8], parity_symbols: usize) -> Result<(Vec<u8>, usize), CodecError> {
    let lengths = block_lengths(coded.len(), parity_symbols)?;
    let mut framed = Vec::with_capacity(coded.len());
    let mut corrected = 0;
    let mut offset = 0;
    for (block, &n) in lengths.iter().enumerate() {
        let mut cw = coded[offset..offset + n].to_vec();
        corrected += decode_block(&mut cw, parity_symbols)
            .map_err(|_| CodecError::Uncorrectable { block })?;
        framed.extend_from_slice(&cw[..n - parity_symbols]);
        offset += n;
    }
    if framed.len() < HEADER_LEN {
        return Err(CodecError::InvalidCodedLength(coded.len()));
    }
    let len = u32::from_be_bytes(framed[0..4].try_into().unwrap()) as usize;
    let crc = u32::from_be_bytes(framed[4..8].try_into().unwrap());
    if framed.len() - HEADER_LEN != len {
        return Err(CodecError::HeaderLength {
            declared: len,
            available: framed.len() - HEADER_LEN,
        });
    }
    let payload = framed.split_off(HEADER_LEN);
    let actual = crc32fast::hash(&payload);
    if actual != crc {
        return Err(CodecError::CrcMismatch {
            expected: crc,
            actual,
        });
    }
    Ok((payload, corrected))
}

pub fn rs_decode(coded: &[u8], parity_symbols: usize) -> Result<Vec<u8>, CodecError> {
    rs_decode_counted(coded, parity_symbols).map(|(p, _)| p)
}

/// Recover a payload from a stream whose coded length is unknown: the coded
/// bytes are a prefix of `stream` and the rest is filler.
///
/// The first block is tried as a full codeword; failing that, every possible
/// single short block is probed until one yields a consistent header and CRC.
pub fn rs_decode_prefix(stream: &[u8], parity_symbols: usize) -> Result<(Vec<u8>, usize), CodecError> {
    check_parity(parity_symbols)?;
    let k = BLOCK_LEN - parity_symbols;
    let mut first_error = None;
    if stream.len() >= BLOCK_LEN {
        let mut cw = stream[..BLOCK_LEN].to_vec();
        match decode_block(&mut cw, parity_symbols) {
            Ok(_) => {
                let len = u32::from_be_bytes(cw[0..4].try_into().unwrap()) as usize;
                let total = coded_len(len, parity_symbols);
                if len + HEADER_LEN >= k && total <= stream.len() {
                    match rs_decode_counted(&stream[..total], parity_symbols) {
                        Ok(r) => return Ok(r),
                        Err(e) => first_error = Some(e),
                    }
                } else {
                    first_error = Some(CodecError::HeaderLength {
                        declared: len,
                        available: stream.len(),
                    });
                }
            }
            Err(()) => first_error = Some(CodecError::Uncorrectable { block: 0 }),
        }
    }
    let longest = stream.len().min(BLOCK_LEN - 1);
    for n in (HEADER_LEN + parity_symbols)..=longest {
        let mut cw = stream[..n].to_vec();
        if decode_block(&mut cw, parity_symbols).is_err() {
            continue;
        }
        let len = u32::from_be_bytes(cw[0..4].try_into().unwrap()) as usize;
        if len + HEADER_LEN + parity_symbols != n {
            continue;
        }
        if let Ok(r) = rs_decode_counted(&stream[..n], parity_symbols) {
            return Ok(r);
        }
    }
    Err(first_error.unwrap_or(CodecError::Uncorrectable { block: 0 }))
}
