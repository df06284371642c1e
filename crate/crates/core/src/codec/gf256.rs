//! Arithmetic in GF(2^8) modulo x^8 + x^4 + x^3 + x^2 + 1, generator 2.

use std::sync::OnceLock;

pub const PRIMITIVE_POLY: u16 = 0x11D;

struct Tables {
    // exp is doubled so products of logs index without a modulo.
    exp: [u8; 512],
    log: [u8; 256],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exp = [0u8; 512];
        let mut log = [0u8; 256];
        let mut x: u16 = 1;
        for i in 0..255 {
            exp[i] = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & 0x100 != 0 {
                x ^= PRIMITIVE_POLY;
            }
        }
        for i in 255..512 {
            exp[i] = exp[i - 255];
        }
        Tables { exp, log }
    })
}

/// `alpha^power` for any non-negative power.
#[inline]
pub fn exp(power: usize) -> u8 {
    tables().exp[power % 255]
}

/// Discrete logarithm base alpha. `x` must be non-zero.
#[inline]
pub fn log(x: u8) -> usize {
    debug_assert!(x != 0, "log of zero");
    tables().log[x as usize] as usize
}

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    let t = tables();
    t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
}

#[inline]
pub fn inv(a: u8) -> u8 {
    assert!(a != 0, "inverse of zero in GF(256)");
    let t = tables();
    t.exp[255 - t.log[a as usize] as usize]
}

#[inline]
pub fn div(a: u8, b: u8) -> u8 {
    mul(a, inv(b))
}

/// Evaluate a polynomial stored lowest-degree first.
pub fn poly_eval(poly: &[u8], x: u8) -> u8 {
    poly.iter().rev().fold(0u8, |acc, &c| mul(acc, x) ^ c)
}

/// Product of two polynomials stored lowest-degree first.
pub fn poly_mul(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= mul(x, y);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // Carry-less multiply then reduce; independent of the log tables.
    fn slow_mul(a: u8, b: u8) -> u8 {
        let mut acc: u16 = 0;
        for i in 0..8 {
            if b >> i & 1 == 1 {
                acc ^= (a as u16) << i;
            }
        }
        for bit in (8..16).rev() {
            if acc >> bit & 1 == 1 {
                acc ^= PRIMITIVE_POLY << (bit - 8);
            }
        }
        acc as u8
    }

    #[test]
    fn table_multiply_matches_shift_and_add() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(mul(a, b), slow_mul(a, b));
            }
        }
    }

    #[test]
    fn inverses() {
        for a in 1..=255u8 {
            assert_eq!(mul(a, inv(a)), 1);
            assert_eq!(div(a, a), 1);
        }
    }

    #[test]
    fn generator_has_full_order() {
        let mut seen = [false; 256];
        for p in 0..255 {
            let v = exp(p);
            assert!(!seen[v as usize]);
            seen[v as usize] = true;
            assert_eq!(log(v), p);
        }
        assert_eq!(exp(8), 0x1D);
    }

    #[test]
    fn polynomial_evaluation() {
        // (x + 2)(x + 3) = x^2 + x + 6 over GF(2^8).
        let p = poly_mul(&[2, 1], &[3, 1]);
        assert_eq!(p, vec![6, 1, 1]);
        assert_eq!(poly_eval(&p, 2), 0);
        assert_eq!(poly_eval(&p, 3), 0);
        assert_ne!(poly_eval(&p, 4), 0);
    }
}
