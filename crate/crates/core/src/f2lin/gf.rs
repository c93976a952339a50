use serde::{Deserialize, Serialize};

use super::Word;
use crate::error::{Error, Result};

/// Arithmetic in `GF(2^m) = F₂[x]/(poly)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfContext {
    m: usize,
    poly: Word,
}

fn degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, b: u64) -> u64 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

impl GfContext {
    /// `poly` includes the leading term, e.g. `0x13` for `x⁴+x+1`.
    pub fn new(m: usize, poly: Word) -> Result<Self> {
        if !(1..=16).contains(&m) || degree(poly as u64) != m as i32 {
            return Err(Error::NotIrreducible { m, poly });
        }
        let p = poly as u64;
        for d in 1..=m / 2 {
            for q in (1u64 << d)..(1u64 << (d + 1)) {
                if poly_mod(p, q) == 0 {
                    return Err(Error::NotIrreducible { m, poly });
                }
            }
        }
        Ok(GfContext { m, poly })
    }

    /// Default polynomial for `m ∈ 3..=8`.
    pub fn default_for(m: usize) -> Result<Self> {
        let poly = match m {
            3 => 0b1011,
            4 => 0b1_0011,
            5 => 0b10_0101,
            6 => 0b100_0011,
            7 => 0b1000_0011,
            8 => 0b1_0001_1011,
            _ => {
                return Err(Error::out_of_range(format!(
                    "no default polynomial for m = {m}"
                )))
            }
        };
        GfContext::new(m, poly)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn poly(&self) -> Word {
        self.poly
    }

    pub fn mul(&self, a: Word, b: Word) -> Word {
        let mut acc: Word = 0;
        let mut a = a;
        let mut b = b;
        let top = 1 << self.m;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.poly;
            }
        }
        acc
    }

    pub fn pow(&self, a: Word, mut e: u64) -> Word {
        let mut base = a;
        let mut acc = 1;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^{2^m − 2}`; maps 0 to 0.
    pub fn inv(&self, a: Word) -> Word {
        self.pow(a, (1u64 << self.m) - 2)
    }

    /// Lookup table of the inversion map.
    pub fn inverse_table(&self) -> Vec<Word> {
        (0..1 << self.m).map(|x| self.inv(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_irreducible() {
        for m in 3..=8 {
            assert!(GfContext::default_for(m).is_ok(), "m={m}");
        }
        // x⁴+x²+1 = (x²+x+1)²
        assert!(GfContext::new(4, 0b10101).is_err());
        assert!(GfContext::new(4, 0b1011).is_err());
    }

    #[test]
    fn inversion_values() {
        let gf = GfContext::default_for(3).unwrap();
        let t = gf.inverse_table();
        assert_eq!(t[0], 0);
        assert_eq!(t[1], 1);
        assert_eq!(t[2], 5);
        for m in 3..=8 {
            let gf = GfContext::default_for(m).unwrap();
            let t = gf.inverse_table();
            for x in 1..1 << m {
                assert_eq!(gf.mul(x, t[x as usize]), 1);
                assert_eq!(t[t[x as usize] as usize], x);
            }
        }
    }
}
