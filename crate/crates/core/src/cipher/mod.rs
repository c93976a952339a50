//! Translation-based ciphers: rounds `γ_h λ_h σ_{k_h}` and key schedules.

pub mod config;
mod hypotheses;
mod mixing;
mod schedule;

pub use hypotheses::{
    theorem_hypotheses_report, HypothesesReport, RoundReport, SboxConditions, TheoremCheck,
    TheoremId,
};
pub use mixing::{is_proper, is_strongly_proper, WallCheck, WallWitness};
pub use schedule::{
    IndependenceWitness, KeyBox, KeySchedule, PhiPrime, ScheduleVariant, MAX_IMAGE,
};

use crate::error::{Error, Result};
use crate::f2lin::{BlockLayout, LinearMap, Word};
use crate::perm::Permutation;
use crate::sbox::ParallelMap;

/// One round `x ↦ (xγ)λ`; the key addition is applied by the cipher.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub gamma: ParallelMap,
    pub lambda: LinearMap,
}

impl Round {
    pub fn identity(layout: BlockLayout) -> Self {
        Round {
            gamma: ParallelMap::identity(layout),
            lambda: LinearMap::identity(layout.n()),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.gamma.boxes().iter().all(|s| s.table().iter().enumerate().all(|(x, &y)| x as Word == y))
            && self.lambda == LinearMap::identity(self.lambda.dim())
    }

    #[inline]
    pub fn apply(&self, x: Word) -> Word {
        self.lambda.apply(self.gamma.apply(x))
    }
}

/// `τ_k = ∏_h γ_h λ_h σ_{k_h}` with `Φ` given by a [`KeySchedule`].
///
/// S-boxes are stored normalised to `0γ = 0`; the dropped constant `0γ_h`
/// becomes `(0γ_h)λ_h`, added to round key `h` on encryption.
#[derive(Clone, Debug)]
pub struct TbCipher {
    layout: BlockLayout,
    rounds: Vec<Round>,
    offsets: Vec<Word>,
    schedule: KeySchedule,
}

impl TbCipher {
    pub fn new(layout: BlockLayout, rounds: Vec<Round>, schedule: KeySchedule) -> Result<Self> {
        let n = layout.n();
        if rounds.len() != schedule.rounds() {
            return Err(Error::Config(format!(
                "{} rounds but the key schedule produces {} round keys",
                rounds.len(),
                schedule.rounds()
            )));
        }
        if schedule.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: schedule.n(),
            });
        }
        let mut normalised = Vec::with_capacity(rounds.len());
        let mut offsets = Vec::with_capacity(rounds.len());
        for (h, r) in rounds.into_iter().enumerate() {
            if r.gamma.layout() != layout {
                return Err(Error::Config(format!("round {}: S-box layer has the wrong layout", h + 1)));
            }
            if !r.gamma.is_bijective() {
                return Err(Error::InvalidSbox(format!("round {}: S-box layer is not bijective", h + 1)));
            }
            if r.lambda.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.lambda.dim(),
                });
            }
            if !r.lambda.is_invertible() {
                return Err(Error::NotInvertible {
                    rank: r.lambda.rank(),
                    n,
                });
            }
            let (gamma, c) = r.gamma.normalize_zero();
            offsets.push(r.lambda.apply(c));
            normalised.push(Round {
                gamma,
                lambda: r.lambda,
            });
        }
        Ok(TbCipher {
            layout,
            rounds: normalised,
            offsets,
            schedule,
        })
    }

    pub fn layout(&self) -> BlockLayout {
        self.layout
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    /// `ℓ`.
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    /// Rounds with 0-fixing S-boxes.
    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    /// Round `h` (1-based).
    pub fn round(&self, h: usize) -> &Round {
        &self.rounds[h - 1]
    }

    /// Constants `(0γ_h)λ_h` folded into the round keys.
    pub fn offsets(&self) -> &[Word] {
        &self.offsets
    }

    pub fn schedule(&self) -> &KeySchedule {
        &self.schedule
    }

    /// Whether round 1 is the identity, i.e. round key 1 is a whitening key.
    pub fn has_whitening(&self) -> bool {
        self.rounds[0].is_identity() && self.offsets[0] == 0
    }

    /// The key box of the schedule, shifted by the folded constants.
    pub fn effective_box(&self) -> KeyBox {
        let mut bx = self.schedule.key_box();
        for (c, d) in bx.offsets.iter_mut().zip(&self.offsets) {
            *c ^= d;
        }
        bx
    }

    fn check_keys(&self, keys: &[Word]) -> Result<()> {
        if keys.len() != self.rounds.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rounds.len(),
                got: keys.len(),
            });
        }
        if keys.iter().any(|&k| k > crate::f2lin::mask(self.n())) {
            return Err(Error::out_of_range("round key outside V"));
        }
        Ok(())
    }

    pub fn encrypt(&self, keys: &[Word], x: Word) -> Result<Word> {
        self.check_keys(keys)?;
        if x > crate::f2lin::mask(self.n()) {
            return Err(Error::out_of_range("plaintext outside V"));
        }
        Ok(self.encrypt_unchecked(keys, x))
    }

    #[inline]
    fn encrypt_unchecked(&self, keys: &[Word], x: Word) -> Word {
        self.rounds
            .iter()
            .zip(keys.iter().zip(&self.offsets))
            .fold(x, |y, (r, (k, c))| r.apply(y) ^ k ^ c)
    }

    /// The table of `τ_k`.
    pub fn materialize(&self, keys: &[Word]) -> Result<Permutation> {
        self.check_keys(keys)?;
        let n = self.n();
        // round functions first, then compose tables
        let mut table: Vec<Word> = (0..1 << n as Word).collect();
        for ((r, k), c) in self.rounds.iter().zip(keys).zip(&self.offsets) {
            let rt = self.round_table(r);
            for y in table.iter_mut() {
                *y = rt[*y as usize] ^ k ^ c;
            }
        }
        Permutation::from_table(table)
    }

    fn round_table(&self, r: &Round) -> Vec<Word> {
        (0..1 << self.n() as Word).map(|x| r.apply(x)).collect()
    }

    /// `ρ_h = γ_h λ_h` (normalised S-boxes), 1-based.
    pub fn round_permutation(&self, h: usize) -> Permutation {
        Permutation::from_table_unchecked(self.round_table(&self.rounds[h - 1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2lin::GfContext;
    use crate::sbox::SBox;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy(seed: u64, sbox: SBox, l: usize) -> (TbCipher, Vec<(Vec<SBox>, LinearMap)>) {
        let layout = BlockLayout::new(2, sbox.m()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut raw = Vec::new();
        let mut rounds = Vec::new();
        for _ in 0..l {
            let lam = LinearMap::random_invertible(layout.n(), &mut rng);
            let boxes = vec![sbox.clone(), SBox::random_permutation(sbox.m(), &mut rng)];
            raw.push((boxes.clone(), lam.clone()));
            rounds.push(Round {
                gamma: ParallelMap::new(boxes).unwrap(),
                lambda: lam,
            });
        }
        let ks = KeySchedule::new(layout.n(), l, ScheduleVariant::Independent).unwrap();
        (TbCipher::new(layout, rounds, ks).unwrap(), raw)
    }

    // straight-line evaluation on bit vectors, independent of the word helpers
    fn reference(raw: &[(Vec<SBox>, LinearMap)], m: usize, keys: &[Word], x: Word) -> Word {
        let n = 2 * m;
        let mut bits: Vec<u8> = (0..n).map(|k| ((x >> k) & 1) as u8).collect();
        for ((boxes, lam), k) in raw.iter().zip(keys) {
            let mut after = vec![0u8; n];
            for (j, s) in boxes.iter().enumerate() {
                let mut v = 0;
                for t in 0..m {
                    v |= (bits[j * m + t] as Word) << t;
                }
                let y = s.table()[v as usize];
                for t in 0..m {
                    after[j * m + t] = ((y >> t) & 1) as u8;
                }
            }
            let mut mixed = vec![0u8; n];
            for (row, &bit) in after.iter().enumerate() {
                if bit == 1 {
                    for (col, slot) in mixed.iter_mut().enumerate() {
                        *slot ^= ((lam.rows()[row] >> col) & 1) as u8;
                    }
                }
            }
            for (t, slot) in mixed.iter_mut().enumerate() {
                *slot ^= ((k >> t) & 1) as u8;
            }
            bits = mixed;
        }
        bits.iter().enumerate().map(|(t, &b)| (b as Word) << t).sum()
    }

    #[test]
    fn identity_cipher() {
        let layout = BlockLayout::new(2, 3).unwrap();
        let ks = KeySchedule::new(6, 2, ScheduleVariant::Independent).unwrap();
        let c = TbCipher::new(layout, vec![Round::identity(layout); 2], ks.clone()).unwrap();
        assert!(c.materialize(&[0, 0]).unwrap().is_identity());
        assert_eq!(c.materialize(&[5, 0]).unwrap(), Permutation::translation(5, 6));
        assert!(c.has_whitening());
        assert!(c.encrypt(&[0], 1).is_err());
        assert!(TbCipher::new(layout, vec![Round::identity(layout)], ks).is_err());
    }

    #[test]
    fn matches_straight_line_oracle() {
        let inv4 = SBox::inversion(&GfContext::default_for(4).unwrap());
        let (c, raw) = toy(9, inv4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fixed = [0x3c, 0x81, 0x5a];
        let table = c.materialize(&fixed).unwrap();
        for x in 0..256 {
            assert_eq!(table.apply(x), reference(&raw, 4, &fixed, x));
        }
        for _ in 0..10_000 {
            let keys: Vec<Word> = (0..3).map(|_| rng.gen::<Word>() & 0xff).collect();
            let x = rng.gen::<Word>() & 0xff;
            assert_eq!(c.encrypt(&keys, x).unwrap(), reference(&raw, 4, &keys, x));
        }
    }

    #[test]
    fn offsets_are_folded() {
        let shifted = SBox::permutation((0..8).map(|x| x ^ 5).collect()).unwrap();
        let (c, raw) = toy(3, shifted, 2);
        assert!(c.rounds().iter().all(|r| r.gamma.fixes_zero()));
        assert!(c.offsets().iter().any(|&o| o != 0));
        for x in 0..64 {
            assert_eq!(c.encrypt(&[7, 9], x).unwrap(), reference(&raw, 3, &[7, 9], x));
        }
    }
}
