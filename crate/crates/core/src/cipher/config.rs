//! JSON cipher descriptions.
//!
//! ```json
//! { "n": 8, "b": 2, "m": 4, "l": 5, "whitening": false,
//!   "rounds": [ { "sbox": "builtin:inv4", "matrix": "lambda1.mat" }, … ],
//!   "key_schedule": { "variant": "almost_independent", "i": 3,
//!                     "u": [ {"kernel": "0x01"}, {"kernel": "0x10"}, {"kernel": "0x11"} ],
//!                     "fixed_keys": ["0x00", …] } }
//! ```
//!
//! `l` counts every round key, including the whitening key when
//! `whitening` is set. File paths are relative to the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{KeySchedule, PhiPrime, Round, ScheduleVariant, TbCipher};
use crate::error::{Error, Result};
use crate::f2lin::{BlockLayout, LinearMap, Subspace, Word};
use crate::io;
use crate::sbox::{ParallelMap, SBox};

/// A word written as a JSON number or as a hex string.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum HexWord {
    Num(Word),
    Str(String),
}

impl HexWord {
    pub fn value(&self) -> Result<Word> {
        match self {
            HexWord::Num(w) => Ok(*w),
            HexWord::Str(s) => io::parse_hex(s).ok_or_else(|| Error::Config(format!("bad hex word {s:?}"))),
        }
    }
}

impl From<Word> for HexWord {
    fn from(w: Word) -> Self {
        HexWord::Str(format!("{w:#x}"))
    }
}

impl Serialize for HexWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HexWord::Num(w) => s.serialize_str(&format!("{w:#x}")),
            HexWord::Str(v) => s.serialize_str(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxSpec {
    /// `builtin:inv<m>`, `builtin:id<m>` or a table file.
    Name(String),
    Table { table: Vec<HexWord> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SboxSpec {
    Uniform(BoxSpec),
    PerBlock(Vec<BoxSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    /// `identity` or a matrix file.
    Name(String),
    Rows(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundConfig {
    pub sbox: SboxSpec,
    pub matrix: MatrixSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubspaceSpec {
    Kernel { kernel: HexWord },
    Basis { basis: Vec<HexWord> },
    /// `full` or `zero`.
    Named(String),
}

impl SubspaceSpec {
    pub fn build(&self, n: usize) -> Result<Subspace> {
        match self {
            SubspaceSpec::Kernel { kernel } => Subspace::kernel_of(kernel.value()?, n),
            SubspaceSpec::Basis { basis } => {
                Subspace::span(basis.iter().map(HexWord::value).collect::<Result<Vec<_>>>()?, n)
            }
            SubspaceSpec::Named(s) if s == "full" => Ok(Subspace::full(n)),
            SubspaceSpec::Named(s) if s == "zero" => Ok(Subspace::zero(n)),
            SubspaceSpec::Named(s) => Err(Error::Config(format!("unknown subspace {s:?}"))),
        }
    }

    pub fn of(u: &Subspace) -> SubspaceSpec {
        if u.is_full() {
            SubspaceSpec::Named("full".into())
        } else if u.is_zero() {
            SubspaceSpec::Named("zero".into())
        } else {
            SubspaceSpec::Basis {
                basis: u.basis().iter().map(|&w| w.into()).collect(),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductPosition {
    #[serde(default = "zero_word")]
    pub offset: HexWord,
    pub space: SubspaceSpec,
}

fn zero_word() -> HexWord {
    HexWord::Num(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tuples: Option<Vec<Vec<HexWord>>>,
        /// One tuple per line, hex words separated by spaces.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
    },
    Independent,
    ThreeIndependent {
        i: usize,
        fixed_keys: Vec<HexWord>,
    },
    AlmostIndependent {
        i: usize,
        u: Vec<SubspaceSpec>,
        fixed_keys: Vec<HexWord>,
    },
    ExampleLinear {
        f: Vec<HexWord>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi_prime_seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi_prime: Option<Vec<HexWord>>,
    },
    Product {
        positions: Vec<ProductPosition>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CipherConfig {
    pub n: usize,
    pub b: usize,
    pub m: usize,
    pub l: usize,
    #[serde(default)]
    pub whitening: bool,
    pub rounds: Vec<RoundConfig>,
    pub key_schedule: ScheduleConfig,
}

fn words(v: &[HexWord]) -> Result<Vec<Word>> {
    v.iter().map(HexWord::value).collect()
}

impl CipherConfig {
    pub fn parse(text: &str, origin: &str) -> Result<CipherConfig> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<(CipherConfig, PathBuf)> {
        let text = io::read_text(path)?;
        let cfg = CipherConfig::parse(&text, &path.display().to_string())?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn build(&self, base: &Path) -> Result<TbCipher> {
        let layout = BlockLayout::new(self.b, self.m)?;
        if layout.n() != self.n {
            return Err(Error::Config(format!("n = {} but b·m = {}", self.n, layout.n())));
        }
        let total = self.rounds.len() + self.whitening as usize;
        if total != self.l {
            return Err(Error::Config(format!(
                "l = {} but the config describes {total} round keys",
                self.l
            )));
        }
        let mut rounds = Vec::with_capacity(total);
        if self.whitening {
            rounds.push(Round::identity(layout));
        }
        for (h, r) in self.rounds.iter().enumerate() {
            let ctx = |e: Error| Error::Config(format!("round {}: {e}", h + 1 + self.whitening as usize));
            let gamma = self.build_gamma(&r.sbox, base).map_err(ctx)?;
            let lambda = self.build_matrix(&r.matrix, base).map_err(ctx)?;
            rounds.push(Round { gamma, lambda });
        }
        let schedule = self.build_schedule(base)?;
        TbCipher::new(layout, rounds, schedule)
    }

    fn build_box(&self, spec: &BoxSpec, base: &Path) -> Result<SBox> {
        let s = match spec {
            BoxSpec::Name(name) if name.starts_with("builtin:") => SBox::builtin(name)?,
            BoxSpec::Name(file) => io::load_sbox(&base.join(file))?,
            BoxSpec::Table { table } => SBox::permutation(words(table)?)?,
        };
        if s.m() != self.m {
            return Err(Error::Config(format!("S-box width {} but m = {}", s.m(), self.m)));
        }
        Ok(s)
    }

    fn build_gamma(&self, spec: &SboxSpec, base: &Path) -> Result<ParallelMap> {
        match spec {
            SboxSpec::Uniform(s) => ParallelMap::uniform(&self.build_box(s, base)?, self.b),
            SboxSpec::PerBlock(v) => {
                if v.len() != self.b {
                    return Err(Error::Config(format!("{} S-boxes for b = {}", v.len(), self.b)));
                }
                ParallelMap::new(v.iter().map(|s| self.build_box(s, base)).collect::<Result<_>>()?)
            }
        }
    }

    fn build_matrix(&self, spec: &MatrixSpec, base: &Path) -> Result<LinearMap> {
        let lambda = match spec {
            MatrixSpec::Name(s) if s == "identity" => LinearMap::identity(self.n),
            MatrixSpec::Name(file) => io::load_matrix(&base.join(file))?,
            MatrixSpec::Rows(rows) => io::parse_matrix(&rows.join("\n"), "inline matrix")?,
        };
        if lambda.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: lambda.dim(),
            });
        }
        Ok(lambda)
    }

    fn build_schedule(&self, base: &Path) -> Result<KeySchedule> {
        let n = self.n;
        let variant = match &self.key_schedule {
            ScheduleConfig::Explicit { tuples, file } => {
                let mut all = Vec::new();
                if let Some(t) = tuples {
                    for k in t {
                        all.push(words(k)?);
                    }
                }
                if let Some(f) = file {
                    let path = base.join(f);
                    let text = io::read_text(&path)?;
                    for (ln, line) in text.lines().enumerate() {
                        let body = line.split('#').next().unwrap_or("").trim();
                        if body.is_empty() {
                            continue;
                        }
                        let k = body
                            .split(|c: char| c.is_whitespace() || c == ',')
                            .filter(|t| !t.is_empty())
                            .map(|t| {
                                io::parse_hex(t).ok_or_else(|| Error::Parse {
                                    path: path.display().to_string(),
                                    line: ln + 1,
                                    column: 1,
                                    message: format!("bad hex word {t:?}"),
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        all.push(k);
                    }
                }
                ScheduleVariant::Explicit(all)
            }
            ScheduleConfig::Independent => ScheduleVariant::Independent,
            ScheduleConfig::ThreeIndependent { i, fixed_keys } => ScheduleVariant::ThreeIndependent {
                i: *i,
                fixed_keys: words(fixed_keys)?,
            },
            ScheduleConfig::AlmostIndependent { i, u, fixed_keys } => {
                if u.len() != 3 {
                    return Err(Error::Config("almost_independent needs three subspaces".into()));
                }
                let u: Vec<Subspace> = u.iter().map(|s| s.build(n)).collect::<Result<_>>()?;
                ScheduleVariant::AlmostIndependent {
                    i: *i,
                    u: [u[0].clone(), u[1].clone(), u[2].clone()],
                    fixed_keys: words(fixed_keys)?,
                }
            }
            ScheduleConfig::ExampleLinear {
                f,
                phi_prime_seed,
                phi_prime,
            } => {
                let f = words(f)?;
                if f.len() != 3 {
                    return Err(Error::Config("example_linear needs three functionals".into()));
                }
                let width = self.l.checked_sub(3).ok_or_else(|| Error::Config("example_linear needs l ≥ 3".into()))?;
                let phi = match (phi_prime, phi_prime_seed) {
                    (Some(t), None) => PhiPrime::new(n, width, words(t)?)?,
                    (None, Some(seed)) => PhiPrime::seeded(n, width, *seed),
                    _ => {
                        return Err(Error::Config(
                            "example_linear needs exactly one of phi_prime and phi_prime_seed".into(),
                        ))
                    }
                };
                ScheduleVariant::ExampleLinear {
                    f: [f[0], f[1], f[2]],
                    phi_prime: phi,
                }
            }
            ScheduleConfig::Product { positions } => ScheduleVariant::Product(
                positions
                    .iter()
                    .map(|p| Ok((p.offset.value()?, p.space.build(n)?)))
                    .collect::<Result<_>>()?,
            ),
        };
        KeySchedule::new(n, self.l, variant)
    }

    /// Self-contained description of `c` (inline tables and rows).
    ///
    /// Only schedules without explicit lists or `Φ′` tables are written.
    pub fn describe(c: &TbCipher) -> Result<CipherConfig> {
        let layout = c.layout();
        if c.offsets().iter().any(|&o| o != 0) {
            return Err(Error::Config("cannot describe a cipher whose S-boxes move 0".into()));
        }
        let whitening = c.has_whitening();
        let rounds = c
            .rounds()
            .iter()
            .skip(whitening as usize)
            .map(|r| RoundConfig {
                sbox: SboxSpec::PerBlock(
                    r.gamma
                        .boxes()
                        .iter()
                        .map(|s| BoxSpec::Table {
                            table: s.table().iter().map(|&w| w.into()).collect(),
                        })
                        .collect(),
                ),
                matrix: MatrixSpec::Rows(io::format_matrix(&r.lambda)),
            })
            .collect();
        let hex = |v: &[Word]| v.iter().map(|&w| w.into()).collect();
        let key_schedule = match c.schedule().variant() {
            ScheduleVariant::Independent => ScheduleConfig::Independent,
            ScheduleVariant::ThreeIndependent { i, fixed_keys } => ScheduleConfig::ThreeIndependent {
                i: *i,
                fixed_keys: hex(fixed_keys),
            },
            ScheduleVariant::AlmostIndependent { i, u, fixed_keys } => ScheduleConfig::AlmostIndependent {
                i: *i,
                u: u.iter().map(SubspaceSpec::of).collect(),
                fixed_keys: hex(fixed_keys),
            },
            ScheduleVariant::Product(pos) => ScheduleConfig::Product {
                positions: pos
                    .iter()
                    .map(|(o, d)| ProductPosition {
                        offset: (*o).into(),
                        space: SubspaceSpec::of(d),
                    })
                    .collect(),
            },
            ScheduleVariant::Explicit(t) => ScheduleConfig::Explicit {
                tuples: Some(t.iter().map(|k| hex(k)).collect()),
                file: None,
            },
            ScheduleVariant::ExampleLinear { .. } => {
                return Err(Error::Config("example_linear schedules are not written back".into()))
            }
        };
        Ok(CipherConfig {
            n: layout.n(),
            b: layout.b(),
            m: layout.m(),
            l: c.round_count(),
            whitening,
            rounds,
            key_schedule,
        })
    }
}

/// Reads and builds a cipher from a config file.
pub fn load_cipher(path: &Path) -> Result<TbCipher> {
    let (cfg, base) = CipherConfig::load(path)?;
    cfg.build(&base)
}
