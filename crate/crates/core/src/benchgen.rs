//! Deterministic circuit families: Bernstein–Vazirani, GHZ/cat chains,
//! fully entangled blocks, seeded random circuits and the large scaling
//! instance.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("secret string must be non-empty and contain only '0' and '1', got {0:?}")]
    BadSecret(String),
    #[error("{family} needs at least {min} qubits, got {got}")]
    TooSmall {
        family: &'static str,
        min: usize,
        got: usize,
    },
    #[error("two-qubit fraction must lie in [0, 1], got {0}")]
    BadFraction(f64),
}

/// Hidden string of a Bernstein–Vazirani instance.
///
/// `bits[i]` belongs to data qubit `i`. The text form writes bit 0 as the
/// rightmost character, matching outcome keys, so an exact run of
/// [`gen_bv`] yields the secret's text as its only outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SecretString {
    bits: Vec<bool>,
}

impl SecretString {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self, GenError> {
        if bits.is_empty() {
            return Err(GenError::BadSecret(String::new()));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl FromStr for SecretString {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .rev()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(GenError::BadSecret(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if bits.is_empty() {
            return Err(GenError::BadSecret(s.to_string()));
        }
        Ok(Self { bits })
    }
}

impl TryFrom<String> for SecretString {
    type Error = GenError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SecretString> for String {
    fn from(s: SecretString) -> Self {
        s.to_string()
    }
}

impl fmt::Display for SecretString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bits.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Bernstein–Vazirani: data qubits `0..len`, ancilla last and unmeasured.
pub fn gen_bv(secret: &SecretString) -> Circuit {
    let data = secret.len();
    let anc = data;
    let mut c = Circuit::new(data + 1, data);
    c.gate("x", &[], &[anc]).gate("h", &[], &[anc]);
    for q in 0..data {
        c.gate("h", &[], &[q]);
    }
    for (q, _) in secret.bits().iter().enumerate().filter(|(_, &b)| b) {
        c.gate("cx", &[], &[q, anc]);
    }
    for q in 0..data {
        c.gate("h", &[], &[q]);
    }
    for q in 0..data {
        c.measure(q, q);
    }
    c
}

fn chain(n: usize, family: &'static str) -> Result<Circuit, GenError> {
    if n == 0 {
        return Err(GenError::TooSmall { family, min: 1, got: 0 });
    }
    let mut c = Circuit::new(n, n);
    c.gate("h", &[], &[0]);
    for i in 1..n {
        c.gate("cx", &[], &[i - 1, i]);
    }
    for q in 0..n {
        c.measure(q, q);
    }
    Ok(c)
}

pub fn gen_ghz(n: usize) -> Result<Circuit, GenError> {
    chain(n, "ghz")
}

/// Cat-state preparation; structurally the same chain as [`gen_ghz`].
pub fn gen_cat(n: usize) -> Result<Circuit, GenError> {
    chain(n, "cat")
}

/// A single opaque gate `ent{k}` on all `k` qubits, then measurements.
pub fn gen_entangled_block(k: usize) -> Result<Circuit, GenError> {
    if k < 2 {
        return Err(GenError::TooSmall {
            family: "entangled block",
            min: 2,
            got: k,
        });
    }
    let name = format!("ent{k}");
    let qubits: Vec<usize> = (0..k).collect();
    let mut c = Circuit::new(k, k);
    c.opaque(&name, 0, k).gate(&name, &[], &qubits);
    for q in 0..k {
        c.measure(q, q);
    }
    Ok(c)
}

/// `m` seeded random gates followed by a measurement of every qubit.
pub fn gen_random(n: usize, m: usize, seed: u64, two_qubit_fraction: f64) -> Result<Circuit, GenError> {
    if n == 0 {
        return Err(GenError::TooSmall {
            family: "random",
            min: 1,
            got: 0,
        });
    }
    if !(0.0..=1.0).contains(&two_qubit_fraction) {
        return Err(GenError::BadFraction(two_qubit_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n, n);
    for _ in 0..m {
        if n >= 2 && rng.gen_bool(two_qubit_fraction) {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            c.gate("cx", &[], &[a, b]);
        } else {
            let q = rng.gen_range(0..n);
            match rng.gen_range(0..3) {
                0 => c.gate("h", &[], &[q]),
                1 => c.gate("x", &[], &[q]),
                _ => c.gate("rz", &[rng.gen_range(0.0..TAU)], &[q]),
            };
        }
    }
    for q in 0..n {
        c.measure(q, q);
    }
    Ok(c)
}

/// Bernstein–Vazirani with every bit set over `n - 1` data qubits, each
/// data qubit's operations emitted as one contiguous block and padded
/// with single-qubit gates until the total is about `m`.
pub fn gen_scaling(n: usize, m: usize) -> Result<Circuit, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall {
            family: "scaling",
            min: 2,
            got: n,
        });
    }
    let data = n - 1;
    let anc = data;
    let base = 2 + 4 * data;
    let padding = m.saturating_sub(base);
    let mut c = Circuit::new(n, data);
    c.instructions.reserve(base + padding);
    c.gate("x", &[], &[anc]).gate("h", &[], &[anc]);
    for q in 0..data {
        let pad = padding / data + usize::from(q < padding % data);
        c.gate("h", &[], &[q]);
        for i in 0..pad {
            c.gate(if i % 2 == 0 { "x" } else { "z" }, &[], &[q]);
        }
        c.gate("cx", &[], &[q, anc]).gate("h", &[], &[q]).measure(q, q);
    }
    Ok(c)
}
