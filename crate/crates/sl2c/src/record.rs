//! JSON records of collisions and identity preimages.

use serde::{Deserialize, Serialize};
use sl2c_core::attacks::Collision;
use sl2c_core::engine::verify_collision;
use sl2c_core::words::hash;
use sl2c_core::{Field, GeneratorPair, Group, Word};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionRecord {
    pub method: String,
    pub p: u64,
    pub n: u32,
    /// Modulus polynomial, e.g. "x^4+x+1".
    pub modulus: String,
    pub generators: [String; 2],
    pub w1: String,
    pub w2: String,
    pub hash: String,
    pub work_mults: u64,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub word: String,
    pub length: usize,
    pub verified: bool,
}

impl CollisionRecord {
    pub fn new(f: &Field, gens: &GeneratorPair, c: &Collision) -> CollisionRecord {
        let g = Group::new(f.clone());
        CollisionRecord {
            method: c.method.as_str().into(),
            p: f.p(),
            n: f.n(),
            modulus: f.modulus_string(),
            generators: [g.fmt_matrix(&gens.a0), g.fmt_matrix(&gens.a1)],
            w1: c.w1.to_string(),
            w2: c.w2.to_string(),
            hash: g.fmt_matrix(&c.hash),
            work_mults: c.work,
            length: c.length,
        }
    }

    pub fn field(&self) -> Result<Field> {
        let coeffs = parse_modulus(&self.modulus, self.n)?;
        Ok(Field::with_modulus(self.p, self.n, &coeffs)?)
    }

    /// Recomputes both hashes from scratch: true iff the words differ, hash
    /// equally, match the recorded hash and the recorded length.
    pub fn verify(&self) -> Result<bool> {
        let f = self.field()?;
        let g = Group::new(f.clone());
        let gens = GeneratorPair::new(&g, g.parse_matrix(&self.generators[0])?, g.parse_matrix(&self.generators[1])?)?;
        let w1: Word = self.w1.parse()?;
        let w2: Word = self.w2.parse()?;
        if w1.alphabet() > 2 || w2.alphabet() > 2 {
            return Ok(false);
        }
        let recorded = g.parse_matrix(&self.hash)?;
        Ok(verify_collision(&f, &gens, &w1, &w2) && hash(&g, &gens, &w1) == recorded && self.length == w1.len().max(w2.len()))
    }
}

/// Coefficients c0..cn of a polynomial written like "x^4+2x^2+x+1".
pub fn parse_modulus(s: &str, n: u32) -> Result<Vec<u64>> {
    let bad = || Error::Parse(format!("modulus {s:?}"));
    let mut c = vec![0u64; n as usize + 1];
    for term in s.split('+').map(str::trim) {
        let (coef, exp) = match term.split_once('x') {
            None => (term, 0usize),
            Some((k, rest)) => {
                let e = match rest.strip_prefix('^') {
                    Some(e) => e.parse().map_err(|_| bad())?,
                    None if rest.is_empty() => 1,
                    None => return Err(bad()),
                };
                (if k.is_empty() { "1" } else { k }, e)
            }
        };
        let k: u64 = coef.parse().map_err(|_| bad())?;
        *c.get_mut(exp).ok_or_else(bad)? += k;
    }
    Ok(c)
}
