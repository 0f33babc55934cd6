//! Named generator pairs.

use rand::{Rng, RngCore};
use sl2c_core::{Elem, Field, GeneratorPair, Group, Matrix};

use crate::config::GenMode;
use crate::{Error, Result};

/// ([[ξ0, −1], [1, 0]], [[ξ1, −1], [1, 0]]).
pub fn xi_pair(f: &Field, xi0: Elem, xi1: Elem) -> GeneratorPair {
    let m1 = f.neg(Elem::ONE);
    GeneratorPair { a0: Matrix::new(xi0, m1, Elem::ONE, Elem::ZERO), a1: Matrix::new(xi1, m1, Elem::ONE, Elem::ZERO) }
}

/// The pair on the smallest primitive element α: ξ0 = α, ξ1 = α + 1.
pub fn appendix_b(f: &Field) -> GeneratorPair {
    let alpha = f.primitive_element();
    xi_pair(f, alpha, f.add(alpha, Elem::ONE))
}

pub fn xi_random<R: RngCore + ?Sized>(f: &Field, rng: &mut R) -> GeneratorPair {
    let xi0 = f.sample(rng);
    let xi1 = f.sample(rng);
    xi_pair(f, xi0, xi1)
}

/// Two uniform elements of SL2, redrawn until they do not commute.
pub fn random_pair<R: RngCore + ?Sized>(g: &Group, rng: &mut R) -> GeneratorPair {
    loop {
        let a0 = g.random_sl2(rng);
        let a1 = g.random_sl2(rng);
        if !g.commutes(&a0, &a1) {
            return GeneratorPair { a0, a1 };
        }
    }
}

/// `appendixB`, `xi_random` or `random`.
pub fn preset<R: RngCore + ?Sized>(g: &Group, name: &str, rng: &mut R) -> Result<GeneratorPair> {
    match name {
        "appendixB" => Ok(appendix_b(g.field())),
        "xi_random" => Ok(xi_random(g.field(), rng)),
        "random" => Ok(random_pair(g, rng)),
        _ => Err(Error::Config(format!("unknown preset {name:?}"))),
    }
}

/// Generators for one trial.
pub fn generators<R: RngCore + ?Sized>(
    g: &Group,
    mode: GenMode,
    xi: Option<&[String; 2]>,
    matrices: Option<&[String; 2]>,
    rng: &mut R,
) -> Result<GeneratorPair> {
    let f = g.field();
    match mode {
        GenMode::Random => Ok(random_pair(g, rng)),
        GenMode::XiRandom => Ok(xi_random(f, rng)),
        GenMode::AppendixB => Ok(appendix_b(f)),
        GenMode::XiExplicit => {
            let xi = xi.ok_or_else(|| Error::Config("xi_explicit needs xi".into()))?;
            Ok(xi_pair(f, f.parse_elem(&xi[0])?, f.parse_elem(&xi[1])?))
        }
        GenMode::Explicit => {
            let m = matrices.ok_or_else(|| Error::Config("explicit needs matrices".into()))?;
            Ok(GeneratorPair::new(g, g.parse_matrix(&m[0])?, g.parse_matrix(&m[1])?)?)
        }
    }
}

/// A prime drawn uniformly from [lo, hi] by rejection.
pub fn random_prime<R: Rng + ?Sized>(lo: u64, hi: u64, rng: &mut R) -> Result<u64> {
    if !(lo..=hi).take(1 << 16).any(sl2c_core::is_prime) && hi - lo < 1 << 16 {
        return Err(Error::Config(format!("no prime in [{lo}, {hi}]")));
    }
    loop {
        let p = rng.random_range(lo..=hi);
        if sl2c_core::is_prime(p) {
            return Ok(p);
        }
    }
}

/// n = round(N / lg p), at least 1.
pub fn degree_for(p: u64, big_n: u32) -> u32 {
    ((big_n as f64 / (p as f64).log2()).round() as u32).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn appendix_b_over_f7() {
        let g = Group::new(Field::new(7, 1).unwrap());
        let a = appendix_b(g.field());
        assert_eq!(a.a0, g.matrix(3, 6, 1, 0));
        assert_eq!(a.a1, g.matrix(4, 6, 1, 0));
    }

    #[test]
    fn xi_pairs_have_singular_difference() {
        let g = Group::new(Field::new(3, 5).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let a = xi_random(g.field(), &mut rng);
            assert!(g.det(&g.sub(&a.a0, &a.a1)).is_zero());
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(degree_for(2, 16), 16);
        assert_eq!(degree_for(3, 16), 10);
        assert_eq!(degree_for(65521, 16), 1);
        assert_eq!(degree_for(251, 32), 4);
    }

    #[test]
    fn primes_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let p = random_prime(1 << 15, 1 << 16, &mut rng).unwrap();
            assert!(sl2c_core::is_prime(p) && (1 << 15..=1 << 16).contains(&p));
        }
        assert!(random_prime(24, 28, &mut rng).is_err());
        assert!(preset(&Group::new(Field::new(5, 1).unwrap()), "nope", &mut rng).is_err());
    }
}
