//! Collision search for homomorphic hash functions into SL2(F_q).
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod attacks;
pub mod engine;
pub mod error;
pub mod gf;
mod nt;
pub mod sl2;
pub mod special;
pub mod words;

pub use error::{Error, Result};
pub use nt::is_prime;
pub use gf::{Elem, Field, UnitRoots};
pub use sl2::{Group, Matrix, Shape, WorkCounter};
pub use words::{Code, GeneratorPair, Word};
