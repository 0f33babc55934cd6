//! Arithmetic in GF(p^n).
//!
//! An element is stored as the base-p integer `c0 + c1*p + ... + c_{n-1}*p^(n-1)` of its
//! coefficient vector. That encoding is canonical, fits a `u64` whenever `p^n <= 2^64`, and
//! doubles as the ordering used wherever elements act as lookup keys.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::nt;

/// Fields at or below this size get log/antilog tables (non-prime fields only).
const TABLE_LIMIT: u128 = 1 << 20;

/// Default refusal bound on the group order for baby-step giant-step.
pub const DLOG_BOUND: u128 = 1 << 44;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub(crate) u64);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// The base-p encoding of the coefficient vector.
    #[inline]
    pub fn raw(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitRoots {
    /// Roots `λ` and `λ⁻¹` with `λ ≠ λ⁻¹`.
    TwoRoots(Elem, Elem),
    DoubleRoot(Elem),
    Irreducible,
}

#[derive(Clone, Debug)]
enum Repr {
    Prime,
    /// p = 2; the modulus minus its leading term, as a bit mask.
    Binary(u64),
    Ext,
}

struct Tables {
    log: Vec<u32>,
    exp: Vec<u32>,
}

#[derive(Clone)]
pub struct Field {
    p: u64,
    n: u32,
    modulus: Vec<u64>,
    q: u128,
    repr: Repr,
    tables: Option<Arc<Tables>>,
    nonresidue: Elem,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {}", self.p, self.n, self.modulus_string())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn field_size(p: u64, n: u32) -> Result<u128> {
    let mut q: u128 = 1;
    for _ in 0..n {
        q = q.checked_mul(p as u128).ok_or(Error::FieldTooLarge)?;
        if q > 1u128 << 64 {
            return Err(Error::FieldTooLarge);
        }
    }
    Ok(q)
}

impl Field {
    /// GF(p^n) with the canonical modulus: the monic irreducible of degree n whose low
    /// coefficients, read as a base-p integer, are smallest.
    pub fn new(p: u64, n: u32) -> Result<Field> {
        Self::check(p, n)?;
        let q = field_size(p, n)?;
        if n == 1 {
            return Self::build(p, n, vec![0, 1], q);
        }
        let mut t: u128 = 1;
        loop {
            let mut f = digits(t, p, n as usize);
            f.push(1);
            if poly::irreducible(&f, p) {
                return Self::build(p, n, f, q);
            }
            t += 1;
        }
    }

    /// GF(p^n) with an explicit monic modulus `c0..cn`.
    pub fn with_modulus(p: u64, n: u32, modulus: &[u64]) -> Result<Field> {
        Self::check(p, n)?;
        let q = field_size(p, n)?;
        if modulus.len() != n as usize + 1 || modulus[n as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadModulus);
        }
        if !poly::irreducible(modulus, p) {
            return Err(Error::Reducible);
        }
        Self::build(p, n, modulus.to_vec(), q)
    }

    fn check(p: u64, n: u32) -> Result<()> {
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        if !nt::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(())
    }

    fn build(p: u64, n: u32, modulus: Vec<u64>, q: u128) -> Result<Field> {
        let repr = if p == 2 {
            let mut low = 0u64;
            for (i, &c) in modulus[..n as usize].iter().enumerate() {
                low |= c << i;
            }
            Repr::Binary(low)
        } else if n == 1 {
            Repr::Prime
        } else {
            Repr::Ext
        };
        let mut f = Field { p, n, modulus, q, repr, tables: None, nonresidue: Elem::ZERO };
        if p != 2 {
            let mut z = 2u64;
            while f.is_square(Elem(z)) {
                z += 1;
            }
            f.nonresidue = Elem(z);
        }
        if n > 1 && q <= TABLE_LIMIT {
            f.tables = Some(Arc::new(f.build_tables()));
        }
        Ok(f)
    }

    fn build_tables(&self) -> Tables {
        let g = self.primitive_element();
        let m = (self.q - 1) as usize;
        let mut log = vec![0u32; self.q as usize];
        let mut exp = vec![0u32; 2 * m];
        let mut x = Elem::ONE;
        for i in 0..m {
            exp[i] = x.0 as u32;
            exp[i + m] = x.0 as u32;
            log[x.0 as usize] = i as u32;
            x = self.mul(x, g);
        }
        Tables { log, exp }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Field size p^n.
    #[inline]
    pub fn q(&self) -> u128 {
        self.q
    }

    /// Modulus coefficients `c0..cn`.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { format!("{c}") };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        terms.join("+")
    }

    /// lg q = n lg p.
    pub fn lg_q(&self) -> f64 {
        self.n as f64 * libm::log2(self.p as f64)
    }

    pub fn elem(&self, raw: u64) -> Result<Elem> {
        if (raw as u128) < self.q {
            Ok(Elem(raw))
        } else {
            Err(Error::NotAnElement(raw))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn int(&self, k: i64) -> Elem {
        let r = k.unsigned_abs() % self.p;
        if k < 0 && r != 0 {
            Elem(self.p - r)
        } else {
            Elem(r)
        }
    }

    /// The class of x.
    pub fn x(&self) -> Elem {
        if self.n == 1 {
            self.neg(Elem(self.modulus[0]))
        } else {
            Elem(self.p)
        }
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Result<Elem> {
        if c.len() > self.n as usize || c.iter().any(|&x| x >= self.p) {
            return Err(Error::Parse("coefficient list"));
        }
        Ok(Elem(self.pack(c)))
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u64> {
        let mut out = vec![0; self.n as usize];
        self.unpack(a.0, &mut out);
        out
    }

    #[inline]
    fn unpack(&self, mut a: u64, out: &mut [u64]) {
        match self.repr {
            Repr::Binary(_) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (a >> i) & 1;
                }
            }
            _ => {
                for o in out.iter_mut() {
                    *o = a % self.p;
                    a /= self.p;
                }
            }
        }
    }

    #[inline]
    fn pack(&self, d: &[u64]) -> u64 {
        let mut a = 0u64;
        for &c in d.iter().rev() {
            a = a.wrapping_mul(self.p).wrapping_add(c);
        }
        a
    }

    /// Text form: decimal coefficients, constant term first.
    pub fn fmt_elem(&self, a: Elem) -> String {
        if self.n == 1 {
            return format!("{}", a.0);
        }
        let c = self.coeffs(a);
        let parts: Vec<String> = c.iter().map(|x| format!("{x}")).collect();
        parts.join(",")
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        let mut c = Vec::new();
        for part in s.split(',') {
            let v: u64 = part.trim().parse().map_err(|_| Error::Parse("field element"))?;
            c.push(v);
        }
        if self.n == 1 && c.len() == 1 {
            return self.elem(c[0]).and_then(|e| if e.0 < self.p { Ok(e) } else { Err(Error::NotAnElement(e.0)) });
        }
        self.from_coeffs(&c)
    }

    #[inline]
    fn add_mod(&self, a: u64, b: u64) -> u64 {
        let (s, o) = a.overflowing_add(b);
        if o || s >= self.p {
            s.wrapping_sub(self.p)
        } else {
            s
        }
    }

    #[inline]
    fn sub_mod(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(self.p)
        }
    }

    #[inline]
    fn mul_mod(&self, a: u64, b: u64) -> u64 {
        if self.p <= u32::MAX as u64 {
            a * b % self.p
        } else {
            nt::mul_mod(a, b, self.p)
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match self.repr {
            Repr::Prime => Elem(self.add_mod(a.0, b.0)),
            Repr::Binary(_) => Elem(a.0 ^ b.0),
            Repr::Ext => {
                let (mut x, mut y) = (a.0, b.0);
                let (mut r, mut scale) = (0u64, 1u64);
                while x != 0 || y != 0 {
                    let d = self.add_mod(x % self.p, y % self.p);
                    r += d * scale;
                    scale = scale.wrapping_mul(self.p);
                    x /= self.p;
                    y /= self.p;
                }
                Elem(r)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match self.repr {
            Repr::Prime => Elem(if a.0 == 0 { 0 } else { self.p - a.0 }),
            Repr::Binary(_) => a,
            Repr::Ext => {
                let mut x = a.0;
                let (mut r, mut scale) = (0u64, 1u64);
                while x != 0 {
                    let d = x % self.p;
                    if d != 0 {
                        r += (self.p - d) * scale;
                    }
                    scale = scale.wrapping_mul(self.p);
                    x /= self.p;
                }
                Elem(r)
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        match self.repr {
            Repr::Prime => Elem(self.sub_mod(a.0, b.0)),
            Repr::Binary(_) => Elem(a.0 ^ b.0),
            Repr::Ext => self.add(a, self.neg(b)),
        }
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if let Some(t) = &self.tables {
            let i = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return Elem(t.exp[i] as u64);
        }
        match self.repr {
            Repr::Prime => Elem(self.mul_mod(a.0, b.0)),
            Repr::Binary(low) => Elem(self.binary_reduce(clmul(a.0, b.0), low)),
            Repr::Ext => self.ext_mul(a.0, b.0),
        }
    }

    #[inline]
    fn binary_reduce(&self, mut x: u128, low: u64) -> u64 {
        let n = self.n;
        let mask = if n == 64 { u64::MAX as u128 } else { (1u128 << n) - 1 };
        loop {
            let hi = x >> n;
            if hi == 0 {
                return x as u64;
            }
            x &= mask;
            let mut l = low;
            while l != 0 {
                let j = l.trailing_zeros();
                x ^= hi << j;
                l &= l - 1;
            }
        }
    }

    fn ext_mul(&self, a: u64, b: u64) -> Elem {
        let p = self.p;
        if self.n == 2 {
            let (a0, a1, b0, b1) = (a % p, a / p, b % p, b / p);
            let (c0, c1) = (self.modulus[0], self.modulus[1]);
            let hh = self.mul_mod(a1, b1);
            let r0 = self.sub_mod(self.mul_mod(a0, b0), self.mul_mod(c0, hh));
            let mid = self.add_mod(self.mul_mod(a0, b1), self.mul_mod(a1, b0));
            let r1 = self.sub_mod(mid, self.mul_mod(c1, hh));
            return Elem(r0 + r1 * p);
        }
        let n = self.n as usize;
        let mut x = [0u64; 64];
        let mut y = [0u64; 64];
        self.unpack(a, &mut x[..n]);
        self.unpack(b, &mut y[..n]);
        let prod = poly::mul(&x[..n], &y[..n], p);
        let r = poly::rem_monic(&prod, &self.modulus, p);
        Elem(self.pack(&r))
    }

    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let m = (self.q - 1) as usize;
            return Ok(Elem(t.exp[(m - t.log[a.0 as usize] as usize) % m] as u64));
        }
        Ok(match self.repr {
            Repr::Prime => Elem(inv_mod(a.0, self.p)),
            Repr::Binary(low) => Elem(binary_inv(a.0, low, self.n)),
            Repr::Ext => self.ext_inv(a.0),
        })
    }

    fn ext_inv(&self, a: u64) -> Elem {
        let p = self.p;
        if self.n == 2 {
            let (a0, a1) = (a % p, a / p);
            let (c0, c1) = (self.modulus[0], self.modulus[1]);
            let t = self.sub_mod(a0, self.mul_mod(c1, a1));
            let norm = self.add_mod(self.mul_mod(a0, t), self.mul_mod(c0, self.mul_mod(a1, a1)));
            let ni = inv_mod(norm, p);
            let r0 = self.mul_mod(t, ni);
            let r1 = self.mul_mod(self.sub_mod(0, a1), ni);
            return Elem(r0 + r1 * p);
        }
        let mut x = vec![0u64; self.n as usize];
        self.unpack(a, &mut x);
        let r = poly::inv_mod(&x, &self.modulus, p);
        Elem(self.pack(&r))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut e: u128) -> Elem {
        let mut r = Elem::ONE;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Power with a signed exponent; negative exponents go through the inverse.
    pub fn powi(&self, a: Elem, k: i128) -> Result<Elem> {
        if k >= 0 {
            Ok(self.pow(a, k as u128))
        } else {
            Ok(self.pow(self.inv(a)?, k.unsigned_abs()))
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Elem {
        if self.q == 1u128 << 64 {
            Elem(rng.next_u64())
        } else {
            Elem(rng.random_range(0..self.q as u64))
        }
    }

    pub fn sample_nonzero<R: RngCore + ?Sized>(&self, rng: &mut R) -> Elem {
        if self.q - 1 == u64::MAX as u128 {
            Elem(rng.random_range(1..=u64::MAX))
        } else {
            Elem(rng.random_range(1..self.q as u64))
        }
    }

    /// Euler's criterion (odd characteristic); every element is a square when p = 2.
    pub fn is_square(&self, a: Elem) -> bool {
        if self.p == 2 || a.0 == 0 {
            return true;
        }
        self.pow(a, (self.q - 1) / 2) == Elem::ONE
    }

    /// A square root, or `None` for non-squares. In odd characteristic the root with the
    /// smaller encoding is returned.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return Some(a);
        }
        if self.p == 2 {
            let mut r = a;
            for _ in 1..self.n {
                r = self.mul(r, r);
            }
            return Some(r);
        }
        if !self.is_square(a) {
            return None;
        }
        let r = if self.q % 4 == 3 {
            self.pow(a, (self.q + 1) / 4)
        } else {
            self.tonelli_shanks(a)
        };
        let s = self.neg(r);
        Some(if s < r { s } else { r })
    }

    fn tonelli_shanks(&self, a: Elem) -> Elem {
        let qm1 = self.q - 1;
        let s = qm1.trailing_zeros();
        let t = qm1 >> s;
        let mut m = s;
        let mut c = self.pow(self.nonresidue, t);
        let mut tt = self.pow(a, t);
        let mut r = self.pow(a, t.div_ceil(2));
        while tt != Elem::ONE {
            let mut i = 0;
            let mut x = tt;
            while x != Elem::ONE {
                x = self.mul(x, x);
                i += 1;
            }
            let mut b = c;
            for _ in 0..m - i - 1 {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            tt = self.mul(tt, c);
            r = self.mul(r, b);
        }
        r
    }

    /// Roots of x² − t·x + 1.
    pub fn solve_unit_quadratic(&self, t: Elem) -> UnitRoots {
        if self.p == 2 {
            if t.0 == 0 {
                return UnitRoots::DoubleRoot(Elem::ONE);
            }
            // x = t·y turns the equation into y² + y = t⁻².
            let ti = self.inv(t).expect("nonzero");
            let c = self.mul(ti, ti);
            return match self.solve_artin_schreier(c) {
                Some(y) => {
                    let lam = self.mul(t, y);
                    UnitRoots::TwoRoots(lam, self.add(lam, t))
                }
                None => UnitRoots::Irreducible,
            };
        }
        let two = self.int(2);
        let disc = self.sub(self.mul(t, t), self.int(4));
        let half = self.inv(two).expect("odd characteristic");
        if disc.0 == 0 {
            return UnitRoots::DoubleRoot(self.mul(t, half));
        }
        match self.sqrt(disc) {
            Some(s) => {
                let lam = self.mul(self.add(t, s), half);
                let mu = self.mul(self.sub(t, s), half);
                UnitRoots::TwoRoots(lam, mu)
            }
            None => UnitRoots::Irreducible,
        }
    }

    /// Solves y² + y = c over GF(2^n) by Gaussian elimination on the F2-linear map
    /// y ↦ y² + y. The returned solution has constant coefficient 0.
    fn solve_artin_schreier(&self, c: Elem) -> Option<Elem> {
        let n = self.n as usize;
        // rows[j]: bit i = coefficient j of L(x^i); bit 64 = coefficient j of c
        let mut rows = vec![0u128; n];
        for i in 0..n {
            let xi = Elem(1u64 << i);
            let img = self.add(self.mul(xi, xi), xi).0;
            for (j, row) in rows.iter_mut().enumerate() {
                if (img >> j) & 1 == 1 {
                    *row |= 1 << i;
                }
            }
        }
        for (j, row) in rows.iter_mut().enumerate() {
            if (c.0 >> j) & 1 == 1 {
                *row |= 1 << 64;
            }
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let Some(k) = (r..n).find(|&k| (rows[k] >> col) & 1 == 1) else { continue };
            rows.swap(r, k);
            for k in 0..n {
                if k != r && (rows[k] >> col) & 1 == 1 {
                    rows[k] ^= rows[r];
                }
            }
            pivots.push(col);
            r += 1;
        }
        if rows[r..].iter().any(|&row| row != 0) {
            return None;
        }
        let mut y = 0u64;
        for (k, &col) in pivots.iter().enumerate() {
            if (rows[k] >> 64) & 1 == 1 {
                y |= 1 << col;
            }
        }
        Some(Elem(y))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Elem) -> Result<u64> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let m = (self.q - 1) as u64;
        let mut ord = m;
        for r in nt::prime_factors(m) {
            while ord.is_multiple_of(r) && self.pow(a, (ord / r) as u128) == Elem::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// The primitive element with the smallest encoding.
    pub fn primitive_element(&self) -> Elem {
        let m = (self.q - 1) as u64;
        let factors = nt::prime_factors(m);
        let mut g = 1u64;
        loop {
            let e = Elem(g);
            if factors.iter().all(|&r| self.pow(e, (m / r) as u128) != Elem::ONE) {
                return e;
            }
            g += 1;
        }
    }

    /// Smallest e ≥ 0 with base^e = target, by baby-step giant-step.
    pub fn discrete_log(&self, base: Elem, target: Elem, bound: u128) -> Result<u64> {
        if base.0 == 0 || target.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        if order > bound {
            return Err(Error::OverBound);
        }
        let m = (libm::ceil(libm::sqrt(order as f64)) as u64).max(1);
        let mut baby: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
        let mut x = Elem::ONE;
        for j in 0..m {
            baby.entry(x.0).or_insert(j);
            x = self.mul(x, base);
        }
        let step = self.inv(self.pow(base, m as u128))?;
        let mut g = target;
        for i in 0..=m {
            if let Some(&j) = baby.get(&g.0) {
                return Ok(i * m + j);
            }
            g = self.mul(g, step);
        }
        Err(Error::NotFound)
    }
}

fn digits(mut t: u128, p: u64, n: usize) -> Vec<u64> {
    let mut d = Vec::with_capacity(n + 1);
    for _ in 0..n {
        d.push((t % p as u128) as u64);
        t /= p as u128;
    }
    d
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    s0.rem_euclid(m as i128) as u64
}

#[inline]
fn clmul(a: u64, mut b: u64) -> u128 {
    let a = a as u128;
    let mut r = 0u128;
    while b != 0 {
        r ^= a << b.trailing_zeros();
        b &= b - 1;
    }
    r
}

fn degree(x: u128) -> i32 {
    127 - x.leading_zeros() as i32
}

fn binary_inv(a: u64, low: u64, n: u32) -> u64 {
    let f = (1u128 << n) | low as u128;
    let (mut u, mut v) = (a as u128, f);
    let (mut g1, mut g2) = (1u128, 0u128);
    while u != 1 {
        let mut j = degree(u) - degree(v);
        if j < 0 {
            core::mem::swap(&mut u, &mut v);
            core::mem::swap(&mut g1, &mut g2);
            j = -j;
        }
        u ^= v << j;
        g1 ^= g2 << j;
    }
    g1 as u64
}

/// Dense polynomials over Z_p, constant term first.
pub(crate) mod poly {
    use alloc::vec;
    use alloc::vec::Vec;

    use crate::nt;

    fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut acc = vec![0u128; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += x as u128 * y as u128;
                if acc[i + j] >= 1 << 126 {
                    acc[i + j] %= p as u128;
                }
            }
        }
        acc.into_iter().map(|x| (x % p as u128) as u64).collect()
    }

    /// Remainder modulo a monic polynomial.
    pub fn rem_monic(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let n = f.len() - 1;
        let mut r = a.to_vec();
        trim(&mut r);
        while r.len() > n {
            let top = r.pop().unwrap();
            if top == 0 {
                continue;
            }
            let base = r.len() - n;
            for i in 0..n {
                let t = nt::mul_mod(top, f[i], p);
                r[base + i] = (r[base + i] + p - t) % p;
            }
            trim(&mut r);
        }
        r
    }

    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let lead_inv = super::inv_mod(*b.last().unwrap(), p);
        let monic: Vec<u64> = b.iter().map(|&c| nt::mul_mod(c, lead_inv, p)).collect();
        rem_monic(a, &monic, p)
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![0; a.len().max(b.len())];
        for (i, x) in r.iter_mut().enumerate() {
            let u = a.get(i).copied().unwrap_or(0);
            let v = b.get(i).copied().unwrap_or(0);
            *x = (u + p - v) % p;
        }
        trim(&mut r);
        r
    }

    fn gcd_degree(a: &[u64], b: &[u64], p: u64) -> usize {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a.len().saturating_sub(1)
    }

    fn pow_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1u64];
        let mut b = rem_monic(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                r = rem_monic(&mul(&r, &b, p), f, p);
            }
            b = rem_monic(&mul(&b, &b, p), f, p);
            e >>= 1;
        }
        r
    }

    /// Rabin's test for a monic polynomial.
    pub fn irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        if n == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let x = vec![0u64, 1];
        let mut frob = Vec::with_capacity(n + 1);
        frob.push(x.clone());
        let mut h = x.clone();
        for _ in 0..n {
            h = pow_mod(&h, p, f, p);
            frob.push(h.clone());
        }
        if sub(&frob[n], &x, p) != Vec::<u64>::new() {
            return false;
        }
        for r in nt::prime_factors(n as u64) {
            let d = sub(&frob[n / r as usize], &x, p);
            if gcd_degree(f, &d, p) != 0 {
                return false;
            }
        }
        true
    }

    /// Inverse of a nonzero `a` modulo an irreducible monic `f`, padded to deg f.
    pub fn inv_mod(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let n = f.len() - 1;
        let (mut r0, mut r1) = (f.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut s0, mut s1) = (Vec::<u64>::new(), vec![1u64]);
        while !r1.is_empty() {
            let (qt, rr) = divmod(&r0, &r1, p);
            let ns = sub(&s0, &rem_monic(&mul(&qt, &s1, p), f, p), p);
            r0 = r1;
            r1 = rr;
            s0 = s1;
            s1 = ns;
        }
        // r0 is a nonzero constant
        let c = super::inv_mod(r0[0], p);
        let mut out: Vec<u64> = s0.iter().map(|&x| nt::mul_mod(x, c, p)).collect();
        out.resize(n, 0);
        out
    }

    fn divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let li = super::inv_mod(b[db], p);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut qt = vec![0u64; r.len() - db];
        while r.len() >= b.len() {
            let k = r.len() - 1 - db;
            let c = nt::mul_mod(*r.last().unwrap(), li, p);
            qt[k] = c;
            for i in 0..=db {
                let t = nt::mul_mod(c, b[i], p);
                r[k + i] = (r[k + i] + p - t) % p;
            }
            trim(&mut r);
        }
        trim(&mut qt);
        (qt, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_irreducible(f: &[u64], p: u64) -> bool {
        // no root and no monic factor of degree <= n/2, by trial division of all candidates
        let n = f.len() - 1;
        for d in 1..=n / 2 {
            let count = p.pow(d as u32);
            for t in 0..count {
                let mut g = digits(t as u128, p, d);
                g.push(1);
                if poly::rem_monic(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(Field::new(7, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(Field::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Field::new(2, 3).unwrap().modulus_string(), "x^3+x+1");
        assert_eq!(Field::new(4, 2).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(7, 0).unwrap_err(), Error::ZeroDegree);
        assert_eq!(Field::new(2, 8).unwrap().modulus_string(), "x^8+x^4+x^3+x+1");
        assert!(Field::new(2, 64).is_ok());
        assert_eq!(Field::new(2, 65).unwrap_err(), Error::FieldTooLarge);
    }

    #[test]
    fn canonical_modulus_is_minimal_irreducible() {
        for (p, n) in [(2u64, 2u32), (2, 4), (2, 5), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)] {
            let f = Field::new(p, n).unwrap();
            let mut t = 0u128;
            let expect = loop {
                let mut g = digits(t, p, n as usize);
                g.push(1);
                if (n == 1 || g[0] != 0) && brute_irreducible(&g, p) {
                    break g;
                }
                t += 1;
            };
            assert_eq!(f.modulus(), &expect[..], "p={p} n={n}");
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert_eq!(Field::with_modulus(2, 2, &[1, 0, 1]).unwrap_err(), Error::Reducible);
        assert_eq!(Field::with_modulus(2, 2, &[1, 1]).unwrap_err(), Error::BadModulus);
        assert!(Field::with_modulus(2, 3, &[1, 0, 1, 1]).is_ok());
    }

    #[test]
    fn small_examples() {
        let f7 = Field::new(7, 1).unwrap();
        let e = |v| f7.elem(v).unwrap();
        assert_eq!(f7.mul(e(3), e(5)), e(1));
        assert_eq!(f7.sub(e(2), e(5)), e(4));
        assert_eq!(f7.inv(e(3)).unwrap(), e(5));
        assert_eq!(f7.pow(e(3), 6), e(1));
        assert_eq!(f7.powi(e(3), -1).unwrap(), e(5));
        assert_eq!(f7.inv(e(0)).unwrap_err(), Error::DivisionByZero);

        let f8 = Field::new(2, 3).unwrap();
        let x = f8.x();
        let x2 = f8.from_coeffs(&[0, 0, 1]).unwrap();
        assert_eq!(f8.mul(x, x2), f8.from_coeffs(&[1, 1, 0]).unwrap());
        assert_eq!(f8.inv(x).unwrap(), f8.from_coeffs(&[1, 0, 1]).unwrap());
        assert_eq!(f8.fmt_elem(f8.inv(x).unwrap()), "1,0,1");
        assert_eq!(f8.parse_elem("1,0,1").unwrap(), f8.inv(x).unwrap());
        assert_eq!(f7.fmt_elem(e(4)), "4");
    }

    #[test]
    fn quadratic_examples() {
        let f7 = Field::new(7, 1).unwrap();
        let e = |v| f7.elem(v).unwrap();
        assert_eq!(f7.solve_unit_quadratic(e(1)), UnitRoots::TwoRoots(e(5), e(3)));
        assert_eq!(f7.solve_unit_quadratic(e(2)), UnitRoots::DoubleRoot(e(1)));
        for n in 1..6 {
            let f = Field::new(2, n).unwrap();
            assert_eq!(f.solve_unit_quadratic(Elem::ZERO), UnitRoots::DoubleRoot(Elem::ONE));
        }
    }

    fn fields_under_test() -> Vec<Field> {
        vec![
            Field::new(7, 1).unwrap(),
            Field::new(65521, 1).unwrap(),
            Field::new(18446744073709551557, 1).unwrap(),
            Field::new(2, 8).unwrap(),
            Field::new(2, 32).unwrap(),
            Field::new(2, 64).unwrap(),
            Field::new(3, 5).unwrap(),
            Field::new(3, 20).unwrap(),
            Field::new(65521, 2).unwrap(),
            Field::new(251, 4).unwrap(),
        ]
    }

    #[test]
    fn field_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for f in fields_under_test() {
            for _ in 0..10_000 {
                let (a, b, c) = (f.sample(&mut rng), f.sample(&mut rng), f.sample(&mut rng));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)), "{f:?}");
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)), "{f:?}");
                assert_eq!(f.add(f.sub(a, b), b), a);
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE, "{f:?} {a:?}");
                }
            }
        }
    }

    #[test]
    fn table_and_direct_paths_agree() {
        // GF(3^5) uses tables; rebuild the same field without them.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, n) in [(3u64, 5u32), (2, 12), (5, 4), (251, 2)] {
            let f = Field::new(p, n).unwrap();
            let mut plain = f.clone();
            plain.tables = None;
            for _ in 0..5000 {
                let (a, b) = (f.sample(&mut rng), f.sample(&mut rng));
                assert_eq!(f.mul(a, b), plain.mul(a, b));
                if !a.is_zero() {
                    assert_eq!(f.inv(a).unwrap(), plain.inv(a).unwrap());
                }
            }
        }
    }

    #[test]
    fn extension_matches_schoolbook() {
        // compare against an independent polynomial product reduced by the modulus
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, n) in [(3u64, 20u32), (65521, 2), (7, 5), (251, 4)] {
            let f = Field::new(p, n).unwrap();
            for _ in 0..500 {
                let (a, b) = (f.sample(&mut rng), f.sample(&mut rng));
                let (ca, cb) = (f.coeffs(a), f.coeffs(b));
                let mut prod = vec![0u64; 2 * n as usize];
                for i in 0..n as usize {
                    for j in 0..n as usize {
                        prod[i + j] = (prod[i + j] + ca[i] * cb[j] % p) % p;
                    }
                }
                let m = f.modulus();
                for k in (n as usize..2 * n as usize).rev() {
                    let t = prod[k];
                    prod[k] = 0;
                    for i in 0..n as usize {
                        prod[k - n as usize + i] = (prod[k - n as usize + i] + (p - m[i]) * t % p) % p;
                    }
                }
                assert_eq!(f.coeffs(f.mul(a, b)), &prod[..n as usize]);
            }
        }
    }

    #[test]
    fn unit_quadratic_brute_force() {
        for (p, n) in [(5u64, 1u32), (7, 1), (2, 3), (3, 2), (13, 1), (2, 4), (5, 2)] {
            let f = Field::new(p, n).unwrap();
            let q = f.q() as u64;
            for t in 0..q {
                let t = Elem(t);
                let roots: Vec<Elem> = (0..q)
                    .map(Elem)
                    .filter(|&x| f.add(f.sub(f.mul(x, x), f.mul(t, x)), Elem::ONE).is_zero())
                    .collect();
                match f.solve_unit_quadratic(t) {
                    UnitRoots::TwoRoots(l, m) => {
                        assert_ne!(l, m);
                        assert_eq!(f.mul(l, m), Elem::ONE);
                        let mut got = vec![l, m];
                        got.sort();
                        assert_eq!(got, roots);
                    }
                    UnitRoots::DoubleRoot(l) => assert_eq!(roots, vec![l]),
                    UnitRoots::Irreducible => assert!(roots.is_empty()),
                }
            }
        }
    }

    #[test]
    fn square_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (p, n) in [(13u64, 1u32), (17, 1), (65537, 1), (3, 4), (7, 2), (2, 16), (65521, 2)] {
            let f = Field::new(p, n).unwrap();
            for _ in 0..500 {
                let a = f.sample(&mut rng);
                let s = f.mul(a, a);
                let r = f.sqrt(s).unwrap();
                assert_eq!(f.mul(r, r), s);
            }
        }
    }

    #[test]
    fn discrete_logs() {
        let f7 = Field::new(7, 1).unwrap();
        let e = |v| f7.elem(v).unwrap();
        assert_eq!(f7.discrete_log(e(3), e(6), DLOG_BOUND).unwrap(), 3);
        assert_eq!(f7.discrete_log(e(3), e(1), DLOG_BOUND).unwrap(), 0);
        assert_eq!(f7.discrete_log(e(2), e(3), DLOG_BOUND).unwrap_err(), Error::NotFound);
        let f8 = Field::new(2, 3).unwrap();
        let t = f8.from_coeffs(&[1, 0, 1]).unwrap();
        assert_eq!(f8.discrete_log(f8.x(), t, DLOG_BOUND).unwrap(), 6);
        assert_eq!(f8.discrete_log(f8.x(), t, 5).unwrap_err(), Error::OverBound);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, n) in [(2u64, 16u32), (3, 10), (65521, 1), (101, 3)] {
            let f = Field::new(p, n).unwrap();
            for _ in 0..50 {
                let b = f.sample_nonzero(&mut rng);
                let ord = f.order(b).unwrap();
                let k: u64 = rng.random_range(0..f.q() as u64);
                let e = f.discrete_log(b, f.pow(b, k as u128), DLOG_BOUND).unwrap();
                assert_eq!(e, k % ord);
            }
        }
    }

    #[test]
    fn sampling() {
        let f7 = Field::new(7, 1).unwrap();
        let a = f7.sample(&mut ChaCha8Rng::seed_from_u64(11));
        let b = f7.sample(&mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut counts = [0u32; 7];
        for _ in 0..10_000 {
            counts[f7.sample(&mut rng).raw() as usize] += 1;
        }
        let expect = 10_000.0 / 7.0;
        let sigma = libm::sqrt(10_000.0 * (1.0 / 7.0) * (6.0 / 7.0));
        for c in counts {
            assert!(libm::fabs(c as f64 - expect) < 5.0 * sigma);
        }
        let s1: Vec<Elem> = {
            let mut r = ChaCha8Rng::seed_from_u64(1);
            (0..8).map(|_| f7.sample(&mut r)).collect()
        };
        let s2: Vec<Elem> = {
            let mut r = ChaCha8Rng::seed_from_u64(2);
            (0..8).map(|_| f7.sample(&mut r)).collect()
        };
        assert_ne!(s1, s2);
    }

    #[test]
    fn primitive_elements() {
        assert_eq!(Field::new(7, 1).unwrap().primitive_element().raw(), 3);
        let f = Field::new(2, 8).unwrap();
        let g = f.primitive_element();
        assert_eq!(f.order(g).unwrap(), 255);
    }
}
