//! 2×2 matrices over GF(q), the multiplication counter, and the conjugation toolkit.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::Cell;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field, UnitRoots};

/// Row-major `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl Matrix {
    pub const IDENTITY: Matrix = Matrix { a: Elem::ONE, b: Elem::ZERO, c: Elem::ZERO, d: Elem::ONE };

    pub const fn new(a: Elem, b: Elem, c: Elem, d: Elem) -> Matrix {
        Matrix { a, b, c, d }
    }

    pub fn transpose(self) -> Matrix {
        Matrix { a: self.a, b: self.c, c: self.b, d: self.d }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    PlusMinusIdentity,
    Diagonal,
    UpperTriangular,
    General,
}

/// Number of SL2 multiplications performed. Single-threaded by design: parallel
/// workers keep their own counters and sum them afterwards.
#[derive(Debug, Default)]
pub struct WorkCounter(Cell<u64>);

impl WorkCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.0.get()
    }

    #[inline]
    fn bump(&self) {
        self.0.set(self.0.get() + 1);
    }
}

/// A field together with the multiplication counter every product is charged to.
#[derive(Debug)]
pub struct Group {
    field: Field,
    work: WorkCounter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalForm {
    /// Conjugator Q with Q⁻¹A_iQ = [[ξ_i, −1], [1, 0]].
    pub p: Matrix,
    pub p_inv: Matrix,
    pub xi0: Elem,
    pub xi1: Elem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rational {
    Ok(RationalForm),
    /// Both generators become upper triangular under this conjugator.
    Triangularizable(Matrix),
    /// A0 = A1.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// P⁻¹MP = diag(λ, λ⁻¹), det P = 1.
    Split { lambda: Elem, p: Matrix },
    NotSplit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransposePairForm {
    pub p: Matrix,
    pub c: Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransposePair {
    Ok(TransposePairForm),
    Alternating,
    NoSolution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Intertwiner {
    Ok(Matrix),
    Symmetric,
}

impl Group {
    pub fn new(field: Field) -> Group {
        Group { field, work: WorkCounter::new() }
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Multiplications charged so far.
    #[inline]
    pub fn work(&self) -> u64 {
        self.work.get()
    }

    pub fn counter(&self) -> &WorkCounter {
        &self.work
    }

    pub fn elem(&self, raw: u64) -> Elem {
        self.field.elem(raw).expect("element in range")
    }

    pub fn matrix(&self, a: u64, b: u64, c: u64, d: u64) -> Matrix {
        Matrix::new(self.elem(a), self.elem(b), self.elem(c), self.elem(d))
    }

    /// The only counted operation.
    #[inline]
    pub fn mul(&self, x: &Matrix, y: &Matrix) -> Matrix {
        self.work.bump();
        let f = &self.field;
        Matrix {
            a: f.add(f.mul(x.a, y.a), f.mul(x.b, y.c)),
            b: f.add(f.mul(x.a, y.b), f.mul(x.b, y.d)),
            c: f.add(f.mul(x.c, y.a), f.mul(x.d, y.c)),
            d: f.add(f.mul(x.c, y.b), f.mul(x.d, y.d)),
        }
    }

    pub fn det(&self, m: &Matrix) -> Elem {
        let f = &self.field;
        f.sub(f.mul(m.a, m.d), f.mul(m.b, m.c))
    }

    pub fn trace(&self, m: &Matrix) -> Elem {
        self.field.add(m.a, m.d)
    }

    pub fn sub(&self, x: &Matrix, y: &Matrix) -> Matrix {
        let f = &self.field;
        Matrix { a: f.sub(x.a, y.a), b: f.sub(x.b, y.b), c: f.sub(x.c, y.c), d: f.sub(x.d, y.d) }
    }

    pub fn add(&self, x: &Matrix, y: &Matrix) -> Matrix {
        let f = &self.field;
        Matrix { a: f.add(x.a, y.a), b: f.add(x.b, y.b), c: f.add(x.c, y.c), d: f.add(x.d, y.d) }
    }

    pub fn scale(&self, k: Elem, m: &Matrix) -> Matrix {
        let f = &self.field;
        Matrix { a: f.mul(k, m.a), b: f.mul(k, m.b), c: f.mul(k, m.c), d: f.mul(k, m.d) }
    }

    pub fn neg(&self, m: &Matrix) -> Matrix {
        self.scale(self.field.int(-1), m)
    }

    /// Inverse through the adjugate; no division when det = 1.
    pub fn inv(&self, m: &Matrix) -> Result<Matrix> {
        let f = &self.field;
        let adj = Matrix { a: m.d, b: f.neg(m.b), c: f.neg(m.c), d: m.a };
        let det = self.det(m);
        if det == Elem::ONE {
            return Ok(adj);
        }
        let di = f.inv(det).map_err(|_| Error::Singular)?;
        Ok(self.scale(di, &adj))
    }

    pub fn minus_identity(&self) -> Matrix {
        let m1 = self.field.int(-1);
        Matrix::new(m1, Elem::ZERO, Elem::ZERO, m1)
    }

    pub fn is_pm_identity(&self, m: &Matrix) -> bool {
        *m == Matrix::IDENTITY || *m == self.minus_identity()
    }

    pub fn shape_of(&self, m: &Matrix) -> Shape {
        if !m.c.is_zero() {
            Shape::General
        } else if !m.b.is_zero() {
            Shape::UpperTriangular
        } else if self.is_pm_identity(m) {
            Shape::PlusMinusIdentity
        } else {
            Shape::Diagonal
        }
    }

    pub fn is_upper(&self, m: &Matrix) -> bool {
        m.c.is_zero()
    }

    /// Direct comparison of MN and NM.
    pub fn commutes(&self, m: &Matrix, n: &Matrix) -> bool {
        self.mul(m, n) == self.mul(n, m)
    }

    /// P⁻¹MP.
    pub fn conj(&self, p: &Matrix, p_inv: &Matrix, m: &Matrix) -> Matrix {
        self.mul(&self.mul(p_inv, m), p)
    }

    /// Uniform element of SL2: a uniform nonzero first column, then a uniform completion.
    pub fn random_sl2<R: RngCore + ?Sized>(&self, rng: &mut R) -> Matrix {
        let f = &self.field;
        loop {
            let a = f.sample(rng);
            let c = f.sample(rng);
            if a.is_zero() && c.is_zero() {
                continue;
            }
            return if !a.is_zero() {
                let b = f.sample(rng);
                let d = f.div(f.add(Elem::ONE, f.mul(b, c)), a).expect("a nonzero");
                Matrix { a, b, c, d }
            } else {
                let b = f.neg(f.inv(c).expect("c nonzero"));
                let d = f.sample(rng);
                Matrix { a, b, c, d }
            };
        }
    }

    pub fn fmt_matrix(&self, m: &Matrix) -> String {
        let e = |x| self.field.fmt_elem(x);
        format!("[{},{};{},{}]", e(m.a), e(m.b), e(m.c), e(m.d))
    }

    pub fn parse_matrix(&self, s: &str) -> Result<Matrix> {
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or(Error::Parse("matrix brackets"))?;
        let n = self.field.n() as usize;
        let mut entries = Vec::new();
        for row in inner.split(';') {
            let nums: Vec<&str> = row.split(',').collect();
            if nums.len() != 2 * n {
                return Err(Error::Parse("matrix row"));
            }
            for chunk in nums.chunks(n) {
                entries.push(self.field.parse_elem(&chunk.join(","))?);
            }
        }
        if entries.len() != 4 {
            return Err(Error::Parse("matrix rows"));
        }
        Ok(Matrix::new(entries[0], entries[1], entries[2], entries[3]))
    }

    /// Scales a nonzero vector so its first nonzero coordinate is 1.
    fn normalize(&self, v: (Elem, Elem)) -> (Elem, Elem) {
        let f = &self.field;
        let lead = if v.0.is_zero() { v.1 } else { v.0 };
        let li = f.inv(lead).expect("nonzero vector");
        (f.mul(v.0, li), f.mul(v.1, li))
    }

    /// A determinant-1 matrix whose first column is the normalized `v`.
    fn complete(&self, v: (Elem, Elem)) -> Matrix {
        let (x, y) = self.normalize(v);
        if !x.is_zero() {
            Matrix::new(Elem::ONE, Elem::ZERO, y, Elem::ONE)
        } else {
            Matrix::new(Elem::ZERO, self.field.int(-1), Elem::ONE, Elem::ZERO)
        }
    }

    fn apply(&self, m: &Matrix, v: (Elem, Elem)) -> (Elem, Elem) {
        let f = &self.field;
        (f.add(f.mul(m.a, v.0), f.mul(m.b, v.1)), f.add(f.mul(m.c, v.0), f.mul(m.d, v.1)))
    }

    fn parallel(&self, v: (Elem, Elem), w: (Elem, Elem)) -> bool {
        let f = &self.field;
        f.mul(v.0, w.1) == f.mul(v.1, w.0)
    }

    /// Eigenvector for eigenvalue λ of a non-scalar matrix: (λ − d, c), else (b, λ − a).
    fn eigenvector(&self, m: &Matrix, lambda: Elem) -> (Elem, Elem) {
        let f = &self.field;
        let v = (f.sub(lambda, m.d), m.c);
        if v.0.is_zero() && v.1.is_zero() {
            (m.b, f.sub(lambda, m.a))
        } else {
            v
        }
    }

    fn eigenvalues(&self, m: &Matrix) -> Vec<Elem> {
        match self.field.solve_unit_quadratic(self.trace(m)) {
            UnitRoots::TwoRoots(l, mu) => alloc::vec![l, mu],
            UnitRoots::DoubleRoot(l) => alloc::vec![l],
            UnitRoots::Irreducible => Vec::new(),
        }
    }

    pub fn eigen_split(&self, m: &Matrix) -> Result<Split> {
        if self.is_pm_identity(m) {
            return Err(Error::Precondition("eigen_split of a scalar matrix"));
        }
        let UnitRoots::TwoRoots(lambda, mu) = self.field.solve_unit_quadratic(self.trace(m)) else {
            return Ok(Split::NotSplit);
        };
        let f = &self.field;
        let v = self.eigenvector(m, lambda);
        let w = self.eigenvector(m, mu);
        let raw = f.sub(f.mul(v.0, w.1), f.mul(w.0, v.1));
        let s = f.inv(raw).expect("distinct eigenvalues give independent eigenvectors");
        let p = Matrix::new(f.mul(v.0, s), w.0, f.mul(v.1, s), w.1);
        Ok(Split::Split { lambda, p })
    }

    /// Conjugation of a generator pair into [[ξ, −1], [1, 0]] form.
    pub fn rational_form(&self, a0: &Matrix, a1: &Matrix) -> Result<Rational> {
        let f = &self.field;
        let diff = self.sub(a0, a1);
        if !self.det(&diff).is_zero() {
            return Err(Error::Precondition("det(A0 - A1) must vanish"));
        }
        // columns of the adjugate lie in the kernel of a singular matrix
        let col0 = (diff.d, f.neg(diff.c));
        let col1 = (f.neg(diff.b), diff.a);
        let v = if !(col0.0.is_zero() && col0.1.is_zero()) {
            col0
        } else if !(col1.0.is_zero() && col1.1.is_zero()) {
            col1
        } else {
            return Ok(Rational::Degenerate);
        };
        let v = self.normalize(v);
        let u = self.apply(a0, v);
        if self.parallel(u, v) {
            return Ok(Rational::Triangularizable(self.complete(v)));
        }
        let q = Matrix::new(f.neg(u.0), v.0, f.neg(u.1), v.1);
        let q_inv = self.inv(&q)?;
        let b0 = self.conj(&q, &q_inv, a0);
        let b1 = self.conj(&q, &q_inv, a1);
        let m1 = f.int(-1);
        for b in [&b0, &b1] {
            if b.b != m1 || b.c != Elem::ONE || !b.d.is_zero() {
                return Err(Error::Verification);
            }
        }
        Ok(Rational::Ok(RationalForm { p: q, p_inv: q_inv, xi0: b0.a, xi1: b1.a }))
    }

    /// Conjugator making both matrices upper triangular, if they share an eigenvector.
    pub fn common_eigenvector(&self, b0: &Matrix, b1: &Matrix) -> Option<Matrix> {
        let s0 = self.is_pm_identity(b0);
        let s1 = self.is_pm_identity(b1);
        if s0 && s1 {
            return Some(Matrix::IDENTITY);
        }
        let (m, other, other_scalar) = if s0 { (b1, b0, true) } else { (b0, b1, s1) };
        for lambda in self.eigenvalues(m) {
            let v = self.eigenvector(m, lambda);
            if other_scalar || self.parallel(self.apply(other, v), v) {
                return Some(self.complete(v));
            }
        }
        None
    }

    /// Characteristic 2 only: P with P⁻¹B0P = C and P⁻¹B1P = Cᵀ.
    pub fn transpose_pair_form(&self, b0: &Matrix, b1: &Matrix) -> Result<TransposePair> {
        let f = &self.field;
        if f.p() != 2 {
            return Err(Error::Precondition("transpose pair form needs characteristic 2"));
        }
        if self.trace(b0) != self.trace(b1) {
            return Err(Error::Precondition("transpose pair form needs equal traces"));
        }
        let (a, b, c, d) = (b0.a, b0.b, b0.c, b0.d);
        let (e, ff, g, h) = (b1.a, b1.b, b1.c, b1.d);
        // S·B0ᵀ = B1·S in the unknowns (s1, s2, s3); signs vanish in characteristic 2
        let rows = [
            [f.add(a, e), f.add(b, ff), Elem::ZERO],
            [c, f.add(d, e), ff],
            [g, f.add(a, h), b],
            [Elem::ZERO, f.add(c, g), f.add(d, h)],
        ];
        let basis = nullspace3(f, &rows);
        if basis.is_empty() {
            return Ok(TransposePair::NoSolution);
        }
        let mut candidates: Vec<[Elem; 3]> = basis.clone();
        let small: Vec<Elem> = (1..f.q().min(16) as u64).map(Elem).collect();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i != j {
                    for &k in &small {
                        candidates.push(core::array::from_fn(|t| f.add(basis[i][t], f.mul(k, basis[j][t]))));
                    }
                }
            }
        }
        for s in candidates {
            let det = f.add(f.mul(s[0], s[2]), f.mul(s[1], s[1]));
            if det.is_zero() || (s[0].is_zero() && s[2].is_zero()) {
                continue;
            }
            let k = f.inv(f.sqrt(det).expect("char 2")).expect("nonzero");
            let (s1, s2, s3) = (f.mul(k, s[0]), f.mul(k, s[1]), f.mul(k, s[2]));
            let u = f.sqrt(s1).expect("char 2");
            let w = f.sqrt(s3).expect("char 2");
            let p = if !u.is_zero() {
                let dd = f.div(f.add(s2, f.mul(u, w)), u).expect("u nonzero");
                Matrix::new(u, Elem::ZERO, f.add(dd, w), dd)
            } else {
                let bb = f.div(s2, w).expect("w nonzero");
                Matrix::new(bb, bb, Elem::ZERO, w)
            };
            let p_inv = self.inv(&p)?;
            let cm = self.conj(&p, &p_inv, b0);
            if self.det(&p) != Elem::ONE || self.conj(&p, &p_inv, b1) != cm.transpose() {
                return Err(Error::Verification);
            }
            return Ok(TransposePair::Ok(TransposePairForm { p, c: cm }));
        }
        Ok(TransposePair::Alternating)
    }

    /// Characteristic 2 only: E = [[α+1, α], [α, α+1]] with C·E = E·Cᵀ.
    pub fn orthogonal_intertwiner(&self, c: &Matrix) -> Result<Intertwiner> {
        let f = &self.field;
        if f.p() != 2 {
            return Err(Error::Precondition("orthogonal intertwiner needs characteristic 2"));
        }
        if c.b == c.c {
            return Ok(Intertwiner::Symmetric);
        }
        let denom = f.add(f.add(c.a, c.b), f.add(c.c, c.d));
        let alpha = f.div(f.add(c.b, c.c), denom).map_err(|_| Error::NoIntertwiner)?;
        let a1 = f.add(alpha, Elem::ONE);
        let e = Matrix::new(a1, alpha, alpha, a1);
        if self.mul(&e, &e) != Matrix::IDENTITY || self.mul(c, &e) != self.mul(&e, &c.transpose()) {
            return Err(Error::Verification);
        }
        Ok(Intertwiner::Ok(e))
    }
}

/// Basis of the right nullspace of a matrix with three columns.
fn nullspace3(f: &Field, rows: &[[Elem; 3]]) -> Vec<[Elem; 3]> {
    let mut m: Vec<[Elem; 3]> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..3 {
        let Some(k) = (r..m.len()).find(|&k| !m[k][col].is_zero()) else { continue };
        m.swap(r, k);
        let inv = f.inv(m[r][col]).expect("pivot");
        for t in 0..3 {
            m[r][t] = f.mul(m[r][t], inv);
        }
        for k in 0..m.len() {
            if k != r && !m[k][col].is_zero() {
                let factor = m[k][col];
                for t in 0..3 {
                    m[k][t] = f.sub(m[k][t], f.mul(factor, m[r][t]));
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..3).filter(|c| !pivots.contains(c)) {
        let mut v = [Elem::ZERO; 3];
        v[free] = Elem::ONE;
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(m[k][free]);
        }
        basis.push(v);
    }
    basis
}

/// Every element of SL2(F_q), for tiny q.
pub fn enumerate_sl2(g: &Group) -> Vec<Matrix> {
    let q = g.field().q() as u64;
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let m = Matrix::new(Elem(a), Elem(b), Elem(c), Elem(d));
                    if g.det(&m) == Elem::ONE {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}
