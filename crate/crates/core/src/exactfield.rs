//! Dense linear algebra over a prime field GF(p).
//!
//! Matrices are row-major with residues stored as `u32`. Every subspace is
//! kept in reduced column echelon form, so two equal subspaces always carry
//! identical bases.

use std::fmt;
use std::ops::Mul;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
}

impl FieldSpec {
    /// Largest accepted characteristic; products of two residues must fit in a `u64`.
    pub const MAX_CHARACTERISTIC: u64 = (1 << 31) - 1;

    pub fn new(p: u64) -> Result<FieldSpec> {
        if p > Self::MAX_CHARACTERISTIC || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec { p: p as u32 })
    }

    pub fn gf2() -> FieldSpec {
        FieldSpec { p: 2 }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Multiplicative inverse via Fermat; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        let mut base = a as u64 % self.p as u64;
        let mut exp = self.p as u64 - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            exp >>= 1;
        }
        acc as u32
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
    field: FieldSpec,
}

impl Mat {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from rows of integers, reducing each entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(field: FieldSpec, rows: &[R]) -> Result<Mat> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&x| field.reduce(x)));
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            data,
            field,
        })
    }

    /// Builds a matrix from row-major residues, each of which must already lie in `[0, p)`.
    pub fn from_residues(field: FieldSpec, rows: usize, cols: usize, data: Vec<u32>) -> Result<Mat> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|&&x| x >= field.p) {
            return Err(Error::DimensionMismatch(format!(
                "entry {bad} is not reduced mod {}",
                field.p
            )));
        }
        Ok(Mat {
            rows,
            cols,
            data,
            field,
        })
    }

    pub fn from_fn(field: FieldSpec, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Mat {
        let mut m = Mat::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j) % field.p;
            }
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(field: FieldSpec, rows: usize, cols: usize, rng: &mut R) -> Mat {
        Mat::from_fn(field, rows, cols, |_, _| rng.gen_range(0..field.p))
    }

    /// A uniformly random invertible matrix (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(field: FieldSpec, n: usize, rng: &mut R) -> Mat {
        loop {
            let m = Mat::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn column(&self, j: usize) -> Mat {
        self.select_columns(&[j])
    }

    pub fn select_columns(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.field, self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.field, idx.len(), self.cols, |i, j| self.get(idx[i], j))
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        Ok(Mat::from_fn(self.field, self.rows, cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        }))
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
            field: self.field,
        })
    }

    pub fn block_diag(field: FieldSpec, blocks: &[&Mat]) -> Mat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Mat::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.data[(r0 + i) * cols + c0 + j] = b.get(i, j);
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    fn check_field(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p, other.field.p));
        }
        Ok(())
    }

    pub fn matmul(&self, b: &Mat) -> Result<Mat> {
        self.check_field(b)?;
        if self.cols != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        let p = self.field.p as u64;
        let mut out = vec![0u32; self.rows * b.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                let brow = b.row(k);
                let orow = &mut out[i * b.cols..(i + 1) * b.cols];
                for (o, &x) in orow.iter_mut().zip(brow) {
                    *o = ((*o as u64 + a * x as u64) % p) as u32;
                }
            }
        }
        Ok(Mat {
            rows: self.rows,
            cols: b.cols,
            data: out,
            field: self.field,
        })
    }

    pub fn add(&self, b: &Mat) -> Result<Mat> {
        self.check_field(b)?;
        if (self.rows, self.cols) != (b.rows, b.cols) {
            return Err(Error::DimensionMismatch("matrix sum of different shapes".into()));
        }
        let f = self.field;
        let data = self.data.iter().zip(&b.data).map(|(&x, &y)| f.add(x, y)).collect();
        Ok(Mat { data, ..self.clone() })
    }

    pub fn sub(&self, b: &Mat) -> Result<Mat> {
        self.add(&b.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> Mat {
        let f = self.field;
        Mat {
            data: self.data.iter().map(|&x| f.mul(x, c)).collect(),
            ..self.clone()
        }
    }

    /// Reduced row echelon form together with its pivot columns.
    /// Pivots are chosen as the first nonzero entry in each column.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in 0..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.data[r * m.cols + j] = v;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.data[i * m.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn kernel_basis(&self) -> Subspace {
        let f = self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Mat::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, f.neg(r.get(i, fc)));
            }
        }
        Subspace::span(&basis)
    }

    pub fn image_basis(&self) -> Subspace {
        Subspace::span(self)
    }

    /// Finds some `x` with `self * x = rhs`, or `None` when a column of `rhs`
    /// lies outside the column space.
    pub fn solve(&self, rhs: &Mat) -> Result<Option<Mat>> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve with {} equations but rhs of {} rows",
                self.rows, rhs.rows
            )));
        }
        let aug = self.hstack(rhs)?;
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Mat::zeros(self.field, self.cols, rhs.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.get(i, self.cols + j));
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let aug = self.hstack(&Mat::identity(self.field, n))?;
        let (r, pivots) = aug.rref();
        if pivots.iter().take(n).any(|&c| c >= n) {
            return Err(Error::Singular);
        }
        Ok(Mat::from_fn(self.field, n, n, |i, j| r.get(i, n + j)))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

impl Mul for &Mat {
    type Output = Mat;

    /// Panics on shape or field mismatch; use [`Mat::matmul`] for a checked product.
    fn mul(self, rhs: &Mat) -> Mat {
        self.matmul(rhs).expect("non-conformable matrix product")
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{:?}[", self.field)?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}

/// A linear subspace of `GF(p)^ambient_dim`, stored by a basis in reduced
/// column echelon form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
    pivot_rows: Vec<usize>,
}

impl Subspace {
    /// The span of the columns of `m`.
    pub fn span(m: &Mat) -> Subspace {
        let (r, pivots) = m.transpose().rref();
        let k = pivots.len();
        let basis = Mat::from_fn(m.field, m.rows, k, |i, j| r.get(j, i));
        Subspace {
            ambient_dim: m.rows,
            basis,
            pivot_rows: pivots,
        }
    }

    pub fn zero(field: FieldSpec, ambient_dim: usize) -> Subspace {
        Subspace::span(&Mat::zeros(field, ambient_dim, 0))
    }

    pub fn full(field: FieldSpec, ambient_dim: usize) -> Subspace {
        Subspace::span(&Mat::identity(field, ambient_dim))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn field(&self) -> FieldSpec {
        self.basis.field
    }

    /// Leading row of each basis column; the basis restricted to these rows is the identity.
    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivot_rows
    }

    pub fn contains(&self, v: &Mat) -> bool {
        v.rows == self.ambient_dim && self.coordinates(v).is_some()
    }

    /// Coordinates of the columns of `v` in this basis, if they lie in the subspace.
    pub fn coordinates(&self, v: &Mat) -> Option<Mat> {
        let y = v.select_rows(&self.pivot_rows);
        let back = &self.basis * &y;
        (back == *v).then_some(y)
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch(self.ambient_dim, other.ambient_dim));
        }
        self.basis.check_field(&other.basis)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        Ok(Subspace::span(&self.basis.hstack(&other.basis)?))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        // A x = B y  <=>  [A | -B] (x, y) = 0
        let stacked = self.basis.hstack(&other.basis.scale(self.field().neg(1)))?;
        let ker = stacked.kernel_basis();
        let xs: Vec<usize> = (0..self.dim()).collect();
        let coeffs = ker.basis().select_rows(&xs);
        Ok(Subspace::span(&(&self.basis * &coeffs)))
    }

    /// The standard basis vectors outside the pivot rows; they span a
    /// complement of this subspace.
    pub fn complement(&self) -> Mat {
        let rest: Vec<usize> = (0..self.ambient_dim)
            .filter(|i| !self.pivot_rows.contains(i))
            .collect();
        Mat::from_fn(self.field(), self.ambient_dim, rest.len(), |i, j| (rest[j] == i) as u32)
    }

    /// Coordinates of the columns of `v` in the quotient by this subspace,
    /// relative to the canonical complement returned by [`Subspace::complement`].
    pub fn quotient_coords(&self, v: &Mat) -> Mat {
        let y = v.select_rows(&self.pivot_rows);
        let residual = v.sub(&(&self.basis * &y)).expect("shapes agree");
        let rest: Vec<usize> = (0..self.ambient_dim)
            .filter(|i| !self.pivot_rows.contains(i))
            .collect();
        residual.select_rows(&rest)
    }
}

pub fn matmul(a: &Mat, b: &Mat) -> Result<Mat> {
    a.matmul(b)
}

pub fn rank(m: &Mat) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &Mat) -> Subspace {
    m.kernel_basis()
}

pub fn image_basis(m: &Mat) -> Subspace {
    m.image_basis()
}

pub fn solve(m: &Mat, rhs: &Mat) -> Result<Option<Mat>> {
    m.solve(rhs)
}

pub fn inverse(m: &Mat) -> Result<Mat> {
    m.inverse()
}

pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.sum(b)
}

pub fn subspace_intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersect(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn m(p: u64, rows: &[&[i64]]) -> Mat {
        Mat::from_rows(gf(p), rows).unwrap()
    }

    #[test]
    fn field_checks_primality() {
        assert!(FieldSpec::new(2).is_ok());
        assert!(FieldSpec::new(5).is_ok());
        assert_eq!(FieldSpec::new(4), Err(Error::NotPrime(4)));
        assert_eq!(FieldSpec::new(1), Err(Error::NotPrime(1)));
        assert_eq!(FieldSpec::new(0), Err(Error::NotPrime(0)));
        let f7 = gf(7);
        for a in 1..7 {
            assert_eq!(f7.mul(a, f7.inv(a)), 1);
        }
    }

    #[test]
    fn matmul_examples() {
        let x = m(5, &[&[1, 2, 3], &[4, 0, 1]]);
        assert_eq!(&Mat::identity(gf(5), 2) * &x, x);
        assert_eq!(m(5, &[&[2]]).matmul(&m(5, &[&[3]])).unwrap(), m(5, &[&[1]]));
        assert!(matches!(x.matmul(&x), Err(Error::DimensionMismatch(_))));
        assert_eq!(
            x.matmul(&Mat::identity(gf(7), 3)),
            Err(Error::FieldMismatch(5, 7))
        );
    }

    #[test]
    fn matmul_matches_dot_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = gf(5);
        let a = Mat::random(f, 4, 3, &mut rng);
        let b = Mat::random(f, 3, 2, &mut rng);
        let c = &a * &b;
        for i in 0..4 {
            for j in 0..2 {
                let dot: u64 = (0..3).map(|k| a.get(i, k) as u64 * b.get(k, j) as u64).sum();
                assert_eq!(c.get(i, j) as u64, dot % 5);
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::zeros(gf(2), 3, 3).rank(), 0);
        assert_eq!(Mat::identity(gf(2), 4).rank(), 4);
        assert_eq!(m(5, &[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Mat::zeros(gf(2), 0, 5).rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Mat::identity(gf(2), 3).kernel_basis().dim(), 0);
        assert_eq!(Mat::zeros(gf(2), 2, 3).kernel_basis(), Subspace::full(gf(2), 3));
        let k = m(2, &[&[1, 1]]).kernel_basis();
        assert_eq!(k.basis(), &m(2, &[&[1], &[1]]));
    }

    #[test]
    fn image_examples() {
        assert_eq!(Mat::zeros(gf(3), 2, 2).image_basis().dim(), 0);
        assert_eq!(Mat::identity(gf(3), 2).image_basis().dim(), 2);
        let im = m(5, &[&[1], &[2]]).image_basis();
        assert_eq!(im.basis(), &m(5, &[&[1], &[2]]));
        // canonical: any spanning set gives the same basis
        assert_eq!(m(5, &[&[3], &[1]]).image_basis(), im);
    }

    #[test]
    fn solve_examples() {
        let v = m(3, &[&[2], &[1]]);
        assert_eq!(Mat::identity(gf(3), 2).solve(&v).unwrap(), Some(v.clone()));
        assert_eq!(Mat::zeros(gf(3), 2, 2).solve(&v).unwrap(), None);
        let a = m(3, &[&[1, 0], &[0, 0]]);
        let rhs = m(3, &[&[1], &[0]]);
        let x = a.solve(&rhs).unwrap().unwrap();
        assert_eq!(&a * &x, rhs);
        assert!(a.solve(&m(3, &[&[1]])).is_err());
    }

    #[test]
    fn inverse_examples() {
        let id = Mat::identity(gf(5), 3);
        assert_eq!(id.inverse().unwrap(), id);
        assert_eq!(m(5, &[&[2]]).inverse().unwrap(), m(5, &[&[3]]));
        assert_eq!(m(5, &[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = Mat::random_invertible(gf(5), 4, &mut rng);
        assert_eq!(&a * &a.inverse().unwrap(), Mat::identity(gf(5), 4));
        assert_eq!(&a.inverse().unwrap() * &a, Mat::identity(gf(5), 4));
        assert_eq!(Mat::identity(gf(2), 0).inverse().unwrap().rows(), 0);
    }

    #[test]
    fn subspace_examples() {
        let f = gf(5);
        let x = m(5, &[&[1, 0], &[2, 1], &[0, 3]]).image_basis();
        assert_eq!(x.sum(&Subspace::zero(f, 3)).unwrap(), x);
        assert_eq!(x.intersect(&x).unwrap(), x);
        assert!(x.sum(&Subspace::zero(f, 2)).is_err());
    }

    /// Enumerates every vector of GF(5)^3 and tests membership through
    /// brute-force scalar multiples.
    #[test]
    fn two_lines_in_gf5_cubed() {
        let f = gf(5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let u = Mat::random(f, 3, 1, &mut rng);
            let w = Mat::random(f, 3, 1, &mut rng);
            if u.is_zero() || w.is_zero() {
                continue;
            }
            let on_line = |dir: &Mat, v: &[u32]| {
                (0..5).any(|c| (0..3).all(|i| f.mul(dir.get(i, 0), c) == v[i]))
            };
            let mut common = 0;
            for a in 0..125u32 {
                let v = [a % 5, a / 5 % 5, a / 25];
                if on_line(&u, &v) && on_line(&w, &v) {
                    common += 1;
                }
            }
            let (lu, lw) = (u.image_basis(), w.image_basis());
            let inter = lu.intersect(&lw).unwrap();
            let sum = lu.sum(&lw).unwrap();
            let expected_inter = if common == 5 { 1 } else { 0 };
            assert_eq!(inter.dim(), expected_inter);
            assert_eq!(sum.dim(), 2 - expected_inter);
        }
    }

    #[test]
    fn complement_and_quotient_coordinates() {
        let f = gf(3);
        let s = m(3, &[&[1], &[1], &[0]]).image_basis();
        let c = s.complement();
        assert_eq!(c.cols(), 2);
        assert_eq!(s.basis().hstack(&c).unwrap().rank(), 3);
        let v = m(3, &[&[2], &[2], &[0]]);
        assert!(s.quotient_coords(&v).is_zero());
        let w = m(3, &[&[0], &[1], &[1]]);
        let q = s.quotient_coords(&w);
        // w - (complement * q) must lie in s
        let diff = w.sub(&(&c * &q)).unwrap();
        assert!(s.contains(&diff));
        let _ = f;
    }

    fn arb_mat() -> impl proptest::strategy::Strategy<Value = (Mat, Mat)> {
        use proptest::prelude::*;
        (prop_oneof![Just(2u64), Just(3), Just(5)], 0usize..6, 0usize..6, 0usize..6, any::<u64>()).prop_map(
            |(p, r, k, c, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = gf(p);
                (Mat::random(f, r, k, &mut rng), Mat::random(f, k, c, &mut rng))
            },
        )
    }

    proptest::proptest! {
        #[test]
        fn rank_of_product_is_bounded((a, b) in arb_mat()) {
            let ab = &a * &b;
            proptest::prop_assert!(ab.rank() <= a.rank().min(b.rank()));
        }

        #[test]
        fn rank_nullity((a, _b) in arb_mat()) {
            let ker = a.kernel_basis();
            proptest::prop_assert_eq!(ker.dim() + a.rank(), a.cols());
            proptest::prop_assert!((&a * ker.basis()).is_zero());
            proptest::prop_assert_eq!(a.image_basis().dim(), a.rank());
        }

        #[test]
        fn dimension_formula(seed in proptest::prelude::any::<u64>(), n in 0usize..6, ka in 0usize..5, kb in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = gf(3);
            let sa = Mat::random(f, n, ka, &mut rng).image_basis();
            let sb = Mat::random(f, n, kb, &mut rng).image_basis();
            let s = sa.sum(&sb).unwrap();
            let i = sa.intersect(&sb).unwrap();
            proptest::prop_assert_eq!(s.dim() + i.dim(), sa.dim() + sb.dim());
            proptest::prop_assert!(sa.contains(i.basis()) && sb.contains(i.basis()));
        }
    }
}
