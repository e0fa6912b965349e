//! Exact dense matrices over `F` and `E`: products, determinants, ranks,
//! inverses and congruence diagonalization of (hermitian) symmetric matrices.

use std::fmt;

use num::{One, Zero};

use crate::padic::{Ext, Q};

/// A commutative field with an involution (identity on `F`, Galois
/// conjugation on `E`).
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    fn from_q(&self, x: &Q) -> Self;
    /// Scalars `c` tried when a hermitian pivot must be created from an
    /// off-diagonal entry `a`: some `c` gives `c̄a + cā ≠ 0`.
    fn pivot_twists(&self) -> Vec<Self>;
}

impl Field for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_q(&self, x: &Q) -> Self {
        x.clone()
    }
    fn pivot_twists(&self) -> Vec<Self> {
        vec![Q::one()]
    }
}

impl Field for Ext {
    fn zero_like(&self) -> Self {
        Ext::zero(self.u)
    }
    fn one_like(&self) -> Self {
        Ext::one(self.u)
    }
    fn is_zero(&self) -> bool {
        Ext::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Ext::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Ext::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Ext::mul(self, o)
    }
    fn neg(&self) -> Self {
        Ext::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        Ext::inv(self).ok()
    }
    fn conj(&self) -> Self {
        Ext::conj(self)
    }
    fn from_q(&self, x: &Q) -> Self {
        Ext::from_q(x.clone(), self.u)
    }
    fn pivot_twists(&self) -> Vec<Self> {
        vec![Ext::one(self.u), Ext::sqrt_u(self.u)]
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix<T: Field> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl<T: Field> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> T) -> Self {
        let mut f = f;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn zeros(rows: usize, cols: usize, proto: &T) -> Self {
        Matrix { rows, cols, data: vec![proto.zero_like(); rows * cols] }
    }

    pub fn identity(n: usize, proto: &T) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { proto.one_like() } else { proto.zero_like() })
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let proto = entries.first().expect("nonempty diagonal");
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { proto.zero_like() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn map<S: Field>(&self, f: impl Fn(&T) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn proto(&self) -> &T {
        self.data.first().expect("empty matrix has no scalar prototype")
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    /// `ᵗM̄`.
    pub fn adjoint(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut out = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc: Option<T> = None;
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    if a.is_zero() {
                        continue;
                    }
                    let b = o.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a.mul(b);
                    acc = Some(match acc {
                        None => t,
                        Some(s) => s.add(&t),
                    });
                }
                out.push(acc.unwrap_or_else(|| self.proto().zero_like()));
            }
        }
        Matrix { rows: self.rows, cols: o.cols, data: out }
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        (1..self.rows).fold(self.get(0, 0).clone(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Top-left `s × s` block.
    pub fn leading(&self, s: usize) -> Self {
        let idx: Vec<usize> = (0..s).collect();
        self.submatrix(&idx, &idx)
    }

    /// Bottom-right `s × s` block.
    pub fn trailing(&self, s: usize) -> Self {
        let idx: Vec<usize> = (self.rows - s..self.rows).collect();
        self.submatrix(&idx, &idx)
    }

    /// `[[a, b], [c, d]]` assembled from four blocks.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        let (r, cc) = (a.rows + c.rows, a.cols + b.cols);
        Matrix::from_fn(r, cc, |i, j| match (i < a.rows, j < a.cols) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - a.cols).clone(),
            (false, true) => c.get(i - a.rows, j).clone(),
            (false, false) => d.get(i - a.rows, j - a.cols).clone(),
        })
    }

    /// Row echelon reduction; returns (rank, determinant factor or zero).
    fn eliminate(&self) -> (usize, T) {
        let mut m = self.clone();
        let mut det = self.proto().one_like();
        let mut rank = 0;
        let (rows, cols) = (m.rows, m.cols);
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| !m.get(r, c).is_zero()) else {
                det = det.zero_like();
                continue;
            };
            if piv != rank {
                for j in 0..cols {
                    m.data.swap(piv * cols + j, rank * cols + j);
                }
                det = det.neg();
            }
            let pv = m.get(rank, c).clone();
            det = det.mul(&pv);
            let pinv = pv.inv().expect("nonzero pivot");
            for r in rank + 1..rows {
                let f = m.get(r, c).mul(&pinv);
                if f.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let v = m.get(r, j).sub(&f.mul(m.get(rank, j)));
                    m.set(r, j, v);
                }
            }
            rank += 1;
        }
        (rank, det)
    }

    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        if self.rows == 0 {
            panic!("determinant of an empty matrix needs a scalar prototype");
        }
        let (rank, det) = self.eliminate();
        if rank < self.rows {
            det.zero_like()
        } else {
            det
        }
    }

    pub fn rank(&self) -> usize {
        if self.data.is_empty() {
            return 0;
        }
        self.eliminate().0
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let proto = self.proto().clone();
        let mut a = self.clone();
        let mut b = Matrix::identity(n, &proto);
        for c in 0..n {
            let piv = (c..n).find(|&r| !a.get(r, c).is_zero())?;
            if piv != c {
                for j in 0..n {
                    a.data.swap(piv * n + j, c * n + j);
                    b.data.swap(piv * n + j, c * n + j);
                }
            }
            let pinv = a.get(c, c).inv()?;
            for j in 0..n {
                let v = a.get(c, j).mul(&pinv);
                a.set(c, j, v);
                let w = b.get(c, j).mul(&pinv);
                b.set(c, j, w);
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a.get(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(r, j).sub(&f.mul(a.get(c, j)));
                    a.set(r, j, v);
                    let w = b.get(r, j).sub(&f.mul(b.get(c, j)));
                    b.set(r, j, w);
                }
            }
        }
        Some(b)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| *self.get(i, j) == self.get(j, i).conj()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Congruence diagonalization `P M P* = D` of a hermitian (for `Q`: symmetric)
/// matrix. Returns the nonzero diagonal entries and the dimension of the
/// radical.
pub fn congruence_diagonalize<T: Field>(m: &Matrix<T>) -> (Vec<T>, usize) {
    assert!(m.is_hermitian(), "congruence diagonalization needs a hermitian matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut diag = Vec::new();
    // add row/col `src` times `c` into `dst`: M ← P M P* with P = I + c E_{dst,src}
    let add_into = |a: &mut Matrix<T>, dst: usize, src: usize, c: &T| {
        let cc = c.conj();
        for j in 0..n {
            let v = a.get(dst, j).add(&c.mul(a.get(src, j)));
            a.set(dst, j, v);
        }
        for i in 0..n {
            let v = a.get(i, dst).add(&a.get(i, src).mul(&cc));
            a.set(i, dst, v);
        }
    };
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a.get(i, i).is_zero());
        let pivot = match pivot {
            Some(i) => i,
            None => {
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a.get(i, j).is_zero());
                let Some((i, j)) = pair else { break };
                let mut made = false;
                for c in a.get(i, j).pivot_twists() {
                    let mut trial = a.clone();
                    add_into(&mut trial, i, j, &c);
                    if !trial.get(i, i).is_zero() {
                        a = trial;
                        made = true;
                        break;
                    }
                }
                assert!(made, "no hermitian pivot could be created");
                i
            }
        };
        let d = a.get(pivot, pivot).clone();
        let dinv = d.inv().expect("nonzero pivot");
        for &r in active.iter().filter(|&&r| r != pivot) {
            let f = a.get(r, pivot).mul(&dinv).neg();
            if !f.is_zero() {
                add_into(&mut a, r, pivot, &f);
            }
        }
        diag.push(d);
        active.retain(|&r| r != pivot);
    }
    let radical = n - diag.len();
    (diag, radical)
}
