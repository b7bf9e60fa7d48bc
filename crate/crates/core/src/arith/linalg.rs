//! Exact linear algebra: row reduction over the rationals and a small 2x2
//! matrix type shared by scalar and rational-function entries.

use std::fmt::Debug;

use num_traits::{One, Zero};

use super::ratfunc::RatFunc;
use super::rational::Rational;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of the right kernel, one vector per free column (that column set
/// to 1), in increasing free-column order.
pub fn kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

/// Solves `A x = b`; returns a particular solution and a kernel basis, or
/// `None` when inconsistent.
pub fn solve_affine(
    rows: &[Vec<Rational>],
    rhs: &[Rational],
    ncols: usize,
) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let mut aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][ncols].clone();
    }
    Some((x, kernel(rows, ncols)))
}

/// Field operations needed by `Mat2`.
pub trait Scalar: Clone + PartialEq + Debug {
    fn zero_el() -> Self;
    fn one_el() -> Self;
    fn is_zero_el(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn recip(&self) -> Option<Self>;
}

impl Scalar for Rational {
    fn zero_el() -> Self {
        Zero::zero()
    }
    fn one_el() -> Self {
        One::one()
    }
    fn is_zero_el(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| Rational::one() / self)
    }
}

impl Scalar for RatFunc {
    fn zero_el() -> Self {
        RatFunc::zero()
    }
    fn one_el() -> Self {
        RatFunc::one()
    }
    fn is_zero_el(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

/// A 2x2 matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

pub type RMat2 = Mat2<Rational>;
pub type FMat2 = Mat2<RatFunc>;

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Mat2::new(T::zero_el(), T::zero_el(), T::zero_el(), T::zero_el())
    }

    pub fn identity() -> Self {
        Mat2::new(T::one_el(), T::zero_el(), T::zero_el(), T::one_el())
    }

    pub fn diag(a: T, d: T) -> Self {
        Mat2::new(a, T::zero_el(), T::zero_el(), d)
    }

    /// Matrix with the given columns.
    pub fn from_cols(c1: [T; 2], c2: [T; 2]) -> Self {
        let [a, c] = c1;
        let [b, d] = c2;
        Mat2::new(a, b, c, d)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.m[i][j]
    }

    pub fn col(&self, j: usize) -> [T; 2] {
        [self.m[0][j].clone(), self.m[1][j].clone()]
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|e| e.is_zero_el())
    }

    pub fn det(&self) -> T {
        self.m[0][0].times(&self.m[1][1]).minus(&self.m[0][1].times(&self.m[1][0]))
    }

    pub fn trace(&self) -> T {
        self.m[0][0].plus(&self.m[1][1])
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Mat2::new(f(&self.m[0][0]), f(&self.m[0][1]), f(&self.m[1][0]), f(&self.m[1][1]))
    }

    pub fn try_map<U, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Mat2<U>, E> {
        Ok(Mat2 {
            m: [
                [f(&self.m[0][0])?, f(&self.m[0][1])?],
                [f(&self.m[1][0])?, f(&self.m[1][1])?],
            ],
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat2::new(
            self.m[0][0].plus(&o.m[0][0]),
            self.m[0][1].plus(&o.m[0][1]),
            self.m[1][0].plus(&o.m[1][0]),
            self.m[1][1].plus(&o.m[1][1]),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.negate())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|e| e.times(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| {
            self.m[i][0].times(&o.m[0][j]).plus(&self.m[i][1].times(&o.m[1][j]))
        };
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn apply(&self, v: &[T; 2]) -> [T; 2] {
        [
            self.m[0][0].times(&v[0]).plus(&self.m[0][1].times(&v[1])),
            self.m[1][0].times(&v[0]).plus(&self.m[1][1].times(&v[1])),
        ]
    }

    /// Inverse, or `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let di = self.det().recip()?;
        Some(
            Mat2::new(
                self.m[1][1].clone(),
                self.m[0][1].negate(),
                self.m[1][0].negate(),
                self.m[0][0].clone(),
            )
            .scale(&di),
        )
    }
}

/// `det[v | w]` for column vectors.
pub fn wedge<T: Scalar>(v: &[T; 2], w: &[T; 2]) -> T {
    v[0].times(&w[1]).minus(&v[1].times(&w[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, q};

    fn row(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&a| int(a)).collect()
    }

    #[test]
    fn kernel_of_rank_one_matrix() {
        let m = vec![row(&[1, 2, 3]), row(&[2, 4, 6])];
        assert_eq!(rank(&m, 3), 1);
        let k = kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            for r in &m {
                let dot: Rational = r.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn affine_solve() {
        let m = vec![row(&[1, 1]), row(&[1, -1])];
        let (x, k) = solve_affine(&m, &[int(3), int(1)], 2).unwrap();
        assert_eq!(x, vec![int(2), int(1)]);
        assert!(k.is_empty());
        let singular = vec![row(&[1, 1]), row(&[2, 2])];
        assert!(solve_affine(&singular, &[int(1), int(3)], 2).is_none());
    }

    #[test]
    fn mat2_inverse() {
        let a = RMat2::new(int(2), int(1), q(1, 2), int(3));
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai), RMat2::identity());
        assert!(RMat2::new(int(1), int(2), int(2), int(4)).inverse().is_none());
    }
}
