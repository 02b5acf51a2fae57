//! Exact rational scalars, vectors and dense matrices, and the linear algebra
//! kernel (RREF, rank, null space, span comparison) used by every check.

mod echelon;
mod intops;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use echelon::{span_contains, span_equal, Rref, SpanBasis};

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// `q^k` for any integer `k`.
pub fn qpow(q: u64, k: i64) -> Scalar {
    let base = Scalar::from_integer(BigInt::from(q));
    if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base, (-k) as usize).recip()
    }
}

/// Renders as `p/q`, including `/1` for integers.
pub fn format_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(n, d))
}

/// A column vector in the standard module.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactVector(Vec<Scalar>);

impl ExactVector {
    pub fn new(entries: Vec<Scalar>) -> Self {
        ExactVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        ExactVector(vec![Scalar::zero(); n])
    }

    /// The standard basis vector with a 1 in coordinate `i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Scalar::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    pub fn set(&mut self, i: usize, x: Scalar) {
        self.0[i] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<(usize, &Scalar)> {
        self.0.iter().enumerate().find(|(_, x)| !x.is_zero())
    }

    /// Indices of nonzero coordinates.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i)
    }

    fn check_len(&self, other: &ExactVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!("vector lengths {} and {}", self.len(), other.len())));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExactVector) -> Result<ExactVector> {
        self.check_len(other)?;
        Ok(ExactVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &ExactVector) -> Result<ExactVector> {
        self.check_len(other)?;
        Ok(ExactVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, c: &Scalar) -> ExactVector {
        ExactVector(self.0.iter().map(|a| a * c).collect())
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &Scalar, other: &ExactVector) -> Result<()> {
        self.check_len(other)?;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
        Ok(())
    }
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Scalar::one(); n])
    }

    pub fn diagonal(d: &[Scalar]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(ExactMatrix { rows: r, cols: c, data: rows.concat() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[ExactVector]) -> Result<Self> {
        if columns.iter().any(|v| v.len() != rows) {
            return Err(Error::Dimension(format!("columns must have length {rows}")));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j].get(i).clone()))
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

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ExactVector {
        ExactVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn columns(&self) -> Vec<ExactVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    fn same_shape(&self, other: &ExactMatrix, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{op} of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_shape(other, "sum")?;
        let data = self.data.par_iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.same_shape(other, "difference")?;
        let data = self.data.par_iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &Scalar) -> ExactMatrix {
        let data = self.data.par_iter().map(|a| a * c).collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// `self + c * I`
    pub fn add_identity(&self, c: &Scalar) -> Result<ExactMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("shift of a non-square matrix".into()));
        }
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.cols + i] += c;
        }
        Ok(m)
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.is_square() && self.is_diagonal() {
            let data = (0..self.rows * other.cols)
                .into_par_iter()
                .map(|k| self.get(k / other.cols, k / other.cols) * other.get(k / other.cols, k % other.cols))
                .collect();
            return Ok(ExactMatrix { rows: self.rows, cols: other.cols, data });
        }
        if other.is_square() && other.is_diagonal() {
            let data = (0..self.rows * other.cols)
                .into_par_iter()
                .map(|k| self.get(k / other.cols, k % other.cols) * other.get(k % other.cols, k % other.cols))
                .collect();
            return Ok(ExactMatrix { rows: self.rows, cols: other.cols, data });
        }
        let a = intops::scale_to_integers(&self.data);
        let b = intops::scale_to_integers(&other.data);
        let nums = intops::mul_int(&a.nums, &b.nums, self.rows, self.cols, other.cols);
        let denom = a.denom * b.denom;
        Ok(ExactMatrix { rows: self.rows, cols: other.cols, data: intops::unscale(nums, &denom) })
    }

    pub fn mul_vec(&self, v: &ExactVector) -> Result<ExactVector> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        let a = intops::scale_to_integers(&self.data);
        let b = intops::scale_to_integers(v.entries());
        let nums = intops::mul_int(&a.nums, &b.nums, self.rows, self.cols, 1);
        Ok(ExactVector(intops::unscale(nums, &(a.denom * b.denom))))
    }

    /// Applies the matrix to each vector.
    pub fn mul_vecs(&self, vs: &[ExactVector]) -> Result<Vec<ExactVector>> {
        if vs.is_empty() {
            return Ok(Vec::new());
        }
        let m = ExactMatrix::from_columns(self.cols, vs)?;
        Ok(self.mul(&m)?.columns())
    }

    pub fn transpose(&self) -> ExactMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &Scalar)> {
        self.data.iter().position(|x| !x.is_zero()).map(|k| (k / self.cols, k % self.cols, &self.data[k]))
    }

    /// First entry (row-major) where the matrices differ.
    pub fn first_difference(&self, other: &ExactMatrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        self.data.iter().zip(&other.data).position(|(a, b)| a != b).map(|k| (k / self.cols, k % self.cols))
    }

    pub fn is_diagonal(&self) -> bool {
        self.first_nonzero_off_diagonal().is_none()
    }

    fn first_nonzero_off_diagonal(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .enumerate()
            .map(|(k, x)| (k / self.cols, k % self.cols, x))
            .find(|&(i, j, x)| i != j && !x.is_zero())
            .map(|(i, j, _)| (i, j))
    }

    pub fn rref(&self) -> Rref {
        echelon::rref(self)
    }

    pub fn rank(&self) -> usize {
        let mut basis = SpanBasis::new(self.cols);
        for i in 0..self.rows {
            basis.insert_integer(intops::primitive_integer_vector(self.row(i)));
        }
        basis.rank()
    }

    pub fn kernel_basis(&self) -> Vec<ExactVector> {
        echelon::kernel_basis(self)
    }

    /// Rows flattened into one long vector, for rank tests on sets of matrices.
    pub fn vectorize(&self) -> ExactVector {
        ExactVector(self.data.clone())
    }

    /// Text dump: `rows cols` header, then the entries as `p/q` row by row.
    pub fn dump(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(format_scalar).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn parse_dump(text: &str) -> Result<ExactMatrix> {
        let mut tokens = text.split_whitespace();
        let mut dim = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("invalid {what}")))
        };
        let (rows, cols) = (dim("row count")?, dim("column count")?);
        let data = tokens.map(parse_scalar).collect::<Result<Vec<_>>>()?;
        if data.len() != rows * cols {
            return Err(Error::Parse(format!("expected {} entries, found {}", rows * cols, data.len())));
        }
        Ok(ExactMatrix { rows, cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    fn v(xs: &[i64]) -> ExactVector {
        ExactVector::new(xs.iter().map(|&x| int(x)).collect())
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ExactMatrix {
        ExactMatrix::from_fn(rows, cols, |_, _| ratio(rng.gen_range(-9..=9), rng.gen_range(1..=7)))
    }

    /// Schoolbook product directly on rationals, independent of the integer kernels.
    fn naive_mul(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
        ExactMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum())
    }

    #[test]
    fn scalar_format_round_trip() {
        assert_eq!(format_scalar(&ratio(-6, 4)), "-3/2");
        assert_eq!(format_scalar(&int(5)), "5/1");
        assert_eq!(parse_scalar("-3/2").unwrap(), ratio(-3, 2));
        assert_eq!(parse_scalar("7").unwrap(), int(7));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert_eq!(qpow(2, -2), ratio(1, 4));
        assert_eq!(qpow(3, 3), int(27));
    }

    #[test]
    fn basic_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 5, 5);
        assert_eq!(ExactMatrix::identity(5).mul(&a).unwrap(), a);
        assert!(a.add(&a.scale(&int(-1))).unwrap().is_zero());
        let (b, c) = (random_matrix(&mut rng, 5, 5), random_matrix(&mut rng, 5, 5));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(a.mul(&b).unwrap(), naive_mul(&a, &b));
    }

    #[test]
    fn dimension_errors() {
        let a = ExactMatrix::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::Dimension(_))));
        assert!(matches!(a.add(&ExactMatrix::zeros(3, 2)), Err(Error::Dimension(_))));
        assert!(matches!(a.mul_vec(&v(&[1, 2])), Err(Error::Dimension(_))));
        assert!(matches!(span_equal(&[v(&[1])], &[v(&[1, 2])]), Err(Error::Dimension(_))));
        assert!(matches!(span_contains(&[v(&[1])], &v(&[1, 2])), Err(Error::Dimension(_))));
    }

    #[test]
    fn bigint_fallback_matches() {
        // entries near 2^70 force the BigInt product path
        let big = Scalar::from_integer(BigInt::from(1u128 << 70));
        let a = ExactMatrix::from_fn(3, 3, |i, j| &big * int((i * 3 + j) as i64 - 4) + int(1));
        assert_eq!(a.mul(&a).unwrap(), naive_mul(&a, &a));
        assert_eq!(a.rank(), naive_rank(&a));
    }

    #[test]
    fn rref_examples() {
        let r = ExactMatrix::identity(4).rref();
        assert_eq!(r.matrix, ExactMatrix::identity(4));
        assert_eq!(r.rank, 4);
        assert_eq!(ExactMatrix::zeros(3, 3).rref().rank, 0);
        let ones = m(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        let r = ones.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.matrix, m(&[&[1, 1, 1], &[0, 0, 0], &[0, 0, 0]]));
        let x = m(&[&[2, 4, 1], &[1, 2, 0]]).rref();
        assert_eq!(x.matrix, m(&[&[1, 2, 0], &[0, 0, 1]]));
        assert_eq!(x.pivots, vec![0, 2]);
    }

    #[test]
    fn kernel_examples() {
        assert!(ExactMatrix::identity(3).kernel_basis().is_empty());
        assert_eq!(ExactMatrix::zeros(3, 3).kernel_basis().len(), 3);
        assert_eq!(m(&[&[1, 1]]).kernel_basis(), vec![v(&[-1, 1])]);
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 2);
        for x in &k {
            assert!(a.mul_vec(x).unwrap().is_zero());
        }
    }

    #[test]
    fn span_examples() {
        let basis = vec![v(&[1, 0, 2]), v(&[0, 1, 1])];
        assert!(span_equal(&basis, &basis).unwrap());
        assert!(span_equal(&[v(&[1, 0])], &[v(&[2, 0])]).unwrap());
        assert!(!span_equal(&[v(&[1, 0])], &[v(&[0, 1])]).unwrap());
        assert!(span_equal(&basis, &[v(&[1, 1, 3]), v(&[1, -1, 1])]).unwrap());
        assert!(span_contains(&basis, &v(&[2, 3, 7])).unwrap());
        assert!(span_contains(&basis, &v(&[0, 0, 0])).unwrap());
        assert!(!span_contains(&basis, &v(&[0, 0, 1])).unwrap());
    }

    #[test]
    fn dump_round_trip() {
        let a = ExactMatrix::from_rows(vec![vec![ratio(1, 2), int(-3)], vec![int(0), ratio(-7, 9)]]).unwrap();
        let text = a.dump();
        assert_eq!(text, "2 2\n1/2 -3/1\n0/1 -7/9\n");
        assert_eq!(ExactMatrix::parse_dump(&text).unwrap(), a);
        assert!(ExactMatrix::parse_dump("2 2\n1 2 3").is_err());
    }

    /// Plain Gaussian elimination on rationals, used as an oracle for rank.
    fn naive_rank(a: &ExactMatrix) -> usize {
        let mut rows: Vec<Vec<Scalar>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
        let mut rank = 0;
        for c in 0..a.cols() {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank][c].clone();
            for i in 0..rows.len() {
                if i != rank && !rows[i][c].is_zero() {
                    let f = &rows[i][c] / &pivot;
                    let src = rows[rank].clone();
                    for (x, y) in rows[i].iter_mut().zip(&src) {
                        *x -= &f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn low_rank(seed: u64, rows: usize, cols: usize, r: usize) -> ExactMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, rows, r);
        let b = random_matrix(&mut rng, r, cols);
        a.mul(&b).unwrap()
    }

    #[test]
    fn rank_matches_oracle_and_transpose() {
        for seed in 0..20 {
            let a = low_rank(seed, 6, 7, (seed % 5) as usize + 1);
            assert_eq!(a.rank(), naive_rank(&a), "seed {seed}");
            assert_eq!(a.rank(), a.transpose().rank(), "seed {seed}");
        }
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(seed in 0u64..500, r in 1usize..5) {
            let a = low_rank(seed, 5, 6, r);
            let once = a.rref();
            let twice = once.matrix.rref();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(once.rank, a.rank());
        }

        #[test]
        fn kernel_dimension_and_annihilation(seed in 0u64..500, r in 0usize..5) {
            let a = if r == 0 { ExactMatrix::zeros(4, 6) } else { low_rank(seed, 4, 6, r) };
            let k = a.kernel_basis();
            prop_assert_eq!(k.len(), 6 - a.rank());
            for x in &k {
                prop_assert!(a.mul_vec(x).unwrap().is_zero());
            }
        }

        #[test]
        fn products_scale_linearly(seed in 0u64..500, c in -20i64..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, 4, 3);
            let b = random_matrix(&mut rng, 3, 5);
            let lhs = a.scale(&int(c)).mul(&b).unwrap();
            let rhs = a.mul(&b).unwrap().scale(&int(c));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
