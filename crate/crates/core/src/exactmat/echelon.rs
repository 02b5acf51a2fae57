//! Fraction-free row echelon forms over the integers.
//!
//! Rational vectors are scaled to primitive integer vectors before they enter
//! an echelon basis. Elimination of entry `c` of `v` by a stored row `r` is
//! `v <- (r[c]/g) v - (v[c]/g) r` with `g = gcd(r[c], v[c])`, followed by
//! removal of the content of `v`. Everything first runs on `i128` with checked
//! arithmetic and restarts on `BigInt` after an overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::intops::primitive_integer_vector;
use super::{ExactMatrix, ExactVector, Scalar};
use crate::error::{Error, Result};

pub(crate) trait Ring: Clone + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn neg(&self) -> Option<Self>;
    /// `a * x - b * y`
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
}

impl Ring for i128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
}

/// Divides `v` by the gcd of its entries and makes its first nonzero entry positive.
fn make_primitive<T: Ring>(v: &mut [T]) -> Option<()> {
    let mut g = T::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_unit() {
                break;
            }
        }
    }
    if g.is_zero() {
        return Some(());
    }
    let lead_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if lead_negative {
        g = g.neg()?;
    }
    if !g.is_unit() || lead_negative {
        for x in v.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
    Some(())
}

#[derive(Clone)]
struct Row<T> {
    pivot: usize,
    entries: Vec<T>,
}

/// Eliminates column `row.pivot` of `v` using `row`.
fn eliminate<T: Ring>(v: &mut [T], row: &Row<T>) -> Option<()> {
    let c = row.pivot;
    if v[c].is_zero() {
        return Some(());
    }
    let g = row.entries[c].gcd(&v[c]);
    let a = row.entries[c].div_exact(&g);
    let b = v[c].div_exact(&g);
    let a_is_one = a.is_unit() && !a.is_negative();
    for (x, r) in v.iter_mut().zip(&row.entries) {
        if r.is_zero() {
            if !a_is_one && !x.is_zero() {
                *x = x.mul(&a)?;
            }
        } else {
            *x = T::mul_sub(&a, x, &b, r)?;
        }
    }
    if !a_is_one {
        make_primitive(v)?;
    }
    Some(())
}

#[derive(Clone)]
struct Echelon<T> {
    width: usize,
    /// sorted by pivot column
    rows: Vec<Row<T>>,
}

impl<T: Ring> Echelon<T> {
    fn new(width: usize) -> Self {
        Echelon { width, rows: Vec::new() }
    }

    fn reduce(&self, mut v: Vec<T>) -> Option<Vec<T>> {
        for row in &self.rows {
            eliminate(&mut v, row)?;
        }
        Some(v)
    }

    /// Returns whether `v` was independent of the stored rows.
    fn insert(&mut self, v: Vec<T>) -> Option<bool> {
        let mut v = self.reduce(v)?;
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return Some(false);
        };
        make_primitive(&mut v)?;
        let at = self.rows.partition_point(|r| r.pivot < pivot);
        self.rows.insert(at, Row { pivot, entries: v });
        Some(true)
    }

    /// Clears every pivot column above its pivot row, giving a fraction-free RREF.
    fn back_substitute(&mut self) -> Option<()> {
        for k in (0..self.rows.len()).rev() {
            let (above, below) = self.rows.split_at_mut(k);
            let row = &below[0];
            for r in above.iter_mut() {
                eliminate(&mut r.entries, row)?;
            }
        }
        Some(())
    }
}

fn convert(e: &Echelon<i128>) -> Echelon<BigInt> {
    Echelon {
        width: e.width,
        rows: e
            .rows
            .iter()
            .map(|r| Row { pivot: r.pivot, entries: r.entries.iter().map(|&x| BigInt::from(x)).collect() })
            .collect(),
    }
}

fn small(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(|x| x.to_i128()).collect()
}

#[derive(Clone)]
enum Engine {
    Small(Echelon<i128>),
    Big(Echelon<BigInt>),
}

/// An incrementally built basis of a subspace of Q^width, kept in
/// fraction-free row echelon form.
#[derive(Clone)]
pub struct SpanBasis {
    engine: Engine,
}

impl SpanBasis {
    pub fn new(width: usize) -> Self {
        SpanBasis { engine: Engine::Small(Echelon::new(width)) }
    }

    pub fn from_vectors<'a>(width: usize, vectors: impl IntoIterator<Item = &'a ExactVector>) -> Result<Self> {
        let mut s = SpanBasis::new(width);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn width(&self) -> usize {
        match &self.engine {
            Engine::Small(e) => e.width,
            Engine::Big(e) => e.width,
        }
    }

    pub fn rank(&self) -> usize {
        match &self.engine {
            Engine::Small(e) => e.rows.len(),
            Engine::Big(e) => e.rows.len(),
        }
    }

    pub fn pivots(&self) -> Vec<usize> {
        match &self.engine {
            Engine::Small(e) => e.rows.iter().map(|r| r.pivot).collect(),
            Engine::Big(e) => e.rows.iter().map(|r| r.pivot).collect(),
        }
    }

    fn check_len(&self, v: &ExactVector) -> Result<()> {
        if v.len() != self.width() {
            return Err(Error::Dimension(format!("vector of length {} in a span of width {}", v.len(), self.width())));
        }
        Ok(())
    }

    fn promote(&mut self) {
        if let Engine::Small(e) = &self.engine {
            self.engine = Engine::Big(convert(e));
        }
    }

    /// Adds `v`; returns whether the rank went up.
    pub fn insert(&mut self, v: &ExactVector) -> Result<bool> {
        self.check_len(v)?;
        Ok(self.insert_integer(primitive_integer_vector(v.entries())))
    }

    pub(crate) fn insert_integer(&mut self, v: Vec<BigInt>) -> bool {
        if let Engine::Small(e) = &mut self.engine {
            // `insert` only mutates after the fallible reduction succeeded
            if let Some(grew) = small(&v).and_then(|sv| e.insert(sv)) {
                return grew;
            }
            self.promote();
        }
        match &mut self.engine {
            Engine::Big(e) => e.insert(v).expect("BigInt arithmetic does not overflow"),
            Engine::Small(_) => unreachable!(),
        }
    }

    pub fn contains(&self, v: &ExactVector) -> Result<bool> {
        self.check_len(v)?;
        let v = primitive_integer_vector(v.entries());
        if let Engine::Small(e) = &self.engine {
            if let Some(r) = small(&v).and_then(|sv| e.reduce(sv)) {
                return Ok(r.iter().all(|x| *x == 0));
            }
            return Ok(convert(e).reduce(v).expect("no overflow").iter().all(Ring::is_zero));
        }
        match &self.engine {
            Engine::Big(e) => Ok(e.reduce(v).expect("no overflow").iter().all(Ring::is_zero)),
            Engine::Small(_) => unreachable!(),
        }
    }

    /// Every vector of `other` lies in this span.
    pub fn contains_span(&self, other: &SpanBasis) -> Result<bool> {
        for v in other.basis_vectors() {
            if !self.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The stored (integer, primitive) echelon rows as rational vectors.
    pub fn basis_vectors(&self) -> Vec<ExactVector> {
        match &self.engine {
            Engine::Small(e) => e
                .rows
                .iter()
                .map(|r| ExactVector::new(r.entries.iter().map(|&x| Scalar::from_integer(x.into())).collect()))
                .collect(),
            Engine::Big(e) => e
                .rows
                .iter()
                .map(|r| ExactVector::new(r.entries.iter().cloned().map(Scalar::from_integer).collect()))
                .collect(),
        }
    }

    /// Reduced row echelon form: rows normalized to pivot 1, pivot columns cleared.
    pub fn reduced_rows(&self) -> Vec<(usize, ExactVector)> {
        let big = match &self.engine {
            Engine::Small(e) => {
                let mut t = e.clone();
                if t.back_substitute().is_some() {
                    return t
                        .rows
                        .iter()
                        .map(|r| {
                            let p = BigInt::from(r.entries[r.pivot]);
                            let v = r.entries.iter().map(|&x| Scalar::new(x.into(), p.clone())).collect();
                            (r.pivot, ExactVector::new(v))
                        })
                        .collect();
                }
                convert(e)
            }
            Engine::Big(e) => e.clone(),
        };
        let mut t = big;
        t.back_substitute().expect("no overflow");
        t.rows
            .iter()
            .map(|r| {
                let p = &r.entries[r.pivot];
                (r.pivot, ExactVector::new(r.entries.iter().map(|x| Scalar::new(x.clone(), p.clone())).collect()))
            })
            .collect()
    }
}

/// Result of [`ExactMatrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: ExactMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub(crate) fn rref(m: &ExactMatrix) -> Rref {
    let mut basis = SpanBasis::new(m.cols());
    for i in 0..m.rows() {
        basis.insert_integer(primitive_integer_vector(m.row(i)));
    }
    let reduced = basis.reduced_rows();
    let rank = reduced.len();
    let mut out = ExactMatrix::zeros(m.rows(), m.cols());
    for (i, (_, v)) in reduced.iter().enumerate() {
        for (j, x) in v.entries().iter().enumerate() {
            out.set(i, j, x.clone());
        }
    }
    Rref { matrix: out, rank, pivots: reduced.into_iter().map(|(p, _)| p).collect() }
}

/// Right null space basis, one vector per free column `f` (ascending), with
/// entry 1 at `f`, zero at the other free columns.
pub(crate) fn kernel_basis(m: &ExactMatrix) -> Vec<ExactVector> {
    let r = rref(m);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !r.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); cols];
            v[f] = Scalar::one();
            for (i, &p) in r.pivots.iter().enumerate() {
                v[p] = -r.matrix.get(i, f).clone();
            }
            ExactVector::new(v)
        })
        .collect()
}

fn common_width(u: &[ExactVector], w: &[ExactVector]) -> Result<usize> {
    let mut lens = u.iter().chain(w).map(|v| v.len());
    let Some(n) = lens.next() else {
        return Ok(0);
    };
    if lens.any(|l| l != n) {
        return Err(Error::Dimension("vectors of unequal length".into()));
    }
    Ok(n)
}

/// `span(u) == span(w)`: both ranks agree with the rank of the union.
pub fn span_equal(u: &[ExactVector], w: &[ExactVector]) -> Result<bool> {
    let n = common_width(u, w)?;
    let su = SpanBasis::from_vectors(n, u)?;
    let sw = SpanBasis::from_vectors(n, w)?;
    if su.rank() != sw.rank() {
        return Ok(false);
    }
    let mut union = su.clone();
    for v in w {
        if union.insert(v)? {
            return Ok(false);
        }
    }
    Ok(union.rank() == su.rank())
}

/// `v` lies in `span(u)`.
pub fn span_contains(u: &[ExactVector], v: &ExactVector) -> Result<bool> {
    let n = common_width(u, std::slice::from_ref(v))?;
    SpanBasis::from_vectors(n, u)?.contains(v)
}
