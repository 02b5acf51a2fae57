use crate::error::{Error, Result};

use super::field::{FieldElement, GaloisField};
use super::qnum::subspace_count;

/// Default cap on the number of vertices of a geometry.
pub const DEFAULT_SIZE_LIMIT: usize = 5000;

/// A subspace of GF(q)^N, represented by its reduced row echelon basis.
///
/// RREF is canonical, so derived equality and hashing are equality of
/// subspaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    q: u64,
    ambient: usize,
    pivots: Vec<usize>,
    basis: Vec<FieldElement>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.basis[r * self.ambient..(r + 1) * self.ambient]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[FieldElement]> {
        self.basis.chunks(self.ambient.max(1)).take(self.dim())
    }

    /// Builds the subspace spanned by `vectors` (each of length `ambient`).
    pub fn span(field: &GaloisField, ambient: usize, vectors: &[Vec<FieldElement>]) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient) {
            return Err(Error::Dimension(format!("vectors must have length {ambient}")));
        }
        let mut rows: Vec<Vec<FieldElement>> = vectors.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ambient {
            let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
                continue;
            };
            rows.swap(r, k);
            let inv = field.inv(rows[r][c]).expect("nonzero pivot");
            for x in rows[r].iter_mut() {
                *x = field.mul(*x, inv);
            }
            for k in 0..rows.len() {
                if k != r && !rows[k][c].is_zero() {
                    let f = rows[k][c];
                    let pivot_row = rows[r].clone();
                    for (x, &p) in rows[k].iter_mut().zip(&pivot_row) {
                        *x = field.sub(*x, field.mul(f, p));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        Ok(Subspace { q: field.q(), ambient, pivots, basis: rows.concat() })
    }

    fn same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.q != other.q || self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
            return;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// All subspaces of GF(q)^n in canonical order: ascending dimension, then
/// lexicographic pivot sets, then lexicographic free entries (row-major,
/// first free position most significant).
pub fn enumerate_subspaces(field: &GaloisField, n: usize, size_limit: usize) -> Result<Vec<Subspace>> {
    if n == 0 {
        return Err(Error::EmptyAmbient);
    }
    let q = field.q();
    let total = subspace_count(n as u32, q);
    if total > size_limit as u128 {
        return Err(Error::SizeLimitExceeded { total, limit: size_limit });
    }
    let mut out = Vec::with_capacity(total as usize);
    for k in 0..=n {
        for_each_combination(n, k, |pivots| {
            // positions (row, col) that are free in an RREF with these pivots
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &p)| ((p + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
                .collect();
            let mut template = vec![FieldElement::ZERO; k * n];
            for (r, &p) in pivots.iter().enumerate() {
                template[r * n + p] = FieldElement::ONE;
            }
            let mut digits = vec![0u32; free.len()];
            loop {
                let mut basis = template.clone();
                for (&(r, c), &d) in free.iter().zip(&digits) {
                    basis[r * n + c] = FieldElement(d);
                }
                out.push(Subspace { q, ambient: n, pivots: pivots.to_vec(), basis });
                // odometer, last position least significant
                let Some(pos) = (0..digits.len()).rev().find(|&j| (digits[j] as u64) < q - 1) else {
                    break;
                };
                digits[pos] += 1;
                for d in digits[pos + 1..].iter_mut() {
                    *d = 0;
                }
            }
        });
    }
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}

/// `y <= z`: every basis row of `y` reduces to zero against the RREF of `z`.
pub fn contains(field: &GaloisField, z: &Subspace, y: &Subspace) -> Result<bool> {
    z.same_ambient(y)?;
    if y.dim() > z.dim() {
        return Ok(false);
    }
    Ok(y.rows().all(|row| {
        let mut v = row.to_vec();
        for (r, &p) in z.pivots.iter().enumerate() {
            let f = v[p];
            if f.is_zero() {
                continue;
            }
            for (x, &zr) in v.iter_mut().zip(z.row(r)) {
                *x = field.sub(*x, field.mul(f, zr));
            }
        }
        v.iter().all(|x| x.is_zero())
    }))
}

/// `z` covers `y`: `y <= z` and `dim z - dim y = 1`.
pub fn covers(field: &GaloisField, z: &Subspace, y: &Subspace) -> Result<bool> {
    z.same_ambient(y)?;
    Ok(z.dim() == y.dim() + 1 && contains(field, z, y)?)
}
