//! The matrices `A`, `A*`, `S`, the dual idempotents `E*_i`, the eigenvalues
//! `theta_i`, `theta*_i`, and the primitive idempotents `E_i` of `A`.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmat::{int, qpow, ExactMatrix, ExactVector, Scalar, SpanBasis};
use crate::gfspace::gaussian_binomial;
use crate::poset::Geometry;
use crate::report::{expect_equal, expect_zero, CheckRecord, Outcome, Witness};

/// `A[y][z]` is 1 if `y` covers `z`, `q^dim y` if `z` covers `y`, else 0.
pub fn build_a(g: &Geometry) -> ExactMatrix {
    let n = g.len();
    let mut a = ExactMatrix::zeros(n, n);
    for y in 0..n {
        for &z in g.cover_down(y) {
            a.set(y, z, Scalar::one());
        }
        let up_weight = qpow(g.q(), g.dim(y) as i64);
        for &z in g.cover_up(y) {
            a.set(y, z, up_weight.clone());
        }
    }
    a
}

/// Diagonal, `A*[y][y] = q^(-dim y)`.
pub fn build_a_star(g: &Geometry) -> ExactMatrix {
    let d: Vec<Scalar> = (0..g.len()).map(|y| qpow(g.q(), -(g.dim(y) as i64))).collect();
    ExactMatrix::diagonal(&d)
}

/// Diagonal, `S[y][y] = (-1)^dim y`.
pub fn build_s(g: &Geometry) -> ExactMatrix {
    let d: Vec<Scalar> = (0..g.len()).map(|y| int(if g.dim(y).is_multiple_of(2) { 1 } else { -1 })).collect();
    ExactMatrix::diagonal(&d)
}

/// Coordinate projections onto the subconstituents `Gamma_i(0)`.
pub fn build_e_star(g: &Geometry) -> Vec<ExactMatrix> {
    (0..=g.n())
        .map(|i| {
            let d: Vec<Scalar> = (0..g.len()).map(|y| if g.dim(y) == i { Scalar::one() } else { Scalar::zero() }).collect();
            ExactMatrix::diagonal(&d)
        })
        .collect()
}

/// `theta_i = (q^(N-i) - q^i) / (q - 1)` and `theta*_i = q^(-i)`.
pub fn eigenvalues(n: usize, q: u64) -> (Vec<Scalar>, Vec<Scalar>) {
    let theta = (0..=n)
        .map(|i| (qpow(q, (n - i) as i64) - qpow(q, i as i64)) / int(q as i64 - 1))
        .collect();
    let theta_star = (0..=n).map(|i| qpow(q, -(i as i64))).collect();
    (theta, theta_star)
}

fn first_duplicate(xs: &[Scalar]) -> Option<(usize, usize)> {
    (0..xs.len()).flat_map(|i| (i + 1..xs.len()).map(move |j| (i, j))).find(|&(i, j)| xs[i] == xs[j])
}

/// Lagrange projectors `E_i = prod_{j != i} (A - theta_j I) / (theta_i - theta_j)`.
pub fn build_idempotents(a: &ExactMatrix, theta: &[Scalar]) -> Result<Vec<ExactMatrix>> {
    if !a.is_square() {
        return Err(Error::Dimension("idempotents of a non-square matrix".into()));
    }
    if let Some((i, j)) = first_duplicate(theta) {
        return Err(Error::DuplicateEigenvalue(i, j));
    }
    let n = a.rows();
    let shifted: Vec<ExactMatrix> = theta.iter().map(|t| a.add_identity(&-t)).collect::<Result<_>>()?;
    (0..theta.len())
        .into_par_iter()
        .map(|i| {
            let mut p = ExactMatrix::identity(n);
            let mut denom = Scalar::one();
            for (j, tj) in theta.iter().enumerate() {
                if j != i {
                    p = shifted[j].mul(&p)?;
                    denom *= &theta[i] - tj;
                }
            }
            Ok(p.scale(&denom.recip()))
        })
        .collect()
}

/// Everything built from one geometry.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub q: u64,
    pub n: usize,
    pub a: ExactMatrix,
    pub a_star: ExactMatrix,
    pub s: ExactMatrix,
    pub e_star: Vec<ExactMatrix>,
    pub e: Vec<ExactMatrix>,
    pub theta: Vec<Scalar>,
    pub theta_star: Vec<Scalar>,
}

impl OperatorSet {
    pub fn build(g: &Geometry) -> Result<Self> {
        Self::with_adjacency(g, build_a(g))
    }

    /// Uses the supplied matrix in place of `A` (fault injection, negative tests).
    pub fn with_adjacency(g: &Geometry, a: ExactMatrix) -> Result<Self> {
        let (theta, theta_star) = eigenvalues(g.n(), g.q());
        let e = build_idempotents(&a, &theta)?;
        Ok(OperatorSet {
            q: g.q(),
            n: g.n(),
            a,
            a_star: build_a_star(g),
            s: build_s(g),
            e_star: build_e_star(g),
            e,
            theta,
            theta_star,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn identity(&self) -> ExactMatrix {
        ExactMatrix::identity(self.dim())
    }

    /// `E_lo + ... + E_hi` (empty sum is zero).
    pub fn idempotent_sum(&self, lo: usize, hi: usize) -> ExactMatrix {
        sum_range(&self.e, lo, hi, self.dim())
    }

    /// `E*_lo + ... + E*_hi` (empty sum is zero).
    pub fn dual_idempotent_sum(&self, lo: usize, hi: usize) -> ExactMatrix {
        sum_range(&self.e_star, lo, hi, self.dim())
    }
}

fn sum_range(ms: &[ExactMatrix], lo: usize, hi: usize, dim: usize) -> ExactMatrix {
    let mut acc = ExactMatrix::zeros(dim, dim);
    if lo <= hi {
        for m in &ms[lo..=hi] {
            acc = acc.add(m).expect("same shape");
        }
    }
    acc
}

fn binom(n: usize, i: usize, q: u64) -> usize {
    gaussian_binomial(n as u32, i as i64, q) as usize
}

fn sum(ms: impl IntoIterator<Item = ExactMatrix>, dim: usize) -> ExactMatrix {
    ms.into_iter().fold(ExactMatrix::zeros(dim, dim), |acc, m| acc.add(&m).expect("same shape"))
}

fn all_pairs(n: usize, f: impl Fn(usize, usize) -> Outcome + Sync) -> Outcome {
    let pairs: Vec<(usize, usize)> = (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).collect();
    pairs.into_par_iter().map(|(i, j)| f(i, j).map_err(|w| w.with_ij(i, j))).collect::<Vec<_>>().into_iter().collect()
}

/// Dimension of the span of the given matrices, each flattened to a vector.
pub fn matrix_span(ms: &[ExactMatrix]) -> Result<SpanBasis> {
    let width = ms.first().map_or(0, |m| m.rows() * m.cols());
    let flat: Vec<ExactVector> = ms.iter().map(ExactMatrix::vectorize).collect();
    SpanBasis::from_vectors(width, &flat)
}

pub fn powers(m: &ExactMatrix, up_to: usize) -> Vec<ExactMatrix> {
    let mut out = vec![ExactMatrix::identity(m.rows())];
    for k in 1..=up_to {
        let next = m.mul(&out[k - 1]).expect("square");
        out.push(next);
    }
    out
}

/// `span{B^k : k >= 0}` has dimension exactly `n + 1` and equals `span(basis)`.
pub fn generated_algebra(b: &ExactMatrix, basis: &[ExactMatrix], n: usize, what: &str) -> Outcome {
    let pw = powers(b, n + 1);
    let low = matrix_span(&pw[..=n]).map_err(|e| Witness::detail(e.to_string()))?;
    if low.rank() != n + 1 {
        return Err(Witness::detail(format!("powers 0..={n} of {what} span dimension {}", low.rank())));
    }
    let all = matrix_span(&pw).map_err(|e| Witness::detail(e.to_string()))?;
    if all.rank() != n + 1 {
        return Err(Witness::detail(format!("power {} of {what} is not in the span of lower powers", n + 1)));
    }
    let target = matrix_span(basis).map_err(|e| Witness::detail(e.to_string()))?;
    if target.rank() != n + 1 || !target.contains_span(&low).map_err(|e| Witness::detail(e.to_string()))? {
        return Err(Witness::detail(format!("powers of {what} do not span the expected algebra")));
    }
    Ok(())
}

/// Construction invariants of `A*`, `S`, `E*_i` and the two eigenvalue lists.
pub fn verify_construction(g: &Geometry, ops: &OperatorSet) -> Vec<CheckRecord> {
    let n = ops.n;
    let dim = ops.dim();
    vec![
        CheckRecord::run(
            "operators.dual-idempotents",
            "sum_i E*_i = I and E*_i E*_j = delta_ij E*_i",
            || {
                expect_equal(&sum(ops.e_star.iter().cloned(), dim), &ops.identity())?;
                all_pairs(n, |i, j| {
                    let p = ops.e_star[i].mul(&ops.e_star[j]).expect("square");
                    if i == j {
                        expect_equal(&p, &ops.e_star[i])
                    } else {
                        expect_zero(&p)
                    }
                })
            },
        ),
        CheckRecord::run("operators.dual-adjacency-expansion", "A* = sum_i q^(-i) E*_i", || {
            let rhs = sum(ops.e_star.iter().enumerate().map(|(i, e)| e.scale(&qpow(ops.q, -(i as i64)))), dim);
            expect_equal(&ops.a_star, &rhs)
        }),
        CheckRecord::run("operators.sign-matrix", "S = sum_i (-1)^i E*_i and S^2 = I", || {
            let rhs = sum(ops.e_star.iter().enumerate().map(|(i, e)| e.scale(&int(if i % 2 == 0 { 1 } else { -1 }))), dim);
            expect_equal(&ops.s, &rhs)?;
            expect_equal(&ops.s.mul(&ops.s).expect("square"), &ops.identity())
        }),
        CheckRecord::run(
            "operators.eigenvalues",
            "theta_i distinct, theta*_i distinct, theta_{N-i} = -theta_i",
            || {
                if let Some((i, j)) = first_duplicate(&ops.theta) {
                    return Err(Witness::detail("theta repeats").with_ij(i, j));
                }
                if let Some((i, j)) = first_duplicate(&ops.theta_star) {
                    return Err(Witness::detail("theta* repeats").with_ij(i, j));
                }
                for i in 0..=n {
                    if ops.theta[n - i] != -&ops.theta[i] {
                        return Err(Witness::detail("theta_{N-i} != -theta_i").with_i(i));
                    }
                }
                Ok(())
            },
        ),
        CheckRecord::run("operators.adjacency-shape", "A has zero diagonal, trace 0, and the sparsity of the Hasse diagram", || {
            if !ops.a.trace().is_zero() {
                return Err(Witness::detail("nonzero trace"));
            }
            for y in 0..dim {
                for z in 0..dim {
                    let adjacent = g.cover_up(y).contains(&z) || g.cover_down(y).contains(&z);
                    if ops.a.get(y, z).is_zero() == adjacent {
                        return Err(Witness::entry(y, z, ops.a.get(y, z)));
                    }
                }
            }
            Ok(())
        }),
    ]
}

/// The Lagrange projectors resolve `A`: they sum to `I`, are orthogonal
/// idempotents, reproduce `A = sum theta_i E_i`, and have ranks `binom(N, i)_q`.
pub fn verify_spectrum(g: &Geometry, ops: &OperatorSet) -> Vec<CheckRecord> {
    let (n, q, dim) = (ops.n, ops.q, ops.dim());
    let mut out = vec![
        CheckRecord::run("spectral.idempotents-sum-to-identity", "sum_i E_i = I", || {
            expect_equal(&sum(ops.e.iter().cloned(), dim), &ops.identity())
        }),
        CheckRecord::run("spectral.idempotents-orthogonal", "E_i E_j = delta_ij E_i", || {
            all_pairs(n, |i, j| {
                let p = ops.e[i].mul(&ops.e[j]).expect("square");
                if i == j {
                    expect_equal(&p, &ops.e[i])
                } else {
                    expect_zero(&p)
                }
            })
        }),
        CheckRecord::run("spectral.decomposition", "A = sum_i theta_i E_i", || {
            let rhs = sum(ops.e.iter().zip(&ops.theta).map(|(e, t)| e.scale(t)), dim);
            expect_equal(&ops.a, &rhs)
        }),
        CheckRecord::run("spectral.eigenprojections", "A E_i = theta_i E_i = E_i A", || {
            (0..=n)
                .into_par_iter()
                .map(|i| {
                    let target = ops.e[i].scale(&ops.theta[i]);
                    expect_equal(&ops.a.mul(&ops.e[i]).expect("square"), &target).map_err(|w| w.with_i(i))?;
                    expect_equal(&ops.e[i].mul(&ops.a).expect("square"), &target).map_err(|w| w.with_i(i))
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect()
        }),
    ];
    out.push(CheckRecord::run("spectral.idempotent-ranks", "rank E_i = binom(N, i)_q, so A is diagonalizable", || {
        let ranks: Vec<usize> = ops.e.par_iter().map(ExactMatrix::rank).collect();
        for (i, &r) in ranks.iter().enumerate() {
            let want = binom(n, i, q);
            if r != want {
                return Err(Witness::detail(format!("rank {r}, expected {want}")).with_i(i));
            }
        }
        if ranks.iter().sum::<usize>() != g.len() {
            return Err(Witness::detail("ranks do not sum to |X|"));
        }
        Ok(())
    }));
    out.push(CheckRecord::run("spectral.idempotent-traces", "trace E_i = binom(N, i)_q", || {
        for (i, e) in ops.e.iter().enumerate() {
            let want = int(binom(n, i, q) as i64);
            if e.trace() != want {
                return Err(Witness::detail(format!("trace {}", e.trace())).with_i(i));
            }
        }
        Ok(())
    }));
    out.push(CheckRecord::run(
        "spectral.adjacency-algebra",
        "span{A^k} has dimension N+1 and equals span{E_i}",
        || generated_algebra(&ops.a, &ops.e, n, "A"),
    ));
    out
}

/// The operator identities relating `A`, `A*`, `S`, `E_i` and `E*_i`.
pub fn verify_operator_structure(ops: &OperatorSet) -> Vec<CheckRecord> {
    let n = ops.n;
    vec![
        CheckRecord::run("operators.adjacency-level-structure", "E*_i A E*_j = 0 unless |i - j| = 1", || {
            all_pairs(n, |i, j| {
                if i.abs_diff(j) == 1 {
                    return Ok(());
                }
                expect_zero(&ops.e_star[i].mul(&ops.a).and_then(|m| m.mul(&ops.e_star[j])).expect("square"))
            })
        }),
        CheckRecord::run("operators.sign-conjugation", "S A S^-1 = -A and S A* S^-1 = A*", || {
            let sas = ops.s.mul(&ops.a).and_then(|m| m.mul(&ops.s)).expect("square");
            expect_equal(&sas, &ops.a.scale(&int(-1))).map_err(|w| w.with_detail("S A S != -A"))?;
            let sas = ops.s.mul(&ops.a_star).and_then(|m| m.mul(&ops.s)).expect("square");
            expect_equal(&sas, &ops.a_star).map_err(|w| w.with_detail("S A* S != A*"))
        }),
        CheckRecord::run("operators.sign-reverses-idempotents", "S E_i S^-1 = E_{N-i} and S E*_i S^-1 = E*_i", || {
            (0..=n)
                .into_par_iter()
                .map(|i| {
                    let ses = ops.s.mul(&ops.e[i]).and_then(|m| m.mul(&ops.s)).expect("square");
                    expect_equal(&ses, &ops.e[n - i]).map_err(|w| w.with_i(i))?;
                    let ses = ops.s.mul(&ops.e_star[i]).and_then(|m| m.mul(&ops.s)).expect("square");
                    expect_equal(&ses, &ops.e_star[i]).map_err(|w| w.with_i(i))
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect()
        }),
        CheckRecord::run("operators.dual-adjacency-generates", "span{A*^k} has dimension N+1 and equals span{E*_i}", || {
            generated_algebra(&ops.a_star, &ops.e_star, n, "A*")
        }),
    ]
}
