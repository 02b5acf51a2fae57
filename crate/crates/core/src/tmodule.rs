//! Decomposition of the standard module into irreducible T-modules via the
//! kernel of the lowering map and raising orbits, with the Leonard data of
//! each module.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{format_scalar, int, qpow, ExactMatrix, ExactVector, Scalar, SpanBasis};
use crate::gfspace::{gaussian_binomial, q_integer};
use crate::operators::OperatorSet;
use crate::poset::Geometry;
use crate::report::{expect_equal, CheckRecord, Outcome, Witness};

/// `L = sum_i E*_(i-1) A E*_i` and `R = sum_i E*_(i+1) A E*_i`.
pub fn lowering_raising(ops: &OperatorSet) -> (ExactMatrix, ExactMatrix) {
    let n = ops.n;
    let size = ops.dim();
    let mut l = ExactMatrix::zeros(size, size);
    let mut r = ExactMatrix::zeros(size, size);
    let part = |to: usize, from: usize| ops.e_star[to].mul(&ops.a).and_then(|m| m.mul(&ops.e_star[from])).expect("square");
    for i in 0..=n {
        if i > 0 {
            l = l.add(&part(i - 1, i)).expect("same shape");
        }
        if i < n {
            r = r.add(&part(i + 1, i)).expect("same shape");
        }
    }
    (l, r)
}

/// One irreducible module, as the raising orbit `v, Rv, ..., R^d v` of a
/// lowering-kernel vector `v` on level `r`.
#[derive(Debug, Clone)]
pub struct IrreducibleModule {
    pub endpoint: usize,
    pub diameter: usize,
    /// `basis[k]` lies in `E*_(r+k) V`
    pub basis: Vec<ExactVector>,
}

impl IrreducibleModule {
    pub fn dual_endpoint(&self) -> usize {
        self.endpoint
    }

    pub fn dual_diameter(&self) -> usize {
        self.diameter
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionSummary {
    pub n: usize,
    pub modules: Vec<IrreducibleModule>,
    /// `multiplicities[r]` = number of modules with endpoint `r`
    pub multiplicities: Vec<usize>,
}

impl DecompositionSummary {
    pub fn total_dimension(&self) -> usize {
        self.modules.iter().map(IrreducibleModule::dim).sum()
    }
}

/// `mu_0 = 1`, `mu_r = binom(N, r)_q - binom(N, r-1)_q`.
pub fn expected_multiplicity(n: usize, r: usize, q: u64) -> usize {
    let b = |k: i64| gaussian_binomial(n as u32, k, q);
    (b(r as i64) - b(r as i64 - 1)) as usize
}

/// Kernel of `L` on each level `r <= N/2`, then raising orbits of length `N - 2r + 1`.
pub fn decompose(g: &Geometry, ops: &OperatorSet) -> Result<DecompositionSummary> {
    let n = g.n();
    let (l, r_mat) = lowering_raising(ops);
    let mut modules = Vec::new();
    let mut multiplicities = Vec::new();
    for r in 0..=n / 2 {
        let level: Vec<usize> = g.level(r).collect();
        let restricted = ExactMatrix::from_fn(g.len(), level.len(), |row, c| l.get(row, level[c]).clone());
        let kernel: Vec<ExactVector> = restricted
            .kernel_basis()
            .into_iter()
            .map(|w| {
                let mut v = ExactVector::zeros(g.len());
                for (c, x) in w.entries().iter().enumerate() {
                    v.set(level[c], x.clone());
                }
                v
            })
            .collect();
        multiplicities.push(kernel.len());
        if kernel.is_empty() {
            continue;
        }
        let d = n - 2 * r;
        let mut orbits: Vec<Vec<ExactVector>> = kernel.iter().map(|v| vec![v.clone()]).collect();
        let mut current = kernel;
        for _ in 0..d {
            current = r_mat.mul_vecs(&current)?;
            for (orbit, v) in orbits.iter_mut().zip(&current) {
                orbit.push(v.clone());
            }
        }
        modules.extend(orbits.into_iter().map(|basis| IrreducibleModule { endpoint: r, diameter: d, basis }));
    }
    Ok(DecompositionSummary { n, modules, multiplicities })
}

/// Coordinates of `v` in the module basis, whose vectors sit on distinct levels.
/// `None` if `v` is outside the span.
pub fn coordinates(g: &Geometry, m: &IrreducibleModule, v: &ExactVector) -> Option<Vec<Scalar>> {
    let mut coords = vec![Scalar::zero(); m.dim()];
    for y in v.support() {
        let k = g.dim(y).checked_sub(m.endpoint)?;
        if k >= m.dim() {
            return None;
        }
        if coords[k].is_zero() {
            let b = m.basis[k].get(y);
            if b.is_zero() {
                return None;
            }
            coords[k] = v.get(y) / b;
        }
    }
    let mut rebuilt = ExactVector::zeros(v.len());
    for (c, b) in coords.iter().zip(&m.basis) {
        rebuilt.add_scaled(c, b).ok()?;
    }
    (rebuilt == *v).then_some(coords)
}

/// The matrix of `op` restricted to the module, in the module basis.
pub fn restrict(g: &Geometry, m: &IrreducibleModule, op: &ExactMatrix) -> Option<ExactMatrix> {
    let images = op.mul_vecs(&m.basis).ok()?;
    let cols: Option<Vec<ExactVector>> = images.iter().map(|v| coordinates(g, m, v).map(ExactVector::new)).collect();
    ExactMatrix::from_columns(m.dim(), &cols?).ok()
}

/// The parameter list of a module with endpoint `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeonardParameters {
    pub d: usize,
    pub h: Scalar,
    pub h_star: Scalar,
    pub s: Scalar,
    pub theta0: Scalar,
    pub theta0_star: Scalar,
}

impl LeonardParameters {
    /// `theta_k = theta_0 + h (1 - q^k)(1 - s q^(k+1)) q^-k`.
    pub fn eigenvalue(&self, q: u64, k: usize) -> Scalar {
        let qk = qpow(q, k as i64);
        &self.theta0 + &self.h * (int(1) - &qk) * (int(1) - &self.s * qpow(q, k as i64 + 1)) / &qk
    }

    /// `theta*_k = theta*_0 + h* (1 - q^k) q^-k`.
    pub fn dual_eigenvalue(&self, q: u64, k: usize) -> Scalar {
        let qk = qpow(q, k as i64);
        &self.theta0_star + &self.h_star * (int(1) - &qk) / &qk
    }
}

/// `d = N - 2r`, `h = q^(N-r)/(q-1)`, `h* = q^-r`, `s = -q^(2r-N-1)`,
/// `theta_0 = q^r [N-2r]_q`, `theta*_0 = q^-r`.
pub fn leonard_parameters(r: usize, q: u64, n: usize) -> LeonardParameters {
    let d = n - 2 * r;
    LeonardParameters {
        d,
        h: qpow(q, (n - r) as i64) / int(q as i64 - 1),
        h_star: qpow(q, -(r as i64)),
        s: -qpow(q, 2 * r as i64 - n as i64 - 1),
        theta0: qpow(q, r as i64) * Scalar::from_integer((q_integer(d as u32, q) as i64).into()),
        theta0_star: qpow(q, -(r as i64)),
    }
}

fn wit(e: Error) -> Witness {
    Witness::detail(e.to_string())
}

fn module_witness(idx: usize, m: &IrreducibleModule, msg: impl Into<String>) -> Witness {
    Witness::detail(format!("module {idx} (endpoint {}): {}", m.endpoint, msg.into())).with_i(m.endpoint)
}

/// `L + R = A`, and `L` kills the zero vertex.
pub fn verify_lowering_raising(ops: &OperatorSet, l: &ExactMatrix, r: &ExactMatrix) -> Outcome {
    expect_equal(&l.add(r).map_err(wit)?, &ops.a)?;
    let col = l.column(0);
    if !col.is_zero() {
        return Err(Witness::detail("L does not annihilate the zero vertex"));
    }
    Ok(())
}

/// Kernel dimensions against the closed form, and the dimension count.
pub fn verify_multiplicities(g: &Geometry, s: &DecompositionSummary) -> Outcome {
    let (n, q) = (g.n(), g.q());
    for (r, &mu) in s.multiplicities.iter().enumerate() {
        let want = expected_multiplicity(n, r, q);
        if mu != want {
            return Err(Witness::detail(format!("mu_{r} = {mu}, expected {want}")).with_i(r));
        }
    }
    let total: usize = s.multiplicities.iter().enumerate().map(|(r, mu)| mu * (n - 2 * r + 1)).sum();
    if total != g.len() || s.total_dimension() != g.len() {
        return Err(Witness::detail(format!("module dimensions sum to {total}, |X| = {}", g.len())));
    }
    Ok(())
}

/// `R^k v != 0` for `k <= d` and `R^(d+1) v = 0`.
pub fn verify_orbits(r_mat: &ExactMatrix, s: &DecompositionSummary) -> Outcome {
    s.modules
        .par_iter()
        .enumerate()
        .map(|(idx, m)| {
            if let Some(k) = m.basis.iter().position(ExactVector::is_zero) {
                return Err(module_witness(idx, m, format!("R^{k} v vanishes")));
            }
            let next = r_mat.mul_vec(m.basis.last().expect("nonempty")).map_err(wit)?;
            if !next.is_zero() {
                return Err(module_witness(idx, m, "orbit does not terminate"));
            }
            Ok(())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// The union of all module bases is a basis of V.
pub fn verify_direct_sum(g: &Geometry, s: &DecompositionSummary) -> Outcome {
    let all: Vec<&ExactVector> = s.modules.iter().flat_map(|m| &m.basis).collect();
    let span = SpanBasis::from_vectors(g.len(), all.iter().copied()).map_err(wit)?;
    if span.rank() != g.len() || all.len() != g.len() {
        return Err(Witness::detail(format!("{} vectors of rank {}", all.len(), span.rank())));
    }
    Ok(())
}

/// Each module is invariant under `A` and `A*`.
pub fn verify_invariance(g: &Geometry, ops: &OperatorSet, s: &DecompositionSummary) -> Outcome {
    s.modules
        .par_iter()
        .enumerate()
        .map(|(idx, m)| {
            if restrict(g, m, &ops.a).is_none() {
                return Err(module_witness(idx, m, "not A-invariant"));
            }
            if restrict(g, m, &ops.a_star).is_none() {
                return Err(module_witness(idx, m, "not A*-invariant"));
            }
            Ok(())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// `dim E*_iW = dim E_iW = 1` for `r <= i <= N-r` and 0 otherwise.
pub fn verify_eigenblocks(ops: &OperatorSet, s: &DecompositionSummary) -> Outcome {
    let n = ops.n;
    let all: Vec<ExactVector> = s.modules.iter().flat_map(|m| m.basis.iter().cloned()).collect();
    let mut offsets = Vec::with_capacity(s.modules.len());
    let mut at = 0;
    for m in &s.modules {
        offsets.push(at);
        at += m.dim();
    }
    let projections: Vec<Vec<ExactVector>> = (0..=n)
        .into_par_iter()
        .map(|i| ops.e[i].mul_vecs(&all))
        .collect::<Result<_>>()
        .map_err(wit)?;
    let dual: Vec<Vec<ExactVector>> = (0..=n)
        .into_par_iter()
        .map(|i| ops.e_star[i].mul_vecs(&all))
        .collect::<Result<_>>()
        .map_err(wit)?;
    s.modules
        .par_iter()
        .enumerate()
        .map(|(idx, m)| {
            let cols = offsets[idx]..offsets[idx] + m.dim();
            for i in 0..=n {
                let want = usize::from(m.endpoint <= i && i <= n - m.endpoint);
                for (name, proj) in [("E", &projections), ("E*", &dual)] {
                    let rank = SpanBasis::from_vectors(ops.dim(), &proj[i][cols.clone()]).map_err(wit)?.rank();
                    if rank != want {
                        return Err(module_witness(idx, m, format!("dim {name}_{i} W = {rank}, expected {want}")));
                    }
                }
            }
            Ok(())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// The tridiagonal-pair and eigenstructure checks on one module.
pub fn verify_tridiagonal_pair(g: &Geometry, ops: &OperatorSet, m: &IrreducibleModule) -> std::result::Result<(), String> {
    let (n, q, r, d) = (ops.n, ops.q, m.endpoint, m.diameter);
    let b = restrict(g, m, &ops.a).ok_or("not A-invariant")?;
    let bs = restrict(g, m, &ops.a_star).ok_or("not A*-invariant")?;
    for j in 0..=d {
        for k in 0..=d {
            let x = b.get(j, k);
            if j.abs_diff(k) > 1 && !x.is_zero() {
                return Err(format!("A|W entry ({j}, {k}) outside the tridiagonal band"));
            }
            if j.abs_diff(k) == 1 && x.is_zero() {
                return Err(format!("A|W is reducible at ({j}, {k})"));
            }
            if j == k && !x.is_zero() {
                return Err(format!("A|W has nonzero diagonal at {j}, so the pair is not bipartite"));
            }
        }
    }
    let dual_diag: Vec<Scalar> = (0..=d).map(|k| qpow(q, -((r + k) as i64))).collect();
    if bs != ExactMatrix::diagonal(&dual_diag) {
        return Err("A*|W is not diag(q^-r, ..., q^-(N-r))".into());
    }
    // distinct eigenvalues: the minimal polynomial is the full product, of degree d + 1
    let product = |skip: Option<usize>| {
        (r..=n - r).filter(|&i| Some(i) != skip).fold(ExactMatrix::identity(d + 1), |acc, i| {
            b.add_identity(&-&ops.theta[i]).and_then(|f| f.mul(&acc)).expect("square")
        })
    };
    if !product(None).is_zero() {
        return Err("prod (A|W - theta_i) over r <= i <= N-r is nonzero".into());
    }
    if let Some(i) = (r..=n - r).find(|&i| product(Some(i)).is_zero()) {
        return Err(format!("a proper sub-product omitting theta_{i} already vanishes"));
    }
    let nonzero_e: Vec<usize> = (0..=n).filter(|&i| ops.e[i].mul_vecs(&m.basis).map(|v| v.iter().any(|x| !x.is_zero())).unwrap_or(false)).collect();
    let nonzero_es: Vec<usize> = (0..=n).filter(|&i| ops.e_star[i].mul_vecs(&m.basis).map(|v| v.iter().any(|x| !x.is_zero())).unwrap_or(false)).collect();
    if nonzero_e != (r..=n - r).collect::<Vec<_>>() {
        return Err(format!("E_iW nonzero for i in {nonzero_e:?}"));
    }
    if nonzero_e.len() != nonzero_es.len() {
        return Err("diameter differs from dual diameter".into());
    }
    Ok(())
}

pub fn verify_all_tridiagonal_pairs(g: &Geometry, ops: &OperatorSet, s: &DecompositionSummary) -> Outcome {
    s.modules
        .par_iter()
        .enumerate()
        .map(|(idx, m)| verify_tridiagonal_pair(g, ops, m).map_err(|e| module_witness(idx, m, e)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// The normalization-independent data of a module: eigenvalues of `A|W` in
/// ladder order, diagonal of `A*|W`, and the products of sub- and super-diagonal entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleInvariants {
    pub eigenvalues: Vec<Scalar>,
    pub dual_eigenvalues: Vec<Scalar>,
    pub off_diagonal_products: Vec<Scalar>,
}

pub fn module_invariants(g: &Geometry, ops: &OperatorSet, m: &IrreducibleModule) -> Option<ModuleInvariants> {
    let b = restrict(g, m, &ops.a)?;
    let bs = restrict(g, m, &ops.a_star)?;
    let (r, d) = (m.endpoint, m.diameter);
    Some(ModuleInvariants {
        eigenvalues: (r..=ops.n - r).map(|i| ops.theta[i].clone()).collect(),
        dual_eigenvalues: (0..=d).map(|k| bs.get(k, k).clone()).collect(),
        off_diagonal_products: (1..=d).map(|k| b.get(k, k - 1) * b.get(k - 1, k)).collect(),
    })
}

/// Modules with the same endpoint have the same invariants.
pub fn verify_isomorphism_classes(g: &Geometry, ops: &OperatorSet, s: &DecompositionSummary) -> Outcome {
    let invariants: Vec<Option<ModuleInvariants>> = s.modules.par_iter().map(|m| module_invariants(g, ops, m)).collect();
    for r in 0..=ops.n / 2 {
        let mut reference: Option<(usize, &ModuleInvariants)> = None;
        for (idx, m) in s.modules.iter().enumerate().filter(|(_, m)| m.endpoint == r) {
            let inv = invariants[idx].as_ref().ok_or_else(|| module_witness(idx, m, "not invariant"))?;
            match reference {
                None => reference = Some((idx, inv)),
                Some((first, want)) if want != inv => {
                    return Err(module_witness(idx, m, format!("data differs from module {first}")));
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

/// The printed parameters reproduce `theta_r` and `theta*_r`, and the
/// parametric eigenvalue formulas reproduce each module's ladders.
pub fn verify_leonard_parameters(g: &Geometry, ops: &OperatorSet, s: &DecompositionSummary) -> Outcome {
    let (n, q) = (ops.n, ops.q);
    for r in 0..=n / 2 {
        let p = leonard_parameters(r, q, n);
        if p.d != n - 2 * r {
            return Err(Witness::detail("diameter").with_i(r));
        }
        if p.theta0 != ops.theta[r] {
            return Err(Witness::detail(format!("theta_0 = {}, theta_r = {}", format_scalar(&p.theta0), format_scalar(&ops.theta[r]))).with_i(r));
        }
        if p.theta0_star != ops.theta_star[r] || p.h_star != p.theta0_star {
            return Err(Witness::detail("theta*_0 differs from theta*_r").with_i(r));
        }
        for k in 0..=p.d {
            if p.eigenvalue(q, k) != ops.theta[r + k] {
                return Err(Witness::detail(format!("parametric theta_{k} differs")).with_i(r));
            }
            if p.dual_eigenvalue(q, k) != ops.theta_star[r + k] {
                return Err(Witness::detail(format!("parametric theta*_{k} differs")).with_i(r));
            }
        }
    }
    for (idx, m) in s.modules.iter().enumerate() {
        let p = leonard_parameters(m.endpoint, q, n);
        let inv = module_invariants(g, ops, m).ok_or_else(|| module_witness(idx, m, "not invariant"))?;
        let dual: Vec<Scalar> = (0..=p.d).map(|k| p.dual_eigenvalue(q, k)).collect();
        if inv.dual_eigenvalues != dual {
            return Err(module_witness(idx, m, "A*|W diagonal differs from the parametric dual eigenvalues"));
        }
    }
    Ok(())
}

/// Serializable per-endpoint summary for the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleClass {
    pub endpoint: usize,
    pub diameter: usize,
    pub multiplicity: usize,
    pub eigenvalues: Vec<String>,
    pub dual_eigenvalues: Vec<String>,
    pub off_diagonal_products: Vec<String>,
    pub leonard: LeonardEcho,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeonardEcho {
    pub d: usize,
    pub h: String,
    pub h_star: String,
    pub s: String,
    pub theta0: String,
    pub theta0_star: String,
}

impl From<&LeonardParameters> for LeonardEcho {
    fn from(p: &LeonardParameters) -> Self {
        LeonardEcho {
            d: p.d,
            h: format_scalar(&p.h),
            h_star: format_scalar(&p.h_star),
            s: format_scalar(&p.s),
            theta0: format_scalar(&p.theta0),
            theta0_star: format_scalar(&p.theta0_star),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionEcho {
    pub multiplicities: Vec<usize>,
    pub total_dimension: usize,
    pub classes: Vec<ModuleClass>,
}

pub fn summarize(g: &Geometry, ops: &OperatorSet, s: &DecompositionSummary) -> DecompositionEcho {
    let fmt = |xs: &[Scalar]| xs.iter().map(format_scalar).collect::<Vec<_>>();
    let classes = (0..=ops.n / 2)
        .filter_map(|r| {
            let m = s.modules.iter().find(|m| m.endpoint == r)?;
            let inv = module_invariants(g, ops, m)?;
            Some(ModuleClass {
                endpoint: r,
                diameter: m.diameter,
                multiplicity: s.multiplicities[r],
                eigenvalues: fmt(&inv.eigenvalues),
                dual_eigenvalues: fmt(&inv.dual_eigenvalues),
                off_diagonal_products: fmt(&inv.off_diagonal_products),
                leonard: (&leonard_parameters(r, ops.q, ops.n)).into(),
            })
        })
        .collect();
    DecompositionEcho { multiplicities: s.multiplicities.clone(), total_dimension: s.total_dimension(), classes }
}

/// All module records. The decomposition is passed in so callers can summarize it.
pub fn verify_modules(g: &Geometry, ops: &OperatorSet, s: &DecompositionSummary, l: &ExactMatrix, r: &ExactMatrix) -> Vec<CheckRecord> {
    vec![
        CheckRecord::run("modules.lowering-raising", "L + R = A with L and R the level-lowering and level-raising parts of A", || {
            verify_lowering_raising(ops, l, r)
        }),
        CheckRecord::run(
            "modules.multiplicities",
            "mu_0 = 1, mu_r = binom(N,r)_q - binom(N,r-1)_q, and sum mu_r (N-2r+1) = |X|",
            || verify_multiplicities(g, s),
        ),
        CheckRecord::run("modules.raising-orbits", "R^k v != 0 for k <= N-2r and R^(N-2r+1) v = 0", || verify_orbits(r, s)),
        CheckRecord::run("modules.direct-sum", "V is the direct sum of the modules", || verify_direct_sum(g, s)),
        CheckRecord::run("modules.invariance", "each module is invariant under A and A*", || verify_invariance(g, ops, s)),
        CheckRecord::run(
            "modules.eigenblocks",
            "dim E*_iW = dim E_iW = 1 for r <= i <= N-r and 0 otherwise",
            || verify_eigenblocks(ops, s),
        ),
        CheckRecord::run(
            "modules.tridiagonal-pair",
            "A|W is irreducible tridiagonal with zero diagonal, A*|W is diagonal, eigenvalues theta_r..theta_(N-r)",
            || verify_all_tridiagonal_pairs(g, ops, s),
        ),
        CheckRecord::run(
            "modules.isomorphism-classes",
            "modules with the same endpoint have the same eigenvalue and off-diagonal data",
            || verify_isomorphism_classes(g, ops, s),
        ),
        CheckRecord::run(
            "modules.leonard-parameters",
            "d = N-2r, h = q^(N-r)/(q-1), h* = q^-r, s = -q^(2r-N-1), theta_0 = q^r [N-2r]_q = theta_r, theta*_0 = q^-r",
            || verify_leonard_parameters(g, ops, s),
        ),
    ]
}
