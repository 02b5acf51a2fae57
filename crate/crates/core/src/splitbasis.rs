//! The four split bases `y^DD, y^DU, y^UD, y^UU`, their `A`/`A*`/`S` actions,
//! and the split decompositions `U_i` with their flag characterizations.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exactmat::{int, qpow, span_equal, ExactMatrix, ExactVector, Scalar, SpanBasis};
use crate::gfspace::gaussian_binomial;
use crate::operators::OperatorSet;
use crate::poset::Geometry;
use crate::report::{CheckRecord, Outcome, Witness};

/// `D` sums over subspaces below `y`, `U` over subspaces above; the second
/// letter `U` adds the sign `(-1)^dim z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitVariant {
    DD,
    DU,
    UD,
    UU,
}

impl SplitVariant {
    pub const ALL: [SplitVariant; 4] = [SplitVariant::DD, SplitVariant::DU, SplitVariant::UD, SplitVariant::UU];

    pub fn name(self) -> &'static str {
        match self {
            SplitVariant::DD => "dd",
            SplitVariant::DU => "du",
            SplitVariant::UD => "ud",
            SplitVariant::UU => "uu",
        }
    }

    /// Sums over `z <= y` (as opposed to `z >= y`).
    pub fn sums_down(self) -> bool {
        matches!(self, SplitVariant::DD | SplitVariant::DU)
    }

    pub fn signed(self) -> bool {
        matches!(self, SplitVariant::DU | SplitVariant::UU)
    }

    /// The variant with the sign toggled, which is what `S` maps to.
    pub fn sign_partner(self) -> SplitVariant {
        match self {
            SplitVariant::DD => SplitVariant::DU,
            SplitVariant::DU => SplitVariant::DD,
            SplitVariant::UD => SplitVariant::UU,
            SplitVariant::UU => SplitVariant::UD,
        }
    }
}

fn sign(k: usize) -> Scalar {
    int(if k.is_multiple_of(2) { 1 } else { -1 })
}

fn choose2(m: usize) -> i64 {
    (m * m.saturating_sub(1) / 2) as i64
}

/// The split vector of `y` for the given variant, densely.
pub fn split_vector(g: &Geometry, y: usize, variant: SplitVariant) -> ExactVector {
    let (n, q, i) = (g.n(), g.q(), g.dim(y));
    let mut v = ExactVector::zeros(g.len());
    if variant.sums_down() {
        for z in g.down_set(y) {
            let c = if variant.signed() { sign(g.dim(z)) } else { Scalar::one() };
            v.set(z, c);
        }
    } else {
        let lead = qpow(q, choose2(n - i));
        for z in g.up_set(y) {
            let mut c = &lead * qpow(q, ((n - g.dim(z)) * i) as i64);
            if variant.signed() {
                c *= sign(g.dim(z));
            }
            v.set(z, c);
        }
    }
    v
}

/// All `|X|` split vectors of one variant, indexed by vertex.
#[derive(Debug, Clone)]
pub struct SplitBasisFamily {
    pub variant: SplitVariant,
    pub vectors: Vec<ExactVector>,
}

impl SplitBasisFamily {
    /// The matrix whose column `y` is the split vector of `y`.
    pub fn matrix(&self) -> ExactMatrix {
        ExactMatrix::from_columns(self.vectors.len(), &self.vectors).expect("uniform length")
    }

    pub fn rank(&self) -> usize {
        self.matrix().rank()
    }
}

pub fn build_family(g: &Geometry, variant: SplitVariant) -> SplitBasisFamily {
    let vectors = (0..g.len()).into_par_iter().map(|y| split_vector(g, y, variant)).collect();
    SplitBasisFamily { variant, vectors }
}

/// The four families in `SplitVariant::ALL` order.
pub fn build_families(g: &Geometry) -> Vec<SplitBasisFamily> {
    SplitVariant::ALL.iter().map(|&v| build_family(g, v)).collect()
}

/// `U_0, ..., U_N` for one variant, each with the vertices whose split vectors span it.
#[derive(Debug, Clone)]
pub struct SplitDecomposition {
    pub variant: SplitVariant,
    pub vertices: Vec<Vec<usize>>,
    pub subspaces: Vec<Vec<ExactVector>>,
}

impl SplitDecomposition {
    /// Basis vectors of `U_lo + ... + U_hi`.
    pub fn partial_sum(&self, lo: usize, hi: usize) -> Vec<ExactVector> {
        self.subspaces[lo..=hi].iter().flatten().cloned().collect()
    }
}

/// `U_i` is spanned by the split vectors of dimension `i` (DD, DU) or `N - i` (UD, UU).
pub fn build_split_decomposition(g: &Geometry, family: &SplitBasisFamily) -> SplitDecomposition {
    let n = g.n();
    let vertices: Vec<Vec<usize>> = (0..=n)
        .map(|i| {
            let level = if family.variant.sums_down() { i } else { n - i };
            g.level(level).collect()
        })
        .collect();
    let subspaces = vertices.iter().map(|vs| vs.iter().map(|&y| family.vectors[y].clone()).collect()).collect();
    SplitDecomposition { variant: family.variant, vertices, subspaces }
}

/// The column space of a projector, with a basis picked from its columns.
#[derive(Debug, Clone)]
pub struct ProjectorRange {
    pub projector: ExactMatrix,
    pub basis: Vec<ExactVector>,
}

impl ProjectorRange {
    pub fn new(projector: ExactMatrix) -> Result<Self> {
        let mut span = SpanBasis::new(projector.rows());
        let mut basis = Vec::new();
        for c in projector.columns() {
            if span.insert(&c)? {
                basis.push(c);
            }
        }
        Ok(ProjectorRange { projector, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// The ranges of the partial sums `E_0 + ... + E_k` and `E_k + ... + E_N`.
#[derive(Debug, Clone)]
pub struct EigenFlags {
    /// `lower[k]` is the range of `E_0 + ... + E_k`
    pub lower: Vec<ProjectorRange>,
    /// `upper[k]` is the range of `E_k + ... + E_N`
    pub upper: Vec<ProjectorRange>,
}

impl EigenFlags {
    pub fn build(ops: &OperatorSet) -> Result<Self> {
        let n = ops.n;
        let jobs: Vec<(bool, usize)> = (0..=n).flat_map(|k| [(true, k), (false, k)]).collect();
        let mut ranges: Vec<ProjectorRange> = jobs
            .par_iter()
            .map(|&(low, k)| {
                let f = if low { ops.idempotent_sum(0, k) } else { ops.idempotent_sum(k, n) };
                ProjectorRange::new(f)
            })
            .collect::<Result<_>>()?;
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for (k, r) in ranges.drain(..).enumerate() {
            if k % 2 == 0 {
                lower.push(r);
            } else {
                upper.push(r);
            }
        }
        Ok(EigenFlags { lower, upper })
    }
}

fn wit(e: crate::error::Error) -> Witness {
    Witness::detail(e.to_string())
}

fn binom(n: usize, i: usize, q: u64) -> usize {
    gaussian_binomial(n as u32, i as i64, q) as usize
}

/// The family has rank `|X|`.
pub fn verify_family_rank(family: &SplitBasisFamily) -> Outcome {
    let r = family.rank();
    if r != family.vectors.len() {
        return Err(Witness::detail(format!("rank {r} of {} vectors", family.vectors.len())));
    }
    Ok(())
}

/// `S y^DD = y^DU` and `S y^UD = y^UU` vector by vector, and conversely.
pub fn verify_sign_swap(ops: &OperatorSet, families: &[SplitBasisFamily]) -> Outcome {
    for fam in families {
        let partner = families.iter().find(|f| f.variant == fam.variant.sign_partner()).expect("all variants built");
        let images = ops.s.mul(&fam.matrix()).map_err(wit)?;
        for (y, target) in partner.vectors.iter().enumerate() {
            let img = images.column(y);
            if let Some(k) = (0..img.len()).find(|&k| img.get(k) != target.get(k)) {
                return Err(Witness {
                    vertex: Some(y),
                    row: Some(k),
                    detail: Some(format!("S maps {} to something other than {}", fam.variant.name(), partner.variant.name())),
                    ..Default::default()
                });
            }
        }
    }
    Ok(())
}

/// Which operator an action identity concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Adjacency,
    DualAdjacency,
}

/// Right-hand side of the action identity for `y` (diagonal coefficient, off-diagonal
/// coefficient, and the neighbours summed over).
fn expected_action(g: &Geometry, ops: &OperatorSet, variant: SplitVariant, side: Side, y: usize) -> (Scalar, Scalar, Vec<usize>) {
    let (n, q, i) = (ops.n, ops.q, g.dim(y));
    let up = g.cover_up(y).to_vec();
    let down = g.cover_down(y).to_vec();
    match (side, variant) {
        (Side::Adjacency, SplitVariant::DD) => (ops.theta[n - i].clone(), int(1), up),
        (Side::Adjacency, SplitVariant::DU) => (ops.theta[i].clone(), int(-1), up),
        (Side::Adjacency, SplitVariant::UD) => (ops.theta[i].clone(), int(1), down),
        (Side::Adjacency, SplitVariant::UU) => (ops.theta[n - i].clone(), int(-1), down),
        (Side::DualAdjacency, SplitVariant::DD | SplitVariant::DU) => {
            (ops.theta_star[i].clone(), int(q as i64 - 1) * qpow(q, -(i as i64)), down)
        }
        (Side::DualAdjacency, SplitVariant::UD | SplitVariant::UU) => {
            (ops.theta_star[i].clone(), (qpow(q, -1) - int(1)) * qpow(q, -(i as i64)), up)
        }
    }
}

/// The action of `A` (or `A*`) on every split vector of the family.
pub fn verify_actions(g: &Geometry, ops: &OperatorSet, family: &SplitBasisFamily, side: Side) -> Outcome {
    let m = match side {
        Side::Adjacency => &ops.a,
        Side::DualAdjacency => &ops.a_star,
    };
    let images = m.mul(&family.matrix()).map_err(wit)?;
    (0..g.len())
        .into_par_iter()
        .map(|y| {
            let (diag, coeff, others) = expected_action(g, ops, family.variant, side, y);
            let mut rhs = family.vectors[y].scale(&diag);
            for z in others {
                rhs.add_scaled(&coeff, &family.vectors[z]).map_err(wit)?;
            }
            let lhs = images.column(y);
            match (0..lhs.len()).find(|&k| lhs.get(k) != rhs.get(k)) {
                None => Ok(()),
                Some(k) => Err(Witness {
                    vertex: Some(y),
                    row: Some(k),
                    entry: Some(crate::exactmat::format_scalar(lhs.get(k))),
                    detail: Some(format!("{side:?} on {} vector", family.variant.name())),
                    ..Default::default()
                }),
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Levels `lo..=hi` of the dual flag used by a variant's `U_i`.
fn dual_levels(variant: SplitVariant, n: usize, i: usize) -> (usize, usize) {
    if variant.sums_down() {
        (0, i)
    } else {
        (n - i, n)
    }
}

/// The eigenspace flag used by a variant's `U_i`.
fn primal_flag(variant: SplitVariant, flags: &EigenFlags, n: usize, i: usize) -> &ProjectorRange {
    match variant {
        SplitVariant::DD | SplitVariant::UD => &flags.lower[n - i],
        SplitVariant::DU | SplitVariant::UU => &flags.upper[i],
    }
}

/// Basis of `range(F) ∩ (coordinates of levels lo..=hi)`, from whichever of two
/// kernels is cheaper: vectors `v` on those levels with `(F - I) v = 0`, or
/// combinations of a column basis of `F` vanishing off those levels.
pub fn intersect_with_levels(g: &Geometry, range: &ProjectorRange, lo: usize, hi: usize) -> Vec<ExactVector> {
    let (inside, outside): (Vec<usize>, Vec<usize>) = (0..g.len()).partition(|&y| (lo..=hi).contains(&g.dim(y)));
    let f = &range.projector;
    if inside.len() <= range.rank() {
        let m = ExactMatrix::from_fn(g.len(), inside.len(), |row, c| {
            let x = f.get(row, inside[c]);
            if row == inside[c] {
                x - Scalar::one()
            } else {
                x.clone()
            }
        });
        return m
            .kernel_basis()
            .into_iter()
            .map(|w| {
                let mut v = ExactVector::zeros(g.len());
                for (c, x) in w.entries().iter().enumerate() {
                    v.set(inside[c], x.clone());
                }
                v
            })
            .collect();
    }
    let m = ExactMatrix::from_fn(outside.len(), range.rank(), |row, c| range.basis[c].get(outside[row]).clone());
    m.kernel_basis()
        .into_iter()
        .map(|x| {
            let mut v = ExactVector::zeros(g.len());
            for (c, coeff) in x.entries().iter().enumerate() {
                if !coeff.is_zero() {
                    v.add_scaled(coeff, &range.basis[c]).expect("uniform length");
                }
            }
            v
        })
        .collect()
}

/// `dim U_i = binom(N, i)_q` and the dimensions add up to `|X|`.
pub fn verify_decomposition_dimensions(g: &Geometry, dec: &SplitDecomposition) -> Outcome {
    let n = g.n();
    let mut total = 0;
    for (i, u) in dec.subspaces.iter().enumerate() {
        let r = SpanBasis::from_vectors(g.len(), u).map_err(wit)?.rank();
        if r != binom(n, i, g.q()) || r != u.len() {
            return Err(Witness::detail(format!("dim U_{i} = {r} from {} vectors", u.len())).with_i(i));
        }
        total += r;
    }
    if total != g.len() {
        return Err(Witness::detail(format!("dimensions sum to {total}")));
    }
    Ok(())
}

/// `U_i` equals the intersection of the dual flag and the eigenspace flag.
pub fn verify_flag_intersection(g: &Geometry, flags: &EigenFlags, dec: &SplitDecomposition) -> Outcome {
    let n = g.n();
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let (lo, hi) = dual_levels(dec.variant, n, i);
            let meet = intersect_with_levels(g, primal_flag(dec.variant, flags, n, i), lo, hi);
            if meet.len() != dec.subspaces[i].len() {
                return Err(Witness::detail(format!("intersection has dimension {}, U_i has {}", meet.len(), dec.subspaces[i].len())).with_i(i));
            }
            if !span_equal(&meet, &dec.subspaces[i]).map_err(wit)? {
                return Err(Witness::detail("intersection differs from U_i").with_i(i));
            }
            Ok(())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Independent vectors `vs` span `range(F)`: each satisfies `F v = v` and
/// there are `rank` of them.
fn spans_range(vs: &[ExactVector], f: &ExactMatrix, rank: usize) -> Outcome {
    if vs.len() != rank {
        return Err(Witness::detail(format!("{} vectors for a space of dimension {rank}", vs.len())));
    }
    if vs.is_empty() {
        return Ok(());
    }
    let m = ExactMatrix::from_columns(f.rows(), vs).map_err(wit)?;
    let fm = f.mul(&m).map_err(wit)?;
    match fm.first_difference(&m) {
        None => Ok(()),
        Some((row, col)) => Err(Witness { row: Some(row), col: Some(col), detail: Some("vector outside the range".into()), ..Default::default() }),
    }
}

fn dual_range(ops: &OperatorSet, g: &Geometry, lo: usize, hi: usize) -> (ExactMatrix, usize) {
    let rank = (lo..=hi).map(|k| g.level(k).len()).sum();
    (ops.dual_idempotent_sum(lo, hi), rank)
}

fn select(family: &SplitBasisFamily, g: &Geometry, keep: impl Fn(usize) -> bool) -> Vec<ExactVector> {
    (0..g.len()).filter(|&y| keep(g.dim(y))).map(|y| family.vectors[y].clone()).collect()
}

/// The split vectors filtered by `dim <= i` or `dim >= i` span the
/// corresponding partial sums of `E*_k V` and of `E_k V`.
pub fn verify_triangular(g: &Geometry, ops: &OperatorSet, flags: &EigenFlags, family: &SplitBasisFamily) -> Outcome {
    let n = g.n();
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let (below, above) = (select(family, g, |d| d <= i), select(family, g, |d| d >= i));
            let (dual_vs, (f, rank)) = if family.variant.sums_down() {
                (&below, dual_range(ops, g, 0, i))
            } else {
                (&above, dual_range(ops, g, i, n))
            };
            spans_range(dual_vs, &f, rank).map_err(|w| w.with_i(i).with_detail("dual flag"))?;
            let (vs, range) = match family.variant {
                SplitVariant::DD => (&above, &flags.lower[n - i]),
                SplitVariant::DU => (&above, &flags.upper[i]),
                SplitVariant::UD => (&below, &flags.lower[i]),
                SplitVariant::UU => (&below, &flags.upper[n - i]),
            };
            spans_range(vs, &range.projector, range.rank()).map_err(|w| w.with_i(i).with_detail("eigenspace flag"))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Which of the four partial-sum equalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialSum {
    /// `E*_0V + ... + E*_iV = sum U^DD_{0..i} = sum U^DU_{0..i}`
    DualLower,
    /// `E*_NV + ... + E*_{N-i}V = sum U^UD_{0..i} = sum U^UU_{0..i}`
    DualUpper,
    /// `E_0V + ... + E_iV = sum U^DD_{N-i..N} = sum U^UD_{N-i..N}`
    PrimalLower,
    /// `E_NV + ... + E_{N-i}V = sum U^DU_{N-i..N} = sum U^UU_{N-i..N}`
    PrimalUpper,
}

impl PartialSum {
    pub const ALL: [PartialSum; 4] = [PartialSum::DualLower, PartialSum::DualUpper, PartialSum::PrimalLower, PartialSum::PrimalUpper];

    fn variants(self) -> [SplitVariant; 2] {
        use SplitVariant::*;
        match self {
            PartialSum::DualLower => [DD, DU],
            PartialSum::DualUpper => [UD, UU],
            PartialSum::PrimalLower => [DD, UD],
            PartialSum::PrimalUpper => [DU, UU],
        }
    }
}

/// Three-way equality of a flag with two partial sums of split decompositions.
pub fn verify_partial_sums(g: &Geometry, ops: &OperatorSet, flags: &EigenFlags, decs: &[SplitDecomposition], which: PartialSum) -> Outcome {
    let n = g.n();
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let (f, rank) = match which {
                PartialSum::DualLower => dual_range(ops, g, 0, i),
                PartialSum::DualUpper => dual_range(ops, g, n - i, n),
                PartialSum::PrimalLower => (flags.lower[i].projector.clone(), flags.lower[i].rank()),
                PartialSum::PrimalUpper => (flags.upper[n - i].projector.clone(), flags.upper[n - i].rank()),
            };
            for v in which.variants() {
                let dec = decs.iter().find(|d| d.variant == v).expect("all variants built");
                let vs = match which {
                    PartialSum::DualLower | PartialSum::DualUpper => dec.partial_sum(0, i),
                    PartialSum::PrimalLower | PartialSum::PrimalUpper => dec.partial_sum(n - i, n),
                };
                spans_range(&vs, &f, rank).map_err(|w| w.with_i(i).with_detail(format!("partial sum of U^{}", v.name())))?;
            }
            Ok(())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// The shift applied before raising (`A`) or lowering (`A*`) `U_i`.
fn inclusion_shift(ops: &OperatorSet, variant: SplitVariant, side: Side, i: usize) -> Scalar {
    let n = ops.n;
    match (side, variant) {
        (Side::Adjacency, SplitVariant::DD | SplitVariant::UD) => ops.theta[n - i].clone(),
        (Side::Adjacency, SplitVariant::DU | SplitVariant::UU) => ops.theta[i].clone(),
        (Side::DualAdjacency, SplitVariant::DD | SplitVariant::DU) => ops.theta_star[i].clone(),
        (Side::DualAdjacency, SplitVariant::UD | SplitVariant::UU) => ops.theta_star[n - i].clone(),
    }
}

/// `(A - c) U_i ⊆ U_{i+1}` (side `Adjacency`) or `(A* - c) U_i ⊆ U_{i-1}`
/// (side `DualAdjacency`), with `U_{-1} = U_{N+1} = 0`.
pub fn verify_inclusions(ops: &OperatorSet, dec: &SplitDecomposition, side: Side) -> Outcome {
    let n = ops.n;
    let width = ops.dim();
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let m = match side {
                Side::Adjacency => &ops.a,
                Side::DualAdjacency => &ops.a_star,
            };
            let shifted = m.add_identity(&-inclusion_shift(ops, dec.variant, side, i)).map_err(wit)?;
            let target = match side {
                Side::Adjacency if i < n => Some(i + 1),
                Side::DualAdjacency if i > 0 => Some(i - 1),
                _ => None,
            };
            let span = match target {
                Some(t) => SpanBasis::from_vectors(width, &dec.subspaces[t]).map_err(wit)?,
                None => SpanBasis::new(width),
            };
            let images = shifted.mul_vecs(&dec.subspaces[i]).map_err(wit)?;
            for (k, img) in images.iter().enumerate() {
                if !span.contains(img).map_err(wit)? {
                    return Err(Witness {
                        vertex: Some(dec.vertices[i][k]),
                        detail: Some(format!("image leaves U_{}", target.map_or("none".into(), |t| t.to_string()))),
                        ..Default::default()
                    }
                    .with_i(i));
                }
            }
            Ok(())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// `(A - theta_0 I)...(A - theta_{N-j} I) y^DD = 0` whenever `dim y = j`.
pub fn verify_annihilation(g: &Geometry, ops: &OperatorSet, family: &SplitBasisFamily) -> Outcome {
    let n = g.n();
    (0..=n)
        .into_par_iter()
        .map(|j| {
            let mut vs: Vec<ExactVector> = g.level(j).map(|y| family.vectors[y].clone()).collect();
            for k in (0..=n - j).rev() {
                let shifted = ops.a.add_identity(&-&ops.theta[k]).map_err(wit)?;
                vs = shifted.mul_vecs(&vs).map_err(wit)?;
            }
            match vs.iter().position(|v| !v.is_zero()) {
                None => Ok(()),
                Some(k) => Err(Witness::at_vertex(g.level(j).start + k, "product does not annihilate").with_i(j)),
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Everything the split-basis checks share.
pub struct SplitData {
    pub families: Vec<SplitBasisFamily>,
    pub decompositions: Vec<SplitDecomposition>,
    pub flags: EigenFlags,
}

impl SplitData {
    pub fn build(g: &Geometry, ops: &OperatorSet) -> Result<Self> {
        let families = build_families(g);
        let decompositions = families.iter().map(|f| build_split_decomposition(g, f)).collect();
        let flags = EigenFlags::build(ops)?;
        Ok(SplitData { families, decompositions, flags })
    }

    pub fn family(&self, v: SplitVariant) -> &SplitBasisFamily {
        self.families.iter().find(|f| f.variant == v).expect("all variants built")
    }

    pub fn decomposition(&self, v: SplitVariant) -> &SplitDecomposition {
        self.decompositions.iter().find(|d| d.variant == v).expect("all variants built")
    }
}

/// Bases and the sign swap.
pub fn verify_bases(ops: &OperatorSet, data: &SplitData) -> Vec<CheckRecord> {
    let mut out: Vec<CheckRecord> = data
        .families
        .iter()
        .map(|f| {
            let id = format!("split.{}.basis", f.variant.name());
            CheckRecord::run(&id, "the split vectors form a basis of V", || verify_family_rank(f))
        })
        .collect();
    out.push(CheckRecord::run("split.sign-swap", "S y^DD = y^DU and S y^UD = y^UU for every vertex y", || {
        verify_sign_swap(ops, &data.families)
    }));
    out
}

/// The `A` and `A*` actions on each family.
pub fn verify_split_actions(g: &Geometry, ops: &OperatorSet, data: &SplitData) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for f in &data.families {
        let name = f.variant.name();
        out.push(CheckRecord::run(
            &format!("split.{name}.adjacency-action"),
            "A y = theta y +/- sum over covering or covered split vectors",
            || verify_actions(g, ops, f, Side::Adjacency),
        ));
        out.push(CheckRecord::run(
            &format!("split.{name}.dual-adjacency-action"),
            "A* y = theta*_i y + c q^(-i) sum over covered or covering split vectors",
            || verify_actions(g, ops, f, Side::DualAdjacency),
        ));
    }
    out
}

/// Decompositions, triangularity, partial sums, inclusions and annihilation.
pub fn verify_split_decompositions(g: &Geometry, ops: &OperatorSet, data: &SplitData) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for dec in &data.decompositions {
        let name = dec.variant.name();
        out.push(CheckRecord::run(
            &format!("split.{name}.decomposition-dimensions"),
            "dim U_i = binom(N, i)_q and V is the direct sum of the U_i",
            || verify_decomposition_dimensions(g, dec),
        ));
        out.push(CheckRecord::run(
            &format!("split.{name}.flag-intersection"),
            "U_i is the intersection of a dual idempotent flag and an idempotent flag",
            || verify_flag_intersection(g, &data.flags, dec),
        ));
    }
    for f in &data.families {
        out.push(CheckRecord::run(
            &format!("split.{}.triangular-spans", f.variant.name()),
            "split vectors filtered by dimension span partial sums of E*_kV and of E_kV",
            || verify_triangular(g, ops, &data.flags, f),
        ));
    }
    for which in PartialSum::ALL {
        let (id, statement) = match which {
            PartialSum::DualLower => ("split.partial-sums.dual-lower", "E*_0V+...+E*_iV = U^DD_0+...+U^DD_i = U^DU_0+...+U^DU_i"),
            PartialSum::DualUpper => ("split.partial-sums.dual-upper", "E*_NV+...+E*_(N-i)V = U^UD_0+...+U^UD_i = U^UU_0+...+U^UU_i"),
            PartialSum::PrimalLower => ("split.partial-sums.primal-lower", "E_0V+...+E_iV = U^DD_(N-i)+...+U^DD_N = U^UD_(N-i)+...+U^UD_N"),
            PartialSum::PrimalUpper => ("split.partial-sums.primal-upper", "E_NV+...+E_(N-i)V = U^DU_(N-i)+...+U^DU_N = U^UU_(N-i)+...+U^UU_N"),
        };
        out.push(CheckRecord::run(id, statement, || verify_partial_sums(g, ops, &data.flags, &data.decompositions, which)));
    }
    for dec in &data.decompositions {
        let name = dec.variant.name();
        out.push(CheckRecord::run(&format!("split.{name}.raising-inclusion"), "(A - theta I) U_i is contained in U_(i+1)", || {
            verify_inclusions(ops, dec, Side::Adjacency)
        }));
        out.push(CheckRecord::run(&format!("split.{name}.lowering-inclusion"), "(A* - theta* I) U_i is contained in U_(i-1)", || {
            verify_inclusions(ops, dec, Side::DualAdjacency)
        }));
    }
    out.push(CheckRecord::run(
        "split.dd.annihilation",
        "(A - theta_0 I)...(A - theta_(N-j) I) y^DD = 0 for dim y = j",
        || verify_annihilation(g, ops, data.family(SplitVariant::DD)),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfspace::FieldSpec;
    use crate::report::all_pass;

    fn geom(q: u64, n: usize) -> Geometry {
        let spec = match q {
            4 => FieldSpec::extension(2, 2, vec![1, 1, 1]).unwrap(),
            p => FieldSpec::prime(p).unwrap(),
        };
        Geometry::build(&spec, n, 5000).unwrap()
    }

    #[test]
    fn vectors_at_the_ends() {
        let g = geom(2, 2);
        assert_eq!(split_vector(&g, 0, SplitVariant::DD), ExactVector::unit(5, 0));
        let top = g.top_index();
        assert_eq!(split_vector(&g, top, SplitVariant::DD), ExactVector::new(vec![int(1); 5]));
        // q^C(2,2) = 2, and every exponent is 0 when dim y = 0
        assert_eq!(split_vector(&g, 0, SplitVariant::UD), ExactVector::new(vec![int(2); 5]));
        let g = geom(3, 3);
        assert_eq!(split_vector(&g, 0, SplitVariant::UD), ExactVector::new(vec![int(27); g.len()]));
    }

    #[test]
    fn up_vectors_follow_the_weighting() {
        let g = geom(2, 3);
        let line = g.level(1).start;
        let v = split_vector(&g, line, SplitVariant::UU);
        // q^C(2,2) q^((3 - dim z) * 1) (-1)^dim z
        assert_eq!(v.get(line), &int(-2 * 4));
        for z in g.cover_up(line) {
            assert_eq!(v.get(*z), &int(2 * 2));
        }
        assert_eq!(v.get(g.top_index()), &int(-2));
        assert!(v.get(0).is_zero());
    }

    #[test]
    fn dd_family_is_the_zeta_matrix() {
        let g = geom(2, 3);
        let m = build_family(&g, SplitVariant::DD).matrix();
        for z in 0..g.len() {
            for y in 0..g.len() {
                let want = if g.le(z, y) { int(1) } else { int(0) };
                assert_eq!(m.get(z, y), &want);
            }
        }
    }

    #[test]
    fn families_are_bases() {
        for (q, n) in [(2, 3), (3, 2), (4, 2)] {
            let g = geom(q, n);
            for f in build_families(&g) {
                verify_family_rank(&f).unwrap();
            }
        }
    }

    #[test]
    fn adjacency_on_zero_vector_by_hand() {
        let g = geom(2, 2);
        let ops = OperatorSet::build(&g).unwrap();
        let f = build_family(&g, SplitVariant::DD);
        let lhs = ops.a.mul_vec(&f.vectors[0]).unwrap();
        // theta_2 = -3; each line^DD is hat 0 + hat line
        let mut rhs = f.vectors[0].scale(&int(-3));
        for y in g.level(1) {
            rhs = rhs.add(&f.vectors[y]).unwrap();
        }
        assert_eq!(lhs, rhs);
        assert_eq!(rhs.get(0), &int(0));
    }

    #[test]
    fn flag_intersection_at_the_bottom() {
        let g = geom(2, 3);
        let ops = OperatorSet::build(&g).unwrap();
        let flags = EigenFlags::build(&ops).unwrap();
        assert_eq!(flags.lower[3].rank(), g.len());
        let meet = intersect_with_levels(&g, &flags.lower[3], 0, 0);
        assert_eq!(meet.len(), 1);
        assert!(span_equal(&meet, &[ExactVector::unit(g.len(), 0)]).unwrap());
    }

    #[test]
    fn sign_maps_dd_decomposition_to_du() {
        let g = geom(2, 3);
        let ops = OperatorSet::build(&g).unwrap();
        let data = SplitData::build(&g, &ops).unwrap();
        for i in 0..=3 {
            let images = ops.s.mul_vecs(&data.decomposition(SplitVariant::DD).subspaces[i]).unwrap();
            assert!(span_equal(&images, &data.decomposition(SplitVariant::DU).subspaces[i]).unwrap());
        }
    }

    #[test]
    fn all_split_checks_pass() {
        for (q, n) in [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2)] {
            let g = geom(q, n);
            let ops = OperatorSet::build(&g).unwrap();
            let data = SplitData::build(&g, &ops).unwrap();
            for records in [verify_bases(&ops, &data), verify_split_actions(&g, &ops, &data), verify_split_decompositions(&g, &ops, &data)] {
                assert!(all_pass(&records), "q={q} n={n}: {records:#?}");
            }
        }
    }

    #[test]
    fn wrong_shift_is_caught() {
        let g = geom(2, 3);
        let ops = OperatorSet::build(&g).unwrap();
        let dec = build_split_decomposition(&g, &build_family(&g, SplitVariant::DD));
        let mut swapped = ops.clone();
        swapped.theta.reverse();
        assert!(verify_inclusions(&swapped, &dec, Side::Adjacency).is_err());
    }
}
