//! Run configuration, check orchestration in dependency order, and matrix dumps.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exactmat::{int, ExactMatrix};
use crate::gfspace::{contains, gaussian_binomial, q_integer, subspace_count, FieldSpec, DEFAULT_SIZE_LIMIT};
use crate::operators::{build_a, verify_construction, verify_operator_structure, verify_spectrum, OperatorSet};
use crate::poset::Geometry;
use crate::qpolyverify::{verify_qpoly, verify_tridiagonal_relations};
use crate::report::{CheckRecord, ConfigEcho, Outcome, VerificationReport, Witness};
use crate::splitbasis::{build_family, verify_bases, verify_split_actions, verify_split_decompositions, SplitData, SplitVariant};
use crate::tmodule::{decompose, lowering_raising, summarize, verify_modules};

/// A named group of checks, listed in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckGroup {
    Poset,
    Operators,
    SplitBases,
    SplitActions,
    SplitDecompositions,
    QPoly,
    Tridiag,
    Modules,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 8] = [
        CheckGroup::Poset,
        CheckGroup::Operators,
        CheckGroup::SplitBases,
        CheckGroup::SplitActions,
        CheckGroup::SplitDecompositions,
        CheckGroup::QPoly,
        CheckGroup::Tridiag,
        CheckGroup::Modules,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckGroup::Poset => "poset",
            CheckGroup::Operators => "operators",
            CheckGroup::SplitBases => "split-bases",
            CheckGroup::SplitActions => "split-actions",
            CheckGroup::SplitDecompositions => "split-decompositions",
            CheckGroup::QPoly => "qpoly",
            CheckGroup::Tridiag => "tridiag",
            CheckGroup::Modules => "modules",
        }
    }

    /// Parses a comma-separated list; `all` expands to every group.
    pub fn parse_list(s: &str) -> Result<Vec<CheckGroup>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(CheckGroup::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn uses_split_data(self) -> bool {
        matches!(self, CheckGroup::SplitBases | CheckGroup::SplitActions | CheckGroup::SplitDecompositions | CheckGroup::QPoly)
    }
}

impl FromStr for CheckGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "poset" => CheckGroup::Poset,
            "operators" | "spectral" => CheckGroup::Operators,
            "split-bases" => CheckGroup::SplitBases,
            "split-actions" => CheckGroup::SplitActions,
            "split-decompositions" => CheckGroup::SplitDecompositions,
            "qpoly" => CheckGroup::QPoly,
            "tridiag" => CheckGroup::Tridiag,
            "modules" => CheckGroup::Modules,
            other => return Err(Error::UnknownCheck(other.into())),
        })
    }
}

impl fmt::Display for CheckGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// the field order or its characteristic (see `field_spec`)
    pub q: u64,
    pub ext_degree: Option<u32>,
    /// constant term first, monic, `ext_degree + 1` entries
    pub modulus: Option<Vec<u64>>,
    pub n: usize,
    pub size_limit: usize,
    pub checks: Vec<CheckGroup>,
    pub inject_fault: bool,
}

impl RunConfig {
    pub fn new(q: u64, n: usize) -> Self {
        RunConfig { q, ext_degree: None, modulus: None, n, size_limit: DEFAULT_SIZE_LIMIT, checks: CheckGroup::ALL.to_vec(), inject_fault: false }
    }

    pub fn with_modulus(mut self, modulus: Vec<u64>) -> Self {
        self.modulus = Some(modulus);
        self
    }

    pub fn with_checks(mut self, checks: Vec<CheckGroup>) -> Self {
        self.checks = checks;
        self
    }

    /// `q` is read as a prime `p` when `ext_degree` is given, and otherwise
    /// as a field order `p^e`.
    pub fn field_spec(&self) -> Result<FieldSpec> {
        let (p, e) = match self.ext_degree {
            Some(e) => (self.q, e),
            None => prime_power(self.q).ok_or(Error::InvalidConfig(format!("{} is not a prime power", self.q)))?,
        };
        FieldSpec::new(p, e, self.modulus.clone())
    }

    fn validate(&self) -> Result<FieldSpec> {
        if self.n == 0 {
            return Err(Error::EmptyAmbient);
        }
        self.field_spec()
    }
}

/// `(p, e)` with `q = p^e`, `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn tag(group: CheckGroup, records: Vec<CheckRecord>) -> impl Iterator<Item = CheckRecord> {
    records.into_iter().map(move |mut r| {
        r.group = group.name().into();
        r
    })
}

fn skipped(group: CheckGroup, reason: &str) -> CheckRecord {
    let mut r = CheckRecord::skipped(&format!("{group}.construction"), "build the objects this group checks", reason);
    r.group = group.name().into();
    r
}

fn vertex_outcome(r: std::result::Result<(), crate::poset::VertexWitness>) -> Outcome {
    r.map_err(|w| Witness::at_vertex(w.vertex, w.detail))
}

pub fn poset_records(g: &Geometry) -> Vec<CheckRecord> {
    let (n, q) = (g.n() as u32, g.q());
    vec![
        CheckRecord::run("poset.vertex-count", "|X| = sum_i binom(N, i)_q", || {
            let want: u128 = (0..=n as i64).map(|i| gaussian_binomial(n, i, q)).sum();
            if g.len() as u128 != want || subspace_count(n, q) != want {
                return Err(Witness::detail(format!("{} subspaces, expected {want}", g.len())));
            }
            Ok(())
        }),
        CheckRecord::run("poset.cover-relation", "Hasse edges join subspaces y < z with dim z = dim y + 1", || {
            for (y, z) in g.edges() {
                let ok = g.dim(z) == g.dim(y) + 1 && contains(g.field(), g.vertex(z), g.vertex(y)).unwrap_or(false);
                if !ok {
                    return Err(Witness::at_vertex(y, format!("edge to {z} is not a cover")));
                }
            }
            let want: u128 = (0..=n).map(|i| gaussian_binomial(n, i as i64, q) * q_integer(n - i, q)).sum();
            if g.edge_count() as u128 != want {
                return Err(Witness::detail(format!("{} edges, expected {want}", g.edge_count())));
            }
            Ok(())
        }),
        CheckRecord::run("poset.distance-equals-dimension", "the distance from 0 to y is dim y, and the graph is bipartite", || {
            vertex_outcome(g.verify_distance_equals_dimension())
        }),
        CheckRecord::run("poset.local-valencies", "a vertex of dimension i covers [i]_q vertices and is covered by [N-i]_q", || {
            vertex_outcome(g.verify_local_valencies())
        }),
        CheckRecord::run("poset.sphere-sizes", "|Gamma_i(0)| = binom(N, i)_q", || vertex_outcome(g.verify_sphere_sizes())),
    ]
}

/// `A` with the entry from the zero vertex to its first upper cover changed from 1 to 2.
pub fn faulty_adjacency(g: &Geometry) -> ExactMatrix {
    let mut a = build_a(g);
    let z = g.cover_up(g.zero_index())[0];
    a.set(g.zero_index(), z, int(2));
    a
}

fn echo(config: &RunConfig, spec: &FieldSpec) -> ConfigEcho {
    ConfigEcho {
        p: spec.p(),
        ext_degree: spec.e(),
        modulus: (spec.e() > 1).then(|| spec.modulus().to_vec()),
        q: spec.q(),
        n: config.n,
        size_limit: config.size_limit,
        checks: config.checks.iter().map(|c| c.name().to_string()).collect(),
        inject_fault: config.inject_fault,
    }
}

/// Runs the requested groups in dependency order: poset, operators, the
/// split groups, qpoly, tridiag, modules. Objects a group needs are built even
/// when the groups that check them were not requested; if building fails, the
/// dependent groups get a single skipped record.
pub fn run(config: &RunConfig) -> Result<VerificationReport> {
    let spec = config.validate()?;
    let mut checks = config.checks.clone();
    checks.sort();
    checks.dedup();
    let config = RunConfig { checks, ..config.clone() };
    let g = Geometry::build(&spec, config.n, config.size_limit)?;
    let wants = |c: CheckGroup| config.checks.contains(&c);
    let mut records = Vec::new();
    let mut certificate = None;
    let mut modules = None;

    if wants(CheckGroup::Poset) {
        records.extend(tag(CheckGroup::Poset, poset_records(&g)));
    }
    let later: Vec<CheckGroup> = config.checks.iter().copied().filter(|&c| c != CheckGroup::Poset).collect();
    if later.is_empty() {
        return Ok(finish(&config, &spec, records, certificate, modules));
    }
    let a = if config.inject_fault { faulty_adjacency(&g) } else { build_a(&g) };
    let ops = match OperatorSet::with_adjacency(&g, a) {
        Ok(ops) => ops,
        Err(e) => {
            records.extend(later.iter().map(|&c| skipped(c, &format!("operators unavailable: {e}"))));
            return Ok(finish(&config, &spec, records, certificate, modules));
        }
    };
    if wants(CheckGroup::Operators) {
        let ops_records = verify_construction(&g, &ops).into_iter().chain(verify_spectrum(&g, &ops)).chain(verify_operator_structure(&ops)).collect();
        records.extend(tag(CheckGroup::Operators, ops_records));
    }
    let split = if later.iter().any(|c| c.uses_split_data()) { Some(SplitData::build(&g, &ops)) } else { None };
    let split_ok = split.as_ref().and_then(|s| s.as_ref().ok());
    let split_err = split.as_ref().and_then(|s| s.as_ref().err()).map(|e| format!("split data unavailable: {e}"));
    for (group, f) in [
        (CheckGroup::SplitBases, verify_split_bases as SplitChecks),
        (CheckGroup::SplitActions, verify_split_actions),
        (CheckGroup::SplitDecompositions, verify_split_decompositions),
    ] {
        if wants(group) {
            match split_ok {
                Some(data) => records.extend(tag(group, f(&g, &ops, data))),
                None => records.push(skipped(group, split_err.as_deref().unwrap_or("split data unavailable"))),
            }
        }
    }
    if wants(CheckGroup::QPoly) {
        let (recs, cert) = verify_qpoly(&ops, split_ok);
        records.extend(tag(CheckGroup::QPoly, recs));
        certificate = Some(cert);
    }
    if wants(CheckGroup::Tridiag) {
        let (recs, residuals) = verify_tridiagonal_relations(&ops);
        let passed = recs.iter().all(CheckRecord::passed);
        records.extend(tag(CheckGroup::Tridiag, recs));
        if let Some(cert) = certificate.as_mut() {
            cert.tridiagonal_relation_residuals = residuals;
            cert.passed &= passed;
        }
    }
    if wants(CheckGroup::Modules) {
        match decompose(&g, &ops) {
            Ok(summary) => {
                let (l, r) = lowering_raising(&ops);
                records.extend(tag(CheckGroup::Modules, verify_modules(&g, &ops, &summary, &l, &r)));
                modules = Some(summarize(&g, &ops, &summary));
            }
            Err(e) => records.push(skipped(CheckGroup::Modules, &format!("decomposition failed: {e}"))),
        }
    }
    Ok(finish(&config, &spec, records, certificate, modules))
}

type SplitChecks = fn(&Geometry, &OperatorSet, &SplitData) -> Vec<CheckRecord>;

fn verify_split_bases(_: &Geometry, ops: &OperatorSet, data: &SplitData) -> Vec<CheckRecord> {
    verify_bases(ops, data)
}

fn finish(
    config: &RunConfig,
    spec: &FieldSpec,
    records: Vec<CheckRecord>,
    certificate: Option<crate::qpolyverify::QPolyCertificate>,
    modules: Option<crate::tmodule::DecompositionEcho>,
) -> VerificationReport {
    let mut report = VerificationReport::new(echo(config, spec), records);
    report.certificate = certificate;
    report.modules = modules;
    report
}

/// Names accepted by `dump`.
pub const DUMP_TARGETS: &str = "A, Astar, S, L, R, E<i>, Estar<i>, split-dd, split-du, split-ud, split-uu, hasse";

/// A matrix in the exactmat text format, or the Hasse edge list for `hasse`.
pub fn dump(config: &RunConfig, target: &str) -> Result<String> {
    let spec = config.validate()?;
    let g = Geometry::build(&spec, config.n, config.size_limit)?;
    if target == "hasse" {
        return Ok(g.edge_list());
    }
    if let Some(v) = target.strip_prefix("split-") {
        let variant = match v {
            "dd" => SplitVariant::DD,
            "du" => SplitVariant::DU,
            "ud" => SplitVariant::UD,
            "uu" => SplitVariant::UU,
            _ => return Err(Error::UnknownTarget(target.into())),
        };
        return Ok(build_family(&g, variant).matrix().dump());
    }
    let a = if config.inject_fault { faulty_adjacency(&g) } else { build_a(&g) };
    let ops = OperatorSet::with_adjacency(&g, a)?;
    let index = |prefix: &str| -> Result<Option<usize>> {
        match target.strip_prefix(prefix) {
            None | Some("") => Ok(None),
            Some(rest) => {
                let i: usize = rest.parse().map_err(|_| Error::UnknownTarget(target.into()))?;
                if i > config.n {
                    return Err(Error::OutOfRange { index: i, max: config.n });
                }
                Ok(Some(i))
            }
        }
    };
    let m = match target {
        "A" => ops.a,
        "Astar" => ops.a_star,
        "S" => ops.s,
        "L" => lowering_raising(&ops).0,
        "R" => lowering_raising(&ops).1,
        _ => {
            if let Some(i) = index("Estar")? {
                ops.e_star[i].clone()
            } else if let Some(i) = index("E")? {
                ops.e[i].clone()
            } else {
                return Err(Error::UnknownTarget(target.into()));
            }
        }
    };
    Ok(m.dump())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn group_names_and_aliases() {
        assert_eq!(CheckGroup::parse_list("all").unwrap(), CheckGroup::ALL.to_vec());
        assert_eq!(
            CheckGroup::parse_list("tridiag,spectral,qpoly").unwrap(),
            vec![CheckGroup::Operators, CheckGroup::QPoly, CheckGroup::Tridiag]
        );
        assert_eq!(CheckGroup::parse_list("split-decompositions,split-decompositions").unwrap(), vec![CheckGroup::SplitDecompositions]);
        assert_eq!(CheckGroup::parse_list("bogus"), Err(Error::UnknownCheck("bogus".into())));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn smallest_full_run() {
        let report = run(&RunConfig::new(2, 1)).unwrap();
        assert!(report.overall_pass(), "{}", report.to_human());
        assert!(report.checks.len() >= 20);
        assert!(report.checks.iter().all(|c| !c.group.is_empty()));
        assert!(report.certificate.as_ref().unwrap().passed);
        assert_eq!(report.modules.as_ref().unwrap().multiplicities, vec![1]);
    }

    #[test]
    fn only_requested_groups_appear() {
        let report = run(&RunConfig::new(2, 3).with_checks(vec![CheckGroup::QPoly, CheckGroup::Tridiag])).unwrap();
        assert!(report.overall_pass());
        assert!(report.checks.iter().all(|c| c.group == "qpoly" || c.group == "tridiag"));
        assert_eq!(report.checks.iter().filter(|c| c.group == "tridiag").count(), 3);
        let report = run(&RunConfig::new(2, 2).with_checks(vec![])).unwrap();
        assert!(report.checks.is_empty());
    }

    #[test]
    fn configuration_errors() {
        assert!(matches!(run(&RunConfig::new(2, 12)), Err(Error::SizeLimitExceeded { .. })));
        assert_eq!(run(&RunConfig::new(2, 0)).unwrap_err(), Error::EmptyAmbient);
        assert!(matches!(run(&RunConfig::new(4, 2)), Err(Error::MissingModulus(2))));
        assert!(matches!(run(&RunConfig::new(6, 2)), Err(Error::InvalidConfig(_))));
        let mut c = RunConfig::new(2, 2);
        c.modulus = Some(vec![1, 1]);
        assert_eq!(run(&c).unwrap_err(), Error::UnexpectedModulus);
    }

    #[test]
    fn extension_field_by_order_or_degree() {
        let by_order = RunConfig::new(4, 2).with_modulus(vec![1, 1, 1]);
        let mut by_degree = by_order.clone();
        by_degree.q = 2;
        by_degree.ext_degree = Some(2);
        assert_eq!(by_order.field_spec().unwrap(), by_degree.field_spec().unwrap());
        let report = run(&by_order).unwrap();
        assert!(report.overall_pass(), "{}", report.to_human());
        assert_eq!(report.config.q, 4);
    }

    #[test]
    fn injected_fault_is_reported() {
        let mut c = RunConfig::new(2, 2);
        c.inject_fault = true;
        let report = run(&c).unwrap();
        assert!(!report.overall_pass());
        let failed: Vec<_> = report.checks.iter().filter(|r| r.status == Status::Fail).collect();
        assert!(failed.iter().any(|r| r.group == "operators" || r.group == "qpoly" || r.group == "tridiag"));
        assert!(failed.iter().all(|r| r.witness.is_some()));
    }

    #[test]
    fn dumps() {
        let c = RunConfig::new(2, 2);
        let a = ExactMatrix::parse_dump(&dump(&c, "A").unwrap()).unwrap();
        assert_eq!(a.rows(), 5);
        assert_eq!(a.get(0, 1), &int(1));
        assert_eq!(dump(&c, "hasse").unwrap().lines().count(), 6);
        let e0 = ExactMatrix::parse_dump(&dump(&c, "E0").unwrap()).unwrap();
        assert_eq!(e0.rank(), 1);
        let es2 = ExactMatrix::parse_dump(&dump(&c, "Estar2").unwrap()).unwrap();
        assert_eq!(es2.trace(), int(1));
        assert!(ExactMatrix::parse_dump(&dump(&c, "split-uu").unwrap()).is_ok());
        assert!(matches!(dump(&c, "E3"), Err(Error::OutOfRange { .. })));
        assert!(matches!(dump(&c, "nothing"), Err(Error::UnknownTarget(_))));
    }
}
