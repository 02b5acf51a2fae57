//! Library results against brute-force oracles built only from field
//! arithmetic and subspace containment.

use lnq_core::exactmat::{int, qpow, ExactMatrix, Scalar};
use lnq_core::gfspace::{contains, FieldSpec, GaloisField, Subspace};
use lnq_core::operators::OperatorSet;
use lnq_core::pipeline::{run, CheckGroup, RunConfig};
use lnq_core::poset::Geometry;
use lnq_core::report::{Status, VerificationReport};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn geometry(q: u64, n: usize) -> Geometry {
    let spec = if q == 4 { FieldSpec::new(2, 2, Some(vec![1, 1, 1])) } else { FieldSpec::new(q, 1, None) };
    Geometry::build(&spec.unwrap(), n, 5000).unwrap()
}

// every vector of GF(q)^n, by mixed-radix index
fn all_vectors(field: &GaloisField, n: usize) -> Vec<Vec<lnq_core::gfspace::FieldElement>> {
    let q = field.q();
    (0..q.pow(n as u32))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let e = field.element(k % q).unwrap();
                    k /= q;
                    e
                })
                .collect()
        })
        .collect()
}

// A from containment alone: the weight from y to z is 1 when z is a
// hyperplane of y and q^dim y when y is a hyperplane of z.
fn naive_adjacency(g: &Geometry) -> ExactMatrix {
    let f = g.field();
    ExactMatrix::from_fn(g.len(), g.len(), |y, z| {
        let (vy, vz) = (g.vertex(y), g.vertex(z));
        if vz.dim() + 1 == vy.dim() && contains(f, vy, vz).unwrap() {
            Scalar::one()
        } else if vy.dim() + 1 == vz.dim() && contains(f, vz, vy).unwrap() {
            qpow(g.q(), vy.dim() as i64)
        } else {
            Scalar::zero()
        }
    })
}

fn naive_dual(g: &Geometry) -> ExactMatrix {
    let d: Vec<Scalar> = (0..g.len()).map(|y| qpow(g.q(), -(g.vertex(y).dim() as i64))).collect();
    ExactMatrix::diagonal(&d)
}

fn product(ms: &[&ExactMatrix]) -> ExactMatrix {
    ms[1..].iter().fold(ms[0].clone(), |acc, m| acc.mul(m).unwrap())
}

#[test]
fn adjacency_matches_containment() {
    for (q, n) in [(2, 1), (2, 3), (3, 2), (3, 3), (4, 2)] {
        let g = geometry(q, n);
        let ops = OperatorSet::build(&g).unwrap();
        assert_eq!(ops.a, naive_adjacency(&g), "q={q} N={n}");
        assert_eq!(ops.a_star, naive_dual(&g));
    }
}

#[test]
fn every_span_is_a_vertex() {
    for (q, n) in [(2, 3), (3, 2), (4, 2)] {
        let g = geometry(q, n);
        let vs = all_vectors(g.field(), n);
        let mut seen = std::collections::HashSet::new();
        for a in &vs {
            for b in &vs {
                let s = Subspace::span(g.field(), n, &[a.clone(), b.clone()]).unwrap();
                seen.insert(g.index_of(&s).expect("span is enumerated"));
            }
        }
        // subspaces of dimension at most 2
        let expected = g.vertices().iter().filter(|s| s.dim() <= 2).count();
        assert_eq!(seen.len(), expected);
    }
}

#[test]
fn tridiagonal_relations_from_naive_matrices() {
    for (q, n) in [(2, 3), (3, 2), (2, 4)] {
        let g = geometry(q, n);
        let (a, s) = (naive_adjacency(&g), naive_dual(&g));
        let qq = int(q as i64);
        let beta = &qq + int(1) / &qq;
        let three = [&beta + int(1), qpow(q, n as i64 - 2) * (&qq + int(1)) * (&qq + int(1))];
        let terms = |x: &ExactMatrix, y: &ExactMatrix| {
            let x2 = x.mul(x).unwrap();
            let x3 = x2.mul(x).unwrap();
            let lhs = product(&[&x3, y])
                .sub(&product(&[&x2, y, x]).scale(&three[0]))
                .unwrap()
                .add(&product(&[x, y, &x2]).scale(&three[0]))
                .unwrap()
                .sub(&product(&[y, &x3]))
                .unwrap();
            let comm = product(&[x, y]).sub(&product(&[y, x])).unwrap();
            (lhs, comm)
        };
        let (lhs, comm) = terms(&a, &s);
        assert_eq!(lhs, comm.scale(&three[1]), "first relation q={q} N={n}");
        let (lhs, _) = terms(&s, &a);
        assert!(lhs.is_zero(), "second relation q={q} N={n}");
    }
}

#[test]
fn far_blocks_vanish_with_independent_projectors() {
    let (q, n) = (3, 3);
    let g = geometry(q, n);
    let (a, s) = (naive_adjacency(&g), naive_dual(&g));
    let theta: Vec<Scalar> = (0..=n).map(|i| int((q.pow((n - i) as u32) as i64 - q.pow(i as u32) as i64) / (q as i64 - 1))).collect();
    let id = ExactMatrix::identity(g.len());
    let e: Vec<ExactMatrix> = (0..=n)
        .map(|i| {
            (0..=n).filter(|&j| j != i).fold(id.clone(), |acc, j| {
                let factor = a.sub(&id.scale(&theta[j])).unwrap().scale(&(int(1) / (&theta[i] - &theta[j])));
                acc.mul(&factor).unwrap()
            })
        })
        .collect();
    for i in 0..=n {
        assert_eq!(a.mul(&e[i]).unwrap(), e[i].scale(&theta[i]));
        for j in 0..=n {
            let block = product(&[&e[i], &s, &e[j]]);
            assert_eq!(block.is_zero(), i.abs_diff(j) > 1, "E_{i} A* E_{j}");
        }
    }
}

fn group_strategy() -> impl Strategy<Value = Vec<CheckGroup>> {
    proptest::sample::subsequence(CheckGroup::ALL.to_vec(), 0..=CheckGroup::ALL.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn requested_groups_only(q in prop::sample::select(vec![2u64, 3]), n in 1usize..=3, groups in group_strategy()) {
        let report = run(&RunConfig::new(q, n).with_checks(groups.clone())).unwrap();
        prop_assert!(report.overall_pass());
        let names: Vec<&str> = groups.iter().map(|g| g.name()).collect();
        for c in &report.checks {
            prop_assert!(names.contains(&c.group.as_str()), "{} not requested", c.group);
            prop_assert!(c.status == Status::Pass);
        }
        for g in &names {
            prop_assert!(report.checks.iter().any(|c| c.group == *g));
        }
        let mut ids: Vec<&str> = report.checks.iter().map(|c| c.id.as_str()).collect();
        ids.sort();
        let before = ids.len();
        ids.dedup();
        prop_assert_eq!(before, ids.len());
        prop_assert_eq!(report.summary.total, report.checks.len());
    }

    #[test]
    fn json_round_trip(n in 1usize..=3, groups in group_strategy(), fault in any::<bool>()) {
        let mut config = RunConfig::new(2, n).with_checks(groups);
        config.inject_fault = fault;
        let report = run(&config).unwrap();
        let back = VerificationReport::from_json(&report.to_json()).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert_eq!(back.overall_pass(), report.checks.iter().all(|c| c.status != Status::Fail));
    }

    #[test]
    fn containment_is_the_order(y in 0usize..67, z in 0usize..67) {
        let g = geometry(2, 4);
        let (vy, vz) = (g.vertex(y), g.vertex(z));
        prop_assert_eq!(g.le(y, z), contains(g.field(), vz, vy).unwrap());
    }
}
