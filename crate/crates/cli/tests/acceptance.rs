//! Acceptance suite: every criterion over every target configuration, one
//! PASS/FAIL line per criterion on stdout.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use lnq_core::pipeline::{run, RunConfig};
use lnq_core::poset::Geometry;
use lnq_core::report::{Status, VerificationReport};
use serde_json::Value;

#[derive(Clone, Copy)]
struct Target {
    q: u64,
    n: usize,
}

impl Target {
    fn config(self) -> RunConfig {
        let c = RunConfig::new(self.q, self.n);
        if self.q == 4 { c.with_modulus(vec![1, 1, 1]) } else { c }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(q={}, N={})", self.q, self.n)
    }
}

fn targets() -> Vec<Target> {
    let mut out = Vec::new();
    out.extend((1..=5).map(|n| Target { q: 2, n }));
    out.extend((1..=4).map(|n| Target { q: 3, n }));
    out.extend((1..=3).map(|n| Target { q: 4, n }));
    out
}

// q-binomials from the q-Pascal recurrence, independent of the library.
fn q_binomial(n: usize, k: usize, q: u128) -> u128 {
    let mut row = vec![1u128];
    for m in 1..=n {
        let mut next = vec![1u128; m + 1];
        for j in 1..m {
            next[j] = row[j - 1] + q.pow(j as u32) * row[j];
        }
        row = next;
    }
    if k > n { 0 } else { row[k] }
}

fn subspace_total(n: usize, q: u128) -> u128 {
    (0..=n).map(|k| q_binomial(n, k, q)).sum()
}

fn theta(q: i128, n: usize, i: usize) -> i128 {
    (q.pow((n - i) as u32) - q.pow(i as u32)) / (q - 1)
}

struct Run {
    target: Target,
    report: VerificationReport,
}

impl Run {
    fn records<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a lnq_core::report::CheckRecord> + 'a {
        self.report.checks.iter().filter(move |c| c.id.starts_with(prefix))
    }

    /// Every listed id (or prefix) is present and passes; returns the summed wall time.
    fn require(&self, prefixes: &[&str]) -> Result<f64, String> {
        let mut ms = 0.0;
        for p in prefixes {
            let recs: Vec<_> = self.records(p).collect();
            if recs.is_empty() {
                return Err(format!("{}: no record {p}", self.target));
            }
            for r in recs {
                if r.status != Status::Pass {
                    return Err(format!("{}: {} is {:?} {:?}", self.target, r.id, r.status, r.witness));
                }
                ms += r.wall_time_ms;
            }
        }
        Ok(ms)
    }
}

type Verdict = Result<String, String>;

fn counting(runs: &[Run]) -> Verdict {
    let mut slowest = Duration::ZERO;
    for r in runs {
        let t = r.target;
        let spec = t.config().field_spec().map_err(|e| e.to_string())?;
        let start = Instant::now();
        let g = Geometry::build(&spec, t.n, 5000).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        let want = subspace_total(t.n, t.q as u128);
        if g.len() as u128 != want {
            return Err(format!("{t}: {} vertices, expected {want}", g.len()));
        }
        if elapsed >= Duration::from_secs(1) {
            return Err(format!("{t}: enumeration took {elapsed:?}"));
        }
        r.require(&["poset.vertex-count"])?;
    }
    let lit = |q, n| subspace_total(n, q);
    if lit(2, 4) != 67 || lit(2, 5) != 374 {
        return Err("literal counts differ".into());
    }
    Ok(format!("counts match, slowest enumeration {slowest:?}"))
}

fn distances(runs: &[Run]) -> Verdict {
    let mut worst = 0.0f64;
    for r in runs {
        let ms = r.require(&[
            "poset.cover-relation",
            "poset.distance-equals-dimension",
            "poset.local-valencies",
            "poset.sphere-sizes",
        ])?;
        if ms >= 1000.0 {
            return Err(format!("{}: {ms} ms", r.target));
        }
        worst = worst.max(ms);
    }
    Ok(format!("slowest {worst:.1} ms"))
}

fn spectral(runs: &[Run]) -> Verdict {
    let mut worst = 0.0f64;
    for r in runs {
        let ms = r.require(&[
            "spectral.idempotents-sum-to-identity",
            "spectral.idempotents-orthogonal",
            "spectral.decomposition",
            "spectral.eigenprojections",
            "spectral.idempotent-ranks",
            "spectral.idempotent-traces",
            "spectral.adjacency-algebra",
            "operators.eigenvalues",
        ])?;
        if ms >= 120_000.0 {
            return Err(format!("{}: {:.1} s", r.target, ms / 1000.0));
        }
        worst = worst.max(ms);
    }
    Ok(format!("slowest {:.1} s", worst / 1000.0))
}

fn dual_adjacency_blocks(runs: &[Run]) -> Verdict {
    for r in runs {
        r.require(&["qpoly.dual-adjacency-far-blocks", "qpoly.adjacency-block-tridiagonal", "qpoly.proof-replay"])?;
        let cert = r.report.certificate.as_ref().ok_or(format!("{}: no certificate", r.target))?;
        let n = r.target.n;
        let far = &cert.block_tridiag_astar_in_e;
        let far_zero = far.iter().all(|b| b.zero && b.i.abs_diff(b.j) > 1);
        if !cert.passed || !far_zero || far.len() != n * (n - 1) || cert.near_blocks.len() != 2 * n {
            return Err(format!("{}: certificate rejects", r.target));
        }
    }
    Ok("all far blocks exactly zero, proof replay agrees".into())
}

fn tridiagonal(runs: &[Run]) -> Verdict {
    for r in runs {
        r.require(&["tridiag.first-relation", "tridiag.second-relation", "tridiag.scalar-identity"])?;
        let cert = r.report.certificate.as_ref().ok_or(format!("{}: no certificate", r.target))?;
        if cert.tridiagonal_relation_residuals.iter().any(Option::is_some) {
            return Err(format!("{}: nonzero residual", r.target));
        }
        let (q, n) = (r.target.q as i128, r.target.n);
        for i in 0..n {
            let (a, b) = (theta(q, n, i), theta(q, n, i + 1));
            // scaled by q: q a^2 - (q^2 + 1) a b + q b^2 = q^(N-1) (q+1)^2
            let lhs = q * a * a - (q * q + 1) * a * b + q * b * b;
            let rhs = (q + 1).pow(2) * q.pow(n as u32 - 1);
            if lhs != rhs {
                return Err(format!("{}: scalar identity fails at i={i}", r.target));
            }
        }
    }
    Ok("both residuals zero, scalar identity holds".into())
}

fn split_suite(runs: &[Run]) -> Verdict {
    let mut ids = vec!["split.sign-swap".to_string(), "split.partial-sums.".into(), "split.dd.annihilation".into()];
    for v in ["dd", "du", "ud", "uu"] {
        for what in [
            "basis",
            "adjacency-action",
            "dual-adjacency-action",
            "decomposition-dimensions",
            "flag-intersection",
            "triangular-spans",
            "raising-inclusion",
            "lowering-inclusion",
        ] {
            ids.push(format!("split.{v}.{what}"));
        }
    }
    let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
    for r in runs {
        r.require(&ids)?;
        if r.records("split.partial-sums.").count() != 4 {
            return Err(format!("{}: expected four partial-sum families", r.target));
        }
    }
    Ok(format!("{} checks per configuration", ids.len() + 3))
}

fn modules(runs: &[Run]) -> Verdict {
    for r in runs {
        r.require(&["modules."])?;
        let (q, n) = (r.target.q as u128, r.target.n);
        let echo = r.report.modules.as_ref().ok_or(format!("{}: no module summary", r.target))?;
        let want: Vec<usize> = (0..=n / 2)
            .map(|k| (q_binomial(n, k, q) - if k == 0 { 0 } else { q_binomial(n, k - 1, q) }) as usize)
            .collect();
        if echo.multiplicities != want {
            return Err(format!("{}: multiplicities {:?}, expected {want:?}", r.target, echo.multiplicities));
        }
        let dim: usize = want.iter().enumerate().map(|(k, m)| m * (n - 2 * k + 1)).sum();
        if dim as u128 != subspace_total(n, q) || echo.total_dimension != dim {
            return Err(format!("{}: dimension sum {dim}", r.target));
        }
        for class in &echo.classes {
            let k = class.endpoint;
            let t = theta(q as i128, n, k);
            if class.leonard.theta0 != format!("{t}/1") || class.eigenvalues.first() != Some(&class.leonard.theta0) {
                return Err(format!("{}: module with endpoint {k} has theta0 {}", r.target, class.leonard.theta0));
            }
            if class.leonard.d != n - 2 * k || class.diameter != n - 2 * k || class.multiplicity != want[k] {
                return Err(format!("{}: module with endpoint {k} has diameter {}", r.target, class.diameter));
            }
        }
        if echo.classes.len() != want.len() {
            return Err(format!("{}: {} isomorphism classes", r.target, echo.classes.len()));
        }
    }
    let at_2_4: usize = [(1, 5), (14, 3), (20, 1)].iter().map(|(m, d)| m * d).sum();
    if at_2_4 != 67 {
        return Err("dimension sum at (2,4) is not 67".into());
    }
    Ok("multiplicities, dimensions and Leonard parameters match".into())
}

fn lnq(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lnq")).args(args).output().expect("lnq runs")
}

fn fault_detection() -> Verdict {
    let out = lnq(&["verify", "--q", "2", "--N", "3", "--inject-fault", "--format", "json"]);
    if out.status.success() {
        return Err("exit status 0 with an injected fault".into());
    }
    let report: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let caught: Vec<&str> = report["checks"]
        .as_array()
        .ok_or("no checks array")?
        .iter()
        .filter(|c| c["status"] == "fail" && c.get("witness").is_some())
        .filter_map(|c| c["id"].as_str())
        .filter(|id| id.starts_with("spectral.") || id.starts_with("qpoly.") || id.starts_with("tridiag."))
        .collect();
    if caught.is_empty() {
        return Err("no spectral, qpoly or tridiag failure carries a witness".into());
    }
    Ok(format!("exit {:?}, {} witnessed failures such as {}", out.status.code(), caught.len(), caught[0]))
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_time_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(xs) => xs.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn determinism() -> Verdict {
    let args = ["verify", "--q", "2", "--N", "3", "--format", "json"];
    let runs: Vec<Value> = (0..2)
        .map(|_| {
            let out = lnq(&args);
            assert!(out.status.success());
            let mut v: Value = serde_json::from_slice(&out.stdout).expect("json");
            strip_timing(&mut v);
            v
        })
        .collect();
    let bytes: Vec<String> = runs.iter().map(|v| serde_json::to_string_pretty(v).unwrap()).collect();
    if bytes[0] != bytes[1] {
        return Err("reports differ".into());
    }
    Ok(format!("{} bytes identical", bytes[0].len()))
}

#[test]
fn acceptance() {
    let runs: Vec<Run> = targets()
        .into_iter()
        .map(|target| Run { target, report: run(&target.config()).expect("valid configuration") })
        .collect();
    let results: Vec<(&str, Verdict)> = vec![
        ("subspace counts", counting(&runs)),
        ("distance, valency and sphere sizes", distances(&runs)),
        ("spectral idempotents", spectral(&runs)),
        ("dual adjacency block tridiagonal", dual_adjacency_blocks(&runs)),
        ("tridiagonal relations", tridiagonal(&runs)),
        ("split bases and decompositions", split_suite(&runs)),
        ("irreducible module decomposition", modules(&runs)),
        ("fault detection", fault_detection()),
        ("deterministic JSON", determinism()),
    ];
    let mut stdout = std::io::stdout().lock();
    for (k, (name, verdict)) in results.iter().enumerate() {
        let (tag, msg) = match verdict {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        writeln!(stdout, "criterion {} [{tag}] {name}: {msg}", k + 1).unwrap();
    }
    let failed: Vec<_> = results.iter().filter(|(_, v)| v.is_err()).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
