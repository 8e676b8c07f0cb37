//! Seeded property suites run by `pou check`.
//!
//! Each suite draws its cases from a ChaCha8 generator seeded with the
//! requested seed and reports every failing case with its counterexample.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{One, Signed};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{
    approximates, common_simplex, derive, dyadic_layers, half_max_approx, integrate, join_points,
    shrink_wellordered, truncate_order,
};
use crate::complexes::{
    barycentric_subdivision, disjoint_layers_check, euler_characteristic, join_complexes, realize,
    star_refinement_witness, subdivision_coordinates, AbstractComplex, GeometricRealization,
};
use crate::random::{
    label_pool, random_chain, random_on, random_prob_vector, random_prob_vector_upto, seeded,
    uniform,
};
use crate::sampling::{cech_pipeline, MetricSample};
use crate::weights::{
    order, subset_l1_distance, ProbVector, Rational, SubsetKey, VertexLabel, WeightVector,
};

use super::document::{Document, Payload};

pub const SUITES: &[&str] = &[
    "roundtrip",
    "uniqueness",
    "chain",
    "order",
    "subdivision",
    "combinatorics",
    "join",
    "star",
    "layers",
    "kernels",
    "homotopy",
    "pipeline",
];

/// Listed failures per suite; the count is always exact.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub case: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.suites.iter().map(|s| s.passed).sum()
    }

    pub fn failed(&self) -> usize {
        self.suites.iter().map(|s| s.failed).sum()
    }
}

type CaseResult = Result<(), String>;

struct Runner {
    report: SuiteReport,
}

impl Runner {
    fn new(suite: &str, seed: u64) -> Self {
        Runner {
            report: SuiteReport {
                suite: suite.to_string(),
                seed,
                cases: 0,
                passed: 0,
                failed: 0,
                failures: Vec::new(),
            },
        }
    }

    fn record(&mut self, outcome: CaseResult) {
        let case = self.report.cases;
        self.report.cases += 1;
        match outcome {
            Ok(()) => self.report.passed += 1,
            Err(detail) => {
                self.report.failed += 1;
                if self.report.failures.len() < MAX_LISTED_FAILURES {
                    self.report.failures.push(Failure { case, detail });
                }
            }
        }
    }

    fn finish(self) -> SuiteReport {
        self.report
    }
}

fn ensure(condition: bool, detail: impl FnOnce() -> String) -> CaseResult {
    if condition {
        Ok(())
    } else {
        Err(detail())
    }
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run(name: &str, seed: u64, cases: usize) -> Option<Report> {
    let names: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&name) {
        vec![name]
    } else {
        return None;
    };
    let suites = names
        .into_iter()
        .map(|suite| run_suite(suite, seed, cases))
        .collect();
    Some(Report { suites })
}

fn run_suite(name: &str, seed: u64, cases: usize) -> SuiteReport {
    let mut runner = Runner::new(name, seed);
    let mut rng = seeded(seed);
    match name {
        "roundtrip" => roundtrip(&mut runner, &mut rng, cases),
        "uniqueness" => uniqueness(&mut runner, &mut rng, cases),
        "chain" => chain(&mut runner, &mut rng, cases),
        "order" => order_law(&mut runner, &mut rng, cases),
        "subdivision" => subdivision(&mut runner, &mut rng, cases),
        "combinatorics" => combinatorics(&mut runner),
        "join" => join(&mut runner, &mut rng, cases),
        "star" => star(&mut runner, &mut rng, cases),
        "layers" => layers(&mut runner, &mut rng, cases),
        "kernels" => kernels(&mut runner, &mut rng, cases),
        "homotopy" => homotopy(&mut runner, &mut rng, cases),
        "pipeline" => pipeline(&mut runner),
        _ => unreachable!("suite names are checked by run"),
    }
    runner.finish()
}

fn pool() -> Vec<VertexLabel> {
    label_pool(8)
}

fn roundtrip(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let pool = pool();
    for _ in 0..cases {
        let x = random_prob_vector(rng, &pool, 6);
        let back = integrate(&derive(&x));
        runner.record(ensure(back.as_ref() == Ok(&x), || {
            format!("x = {x}, integrate(derive(x)) = {back:?}")
        }));
    }
}

fn uniqueness(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let pool = pool();
    for _ in 0..cases {
        let d = random_chain(rng, &pool, 4);
        let outcome = integrate(&d).map_err(|e| e.to_string()).and_then(|x| {
            let again = derive(&x);
            ensure(again == d, || format!("d = {d}, derive(integrate(d)) = {again}"))
        });
        runner.record(outcome);
    }
}

/// Pairwise nesting of all keys plus unit mass.
fn chain_and_mass(x: &ProbVector) -> CaseResult {
    let d = derive(x);
    for (t, f) in d.keys().tuple_combinations() {
        if !t.is_subset_of(f) && !f.is_subset_of(t) {
            return Err(format!("x = {x}: keys {t} and {f} are not nested"));
        }
    }
    ensure(d.total().is_one(), || format!("x = {x}: derivative mass {}", d.total()))
}

fn chain(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let pool = pool();
    for _ in 0..cases {
        runner.record(chain_and_mass(&random_prob_vector(rng, &pool, 6)));
    }
    for n in 1..=6 {
        let x = uniform(&pool, n);
        let d = derive(&x);
        runner.record(chain_and_mass(&x).and_then(|()| {
            ensure(d.len() == 1, || format!("tied x = {x} derives to {d}"))
        }));
    }
}

fn order_law(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let pool = pool();
    for i in 0..cases {
        // every fourth case is drawn with weights in {1, 2}
        let x = if i % 4 == 3 {
            random_prob_vector_upto(rng, &pool, 6, 2)
        } else {
            random_prob_vector(rng, &pool, 6)
        };
        let largest = derive(&x).keys().map(SubsetKey::len).max().unwrap_or(0);
        runner.record(ensure(order(&x) + 1 == largest, || {
            format!("x = {x}: order {} but largest derived key has {largest}", order(&x))
        }));
    }
}

fn key_of(labels: &[&str]) -> SubsetKey {
    SubsetKey::new(labels.iter().map(|l| VertexLabel::new(*l).expect("valid"))).expect("nonempty")
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Triangle and tetrahedron with fixed, non-degenerate rational coordinates.
pub fn reference_realizations() -> Vec<GeometricRealization> {
    let l = |s: &str| VertexLabel::new(s).expect("valid");
    let triangle = BTreeMap::from([
        (l("a"), vec![q(0, 1), q(0, 1)]),
        (l("b"), vec![q(3, 1), q(1, 2)]),
        (l("c"), vec![q(-1, 1), q(2, 1)]),
    ]);
    let tetrahedron = BTreeMap::from([
        (l("a"), vec![q(0, 1), q(0, 1), q(0, 1)]),
        (l("b"), vec![q(2, 1), q(0, 1), q(0, 1)]),
        (l("c"), vec![q(1, 3), q(5, 1), q(0, 1)]),
        (l("d"), vec![q(1, 1), q(1, 1), q(7, 2)]),
    ]);
    vec![
        GeometricRealization::new(AbstractComplex::simplex(key_of(&["a", "b", "c"])), triangle)
            .expect("coordinates cover the triangle"),
        GeometricRealization::new(
            AbstractComplex::simplex(key_of(&["a", "b", "c", "d"])),
            tetrahedron,
        )
        .expect("coordinates cover the tetrahedron"),
    ]
}

fn subdivision(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let shapes: Vec<_> = reference_realizations()
        .into_iter()
        .map(|g| {
            let sd = g.barycentric_subdivision().expect("small complexes subdivide");
            (g, sd)
        })
        .collect();
    for i in 0..cases {
        let (g, sd) = &shapes[i % shapes.len()];
        let labels: Vec<_> = g.complex().vertices().iter().cloned().collect();
        let x = random_on(rng, &labels);
        let outcome = subdivision_coordinates(&x, g.complex())
            .and_then(|y| Ok((realize(&x, g)?, realize(&y, sd)?, y)))
            .map_err(|e| e.to_string())
            .and_then(|(direct, via, y)| {
                ensure(direct == via, || format!("x = {x}: {direct:?} vs {via:?}"))?;
                let support = y.support_key().expect("nonempty");
                ensure(sd.complex().contains(&support), || {
                    format!("x = {x}: support {support} is not a chain simplex")
                })
            });
        runner.record(outcome);
    }
}

fn combinatorics(runner: &mut Runner) {
    let triangle = AbstractComplex::simplex(key_of(&["a", "b", "c"]));
    let outcome = barycentric_subdivision(&triangle)
        .and_then(|sd| sd.f_vector())
        .map_err(|e| e.to_string())
        .and_then(|f| ensure(f == [7, 12, 6], || format!("sd(triangle) f-vector {f:?}")));
    runner.record(outcome);

    let shapes = [
        ("triangle", triangle),
        (
            "hollow triangle",
            AbstractComplex::simplex_boundary(&key_of(&["a", "b", "c"])),
        ),
        (
            "hollow tetrahedron",
            AbstractComplex::simplex_boundary(&key_of(&["a", "b", "c", "d"])),
        ),
    ];
    for (name, shape) in shapes {
        let outcome = (|| {
            let chi = euler_characteristic(&shape).map_err(|e| e.to_string())?;
            let mut current = shape;
            for step in 1..=3 {
                current = barycentric_subdivision(&current).map_err(|e| e.to_string())?;
                let now = euler_characteristic(&current).map_err(|e| e.to_string())?;
                ensure(now == chi, || format!("{name}: chi {chi} became {now} at step {step}"))?;
            }
            Ok(())
        })();
        runner.record(outcome);
    }
}

/// Point, edge and hollow triangle on the given labels.
fn small_complexes(labels: [&str; 3]) -> Vec<AbstractComplex> {
    let [a, b, c] = labels;
    vec![
        AbstractComplex::simplex(key_of(&[a])),
        AbstractComplex::simplex(key_of(&[a, b])),
        AbstractComplex::simplex_boundary(&key_of(&[a, b, c])),
    ]
}

/// Every nonempty subset of the joint alphabet satisfies the trace rule.
fn join_membership(k: &AbstractComplex, l: &AbstractComplex) -> CaseResult {
    let kl = join_complexes(k, l).map_err(|e| e.to_string())?;
    let alphabet: Vec<_> = k.vertices().iter().chain(l.vertices()).cloned().collect();
    for size in 1..=alphabet.len() {
        for subset in alphabet.iter().cloned().combinations(size) {
            let t = SubsetKey::new(subset).expect("nonempty");
            let in_k = t
                .labels()
                .iter()
                .filter(|s| k.vertices().contains(*s))
                .cloned()
                .collect_vec();
            let in_l = t
                .labels()
                .iter()
                .filter(|s| l.vertices().contains(*s))
                .cloned()
                .collect_vec();
            let trace_ok = |trace: Vec<VertexLabel>, c: &AbstractComplex| {
                SubsetKey::new(trace).map_or(true, |key| c.contains(&key))
            };
            let expected = trace_ok(in_k, k) && trace_ok(in_l, l);
            ensure(kl.contains(&t) == expected, || {
                format!("{t}: membership {} but trace rule says {expected}", kl.contains(&t))
            })?;
        }
    }
    Ok(())
}

fn random_point_of<R: Rng>(rng: &mut R, k: &AbstractComplex) -> ProbVector {
    let facets: Vec<_> = k.facets().iter().collect();
    let facet = facets.choose(rng).expect("nonempty complex");
    random_on(rng, facet.labels())
}

fn join(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let left = small_complexes(["a", "b", "c"]);
    let right = small_complexes(["x", "y", "z"]);
    for k in &left {
        for l in &right {
            runner.record(join_membership(k, l));
        }
    }
    for _ in 0..cases {
        let k = left.choose(rng).expect("nonempty");
        let l = right.choose(rng).expect("nonempty");
        let f = random_point_of(rng, k);
        let g = random_point_of(rng, l);
        let alpha = q(rng.gen_range(0..=12), 12);
        let outcome = join_complexes(k, l)
            .and_then(|kl| Ok((kl, join_points(Some(&f), Some(&g), &alpha)?)))
            .map_err(|e| e.to_string())
            .and_then(|(kl, h)| {
                let support = h.support_key().expect("nonempty");
                ensure(kl.contains(&support), || {
                    format!("f = {f}, g = {g}, alpha = {alpha}: support {support} not in join")
                })
            });
        runner.record(outcome);
    }
}

fn star(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let pool = label_pool(5);
    for _ in 0..cases {
        let points: Vec<_> = (0..100).map(|_| random_prob_vector(rng, &pool, 5)).collect();
        runner.record(star_refinement_witness(&points).map(drop).map_err(|e| e.to_string()));
    }
}

fn layers(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let pool = pool();
    for _ in 0..cases {
        let x = random_prob_vector(rng, &pool, 6);
        let d = derive(&x);
        let outcome = (1..=6).try_for_each(|size| {
            let count = d.keys().filter(|k| k.len() == size).count();
            let certificate = disjoint_layers_check(std::slice::from_ref(&x), size);
            ensure(count <= 1 && certificate.holds(), || {
                format!("x = {x}: {count} keys of size {size}")
            })
        });
        runner.record(outcome);
    }
}

fn kernels(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let pool = pool();
    for i in 0..cases {
        let x = random_prob_vector(rng, &pool, 6);
        runner.record(check_kernels(&x, 1 + i % 4));
    }
}

fn check_kernels(x: &ProbVector, depth: usize) -> CaseResult {
    let top = x.max_weight();
    let ordering: Vec<_> = x.support().cloned().collect();
    let shrunk = shrink_wellordered(x, &ordering).map_err(|e| e.to_string())?;
    let mass = shrunk.total();
    ensure(mass.is_positive() && mass <= top, || {
        format!("x = {x}: shrink mass {mass} outside (0, {top}]")
    })?;

    let layers = dyadic_layers(x, depth);
    let resum = layers.iter().fold(WeightVector::new(), |acc, w| acc.add(w));
    ensure(&resum == x.as_weights(), || format!("x = {x}: layers resum to {resum}"))?;
    let mut expected = top.clone();
    for (k, layer) in layers.iter().enumerate() {
        if k < depth {
            expected /= Rational::from_integer(2.into());
        }
        ensure(layer.max_weight() == expected, || {
            format!("x = {x}: layer {k} has max {} not {expected}", layer.max_weight())
        })?;
    }

    let half = half_max_approx(x);
    ensure(approximates(&half, x), || format!("x = {x}: half-max {half} escapes support"))?;

    for n in 0..=2 {
        match truncate_order(x, n) {
            Ok(t) => ensure(order(&t) <= n && approximates(&t, x), || {
                format!("x = {x}: truncation to order {n} gave {t}")
            })?,
            Err(_) => ensure(derive(x).keys().all(|k| k.len() > n + 1), || {
                format!("x = {x}: truncation to order {n} failed with small keys present")
            })?,
        }
    }
    Ok(())
}

fn homotopy(runner: &mut Runner, rng: &mut ChaCha8Rng, cases: usize) {
    let pool = pool();
    for _ in 0..cases {
        let f = random_prob_vector(rng, &pool, 6);
        let g = random_prob_vector(rng, &pool, 6);
        runner.record(check_common_simplex(&f, &g));
    }
    let a = ProbVector::vertex(VertexLabel::new("a").expect("valid"));
    let b = ProbVector::vertex(VertexLabel::new("b").expect("valid"));
    let distance = subset_l1_distance(&derive(&a), &derive(&b));
    runner.record(ensure(
        distance == Rational::from_integer(2.into()) && common_simplex(&a, &b).is_none(),
        || format!("vertices a, b: distance {distance}, common {:?}", common_simplex(&a, &b)),
    ));
}

fn check_common_simplex(f: &ProbVector, g: &ProbVector) -> CaseResult {
    let (df, dg) = (derive(f), derive(g));
    let close = subset_l1_distance(&df, &dg) < Rational::from_integer(2.into());
    match common_simplex(f, g) {
        Some(t) => ensure(df.contains_key(&t) && dg.contains_key(&t), || {
            format!("f = {f}, g = {g}: {t} is not carried by both")
        }),
        None => ensure(!close, || format!("f = {f}, g = {g}: close but no common simplex")),
    }
}

/// Three points at 0, 1, 2 on a line.
pub fn colinear_sample() -> MetricSample {
    let ids = ["b0", "b1", "b2"]
        .iter()
        .map(|s| VertexLabel::new(*s).expect("valid"))
        .collect();
    let coords: Vec<_> = (0..3).map(|i| vec![q(i, 1)]).collect();
    MetricSample::from_l1_coordinates(ids, &coords).expect("a line is a metric")
}

/// Nerve from ball membership alone: each point contributes the set of
/// centers within the radius.
pub fn membership_nerve(sample: &MetricSample, radius: &Rational) -> AbstractComplex {
    let n = sample.len();
    let sets = (0..n).filter_map(|x| {
        SubsetKey::new(
            (0..n)
                .filter(|&c| sample.distance(x, c) < radius)
                .map(|c| sample.ids()[c].clone()),
        )
        .ok()
    });
    AbstractComplex::from_facets(sets)
}

fn pipeline(runner: &mut Runner) {
    let sample = colinear_sample();
    let radius = q(3, 2);
    let emit = || {
        cech_pipeline(&sample, &radius)
            .map(|out| Document::new(Payload::Pipeline(out)).emit())
            .map_err(|e| e.to_string())
    };
    let outcome = emit().and_then(|first| {
        let second = emit()?;
        ensure(first == second, || "pipeline output differs between runs".into())
    });
    runner.record(outcome);

    let expected = membership_nerve(&sample, &radius);
    let outcome = cech_pipeline(&sample, &radius)
        .map_err(|e| e.to_string())
        .and_then(|out| {
            ensure(out.nerve == expected, || {
                format!("nerve {:?} differs from membership nerve {expected:?}", out.nerve)
            })?;
            ensure(
                out.nerve == AbstractComplex::simplex(key_of(&["b0", "b1", "b2"])),
                || "nerve is not the full triangle on b0, b1, b2".into(),
            )
        });
    runner.record(outcome);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_small() {
        let report = run("all", 3, 30).unwrap();
        for s in &report.suites {
            assert_eq!(s.failed, 0, "{}: {:?}", s.suite, s.failures);
            assert!(s.cases > 0);
        }
        assert_eq!(report.suites.len(), SUITES.len());
    }

    #[test]
    fn unknown_suite() {
        assert!(run("nope", 0, 1).is_none());
    }

    #[test]
    fn failures_are_recorded_with_detail() {
        let mut runner = Runner::new("demo", 0);
        runner.record(Ok(()));
        runner.record(Err("x = {a:1}".into()));
        let report = runner.finish();
        assert_eq!((report.cases, report.passed, report.failed), (2, 1, 1));
        assert_eq!(report.failures[0], Failure { case: 1, detail: "x = {a:1}".into() });
    }
}
