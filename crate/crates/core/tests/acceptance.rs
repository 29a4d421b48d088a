//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Signed;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use common::oracle::{fm_disagreement, monotonicity_violation, polymatroid_violations, random_instance, random_system};
use common::{canonical, paper, point, system, unit_weights};
use indexcode::builtin;
use indexcode::composite::max_weighted_rate;
use indexcode::mac::{conditional_mutual_info, MacModel, DEFAULT_PRECISION_BITS};
use indexcode::model::SourceSet;
use indexcode::polytope::{fm_eliminate, poly_contains_poly, remove_redundant, Polyhedron, Variable};
use indexcode::rational::{self, int, ratio, Rational};
use indexcode::sim::{simulate_exhaustive, timeshare};

type Failures = Vec<String>;

fn check(failures: &mut Failures, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn equivalent(a: &Polyhedron, b: &Polyhedron) -> bool {
    poly_contains_poly(a, b) && poly_contains_poly(b, a)
}

fn project_out(p: &Polyhedron, keep: impl Fn(&Variable) -> bool) -> Polyhedron {
    let gone: Vec<Variable> = p.variables().iter().filter(|v| !keep(v)).cloned().collect();
    remove_redundant(&fm_eliminate(p, &gone))
}

fn rates(instance: &indexcode::model::Instance, values: &[&str]) -> BTreeMap<Variable, Rational> {
    point(instance, values)
}

fn block_after<'a>(text: &'a str, header: &str) -> Vec<&'a str> {
    text.lines()
        .skip_while(|l| !l.starts_with(header))
        .skip(1)
        .take_while(|l| !l.is_empty())
        .collect()
}

const EXAMPLE2: [&str; 4] = ["R1 + R2 <= 1", "R1 + R3 <= 1", "R1 + R4 <= 1", "R3 + R4 <= 1"];

fn criterion1() -> Failures {
    let mut f = Failures::new();
    let out = Command::new(env!("CARGO_BIN_EXE_indexcode"))
        .args(["example", "central-1234"])
        .output()
        .expect("binary runs");
    check(&mut f, out.status.success(), || format!("exit status {:?}", out.status.code()));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut region: Vec<String> = block_after(&text, "polyhedron 1:").iter().map(|l| l.trim().to_string()).collect();
    region.sort();
    check(&mut f, region == canonical(&EXAMPLE2), || format!("region {region:?}"));
    check(&mut f, text.contains("weighted sum-rate: 2 = 2.0000"), || "sum-rate is not 2".into());
    let target = "achieved rates: R1 = 1/2 = 0.5000, R2 = 1/2 = 0.5000, R3 = 1/2 = 0.5000, R4 = 1/2 = 0.5000";
    check(&mut f, text.contains(target), || "simulated rates are not 1/2 each".into());
    check(&mut f, text.contains("inside region: yes"), || "simulated point outside region".into());
    f
}

fn criterion2() -> Failures {
    let mut f = Failures::new();
    let ex = paper("dist-12-34");
    let blocks = system(&[
        "R1 <= S{1}",
        "R2 <= S{1,2}",
        "R1 + R2 <= S{1} + S{1,2}",
        "R3 <= S{3}",
        "R4 <= S{4}",
        "R1 + R4 <= S{1} + S{1,2} + S{4}",
        "S{1} + S{1,2} <= 1",
        "S{1} + S{1,2} + S{3} <= 1.5",
        "S{3} + S{4} <= 1",
        "S{1} + S{1,2} + S{4} <= 1.5",
    ]);
    let assembled = ex.system().polyhedron;
    check(&mut f, equivalent(&assembled, &blocks), || {
        format!("assembled system differs from the published blocks:\n{assembled}")
    });
    let expected = canonical(&["R1 + R2 <= 1", "R3 + R4 <= 1", "R1 + R2 + R3 <= 3/2", "R1 + R2 + R4 <= 3/2"]);
    check(&mut f, ex.lines() == expected, || format!("region {:?}", ex.lines()));
    let (instance, scheme) = builtin::builtin_scheme("dist-12-34").unwrap();
    let report = simulate_exhaustive(&instance, &scheme).unwrap();
    let achieved = report.rate_vector(&instance);
    check(&mut f, achieved == rates(&instance, &["1/2"; 4]), || format!("rates {achieved:?}"));
    check(&mut f, ex.region.contains_point(&achieved), || "simulated point outside region".into());
    f
}

fn criterion3() -> Failures {
    let mut f = Failures::new();
    let ex = paper("dist-14-23");
    let printed = canonical(&[
        "R1 + R2 + R3 <= 3/2",
        "R1 + R2 + R4 <= 3/2",
        "R1 + R4 <= 1",
        "R2 <= 1",
        "R3 <= 1",
    ]);
    check(&mut f, ex.lines() == printed, || {
        format!("region {:?} differs from the required {:?}", ex.lines(), printed)
    });
    let sum = max_weighted_rate(&ex.region, &unit_weights(&ex.instance)).unwrap();
    check(&mut f, sum == ratio(5, 2), || format!("sum-rate {sum}"));
    let p = rates(&ex.instance, &["1/4", "1", "1", "1/4"]);
    check(&mut f, ex.region.contains_point(&p), || "(1/4,1,1,1/4) is not a member".into());
    f
}

fn criterion4() -> Failures {
    let mut f = Failures::new();
    let ex = paper("dist-14-123");
    let sys = ex.system();
    let mac1: Vec<String> = sys.per_receiver[0].1.iter().map(|q| q.to_string()).collect();
    check(&mut f, mac1.iter().any(|l| l == "S{1,4} <= 1"), || format!("receiver 1 MAC dump {mac1:?}"));
    check(&mut f, !mac1.iter().any(|l| l.starts_with("S{1} <=")), || "standalone S{1} bound present".into());
    let seven = canonical(&[
        "R2 <= 1",
        "R3 <= 1",
        "R4 <= 1",
        "R1 + R2 <= 1.5",
        "R1 + R3 <= 1.5",
        "R3 + R4 <= 1.5",
        "R1 + R4 <= 1.5",
    ]);
    check(&mut f, ex.lines() == seven, || format!("region {:?}", ex.lines()));

    let (instance, scheme) = builtin::builtin_scheme("dist-14-123").unwrap();
    let report = simulate_exhaustive(&instance, &scheme).unwrap();
    for r in &report.receivers {
        let rows = &r.decode_table[0];
        let ys: Vec<i64> = rows.iter().map(|row| row.y).collect();
        check(&mut f, ys == [0, 1, 2], || format!("receiver {} outputs {ys:?}", r.receiver));
        let erasing_receiver = r.receiver == 1 || r.receiver == 3;
        for row in rows {
            let erases = row.decoded < row.tuples;
            let expect = erasing_receiver && row.y == 1;
            check(&mut f, erases == expect && (row.decoded == 0 || row.decoded == row.tuples), || {
                format!("receiver {} at Y={}: {}/{} decoded", r.receiver, row.y, row.decoded, row.tuples)
            });
        }
        let expected = if erasing_receiver { ratio(1, 2) } else { int(0) };
        check(&mut f, r.wanted[0].erasure == expected, || {
            format!("receiver {} erasure {}", r.receiver, r.wanted[0].erasure)
        });
    }
    let achieved = report.rate_vector(&instance);
    check(&mut f, achieved == rates(&instance, &["1/2", "1", "1/2", "1"]), || format!("rates {achieved:?}"));
    let sum = achieved.values().fold(int(0), |a, r| a + r);
    check(&mut f, sum == int(3), || format!("sum {sum}"));
    f
}

fn criterion5() -> Failures {
    let mut f = Failures::new();
    let ex = paper("striped-2");
    let stripes = remove_redundant(&fm_eliminate(
        &ex.system().polyhedron,
        &ex.system()
            .polyhedron
            .variables()
            .iter()
            .filter(|v| !v.is_rate())
            .cloned()
            .collect::<Vec<_>>(),
    ));
    for k in 1..=2 {
        let suffix = format!(".p{k}");
        let own = project_out(&stripes, |v| v.to_string().ends_with(&suffix));
        let lifted: Vec<String> = EXAMPLE2
            .iter()
            .map(|q| q.replace(" +", &format!("{suffix} +")).replace(" <=", &format!("{suffix} <=")))
            .collect();
        let lifted: Vec<&str> = lifted.iter().map(String::as_str).collect();
        check(&mut f, own.render_lines() == canonical(&lifted), || {
            format!("stripe {k} region {:?}", own.render_lines())
        });
    }
    let aggregated = ex.lines();
    for q in ["R1 + R2 <= 3/2", "R1 + R3 <= 3/2", "R1 + R4 <= 3/2", "R3 + R4 <= 3/2"] {
        check(&mut f, aggregated.contains(&canonical(&[q])[0]), || format!("aggregated region lacks {q}"));
    }
    let reports: Vec<_> = builtin::example_schemes("striped-2")
        .iter()
        .map(|name| {
            let (instance, scheme) = builtin::builtin_scheme(name).unwrap();
            simulate_exhaustive(&instance, &scheme).unwrap()
        })
        .collect();
    let mixed = timeshare(&reports, &vec![ratio(1, reports.len() as i64); reports.len()]).unwrap();
    let achieved = mixed.rate_vector(&ex.instance);
    check(&mut f, achieved == rates(&ex.instance, &["3/4"; 4]), || format!("time-shared rates {achieved:?}"));
    check(&mut f, ex.region.contains_point(&achieved), || "time-shared point outside region".into());
    f
}

fn criterion6() -> Failures {
    let mut f = Failures::new();
    let ex = paper("mds-3-2");
    let mi3 = conditional_mutual_info(ex.instance.mac(), SourceSet::full(3), DEFAULT_PRECISION_BITS).unwrap();
    let b = rational::render(&mi3);
    let pairs: Vec<String> = ["R1 + R2", "R1 + R3", "R1 + R4", "R3 + R4"]
        .iter()
        .map(|l| format!("{l} <= {b}"))
        .collect();
    let pairs: Vec<&str> = pairs.iter().map(String::as_str).collect();
    check(&mut f, ex.lines() == canonical(&pairs), || format!("region {:?}", ex.lines()));
    let near = |x: &Rational, target: &str, tol: &str| {
        (x - rational::parse(target).unwrap()).abs() <= rational::parse(tol).unwrap()
    };
    check(&mut f, near(&mi3, "1.81", "0.005"), || format!("pair bound {}", rational::render_decimal(&mi3, 4)));
    let sum = max_weighted_rate(&ex.region, &unit_weights(&ex.instance)).unwrap();
    check(&mut f, sum == &mi3 * int(2) && near(&sum, "3.62", "0.005"), || {
        format!("total {}", rational::render_decimal(&sum, 4))
    });
    // boundary of the diagonal: the largest t with (t, t, t, t) in the region
    let t_star = ex
        .polyhedron()
        .inequalities()
        .iter()
        .filter_map(|q| {
            let s = q.coeffs().values().fold(int(0), |a, c| a + c);
            (s > int(0)).then(|| q.bound() / s)
        })
        .min()
        .unwrap();
    let sym = rates(&ex.instance, &["0.905"; 4]);
    check(&mut f, ex.region.contains_point(&sym), || "(0.905, ...) is not a member".into());
    check(&mut f, near(&t_star, "0.905", "0.0005"), || {
        format!(
            "symmetric boundary point is {} per coordinate, {} away from 0.905 (tolerance 0.0005)",
            rational::render_decimal(&t_star, 6),
            rational::render_decimal(&(&t_star - rational::parse("0.905").unwrap()).abs(), 6)
        )
    });
    f
}

/// `H(Y)` of the 3-input adder with uniform inputs, enumerated in floating point.
fn adder3_entropy_oracle() -> f64 {
    let mut counts = [0u32; 4];
    for x in 0..8u32 {
        counts[x.count_ones() as usize] += 1;
    }
    counts
        .iter()
        .map(|&c| f64::from(c) / 8.0)
        .map(|p| -p * p.log2())
        .sum()
}

fn criterion7() -> Failures {
    let mut f = Failures::new();
    let two = MacModel::binary_adder(2);
    let single = conditional_mutual_info(&two, SourceSet::singleton(0), DEFAULT_PRECISION_BITS).unwrap();
    check(&mut f, single == int(1), || format!("K=2 singleton {single}"));
    let full = conditional_mutual_info(&two, SourceSet::full(2), DEFAULT_PRECISION_BITS).unwrap();
    check(&mut f, full == ratio(3, 2), || format!("K=2 full {full}"));
    let three = conditional_mutual_info(&MacModel::binary_adder(3), SourceSet::full(3), DEFAULT_PRECISION_BITS).unwrap();
    let value = rational::to_f64(&three);
    let oracle = adder3_entropy_oracle();
    check(&mut f, (value - oracle).abs() <= 2f64.powi(-20), || {
        format!("K=3 full {value} vs enumerated {oracle}")
    });
    // four decimals, truncated
    let digits = (&three * int(10_000)).floor();
    check(&mut f, digits == int(18_112), || format!("K=3 full renders as {}", rational::render_decimal(&three, 6)));
    f
}

fn criterion8() -> Failures {
    let mut f = Failures::new();
    let mut runner = TestRunner::deterministic();
    let systems = random_system();
    let mut disagreements = 0;
    for _ in 0..500 {
        let sys = systems.new_tree(&mut runner).unwrap().current();
        if let Some(why) = fm_disagreement(&sys) {
            disagreements += 1;
            if disagreements <= 3 {
                f.push(format!("FM disagreement: {why}"));
            }
        }
    }
    check(&mut f, disagreements == 0, || format!("{disagreements} of 500 systems disagree"));
    for k in 1..=4 {
        for mac in [MacModel::binary_adder(k), MacModel::adder_as_table(k)] {
            let bad = polymatroid_violations(&mac);
            check(&mut f, bad.is_empty(), || format!("K={k}: {bad:?}"));
        }
    }
    let instances = random_instance();
    for _ in 0..50 {
        let r = instances.new_tree(&mut runner).unwrap().current();
        if let Some(which) = monotonicity_violation(&r) {
            f.push(format!("{which} monotonicity fails on {r:?}"));
        }
    }
    for name in builtin::scheme_names() {
        let (instance, scheme) = builtin::builtin_scheme(name).unwrap();
        let bad = simulate_exhaustive(&instance, &scheme).unwrap().false_decodes(&instance);
        check(&mut f, bad == 0, || format!("{name}: {bad} false decodes"));
    }
    f
}

struct Criterion {
    id: u8,
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Failures,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "centralized reproduction", limit: Some(Duration::from_secs(1)), run: criterion1 },
    Criterion { id: 2, title: "Example 4 reproduction", limit: Some(Duration::from_secs(1)), run: criterion2 },
    Criterion { id: 3, title: "Example 5 reproduction", limit: Some(Duration::from_secs(1)), run: criterion3 },
    Criterion { id: 4, title: "Example 6 reproduction", limit: Some(Duration::from_secs(2)), run: criterion4 },
    Criterion { id: 5, title: "striping", limit: Some(Duration::from_secs(10)), run: criterion5 },
    Criterion { id: 6, title: "MDS precoding", limit: Some(Duration::from_secs(30)), run: criterion6 },
    Criterion { id: 7, title: "MAC values", limit: None, run: criterion7 },
    Criterion { id: 8, title: "property suites", limit: None, run: criterion8 },
];

fn main() {
    let mut failed = 0;
    for c in CRITERIA {
        let start = Instant::now();
        let mut failures = (c.run)();
        let elapsed = start.elapsed();
        if let Some(limit) = c.limit {
            if elapsed > limit {
                failures.push(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        if failures.is_empty() {
            println!("PASS criterion {}: {} ({elapsed:.2?})", c.id, c.title);
        } else {
            failed += 1;
            println!("FAIL criterion {}: {} ({elapsed:.2?}): {}", c.id, c.title, failures.join("; "));
        }
    }
    println!("{} of {} criteria pass", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
