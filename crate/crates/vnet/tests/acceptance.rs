//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Criterion numbers can be passed as arguments to run a subset:
//! `cargo test -p vnet --test acceptance -- 1 2 3`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::time::{Duration, Instant};

use vnet::formats::SuiteSummary;
use vnet::run_cli;
use vnet::suites::{self, Suite, BASELINE};
use vnet::vnet_core::algebra::{catalog, cayley_dickson_chain, clifford};
use vnet::vnet_core::functional::{represent, verify_representation};
use vnet::vnet_core::numerics::central_difference_gradient;
use vnet::vnet_core::rng::{stream, symmetric, SeededRng, Stream};
use vnet::vnet_core::vnet::assemble_from_components;
use vnet::vnet_core::{
    Algebra, Element, LinearFunctional, Matrix, OutputMode, RealMlp, SplitActivation, VMlp,
};

const SEED: u64 = 0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn coeffs(r: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| symmetric(r, 1.0)).collect()
}

fn element(a: &Algebra, r: &mut SeededRng) -> Element {
    Element::new(a, coeffs(r, a.dim())).unwrap()
}

fn within(lo: f64, v: f64, hi: f64) -> bool {
    (lo..=hi).contains(&v)
}

fn degeneracy_classification() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    if run_cli(["vnet", "algebra", "list"], &mut out, &mut err) != 0 {
        return outcome(false, String::from_utf8_lossy(&err));
    }
    let text = String::from_utf8(out).unwrap();
    let mut nondeg = BTreeSet::new();
    let mut singular = BTreeMap::new();
    for row in text.lines().skip(1) {
        let cols: Vec<&str> = row.split_whitespace().collect();
        match cols[2] {
            "non-degenerate" => {
                nondeg.insert(cols[0].to_string());
            }
            _ => {
                singular.insert(cols[0].to_string(), cols[3].to_string());
            }
        }
    }
    let want_nondeg: BTreeSet<String> = ["A", "C", "E", "F", "Q", "HQ", "R"]
        .map(String::from)
        .into();
    let want_singular: BTreeMap<String, String> =
        [("B", "1"), ("D", "0"), ("G", "3"), ("DC", "0,1")]
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .into();
    outcome(
        nondeg == want_nondeg && singular == want_singular,
        format!("non-degenerate {nondeg:?}, degenerate {singular:?}"),
    )
}

fn basis_change() -> Outcome {
    let p = Matrix::from_rows(&[[1.0, 1.0], [1.0, -1.0]]).unwrap();
    let e = catalog("D").unwrap().change_of_basis(&p).unwrap();
    let want = [[[1.5, 0.5], [0.5, -0.5]], [[-0.5, 0.5], [0.5, 1.5]]];
    let mut worst: f64 = 0.0;
    for (k, b) in want.iter().enumerate() {
        let got = e.bilinear_matrix(k).unwrap();
        for (i, row) in b.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((got.entry(i, j) - v).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max entry error {worst:.3e}"))
}

fn representation_roundtrip() -> Outcome {
    let mut r = stream(SEED, Stream::Verify);
    let mut worst: f64 = 0.0;
    for name in ["R", "A", "C", "E", "F", "Q", "HQ"] {
        let a = catalog(name).unwrap();
        let n = a.dim();
        for component in 0..n {
            for f in 0..50 {
                let l = LinearFunctional::from_flat(n, &coeffs(&mut r, 2 * n)).unwrap();
                let rep = represent(&a, component, &l).unwrap();
                let dev = verify_representation(&a, &rep, &l, 500, f).unwrap();
                worst = worst.max(dev);
            }
        }
    }
    let d = catalog("D").unwrap();
    let l = LinearFunctional::new(vec![vec![0.0, 1.0]]).unwrap();
    let residual = represent(&d, 0, &l).unwrap().residual;
    outcome(
        worst < 1e-9 && (residual - 1.0).abs() <= 1e-12,
        format!("max deviation {worst:.3e}, dual counterexample residual {residual:.15}"),
    )
}

fn gradient_check() -> Outcome {
    let mut r = stream(SEED, Stream::Verify);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for name in ["C", "D", "Q", "HQ", "G", "DC", "A", "F"] {
        let a = catalog(name).unwrap();
        let n = a.dim();
        for mode in [OutputMode::Scalar, OutputMode::Vector] {
            for point in 0..10 {
                // resample until no relu pre-activation sits near its kink
                let (net, x) = loop {
                    let mut net = VMlp::init(&a, 2, 4, mode, SplitActivation::Relu, point).unwrap();
                    net.params_mut()
                        .iter_mut()
                        .for_each(|v| *v += symmetric(&mut r, 0.3));
                    let x = coeffs(&mut r, 2 * n);
                    if kink_free(&net, &x) {
                        break (net, x);
                    }
                };
                let t = coeffs(&mut r, n);
                let xs: Vec<Element> = x
                    .chunks(n)
                    .map(|c| Element::new(&a, c.to_vec()).unwrap())
                    .collect();
                let (_, g) = net
                    .backward(&xs, &Element::new(&a, t.clone()).unwrap())
                    .unwrap();
                let fd = central_difference_gradient(
                    |p| {
                        let probe =
                            VMlp::from_params(&a, 2, 4, mode, SplitActivation::Relu, p.to_vec())
                                .unwrap();
                        let mut ws = probe.workspace();
                        let mut y = vec![0.0; n];
                        probe.forward_raw(&x, &mut y, &mut ws);
                        y.iter().zip(&t).map(|(u, v)| (u - v) * (u - v)).sum()
                    },
                    net.params(),
                    1e-6,
                )
                .unwrap();
                for (u, v) in g.as_slice().iter().zip(&fd) {
                    worst = worst.max((u - v).abs() / u.abs().max(v.abs()).max(1e-6));
                }
                checks += 1;
            }
        }
    }
    outcome(
        worst < 1e-4,
        format!("{checks} parameter points, max relative error {worst:.3e}"),
    )
}

/// Every hidden pre-activation coefficient is at least 1e-3 away from zero.
fn kink_free(net: &VMlp, x: &[f64]) -> bool {
    let a = net.algebra();
    let n = a.dim();
    let mut prod = vec![0.0; n];
    (0..net.n_hidden()).all(|i| {
        let mut s = net.hidden_bias(i).unwrap().into_coeffs();
        for j in 0..net.n_inputs() {
            a.mul_into(
                net.hidden_weight(i, j).unwrap().coeffs(),
                &x[j * n..(j + 1) * n],
                &mut prod,
            );
            s.iter_mut().zip(&prod).for_each(|(u, v)| *u += v);
        }
        s.iter().all(|v| v.abs() > 1e-3)
    })
}

fn assembly() -> Outcome {
    let c = catalog("C").unwrap();
    let mut r = stream(SEED, Stream::Verify);
    let act = SplitActivation::Relu;
    let nets: Vec<RealMlp> = (0..2)
        .map(|_| {
            let fs = (0..10)
                .map(|_| LinearFunctional::from_flat(2, &coeffs(&mut r, 2)).unwrap())
                .collect();
            RealMlp::new(fs, coeffs(&mut r, 10), coeffs(&mut r, 10)).unwrap()
        })
        .collect();
    let points: Vec<Element> = (0..500).map(|_| element(&c, &mut r)).collect();
    let remainders: Vec<f64> = [-1.0, -10.0, -100.0]
        .iter()
        .map(|&lambda| {
            let net = assemble_from_components(&c, &nets, act, lambda).unwrap();
            points
                .iter()
                .map(|x| {
                    let y = net.forward(std::slice::from_ref(x)).unwrap();
                    (0..2)
                        .map(|k| (y.coeffs()[k] - nets[k].eval(act, x.coeffs())).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let monotone = remainders.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        monotone && remainders[2] < 1e-6,
        format!(
            "sup remainder at lambda -1, -10, -100: {:.3e}, {:.3e}, {:.3e}",
            remainders[0], remainders[1], remainders[2]
        ),
    )
}

fn algebraic_properties() -> Outcome {
    let mut r = stream(SEED, Stream::Verify);
    let q = catalog("Q").unwrap();
    let o = cayley_dickson_chain(&[-1.0, -1.0, -1.0]).unwrap();
    let mut norm_err: f64 = 0.0;
    for a in [&q, &o] {
        for _ in 0..1000 {
            let (x, y) = (element(a, &mut r), element(a, &mut r));
            norm_err = norm_err.max((x.mul(&y).unwrap().abs() - x.abs() * y.abs()).abs());
        }
    }
    let witness = |a: &Algebra, r: &mut SeededRng| {
        (0..1000).any(|_| {
            let (x, y, z) = (element(a, r), element(a, r), element(a, r));
            let lhs = x.mul(&y).unwrap().mul(&z).unwrap();
            let rhs = x.mul(&y.mul(&z).unwrap()).unwrap();
            lhs.sub(&rhs).unwrap().abs() > 1e-3
        })
    };
    let hq_witness = witness(&catalog("HQ").unwrap(), &mut r);
    let o_witness = witness(&o, &mut r);
    let c = catalog("C").unwrap();
    let builders = clifford(0, 1).unwrap() == c
        && clifford(0, 2).unwrap() == q
        && cayley_dickson_chain(&[-1.0]).unwrap() == c
        && cayley_dickson_chain(&[-1.0, -1.0]).unwrap() == q;
    outcome(
        norm_err <= 1e-10 && hq_witness && o_witness && builders,
        format!(
            "norm error {norm_err:.3e}, non-associativity HQ {hq_witness} octonions {o_witness}, builders match {builders}"
        ),
    )
}

/// `(algebra, lower, upper)`; a lower bound of 0 means "below upper".
type Brackets = &'static [(&'static str, f64, f64)];

fn bracket_for(suite: Suite) -> Brackets {
    match suite {
        Suite::Scalar2d => &[
            ("A", 0.0, 5e-3),
            ("C", 0.0, 5e-3),
            ("E", 0.0, 5e-3),
            ("D", 2e-2, 8e-2),
            ("B", 5e-3, 3e-2),
        ],
        Suite::Vector2d => &[("C", 0.0, 5e-3), ("E", 0.0, 5e-3), ("A", 1e-1, 4e-1)],
        Suite::Scalar4d => &[
            ("F", 0.0, 2e-2),
            ("Q", 0.0, 2e-2),
            ("HQ", 0.0, 2e-2),
            ("G", 3e-2, 1.2e-1),
            ("DC", 4e-2, 1.5e-1),
        ],
        Suite::Vector4d => &[
            ("Q", 0.0, 2e-2),
            ("HQ", 0.0, 2e-2),
            ("G", 4e-2, 1.5e-1),
            ("DC", 4e-2, 1.5e-1),
            ("F", 9e-2, 3.5e-1),
        ],
    }
}

fn experiment(suite: Suite, dir: &std::path::Path) -> Outcome {
    let mut times = Vec::new();
    let mut last = Instant::now();
    let result = suites::run_suite(suite, SEED, None, dir, |_| {
        times.push(last.elapsed());
        last = Instant::now();
    });
    let summary = match result {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("suite failed: {e}")),
    };
    let on_disk = SuiteSummary::parse(
        &fs::read_to_string(dir.join(suites::summary_file_name(suite, SEED))).unwrap(),
        "summary",
    )
    .unwrap();
    let mut pass = on_disk == summary;
    let mut parts = Vec::new();
    for (run, time) in summary.runs.iter().zip(&times) {
        let slow = *time > Duration::from_secs(180);
        pass &= !slow;
        let verdict = match bracket_for(suite).iter().find(|b| b.0 == run.algebra) {
            Some(&(_, lo, hi)) => {
                let ok = if lo == 0.0 {
                    run.final_mse < hi
                } else {
                    within(lo, run.final_mse, hi)
                };
                pass &= ok;
                if ok {
                    ""
                } else {
                    " OUT OF RANGE"
                }
            }
            None if run.algebra == BASELINE => " (baseline)",
            None => "",
        };
        parts.push(format!(
            "{} {:.3e} in {:.0?}{verdict}{}",
            run.algebra,
            run.final_mse,
            time,
            if slow { " TOO SLOW" } else { "" }
        ));
    }
    outcome(pass, parts.join(", "))
}

fn determinism(dir: &std::path::Path) -> Outcome {
    let reference = dir.join(suites::curve_file_name(Suite::Scalar2d, "C", SEED));
    if !reference.exists() {
        return outcome(false, "needs the 2d-scalar suite output (criterion 6)");
    }
    let again = dir.join("repeat_C.csv");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(
        [
            "vnet",
            "train",
            "--algebra",
            "C",
            "--seed",
            &SEED.to_string(),
            "--out",
            again.to_str().unwrap(),
        ],
        &mut out,
        &mut err,
    );
    if code != 0 {
        return outcome(false, String::from_utf8_lossy(&err));
    }
    let (a, b) = (fs::read(&reference).unwrap(), fs::read(&again).unwrap());
    outcome(
        a == b,
        format!("repeated C run: {} bytes, identical {}", a.len(), a == b),
    )
}

fn main() {
    let wanted: BTreeSet<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let run = |n: usize| wanted.is_empty() || wanted.contains(&n);
    let dir = tempfile::tempdir().unwrap();

    type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;
    let criteria: Vec<(usize, &str, Option<Duration>, Check)> = vec![
        (
            1,
            "degeneracy classification",
            Some(Duration::from_secs(1)),
            Box::new(degeneracy_classification),
        ),
        (
            2,
            "basis change D -> E",
            Some(Duration::from_secs(1)),
            Box::new(basis_change),
        ),
        (
            3,
            "linear functional representation roundtrip",
            Some(Duration::from_secs(10)),
            Box::new(representation_roundtrip),
        ),
        (
            4,
            "backward vs central differences",
            Some(Duration::from_secs(30)),
            Box::new(gradient_check),
        ),
        (
            5,
            "constructive assembly remainder",
            Some(Duration::from_secs(10)),
            Box::new(assembly),
        ),
        (
            11,
            "algebraic properties",
            Some(Duration::from_secs(10)),
            Box::new(algebraic_properties),
        ),
        (
            6,
            "2d scalar-output experiment",
            None,
            Box::new(|| experiment(Suite::Scalar2d, dir.path())),
        ),
        (
            7,
            "2d vector-output experiment",
            None,
            Box::new(|| experiment(Suite::Vector2d, dir.path())),
        ),
        (
            8,
            "4d scalar-output experiment",
            None,
            Box::new(|| experiment(Suite::Scalar4d, dir.path())),
        ),
        (
            9,
            "4d vector-output experiment",
            None,
            Box::new(|| experiment(Suite::Vector4d, dir.path())),
        ),
        (
            10,
            "determinism of repeated runs",
            None,
            Box::new(|| determinism(dir.path())),
        ),
    ];

    let mut failed = Vec::new();
    for (n, title, limit, check) in criteria {
        if !run(n) {
            continue;
        }
        let start = Instant::now();
        let mut o = check();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                o.pass = false;
                o.detail.push_str(&format!("; exceeded {limit:?}"));
            }
        }
        println!(
            "criterion {n:>2}: {} {title} ({}; {elapsed:.2?})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
