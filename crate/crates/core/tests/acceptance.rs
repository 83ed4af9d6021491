//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p ggmgen --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{
    coefficient_of_variation, ks_statistic, ks_two_sample, ks_two_sample_p_value, mean, variance_ratio_p_value,
    welch_p_value, JacobianOracle,
};
use ggmgen::graph::{erdos_renyi, max_cardinality_search, orient_chordal, triangulate, UndirectedGraph};
use ggmgen::linalg::{
    is_positive_definite, matches_pattern, shift_condition_number, shift_min_eigenvalue,
    sym_eigenvalues, SymmetricMatrix,
};
use ggmgen::rng::stream_rng;
use ggmgen::samplers::{sample_diagdom, sample_port_chol, sample_uniform_chordal, Method, SamplerConfig};
use rand::Rng;
use rand_distr::StandardNormal;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn uniform_cdf(low: f64, high: f64) -> impl Fn(f64) -> f64 {
    move |x| ((x - low) / (high - low)).clamp(0.0, 1.0)
}

fn entries(batch: &[SymmetricMatrix], i: usize, j: usize) -> Vec<f64> {
    batch.iter().map(|m| m.get(i, j)).collect()
}

/// 5000 uniform draws on the 3-chain fill the unit disk uniformly.
fn elliptope_uniformity() -> Outcome {
    let g = UndirectedGraph::chain(3);
    let cfg = SamplerConfig::with_seed(101);
    let start = Instant::now();
    let points: Vec<(f64, f64)> = (0..5000)
        .map(|k| {
            let m = sample_uniform_chordal(&g, &cfg, &mut cfg.rng_for(k)).unwrap();
            (m.get(0, 1), m.get(1, 2))
        })
        .collect();
    let elapsed = start.elapsed();
    let inside = points.iter().all(|(x, y)| x * x + y * y < 1.0);
    let r2: Vec<f64> = points.iter().map(|(x, y)| x * x + y * y).collect();
    let angle: Vec<f64> = points.iter().map(|(x, y)| y.atan2(*x)).collect();
    let ks_r2 = ks_statistic(&r2, uniform_cdf(0.0, 1.0));
    let ks_angle = ks_statistic(&angle, uniform_cdf(-PI, PI));
    outcome(
        inside && ks_r2 < 0.03 && ks_angle < 0.03 && elapsed < Duration::from_secs(60),
        format!("inside={inside} KS(r^2)={ks_r2:.4} KS(angle)={ks_angle:.4} (<0.03) time={elapsed:.2?} (<60s, serial)"),
    )
}

/// 10^4 uniform draws on one edge give a Uniform(-1, 1) entry.
fn one_edge_uniformity() -> Outcome {
    let g = UndirectedGraph::chain(2);
    let cfg = SamplerConfig::with_seed(102);
    let start = Instant::now();
    let batch = Method::Uniform.sample_batch(&g, &cfg, true, 10_000).unwrap();
    let elapsed = start.elapsed();
    let ks = ks_statistic(&entries(&batch, 0, 1), uniform_cdf(-1.0, 1.0));
    outcome(
        ks < 0.025 && elapsed < Duration::from_secs(30),
        format!("KS={ks:.4} (<0.025) time={elapsed:.2?} (<30s)"),
    )
}

/// On the 50-chain the uniform sampler treats all edges alike while partial
/// orthogonalization shrinks the first entry relative to the last.
fn chain_symmetry() -> Outcome {
    let g = UndirectedGraph::chain(50);
    let cfg = SamplerConfig::with_seed(103);
    let start = Instant::now();
    let uniform = Method::Uniform.sample_batch(&g, &cfg, true, 5000).unwrap();
    let port = Method::Port.sample_batch(&g, &cfg, true, 5000).unwrap();
    let elapsed = start.elapsed();

    let (u_first, u_last) = (entries(&uniform, 0, 1), entries(&uniform, 48, 49));
    let d = ks_two_sample(&u_first, &u_last);
    let p_uniform = ks_two_sample_p_value(d, u_first.len(), u_last.len());

    let (p_first, p_last) = (entries(&port, 0, 1), entries(&port, 48, 49));
    let p_port = variance_ratio_p_value(&p_first, &p_last);
    outcome(
        p_uniform > 0.01 && p_port < 0.01 && elapsed < Duration::from_secs(600),
        format!(
            "uniform KS p={p_uniform:.3} (>0.01); port F-test p={p_port:.2e} (<0.01), var {:.4} < {:.4}; time={elapsed:.2?} (<10min)",
            common::variance(&p_first),
            common::variance(&p_last)
        ),
    )
}

/// Diagonal dominance concentrates edge entries near zero compared with
/// uniform sampling on a triangulated random graph.
fn diagdom_concentration() -> Outcome {
    let g = triangulate(&erdos_renyi(50, 0.05, 104).unwrap()).graph;
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let cfg = SamplerConfig::with_seed(104);
    let mean_abs = |batch: Vec<SymmetricMatrix>| -> Vec<f64> {
        batch
            .iter()
            .map(|m| edges.iter().map(|&(i, j)| m.get(i, j).abs()).sum::<f64>() / edges.len() as f64)
            .collect()
    };
    let diagdom = mean_abs(Method::DiagDom.sample_batch(&g, &cfg, true, 5000).unwrap());
    let uniform = mean_abs(Method::Uniform.sample_batch(&g, &cfg, true, 5000).unwrap());
    let (md, mu) = (mean(&diagdom), mean(&uniform));
    let p = welch_p_value(&diagdom, &uniform);
    outcome(
        md < mu && p < 0.01,
        format!("{} edges; mean|m_ij| diagdom={md:.4} < uniform={mu:.4}, Welch p={p:.2e} (<0.01)", edges.len()),
    )
}

/// Structural invariants of every method on 100 random graphs.
fn invariant_suite() -> Outcome {
    let cfg = SamplerConfig::with_seed(105);
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for k in 0..100u64 {
        let p = [10, 25, 50][(k % 3) as usize];
        let d = [0.05, 0.25][((k / 3) % 2) as usize];
        let g = erdos_renyi(p, d, 1000 + k).unwrap();
        let tri = triangulate(&g).graph;
        let mut cases = vec![
            (Method::DiagDom, &g),
            (Method::Port, &g),
            (Method::PortChol, &g),
            (Method::Uniform, &tri),
        ];
        if max_cardinality_search(&g).1 {
            cases.push((Method::Uniform, &g));
        }
        for (method, graph) in cases {
            for s in 0..10u64 {
                checked += 1;
                let index = k * 10 + s;
                let mut errors = Vec::new();
                if method == Method::DiagDom {
                    let raw = sample_diagdom(graph, &cfg, &mut cfg.rng_for(index)).unwrap();
                    if !raw.is_strictly_diagonally_dominant() {
                        errors.push("not diagonally dominant");
                    }
                    if !is_positive_definite(&raw) || !matches_pattern(&raw, graph, 0.0) {
                        errors.push("raw diagdom invalid");
                    }
                    if raw != sample_diagdom(graph, &cfg, &mut cfg.rng_for(index)).unwrap() {
                        errors.push("raw diagdom not deterministic");
                    }
                }
                let m = method.sample_indexed(graph, &cfg, true, index).unwrap();
                let p = graph.p();
                if !(0..p).all(|i| (0..p).all(|j| m.get(i, j) == m.get(j, i))) {
                    errors.push("asymmetric");
                }
                if !is_positive_definite(&m) {
                    errors.push("not positive definite");
                }
                if !matches_pattern(&m, graph, 1e-9) {
                    errors.push("pattern violated");
                }
                if !(0..p).all(|i| (m.get(i, i) - 1.0).abs() <= 1e-12) {
                    errors.push("diagonal not unit");
                }
                if m != method.sample_indexed(graph, &cfg, true, index).unwrap() {
                    errors.push("not deterministic");
                }
                if !errors.is_empty() {
                    failures.push(format!("graph {k} {method} sample {s}: {}", errors.join(", ")));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} samples, {} failures{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

/// Eigenvalue and condition-number shifts on 1000 random symmetric matrices.
fn shift_formulas() -> Outcome {
    let mut rng = stream_rng(106, 0);
    let mut worst_floor = f64::INFINITY;
    let mut worst_kappa = 0.0f64;
    for _ in 0..1000 {
        let p = rng.random_range(2..=20);
        let mut m = SymmetricMatrix::from_lower_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let eps = rng.random_range(1e-3..1.0);
        let kappa0 = rng.random_range(1.5..1000.0);

        let shifted = shift_min_eigenvalue(&m, eps).unwrap();
        let lambda_min = sym_eigenvalues(&shifted).unwrap()[0];
        worst_floor = worst_floor.min(lambda_min - eps);

        // The condition-number shift needs a positive top eigenvalue.
        if *sym_eigenvalues(&m).unwrap().last().unwrap() <= 0.0 {
            m = SymmetricMatrix::from_lower_fn(p, |i, j| -m.get(i, j));
        }
        let shifted = shift_condition_number(&m, kappa0).unwrap();
        let ev = sym_eigenvalues(&shifted).unwrap();
        let kappa = ev[ev.len() - 1] / ev[0];
        worst_kappa = worst_kappa.max((kappa - kappa0).abs() / kappa0);
    }
    outcome(
        worst_floor >= -1e-10 && worst_kappa <= 1e-8,
        format!("min(lambda_min - eps)={worst_floor:.2e} (>= -1e-10); max rel kappa err={worst_kappa:.2e} (<=1e-8)"),
    )
}

/// Jacobian determinant of `U -> U U^t` over `prod u_ii^(|pa(i)|+1)` is
/// constant on three chordal graphs.
fn jacobian_consistency() -> Outcome {
    let graphs = [
        ("chain3", UndirectedGraph::chain(3)),
        ("two-triangles", UndirectedGraph::from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap()),
        ("complete4", UndirectedGraph::complete(4)),
    ];
    let mut rng = stream_rng(107, 0);
    let mut details = Vec::new();
    let mut pass = true;
    for (name, g) in graphs {
        let (order, _) = max_cardinality_search(&g);
        let o = orient_chordal(&g, &order).unwrap();
        let oracle = JacobianOracle::new(
            (0..g.p())
                .map(|a| o.children(order.vertex(a)).iter().map(|&c| order.position(c)).collect())
                .collect(),
        );
        let ratios: Vec<f64> = (0..100)
            .map(|_| {
                let mut x = Vec::new();
                for ch in &oracle.children {
                    loop {
                        let mut v: Vec<f64> = (0..=ch.len()).map(|_| rng.sample(StandardNormal)).collect();
                        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                        v.iter_mut().for_each(|a| *a /= n);
                        if v[0].abs() > 0.05 {
                            x.extend_from_slice(&v[1..]);
                            break;
                        }
                    }
                }
                let h = 1e-6;
                oracle.chart_determinant(&x, h) / oracle.area_element(&x, h) / oracle.diagonal_power(&x, 1)
            })
            .collect();
        let cv = coefficient_of_variation(&ratios);
        pass &= cv < 1e-4;
        details.push(format!("{name} cv={cv:.1e}"));
    }
    outcome(pass, format!("{} (<1e-4)", details.join(", ")))
}

/// Port-chol and uniform agree in distribution on a chordal graph.
fn chordal_reduction() -> Outcome {
    let g = UndirectedGraph::chain(2);
    let a = SamplerConfig::with_seed(108);
    let b = SamplerConfig::with_seed(208);
    let uniform: Vec<f64> = (0..5000)
        .map(|k| sample_uniform_chordal(&g, &a, &mut a.rng_for(k)).unwrap().get(0, 1))
        .collect();
    let port_chol: Vec<f64> = (0..5000)
        .map(|k| sample_port_chol(&g, &b, &mut b.rng_for(k)).unwrap().get(0, 1))
        .collect();
    let d = ks_two_sample(&uniform, &port_chol);
    outcome(d < 0.03, format!("two-sample KS={d:.4} (<0.03)"))
}

/// Triangulation and orientation on 100 random graphs.
fn graph_machinery() -> Outcome {
    let mut failures = 0;
    for k in 0..100u64 {
        let p = [10, 25, 50][(k % 3) as usize];
        let d = [0.05, 0.25][((k / 3) % 2) as usize];
        let g = erdos_renyi(p, d, 2000 + k).unwrap();
        let t = triangulate(&g);
        let ok = g.is_subgraph_of(&t.graph)
            && max_cardinality_search(&t.graph).1
            && orient_chordal(&t.graph, &t.order).is_ok_and(|o| {
                o.num_arcs() == t.graph.num_edges() && (0..p).all(|v| t.graph.is_clique(o.parents(v)))
            });
        if !ok {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("100 graphs, {failures} failures"))
}

fn main() {
    // Criterion 1 is timed single-threaded; the rest may use the thread pool.
    let criteria: [Criterion; 9] = [
        ("1 elliptope uniformity (3-chain)", elliptope_uniformity),
        ("2 one-edge uniformity", one_edge_uniformity),
        ("3 chain symmetry vs port asymmetry", chain_symmetry),
        ("4 diagdom concentration", diagdom_concentration),
        ("5 invariant suite", invariant_suite),
        ("6 shift formulas", shift_formulas),
        ("7 jacobian consistency", jacobian_consistency),
        ("8 chordal reduction", chordal_reduction),
        ("9 graph machinery", graph_machinery),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {} [{:.1?}]", o.detail, start.elapsed());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
