//! Acceptance suite. Each test checks one acceptance criterion and prints a
//! single PASS/FAIL line for it; run with `--nocapture` to see the lines.
//!
//! Reference values are computed here, independently of the library.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use firefly_core::continuous::attractiveness;
use firefly_core::discrete::{
    alpha_step, beta_of_hamming, beta_step, bounded_inversion, per_dim_update, random_inversion,
    rho_at, swap_move, visual_range_at, FamiliarityMatrix, PerDimParams,
};
use firefly_core::discretize::{transfer, TransferFunction};
use firefly_core::model::{check_encoding, random_point};
use firefly_core::problems::{ContinuousBenchmark, KnapsackInstance, TspInstance, STEPPED_TABLE};
use firefly_core::schedules::{emit_curve, AlphaSchedule, GammaSchedule, PER_ITER_TARGET_RATIO};
use firefly_core::{
    run, run_discrete, BinarizationRule, Bounds, ContinuousConfig, ContinuousParams,
    DiscreteConfig, DiscreteVariant, Discretizer, Encoding, ProblemDescriptor, RngStream,
};
use firefly_harness::bench::{
    knapsack_check, knapsack_instances, stepped_check, tsp_check, tsp_instances,
};

/// Default tolerance of the formula checkpoints.
const FORMULA_TOL: f64 = 1e-9;
/// Relative tolerance of the compounded per-iteration factor.
const COMPOUND_REL_TOL: f64 = 1e-9;
/// Tolerance of reproduced schedule curves.
const CURVE_TOL: f64 = 1e-12;
/// Random applications per discrete move.
const MOVE_TRIALS: usize = 10_000;
/// Points in the transfer-function monotonicity grids.
const GRID_POINTS: usize = 1000;

fn report(name: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("PASS {name}");
    } else {
        println!("FAIL {name}");
        for f in failures {
            println!("    {f}");
        }
        panic!("{name}: {} check(s) failed", failures.len());
    }
}

fn close(failures: &mut Vec<String>, what: &str, got: f64, want: f64, tol: f64) {
    if !((got - want).abs() <= tol) {
        failures.push(format!("{what}: got {got}, expected {want} (tol {tol})"));
    }
}

#[test]
fn formula_checkpoints() {
    let mut f = Vec::new();
    let e_inv = (-1.0f64).exp();
    close(
        &mut f,
        "S2(0)",
        transfer(TransferFunction::S2, 0.0),
        0.5,
        FORMULA_TOL,
    );
    close(
        &mut f,
        "S1(1)",
        transfer(TransferFunction::S1, 1.0),
        1.0 / (1.0 + (-2.0f64).exp()),
        FORMULA_TOL,
    );
    close(
        &mut f,
        "S1(1) printed",
        transfer(TransferFunction::S1, 1.0),
        0.880797,
        1e-6,
    );
    close(
        &mut f,
        "ErfS(0)",
        transfer(TransferFunction::ErfS, 0.0),
        0.5,
        FORMULA_TOL,
    );
    close(
        &mut f,
        "V2(1)",
        transfer(TransferFunction::V2, 1.0),
        1f64.tanh(),
        FORMULA_TOL,
    );
    close(
        &mut f,
        "V2(1) printed",
        transfer(TransferFunction::V2, 1.0),
        0.761594,
        1e-6,
    );
    close(
        &mut f,
        "attractiveness(1,1,1)",
        attractiveness(1.0, 1.0, 1.0),
        e_inv,
        FORMULA_TOL,
    );
    close(
        &mut f,
        "beta_of_hamming(1,2)",
        beta_of_hamming(1.0, 2),
        0.2,
        FORMULA_TOL,
    );

    let p = FamiliarityMatrix::from_rows(vec![
        vec![0.0, 4.0, 2.0],
        vec![1.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ])
    .unwrap();
    close(
        &mut f,
        "familiarity beta max=4 P=2",
        p.beta(0, 2).unwrap(),
        e_inv,
        FORMULA_TOL,
    );

    close(
        &mut f,
        "rho_at(0)",
        rho_at(0, 80).unwrap(),
        0.5,
        FORMULA_TOL,
    );
    close(
        &mut f,
        "rho_at(MaxItr)",
        rho_at(80, 80).unwrap(),
        1.0,
        FORMULA_TOL,
    );
    close(
        &mut f,
        "visual_range_at(0.2,3,66,100)",
        visual_range_at(0.2, 3.0, 66, 100).unwrap(),
        2.8,
        FORMULA_TOL,
    );

    let ramp = GammaSchedule::ExpRamp {
        gamma_max: 10.0,
        gamma_min: 0.01,
    };
    let g0 = ramp.gamma_at(0, 100).unwrap();
    let g1 = ramp.gamma_at(100, 100).unwrap();
    if g0 != 10.0 {
        f.push(format!("gamma ramp start {g0} != 10"));
    }
    if g1 != 0.01 {
        f.push(format!("gamma ramp end {g1} != 0.01"));
    }

    for max_iter in [10, 100, 250] {
        let curve = emit_curve(&AlphaSchedule::PerIterFactor { alpha0: 2.5 }, max_iter).unwrap();
        let last = curve.last().unwrap().1;
        let want = 2.5 * PER_ITER_TARGET_RATIO;
        close(
            &mut f,
            "per-iteration factor final",
            last,
            want,
            want * COMPOUND_REL_TOL,
        );
        close(
            &mut f,
            "per-iteration ratio",
            PER_ITER_TARGET_RATIO,
            1e-4 / 9.0,
            1e-20,
        );
    }
    report("formula checkpoints", &f);
}

fn all_alpha_schedules() -> Vec<AlphaSchedule> {
    vec![
        AlphaSchedule::Constant(0.4),
        AlphaSchedule::Geometric {
            alpha0: 2.5,
            theta: 0.9,
        },
        AlphaSchedule::Geometric {
            alpha0: 2.5,
            theta: 0.99,
        },
        AlphaSchedule::PerIterFactor { alpha0: 2.5 },
        AlphaSchedule::SigmoidDecay { alpha0: 2.5 },
        AlphaSchedule::Linear {
            alpha_max: 2.5,
            alpha_min: 0.1,
        },
        AlphaSchedule::FloorDim { n: 7 },
    ]
}

fn engine_runs() -> Vec<(String, ProblemDescriptor, Engine)> {
    let mut rng = RngStream::new(77);
    let knap = Arc::new(KnapsackInstance::random(12, &mut rng));
    let tsp = Arc::new(TspInstance::random_euclidean(8, &mut rng));
    let sphere = ContinuousBenchmark::Sphere
        .problem(Encoding::Real, 4)
        .unwrap();
    let rastrigin_int = ContinuousBenchmark::Rastrigin
        .problem(Encoding::Integer, 3)
        .unwrap();
    let params = ContinuousParams {
        population: 12,
        max_gen: 40,
        ..ContinuousParams::default()
    };
    let plain = ContinuousConfig::new(params);
    let mut binary = ContinuousConfig::new(params);
    binary.discretizer = Some(Discretizer::Binary {
        transfer: TransferFunction::V2,
        rule: BinarizationRule::ComplementProbabilistic,
    });
    let mut rounded = ContinuousConfig::new(params);
    rounded.discretizer = Some(Discretizer::Round);
    let mut keys = ContinuousConfig::new(params);
    keys.discretizer = Some(Discretizer::RandomKey);

    let mut out = vec![
        (
            "continuous sphere".to_string(),
            sphere,
            Engine::Continuous(plain),
        ),
        (
            "binary knapsack".to_string(),
            knap.problem(),
            Engine::Continuous(binary),
        ),
        (
            "rounded rastrigin".to_string(),
            rastrigin_int.clone(),
            Engine::Continuous(rounded),
        ),
        (
            "random-key tsp".to_string(),
            tsp.random_key_problem(),
            Engine::Continuous(keys),
        ),
    ];
    let variants = [
        DiscreteVariant::HammingBetaAlpha { gamma: 0.1 },
        DiscreteVariant::Familiarity,
        DiscreteVariant::RhoFollow { gamma: 0.1 },
        DiscreteVariant::SwapFixed,
        DiscreteVariant::SwapGamma { gamma: 0.97 },
        DiscreteVariant::VisualRangePerDim {
            beta0: 1.0,
            gamma: 0.05,
            alpha: 0.5,
            dv_max: 3.0,
            dv_min: 0.2,
            literal_zero: false,
        },
    ];
    for v in variants {
        for (label, p) in [
            ("knapsack", knap.problem()),
            ("tsp", tsp.problem()),
            ("rastrigin", rastrigin_int.clone()),
        ] {
            let mut d = DiscreteConfig::new(v, 10, 40);
            d.alpha = AlphaSchedule::Constant(2.0);
            out.push((format!("{} {label}", v.name()), p, Engine::Discrete(d)));
        }
    }
    out.push((
        "tsp-inversion".to_string(),
        tsp.problem(),
        Engine::Discrete(DiscreteConfig::new(
            DiscreteVariant::TspInversion { m: 3 },
            10,
            40,
        )),
    ));
    out.push((
        "knapsack-gated".to_string(),
        knap.problem(),
        Engine::Discrete(DiscreteConfig::new(
            DiscreteVariant::KnapsackGated {
                beta0: 1.0,
                omega: 1.0,
                elite_flight: true,
                local_search: true,
            },
            10,
            40,
        )),
    ));
    out
}

enum Engine {
    Continuous(ContinuousConfig),
    Discrete(DiscreteConfig),
}

#[test]
fn monotonicity_suites() {
    let mut f = Vec::new();
    for s in all_alpha_schedules() {
        let curve = emit_curve(&s, 200).unwrap();
        if curve.len() != 201 || curve.windows(2).any(|w| w[1].1 > w[0].1) {
            f.push(format!("{s:?} is not non-increasing over 0..=200"));
        }
    }

    let grid = |lo: f64, hi: f64| -> Vec<f64> {
        (0..GRID_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64)
            .collect()
    };
    // erf reaches +-1 in double precision near |v| = 6, so the strict test
    // uses [-5, 5]
    let s_grid = grid(-5.0, 5.0);
    let v_grid = grid(0.0, 8.0);
    for t in TransferFunction::TABLE {
        if t.is_s_shaped() {
            if s_grid
                .windows(2)
                .any(|w| transfer(t, w[1]) <= transfer(t, w[0]))
            {
                f.push(format!("{t} not strictly increasing"));
            }
        } else if v_grid.iter().any(|&x| transfer(t, -x) != transfer(t, x)) {
            f.push(format!("{t} not even"));
        }
    }

    for (name, p, engine) in engine_runs() {
        for seed in 0..3 {
            let rec = match &engine {
                Engine::Continuous(c) => run(&p, c, seed),
                Engine::Discrete(d) => run_discrete(&p, d, seed),
            };
            match rec {
                Ok(r) if r.best_trace.windows(2).all(|w| w[1] <= w[0]) => {}
                Ok(_) => f.push(format!("{name} seed {seed}: best-so-far increased")),
                Err(e) => f.push(format!("{name} seed {seed}: {e}")),
            }
        }
    }
    report("monotonicity suites", &f);
}

#[test]
fn discrete_move_feasibility() {
    let mut f = Vec::new();
    let mut rng = RngStream::new(2024);
    let mut violations = [0usize; 5];
    let names = [
        "beta_step",
        "alpha_step",
        "swap_move",
        "inversion",
        "per_dim_update",
    ];
    for enc in [Encoding::Binary, Encoding::Integer, Encoding::Permutation] {
        for t in 0..MOVE_TRIALS {
            let n = 2 + t % 12;
            let bounds = match enc {
                Encoding::Integer => Bounds::new(-3.0, 9.0).unwrap(),
                _ => Bounds::UNIT,
            };
            let p = ProblemDescriptor::new(enc, n, vec![bounds; n], |x: &[f64]| x[0]).unwrap();
            let a = random_point(&p, &mut rng);
            let b = random_point(&p, &mut rng);
            let ok = |v: &[f64]| v.len() == n && check_encoding(enc, p.bounds(), v).is_ok();
            let beta = rng.uniform();
            let outs = [
                beta_step(&a, &b, beta, enc, &mut rng).unwrap(),
                alpha_step(&a, 5.0 * rng.uniform(), enc, p.bounds(), &mut rng).unwrap(),
                swap_move(&a, &b, 1 + rng.index(n), enc, &mut rng).unwrap(),
                if enc == Encoding::Permutation {
                    if t % 2 == 0 {
                        random_inversion(&a, &mut rng)
                    } else {
                        bounded_inversion(&a, 2 + rng.index(n), &mut rng)
                    }
                } else {
                    a.clone()
                },
                per_dim_update(
                    &a,
                    &b,
                    PerDimParams {
                        alpha: rng.uniform(),
                        beta0: 1.0,
                        gamma: 0.1,
                        literal_zero: false,
                    },
                    1.0,
                    enc,
                    &mut rng,
                )
                .unwrap(),
            ];
            for (k, o) in outs.iter().enumerate() {
                if !ok(o) {
                    violations[k] += 1;
                }
            }
        }
    }
    for (k, v) in violations.iter().enumerate() {
        if *v > 0 {
            f.push(format!("{}: {v} violations", names[k]));
        }
    }
    report("discrete move feasibility", &f);
}

/// Best knapsack value by include/exclude recursion.
fn knapsack_optimum(values: &[f64], weights: &[f64], capacity: f64) -> f64 {
    fn best(k: usize, v: &[f64], w: &[f64], room: f64) -> f64 {
        if k == v.len() {
            return 0.0;
        }
        let skip = best(k + 1, v, w, room);
        if w[k] <= room {
            skip.max(v[k] + best(k + 1, v, w, room - w[k]))
        } else {
            skip
        }
    }
    best(0, values, weights, capacity)
}

/// Shortest tour by Heap's algorithm over all orderings.
fn tsp_optimum(t: &TspInstance) -> f64 {
    let n = t.len();
    let mut p: Vec<usize> = (0..n).collect();
    let len = |p: &[usize]| {
        (0..n)
            .map(|k| t.distance(p[k], p[(k + 1) % n]))
            .sum::<f64>()
    };
    let mut best = len(&p);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            best = best.min(len(&p));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

#[test]
fn knapsack_oracle_equivalence() {
    let mut f = Vec::new();
    let instances = knapsack_instances();
    let mut optima = Vec::new();
    for (k, inst) in instances.iter().enumerate() {
        let own = -knapsack_optimum(inst.values(), inst.weights(), inst.capacity());
        let lib = inst.brute_force().unwrap().1;
        if (own - lib).abs() > 1e-9 {
            f.push(format!(
                "instance {k}: enumerators disagree ({own} vs {lib})"
            ));
        }
        optima.push(own);
    }
    let result = knapsack_check(&instances, &optima).unwrap();
    println!("    {}", result.line());
    if !result.passed() {
        f.push(result.line());
    }
    report("knapsack oracle equivalence", &f);
}

#[test]
fn tsp_oracle_equivalence() {
    let mut f = Vec::new();
    let instances = tsp_instances();
    let mut optima = Vec::new();
    for (k, inst) in instances.iter().enumerate() {
        let own = tsp_optimum(inst);
        let lib = inst.brute_force().unwrap().1;
        if (own - lib).abs() > 1e-9 {
            f.push(format!(
                "instance {k}: enumerators disagree ({own} vs {lib})"
            ));
        }
        optima.push(own);
    }
    let result = tsp_check(&instances, &optima).unwrap();
    println!("    {}", result.line());
    if !result.passed() {
        f.push(result.line());
    }
    report("tsp oracle equivalence", &f);
}

#[test]
fn stepped_integer_separation() {
    let mut f = Vec::new();
    let b = ContinuousBenchmark::SteppedIntegerDemo;
    let integer_argmin = (0..=10)
        .min_by(|&x, &y| b.eval(&[x as f64]).total_cmp(&b.eval(&[y as f64])))
        .unwrap() as f64;
    let table_argmin = (0..STEPPED_TABLE.len())
        .min_by(|&x, &y| STEPPED_TABLE[x].total_cmp(&STEPPED_TABLE[y]))
        .unwrap() as f64;
    if integer_argmin != table_argmin {
        f.push(format!(
            "benchmark and table disagree: {integer_argmin} vs {table_argmin}"
        ));
    }
    let steps = 1_000_000;
    let continuous_argmin = (0..=steps)
        .map(|i| 10.0 * i as f64 / steps as f64)
        .min_by(|x, y| b.eval(&[*x]).total_cmp(&b.eval(&[*y])))
        .unwrap();
    if continuous_argmin.round() == integer_argmin {
        f.push(format!(
            "rounded continuous argmin {continuous_argmin} equals the integer argmin"
        ));
    }
    let (discrete, rounded) = stepped_check(integer_argmin).unwrap();
    for r in [&discrete, &rounded] {
        println!("    {}", r.line());
        if !r.passed() {
            f.push(r.line());
        }
    }
    report("stepped integer separation", &f);
}

fn firefly() -> Command {
    Command::new(env!("CARGO_BIN_EXE_firefly"))
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn run_determinism() {
    let mut f = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tsp_cfg = dir.path().join("tsp.toml");
    std::fs::write(
        &tsp_cfg,
        "problem = \"tsp\"\nsize = 8\ninstance_seed = 3\nengine = \"discrete\"\nvariant = \"tsp-inversion\"\n\
         population = 12\nmax_iter = 60\nreplicates = 6\nseed = 5\noracle = \"exhaustive\"\ntolerance = 0.05\n",
    )
    .unwrap();
    for (label, cfg) in [("canonical", root.join("knapsack.toml")), ("tsp", tsp_cfg)] {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{label}-{rep}"));
            let status = firefly()
                .args(["run", "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            if !status.status.success() {
                f.push(format!(
                    "{label}: run failed: {}",
                    String::from_utf8_lossy(&status.stderr)
                ));
                continue;
            }
            outputs.push((
                read(&out.join("trace.csv")),
                read(&out.join("summary.json")),
            ));
        }
        if outputs.len() == 2 {
            if outputs[0].0 != outputs[1].0 {
                f.push(format!("{label}: trace CSV differs between runs"));
            }
            if outputs[0].1 != outputs[1].1 {
                f.push(format!("{label}: summary JSON differs between runs"));
            }
            if let Err(e) = summary_matches_trace(&outputs[0].0, &outputs[0].1) {
                f.push(format!("{label}: {e}"));
            }
        }
    }
    report("run determinism", &f);
}

/// Recomputes the summary statistics from the trace and compares them with
/// the JSON bit for bit.
fn summary_matches_trace(csv: &[u8], json: &[u8]) -> Result<(), String> {
    let csv = String::from_utf8(csv.to_vec()).map_err(|e| e.to_string())?;
    let mut finals: Vec<(usize, f64, u64)> = Vec::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let rep: usize = cols[0].parse().map_err(|_| "bad replicate")?;
        let best: f64 = cols[3].parse().map_err(|_| "bad best")?;
        let evals: u64 = cols[4].parse().map_err(|_| "bad evaluations")?;
        match finals.last_mut() {
            Some(last) if last.0 == rep => *last = (rep, best, evals),
            _ => finals.push((rep, best, evals)),
        }
    }
    let values: Vec<f64> = finals.iter().map(|x| x.1).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    };
    let mean_evals = finals.iter().map(|x| x.2 as f64).sum::<f64>() / n;

    let doc: serde_json::Value = serde_json::from_slice(json).map_err(|e| e.to_string())?;
    let s = &doc["summary"];
    let pairs = [
        ("best", sorted[0]),
        ("worst", sorted[sorted.len() - 1]),
        ("mean", mean),
        ("median", median),
        ("std", std),
        ("mean_evaluations", mean_evals),
    ];
    for (key, want) in pairs {
        let got = s[key].as_f64().ok_or(format!("summary.{key} missing"))?;
        if got.to_bits() != want.to_bits() {
            return Err(format!("summary.{key} = {got}, trace gives {want}"));
        }
    }
    if s["replicates"].as_u64() != Some(values.len() as u64) {
        return Err("replicate count differs".into());
    }
    Ok(())
}

fn curve(args: &[&str]) -> Result<Vec<(usize, f64)>, String> {
    let out = firefly()
        .arg("curves")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    text.lines()
        .skip(1)
        .map(|l| {
            let (i, v) = l.split_once(',').ok_or("missing comma")?;
            Ok((
                i.parse().map_err(|_| "bad iteration")?,
                v.parse().map_err(|_| "bad value")?,
            ))
        })
        .collect()
}

#[test]
fn curve_reproduction() {
    let mut f = Vec::new();
    let max_iter = 100;
    let mut series = Vec::new();
    for theta in [0.9f64, 0.95, 0.99] {
        let t = theta.to_string();
        series.push((
            format!("geometric theta={theta}"),
            curve(&[
                "--schedule",
                "geometric",
                "--alpha0",
                "2.5",
                "--theta",
                &t,
                "--maxitr",
                "100",
            ]),
            Box::new(move |i: usize| 2.5 * theta.powi(i as i32)) as Box<dyn Fn(usize) -> f64>,
        ));
    }
    series.push((
        "linear 2.5 to 0.1".to_string(),
        curve(&[
            "--schedule",
            "linear",
            "--alpha0",
            "2.5",
            "--alpha-min",
            "0.1",
            "--maxitr",
            "100",
        ]),
        Box::new(|i: usize| 2.5 - (2.5 - 0.1) * i as f64 / 100.0),
    ));
    for (name, got, want) in series {
        match got {
            Err(e) => f.push(format!("{name}: {e}")),
            Ok(rows) => {
                if rows.len() != max_iter + 1 {
                    f.push(format!("{name}: {} rows", rows.len()));
                }
                for (i, v) in rows {
                    if (v - want(i)).abs() > CURVE_TOL {
                        f.push(format!("{name} at {i}: {v} vs {}", want(i)));
                        break;
                    }
                }
            }
        }
    }
    for n in 2..=9usize {
        let ns = n.to_string();
        match curve(&["--schedule", "floor-dim", "--n", &ns, "--maxitr", "100"]) {
            Err(e) => f.push(format!("floor-dim n={n}: {e}")),
            Ok(rows) => {
                let vals: Vec<f64> = rows.iter().map(|r| r.1).collect();
                let integral = vals.iter().all(|v| v.fract() == 0.0);
                let steps_ok = vals.windows(2).all(|w| w[1] <= w[0] && w[0] - w[1] <= 1.0);
                let covers = (0..=n).all(|k| vals.contains(&(k as f64)));
                if !(integral
                    && steps_ok
                    && covers
                    && vals[0] == n as f64
                    && *vals.last().unwrap() == 0.0)
                {
                    f.push(format!(
                        "floor-dim n={n} is not a staircase from {n} to 0: {vals:?}"
                    ));
                }
            }
        }
    }
    report("curve reproduction", &f);
}
