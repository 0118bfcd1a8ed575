//! Acceptance checks. Runs without the libtest harness so every criterion
//! prints exactly one `[PASS]`/`[FAIL]` line; the process fails if any does.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use mcps::benchmark::{self, AggregateRow, BenchmarkRecord, SuiteOptions, RANDOM_MEAN};
use mcps::generate::{self, QuotaPolicy};
use mcps::ising::{self, IsingModel, PenaltyWeight, SpinVector};
use mcps::model::{Color, Coloring, ProblemInstance};
use mcps::solvers::{self, SolverKind, SolverSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact comparisons on integer-valued energies stored as f64.
const EXACT_TOL: f64 = 1e-9;
const CRIT1_INSTANCES: usize = 200;
const CRIT1_RUNTIME_S: f64 = 120.0;
const CRIT2_COLORINGS: usize = 1000;
const CRIT3_MAX_M: usize = 6;
const CRIT5_MAX_VARS: usize = 10;
const SUITE_SIZE: usize = 50;
const SUITE_SIZES: [usize; 3] = [10, 30, 100];
const CRIT7_MIN_FRACTION: f64 = 0.9;
const CRIT8_SIZES: [usize; 4] = [10, 30, 100, 300];
const CRIT8_MIN_R2: f64 = 0.95;
const CRIT9_PAIRS: usize = 10_000;
const CRIT9_ORACLE_MAX_FREE: usize = 12;
const CRIT10_SIZES: [usize; 3] = [10, 100, 1000];
const CRIT10_FACTOR: f64 = 1.5;

type Check = Result<String, String>;

// ---- independent oracles -------------------------------------------------

fn oracle_switches(c: &Coloring) -> usize {
    c.as_slice().windows(2).filter(|w| w[0] != w[1]).count()
}

fn oracle_valid(inst: &ProblemInstance, c: &Coloring) -> bool {
    let mut blacks: BTreeMap<u32, usize> = BTreeMap::new();
    for (pos, e) in inst.word().as_slice().iter().enumerate() {
        let b = blacks.entry(e.0).or_default();
        if c.get(pos) == Color::Black {
            *b += 1;
        }
    }
    inst.orders().iter().all(|(e, k)| blacks.get(&e.0).copied().unwrap_or(0) == k)
}

fn coloring_from_bits(bits: u64, n: usize) -> Coloring {
    Coloring::new(
        (0..n)
            .map(|i| if bits >> i & 1 == 1 { Color::Black } else { Color::White })
            .collect(),
    )
}

fn spins_of(c: &Coloring) -> Vec<i8> {
    c.iter().map(|x| if x == Color::Black { 1 } else { -1 }).collect()
}

/// Small random instance: 6..=14 cars, 2..=5 ensembles, random quotas.
fn small_instance(seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(6..=14);
    let m = rng.random_range(2..=5usize.min(n));
    let policy = if rng.random_bool(0.5) {
        QuotaPolicy::UniformRandom
    } else {
        QuotaPolicy::Balanced
    };
    generate::generate_synthetic(n, m, policy, seed).expect("valid generator arguments")
}

fn enumerable_suite() -> Vec<ProblemInstance> {
    (0..CRIT1_INSTANCES as u64).map(|s| small_instance(1000 + s)).collect()
}

// ---- criteria ------------------------------------------------------------

/// Exhaustive ground states of the λ=N model equal the set of optimal valid colorings.
fn criterion_1() -> Check {
    let start = Instant::now();
    let mut mismatches = 0;
    for inst in enumerable_suite() {
        let n = inst.len();
        let model = ising::encode_default(&inst);
        let mut best_energy = f64::INFINITY;
        let mut ground: BTreeSet<u64> = BTreeSet::new();
        let mut best_f = usize::MAX;
        let mut optimal: BTreeSet<u64> = BTreeSet::new();
        for bits in 0..(1u64 << n) {
            let c = coloring_from_bits(bits, n);
            let e = model.energy(&SpinVector::from_coloring(&c)).unwrap();
            if e < best_energy - EXACT_TOL {
                best_energy = e;
                ground.clear();
            }
            if (e - best_energy).abs() <= EXACT_TOL {
                ground.insert(bits);
            }
            if oracle_valid(&inst, &c) {
                let f = oracle_switches(&c);
                if f < best_f {
                    best_f = f;
                    optimal.clear();
                }
                if f == best_f {
                    optimal.insert(bits);
                }
            }
        }
        let exact = solvers::brute_force(&inst).unwrap();
        let exact_bits: u64 = exact
            .coloring
            .iter()
            .enumerate()
            .map(|(i, c)| ((c == Color::Black) as u64) << i)
            .sum();
        if ground != optimal
            || exact.optimum != best_f
            || exact.n_optima != optimal.len() as u64
            || !optimal.contains(&exact_bits)
        {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("{mismatches} mismatches over {CRIT1_INSTANCES} instances in {secs:.1}s");
    if mismatches == 0 && secs < CRIT1_RUNTIME_S {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Chain energy equals 2 f(w) - (N - 1).
fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    for i in 0..CRIT2_COLORINGS {
        let n = rng.random_range(2..=60);
        let m = rng.random_range(1..=n.min(10));
        let inst =
            generate::generate_synthetic(n, m, QuotaPolicy::UniformRandom, i as u64).unwrap();
        let c = coloring_from_bits(rng.random::<u64>(), n);
        let s = spins_of(&c);
        let by_hand: i64 = -s.windows(2).map(|w| (w[0] * w[1]) as i64).sum::<i64>();
        let expected = 2 * oracle_switches(&c) as i64 - (n as i64 - 1);
        let model = ising::chain_model(&inst).energy(&SpinVector::from_coloring(&c)).unwrap();
        if by_hand != expected || model != expected as f64 {
            bad += 1;
        }
    }
    if bad == 0 {
        Ok(format!("{CRIT2_COLORINGS} colorings, 0 deviations"))
    } else {
        Err(format!("{bad} of {CRIT2_COLORINGS} colorings deviate"))
    }
}

/// Penalty excess over the valid floor is 2 (k' - k)^2 for every m <= 6.
fn criterion_3() -> Check {
    let mut cases = 0;
    let mut bad = Vec::new();
    for m in 1..=CRIT3_MAX_M {
        for k in 0..=m {
            let inst = ProblemInstance::from_parts("clique", &vec![0; m], &[(0, k)]).unwrap();
            let model = ising::penalty_model(&inst);
            let mut floor = f64::INFINITY;
            let mut by_blacks: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for bits in 0..(1u64 << m) {
                let c = coloring_from_bits(bits, m);
                let e = model.energy(&SpinVector::from_coloring(&c)).unwrap();
                by_blacks.entry(bits.count_ones() as usize).or_default().push(e);
                if bits.count_ones() as usize == k {
                    floor = floor.min(e);
                }
            }
            for (kp, energies) in by_blacks {
                let want = 2.0 * (kp as f64 - k as f64).powi(2);
                for e in energies {
                    cases += 1;
                    if (e - floor - want).abs() > EXACT_TOL {
                        bad.push(format!("m={m} k={k} k'={kp}"));
                    }
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{cases} states over m <= {CRIT3_MAX_M}, all exact"))
    } else {
        Err(format!("{} deviations, first {}", bad.len(), bad[0]))
    }
}

/// No invalid state undercuts the best valid state at λ = N.
fn criterion_4() -> Check {
    let mut violations = 0;
    for inst in enumerable_suite() {
        let n = inst.len();
        let model = ising::encode_default(&inst);
        let mut best_valid = f64::INFINITY;
        let mut best_invalid = f64::INFINITY;
        for bits in 0..(1u64 << n) {
            let c = coloring_from_bits(bits, n);
            let e = model.energy(&SpinVector::from_coloring(&c)).unwrap();
            if oracle_valid(&inst, &c) {
                best_valid = best_valid.min(e);
            } else {
                best_invalid = best_invalid.min(e);
            }
        }
        if best_invalid < best_valid - EXACT_TOL {
            violations += 1;
        }
    }
    if violations == 0 {
        Ok(format!("{CRIT1_INSTANCES} instances, 0 violations"))
    } else {
        Err(format!("{violations} instances with an invalid state below the valid optimum"))
    }
}

fn random_model(rng: &mut ChaCha8Rng, n: usize) -> IsingModel {
    // halves and small integers keep every sum exact in binary floating point
    let mut m = IsingModel::new(n);
    m.add_offset(rng.random_range(-8..=8) as f64 / 2.0);
    for i in 0..n {
        if rng.random_bool(0.7) {
            m.add_linear(i, rng.random_range(-10..=10) as f64 / 2.0);
        }
        for j in i + 1..n {
            if rng.random_bool(0.5) {
                m.add_quadratic(i, j, rng.random_range(-10..=10) as f64 / 2.0);
            }
        }
    }
    m
}

/// QUBO/Ising agreement and condition-then-complete agreement on all states.
fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut states = 0u64;
    let mut bad = 0u64;
    for n in 1..=CRIT5_MAX_VARS {
        for _ in 0..5 {
            let model = random_model(&mut rng, n);
            let qubo = model.to_qubo();
            let back = qubo.to_ising();
            for bits in 0..(1u64 << n) {
                let spins = SpinVector::from_bits(bits, n);
                let x: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                let e = model.energy(&spins).unwrap();
                states += 1;
                if qubo.energy(&x).unwrap() != e || back.energy(&spins).unwrap() != e {
                    bad += 1;
                }
            }
            let mut fixed: BTreeMap<usize, i8> = BTreeMap::new();
            for i in 0..n {
                if rng.random_bool(0.4) {
                    fixed.insert(i, if rng.random_bool(0.5) { 1 } else { -1 });
                }
            }
            let cond = model.condition(&fixed).unwrap();
            let free = cond.n_vars();
            for bits in 0..(1u64 << free) {
                let reduced = SpinVector::from_bits(bits, free);
                let mut full = vec![0i8; n];
                for (&i, &s) in &fixed {
                    full[i] = s;
                }
                for (v, &pos) in cond.var_to_position().iter().enumerate() {
                    full[pos] = reduced.as_slice()[v];
                }
                let full = SpinVector::new(full).unwrap();
                states += 1;
                if cond.energy(&reduced).unwrap() != model.energy(&full).unwrap() {
                    bad += 1;
                }
            }
        }
    }
    if bad == 0 {
        Ok(format!("{states} states for n <= {CRIT5_MAX_VARS}, all exact"))
    } else {
        Err(format!("{bad} of {states} states disagree"))
    }
}

struct SuiteRun {
    records: Vec<BenchmarkRecord>,
    rows: Vec<AggregateRow>,
}

fn reference_runs() -> Vec<SuiteRun> {
    let mut runs = Vec::new();
    for n in SUITE_SIZES {
        let instances = generate::reference_suite(n, SUITE_SIZE, 0).unwrap();
        let list = if n == 10 {
            "random,greedy,sa,exact"
        } else {
            "random,greedy,sa"
        };
        let specs = SolverSpec::parse_list(list).unwrap();
        let records = benchmark::run_suite(&instances, &specs, &SuiteOptions::default()).unwrap();
        let rows = benchmark::aggregate(&records).unwrap();
        runs.push(SuiteRun { records, rows });
    }
    runs
}

fn median_of(rows: &[AggregateRow], solver: &str) -> f64 {
    rows.iter()
        .find(|r| r.solver == solver)
        .map(|r| r.median_switches)
        .unwrap_or(f64::NAN)
}

/// Median ordering on the reference suite.
fn criterion_6(runs: &[SuiteRun]) -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, run) in SUITE_SIZES.iter().zip(runs) {
        let sa = median_of(&run.rows, "sa");
        let greedy = median_of(&run.rows, "greedy");
        let random = median_of(&run.rows, RANDOM_MEAN);
        let all_valid = run.rows.iter().all(|r| r.percent_valid == 100.0);
        if *n == 10 {
            let exact = median_of(&run.rows, "exact");
            ok &= exact <= sa && sa <= greedy && greedy <= random;
            parts.push(format!("N={n}: exact {exact} sa {sa} greedy {greedy} random {random}"));
        } else {
            ok &= sa < greedy && greedy < random;
            parts.push(format!("N={n}: sa {sa} greedy {greedy} random {random}"));
        }
        ok &= all_valid;
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// SA reaches the exact optimum on most small instances.
fn criterion_7(runs: &[SuiteRun]) -> Check {
    let records = &runs[0].records;
    let best = |name: &str, kind: SolverKind| {
        records
            .iter()
            .find(|r| r.instance == name && r.solver == kind)
            .and_then(|r| r.best_switches)
    };
    let names: BTreeSet<&str> = records.iter().map(|r| r.instance.as_str()).collect();
    let hits = names
        .iter()
        .filter(|name| {
            let exact = best(name, SolverKind::Exact);
            exact.is_some() && best(name, SolverKind::Sa) == exact
        })
        .count();
    let fraction = hits as f64 / names.len() as f64;
    let msg = format!("{hits}/{} optimal ({:.0}%)", names.len(), fraction * 100.0);
    if fraction >= CRIT7_MIN_FRACTION {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn r_squared(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

/// Greedy medians grow linearly in N.
fn criterion_8() -> Check {
    let mut points = Vec::new();
    for n in CRIT8_SIZES {
        let mut fs: Vec<f64> = generate::reference_suite(n, SUITE_SIZE, 0)
            .unwrap()
            .iter()
            .map(|inst| oracle_switches(&solvers::greedy_black_first(inst)) as f64)
            .collect();
        fs.sort_by(f64::total_cmp);
        points.push((n as f64, benchmark::median(&fs).unwrap()));
    }
    let r2 = r_squared(&points);
    let msg = format!("medians {points:?}, R^2 = {r2:.4}");
    if r2 > CRIT8_MIN_R2 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Repair fuzzing: valid output, idempotent on valid input, never below the optimum.
fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut invalid, mut moved, mut below, mut oracled) = (0, 0, 0, 0);
    for i in 0..CRIT9_PAIRS {
        let n = rng.random_range(1..=40);
        let m = rng.random_range(1..=n.min(12));
        let policy = if i % 2 == 0 {
            QuotaPolicy::UniformRandom
        } else {
            QuotaPolicy::Balanced
        };
        let inst = generate::generate_synthetic(n, m, policy, rng.random()).unwrap();
        let c = Coloring::new(
            (0..n)
                .map(|_| if rng.random_bool(0.5) { Color::Black } else { Color::White })
                .collect(),
        );
        let (fixed, _) = solvers::repair(&inst, &c).unwrap();
        if !oracle_valid(&inst, &fixed) {
            invalid += 1;
            continue;
        }
        let (again, changed) = solvers::repair(&inst, &fixed).unwrap();
        if again != fixed || changed {
            moved += 1;
        }
        let valid_input = solvers::random_valid(&inst, &mut rng);
        if solvers::repair(&inst, &valid_input).unwrap().0 != valid_input {
            moved += 1;
        }
        if inst.free_count() <= CRIT9_ORACLE_MAX_FREE {
            oracled += 1;
            if oracle_switches(&fixed) < solvers::brute_force(&inst).unwrap().optimum {
                below += 1;
            }
        }
    }
    let msg = format!(
        "{CRIT9_PAIRS} pairs: {invalid} invalid, {moved} not idempotent, {below}/{oracled} below optimum"
    );
    if invalid == 0 && moved == 0 && below == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Precision ratio shrinks with N and stays under 1.5 / N.
fn criterion_10() -> Check {
    let mut ratios = Vec::new();
    for n in CRIT10_SIZES {
        let m = generate::reference_ensembles(n);
        let inst = generate::generate_synthetic(n, m, QuotaPolicy::UniformRandom, 10).unwrap();
        let model = ising::encode(&inst, PenaltyWeight::for_instance(&inst));
        ratios.push((n, model.precision_ratio().unwrap()));
    }
    let bounded = ratios.iter().all(|&(n, r)| r <= CRIT10_FACTOR / n as f64);
    let decreasing = ratios.windows(2).all(|w| w[1].1 < w[0].1);
    let msg = format!("ratios {ratios:?}");
    if bounded && decreasing {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Two benchmark runs with the same seed give byte-identical CSV.
fn criterion_11() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inst_dir = dir.path().join("instances");
    let run = |args: &[&str]| -> Result<(), String> {
        let mut sink = Vec::new();
        mcps::cli::run_args(std::iter::once("mcps").chain(args.iter().copied()), &mut sink)
            .map_err(|e| e.to_string())
    };
    let inst_arg = inst_dir.to_str().unwrap();
    run(&["gen", "--cars", "20", "--count", "6", "--filter", "--seed", "11", "--out", inst_arg])?;
    let pattern = format!("{inst_arg}/*.json");
    let mut csvs = Vec::new();
    for attempt in 0..2 {
        let out = dir.path().join(format!("bench{attempt}"));
        run(&[
            "bench",
            "--instances",
            &pattern,
            "--solvers",
            "random,greedy,sa,exact",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ])?;
        csvs.push(std::fs::read(out.join("summary.csv")).map_err(|e| e.to_string())?);
    }
    if csvs[0] == csvs[1] && !csvs[0].is_empty() {
        Ok(format!("{} bytes, identical", csvs[0].len()))
    } else {
        Err("CSV output differs between runs".into())
    }
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, title: &str, check: Check| {
        match check {
            Ok(detail) => println!("[PASS] criterion {id:2} {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {id:2} {title}: {detail}");
            }
        }
    };
    report(1, "encoder ground states", criterion_1());
    report(2, "chain energy identity", criterion_2());
    report(3, "penalty algebra", criterion_3());
    report(4, "penalty weight sufficiency", criterion_4());
    report(5, "conversion and conditioning", criterion_5());
    let runs = reference_runs();
    report(6, "solver ordering", criterion_6(&runs));
    report(7, "annealing optimality at N=10", criterion_7(&runs));
    report(8, "greedy linear growth", criterion_8());
    report(9, "repair contract", criterion_9());
    report(10, "precision scaling", criterion_10());
    report(11, "benchmark determinism", criterion_11());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
