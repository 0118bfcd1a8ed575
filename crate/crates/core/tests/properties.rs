use std::collections::BTreeMap;

use mcps::benchmark::{self, BenchmarkRecord};
use mcps::generate::{self, QuotaPolicy};
use mcps::ising::{self, IsingModel, SpinVector};
use mcps::model::{Color, Coloring, ProblemInstance};
use mcps::solvers::{self, SolverKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance_strategy(max_cars: usize) -> impl Strategy<Value = ProblemInstance> {
    (1..=max_cars, any::<u64>(), any::<bool>()).prop_flat_map(|(n, seed, balanced)| {
        (1..=n.min(8)).prop_map(move |m| {
            let policy = if balanced {
                QuotaPolicy::Balanced
            } else {
                QuotaPolicy::UniformRandom
            };
            generate::generate_synthetic(n, m, policy, seed).unwrap()
        })
    })
}

fn with_coloring(max_cars: usize) -> impl Strategy<Value = (ProblemInstance, Coloring)> {
    instance_strategy(max_cars).prop_flat_map(|inst| {
        let n = inst.len();
        (Just(inst), prop::collection::vec(any::<bool>(), n))
            .prop_map(|(inst, bits)| (inst, to_coloring(&bits)))
    })
}

fn to_coloring(bits: &[bool]) -> Coloring {
    Coloring::new(
        bits.iter()
            .map(|&b| if b { Color::Black } else { Color::White })
            .collect(),
    )
}

fn model_strategy(max_vars: usize) -> impl Strategy<Value = IsingModel> {
    (1..=max_vars).prop_flat_map(|n| {
        (
            prop::collection::vec(-6i32..=6, n),
            prop::collection::vec(-6i32..=6, n * (n - 1) / 2),
            -6i32..=6,
        )
            .prop_map(move |(h, j, offset)| {
                let mut m = IsingModel::new(n);
                m.add_offset(offset as f64 / 2.0);
                for (i, v) in h.iter().enumerate() {
                    m.add_linear(i, *v as f64 / 2.0);
                }
                let mut it = j.iter();
                for a in 0..n {
                    for b in a + 1..n {
                        m.add_quadratic(a, b, *it.next().unwrap() as f64 / 2.0);
                    }
                }
                m
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn switches_are_complement_invariant((inst, c) in with_coloring(40)) {
        prop_assert_eq!(inst.count_switches(&c).unwrap(), inst.count_switches(&c.complement()).unwrap());
    }

    #[test]
    fn repair_is_valid_and_idempotent((inst, c) in with_coloring(40)) {
        let (fixed, _) = solvers::repair(&inst, &c).unwrap();
        prop_assert!(inst.is_valid(&fixed));
        let (again, changed) = solvers::repair(&inst, &fixed).unwrap();
        prop_assert_eq!(again, fixed);
        prop_assert!(!changed);
    }

    #[test]
    fn random_and_greedy_are_valid(inst in instance_strategy(60), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(inst.is_valid(&solvers::random_valid(&inst, &mut rng)));
        prop_assert!(inst.is_valid(&solvers::greedy_black_first(&inst)));
    }

    #[test]
    fn fixed_positions_agree_with_valid_colorings(inst in instance_strategy(40), seed in any::<u64>()) {
        let c = solvers::random_valid(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
        for (pos, color) in inst.fixed_positions() {
            prop_assert_eq!(c.get(pos), color);
        }
    }

    #[test]
    fn energy_of_valid_coloring_is_chain_plus_floor((inst, _) in with_coloring(30), seed in any::<u64>()) {
        let c = solvers::random_valid(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
        let spins = SpinVector::from_coloring(&c);
        let chain = ising::chain_model(&inst).energy(&spins).unwrap();
        let f = inst.count_switches(&c).unwrap() as f64;
        prop_assert_eq!(chain, 2.0 * f - (inst.len() as f64 - 1.0));
    }

    #[test]
    fn qubo_matches_ising(model in model_strategy(8), bits in any::<u8>()) {
        let n = model.n_vars();
        let x: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        let spins = SpinVector::from_bits(bits as u64, n);
        let e = model.energy(&spins).unwrap();
        prop_assert_eq!(model.to_qubo().energy(&x).unwrap(), e);
        prop_assert_eq!(model.to_qubo().to_ising().energy(&spins).unwrap(), e);
    }

    #[test]
    fn conditioning_is_exact(model in model_strategy(8), mask in any::<u8>(), values in any::<u8>(), rest in any::<u8>()) {
        let n = model.n_vars();
        let fixed: BTreeMap<usize, i8> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| (i, if values >> i & 1 == 1 { 1 } else { -1 }))
            .collect();
        let cond = model.condition(&fixed).unwrap();
        let reduced = SpinVector::from_bits(rest as u64, cond.n_vars());
        let mut full = vec![0i8; n];
        for (&i, &s) in &fixed {
            full[i] = s;
        }
        for (v, &pos) in cond.var_to_position().iter().enumerate() {
            full[pos] = reduced.as_slice()[v];
        }
        prop_assert_eq!(cond.energy(&reduced).unwrap(), model.energy(&SpinVector::new(full).unwrap()).unwrap());
    }

    #[test]
    fn model_json_round_trips(model in model_strategy(8)) {
        let back = IsingModel::from_json(&model.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), model.to_json());
    }

    #[test]
    fn instance_json_round_trips(inst in instance_strategy(40)) {
        let text = inst.to_json();
        prop_assert_eq!(ProblemInstance::from_json(&text).unwrap().to_json(), text);
    }

    #[test]
    fn partitions_concatenate_to_prefix(inst in instance_strategy(80), chunk in 1usize..20, seed in any::<u64>()) {
        let production = solvers::random_valid(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
        let parts = generate::partition_stream(&inst, &production, chunk).unwrap();
        prop_assert_eq!(parts.len(), inst.len() / chunk);
        let mut offset = 0;
        for part in &parts {
            let p = &part.instance;
            prop_assert_eq!(p.len(), chunk);
            // same-ensemble relation is preserved inside the chunk
            for a in 0..chunk {
                for b in 0..chunk {
                    let same_src = inst.ensemble_of(offset + a) == inst.ensemble_of(offset + b);
                    prop_assert_eq!(p.ensemble_of(a) == p.ensemble_of(b), same_src);
                }
            }
            // the production slice is a valid coloring of the chunk
            let slice = Coloring::new(production.as_slice()[offset..offset + chunk].to_vec());
            prop_assert!(p.is_valid(&slice));
            offset += chunk;
        }
    }

    #[test]
    fn aggregate_ignores_record_order(values in prop::collection::vec((0usize..3, 0usize..50, 0.0f64..60.0), 1..30), rot in 0usize..30) {
        let records: Vec<BenchmarkRecord> = values
            .iter()
            .enumerate()
            .map(|(i, &(size, f, base))| BenchmarkRecord {
                instance: format!("i{i}"),
                n_cars: [10, 30, 100][size],
                solver: SolverKind::Greedy,
                best_switches: Some(f),
                valid_raw: true,
                repaired: false,
                baseline_mean: base,
                baseline_best: f,
                improvement: Some(base - f as f64),
                wall_time_ms: 0.0,
                seed: 0,
                timeout_bound: false,
                error: None,
            })
            .collect();
        let mut rotated = records.clone();
        let k = rot % rotated.len();
        rotated.rotate_left(k);
        rotated.reverse();
        prop_assert_eq!(benchmark::aggregate(&records).unwrap(), benchmark::aggregate(&rotated).unwrap());
    }

    #[test]
    fn improvement_decreases_with_switches(baseline in 0.0f64..100.0, a in 0usize..100, b in 0usize..100) {
        let imp = |f: usize| baseline - f as f64;
        prop_assert_eq!(a <= b, imp(a) >= imp(b));
    }
}
