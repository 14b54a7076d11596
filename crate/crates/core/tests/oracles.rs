//! The exhaustive solvers agree with independently written enumerators.

use std::sync::Arc;

use firefly_core::problems::{KnapsackInstance, TspInstance};
use firefly_core::RngStream;

/// Include/exclude recursion over items, tracking remaining capacity.
fn knapsack_best_value(values: &[f64], weights: &[f64], capacity: f64) -> f64 {
    fn go(k: usize, values: &[f64], weights: &[f64], room: f64) -> f64 {
        if k == values.len() {
            return 0.0;
        }
        let skip = go(k + 1, values, weights, room);
        if weights[k] <= room {
            skip.max(values[k] + go(k + 1, values, weights, room - weights[k]))
        } else {
            skip
        }
    }
    go(0, values, weights, capacity)
}

/// Heap's algorithm over all n! orderings.
fn tsp_best_length(t: &TspInstance) -> f64 {
    let n = t.len();
    let mut p: Vec<usize> = (0..n).collect();
    let length = |p: &[usize]| {
        (0..n)
            .map(|k| t.distance(p[k], p[(k + 1) % n]))
            .sum::<f64>()
    };
    let mut best = length(&p);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            best = best.min(length(&p));
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
fn knapsack_oracle_matches_recursive_enumeration() {
    for seed in 0..25 {
        let n = 1 + (seed as usize % 14);
        let inst = KnapsackInstance::random(n, &mut RngStream::new(seed));
        let (bits, f) = inst.brute_force().unwrap();
        let expected = knapsack_best_value(inst.values(), inst.weights(), inst.capacity());
        assert!(
            (f + expected).abs() < 1e-9,
            "seed {seed}: {f} vs -{expected}"
        );
        assert!(inst.is_feasible(&bits));
        assert!((inst.eval(&bits) - f).abs() < 1e-12);
    }
}

#[test]
fn knapsack_oracle_on_a_hand_instance() {
    // best is items 2 and 3: value 22 at weight 5
    let inst = KnapsackInstance::new(vec![6.0, 10.0, 12.0], vec![1.0, 2.0, 3.0], 5.0).unwrap();
    let (bits, f) = inst.brute_force().unwrap();
    assert_eq!(bits, vec![0.0, 1.0, 1.0]);
    assert_eq!(f, -22.0);
}

#[test]
fn tsp_oracle_matches_heap_enumeration() {
    for seed in 0..15 {
        let n = 3 + (seed as usize % 6);
        let inst = TspInstance::random_euclidean(n, &mut RngStream::new(100 + seed));
        let (tour, f) = inst.brute_force().unwrap();
        let expected = tsp_best_length(&inst);
        assert!(
            (f - expected).abs() < 1e-9,
            "seed {seed}: {f} vs {expected}"
        );
        assert!((inst.eval(&tour).unwrap() - f).abs() < 1e-12);
        let p = Arc::new(inst).problem();
        assert!(p.check(&tour).is_ok());
    }
}

#[test]
fn tsp_oracle_on_a_square() {
    // unit square corners; the perimeter 4 beats both crossing tours
    let s = 2f64.sqrt();
    let m = vec![
        vec![0.0, 1.0, s, 1.0],
        vec![1.0, 0.0, 1.0, s],
        vec![s, 1.0, 0.0, 1.0],
        vec![1.0, s, 1.0, 0.0],
    ];
    let (_, f) = TspInstance::new(m).unwrap().brute_force().unwrap();
    assert!((f - 4.0).abs() < 1e-12);
}
