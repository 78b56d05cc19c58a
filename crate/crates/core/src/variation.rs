//! Mutation, binomial crossover and bound repair.

use crate::objectives::ObjectiveSpec;
use crate::rng::RngStream;

fn check_lengths(vs: &[&[f64]]) {
    let d = vs[0].len();
    assert!(vs.iter().all(|v| v.len() == d), "genome length mismatch");
}

/// `x_r1 + F (x_r2 - x_r3)`
pub fn rand1(x_r1: &[f64], x_r2: &[f64], x_r3: &[f64], f: f64) -> Vec<f64> {
    check_lengths(&[x_r1, x_r2, x_r3]);
    x_r1.iter()
        .zip(x_r2)
        .zip(x_r3)
        .map(|((a, b), c)| a + f * (b - c))
        .collect()
}

/// `x_p + F (x_pbest - x_p) + F (x_r1 - x_r2)`
pub fn current_to_pbest(x_p: &[f64], x_pbest: &[f64], x_r1: &[f64], x_r2: &[f64], f: f64) -> Vec<f64> {
    check_lengths(&[x_p, x_pbest, x_r1, x_r2]);
    (0..x_p.len())
        .map(|j| x_p[j] + f * (x_pbest[j] - x_p[j]) + f * (x_r1[j] - x_r2[j]))
        .collect()
}

/// Binomial crossover. Draws `j_rand` first, then one uniform per dimension
/// in order; coordinate `j` comes from the mutant when `u <= C` or `j == j_rand`.
pub fn binomial_crossover(parent: &[f64], mutant: &[f64], c: f64, rng: &mut RngStream) -> Vec<f64> {
    check_lengths(&[parent, mutant]);
    let j_rand = rng.below(parent.len());
    (0..parent.len())
        .map(|j| {
            let u = rng.uniform();
            if u <= c || j == j_rand {
                mutant[j]
            } else {
                parent[j]
            }
        })
        .collect()
}

/// Midpoint repair: an out-of-bounds coordinate moves halfway from the
/// parent's value to the violated bound.
pub fn repair_bounds(offspring: &mut [f64], parent: &[f64], spec: &ObjectiveSpec) {
    check_lengths(&[offspring, parent]);
    for j in 0..offspring.len() {
        if offspring[j] < spec.lower[j] {
            offspring[j] = (parent[j] + spec.lower[j]) / 2.0;
        } else if offspring[j] > spec.upper[j] {
            offspring[j] = (parent[j] + spec.upper[j]) / 2.0;
        }
    }
}
