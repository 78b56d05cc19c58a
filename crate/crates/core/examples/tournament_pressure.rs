//! How the divisor T sets selection pressure: winning probability by rank
//! for several tournament sizes, checked against sampled tournaments.

use unbounded_de::rng::RngStream;
use unbounded_de::selection::{sample_tournament_rank, tournament_probability, tournament_size};

fn main() {
    let pop = 1_000;
    let draws = 200_000;
    let mut rng = RngStream::new(3);
    println!("population {pop}; P(winner rank <= k) for k = 1, 10, 100, 500");
    for t in [1_000.0, 100.0, 10.0, 2.0] {
        let n = tournament_size(pop, t);
        let exact: Vec<f64> = [1, 10, 100, 500]
            .iter()
            .map(|&k| (1..=k).map(|i| tournament_probability(i, n, pop)).sum())
            .collect();
        let mut hits = [0usize; 4];
        for _ in 0..draws {
            let rank = sample_tournament_rank(pop, n, &mut rng) + 1;
            for (h, k) in hits.iter_mut().zip([1, 10, 100, 500]) {
                *h += usize::from(rank <= k);
            }
        }
        let sampled: Vec<String> = hits.iter().map(|&h| format!("{:.4}", h as f64 / draws as f64)).collect();
        let exact: Vec<String> = exact.iter().map(|p| format!("{p:.4}")).collect();
        println!("T = {t:>6}  n = {n:>3}  exact [{}]  sampled [{}]", exact.join(" "), sampled.join(" "));
    }
}
