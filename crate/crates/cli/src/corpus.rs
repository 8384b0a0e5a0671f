//! Built-in test corpus spanning both regimes and both oracle modes.

use latala_core::{Entry, Marginal, SummandSequence};

#[derive(Clone, Debug)]
pub struct Member {
    pub name: &'static str,
    pub seq: SummandSequence,
}

fn member(name: &'static str, entries: Vec<(Marginal, usize)>) -> Member {
    let entries = entries
        .into_iter()
        .map(|(marginal, count)| Entry { marginal, count })
        .collect();
    Member {
        name,
        seq: SummandSequence::new(entries).expect("corpus entries are nonempty"),
    }
}

fn rad(scale: f64) -> Marginal {
    Marginal::rademacher(scale).expect("positive scale")
}

fn atoms(a: &[(f64, f64)]) -> Marginal {
    Marginal::atoms(a.to_vec()).expect("valid corpus atoms")
}

/// Symmetric members; all discrete, so every oracle value is exact.
pub fn symmetric() -> Vec<Member> {
    vec![
        member("rademacher_n1", vec![(rad(1.0), 1)]),
        member("rademacher_n2", vec![(rad(1.0), 2)]),
        member("rademacher_n4", vec![(rad(1.0), 4)]),
        member("rademacher_n16", vec![(rad(1.0), 16)]),
        member(
            "rademacher_mix_123",
            vec![(rad(1.0), 1), (rad(2.0), 1), (rad(3.0), 1)],
        ),
        member(
            "rademacher_mix_spread",
            vec![(rad(0.5), 1), (rad(1.0), 2), (rad(4.0), 1)],
        ),
        member(
            "rademacher_big_plus_small",
            vec![(rad(10.0), 1), (rad(1.0), 8)],
        ),
        member(
            "geometric_decay_n10",
            (0..10).map(|k| (rad((-(k as f64)).exp2()), 1)).collect(),
        ),
        member(
            "symmetric_three_point_n3",
            vec![(atoms(&[(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]), 3)],
        ),
        member(
            "sparse_signs_n40",
            vec![(atoms(&[(-1.0, 0.05), (0.0, 0.9), (1.0, 0.05)]), 40)],
        ),
    ]
}

/// Nonnegative members; the censored exponentials go through Monte Carlo.
pub fn nonnegative() -> Vec<Member> {
    let half = atoms(&[(0.0, 0.5), (1.0, 0.5)]);
    vec![
        member("bernoulli_half_n1", vec![(half.clone(), 1)]),
        member("bernoulli_half_n3", vec![(half.clone(), 3)]),
        member("bernoulli_half_n8", vec![(half, 8)]),
        member("rare_large_n6", vec![(atoms(&[(0.0, 0.9), (5.0, 0.1)]), 6)]),
        member(
            "point_masses",
            vec![
                (Marginal::point_mass(1.0).expect("finite"), 1),
                (Marginal::point_mass(2.0).expect("finite"), 1),
                (Marginal::point_mass(0.5).expect("finite"), 1),
            ],
        ),
        member(
            "truncated_exponential_n3",
            vec![(Marginal::censored_exponential(1.0, 2.0).expect("valid"), 3)],
        ),
        member(
            "truncated_exponential_mix",
            vec![
                (Marginal::censored_exponential(0.5, 1.0).expect("valid"), 1),
                (Marginal::censored_exponential(2.0, 5.0).expect("valid"), 2),
            ],
        ),
    ]
}

/// Thresholds for tail checks: multiples of `‖S_n‖_2` plus every marginal
/// support point (where truncation changes).
pub fn t_grid(seq: &SummandSequence) -> Vec<f64> {
    let sigma = seq.l2_norm().unwrap_or(1.0).max(1e-12);
    let mut grid: Vec<f64> = [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0]
        .iter()
        .map(|m| m * sigma)
        .collect();
    grid.extend(support_points(seq).into_iter().filter(|&v| v > 0.0));
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    grid
}

/// `|value|` of every marginal support point, plus midpoints and a point
/// beyond the largest, for the maximum-tail sandwich.
pub fn u_grid(seq: &SummandSequence) -> Vec<f64> {
    let pts = support_points(seq);
    let mut grid = vec![0.0];
    grid.extend(pts.iter().copied());
    grid.extend(pts.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    if let Some(&last) = pts.last() {
        grid.push(last * 1.5 + 1.0);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn support_points(seq: &SummandSequence) -> Vec<f64> {
    let mut pts: Vec<f64> = seq
        .entries()
        .iter()
        .flat_map(|e| match e.marginal.support() {
            Some(s) => s.into_iter().map(|a| a.0.abs()).collect::<Vec<_>>(),
            None => {
                let top = e.marginal.ess_sup();
                let mean = e.marginal.mean().abs();
                [mean, 0.5 * top.min(10.0 * mean.max(1.0)), top]
                    .into_iter()
                    .filter(|v| v.is_finite())
                    .collect()
            }
        })
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
