use super::{effective_upper_bound, AllocError, Limits, Lineup5, SolveReport, LINEUP_SIZE, TIE_TOLERANCE};

/// Best allocation on the lattice of multiples of `step`.
///
/// The search is exhaustive over every 5-tuple of lattice shares that sums to
/// one and stays inside each player's box. Because the payoff is separable it
/// runs as a max-plus dynamic program over players, which visits the same
/// tuples as nested enumeration in `O(players * units^2)` time. Ties resolve to
/// the lexicographically smallest allocation.
pub fn grid_oracle(profiles: &Lineup5, step: f64, limits: &Limits) -> Result<SolveReport, AllocError> {
    limits.validate()?;
    if !(step > 0.0 && step <= 1.0) {
        return Err(AllocError::InvalidGridStep(step));
    }
    let units = (1.0 / step).round() as usize;
    if units == 0 || (units as f64 * step - 1.0).abs() > 1e-9 {
        return Err(AllocError::InvalidGridStep(step));
    }
    let share = |k: usize| k as f64 / units as f64;

    // utilities[i][k] for admissible k, None otherwise
    let utilities: Vec<Vec<Option<f64>>> = profiles
        .iter()
        .map(|p| {
            let upper = effective_upper_bound(p, limits).min(limits.shot_cap);
            (0..=units).map(|k| (share(k) <= upper + 1e-12).then(|| p.utility(share(k)))).collect()
        })
        .collect();

    // best[i][r]: max payoff of players i.. using exactly r units
    let mut best = vec![vec![f64::NEG_INFINITY; units + 1]; LINEUP_SIZE + 1];
    best[LINEUP_SIZE][0] = 0.0;
    for i in (0..LINEUP_SIZE).rev() {
        for r in 0..=units {
            let mut top = f64::NEG_INFINITY;
            for k in 0..=r {
                if let Some(u) = utilities[i][k] {
                    let rest = best[i + 1][r - k];
                    if rest > f64::NEG_INFINITY && u + rest > top {
                        top = u + rest;
                    }
                }
            }
            best[i][r] = top;
        }
    }
    if best[0][units] == f64::NEG_INFINITY {
        let bound_sum = profiles.iter().map(|p| effective_upper_bound(p, limits)).sum();
        return Err(AllocError::InfeasibleLineup { bound_sum });
    }

    let mut x = [0.0; LINEUP_SIZE];
    let mut remaining = units;
    for i in 0..LINEUP_SIZE {
        let target = best[i][remaining];
        let k = (0..=remaining)
            .find(|&k| match utilities[i][k] {
                Some(u) => {
                    best[i + 1][remaining - k] > f64::NEG_INFINITY
                        && u + best[i + 1][remaining - k] >= target - TIE_TOLERANCE
                }
                None => false,
            })
            .expect("dynamic program is consistent");
        x[i] = share(k);
        remaining -= k;
    }
    Ok(SolveReport::build(profiles, x, None, limits))
}

#[cfg(test)]
mod tests {
    use super::super::solve_optimal;
    use super::*;
    use crate::behavior::ShootingProfile;

    fn lineup(lines: [(f64, f64); 5]) -> Lineup5 {
        std::array::from_fn(|i| ShootingProfile::from_line(format!("p{i}"), lines[i].0, lines[i].1))
    }

    /// Nested-loop enumeration of every lattice tuple.
    fn brute_force(ps: &Lineup5, units: usize, lim: &Limits) -> Option<([f64; 5], f64)> {
        let upper: Vec<f64> = ps.iter().map(|p| effective_upper_bound(p, lim)).collect();
        let ok = |i: usize, k: usize| k as f64 / units as f64 <= upper[i] + 1e-12;
        let mut best: Option<([f64; 5], f64)> = None;
        for a in 0..=units {
            for b in 0..=units - a {
                for c in 0..=units - a - b {
                    for d in 0..=units - a - b - c {
                        let e = units - a - b - c - d;
                        let ks = [a, b, c, d, e];
                        if !(0..5).all(|i| ok(i, ks[i])) {
                            continue;
                        }
                        let x = ks.map(|k| k as f64 / units as f64);
                        let f: f64 = (0..5).map(|i| ps[i].utility(x[i])).sum();
                        // loops run in lexicographic order, so strict > keeps the smallest
                        if best.is_none_or(|(_, bf)| f > bf + TIE_TOLERANCE) {
                            best = Some((x, f));
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn symmetric_grid_point() {
        let r = grid_oracle(&lineup([(-0.5, 0.6); 5]), 0.05, &Limits::default()).unwrap();
        assert_eq!(r.allocation.0, [0.2; 5]);
        assert!((r.payoff - 0.5).abs() < 1e-12);
    }

    #[test]
    fn flat_star_matches_solver() {
        let ps = lineup([(0.0, 0.7), (-1.0, 0.5), (-1.0, 0.5), (-1.0, 0.5), (-1.0, 0.5)]);
        let g = grid_oracle(&ps, 0.05, &Limits::default()).unwrap();
        let s = solve_optimal(&ps, &Limits::default()).unwrap();
        assert_eq!(g.allocation.0, [0.4, 0.15, 0.15, 0.15, 0.15]);
        assert!((g.payoff - 0.49).abs() < 1e-12);
        assert!((g.payoff - s.payoff).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_infeasible() {
        let err = grid_oracle(&lineup([(-0.5, 0.6); 5]), 0.5, &Limits::default()).unwrap_err();
        assert!(matches!(err, AllocError::InfeasibleLineup { .. }));
    }

    #[test]
    fn step_must_divide_one() {
        let ps = lineup([(-0.5, 0.6); 5]);
        for bad in [0.3, 0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(grid_oracle(&ps, bad, &Limits::default()), Err(AllocError::InvalidGridStep(_))), "{bad}");
        }
    }

    #[test]
    fn dynamic_program_matches_nested_loops() {
        let lim = Limits::default();
        let cases = [
            [(-0.5, 0.6); 5],
            [(-1.0, 0.7), (-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)],
            [(-2.0, 0.9), (-0.1, 0.3), (-1.3, 0.55), (-0.4, 0.62), (-0.9, 0.2)],
            [(0.0, 0.3), (0.0, 0.3), (-1.0, 0.6), (-1.0, 0.6), (-1.0, 0.6)],
            [(0.3, 0.2), (-1.0, 0.3), (-0.2, 0.6), (-3.0, 0.9), (0.0, 0.45)],
        ];
        for c in cases {
            let ps = lineup(c);
            let (bx, bf) = brute_force(&ps, 20, &lim).unwrap();
            let g = grid_oracle(&ps, 0.05, &lim).unwrap();
            assert!((g.payoff - bf).abs() < 1e-12, "{c:?}");
            assert_eq!(g.allocation.0, bx, "{c:?}");
        }
    }
}
