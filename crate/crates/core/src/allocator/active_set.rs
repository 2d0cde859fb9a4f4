use itertools::Itertools;

use super::{
    effective_upper_bound, payoff_unchecked, AllocError, Allocation, Limits, Lineup5, SolveReport, LINEUP_SIZE,
    SUM_TOLERANCE, TIE_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Lower,
    Upper,
    Free,
}

/// Exact maximizer by enumeration of KKT active sets.
///
/// Every player is assigned to its lower bound, its upper bound, or the free
/// set. Free players with a nonzero slope satisfy `2 a_i x_i + b_i = lambda`;
/// at most one free player may have a zero slope, in which case
/// `lambda = b_i` and that player absorbs the residual share. The candidate
/// with the highest payoff wins; near-ties go to the lexicographically
/// smallest allocation.
///
/// Handles any mix of slope signs, including flat and increasing profiles.
pub fn solve_by_enumeration(profiles: &Lineup5, limits: &Limits) -> Result<SolveReport, AllocError> {
    limits.validate()?;
    let upper: [f64; LINEUP_SIZE] = std::array::from_fn(|i| effective_upper_bound(&profiles[i], limits));
    let bound_sum: f64 = upper.iter().sum();
    if bound_sum < 1.0 - SUM_TOLERANCE {
        return Err(AllocError::InfeasibleLineup { bound_sum });
    }

    let choices = |i: usize| -> Vec<State> {
        if upper[i] == 0.0 {
            vec![State::Lower]
        } else {
            vec![State::Lower, State::Upper, State::Free]
        }
    };

    let mut best: Option<([f64; LINEUP_SIZE], f64, Option<f64>)> = None;
    for states in (0..LINEUP_SIZE).map(choices).multi_cartesian_product() {
        let Some((x, lambda)) = candidate(profiles, &upper, &states) else {
            continue;
        };
        let f = payoff_unchecked(profiles, &Allocation(x));
        let better = match &best {
            None => true,
            Some((bx, bf, _)) => f > bf + TIE_TOLERANCE || ((f - bf).abs() <= TIE_TOLERANCE && lex_less(&x, bx)),
        };
        if better {
            best = Some((x, f, lambda));
        }
    }

    // A feasible box-simplex always has a vertex candidate, so `best` is set.
    let (x, _, lambda) = best.ok_or(AllocError::InfeasibleLineup { bound_sum })?;
    Ok(SolveReport::build(profiles, x, lambda, limits))
}

fn candidate(
    profiles: &Lineup5,
    upper: &[f64; LINEUP_SIZE],
    states: &[State],
) -> Option<([f64; LINEUP_SIZE], Option<f64>)> {
    let mut x = [0.0; LINEUP_SIZE];
    let mut fixed = 0.0;
    let mut free_sloped = Vec::new();
    let mut free_flat = Vec::new();
    for (i, s) in states.iter().enumerate() {
        match s {
            State::Lower => {}
            State::Upper => {
                x[i] = upper[i];
                fixed += upper[i];
            }
            State::Free if profiles[i].slope == 0.0 => free_flat.push(i),
            State::Free => free_sloped.push(i),
        }
    }

    let share_at = |i: usize, lambda: f64| (lambda - profiles[i].intercept) / (2.0 * profiles[i].slope);

    let lambda = match free_flat.as_slice() {
        [] if free_sloped.is_empty() => {
            if (fixed - 1.0).abs() > SUM_TOLERANCE {
                return None;
            }
            None
        }
        [] => {
            // fixed + sum (lambda - b_i) / (2 a_i) = 1
            let inv: f64 = free_sloped.iter().map(|&i| 1.0 / (2.0 * profiles[i].slope)).sum();
            if inv == 0.0 {
                return None;
            }
            let offset: f64 = free_sloped.iter().map(|&i| profiles[i].intercept / (2.0 * profiles[i].slope)).sum();
            let lambda = (1.0 - fixed + offset) / inv;
            for &i in &free_sloped {
                x[i] = share_at(i, lambda);
            }
            Some(lambda)
        }
        [z] => {
            let lambda = profiles[*z].intercept;
            let mut used = fixed;
            for &i in &free_sloped {
                x[i] = share_at(i, lambda);
                used += x[i];
            }
            x[*z] = 1.0 - used;
            Some(lambda)
        }
        // Two free flat players trade share at no cost in payoff; some optimum
        // has one of them on a bound, which another assignment covers.
        _ => return None,
    };

    const SLACK: f64 = 1e-12;
    for i in 0..LINEUP_SIZE {
        if !(x[i] >= -SLACK && x[i] <= upper[i] + SLACK) {
            return None;
        }
        x[i] = x[i].clamp(0.0, upper[i]);
    }
    if (x.iter().sum::<f64>() - 1.0).abs() > SUM_TOLERANCE {
        return None;
    }
    Some((x, lambda))
}

pub(crate) fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > TIE_TOLERANCE {
            return x < y;
        }
    }
    false
}
