/// Result of [`water_fill`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFill {
    pub shares: Vec<f64>,
    /// The common level `lambda` at which the clamped shares meet the total.
    pub level: f64,
}

/// Solves `sum_i clamp((levels[i] - lambda) * rates[i], 0, caps[i]) = total`.
///
/// Each term is continuous and non-increasing in `lambda`, piecewise linear
/// with breakpoints at `levels[i] - caps[i] / rates[i]` (share reaches its cap)
/// and `levels[i]` (share reaches zero). The breakpoints are sorted, the
/// segment containing the root is located, and `lambda` is solved exactly on
/// that segment's active set.
///
/// Requires `rates[i] > 0`, `caps[i] >= 0` and `0 < total <= sum(caps)`.
pub fn water_fill(levels: &[f64], rates: &[f64], caps: &[f64], total: f64) -> WaterFill {
    let n = levels.len();
    assert!(rates.len() == n && caps.len() == n, "mismatched lengths");
    debug_assert!(rates.iter().all(|&r| r > 0.0));

    let share = |i: usize, lambda: f64| ((levels[i] - lambda) * rates[i]).clamp(0.0, caps[i]);
    let filled = |lambda: f64| (0..n).map(|i| share(i, lambda)).sum::<f64>();

    let mut breaks: Vec<f64> =
        (0..n).filter(|&i| caps[i] > 0.0).flat_map(|i| [levels[i] - caps[i] / rates[i], levels[i]]).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let Some(&first) = breaks.first() else {
        return WaterFill { shares: vec![0.0; n], level: 0.0 };
    };
    // Every share sits at its cap at or below the first breakpoint.
    if filled(first) <= total {
        return WaterFill { shares: caps.to_vec(), level: first };
    }

    let mut level = *breaks.last().unwrap();
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let at_hi = filled(hi);
        if at_hi == total {
            level = hi;
            break;
        }
        if at_hi < total {
            // Active set is constant on (lo, hi): classify by the midpoint.
            let mid = 0.5 * (lo + hi);
            let (mut fixed, mut weighted, mut rate_sum) = (0.0, 0.0, 0.0);
            for i in 0..n {
                let raw = (levels[i] - mid) * rates[i];
                if raw >= caps[i] {
                    fixed += caps[i];
                } else if raw > 0.0 {
                    weighted += levels[i] * rates[i];
                    rate_sum += rates[i];
                }
            }
            level = ((weighted + fixed - total) / rate_sum).clamp(lo, hi);
            break;
        }
    }

    let mut shares: Vec<f64> = (0..n).map(|i| share(i, level)).collect();
    absorb_residual(&mut shares, caps, total);
    WaterFill { shares, level }
}

/// Pushes floating-point residual of the sum onto the shares with the most
/// room, keeping every share inside its box.
fn absorb_residual(shares: &mut [f64], caps: &[f64], total: f64) {
    let residual = total - shares.iter().sum::<f64>();
    if residual == 0.0 {
        return;
    }
    let slack = |i: usize| if residual > 0.0 { caps[i] - shares[i] } else { shares[i] };
    if let Some(i) = (0..shares.len())
        .filter(|&i| shares[i] > 0.0 && shares[i] < caps[i])
        .max_by(|&a, &b| slack(a).total_cmp(&slack(b)))
    {
        shares[i] = (shares[i] + residual).clamp(0.0, caps[i]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_split() {
        let w = water_fill(&[0.6; 5], &[1.0; 5], &[0.4; 5], 1.0);
        for x in &w.shares {
            assert!((x - 0.2).abs() < 1e-15);
        }
        assert!((w.level - 0.4).abs() < 1e-15);
    }

    #[test]
    fn clamps_at_zero_and_cap() {
        // Strong player saturates, weak player drops out.
        let w = water_fill(&[2.0, 0.5, 0.5, 0.0], &[1.0; 4], &[0.4, 0.4, 0.4, 0.4], 1.0);
        assert_eq!(w.shares[0], 0.4);
        assert!((w.shares[1] - 0.3).abs() < 1e-15);
        assert!((w.shares[2] - 0.3).abs() < 1e-15);
        assert_eq!(w.shares[3], 0.0);
        assert!((w.level - 0.2).abs() < 1e-15);
    }

    #[test]
    fn all_caps_needed() {
        let w = water_fill(&[0.3, 0.7], &[1.0, 2.0], &[0.5, 0.5], 1.0);
        assert_eq!(w.shares, vec![0.5, 0.5]);
    }

    #[test]
    fn zero_cap_entries_stay_empty() {
        let w = water_fill(&[5.0, 0.5, 0.5], &[1.0, 1.0, 1.0], &[0.0, 0.6, 0.6], 1.0);
        assert_eq!(w.shares[0], 0.0);
        assert!((w.shares[1] - 0.5).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sums_to_total_inside_box(
                levels in prop::collection::vec(-1.0f64..1.0, 5),
                rates in prop::collection::vec(0.1f64..10.0, 5),
                caps in prop::collection::vec(0.2f64..0.6, 5),
            ) {
                let w = water_fill(&levels, &rates, &caps, 1.0);
                prop_assert!((w.shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for (i, x) in w.shares.iter().enumerate() {
                    prop_assert!(*x >= 0.0 && *x <= caps[i]);
                    let raw = ((levels[i] - w.level) * rates[i]).clamp(0.0, caps[i]);
                    prop_assert!((raw - x).abs() < 1e-9);
                }
            }
        }
    }
}
