//! Synthetic season generator for the bundled fixtures.
//!
//! Writes a game-log CSV to stdout: 16 players, 82 games, one row per player
//! per game (minutes 0 for a DNP). Players `p01`..`p07` share the starts,
//! `p15` and `p16` play fewer than ten games.
//!
//! ```text
//! cargo run --example synth_season -- [seed] > fixtures/season.csv
//! ```

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PLAYERS: usize = 16;
const GAMES: usize = 82;
const TEAM_MINUTES: f64 = 240.0;

struct Player {
    intercept: f64,
    slope: f64,
    usage: f64,
    ft_rate: f64,
}

fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_150_401u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let players: Vec<Player> = (0..PLAYERS)
        .map(|_| Player {
            intercept: rng.gen_range(0.58..0.76),
            slope: rng.gen_range(-0.55..-0.12),
            usage: rng.gen_range(0.7..1.4),
            ft_rate: rng.gen_range(0.15..0.40),
        })
        .collect();

    // Games in which the two fringe players appear.
    let mut fringe: Vec<Vec<usize>> = Vec::new();
    for count in [6, 8] {
        let mut games: Vec<usize> = (0..GAMES).collect();
        games.shuffle(&mut rng);
        games.truncate(count);
        fringe.push(games);
    }

    println!("player_id,game_id,minutes,started,fga,fta,points");
    for game in 0..GAMES {
        let mut rotating: Vec<usize> = (3..7).collect();
        rotating.shuffle(&mut rng);
        let mut starters = vec![0, 1, 2];
        starters.extend_from_slice(&rotating[..2]);

        let mut bench: Vec<usize> = (3..14).filter(|p| !starters.contains(p)).collect();
        bench.shuffle(&mut rng);
        bench.truncate(rng.gen_range(4..=6));
        for (f, games) in fringe.iter().enumerate() {
            if games.contains(&game) {
                bench.push(14 + f);
            }
        }

        let mut raw = [0.0f64; PLAYERS];
        for &p in &starters {
            raw[p] = rng.gen_range(28.0..38.0);
        }
        for &p in &bench {
            raw[p] = rng.gen_range(6.0..22.0);
        }
        let scale = TEAM_MINUTES / raw.iter().sum::<f64>();
        let minutes: Vec<f64> = raw.iter().map(|m| (m * scale * 10.0).round() / 10.0).collect();

        let weights: Vec<f64> =
            (0..PLAYERS).map(|p| minutes[p] * players[p].usage * (0.25 * normal(&mut rng)).exp()).collect();
        let total_weight: f64 = weights.iter().sum();
        let team_shots = rng.gen_range(96.0..112.0);
        let shots: Vec<u32> = weights.iter().map(|w| (team_shots * w / total_weight).round() as u32).collect();
        let actual_team: f64 = shots.iter().map(|&s| f64::from(s)).sum();

        for p in 0..PLAYERS {
            let id = format!("p{:02}", p + 1);
            let gid = format!("g{:03}", game + 1);
            let started = u8::from(starters.contains(&p));
            if minutes[p] <= 0.0 {
                println!("{id},{gid},0,0,0,0,0");
                continue;
            }
            let fta = (f64::from(shots[p]) * players[p].ft_rate).round() as u32;
            let fga = shots[p] - fta;
            let fts = f64::from(shots[p]) / actual_team * 48.0 / minutes[p];
            let ts = (players[p].intercept + players[p].slope * fts + 0.06 * normal(&mut rng)).clamp(0.05, 0.95);
            let points = (ts * 2.0 * (f64::from(fga) + 0.44 * f64::from(fta))).round() as u32;
            println!("{id},{gid},{},{started},{fga},{fta},{points}", minutes[p]);
        }
    }
}
