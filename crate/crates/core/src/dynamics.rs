//! Asynchronous best-response dynamics.
//!
//! Randomness comes from ChaCha8 seeded with the run seed. The player draw,
//! the action draw and the random initial profile each use their own stream
//! of that generator (streams 0, 1 and 2), so the same seed reproduces the
//! same run on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::best_response::best_response_set;
use crate::classify::{classify, in_limit_class, is_strict_nash, GraphClass};
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::model::Game;
use crate::scalar::Scalar;

pub const PLAYER_STREAM: u64 = 0;
pub const ACTION_STREAM: u64 = 1;
pub const INIT_STREAM: u64 = 2;

pub const DEFAULT_MAX_STEPS: usize = 100_000;

/// The generators driving one run.
#[derive(Debug, Clone)]
pub struct DynamicsRng {
    players: ChaCha8Rng,
    actions: ChaCha8Rng,
}

impl DynamicsRng {
    pub fn new(seed: u64) -> Self {
        Self {
            players: stream(seed, PLAYER_STREAM),
            actions: stream(seed, ACTION_STREAM),
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Initial profile drawn from the seed's initialization stream.
pub fn random_initial(n: usize, m: usize, seed: u64) -> Result<Configuration> {
    Configuration::random(n, m, &mut stream(seed, INIT_STREAM))
}

/// One revision: who moved, what they picked, and how many optimal actions
/// were available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Revision {
    pub player: usize,
    pub action: Vec<usize>,
    pub options: usize,
}

/// Draws a player uniformly, then one of its best responses uniformly.
pub fn step<S: Scalar>(
    game: &Game<S>,
    config: &Configuration,
    rng: &mut DynamicsRng,
) -> Result<(Configuration, Revision)> {
    let player = rng.players.gen_range(0..game.n());
    let br = best_response_set(game, config, player)?;
    let pick = rng.actions.gen_range(0..br.actions.len());
    let action = br.actions[pick].clone();
    let next = config.with_action(player, &action)?;
    Ok((
        next,
        Revision {
            player,
            action,
            options: br.actions.len(),
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    /// 1-based step counter.
    pub t: usize,
    pub player: usize,
    pub action: Vec<usize>,
    /// Class of the profile after the step.
    pub class: GraphClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Terminal profile is a strict equilibrium, hence fixed forever.
    AbsorbedStrict,
    /// Profile keeps moving but its class stayed in the limit class for the
    /// final window.
    AbsorbedClass,
    NotAbsorbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Unchanged for the quiet window and a strict equilibrium.
    Fixed,
    /// Inside the limit class for the class window.
    ClassStable,
    MaxSteps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub max_steps: usize,
    /// Extra steps taken after the stop rule fires, checking that the class
    /// never leaves the limit class.
    pub audit_steps: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_steps: DEFAULT_MAX_STEPS,
            audit_steps: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    #[serde(skip)]
    pub initial: Configuration,
    pub initial_class: GraphClass,
    #[serde(skip)]
    pub steps: Vec<StepRecord>,
    #[serde(skip)]
    pub terminal: Configuration,
    pub terminal_class: GraphClass,
    pub stop: StopReason,
    /// Number of steps taken when the stop rule fired (before any audit).
    pub stopped_at: usize,
    /// First step at which the class left the limit class after having
    /// entered it. `None` on every well-behaved run.
    pub left_limit_class_at: Option<usize>,
    pub verdict: Verdict,
}

/// Steps without change before a fixed profile is tested for strictness:
/// ⌈2n ln n⌉ + 50.
pub fn quiet_window(n: usize) -> usize {
    (2.0 * n as f64 * (n as f64).ln()).ceil() as usize + 50
}

/// Consecutive steps inside the limit class that count as absorption: 50n.
pub fn class_window(n: usize) -> usize {
    50 * n
}

pub fn run<S: Scalar>(
    game: &Game<S>,
    initial: Configuration,
    seed: u64,
    options: RunOptions,
) -> Result<Trajectory> {
    game.check(&initial)?;
    if options.max_steps == 0 {
        return Err(Error::InvalidParams("max_steps must be at least 1".into()));
    }
    let (n, m) = (game.n(), game.m());
    let quiet = quiet_window(n);
    let window = class_window(n);

    let mut rng = DynamicsRng::new(seed);
    let initial_class = classify(&initial);
    let mut current = initial.clone();
    let mut class = initial_class.clone();
    let mut unchanged = 0usize;
    let mut inside = usize::from(in_limit_class(n, m, &class));
    let mut entered = inside > 0;
    let mut left_limit_class_at = None;
    let mut steps = Vec::new();
    let mut stop = StopReason::MaxSteps;
    let mut stopped_at = options.max_steps;
    let mut audit_left = None;

    let mut t = 0;
    loop {
        if audit_left == Some(0) {
            break;
        }
        if audit_left.is_none() && t >= options.max_steps {
            break;
        }
        t += 1;
        let (next, revision) = step(game, &current, &mut rng)?;
        if next == current {
            unchanged += 1;
        } else {
            unchanged = 0;
            class = classify(&next);
        }
        current = next;
        if in_limit_class(n, m, &class) {
            inside += 1;
            entered = true;
        } else {
            inside = 0;
            if entered && left_limit_class_at.is_none() {
                left_limit_class_at = Some(t);
            }
        }
        steps.push(StepRecord {
            t,
            player: revision.player,
            action: revision.action,
            class: class.clone(),
        });

        if let Some(left) = audit_left.as_mut() {
            *left -= 1;
            continue;
        }
        let fired = if unchanged > 0 && unchanged.is_multiple_of(quiet) && is_strict_nash(game, &current)? {
            Some(StopReason::Fixed)
        } else if inside >= window {
            Some(StopReason::ClassStable)
        } else {
            None
        };
        if let Some(reason) = fired {
            stop = reason;
            stopped_at = t;
            audit_left = Some(options.audit_steps);
        }
    }

    let mut trajectory = Trajectory {
        seed,
        n,
        m,
        initial,
        initial_class,
        steps,
        terminal_class: classify(&current),
        terminal: current,
        stop,
        stopped_at,
        left_limit_class_at,
        verdict: Verdict::NotAbsorbed,
    };
    trajectory.verdict = absorption_verdict(game, &trajectory)?;
    Ok(trajectory)
}

/// Strict terminal profile → `AbsorbedStrict`; class inside the limit class
/// for the last 50n steps → `AbsorbedClass`; otherwise `NotAbsorbed`.
pub fn absorption_verdict<S: Scalar>(game: &Game<S>, trajectory: &Trajectory) -> Result<Verdict> {
    if is_strict_nash(game, &trajectory.terminal)? {
        return Ok(Verdict::AbsorbedStrict);
    }
    let (n, m) = (trajectory.n, trajectory.m);
    let window = class_window(n);
    let tail_inside = trajectory.steps.len() >= window
        && trajectory.steps[trajectory.steps.len() - window..]
            .iter()
            .all(|rec| in_limit_class(n, m, &rec.class));
    Ok(if tail_inside {
        Verdict::AbsorbedClass
    } else {
        Verdict::NotAbsorbed
    })
}

/// Replays the trajectory and confirms every recorded action was a best
/// response in the profile it was chosen from. Returns the first offending
/// step, if any. May use a different backend than the run itself.
pub fn replay_audit<S: Scalar>(game: &Game<S>, trajectory: &Trajectory) -> Result<Option<usize>> {
    let mut current = trajectory.initial.clone();
    for rec in &trajectory.steps {
        let br = best_response_set(game, &current, rec.player)?;
        if !br.contains(&rec.action) {
            return Ok(Some(rec.t));
        }
        current.set_action(rec.player, &rec.action)?;
    }
    Ok((current != trajectory.terminal).then_some(trajectory.steps.len()))
}

/// Independent runs for consecutive seeds, in parallel, returned in seed
/// order. Each run starts from `initial` or, if `None`, from its own random
/// profile.
pub fn run_batch<S: Scalar>(
    game: &Game<S>,
    initial: Option<&Configuration>,
    seeds: &[u64],
    options: RunOptions,
) -> Result<Vec<Trajectory>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let start = match initial {
                Some(c) => c.clone(),
                None => random_initial(game.n(), game.m(), seed)?,
            };
            run(game, start, seed, options)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::GameParams;
    use crate::scalar::{parse_rational, Rational};

    fn game(n: usize, m: usize) -> Game<Rational> {
        Game::new(&GameParams::uniform(n, m, parse_rational("1/2").unwrap()).unwrap())
    }

    #[test]
    fn strict_equilibrium_never_moves() {
        let g = game(4, 1);
        let x = Configuration::new(4, 1, vec![vec![1], vec![0], vec![3], vec![2]]).unwrap();
        let mut rng = DynamicsRng::new(3);
        for _ in 0..20 {
            let (next, _) = step(&g, &x, &mut rng).unwrap();
            assert_eq!(next, x);
        }
    }

    #[test]
    fn two_nodes_settle_immediately() {
        let g = game(2, 1);
        let x = Configuration::new(2, 1, vec![vec![1], vec![0]]).unwrap();
        let traj = run(
            &g,
            x.clone(),
            11,
            RunOptions {
                max_steps: 500,
                audit_steps: 0,
            },
        )
        .unwrap();
        assert_eq!(traj.terminal, x);
        assert_eq!(traj.verdict, Verdict::AbsorbedStrict);
        assert_eq!(traj.stop, StopReason::Fixed);
    }

    #[test]
    fn one_step_run_is_usually_not_absorbed() {
        let g = game(6, 2);
        let mut not_absorbed = 0;
        for seed in 0..10 {
            let x = random_initial(6, 2, seed).unwrap();
            let traj = run(
                &g,
                x,
                seed,
                RunOptions {
                    max_steps: 1,
                    audit_steps: 0,
                },
            )
            .unwrap();
            assert_eq!(traj.steps.len(), 1);
            if traj.verdict == Verdict::NotAbsorbed {
                not_absorbed += 1;
            }
        }
        assert!(not_absorbed >= 8);
    }

    #[test]
    fn windows() {
        assert_eq!(quiet_window(6), 72);
        assert_eq!(class_window(7), 350);
    }

    #[test]
    fn runs_are_deterministic_and_replayable() {
        let g = game(5, 1);
        let x = random_initial(5, 1, 42).unwrap();
        let a = run(&g, x.clone(), 42, RunOptions::default()).unwrap();
        let b = run(&g, x, 42, RunOptions::default()).unwrap();
        assert_eq!(a.steps, b.steps);
        assert_eq!(replay_audit(&g, &a).unwrap(), None);
        assert_eq!(a.verdict, Verdict::AbsorbedClass);
        assert_eq!(a.terminal_class, GraphClass::C2lr { l: 2, r: 1 });
    }
}
