//! Training-loop contracts: parallelism-independence, resumability, and
//! evaluation statistics.

use swarm_gass_core::harness::{
    evaluate, train_selfplay, train_single, Resume, TrainConfig, TrainHooks,
};
use swarm_gass_core::policy::{PolicyParams, PolicyShape};
use swarm_gass_core::scenario::base_attack;
use swarm_gass_core::search::{Mode, OptimizerConfig, OptimizerState};
use swarm_gass_core::sim::{run_episode, TeamParams};

fn tiny_config(parallelism: usize) -> TrainConfig {
    TrainConfig {
        optimizer: OptimizerConfig {
            mode: Mode::Es,
            alpha0: 0.02,
            gamma: 0.02,
            fixed_sample_size: Some(8),
            ..OptimizerConfig::default()
        },
        scenario: "base_attack".into(),
        scale: 0.1,
        policy_shape: vec![102, 8, 3],
        iterations: 3,
        eval_cadence: 0,
        checkpoint_cadence: 0,
        master_seed: 11,
        parallelism,
        ..TrainConfig::default()
    }
}

#[test]
fn parallelism_never_changes_the_result() {
    let serial = train_single(&tiny_config(1), None, &mut TrainHooks::default()).unwrap();
    let wide = train_single(&tiny_config(8), None, &mut TrainHooks::default()).unwrap();
    assert_eq!(serial.states, wide.states);
    for (a, b) in serial.records.iter().zip(&wide.records) {
        assert_eq!(a.teams[0].returns, b.teams[0].returns);
    }
}

#[test]
fn resume_reproduces_an_uninterrupted_run() {
    let mut config = tiny_config(4);
    config.iterations = 6;

    let full = train_single(&config, None, &mut TrainHooks::default()).unwrap();

    let mut half = config.clone();
    half.iterations = 3;
    let first = train_single(&half, None, &mut TrainHooks::default()).unwrap();
    let resumed = train_single(
        &config,
        Some(Resume { iteration: 3, states: first.states }),
        &mut TrainHooks::default(),
    )
    .unwrap();

    assert_eq!(full.states, resumed.states);
    assert_eq!(resumed.records.len(), 3);
}

#[test]
fn checkpoint_hook_fires_on_cadence_and_at_the_end() {
    let mut config = tiny_config(2);
    config.iterations = 5;
    config.checkpoint_cadence = 2;
    let mut seen: Vec<u64> = Vec::new();
    let mut on_checkpoint = |k: u64, states: &[OptimizerState]| {
        assert_eq!(states.len(), 1);
        seen.push(k);
        Ok(())
    };
    let mut hooks = TrainHooks { on_record: None, on_checkpoint: Some(&mut on_checkpoint) };
    train_single(&config, None, &mut hooks).unwrap();
    assert_eq!(seen, vec![2, 4, 5]);
}

#[test]
fn selfplay_trains_both_teams_deterministically() {
    let config = TrainConfig {
        scenario: "two_team".into(),
        scale: 0.04,
        iterations: 2,
        eval_cadence: 0,
        checkpoint_cadence: 0,
        optimizer: OptimizerConfig {
            fixed_sample_size: Some(6),
            ..tiny_config(0).optimizer
        },
        ..tiny_config(0)
    };
    let a = train_selfplay(&config, None, &mut TrainHooks::default()).unwrap();
    let b = train_selfplay(&config, None, &mut TrainHooks::default()).unwrap();
    assert_eq!(a.states, b.states);
    assert_eq!(a.states.len(), 2);
    // Different init draws per team.
    assert_ne!(a.states[0], a.states[1]);
    assert_eq!(a.records[0].teams.len(), 2);
}

#[test]
fn single_loop_rejects_selfplay_scenarios_and_vice_versa() {
    let mut config = tiny_config(1);
    config.scenario = "two_team".into();
    config.scale = 0.04;
    assert!(train_single(&config, None, &mut TrainHooks::default()).is_err());

    let mut config = tiny_config(1);
    config.scenario = "base_attack".into();
    assert!(train_selfplay(&config, None, &mut TrainHooks::default()).is_err());
}

#[test]
fn evaluate_single_episode_equals_run_episode() {
    let sc = base_attack(0.1).unwrap();
    let params = PolicyParams::zeros(PolicyShape::new(vec![102, 8, 3]).unwrap());
    let stats = evaluate(&params, &sc, 1, 99).unwrap();
    let direct = run_episode(
        &sc,
        &[TeamParams::Learned(&params), TeamParams::Scripted],
        swarm_gass_core::rng::derive_seed(99, &[0]),
    )
    .unwrap();
    assert_eq!(stats.n, 1);
    assert_eq!(stats.mean, direct.team_returns[0]);
    assert_eq!(stats.median, stats.mean);
}

#[test]
fn evaluate_quartiles_are_ordered() {
    let sc = base_attack(0.1).unwrap();
    let params = PolicyParams::zeros(PolicyShape::new(vec![102, 8, 3]).unwrap());
    let stats = evaluate(&params, &sc, 12, 5).unwrap();
    assert!(stats.min <= stats.q25);
    assert!(stats.q25 <= stats.median);
    assert!(stats.median <= stats.q75);
    assert!(stats.q75 <= stats.max);
}
