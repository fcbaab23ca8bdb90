use std::collections::BTreeMap;

use openmas::baselines::Baselines;
use openmas::cyber::baselines::{target_node, PatchTarget, TargetPatchPolicy};
use openmas::cyber::{Cyber, CyberAction, CyberConfig};
use openmas::eval::wilcoxon::signed_rank;
use openmas::posg::{step, AgentId, Environment, JointAction, Policy, RngStream};
use openmas::rideshare::env::structures::DriverSpec;
use openmas::rideshare::{Lifecycle, Rideshare, RideshareConfig};
use openmas::wildfire::baselines::{extremal_index, Extremal};
use openmas::wildfire::{Wildfire, WildfireConfig};
use proptest::prelude::*;

/// Plays uniformly random legal actions, calling `visit` on every state
/// (including the initial one) with the agents' observations.
fn random_walk<E: Environment>(
    env: &E,
    seed: u64,
    mut visit: impl FnMut(&E::State, &BTreeMap<AgentId, E::Observation>),
) -> usize {
    let mut rng = RngStream::new(seed, 1);
    let (mut state, mut obs) = env.reset(&mut rng);
    let mut visited = 0;
    for _ in 0..env.max_steps() {
        visit(&state, &obs);
        visited += 1;
        if env.terminal(&state) {
            break;
        }
        let mut joint: JointAction<E::Action> = BTreeMap::new();
        for (i, id) in env.agents().iter().enumerate() {
            if env.is_present(&state, i) {
                let legal = env.legal_actions(&state, i);
                joint.insert(id.clone(), legal[rng.index(legal.len())]);
            }
        }
        let r = step(env, &state, &joint, &mut rng).expect("legal joint action");
        state = r.next_state;
        obs = r.observations;
    }
    visited
}

/// State-side and observation-side legal sets agree, and every baseline
/// (queried fresh) answers inside them. Returns the number of states checked.
fn legality<E: Baselines + 'static>(env: &E, seeds: std::ops::Range<u64>) -> usize {
    let mut states = 0;
    for seed in seeds {
        states += random_walk(env, seed, |state, obs| {
            for (i, id) in env.agents().iter().enumerate() {
                if !env.is_present(state, i) {
                    continue;
                }
                let legal = env.legal_actions(state, i);
                assert_eq!(E::observed_legal_actions(&obs[id]), legal);
                let mut rng = RngStream::new(seed, i as u64);
                for name in E::baseline_names() {
                    let a = E::baseline(name).unwrap().act(&obs[id], &mut rng);
                    assert!(legal.contains(&a), "{name} chose {a}, legal {legal:?}");
                }
            }
        });
    }
    states
}

#[test]
fn baselines_stay_legal_on_ten_thousand_states_per_domain() {
    let wf = Wildfire::new(WildfireConfig { p_spread: 0.15, max_steps: 200, ..WildfireConfig::default() }).unwrap();
    let mut n = 0;
    let mut seed = 0;
    while n < 10_000 {
        n += legality(&wf, seed..seed + 50);
        seed += 50;
    }
    assert!(legality(&Cyber::new(CyberConfig::default()).unwrap(), 0..100) >= 10_000);
    assert!(legality(&Rideshare::new(RideshareConfig::default()).unwrap(), 0..50) >= 10_000);
}

#[test]
fn target_patch_only_patches_its_believed_extremal_node() {
    let env = Cyber::new(CyberConfig::default()).unwrap();
    for (mode, name) in [(PatchTarget::LeastExploited, "patched"), (PatchTarget::MostExploited, "exploited")] {
        let mut patches = 0;
        for seed in 0..30 {
            let mut policies: Vec<TargetPatchPolicy> = env.agents().iter().map(|_| TargetPatchPolicy::new(mode)).collect();
            let mut rng = RngStream::new(seed, 0);
            let (mut state, mut obs) = env.reset(&mut rng);
            for _ in 0..env.max_steps() {
                let mut joint = BTreeMap::new();
                for (i, id) in env.agents().iter().enumerate() {
                    if !env.is_present(&state, i) {
                        continue;
                    }
                    let p = &mut policies[i];
                    assert_eq!(p.name(), name);
                    let a = p.act(&obs[id], &mut rng);
                    if a == CyberAction::Patch {
                        patches += 1;
                        let target = target_node(&p.belief().states(), mode);
                        assert_eq!(target, Some(obs[id].own.location));
                    }
                    joint.insert(id.clone(), a);
                }
                let r = step(&env, &state, &joint, &mut rng).unwrap();
                state = r.next_state;
                obs = r.observations;
            }
        }
        assert!(patches > 0);
    }
}

fn brute_force_p(d: &[f64]) -> f64 {
    let nz: Vec<f64> = d.iter().copied().filter(|v| *v != 0.0).collect();
    let mut mags: Vec<f64> = nz.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let rank_of = |m: f64| {
        let below = mags.iter().filter(|&&x| x < m).count() as f64;
        let equal = mags.iter().filter(|&&x| x == m).count() as f64;
        below + (equal + 1.0) / 2.0
    };
    let ranks: Vec<f64> = nz.iter().map(|v| rank_of(v.abs())).collect();
    let total: f64 = ranks.iter().sum();
    let plus: f64 = nz.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let observed = plus.min(total - plus);
    let mut hits = 0u32;
    for mask in 0u32..(1 << nz.len()) {
        let s: f64 = (0..nz.len()).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if s.min(total - s) <= observed + 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << nz.len()) as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extremal_choice_is_scale_invariant(v in prop::collection::vec(1u32..50, 1..8), k in 1u32..20) {
        let scaled: Vec<u32> = v.iter().map(|x| x * k).collect();
        for mode in [Extremal::Smallest, Extremal::Largest] {
            prop_assert_eq!(extremal_index(&v, mode), extremal_index(&scaled, mode));
        }
    }

    #[test]
    fn exact_wilcoxon_matches_enumeration_with_ties(d in prop::collection::vec(-6i32..=6, 1..12)) {
        let x: Vec<f64> = d.iter().map(|&v| v as f64).collect();
        let y = vec![0.0; x.len()];
        match signed_rank(&x, &y) {
            Ok(r) => {
                prop_assert!((0.0..=1.0).contains(&r.p));
                prop_assert!((r.p - brute_force_p(&x)).abs() < 1e-12);
                let swapped = signed_rank(&y, &x).unwrap();
                prop_assert_eq!(swapped.p, r.p);
            }
            Err(_) => prop_assert!(d.iter().all(|&v| v == 0)),
        }
    }

    #[test]
    fn wildfire_state_invariants(seed in any::<u64>()) {
        let env = Wildfire::new(WildfireConfig { p_spread: 0.2, ..WildfireConfig::default() }).unwrap();
        let mut last_fires = 0;
        random_walk(&env, seed, |state, obs| {
            assert!(state.fires.len() >= last_fires, "fires are never forgotten");
            last_fires = state.fires.len();
            for a in &state.agents {
                assert!(a.suppressant <= a.capacity);
                assert_eq!(a.present, a.suppressant > 0);
                assert!(!obs[&a.id].present || obs[&a.id].own.is_some());
            }
            for f in state.fires.iter().filter(|f| f.is_active()) {
                assert!(f.intensity >= 1 && f.intensity < env.settings().burnout_level);
            }
        });
    }

    #[test]
    fn rideshare_conservation_and_motion(seed in any::<u64>(), p in 0.0f64..1.0, caps in 1u32..4) {
        let env = Rideshare::new(RideshareConfig {
            drivers: vec![
                DriverSpec { y: 0, x: 0, accept_cap: caps, ride_cap: caps },
                DriverSpec { y: 9, x: 9, accept_cap: caps, ride_cap: 1 },
                DriverSpec { y: 4, x: 6, accept_cap: 1, ride_cap: caps },
            ],
            p_arrival: p,
            max_steps: 80,
            ..RideshareConfig::default()
        })
        .unwrap();
        let mut prev: Option<openmas::rideshare::RideshareState> = None;
        random_walk(&env, seed, |state, obs| {
            let total: usize = [Lifecycle::Unaccepted, Lifecycle::Accepted, Lifecycle::PickedUp, Lifecycle::DroppedOff]
                .iter()
                .map(|&l| state.count(l))
                .sum();
            assert_eq!(total, state.tasks.len());
            assert!(state.count(Lifecycle::Unaccepted) <= env.settings().max_open_tasks);
            for d in &state.drivers {
                assert!(d.accepted_count <= d.accept_cap && d.riding_count <= d.ride_cap);
                let mine = |l| state.tasks.iter().filter(|t| t.lifecycle == l && t.assigned_driver.as_ref() == Some(&d.id)).count() as u32;
                assert_eq!(mine(Lifecycle::Accepted), d.accepted_count);
                assert_eq!(mine(Lifecycle::PickedUp), d.riding_count);
                let o = &obs[&d.id];
                assert!(o.assigned.iter().all(|t| t.assigned_driver.as_ref() == Some(&d.id)));
            }
            if let Some(prev) = &prev {
                for (a, b) in prev.drivers.iter().zip(&state.drivers) {
                    assert!(a.position.manhattan(b.position) <= 1);
                }
                for t in &prev.tasks {
                    assert_eq!(state.tasks[t.id as usize].destination, t.destination);
                    assert_eq!(state.tasks[t.id as usize].fare, t.fare);
                }
            }
            prev = Some(state.clone());
        });
    }

    #[test]
    fn cyber_states_stay_in_range(seed in any::<u64>()) {
        let env = Cyber::new(CyberConfig::default()).unwrap();
        random_walk(&env, seed, |state, obs| {
            assert!(state.nodes.iter().all(|n| n.state_index <= 4));
            for (d, id) in state.defenders.iter().zip(env.agents()) {
                assert_eq!(obs[id].node_states.is_some(), state.monitored[d.id.as_str().trim_start_matches("defender_").parse::<usize>().unwrap()]);
            }
        });
    }
}
