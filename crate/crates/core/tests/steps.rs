use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use socprac_core::event::{enumerate_steps, Step};
use socprac_core::ids::{ActSet, AgentId, Group};

/// Both step constraints checked directly over every pair of groups.
fn satisfies_constraints(n: usize, acts: &dyn Fn(Group) -> ActSet) -> bool {
    let full = Group::all(n);
    for sup in full.subsets() {
        for sub in sup.subsets() {
            if !acts(sub).is_subset(acts(sup)) {
                return false;
            }
        }
        for a in sup.agents() {
            let rest = sup.without(a);
            if !rest.is_empty() && acts(Group::singleton(a)).is_empty() && acts(rest) != acts(sup) {
                return false;
            }
        }
    }
    true
}

fn table(n: usize, code: u64, m: usize) -> Vec<ActSet> {
    let mask = (1u64 << m) - 1;
    (0..(1usize << n) - 1).map(|i| ActSet((code >> (i * m)) & mask)).collect()
}

fn complete_table(n: usize, t: &[ActSet]) -> Result<Step, socprac_core::event::StepError> {
    let sparse: Vec<(Group, ActSet)> = t.iter().enumerate().map(|(i, &a)| (Group(i as u32 + 1), a)).collect();
    Step::complete(n, &sparse)
}

#[test]
fn two_agent_steps_are_exactly_the_valid_tables() {
    for m in 1..=2usize {
        let n = 2;
        let cells = (1usize << n) - 1;
        let mut valid = BTreeSet::new();
        for code in 0..1u64 << (cells * m) {
            let t = table(n, code, m);
            let ok = satisfies_constraints(n, &|g: Group| t[g.0 as usize - 1]);
            if ok {
                valid.insert(t.clone());
                let step = complete_table(n, &t).expect("valid table completes");
                assert!((1..=cells as u32).all(|g| step.acts(Group(g)) == t[g as usize - 1]));
            } else if let Ok(step) = complete_table(n, &t) {
                assert!((1..=cells as u32).any(|g| step.acts(Group(g)) != t[g as usize - 1]));
            }
        }
        let enumerated: BTreeSet<Vec<ActSet>> = enumerate_steps(n, m, 1 << 16)
            .unwrap()
            .iter()
            .map(|s| (1..=cells as u32).map(|g| s.acts(Group(g))).collect())
            .collect();
        assert_eq!(enumerated, valid, "{m} actions");
    }
}

#[test]
fn sampled_three_agent_steps_satisfy_constraints() {
    let mut rng = StdRng::seed_from_u64(3);
    let n = 3;
    let mut completed = 0;
    for _ in 0..40_000 {
        let sparse: Vec<(Group, ActSet)> = (0..rng.random_range(1..=4))
            .map(|_| (Group(rng.random_range(1..8)), ActSet(rng.random_range(0..4))))
            .collect();
        match Step::complete(n, &sparse) {
            Ok(step) => {
                completed += 1;
                assert!(satisfies_constraints(n, &|g| step.acts(g)), "{sparse:?}");
                for (g, a) in &sparse {
                    assert!(a.is_subset(step.acts(*g)));
                }
                assert_eq!(Step::complete(n, &step.sparse()).unwrap(), step);
            }
            Err(_) => {
                // rejected only when some completion breaks skip absorption
                let mut acts = [ActSet::EMPTY; 7];
                for (g, a) in &sparse {
                    acts[g.0 as usize - 1] = acts[g.0 as usize - 1].union(*a);
                }
                for g in 1..8u32 {
                    let mut acc = acts[g as usize - 1];
                    for sub in Group(g).subsets() {
                        acc = acc.union(acts[sub.0 as usize - 1]);
                    }
                    acts[g as usize - 1] = acc;
                }
                assert!(!satisfies_constraints(n, &|g| acts[g.0 as usize - 1]), "{sparse:?}");
            }
        }
    }
    assert!(completed >= 10_000, "only {completed} sampled steps completed");
}

#[test]
fn every_enumerated_three_agent_step_is_valid() {
    let steps = enumerate_steps(3, 2, 1 << 16).unwrap();
    for s in &steps {
        assert!(satisfies_constraints(3, &|g| s.acts(g)));
        assert!(s.check().is_ok());
    }
    let distinct: BTreeSet<_> = steps.iter().collect();
    assert_eq!(distinct.len(), steps.len());
}

#[test]
fn idle_member_cannot_change_a_group() {
    let a = AgentId(0);
    let sparse = [(Group::from_agents([a, AgentId(1)]), ActSet(1))];
    assert!(Step::complete(2, &sparse).is_err());
}
