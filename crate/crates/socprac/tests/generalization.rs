mod common;

use std::collections::BTreeSet;

use common::*;
use socprac_core::model::KripkeModel;
use socprac_core::practice::{generalize, ConditionFailure, SocialPractice};
use socprac_core::syntax::{ActionExpr, Assertion};

fn days(model_src: &str, day2_src: &str) -> (KripkeModel, Vec<SocialPractice>) {
    let m = model_from(model_src);
    let a = practices_from(&m, &read("day1.spp")).remove(0);
    let b = practices_from(&m, day2_src).remove(0);
    (m, vec![a, b])
}

fn failure(model_src: &str, day2_src: &str) -> ConditionFailure {
    let (m, sps) = days(model_src, day2_src);
    generalize(&m, &sps, "school_run_practice").expect_err("instances should not generalize")
}

#[test]
fn two_days_generalize() {
    let (m, sps) = days(&read("two_days.spm"), &read("day2.spp"));
    let g = generalize(&m, &sps, "school_run_practice").unwrap();
    let drive = ActionExpr::Atom(m.action_id("drive").unwrap());
    let carriers: BTreeSet<&str> = g
        .affordances
        .iter()
        .filter(|(_, act)| *act == drive)
        .flat_map(|(objs, _)| objs.iter().map(|&o| m.object_name(o)))
        .collect();
    assert_eq!(carriers, ["car_a", "car_b", "car_c"].into_iter().collect());
    // identical start and end conditions collapse
    assert_eq!(g.start, sps[0].start);
    assert_eq!(g.end, sps[0].end);
    assert_eq!(g.plan_patterns, sps[0].plan_patterns);
    assert_eq!(g.purpose, sps[0].purpose);
}

#[test]
fn identical_instances_generalize_to_either() {
    let (m, sps) = days(&read("two_days.spm"), &read("day1.spp"));
    let g = generalize(&m, &sps, "day1").unwrap();
    assert_eq!(g, sps[0]);
}

#[test]
fn unplayed_role_fails_condition_1() {
    // ned stays a neighbour on day one only
    let src = read("two_days.spm");
    let (head, tail) = src.split_at(src.find("context school_run_2").unwrap());
    let m = model_from(&(head.to_string() + &drop_lines(tail, "enact ned as neighbour")));
    let a = practices_from(&m, &read("day1.spp")).remove(0);
    let b = practices_from(&m, &read("day2.spp")).remove(0);
    let err = generalize(&m, &[a, b], "p").unwrap_err();
    assert_eq!(err.condition, 1, "{err}");
    assert!(err.witness.contains("neighbour"), "{err}");
}

#[test]
fn different_roles_fail_condition_1() {
    let day2 = edit(&read("day2.spp"), "roles: parent, child, neighbour", "roles: parent, child");
    let day2 = edit(&day2, "neighbour:neighbour_drive", "{ned}:neighbour_drive");
    assert_eq!(failure(&read("two_days.spm"), &day2).condition, 1);
}

#[test]
fn disjoint_purposes_fail_condition_3() {
    let day2 = edit(&read("day2.spp"), "purpose:\n  kids_at_school & before_9", "purpose:\n  kids_at_school & kids_safe");
    let err = failure(&read("two_days.spm"), &day2);
    assert_eq!(err.condition, 3, "{err}");
}

#[test]
fn shared_purpose_core_generalizes_to_union() {
    let day2 = edit(
        &read("day2.spp"),
        "purpose:\n  kids_at_school & before_9",
        "purpose:\n  kids_at_school & before_9\n  kids_safe",
    );
    let (m, sps) = days(&read("two_days.spm"), &day2);
    let g = generalize(&m, &sps, "p").unwrap();
    assert_eq!(g.purpose.len(), 2);
    assert!(g.purpose.contains(&Assertion::Atom(m.atom_id("kids_safe").unwrap())));
}

#[test]
fn different_plan_patterns_fail_condition_6() {
    let day2 = edit(&read("day2.spp"), "phase(parent:park, car_parked)", "phase(parent:park, car_at_school)");
    let err = failure(&read("two_days.spm"), &day2);
    assert_eq!(err.condition, 6, "{err}");
}

#[test]
fn swapped_phases_fail_condition_6() {
    let first = "phase(child:get_out; child:arrive_before_9, kids_at_school & respect_to_teacher)";
    let second = "phase(parent:park, car_parked)";
    let src = read("day2.spp");
    let src = edit(&src, first, "@@");
    let src = edit(&src, second, first);
    let src = edit(&src, "@@", second);
    assert_eq!(failure(&read("two_days.spm"), &src).condition, 6);
}

#[test]
fn different_norms_fail_condition_7() {
    let day2 = edit(&read("day2.spp"), "F#1(parent, true, drive_unbuckled, pay_fine)", "F#1(parent, true, drive_unbuckled)");
    assert_eq!(failure(&read("two_days.spm"), &day2).condition, 7);
}
