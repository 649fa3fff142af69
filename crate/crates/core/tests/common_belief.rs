use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use socprac_core::checker::{EvalOptions, Evaluator};
use socprac_core::syntax::Assertion;
use socprac_testkit::gen::{propositional, random_model, ModelShape, Vocabulary};
use socprac_testkit::reference::Reference;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    /// CB through belief closure equals the greatest fixpoint of iterated
    /// everyone-believes, at every world.
    #[test]
    fn closure_matches_iterated_everyone_believes(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let shape = ModelShape::random(&mut rng, 40);
        let m = random_model(&mut rng, shape);
        let v = Vocabulary::of(&m);
        let g = v.group(&mut rng);
        let depth = rng.random_range(1..=3);
        let phi = propositional(&mut rng, &v, depth);
        let fixpoint = Reference::new(&m, EvalOptions::default()).common_belief_worlds(g, &phi);
        let mut ev = Evaluator::new(&m);
        let cb = Assertion::common_belief(g, phi.clone());
        for w in m.worlds() {
            prop_assert_eq!(ev.eval(&cb, w).unwrap(), fixpoint.contains(&w), "world {:?}", w);
        }
    }
}
