use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use socprac_core::checker::{EvalOptions, Evaluator};
use socprac_core::ids::WorldId;
use socprac_testkit::gen::{event, formula, random_model, FormulaShape, ModelShape, Vocabulary};
use socprac_testkit::reference::Reference;

fn options() -> EvalOptions {
    EvalOptions { bound: 1, trace_bound: 4, ..EvalOptions::default() }
}

#[test]
fn formulas_agree_with_reference() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut held = 0;
    for _ in 0..60 {
        let shape = ModelShape::random(&mut rng, 30);
        let m = random_model(&mut rng, shape);
        let vocab = Vocabulary::of(&m);
        let mut ev = Evaluator::with_options(&m, options());
        let reference = Reference::new(&m, options());
        for _ in 0..10 {
            let shape = FormulaShape { depth: rng.random_range(1..=5), trace_budget: 4, achieving: true };
            let f = formula(&mut rng, &vocab, shape);
            let w = WorldId(rng.random_range(0..m.world_count()) as u32);
            let got = ev.eval(&f, w).expect("within bounds");
            assert_eq!(got, reference.eval(&f, w), "disagreement at {w:?} on {f:?}");
            held += got as usize;
        }
    }
    assert!(held > 100 && held < 500, "formulas too lopsided: {held} of 600 true");
}

#[test]
fn denotations_agree_with_reference() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut nonempty = 0;
    for _ in 0..60 {
        let shape = ModelShape::random(&mut rng, 20);
        let m = random_model(&mut rng, shape);
        let vocab = Vocabulary::of(&m);
        let mut ev = Evaluator::with_options(&m, options());
        let reference = Reference::new(&m, options());
        let fshape = FormulaShape { depth: 4, trace_budget: 4, achieving: true };
        for _ in 0..10 {
            let e = event(&mut rng, &vocab, 4, 4, fshape);
            let w = WorldId(rng.random_range(0..m.world_count()) as u32);
            let got = ev.denotation(&e, w).expect("within bounds");
            let want = reference.den(&e, w);
            assert_eq!(*got, want, "denotations differ at {w:?} for {e:?}");
            nonempty += !want.is_empty() as usize;
        }
    }
    assert!(nonempty > 100, "too few non-empty denotations: {nonempty}");
}
