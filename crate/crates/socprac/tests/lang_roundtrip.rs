mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use socprac::expr::{parse_action, parse_assertion, parse_event, parse_pattern, Printer};
use socprac::lex::{lex, lex_line};
use common::{fingerprint, inject, line_of};
use socprac::model_file::{parse_model, print_model};
use socprac::practice_file::{parse_practices, print_practice};
use socprac::{ErrorKind, LangError};
use socprac_core::model::KripkeModel;
use socprac_core::syntax::ActionExpr;
use socprac_testkit::ast::{random_rich_model, AstGen};

const CASES: u64 = 500;

fn models() -> impl Iterator<Item = (u64, KripkeModel)> {
    (0..CASES).map(|seed| {
        let mut rng = StdRng::seed_from_u64(seed);
        (seed, random_rich_model(&mut rng))
    })
}

#[test]
fn actions_round_trip() {
    for (seed, m) in models() {
        let mut rng = StdRng::seed_from_u64(seed ^ 0xa1);
        let g = AstGen::new(&m);
        let a = g.action(&mut rng, 4);
        let text = Printer::new(&m).action(&a);
        let back = parse_action(&text, &m).unwrap_or_else(|e| panic!("seed {seed}: {text}: {e}"));
        assert_eq!(back, a, "seed {seed}: {text}");
    }
}

#[test]
fn events_round_trip() {
    for (seed, m) in models() {
        let mut rng = StdRng::seed_from_u64(seed ^ 0xe7);
        let g = AstGen::new(&m);
        let e = g.event(&mut rng, 4);
        let text = Printer::new(&m).event(&e);
        let back = parse_event(&text, &m).unwrap_or_else(|e| panic!("seed {seed}: {text}: {e}"));
        assert_eq!(back, e, "seed {seed}: {text}");
    }
}

#[test]
fn assertions_round_trip() {
    for (seed, m) in models() {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x55);
        let g = AstGen::new(&m);
        let f = g.assertion(&mut rng, 5);
        let text = Printer::new(&m).assertion(&f);
        let back = parse_assertion(&text, &m).unwrap_or_else(|e| panic!("seed {seed}: {text}: {e}"));
        assert_eq!(back, f, "seed {seed}: {text}");
    }
}

#[test]
fn patterns_round_trip() {
    for (seed, m) in models() {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x9a);
        let g = AstGen::new(&m);
        let p = g.pattern(&mut rng, 4);
        let text = Printer::new(&m).pattern(&p);
        let back = parse_pattern(&text, &m).unwrap_or_else(|e| panic!("seed {seed}: {text}: {e}"));
        assert_eq!(back, p, "seed {seed}: {text}");
    }
}

#[test]
fn practices_round_trip() {
    for (seed, m) in models() {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x3c);
        let g = AstGen::new(&m);
        let sps: Vec<_> = (0..rng.random_range(1..=2)).map(|i| g.practice(&mut rng, &format!("sp{i}"))).collect();
        let text: String = sps.iter().map(|sp| print_practice(&m, sp)).collect::<Vec<_>>().join("\n");
        let back = parse_practices(&text, &m).unwrap_or_else(|e| panic!("seed {seed}:\n{text}\n{e}"));
        assert_eq!(back, sps, "seed {seed}:\n{text}");
    }
}

#[test]
fn models_round_trip() {
    for (seed, m) in models() {
        let text = print_model(&m);
        let back = parse_model(&text).unwrap_or_else(|e| panic!("seed {seed}:\n{text}\n{e}"));
        assert_eq!(fingerprint(&back), fingerprint(&m), "seed {seed}:\n{text}");
        // ids are renumbered when kinds are grouped, so the text settles after one pass
        let settled = print_model(&back);
        assert_eq!(print_model(&parse_model(&settled).unwrap()), settled, "seed {seed}");
    }
}

#[test]
fn shipped_files_round_trip() {
    let m = common::model("kids_to_school.spm");
    let again = parse_model(&print_model(&m)).unwrap();
    assert_eq!(fingerprint(&again), fingerprint(&m));
    let sps = common::practices_from(&m, &common::read("kids_to_school.spp"));
    let text: String = sps.iter().map(|sp| print_practice(&m, sp)).collect::<Vec<_>>().join("\n");
    assert_eq!(parse_practices(&text, &m).unwrap(), sps);
}

#[test]
fn choice_binds_loosest() {
    let m = common::model("kids_to_school.spm");
    let a = parse_action("get_in ; drive + park", &m).unwrap();
    let b = parse_action("(get_in ; drive) + park", &m).unwrap();
    assert_eq!(a, b);
    assert!(matches!(a, ActionExpr::Choice(..)));
    let c = parse_action("get_in ; drive & park", &m).unwrap();
    let d = parse_action("get_in ; (drive & park)", &m).unwrap();
    assert_eq!(c, d);
}

fn assert_points_at(err: &LangError, line: usize, col: usize, text: &str) {
    assert!(err.span.contains(line, col), "span {:?} misses {line}:{col} in\n{text}\n{err}", err.span);
}

#[test]
fn injected_symbols_are_located() {
    let mut checked = 0;
    for (seed, m) in models() {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x77);
        let g = AstGen::new(&m);
        let f = g.assertion(&mut rng, 4);
        let text = Printer::new(&m).assertion(&f);
        let n = lex(&text, 1).unwrap().len();
        let k = rng.random_range(0..n);
        let bad = ["=", "!", "?"][rng.random_range(0..3)];
        let (broken, col) = inject(&text, 1, k, bad).unwrap();
        let err = parse_assertion(&broken, &m).expect_err(&broken);
        assert_eq!(err.kind, ErrorKind::Syntax, "{broken}: {err}");
        assert_points_at(&err, 1, col, &broken);
        checked += 1;
    }
    assert_eq!(checked, CASES);
}

#[test]
fn unknown_names_are_located() {
    for (seed, m) in models() {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x19);
        let g = AstGen::new(&m);
        let e = g.event(&mut rng, 3);
        let text = Printer::new(&m).event(&e);
        let toks = lex(&text, 1).unwrap();
        let idents: Vec<_> =
            toks.iter().filter(|t| matches!(t.tok, socprac::lex::Tok::Ident(_))).map(|t| t.span).collect();
        if idents.is_empty() {
            continue;
        }
        let span = idents[rng.random_range(0..idents.len())];
        let chars: Vec<char> = text.chars().collect();
        let broken: String = chars[..span.column - 1]
            .iter()
            .chain("zz_unknown".chars().collect::<Vec<_>>().iter())
            .chain(chars[span.column - 1 + span.length..].iter())
            .collect();
        let err = parse_event(&broken, &m).expect_err(&broken);
        assert_points_at(&err, 1, span.column, &broken);
    }
}

#[test]
fn injected_symbols_in_files_are_located() {
    for (seed, m) in models().take(200) {
        let mut rng = StdRng::seed_from_u64(seed ^ 0x42);
        let g = AstGen::new(&m);
        let sp = g.practice(&mut rng, "sp");
        for text in [print_practice(&m, &sp), print_model(&m)] {
            let lines: Vec<usize> = (1..=text.lines().count())
                .filter(|&l| lex_line(line_of(&text, l), l, 1).is_ok_and(|t| !t.is_empty()))
                .collect();
            let line = lines[rng.random_range(0..lines.len())];
            let n = lex_line(line_of(&text, line), line, 1).unwrap().len();
            let k = rng.random_range(0..n);
            let bad = ["=", "!", "?"][rng.random_range(0..3)];
            let (broken, col) = inject(&text, line, k, bad).unwrap();
            let is_model = text.starts_with("agents") || !text.starts_with("practice");
            let err = if is_model {
                parse_model(&broken).expect_err(&broken)
            } else {
                parse_practices(&broken, &m).expect_err(&broken)
            };
            assert_points_at(&err, line, col, &broken);
        }
    }
}

#[test]
fn stray_characters_are_located() {
    let m = common::model("kids_to_school.spm");
    let err = parse_assertion("car_parked & $", &m).unwrap_err();
    assert_points_at(&err, 1, 14, "car_parked & $");
    let err = parse_assertion("car_parked &", &m).unwrap_err();
    assert_eq!(err.kind, ErrorKind::Syntax);
}
