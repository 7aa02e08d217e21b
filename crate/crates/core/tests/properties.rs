use std::collections::BTreeMap;

use galstrat::eval::{count_satisfying, decide};
use galstrat::formula::parse;
use galstrat::gf::make_field;
use proptest::prelude::*;

fn term() -> impl Strategy<Value = String> {
    (-2i64..3, 0u32..3, 0u32..3, 0u32..2).prop_map(|(c, ex, ey, ez)| {
        let mut parts = vec![c.to_string()];
        for (v, e) in [("x", ex), ("y", ey), ("z", ez)] {
            if e > 0 {
                parts.push(format!("{v}^{e}"));
            }
        }
        format!("({})", parts.join("*"))
    })
}

fn poly() -> impl Strategy<Value = String> {
    prop::collection::vec(term(), 1..4).prop_map(|ts| ts.join(" + "))
}

fn atom() -> impl Strategy<Value = String> {
    (poly(), any::<bool>()).prop_map(|(p, eq)| format!("{p} {} 0", if eq { "=" } else { "!=" }))
}

fn matrix() -> impl Strategy<Value = String> {
    atom().prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) & ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) | ({b})")),
            inner.prop_map(|a| format!("!({a})")),
        ]
    })
}

fn quantifier() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("E"), Just("A")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negation_complements_counts(m in matrix(), q in quantifier(), ext in 1u32..3) {
        let (p, size) = if ext == 1 { (3, 9) } else { (2, 16) };
        let text = format!("free x, y : ext {ext} . {q} z : ext {ext} . {m}");
        let f = parse(&text).unwrap();
        let field = make_field(p, ext).unwrap();
        let a = count_satisfying(&f, &field).unwrap();
        let b = count_satisfying(&f.negated(), &field).unwrap();
        prop_assert_eq!(a + b, size);
    }

    #[test]
    fn inclusion_exclusion(m1 in matrix(), m2 in matrix()) {
        let field = make_field(3, 1).unwrap();
        let c = |body: String| count_satisfying(&parse(&format!("free x, y, z . {body}")).unwrap(), &field).unwrap();
        let both = c(format!("({m1}) & ({m2})"));
        let either = c(format!("({m1}) | ({m2})"));
        prop_assert_eq!(both + either, c(m1.clone()) + c(m2.clone()));
    }

    #[test]
    fn quantifier_duality(m in matrix()) {
        let field = make_field(2, 2).unwrap();
        let all = decide(&parse(&format!("A x, y : ext 2 . A z . {m}")).unwrap(), &field).unwrap();
        let some_not = decide(&parse(&format!("E x, y : ext 2 . E z . !({m})")).unwrap(), &field).unwrap();
        prop_assert_eq!(all, !some_not);
    }

    #[test]
    fn substitution_commutes_with_decide(m in matrix(), q in quantifier()) {
        let field = make_field(3, 1).unwrap();
        let f = parse(&format!("free x, y . {q} z . {m}")).unwrap();
        let mut total = 0u64;
        for a in field.elements() {
            for b in field.elements() {
                let binding = BTreeMap::from([("x".to_string(), a.clone()), ("y".to_string(), b)]);
                let closed = f.substitute(&binding).unwrap();
                total += u64::from(decide(&closed, &field).unwrap());
            }
        }
        prop_assert_eq!(total, count_satisfying(&f, &field).unwrap());
    }

    #[test]
    fn print_parse_round_trip(m in matrix(), q in quantifier(), ext in 1u32..4) {
        let f = parse(&format!("free x : ext {ext} . {q} y, z . {m}")).unwrap();
        let again = parse(&f.to_string()).unwrap();
        prop_assert_eq!(&again, &f);
        prop_assert_eq!(again.to_string(), f.to_string());
    }
}
