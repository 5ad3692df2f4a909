use proptest::prelude::*;

use opcalc_cli::spec::parse;

/// A complex section with labels `g0, g1, …` and rational differentials.
fn complex_section() -> impl Strategy<Value = String> {
    (1usize..6).prop_flat_map(|n| {
        (
            prop::collection::vec(0i32..4, n),
            prop::collection::vec(prop::collection::vec((-5i64..=5, 1i64..=4, 0..n), 0..3), n),
        )
            .prop_map(|(degrees, diffs)| {
                let mut s = String::from("[complex C]\n");
                for (k, d) in degrees.iter().enumerate() {
                    s.push_str(&format!("gen g{k} {d}\n"));
                }
                for (k, terms) in diffs.iter().enumerate() {
                    if terms.is_empty() {
                        continue;
                    }
                    let body: Vec<String> = terms.iter().map(|(p, q, j)| format!("{p}/{q} g{j}")).collect();
                    s.push_str(&format!("d g{k} = {}\n", body.join(" + ").replace("+ -", "- ")));
                }
                s
            })
    })
}

fn job_section() -> impl Strategy<Value = String> {
    (prop::sample::select(vec!["homology", "tq", "bar"]), 0i32..12, prop::collection::vec((0i32..6, 0usize..3), 0..3)).prop_map(
        |(kind, cap, betti)| {
            let table: Vec<String> = betti.iter().map(|(d, r)| format!("{d}:{r}")).collect();
            let mut s = format!("[job j-{kind}]\nkind {kind}\ndegree_cap = {cap}\n");
            if !table.is_empty() {
                s.push_str(&format!("expect betti = {}\n", table.join(" ")));
            }
            s
        },
    )
}

proptest! {
    #[test]
    fn printing_then_parsing_is_the_identity(
        field in prop::sample::select(vec!["Q", "Fp:2", "Fp:7"]),
        complex in complex_section(),
        job in job_section(),
    ) {
        let text = format!("field = {field}\n\n{complex}\n{job}");
        let spec = parse(&text).unwrap();
        let printed = spec.to_string();
        let again = parse(&printed).unwrap();
        prop_assert_eq!(&spec, &again);
        prop_assert_eq!(printed, again.to_string());
    }
}
