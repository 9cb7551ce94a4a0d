//! The checked-in interchange documents stay parseable, canonical, and in
//! sync with the generators that produced them.

use defseq::{
    antoine_chain, bing_pattern, check_admissible, mod2_linking_sequence, parse_system, stage,
    system_to_json, verify_component_bijection, whitehead_pattern, BijectionOutcome,
    ExpandOptions, NestingPair, NestingRelation, NestingTag, ParitySeq,
};

const ANTOINE_4: &str = include_str!("fixtures/antoine_4.json");
const BING: &str = include_str!("fixtures/bing.json");
const WHITEHEAD: &str = include_str!("fixtures/whitehead.json");

fn opts() -> ExpandOptions {
    ExpandOptions::default()
}

#[test]
fn fixtures_reserialize_byte_identically() {
    for (name, text) in [("antoine_4", ANTOINE_4), ("bing", BING), ("whitehead", WHITEHEAD)] {
        let ps = parse_system(text).unwrap();
        assert_eq!(system_to_json(&ps), text, "{name}: canonical form drifted");
    }
}

#[test]
fn fixtures_match_their_generators() {
    assert_eq!(parse_system(ANTOINE_4).unwrap(), antoine_chain(4).unwrap().system);
    assert_eq!(parse_system(BING).unwrap(), bing_pattern().system);
    assert_eq!(parse_system(WHITEHEAD).unwrap(), whitehead_pattern().system);
}

#[test]
fn slice_fixtures_have_vanishing_linking() {
    for text in [BING, WHITEHEAD] {
        let ps = parse_system(text).unwrap();
        assert_eq!(mod2_linking_sequence(&ps).unwrap(), ParitySeq::zero());
    }
}

#[test]
fn antoine_fixture_is_admissible_and_self_corresponds() {
    let ps = parse_system(ANTOINE_4).unwrap();
    assert!(check_admissible(&ps, 3, opts()).unwrap().overall);

    let sg = stage(&ps, 1, opts()).unwrap();
    let rel = NestingRelation {
        stage: 1,
        pairs: sg
            .nodes
            .iter()
            .map(|n| NestingPair { c: n.id.clone(), d: n.id.clone(), tag: NestingTag::CInsideD })
            .collect(),
    };
    match verify_component_bijection(&sg, &sg, &rel).unwrap() {
        BijectionOutcome::Certificate(cert) => {
            assert_eq!(cert.matching.len(), sg.nodes.len());
        }
        BijectionOutcome::Violation { trace } => panic!("identity refuted: {trace:?}"),
    }
}
