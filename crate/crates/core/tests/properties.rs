use std::collections::BTreeSet;

use pdtb_lab::corpus::{
    cv_folds, is_linked, linked_partners, locate, parse_relations, random_split, serialize_relations, standard_split,
    ByteSpanList, Location, RelType, RelationFormat, RelationRecord, Sectioned,
};
use pdtb_lab::sense::SenseLabel;
use proptest::prelude::*;

const SENSES: [&str; 6] = [
    "Contingency.Cause.Reason",
    "Expansion.Conjunction",
    "Comparison.Concession.Arg2-as-denier",
    "Temporal.Asynchronous.Precedence",
    "Expansion.Level-of-detail.Arg1-as-detail",
    "Contingency.Purpose.Arg2-as-goal",
];

#[derive(Debug, Clone, PartialEq)]
struct Item(u8, usize);

impl Sectioned for Item {
    fn section(&self) -> u8 {
        self.0
    }
}

fn spans() -> impl Strategy<Value = ByteSpanList> {
    prop::collection::btree_set(0usize..400, 2..=6).prop_map(|cuts| {
        // consecutive pairs of distinct sorted cut points give ordered, disjoint spans
        let v: Vec<usize> = cuts.into_iter().collect();
        let pairs: Vec<(usize, usize)> = v.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        ByteSpanList::new(pairs).unwrap()
    })
}

fn record() -> impl Strategy<Value = RelationRecord> {
    (
        prop_oneof![Just(RelType::Implicit), Just(RelType::Explicit), Just(RelType::AltLex)],
        prop::collection::btree_set(0..SENSES.len(), 1..=2),
        spans(),
        spans(),
        prop::option::of(0u8..4),
        prop::option::of("[a-z]{1,8}( [a-z]{1,6})?"),
    )
        .prop_map(|(ty, senses, arg1, arg2, link, conn)| RelationRecord {
            doc_id: "wsj_0712".into(),
            section: 7,
            rel_type: ty,
            conn,
            senses: senses.into_iter().map(|i| SENSES[i].parse::<SenseLabel>().unwrap()).collect(),
            arg1,
            arg2,
            conn_span: None,
            link: link.map(|l| l.to_string()),
        })
}

fn sentences() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::btree_set(1usize..399, 0..8).prop_map(|cuts| {
        let mut bounds = vec![0];
        bounds.extend(cuts);
        bounds.push(400);
        bounds.windows(2).map(|w| (w[0], w[1])).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_split_is_a_partition(n in 0usize..300, seed in any::<u64>(), tr in 0.0f64..1.0, dv in 0.0f64..1.0) {
        let s = random_split((0..n).collect::<Vec<_>>(), seed, tr, dv * (1.0 - tr));
        let mut all: Vec<usize> = s.train.iter().chain(&s.dev).chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let again = random_split((0..n).collect::<Vec<_>>(), seed, tr, dv * (1.0 - tr));
        prop_assert_eq!(s, again);
    }

    #[test]
    fn standard_split_follows_sections(secs in prop::collection::vec(0u8..=24, 0..200)) {
        let items: Vec<Item> = secs.iter().enumerate().map(|(i, &s)| Item(s, i)).collect();
        let s = standard_split(&items);
        prop_assert!(s.train.iter().all(|x| (2..=21).contains(&x.0)));
        prop_assert!(s.dev.iter().all(|x| x.0 == 22));
        prop_assert!(s.test.iter().all(|x| x.0 == 23));
        let kept = items.iter().filter(|x| (2..=23).contains(&x.0)).count();
        prop_assert_eq!(s.len(), kept);
    }

    #[test]
    fn cv_folds_cover_sections_once(secs in prop::collection::btree_set(0u8..=24, 2..=25), k in 2usize..=12) {
        let secs: Vec<u8> = secs.into_iter().collect();
        prop_assume!(k <= secs.len());
        let folds = cv_folds(&secs, k).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut tested: Vec<u8> = folds.iter().flat_map(|f| f.test.iter().copied()).collect();
        tested.sort_unstable();
        prop_assert_eq!(&tested, &secs);
        for f in &folds {
            let parts: Vec<BTreeSet<u8>> = [&f.train, &f.dev, &f.test].iter().map(|p| p.iter().copied().collect()).collect();
            prop_assert!(parts[0].is_disjoint(&parts[1]) && parts[0].is_disjoint(&parts[2]) && parts[1].is_disjoint(&parts[2]));
            prop_assert_eq!(parts.iter().map(BTreeSet::len).sum::<usize>(), secs.len());
            // contiguous test group
            prop_assert!(f.test.windows(2).all(|w| secs.iter().position(|&s| s == w[1]).unwrap() == secs.iter().position(|&s| s == w[0]).unwrap() + 1));
        }
    }

    #[test]
    fn location_ignores_argument_order(rel in record(), sents in sentences()) {
        let mut swapped = rel.clone();
        std::mem::swap(&mut swapped.arg1, &mut swapped.arg2);
        prop_assert_eq!(locate(&rel, &sents).ok(), locate(&swapped, &sents).ok());
    }

    #[test]
    fn location_matches_containment(rel in record(), sents in sentences()) {
        // oracle: every span inside one sentence
        let one = sents.iter().any(|&(s, e)| rel.all_spans().all(|(a, b)| s <= a && b <= e));
        let want = if one { Location::IntraSentential } else { Location::InterSentential };
        prop_assert_eq!(locate(&rel, &sents).unwrap(), want);
    }

    #[test]
    fn linkage_is_symmetric(rels in prop::collection::vec(record(), 1..12)) {
        for (i, a) in rels.iter().enumerate() {
            let partners: Vec<&RelationRecord> = linked_partners(a, &rels).collect();
            prop_assert_eq!(is_linked(a, &rels), !partners.is_empty());
            for (j, b) in rels.iter().enumerate() {
                if i != j && a.link.is_some() && a.link == b.link {
                    prop_assert!(is_linked(b, &rels));
                }
            }
        }
    }

    #[test]
    fn json_lines_round_trip(rels in prop::collection::vec(record(), 0..10)) {
        let text = serialize_relations(&rels, RelationFormat::JsonLines).unwrap();
        prop_assert_eq!(parse_relations(&text, RelationFormat::JsonLines, None).unwrap(), rels);
    }

    #[test]
    fn pipe_round_trip(rels in prop::collection::vec(record(), 0..10)) {
        let text = serialize_relations(&rels, RelationFormat::PipeDelimited).unwrap();
        let back = parse_relations(&text, RelationFormat::PipeDelimited, Some("wsj_0712")).unwrap();
        prop_assert_eq!(back, rels);
    }
}
