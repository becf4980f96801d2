use super::*;
use crate::directory::generate_synthetic;
use crate::directory::testutil::business;
use proptest::prelude::*;

fn scan(d: &Directory, keep: impl Fn(&Business) -> bool) -> Vec<u32> {
    let mut hits: Vec<&Business> = d.businesses().iter().filter(|b| keep(b)).collect();
    hits.sort_by_key(|b| (b.name.to_lowercase(), b.id));
    hits.iter().map(|b| b.id).collect()
}

fn villages_fixture() -> Directory {
    let mut rows = vec![
        business(1, "Duka la Mbegu", Sector::Retailers, ("Karagwe", "Kanazi", "Sokoni")),
        business(2, "Boda Express", Sector::Transporters, ("Bukoba", "Kanazi", "Mtoni")),
        business(3, "Lori Kubwa", Sector::Transporters, ("Korogwe", "Magoma", "Kati")),
        business(4, "Kahawa Bora", Sector::WholesaleTraders, ("Kyerwa", "Nkwenda", "Stendi")),
    ];
    rows[0].owner_name = "Asha Juma".into();
    rows[0].products = vec!["seeds".into(), "fertilizer".into()];
    rows[1].owner_name = "Asha Mushi".into();
    Directory::new(rows).unwrap()
}

#[test]
fn empty_filter_returns_everything_in_listing_order() {
    let d = generate_synthetic(1, 10).unwrap();
    let cat = Catalog::new(d.clone());
    let all = cat.apply_filters(&FilterState::default()).unwrap();
    assert_eq!(all.total, 10);
    assert_eq!(all.ids, scan(&d, |_| true));
}

#[test]
fn sector_filter_matches_linear_scan() {
    let d = generate_synthetic(1, 10).unwrap();
    let cat = Catalog::new(d.clone());
    let f = FilterState { sector: Some(Sector::Transporters), ..Default::default() };
    let got = cat.apply_filters(&f).unwrap();
    assert_eq!(got.ids, scan(&d, |b| b.sector.code() == 3));
    assert!(!got.ids.is_empty());
}

#[test]
fn broken_invariants_and_unknown_nodes_are_errors() {
    let cat = Catalog::new(villages_fixture());
    let f = FilterState { village: Some("Kanazi".into()), ..Default::default() };
    assert_eq!(
        cat.apply_filters(&f).unwrap_err(),
        SearchError::BrokenInvariant { dimension: Dimension::Village, requires: Dimension::District }
    );
    let f = FilterState { district: Some("Karagwe".into()), village: Some("Magoma".into()), ..Default::default() };
    assert_eq!(
        cat.apply_filters(&f).unwrap_err(),
        SearchError::UnknownValue { dimension: Dimension::Village, value: "Magoma".into() }
    );
    let f = FilterState { sector: Some(Sector::Services), subsector: Some("nope".into()), ..Default::default() };
    assert!(matches!(cat.apply_filters(&f), Err(SearchError::UnknownValue { .. })));
}

#[test]
fn sector_options_in_code_order() {
    let cat = Catalog::new(generate_synthetic(1, 10).unwrap());
    let labels = cat.options_for(&FilterState::default(), Dimension::Sector).unwrap();
    let expected: Vec<String> = Sector::ALL.iter().map(|s| s.label().to_string()).collect();
    assert_eq!(labels, expected);
}

#[test]
fn subsector_options_only_with_matches() {
    let d = generate_synthetic(7, 400).unwrap();
    let cat = Catalog::new(d.clone());
    let f = FilterState { sector: Some(Sector::Retailers), ..Default::default() };
    let got = cat.options_for(&f, Dimension::Subsector).unwrap();
    let mut expected: Vec<String> = d
        .businesses()
        .iter()
        .filter(|b| b.sector == Sector::Retailers)
        .map(|b| b.subsector.clone())
        .collect();
    expected.sort_by_key(|s| s.to_lowercase());
    expected.dedup();
    assert_eq!(got, expected);
}

#[test]
fn options_for_rejects_set_or_out_of_order_dimensions() {
    let cat = Catalog::new(villages_fixture());
    let f = FilterState { sector: Some(Sector::Retailers), ..Default::default() };
    assert_eq!(cat.options_for(&f, Dimension::Sector), Err(SearchError::DimensionSet(Dimension::Sector)));
    assert_eq!(
        cat.options_for(&f, Dimension::Village),
        Err(SearchError::OutOfOrder { dimension: Dimension::Village, requires: Dimension::District })
    );
}

#[test]
fn single_business_has_one_option_per_step() {
    let d = Directory::new(vec![business(1, "Solo", Sector::Services, ("D", "V", "S"))]).unwrap();
    let cat = Catalog::new(d);
    let mut f = FilterState::default();
    for dim in [Dimension::Sector, Dimension::Subsector, Dimension::District, Dimension::Village, Dimension::Subvillage] {
        let opts = cat.options_for(&f, dim).unwrap();
        assert_eq!(opts.len(), 1, "{dim}");
        f.set(dim, &opts[0]).unwrap();
    }
    assert_eq!(cat.apply_filters(&f).unwrap().ids, vec![1]);
}

#[test]
fn vocabulary_covers_every_source() {
    let mut b = business(1, "Duka la Mbegu", Sector::Retailers, ("Karagwe", "Kanazi", "Sokoni"));
    b.owner_name = "Asha Juma".into();
    let ix = build_keyword_index(&Directory::new(vec![b]).unwrap());
    let vocab = ix.vocabulary();
    for word in ["duka", "mbegu", "asha", "juma", "kanazi", "duka la mbegu", "asha juma", "retailers", "karagwe"] {
        assert!(vocab.contains(&word), "{word}");
    }
    // single-letter tokens are not indexed on their own
    assert!(!vocab.contains(&"a"));
    assert!(ix.iter().all(|(_, k)| !k.text.is_empty() && !k.referents.is_empty()));
}

#[test]
fn vocabulary_size_golden() {
    // counted from the CSV export of this directory with a separate script
    let ix = build_keyword_index(&generate_synthetic(1, 10).unwrap());
    assert_eq!(ix.vocabulary().len(), VOCAB_SEED1_N10);
    assert_eq!(ix.len(), KEYWORDS_SEED1_N10);
}

const VOCAB_SEED1_N10: usize = 119;
const KEYWORDS_SEED1_N10: usize = 127;

#[test]
fn misspelled_places_find_their_neighbours() {
    let ix = build_keyword_index(&villages_fixture());
    let first = ix.fuzzy_candidates("Kyera", 8).unwrap();
    let kw = ix.get(first[0].id).unwrap();
    assert_eq!((kw.text.as_str(), first[0].distance), ("kyerwa", 1));

    let got: Vec<(String, usize)> = ix
        .fuzzy_candidates("Karogwe", 8)
        .unwrap()
        .iter()
        .map(|c| (ix.get(c.id).unwrap().text.clone(), c.distance))
        .collect();
    assert_eq!(got, vec![("karagwe".to_string(), 1), ("korogwe".to_string(), 1)]);
}

#[test]
fn exact_query_ranks_first() {
    let ix = build_keyword_index(&villages_fixture());
    let c = ix.fuzzy_candidates("  MBEGU ", 8).unwrap();
    assert_eq!(c[0].distance, 0);
    assert_eq!(ix.get(c[0].id).unwrap().text, "mbegu");
}

#[test]
fn fuzzy_rejects_bad_arguments() {
    let ix = build_keyword_index(&villages_fixture());
    assert_eq!(ix.fuzzy_candidates(" .. ", 8), Err(SearchError::EmptyQuery));
    assert_eq!(ix.fuzzy_candidates("duka", 0), Err(SearchError::ZeroCandidates));
    assert!(ix.fuzzy_candidates("zzzzzzzzzz", 8).unwrap().is_empty());
}

#[test]
fn keyword_resolution() {
    let d = villages_fixture();
    let cat = Catalog::new(d.clone());
    let ix = cat.keywords();
    assert_eq!(ix.resolve_keyword(KeywordKind::Village, "kanazi").unwrap().ids, scan(&d, |b| b.village == "Kanazi"));
    assert_eq!(
        ix.resolve_keyword(KeywordKind::OwnerName, "asha").unwrap().ids,
        scan(&d, |b| b.owner_name.to_lowercase().split(' ').any(|t| t == "asha"))
    );
    let f = FilterState { sector: Some(Sector::Transporters), ..Default::default() };
    assert_eq!(
        ix.resolve_keyword(KeywordKind::Sector, "transporters").unwrap(),
        cat.apply_filters(&f).unwrap()
    );
    assert_eq!(
        ix.resolve_keyword(KeywordKind::Product, "diesel"),
        Err(SearchError::UnknownKeyword { kind: KeywordKind::Product, text: "diesel".into() })
    );
}

#[test]
fn keyword_and_filters_combine() {
    let d = villages_fixture();
    let kw = KeywordRef::new(KeywordKind::Village, "kanazi");
    for mode in [EvalMode::Indexed, EvalMode::Scan] {
        let cat = Catalog::with_mode(d.clone(), mode);
        let f = FilterState { district: Some("Bukoba".into()), ..Default::default() };
        assert_eq!(cat.select(&f, Some(&kw)).ids, vec![2]);
        assert_eq!(cat.options(&FilterState::default(), Some(&kw), Dimension::District), vec!["Bukoba", "Karagwe"]);
    }
}

const DISTRICTS: [&str; 3] = ["Bukoba", "Karagwe", "Ngara"];
const VILLAGES: [&str; 3] = ["Kanazi", "Rubale", "Kanazi"];
const SUBS: [&str; 2] = ["Sokoni", "Mtoni"];
const NAMES: [&str; 6] = ["Duka la Mbegu", "duka", "Boda Boda", "Kahawa Bora", "Mgahawa", "Lori"];
const SUBSECTORS: [&str; 2] = ["general", "special"];

fn arb_directory(max: usize) -> impl Strategy<Value = Directory> {
    prop::collection::vec((0..6usize, 1..7u8, 0..2usize, 0..3usize, 0..3usize, 0..2usize, 0..4usize), 1..max).prop_map(
        |rows| {
            let businesses = rows
                .into_iter()
                .enumerate()
                .map(|(i, (name, sector, sub, d, v, s, owner))| {
                    let mut b = business(
                        i as u32 + 1,
                        NAMES[name],
                        Sector::from_code(sector).unwrap(),
                        (DISTRICTS[d], VILLAGES[(d + v) % 3], SUBS[s]),
                    );
                    b.subsector = SUBSECTORS[sub].to_string();
                    b.owner_name = ["Asha Juma", "Juma Kato", "Neema", "A B"][owner].to_string();
                    b
                })
                .collect();
            Directory::new(businesses).unwrap()
        },
    )
}

fn arb_filter() -> impl Strategy<Value = FilterState> {
    (
        prop::option::of(1..7u8),
        prop::option::of(0..2usize),
        prop::option::of(0..3usize),
        prop::option::of(0..3usize),
        prop::option::of(0..2usize),
    )
        .prop_map(|(s, sub, d, v, sv)| {
            let sector = s.and_then(Sector::from_code);
            let district = d.map(|d| DISTRICTS[d].to_string());
            let village = if district.is_some() { v.map(|v| VILLAGES[v].to_string()) } else { None };
            let subvillage = if village.is_some() { sv.map(|s| SUBS[s].to_string()) } else { None };
            FilterState {
                sector,
                subsector: if sector.is_some() { sub.map(|s| SUBSECTORS[s].to_string()) } else { None },
                district,
                village,
                subvillage,
            }
        })
}

fn oracle_candidates(ix: &KeywordIndex, query: &str, k: usize) -> Vec<(usize, KeywordId)> {
    let q: String = query
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join(" ");
    let tier = |kind: KeywordKind| match kind.name() {
        "sector" => 0,
        "subsector" => 1,
        "product" => 2,
        "district" | "village" | "subvillage" => 3,
        "owner_name" => 4,
        _ => 5,
    };
    let mut all: Vec<(usize, u8, String, KeywordKind, KeywordId)> = ix
        .iter()
        .filter_map(|(id, kw)| {
            let d = strsim::damerau_levenshtein(&q, &kw.text);
            let limit = std::cmp::max(1, (kw.text.chars().count() + 3) / 4);
            (d <= limit).then(|| (d, tier(kw.kind), kw.text.clone(), kw.kind, id))
        })
        .collect();
    all.sort();
    all.into_iter().take(k).map(|(d, _, _, _, id)| (d, id)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn filters_equal_brute_force(d in arb_directory(300), f in arb_filter()) {
        let cat = Catalog::new(d.clone());
        let expected = scan(&d, |b| f.matches(b));
        match cat.apply_filters(&f) {
            Ok(rs) => prop_assert_eq!(rs.ids, expected),
            Err(SearchError::UnknownValue { .. }) => prop_assert!(expected.is_empty()),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
        let scan_cat = Catalog::with_mode(d, EvalMode::Scan);
        prop_assert_eq!(cat.select(&f, None), scan_cat.select(&f, None));
    }

    #[test]
    fn adding_a_facet_never_grows_results(d in arb_directory(120), f in arb_filter(), dim in 0..5usize) {
        let cat = Catalog::new(d);
        let dim = Dimension::ALL[dim];
        if !f.is_set(dim) && dim.parent().is_none_or(|p| f.is_set(p)) {
            let before = cat.select(&f, None);
            for label in cat.options_for(&f, dim).unwrap() {
                let mut g = f.clone();
                g.set(dim, &label).unwrap();
                let after = cat.select(&g, None);
                prop_assert!(after.total >= 1 && after.total <= before.total);
                prop_assert!(after.ids.iter().all(|id| before.ids.contains(id)));
            }
        }
    }

    #[test]
    fn keyword_selection_matches_scan_mode(d in arb_directory(120), f in arb_filter(), pick in 0..1000usize) {
        let cat = Catalog::new(d.clone());
        let scan_cat = Catalog::with_mode(d, EvalMode::Scan);
        let (_, kw) = cat.keywords().iter().nth(pick % cat.keywords().len()).unwrap();
        let kw = KeywordRef::new(kw.kind, kw.text.clone());
        prop_assert_eq!(cat.select(&f, Some(&kw)), scan_cat.select(&f, Some(&kw)));
        for dim in Dimension::ALL {
            prop_assert_eq!(cat.options(&f, Some(&kw), dim), scan_cat.options(&f, Some(&kw), dim));
        }
    }

    #[test]
    fn fuzzy_matches_scan_mode(d in arb_directory(120), query in "[a-z]{1,10}", k in 1..10usize) {
        let cat = Catalog::new(d.clone());
        let scan_cat = Catalog::with_mode(d, EvalMode::Scan);
        prop_assert_eq!(
            cat.fuzzy_candidates(&query, k, &KeywordKind::ALL).unwrap(),
            scan_cat.fuzzy_candidates(&query, k, &KeywordKind::ALL).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fuzzy_equals_brute_force(d in arb_directory(60), query in "[a-zA-Z ]{1,12}", k in 1..12usize) {
        let ix = build_keyword_index(&d);
        prop_assume!(!normalize_text(&query).is_empty());
        let got: Vec<(usize, KeywordId)> =
            ix.fuzzy_candidates(&query, k).unwrap().iter().map(|c| (c.distance, c.id)).collect();
        prop_assert_eq!(got, oracle_candidates(&ix, &query, k));
    }
}
