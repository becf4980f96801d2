use super::*;
use crate::directory::fixture::{fifty, row};
use crate::directory::{generate_synthetic, Business, Directory, Sector};
use proptest::prelude::*;

const MSISDN: &str = "255712345678";

struct Fixture {
    catalog: Catalog,
    strings: Strings,
}

impl Fixture {
    fn new(directory: Directory) -> Self {
        Self { catalog: Catalog::new(directory), strings: Strings::default() }
    }

    fn env(&self, seen: bool) -> StepEnv<'_> {
        StepEnv { catalog: &self.catalog, strings: &self.strings, pages: &Uncached, disclaimer_seen: seen, now: 100 }
    }

    fn page(&self, s: &SessionState) -> RenderedPage {
        build_page(s, &self.catalog, &self.strings)
    }

    /// Starts a session and feeds `inputs`; returns every screen shown.
    fn walk(&self, inputs: &[&str], seen: bool) -> (SessionState, Vec<(Node, Screen)>) {
        let env = self.env(seen);
        let (mut s, screen) = start(MSISDN, &env);
        let mut screens = vec![(s.node, screen)];
        for input in inputs {
            let out = step(&s, input, &env);
            s = out.state;
            screens.push((s.node, out.screen));
        }
        (s, screens)
    }
}

fn distinct_screens(screens: &[(Node, Screen)]) -> Vec<Node> {
    let mut nodes: Vec<Node> = Vec::new();
    for (node, _) in screens {
        if *node != Node::Disclaimer && nodes.last() != Some(node) {
            nodes.push(*node);
        }
    }
    nodes
}

#[test]
fn welcome_offers_four_options() {
    let fx = Fixture::new(fifty());
    let (s, screen) = start(MSISDN, &fx.env(false));
    assert_eq!(s.node, Node::Welcome);
    assert_eq!(screen.kind, ScreenKind::Continue);
    assert_eq!(
        screen.body,
        "Karibu\n1. Tafuta kwa kuchagua\n2. Search by location\n3. Search by text\n4. Help"
    );
    assert_eq!(screen.wire(), format!("CON {}", screen.body));
}

#[test]
fn fresh_state_compact_form() {
    let s = SessionState::new(MSISDN, 1_700_000_000);
    assert_eq!(serialize_session(&s), "v1|255712345678|W|-|-|-|-|-|-|0|-|-|-|-|-|-|1700000000");
    assert_eq!(deserialize_session(&serialize_session(&s)).unwrap(), s);
}

#[test]
fn compact_errors() {
    assert_eq!(
        deserialize_session("v9|255712345678|W").unwrap_err(),
        CompactError::Version("v9".into())
    );
    assert_eq!(deserialize_session("v1|255712345678|W").unwrap_err(), CompactError::FieldCount(3));
    let bad = "v1|255712345678|Q|-|-|-|-|-|-|0|-|-|-|-|-|-|1";
    assert!(matches!(deserialize_session(bad), Err(CompactError::Field { index: 2, .. })));
    let orphan = "v1|255712345678|V|l|-|-|-|Kanazi|-|0|-|-|-|-|-|-|1";
    assert!(matches!(deserialize_session(orphan), Err(CompactError::Field { .. })));
}

#[test]
fn back_at_root_and_home() {
    let fx = Fixture::new(fifty());
    let (s, screens) = fx.walk(&["99", "1", "98"], false);
    assert_eq!(screens[1].1, screens[0].1);
    assert_eq!(screens[3].1, screens[0].1);
    assert_eq!(s, SessionState::new(MSISDN, 100));
}

#[test]
fn invalid_input_replaces_title_with_error() {
    let fx = Fixture::new(fifty());
    let (s, screens) = fx.walk(&["7", "abc", "0"], false);
    assert_eq!(s.node, Node::Welcome);
    for (_, screen) in &screens[1..] {
        assert_eq!(
            screen.body,
            "Chaguo batili.\n1. Tafuta kwa kuchagua\n2. Search by location\n3. Search by text\n4. Help"
        );
    }
}

#[test]
fn category_path_without_jumps_takes_eight_screens() {
    let fx = Fixture::new(fifty());
    // retailers, general shops, Karagwe, Kanazi, Sokoni, first business
    let (s, screens) = fx.walk(&["1", "1", "2", "1", "1", "1", "1"], true);
    assert_eq!(s.node, Node::BusinessDetail);
    let nodes = distinct_screens(&screens);
    assert_eq!(
        nodes,
        vec![
            Node::Welcome,
            Node::SectorList,
            Node::SubsectorList,
            Node::DistrictList,
            Node::VillageList,
            Node::SubvillageList,
            Node::BusinessList,
            Node::BusinessDetail
        ]
    );
    assert_eq!(screens.last().unwrap().1.kind, ScreenKind::End);
}

#[test]
fn nine_matches_after_district_jump_to_the_list() {
    let fx = Fixture::new(fifty());
    // retailers, agro-input shops (13), Karagwe leaves 9
    let (s, _) = fx.walk(&["1", "1", "1"], false);
    assert_eq!(s.filters.subsector.as_deref(), Some("agro-input shops"));
    let page = fx.page(&s);
    let karagwe = page.choices.iter().find(|(_, c)| *c == Choice::Facet("Karagwe".into())).unwrap().0;
    let out = step(&s, &karagwe.to_string(), &fx.env(false));
    assert_eq!(out.state.node, Node::BusinessList);
    assert_eq!(fx.catalog.count(&out.state.filters, None), 9);
    assert!(out.screen.body.starts_with("Businesses (9):"));
}

#[test]
fn show_code_jumps_from_any_filter_node() {
    let fx = Fixture::new(fifty());
    let (s, screens) = fx.walk(&["1", "96"], false);
    assert_eq!(s.node, Node::BusinessList);
    assert!(screens.last().unwrap().1.body.starts_with("Businesses (50):"));
    let (s, _) = fx.walk(&["96"], false);
    assert_eq!(s.node, Node::Welcome);
}

#[test]
fn text_path_with_keyword_hop_takes_six_screens() {
    let fx = Fixture::new(fifty());
    // misspelt business name
    let (s, screens) = fx.walk(&["3", "1", "Mbgeu 21"], true);
    assert_eq!(s.node, Node::KeywordSelect);
    assert!(screens.last().unwrap().1.body.starts_with("Did you mean:\n1. Mbegu 21\n"));
    let out = step(&s, "1", &fx.env(true));
    assert_eq!(out.state.node, Node::BusinessList);
    let out = step(&out.state, "1", &fx.env(true));
    assert_eq!(out.state.node, Node::BusinessDetail);
    let mut all = screens.clone();
    all.push((Node::BusinessList, Screen { kind: ScreenKind::Continue, body: String::new() }));
    all.push((Node::BusinessDetail, out.screen));
    assert_eq!(distinct_screens(&all).len(), 6);
}

#[test]
fn text_search_without_matches_stays_on_input() {
    let fx = Fixture::new(fifty());
    let (s, screens) = fx.walk(&["3", "4", "zzzzzzzz"], false);
    assert_eq!(s.node, Node::TextInput);
    assert_eq!(screens.last().unwrap().1.body, "No matches found.\nEnter the owner's name:\n99. Rudi");
}

#[test]
fn broad_keyword_refines_by_place_and_skips_single_options() {
    let fx = Fixture::new(fifty());
    // product keyword "seeds" matches 13 businesses across both districts
    let (s, _) = fx.walk(&["3", "3", "seeds"], false);
    let pick = fx
        .page(&s)
        .choices
        .iter()
        .find(|(_, c)| matches!(c, Choice::Keyword(id) if fx.catalog.keywords().get(*id).unwrap().text == "seeds"))
        .unwrap()
        .0;
    let out = step(&s, &pick.to_string(), &fx.env(false));
    assert_eq!(out.state.node, Node::DistrictList);
    let karagwe = fx.page(&out.state).choices.iter().find(|(_, c)| *c == Choice::Facet("Karagwe".into())).unwrap().0;
    let out = step(&out.state, &karagwe.to_string(), &fx.env(false));
    assert!(out.state.node == Node::BusinessList || out.state.node == Node::VillageList);
}

#[test]
fn detail_screen_echoes_business_fields() {
    let d = generate_synthetic(1, 10).unwrap();
    let b = d.get(3).unwrap().clone();
    let fx = Fixture::new(d);
    let mut s = SessionState::new(MSISDN, 0);
    s.node = Node::BusinessDetail;
    s.selected_business = Some(3);
    let screen = render(&s, &fx.env(true));
    assert_eq!(screen.kind, ScreenKind::End);
    for field in [&b.name, &b.owner_name, &b.phone] {
        assert!(screen.body.contains(field.as_str()), "{field}");
    }
    assert!(screen.body.contains(&format!("{}/{}/{}", b.district, b.village, b.subvillage)));
}

#[test]
fn disclaimer_pages_end_with_continue_and_show_once() {
    let fx = Fixture::new(fifty());
    let (s, screens) = fx.walk(&["1", "1", "96", "1"], false);
    assert_eq!(s.node, Node::Disclaimer);
    let mut state = s;
    let mut pages = vec![screens.last().unwrap().1.clone()];
    loop {
        let out = step(&state, "0", &fx.env(false));
        state = out.state;
        if state.node != Node::Disclaimer {
            break;
        }
        pages.push(out.screen);
    }
    assert!(pages.len() >= 2);
    for p in &pages {
        assert!(p.body.ends_with("0. Endelea"), "{}", p.body);
        assert!(char_len(&p.body) <= SCREEN_LIMIT);
    }
    assert_eq!(state.node, Node::BusinessDetail);
    let (s, _) = fx.walk(&["1", "1", "96", "1"], true);
    assert_eq!(s.node, Node::BusinessDetail);
}

#[test]
fn twenty_char_names_five_per_page() {
    let rows: Vec<Business> = (1..=12)
        .map(|id| row(id, &format!("Business name no. {id:02}"), Sector::Services, "salons", ("D", "V", "S")))
        .collect();
    assert!(rows.iter().all(|b| b.name.chars().count() == 20));
    let fx = Fixture::new(Directory::new(rows).unwrap());
    let (mut s, _) = fx.walk(&["1", "96"], false);
    let mut seen = Vec::new();
    loop {
        let page = fx.page(&s);
        assert!(char_len(&page.body) <= SCREEN_LIMIT);
        if seen.is_empty() {
            assert_eq!(page.choices.len(), 5);
        }
        seen.extend(page.choices.iter().map(|(_, c)| c.clone()));
        if !page.has_next {
            break;
        }
        s = step(&s, "0", &fx.env(false)).state;
    }
    let expected: Vec<Choice> = (1..=12).map(Choice::Business).collect();
    assert_eq!(seen, expected);
}

#[test]
fn back_from_list_returns_to_last_filter_node() {
    let fx = Fixture::new(fifty());
    let (s, screens) = fx.walk(&["1", "2", "1", "99"], false);
    assert_eq!(s.node, Node::SubsectorList);
    assert_eq!(s.filters.subsector, None);
    assert_eq!(screens[4].1, screens[2].1);
}

fn inputs() -> impl Strategy<Value = Vec<String>> {
    let one = prop_oneof![
        4 => (1u32..6).prop_map(|n| n.to_string()),
        1 => Just("0".to_string()),
        1 => Just("99".to_string()),
        1 => Just("96".to_string()),
        1 => Just("98".to_string()),
        1 => prop::sample::select(vec!["duka", "mbegu", "Kanazi", "Rubale", "asha", "xyz", "", "lory", "boda boda"])
            .prop_map(str::to_string),
    ];
    prop::collection::vec(one, 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn walks_respect_screen_contract(inputs in inputs(), seen in any::<bool>()) {
        let fx = Fixture::new(fifty());
        let env = fx.env(seen);
        let (mut s, first) = start(MSISDN, &env);
        prop_assert!(char_len(&first.body) <= SCREEN_LIMIT);
        for input in &inputs {
            let out = step(&s, input, &env);
            prop_assert!(!out.screen.body.is_empty());
            prop_assert!(char_len(&out.screen.body) <= SCREEN_LIMIT, "{}", out.screen.body);
            s = out.state;
            let compact = serialize_session(&s);
            prop_assert!(compact.chars().count() <= 256);
            prop_assert!(!compact.contains(char::is_whitespace));
            prop_assert_eq!(deserialize_session(&compact).unwrap(), s.clone());
            prop_assert!(s.candidates.is_none() || s.node == Node::KeywordSelect);
            prop_assert!(s.selected_business.is_none() || matches!(s.node, Node::Disclaimer | Node::BusinessDetail));
        }
    }

    #[test]
    fn back_then_same_choice_reproduces_screen(inputs in inputs()) {
        let fx = Fixture::new(fifty());
        let env = fx.env(true);
        let (mut s, _) = start(MSISDN, &env);
        for input in &inputs {
            let out = step(&s, input, &env);
            let moved = out.state.node != s.node || out.state.page != s.page;
            let navigational = ["99", "98"].contains(&input.as_str());
            if moved && !navigational && out.state.depth() >= 1 && out.screen.kind == ScreenKind::Continue {
                let back = step(&out.state, "99", &env);
                let again = step(&back.state, input, &env);
                prop_assert_eq!(&again.screen, &out.screen);
                prop_assert_eq!(&again.state, &out.state);
            }
            s = out.state;
            if out.screen.kind == ScreenKind::End {
                s = SessionState::new(MSISDN, 100);
            }
        }
    }

    #[test]
    fn walks_are_deterministic(inputs in inputs()) {
        let fx = Fixture::new(fifty());
        let refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
        prop_assert_eq!(fx.walk(&refs, false), fx.walk(&refs, false));
    }
}
