//! USSD navigation: session state, screen rendering and the step function.
//!
//! Everything here is a pure function of (state, input, catalog, strings).
//! Rendered pages may be memoized through a [`PageSource`]; the gateway
//! plugs an LRU cache in there.

mod compact;
mod layout;
mod strings;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::search::{
    normalize_text, Catalog, Dimension, FilterState, KeywordId, KeywordKind, KeywordRef, DEFAULT_CANDIDATES,
};

pub use self::compact::{deserialize_session, serialize_session, CompactError, COMPACT_VERSION};
pub use self::layout::{char_len, ordinal, truncate_label, LABEL_WIDTH, SCREEN_LIMIT};
pub use self::strings::{Strings, StringsError};

/// Result lists at or below this size skip the remaining facet screens.
pub const JUMP_THRESHOLD: usize = 10;
/// Text queries are cut to this many bytes after normalization.
pub const MAX_QUERY_BYTES: usize = 32;
/// Screen titles from a string table are cut to this width.
pub const TITLE_WIDTH: usize = 40;

pub const CODE_NEXT: &str = "0";
pub const CODE_BACK: &str = "99";
pub const CODE_HOME: &str = "98";
pub const CODE_SHOW: &str = "96";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Welcome,
    SectorList,
    SubsectorList,
    DistrictList,
    VillageList,
    SubvillageList,
    TextTypeMenu,
    TextInput,
    KeywordSelect,
    BusinessList,
    Disclaimer,
    BusinessDetail,
    Help,
}

impl Node {
    pub const ALL: [Node; 13] = [
        Node::Welcome,
        Node::SectorList,
        Node::SubsectorList,
        Node::DistrictList,
        Node::VillageList,
        Node::SubvillageList,
        Node::TextTypeMenu,
        Node::TextInput,
        Node::KeywordSelect,
        Node::BusinessList,
        Node::Disclaimer,
        Node::BusinessDetail,
        Node::Help,
    ];

    /// One-letter tag used in compact session strings.
    pub fn tag(self) -> char {
        match self {
            Node::Welcome => 'W',
            Node::SectorList => 'S',
            Node::SubsectorList => 'U',
            Node::DistrictList => 'D',
            Node::VillageList => 'V',
            Node::SubvillageList => 'G',
            Node::TextTypeMenu => 'T',
            Node::TextInput => 'I',
            Node::KeywordSelect => 'K',
            Node::BusinessList => 'L',
            Node::Disclaimer => 'C',
            Node::BusinessDetail => 'B',
            Node::Help => 'H',
        }
    }

    pub fn from_tag(tag: char) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.tag() == tag)
    }

    pub fn name(self) -> &'static str {
        match self {
            Node::Welcome => "Welcome",
            Node::SectorList => "SectorList",
            Node::SubsectorList => "SubsectorList",
            Node::DistrictList => "DistrictList",
            Node::VillageList => "VillageList",
            Node::SubvillageList => "SubvillageList",
            Node::TextTypeMenu => "TextTypeMenu",
            Node::TextInput => "TextInput",
            Node::KeywordSelect => "KeywordSelect",
            Node::BusinessList => "BusinessList",
            Node::Disclaimer => "Disclaimer",
            Node::BusinessDetail => "BusinessDetail",
            Node::Help => "Help",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.name() == name)
    }

    /// The facet a filter node lets the user choose.
    pub fn facet(self) -> Option<Dimension> {
        match self {
            Node::SectorList => Some(Dimension::Sector),
            Node::SubsectorList => Some(Dimension::Subsector),
            Node::DistrictList => Some(Dimension::District),
            Node::VillageList => Some(Dimension::Village),
            Node::SubvillageList => Some(Dimension::Subvillage),
            _ => None,
        }
    }

    pub fn for_facet(dim: Dimension) -> Self {
        match dim {
            Dimension::Sector => Node::SectorList,
            Dimension::Subsector => Node::SubsectorList,
            Dimension::District => Node::DistrictList,
            Dimension::Village => Node::VillageList,
            Dimension::Subvillage => Node::SubvillageList,
        }
    }

    pub fn is_filter(self) -> bool {
        self.facet().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntryPath {
    Category,
    Location,
    Text,
}

impl EntryPath {
    pub fn tag(self) -> char {
        match self {
            EntryPath::Category => 'c',
            EntryPath::Location => 'l',
            EntryPath::Text => 't',
        }
    }

    pub fn from_tag(tag: char) -> Option<Self> {
        [EntryPath::Category, EntryPath::Location, EntryPath::Text].into_iter().find(|p| p.tag() == tag)
    }

    /// Facet screens offered along this path, in order. Text searches only
    /// refine by place once a keyword is chosen.
    pub fn facets(self) -> &'static [Dimension] {
        match self {
            EntryPath::Category => &[
                Dimension::Sector,
                Dimension::Subsector,
                Dimension::District,
                Dimension::Village,
                Dimension::Subvillage,
            ],
            EntryPath::Location => &[
                Dimension::District,
                Dimension::Village,
                Dimension::Subvillage,
                Dimension::Sector,
                Dimension::Subsector,
            ],
            EntryPath::Text => &[Dimension::District, Dimension::Village],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TextKind {
    Name,
    Location,
    Products,
    Owner,
}

impl TextKind {
    pub const ALL: [TextKind; 4] = [TextKind::Name, TextKind::Location, TextKind::Products, TextKind::Owner];

    pub fn tag(self) -> char {
        match self {
            TextKind::Name => 'n',
            TextKind::Location => 'l',
            TextKind::Products => 'p',
            TextKind::Owner => 'o',
        }
    }

    pub fn from_tag(tag: char) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    pub fn keyword_kinds(self) -> &'static [KeywordKind] {
        match self {
            TextKind::Name => &[KeywordKind::BusinessName],
            TextKind::Location => &[KeywordKind::District, KeywordKind::Village, KeywordKind::Subvillage],
            TextKind::Products => &[KeywordKind::Sector, KeywordKind::Subsector, KeywordKind::Product],
            TextKind::Owner => &[KeywordKind::OwnerName],
        }
    }

    fn key(self) -> &'static str {
        match self {
            TextKind::Name => "name",
            TextKind::Location => "location",
            TextKind::Products => "products",
            TextKind::Owner => "owner",
        }
    }
}

/// A node left behind on the way down, with the page it was showing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub node: Node,
    pub page: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub msisdn: String,
    pub node: Node,
    pub entry_path: Option<EntryPath>,
    pub filters: FilterState,
    pub page: u32,
    pub stack: Vec<Frame>,
    pub text_kind: Option<TextKind>,
    /// Normalized text query, kept so the keyword screen can be rebuilt on back.
    pub query: Option<String>,
    pub keyword: Option<KeywordRef>,
    pub candidates: Option<Vec<KeywordId>>,
    pub selected_business: Option<u32>,
    pub last_active: u64,
}

impl SessionState {
    pub fn new(msisdn: impl Into<String>, now: u64) -> Self {
        Self {
            msisdn: msisdn.into(),
            node: Node::Welcome,
            entry_path: None,
            filters: FilterState::default(),
            page: 0,
            stack: Vec::new(),
            text_kind: None,
            query: None,
            keyword: None,
            candidates: None,
            selected_business: None,
            last_active: now,
        }
    }

    /// Number of screens above this one.
    pub fn depth(&self) -> usize {
        self.stack.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScreenKind {
    Continue,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Screen {
    pub kind: ScreenKind,
    pub body: String,
}

impl Screen {
    /// Gateway wire form: "CON " or "END " followed by the body.
    pub fn wire(&self) -> String {
        let prefix = match self.kind {
            ScreenKind::Continue => "CON ",
            ScreenKind::End => "END ",
        };
        format!("{prefix}{}", self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Choice {
    Menu(u8),
    Facet(String),
    Keyword(KeywordId),
    Business(u32),
}

/// One rendered page together with the choices it offers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPage {
    pub kind: ScreenKind,
    pub body: String,
    pub choices: Vec<(u32, Choice)>,
    pub has_next: bool,
    /// The first line is a title that an error line may replace.
    pub titled: bool,
}

impl RenderedPage {
    pub fn choice(&self, ordinal: u32) -> Option<&Choice> {
        self.choices.iter().find(|(n, _)| *n == ordinal).map(|(_, c)| c)
    }

    pub fn screen(&self) -> Screen {
        Screen { kind: self.kind, body: self.body.clone() }
    }
}

/// Everything a rendered page depends on besides the strings table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PageKey {
    pub version: String,
    pub node: Node,
    pub page: u32,
    pub filters: FilterState,
    pub keyword: Option<KeywordRef>,
    pub text_kind: Option<TextKind>,
    pub candidates: Option<Vec<KeywordId>>,
    pub selected: Option<u32>,
}

impl PageKey {
    pub fn of(s: &SessionState, version: &str) -> Self {
        let listing = s.node.is_filter() || s.node == Node::BusinessList;
        PageKey {
            version: version.to_string(),
            node: s.node,
            page: s.page,
            filters: if listing { s.filters.clone() } else { FilterState::default() },
            keyword: if listing { s.keyword.clone() } else { None },
            text_kind: if s.node == Node::TextInput { s.text_kind } else { None },
            candidates: if s.node == Node::KeywordSelect { s.candidates.clone() } else { None },
            selected: if s.node == Node::BusinessDetail { s.selected_business } else { None },
        }
    }
}

pub trait PageSource: Send + Sync {
    fn page(&self, key: PageKey, build: &mut dyn FnMut() -> RenderedPage) -> Arc<RenderedPage>;
}

/// Renders every page afresh.
#[derive(Debug, Default, Clone, Copy)]
pub struct Uncached;

impl PageSource for Uncached {
    fn page(&self, _key: PageKey, build: &mut dyn FnMut() -> RenderedPage) -> Arc<RenderedPage> {
        Arc::new(build())
    }
}

pub struct StepEnv<'a> {
    pub catalog: &'a Catalog,
    pub strings: &'a Strings,
    pub pages: &'a dyn PageSource,
    /// Whether this msisdn has already been shown the disclaimer.
    pub disclaimer_seen: bool,
    pub now: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub state: SessionState,
    pub screen: Screen,
    pub showed_disclaimer: bool,
}

pub fn start(msisdn: &str, env: &StepEnv<'_>) -> (SessionState, Screen) {
    let s = SessionState::new(msisdn, env.now);
    let screen = render(&s, env);
    (s, screen)
}

pub fn render(s: &SessionState, env: &StepEnv<'_>) -> Screen {
    current_page(s, env).screen()
}

fn current_page(s: &SessionState, env: &StepEnv<'_>) -> Arc<RenderedPage> {
    let key = PageKey::of(s, env.catalog.version());
    env.pages.page(key, &mut || build_page(s, env.catalog, env.strings))
}

pub fn step(state: &SessionState, input: &str, env: &StepEnv<'_>) -> StepOutcome {
    let mut s = state.clone();
    s.last_active = env.now;
    let input = input.trim();

    if s.node == Node::BusinessDetail || input == CODE_HOME {
        return shown(SessionState::new(s.msisdn, env.now), env);
    }
    if input == CODE_BACK {
        back(&mut s, env);
        return shown(s, env);
    }

    let page = current_page(&s, env);
    if input == CODE_NEXT {
        if page.has_next {
            s.page += 1;
        } else if s.node == Node::Disclaimer {
            s.node = Node::BusinessDetail;
            s.page = 0;
        } else {
            return with_notice(s, &page, env.strings.get("error.invalid"));
        }
        return shown(s, env);
    }
    if input == CODE_SHOW && s.node.is_filter() {
        descend(&mut s, Node::BusinessList);
        return shown(s, env);
    }
    if s.node == Node::TextInput {
        return text_search(s, input, &page, env);
    }

    let Some(choice) = input.parse::<u32>().ok().and_then(|n| page.choice(n)).cloned() else {
        return with_notice(s, &page, env.strings.get("error.invalid"));
    };
    match (s.node, choice) {
        (Node::Welcome, Choice::Menu(n)) => {
            let (path, node) = match n {
                1 => (Some(EntryPath::Category), Node::SectorList),
                2 => (Some(EntryPath::Location), Node::DistrictList),
                3 => (Some(EntryPath::Text), Node::TextTypeMenu),
                _ => (None, Node::Help),
            };
            s.entry_path = path;
            descend(&mut s, node);
        }
        (Node::TextTypeMenu, Choice::Menu(n)) => {
            s.text_kind = TextKind::ALL.get(n as usize - 1).copied();
            descend(&mut s, Node::TextInput);
        }
        (node, Choice::Facet(label)) => {
            let dim = node.facet().expect("facet choices only on filter nodes");
            s.filters.set(dim, &label).expect("option labels are valid facet values");
            descend(&mut s, node);
            advance(&mut s, env.catalog);
        }
        (Node::KeywordSelect, Choice::Keyword(id)) => {
            let kw = env.catalog.keywords().get(id).expect("candidate ids come from the index");
            s.keyword = Some(KeywordRef::new(kw.kind, kw.text.clone()));
            s.candidates = None;
            descend(&mut s, Node::KeywordSelect);
            advance(&mut s, env.catalog);
        }
        (Node::BusinessList, Choice::Business(id)) => {
            s.selected_business = Some(id);
            let next = if env.disclaimer_seen { Node::BusinessDetail } else { Node::Disclaimer };
            descend(&mut s, next);
        }
        _ => return with_notice(s, &page, env.strings.get("error.invalid")),
    }
    shown(s, env)
}

fn shown(s: SessionState, env: &StepEnv<'_>) -> StepOutcome {
    let screen = render(&s, env);
    let showed_disclaimer = s.node == Node::Disclaimer;
    StepOutcome { state: s, screen, showed_disclaimer }
}

fn with_notice(s: SessionState, page: &RenderedPage, notice: &str) -> StepOutcome {
    let rest = match page.body.split_once('\n') {
        Some((_, rest)) if page.titled => rest,
        _ => &page.body,
    };
    let screen = Screen { kind: page.kind, body: format!("{notice}\n{rest}") };
    let showed_disclaimer = s.node == Node::Disclaimer;
    StepOutcome { state: s, screen, showed_disclaimer }
}

/// Leaves the current node for `next`, remembering where we were. When
/// `next` is the current node, only the frame is pushed (the caller decides
/// where to go).
fn descend(s: &mut SessionState, next: Node) {
    s.stack.push(Frame { node: s.node, page: s.page });
    s.node = next;
    s.page = 0;
}

/// Moves to the next facet screen of the entry path, or to the business list
/// when few enough businesses remain or no facet is left.
fn advance(s: &mut SessionState, catalog: &Catalog) {
    let path = s.entry_path.unwrap_or(EntryPath::Category);
    loop {
        let next = path
            .facets()
            .iter()
            .copied()
            .find(|d| !s.filters.is_set(*d) && d.parent().is_none_or(|p| s.filters.is_set(p)));
        let remaining = catalog.count(&s.filters, s.keyword.as_ref());
        match next {
            Some(dim) if remaining > JUMP_THRESHOLD => {
                if path == EntryPath::Text {
                    // a one-entry list would only cost the user a screen
                    let options = catalog.options(&s.filters, s.keyword.as_ref(), dim);
                    if let [only] = options.as_slice() {
                        s.filters.set(dim, only).expect("option labels are valid facet values");
                        continue;
                    }
                }
                s.node = Node::for_facet(dim);
            }
            _ => s.node = Node::BusinessList,
        }
        return;
    }
}

fn back(s: &mut SessionState, env: &StepEnv<'_>) {
    if s.page > 0 {
        s.page -= 1;
        return;
    }
    let Some(frame) = s.stack.pop() else {
        return;
    };
    s.node = frame.node;
    s.page = frame.page;
    s.selected_business = None;
    match frame.node {
        Node::Welcome => *s = SessionState::new(std::mem::take(&mut s.msisdn), s.last_active),
        Node::TextTypeMenu => {
            s.text_kind = None;
            s.query = None;
        }
        Node::TextInput => {
            s.query = None;
            s.candidates = None;
        }
        Node::KeywordSelect => {
            s.keyword = None;
            s.filters = FilterState::default();
            s.candidates = s.query.as_deref().map(|q| candidates_for(q, s.text_kind, env.catalog));
        }
        node => {
            if let Some(dim) = node.facet() {
                s.filters.clear(dim);
            }
        }
    }
}

fn candidates_for(query: &str, kind: Option<TextKind>, catalog: &Catalog) -> Vec<KeywordId> {
    let kinds = kind.map_or(&KeywordKind::ALL[..], TextKind::keyword_kinds);
    catalog
        .fuzzy_candidates(query, DEFAULT_CANDIDATES, kinds)
        .map(|c| c.into_iter().map(|c| c.id).collect())
        .unwrap_or_default()
}

fn normalize_query(input: &str) -> String {
    let mut q = normalize_text(input);
    if q.len() > MAX_QUERY_BYTES {
        let mut cut = MAX_QUERY_BYTES;
        while !q.is_char_boundary(cut) {
            cut -= 1;
        }
        q.truncate(cut);
        q.truncate(q.trim_end().len());
    }
    q
}

fn text_search(mut s: SessionState, input: &str, page: &RenderedPage, env: &StepEnv<'_>) -> StepOutcome {
    let query = normalize_query(input);
    if query.is_empty() {
        return with_notice(s, page, env.strings.get("error.invalid"));
    }
    let candidates = candidates_for(&query, s.text_kind, env.catalog);
    if candidates.is_empty() {
        return with_notice(s, page, env.strings.get("notice.no_matches"));
    }
    descend(&mut s, Node::KeywordSelect);
    s.query = Some(query);
    s.candidates = Some(candidates);
    shown(s, env)
}

/// Characters kept free at the top of untitled continue screens so that an
/// error or notice line can be prefixed without breaking the limit.
fn reserve(strings: &Strings) -> usize {
    let error = char_len(strings.get("error.invalid"));
    let notice = char_len(strings.get("notice.no_matches"));
    error.max(notice) + 1
}

fn nav_footer(strings: &Strings, more: bool, show: bool, back: bool) -> Vec<String> {
    let mut lines = Vec::new();
    if more {
        lines.push(format!("{CODE_NEXT}. {}", strings.get("nav.more")));
    }
    if show {
        lines.push(format!("{CODE_SHOW}. {}", strings.get("nav.show")));
    }
    if back {
        lines.push(format!("{CODE_BACK}. {}", strings.get("nav.back")));
    }
    lines
}

fn numbered(labels: &[String]) -> Vec<String> {
    labels.iter().enumerate().map(|(i, l)| format!("{}. {}", ordinal(i), truncate_label(l, LABEL_WIDTH))).collect()
}

fn list(
    strings: &Strings,
    title: &str,
    labels: &[String],
    choices: impl Fn(usize) -> Choice,
    footer: impl Fn(bool) -> Vec<String>,
    page: u32,
) -> RenderedPage {
    let title = truncate_label(title, TITLE_WIDTH);
    let slot = char_len(strings.get("error.invalid"));
    let laid = layout::list_page(&title, slot, &numbered(labels), footer, SCREEN_LIMIT, page);
    RenderedPage {
        kind: ScreenKind::Continue,
        body: laid.lines.join("\n"),
        choices: laid.range.map(|i| (ordinal(i), choices(i))).collect(),
        has_next: laid.has_next,
        titled: true,
    }
}

fn text(body: &str, footer: impl Fn(bool) -> Vec<String>, budget: usize, page: u32) -> RenderedPage {
    let laid = layout::text_page(body, footer, budget, page);
    RenderedPage {
        kind: ScreenKind::Continue,
        body: laid.lines.join("\n"),
        choices: Vec::new(),
        has_next: laid.has_next,
        titled: false,
    }
}

/// Renders the page the state points at.
pub fn build_page(s: &SessionState, catalog: &Catalog, strings: &Strings) -> RenderedPage {
    let budget = SCREEN_LIMIT - reserve(strings);
    let back = !s.stack.is_empty();
    match s.node {
        Node::Welcome | Node::TextTypeMenu => {
            let (title, keys): (&str, [&str; 4]) = if s.node == Node::Welcome {
                ("welcome.title", ["welcome.category", "welcome.location", "welcome.text", "welcome.help"])
            } else {
                ("title.text_menu", ["text_menu.name", "text_menu.location", "text_menu.products", "text_menu.owner"])
            };
            let labels: Vec<String> = keys.iter().map(|k| strings.get(k).to_string()).collect();
            let footer = |more| nav_footer(strings, more, false, back);
            list(strings, strings.get(title), &labels, |i| Choice::Menu(i as u8 + 1), footer, s.page)
        }
        Node::SectorList | Node::SubsectorList | Node::DistrictList | Node::VillageList | Node::SubvillageList => {
            let dim = s.node.facet().expect("filter node");
            let labels = catalog.options(&s.filters, s.keyword.as_ref(), dim);
            let title = strings.get(&format!("title.{}", dim.name()));
            let footer = |more| nav_footer(strings, more, true, true);
            list(strings, title, &labels, |i| Choice::Facet(labels[i].clone()), footer, s.page)
        }
        Node::KeywordSelect => {
            let index = catalog.keywords();
            let ids: Vec<KeywordId> =
                s.candidates.iter().flatten().copied().filter(|id| index.get(*id).is_some()).collect();
            let keywords: Vec<_> = ids.iter().map(|id| index.get(*id).expect("filtered")).collect();
            let labels: Vec<String> = keywords
                .iter()
                .map(|kw| {
                    let clash = keywords.iter().filter(|o| o.label.to_lowercase() == kw.label.to_lowercase()).count();
                    if clash > 1 {
                        format!("{} ({})", kw.label, strings.get(&format!("kind.{}", kw.kind.name())))
                    } else {
                        kw.label.clone()
                    }
                })
                .collect();
            let footer = |more| nav_footer(strings, more, false, true);
            list(strings, strings.get("title.keywords"), &labels, |i| Choice::Keyword(ids[i]), footer, s.page)
        }
        Node::BusinessList => {
            let rs = catalog.select(&s.filters, s.keyword.as_ref());
            let directory = catalog.directory();
            let labels: Vec<String> =
                rs.ids.iter().map(|id| directory.get(*id).expect("result ids exist").name.clone()).collect();
            let title = strings.fill("title.businesses", &[("count", &rs.total.to_string())]);
            let footer = |more| nav_footer(strings, more, false, true);
            list(strings, &title, &labels, |i| Choice::Business(rs.ids[i]), footer, s.page)
        }
        Node::TextInput => {
            let kind = s.text_kind.unwrap_or(TextKind::Name);
            let mut lines = vec![strings.get(&format!("prompt.{}", kind.key())).to_string()];
            lines.extend(nav_footer(strings, false, false, true));
            RenderedPage {
                kind: ScreenKind::Continue,
                body: layout::fit_lines(lines, &[1], budget).join("\n"),
                choices: Vec::new(),
                has_next: false,
                titled: false,
            }
        }
        Node::Help => text(strings.get("help.body"), |more| nav_footer(strings, more, false, true), budget, s.page),
        Node::Disclaimer => {
            let footer = |_| {
                vec![
                    format!("{CODE_BACK}. {}", strings.get("nav.back")),
                    format!("{CODE_NEXT}. {}", strings.get("nav.continue")),
                ]
            };
            text(strings.get("disclaimer.body"), footer, budget, s.page)
        }
        Node::BusinessDetail => {
            let lines = match s.selected_business.and_then(|id| catalog.directory().get(id)) {
                Some(b) => vec![
                    b.name.clone(),
                    format!("{}: {}", b.sector.label(), b.subsector),
                    b.owner_name.clone(),
                    format!("{}/{}/{}", b.district, b.village, b.subvillage),
                    b.phone.clone(),
                ],
                None => vec![strings.get("notice.gone").to_string()],
            };
            let keep = if lines.len() == 5 { vec![4] } else { Vec::new() };
            RenderedPage {
                kind: ScreenKind::End,
                body: layout::fit_lines(lines, &keep, SCREEN_LIMIT).join("\n"),
                choices: Vec::new(),
                has_next: false,
                titled: false,
            }
        }
    }
}

#[cfg(test)]
mod tests;
