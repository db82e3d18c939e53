//! Test-only oracles and generators. Nothing here calls into the code paths
//! it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use proptest::prelude::*;
use quick_xml::events::Event;
use quick_xml::Reader;
use rand::Rng;
use socialmanet::dsl::{LanguageCode, ResourceDecl, SmModel, Span, SubjectDecl, TextValue};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn confinfo_source() -> String {
    std::fs::read_to_string(fixture("confinfo/confinfo.sm")).unwrap()
}

/// The twelve categories under `participant`, grouped as in the event
/// description, with their parents.
pub const CONFINFO_EDGES: [(&str, Option<&str>); 13] = [
    ("participant", None),
    ("speaker", Some("participant")),
    ("plenary_speaker", Some("speaker")),
    ("session_speaker", Some("speaker")),
    ("talker", Some("speaker")),
    ("organizer", Some("participant")),
    ("secretariat", Some("organizer")),
    ("protocol", Some("organizer")),
    ("logistics", Some("organizer")),
    ("chair", Some("participant")),
    ("plenary_chair", Some("chair")),
    ("session_chair", Some("chair")),
    ("guest", Some("participant")),
];

// ---------------------------------------------------------------------------
// Random forests

/// Builds a forest from a parent table: `parents[i]` is `None` for a root or
/// the index of an earlier node. Codes are `s<i>`.
pub fn forest_from_parents(parents: &[Option<usize>], texts: &[(TextValue, TextValue)]) -> Vec<SubjectDecl> {
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); parents.len()];
    let mut roots = Vec::new();
    for (i, p) in parents.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(i),
            None => roots.push(i),
        }
    }
    fn build(i: usize, children: &[Vec<usize>], texts: &[(TextValue, TextValue)]) -> SubjectDecl {
        let (name, desc) = texts[i].clone();
        SubjectDecl {
            code: format!("s{i}"),
            name,
            description: desc,
            sons: children[i].iter().map(|c| build(*c, children, texts)).collect(),
            span: Span::default(),
        }
    }
    roots.into_iter().map(|r| build(r, &children, texts)).collect()
}

/// Parent table with at most `max_depth` levels (roots at level 0).
pub fn random_parents<R: Rng>(rng: &mut R, n: usize, max_depth: usize) -> Vec<Option<usize>> {
    let mut parents = Vec::with_capacity(n);
    let mut depth: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        let candidates: Vec<usize> = (0..i).filter(|j| depth[*j] + 1 < max_depth).collect();
        if i == 0 || candidates.is_empty() || rng.gen_bool(0.15) {
            parents.push(None);
            depth.push(0);
        } else {
            let p = candidates[rng.gen_range(0..candidates.len())];
            parents.push(Some(p));
            depth.push(depth[p] + 1);
        }
    }
    parents
}

pub fn plain_texts(n: usize) -> Vec<(TextValue, TextValue)> {
    (0..n)
        .map(|i| (TextValue::literal(format!("Name {i}")), TextValue::key(format!("d{i}"))))
        .collect()
}

fn text_strategy() -> impl Strategy<Value = TextValue> {
    prop_oneof![
        "[ -~é]{0,12}".prop_map(TextValue::literal),
        "[a-z_][a-z0-9_ .]{0,10}".prop_map(TextValue::key),
    ]
}

/// Parent table built from per-node choices, clamped to `max_depth` levels.
fn parents_from_choices(choices: &[(bool, usize)], max_depth: usize) -> Vec<Option<usize>> {
    let mut parents = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    for (i, (is_root, pick)) in choices.iter().enumerate() {
        let candidates: Vec<usize> = (0..i).filter(|j| depth[*j] + 1 < max_depth).collect();
        if i == 0 || *is_root || candidates.is_empty() {
            parents.push(None);
            depth.push(0);
        } else {
            let p = candidates[pick % candidates.len()];
            parents.push(Some(p));
            depth.push(depth[p] + 1);
        }
    }
    parents
}

/// Valid models: 1..=30 subjects, depth ≤ 5, one or two resources.
pub fn model_strategy() -> impl Strategy<Value = SmModel> {
    let subjects = prop::collection::vec(
        ((prop::bool::weighted(0.2), any::<usize>()), text_strategy(), text_strategy()),
        1..=30,
    );
    let resources = prop::sample::subsequence(vec!["en", "fr"], 1..=2);
    (
        "[A-Za-z][A-Za-z0-9_]{0,10}",
        "[ -~]{0,10}",
        resources,
        "[a-z_./]{1,12}",
        subjects,
    )
        .prop_filter("app name must not be a keyword", |(app, ..)| {
            socialmanet::dsl::Keyword::from_word(app).is_none()
        })
        .prop_map(|(app_name, folder, langs, file_stem, subjects)| {
            let choices: Vec<(bool, usize)> = subjects.iter().map(|s| s.0).collect();
            let texts: Vec<(TextValue, TextValue)> =
                subjects.into_iter().map(|(_, n, d)| (n, d)).collect();
            let parents = parents_from_choices(&choices, 5);
            SmModel {
                app_name,
                app_name_span: Span::default(),
                resources_folder: folder,
                resources_folder_span: Span::default(),
                resources: langs
                    .into_iter()
                    .map(|l| ResourceDecl {
                        language: LanguageCode::new(l),
                        filename: format!("{file_stem}_{l}.props"),
                        span: Span::default(),
                    })
                    .collect(),
                hierarchy: forest_from_parents(&parents, &texts),
            }
        })
}

// ---------------------------------------------------------------------------
// Brute-force hierarchy oracles over the declaration tree

fn find<'a>(forest: &'a [SubjectDecl], code: &str) -> Option<&'a SubjectDecl> {
    for s in forest {
        if s.code == code {
            return Some(s);
        }
        if let Some(hit) = find(&s.sons, code) {
            return Some(hit);
        }
    }
    None
}

fn collect(s: &SubjectDecl, out: &mut BTreeSet<String>) {
    out.insert(s.code.clone());
    for c in &s.sons {
        collect(c, out);
    }
}

/// Codes in the subtree rooted at `code`, by recursive descent.
pub fn brute_subtree(forest: &[SubjectDecl], code: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    if let Some(s) = find(forest, code) {
        collect(s, &mut out);
    }
    out
}

pub fn all_codes(forest: &[SubjectDecl]) -> Vec<String> {
    fn walk(s: &[SubjectDecl], out: &mut Vec<String>) {
        for x in s {
            out.push(x.code.clone());
            walk(&x.sons, out);
        }
    }
    let mut out = Vec::new();
    walk(forest, &mut out);
    out
}

/// Ancestor-chain covering by brute force.
pub fn brute_covers(forest: &[SubjectDecl], a: &str, b: &str) -> bool {
    brute_subtree(forest, a).contains(b) || brute_subtree(forest, b).contains(a)
}

// ---------------------------------------------------------------------------
// Graph oracles

/// BFS hop counts from `source` over the unit-disk graph of `points`.
pub fn bfs_hops(points: &[(f64, f64)], range: f64, source: usize) -> Vec<Option<u64>> {
    let adjacent = |i: usize, j: usize| {
        let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
        (dx * dx + dy * dy).sqrt() <= range
    };
    let mut hops = vec![None; points.len()];
    hops[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(i) = queue.pop_front() {
        for j in 0..points.len() {
            if j != i && hops[j].is_none() && adjacent(i, j) {
                hops[j] = Some(hops[i].unwrap() + 1);
                queue.push_back(j);
            }
        }
    }
    hops
}

// ---------------------------------------------------------------------------
// Subject XML reader (quick-xml based, independent of the emitter)

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlSubject {
    pub code: String,
    pub name: String,
    pub desc: String,
    pub children: Vec<XmlSubject>,
}

impl XmlSubject {
    pub fn codes(forest: &[XmlSubject]) -> Vec<String> {
        let mut out = Vec::new();
        for s in forest {
            out.push(s.code.clone());
            out.extend(Self::codes(&s.children));
        }
        out
    }

    /// `(code, parent code)` pairs in document order.
    pub fn edges(forest: &[XmlSubject]) -> Vec<(String, Option<String>)> {
        fn walk(s: &[XmlSubject], parent: Option<&str>, out: &mut Vec<(String, Option<String>)>) {
            for x in s {
                out.push((x.code.clone(), parent.map(str::to_string)));
                walk(&x.children, Some(&x.code), out);
            }
        }
        let mut out = Vec::new();
        walk(forest, None, &mut out);
        out
    }
}

pub fn read_subjects_xml(text: &str) -> Vec<XmlSubject> {
    let mut reader = Reader::from_str(text);
    let mut stack: Vec<XmlSubject> = Vec::new();
    let mut roots = Vec::new();
    let mut saw_root = false;

    let attrs = |e: &quick_xml::events::BytesStart| {
        let mut map = BTreeMap::new();
        for a in e.attributes() {
            let a = a.unwrap();
            let key = String::from_utf8(a.key.as_ref().to_vec()).unwrap();
            let value = a.unescape_value().unwrap().into_owned();
            map.insert(key, value);
        }
        XmlSubject {
            code: map.remove("code").expect("code attribute"),
            name: map.remove("name").expect("name attribute"),
            desc: map.remove("desc").expect("desc attribute"),
            children: Vec::new(),
        }
    };
    let mut attach = |s: XmlSubject, stack: &mut Vec<XmlSubject>| match stack.last_mut() {
        Some(parent) => parent.children.push(s),
        None => roots.push(s),
    };

    loop {
        match reader.read_event().unwrap() {
            Event::Start(e) if e.name().as_ref() == b"subjects" => saw_root = true,
            Event::Start(e) if e.name().as_ref() == b"subject" => stack.push(attrs(&e)),
            Event::Empty(e) if e.name().as_ref() == b"subject" => {
                let s = attrs(&e);
                attach(s, &mut stack);
            }
            Event::End(e) if e.name().as_ref() == b"subject" => {
                let s = stack.pop().unwrap();
                attach(s, &mut stack);
            }
            Event::End(e) if e.name().as_ref() == b"subjects" => {}
            Event::Eof => break,
            other => panic!("unexpected XML event {other:?}"),
        }
    }
    assert!(saw_root, "missing <subjects> root");
    assert!(stack.is_empty(), "unbalanced subjects");
    roots
}

// ---------------------------------------------------------------------------
// Scenario builders

use socialmanet::simnet::{Area, MobilitySpec, NodeConfig, Point, ScenarioConfig, ScheduledPublication};

/// Points of a connected unit-disk graph: each new point lands within
/// `range` of a random earlier one, inside `area`.
pub fn connected_points<R: Rng>(rng: &mut R, n: usize, area: (f64, f64), range: f64) -> Vec<(f64, f64)> {
    let mut pts = vec![(rng.gen_range(0.0..area.0), rng.gen_range(0.0..area.1))];
    while pts.len() < n {
        let anchor = pts[rng.gen_range(0..pts.len())];
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = rng.gen_range(0.0..range * 0.95);
        let p = (anchor.0 + r * angle.cos(), anchor.1 + r * angle.sin());
        if (0.0..=area.0).contains(&p.0) && (0.0..=area.1).contains(&p.1) {
            pts.push(p);
        }
    }
    pts
}

/// Static scenario where every node subscribes to `topic` and node 0
/// publishes on it at step 0.
pub fn flooding_scenario(points: &[(f64, f64)], area: (f64, f64), range: f64, topic: &str) -> ScenarioConfig {
    ScenarioConfig {
        seed: 0,
        steps: points.len() as u64 + 1,
        area: Area {
            width: area.0,
            height: area.1,
        },
        radio_range: range,
        hierarchy: PathBuf::from("unused.sm"),
        nodes: points
            .iter()
            .enumerate()
            .map(|(i, p)| NodeConfig {
                id: i as u32,
                altruistic: false,
                subscriptions: vec![topic.to_string()],
                position: Some(Point::new(p.0, p.1)),
                mobility: MobilitySpec::Static,
            })
            .collect(),
        publications: vec![ScheduledPublication {
            step: 0,
            node: 0,
            topic: topic.to_string(),
            payload: "hello".into(),
        }],
    }
}
