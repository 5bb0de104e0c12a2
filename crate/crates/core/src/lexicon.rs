//! The canonical research-activity vocabulary.
//!
//! Twenty-five verbs, each belonging to one of three role clusters. The
//! inflection table maps surface forms ("designed", "wrote", "carried") back
//! to their canonical activity; anything outside the vocabulary is reported
//! as unmatched rather than guessed.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ACTIVITY_COUNT: usize = 25;

/// One of the 25 canonical research activities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activity {
    Conceive,
    Design,
    Lead,
    Supervise,
    Coordinate,
    Interpret,
    Write,
    Help,
    Assist,
    Prepare,
    Develop,
    Collect,
    Generate,
    Purify,
    Carry,
    Do,
    Perform,
    Conduct,
    Analyze,
    Participate,
    Provide,
    Contribute,
    Comment,
    Discuss,
    Edit,
}

pub const ALL_ACTIVITIES: [Activity; ACTIVITY_COUNT] = [
    Activity::Conceive,
    Activity::Design,
    Activity::Lead,
    Activity::Supervise,
    Activity::Coordinate,
    Activity::Interpret,
    Activity::Write,
    Activity::Help,
    Activity::Assist,
    Activity::Prepare,
    Activity::Develop,
    Activity::Collect,
    Activity::Generate,
    Activity::Purify,
    Activity::Carry,
    Activity::Do,
    Activity::Perform,
    Activity::Conduct,
    Activity::Analyze,
    Activity::Participate,
    Activity::Provide,
    Activity::Contribute,
    Activity::Comment,
    Activity::Discuss,
    Activity::Edit,
];

impl Activity {
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Activity> {
        ALL_ACTIVITIES.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Activity::Conceive => "conceive",
            Activity::Design => "design",
            Activity::Lead => "lead",
            Activity::Supervise => "supervise",
            Activity::Coordinate => "coordinate",
            Activity::Interpret => "interpret",
            Activity::Write => "write",
            Activity::Help => "help",
            Activity::Assist => "assist",
            Activity::Prepare => "prepare",
            Activity::Develop => "develop",
            Activity::Collect => "collect",
            Activity::Generate => "generate",
            Activity::Purify => "purify",
            Activity::Carry => "carry",
            Activity::Do => "do",
            Activity::Perform => "perform",
            Activity::Conduct => "conduct",
            Activity::Analyze => "analyze",
            Activity::Participate => "participate",
            Activity::Provide => "provide",
            Activity::Contribute => "contribute",
            Activity::Comment => "comment",
            Activity::Discuss => "discuss",
            Activity::Edit => "edit",
        }
    }

    pub fn from_name(name: &str) -> Option<Activity> {
        ALL_ACTIVITIES.iter().copied().find(|a| a.name() == name)
    }

    /// The role cluster this activity belongs to in the reference partition.
    pub fn reference_cluster(self) -> RoleCluster {
        use Activity::*;
        match self {
            Conceive | Design | Lead | Supervise | Coordinate | Interpret | Write => {
                RoleCluster::Lead
            }
            Help | Assist | Prepare | Develop | Collect | Generate | Purify | Carry | Do
            | Perform | Conduct | Analyze => RoleCluster::DirectSupport,
            Participate | Provide | Contribute | Comment | Discuss | Edit => {
                RoleCluster::IndirectSupport
            }
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three role clusters of the activity network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleCluster {
    Lead,
    DirectSupport,
    IndirectSupport,
}

impl RoleCluster {
    pub fn name(self) -> &'static str {
        match self {
            RoleCluster::Lead => "lead",
            RoleCluster::DirectSupport => "direct",
            RoleCluster::IndirectSupport => "indirect",
        }
    }

    pub fn from_name(s: &str) -> Option<RoleCluster> {
        match s {
            "lead" => Some(RoleCluster::Lead),
            "direct" => Some(RoleCluster::DirectSupport),
            "indirect" => Some(RoleCluster::IndirectSupport),
            _ => None,
        }
    }
}

/// Compact set of activities, one bit per canonical verb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ActivitySet(pub u32);

impl ActivitySet {
    pub fn empty() -> Self {
        ActivitySet(0)
    }

    #[inline]
    pub fn insert(&mut self, a: Activity) {
        self.0 |= 1 << a.index();
    }

    #[inline]
    pub fn contains(self, a: Activity) -> bool {
        self.0 & (1 << a.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Activity> {
        ALL_ACTIVITIES
            .into_iter()
            .filter(move |a| self.contains(*a))
    }

    pub fn union(self, other: ActivitySet) -> ActivitySet {
        ActivitySet(self.0 | other.0)
    }
}

impl FromIterator<Activity> for ActivitySet {
    fn from_iter<T: IntoIterator<Item = Activity>>(iter: T) -> Self {
        let mut s = ActivitySet::empty();
        for a in iter {
            s.insert(a);
        }
        s
    }
}

/// Verb lexicon: inflection table plus a cluster label per activity.
///
/// The shipped default covers the 25 canonical verbs and their common
/// inflections; custom lexicons are loaded from a tab-separated file with
/// lines `activity<TAB>form1,form2,...<TAB>cluster`.
#[derive(Debug, Clone)]
pub struct ActivityLexicon {
    forms: HashMap<String, Activity>,
    clusters: [RoleCluster; ACTIVITY_COUNT],
}

const DEFAULT_LEXICON: &str = include_str!("../assets/lexicon.tsv");

impl Default for ActivityLexicon {
    fn default() -> Self {
        ActivityLexicon::parse(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }
}

impl ActivityLexicon {
    pub fn parse(text: &str) -> Result<Self> {
        let mut forms: HashMap<String, Activity> = HashMap::new();
        let mut clusters = [None; ACTIVITY_COUNT];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (name, infl, cluster) = match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), Some(c)) => (a.trim(), b.trim(), c.trim()),
                _ => {
                    return Err(Error::Data(format!(
                        "lexicon line {}: expected 3 tab-separated columns",
                        lineno + 1
                    )))
                }
            };
            let activity = Activity::from_name(name).ok_or_else(|| {
                Error::Data(format!(
                    "lexicon line {}: `{}` is not a canonical activity",
                    lineno + 1,
                    name
                ))
            })?;
            let cluster = RoleCluster::from_name(cluster).ok_or_else(|| {
                Error::Data(format!(
                    "lexicon line {}: unknown cluster `{}`",
                    lineno + 1,
                    cluster
                ))
            })?;
            clusters[activity.index()] = Some(cluster);
            forms.insert(name.to_string(), activity);
            for f in infl.split(',') {
                let f = f.trim().to_lowercase();
                if !f.is_empty() {
                    forms.insert(f, activity);
                }
            }
        }
        let mut out = [RoleCluster::Lead; ACTIVITY_COUNT];
        for (i, c) in clusters.iter().enumerate() {
            out[i] = c.ok_or_else(|| {
                Error::Data(format!(
                    "lexicon is missing activity `{}`",
                    ALL_ACTIVITIES[i].name()
                ))
            })?;
        }
        Ok(ActivityLexicon {
            forms,
            clusters: out,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        ActivityLexicon::parse(&text)
    }

    pub fn cluster(&self, a: Activity) -> RoleCluster {
        self.clusters[a.index()]
    }

    /// Canonicalize a surface verb form; `None` means the verb is outside
    /// the 25-activity vocabulary.
    pub fn canonicalize(&self, surface: &str) -> Option<Activity> {
        let lower = surface.to_lowercase();
        if let Some(&a) = self.forms.get(&lower) {
            return Some(a);
        }
        for stem in strip_inflections(&lower) {
            if let Some(&a) = self.forms.get(stem.as_str()) {
                return Some(a);
            }
        }
        None
    }
}

/// Candidate stems for a surface form, for verbs missing from the table.
/// Handles -s/-es/-ed/-d/-ing with e-restoration and consonant un-doubling.
fn strip_inflections(lower: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut push = |s: String| {
        if s.len() >= 2 && !out.contains(&s) {
            out.push(s);
        }
    };
    if let Some(stem) = lower.strip_suffix("ing") {
        push(stem.to_string());
        push(format!("{stem}e"));
        push(undouble(stem));
    }
    if let Some(stem) = lower.strip_suffix("ied") {
        push(format!("{stem}y"));
    }
    if let Some(stem) = lower.strip_suffix("ies") {
        push(format!("{stem}y"));
    }
    if let Some(stem) = lower.strip_suffix("ed") {
        push(stem.to_string());
        push(undouble(stem));
    }
    if let Some(stem) = lower.strip_suffix("es") {
        push(stem.to_string());
    }
    if let Some(stem) = lower.strip_suffix('d') {
        push(stem.to_string());
    }
    if let Some(stem) = lower.strip_suffix('s') {
        push(stem.to_string());
    }
    out
}

fn undouble(stem: &str) -> String {
    let bytes = stem.as_bytes();
    let n = bytes.len();
    if n >= 2 && bytes[n - 1] == bytes[n - 2] && bytes[n - 1].is_ascii_alphabetic() {
        stem[..n - 1].to_string()
    } else {
        stem.to_string()
    }
}
