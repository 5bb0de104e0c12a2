//! Deterministic rule-based extraction of (author set, verb) tuples from
//! contribution statements.
//!
//! The grammar is intentionally rigid: sentences split on `.` `;` `:`,
//! clauses additionally split on `and` when the left side is already a
//! complete clause and the right side opens with an author mention. Within a
//! clause the leading run of mentions is the subject and the first
//! connector-joined run of words after it is the predicate. No statistics,
//! no backtracking; identical input always yields identical tuples.

use std::collections::BTreeSet;

use crate::corpus::Corpus;
use crate::error::Result;
use crate::ids::{AuthorIdx, PaperIdx};
use crate::lexicon::{ActivityLexicon, ActivitySet};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    /// Dotted initials run such as "L.W." or "J.-P.B."
    Initials(String),
    Word(String),
    Comma,
    Break,
    Other,
}

fn tokenize(text: &str) -> Vec<Tok> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            '.' | ';' | ':' | '!' | '?' => {
                out.push(Tok::Break);
                i += 1;
            }
            _ if c.is_ascii_uppercase() => {
                if let Some((tok, next)) = scan_initials(&chars, i) {
                    out.push(Tok::Initials(tok));
                    i = next;
                } else {
                    let (w, next) = scan_word(&chars, i);
                    out.push(Tok::Word(w));
                    i = next;
                }
            }
            _ if c.is_alphabetic() => {
                let (w, next) = scan_word(&chars, i);
                out.push(Tok::Word(w));
                i = next;
            }
            _ => {
                out.push(Tok::Other);
                i += 1;
            }
        }
    }
    out
}

/// `X.Y.` style run: at least two single uppercase letters each followed by
/// a dot, with optional hyphens between groups. Consumes the trailing dot.
fn scan_initials(chars: &[char], start: usize) -> Option<(String, usize)> {
    let mut i = start;
    let mut letters = 0;
    loop {
        if i + 1 < chars.len() && chars[i].is_ascii_uppercase() && chars[i + 1] == '.' {
            letters += 1;
            i += 2;
            if i + 2 < chars.len()
                && chars[i] == '-'
                && chars[i + 1].is_ascii_uppercase()
                && chars[i + 2] == '.'
            {
                i += 1;
            }
            continue;
        }
        break;
    }
    if letters >= 2 {
        Some((chars[start..i].iter().collect(), i))
    } else {
        None
    }
}

fn scan_word(chars: &[char], start: usize) -> (String, usize) {
    let mut i = start;
    while i < chars.len()
        && (chars[i].is_alphabetic()
            || chars[i] == '\''
            || (chars[i] == '-' && i + 1 < chars.len() && chars[i + 1].is_alphabetic()))
    {
        i += 1;
    }
    (chars[start..i].iter().collect(), i)
}

fn is_and_word(t: &Tok) -> bool {
    matches!(t, Tok::Word(w) if w.eq_ignore_ascii_case("and") || w == "&")
}

fn is_connector(t: &Tok) -> bool {
    matches!(t, Tok::Comma) || is_and_word(t)
}

/// Collective-subject phrases ("All authors", "Both authors"), matched as
/// case-insensitive word sequences. Extensible via config.
#[derive(Debug, Clone)]
pub struct PhraseTable {
    phrases: Vec<Vec<String>>,
}

impl Default for PhraseTable {
    fn default() -> Self {
        PhraseTable::new(&[
            "all authors",
            "all the authors",
            "both authors",
            "the authors",
        ])
    }
}

impl PhraseTable {
    pub fn new(phrases: &[impl AsRef<str>]) -> Self {
        let mut p: Vec<Vec<String>> = phrases
            .iter()
            .map(|s| {
                s.as_ref()
                    .split_whitespace()
                    .map(|w| w.to_lowercase())
                    .collect()
            })
            .filter(|v: &Vec<String>| !v.is_empty())
            .collect();
        // longest first so "all the authors" wins over "the authors"
        p.sort_by_key(|v| std::cmp::Reverse(v.len()));
        PhraseTable { phrases: p }
    }

    /// Number of tokens matched by a phrase starting at `i`, if any.
    fn match_at(&self, toks: &[Tok], i: usize) -> Option<usize> {
        'phrase: for phrase in &self.phrases {
            for (k, word) in phrase.iter().enumerate() {
                match toks.get(i + k) {
                    Some(Tok::Word(w)) if w.to_lowercase() == *word => {}
                    _ => continue 'phrase,
                }
            }
            return Some(phrase.len());
        }
        None
    }
}

/// Resolved author mentions for one statement.
#[derive(Debug, Clone, Default)]
pub struct MentionMap {
    /// initials key ("LW") → matching byline authors, sorted
    by_key: std::collections::HashMap<String, Vec<AuthorIdx>>,
    byline: Vec<AuthorIdx>,
    /// surface → resolved authors, for every mention observed in the text
    pub entries: std::collections::BTreeMap<String, Vec<AuthorIdx>>,
    /// observed initials tokens matching no byline author
    pub unmatched: Vec<String>,
    /// observed initials tokens matching more than one byline author
    pub ambiguous: Vec<String>,
}

fn normalize_initials(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphabetic())
        .map(|c| c.to_ascii_uppercase())
        .collect()
}

/// Candidate initials keys for a full author name. "Lingfei Wu" → {"LW"};
/// "James A. Evans" → {"JAE", "JE"}; hyphenated given names contribute each
/// sub-initial.
fn initial_keys(name: &str) -> Vec<String> {
    let parts: Vec<&str> = name.split_whitespace().collect();
    if parts.is_empty() {
        return Vec::new();
    }
    let mut keys = Vec::new();
    let mut push = |k: String| {
        if !k.is_empty() && !keys.contains(&k) {
            keys.push(k);
        }
    };
    let initial = |p: &str| -> String {
        p.chars()
            .find(|c| c.is_alphabetic())
            .map(|c| c.to_ascii_uppercase().to_string())
            .unwrap_or_default()
    };
    push(parts.iter().map(|p| initial(p)).collect());
    if parts.len() >= 3 {
        push(format!(
            "{}{}",
            initial(parts[0]),
            initial(parts[parts.len() - 1])
        ));
    }
    // expand hyphenated parts: "Jean-Pierre Both" → "JPB"
    let expanded: String = parts
        .iter()
        .flat_map(|p| p.split('-'))
        .map(initial)
        .collect();
    push(expanded);
    keys
}

/// Map the initials-style tokens and collective phrases of a statement onto
/// byline authors. Ambiguous initials resolve to every matching author.
pub fn resolve_author_mentions(
    statement: &str,
    byline: &[(AuthorIdx, &str)],
    phrases: &PhraseTable,
) -> MentionMap {
    let mut map = MentionMap {
        byline: byline.iter().map(|(a, _)| *a).collect(),
        ..MentionMap::default()
    };
    for (author, name) in byline {
        for key in initial_keys(name) {
            let entry = map.by_key.entry(key).or_default();
            if !entry.contains(author) {
                entry.push(*author);
            }
        }
    }
    for list in map.by_key.values_mut() {
        list.sort_unstable();
    }

    let toks = tokenize(statement);
    let mut i = 0;
    while i < toks.len() {
        if let Some(len) = phrases.match_at(&toks, i) {
            let surface: Vec<String> = toks[i..i + len]
                .iter()
                .map(|t| match t {
                    Tok::Word(w) => w.clone(),
                    _ => unreachable!("phrases are word sequences"),
                })
                .collect();
            map.entries
                .insert(surface.join(" "), map.byline.clone());
            i += len;
            continue;
        }
        if let Tok::Initials(raw) = &toks[i] {
            let key = normalize_initials(raw);
            let authors = map.by_key.get(&key).cloned().unwrap_or_default();
            if authors.is_empty() {
                if !map.unmatched.contains(raw) {
                    map.unmatched.push(raw.clone());
                }
            } else if authors.len() > 1 && !map.ambiguous.contains(raw) {
                map.ambiguous.push(raw.clone());
            }
            map.entries.insert(raw.clone(), authors);
        }
        i += 1;
    }
    map
}

impl MentionMap {
    fn lookup(&self, raw: &str) -> Vec<AuthorIdx> {
        self.by_key
            .get(&normalize_initials(raw))
            .cloned()
            .unwrap_or_default()
    }
}

/// One parsed clause: the subject author set and its surface predicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub authors: Vec<AuthorIdx>,
    pub verbs: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedStatement {
    pub clauses: Vec<Clause>,
    pub unattributed_clauses: u32,
}

/// Split a statement into (author set, surface verb) clauses.
pub fn parse_statement(
    text: &str,
    mentions: &MentionMap,
    phrases: &PhraseTable,
) -> ParsedStatement {
    let mut parsed = ParsedStatement::default();
    let toks = tokenize(text);
    for sentence in toks.split(|t| matches!(t, Tok::Break)) {
        if sentence.is_empty() {
            continue;
        }
        for range in split_on_and(sentence, mentions, phrases) {
            let clause = &sentence[range];
            if clause.is_empty() {
                continue;
            }
            let (authors, subj_end) = scan_subject(clause, mentions, phrases);
            let verbs = scan_predicate(&clause[subj_end..]);
            if authors.is_empty() {
                parsed.unattributed_clauses += 1;
                continue;
            }
            if !verbs.is_empty() {
                parsed.clauses.push(Clause { authors, verbs });
            }
        }
    }
    parsed
}

/// Clause boundaries at `and`: only when the left part already has a subject
/// and a predicate and the right part opens with a mention.
fn split_on_and(
    sentence: &[Tok],
    mentions: &MentionMap,
    phrases: &PhraseTable,
) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 0..sentence.len() {
        if !is_and_word(&sentence[i]) {
            continue;
        }
        let partial = &sentence[start..i];
        if has_complete_clause(partial, mentions, phrases)
            && next_is_mention(sentence, i + 1, mentions, phrases)
        {
            ranges.push(start..i);
            start = i + 1;
        }
    }
    ranges.push(start..sentence.len());
    ranges
}

fn has_complete_clause(partial: &[Tok], mentions: &MentionMap, phrases: &PhraseTable) -> bool {
    let (authors, subj_end) = scan_subject(partial, mentions, phrases);
    if authors.is_empty() {
        return false;
    }
    partial[subj_end..]
        .iter()
        .any(|t| matches!(t, Tok::Word(_)) && !is_and_word(t))
}

fn next_is_mention(
    toks: &[Tok],
    mut i: usize,
    mentions: &MentionMap,
    phrases: &PhraseTable,
) -> bool {
    while i < toks.len() && is_connector(&toks[i]) {
        i += 1;
    }
    match toks.get(i) {
        Some(Tok::Initials(raw)) => !mentions.lookup(raw).is_empty(),
        Some(Tok::Word(_)) => phrases.match_at(toks, i).is_some(),
        _ => false,
    }
}

/// Leading run of mentions joined by connectors. Returns the resolved author
/// set (sorted, deduplicated) and the index just past the subject.
fn scan_subject(
    clause: &[Tok],
    mentions: &MentionMap,
    phrases: &PhraseTable,
) -> (Vec<AuthorIdx>, usize) {
    let mut authors: BTreeSet<AuthorIdx> = BTreeSet::new();
    let mut any_mention = false;
    let mut i = 0;
    while i < clause.len() {
        if let Some(len) = phrases.match_at(clause, i) {
            authors.extend(mentions.byline.iter().copied());
            any_mention = true;
            i += len;
            continue;
        }
        match &clause[i] {
            Tok::Initials(raw) => {
                authors.extend(mentions.lookup(raw));
                any_mention = true;
                i += 1;
            }
            t if is_connector(t) && any_mention && next_is_any_mention(clause, i + 1, phrases) => {
                i += 1;
            }
            _ => break,
        }
    }
    (authors.into_iter().collect(), i)
}

fn next_is_any_mention(toks: &[Tok], mut i: usize, phrases: &PhraseTable) -> bool {
    while i < toks.len() && is_connector(&toks[i]) {
        i += 1;
    }
    match toks.get(i) {
        Some(Tok::Initials(_)) => true,
        Some(Tok::Word(_)) => phrases.match_at(toks, i).is_some(),
        _ => false,
    }
}

/// First connector-joined run of words after the subject.
fn scan_predicate(toks: &[Tok]) -> Vec<String> {
    let mut verbs = Vec::new();
    match toks.first() {
        Some(Tok::Word(w)) if !is_and_word(&toks[0]) => verbs.push(w.clone()),
        _ => return verbs,
    }
    let mut i = 1;
    loop {
        let mut j = i;
        let mut saw_connector = false;
        while j < toks.len() && is_connector(&toks[j]) {
            saw_connector = true;
            j += 1;
        }
        if !saw_connector {
            break;
        }
        match toks.get(j) {
            Some(Tok::Word(w)) => {
                verbs.push(w.clone());
                i = j + 1;
            }
            _ => break,
        }
    }
    verbs
}

/// Per-(paper, author) activity profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityProfile {
    pub paper: PaperIdx,
    pub author: AuthorIdx,
    pub activities: ActivitySet,
    pub unmatched_verbs: Vec<String>,
}

/// Per-paper parse accounting.
#[derive(Debug, Clone, Copy)]
pub struct PaperParse {
    pub paper: PaperIdx,
    pub verb_tokens: u32,
    pub matched_tokens: u32,
    pub unique_activities: u32,
}

impl PaperParse {
    pub fn match_fraction(&self) -> Option<f64> {
        (self.verb_tokens > 0).then(|| self.matched_tokens as f64 / self.verb_tokens as f64)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CoverageReport {
    pub papers_with_statements: usize,
    pub verb_tokens: u64,
    pub matched_verb_tokens: u64,
    pub unattributed_clauses: u64,
    pub ambiguous_mentions: u64,
    pub unmatched_mentions: u64,
    pub papers: Vec<PaperParse>,
}

impl CoverageReport {
    /// Fraction of parsed verb tokens matched by the lexicon.
    pub fn coverage(&self) -> Option<f64> {
        (self.verb_tokens > 0).then(|| self.matched_verb_tokens as f64 / self.verb_tokens as f64)
    }

    /// Mean count of distinct activities per statement-bearing paper.
    pub fn mean_unique_activities(&self) -> Option<f64> {
        (!self.papers.is_empty()).then(|| {
            self.papers
                .iter()
                .map(|p| p.unique_activities as f64)
                .sum::<f64>()
                / self.papers.len() as f64
        })
    }
}

struct PaperExtraction {
    profiles: Vec<ActivityProfile>,
    parse: PaperParse,
    unattributed: u32,
    ambiguous: u32,
    unmatched: u32,
}

fn extract_one(
    corpus: &Corpus,
    lexicon: &ActivityLexicon,
    phrases: &PhraseTable,
    paper: PaperIdx,
    statement: &str,
) -> PaperExtraction {
    let record = corpus.paper(paper).expect("paper exists");
    let byline: Vec<(AuthorIdx, &str)> = record
        .byline
        .iter()
        .map(|&a| (a, corpus.author_name(a)))
        .collect();
    let mentions = resolve_author_mentions(statement, &byline, phrases);
    let parsed = parse_statement(statement, &mentions, phrases);

    let mut activities: Vec<ActivitySet> = vec![ActivitySet::empty(); record.byline.len()];
    let mut unmatched: Vec<Vec<String>> = vec![Vec::new(); record.byline.len()];
    let mut verb_tokens = 0u32;
    let mut matched_tokens = 0u32;
    let mut paper_set = ActivitySet::empty();

    for clause in &parsed.clauses {
        for verb in &clause.verbs {
            verb_tokens += 1;
            match lexicon.canonicalize(verb) {
                Some(act) => {
                    matched_tokens += 1;
                    paper_set.insert(act);
                    for a in &clause.authors {
                        if let Some(pos) = record.byline.iter().position(|b| b == a) {
                            activities[pos].insert(act);
                        }
                    }
                }
                None => {
                    for a in &clause.authors {
                        if let Some(pos) = record.byline.iter().position(|b| b == a) {
                            unmatched[pos].push(verb.clone());
                        }
                    }
                }
            }
        }
    }

    let profiles = record
        .byline
        .iter()
        .enumerate()
        .map(|(i, &author)| ActivityProfile {
            paper,
            author,
            activities: activities[i],
            unmatched_verbs: std::mem::take(&mut unmatched[i]),
        })
        .collect();
    PaperExtraction {
        profiles,
        parse: PaperParse {
            paper,
            verb_tokens,
            matched_tokens,
            unique_activities: paper_set.len() as u32,
        },
        unattributed: parsed.unattributed_clauses,
        ambiguous: mentions.ambiguous.len() as u32,
        unmatched: mentions.unmatched.len() as u32,
    }
}

fn assemble(
    extractions: Vec<PaperExtraction>,
    papers_with_statements: usize,
) -> (Vec<ActivityProfile>, CoverageReport) {
    let mut report = CoverageReport {
        papers_with_statements,
        ..CoverageReport::default()
    };
    let mut profiles = Vec::new();
    for ex in extractions {
        report.verb_tokens += ex.parse.verb_tokens as u64;
        report.matched_verb_tokens += ex.parse.matched_tokens as u64;
        report.unattributed_clauses += ex.unattributed as u64;
        report.ambiguous_mentions += ex.ambiguous as u64;
        report.unmatched_mentions += ex.unmatched as u64;
        report.papers.push(ex.parse);
        profiles.extend(ex.profiles);
    }
    (profiles, report)
}

fn statement_papers(corpus: &Corpus) -> Vec<(PaperIdx, &str)> {
    corpus
        .papers()
        .filter_map(|(idx, p)| p.statement.as_deref().map(|s| (idx, s)))
        .collect()
}

/// Parse every statement-bearing paper into per-author activity profiles.
/// Parallel over papers when the `parallel` feature is enabled.
pub fn extract_profiles(
    corpus: &Corpus,
    lexicon: &ActivityLexicon,
    phrases: &PhraseTable,
) -> Result<(Vec<ActivityProfile>, CoverageReport)> {
    let work = statement_papers(corpus);
    let n = work.len();
    #[cfg(feature = "parallel")]
    let extractions: Vec<PaperExtraction> = work
        .into_par_iter()
        .map(|(idx, s)| extract_one(corpus, lexicon, phrases, idx, s))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let extractions: Vec<PaperExtraction> = work
        .into_iter()
        .map(|(idx, s)| extract_one(corpus, lexicon, phrases, idx, s))
        .collect();
    Ok(assemble(extractions, n))
}

/// Sequential twin of [`extract_profiles`]; same output on any input.
pub fn extract_profiles_seq(
    corpus: &Corpus,
    lexicon: &ActivityLexicon,
    phrases: &PhraseTable,
) -> Result<(Vec<ActivityProfile>, CoverageReport)> {
    let work = statement_papers(corpus);
    let n = work.len();
    let extractions: Vec<PaperExtraction> = work
        .into_iter()
        .map(|(idx, s)| extract_one(corpus, lexicon, phrases, idx, s))
        .collect();
    Ok(assemble(extractions, n))
}
