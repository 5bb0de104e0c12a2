//! Corpus ingestion: line-delimited paper records into an indexed,
//! immutable in-memory corpus.
//!
//! Input is one JSON object per line with fields
//! `id, year, venue, authors[], corresponding[], refs[], topics[], statement?`.
//! Malformed records are counted and skipped, never fatal; duplicate ids are
//! resolved last-record-wins. Referenced papers absent from the corpus stay
//! interned so the citation graph can keep them as dangling sink nodes.

use std::io::BufRead;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ids::{AuthorIdx, Interner, KeywordIdx, PaperIdx};

/// Raw wire format of one input line.
#[derive(Debug, Deserialize)]
struct RawRecord {
    id: String,
    year: i32,
    venue: String,
    authors: Vec<String>,
    #[serde(default)]
    corresponding: Vec<String>,
    #[serde(default)]
    refs: Vec<String>,
    #[serde(default)]
    topics: Vec<String>,
    #[serde(default)]
    statement: Option<String>,
}

/// One publication with interned cross-references.
#[derive(Debug, Clone)]
pub struct Paper {
    pub year: i32,
    pub venue: String,
    pub byline: Vec<AuthorIdx>,
    /// Aligned with `byline`: true if that author is corresponding.
    pub corresponding: Vec<bool>,
    pub refs: Vec<PaperIdx>,
    pub topics: Vec<KeywordIdx>,
    pub statement: Option<String>,
}

impl Paper {
    pub fn team_size(&self) -> usize {
        self.byline.len()
    }

    pub fn is_corresponding(&self, author: AuthorIdx) -> bool {
        self.byline
            .iter()
            .zip(&self.corresponding)
            .any(|(a, c)| *a == author && *c)
    }
}

/// Counters accumulated during ingestion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct IngestStats {
    pub records_read: u64,
    pub malformed_skipped: u64,
    pub duplicates_replaced: u64,
    pub self_refs_dropped: u64,
    pub duplicate_refs_dropped: u64,
}

/// Accepted calendar-year window for records.
#[derive(Debug, Clone, Copy)]
pub struct IngestConfig {
    pub min_year: i32,
    pub max_year: i32,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            min_year: 1900,
            max_year: 2100,
        }
    }
}

/// Immutable, indexed corpus. Paper slots cover every id ever seen; a `None`
/// slot is a paper known only as a reference target.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub(crate) paper_ids: Interner,
    pub(crate) author_ids: Interner,
    pub(crate) keyword_ids: Interner,
    pub(crate) papers: Vec<Option<Paper>>,
    pub stats: IngestStats,
}

impl Corpus {
    pub fn ingest_paths(paths: &[impl AsRef<Path>], config: IngestConfig) -> Result<Corpus> {
        let mut corpus = Corpus::default();
        for p in paths {
            let path = p.as_ref();
            let file = std::fs::File::open(path)
                .map_err(|e| Error::io(path.display().to_string(), e))?;
            corpus.ingest_reader(std::io::BufReader::new(file), config, &path.display().to_string())?;
        }
        Ok(corpus)
    }

    pub fn ingest_reader<R: BufRead>(
        &mut self,
        reader: R,
        config: IngestConfig,
        source: &str,
    ) -> Result<()> {
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source.to_string(), e))?;
            if line.trim().is_empty() {
                continue;
            }
            self.stats.records_read += 1;
            match serde_json::from_str::<RawRecord>(&line) {
                Ok(rec) => {
                    if let Err(reason) = self.insert_record(rec, config) {
                        self.stats.malformed_skipped += 1;
                        log::warn!("{source}:{}: record skipped: {reason}", lineno + 1);
                    }
                }
                Err(e) => {
                    self.stats.malformed_skipped += 1;
                    log::warn!("{source}:{}: unparseable record: {e}", lineno + 1);
                }
            }
        }
        Ok(())
    }

    fn insert_record(&mut self, rec: RawRecord, config: IngestConfig) -> std::result::Result<(), String> {
        if rec.authors.is_empty() {
            return Err("empty byline".into());
        }
        if rec.year < config.min_year || rec.year > config.max_year {
            return Err(format!(
                "year {} outside configured range [{}, {}]",
                rec.year, config.min_year, config.max_year
            ));
        }
        {
            let mut seen = std::collections::HashSet::new();
            for a in &rec.authors {
                if !seen.insert(a.as_str()) {
                    return Err(format!("duplicate byline author `{a}`"));
                }
            }
            for c in &rec.corresponding {
                if !seen.contains(c.as_str()) {
                    return Err(format!("corresponding author `{c}` not in byline"));
                }
            }
        }

        let pid = PaperIdx(self.paper_ids.intern(&rec.id));
        if self.papers.len() <= pid.usize() {
            self.papers.resize(pid.usize() + 1, None);
        }

        let byline: Vec<AuthorIdx> = rec
            .authors
            .iter()
            .map(|a| AuthorIdx(self.author_ids.intern(a)))
            .collect();
        let corresponding: Vec<bool> = rec
            .authors
            .iter()
            .map(|a| rec.corresponding.iter().any(|c| c == a))
            .collect();

        let mut refs: Vec<PaperIdx> = Vec::with_capacity(rec.refs.len());
        for r in &rec.refs {
            if *r == rec.id {
                self.stats.self_refs_dropped += 1;
                log::warn!("paper `{}`: self-reference dropped", rec.id);
                continue;
            }
            let ridx = PaperIdx(self.paper_ids.intern(r));
            if refs.contains(&ridx) {
                self.stats.duplicate_refs_dropped += 1;
                continue;
            }
            refs.push(ridx);
        }
        if self.papers.len() < self.paper_ids.len() {
            self.papers.resize(self.paper_ids.len(), None);
        }

        let mut topics: Vec<KeywordIdx> = Vec::with_capacity(rec.topics.len());
        for t in &rec.topics {
            let kidx = KeywordIdx(self.keyword_ids.intern(t));
            if !topics.contains(&kidx) {
                topics.push(kidx);
            }
        }

        let paper = Paper {
            year: rec.year,
            venue: rec.venue,
            byline,
            corresponding,
            refs,
            topics,
            statement: rec.statement,
        };
        if self.papers[pid.usize()].replace(paper).is_some() {
            self.stats.duplicates_replaced += 1;
        }
        Ok(())
    }

    /// Number of papers with an ingested record (sinks excluded).
    pub fn n_papers(&self) -> usize {
        self.papers.iter().filter(|p| p.is_some()).count()
    }

    /// Total id slots, including reference-only sinks.
    pub fn n_slots(&self) -> usize {
        self.papers.len()
    }

    pub fn paper(&self, idx: PaperIdx) -> Option<&Paper> {
        self.papers.get(idx.usize()).and_then(|p| p.as_ref())
    }

    pub fn papers(&self) -> impl Iterator<Item = (PaperIdx, &Paper)> {
        self.papers
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.as_ref().map(|p| (PaperIdx(i as u32), p)))
    }

    pub fn paper_idx(&self, id: &str) -> Option<PaperIdx> {
        self.paper_ids.get(id).map(PaperIdx)
    }

    pub fn paper_id(&self, idx: PaperIdx) -> &str {
        self.paper_ids.resolve(idx.0)
    }

    pub fn author_idx(&self, name: &str) -> Option<AuthorIdx> {
        self.author_ids.get(name).map(AuthorIdx)
    }

    pub fn author_name(&self, idx: AuthorIdx) -> &str {
        self.author_ids.resolve(idx.0)
    }

    pub fn n_authors(&self) -> usize {
        self.author_ids.len()
    }

    pub fn keyword(&self, idx: KeywordIdx) -> &str {
        self.keyword_ids.resolve(idx.0)
    }

    pub fn keyword_idx(&self, kw: &str) -> Option<KeywordIdx> {
        self.keyword_ids.get(kw).map(KeywordIdx)
    }

    pub fn n_keywords(&self) -> usize {
        self.keyword_ids.len()
    }

    /// Latest publication year of any ingested paper (the corpus horizon).
    pub fn horizon(&self) -> Option<i32> {
        self.papers().map(|(_, p)| p.year).max()
    }

    pub fn summarize(&self) -> CorpusStats {
        let n = self.n_papers();
        if n == 0 {
            return CorpusStats {
                papers: 0,
                mean_team_size: None,
                mean_topics: None,
                mean_references: None,
                mean_citations: None,
            };
        }
        let mut team = 0usize;
        let mut topics = 0usize;
        let mut refs = 0usize;
        let mut cites = 0usize;
        for (_, p) in self.papers() {
            team += p.byline.len();
            topics += p.topics.len();
            refs += p.refs.len();
            // citations received by in-corpus papers from in-corpus papers
            cites += p
                .refs
                .iter()
                .filter(|r| self.papers[r.usize()].is_some())
                .count();
        }
        let nf = n as f64;
        CorpusStats {
            papers: n,
            mean_team_size: Some(team as f64 / nf),
            mean_topics: Some(topics as f64 / nf),
            mean_references: Some(refs as f64 / nf),
            mean_citations: Some(cites as f64 / nf),
        }
    }
}

/// Corpus-level summary; means are `None` on an empty corpus.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CorpusStats {
    pub papers: usize,
    pub mean_team_size: Option<f64>,
    pub mean_topics: Option<f64>,
    pub mean_references: Option<f64>,
    pub mean_citations: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn corpus_from_lines(lines: &[&str]) -> Corpus {
        let mut c = Corpus::default();
        let joined = lines.join("\n");
        c.ingest_reader(joined.as_bytes(), IngestConfig::default(), "test")
            .unwrap();
        c
    }

    #[test]
    fn three_valid_one_malformed() {
        let c = corpus_from_lines(&[
            r#"{"id":"A","year":2001,"venue":"J","authors":["Ann Xu","Bob Yi"],"corresponding":["Ann Xu"],"refs":[],"topics":[]}"#,
            r#"{"id":"B","year":2002,"venue":"J","authors":["Ann Xu"],"refs":["A"],"topics":["t1"]}"#,
            r#"{"id":"C","year":2003,"venue":"J","authors":["Cy Zed"],"refs":[],"topics":[]}"#,
            r#"{"id":"D","year":2004,"venue":"J"}"#,
        ]);
        assert_eq!(c.n_papers(), 3);
        assert_eq!(c.stats.malformed_skipped, 1);
        assert_eq!(c.stats.records_read, 4);
    }

    #[test]
    fn duplicate_id_last_record_wins() {
        let c = corpus_from_lines(&[
            r#"{"id":"A","year":2001,"venue":"Old","authors":["Ann Xu"]}"#,
            r#"{"id":"A","year":2002,"venue":"New","authors":["Bob Yi"]}"#,
        ]);
        assert_eq!(c.n_papers(), 1);
        assert_eq!(c.stats.duplicates_replaced, 1);
        let p = c.paper(c.paper_idx("A").unwrap()).unwrap();
        assert_eq!(p.venue, "New");
        assert_eq!(p.year, 2002);
    }

    #[test]
    fn empty_stream_empty_corpus() {
        let c = corpus_from_lines(&[]);
        assert_eq!(c.n_papers(), 0);
        assert_eq!(c.stats, IngestStats::default());
        let s = c.summarize();
        assert_eq!(s.papers, 0);
        assert_eq!(s.mean_team_size, None);
        assert_eq!(s.mean_citations, None);
    }

    #[test]
    fn self_reference_dropped_with_warning() {
        let c = corpus_from_lines(&[
            r#"{"id":"A","year":2001,"venue":"J","authors":["Ann Xu"],"refs":["A","B"]}"#,
        ]);
        let p = c.paper(c.paper_idx("A").unwrap()).unwrap();
        assert_eq!(p.refs.len(), 1);
        assert_eq!(c.stats.self_refs_dropped, 1);
    }

    #[test]
    fn mean_team_size_over_two_papers() {
        let c = corpus_from_lines(&[
            r#"{"id":"A","year":2001,"venue":"J","authors":["A1 X","A2 X"]}"#,
            r#"{"id":"B","year":2001,"venue":"J","authors":["B1 X","B2 X","B3 X","B4 X","B5 X","B6 X"]}"#,
        ]);
        assert_eq!(c.summarize().mean_team_size, Some(4.0));
    }

    #[test]
    fn single_paper_three_references() {
        let c = corpus_from_lines(&[
            r#"{"id":"A","year":2001,"venue":"J","authors":["Ann Xu"],"refs":["R1","R2","R3"]}"#,
        ]);
        assert_eq!(c.summarize().mean_references, Some(3.0));
    }

    #[test]
    fn year_out_of_range_rejected() {
        let c = corpus_from_lines(&[
            r#"{"id":"A","year":1492,"venue":"J","authors":["Ann Xu"]}"#,
        ]);
        assert_eq!(c.n_papers(), 0);
        assert_eq!(c.stats.malformed_skipped, 1);
    }

    #[test]
    fn corresponding_outside_byline_rejected() {
        let c = corpus_from_lines(&[
            r#"{"id":"A","year":2001,"venue":"J","authors":["Ann Xu"],"corresponding":["Bob Yi"]}"#,
        ]);
        assert_eq!(c.n_papers(), 0);
    }

    #[test]
    fn ingest_is_idempotent() {
        let lines = [
            r#"{"id":"A","year":2001,"venue":"J","authors":["Ann Xu","Bob Yi"],"refs":["B"],"topics":["t"]}"#,
            r#"{"id":"B","year":2000,"venue":"J","authors":["Cy Zed"]}"#,
        ];
        let c1 = corpus_from_lines(&lines);
        let c2 = corpus_from_lines(&[lines[0], lines[1], lines[0], lines[1]]);
        assert_eq!(c1.n_papers(), c2.n_papers());
        assert_eq!(c1.summarize(), c2.summarize());
    }
}
