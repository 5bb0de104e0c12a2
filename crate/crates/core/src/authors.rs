//! Per-author career histories with strictly-prior semantics.
//!
//! Every query for year `y` covers history up to the end of year `y - 1`;
//! the focal year's own papers never leak into "prior" quantities. The
//! index is flat sorted arrays, so queries are binary searches.

use crate::citation::CitationGraph;
use crate::corpus::Corpus;
use crate::ids::{AuthorIdx, KeywordIdx, PaperIdx};

#[derive(Debug, Clone, Default)]
pub(crate) struct AuthorHistory {
    /// (year, paper), sorted by year then paper
    pub papers: Vec<(i32, PaperIdx)>,
    /// (keyword, first year the author published on it), sorted by keyword
    pub topics_first: Vec<(KeywordIdx, i32)>,
    /// (paper, first year the author cited or authored it), sorted by paper
    pub refs_first: Vec<(PaperIdx, i32)>,
    /// for each citation received: max(own paper year, citer year), sorted
    pub cite_years: Vec<i32>,
}

#[derive(Debug, Clone, Default)]
pub struct AuthorIndex {
    pub(crate) histories: Vec<AuthorHistory>,
}

impl AuthorIndex {
    pub fn build(corpus: &Corpus, graph: &CitationGraph) -> AuthorIndex {
        let n = corpus.n_authors();
        let mut histories: Vec<AuthorHistory> = vec![AuthorHistory::default(); n];

        for (pid, paper) in corpus.papers() {
            for &a in &paper.byline {
                let h = &mut histories[a.usize()];
                h.papers.push((paper.year, pid));
                for &t in &paper.topics {
                    upsert_min(&mut h.topics_first, t, paper.year);
                }
                // authored and cited papers both enter the prior-reference set
                upsert_min(&mut h.refs_first, pid, paper.year);
                for &r in &paper.refs {
                    upsert_min(&mut h.refs_first, r, paper.year);
                }
                for &citer in graph.citers(pid) {
                    if let Some(cy) = graph.year(citer) {
                        h.cite_years.push(paper.year.max(cy));
                    }
                }
            }
        }
        for h in histories.iter_mut() {
            h.papers.sort_unstable_by_key(|&(y, p)| (y, p.0));
            h.topics_first.sort_unstable_by_key(|&(k, _)| k.0);
            h.refs_first.sort_unstable_by_key(|&(p, _)| p.0);
            h.cite_years.sort_unstable();
        }
        AuthorIndex { histories }
    }

    fn history(&self, a: AuthorIdx) -> &AuthorHistory {
        &self.histories[a.usize()]
    }

    /// Papers published strictly before year `y`.
    pub fn prior_papers(&self, a: AuthorIdx, y: i32) -> usize {
        self.history(a)
            .papers
            .partition_point(|&(py, _)| py < y)
    }

    /// Years since the author's first publication strictly before `y`;
    /// 0 for a debut author.
    pub fn career_age(&self, a: AuthorIdx, y: i32) -> i32 {
        match self.history(a).papers.first() {
            Some(&(first, _)) if first < y => y - first,
            _ => 0,
        }
    }

    /// Distinct keywords published on strictly before `y`.
    pub fn prior_topic_count(&self, a: AuthorIdx, y: i32) -> usize {
        self.history(a)
            .topics_first
            .iter()
            .filter(|&&(_, fy)| fy < y)
            .count()
    }

    pub fn has_prior_topic(&self, a: AuthorIdx, kw: KeywordIdx, y: i32) -> bool {
        let h = self.history(a);
        match h.topics_first.binary_search_by_key(&kw.0, |&(k, _)| k.0) {
            Ok(i) => h.topics_first[i].1 < y,
            Err(_) => false,
        }
    }

    /// Whether the author had cited or authored `p` strictly before `y`.
    pub fn has_prior_reference(&self, a: AuthorIdx, p: PaperIdx, y: i32) -> bool {
        let h = self.history(a);
        match h.refs_first.binary_search_by_key(&p.0, |&(q, _)| q.0) {
            Ok(i) => h.refs_first[i].1 < y,
            Err(_) => false,
        }
    }

    /// Citations received strictly before `y` by papers published strictly
    /// before `y`.
    pub fn prior_citations(&self, a: AuthorIdx, y: i32) -> usize {
        self.history(a).cite_years.partition_point(|&my| my < y)
    }

    /// Papers published in exactly year `y` (the focal year included).
    pub fn productivity(&self, a: AuthorIdx, y: i32) -> usize {
        let papers = &self.history(a).papers;
        papers.partition_point(|&(py, _)| py <= y) - papers.partition_point(|&(py, _)| py < y)
    }

    pub fn n_authors(&self) -> usize {
        self.histories.len()
    }
}

fn upsert_min<K: PartialEq + Copy>(v: &mut Vec<(K, i32)>, key: K, year: i32) {
    match v.iter_mut().find(|(k, _)| *k == key) {
        Some((_, y)) => {
            if year < *y {
                *y = year;
            }
        }
        None => v.push((key, year)),
    }
}
