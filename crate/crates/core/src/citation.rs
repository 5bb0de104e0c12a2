//! Directed paper→reference adjacency with the exact transpose kept
//! alongside, sized over every interned id including dangling sinks.

use crate::corpus::Corpus;
use crate::ids::PaperIdx;

#[derive(Debug, Clone, Default)]
pub struct CitationGraph {
    /// paper → its references
    pub(crate) out_edges: Vec<Vec<PaperIdx>>,
    /// paper → papers citing it (transpose of `out_edges`)
    pub(crate) in_edges: Vec<Vec<PaperIdx>>,
    /// publication year; `None` for reference-only sinks
    pub(crate) year: Vec<Option<i32>>,
    /// edges whose source year precedes the target year
    pub timestamp_anomalies: u64,
}

impl CitationGraph {
    pub fn build(corpus: &Corpus) -> CitationGraph {
        let n = corpus.n_slots();
        let mut out_edges: Vec<Vec<PaperIdx>> = vec![Vec::new(); n];
        let mut in_edges: Vec<Vec<PaperIdx>> = vec![Vec::new(); n];
        let mut year: Vec<Option<i32>> = vec![None; n];
        let mut anomalies = 0u64;

        for (idx, paper) in corpus.papers() {
            year[idx.usize()] = Some(paper.year);
        }
        for (idx, paper) in corpus.papers() {
            out_edges[idx.usize()] = paper.refs.clone();
            for &r in &paper.refs {
                in_edges[r.usize()].push(idx);
                if let Some(ty) = year[r.usize()] {
                    if paper.year < ty {
                        anomalies += 1;
                    }
                }
            }
        }
        for list in in_edges.iter_mut() {
            list.sort_unstable();
        }
        CitationGraph {
            out_edges,
            in_edges,
            year,
            timestamp_anomalies: anomalies,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.year.len()
    }

    pub fn references(&self, p: PaperIdx) -> &[PaperIdx] {
        &self.out_edges[p.usize()]
    }

    pub fn citers(&self, p: PaperIdx) -> &[PaperIdx] {
        &self.in_edges[p.usize()]
    }

    pub fn year(&self, p: PaperIdx) -> Option<i32> {
        self.year[p.usize()]
    }

    pub fn n_edges(&self) -> usize {
        self.out_edges.iter().map(|v| v.len()).sum()
    }
}
