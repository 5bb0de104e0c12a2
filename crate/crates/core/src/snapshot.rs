//! Versioned binary snapshot of an ingested corpus.
//!
//! The file stores the corpus (interners, paper records, ingest counters);
//! the citation graph and author index are rebuilt deterministically at load
//! time, which keeps the artifact compact. A version mismatch fails loudly.

use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::authors::AuthorIndex;
use crate::binio::{BinReader, BinWriter};
use crate::citation::CitationGraph;
use crate::corpus::{Corpus, IngestStats, Paper};
use crate::error::{Error, Result};
use crate::ids::{AuthorIdx, Interner, KeywordIdx, PaperIdx};

const MAGIC: &[u8; 4] = b"TSCP";
pub const SNAPSHOT_VERSION: u32 = 1;

/// A loaded snapshot: the corpus plus its derived indices.
#[derive(Debug)]
pub struct Snapshot {
    pub corpus: Corpus,
    pub graph: CitationGraph,
    pub authors: AuthorIndex,
}

impl Snapshot {
    pub fn from_corpus(corpus: Corpus) -> Snapshot {
        let graph = CitationGraph::build(&corpus);
        let authors = AuthorIndex::build(&corpus, &graph);
        Snapshot {
            corpus,
            graph,
            authors,
        }
    }

    pub fn load(path: &Path) -> Result<Snapshot> {
        let file =
            std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut r = BinReader::new(BufReader::new(file), "snapshot");
        r.expect_version(MAGIC, SNAPSHOT_VERSION)?;

        let paper_ids = read_interner(&mut r)?;
        let author_ids = read_interner(&mut r)?;
        let keyword_ids = read_interner(&mut r)?;

        let n_slots = r.u32()? as usize;
        let mut papers: Vec<Option<Paper>> = Vec::with_capacity(n_slots);
        for _ in 0..n_slots {
            if r.u8()? == 0 {
                papers.push(None);
                continue;
            }
            let year = r.i32()?;
            let venue = r.str()?;
            let byline: Vec<AuthorIdx> = r.u32_vec()?.into_iter().map(AuthorIdx).collect();
            let mut corresponding = Vec::with_capacity(byline.len());
            for _ in 0..byline.len() {
                corresponding.push(r.u8()? != 0);
            }
            let refs: Vec<PaperIdx> = r.u32_vec()?.into_iter().map(PaperIdx).collect();
            let topics: Vec<KeywordIdx> = r.u32_vec()?.into_iter().map(KeywordIdx).collect();
            let statement = r.opt_str()?;
            papers.push(Some(Paper {
                year,
                venue,
                byline,
                corresponding,
                refs,
                topics,
                statement,
            }));
        }
        let stats = IngestStats {
            records_read: r.u64()?,
            malformed_skipped: r.u64()?,
            duplicates_replaced: r.u64()?,
            self_refs_dropped: r.u64()?,
            duplicate_refs_dropped: r.u64()?,
        };
        let corpus = Corpus {
            paper_ids,
            author_ids,
            keyword_ids,
            papers,
            stats,
        };
        Ok(Snapshot::from_corpus(corpus))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file =
            std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut w = BinWriter::new(BufWriter::new(file), &path.display().to_string());
        w.magic(MAGIC, SNAPSHOT_VERSION)?;

        write_interner(&mut w, &self.corpus.paper_ids)?;
        write_interner(&mut w, &self.corpus.author_ids)?;
        write_interner(&mut w, &self.corpus.keyword_ids)?;

        w.u32(self.corpus.papers.len() as u32)?;
        for slot in &self.corpus.papers {
            match slot {
                None => w.u8(0)?,
                Some(p) => {
                    w.u8(1)?;
                    w.i32(p.year)?;
                    w.str(&p.venue)?;
                    w.u32_slice(&p.byline.iter().map(|a| a.0).collect::<Vec<_>>())?;
                    for &c in &p.corresponding {
                        w.u8(c as u8)?;
                    }
                    w.u32_slice(&p.refs.iter().map(|r| r.0).collect::<Vec<_>>())?;
                    w.u32_slice(&p.topics.iter().map(|t| t.0).collect::<Vec<_>>())?;
                    w.opt_str(p.statement.as_deref())?;
                }
            }
        }
        let s = &self.corpus.stats;
        w.u64(s.records_read)?;
        w.u64(s.malformed_skipped)?;
        w.u64(s.duplicates_replaced)?;
        w.u64(s.self_refs_dropped)?;
        w.u64(s.duplicate_refs_dropped)?;
        Ok(())
    }
}

fn write_interner<W: std::io::Write>(w: &mut BinWriter<W>, it: &Interner) -> Result<()> {
    w.u32(it.len() as u32)?;
    for s in it.as_slice() {
        w.str(s)?;
    }
    Ok(())
}

fn read_interner<R: std::io::Read>(r: &mut BinReader<R>) -> Result<Interner> {
    let n = r.u32()? as usize;
    let mut strings = Vec::with_capacity(n);
    for _ in 0..n {
        strings.push(r.str()?);
    }
    Ok(Interner::from_vec(strings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::IngestConfig;

    #[test]
    fn roundtrip_preserves_corpus() {
        let mut c = Corpus::default();
        let lines = [
            r#"{"id":"A","year":2001,"venue":"J","authors":["Ann Xu","Bob Yi"],"corresponding":["Bob Yi"],"refs":["B","X"],"topics":["t1"],"statement":"A.X. wrote the paper."}"#,
            r#"{"id":"B","year":2000,"venue":"K","authors":["Cy Zed"]}"#,
        ]
        .join("\n");
        c.ingest_reader(lines.as_bytes(), IngestConfig::default(), "test")
            .unwrap();
        let snap = Snapshot::from_corpus(c);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.bin");
        snap.save(&path).unwrap();
        let loaded = Snapshot::load(&path).unwrap();

        assert_eq!(loaded.corpus.n_papers(), 2);
        assert_eq!(loaded.corpus.stats, snap.corpus.stats);
        let a = loaded.corpus.paper_idx("A").unwrap();
        let p = loaded.corpus.paper(a).unwrap();
        assert_eq!(p.venue, "J");
        assert_eq!(p.corresponding, vec![false, true]);
        assert_eq!(p.statement.as_deref(), Some("A.X. wrote the paper."));
        assert_eq!(loaded.corpus.summarize(), snap.corpus.summarize());
        // derived indices line up
        assert_eq!(
            loaded.graph.citers(loaded.corpus.paper_idx("B").unwrap()),
            snap.graph.citers(snap.corpus.paper_idx("B").unwrap())
        );
    }

    #[test]
    fn version_mismatch_fails_loudly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        {
            let file = std::fs::File::create(&path).unwrap();
            let mut w = BinWriter::new(std::io::BufWriter::new(file), "bad.bin");
            w.magic(MAGIC, SNAPSHOT_VERSION + 9).unwrap();
        }
        match Snapshot::load(&path) {
            Err(Error::SnapshotVersion { found, expected }) => {
                assert_eq!(found, SNAPSHOT_VERSION + 9);
                assert_eq!(expected, SNAPSHOT_VERSION);
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn garbage_file_is_corrupt_not_panic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.bin");
        std::fs::write(&path, b"not a snapshot at all").unwrap();
        assert!(matches!(
            Snapshot::load(&path),
            Err(Error::Artifact { .. })
        ));
    }
}
