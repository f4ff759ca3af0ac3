use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{normalize_token, Preprocessor, RawDocument, SentenceRecord, SourceType};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_PER_SOURCE: usize = 1000;

/// Preprocesses `doc` and splits it at `.`, `!` or `?` followed by whitespace
/// or end of text. Terminal punctuation stays with its sentence. Segments
/// that are empty once whitespace and terminal punctuation are ignored (such
/// as the lone period left by a blank line) are dropped.
pub fn segment_sentences(doc: &RawDocument, preprocessor: &Preprocessor) -> Result<Vec<SentenceRecord>> {
    let text = preprocessor.apply(&doc.text)?;
    let mut records = Vec::new();
    let mut push = |segment: &str| {
        let segment = segment.trim();
        if segment.chars().all(|c| c.is_whitespace() || matches!(c, '.' | '!' | '?')) {
            return;
        }
        records.push(SentenceRecord {
            sentence_id: format!("{}:{:05}", doc.doc_id, records.len()),
            text: segment.to_string(),
            doc_id: doc.doc_id.clone(),
            source_type: doc.source_type,
            year: doc.year,
            token_count: segment.split_whitespace().count(),
        });
    };

    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let boundary = match chars.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if boundary {
                let end = i + c.len_utf8();
                push(&text[start..end]);
                start = end;
            }
        }
    }
    push(&text[start..]);
    Ok(records)
}

/// Append-only sentence table with an inverted index from normalized token
/// to sentence positions. Immutable once ingestion is done.
#[derive(Debug, Default)]
pub struct CorpusStore {
    sentences: Vec<SentenceRecord>,
    doc_ids: HashSet<String>,
    sentence_ids: HashSet<String>,
    index: HashMap<String, Vec<usize>>,
    preprocessor: Preprocessor,
}

impl CorpusStore {
    pub fn new(preprocessor: Preprocessor) -> Self {
        Self {
            preprocessor,
            ..Default::default()
        }
    }

    /// Segments and appends one document. Returns the number of sentences added.
    pub fn ingest(&mut self, doc: &RawDocument) -> Result<usize> {
        if !self.doc_ids.insert(doc.doc_id.clone()) {
            return Err(Error::DuplicateId(doc.doc_id.clone()));
        }
        let records = segment_sentences(doc, &self.preprocessor)?;
        let n = records.len();
        for record in records {
            self.push_record(record)?;
        }
        Ok(n)
    }

    /// Reads documents as JSON lines (`doc_id`, `text`, `source_type`, `year`).
    pub fn ingest_jsonl<R: BufRead>(&mut self, reader: R, origin: &str) -> Result<usize> {
        let mut total = 0;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let doc: RawDocument = serde_json::from_str(&line)
                .map_err(|e| Error::json(format!("{origin} line {}", i + 1), e))?;
            total += self.ingest(&doc)?;
        }
        Ok(total)
    }

    /// Rebuilds a store from a sentence export.
    pub fn from_sentences_jsonl<R: BufRead>(reader: R, origin: &str) -> Result<Self> {
        let mut store = Self::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: SentenceRecord = serde_json::from_str(&line)
                .map_err(|e| Error::json(format!("{origin} line {}", i + 1), e))?;
            if record.token_count != record.text.split_whitespace().count() {
                return Err(Error::Integrity(format!(
                    "{origin} line {}: token_count does not match text",
                    i + 1
                )));
            }
            store.doc_ids.insert(record.doc_id.clone());
            store.push_record(record)?;
        }
        Ok(store)
    }

    pub fn write_sentences_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for record in &self.sentences {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    fn push_record(&mut self, record: SentenceRecord) -> Result<()> {
        if !self.sentence_ids.insert(record.sentence_id.clone()) {
            return Err(Error::DuplicateId(record.sentence_id));
        }
        let pos = self.sentences.len();
        let mut seen = HashSet::new();
        for token in record.tokens() {
            let token = normalize_token(token);
            if !token.is_empty() && seen.insert(token.clone()) {
                self.index.entry(token).or_default().push(pos);
            }
        }
        self.sentences.push(record);
        Ok(())
    }

    pub fn sentences(&self) -> &[SentenceRecord] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn contains_sentence(&self, sentence_id: &str) -> bool {
        self.sentence_ids.contains(sentence_id)
    }

    /// Sentences containing `word` as a standalone token, at most
    /// `max_per_source` per source type. Within a source the lowest sentence
    /// ids win; the result is ordered by sentence id.
    pub fn extract_sentences(&self, word: &str, max_per_source: usize) -> Vec<&SentenceRecord> {
        let key = normalize_token(word);
        let Some(hits) = self.index.get(&key) else {
            return Vec::new();
        };
        let mut by_source: BTreeMap<SourceType, Vec<&SentenceRecord>> = BTreeMap::new();
        for &pos in hits {
            let record = &self.sentences[pos];
            by_source.entry(record.source_type).or_default().push(record);
        }
        let mut selected: Vec<&SentenceRecord> = by_source
            .into_values()
            .flat_map(|mut records| {
                records.sort_by(|a, b| a.sentence_id.cmp(&b.sentence_id));
                records.truncate(max_per_source);
                records
            })
            .collect();
        selected.sort_by(|a, b| a.sentence_id.cmp(&b.sentence_id));
        selected
    }

    /// Why `word` would not be used as a seed word, if it would not.
    pub fn seed_rejection(
        &self,
        word: &str,
        policy: &SeedWordPolicy,
        max_per_source: usize,
    ) -> Option<SeedRejection> {
        if policy.exclude_uppercase_initial && word.chars().next().is_some_and(char::is_uppercase) {
            return Some(SeedRejection::UppercaseInitial);
        }
        let letters = word.chars().count();
        if letters < policy.min_length {
            return Some(SeedRejection::TooShort { letters });
        }
        let sentences = self.extract_sentences(word, max_per_source).len();
        if sentences < policy.min_sentences {
            return Some(SeedRejection::TooFewSentences { sentences });
        }
        None
    }

    /// Candidates that pass every predicate of `policy`, sorted and deduplicated.
    pub fn filter_seed_words<S: AsRef<str>>(
        &self,
        candidates: &[S],
        policy: &SeedWordPolicy,
        max_per_source: usize,
    ) -> Vec<String> {
        candidates
            .iter()
            .map(AsRef::as_ref)
            .filter(|w| self.seed_rejection(w, policy, max_per_source).is_none())
            .map(str::to_string)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn stats(&self) -> CorpusStats {
        let mut stats = CorpusStats::default();
        let mut unique_all = HashSet::new();
        let mut unique_by_source: HashMap<SourceType, HashSet<String>> = HashMap::new();
        for record in &self.sentences {
            let entry = stats.per_source.entry(record.source_type).or_default();
            entry.sentences += 1;
            entry.total_tokens += record.token_count;
            stats.total_tokens += record.token_count;
            let unique = unique_by_source.entry(record.source_type).or_default();
            for token in record.tokens() {
                let token = normalize_token(token);
                if !token.is_empty() {
                    unique.insert(token.clone());
                    unique_all.insert(token);
                }
            }
        }
        for (source, entry) in stats.per_source.iter_mut() {
            entry.unique_tokens = unique_by_source.get(source).map_or(0, HashSet::len);
        }
        stats.total_unique_tokens = unique_all.len();
        stats
    }

    /// SHA-256 over sentence ids and texts in store order, hex encoded.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for record in &self.sentences {
            hasher.update(record.sentence_id.as_bytes());
            hasher.update([0u8]);
            hasher.update(record.text.as_bytes());
            hasher.update([b'\n']);
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedWordPolicy {
    pub min_sentences: usize,
    pub min_length: usize,
    pub exclude_uppercase_initial: bool,
}

impl Default for SeedWordPolicy {
    fn default() -> Self {
        Self {
            min_sentences: 20,
            min_length: 3,
            exclude_uppercase_initial: true,
        }
    }
}

impl SeedWordPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.min_sentences < 1 || self.min_length < 1 {
            return Err(Error::InvalidParam(
                "seed policy min_sentences and min_length must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedRejection {
    UppercaseInitial,
    TooShort { letters: usize },
    TooFewSentences { sentences: usize },
}

impl fmt::Display for SeedRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedRejection::UppercaseInitial => f.write_str("starts with an uppercase letter"),
            SeedRejection::TooShort { letters } => write!(f, "only {letters} letters"),
            SeedRejection::TooFewSentences { sentences } => {
                write!(f, "only {sentences} example sentences")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SourceStats {
    pub sentences: usize,
    pub total_tokens: usize,
    pub unique_tokens: usize,
}

impl SourceStats {
    pub fn mean_sentence_length(&self) -> f64 {
        if self.sentences == 0 {
            0.0
        } else {
            self.total_tokens as f64 / self.sentences as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusStats {
    pub per_source: BTreeMap<SourceType, SourceStats>,
    pub total_tokens: usize,
    pub total_unique_tokens: usize,
}

impl fmt::Display for CorpusStats {
    /// Table layout: one row per source with total tokens and the mean
    /// sentence length rounded to an integer, then corpus totals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22} {:>14} {:>20}", "Source Type", "Total Tokens", "Mean Sentence Length")?;
        for (source, s) in &self.per_source {
            writeln!(
                f,
                "{:<22} {:>14} {:>20}",
                source.label(),
                s.total_tokens,
                s.mean_sentence_length().round() as u64
            )?;
        }
        writeln!(f, "{:<22} {:>35}", "Total Tokens", self.total_tokens)?;
        write!(f, "{:<22} {:>35}", "Total Unique Tokens", self.total_unique_tokens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str, source: SourceType) -> RawDocument {
        RawDocument {
            doc_id: id.into(),
            text: text.into(),
            source_type: source,
            year: Some(2020),
        }
    }

    #[test]
    fn one_sentence_document() {
        let records =
            segment_sentences(&doc("d", "Kumain ako.", SourceType::Books), &Preprocessor::default())
                .unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].token_count, 2);
        assert_eq!(records[0].year, Some(2020));
        assert_eq!(records[0].source_type, SourceType::Books);
    }

    #[test]
    fn splits_on_terminal_punctuation() {
        let records =
            segment_sentences(&doc("d", "A b. C d! E?", SourceType::News), &Preprocessor::default())
                .unwrap();
        let texts: Vec<_> = records.iter().map(|r| r.text.as_str()).collect();
        assert_eq!(texts, ["A b.", "C d!", "E?"]);
    }

    #[test]
    fn period_inside_token_is_not_a_boundary() {
        let records = segment_sentences(
            &doc("d", "Nagkakahalaga ng 3.5 milyon ito. Oo", SourceType::News),
            &Preprocessor::default(),
        )
        .unwrap();
        assert_eq!(records.len(), 2);
    }

    #[test]
    fn empty_document_yields_nothing() {
        let records =
            segment_sentences(&doc("d", "", SourceType::Other), &Preprocessor::default()).unwrap();
        assert!(records.is_empty());
        let records =
            segment_sentences(&doc("d", "  \n\n  ", SourceType::Other), &Preprocessor::default())
                .unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn symbol_only_document_keeps_special_tokens() {
        let records =
            segment_sentences(&doc("d", "😀 !!! @ana", SourceType::Social), &Preprocessor::default())
                .unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].text, "XX_EMOJI XX_SEQSAMESYMBOLS XX_USERNAME");
        assert_eq!(records[0].token_count, 3);
    }

    #[test]
    fn line_breaks_create_boundaries() {
        let records = segment_sentences(
            &doc("d", "umuulan ngayon\nwala akong payong", SourceType::Forums),
            &Preprocessor::default(),
        )
        .unwrap();
        let texts: Vec<_> = records.iter().map(|r| r.text.as_str()).collect();
        assert_eq!(texts, ["umuulan ngayon.", "wala akong payong"]);
    }

    #[test]
    fn extraction_excludes_substring_hits() {
        let mut store = CorpusStore::default();
        store
            .ingest(&doc("d1", "May aso sa labas. Ang asong itim ay tumakbo.", SourceType::News))
            .unwrap();
        let hits = store.extract_sentences("aso", 1000);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].text, "May aso sa labas.");
    }

    #[test]
    fn extraction_is_case_insensitive_and_strips_punctuation() {
        let mut store = CorpusStore::default();
        store
            .ingest(&doc("d1", "Aso! Ang aso. Walang pusa.", SourceType::Books))
            .unwrap();
        assert_eq!(store.extract_sentences("aso", 1000).len(), 2);
        assert_eq!(store.extract_sentences("ASO", 1000).len(), 2);
        assert!(store.extract_sentences("ibon", 1000).is_empty());
    }

    #[test]
    fn extraction_caps_each_source() {
        let mut store = CorpusStore::default();
        let text = "may aso dito. ".repeat(1500);
        store.ingest(&doc("news", &text, SourceType::News)).unwrap();
        store.ingest(&doc("book", "may aso. may aso.", SourceType::Books)).unwrap();
        let hits = store.extract_sentences("aso", 1000);
        let news = hits.iter().filter(|r| r.source_type == SourceType::News).count();
        assert_eq!(news, 1000);
        assert_eq!(hits.len(), 1002);
        // lowest ids win within a source
        assert!(hits.iter().any(|r| r.sentence_id == "news:00000"));
        assert!(!hits.iter().any(|r| r.sentence_id == "news:01000"));
    }

    #[test]
    fn duplicate_doc_id_rejected() {
        let mut store = CorpusStore::default();
        store.ingest(&doc("d", "a.", SourceType::News)).unwrap();
        assert!(matches!(
            store.ingest(&doc("d", "b.", SourceType::News)),
            Err(Error::DuplicateId(_))
        ));
    }

    fn store_with(word: &str, n: usize) -> CorpusStore {
        let mut store = CorpusStore::default();
        let text = format!("ito ay {word} talaga. ").repeat(n);
        store.ingest(&doc(word, &text, SourceType::Wiki)).unwrap();
        store
    }

    #[test]
    fn seed_policy_thresholds() {
        let policy = SeedWordPolicy::default();
        let store = store_with("bahay", 19);
        assert_eq!(
            store.seed_rejection("bahay", &policy, 1000),
            Some(SeedRejection::TooFewSentences { sentences: 19 })
        );
        let store = store_with("bahay", 20);
        assert_eq!(store.seed_rejection("bahay", &policy, 1000), None);

        let store = store_with("sa", 30);
        assert_eq!(
            store.seed_rejection("sa", &policy, 1000),
            Some(SeedRejection::TooShort { letters: 2 })
        );
        let store = store_with("Maynila", 30);
        assert_eq!(
            store.seed_rejection("Maynila", &policy, 1000),
            Some(SeedRejection::UppercaseInitial)
        );
    }

    #[test]
    fn filter_sorts_and_dedups() {
        let mut store = CorpusStore::default();
        let text = "kain ang bata. ".repeat(25);
        store.ingest(&doc("a", &text, SourceType::Books)).unwrap();
        let kept = store.filter_seed_words(
            &["kain", "bata", "kain", "ang", "Bata", "wala"],
            &SeedWordPolicy::default(),
            1000,
        );
        assert_eq!(kept, ["ang", "bata", "kain"]);
    }

    #[test]
    fn stats_counts_tokens() {
        assert_eq!(CorpusStore::default().stats(), CorpusStats::default());
        let mut store = CorpusStore::default();
        store
            .ingest(&doc("a", "isa dalawa tatlo. apat lima anim pito walo.", SourceType::News))
            .unwrap();
        let stats = store.stats();
        let news = &stats.per_source[&SourceType::News];
        assert_eq!(news.total_tokens, 8);
        assert_eq!(news.mean_sentence_length(), 4.0);
        assert_eq!(stats.total_tokens, 8);
        assert_eq!(stats.total_unique_tokens, 8);
        let table = stats.to_string();
        assert!(table.contains("News Sites"));
        assert!(table.contains("Total Unique Tokens"));
    }

    #[test]
    fn sentence_export_round_trips() {
        let mut store = CorpusStore::default();
        store.ingest(&doc("a", "Isa. Dalawa tatlo!", SourceType::Forums)).unwrap();
        let mut buf = Vec::new();
        store.write_sentences_jsonl(&mut buf).unwrap();
        let reloaded = CorpusStore::from_sentences_jsonl(buf.as_slice(), "mem").unwrap();
        assert_eq!(reloaded.sentences(), store.sentences());
        assert_eq!(reloaded.digest(), store.digest());
        assert_eq!(reloaded.extract_sentences("tatlo", 10).len(), 1);
    }
}
