use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use log::{info, warn};
use serde::Serialize;

use senseweave_core::corpus::parse_rule_config;
use senseweave_core::embedding::import_embeddings;
use senseweave_core::synset::{
    compare_synsets, induce_synsets, read_reference, read_synsets, synset_size_report, write_merge_log,
    write_synsets,
};
use senseweave_core::wordnet::{export_wordnet, load_wordnet, wordnet_stats};
use senseweave_core::wsd::{evaluate_sense_validity, read_manifest, sense_match_matrix};
use senseweave_core::wsi::{build_sense_inventory, write_sense_distribution_file};
use senseweave_core::{
    CorpusStore, EmbeddingStore, MockEmbedder, Preprocessor, SenseInventory, Synset, WordNetResource,
};

use crate::config::{read_word_list, require, ConfigError, RunConfig};

pub const SENTENCES: &str = "sentences.jsonl";
pub const CORPUS_STATS: &str = "corpus_stats.json";
pub const EMBEDDINGS: &str = "embeddings.emb";
pub const INVENTORY: &str = "inventory.json";
pub const INVENTORY_EMB: &str = "inventory.emb";
pub const SKIP_REPORT: &str = "skip_report.jsonl";
pub const SENSES_PER_WORD: &str = "senses_per_word.csv";
pub const CLUSTER_COUNTS: &str = "cluster_counts.csv";
pub const SYNSETS: &str = "synsets.json";
pub const MERGE_LOG: &str = "merge_log.jsonl";
pub const SYNSET_SIZES: &str = "synset_sizes.csv";
pub const OVERSIZED: &str = "oversized_synsets.json";
pub const WSD_VALIDITY: &str = "wsd_validity.json";
pub const WSD_HEATMAPS: &str = "wsd_heatmaps";
pub const SYNSET_JACCARD: &str = "synset_jaccard.csv";
pub const SYNSET_MATCHES: &str = "synset_matches.csv";
pub const WORDNET: &str = "wordnet.json";

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn prepare_output(config: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating output directory {}", config.output_dir.display()))
}

fn load_sentences(config: &RunConfig) -> Result<CorpusStore> {
    let path = config.out(SENTENCES);
    require(&path, "sentence store (run ingest first)")?;
    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
    Ok(CorpusStore::from_sentences_jsonl(BufReader::new(file), &path.display().to_string())?)
}

fn load_embeddings(config: &RunConfig) -> Result<EmbeddingStore> {
    let path = config.out(EMBEDDINGS);
    require(&path, "embedding store (run embed-mock or embed-import first)")?;
    Ok(EmbeddingStore::from_file(&path)?)
}

fn load_inventory(config: &RunConfig) -> Result<SenseInventory> {
    let path = config.out(INVENTORY);
    require(&path, "sense inventory (run induce first)")?;
    Ok(SenseInventory::read_files(&path)?)
}

fn load_synsets(config: &RunConfig) -> Result<Vec<Synset>> {
    let path = config.out(SYNSETS);
    require(&path, "synsets (run synsets first)")?;
    Ok(read_synsets(&path)?)
}

pub fn ingest(config: &RunConfig) -> Result<()> {
    if config.corpus.is_empty() {
        return Err(ConfigError("no corpus files configured".into()).into());
    }
    for path in &config.corpus {
        require(path, "corpus file")?;
    }
    let preprocessor = match &config.rules {
        Some(path) => {
            require(path, "rule table")?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Preprocessor::new(parse_rule_config(&text)?)?
        }
        None => Preprocessor::default(),
    };
    prepare_output(config)?;
    let mut store = CorpusStore::new(preprocessor);
    for path in &config.corpus {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let n = store.ingest_jsonl(BufReader::new(file), &path.display().to_string())?;
        info!("{}: {n} sentences", path.display());
    }
    let mut out = create(&config.out(SENTENCES))?;
    store.write_sentences_jsonl(&mut out)?;
    out.flush()?;
    let stats = store.stats();
    write_json(&stats, &config.out(CORPUS_STATS))?;
    println!("{stats}");
    println!("{} sentences written to {}", store.len(), config.out(SENTENCES).display());
    Ok(())
}

pub fn embed_mock(config: &RunConfig, embedder: &MockEmbedder) -> Result<()> {
    let corpus = load_sentences(config)?;
    let mut store = EmbeddingStore::with_dim(embedder.dim)?;
    for record in corpus.sentences() {
        store.insert(&record.sentence_id, &embedder.embed(&record.text))?;
    }
    let path = config.out(EMBEDDINGS);
    let bytes = store.write_binary_file(&path)?;
    println!("{} vectors (dim {}) written to {} ({bytes} bytes)", store.len(), embedder.dim, path.display());
    Ok(())
}

pub fn embed_import(config: &RunConfig, file: Option<&Path>) -> Result<()> {
    let source = file
        .map(Path::to_path_buf)
        .or_else(|| config.embedding.file.clone())
        .ok_or_else(|| ConfigError("no embedding file given in config or on the command line".into()))?;
    require(&source, "embedding file")?;
    let corpus = load_sentences(config)?;
    let mut store = EmbeddingStore::new();
    let n = import_embeddings(&source, &mut store)?;
    let missing = corpus.sentences().iter().filter(|r| !store.contains(&r.sentence_id)).count();
    if missing > 0 {
        warn!("{missing} sentences have no vector in {}", source.display());
    }
    let path = config.out(EMBEDDINGS);
    store.write_binary_file(&path)?;
    println!("{n} vectors imported to {}; {missing} sentences without a vector", path.display());
    Ok(())
}

pub fn induce(config: &RunConfig, seed_words: Option<&Path>) -> Result<()> {
    let seeds_path = seed_words
        .map(Path::to_path_buf)
        .or_else(|| config.seed_words.clone())
        .ok_or_else(|| ConfigError("no seed word list configured".into()))?;
    require(&seeds_path, "seed word list")?;
    let candidates = read_word_list(&seeds_path)?;
    let corpus = load_sentences(config)?;
    let embeddings = load_embeddings(config)?;
    let build = build_sense_inventory(
        &candidates,
        &corpus,
        &embeddings,
        &config.pipeline,
        &config.seed_policy,
        config.workers,
    )?;
    build.inventory.write_files(&config.out(INVENTORY), INVENTORY_EMB)?;
    let mut skips = create(&config.out(SKIP_REPORT))?;
    build.write_skip_report(&mut skips)?;
    skips.flush()?;
    write_sense_distribution_file(
        &senseweave_core::wsi::sense_distribution(&build.inventory),
        &config.out(SENSES_PER_WORD),
    )?;
    let mut counts = csv::Writer::from_writer(create(&config.out(CLUSTER_COUNTS))?);
    counts.write_record(["lemma", "step1_raw", "step1_kept", "step2", "step3"])?;
    for (lemma, c) in &build.counts {
        counts.write_record([
            lemma.clone(),
            c.step1_raw.to_string(),
            c.step1_kept.to_string(),
            c.step2.to_string(),
            c.step3.to_string(),
        ])?;
    }
    counts.flush()?;
    println!("{}", build.summary());
    println!("{} candidates skipped, see {}", build.skipped.len(), config.out(SKIP_REPORT).display());
    Ok(())
}

pub fn synsets(config: &RunConfig) -> Result<()> {
    let inventory = load_inventory(config)?;
    let (synsets, merges) = if inventory.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let out = induce_synsets(&inventory, config.synset_threshold)?;
        (out.synsets, out.merges)
    };
    write_synsets(&synsets, &config.out(SYNSETS))?;
    let mut log = create(&config.out(MERGE_LOG))?;
    write_merge_log(&merges, &mut log)?;
    log.flush()?;
    let report = synset_size_report(&synsets, config.oversize_threshold);
    report.write_histogram_csv(create(&config.out(SYNSET_SIZES))?)?;
    write_json(&report.flagged, &config.out(OVERSIZED))?;
    println!(
        "{} senses → {} synsets ({} merges, {} flagged with ≥ {} lemmas)",
        inventory.sense_count(),
        synsets.len(),
        merges.len(),
        report.flagged.len(),
        config.oversize_threshold
    );
    Ok(())
}

fn file_stem_for(lemma: &str) -> String {
    lemma.chars().map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

pub fn eval_wsd(config: &RunConfig, manifest: &Path, embeddings: Option<&Path>) -> Result<()> {
    require(manifest, "evaluation manifest")?;
    let records = read_manifest(
        BufReader::new(File::open(manifest).with_context(|| format!("opening {}", manifest.display()))?),
        &manifest.display().to_string(),
    )?;
    let inventory = load_inventory(config)?;
    let mut store = match embeddings {
        Some(path) => {
            require(path, "evaluation embeddings")?;
            EmbeddingStore::from_file(path)?
        }
        None if config.out(EMBEDDINGS).exists() => load_embeddings(config)?,
        None => EmbeddingStore::new(),
    };
    // Without precomputed vectors, manifest sentences go through the same
    // mock embedder as the corpus.
    if let Some(mock) = &config.embedding.mock {
        for r in &records {
            if !store.contains(&r.sentence_embedding_id) {
                store.insert(&r.sentence_embedding_id, &mock.embed(&r.sentence_text))?;
            }
        }
    }
    let report = evaluate_sense_validity(&records, &inventory, &store, config.wsd_threshold)?;
    write_json(&report, &config.out(WSD_VALIDITY))?;
    let dir = config.out(WSD_HEATMAPS);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let lemmas: std::collections::BTreeSet<&str> = records.iter().map(|r| r.lemma.as_str()).collect();
    for lemma in lemmas {
        if inventory.senses_of(lemma).is_none() {
            continue;
        }
        let matrix = sense_match_matrix(lemma, &records, &inventory, &store, config.wsd_threshold)?;
        matrix.write_csv(create(&dir.join(format!("{}.csv", file_stem_for(lemma))))?)?;
    }
    println!("{}", report.summary());
    if let Some(mean) = report.mean_score {
        println!("mean best score {mean:.4} at threshold {}", config.wsd_threshold);
    }
    println!("{} records evaluated, {} skipped", report.evaluated_records, report.skipped.len());
    Ok(())
}

pub fn eval_synsets(config: &RunConfig, reference: &Path) -> Result<()> {
    require(reference, "reference wordnet")?;
    let reference = read_reference(reference)?;
    let synsets = load_synsets(config)?;
    let cmp = compare_synsets(&synsets, &reference)?;
    cmp.write_distribution_csv(create(&config.out(SYNSET_JACCARD))?)?;
    cmp.write_matches_csv(create(&config.out(SYNSET_MATCHES))?)?;
    let perfect = cmp.matches.iter().filter(|m| m.exact.intersection == m.exact.union).count();
    println!("{perfect} of {} synsets have Jaccard 1.0 against the reference", cmp.matches.len());
    Ok(())
}

pub fn export(config: &RunConfig) -> Result<()> {
    let corpus = load_sentences(config)?;
    let inventory = load_inventory(config)?;
    let synsets = load_synsets(config)?;
    let resource = WordNetResource::new(
        inventory,
        synsets,
        config.synset_threshold,
        corpus.digest(),
        config.created_at()?,
    )?;
    resource.validate_against_corpus(&corpus)?;
    let path = config.out(WORDNET);
    let bytes = export_wordnet(&resource, &path)?;
    println!("wordnet written to {} ({bytes} bytes)", path.display());
    Ok(())
}

pub fn stats(path: &Path, json: bool) -> Result<()> {
    require(path, "wordnet file")?;
    let resource = load_wordnet(path)?;
    let stats = wordnet_stats(&resource);
    if json {
        println!("{}", serde_json::to_string_pretty(&stats)?);
    } else {
        print!("{stats}");
    }
    Ok(())
}

/// Every stage from raw documents to an exported wordnet.
pub fn run(config: &RunConfig, mock: Option<&MockEmbedder>) -> Result<()> {
    ingest(config)?;
    match mock {
        Some(m) => embed_mock(config, m)?,
        None => embed_import(config, None)?,
    }
    induce(config, None)?;
    synsets(config)?;
    export(config)
}

