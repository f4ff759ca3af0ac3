use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EmbeddingVector;
use crate::error::{Error, Result};

pub const EMBEDDING_MAGIC: &[u8; 4] = b"EMB1";

/// Fixed-dimension `f32` vectors keyed by sentence or sense id.
///
/// Binary layout, little endian: `"EMB1"`, `u32` dim, `u64` count, then
/// `count` records of `u16` id length, id bytes (UTF-8), `dim` × `f32`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    dim: Option<usize>,
    entries: BTreeMap<String, Vec<f32>>,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    id: String,
    vector: Vec<f32>,
}

impl EmbeddingStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_dim(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParam("embedding dim must be positive".into()));
        }
        Ok(Self {
            dim: Some(dim),
            entries: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, id: &str) -> Option<&[f32]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    pub fn get(&self, id: &str) -> Option<EmbeddingVector> {
        self.raw(id)
            .map(|v| EmbeddingVector::from_f32(v).expect("store holds finite nonempty vectors"))
    }

    pub fn insert_f32(&mut self, id: &str, values: Vec<f32>) -> Result<()> {
        let dim = *self.dim.get_or_insert(values.len());
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { id: id.to_string() });
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroNorm { id: id.to_string() });
        }
        if self.entries.contains_key(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        self.entries.insert(id.to_string(), values);
        Ok(())
    }

    pub fn insert(&mut self, id: &str, vector: &EmbeddingVector) -> Result<()> {
        self.insert_f32(id, vector.to_f32())
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let dim = self.dim.unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidParam(
                "cannot write an embedding file without a dimension".into(),
            ));
        }
        let io = |e| Error::io("<embedding output>", e);
        out.write_all(EMBEDDING_MAGIC).map_err(io)?;
        out.write_all(&(dim as u32).to_le_bytes()).map_err(io)?;
        out.write_all(&(self.entries.len() as u64).to_le_bytes()).map_err(io)?;
        for (id, values) in &self.entries {
            let len = u16::try_from(id.len())
                .map_err(|_| Error::InvalidParam(format!("id too long for u16 length: {id:?}")))?;
            out.write_all(&len.to_le_bytes()).map_err(io)?;
            out.write_all(id.as_bytes()).map_err(io)?;
            for v in values {
                out.write_all(&v.to_le_bytes()).map_err(io)?;
            }
        }
        out.flush().map_err(io)
    }

    pub fn write_binary_file(&self, path: &Path) -> Result<u64> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_binary(BufWriter::new(file))?;
        let len = std::fs::metadata(path).map_err(|e| Error::io(path, e))?.len();
        Ok(len)
    }

    /// Adds every record of a binary embedding file. Returns the record count.
    pub fn read_binary<R: Read>(&mut self, input: R) -> Result<usize> {
        let mut reader = CountingReader { inner: input, offset: 0 };
        let mut magic = [0u8; 4];
        reader.fill(&mut magic, "magic")?;
        if &magic != EMBEDDING_MAGIC {
            return Err(Error::MalformedEmbeddings {
                offset: 0,
                reason: "missing EMB1 magic".into(),
            });
        }
        let mut word = [0u8; 4];
        reader.fill(&mut word, "dim")?;
        let dim = u32::from_le_bytes(word) as usize;
        if dim == 0 {
            return Err(Error::MalformedEmbeddings {
                offset: 4,
                reason: "zero dimension".into(),
            });
        }
        if let Some(existing) = self.dim {
            if existing != dim {
                return Err(Error::DimensionMismatch {
                    expected: existing,
                    found: dim,
                });
            }
        }
        self.dim = Some(dim);
        let mut long = [0u8; 8];
        reader.fill(&mut long, "count")?;
        let count = u64::from_le_bytes(long);
        let mut buf = vec![0u8; dim * 4];
        for _ in 0..count {
            let mut short = [0u8; 2];
            reader.fill(&mut short, "id length")?;
            let mut id = vec![0u8; u16::from_le_bytes(short) as usize];
            let id_offset = reader.offset;
            reader.fill(&mut id, "id")?;
            let id = String::from_utf8(id).map_err(|_| Error::MalformedEmbeddings {
                offset: id_offset,
                reason: "id is not UTF-8".into(),
            })?;
            reader.fill(&mut buf, "vector values")?;
            let values = buf
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            self.insert_f32(&id, values)?;
        }
        let mut extra = [0u8; 1];
        if reader.inner.read(&mut extra).map_err(|e| Error::io("<embedding input>", e))? != 0 {
            return Err(Error::MalformedEmbeddings {
                offset: reader.offset,
                reason: "trailing bytes after last record".into(),
            });
        }
        Ok(count as usize)
    }

    /// JSON-lines debugging format: one `{"id": ..., "vector": [...]}` per line.
    pub fn read_jsonl<R: BufRead>(&mut self, input: R) -> Result<usize> {
        let mut count = 0;
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<embedding input>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let row: JsonRow = serde_json::from_str(&line)
                .map_err(|e| Error::json(format!("embedding line {}", i + 1), e))?;
            self.insert_f32(&row.id, row.vector)?;
            count += 1;
        }
        Ok(count)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for (id, values) in &self.entries {
            let row = JsonRow {
                id: id.clone(),
                vector: values.clone(),
            };
            serde_json::to_writer(&mut out, &row).map_err(|e| Error::json("embedding row", e))?;
            out.write_all(b"\n").map_err(|e| Error::io("<embedding output>", e))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut store = Self::new();
        import_embeddings(path, &mut store)?;
        Ok(store)
    }
}

/// Imports a binary (`EMB1`) or JSON-lines embedding file into `store`,
/// detected by the leading magic bytes.
pub fn import_embeddings(path: &Path, store: &mut EmbeddingStore) -> Result<usize> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let head = reader.fill_buf().map_err(|e| Error::io(path, e))?;
    if head.starts_with(EMBEDDING_MAGIC) {
        store.read_binary(reader)
    } else {
        store.read_jsonl(reader)
    }
}

struct CountingReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> CountingReader<R> {
    fn fill(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        let start = self.offset;
        self.inner.read_exact(buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::MalformedEmbeddings {
                offset: start,
                reason: format!("truncated while reading {what}"),
            },
            _ => Error::io("<embedding input>", e),
        })?;
        self.offset += buf.len() as u64;
        Ok(())
    }
}
