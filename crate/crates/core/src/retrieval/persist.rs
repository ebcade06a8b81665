//! Binary index format.
//!
//! ```text
//! magic "PRAGIDX1" | version u32 | payload length u64 | payload | sha256(payload)
//! ```
//!
//! All integers are little-endian. Strings are a u32 byte length followed by
//! UTF-8 bytes. The payload holds the BM25 parameters, the documents with
//! their token lengths, and the posting lists in term order.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::bm25::Bm25Params;
use super::index::{InvertedIndex, Posting};
use super::{Document, RetrievalError};

pub const INDEX_MAGIC: &[u8; 8] = b"PRAGIDX1";
pub const INDEX_FORMAT_VERSION: u32 = 1;

const HEADER_LEN: usize = 8 + 4 + 8;
const CHECKSUM_LEN: usize = 32;

pub fn save_index(index: &InvertedIndex, path: impl AsRef<Path>) -> Result<(), RetrievalError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_index(index, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<InvertedIndex, RetrievalError> {
    let mut buf = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut buf)?;
    read_index(&buf)
}

pub fn write_index<W: Write>(index: &InvertedIndex, out: &mut W) -> Result<(), RetrievalError> {
    let payload = encode_payload(index);
    out.write_all(INDEX_MAGIC)?;
    out.write_all(&INDEX_FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(payload.len() as u64).to_le_bytes())?;
    out.write_all(&payload)?;
    out.write_all(&Sha256::digest(&payload))?;
    Ok(())
}

pub fn read_index(bytes: &[u8]) -> Result<InvertedIndex, RetrievalError> {
    if bytes.len() < HEADER_LEN {
        return Err(corrupt("file shorter than header"));
    }
    if &bytes[..8] != INDEX_MAGIC {
        return Err(RetrievalError::IndexVersion(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&bytes[..8]),
            String::from_utf8_lossy(INDEX_MAGIC)
        )));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != INDEX_FORMAT_VERSION {
        return Err(RetrievalError::IndexVersion(format!(
            "format version {version}, this build reads version {INDEX_FORMAT_VERSION}"
        )));
    }
    let payload_len = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let expected_total = (HEADER_LEN as u64)
        .checked_add(payload_len)
        .and_then(|n| n.checked_add(CHECKSUM_LEN as u64))
        .ok_or_else(|| corrupt("payload length overflows"))?;
    if bytes.len() as u64 != expected_total {
        return Err(corrupt(&format!(
            "expected {expected_total} bytes, found {}",
            bytes.len()
        )));
    }
    let payload = &bytes[HEADER_LEN..HEADER_LEN + payload_len as usize];
    let stored = &bytes[HEADER_LEN + payload_len as usize..];
    if Sha256::digest(payload).as_slice() != stored {
        return Err(corrupt("checksum mismatch"));
    }
    decode_payload(payload)
}

fn corrupt(msg: &str) -> RetrievalError {
    RetrievalError::IndexCorrupt(msg.to_string())
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
}

fn encode_payload(index: &InvertedIndex) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(&index.params.k1.to_le_bytes());
    buf.extend_from_slice(&index.params.b.to_le_bytes());
    buf.extend_from_slice(&(index.docs.len() as u32).to_le_bytes());
    for (doc, len) in index.docs.iter().zip(&index.doc_lengths) {
        put_str(&mut buf, &doc.id);
        put_str(&mut buf, &doc.title);
        put_str(&mut buf, &doc.text);
        buf.extend_from_slice(&len.to_le_bytes());
    }
    buf.extend_from_slice(&(index.postings.len() as u32).to_le_bytes());
    for (term, list) in &index.postings {
        put_str(&mut buf, term);
        buf.extend_from_slice(&(list.len() as u32).to_le_bytes());
        for p in list {
            buf.extend_from_slice(&p.doc.to_le_bytes());
            buf.extend_from_slice(&p.tf.to_le_bytes());
        }
    }
    buf
}

struct Cursor<'a> {
    rest: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], RetrievalError> {
        if self.rest.len() < n {
            return Err(corrupt("payload ends early"));
        }
        let (head, tail) = self.rest.split_at(n);
        self.rest = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, RetrievalError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, RetrievalError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, RetrievalError> {
        let len = self.u32()? as usize;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|_| corrupt("invalid UTF-8 string"))
    }
}

fn decode_payload(payload: &[u8]) -> Result<InvertedIndex, RetrievalError> {
    let mut cur = Cursor { rest: payload };
    let params = Bm25Params {
        k1: cur.f64()?,
        b: cur.f64()?,
    };
    params.validate().map_err(|e| corrupt(&e.to_string()))?;

    let n_docs = cur.u32()? as usize;
    let mut docs = Vec::with_capacity(n_docs.min(1 << 20));
    let mut doc_lengths = Vec::with_capacity(n_docs.min(1 << 20));
    let mut positions = HashMap::new();
    let mut total_len = 0u64;
    for i in 0..n_docs {
        let doc = Document {
            id: cur.string()?,
            title: cur.string()?,
            text: cur.string()?,
        };
        let len = cur.u32()?;
        if positions.insert(doc.id.clone(), i as u32).is_some() {
            return Err(corrupt(&format!("duplicate document id `{}`", doc.id)));
        }
        total_len += len as u64;
        docs.push(doc);
        doc_lengths.push(len);
    }

    let n_terms = cur.u32()? as usize;
    let mut postings = BTreeMap::new();
    let mut tf_sums = vec![0u64; n_docs];
    for _ in 0..n_terms {
        let term = cur.string()?;
        let n = cur.u32()? as usize;
        let mut list = Vec::with_capacity(n.min(n_docs));
        for _ in 0..n {
            let p = Posting {
                doc: cur.u32()?,
                tf: cur.u32()?,
            };
            if p.doc as usize >= n_docs || p.tf == 0 {
                return Err(corrupt(&format!("invalid posting for term `{term}`")));
            }
            if list.last().is_some_and(|prev: &Posting| prev.doc >= p.doc) {
                return Err(corrupt(&format!("unsorted postings for term `{term}`")));
            }
            tf_sums[p.doc as usize] += p.tf as u64;
            list.push(p);
        }
        postings.insert(term, list);
    }
    if !cur.rest.is_empty() {
        return Err(corrupt("trailing bytes after postings"));
    }
    if tf_sums.iter().zip(&doc_lengths).any(|(s, l)| *s != *l as u64) {
        return Err(corrupt("document lengths disagree with postings"));
    }
    Ok(InvertedIndex {
        params,
        docs,
        doc_lengths,
        postings,
        positions,
        total_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::build_index;

    fn sample() -> InvertedIndex {
        build_index(
            vec![
                Document::new("a", "Alpha", "the mona lisa was stolen"),
                Document::new("b", "", "vincenzo peruggia stole the painting"),
            ],
            Bm25Params::default(),
        )
        .unwrap()
    }

    fn encoded(index: &InvertedIndex) -> Vec<u8> {
        let mut buf = Vec::new();
        write_index(index, &mut buf).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_identity() {
        let idx = sample();
        let back = read_index(&encoded(&idx)).unwrap();
        assert_eq!(back, idx);
    }

    #[test]
    fn encoding_is_deterministic() {
        assert_eq!(encoded(&sample()), encoded(&sample()));
    }

    #[test]
    fn truncated_is_corrupt() {
        let bytes = encoded(&sample());
        for cut in [0, 5, HEADER_LEN, bytes.len() / 2, bytes.len() - 1] {
            let err = read_index(&bytes[..cut]).unwrap_err();
            assert!(matches!(err, RetrievalError::IndexCorrupt(_)), "cut {cut}: {err}");
        }
    }

    #[test]
    fn wrong_magic_is_version_error() {
        let mut bytes = encoded(&sample());
        bytes[..8].copy_from_slice(b"NOTANIDX");
        assert!(matches!(read_index(&bytes), Err(RetrievalError::IndexVersion(_))));
    }

    #[test]
    fn future_version_rejected() {
        let mut bytes = encoded(&sample());
        bytes[8..12].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(read_index(&bytes), Err(RetrievalError::IndexVersion(_))));
    }

    #[test]
    fn flipped_payload_byte_fails_checksum() {
        let mut bytes = encoded(&sample());
        bytes[HEADER_LEN + 30] ^= 0xff;
        let err = read_index(&bytes).unwrap_err();
        assert!(err.to_string().contains("checksum"), "{err}");
    }
}
