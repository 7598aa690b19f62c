//! Systematic Reed–Solomon outer code and the share container format.
//!
//! A `(theta, m)` code evaluates the unique polynomial of degree `< m` that
//! passes through the data at the first `m` evaluation points; evaluation
//! points are the field elements `1, 2, ..., theta` in integer order. Packets
//! are byte blocks and the code is applied at every byte offset.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};

/// Default packet size in bytes.
pub const DEFAULT_BLOCK_SIZE: usize = 1024;

/// An encoded file: `theta` equally sized blocks, block `j` at position `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codeword {
    pub symbols: Vec<Vec<u8>>,
}

impl Codeword {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct MdsCode {
    spec: FieldSpec,
    m: usize,
    theta: usize,
    points: Vec<u8>,
    /// Row `j - m` holds the Lagrange weights producing parity position `j`.
    parity: Vec<Vec<u8>>,
}

impl MdsCode {
    pub fn new(spec: FieldSpec, m: usize, theta: usize) -> Result<Self> {
        let field = spec.field();
        if m == 0 || m > theta {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= m <= theta, got m = {m}, theta = {theta}"
            )));
        }
        if theta > field.order() - 1 {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} exceeds field capacity {}",
                field.order() - 1
            )));
        }
        let points: Vec<u8> = (1..=theta).map(|x| x as u8).collect();
        let data_points = &points[..m];
        let parity = points[m..]
            .iter()
            .map(|&x| lagrange_weights(field, data_points, x))
            .collect();
        Ok(MdsCode {
            spec,
            m,
            theta,
            points,
            parity,
        })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }
    pub fn data_len(&self) -> usize {
        self.m
    }
    pub fn len(&self) -> usize {
        self.theta
    }
    pub fn is_empty(&self) -> bool {
        self.theta == 0
    }
    fn field(&self) -> &'static Field {
        self.spec.field()
    }

    /// Encodes `m` equally sized data blocks into `theta` blocks; the first `m`
    /// are the data verbatim.
    pub fn encode(&self, data: &[Vec<u8>]) -> Result<Codeword> {
        if data.len() != self.m {
            return Err(Error::SizeMismatch {
                expected: self.m,
                actual: data.len(),
            });
        }
        let width = data[0].len();
        if data.iter().any(|b| b.len() != width) {
            return Err(Error::InvalidParameter("data blocks differ in length".into()));
        }
        self.check_symbols(data)?;
        let f = self.field();
        let mut symbols = data.to_vec();
        for weights in &self.parity {
            let mut out = vec![0u8; width];
            for (w, block) in weights.iter().zip(data) {
                for (o, &b) in out.iter_mut().zip(block) {
                    *o = f.add(*o, f.mul(*w, b));
                }
            }
            symbols.push(out);
        }
        Ok(Codeword { symbols })
    }

    /// Encodes single field symbols.
    pub fn encode_symbols(&self, data: &[u8]) -> Result<Vec<u8>> {
        let blocks: Vec<Vec<u8>> = data.iter().map(|&x| vec![x]).collect();
        Ok(self.encode(&blocks)?.symbols.into_iter().map(|b| b[0]).collect())
    }

    /// Recovers the `m` data blocks from `(position, block)` pairs. The `m`
    /// lowest distinct positions are interpolated; any further pairs must agree
    /// with the result.
    pub fn decode(&self, received: &[(usize, &[u8])]) -> Result<Vec<Vec<u8>>> {
        let mut pairs: Vec<(usize, &[u8])> = received.to_vec();
        pairs.sort_by_key(|p| p.0);
        pairs.dedup_by_key(|p| p.0);
        if let Some(&(pos, _)) = pairs.iter().find(|p| p.0 >= self.theta) {
            return Err(Error::IndexOutOfRange {
                index: pos,
                len: self.theta,
            });
        }
        if pairs.len() < self.m {
            return Err(Error::Unrecoverable {
                have: pairs.len(),
                need: self.m,
            });
        }
        let width = pairs[0].1.len();
        if pairs.iter().any(|p| p.1.len() != width) {
            return Err(Error::InvalidParameter("received blocks differ in length".into()));
        }
        let f = self.field();
        let (basis, extra) = pairs.split_at(self.m);
        let basis_points: Vec<u8> = basis.iter().map(|p| self.points[p.0]).collect();

        let data: Vec<Vec<u8>> = (0..self.m)
            .map(|i| {
                if let Some(b) = basis.iter().find(|p| p.0 == i) {
                    return b.1.to_vec();
                }
                let weights = lagrange_weights(f, &basis_points, self.points[i]);
                let mut out = vec![0u8; width];
                for (w, (_, block)) in weights.iter().zip(basis) {
                    for (o, &b) in out.iter_mut().zip(block.iter()) {
                        *o = f.add(*o, f.mul(*w, b));
                    }
                }
                out
            })
            .collect();

        if !extra.is_empty() {
            let check = self.encode(&data)?;
            for &(pos, block) in extra {
                if check.symbols[pos] != block {
                    return Err(Error::Corruption { position: pos });
                }
            }
        }
        Ok(data)
    }

    fn check_symbols(&self, data: &[Vec<u8>]) -> Result<()> {
        let q = self.field().order();
        if q < 256 && data.iter().flatten().any(|&b| b as usize >= q) {
            return Err(Error::InvalidParameter(format!(
                "byte value outside GF({q})"
            )));
        }
        Ok(())
    }
}

/// Weights `w_i` with `f(x) = Σ w_i f(points_i)` for every polynomial of
/// degree `< points.len()`.
fn lagrange_weights(f: &Field, points: &[u8], x: u8) -> Vec<u8> {
    points
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut num = 1u8;
            let mut den = 1u8;
            for (j, &xj) in points.iter().enumerate() {
                if i != j {
                    num = f.mul(num, f.sub(x, xj));
                    den = f.mul(den, f.sub(xi, xj));
                }
            }
            f.div(num, den).expect("evaluation points are distinct")
        })
        .collect()
}

/// Splits a byte file into `m` blocks of `block_size` bytes, zero padded.
pub fn split_file(bytes: &[u8], m: usize, block_size: usize) -> Result<Vec<Vec<u8>>> {
    if block_size == 0 || bytes.len() > m * block_size {
        return Err(Error::InvalidParameter(format!(
            "file of {} bytes does not fit in {m} blocks of {block_size} bytes",
            bytes.len()
        )));
    }
    let mut padded = bytes.to_vec();
    padded.resize(m * block_size, 0);
    Ok(padded.chunks(block_size).map(<[u8]>::to_vec).collect())
}

pub fn sha256(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

const MAGIC: &[u8; 4] = b"FRSH";
const VERSION: u16 = 1;
const DIGEST_SHA256: u8 = 1;

/// Header of a share container.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerHeader {
    pub field: FieldSpec,
    pub m: usize,
    pub theta: usize,
    pub block_size: usize,
    pub file_len: u64,
    /// SHA-256 of the original file.
    pub digest: [u8; 32],
}

/// Encoded shares of one file, possibly only a subset of positions.
///
/// Layout (little endian): magic `FRSH`, version u16, field id u16, digest
/// algorithm u8 (1 = SHA-256), m u32, theta u32, block size u32, file length
/// u64, 32 digest bytes, share count u32, then per share a u32 position
/// followed by `block size` bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareContainer {
    pub header: ContainerHeader,
    pub shares: Vec<(usize, Vec<u8>)>,
}

impl ShareContainer {
    /// Encodes `bytes` with a `(theta, m)` code and keeps every position.
    pub fn encode_file(
        bytes: &[u8],
        spec: FieldSpec,
        m: usize,
        theta: usize,
        block_size: usize,
    ) -> Result<Self> {
        let code = MdsCode::new(spec, m, theta)?;
        let cw = code.encode(&split_file(bytes, m, block_size)?)?;
        Ok(ShareContainer {
            header: ContainerHeader {
                field: spec,
                m,
                theta,
                block_size,
                file_len: bytes.len() as u64,
                digest: sha256(bytes),
            },
            shares: cw.symbols.into_iter().enumerate().collect(),
        })
    }

    /// Rebuilds the file and checks it against the header digest.
    pub fn decode_file(&self) -> Result<Vec<u8>> {
        let h = &self.header;
        let code = MdsCode::new(h.field, h.m, h.theta)?;
        let received: Vec<(usize, &[u8])> =
            self.shares.iter().map(|(p, b)| (*p, b.as_slice())).collect();
        let mut bytes = code.decode(&received)?.concat();
        bytes.truncate(h.file_len as usize);
        if sha256(&bytes) != h.digest {
            return Err(Error::DigestMismatch);
        }
        Ok(bytes)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&h.field.id().to_le_bytes());
        out.push(DIGEST_SHA256);
        out.extend_from_slice(&(h.m as u32).to_le_bytes());
        out.extend_from_slice(&(h.theta as u32).to_le_bytes());
        out.extend_from_slice(&(h.block_size as u32).to_le_bytes());
        out.extend_from_slice(&h.file_len.to_le_bytes());
        out.extend_from_slice(&h.digest);
        out.extend_from_slice(&(self.shares.len() as u32).to_le_bytes());
        for (pos, block) in &self.shares {
            out.extend_from_slice(&(*pos as u32).to_le_bytes());
            out.extend_from_slice(block);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Parse("bad container magic".into()));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::Parse(format!("unsupported container version {version}")));
        }
        let field = FieldSpec::from_id(r.u16()?)?;
        let algo = r.take(1)?[0];
        if algo != DIGEST_SHA256 {
            return Err(Error::Parse(format!("unknown digest algorithm {algo}")));
        }
        let m = r.u32()? as usize;
        let theta = r.u32()? as usize;
        let block_size = r.u32()? as usize;
        let file_len = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let digest: [u8; 32] = r.take(32)?.try_into().unwrap();
        let count = r.u32()? as usize;
        let mut shares = Vec::with_capacity(count.min(theta));
        for _ in 0..count {
            let pos = r.u32()? as usize;
            shares.push((pos, r.take(block_size)?.to_vec()));
        }
        if r.at != bytes.len() {
            return Err(Error::Parse("trailing bytes after shares".into()));
        }
        Ok(ShareContainer {
            header: ContainerHeader {
                field,
                m,
                theta,
                block_size,
                file_len,
                digest,
            },
            shares,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Parse("truncated container".into()))?;
        let out = &self.bytes[self.at..end];
        self.at = end;
        Ok(out)
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}
