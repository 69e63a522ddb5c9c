//! Finite fields F_{p^r} with a full discrete-log (index) table.
//!
//! Construction is deterministic end to end: the modulus is the
//! lexicographically smallest monic irreducible polynomial (coefficients
//! compared low degree first), the generator is the smallest element in rank
//! order, and the table is a single pass gamma^0, gamma^1, ... so rebuilding
//! with the same (p, r) always yields the same field. Everything downstream
//! (Jacobi sums in particular) depends on that normalization.
//!
//! Elements are identified by their rank sum(c_i p^i) over the coefficient
//! list; the index table is a flat array indexed by rank - 1.

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::arith::{is_prime, prime_factors};

/// Fields larger than this are rejected (the index table is held in memory).
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

const MAGIC: [u8; 4] = *b"JSIX";
const VERSION: u8 = 0x01;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree r must be at least 1")]
    ZeroDegree,
    #[error("field size p^r exceeds the supported bound 2^24 (p = {p}, r = {r})")]
    TooLarge { p: u64, r: u32 },
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic bytes (not a field table file)")]
    BadMagic,
    #[error("unsupported cache version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("cache file truncated")]
    Truncated,
    #[error("crc32 mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("cache contents invalid: {0}")]
    Invalid(String),
}

/// F_{p^r} with modulus, generator and the full index table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedField {
    p: u64,
    r: u32,
    q: u64,
    /// Monic modulus, r+1 coefficients low degree first; [0, 1] when r = 1.
    modulus: Vec<u64>,
    /// Generator of F_q^*, r coefficients.
    gamma: Vec<u64>,
    /// index[rank - 1] = discrete log of the element with that rank.
    index: Vec<u32>,
}

/// Lexicographically smallest monic irreducible polynomial of degree r over
/// Z/p, low-degree-first coefficient comparison. For r = 1 the placeholder
/// "x" is returned (reduction is plain mod p).
pub fn find_irreducible(p: u64, r: u32) -> Result<Vec<u64>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if r == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if r == 1 {
        return Ok(vec![0, 1]);
    }
    let count = checked_pow(p, r).ok_or(FieldError::TooLarge { p, r })?;
    for m in 0..count {
        // lex order on (c_0, ..., c_{r-1}): c_0 is the most significant digit
        let mut poly = Vec::with_capacity(r as usize + 1);
        let mut rem = m;
        let mut div = count / p;
        for _ in 0..r {
            poly.push(rem / div);
            rem %= div;
            div = if div > 1 { div / p } else { 1 };
        }
        poly.push(1);
        if is_irreducible(&poly, p) {
            return Ok(poly);
        }
    }
    Err(FieldError::Internal(format!(
        "no irreducible polynomial of degree {r} over Z/{p}"
    )))
}

/// First element in rank order with multiplicative order exactly q - 1,
/// tested via gamma^((q-1)/s) != 1 over the prime factors s of q - 1.
pub fn find_generator(p: u64, r: u32, modulus: &[u64]) -> Result<Vec<u64>, FieldError> {
    let q = checked_pow(p, r).ok_or(FieldError::TooLarge { p, r })?;
    let cofactors: Vec<u64> = prime_factors(q - 1).iter().map(|s| (q - 1) / s).collect();
    for rank in 1..q {
        let cand = coeffs_of_rank(rank, p, r);
        if cofactors
            .iter()
            .all(|&c| !is_one(&poly_pow_mod(&cand, c, modulus, p)))
        {
            return Ok(cand);
        }
    }
    Err(FieldError::Internal(format!(
        "no generator found for p = {p}, r = {r}; modulus is not irreducible"
    )))
}

/// Fill the index table by accumulating gamma^t for t = 0..q-2. A collision
/// means gamma is not a generator (or the modulus is reducible) and is
/// reported as an internal error.
pub fn build_index_table(
    p: u64,
    r: u32,
    modulus: Vec<u64>,
    gamma: Vec<u64>,
) -> Result<IndexedField, FieldError> {
    let q = checked_pow(p, r).ok_or(FieldError::TooLarge { p, r })?;
    let mut index = vec![u32::MAX; (q - 1) as usize];
    let mut acc = vec![0u64; r as usize];
    acc[0] = 1;
    for t in 0..(q - 1) {
        let rank = rank_of_coeffs(&acc, p);
        if rank == 0 {
            return Err(FieldError::Internal(format!(
                "gamma^{t} = 0: the modulus has a nontrivial factor"
            )));
        }
        let slot = &mut index[(rank - 1) as usize];
        if *slot != u32::MAX {
            return Err(FieldError::Internal(format!(
                "index collision at gamma^{t}: the chosen gamma is not a generator"
            )));
        }
        *slot = t as u32;
        acc = poly_mul_mod(&acc, &gamma, &modulus, p);
    }
    Ok(IndexedField {
        p,
        r,
        q,
        modulus,
        gamma,
        index,
    })
}

impl IndexedField {
    /// Deterministic construction: lex-smallest modulus, rank-smallest
    /// generator, then the full index table.
    pub fn build(p: u64, r: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if r == 0 {
            return Err(FieldError::ZeroDegree);
        }
        checked_pow(p, r).ok_or(FieldError::TooLarge { p, r })?;
        let modulus = find_irreducible(p, r)?;
        let gamma = find_generator(p, r, &modulus)?;
        build_index_table(p, r, modulus, gamma)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn gamma(&self) -> &[u64] {
        &self.gamma
    }

    /// Discrete log of the nonzero element with the given rank.
    #[inline]
    pub fn ind(&self, rank: u64) -> u32 {
        debug_assert!(rank >= 1 && rank < self.q);
        self.index[(rank - 1) as usize]
    }

    /// Rank of v + 1 given the rank of v (constant coefficient bumped mod p).
    /// Returns 0 exactly when v = -1.
    #[inline]
    pub fn rank_add_one(&self, rank: u64) -> u64 {
        let c0 = rank % self.p;
        rank - c0 + (c0 + 1) % self.p
    }

    /// Index of the field element 2 = 1 + 1; None in characteristic 2.
    pub fn ind2(&self) -> Option<u32> {
        if self.p == 2 {
            None
        } else {
            Some(self.ind(2))
        }
    }

    /// Index of -1: (q-1)/2 for odd q (gamma^((q-1)/2) is the only element of
    /// order 2), 0 in characteristic 2 where -1 = 1.
    pub fn ind_minus_one(&self) -> u32 {
        if self.p == 2 {
            0
        } else {
            ((self.q - 1) / 2) as u32
        }
    }

    pub fn coeffs_of(&self, rank: u64) -> Vec<u64> {
        coeffs_of_rank(rank, self.p, self.r)
    }

    pub fn rank_of(&self, coeffs: &[u64]) -> u64 {
        rank_of_coeffs(coeffs, self.p)
    }

    /// Product of two elements given by rank.
    pub fn mul_ranks(&self, a: u64, b: u64) -> u64 {
        let pa = self.coeffs_of(a);
        let pb = self.coeffs_of(b);
        rank_of_coeffs(&poly_mul_mod(&pa, &pb, &self.modulus, self.p), self.p)
    }

    pub fn pow_rank(&self, a: u64, k: u64) -> u64 {
        let pa = self.coeffs_of(a);
        rank_of_coeffs(&poly_pow_mod(&pa, k, &self.modulus, self.p), self.p)
    }

    /// Serialize to the versioned little-endian cache format:
    /// magic "JSIX", version byte, p (u64), r (u32), r+1 modulus
    /// coefficients (u64), r gamma coefficients (u64), q-1 index entries
    /// (u32, position rank-1), trailing crc32 of everything before it.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.p.to_le_bytes());
        out.extend_from_slice(&self.r.to_le_bytes());
        for c in &self.modulus {
            out.extend_from_slice(&c.to_le_bytes());
        }
        for c in &self.gamma {
            out.extend_from_slice(&c.to_le_bytes());
        }
        for v in &self.index {
            out.extend_from_slice(&v.to_le_bytes());
        }
        let mut hasher = crc32fast::Hasher::new();
        hasher.update(&out);
        out.extend_from_slice(&hasher.finalize().to_le_bytes());
        out
    }

    fn byte_len(&self) -> usize {
        4 + 1 + 8 + 4 + 8 * (self.r as usize + 1) + 8 * self.r as usize + 4 * self.index.len() + 4
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, CacheError> {
        if data.len() < 4 {
            return Err(CacheError::Truncated);
        }
        if data[..4] != MAGIC {
            return Err(CacheError::BadMagic);
        }
        if data.len() < 5 {
            return Err(CacheError::Truncated);
        }
        if data[4] != VERSION {
            return Err(CacheError::UnsupportedVersion(data[4]));
        }
        if data.len() < 17 {
            return Err(CacheError::Truncated);
        }
        let p = u64::from_le_bytes(data[5..13].try_into().unwrap());
        let r = u32::from_le_bytes(data[13..17].try_into().unwrap());
        if r == 0 || p < 2 {
            return Err(CacheError::Invalid(format!("bad parameters p={p}, r={r}")));
        }
        let q = checked_pow(p, r)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or_else(|| CacheError::Invalid(format!("field size p={p}^r={r} out of range")))?;
        let expected = 17 + 8 * (r as usize + 1) + 8 * r as usize + 4 * (q - 1) as usize + 4;
        if data.len() < expected {
            return Err(CacheError::Truncated);
        }
        if data.len() > expected {
            return Err(CacheError::Invalid(format!(
                "trailing data: file is {} bytes, format needs {expected}",
                data.len()
            )));
        }
        let body = &data[..expected - 4];
        let stored = u32::from_le_bytes(data[expected - 4..].try_into().unwrap());
        let mut hasher = crc32fast::Hasher::new();
        hasher.update(body);
        let computed = hasher.finalize();
        if stored != computed {
            return Err(CacheError::Checksum { stored, computed });
        }
        let mut off = 17;
        let read_u64 = |off: &mut usize| {
            let v = u64::from_le_bytes(data[*off..*off + 8].try_into().unwrap());
            *off += 8;
            v
        };
        let modulus: Vec<u64> = (0..=r).map(|_| read_u64(&mut off)).collect();
        let gamma: Vec<u64> = (0..r).map(|_| read_u64(&mut off)).collect();
        let mut index = Vec::with_capacity((q - 1) as usize);
        for _ in 0..(q - 1) {
            index.push(u32::from_le_bytes(data[off..off + 4].try_into().unwrap()));
            off += 4;
        }
        let field = IndexedField {
            p,
            r,
            q,
            modulus,
            gamma,
            index,
        };
        field.validate().map_err(CacheError::Invalid)?;
        Ok(field)
    }

    /// Cheap structural validation used after deserialization: the index must
    /// be a bijection onto [0, q-2] with index[1] = 0 and index[gamma] = 1.
    fn validate(&self) -> Result<(), String> {
        if !is_prime(self.p) {
            return Err(format!("p = {} is not prime", self.p));
        }
        let n = self.q - 1;
        let mut seen = vec![false; n as usize];
        for &v in &self.index {
            if v as u64 >= n {
                return Err(format!("index entry {v} out of range [0, {})", n));
            }
            if seen[v as usize] {
                return Err(format!("duplicate index entry {v}"));
            }
            seen[v as usize] = true;
        }
        if self.ind(1) != 0 {
            return Err("index of 1 is not 0".into());
        }
        let grank = rank_of_coeffs(&self.gamma, self.p);
        if n > 1 && self.ind(grank) != 1 {
            return Err("index of gamma is not 1".into());
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CacheError> {
        let data = std::fs::read(path)?;
        Self::from_bytes(&data)
    }

    /// Conventional cache file name for a (p, r) pair.
    pub fn cache_file_name(p: u64, r: u32) -> String {
        format!("jsix-p{p}-r{r}.tab")
    }

    /// Load the table from `dir` if a valid cache file exists, otherwise
    /// build and save it. Returns the field, the cache path, and whether the
    /// table was rebuilt. A corrupt cache file is an error, not silently
    /// rebuilt.
    pub fn load_or_build(p: u64, r: u32, dir: &Path) -> Result<(Self, PathBuf, bool), FieldCacheError> {
        let path = dir.join(Self::cache_file_name(p, r));
        if path.exists() {
            let field = Self::load(&path).map_err(FieldCacheError::Cache)?;
            if field.p != p || field.r != r {
                return Err(FieldCacheError::Cache(CacheError::Invalid(format!(
                    "cache file is for p={}, r={}, requested p={p}, r={r}",
                    field.p, field.r
                ))));
            }
            return Ok((field, path, false));
        }
        let field = Self::build(p, r).map_err(FieldCacheError::Field)?;
        field.save(&path).map_err(FieldCacheError::Cache)?;
        Ok((field, path, true))
    }
}

/// Error from [`IndexedField::load_or_build`], separating construction
/// failures from cache I/O failures.
#[derive(Debug, Error)]
pub enum FieldCacheError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

/// Summary used by the CLI and the demo page.
#[derive(Debug, Clone, Serialize)]
pub struct FieldSummary {
    pub p: u64,
    pub r: u32,
    pub q: u64,
    pub modulus: Vec<u64>,
    pub gamma: Vec<u64>,
    pub w: Option<u32>,
    pub cache_path: Option<String>,
}

impl FieldSummary {
    pub fn new(field: &IndexedField, cache_path: Option<String>) -> Self {
        FieldSummary {
            p: field.p(),
            r: field.r(),
            q: field.q(),
            modulus: field.modulus().to_vec(),
            gamma: field.gamma().to_vec(),
            w: field.ind2(),
            cache_path,
        }
    }
}

pub(crate) fn checked_pow(p: u64, r: u32) -> Option<u64> {
    let mut q: u64 = 1;
    for _ in 0..r {
        q = q.checked_mul(p)?;
        if q > MAX_FIELD_SIZE {
            return None;
        }
    }
    Some(q)
}

fn rank_of_coeffs(coeffs: &[u64], p: u64) -> u64 {
    let mut rank = 0;
    for &c in coeffs.iter().rev() {
        rank = rank * p + c;
    }
    rank
}

fn coeffs_of_rank(mut rank: u64, p: u64, r: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(r as usize);
    for _ in 0..r {
        out.push(rank % p);
        rank /= p;
    }
    out
}

fn is_one(poly: &[u64]) -> bool {
    poly[0] == 1 && poly[1..].iter().all(|&c| c == 0)
}

/// Schoolbook product of two coefficient vectors (length r) reduced by the
/// monic modulus. Coefficients stay below p <= 2^24, so the accumulator
/// cannot overflow u64 at r <= 24.
fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let r = a.len();
    if r == 1 {
        return vec![a[0] * b[0] % p];
    }
    let mut prod = vec![0u64; 2 * r - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
    }
    // reduce degrees >= r using the monic modulus
    for d in (r..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for (k, &mc) in modulus.iter().take(r).enumerate() {
            if mc != 0 {
                let sub = c * mc % p;
                let idx = d - r + k;
                prod[idx] = (prod[idx] + p - sub) % p;
            }
        }
    }
    prod.truncate(r);
    prod
}

fn poly_pow_mod(base: &[u64], mut exp: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let r = base.len();
    let mut result = vec![0u64; r];
    result[0] = 1;
    let mut acc = base.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            result = poly_mul_mod(&result, &acc, modulus, p);
        }
        exp >>= 1;
        if exp > 0 {
            acc = poly_mul_mod(&acc, &acc, modulus, p);
        }
    }
    result
}

fn poly_degree(poly: &[u64]) -> Option<usize> {
    poly.iter().rposition(|&c| c != 0)
}

/// Remainder of num divided by a (not necessarily monic) divisor over Z/p.
fn poly_rem(num: &[u64], den: &[u64], p: u64) -> Vec<u64> {
    let dd = poly_degree(den).expect("zero divisor");
    let lead_inv = crate::arith::mod_inverse(den[dd], p).expect("p prime");
    let mut rem = num.to_vec();
    for d in (dd..rem.len()).rev() {
        let c = rem[d];
        if c == 0 {
            continue;
        }
        let f = c * lead_inv % p;
        for (k, &mc) in den.iter().take(dd + 1).enumerate() {
            if mc != 0 {
                let sub = f * mc % p;
                let idx = d - dd + k;
                rem[idx] = (rem[idx] + p - sub) % p;
            }
        }
        debug_assert_eq!(rem[d], 0);
    }
    rem.truncate(dd.max(1));
    rem
}

/// Brute-force irreducibility: no monic factor of degree 1..=deg/2 divides.
/// Desk scale by design; the search space is p^(deg/2).
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = match poly_degree(poly) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if deg == 1 {
        return true;
    }
    for fd in 1..=deg / 2 {
        let count = p.pow(fd as u32);
        for m in 0..count {
            let mut f = coeffs_of_rank(m, p, fd as u32);
            f.push(1);
            let rem = poly_rem(poly, &f, p);
            if poly_degree(&rem).is_none() {
                return false;
            }
        }
    }
    true
}
