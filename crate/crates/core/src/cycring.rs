//! Exact arithmetic in cyclotomic rings Z[zeta_e].
//!
//! Elements are stored on the power basis {1, zeta, ..., zeta^{phi(e)-1}}
//! after reduction mod Phi_e, so two equal ring elements always have
//! identical coefficient vectors. Coefficients are arbitrary-precision
//! integers; nothing here ever wraps silently.
//!
//! Besides the ring operations this module provides the pieces the
//! congruence machinery is built from:
//!
//! * the change of representation between orders l^2 and 2l^2 (the two
//!   orders generate the same ring since zeta_{2m} = -zeta_m^{(m+1)/2} for
//!   odd m), see [`CycInt::embed_halforder`] / [`CycInt::project_halforder`];
//! * the (zeta-1)-power basis via [`CycInt::shift_basis`];
//! * the valuation at the ramified prime (1-zeta_{l^2}) above l, see
//!   [`CycInt::lambda_valuation`]. For a = sum a_i (zeta-1)^i the candidate
//!   term valuations i + phi(l^2)*v_l(a_i) are pairwise distinct (they are
//!   distinct mod phi(l^2)), so the minimum over nonzero terms is the exact
//!   valuation of the sum, not just a lower bound.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{divisors, euler_phi, gcd};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring order mismatch: {left} vs {right}")]
    OrderMismatch { left: u64, right: u64 },
    #[error("galois exponent {k} is not coprime to the order {e}")]
    NotCoprime { k: u64, e: u64 },
    #[error("operation requires an odd order, got e = {e}")]
    OddOrderRequired { e: u64 },
    #[error("operation requires an order 2m with m odd, got e = {e}")]
    HalfOrderRequired { e: u64 },
    #[error("operation requires order e = l^2 for l = {l}, got e = {e}")]
    NotPrimeSquare { e: u64, l: u64 },
    #[error("order must be at least 1")]
    ZeroOrder,
}

/// The e-th cyclotomic polynomial Phi_e, monic, as coefficients low degree
/// first (length phi(e) + 1). Computed by dividing x^e - 1 by Phi_d over the
/// proper divisors d of e; every division is exact.
pub fn cyclotomic_poly(e: u64) -> Vec<BigInt> {
    phi_poly(e).as_ref().clone()
}

static PHI_CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();

pub(crate) fn phi_poly(e: u64) -> Arc<Vec<BigInt>> {
    assert!(e >= 1, "cyclotomic polynomial order must be >= 1");
    let cache = PHI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&e) {
        return Arc::clone(p);
    }
    let computed = Arc::new(phi_poly_uncached(e));
    cache
        .lock()
        .unwrap()
        .entry(e)
        .or_insert_with(|| Arc::clone(&computed));
    computed
}

fn phi_poly_uncached(e: u64) -> Vec<BigInt> {
    // x^e - 1
    let mut cur = vec![BigInt::zero(); e as usize + 1];
    cur[0] = -BigInt::one();
    cur[e as usize] = BigInt::one();
    for d in divisors(e) {
        if d == e {
            continue;
        }
        cur = poly_exact_div(&cur, &phi_poly(d));
    }
    cur
}

/// Exact division of integer polynomials (divisor monic); panics if the
/// division leaves a remainder, which cannot happen for cyclotomic factors.
fn poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let mut rem = num.to_vec();
    let qd = num.len() - 1 - dd;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = std::mem::take(&mut rem[k + dd]);
        if c.is_zero() {
            continue;
        }
        for (i, dc) in den.iter().take(dd).enumerate() {
            if !dc.is_zero() {
                rem[k + i] -= &c * dc;
            }
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// Histogram of root-of-unity exponents: counts[t] is the multiplicity of
/// zeta_e^t accumulated by a character-sum sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpHistogram {
    e: u64,
    counts: Vec<u64>,
}

impl ExpHistogram {
    pub fn new(e: u64) -> Self {
        assert!(e >= 1);
        ExpHistogram {
            e,
            counts: vec![0; e as usize],
        }
    }

    pub fn from_counts(e: u64, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), e as usize);
        ExpHistogram { e, counts }
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn bump(&mut self, t: u64) {
        self.counts[t as usize] += 1;
    }

    pub fn add(&mut self, t: u64, weight: u64) {
        self.counts[t as usize] += weight;
    }

    pub fn merge(&mut self, other: &ExpHistogram) {
        assert_eq!(self.e, other.e);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Total multiplicity; a full Jacobi-sum sweep accumulates exactly q - 2.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Valuation at the ramified prime: either a finite order or infinite (for
/// the zero element).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn at_least(&self, m: u64) -> bool {
        match self {
            Valuation::Finite(v) => *v >= m,
            Valuation::Infinite => true,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Valuation::Finite(v) => serde_json::json!(v),
            Valuation::Infinite => serde_json::json!("inf"),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of Z[zeta_e] in canonical form: exactly phi(e) coefficients on
/// the power basis, fully reduced mod Phi_e.
#[derive(Clone, PartialEq, Eq)]
pub struct CycInt {
    e: u64,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(e: u64) -> Self {
        assert!(e >= 1);
        CycInt {
            e,
            coeffs: vec![BigInt::zero(); euler_phi(e) as usize],
        }
    }

    pub fn one(e: u64) -> Self {
        Self::integer(e, BigInt::one())
    }

    /// The constant `n` as a ring element.
    pub fn integer(e: u64, n: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(e);
        let n = n.into();
        if z.coeffs.is_empty() {
            // e = 1 or 2 have phi = 1, never empty; defensive only.
            z.coeffs.push(n);
        } else {
            z.coeffs[0] = n;
        }
        z
    }

    /// zeta_e^t in canonical form (t is reduced mod e).
    pub fn root_of_unity(e: u64, t: u64) -> Self {
        let mut poly = vec![BigInt::zero(); e as usize];
        poly[(t % e) as usize] = BigInt::one();
        Self::reduce_poly(e, poly)
    }

    /// Canonicalize an integer polynomial in zeta_e of any degree < its
    /// length: exact synthetic division by the monic Phi_e.
    pub fn reduce_poly(e: u64, mut poly: Vec<BigInt>) -> Self {
        let phi = phi_poly(e);
        let deg = phi.len() - 1;
        if poly.len() < deg {
            poly.resize(deg, BigInt::zero());
        }
        for d in (deg..poly.len()).rev() {
            let c = std::mem::take(&mut poly[d]);
            if c.is_zero() {
                continue;
            }
            // x^deg = -sum_{k<deg} Phi[k] x^k, shifted up by d - deg
            for (k, pc) in phi.iter().take(deg).enumerate() {
                if !pc.is_zero() {
                    poly[d - deg + k] -= &c * pc;
                }
            }
        }
        poly.truncate(deg);
        CycInt { e, coeffs: poly }
    }

    /// Canonical element from a histogram of exponents.
    pub fn reduce(h: &ExpHistogram) -> Self {
        let poly = h.counts.iter().map(|&c| BigInt::from(c)).collect();
        Self::reduce_poly(h.e, poly)
    }

    /// Element from exactly phi(e) canonical coefficients.
    pub fn from_coeffs(e: u64, coeffs: Vec<BigInt>) -> Self {
        assert_eq!(coeffs.len() as u64, euler_phi(e), "wrong coefficient count");
        CycInt { e, coeffs }
    }

    pub fn from_i64_coeffs(e: u64, coeffs: &[i64]) -> Self {
        Self::from_coeffs(e, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn order(&self) -> u64 {
        self.e
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn order_check(&self, other: &CycInt) -> Result<(), RingError> {
        if self.e != other.e {
            return Err(RingError::OrderMismatch {
                left: self.e,
                right: other.e,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &CycInt) -> Result<CycInt, RingError> {
        self.order_check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycInt { e: self.e, coeffs })
    }

    pub fn checked_sub(&self, other: &CycInt) -> Result<CycInt, RingError> {
        self.order_check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycInt { e: self.e, coeffs })
    }

    pub fn negate(&self) -> CycInt {
        CycInt {
            e: self.e,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn checked_mul(&self, other: &CycInt) -> Result<CycInt, RingError> {
        self.order_check(other)?;
        let n = self.coeffs.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(Self::reduce_poly(self.e, prod))
    }

    /// Multiply by the monomial zeta_e^t.
    pub fn mul_root(&self, t: u64) -> CycInt {
        let t = t % self.e;
        let mut poly = vec![BigInt::zero(); self.coeffs.len() + t as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i + t as usize] = c.clone();
        }
        Self::reduce_poly(self.e, poly)
    }

    pub fn scale(&self, n: &BigInt) -> CycInt {
        CycInt {
            e: self.e,
            coeffs: self.coeffs.iter().map(|c| c * n).collect(),
        }
    }

    /// The Galois action zeta_e -> zeta_e^k for gcd(k, e) = 1.
    pub fn galois(&self, k: u64) -> Result<CycInt, RingError> {
        let k = k % self.e;
        if gcd(k, self.e) != 1 {
            return Err(RingError::NotCoprime { k, e: self.e });
        }
        let mut poly = vec![BigInt::zero(); self.e as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[(i as u64 * k % self.e) as usize] += c;
            }
        }
        Ok(Self::reduce_poly(self.e, poly))
    }

    /// Complex conjugation zeta -> zeta^{-1}.
    pub fn conj(&self) -> CycInt {
        self.galois(self.e - 1).expect("e-1 is coprime to e")
    }

    /// Re-represent an element of Z[zeta_m] (m odd) at order 2m via
    /// zeta_m = zeta_{2m}^2. Together with [`CycInt::project_halforder`]
    /// this is a ring isomorphism, since zeta_{2m} = -zeta_m^{(m+1)/2}.
    pub fn embed_halforder(&self) -> Result<CycInt, RingError> {
        if self.e % 2 == 0 {
            return Err(RingError::OddOrderRequired { e: self.e });
        }
        let e2 = 2 * self.e;
        let mut poly = vec![BigInt::zero(); e2 as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[(2 * i as u64 % e2) as usize] += c;
            }
        }
        Ok(Self::reduce_poly(e2, poly))
    }

    /// Inverse of [`CycInt::embed_halforder`]: substitute
    /// zeta_{2m} = -zeta_m^{(m+1)/2} and land back at order m.
    pub fn project_halforder(&self) -> Result<CycInt, RingError> {
        if self.e % 2 != 0 || (self.e / 2) % 2 == 0 {
            return Err(RingError::HalfOrderRequired { e: self.e });
        }
        let m = self.e / 2;
        let s = (m + 1) / 2;
        let mut poly = vec![BigInt::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = (i as u64 * s % m) as usize;
            if i % 2 == 0 {
                poly[t] += c;
            } else {
                poly[t] -= c;
            }
        }
        Ok(Self::reduce_poly(m, poly))
    }

    /// Coefficients (a_0, ..., a_{phi(e)-1}) with a = sum a_i (zeta-1)^i:
    /// the Taylor shift P(x+1) of the canonical polynomial.
    pub fn shift_basis(&self) -> Vec<BigInt> {
        taylor_shift(&self.coeffs, 1)
    }

    /// Rebuild an element from its (zeta-1)-basis coefficients.
    pub fn from_shift_basis(e: u64, shifted: &[BigInt]) -> CycInt {
        assert_eq!(shifted.len() as u64, euler_phi(e));
        CycInt {
            e,
            coeffs: taylor_shift(shifted, -1),
        }
    }

    /// Order of vanishing at the prime (1 - zeta_{l^2}) above l; requires
    /// e = l^2. Infinite for the zero element.
    ///
    /// ```
    /// use jsum_core::cycring::{CycInt, Valuation};
    ///
    /// // (l) = (1 - zeta)^{phi(l^2)}: the constant 3 has valuation 6 at l = 3
    /// let three = CycInt::integer(9, 3);
    /// assert_eq!(three.lambda_valuation(3)?, Valuation::Finite(6));
    /// # Ok::<(), jsum_core::cycring::RingError>(())
    /// ```
    pub fn lambda_valuation(&self, l: u64) -> Result<Valuation, RingError> {
        if l < 2 || self.e != l * l {
            return Err(RingError::NotPrimeSquare { e: self.e, l });
        }
        let shifted = self.shift_basis();
        let phi = shifted.len() as u64;
        let mut best: Option<u64> = None;
        for (i, a) in shifted.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let v = i as u64 + phi * int_valuation(a, l);
            best = Some(match best {
                Some(b) => b.min(v),
                None => v,
            });
        }
        Ok(match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::Infinite,
        })
    }

    /// Whether a = b mod (1 - zeta_{l^2})^m.
    pub fn congruent(a: &CycInt, b: &CycInt, m: u64, l: u64) -> Result<bool, RingError> {
        let diff = a.checked_sub(b)?;
        Ok(diff.lambda_valuation(l)?.at_least(m))
    }
}

/// l-adic valuation of a nonzero integer.
fn int_valuation(a: &BigInt, l: u64) -> u64 {
    debug_assert!(!a.is_zero());
    let lb = BigInt::from(l);
    let mut x = a.clone();
    let mut v = 0;
    loop {
        let (q, r) = num_integer_div_rem(&x, &lb);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    (a / b, a % b)
}

/// Coefficients of P(x + c) for integer c, same length as the input.
fn taylor_shift(coeffs: &[BigInt], c: i64) -> Vec<BigInt> {
    let n = coeffs.len();
    let cc = BigInt::from(c);
    let mut q = vec![BigInt::zero(); n];
    for a in coeffs.iter().rev() {
        // q <- q * (x + c) + a
        for i in (1..n).rev() {
            let t = &q[i] * &cc + &q[i - 1];
            q[i] = t;
        }
        if n > 0 {
            let t = &q[0] * &cc + a;
            q[0] = t;
        }
    }
    q
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt(e={}, {})", self.e, self)
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let var = if i == 1 { "z".to_string() } else { format!("z^{i}") };
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl std::ops::Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.checked_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl std::ops::Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.checked_sub(rhs).expect("cyclotomic order mismatch")
    }
}

impl std::ops::Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.checked_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl std::ops::Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.negate()
    }
}

// JSON shape: {"e": 18, "coeffs": ["2", "1", "0", "-4", "1", "-2"]}.
// Coefficients are decimal strings so values above 2^53 survive any JSON
// consumer untouched.
impl Serialize for CycInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CycInt", 2)?;
        st.serialize_field("e", &self.e)?;
        let strings: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coeffs", &strings)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CycInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            e: u64,
            coeffs: Vec<String>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.e < 1 {
            return Err(D::Error::custom("order must be >= 1"));
        }
        if raw.coeffs.len() as u64 != euler_phi(raw.e) {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for e = {}, got {}",
                euler_phi(raw.e),
                raw.e,
                raw.coeffs.len()
            )));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CycInt { e: raw.e, coeffs })
    }
}
