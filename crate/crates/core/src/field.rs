//! Table-driven arithmetic in GF(p^k) for field orders up to 256.
//!
//! Elements are encoded as integers `0..q`: the base-`p` digits of an element
//! are its polynomial coefficients, lowest degree first. Prime fields therefore
//! use the plain residues `0..p`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primitive moduli for the binary fields, as bit masks including the
/// leading term.
const BINARY_MODULI: [(u32, u32); 8] = [
    (1, 0b11),
    (2, 0b111),
    (3, 0b1011),
    (4, 0x13),
    (5, 0x25),
    (6, 0x43),
    (7, 0x89),
    (8, 0x11D),
];

#[derive(Clone, Debug)]
pub struct Field {
    p: usize,
    k: usize,
    q: usize,
    /// Monic modulus, coefficients lowest degree first.
    modulus: Vec<usize>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl Field {
    /// GF(q) for a prime power `q <= 256`. Binary fields use a fixed
    /// primitive modulus; odd characteristic uses the smallest monic
    /// irreducible polynomial under the integer encoding.
    pub fn with_order(q: usize) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > 256 {
            return Err(Error::InvalidParameter(format!(
                "field order {q} exceeds 256"
            )));
        }
        let modulus = if p == 2 {
            let bits = BINARY_MODULI[k - 1].1;
            (0..=k).map(|i| ((bits >> i) & 1) as usize).collect()
        } else {
            smallest_irreducible(p, k)
        };
        Field::new(p, k, modulus)
    }

    pub fn new(p: usize, k: usize, modulus: Vec<usize>) -> Result<Self> {
        if !is_prime(p) || k == 0 {
            return Err(Error::InvalidParameter(format!("GF({p}^{k}) is not a field")));
        }
        let q = p.pow(k as u32);
        if q > 256 {
            return Err(Error::InvalidParameter(format!("field order {q} exceeds 256")));
        }
        if modulus.len() != k + 1 || modulus[k] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParameter("modulus must be monic of degree k".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidParameter("modulus is reducible".into()));
        }

        let digits: Vec<Vec<usize>> = (0..q).map(|e| to_digits(e, p, k)).collect();
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let sum: Vec<usize> = digits[a]
                    .iter()
                    .zip(&digits[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * q + b] = from_digits(&sum, p) as u8;
                let prod = poly_mul_mod(&digits[a], &digits[b], &modulus, p);
                mul[a * q + b] = from_digits(&prod, p) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..q)
                    .find(|&b| mul[a * q + b] == 1)
                    .expect("irreducible modulus gives inverses") as u8;
            }
        }
        Ok(Field {
            p,
            k,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn order(&self) -> usize {
        self.q
    }
    pub fn characteristic(&self) -> usize {
        self.p
    }
    pub fn degree(&self) -> usize {
        self.k
    }
    pub fn modulus(&self) -> &[usize] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }
    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }
    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv[a as usize])
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u8, mut e: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        (0..self.q).map(|e| e as u8)
    }
}

/// The binary extension fields offered to the MDS codec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSpec {
    /// GF(16), modulus x^4 + x + 1.
    Gf16,
    /// GF(256), modulus x^8 + x^4 + x^3 + x^2 + 1.
    Gf256,
}

impl FieldSpec {
    pub fn id(self) -> u16 {
        match self {
            FieldSpec::Gf16 => 1,
            FieldSpec::Gf256 => 2,
        }
    }

    pub fn from_id(id: u16) -> Result<Self> {
        match id {
            1 => Ok(FieldSpec::Gf16),
            2 => Ok(FieldSpec::Gf256),
            other => Err(Error::Parse(format!("unknown field id {other}"))),
        }
    }

    pub fn field(self) -> &'static Field {
        static GF16: OnceLock<Field> = OnceLock::new();
        static GF256: OnceLock<Field> = OnceLock::new();
        match self {
            FieldSpec::Gf16 => GF16.get_or_init(|| Field::with_order(16).unwrap()),
            FieldSpec::Gf256 => GF256.get_or_init(|| Field::with_order(256).unwrap()),
        }
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `q = p^k` with `p` prime, if it is one.
pub fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

fn to_digits(mut e: usize, p: usize, k: usize) -> Vec<usize> {
    let mut d = vec![0; k];
    for slot in d.iter_mut() {
        *slot = e % p;
        e /= p;
    }
    d
}

fn from_digits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn poly_mul_mod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let k = modulus.len() - 1;
    let mut prod = vec![0usize; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&mut prod, modulus, p);
    prod.truncate(k);
    prod.resize(k, 0);
    prod
}

/// Reduces `a` modulo the monic polynomial `m` in place.
fn poly_rem(a: &mut [usize], m: &[usize], p: usize) {
    let dm = m.len() - 1;
    for top in (dm..a.len()).rev() {
        let c = a[top];
        if c == 0 {
            continue;
        }
        for (i, &mc) in m.iter().enumerate() {
            let idx = top - dm + i;
            a[idx] = (a[idx] + (p - c) * mc) % p;
        }
    }
}

fn is_irreducible(f: &[usize], p: usize) -> bool {
    let k = f.len() - 1;
    for deg in 1..=k / 2 {
        // every monic polynomial of this degree
        for low in 0..p.pow(deg as u32) {
            let mut g = to_digits(low, p, deg);
            g.push(1);
            let mut rem = f.to_vec();
            poly_rem(&mut rem, &g, p);
            if rem[..deg].iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: usize, k: usize) -> Vec<usize> {
    (0..p.pow(k as u32))
        .map(|low| {
            let mut f = to_digits(low, p, k);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}
