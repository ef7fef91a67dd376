//! The numerical lattice of the surface and the algebraic Mukai lattice.
//!
//! A Mukai vector `(r, c1, s/2)` is stored with the doubled third component
//! `s`, so every coordinate is an integer and `r ≡ s (mod 2)`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, int, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MukaiVector {
    pub r: BigInt,
    pub c1: Vec<BigInt>,
    /// Twice the displayed third component.
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(r: BigInt, c1: Vec<BigInt>, s: BigInt) -> Result<Self> {
        if (&r - &s).is_odd() {
            return Err(Error::Parity { r: r.to_string(), s: s.to_string() });
        }
        Ok(MukaiVector { r, c1, s })
    }

    /// Builds from machine integers; `s` is the doubled third component.
    ///
    /// Panics on a parity violation, so it is meant for literals.
    pub fn from_ints(r: i64, c1: &[i64], s: i64) -> Self {
        Self::new(int(r), c1.iter().map(|&x| int(x)).collect(), int(s)).expect("r and s must have equal parity")
    }

    pub fn zero(rho: usize) -> Self {
        MukaiVector { r: BigInt::zero(), c1: vec![BigInt::zero(); rho], s: BigInt::zero() }
    }

    pub fn rho(&self) -> usize {
        self.c1.len()
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero() && self.c1.iter().all(Zero::is_zero)
    }

    /// The displayed third component `s/2`.
    pub fn third(&self) -> Q {
        Q::new(self.s.clone(), int(2))
    }

    /// Integral coordinates `(r, c1, (r+s)/2)` in a basis of the Mukai lattice.
    pub fn coords(&self) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.c1.len() + 2);
        out.push(self.r.clone());
        out.extend(self.c1.iter().cloned());
        out.push((&self.r + &self.s) / 2);
        out
    }

    pub fn from_coords(x: &[BigInt]) -> Self {
        let n = x.len();
        let r = x[0].clone();
        let k = &x[n - 1];
        let s = k * 2 - &r;
        MukaiVector { r, c1: x[1..n - 1].to_vec(), s }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        MukaiVector { r: &self.r * k, c1: self.c1.iter().map(|c| c * k).collect(), s: &self.s * k }
    }

    pub fn scale_i(&self, k: i64) -> Self {
        self.scale(&int(k))
    }

    /// Divides exactly; `None` if some coordinate is not divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<Self> {
        let c = self.coords();
        if c.iter().any(|x| !x.is_multiple_of(k)) {
            return None;
        }
        Some(Self::from_coords(&c.iter().map(|x| x / k).collect::<Vec<_>>()))
    }

    /// `gcd(r, c1, (r+s)/2)`, the index of divisibility in the Mukai lattice.
    pub fn divisibility(&self) -> BigInt {
        arith::gcd_all(self.coords().iter())
    }

    /// Splits `v = m * b` with `b` primitive and `m > 0`.
    pub fn primitive_part(&self) -> Result<(BigInt, MukaiVector)> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        let m = self.divisibility();
        let b = self.div_exact(&m).expect("gcd divides every coordinate");
        Ok((m, b))
    }

    pub fn c1_residue(&self) -> Vec<u8> {
        self.c1.iter().map(|c| if c.is_odd() { 1 } else { 0 }).collect()
    }
}

impl Add for &MukaiVector {
    type Output = MukaiVector;
    fn add(self, o: &MukaiVector) -> MukaiVector {
        assert_eq!(self.rho(), o.rho(), "rank mismatch");
        MukaiVector {
            r: &self.r + &o.r,
            c1: self.c1.iter().zip(&o.c1).map(|(a, b)| a + b).collect(),
            s: &self.s + &o.s,
        }
    }
}

impl Sub for &MukaiVector {
    type Output = MukaiVector;
    fn sub(self, o: &MukaiVector) -> MukaiVector {
        assert_eq!(self.rho(), o.rho(), "rank mismatch");
        MukaiVector {
            r: &self.r - &o.r,
            c1: self.c1.iter().zip(&o.c1).map(|(a, b)| a - b).collect(),
            s: &self.s - &o.s,
        }
    }
}

impl Neg for &MukaiVector {
    type Output = MukaiVector;
    fn neg(self) -> MukaiVector {
        MukaiVector { r: -&self.r, c1: self.c1.iter().map(|c| -c).collect(), s: -&self.s }
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c1: Vec<String> = self.c1.iter().map(|c| c.to_string()).collect();
        write!(f, "({}, [{}], {})", self.r, c1.join(","), arith::rational_to_string(&self.third()))
    }
}

#[derive(Serialize, Deserialize)]
struct MukaiJson {
    r: serde_json::Value,
    c1: Vec<serde_json::Value>,
    s2: serde_json::Value,
}

impl Serialize for MukaiVector {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        MukaiJson {
            r: self.r.to_string().into(),
            c1: self.c1.iter().map(|c| c.to_string().into()).collect(),
            s2: format!("{}/2", self.s).into(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MukaiVector {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = MukaiJson::deserialize(de)?;
        let r = arith::int_from_json(&j.r).map_err(D::Error::custom)?;
        let c1 = j.c1.iter().map(arith::int_from_json).collect::<std::result::Result<Vec<_>, _>>().map_err(D::Error::custom)?;
        let third = arith::rational_from_json(&j.s2).map_err(D::Error::custom)?;
        let s2 = third * arith::q(2);
        if !s2.is_integer() {
            return Err(D::Error::custom("s2 must be a multiple of 1/2"));
        }
        MukaiVector::new(r, c1, s2.to_integer()).map_err(D::Error::custom)
    }
}

/// `c1 mod 2` together with the coefficient of `K_X` mod 2.
/// A Mukai vector with rational entries, for reflections in non-integral
/// classes and for numerical polarisations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalVector {
    pub r: Q,
    pub c1: Vec<Q>,
    /// The displayed third component (not doubled).
    pub t: Q,
}

impl RationalVector {
    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.t.is_zero() && self.c1.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Q) -> Self {
        RationalVector { r: &self.r * k, c1: self.c1.iter().map(|c| c * k).collect(), t: &self.t * k }
    }

    pub fn add(&self, o: &Self) -> Self {
        RationalVector { r: &self.r + &o.r, c1: self.c1.iter().zip(&o.c1).map(|(a, b)| a + b).collect(), t: &self.t + &o.t }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    /// The integral vector, if all entries are integral and the parity holds.
    pub fn to_mukai(&self) -> Option<MukaiVector> {
        let s = &self.t * Q::from_integer(int(2));
        if !self.r.is_integer() || !s.is_integer() || !self.c1.iter().all(|c| c.is_integer()) {
            return None;
        }
        MukaiVector::new(self.r.to_integer(), self.c1.iter().map(|c| c.to_integer()).collect(), s.to_integer()).ok()
    }
}

impl From<&MukaiVector> for RationalVector {
    fn from(v: &MukaiVector) -> Self {
        RationalVector { r: Q::from_integer(v.r.clone()), c1: v.c1.iter().map(|c| Q::from_integer(c.clone())).collect(), t: v.third() }
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.c1.iter().map(arith::rational_to_string).collect();
        write!(f, "({}, [{}], {})", arith::rational_to_string(&self.r), c.join(","), arith::rational_to_string(&self.t))
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            r: String,
            c1: Vec<String>,
            third: String,
        }
        Repr {
            r: arith::rational_to_string(&self.r),
            c1: self.c1.iter().map(arith::rational_to_string).collect(),
            third: arith::rational_to_string(&self.t),
        }
        .serialize(ser)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParityClass {
    pub eps: Vec<u8>,
    pub kappa: u8,
}

impl ParityClass {
    pub fn is_even(&self) -> bool {
        self.eps.iter().all(|&e| e == 0)
    }

    pub fn label(&self) -> &'static str {
        if self.kappa == 0 {
            "L"
        } else {
            "L+K"
        }
    }
}

/// The two determinant classes `L` and `L + K_X` lying over `c1(v)`.
pub fn det_parities(v: &MukaiVector) -> (ParityClass, ParityClass) {
    let eps = v.c1_residue();
    (ParityClass { eps: eps.clone(), kappa: 0 }, ParityClass { eps, kappa: 1 })
}

/// Gram matrix of `Num(X)` plus the mod-2 residues of nodal cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    gram: Vec<Vec<BigInt>>,
    nodal: BTreeSet<Vec<u8>>,
    name: String,
}

impl SurfaceModel {
    pub fn new(gram: Vec<Vec<BigInt>>, nodal: impl IntoIterator<Item = Vec<u8>>, name: impl Into<String>) -> Result<Self> {
        let rho = gram.len();
        if rho == 0 {
            return Err(Error::InvalidSurface("empty Gram matrix".into()));
        }
        if gram.iter().any(|row| row.len() != rho) {
            return Err(Error::InvalidSurface("Gram matrix is not square".into()));
        }
        for i in 0..rho {
            if gram[i][i].is_odd() {
                return Err(Error::InvalidSurface(format!("diagonal entry {i} is odd")));
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidSurface(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        let d = arith::det(&gram);
        if d.abs() != BigInt::one() {
            return Err(Error::InvalidSurface(format!("determinant is {d}, not ±1")));
        }
        let qg: Vec<Vec<Q>> = gram.iter().map(|r| r.iter().map(arith::qi).collect()).collect();
        let (p, n, z) = arith::inertia(&qg);
        if p != 1 || n != rho - 1 || z != 0 {
            return Err(Error::InvalidSurface(format!("signature is ({p},{n}), expected (1,{})", rho - 1)));
        }
        let mut set = BTreeSet::new();
        for d in nodal {
            if d.len() != rho || d.iter().any(|&b| b > 1) {
                return Err(Error::InvalidSurface("nodal residue must be a 0/1 vector of length rho".into()));
            }
            set.insert(d);
        }
        Ok(SurfaceModel { gram, nodal: set, name: name.into() })
    }

    /// `U ⊕ E8(-1)`, the numerical lattice shared by all Enriques surfaces.
    pub fn enriques(nodal: impl IntoIterator<Item = Vec<u8>>) -> Result<Self> {
        let mut g = vec![vec![BigInt::zero(); 10]; 10];
        g[0][1] = int(1);
        g[1][0] = int(1);
        // E8 Dynkin diagram: chain 0-1-2-3-4-5-6 with node 7 attached to 4
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
        for i in 0..8 {
            g[2 + i][2 + i] = int(-2);
        }
        for (a, b) in edges {
            g[2 + a][2 + b] = int(1);
            g[2 + b][2 + a] = int(1);
        }
        Self::new(g, nodal, "U+E8(-1)")
    }

    /// The default unnodal Enriques model.
    pub fn unnodal() -> Self {
        Self::enriques(std::iter::empty()).expect("U+E8(-1) is valid")
    }

    /// The hyperbolic plane `U` alone, a convenient small model.
    pub fn hyperbolic_plane(nodal: impl IntoIterator<Item = Vec<u8>>) -> Result<Self> {
        Self::new(vec![vec![int(0), int(1)], vec![int(1), int(0)]], nodal, "U")
    }

    pub fn rho(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    pub fn nodal(&self) -> &BTreeSet<Vec<u8>> {
        &self.nodal
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_nodal_residue(&self, eps: &[u8]) -> bool {
        self.nodal.contains(eps)
    }

    pub fn check(&self, v: &MukaiVector) -> Result<()> {
        if v.rho() != self.rho() {
            return Err(Error::DimensionMismatch { expected: self.rho(), found: v.rho() });
        }
        Ok(())
    }

    /// Intersection form on `Num(X)`.
    pub fn dot(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let g = &self.gram[i][j];
                if !g.is_zero() && !bj.is_zero() {
                    acc += ai * g * bj;
                }
            }
        }
        acc
    }

    /// The Mukai pairing. Vectors are assumed to match the surface rank.
    pub fn pair(&self, a: &MukaiVector, b: &MukaiVector) -> BigInt {
        debug_assert_eq!(a.rho(), self.rho());
        debug_assert_eq!(b.rho(), self.rho());
        self.dot(&a.c1, &b.c1) - (&a.r * &b.s + &b.r * &a.s) / 2
    }

    pub fn square(&self, a: &MukaiVector) -> BigInt {
        self.pair(a, a)
    }

    pub fn pair_q(&self, a: &RationalVector, b: &RationalVector) -> Q {
        let mut acc = Q::zero();
        for (i, ai) in a.c1.iter().enumerate() {
            for (j, bj) in b.c1.iter().enumerate() {
                if !self.gram[i][j].is_zero() {
                    acc += ai * Q::from_integer(self.gram[i][j].clone()) * bj;
                }
            }
        }
        acc - (&a.r * &b.t + &b.r * &a.t)
    }

    /// Gram matrix of the full Mukai lattice in the coordinates of
    /// [`MukaiVector::coords`].
    pub fn extended_gram(&self) -> Vec<Vec<BigInt>> {
        let n = self.rho() + 2;
        let mut g = vec![vec![BigInt::zero(); n]; n];
        g[0][0] = int(1);
        g[0][n - 1] = int(-1);
        g[n - 1][0] = int(-1);
        for i in 0..self.rho() {
            for j in 0..self.rho() {
                g[1 + i][1 + j] = self.gram[i][j].clone();
            }
        }
        g
    }

    /// Parses `{"gram": [[..]], "nodal": [[bits]], "name": str}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let gram = v
            .get("gram")
            .and_then(|g| g.as_array())
            .ok_or_else(|| Error::Parse("surface needs a \"gram\" array".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("gram rows must be arrays".into()))?
                    .iter()
                    .map(|x| arith::int_from_json(x).map_err(Error::Parse))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let nodal = match v.get("nodal") {
            None | Some(serde_json::Value::Null) => Vec::new(),
            Some(n) => n
                .as_array()
                .ok_or_else(|| Error::Parse("\"nodal\" must be an array".into()))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| Error::Parse("nodal residues must be arrays".into()))?
                        .iter()
                        .map(|b| match arith::int_from_json(b).map_err(Error::Parse)? {
                            x if x.is_zero() => Ok(0u8),
                            x if x.is_one() => Ok(1u8),
                            x => Err(Error::Parse(format!("nodal bit {x} is not 0 or 1"))),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let name = v.get("name").and_then(|n| n.as_str()).unwrap_or("surface");
        Self::new(gram, nodal, name)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "gram": self.gram.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "nodal": self.nodal.iter().cloned().collect::<Vec<_>>(),
            "name": self.name,
        })
    }
}

/// Mukai pairing with a rank check.
pub fn mukai_pair(a: &MukaiVector, b: &MukaiVector, s: &SurfaceModel) -> Result<BigInt> {
    s.check(a)?;
    s.check(b)?;
    Ok(s.pair(a, b))
}

/// `gcd(r, c1, (r+s)/2) == 1`.
pub fn is_primitive(v: &MukaiVector) -> Result<bool> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.divisibility().is_one())
}

/// `ℓ(v) = gcd(r, c1, s)` for primitive `v`; always 1 or 2.
pub fn ell(v: &MukaiVector) -> Result<u8> {
    if !is_primitive(v)? {
        return Err(Error::NotPrimitive);
    }
    let mut xs = v.c1.clone();
    xs.push(v.r.clone());
    xs.push(v.s.clone());
    let g = arith::gcd_all(xs.iter());
    let l: u8 = if g == int(1) {
        1
    } else if g == int(2) {
        2
    } else {
        return Err(Error::Invariant(format!("gcd(r,c1,s) = {g} for a primitive vector")));
    };
    if l == 2 && (&v.r + &v.s).mod_floor(&int(4)) != int(2) {
        return Err(Error::Invariant("ℓ = 2 but r + s is not 2 mod 4".into()));
    }
    if l == 1 && v.r.is_even() && v.c1.iter().all(|c| c.is_even()) {
        return Err(Error::Invariant("ℓ = 1 but r and c1 are all even".into()));
    }
    Ok(l)
}
