//! Pell equations `x² − D y² = N` for `N ∈ {1, 2}` and the root sequences
//! they generate inside a rank-two hyperbolic lattice.

use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int};
use crate::error::{Error, Result};
use crate::lattice::{MukaiVector, SurfaceModel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellSolution {
    #[serde(with = "crate::arith::serde_str")]
    pub x: BigInt,
    #[serde(with = "crate::arith::serde_str")]
    pub y: BigInt,
    #[serde(with = "crate::arith::serde_str")]
    pub d: BigInt,
    pub n: u8,
}

impl PellSolution {
    pub fn holds(&self) -> bool {
        &self.x * &self.x - &self.d * &self.y * &self.y == int(self.n as i64)
    }
}

/// Partial quotients of one period of the continued fraction of `√D`,
/// together with `a0 = ⌊√D⌋`.
pub fn sqrt_cf_period(d: &BigInt) -> (BigInt, Vec<BigInt>) {
    let a0 = arith::isqrt(d);
    let mut period = Vec::new();
    let (mut m, mut q, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let two_a0 = &a0 * 2;
    loop {
        m = &q * &a - &m;
        q = (d - &m * &m) / &q;
        a = (&a0 + &m) / &q;
        period.push(a.clone());
        if a == two_a0 {
            break;
        }
    }
    (a0, period)
}

/// Minimal solution in positive integers of `x² − D y² = N`, `N ∈ {1, 2}`.
///
/// For `N = 1` a solution always exists; for `N = 2` the answer is `None`
/// when the equation is insoluble.
pub fn pell_fundamental(d: &BigInt, n: u8) -> Result<Option<PellSolution>> {
    if !d.is_positive() {
        return Err(Error::Precondition(format!("D = {d} must be positive")));
    }
    if arith::exact_sqrt(d).is_some() {
        return Err(Error::PerfectSquare(d.to_string()));
    }
    if n != 1 && n != 2 {
        return Err(Error::Precondition(format!("N = {n} is not 1 or 2")));
    }
    let target = int(n as i64);
    if n == 2 && *d < int(5) {
        // √D < 2 here, so solutions need not be convergents; D = 2 has (2, 1)
        // and D = 3 is insoluble mod 3.
        return Ok((*d == int(2)).then(|| PellSolution { x: int(2), y: int(1), d: d.clone(), n }));
    }
    let (a0, period) = sqrt_cf_period(d);
    // Convergents p_k / q_k over two periods cover every sign pattern.
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let steps = 2 * period.len();
    for k in 0..=steps {
        if &p * &p - d * &q * &q == target {
            return Ok(Some(PellSolution { x: p, y: q, d: d.clone(), n }));
        }
        if k == steps {
            break;
        }
        let a = &period[k % period.len()];
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    if n == 1 {
        return Err(Error::Invariant(format!("no unit found for D = {d}")));
    }
    Ok(None)
}

/// `(a + b√D) / 2^k`, kept reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd2 {
    pub a: BigInt,
    pub b: BigInt,
    pub k: u32,
    pub d: BigInt,
}

impl Surd2 {
    pub fn new(a: BigInt, b: BigInt, k: u32, d: BigInt) -> Self {
        let mut s = Surd2 { a, b, k, d };
        s.reduce();
        s
    }

    pub fn one(d: &BigInt) -> Self {
        Surd2::new(BigInt::one(), BigInt::zero(), 0, d.clone())
    }

    fn reduce(&mut self) {
        while self.k > 0 && self.a.is_even() && self.b.is_even() {
            self.a /= 2;
            self.b /= 2;
            self.k -= 1;
        }
    }

    pub fn conj(&self) -> Self {
        Surd2 { a: self.a.clone(), b: -&self.b, k: self.k, d: self.d.clone() }
    }

    /// The norm as a rational `num / 4^k`.
    pub fn norm(&self) -> arith::Q {
        let num = &self.a * &self.a - &self.d * &self.b * &self.b;
        arith::Q::new(num, BigInt::one() << (2 * self.k))
    }

    pub fn halve(&self) -> Self {
        Surd2::new(self.a.clone(), self.b.clone(), self.k + 1, self.d.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Surd2::one(&self.d);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Integer coordinates `(a, b)` if the denominator has cleared.
    pub fn integral(&self) -> Option<(BigInt, BigInt)> {
        (self.k == 0).then(|| (self.a.clone(), self.b.clone()))
    }
}

impl Mul for &Surd2 {
    type Output = Surd2;
    fn mul(self, o: &Surd2) -> Surd2 {
        debug_assert_eq!(self.d, o.d);
        let a = &self.a * &o.a + &self.d * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        Surd2::new(a, b, self.k + o.k, self.d.clone())
    }
}

impl Neg for &Surd2 {
    type Output = Surd2;
    fn neg(self) -> Surd2 {
        Surd2 { a: -&self.a, b: -&self.b, k: self.k, d: self.d.clone() }
    }
}

/// An indefinite binary form `a x² + b xy + c y²` of non-square discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

type Mat = [[BigInt; 2]; 2];

fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn identity() -> Mat {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

impl Form {
    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - &self.a * &self.c * 4u32
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    fn is_reduced(&self, s: &BigInt) -> bool {
        let a2 = self.a.abs() * 2u32;
        self.b.is_positive() && self.b <= *s && *s < &self.b + &a2 && &a2 - &self.b <= *s
    }

    /// One step of the reduction operator, with its matrix.
    fn rho(&self, d: &BigInt, s: &BigInt) -> (Form, Mat) {
        let c2 = self.c.abs() * 2u32;
        let bp = -&self.b;
        let r = if &self.c * &self.c > *d {
            let mut r = bp.mod_floor(&c2);
            if r > self.c.abs() {
                r -= &c2;
            }
            r
        } else {
            s - (s - &bp).mod_floor(&c2)
        };
        let step = (&r + &self.b) / (&self.c * 2u32);
        let next = Form { a: self.c.clone(), b: r.clone(), c: (&r * &r - d) / (&self.c * 4u32) };
        (next, [[BigInt::zero(), -BigInt::one()], [BigInt::one(), step]])
    }

    /// A reduced form equivalent to `self` and the matrix `T` with
    /// `reduced = self ∘ T`.
    fn reduce(&self) -> Result<(Form, Mat)> {
        let d = self.disc();
        let s = arith::isqrt(&d);
        let mut f = self.clone();
        let mut t = identity();
        let mut n = 0usize;
        while !f.is_reduced(&s) {
            let (g, m) = f.rho(&d, &s);
            f = g;
            t = mat_mul(&t, &m);
            n += 1;
            if n > 100_000 {
                return Err(Error::IterationCap { cap: 100_000, detail: "form reduction".into() });
            }
        }
        Ok((f, t))
    }

    /// The cycle of reduced forms through the reduction of `self`, each with
    /// its matrix from `self`.
    fn cycle(&self) -> Result<Vec<(Form, Mat)>> {
        let d = self.disc();
        let s = arith::isqrt(&d);
        let (start, t0) = self.reduce()?;
        let mut out = vec![(start.clone(), t0.clone())];
        let (mut f, mut t) = (start.clone(), t0);
        loop {
            let (g, m) = f.rho(&d, &s);
            t = mat_mul(&t, &m);
            if g == start {
                return Ok(out);
            }
            out.push((g.clone(), t.clone()));
            f = g;
            if out.len() > 1_000_000 {
                return Err(Error::IterationCap { cap: 1_000_000, detail: "cycle of reduced forms".into() });
            }
        }
    }
}

/// Generator of the proper automorphs of positive trace, from one period
/// of the reduction cycle.
pub fn automorph(f: &Form) -> Result<[[BigInt; 2]; 2]> {
    let d = f.disc();
    if !d.is_positive() || arith::exact_sqrt(&d).is_some() {
        return Err(Error::Precondition(format!("form discriminant {d} must be a positive non-square")));
    }
    let s = arith::isqrt(&d);
    let (start, t0) = f.reduce()?;
    let (mut g, mut prod) = (start.clone(), identity());
    loop {
        let (h, m) = g.rho(&d, &s);
        prod = mat_mul(&prod, &m);
        g = h;
        if g == start {
            break;
        }
    }
    let t0_inv: Mat = [[t0[1][1].clone(), -&t0[0][1]], [-&t0[1][0], t0[0][0].clone()]];
    let mut a = mat_mul(&mat_mul(&t0, &prod), &t0_inv);
    if (&a[0][0] + &a[1][1]).is_negative() {
        for row in a.iter_mut() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
    }
    Ok(a)
}

/// Representatives of the proper representations of `n` by `f`, one for
/// each orbit under the proper automorphs of positive trace (so `x` and
/// `-x` are listed separately).
pub fn represent(f: &Form, n: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    let d = f.disc();
    if !d.is_positive() || arith::exact_sqrt(&d).is_some() {
        return Err(Error::Precondition(format!("form discriminant {d} must be a positive non-square")));
    }
    if n.is_zero() {
        return Err(Error::Precondition("cannot represent zero".into()));
    }
    let cyc = f.cycle()?;
    let n2 = n.abs() * 2u32;
    let mut out = Vec::new();
    let mut beta = BigInt::zero();
    while beta < n2 {
        let num = &beta * &beta - &d;
        if num.is_multiple_of(&(n * 4u32)) {
            let g = Form { a: n.clone(), b: beta.clone(), c: num / (n * 4u32) };
            let (gr, tg) = g.reduce()?;
            if let Some((_, tk)) = cyc.iter().find(|(h, _)| *h == gr) {
                let tg_inv: Mat = [[tg[1][1].clone(), -&tg[0][1]], [-&tg[1][0], tg[0][0].clone()]];
                let u = mat_mul(tk, &tg_inv);
                let x = (u[0][0].clone(), u[1][0].clone());
                debug_assert_eq!(f.eval(&x.0, &x.1), *n);
                out.push((-&x.0, -&x.1));
                out.push(x);
            }
        }
        beta += 1u32;
    }
    Ok(out)
}

fn check_pair(w0: &MukaiVector, z: &MukaiVector, s: &SurfaceModel) -> Result<BigInt> {
    s.check(w0)?;
    s.check(z)?;
    if !s.pair(w0, z).is_zero() {
        return Err(Error::Precondition("<w0, z> must vanish".into()));
    }
    if s.square(w0) != int(-1) {
        return Err(Error::Precondition("w0 must be exceptional (w0² = -1)".into()));
    }
    let d = s.square(z);
    if !d.is_positive() {
        return Err(Error::Precondition(format!("z² = {d} must be positive")));
    }
    if arith::exact_sqrt(&d).is_some() {
        return Err(Error::PerfectSquare(d.to_string()));
    }
    Ok(d)
}

fn combine(p: &BigInt, q: &BigInt, w0: &MukaiVector, z: &MukaiVector) -> MukaiVector {
    &w0.scale(p) + &z.scale(q)
}

/// Coefficients `(p_n, q_n)` for `n = -count..=count` of the exceptional
/// sequence `w_n = p_n w0 + q_n z`.
pub fn exceptional_coefficients(d: &BigInt, count: u32) -> Result<Vec<(i64, BigInt, BigInt)>> {
    let f = pell_fundamental(d, 1)?.expect("N = 1 is always soluble");
    // ξ = -p1 - q1√D with (p1, q1) = (-x, y)
    let xi = Surd2::new(f.x.clone(), -&f.y, 0, d.clone());
    let eps = Surd2::new(f.x, f.y, 0, d.clone());
    let mut out = Vec::with_capacity(2 * count as usize + 1);
    for n in -(count as i64)..=count as i64 {
        let e = if n > 0 { -&xi.pow(n as u32) } else { eps.pow((-n) as u32) };
        let (p, q) = e.integral().expect("units of Z[√D] are integral");
        out.push((n, p, q));
    }
    Ok(out)
}

/// `w_{-count}, …, w_count`, all the exceptional classes `±w_n` of
/// `Z w0 ⊕ Z z` up to sign.
pub fn root_sequence(w0: &MukaiVector, z: &MukaiVector, s: &SurfaceModel, count: u32) -> Result<Vec<MukaiVector>> {
    let d = check_pair(w0, z, s)?;
    Ok(exceptional_coefficients(&d, count)?.iter().map(|(_, p, q)| combine(p, q, w0, z)).collect())
}

/// Coefficients `(n, s_n, t_n, square)` of the alternating sequence.
pub fn mixed_coefficients(d: &BigInt, count: u32) -> Result<Vec<(i64, BigInt, BigInt, i8)>> {
    let g = pell_fundamental(d, 2)?.ok_or_else(|| Error::Insoluble(format!("x² - {d} y² = 2")))?;
    // α = s1 + t1√D with s1 < 0 < t1 and N(α) = 2
    let alpha = Surd2::new(-g.x, g.y, 0, d.clone());
    let mut out = Vec::with_capacity(2 * count as usize + 1);
    for n in -(count as i64)..=count as i64 {
        let m = n.unsigned_abs() as u32;
        let e = if m == 0 {
            Surd2::one(d)
        } else if m.is_multiple_of(2) {
            // -α^{2j} / 2^j
            let j = m / 2;
            let mut x = -&alpha.pow(m);
            for _ in 0..j {
                x = x.halve();
            }
            x
        } else {
            // α^{2j-1} / 2^{j-1}
            let j = m.div_ceil(2);
            let mut x = alpha.pow(m);
            for _ in 0..j - 1 {
                x = x.halve();
            }
            x
        };
        let (sn, tn) = e.integral().ok_or_else(|| Error::Invariant(format!("s_{n} + t_{n}√D is not integral")))?;
        let sn = if n < 0 { -sn } else { sn };
        let sq = if m.is_multiple_of(2) { -1 } else { -2 };
        out.push((n, sn, tn, sq));
    }
    Ok(out)
}

/// The alternating exceptional/spherical sequence `w_n = s_n w0 + t_n z`.
pub fn mixed_sequence(w0: &MukaiVector, z: &MukaiVector, s: &SurfaceModel, count: u32) -> Result<Vec<(MukaiVector, i8)>> {
    let d = check_pair(w0, z, s)?;
    Ok(mixed_coefficients(&d, count)?.iter().map(|(_, p, q, sq)| (combine(p, q, w0, z), *sq)).collect())
}


#[cfg(test)]
mod form_tests {
    use super::*;
    use std::collections::HashSet;

    /// Smallest `(T, U)` with `T² − D U² = 4`, `U > 0`, by search.
    fn unit(d: i64) -> Option<(i64, i64)> {
        (1..200_000i64).find_map(|u| {
            let t2 = d * u * u + 4;
            let t = (t2 as f64).sqrt().round() as i64;
            (t * t == t2).then_some((t, u))
        })
    }

    #[test]
    fn representations_cover_box_solutions() {
        let mut checked = 0;
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in -6i64..=6 {
                    let d = b * b - 4 * a * c;
                    if d <= 0 || arith::exact_sqrt(&int(d)).is_some() {
                        continue;
                    }
                    let g = num_integer::gcd(num_integer::gcd(a, b), c);
                    let (pa, pb, pc) = (a / g, b / g, c / g);
                    let Some((t, u)) = unit(d / (g * g)) else { continue };
                    if t > 400 {
                        continue;
                    }
                    let f = Form { a: int(a), b: int(b), c: int(c) };
                    let m = [[(t - pb * u) / 2, -pc * u], [pa * u, (t + pb * u) / 2]];
                    let mi = [[(t + pb * u) / 2, pc * u], [-pa * u, (t - pb * u) / 2]];
                    let auto = automorph(&f).unwrap();
                    let auto: Vec<i64> = auto.iter().flatten().map(|x| x.try_into().unwrap()).collect();
                    let mi_flat = vec![mi[0][0], mi[0][1], mi[1][0], mi[1][1]];
                    assert!(auto == vec![m[0][0], m[0][1], m[1][0], m[1][1]] || auto == mi_flat, "automorph {auto:?} vs {m:?} for {f:?}");
                    let ap = |m: &[[i64; 2]; 2], x: (i64, i64)| (m[0][0] * x.0 + m[0][1] * x.1, m[1][0] * x.0 + m[1][1] * x.1);
                    for n in [-1i64, -2, 1, 2, 3] {
                        let reps = represent(&f, &int(n)).unwrap();
                        let mut orbits: Vec<HashSet<(i64, i64)>> = Vec::new();
                        for (x, y) in &reps {
                            let x0: (i64, i64) = (x.try_into().unwrap(), y.try_into().unwrap());
                            assert_eq!(a * x0.0 * x0.0 + b * x0.0 * x0.1 + c * x0.1 * x0.1, n);
                            let mut orb = HashSet::new();
                            for mat in [&m, &mi] {
                                let mut z = x0;
                                while z.0.abs() < 5_000 && z.1.abs() < 5_000 {
                                    orb.insert(z);
                                    z = ap(mat, z);
                                }
                            }
                            assert!(orbits.iter().all(|o| !o.contains(&x0)), "duplicate orbit for {f:?}, n={n}");
                            orbits.push(orb);
                        }
                        for x in -60i64..=60 {
                            for y in -60i64..=60 {
                                if a * x * x + b * x * y + c * y * y == n && num_integer::gcd(x, y) == 1 {
                                    assert!(orbits.iter().any(|o| o.contains(&(x, y))), "missed ({x},{y}) for {f:?}, n={n}");
                                }
                            }
                        }
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 500);
    }
}
