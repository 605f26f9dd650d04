//! Pol(SU_q(2)) for rational `0 < q < 1`.
//!
//! Generators `a, a*, c, c*` (letters `A, B, C, D`). Normal words are
//! `A^k C^l D^m` and `B^k C^l D^m`, reached by the ordered rewriting system
//!
//! ```text
//! CA -> q^-1 AC    DA -> q^-1 AD    CB -> q BC    DB -> q BD
//! DC -> CD         BA -> 1 - CD     AB -> 1 - q^2 CD
//! ```
//!
//! which terminates (the number of `A`/`B` letters never grows and each
//! homogeneous rule moves a smaller letter left) and is confluent (checked on
//! all critical overlaps when a presentation is built). Products are
//! computed through a memoized table of "normal monomial times generator".
//! The Haar functional is not transcribed: it is solved exactly from left and
//! right invariance, one degree block at a time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{AqgError, Result};
use crate::hopf::{Lin, Presentation, StructureMaps};
use crate::linalg::{Echelon, Insert, SparseRow};
use crate::scalar::Scalar;

const A: u8 = 0;
const B: u8 = 1;
const C: u8 = 2;
const D: u8 = 3;

/// Normal monomial `a^k c^l c*^m` (`k >= 0`) or `a*^{-k} c^l c*^m` (`k < 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub k: i32,
    pub l: u32,
    pub m: u32,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.k.unsigned_abs() as usize + self.l as usize + self.m as usize
    }

    fn word(&self) -> Vec<u8> {
        let first = if self.k >= 0 { A } else { B };
        let mut w = vec![first; self.k.unsigned_abs() as usize];
        w.extend(std::iter::repeat(C).take(self.l as usize));
        w.extend(std::iter::repeat(D).take(self.m as usize));
        w
    }

    /// Parses a normal word; `None` if the word is not normal.
    fn from_word(w: &[u8]) -> Option<Monomial> {
        let mut i = 0;
        let lead = w.first().copied();
        let mut k = 0i32;
        if matches!(lead, Some(A) | Some(B)) {
            let g = lead.unwrap();
            while i < w.len() && w[i] == g {
                i += 1;
            }
            k = if g == A { i as i32 } else { -(i as i32) };
        }
        let mut l = 0;
        while i < w.len() && w[i] == C {
            i += 1;
            l += 1;
        }
        let mut m = 0;
        while i < w.len() && w[i] == D {
            i += 1;
            m += 1;
        }
        (i == w.len()).then_some(Monomial { k, l, m })
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        let pw = |s: &str, e: u32| if e == 1 { s.to_string() } else { format!("{s}^{e}") };
        if self.k > 0 {
            parts.push(pw("a", self.k as u32));
        } else if self.k < 0 {
            parts.push(pw("a*", self.k.unsigned_abs()));
        }
        if self.l > 0 {
            parts.push(pw("c", self.l));
        }
        if self.m > 0 {
            parts.push(pw("c*", self.m));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

/// Number of monomials of degree `< d`: `d(d+1)(2d+1)/6`.
pub fn offset(d: usize) -> usize {
    d * (d + 1) * (2 * d + 1) / 6
}

/// Basis position of a monomial: by degree, then `k` descending, then `l` descending.
pub fn monomial_index(m: &Monomial) -> usize {
    let d = m.degree() as i64;
    let mut pos = 0i64;
    let mut kk = d;
    while kk > m.k as i64 {
        pos += d - kk.abs() + 1;
        kk -= 1;
    }
    let r = d - (m.k as i64).abs();
    pos += r - m.l as i64;
    offset(d as usize) + pos as usize
}

pub fn monomial_at(i: usize) -> Monomial {
    let mut d = 0;
    while offset(d + 1) <= i {
        d += 1;
    }
    let mut pos = (i - offset(d)) as i64;
    let d = d as i64;
    let mut k = d;
    loop {
        let cnt = d - k.abs() + 1;
        if pos < cnt {
            let r = d - k.abs();
            let l = r - pos;
            return Monomial { k: k as i32, l: l as u32, m: (r - l) as u32 };
        }
        pos -= cnt;
        k -= 1;
    }
}

type Terms = Vec<(Scalar, Vec<u8>)>;

pub struct Suq2 {
    q: BigRational,
    qs: Scalar,
    qinv: Scalar,
    q2: Scalar,
    times_gen: RwLock<HashMap<(usize, u8), Arc<Lin>>>,
    mult_cache: RwLock<HashMap<(usize, usize), Arc<Lin>>>,
    comult_cache: RwLock<HashMap<usize, Arc<Vec<(usize, usize, Scalar)>>>>,
    haar: Mutex<Vec<Scalar>>,
}

fn add_lin(acc: &mut HashMap<usize, Scalar>, i: usize, v: Scalar) {
    if v.is_zero() {
        return;
    }
    let e = acc.entry(i).or_insert_with(Scalar::zero);
    *e += &v;
}

fn finish(acc: HashMap<usize, Scalar>) -> Lin {
    let mut out: Lin = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    out.sort_by_key(|(i, _)| *i);
    out
}

impl Suq2 {
    pub fn new(q: BigRational) -> Result<Self> {
        if !(q.is_positive() && q < BigRational::one()) {
            return Err(AqgError::InvalidPresentation(format!("q = {q} must satisfy 0 < q < 1")));
        }
        let qs = Scalar::from_rational(q.clone());
        let s = Self {
            qinv: qs.inv()?,
            q2: &qs * &qs,
            qs,
            q,
            times_gen: RwLock::new(HashMap::new()),
            mult_cache: RwLock::new(HashMap::new()),
            comult_cache: RwLock::new(HashMap::new()),
            haar: Mutex::new(Vec::new()),
        };
        s.check_confluence()?;
        Ok(s)
    }

    fn rule(&self, x: u8, y: u8) -> Option<Terms> {
        Some(match (x, y) {
            (C, A) => vec![(self.qinv.clone(), vec![A, C])],
            (D, A) => vec![(self.qinv.clone(), vec![A, D])],
            (C, B) => vec![(self.qs.clone(), vec![B, C])],
            (D, B) => vec![(self.qs.clone(), vec![B, D])],
            (D, C) => vec![(Scalar::one(), vec![C, D])],
            (B, A) => vec![(Scalar::one(), vec![]), (Scalar::int(-1), vec![C, D])],
            (A, B) => vec![(Scalar::one(), vec![]), (-self.q2.clone(), vec![C, D])],
            _ => return None,
        })
    }

    /// Normal form of `monomial(i) * g`.
    fn times_gen(&self, i: usize, g: u8) -> Arc<Lin> {
        if let Some(v) = self.times_gen.read().unwrap().get(&(i, g)) {
            return v.clone();
        }
        let w = monomial_at(i).word();
        let result = match w.last().and_then(|&x| self.rule(x, g)) {
            None => {
                let mut nw = w.clone();
                nw.push(g);
                let m = Monomial::from_word(&nw).expect("no redex means normal");
                vec![(monomial_index(&m), Scalar::one())]
            }
            Some(terms) => {
                let prefix = monomial_index(&Monomial::from_word(&w[..w.len() - 1]).expect("prefix of normal word"));
                let mut acc = HashMap::new();
                for (c, rhs) in terms {
                    for (j, v) in self.normalize_from(prefix, &rhs) {
                        add_lin(&mut acc, j, &c * &v);
                    }
                }
                finish(acc)
            }
        };
        let result = Arc::new(result);
        self.times_gen.write().unwrap().insert((i, g), result.clone());
        result
    }

    /// Normal form of `monomial(start) * letters`.
    fn normalize_from(&self, start: usize, letters: &[u8]) -> Lin {
        let mut cur: Lin = vec![(start, Scalar::one())];
        for &g in letters {
            let mut acc = HashMap::new();
            for (i, c) in &cur {
                for (j, v) in self.times_gen(*i, g).iter() {
                    add_lin(&mut acc, *j, c * v);
                }
            }
            cur = finish(acc);
        }
        cur
    }

    fn normalize(&self, letters: &[u8]) -> Lin {
        self.normalize_from(0, letters)
    }

    /// Checks all critical overlaps `xyz` where `xy` and `yz` are both redexes.
    pub fn check_confluence(&self) -> Result<()> {
        for x in 0..4u8 {
            for y in 0..4u8 {
                for z in 0..4u8 {
                    let (Some(left), Some(right)) = (self.rule(x, y), self.rule(y, z)) else { continue };
                    let mut p1 = HashMap::new();
                    for (c, w) in left {
                        let mut word = w.clone();
                        word.push(z);
                        for (j, v) in self.normalize(&word) {
                            add_lin(&mut p1, j, &c * &v);
                        }
                    }
                    let mut p2 = HashMap::new();
                    for (c, w) in right {
                        let mut word = vec![x];
                        word.extend(w);
                        for (j, v) in self.normalize(&word) {
                            add_lin(&mut p2, j, &c * &v);
                        }
                    }
                    let (p1, p2) = (finish(p1), finish(p2));
                    if p1 != p2 {
                        let name = |g: u8| ["a", "a*", "c", "c*"][g as usize];
                        return Err(AqgError::NotConfluent(format!(
                            "overlap {} {} {} resolves to different normal forms",
                            name(x),
                            name(y),
                            name(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn gen_comult(&self, g: u8) -> Vec<(u8, u8, Scalar)> {
        match g {
            A => vec![(A, A, Scalar::one()), (D, C, -self.qs.clone())],
            B => vec![(B, B, Scalar::one()), (C, D, -self.qs.clone())],
            C => vec![(C, A, Scalar::one()), (B, C, Scalar::one())],
            _ => vec![(D, B, Scalar::one()), (A, D, Scalar::one())],
        }
    }

    fn mapped_reverse(&self, i: usize, f: impl Fn(u8) -> (Scalar, u8)) -> Lin {
        let w = monomial_at(i).word();
        let mut coef = Scalar::one();
        let mut letters = Vec::with_capacity(w.len());
        for &g in w.iter().rev() {
            let (c, h) = f(g);
            coef *= &c;
            letters.push(h);
        }
        self.normalize(&letters).into_iter().map(|(j, v)| (j, &v * &coef)).collect()
    }

    fn ensure_haar(&self, degree: usize) -> Result<()> {
        let mut haar = self.haar.lock().unwrap();
        while haar.len() < offset(degree + 1) {
            let e = (0..).find(|&e| offset(e + 1) > haar.len()).unwrap();
            let block = self.solve_haar_block(e, &haar)?;
            haar.extend(block);
        }
        Ok(())
    }

    /// Solves ψ on the degree-`e` monomials given its values on lower degrees.
    fn solve_haar_block(&self, e: usize, known: &[Scalar]) -> Result<Vec<Scalar>> {
        let lo = offset(e);
        let n = offset(e + 1) - lo;
        let rhs = n;
        let mut ech = Echelon::new(rhs, 0.0);
        if e == 0 {
            let mut r = SparseRow::new();
            r.insert(0, Scalar::one());
            r.insert(rhs, Scalar::one());
            ech.insert(r);
        }
        for x in lo..lo + n {
            let delta = self.comult(x);
            for side in 0..2 {
                // side 0: (ψ⊗ι)Δ(x) = ψ(x)1; side 1: (ι⊗ψ)Δ(x) = ψ(x)1.
                let mut rows: HashMap<usize, SparseRow> = HashMap::new();
                for (u, v, c) in delta.iter() {
                    let (integrated, free) = if side == 0 { (*u, *v) } else { (*v, *u) };
                    let row = rows.entry(free).or_default();
                    if integrated >= lo {
                        let slot = row.entry(integrated - lo).or_insert_with(Scalar::zero);
                        *slot += c;
                    } else {
                        let val = c * &known[integrated];
                        let slot = row.entry(rhs).or_insert_with(Scalar::zero);
                        *slot -= &val;
                    }
                }
                {
                    let unit_row = rows.entry(0).or_default();
                    let slot = unit_row.entry(x - lo).or_insert_with(Scalar::zero);
                    *slot -= &Scalar::one();
                }
                let mut keys: Vec<usize> = rows.keys().copied().collect();
                keys.sort();
                for k in keys {
                    let mut row = rows.remove(&k).unwrap();
                    row.retain(|_, v| !v.is_zero());
                    if let Insert::Inconsistent(r) = ech.insert(row) {
                        return Err(AqgError::Inconsistent(format!("Haar invariance at degree {e}: residual {:?}", r)));
                    }
                }
            }
        }
        if ech.rank() < n {
            return Err(AqgError::Singular(format!("Haar functional not determined at degree {e}")));
        }
        let sol = ech.solution();
        Ok((0..n).map(|i| sol.get(&i).cloned().unwrap_or_default()).collect())
    }

    /// Highest degree on which ψ has been solved so far.
    pub fn haar_solved_degree(&self) -> Option<usize> {
        let len = self.haar.lock().unwrap().len();
        (0..).take_while(|&e| offset(e + 1) <= len).last()
    }
}

fn parse_label(label: &str) -> Option<Monomial> {
    let t = label.trim();
    if t == "1" {
        return Some(Monomial { k: 0, l: 0, m: 0 });
    }
    let mut mono = Monomial { k: 0, l: 0, m: 0 };
    let mut stage = 0;
    for part in t.split_whitespace() {
        let (base, exp) = match part.split_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().ok()?),
            None => (part, 1),
        };
        if exp == 0 {
            return None;
        }
        let s = match base {
            "a" => 1,
            "a*" => 1,
            "c" => 2,
            "c*" => 3,
            _ => return None,
        };
        if s <= stage {
            return None;
        }
        stage = s;
        match base {
            "a" => mono.k = exp as i32,
            "a*" => mono.k = -(exp as i32),
            "c" => mono.l = exp,
            _ => mono.m = exp,
        }
    }
    Some(mono)
}

impl StructureMaps for Suq2 {
    fn name(&self) -> String {
        format!("SU_q(2) q={}", self.q)
    }

    fn degree(&self, i: usize) -> usize {
        monomial_at(i).degree()
    }

    fn dim_upto(&self, d: usize) -> usize {
        offset(d + 1)
    }

    fn max_degree(&self) -> Option<usize> {
        None
    }

    fn label(&self, i: usize) -> String {
        monomial_at(i).label()
    }

    fn lookup(&self, label: &str) -> Option<usize> {
        parse_label(label).map(|m| monomial_index(&m))
    }

    fn unit(&self) -> Lin {
        vec![(0, Scalar::one())]
    }

    fn mult(&self, i: usize, j: usize) -> Lin {
        if i == 0 {
            return vec![(j, Scalar::one())];
        }
        if j == 0 {
            return vec![(i, Scalar::one())];
        }
        if let Some(v) = self.mult_cache.read().unwrap().get(&(i, j)) {
            return v.as_ref().clone();
        }
        let r = Arc::new(self.normalize_from(i, &monomial_at(j).word()));
        self.mult_cache.write().unwrap().insert((i, j), r.clone());
        r.as_ref().clone()
    }

    fn comult(&self, i: usize) -> Vec<(usize, usize, Scalar)> {
        if i == 0 {
            return vec![(0, 0, Scalar::one())];
        }
        if let Some(v) = self.comult_cache.read().unwrap().get(&i) {
            return v.as_ref().clone();
        }
        let w = monomial_at(i).word();
        let g = *w.last().unwrap();
        let prefix = monomial_index(&Monomial::from_word(&w[..w.len() - 1]).unwrap());
        let base = self.comult(prefix);
        let mut acc: HashMap<(usize, usize), Scalar> = HashMap::new();
        for (x, y, c) in &base {
            for (g1, g2, c2) in self.gen_comult(g) {
                let cc = c * &c2;
                let left = self.times_gen(*x, g1);
                let right = self.times_gen(*y, g2);
                for (u, cu) in left.iter() {
                    let ccu = &cc * cu;
                    for (v, cv) in right.iter() {
                        let e = acc.entry((*u, *v)).or_insert_with(Scalar::zero);
                        *e += &(&ccu * cv);
                    }
                }
            }
        }
        let mut out: Vec<(usize, usize, Scalar)> = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((u, v), c)| (u, v, c)).collect();
        out.sort_by_key(|(u, v, _)| (*u, *v));
        let out = Arc::new(out);
        self.comult_cache.write().unwrap().insert(i, out.clone());
        out.as_ref().clone()
    }

    fn star(&self, i: usize) -> Lin {
        self.mapped_reverse(i, |g| (Scalar::one(), g ^ 1))
    }

    fn antipode(&self, i: usize) -> Lin {
        self.mapped_reverse(i, |g| match g {
            A => (Scalar::one(), B),
            B => (Scalar::one(), A),
            C => (-self.qs.clone(), C),
            _ => (-self.qinv.clone(), D),
        })
    }

    fn antipode_inv(&self, i: usize) -> Lin {
        self.mapped_reverse(i, |g| match g {
            A => (Scalar::one(), B),
            B => (Scalar::one(), A),
            C => (-self.qinv.clone(), C),
            _ => (-self.qs.clone(), D),
        })
    }

    fn counit(&self, i: usize) -> Scalar {
        let m = monomial_at(i);
        if m.l == 0 && m.m == 0 {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    }

    fn right_integral(&self, i: usize) -> Result<Scalar> {
        let d = monomial_at(i).degree();
        self.ensure_haar(d)?;
        Ok(self.haar.lock().unwrap()[i].clone())
    }

    fn q(&self) -> Option<BigRational> {
        Some(self.q.clone())
    }
}

fn registry() -> &'static Mutex<HashMap<BigRational, Presentation>> {
    static REG: OnceLock<Mutex<HashMap<BigRational, Presentation>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds (or returns the cached) Pol(SU_q(2)) and pre-solves ψ up to degree `2 * max_degree`.
pub fn make_suq2(q: &BigRational, max_degree: usize) -> Result<Presentation> {
    let p = {
        let mut reg = registry().lock().unwrap();
        match reg.get(q) {
            Some(p) => p.clone(),
            None => {
                let p = Presentation::new(Suq2::new(q.clone())?);
                reg.insert(q.clone(), p.clone());
                p
            }
        }
    };
    let top = p.dim_upto(2 * max_degree) - 1;
    p.maps().right_integral(top)?;
    Ok(p)
}

/// `q = num/den` as an exact rational.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q` (or an integer) into an exact rational.
pub fn parse_q(s: &str) -> Result<BigRational> {
    let v: Scalar = s.parse()?;
    match v.as_rational() {
        Some(r) if v.is_exact() => Ok(r.clone()),
        _ => Err(AqgError::Usage(format!("q must be an exact rational, got '{s}'"))),
    }
}

pub fn is_rational_square(q: &BigRational) -> bool {
    crate::scalar::rational_sqrt(q).is_some() && !q.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{Element, TensorElement};

    fn p() -> Presentation {
        make_suq2(&rational(1, 4), 2).unwrap()
    }

    #[test]
    fn indexing_round_trip() {
        for i in 0..offset(8) {
            assert_eq!(monomial_index(&monomial_at(i)), i);
        }
        assert_eq!(offset(2), 5);
        assert_eq!(monomial_at(0).label(), "1");
        assert_eq!(monomial_at(1).label(), "a");
        assert_eq!(monomial_at(2).label(), "c");
        assert_eq!(monomial_at(3).label(), "c*");
        assert_eq!(monomial_at(4).label(), "a*");
        assert_eq!(parse_label("a* c^2 c*"), Some(Monomial { k: -1, l: 2, m: 1 }));
        assert_eq!(parse_label("c a"), None);
    }

    #[test]
    fn defining_relations() {
        let p = p();
        let q = Scalar::ratio(1, 4);
        let a = p.element("a").unwrap();
        let b = p.element("a*").unwrap();
        let c = p.element("c").unwrap();
        let d = p.element("c*").unwrap();
        assert_eq!(&a * &c, (&c * &a).scale(&q));
        assert_eq!(&a * &d, (&d * &a).scale(&q));
        assert_eq!(&c * &d, &d * &c);
        assert_eq!(&(&b * &a) + &(&d * &c), p.unit());
        assert_eq!(&(&a * &b) + &(&c * &d).scale(&(&q * &q)), p.unit());
        assert_eq!(a.star(), b);
        assert_eq!(c.star(), d);
        // mul(a, c) is the single basis monomial "a c".
        assert_eq!(&a * &c, p.element("a c").unwrap());
    }

    #[test]
    fn coproduct_of_c() {
        let p = p();
        let a = p.element("a").unwrap();
        let b = p.element("a*").unwrap();
        let c = p.element("c").unwrap();
        let expected = TensorElement::simple(&c, &a).add(&TensorElement::simple(&b, &c));
        assert_eq!(c.comul(), expected);
    }

    #[test]
    fn antipode_values() {
        let p = p();
        let c = p.element("c").unwrap();
        let q = Scalar::ratio(1, 4);
        assert_eq!(c.antipode(), c.scale(&-q.clone()));
        assert_eq!(c.antipode().antipode(), c.scale(&(&q * &q)));
        let d = p.element("c*").unwrap();
        assert_eq!(c.star().antipode(), d.scale(&Scalar::int(-4)));
        for i in 0..p.dim_upto(3) {
            let x = p.basis(i);
            assert_eq!(x.antipode().antipode_inv(), x);
        }
    }

    /// Closed form h(a^k c^l c*^m) = δ_{k0} δ_{lm} (1-q^2)/(1-q^{2m+2}).
    fn haar_closed_form(m: &Monomial, q: &Scalar) -> Scalar {
        if m.k != 0 || m.l != m.m {
            return Scalar::zero();
        }
        let q2 = q * q;
        let num = &Scalar::one() - &q2;
        let den = &Scalar::one() - &q2.powi(m.m as i64 + 1).unwrap();
        &num / &den
    }

    #[test]
    fn haar_matches_closed_form() {
        let p = p();
        let q = Scalar::ratio(1, 4);
        for i in 0..p.dim_upto(6) {
            let v = p.basis(i).right_integral().unwrap();
            assert_eq!(v, haar_closed_form(&monomial_at(i), &q), "at {}", monomial_at(i).label());
        }
        let cstar_c = &p.element("c*").unwrap() * &p.element("c").unwrap();
        assert_eq!(cstar_c.right_integral().unwrap(), Scalar::ratio(16, 17));
        assert_eq!(cstar_c.left_integral().unwrap(), Scalar::ratio(16, 17));
        assert_eq!(p.element("c").unwrap().right_integral().unwrap(), Scalar::zero());
        assert_eq!(p.unit().right_integral().unwrap(), Scalar::one());
    }

    #[test]
    fn other_q_values() {
        let p = make_suq2(&rational(3, 7), 1).unwrap();
        let cc = &p.element("c*").unwrap() * &p.element("c").unwrap();
        // 1/(1+q^2) = 49/58
        assert_eq!(cc.right_integral().unwrap(), Scalar::ratio(49, 58));
        assert!(make_suq2(&rational(3, 2), 1).is_err());
        assert!(is_rational_square(&rational(1, 4)));
        assert!(!is_rational_square(&rational(3, 7)));
    }

    #[test]
    fn confluence_certified() {
        let s = Suq2::new(rational(2, 5)).unwrap();
        s.check_confluence().unwrap();
        let _ = Element::zero(&p());
    }
}
