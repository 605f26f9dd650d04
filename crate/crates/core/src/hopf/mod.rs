//! Presentations of compact/finite *-algebraic quantum groups and their elements.
//!
//! A presentation is a graded basis together with structure maps given on
//! basis elements. Elements are finitely supported coefficient vectors; every
//! map on elements is the (conjugate-)linear extension of the basis rule.

pub mod axioms;
pub mod file;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;

use crate::error::{AqgError, Result};
use crate::scalar::Scalar;

/// Sparse linear combination of basis indices.
pub type Lin = Vec<(usize, Scalar)>;

/// Index into a presentation's basis. Degrees are stable and indices of
/// degree `<= d` are exactly `0..dim_upto(d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub usize);

/// Structure maps of a presentation, given on basis elements.
pub trait StructureMaps: Send + Sync {
    fn name(&self) -> String;
    fn degree(&self, i: usize) -> usize;
    /// Number of basis elements of degree `<= d`.
    fn dim_upto(&self, d: usize) -> usize;
    /// Largest degree present, or `None` for an infinite basis.
    fn max_degree(&self) -> Option<usize>;
    fn label(&self, i: usize) -> String;
    fn lookup(&self, label: &str) -> Option<usize>;
    fn unit(&self) -> Lin;
    fn mult(&self, i: usize, j: usize) -> Lin;
    fn comult(&self, i: usize) -> Vec<(usize, usize, Scalar)>;
    fn star(&self, i: usize) -> Lin;
    fn antipode(&self, i: usize) -> Lin;
    fn antipode_inv(&self, i: usize) -> Lin;
    fn counit(&self, i: usize) -> Scalar;
    fn right_integral(&self, i: usize) -> Result<Scalar>;
    /// Bound on the degree of products/coproduct legs of elements of degrees `n1`, `n2`.
    fn degree_growth_bound(&self, n1: usize, n2: usize) -> usize {
        n1 + n2
    }
    /// The deformation parameter, for families that have one.
    fn q(&self) -> Option<BigRational> {
        None
    }
}

struct Inner {
    id: usize,
    maps: Box<dyn StructureMaps>,
}

/// Shared handle to an immutable presentation.
#[derive(Clone)]
pub struct Presentation {
    inner: Arc<Inner>,
}

static NEXT_ID: AtomicUsize = AtomicUsize::new(1);

impl Presentation {
    pub fn new(maps: impl StructureMaps + 'static) -> Self {
        let id = NEXT_ID.fetch_add(1, Ordering::Relaxed);
        Self { inner: Arc::new(Inner { id, maps: Box::new(maps) }) }
    }

    pub fn id(&self) -> usize {
        self.inner.id
    }

    pub fn maps(&self) -> &dyn StructureMaps {
        self.inner.maps.as_ref()
    }

    pub fn same(&self, other: &Presentation) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    pub fn name(&self) -> String {
        self.maps().name()
    }

    pub fn dim_upto(&self, d: usize) -> usize {
        self.maps().dim_upto(d)
    }

    /// Effective truncation degree: `d`, capped by the largest degree present.
    pub fn cap_degree(&self, d: usize) -> usize {
        self.maps().max_degree().map_or(d, |m| m.min(d))
    }

    pub fn is_finite(&self) -> bool {
        self.maps().max_degree().is_some()
    }

    pub fn degree_of(&self, i: BasisIndex) -> usize {
        self.maps().degree(i.0)
    }

    pub fn basis_upto(&self, d: usize) -> impl Iterator<Item = BasisIndex> {
        (0..self.dim_upto(d)).map(BasisIndex)
    }

    pub fn basis(&self, i: usize) -> Element {
        Element::basis(self, BasisIndex(i))
    }

    /// Basis element by label (e.g. `"c"`, `"u_g"`).
    pub fn element(&self, label: &str) -> Result<Element> {
        self.maps()
            .lookup(label)
            .map(|i| self.basis(i))
            .ok_or_else(|| AqgError::Usage(format!("unknown basis label '{label}' in {}", self.name())))
    }

    pub fn unit(&self) -> Element {
        Element::from_lin(self, self.maps().unit())
    }

    pub fn q(&self) -> Option<BigRational> {
        self.maps().q()
    }

    pub fn growth(&self, n1: usize, n2: usize) -> usize {
        self.maps().degree_growth_bound(n1, n2)
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation({}#{})", self.name(), self.id())
    }
}

/// A finitely supported element of the algebra.
#[derive(Clone)]
pub struct Element {
    pres: Presentation,
    coeffs: BTreeMap<BasisIndex, Scalar>,
}

fn accumulate(map: &mut BTreeMap<BasisIndex, Scalar>, i: BasisIndex, v: Scalar) {
    if v.is_zero() {
        return;
    }
    match map.get_mut(&i) {
        Some(x) => {
            *x += &v;
            if x.is_zero() {
                map.remove(&i);
            }
        }
        None => {
            map.insert(i, v);
        }
    }
}

impl Element {
    pub fn zero(p: &Presentation) -> Self {
        Self { pres: p.clone(), coeffs: BTreeMap::new() }
    }

    pub fn basis(p: &Presentation, i: BasisIndex) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, Scalar::one());
        Self { pres: p.clone(), coeffs }
    }

    pub fn from_lin(p: &Presentation, lin: Lin) -> Self {
        let mut e = Self::zero(p);
        for (i, v) in lin {
            accumulate(&mut e.coeffs, BasisIndex(i), v);
        }
        e
    }

    pub fn from_terms(p: &Presentation, terms: impl IntoIterator<Item = (BasisIndex, Scalar)>) -> Self {
        let mut e = Self::zero(p);
        for (i, v) in terms {
            accumulate(&mut e.coeffs, i, v);
        }
        e
    }

    /// Element with the given coordinates on the first `coords.len()` basis indices.
    pub fn from_coords(p: &Presentation, coords: &[Scalar]) -> Self {
        Self::from_terms(p, coords.iter().enumerate().map(|(i, v)| (BasisIndex(i), v.clone())))
    }

    /// Coordinates on the first `n` basis indices; `None` if support exceeds them.
    pub fn coords(&self, n: usize) -> Option<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); n];
        for (i, c) in &self.coeffs {
            if i.0 >= n {
                return None;
            }
            v[i.0] = c.clone();
        }
        Some(v)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisIndex, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, i: BasisIndex) -> Scalar {
        self.coeffs.get(&i).cloned().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.is_zero_tol(tol))
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.values().all(Scalar::is_exact)
    }

    /// Largest coefficient modulus (0 for the zero element).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|i| self.pres.degree_of(*i)).max().unwrap_or(0)
    }

    fn check(&self, other: &Element) -> Result<()> {
        if self.pres.same(&other.pres) {
            Ok(())
        } else {
            Err(AqgError::MixedPresentations)
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        let mut out = self.clone();
        for (i, v) in &other.coeffs {
            accumulate(&mut out.coeffs, *i, v.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        let mut out = self.clone();
        for (i, v) in &other.coeffs {
            accumulate(&mut out.coeffs, *i, -v);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        let maps = self.pres.maps();
        let mut out = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let ab = a * b;
                for (k, c) in maps.mult(i.0, j.0) {
                    accumulate(&mut out, BasisIndex(k), &ab * &c);
                }
            }
        }
        Ok(Element { pres: self.pres.clone(), coeffs: out })
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        if s.is_zero() {
            return Element::zero(&self.pres);
        }
        Element::from_terms(&self.pres, self.coeffs.iter().map(|(i, v)| (*i, v * s)))
    }

    pub fn to_float(&self) -> Element {
        Element::from_terms(&self.pres, self.coeffs.iter().map(|(i, v)| (*i, v.to_float())))
    }

    /// Drops float coefficients of modulus `<= tol`.
    pub fn chop(&self, tol: f64) -> Element {
        Element::from_terms(&self.pres, self.coeffs.iter().filter(|(_, v)| !v.is_zero_tol(tol)).map(|(i, v)| (*i, v.clone())))
    }

    /// Linear extension of a rule on basis elements.
    pub fn map_linear(&self, f: impl Fn(BasisIndex) -> Result<Element>) -> Result<Element> {
        let mut out = BTreeMap::new();
        for (i, a) in &self.coeffs {
            let img = f(*i)?;
            self.check(&img)?;
            for (k, c) in img.coeffs {
                accumulate(&mut out, k, a * &c);
            }
        }
        Ok(Element { pres: self.pres.clone(), coeffs: out })
    }

    /// Conjugate-linear extension of a rule on basis elements.
    pub fn map_conj_linear(&self, f: impl Fn(BasisIndex) -> Result<Element>) -> Result<Element> {
        let mut out = BTreeMap::new();
        for (i, a) in &self.coeffs {
            let img = f(*i)?;
            self.check(&img)?;
            let ac = a.conj();
            for (k, c) in img.coeffs {
                accumulate(&mut out, k, &ac * &c);
            }
        }
        Ok(Element { pres: self.pres.clone(), coeffs: out })
    }

    /// Linear functional from its values on basis elements.
    pub fn functional(&self, f: impl Fn(BasisIndex) -> Result<Scalar>) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (i, a) in &self.coeffs {
            let v = f(*i)?;
            if !v.is_zero() {
                acc += &(a * &v);
            }
        }
        Ok(acc)
    }

    pub fn star(&self) -> Element {
        let maps = self.pres.maps();
        self.map_conj_linear(|i| Ok(Element::from_lin(&self.pres, maps.star(i.0)))).expect("same presentation")
    }

    pub fn antipode(&self) -> Element {
        let maps = self.pres.maps();
        self.map_linear(|i| Ok(Element::from_lin(&self.pres, maps.antipode(i.0)))).expect("same presentation")
    }

    pub fn antipode_inv(&self) -> Element {
        let maps = self.pres.maps();
        self.map_linear(|i| Ok(Element::from_lin(&self.pres, maps.antipode_inv(i.0)))).expect("same presentation")
    }

    /// `S^n` for any integer `n`.
    pub fn antipode_pow(&self, n: i32) -> Element {
        let mut x = self.clone();
        for _ in 0..n.unsigned_abs() {
            x = if n > 0 { x.antipode() } else { x.antipode_inv() };
        }
        x
    }

    pub fn counit(&self) -> Scalar {
        let maps = self.pres.maps();
        self.functional(|i| Ok(maps.counit(i.0))).expect("counit")
    }

    /// The right integral ψ.
    pub fn right_integral(&self) -> Result<Scalar> {
        let maps = self.pres.maps();
        self.functional(|i| maps.right_integral(i.0))
    }

    /// The left integral φ = ψ∘S.
    pub fn left_integral(&self) -> Result<Scalar> {
        self.antipode().right_integral()
    }

    pub fn comul(&self) -> TensorElement {
        let maps = self.pres.maps();
        let mut t = TensorElement::zero(&self.pres);
        for (i, a) in &self.coeffs {
            for (j, k, c) in maps.comult(i.0) {
                t.add_term(BasisIndex(j), BasisIndex(k), a * &c);
            }
        }
        t
    }

    pub fn approx_eq(&self, other: &Element, tol: f64) -> bool {
        match self.checked_sub(other) {
            Ok(d) => d.is_zero_tol(tol),
            Err(_) => false,
        }
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn residual(&self, other: &Element) -> f64 {
        (self - other).max_abs()
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.pres.same(&other.pres) && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let maps = self.pres.maps();
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(i, c)| {
                let l = maps.label(i.0);
                if c.is_one() {
                    l
                } else {
                    format!("({c})*{l}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("mixed presentations")
    }
}

impl<'a> Sub<&'a Element> for &'a Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.checked_sub(rhs).expect("mixed presentations")
    }
}

impl<'a> Mul<&'a Element> for &'a Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs).expect("mixed presentations")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&Scalar::int(-1))
    }
}

/// A finitely supported element of `A ⊗ A`.
#[derive(Clone)]
pub struct TensorElement {
    pres: Presentation,
    coeffs: BTreeMap<(BasisIndex, BasisIndex), Scalar>,
}

impl TensorElement {
    pub fn zero(p: &Presentation) -> Self {
        Self { pres: p.clone(), coeffs: BTreeMap::new() }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn simple(x: &Element, y: &Element) -> Self {
        let mut t = Self::zero(&x.pres);
        for (i, a) in &x.coeffs {
            for (j, b) in &y.coeffs {
                t.add_term(*i, *j, a * b);
            }
        }
        t
    }

    pub fn add_term(&mut self, i: BasisIndex, j: BasisIndex, v: Scalar) {
        if v.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&(i, j)) {
            Some(x) => {
                *x += &v;
                if x.is_zero() {
                    self.coeffs.remove(&(i, j));
                }
            }
            None => {
                self.coeffs.insert((i, j), v);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(BasisIndex, BasisIndex), &Scalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.is_zero_tol(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.values().all(Scalar::is_exact)
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for ((i, j), v) in &other.coeffs {
            out.add_term(*i, *j, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for ((i, j), v) in &other.coeffs {
            out.add_term(*i, *j, -v);
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> TensorElement {
        let mut out = TensorElement::zero(&self.pres);
        for ((i, j), v) in &self.coeffs {
            out.add_term(*i, *j, v * s);
        }
        out
    }

    /// Componentwise product `(x⊗y)(x'⊗y') = xx'⊗yy'`.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        let maps = self.pres.maps();
        let mut out = TensorElement::zero(&self.pres);
        for ((i, j), a) in &self.coeffs {
            for ((k, l), b) in &other.coeffs {
                let ab = a * b;
                let left = maps.mult(i.0, k.0);
                let right = maps.mult(j.0, l.0);
                for (m, c) in &left {
                    let abc = &ab * c;
                    for (n, d) in &right {
                        out.add_term(BasisIndex(*m), BasisIndex(*n), &abc * d);
                    }
                }
            }
        }
        out
    }

    /// Applies linear maps leg-wise: `(f ⊗ g)`.
    pub fn map_legs(&self, f: impl Fn(&Element) -> Result<Element>, g: impl Fn(&Element) -> Result<Element>) -> Result<TensorElement> {
        let mut out = TensorElement::zero(&self.pres);
        let mut lcache: BTreeMap<BasisIndex, Element> = BTreeMap::new();
        let mut rcache: BTreeMap<BasisIndex, Element> = BTreeMap::new();
        for ((i, j), v) in &self.coeffs {
            if !lcache.contains_key(i) {
                lcache.insert(*i, f(&Element::basis(&self.pres, *i))?);
            }
            if !rcache.contains_key(j) {
                rcache.insert(*j, g(&Element::basis(&self.pres, *j))?);
            }
            let l = &lcache[i];
            let r = &rcache[j];
            for (a, x) in &l.coeffs {
                let vx = v * x;
                for (b, y) in &r.coeffs {
                    out.add_term(*a, *b, &vx * y);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate-linear leg-wise map (e.g. `* ⊗ *`): coefficients are conjugated.
    pub fn map_legs_conj(&self, f: impl Fn(&Element) -> Element, g: impl Fn(&Element) -> Element) -> TensorElement {
        let conj = self.conj_coeffs();
        conj.map_legs(|x| Ok(f(x)), |y| Ok(g(y))).expect("infallible")
    }

    fn conj_coeffs(&self) -> TensorElement {
        let mut out = TensorElement::zero(&self.pres);
        for ((i, j), v) in &self.coeffs {
            out.add_term(*i, *j, v.conj());
        }
        out
    }

    pub fn flip(&self) -> TensorElement {
        let mut out = TensorElement::zero(&self.pres);
        for ((i, j), v) in &self.coeffs {
            out.add_term(*j, *i, v.clone());
        }
        out
    }

    /// `(ω ⊗ ι)(t)` for a functional ω on the first leg.
    pub fn contract_left(&self, w: impl Fn(BasisIndex) -> Result<Scalar>) -> Result<Element> {
        let mut out = Element::zero(&self.pres);
        for ((i, j), v) in &self.coeffs {
            let s = w(*i)?;
            if !s.is_zero() {
                accumulate(&mut out.coeffs, *j, v * &s);
            }
        }
        Ok(out)
    }

    /// `(ι ⊗ ω)(t)` for a functional ω on the second leg.
    pub fn contract_right(&self, w: impl Fn(BasisIndex) -> Result<Scalar>) -> Result<Element> {
        let mut out = Element::zero(&self.pres);
        for ((i, j), v) in &self.coeffs {
            let s = w(*j)?;
            if !s.is_zero() {
                accumulate(&mut out.coeffs, *i, v * &s);
            }
        }
        Ok(out)
    }

    /// Multiplication map `m(x ⊗ y) = xy`.
    pub fn multiply_legs(&self) -> Element {
        let maps = self.pres.maps();
        let mut out = Element::zero(&self.pres);
        for ((i, j), v) in &self.coeffs {
            for (k, c) in maps.mult(i.0, j.0) {
                accumulate(&mut out.coeffs, BasisIndex(k), v * &c);
            }
        }
        out
    }

    /// Largest degree over either leg.
    pub fn leg_degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|(i, j)| self.pres.degree_of(*i).max(self.pres.degree_of(*j)))
            .max()
            .unwrap_or(0)
    }
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        self.pres.same(&other.pres) && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let maps = self.pres.maps();
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|((i, j), c)| {
                let l = format!("{}⊗{}", maps.label(i.0), maps.label(j.0));
                if c.is_one() {
                    l
                } else {
                    format!("({c})*{l}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A finitely supported element of `A ⊗ A ⊗ A`.
#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    pub coeffs: BTreeMap<(BasisIndex, BasisIndex, BasisIndex), Scalar>,
}

impl Tensor3 {
    pub fn zero() -> Self {
        Self { coeffs: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: (BasisIndex, BasisIndex, BasisIndex), v: Scalar) {
        if v.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&key) {
            Some(x) => {
                *x += &v;
                if x.is_zero() {
                    self.coeffs.remove(&key);
                }
            }
            None => {
                self.coeffs.insert(key, v);
            }
        }
    }

    pub fn sub(&self, other: &Tensor3) -> Tensor3 {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(*k, -v);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(Scalar::abs).fold(0.0, f64::max)
    }
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|((a, b, c), v)| format!("({v})*[{},{},{}]", a.0, b.0, c.0)).collect();
        write!(f, "{}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

/// Random exact element of degree `<= max_degree` with `terms` small Gaussian-integer coefficients.
pub fn random_element(p: &Presentation, max_degree: usize, terms: usize, rng: &mut impl Rng) -> Element {
    let n = p.dim_upto(p.cap_degree(max_degree));
    let mut e = Element::zero(p);
    for _ in 0..terms {
        let i = rng.gen_range(0..n);
        let re = rng.gen_range(-3i64..=3);
        let im = if rng.gen_bool(0.3) { rng.gen_range(-2i64..=2) } else { 0 };
        let s = &Scalar::int(re) + &(&Scalar::i() * &Scalar::int(im));
        accumulate(&mut e.coeffs, BasisIndex(i), s);
    }
    e
}
