//! Text format for finite presentations.
//!
//! ```text
//! aqg-presentation v1
//! name: C[Z2]
//! degree: 0
//! [basis]
//! u_e 0
//! u_g 0
//! [unit]
//! u_e 1
//! [mult]
//! u_g u_g u_e 1
//! ...
//! ```
//!
//! Sections: `[basis]` (label degree), `[unit]` and `[counit]` and `[integral]`
//! (label scalar), `[mult]` (i j k c: `b_i b_j` has `c` on `b_k`), `[comult]`
//! (i j k c: `Δ(b_i)` has `c` on `b_j⊗b_k`), `[star]`, `[antipode]`,
//! `[antipode_inverse]` (i j c: image of `b_i` has `c` on `b_j`). The last
//! section is optional and is computed by inversion when absent. Missing
//! entries are zero; `#` starts a comment.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{AqgError, Result};
use crate::hopf::axioms::check_axioms;
use crate::hopf::{Lin, Presentation, StructureMaps};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

pub const HEADER: &str = "aqg-presentation v1";

#[derive(Debug, Clone)]
pub struct FilePresentation {
    name: String,
    labels: Vec<String>,
    degrees: Vec<usize>,
    index: HashMap<String, usize>,
    unit: Lin,
    mult: HashMap<(usize, usize), Lin>,
    comult: Vec<Vec<(usize, usize, Scalar)>>,
    star: Vec<Lin>,
    antipode: Vec<Lin>,
    antipode_inv: Vec<Lin>,
    counit: Vec<Scalar>,
    integral: Vec<Scalar>,
    /// Degree up to which the loader certifies the axioms.
    pub check_degree: usize,
}

impl StructureMaps for FilePresentation {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }
    fn dim_upto(&self, d: usize) -> usize {
        self.degrees.iter().filter(|&&x| x <= d).count()
    }
    fn max_degree(&self) -> Option<usize> {
        Some(self.degrees.iter().copied().max().unwrap_or(0))
    }
    fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }
    fn lookup(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
    fn unit(&self) -> Lin {
        self.unit.clone()
    }
    fn mult(&self, i: usize, j: usize) -> Lin {
        self.mult.get(&(i, j)).cloned().unwrap_or_default()
    }
    fn comult(&self, i: usize) -> Vec<(usize, usize, Scalar)> {
        self.comult[i].clone()
    }
    fn star(&self, i: usize) -> Lin {
        self.star[i].clone()
    }
    fn antipode(&self, i: usize) -> Lin {
        self.antipode[i].clone()
    }
    fn antipode_inv(&self, i: usize) -> Lin {
        self.antipode_inv[i].clone()
    }
    fn counit(&self, i: usize) -> Scalar {
        self.counit[i].clone()
    }
    fn right_integral(&self, i: usize) -> Result<Scalar> {
        Ok(self.integral[i].clone())
    }
}

fn perr(line: usize, message: impl Into<String>) -> AqgError {
    AqgError::Parse { line, message: message.into() }
}

fn push_lin(lin: &mut Lin, k: usize, c: Scalar) {
    match lin.iter_mut().find(|(i, _)| *i == k) {
        Some((_, v)) => *v += &c,
        None => lin.push((k, c)),
    }
    lin.retain(|(_, v)| !v.is_zero());
}

/// Parses the text format without running the axiom checker.
pub fn parse_presentation(text: &str) -> Result<FilePresentation> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((n, other)) => return Err(perr(n, format!("expected header '{HEADER}', found '{other}'"))),
        None => return Err(perr(0, "empty file")),
    }
    let mut name = "loaded".to_string();
    let mut check_degree = 0usize;
    let mut section = String::new();
    let mut basis: Vec<(String, usize)> = Vec::new();
    let mut raw: BTreeMap<String, Vec<(usize, Vec<String>)>> = BTreeMap::new();
    for (n, l) in lines {
        if let Some(s) = l.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = s.trim().to_string();
            const KNOWN: [&str; 9] = ["basis", "unit", "mult", "comult", "star", "antipode", "antipode_inverse", "counit", "integral"];
            if !KNOWN.contains(&section.as_str()) {
                return Err(perr(n, format!("unknown section [{section}]")));
            }
            continue;
        }
        if section.is_empty() {
            if let Some(v) = l.strip_prefix("name:") {
                name = v.trim().to_string();
            } else if let Some(v) = l.strip_prefix("degree:") {
                check_degree = v.trim().parse().map_err(|_| perr(n, "degree must be a nonnegative integer"))?;
            } else {
                return Err(perr(n, format!("unexpected line '{l}' before the first section")));
            }
            continue;
        }
        let fields: Vec<String> = l.split_whitespace().map(str::to_string).collect();
        if section == "basis" {
            if fields.len() != 2 {
                return Err(perr(n, "basis entries are 'label degree'"));
            }
            let d = fields[1].parse().map_err(|_| perr(n, "bad degree"))?;
            basis.push((fields[0].clone(), d));
        } else {
            raw.entry(section.clone()).or_default().push((n, fields));
        }
    }
    if basis.is_empty() {
        return Err(perr(0, "no [basis] section"));
    }
    // Index order: by degree, stable in declaration order.
    basis.sort_by_key(|(_, d)| *d);
    let dim = basis.len();
    let mut index = HashMap::new();
    for (i, (l, _)) in basis.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(perr(0, format!("duplicate basis label '{l}'")));
        }
    }
    let idx = |n: usize, s: &str| index.get(s).copied().ok_or_else(|| perr(n, format!("unknown basis label '{s}'")));
    let scalar = |n: usize, s: &str| s.parse::<Scalar>().map_err(|e| perr(n, format!("bad scalar '{s}': {e}")));
    let entries = |sec: &str| raw.get(sec).cloned().unwrap_or_default();
    let arity = |n: usize, f: &[String], k: usize, sec: &str| {
        if f.len() == k {
            Ok(())
        } else {
            Err(perr(n, format!("[{sec}] entries have {k} fields")))
        }
    };

    let functional = |sec: &str| -> Result<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); dim];
        for (n, f) in entries(sec) {
            arity(n, &f, 2, sec)?;
            let i = idx(n, &f[0])?;
            v[i] = &v[i] + &scalar(n, &f[1])?;
        }
        Ok(v)
    };
    let unit_vec = functional("unit")?;
    let counit = functional("counit")?;
    let integral = functional("integral")?;
    let unit: Lin = unit_vec.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();

    let mut mult: HashMap<(usize, usize), Lin> = HashMap::new();
    for (n, f) in entries("mult") {
        arity(n, &f, 4, "mult")?;
        let (i, j, k) = (idx(n, &f[0])?, idx(n, &f[1])?, idx(n, &f[2])?);
        push_lin(mult.entry((i, j)).or_default(), k, scalar(n, &f[3])?);
    }
    let mut comult: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); dim];
    for (n, f) in entries("comult") {
        arity(n, &f, 4, "comult")?;
        let (i, j, k) = (idx(n, &f[0])?, idx(n, &f[1])?, idx(n, &f[2])?);
        let c = scalar(n, &f[3])?;
        match comult[i].iter_mut().find(|(a, b, _)| *a == j && *b == k) {
            Some((_, _, v)) => *v += &c,
            None => comult[i].push((j, k, c)),
        }
        comult[i].retain(|(_, _, v)| !v.is_zero());
    }
    let linear = |sec: &str| -> Result<Vec<Lin>> {
        let mut v: Vec<Lin> = vec![Vec::new(); dim];
        for (n, f) in entries(sec) {
            arity(n, &f, 3, sec)?;
            let (i, j) = (idx(n, &f[0])?, idx(n, &f[1])?);
            push_lin(&mut v[i], j, scalar(n, &f[2])?);
        }
        Ok(v)
    };
    let star = linear("star")?;
    let antipode = linear("antipode")?;
    let antipode_inv = if raw.contains_key("antipode_inverse") { linear("antipode_inverse")? } else { invert(&antipode, dim)? };
    let labels: Vec<String> = basis.iter().map(|(l, _)| l.clone()).collect();
    let degrees: Vec<usize> = basis.iter().map(|(_, d)| *d).collect();
    Ok(FilePresentation { name, labels, degrees, index, unit, mult, comult, star, antipode, antipode_inv, counit, integral, check_degree })
}

fn invert(map: &[Lin], dim: usize) -> Result<Vec<Lin>> {
    let mut m = DenseMatrix::zeros(dim, dim);
    for (j, lin) in map.iter().enumerate() {
        for (i, c) in lin {
            m.set(*i, j, c.clone());
        }
    }
    let inv = m.inverse(0.0).map_err(|_| AqgError::InvalidPresentation("antipode is not invertible".into()))?;
    Ok((0..dim).map(|j| inv.column(j).into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()).collect())
}

/// Parses, then certifies with the axiom checker up to the declared degree.
pub fn load_presentation(text: &str, tol: f64) -> Result<Presentation> {
    let fp = parse_presentation(text)?;
    let degree = fp.check_degree;
    let p = Presentation::new(fp);
    let rep = check_axioms(&p, degree, tol);
    if let Some(f) = rep.failures().first() {
        return Err(AqgError::InvalidPresentation(format!(
            "{} failed: {}",
            f.id,
            f.witness.clone().unwrap_or_default()
        )));
    }
    Ok(p)
}

/// Serializes a finite presentation (all basis elements).
pub fn write_presentation(p: &Presentation) -> Result<String> {
    let maps = p.maps();
    let Some(top) = maps.max_degree() else {
        return Err(AqgError::Usage(format!("{} has an infinite basis and cannot be written", p.name())));
    };
    let n = maps.dim_upto(top);
    let l = |i: usize| maps.label(i);
    let mut s = format!("{HEADER}\nname: {}\ndegree: {top}\n[basis]\n", p.name());
    for i in 0..n {
        let _ = writeln!(s, "{} {}", l(i), maps.degree(i));
    }
    s += "[unit]\n";
    for (i, c) in maps.unit() {
        let _ = writeln!(s, "{} {c}", l(i));
    }
    s += "[mult]\n";
    for i in 0..n {
        for j in 0..n {
            for (k, c) in maps.mult(i, j) {
                let _ = writeln!(s, "{} {} {} {c}", l(i), l(j), l(k));
            }
        }
    }
    s += "[comult]\n";
    for i in 0..n {
        for (j, k, c) in maps.comult(i) {
            let _ = writeln!(s, "{} {} {} {c}", l(i), l(j), l(k));
        }
    }
    for (sec, f) in [("star", 0), ("antipode", 1), ("antipode_inverse", 2)] {
        let _ = writeln!(s, "[{sec}]");
        for i in 0..n {
            let lin = match f {
                0 => maps.star(i),
                1 => maps.antipode(i),
                _ => maps.antipode_inv(i),
            };
            for (j, c) in lin {
                let _ = writeln!(s, "{} {} {c}", l(i), l(j));
            }
        }
    }
    s += "[counit]\n";
    for i in 0..n {
        let c = maps.counit(i);
        if !c.is_zero() {
            let _ = writeln!(s, "{} {c}", l(i));
        }
    }
    s += "[integral]\n";
    for i in 0..n {
        let c = maps.right_integral(i)?;
        if !c.is_zero() {
            let _ = writeln!(s, "{} {c}", l(i));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{make_function_algebra, make_group_algebra, FiniteGroup};

    #[test]
    fn round_trip_group_algebra() {
        let p = make_group_algebra(&FiniteGroup::s3());
        let text = write_presentation(&p).unwrap();
        let q = load_presentation(&text, 1e-9).unwrap();
        assert_eq!(write_presentation(&q).unwrap(), text);
    }

    #[test]
    fn antipode_inverse_is_computed_when_absent() {
        let p = make_function_algebra(&FiniteGroup::cyclic(4));
        let text = write_presentation(&p).unwrap();
        let cut: String = {
            let start = text.find("[antipode_inverse]").unwrap();
            let end = text.find("[counit]").unwrap();
            format!("{}{}", &text[..start], &text[end..])
        };
        let q = load_presentation(&cut, 1e-9).unwrap();
        for i in 0..4 {
            assert_eq!(q.maps().antipode_inv(i), p.maps().antipode_inv(i));
        }
    }

    #[test]
    fn corrupted_constant_is_rejected_with_witness() {
        let p = make_group_algebra(&FiniteGroup::cyclic(4));
        let text = write_presentation(&p).unwrap().replace("u_g u_g u_g2 1", "u_g u_g u_g3 1");
        let err = load_presentation(&text, 1e-9).unwrap_err().to_string();
        assert!(err.contains("axioms.associativity") || err.contains("axioms.unit"), "{err}");
        let fp = parse_presentation(&text).unwrap();
        let r = check_axioms(&Presentation::new(fp), 0, 1e-9);
        let a = r.get("axioms.associativity").unwrap();
        assert!(a.witness.as_ref().unwrap().contains("u_g"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_presentation("aqg-presentation v1\n[basis]\nx 0\n[mult]\nx y x 1\n").unwrap_err();
        assert!(matches!(e, AqgError::Parse { line: 5, .. }));
        assert!(parse_presentation("nope").is_err());
        assert!(parse_presentation("aqg-presentation v1\n[bogus]\n").is_err());
    }
}
