//! Finite groups and their Kac-type quantum groups C[G] and F(G).

use std::sync::Arc;

use crate::error::{AqgError, Result};
use crate::hopf::{Lin, Presentation, StructureMaps};
use crate::scalar::Scalar;

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    name: String,
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[g][h] = gh`).
    pub fn new(name: &str, labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(AqgError::InvalidGroup(format!("{name}: table shape")));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| AqgError::InvalidGroup(format!("{name}: no identity")))?;
        let mut inverse = vec![0; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| AqgError::InvalidGroup(format!("{name}: {} has no inverse", labels[g])))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(AqgError::InvalidGroup(format!(
                            "{name}: not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(Self { name: name.to_string(), labels, table, identity, inverse })
    }

    /// The cyclic group `Z_n` with generator `g`.
    pub fn cyclic(n: usize) -> Self {
        let labels = (0..n)
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{k}"),
            })
            .collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(&format!("Z{n}"), labels, table).expect("cyclic table")
    }

    /// The dihedral group of order `2m`, elements `s^a r^b`, with `r s = s r^{-1}`.
    pub fn dihedral(m: usize, name: &str) -> Self {
        let idx = |a: usize, b: usize| a * m + b;
        let label = |a: usize, b: usize| {
            let r = match b {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r{b}"),
            };
            match (a, b) {
                (0, 0) => "e".to_string(),
                (0, _) => r,
                (_, 0) => "s".to_string(),
                _ => format!("s{r}"),
            }
        };
        let mut labels = vec![String::new(); 2 * m];
        let mut table = vec![vec![0; 2 * m]; 2 * m];
        for a in 0..2 {
            for b in 0..m {
                labels[idx(a, b)] = label(a, b);
                for c in 0..2 {
                    for d in 0..m {
                        let rb = if c == 1 { (m - b) % m } else { b };
                        table[idx(a, b)][idx(c, d)] = idx((a + c) % 2, (rb + d) % m);
                    }
                }
            }
        }
        Self::new(name, labels, table).expect("dihedral table")
    }

    pub fn s3() -> Self {
        Self::dihedral(3, "S3")
    }

    pub fn d4() -> Self {
        Self::dihedral(4, "D4")
    }

    /// Looks up a built-in group: `Z2`, `Z4`, `Z8`, any `Zn`, `S3`, `D4`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "S3" => Ok(Self::s3()),
            "D4" => Ok(Self::d4()),
            _ => match name.strip_prefix('Z').and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if n >= 1 => Ok(Self::cyclic(n)),
                _ => Err(AqgError::Usage(format!("unknown group '{name}'"))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

fn lookup_prefixed(g: &FiniteGroup, prefix: &str, label: &str) -> Option<usize> {
    let rest = label.strip_prefix(prefix)?;
    g.labels.iter().position(|l| l == rest)
}

/// The group algebra `C[G]`: basis `u_g`.
pub struct GroupAlgebra {
    g: Arc<FiniteGroup>,
}

impl StructureMaps for GroupAlgebra {
    fn name(&self) -> String {
        format!("C[{}]", self.g.name)
    }
    fn degree(&self, _i: usize) -> usize {
        0
    }
    fn dim_upto(&self, _d: usize) -> usize {
        self.g.order()
    }
    fn max_degree(&self) -> Option<usize> {
        Some(0)
    }
    fn label(&self, i: usize) -> String {
        format!("u_{}", self.g.label(i))
    }
    fn lookup(&self, label: &str) -> Option<usize> {
        lookup_prefixed(&self.g, "u_", label)
    }
    fn unit(&self) -> Lin {
        vec![(self.g.identity(), Scalar::one())]
    }
    fn mult(&self, i: usize, j: usize) -> Lin {
        vec![(self.g.mul(i, j), Scalar::one())]
    }
    fn comult(&self, i: usize) -> Vec<(usize, usize, Scalar)> {
        vec![(i, i, Scalar::one())]
    }
    fn star(&self, i: usize) -> Lin {
        vec![(self.g.inv(i), Scalar::one())]
    }
    fn antipode(&self, i: usize) -> Lin {
        vec![(self.g.inv(i), Scalar::one())]
    }
    fn antipode_inv(&self, i: usize) -> Lin {
        vec![(self.g.inv(i), Scalar::one())]
    }
    fn counit(&self, _i: usize) -> Scalar {
        Scalar::one()
    }
    fn right_integral(&self, i: usize) -> Result<Scalar> {
        Ok(if i == self.g.identity() { Scalar::one() } else { Scalar::zero() })
    }
    fn degree_growth_bound(&self, _n1: usize, _n2: usize) -> usize {
        0
    }
}

/// The function algebra `F(G)`: basis of point indicators `e_g`.
pub struct FunctionAlgebra {
    g: Arc<FiniteGroup>,
}

impl StructureMaps for FunctionAlgebra {
    fn name(&self) -> String {
        format!("F[{}]", self.g.name)
    }
    fn degree(&self, _i: usize) -> usize {
        0
    }
    fn dim_upto(&self, _d: usize) -> usize {
        self.g.order()
    }
    fn max_degree(&self) -> Option<usize> {
        Some(0)
    }
    fn label(&self, i: usize) -> String {
        format!("e_{}", self.g.label(i))
    }
    fn lookup(&self, label: &str) -> Option<usize> {
        lookup_prefixed(&self.g, "e_", label)
    }
    fn unit(&self) -> Lin {
        (0..self.g.order()).map(|g| (g, Scalar::one())).collect()
    }
    fn mult(&self, i: usize, j: usize) -> Lin {
        if i == j {
            vec![(i, Scalar::one())]
        } else {
            Vec::new()
        }
    }
    fn comult(&self, i: usize) -> Vec<(usize, usize, Scalar)> {
        (0..self.g.order()).map(|h| (h, self.g.mul(self.g.inv(h), i), Scalar::one())).collect()
    }
    fn star(&self, i: usize) -> Lin {
        vec![(i, Scalar::one())]
    }
    fn antipode(&self, i: usize) -> Lin {
        vec![(self.g.inv(i), Scalar::one())]
    }
    fn antipode_inv(&self, i: usize) -> Lin {
        vec![(self.g.inv(i), Scalar::one())]
    }
    fn counit(&self, i: usize) -> Scalar {
        if i == self.g.identity() {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    }
    fn right_integral(&self, _i: usize) -> Result<Scalar> {
        Ok(Scalar::one())
    }
    fn degree_growth_bound(&self, _n1: usize, _n2: usize) -> usize {
        0
    }
}

pub fn make_group_algebra(g: &FiniteGroup) -> Presentation {
    Presentation::new(GroupAlgebra { g: Arc::new(g.clone()) })
}

pub fn make_function_algebra(g: &FiniteGroup) -> Presentation {
    Presentation::new(FunctionAlgebra { g: Arc::new(g.clone()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{Element, TensorElement};

    #[test]
    fn group_tables_validate() {
        for name in ["Z2", "Z4", "Z8", "S3", "D4"] {
            let g = FiniteGroup::by_name(name).unwrap();
            assert_eq!(g.name(), name);
        }
        assert!(!FiniteGroup::s3().is_abelian());
        assert!(!FiniteGroup::d4().is_abelian());
        assert!(FiniteGroup::cyclic(8).is_abelian());
        assert_eq!(FiniteGroup::d4().order(), 8);
        let bad = FiniteGroup::new("bad", vec!["a".into(), "b".into()], vec![vec![0, 0], vec![0, 1]]);
        assert!(bad.is_err());
    }

    #[test]
    fn group_algebra_products() {
        let p = make_group_algebra(&FiniteGroup::cyclic(2));
        let ug = p.element("u_g").unwrap();
        assert_eq!(&ug * &ug, p.element("u_e").unwrap());
        assert_eq!(ug.comul(), TensorElement::simple(&ug, &ug));
        assert_eq!(ug.star(), ug);
        assert_eq!(ug.left_integral().unwrap(), Scalar::zero());
        assert_eq!(p.unit().left_integral().unwrap(), Scalar::one());
    }

    #[test]
    fn function_algebra_products() {
        let p = make_function_algebra(&FiniteGroup::cyclic(2));
        let ee = p.element("e_e").unwrap();
        let eg = p.element("e_g").unwrap();
        assert_eq!(&eg * &eg, eg);
        assert!((&ee * &eg).is_zero());
        let expected = TensorElement::simple(&ee, &eg).add(&TensorElement::simple(&eg, &ee));
        assert_eq!(eg.comul(), expected);
        let expected_e = TensorElement::simple(&ee, &ee).add(&TensorElement::simple(&eg, &eg));
        assert_eq!(ee.comul(), expected_e);
        assert_eq!(eg.right_integral().unwrap(), Scalar::one());
        assert_eq!(eg.left_integral().unwrap(), Scalar::one());
        assert_eq!(Element::zero(&p).counit(), Scalar::zero());
    }

    #[test]
    fn s3_antipode_is_inverse() {
        let g = FiniteGroup::s3();
        let p = make_function_algebra(&g);
        for i in 0..6 {
            let s = p.basis(i).antipode();
            assert_eq!(s, p.basis(g.inv(i)));
        }
    }
}
