//! Built-in presentations: C[G], F(G) for small finite groups and Pol(SU_q(2)).

pub mod groups;
pub mod suq2;

use num_rational::BigRational;

use crate::error::{AqgError, Result};
use crate::hopf::Presentation;

pub use groups::{make_function_algebra, make_group_algebra, FiniteGroup};
pub use suq2::{is_rational_square, make_suq2, parse_q, rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    GroupAlgebra(FiniteGroup),
    FunctionAlgebra(FiniteGroup),
    Suq2 { q: BigRational },
}

/// A selected example together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSpec {
    pub family: Family,
}

impl ExampleSpec {
    /// Parses `group:C[Z2]`, `group:F[S3]`, `C[Z8]`, `F[D4]` or `suq2` (with `q`).
    pub fn parse(name: &str, q: Option<&str>) -> Result<Self> {
        let t = name.trim();
        if t == "suq2" {
            let q = parse_q(q.unwrap_or("1/4"))?;
            if !(q > BigRational::from_integer(0.into()) && q < BigRational::from_integer(1.into())) {
                return Err(AqgError::Usage(format!("q = {q} must lie in (0, 1)")));
            }
            return Ok(Self { family: Family::Suq2 { q } });
        }
        let body = t.strip_prefix("group:").unwrap_or(t);
        let inner = |prefix: &str| body.strip_prefix(prefix).and_then(|r| r.strip_suffix(']'));
        if let Some(g) = inner("C[") {
            return Ok(Self { family: Family::GroupAlgebra(FiniteGroup::by_name(g)?) });
        }
        if let Some(g) = inner("F[") {
            return Ok(Self { family: Family::FunctionAlgebra(FiniteGroup::by_name(g)?) });
        }
        Err(AqgError::Usage(format!("unknown example '{name}'")))
    }

    pub fn build(&self, max_degree: usize) -> Result<Presentation> {
        match &self.family {
            Family::GroupAlgebra(g) => Ok(make_group_algebra(g)),
            Family::FunctionAlgebra(g) => Ok(make_function_algebra(g)),
            Family::Suq2 { q } => make_suq2(q, max_degree),
        }
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::GroupAlgebra(g) => format!("group:C[{}]", g.name()),
            Family::FunctionAlgebra(g) => format!("group:F[{}]", g.name()),
            Family::Suq2 { .. } => "suq2".to_string(),
        }
    }

    pub fn q(&self) -> Option<&BigRational> {
        match &self.family {
            Family::Suq2 { q } => Some(q),
            _ => None,
        }
    }
}

/// All built-in finite examples: C[G] and F(G) for Z2, Z4, Z8, S3, D4.
pub fn finite_examples() -> Vec<Presentation> {
    let mut out = Vec::new();
    for name in ["Z2", "Z4", "Z8", "S3", "D4"] {
        let g = FiniteGroup::by_name(name).expect("built-in group");
        out.push(make_group_algebra(&g));
        out.push(make_function_algebra(&g));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(ExampleSpec::parse("group:C[Z2]", None).unwrap().label(), "group:C[Z2]");
        assert_eq!(ExampleSpec::parse("F[S3]", None).unwrap().label(), "group:F[S3]");
        let s = ExampleSpec::parse("suq2", Some("1/4")).unwrap();
        assert_eq!(s.q(), Some(&rational(1, 4)));
        assert!(ExampleSpec::parse("suq2", Some("2")).is_err());
        assert!(ExampleSpec::parse("group:X[Z2]", None).is_err());
        assert!(ExampleSpec::parse("group:C[Q8]", None).is_err());
        assert_eq!(finite_examples().len(), 10);
    }
}
