use std::collections::BTreeMap;

use crate::arith::{invert, Field, FieldElement, Matrix};
use crate::error::{Error, Result};

/// A tuple of invertible matrices indexed by generator names; a point of
/// Hom(F_S, GL_n) for the free group F_S.
#[derive(Clone, Debug)]
pub struct Representation {
    field: Field,
    n: usize,
    gens: BTreeMap<String, Matrix>,
    inverses: BTreeMap<String, Matrix>,
}

impl PartialEq for Representation {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.n == o.n && self.gens == o.gens
    }
}

/// A generator or its inverse, by position in the sorted generator list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

impl Representation {
    pub fn new(field: Field, n: usize, gens: BTreeMap<String, Matrix>) -> Result<Self> {
        field.validate()?;
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if gens.is_empty() {
            return Err(Error::InvalidInput(
                "at least one generator is required".into(),
            ));
        }
        let mut inverses = BTreeMap::new();
        for (name, m) in &gens {
            if m.field() != field {
                return Err(Error::FieldMismatch(field, m.field()));
            }
            if m.rows() != n {
                return Err(Error::DimensionMismatch(n, m.rows()));
            }
            if m.cols() != n {
                return Err(Error::DimensionMismatch(n, m.cols()));
            }
            let inv = invert(m).map_err(|_| {
                Error::InvalidInput(format!("generator {name:?} is not invertible"))
            })?;
            inverses.insert(name.clone(), inv);
        }
        Ok(Representation {
            field,
            n,
            gens,
            inverses,
        })
    }

    /// Convenience constructor from `(name, matrix)` pairs.
    pub fn from_pairs<'a>(
        field: Field,
        pairs: impl IntoIterator<Item = (&'a str, Matrix)>,
    ) -> Result<Self> {
        let gens: BTreeMap<String, Matrix> =
            pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let n = gens.values().next().map_or(0, Matrix::rows);
        Representation::new(field, n, gens)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gens.keys().map(String::as_str)
    }

    pub fn generators(&self) -> impl Iterator<Item = (&str, &Matrix)> {
        self.gens.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn matrices(&self) -> impl Iterator<Item = &Matrix> {
        self.gens.values()
    }

    pub fn get(&self, name: &str) -> Option<&Matrix> {
        self.gens.get(name)
    }

    pub fn inverse(&self, name: &str) -> Option<&Matrix> {
        self.inverses.get(name)
    }

    /// Generators followed by their inverses.
    pub fn matrices_with_inverses(&self) -> Vec<&Matrix> {
        self.gens.values().chain(self.inverses.values()).collect()
    }

    /// Letters in the fixed order s1, s1⁻¹, s2, s2⁻¹, …
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.gens.len())
            .flat_map(|g| {
                [
                    Letter {
                        generator: g,
                        inverse: false,
                    },
                    Letter {
                        generator: g,
                        inverse: true,
                    },
                ]
            })
            .collect()
    }

    pub fn letter_matrix(&self, l: Letter) -> &Matrix {
        let map = if l.inverse {
            &self.inverses
        } else {
            &self.gens
        };
        map.values().nth(l.generator).expect("letter out of range")
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let name = self
            .gens
            .keys()
            .nth(l.generator)
            .expect("letter out of range");
        if l.inverse {
            format!("{name}^-1")
        } else {
            name.clone()
        }
    }

    pub fn word_matrix(&self, word: &[Letter]) -> Matrix {
        word.iter()
            .fold(Matrix::identity(self.field, self.n), |acc, &l| {
                acc.mul(self.letter_matrix(l))
            })
    }

    pub fn same_shape(&self, o: &Representation) -> Result<()> {
        if self.field != o.field {
            return Err(Error::FieldMismatch(self.field, o.field));
        }
        if self.n != o.n {
            return Err(Error::DimensionMismatch(self.n, o.n));
        }
        if !self.gens.keys().eq(o.gens.keys()) {
            return Err(Error::InvalidInput("generator sets differ".into()));
        }
        Ok(())
    }

    /// Applies `f` to every generator.
    pub fn map(
        &self,
        mut f: impl FnMut(&str, &Matrix) -> Result<Matrix>,
    ) -> Result<Representation> {
        let mut gens = BTreeMap::new();
        for (k, v) in &self.gens {
            gens.insert(k.clone(), f(k, v)?);
        }
        let n = gens.values().next().map_or(self.n, Matrix::rows);
        Representation::new(self.field, n, gens)
    }

    /// g·ρ·g⁻¹.
    pub fn conjugate(&self, g: &Matrix) -> Result<Representation> {
        let gi = invert(g)?;
        self.map(|_, m| Ok(g.mul(m).mul(&gi)))
    }

    /// h⁻¹·ρ·h, i.e. ρ written in the basis given by the columns of h.
    pub fn in_basis(&self, h: &Matrix) -> Result<Representation> {
        let hi = invert(h)?;
        self.map(|_, m| Ok(hi.mul(m).mul(h)))
    }

    /// The diagonal block `[lo, hi)` of every generator.
    pub fn block(&self, lo: usize, hi: usize) -> Result<Representation> {
        self.map(|_, m| Ok(m.submatrix(lo, hi, lo, hi)))
    }

    /// The contragredient representation s ↦ ρ(s)^{-T}.
    pub fn dual(&self) -> Representation {
        let gens = self
            .inverses
            .iter()
            .map(|(k, v)| (k.clone(), v.transpose()))
            .collect();
        let inverses = self
            .gens
            .iter()
            .map(|(k, v)| (k.clone(), v.transpose()))
            .collect();
        Representation {
            field: self.field,
            n: self.n,
            gens,
            inverses,
        }
    }

    /// Real generators rescaled to determinant ±1.
    pub fn det_normalized(&self) -> Result<Representation> {
        if !self.field.is_real() {
            return Err(Error::NotRealField);
        }
        let n = self.n as f64;
        self.map(|_, m| {
            let d = crate::arith::det(m).as_real().unwrap();
            Ok(m.scale(&FieldElement::Real(d.abs().powf(-1.0 / n))))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        let f = Field::Padic { p: 5 };
        let sing = Matrix::from_i64(f, &[&[1, 1], &[1, 1]]);
        assert!(Representation::from_pairs(f, [("a", sing)]).is_err());
        let u = Matrix::from_i64(f, &[&[1, 1], &[0, 1]]);
        let rho = Representation::from_pairs(f, [("a", u.clone())]).unwrap();
        assert_eq!(
            rho.inverse("a").unwrap(),
            &Matrix::from_i64(f, &[&[1, -1], &[0, 1]])
        );
        let w = [rho.letters()[0], rho.letters()[0]];
        assert_eq!(rho.word_matrix(&w), u.mul(&u));
        let d = rho.dual();
        assert_eq!(
            d.get("a").unwrap(),
            &Matrix::from_i64(f, &[&[1, 0], &[-1, 1]])
        );
    }
}
