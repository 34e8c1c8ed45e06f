//! The Bruhat–Tits tree of SL₂ over ℚ_p, products of two trees and the
//! tree counter-example.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{invert, Field, FieldElement, Matrix, Valuation};
use crate::error::{Error, Result};
use crate::reptheory::{is_cr, Representation};

pub const DEFAULT_RADIUS: usize = 4;

/// Homothety class of the lattice spanned by the columns of `basis`.
#[derive(Clone, Debug)]
pub struct TreeVertex {
    basis: Matrix,
    p: u64,
}

fn prime_of(m: &Matrix) -> Result<u64> {
    match m.field() {
        Field::Padic { p } => Ok(p),
        found => Err(Error::WrongField {
            expected: "p-adic",
            found,
        }),
    }
}

impl TreeVertex {
    pub fn new(basis: Matrix) -> Result<Self> {
        let p = prime_of(&basis)?;
        if basis.rows() != 2 || basis.cols() != 2 {
            return Err(Error::DimensionMismatch(2, basis.rows()));
        }
        invert(&basis)?;
        Ok(TreeVertex { basis, p })
    }

    /// The class of the standard lattice.
    pub fn origin(p: u64) -> Self {
        TreeVertex {
            basis: Matrix::identity(Field::Padic { p }, 2),
            p,
        }
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    fn field(&self) -> Field {
        Field::Padic { p: self.p }
    }

    /// g·v, the class of the lattice spanned by g·basis.
    pub fn act(&self, g: &Matrix) -> Result<TreeVertex> {
        if prime_of(g)? != self.p {
            return Err(Error::PrimeMismatch(self.p, prime_of(g)?));
        }
        TreeVertex::new(g.mul(&self.basis))
    }
}

impl PartialEq for TreeVertex {
    fn eq(&self, other: &Self) -> bool {
        tree_dist(self, other) == Ok(0)
    }
}

/// Graph distance e_max − e_min from the elementary divisors of u⁻¹v.
///
/// For a 2×2 matrix M, e_min = min v(M_ij) and e_min + e_max = v(det M); the
/// gap is scale-invariant, so adj(u)·v is used in place of u⁻¹v.
pub fn tree_dist(u: &TreeVertex, v: &TreeVertex) -> Result<u64> {
    if u.p != v.p {
        return Err(Error::PrimeMismatch(u.p, v.p));
    }
    let a = &u.basis;
    let f = a.field();
    let adj = Matrix::from_rows(
        f,
        vec![
            vec![a[(1, 1)].clone(), -&a[(0, 1)]],
            vec![-&a[(1, 0)], a[(0, 0)].clone()],
        ],
    )?;
    let m = adj.mul(&v.basis);
    let det = &(&m[(0, 0)] * &m[(1, 1)]) - &(&m[(0, 1)] * &m[(1, 0)]);
    let vd = det.valuation()?.finite().ok_or(Error::Singular)?;
    let vmin = m.min_valuation()?.finite().ok_or(Error::Singular)?;
    Ok((vd - 2 * vmin).unsigned_abs())
}

/// The p + 1 vertices adjacent to `v`.
pub fn neighbors(v: &TreeVertex) -> Vec<TreeVertex> {
    let f = v.field();
    let p = v.p as i64;
    let mut out = Vec::with_capacity(v.p as usize + 1);
    out.push(TreeVertex {
        basis: v.basis.mul(&Matrix::from_i64(f, &[&[1, 0], &[0, p]])),
        p: v.p,
    });
    for j in 0..p {
        out.push(TreeVertex {
            basis: v.basis.mul(&Matrix::from_i64(f, &[&[p, j], &[0, 1]])),
            p: v.p,
        });
    }
    out
}

/// tree_dist(v, g·v).
pub fn vertex_displacement(g: &Matrix, v: &TreeVertex) -> Result<u64> {
    tree_dist(v, &v.act(g)?)
}

/// Vertices within distance `radius` of a centre, in breadth-first order,
/// with their depth and the index of their parent.
#[derive(Clone, Debug)]
pub struct Ball {
    pub vertices: Vec<TreeVertex>,
    pub depth: Vec<usize>,
    pub parent: Vec<Option<usize>>,
}

impl Ball {
    /// Non-backtracking breadth-first enumeration; no deduplication is needed
    /// because the graph is a tree.
    pub fn around(center: &TreeVertex, radius: usize) -> Ball {
        let mut ball = Ball {
            vertices: vec![center.clone()],
            depth: vec![0],
            parent: vec![None],
        };
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if ball.depth[i] == radius {
                continue;
            }
            let back = ball.parent[i].map(|j| ball.vertices[j].clone());
            for w in neighbors(&ball.vertices[i]) {
                if back.as_ref().is_some_and(|b| *b == w) {
                    continue;
                }
                ball.vertices.push(w);
                ball.depth.push(ball.depth[i] + 1);
                ball.parent.push(Some(i));
                queue.push_back(ball.vertices.len() - 1);
            }
        }
        ball
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// 1 + (p + 1)(p^R − 1)/(p − 1).
pub fn ball_size(p: u64, radius: usize) -> u64 {
    1 + (p + 1) * (p.pow(radius as u32) - 1) / (p - 1)
}

/// Minimum of the vertex displacement over the ball of radius `radius`
/// around the origin, with the first minimizing vertex in breadth-first order.
pub fn translation_length(g: &Matrix, radius: usize) -> Result<(u64, Option<TreeVertex>)> {
    let ball = Ball::around(&TreeVertex::origin(prime_of(g)?), radius);
    let mut best: Option<(u64, usize)> = None;
    for (i, v) in ball.vertices.iter().enumerate() {
        let d = vertex_displacement(g, v)?;
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, i));
        }
    }
    let (d, i) = best.expect("ball contains its centre");
    Ok((d, Some(ball.vertices[i].clone())))
}

/// A point of X₁ × X₂, with the ℓ² product metric.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductPoint {
    pub v1: TreeVertex,
    pub v2: TreeVertex,
}

impl ProductPoint {
    pub fn new(v1: TreeVertex, v2: TreeVertex) -> Result<Self> {
        if v1.p != v2.p {
            return Err(Error::PrimeMismatch(v1.p, v2.p));
        }
        Ok(ProductPoint { v1, v2 })
    }
}

pub fn product_dist(x: &ProductPoint, y: &ProductPoint) -> Result<f64> {
    let a = tree_dist(&x.v1, &y.v1)? as f64;
    let b = tree_dist(&x.v2, &y.v2)? as f64;
    Ok(a.hypot(b))
}

/// Displacement of (g₁, g₂) acting factorwise.
pub fn product_displacement(g1: &Matrix, g2: &Matrix, x: &ProductPoint) -> Result<f64> {
    let a = vertex_displacement(g1, &x.v1)? as f64;
    let b = vertex_displacement(g2, &x.v2)? as f64;
    Ok(a.hypot(b))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub p: u64,
    pub t: String,
    pub v_t: i64,
    pub radius: usize,
    pub g1: Vec<Vec<String>>,
    pub g2: Vec<Vec<String>>,
    /// Basis of a vertex of the second tree fixed by g₂.
    pub fixed_vertex: Option<Vec<Vec<String>>>,
    pub fixed_vertex_depth: Option<usize>,
    /// Minimum of g₁'s displacement over the balls of radius 0..=radius.
    pub displacement_by_radius: Vec<u64>,
    pub min_over_y: Option<f64>,
    pub expected_min: i64,
    pub verdict_a: bool,
    pub cr_second_factor: bool,
    pub cr_packaged: bool,
    pub verdict_b: bool,
    /// v(entry (0,1) of b_i g₂ b_i⁻¹) for i = 0..=imax.
    pub valuations: Vec<Valuation>,
    pub increment: i64,
    pub g1_fixed: bool,
    pub threshold_reached: bool,
    pub verdict_c: bool,
}

impl CounterexampleReport {
    pub fn all_verified(&self) -> bool {
        self.verdict_a && self.verdict_b && self.verdict_c
    }
}

/// Rebuilds the product-of-trees example with g₁ = diag(t, 1/t) and
/// g₂ = [[1, t], [0, 1]], v_p(t) < 0.
pub fn product_tree_counterexample(
    p: u64,
    t: &BigRational,
    imax: usize,
    radius: usize,
) -> Result<CounterexampleReport> {
    let field = Field::Padic { p };
    field.validate()?;
    let te = FieldElement::rational(p, t.clone());
    let vt = te.valuation()?;
    let v = match vt {
        Valuation::Finite(v) if v < 0 => v,
        other => return Err(Error::BadT(other)),
    };
    let one = FieldElement::one(field);
    let zero = FieldElement::zero(field);
    let tinv = te.inv().expect("t is nonzero");
    let g1 = Matrix::diagonal(field, &[te.clone(), tinv]);
    let g2 = Matrix::from_rows(
        field,
        vec![
            vec![one.clone(), te.clone()],
            vec![zero.clone(), one.clone()],
        ],
    )?;

    let origin = TreeVertex::origin(p);
    let ball = Ball::around(&origin, radius);
    let mut fixed = None;
    for (i, w) in ball.vertices.iter().enumerate() {
        if vertex_displacement(&g2, w)? == 0 {
            fixed = Some(i);
            break;
        }
    }
    let mut displacement_by_radius = Vec::with_capacity(radius + 1);
    let mut running = u64::MAX;
    let mut k = 0;
    for r in 0..=radius {
        while k < ball.len() && ball.depth[k] <= r {
            running = running.min(vertex_displacement(&g1, &ball.vertices[k])?);
            k += 1;
        }
        displacement_by_radius.push(running);
    }
    let expected_min = -2 * v;
    let min_over_y = match fixed {
        Some(i) => {
            let mut best = f64::INFINITY;
            for w in &ball.vertices {
                best = best.min(product_displacement(
                    &g1,
                    &g2,
                    &ProductPoint::new(w.clone(), ball.vertices[i].clone())?,
                )?);
            }
            Some(best)
        }
        None => None,
    };
    let stable = displacement_by_radius.len() >= 2
        && displacement_by_radius[radius] == displacement_by_radius[radius - 1];
    let verdict_a = min_over_y == Some(expected_min as f64) && stable;

    let second = Representation::from_pairs(field, [("a", g2.clone())])?;
    let cr_second_factor = is_cr(&second, crate::reptheory::DEFAULT_SEED);
    let packaged = Representation::from_pairs(
        field,
        [(
            "a",
            Matrix::block_diagonal(field, &[g1.clone(), g2.clone()]),
        )],
    )?;
    let cr_packaged = is_cr(&packaged, crate::reptheory::DEFAULT_SEED);
    let verdict_b = !cr_second_factor && !cr_packaged;

    let mut valuations = Vec::with_capacity(imax + 1);
    let mut g1_fixed = true;
    for i in 0..=imax as i64 {
        let b = Matrix::diagonal(field, &[te.pow(-i), te.pow(i)]);
        let bi = Matrix::diagonal(field, &[te.pow(i), te.pow(-i)]);
        valuations.push(b.mul(&g2).mul(&bi)[(0, 1)].valuation()?);
        g1_fixed &= b.mul(&g1).mul(&bi) == g1;
    }
    let increment = -2 * v;
    let linear = valuations
        .iter()
        .enumerate()
        .all(|(i, val)| *val == Valuation::Finite(v * (1 - 2 * i as i64)));
    let threshold_reached = valuations
        .last()
        .is_some_and(|x| *x >= Valuation::Finite(crate::parabolic::VALUATION_THRESHOLD));
    let verdict_c = linear && g1_fixed && increment > 0;

    let to_string = |x: &BigRational| {
        if x.denom() == &BigInt::from(1) {
            x.numer().to_string()
        } else {
            format!("{}/{}", x.numer(), x.denom())
        }
    };
    Ok(CounterexampleReport {
        p,
        t: to_string(t),
        v_t: v,
        radius,
        g1: g1.encode(),
        g2: g2.encode(),
        fixed_vertex: fixed.map(|i| ball.vertices[i].basis.encode()),
        fixed_vertex_depth: fixed.map(|i| ball.depth[i]),
        displacement_by_radius,
        min_over_y,
        expected_min,
        verdict_a,
        cr_second_factor,
        cr_packaged,
        verdict_b,
        valuations,
        increment,
        g1_fixed,
        threshold_reached,
        verdict_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> Field {
        Field::Padic { p }
    }

    #[test]
    fn distances() {
        let f = q(5);
        let o = TreeVertex::origin(5);
        assert_eq!(tree_dist(&o, &o), Ok(0));
        let v1 = TreeVertex::new(Matrix::from_i64(f, &[&[5, 0], &[0, 1]])).unwrap();
        let v2 = TreeVertex::new(Matrix::from_i64(f, &[&[25, 0], &[0, 1]])).unwrap();
        assert_eq!(tree_dist(&o, &v1), Ok(1));
        assert_eq!(tree_dist(&o, &v2), Ok(2));
        assert_eq!(
            tree_dist(&o, &TreeVertex::origin(3)),
            Err(Error::PrimeMismatch(5, 3))
        );
    }

    #[test]
    fn closed_form_matches_smith_form() {
        use crate::arith::elementary_divisors;
        let ball = Ball::around(&TreeVertex::origin(3), 2);
        for u in &ball.vertices {
            for v in &ball.vertices {
                let e = elementary_divisors(&invert(&u.basis).unwrap().mul(&v.basis)).unwrap();
                assert_eq!(tree_dist(u, v).unwrap(), (e[1] - e[0]).unsigned_abs());
            }
        }
    }

    #[test]
    fn balls() {
        for p in [2, 3, 5] {
            for r in 0..4 {
                assert_eq!(
                    Ball::around(&TreeVertex::origin(p), r).len() as u64,
                    ball_size(p, r)
                );
            }
        }
        let o = TreeVertex::origin(2);
        for w in neighbors(&o) {
            assert!(neighbors(&w).contains(&o));
        }
    }

    #[test]
    fn displacement_examples() {
        let f = q(5);
        let o = TreeVertex::origin(5);
        let d = Matrix::diagonal(
            f,
            &[
                FieldElement::from_ratio(f, 1, 5),
                FieldElement::from_i64(f, 5),
            ],
        );
        assert_eq!(vertex_displacement(&d, &o), Ok(2));
        assert_eq!(
            vertex_displacement(&Matrix::from_i64(f, &[&[1, 1], &[0, 1]]), &o),
            Ok(0)
        );
        let (ell, w) = translation_length(&d, 4).unwrap();
        assert_eq!(ell, 2);
        assert_eq!(w.unwrap(), o);
    }

    #[test]
    fn counterexample() {
        let t = BigRational::new(1.into(), 5.into());
        let r = product_tree_counterexample(5, &t, 4, 4).unwrap();
        assert!(r.all_verified());
        let seq: Vec<Valuation> = [-1, 1, 3, 5, 7]
            .iter()
            .map(|&x| Valuation::Finite(x))
            .collect();
        assert_eq!(r.valuations, seq);
        assert_eq!(r.min_over_y, Some(2.0));
        let bad = BigRational::new(5.into(), 1.into());
        assert_eq!(
            product_tree_counterexample(5, &bad, 4, 4).unwrap_err(),
            Error::BadT(Valuation::Finite(1))
        );
    }
}
