use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use crlocal::arith::{Field, FieldElement, Matrix};
use crlocal::tree::{
    product_tree_counterexample, tree_dist, vertex_displacement, Ball, TreeVertex,
};

fn ball(p: u64, r: usize) -> Ball {
    Ball::around(&TreeVertex::origin(p), r)
}

fn path_to_root(b: &Ball, mut i: usize) -> Vec<usize> {
    let mut out = vec![i];
    while let Some(q) = b.parent[i] {
        out.push(q);
        i = q;
    }
    out
}

/// Vertex path between two ball members through their common ancestor.
fn geodesic(b: &Ball, i: usize, j: usize) -> Vec<usize> {
    let pi = path_to_root(b, i);
    let pj = path_to_root(b, j);
    let lca = *pi.iter().find(|x| pj.contains(x)).unwrap();
    let mut path: Vec<usize> = pi.iter().copied().take_while(|&x| x != lca).collect();
    path.push(lca);
    let back: Vec<usize> = pj.iter().copied().take_while(|&x| x != lca).collect();
    path.extend(back.into_iter().rev());
    path
}

fn gl2(p: u64, e: [(i64, u32); 4]) -> Option<Matrix> {
    let f = Field::Padic { p };
    let x = |(a, k): (i64, u32)| FieldElement::from_ratio(f, a, (p as i64).pow(k));
    let m = Matrix::from_rows(f, vec![vec![x(e[0]), x(e[1])], vec![x(e[2]), x(e[3])]]).ok()?;
    crlocal::arith::invert(&m).ok().map(|_| m)
}

fn gl2_strategy() -> impl Strategy<Value = [(i64, u32); 4]> {
    prop::array::uniform4((-9i64..10, 0u32..3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn action_is_isometric(p in prop::sample::select(vec![2u64, 3, 5]), e in gl2_strategy(), i in 0usize..40, j in 0usize..40) {
        let Some(g) = gl2(p, e) else { return Ok(()); };
        let b = ball(p, 3);
        let (u, v) = (&b.vertices[i % b.vertices.len()], &b.vertices[j % b.vertices.len()]);
        prop_assert_eq!(tree_dist(&u.act(&g).unwrap(), &v.act(&g).unwrap()).unwrap(), tree_dist(u, v).unwrap());
    }

    #[test]
    fn metric_axioms(p in prop::sample::select(vec![2u64, 3]), i in 0usize..200, j in 0usize..200, k in 0usize..200) {
        let b = ball(p, 4);
        let m = b.vertices.len();
        let (x, y, z) = (&b.vertices[i % m], &b.vertices[j % m], &b.vertices[k % m]);
        let d = |a, c| tree_dist(a, c).unwrap();
        prop_assert_eq!(d(x, y), d(y, x));
        prop_assert!(d(x, z) <= d(x, y) + d(y, z));
        prop_assert_eq!(d(x, y) == 0, i % m == j % m);
    }

    #[test]
    fn displacement_is_convex_along_geodesics(p in prop::sample::select(vec![2u64, 3]), e in gl2_strategy(), i in 0usize..150, j in 0usize..150) {
        let Some(g) = gl2(p, e) else { return Ok(()); };
        let b = ball(p, 4);
        let m = b.vertices.len();
        let path = geodesic(&b, i % m, j % m);
        let mid = &b.vertices[path[path.len() / 2]];
        let du = vertex_displacement(&g, &b.vertices[i % m]).unwrap();
        let dw = vertex_displacement(&g, &b.vertices[j % m]).unwrap();
        prop_assert!(vertex_displacement(&g, mid).unwrap() <= du.max(dw));
    }
}

#[test]
fn counterexample_holds_for_several_parameters() {
    for (p, num, den) in [
        (2u64, 1i64, 2i64),
        (3, 1, 3),
        (5, 1, 25),
        (7, 2, 7),
        (3, 4, 27),
    ] {
        let t = BigRational::new(BigInt::from(num), BigInt::from(den));
        let r = product_tree_counterexample(p, &t, 12, 4).unwrap();
        assert!(r.all_verified(), "p = {p}, t = {num}/{den}");
        assert!(!r.cr_packaged && !r.cr_second_factor);
    }
    let t = BigRational::new(BigInt::from(5), BigInt::from(1));
    assert!(product_tree_counterexample(5, &t, 4, 2).is_err());
}
