//! Corpora and independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crlocal::arith::{rref, Field, FieldElement, Matrix};
use crlocal::reptheory::Representation;

pub const QQ5: Field = Field::Padic { p: 5 };
pub const F3T: Field = Field::Funcfield { p: 3 };

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn el(f: Field, s: &str) -> FieldElement {
    FieldElement::parse(f, s).unwrap()
}

pub fn mat(f: Field, rows: &[&[&str]]) -> Matrix {
    Matrix::from_rows(
        f,
        rows.iter()
            .map(|r| r.iter().map(|s| el(f, s)).collect())
            .collect(),
    )
    .unwrap()
}

pub fn rep(f: Field, gens: Vec<Matrix>) -> Representation {
    let names = ["a", "b", "c"];
    Representation::from_pairs(f, names.iter().copied().zip(gens)).unwrap()
}

pub fn real(rows: &[&[f64]]) -> Matrix {
    let n = rows.len();
    Matrix::from_dmatrix(&DMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
}

// ---------- exact corpus ----------

/// A corpus member together with its ground-truth label.
#[derive(Clone, Debug)]
pub struct Labeled {
    pub rho: Representation,
    pub cr: bool,
    pub kind: &'static str,
}

fn nonzero_scalars(f: Field) -> &'static [&'static str] {
    match f {
        Field::Padic { .. } => &["2", "3", "-1", "5", "1/5", "-2", "3/5", "7"],
        _ => &["1", "2", "T", "T+1", "2*T+1", "T^2+1", "1/T", "2*T"],
    }
}

fn two_distinct(f: Field, r: &mut ChaCha8Rng) -> (FieldElement, FieldElement) {
    let pool = nonzero_scalars(f);
    let mut pick: Vec<&&str> = pool.choose_multiple(r, 3).collect();
    pick.truncate(2);
    (el(f, pick[0]), el(f, pick[1]))
}

fn scalar(f: Field, r: &mut ChaCha8Rng) -> FieldElement {
    el(f, nonzero_scalars(f).choose(r).unwrap())
}

fn any_entry(f: Field, r: &mut ChaCha8Rng) -> FieldElement {
    match f {
        Field::Padic { .. } => el(f, ["1", "-1", "2", "5", "1/5", "3"].choose(r).unwrap()),
        _ => el(f, ["1", "2", "T", "T+2", "1/T"].choose(r).unwrap()),
    }
}

/// Companion matrix of an irreducible quadratic x² − d.
fn irreducible2(f: Field, r: &mut ChaCha8Rng) -> Matrix {
    let d = match f {
        Field::Padic { .. } => ["2", "3", "-1", "6", "7"].choose(r).unwrap().to_string(),
        _ => ["T", "T+1", "2*T", "T^3+2"].choose(r).unwrap().to_string(),
    };
    mat(f, &[&["0", &d], &["1", "0"]])
}

/// Companion matrix of x³ − 2 over ℚ, or of the Artin–Schreier cubic x³ − x − T.
fn irreducible3(f: Field) -> Matrix {
    match f {
        Field::Padic { .. } => mat(f, &[&["0", "0", "2"], &["1", "0", "0"], &["0", "1", "0"]]),
        _ => mat(f, &[&["0", "0", "T"], &["1", "0", "1"], &["0", "1", "0"]]),
    }
}

fn diag(f: Field, d: &[FieldElement]) -> Matrix {
    Matrix::diagonal(f, d)
}

fn with(mut m: Matrix, r: usize, c: usize, x: FieldElement) -> Matrix {
    m[(r, c)] = x;
    m
}

/// Permutation times an elementary matrix; columns stay small so that
/// invariant subspaces remain reachable by small-coordinate spins.
pub fn small_conjugator(f: Field, n: usize, r: &mut ChaCha8Rng) -> Matrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(r);
    let p = Matrix::from_fn(f, n, n, |i, j| {
        if perm[j] == i {
            FieldElement::one(f)
        } else {
            FieldElement::zero(f)
        }
    });
    if n == 1 {
        return p;
    }
    let i = r.gen_range(0..n);
    let j = (i + r.gen_range(1..n)) % n;
    let s = if r.gen_bool(0.5) {
        FieldElement::one(f)
    } else {
        -FieldElement::one(f)
    };
    p.mul(&with(Matrix::identity(f, n), i, j, s))
}

const KINDS: usize = 14;

fn build_kind(f: Field, kind: usize, r: &mut ChaCha8Rng) -> (Vec<Matrix>, bool, &'static str) {
    let one = FieldElement::one(f);
    let zero = FieldElement::zero(f);
    match kind {
        0 => (
            vec![diag(f, &[scalar(f, r)]), diag(f, &[scalar(f, r)])],
            true,
            "scalar-1d",
        ),
        1 => {
            let (a, b) = two_distinct(f, r);
            let (c, d) = (scalar(f, r), scalar(f, r));
            (
                vec![diag(f, &[a, b]), diag(f, &[c, d])],
                true,
                "diagonal-2d",
            )
        }
        2 => {
            let a = scalar(f, r);
            (
                vec![with(diag(f, &[a.clone(), a]), 0, 1, one)],
                false,
                "jordan-2d",
            )
        }
        3 => {
            let (a, b) = two_distinct(f, r);
            let u = with(Matrix::identity(f, 2), 0, 1, any_entry(f, r));
            (vec![diag(f, &[a, b]), u], false, "torus-unipotent-2d")
        }
        4 => {
            let c = scalar(f, r);
            (
                vec![irreducible2(f, r), diag(f, &[c.clone(), c])],
                true,
                "irreducible-2d",
            )
        }
        5 => {
            let a = irreducible2(f, r);
            let c = diag(f, &[scalar(f, r)]);
            (
                vec![Matrix::block_diagonal(f, &[a, c])],
                true,
                "irr2-plus-1",
            )
        }
        6 => {
            let a = irreducible2(f, r);
            let c = diag(f, &[scalar(f, r)]);
            let mut u = Matrix::identity(f, 3);
            u[(0, 2)] = any_entry(f, r);
            if r.gen_bool(0.5) {
                u[(1, 2)] = any_entry(f, r);
            }
            (
                vec![Matrix::block_diagonal(f, &[a, c]), u],
                false,
                "irr2-extension-by-1",
            )
        }
        7 => {
            let (a, b) = two_distinct(f, r);
            let c = scalar(f, r);
            (
                vec![
                    diag(f, &[a, b, c]),
                    diag(f, &[scalar(f, r), scalar(f, r), scalar(f, r)]),
                ],
                true,
                "diagonal-3d",
            )
        }
        8 => {
            let pool = nonzero_scalars(f);
            let pick: Vec<FieldElement> = pool.choose_multiple(r, 3).map(|s| el(f, s)).collect();
            let u = with(Matrix::identity(f, 3), 0, 2, any_entry(f, r));
            (vec![diag(f, &pick), u], false, "torus-unipotent-3d")
        }
        9 => (vec![irreducible3(f)], true, "irreducible-3d"),
        10 => {
            let a = scalar(f, r);
            let mut j = diag(f, &[a.clone(), a.clone(), a]);
            j[(0, 1)] = one.clone();
            j[(1, 2)] = one;
            (vec![j], false, "jordan-3d")
        }
        11 => {
            let (a, b) = (scalar(f, r), scalar(f, r));
            (
                vec![diag(f, &[a.clone(), a]), diag(f, &[b.clone(), b])],
                true,
                "scalar-2d",
            )
        }
        12 => {
            let c = diag(f, &[scalar(f, r)]);
            let a = irreducible2(f, r);
            let mut u = Matrix::identity(f, 3);
            u[(0, 1)] = any_entry(f, r);
            u[(0, 2)] = if r.gen_bool(0.5) {
                any_entry(f, r)
            } else {
                zero
            };
            (
                vec![Matrix::block_diagonal(f, &[c, a]), u],
                false,
                "1-extension-by-irr2",
            )
        }
        _ => {
            let a = irreducible2(f, r);
            let b = mat(f, &[&["1", "1"], &["1", "2"]]);
            let c = diag(f, &[scalar(f, r)]);
            let d = diag(f, &[scalar(f, r)]);
            (
                vec![
                    Matrix::block_diagonal(f, &[a, c]),
                    Matrix::block_diagonal(f, &[b, d]),
                ],
                true,
                "irr2-plus-1-two-gens",
            )
        }
    }
}

/// 30 labeled instances per field over ℚ (p = 5) and 𝔽₃(T), n ≤ 3, at most 2 generators.
pub fn exact_corpus() -> Vec<Labeled> {
    let mut out = Vec::new();
    for (fi, f) in [QQ5, F3T].into_iter().enumerate() {
        for k in 0..30 {
            let mut r = rng(1000 * fi as u64 + k as u64);
            let (gens, cr, kind) = build_kind(f, k % KINDS, &mut r);
            let n = gens[0].rows();
            let h = small_conjugator(f, n, &mut r);
            let rho = rep(f, gens).conjugate(&h).unwrap();
            out.push(Labeled { rho, cr, kind });
        }
    }
    out
}

// ---------- oracles ----------

fn rank(f: Field, vecs: &[Vec<FieldElement>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    rref(&Matrix::from_columns(f, vecs)).rank
}

/// Smallest invariant subspace containing v, as a list of spanning vectors.
pub fn spin_oracle(rho: &Representation, v: Vec<FieldElement>) -> Vec<Vec<FieldElement>> {
    let f = rho.field();
    let mut basis = vec![v];
    let mut i = 0;
    while i < basis.len() {
        for g in rho.matrices() {
            let w = g.mul_vec(&basis[i]);
            let mut trial = basis.clone();
            trial.push(w.clone());
            if rank(f, &trial) > basis.len() {
                basis.push(w);
            }
        }
        i += 1;
    }
    basis
}

fn small_vectors(f: Field, n: usize) -> Vec<Vec<FieldElement>> {
    let coords: Vec<i64> = (-2..=2).collect();
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| coords.iter().map(move |&c| [v.clone(), vec![c]].concat()))
            .collect();
    }
    out.into_iter()
        .map(|v| {
            v.into_iter()
                .map(|c| FieldElement::from_i64(f, c))
                .collect::<Vec<_>>()
        })
        .filter(|v: &Vec<FieldElement>| v.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Complete reducibility by exhaustive search: every invariant subspace
/// spun from a vector with coordinates in {−2,…,2} must have a spun
/// invariant complement.
pub fn splitting_oracle(rho: &Representation) -> bool {
    let f = rho.field();
    let n = rho.dim();
    let mut subspaces: Vec<Vec<Vec<FieldElement>>> = Vec::new();
    for v in small_vectors(f, n) {
        let w = spin_oracle(rho, v);
        if w.len() == n {
            continue;
        }
        let mut known = false;
        for s in &subspaces {
            if s.len() == w.len() && rank(f, &[s.clone(), w.clone()].concat()) == w.len() {
                known = true;
                break;
            }
        }
        if !known {
            subspaces.push(w);
        }
    }
    subspaces.iter().all(|w| {
        subspaces
            .iter()
            .any(|c| c.len() + w.len() == n && rank(f, &[w.clone(), c.clone()].concat()) == n)
    })
}

/// Basis of the algebra spanned by all words in the generators.
pub fn word_span(rho: &Representation) -> Vec<Matrix> {
    let f = rho.field();
    let n = rho.dim();
    let flat = |m: &Matrix| m.entries().to_vec();
    let mut basis = vec![Matrix::identity(f, n)];
    let mut i = 0;
    while i < basis.len() {
        for g in rho.matrices() {
            let w = basis[i].mul(g);
            let mut vecs: Vec<Vec<FieldElement>> = basis.iter().map(flat).collect();
            vecs.push(flat(&w));
            if rank(f, &vecs) > basis.len() {
                basis.push(w);
            }
        }
        i += 1;
    }
    basis
}

/// Characteristic 0: the module is semisimple iff the trace form on the
/// word-span algebra is nondegenerate (its radical is the Jacobson radical).
pub fn trace_form_oracle(rho: &Representation) -> bool {
    let f = rho.field();
    assert_eq!(f.characteristic(), 0);
    let basis = word_span(rho);
    let k = basis.len();
    let gram = Matrix::from_fn(f, k, k, |i, j| basis[i].mul(&basis[j]).trace());
    rref(&gram).rank == k
}

// ---------- real corpus ----------

pub fn rotation(t: f64) -> [[f64; 2]; 2] {
    [[t.cos(), -t.sin()], [t.sin(), t.cos()]]
}

fn rows2(m: [[f64; 2]; 2]) -> Matrix {
    real(&[&m[0], &m[1]])
}

fn random_real(n: usize, r: &mut ChaCha8Rng) -> Matrix {
    let m = DMatrix::from_fn(n, n, |i, j| {
        r.gen_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 }
    });
    Matrix::from_dmatrix(&m)
}

fn rreal(gens: Vec<Matrix>) -> Representation {
    rep(Field::Real, gens)
}

/// 10 cr and 10 non-cr real representations with n ≤ 3, labeled by construction.
pub fn real_corpus() -> Vec<Labeled> {
    let mut r = rng(42);
    let e = std::f64::consts::E;
    let mut out = Vec::new();
    let mut push =
        |rho: Representation, cr: bool, kind: &'static str| out.push(Labeled { rho, cr, kind });

    push(rreal(vec![real(&[&[2.0, 0.0], &[0.0, 0.5]])]), true, "diag");
    push(
        rreal(vec![
            rows2(rotation(1.0)),
            real(&[&[e, 0.0], &[0.0, 1.0 / e]]),
        ]),
        true,
        "rotation-diag",
    );
    let h = random_real(2, &mut r);
    push(
        rreal(vec![
            real(&[&[3.0, 0.0], &[0.0, 1.0 / 3.0]]),
            real(&[&[0.5, 0.0], &[0.0, 2.0]]),
        ])
        .conjugate(&h)
        .unwrap(),
        true,
        "torus-conj",
    );
    push(
        rreal(vec![
            real(&[&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.5]]),
            real(&[&[1.0, 0.0, 0.0], &[0.0, 3.0, 0.0], &[0.0, 0.0, 1.0 / 3.0]]),
        ]),
        true,
        "diag-3d",
    );
    push(
        rreal(vec![random_real(3, &mut r), random_real(3, &mut r)]),
        true,
        "generic-3d",
    );
    push(
        rreal(vec![random_real(2, &mut r), random_real(2, &mut r)]),
        true,
        "generic-2d",
    );
    let rot = rows2(rotation(0.7));
    let block = Matrix::block_diagonal(Field::Real, &[rot, real(&[&[1.0]])]);
    push(
        rreal(vec![
            block,
            real(&[&[2.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 0.25]]),
        ]),
        true,
        "rotation-plus-1",
    );
    let h = random_real(3, &mut r);
    let block = Matrix::block_diagonal(Field::Real, &[rows2(rotation(1.3)), real(&[&[1.5]])]);
    push(
        rreal(vec![
            block,
            real(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]),
        ])
        .conjugate(&h)
        .unwrap(),
        true,
        "rotation-plus-1-conj",
    );
    push(
        rreal(vec![
            real(&[&[1.0, 1.0], &[0.0, 1.0]]),
            real(&[&[1.0, 0.0], &[1.0, 1.0]]),
        ]),
        true,
        "sl2-generators",
    );
    let h = random_real(2, &mut r);
    push(
        rreal(vec![
            rows2(rotation(2.0)),
            real(&[&[1.5, 0.0], &[0.0, 1.0]]),
        ])
        .conjugate(&h)
        .unwrap(),
        true,
        "rotation-diag-conj",
    );

    push(
        rreal(vec![real(&[&[1.0, 1.0], &[0.0, 1.0]])]),
        false,
        "unipotent",
    );
    push(
        rreal(vec![
            real(&[&[2.0, 0.0], &[0.0, 0.5]]),
            real(&[&[1.0, 1.0], &[0.0, 1.0]]),
        ]),
        false,
        "torus-unipotent",
    );
    push(
        rreal(vec![
            real(&[&[2.0, 1.0], &[0.0, 0.5]]),
            real(&[&[3.0, 0.0], &[0.0, 1.0 / 3.0]]),
        ]),
        false,
        "borel-pair",
    );
    push(
        rreal(vec![real(&[
            &[1.0, 1.0, 0.0],
            &[0.0, 1.0, 1.0],
            &[0.0, 0.0, 1.0],
        ])]),
        false,
        "jordan-3d",
    );
    let block = Matrix::block_diagonal(Field::Real, &[rows2(rotation(0.9)), real(&[&[1.0]])]);
    push(
        rreal(vec![
            block,
            real(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 0.5], &[0.0, 0.0, 1.0]]),
        ]),
        false,
        "rotation-extension",
    );
    push(
        rreal(vec![
            real(&[&[2.0, 1.0, -1.0], &[0.0, 1.0, 2.0], &[0.0, 0.0, 0.5]]),
            real(&[&[1.0, 0.5, 1.0], &[0.0, 3.0, 1.0], &[0.0, 0.0, 1.0 / 3.0]]),
        ]),
        false,
        "borel-3d",
    );
    let h = random_real(2, &mut r);
    push(
        rreal(vec![
            real(&[&[2.0, 1.0], &[0.0, 0.5]]),
            real(&[&[3.0, 0.0], &[0.0, 1.0 / 3.0]]),
        ])
        .conjugate(&h)
        .unwrap(),
        false,
        "borel-pair-conj",
    );
    let block = Matrix::block_diagonal(Field::Real, &[real(&[&[2.0]]), rows2(rotation(0.4))]);
    push(
        rreal(vec![
            block,
            real(&[&[1.0, 1.0, 1.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]),
        ]),
        false,
        "extension-by-rotation",
    );
    push(
        rreal(vec![
            real(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]),
            real(&[&[2.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 0.25]]),
        ]),
        false,
        "jordan-plus-1",
    );
    let h = random_real(3, &mut r);
    push(
        rreal(vec![
            real(&[&[2.0, 1.0, -1.0], &[0.0, 1.0, 2.0], &[0.0, 0.0, 0.5]]),
            real(&[&[1.0, 0.5, 1.0], &[0.0, 3.0, 1.0], &[0.0, 0.0, 1.0 / 3.0]]),
        ])
        .conjugate(&h)
        .unwrap(),
        false,
        "borel-3d-conj",
    );
    out
}

// ---------- degeneration pairs ----------

/// A lower/upper pair sharing the Levi part of `sizes`.
pub struct DegenerationPair {
    pub sizes: Vec<usize>,
    pub minus: Representation,
    pub plus: Representation,
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

pub fn degeneration_pairs() -> Vec<DegenerationPair> {
    let layouts: [&[usize]; 5] = [&[1, 1], &[1, 2], &[2, 1], &[1, 1, 1], &[1, 1]];
    let mut out = Vec::new();
    for k in 0..20 {
        let f = if k % 4 == 3 { F3T } else { QQ5 };
        let mut r = rng(500 + k as u64);
        let sizes = layouts[k % layouts.len()].to_vec();
        let off = offsets(&sizes);
        let n = *off.last().unwrap();
        let block_of = |i: usize| off.iter().rposition(|&o| o <= i).unwrap();
        let ngens = 1 + k % 2;
        let mut minus = Vec::new();
        let mut plus = Vec::new();
        for _ in 0..ngens {
            let blocks: Vec<Matrix> = sizes
                .iter()
                .map(|&s| {
                    if s == 1 {
                        diag(f, &[scalar(f, &mut r)])
                    } else {
                        irreducible2(f, &mut r)
                    }
                })
                .collect();
            let levi = Matrix::block_diagonal(f, &blocks);
            let mut lo = levi.clone();
            let mut hi = levi;
            for i in 0..n {
                for j in 0..n {
                    if block_of(i) > block_of(j) {
                        lo[(i, j)] = any_entry(f, &mut r);
                    } else if block_of(i) < block_of(j) {
                        hi[(i, j)] = any_entry(f, &mut r);
                    }
                }
            }
            minus.push(lo);
            plus.push(hi);
        }
        out.push(DegenerationPair {
            sizes,
            minus: rep(f, minus),
            plus: rep(f, plus),
        });
    }
    out
}

// ---------- separation families ----------

/// Six members over ℚ (p = 5) with construction labels (equal label means
/// same point of the quotient).
pub fn exact_family() -> (Vec<Representation>, Vec<usize>) {
    let f = QQ5;
    let t = mat(f, &[&["2", "0"], &["0", "3"]]);
    let id = Matrix::identity(f, 2);
    let fam = vec![
        rep(f, vec![t.clone(), mat(f, &[&["1", "1"], &["0", "1"]])]),
        rep(f, vec![t.clone(), id.clone()]),
        rep(f, vec![t.clone(), id.clone()])
            .conjugate(&mat(f, &[&["1", "2"], &["1", "3"]]))
            .unwrap(),
        rep(
            f,
            vec![
                mat(f, &[&["2", "0"], &["5", "3"]]),
                mat(f, &[&["1", "0"], &["7", "1"]]),
            ],
        ),
        rep(f, vec![mat(f, &[&["2", "0"], &["0", "5"]]), id.clone()]),
        rep(f, vec![mat(f, &[&["0", "2"], &["1", "0"]]), id]),
    ];
    (fam, vec![0, 0, 0, 0, 1, 2])
}

/// Real counterpart of [`exact_family`].
pub fn real_family() -> (Vec<Representation>, Vec<usize>) {
    let t = real(&[&[2.0, 0.0], &[0.0, 0.5]]);
    let id = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let fam = vec![
        rreal(vec![t.clone(), real(&[&[1.0, 1.0], &[0.0, 1.0]])]),
        rreal(vec![t.clone(), id.clone()]),
        rreal(vec![t.clone(), id.clone()])
            .conjugate(&real(&[&[1.0, 2.0], &[1.0, 3.0]]))
            .unwrap(),
        rreal(vec![
            real(&[&[2.0, 0.0], &[3.0, 0.5]]),
            real(&[&[1.0, 0.0], &[-2.0, 1.0]]),
        ]),
        rreal(vec![real(&[&[3.0, 0.0], &[0.0, 1.0 / 3.0]]), id.clone()]),
        rreal(vec![rows2(rotation(1.0)), id]),
    ];
    (fam, vec![0, 0, 0, 0, 1, 2])
}

/// Random invertible conjugator: small integers over exact fields, a
/// well-conditioned perturbation of the identity over ℝ.
pub fn random_conjugator(f: Field, n: usize, r: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = match f {
            Field::Real => Matrix::from_dmatrix(&DMatrix::from_fn(n, n, |i, j| {
                r.gen_range(-0.5..0.5) + if i == j { 1.0 } else { 0.0 }
            })),
            _ => Matrix::from_fn(f, n, n, |_, _| {
                FieldElement::from_i64(f, r.gen_range(-3..=3))
            }),
        };
        if crlocal::arith::invert(&m).is_ok() {
            return m;
        }
    }
}
