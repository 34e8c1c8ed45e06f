//! Standard parabolics as block structures, the big-cell decomposition,
//! contraction by fundamental sequences and explicit degenerations.

use serde::Serialize;

use crate::arith::{invert, Field, FieldElement, Matrix, Valuation, REAL_TOL};
use crate::error::{Error, Result, Side};
use crate::reptheory::Representation;

/// Valuation a sequence must reach before it counts as numerically at its limit.
pub const VALUATION_THRESHOLD: i64 = 20;
/// Real counterpart of [`VALUATION_THRESHOLD`].
pub const MAGNITUDE_THRESHOLD: f64 = 1e-8;

/// An ordered composition (n_1, …, n_k) of n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockStructure {
    n: usize,
    sizes: Vec<usize>,
}

impl BlockStructure {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "block sizes must be positive, got {sizes:?}"
            )));
        }
        Ok(BlockStructure {
            n: sizes.iter().sum(),
            sizes,
        })
    }

    /// The structure with one block per coordinate.
    pub fn borel(n: usize) -> Self {
        BlockStructure {
            n,
            sizes: vec![1; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.sizes.len() + 1);
        out.push(0);
        for s in &self.sizes {
            out.push(out.last().unwrap() + s);
        }
        out
    }

    /// Block index of each coordinate.
    pub fn block_index(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
            .collect()
    }

    fn check(&self, g: &Matrix) -> Result<()> {
        if !g.is_square() || g.rows() != self.n {
            return Err(Error::DimensionMismatch(self.n, g.rows()));
        }
        Ok(())
    }

    /// Whether `g` vanishes below (upper) or above (lower) the diagonal blocks.
    pub fn is_block_triangular(&self, g: &Matrix, side: Side) -> bool {
        if self.check(g).is_err() {
            return false;
        }
        let tol = REAL_TOL * g.max_abs();
        let idx = self.block_index();
        (0..self.n).all(|r| {
            (0..self.n).all(|c| {
                let outside = match side {
                    Side::Upper => idx[r] > idx[c],
                    Side::Lower => idx[r] < idx[c],
                };
                !outside || g[(r, c)].is_negligible(tol)
            })
        })
    }

    /// Block-triangular with identity diagonal blocks.
    pub fn is_block_unitriangular(&self, g: &Matrix, side: Side) -> bool {
        if !self.is_block_triangular(g, side) {
            return false;
        }
        let field = g.field();
        let tol = REAL_TOL * g.max_abs().max(1.0);
        let idx = self.block_index();
        (0..self.n).all(|r| {
            (0..self.n).all(|c| {
                if idx[r] != idx[c] {
                    return true;
                }
                let target = FieldElement::from_i64(field, (r == c) as i64);
                (&g[(r, c)] - &target).is_negligible(tol)
            })
        })
    }

    pub fn diagonal_part(&self, g: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(g.field(), g.rows(), g.cols());
        let off = self.offsets();
        for w in off.windows(2) {
            out.set_block(w[0], w[0], &g.submatrix(w[0], w[1], w[0], w[1]));
        }
        out
    }
}

/// g = u·r·nmat with u lower block-unitriangular, r block-diagonal and nmat
/// upper block-unitriangular.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviDecomposition {
    pub u: Matrix,
    pub r: Matrix,
    pub nmat: Matrix,
}

/// Block LDU factorization through successive Schur complements.
pub fn levi_decompose(g: &Matrix, blocks: &BlockStructure) -> Result<LeviDecomposition> {
    blocks.check(g)?;
    let field = g.field();
    let n = blocks.n();
    let off = blocks.offsets();
    let k = blocks.len();
    let mut s = g.clone();
    let mut u = Matrix::identity(field, n);
    let mut r = Matrix::zeros(field, n, n);
    let mut nmat = Matrix::identity(field, n);
    for j in 0..k {
        let (a, b) = (off[j], off[j + 1]);
        let d = s.submatrix(a, b, a, b);
        let dinv = invert(&d).map_err(|_| Error::NotInBigCell(j + 1))?;
        r.set_block(a, a, &d);
        if b == n {
            break;
        }
        let below = s.submatrix(b, n, a, b);
        let right = s.submatrix(a, b, b, n);
        let l = below.mul(&dinv);
        let rr = dinv.mul(&right);
        u.set_block(b, a, &l);
        nmat.set_block(a, b, &rr);
        let schur = s.submatrix(b, n, b, n).sub(&l.mul(&right));
        s.set_block(b, b, &schur);
    }
    Ok(LeviDecomposition { u, r, nmat })
}

/// Block-diagonal part of a block-triangular matrix.
pub fn levi_project(g: &Matrix, blocks: &BlockStructure, side: Side) -> Result<Matrix> {
    blocks.check(g)?;
    if !blocks.is_block_triangular(g, side) {
        return Err(Error::NotParabolic(side));
    }
    Ok(blocks.diagonal_part(g))
}

/// a = diag(c_1 I, …, c_k I) with |c_1| > … > |c_k|.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalSequence {
    blocks: BlockStructure,
    scalars: Vec<FieldElement>,
    /// Set when the supplied base had the opposite ordering and was inverted.
    pub inverted: bool,
}

fn strictly_decreasing_abs(c: &[FieldElement]) -> bool {
    c.windows(2)
        .all(|w| match (w[0].valuation(), w[1].valuation()) {
            (Ok(a), Ok(b)) => a < b,
            _ => w[0].abs() > w[1].abs() * (1.0 + 1e-12),
        })
}

impl FundamentalSequence {
    /// Validates `base`; a base ordered by increasing absolute value is inverted.
    pub fn new(blocks: BlockStructure, base: &Matrix) -> Result<Self> {
        blocks.check(base)?;
        let idx = blocks.block_index();
        let off = blocks.offsets();
        let mut scalars = Vec::with_capacity(blocks.len());
        for w in off.windows(2) {
            scalars.push(base[(w[0], w[0])].clone());
        }
        for r in 0..blocks.n() {
            for c in 0..blocks.n() {
                let ok = if r == c {
                    base[(r, c)] == scalars[idx[r]]
                } else {
                    base[(r, c)].is_zero()
                };
                if !ok {
                    return Err(Error::InvalidInput(
                        "base must be diagonal and constant within blocks".into(),
                    ));
                }
            }
        }
        if scalars.iter().any(FieldElement::is_zero) {
            return Err(Error::Singular);
        }
        if strictly_decreasing_abs(&scalars) {
            return Ok(FundamentalSequence {
                blocks,
                scalars,
                inverted: false,
            });
        }
        let inv: Vec<FieldElement> = scalars.iter().map(|c| c.inv().expect("nonzero")).collect();
        if strictly_decreasing_abs(&inv) {
            return Ok(FundamentalSequence {
                blocks,
                scalars: inv,
                inverted: true,
            });
        }
        Err(Error::InvalidInput(
            "base scalars must have strictly monotone absolute values across blocks".into(),
        ))
    }

    /// c_j = ϖ^(j−1) with ϖ = p, T, or 1/2 for the reals.
    pub fn default_for(field: Field, blocks: BlockStructure) -> Self {
        let w = field.uniformizer();
        let scalars = (0..blocks.len()).map(|j| w.pow(j as i64)).collect();
        FundamentalSequence {
            blocks,
            scalars,
            inverted: false,
        }
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn scalars(&self) -> &[FieldElement] {
        &self.scalars
    }

    pub fn field(&self) -> Field {
        self.scalars[0].field()
    }

    /// a^i as a matrix (i may be negative).
    pub fn power(&self, i: i64) -> Matrix {
        let diag: Vec<FieldElement> = self
            .blocks
            .block_index()
            .iter()
            .map(|&b| self.scalars[b].pow(i))
            .collect();
        Matrix::diagonal(self.field(), &diag)
    }

    /// a^{-i}·g·a^{i}, computed entrywise.
    pub fn conjugate(&self, g: &Matrix, i: i64) -> Matrix {
        let idx = self.blocks.block_index();
        let k = self.blocks.len();
        let mut factors = vec![vec![FieldElement::one(self.field()); k]; k];
        for (br, row) in factors.iter_mut().enumerate() {
            for (bc, f) in row.iter_mut().enumerate() {
                if br != bc {
                    *f = (&self.scalars[bc] / &self.scalars[br]).pow(i);
                }
            }
        }
        Matrix::from_fn(g.field(), g.rows(), g.cols(), |r, c| {
            &g[(r, c)] * &factors[idx[r]][idx[c]]
        })
    }

    /// Smallest per-step gain between adjacent blocks: a valuation increment
    /// for exact fields, or the largest ratio |c_{j+1}/c_j| for the reals.
    fn step(&self) -> Step {
        if self.field().is_real() {
            let q = self
                .scalars
                .windows(2)
                .map(|w| w[1].abs() / w[0].abs())
                .fold(0.0, f64::max);
            Step::Ratio(q)
        } else {
            let d = self
                .scalars
                .windows(2)
                .map(|w| {
                    w[1].valuation().unwrap().finite().unwrap()
                        - w[0].valuation().unwrap().finite().unwrap()
                })
                .min()
                .unwrap_or(i64::MAX);
            Step::Increment(d)
        }
    }

    /// Gain between blocks br < bc.
    fn pair_step(&self, br: usize, bc: usize) -> Step {
        if self.field().is_real() {
            Step::Ratio(self.scalars[bc].abs() / self.scalars[br].abs())
        } else {
            let v = |j: usize| self.scalars[j].valuation().unwrap().finite().unwrap();
            Step::Increment(v(bc) - v(br))
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Increment(i64),
    Ratio(f64),
}

/// Valuation (exact fields) or absolute value (reals) of an entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Size {
    Valuation(Valuation),
    Magnitude(f64),
}

impl Size {
    pub fn of(x: &FieldElement) -> Size {
        match x.valuation() {
            Ok(v) => Size::Valuation(v),
            Err(_) => Size::Magnitude(x.abs()),
        }
    }

    fn small_enough(self) -> bool {
        match self {
            Size::Valuation(v) => v >= Valuation::Finite(VALUATION_THRESHOLD),
            Size::Magnitude(m) => m <= MAGNITUDE_THRESHOLD,
        }
    }
}

/// Sizes of one matrix entry along i = 1..imax (or 0..imax).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryProfile {
    pub row: usize,
    pub col: usize,
    pub sizes: Vec<Size>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    /// Every tracked entry follows its predicted exact-linear (or geometric) law.
    pub converges: bool,
    /// All tracked entries are below the numerical threshold at i = imax.
    pub threshold_reached: bool,
    /// Smallest per-step valuation increment among nonzero entries.
    pub increment: Option<i64>,
    /// Largest per-step contraction ratio among nonzero real entries.
    pub ratio: Option<f64>,
    pub entries: Vec<EntryProfile>,
    #[serde(skip)]
    pub limit: Matrix,
    #[serde(skip)]
    pub last: Matrix,
}

/// Tracks a^{-i}·g·a^{i} for i = 1..imax on the strictly upper blocks.
pub fn contract_limit(
    g: &Matrix,
    seq: &FundamentalSequence,
    imax: usize,
) -> Result<ContractionReport> {
    let blocks = seq.blocks();
    let limit = levi_project(g, blocks, Side::Upper)?;
    let idx = blocks.block_index();
    let n = blocks.n();
    let imax = imax.max(1);
    let iterates: Vec<Matrix> = (1..=imax as i64).map(|i| seq.conjugate(g, i)).collect();
    let mut entries = Vec::new();
    let mut converges = true;
    let mut increment: Option<i64> = None;
    let mut ratio: Option<f64> = None;
    let scale = g.max_abs().max(1.0);
    for r in 0..n {
        for c in 0..n {
            if idx[r] >= idx[c] {
                continue;
            }
            let sizes: Vec<Size> = iterates.iter().map(|m| Size::of(&m[(r, c)])).collect();
            let g0 = &g[(r, c)];
            if !g0.is_negligible(REAL_TOL * scale) {
                match seq.pair_step(idx[r], idx[c]) {
                    Step::Increment(d) => {
                        let v0 = g0.valuation()?.finite().expect("nonzero entry");
                        let exact = sizes.iter().enumerate().all(|(k, s)| {
                            *s == Size::Valuation(Valuation::Finite(v0 + (k as i64 + 1) * d))
                        });
                        converges &= exact && d > 0;
                        increment = Some(increment.map_or(d, |x| x.min(d)));
                    }
                    Step::Ratio(q) => {
                        let m0 = g0.abs();
                        let geometric = sizes.iter().enumerate().all(|(k, s)| match s {
                            Size::Magnitude(m) => {
                                let want = m0 * q.powi(k as i32 + 1);
                                (m - want).abs() <= 1e-9 * want.max(f64::MIN_POSITIVE)
                            }
                            _ => false,
                        });
                        converges &= geometric && q < 1.0;
                        ratio = Some(ratio.map_or(q, |x: f64| x.max(q)));
                    }
                }
            }
            entries.push(EntryProfile {
                row: r,
                col: c,
                sizes,
            });
        }
    }
    let threshold_reached = entries
        .iter()
        .all(|e| e.sizes.last().is_none_or(|s| s.small_enough()));
    let last = iterates.last().expect("imax >= 1").clone();
    Ok(ContractionReport {
        converges,
        threshold_reached,
        increment,
        ratio,
        entries,
        limit,
        last,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnipotentReport {
    /// a^{-i}·n_i·a^{i} reached the threshold at the last index and the input looked bounded.
    pub converges: bool,
    pub bounded: bool,
    pub threshold_reached: bool,
    /// Smallest off-diagonal size of a^{-i}·n_i·a^{i} per index.
    pub profile: Vec<Size>,
}

fn worst(m: &Matrix, blocks: &BlockStructure, identity_diag: bool) -> Size {
    let idx = blocks.block_index();
    let field = m.field();
    let mut out: Option<Size> = None;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if idx[r] == idx[c] && (identity_diag || r == c) {
                continue;
            }
            let s = Size::of(&m[(r, c)]);
            out = Some(match (out, s) {
                (None, s) => s,
                (Some(Size::Valuation(a)), Size::Valuation(b)) => Size::Valuation(a.min(b)),
                (Some(Size::Magnitude(a)), Size::Magnitude(b)) => Size::Magnitude(a.max(b)),
                (Some(a), _) => a,
            });
        }
    }
    out.unwrap_or(if field.is_real() {
        Size::Magnitude(0.0)
    } else {
        Size::Valuation(Valuation::Infinite)
    })
}

fn larger(a: Size, b: Size) -> bool {
    match (a, b) {
        (Size::Valuation(x), Size::Valuation(y)) => x < y,
        (Size::Magnitude(x), Size::Magnitude(y)) => x > y * (1.0 + 1e-9),
        _ => false,
    }
}

/// Checks a^{-i}·n_i·a^{i} → 1 for nseq[i-1], i = 1..len.
///
/// Boundedness of the input is judged by comparing the largest entry over
/// the second half of the list with the largest over the first half.
pub fn contract_unipotent(nseq: &[Matrix], seq: &FundamentalSequence) -> Result<UnipotentReport> {
    let blocks = seq.blocks();
    for m in nseq {
        blocks.check(m)?;
        if !blocks.is_block_unitriangular(m, Side::Upper) {
            return Err(Error::NotUnipotent);
        }
    }
    if nseq.is_empty() {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    let input: Vec<Size> = nseq.iter().map(|m| worst(m, blocks, true)).collect();
    let half = input.len().div_ceil(2);
    let fold = |s: &[Size]| {
        s.iter()
            .copied()
            .reduce(|a, b| if larger(b, a) { b } else { a })
            .unwrap()
    };
    let bounded = input.len() < 2
        || !larger(
            fold(&input[half.min(input.len() - 1)..]),
            fold(&input[..half]),
        );
    let profile: Vec<Size> = nseq
        .iter()
        .enumerate()
        .map(|(k, m)| worst(&seq.conjugate(m, k as i64 + 1), blocks, true))
        .collect();
    let threshold_reached = profile.last().unwrap().small_enough();
    Ok(UnipotentReport {
        converges: bounded && threshold_reached,
        bounded,
        threshold_reached,
        profile,
    })
}

/// Sizes of ρ_i(s) − ρ⁻(s) and a^{i}ρ_i(s)a^{-i} − ρ⁺(s) at one index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorStep {
    pub generator: String,
    pub lower: Vec<Vec<Size>>,
    pub upper: Vec<Vec<Size>>,
    pub in_big_cell: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerationStep {
    pub i: usize,
    pub generators: Vec<GeneratorStep>,
}

/// Linear lower bound B0 + i·δ on valuations (or C·q^i upper bound on
/// magnitudes) checked against the observed trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitCertificate {
    pub converges: bool,
    pub threshold_reached: bool,
    pub bound_offset: Size,
    pub bound_step: Size,
    /// Smallest observed one-step change of the worst entry.
    pub observed_increment: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerationTrace {
    pub to_lower: LimitCertificate,
    pub to_upper: LimitCertificate,
    pub initial_term_matches: bool,
    pub stays_in_big_cell: bool,
    pub steps: Vec<DegenerationStep>,
    #[serde(skip)]
    pub u: Representation,
    #[serde(skip)]
    pub r: Representation,
    #[serde(skip)]
    pub n_prime: Representation,
    #[serde(skip)]
    pub rho_last: Representation,
}

impl DegenerationTrace {
    pub fn verified(&self) -> bool {
        self.to_lower.converges
            && self.to_upper.converges
            && self.initial_term_matches
            && self.stays_in_big_cell
    }
}

fn sizes_of(m: &Matrix) -> Vec<Vec<Size>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| Size::of(&m[(r, c)])).collect())
        .collect()
}

fn min_size(m: &Matrix) -> Size {
    if m.field().is_real() {
        Size::Magnitude(m.max_abs())
    } else {
        Size::Valuation(m.min_valuation().expect("exact field"))
    }
}

fn approx_equal(a: &Matrix, b: &Matrix) -> bool {
    if a.field().is_real() {
        a.approx_eq(b, REAL_TOL * a.max_abs().max(b.max_abs()).max(1.0))
    } else {
        a == b
    }
}

struct BoundCheck {
    offset: Size,
    step: Step,
    ok: bool,
    worst: Vec<Size>,
}

impl BoundCheck {
    fn new(offset: Size, step: Step) -> Self {
        BoundCheck {
            offset,
            step,
            ok: true,
            worst: Vec::new(),
        }
    }

    fn observe(&mut self, i: usize, diff: &Matrix, k: usize) {
        let actual = min_size(diff);
        if self.worst.len() <= i {
            self.worst.push(actual);
        } else if larger(actual, self.worst[i]) {
            self.worst[i] = actual;
        }
        let ok = match (self.offset, self.step, actual) {
            (Size::Valuation(b0), Step::Increment(d), Size::Valuation(v)) => match b0 {
                Valuation::Infinite => v.is_infinite(),
                Valuation::Finite(b) => v >= Valuation::Finite(b + i as i64 * d),
            },
            (Size::Magnitude(c), Step::Ratio(q), Size::Magnitude(m)) => {
                m <= (k as f64) * c * q.powi(i as i32) * (1.0 + 1e-9) + 1e-300
            }
            _ => false,
        };
        self.ok &= ok;
    }

    fn finish(self) -> LimitCertificate {
        let (positive, bound_step) = match self.step {
            Step::Increment(d) => (d > 0, Size::Valuation(Valuation::Finite(d))),
            Step::Ratio(q) => (q < 1.0, Size::Magnitude(q)),
        };
        let observed_increment = match self.worst.as_slice() {
            [_, rest @ ..] if !rest.is_empty() => self
                .worst
                .windows(2)
                .filter_map(|w| match (w[0], w[1]) {
                    (
                        Size::Valuation(Valuation::Finite(a)),
                        Size::Valuation(Valuation::Finite(b)),
                    ) => Some(b - a),
                    _ => None,
                })
                .min(),
            _ => None,
        };
        let threshold_reached = self.worst.last().is_none_or(|s| s.small_enough());
        LimitCertificate {
            converges: self.ok && positive,
            threshold_reached,
            bound_offset: self.offset,
            bound_step,
            observed_increment,
        }
    }
}

fn product_offset(a: Size, b: Size) -> Size {
    match (a, b) {
        (Size::Valuation(x), Size::Valuation(y)) => Size::Valuation(x + y),
        (Size::Magnitude(x), Size::Magnitude(y)) => Size::Magnitude(x * y),
        _ => a,
    }
}

/// Builds ρ_i(s) = u(s)·r(s)·(a^{-i}·n′(s)·a^{i}) from a lower and an upper
/// representation sharing their Levi part.
pub fn build_neighbors(
    rho_minus: &Representation,
    rho_plus: &Representation,
    seq: &FundamentalSequence,
    imax: usize,
) -> Result<DegenerationTrace> {
    rho_minus.same_shape(rho_plus)?;
    let blocks = seq.blocks();
    if blocks.n() != rho_minus.dim() {
        return Err(Error::DimensionMismatch(blocks.n(), rho_minus.dim()));
    }
    if seq.field() != rho_minus.field() {
        return Err(Error::FieldMismatch(seq.field(), rho_minus.field()));
    }
    let field = rho_minus.field();
    let n = blocks.n();
    let id = Matrix::identity(field, n);
    let r = rho_minus.map(|name, m| {
        let lower = levi_project(m, blocks, Side::Lower)?;
        let upper = levi_project(
            rho_plus.get(name).expect("same generators"),
            blocks,
            Side::Upper,
        )?;
        if !approx_equal(&lower, &upper) {
            return Err(Error::LeviMismatch(name.to_string()));
        }
        Ok(lower)
    })?;
    let u = rho_minus.map(|name, m| Ok(m.mul(r.inverse(name).expect("invertible"))))?;
    let n_prime = rho_plus.map(|name, m| Ok(r.inverse(name).expect("invertible").mul(m)))?;

    let step = seq.step();
    let k = n * n;
    let mut off_lower = None;
    let mut off_upper = None;
    for name in rho_minus.names() {
        let ur = u.get(name).unwrap().mul(r.get(name).unwrap());
        let rn = r.get(name).unwrap().mul(n_prime.get(name).unwrap());
        let lo = product_offset(
            min_size(&ur),
            min_size(&n_prime.get(name).unwrap().sub(&id)),
        );
        let hi = product_offset(min_size(&u.get(name).unwrap().sub(&id)), min_size(&rn));
        off_lower = Some(off_lower.map_or(lo, |x| if larger(lo, x) { lo } else { x }));
        off_upper = Some(off_upper.map_or(hi, |x| if larger(hi, x) { hi } else { x }));
    }
    let mut lower_check = BoundCheck::new(off_lower.unwrap(), step);
    let mut upper_check = BoundCheck::new(off_upper.unwrap(), step);

    let mut steps = Vec::with_capacity(imax + 1);
    let mut initial_term_matches = true;
    let mut stays_in_big_cell = true;
    let mut rho_last = rho_minus.clone();
    for i in 0..=imax {
        let mut gens = Vec::new();
        let rho_i = rho_minus.map(|name, _| {
            let ur = u.get(name).unwrap().mul(r.get(name).unwrap());
            Ok(ur.mul(&seq.conjugate(n_prime.get(name).unwrap(), i as i64)))
        })?;
        for (name, m) in rho_i.generators() {
            if i == 0 {
                let direct = u
                    .get(name)
                    .unwrap()
                    .mul(r.get(name).unwrap())
                    .mul(n_prime.get(name).unwrap());
                initial_term_matches &= approx_equal(m, &direct);
            }
            let in_big_cell = levi_decompose(m, blocks).is_ok();
            stays_in_big_cell &= in_big_cell;
            let d_lower = m.sub(rho_minus.get(name).unwrap());
            let back = seq.conjugate(m, -(i as i64));
            let d_upper = back.sub(rho_plus.get(name).unwrap());
            lower_check.observe(i, &d_lower, k);
            upper_check.observe(i, &d_upper, k);
            gens.push(GeneratorStep {
                generator: name.to_string(),
                lower: sizes_of(&d_lower),
                upper: sizes_of(&d_upper),
                in_big_cell,
            });
        }
        steps.push(DegenerationStep {
            i,
            generators: gens,
        });
        rho_last = rho_i;
    }
    Ok(DegenerationTrace {
        to_lower: lower_check.finish(),
        to_upper: upper_check.finish(),
        initial_term_matches,
        stays_in_big_cell,
        steps,
        u,
        r,
        n_prime,
        rho_last,
    })
}
