//! CSS code construction: bivariate bicycle, generalized bicycle and
//! hypergraph product families, plus logical operators and exhaustive
//! distance for small codes.
//!
//! Qubit columns of BB and GB codes are ordered left block (`A` side)
//! first, then right block (`B` side). The layered split strategy relies on
//! this ordering.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::dense::{eliminate, BitRow};
use crate::gf2::{reduce_against, BinMatrix, BinVector};

/// Largest `n` accepted by [`min_distance_exhaustive`].
pub const EXHAUSTIVE_DISTANCE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CodeFamily {
    Bivariate { l: usize, m: usize },
    GeneralizedBicycle { l: usize },
    HypergraphProduct,
    Generic,
}

/// Which Pauli type an error vector (or decoding problem) refers to.
///
/// X errors are detected by Z-checks (`hz`); Z errors by X-checks (`hx`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorType {
    X,
    Z,
}

impl ErrorType {
    pub fn opposite(self) -> ErrorType {
        match self {
            ErrorType::X => ErrorType::Z,
            ErrorType::Z => ErrorType::X,
        }
    }
}

impl std::str::FromStr for ErrorType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(ErrorType::X),
            "z" => Ok(ErrorType::Z),
            other => Err(Error::InvalidArgument(format!("unknown error type `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CssCode {
    pub n: usize,
    pub k: usize,
    /// X-checks, one row per check.
    pub hx: BinMatrix,
    /// Z-checks, one row per check.
    pub hz: BinMatrix,
    pub logical_x: Vec<BinVector>,
    pub logical_z: Vec<BinVector>,
    pub label: String,
    /// Metadata only; never consulted by a decoder.
    pub claimed_distance: Option<usize>,
    pub family: CodeFamily,
}

impl CssCode {
    /// Validates commutation and computes `k` and a paired logical basis.
    /// A code with `k = 0` is accepted here (useful for gadgets); the family
    /// constructors reject it.
    pub fn new(label: impl Into<String>, hx: BinMatrix, hz: BinMatrix, family: CodeFamily) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::DimensionMismatch {
                expected: hx.cols(),
                got: hz.cols(),
                context: "hx and hz column counts",
            });
        }
        if !commutes(&hx, &hz) {
            return Err(Error::Invariant("hz · hxᵀ ≠ 0".into()));
        }
        let n = hx.cols();
        let (logical_x, logical_z) = compute_logicals(&hx, &hz)?;
        Ok(CssCode {
            n,
            k: logical_x.len(),
            hx,
            hz,
            logical_x,
            logical_z,
            label: label.into(),
            claimed_distance: None,
            family,
        })
    }

    pub fn with_claimed_distance(mut self, d: Option<usize>) -> Self {
        self.claimed_distance = d;
        self
    }

    /// Parity matrix whose checks detect errors of type `t`.
    pub fn checks_for(&self, t: ErrorType) -> &BinMatrix {
        match t {
            ErrorType::X => &self.hz,
            ErrorType::Z => &self.hx,
        }
    }

    /// Checks of the opposite type, i.e. the degeneracy generators for
    /// errors of type `t`.
    pub fn stabilizers_for(&self, t: ErrorType) -> &BinMatrix {
        match t {
            ErrorType::X => &self.hx,
            ErrorType::Z => &self.hz,
        }
    }

    /// Logical operators that detect a residual of type `t`.
    pub fn detecting_logicals(&self, t: ErrorType) -> &[BinVector] {
        match t {
            ErrorType::X => &self.logical_z,
            ErrorType::Z => &self.logical_x,
        }
    }

    pub fn is_bivariate_bicycle(&self) -> bool {
        matches!(self.family, CodeFamily::Bivariate { .. })
    }

    /// Re-checks every structural invariant and summarizes weights.
    pub fn check(&self) -> Result<CodeReport> {
        if self.hx.cols() != self.n || self.hz.cols() != self.n {
            return Err(Error::Invariant("matrix width differs from n".into()));
        }
        if !commutes(&self.hx, &self.hz) {
            return Err(Error::Invariant("hz · hxᵀ ≠ 0".into()));
        }
        let rank_hx = self.hx.rank();
        let rank_hz = self.hz.rank();
        let k = self.n - rank_hx - rank_hz;
        if k != self.k || self.logical_x.len() != k || self.logical_z.len() != k {
            return Err(Error::Invariant(format!(
                "k mismatch: rank formula {k}, stored {}, |Lx| {}, |Lz| {}",
                self.k,
                self.logical_x.len(),
                self.logical_z.len()
            )));
        }
        for lx in &self.logical_x {
            if !self.hz.matvec(lx)?.is_zero() {
                return Err(Error::Invariant("X logical not in ker(hz)".into()));
            }
        }
        for lz in &self.logical_z {
            if !self.hx.matvec(lz)?.is_zero() {
                return Err(Error::Invariant("Z logical not in ker(hx)".into()));
            }
        }
        for (i, lz) in self.logical_z.iter().enumerate() {
            for (j, lx) in self.logical_x.iter().enumerate() {
                if lz.dot(lx) != (i == j) {
                    return Err(Error::Invariant(format!(
                        "logical pairing fails at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(CodeReport {
            label: self.label.clone(),
            n: self.n,
            k,
            rank_hx,
            rank_hz,
            hx_rows: self.hx.rows(),
            hz_rows: self.hz.rows(),
            row_weight: span(self.hx.row_weights().into_iter().chain(self.hz.row_weights())),
            col_weight: span(self.hx.col_weights().into_iter().chain(self.hz.col_weights())),
            claimed_distance: self.claimed_distance,
        })
    }
}

fn span(it: impl Iterator<Item = usize>) -> (usize, usize) {
    it.fold((usize::MAX, 0), |(lo, hi), w| (lo.min(w), hi.max(w)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeReport {
    pub label: String,
    pub n: usize,
    pub k: usize,
    pub rank_hx: usize,
    pub rank_hz: usize,
    pub hx_rows: usize,
    pub hz_rows: usize,
    /// (min, max) row weight over both matrices.
    pub row_weight: (usize, usize),
    /// (min, max) column weight, taken per matrix.
    pub col_weight: (usize, usize),
    pub claimed_distance: Option<usize>,
}

impl fmt::Display for CodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |(lo, hi): (usize, usize)| {
            if lo == hi {
                lo.to_string()
            } else {
                format!("{lo}-{hi}")
            }
        };
        write!(
            f,
            "n={} k={} row_w={} col_w={}",
            self.n,
            self.k,
            show(self.row_weight),
            show(self.col_weight)
        )
    }
}

/// True when every row of `hz` has even overlap with every row of `hx`.
pub fn commutes(hx: &BinMatrix, hz: &BinMatrix) -> bool {
    hx.cols() == hz.cols() && hz.mul(&hx.transpose()).is_ok_and(|p| p.is_zero())
}

/// Element of the group algebra F2[Z_l × Z_m]: a sum of monomials xⁱyʲ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialSum {
    terms: Vec<(usize, usize)>,
    l: usize,
    m: usize,
}

impl MonomialSum {
    /// Exponents are reduced mod `l` and `m`; a repeated monomial is an error.
    pub fn new(l: usize, m: usize, terms: &[(usize, usize)]) -> Result<Self> {
        if l == 0 || m == 0 {
            return Err(Error::InvalidArgument("group orders must be positive".into()));
        }
        let reduced: Vec<(usize, usize)> = terms.iter().map(|&(i, j)| (i % l, j % m)).collect();
        let mut sorted = reduced.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("repeated monomial".into()));
        }
        Ok(MonomialSum { terms: reduced, l, m })
    }

    /// Univariate polynomial in a single cyclic shift of order `l`.
    pub fn univariate(l: usize, exponents: &[usize]) -> Result<Self> {
        let terms: Vec<(usize, usize)> = exponents.iter().map(|&e| (e, 0)).collect();
        Self::new(l, 1, &terms)
    }

    pub fn terms(&self) -> &[(usize, usize)] {
        &self.terms
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.l, self.m)
    }

    /// The `lm × lm` matrix of multiplication by this element. Row
    /// `(a, b)` (index `a·m + b`) has a one at `(a + i, b + j)` per term.
    pub fn matrix(&self) -> BinMatrix {
        let (l, m) = (self.l, self.m);
        let rows = (0..l * m)
            .map(|idx| {
                let (a, b) = (idx / m, idx % m);
                self.terms
                    .iter()
                    .map(|&(i, j)| ((a + i) % l) * m + (b + j) % m)
                    .collect()
            })
            .collect();
        BinMatrix::from_rows_xor(l * m, rows)
    }
}

fn bicycle_matrices(a: &MonomialSum, b: &MonomialSum) -> Result<(BinMatrix, BinMatrix)> {
    if a.orders() != b.orders() {
        return Err(Error::InvalidArgument(
            "polynomials must share group orders".into(),
        ));
    }
    let am = a.matrix();
    let bm = b.matrix();
    let hx = am.hstack(&bm)?;
    let hz = bm.transpose().hstack(&am.transpose())?;
    Ok((hx, hz))
}

/// Bivariate bicycle code `hx = [A | B]`, `hz = [Bᵀ | Aᵀ]`.
pub fn make_bb_code(a: &MonomialSum, b: &MonomialSum) -> Result<CssCode> {
    if a.terms().len() != 3 || b.terms().len() != 3 {
        return Err(Error::InvalidArgument(
            "bivariate bicycle polynomials need exactly 3 terms each".into(),
        ));
    }
    let (l, m) = a.orders();
    let (hx, hz) = bicycle_matrices(a, b)?;
    let code = CssCode::new(
        format!("bb_l{l}_m{m}"),
        hx,
        hz,
        CodeFamily::Bivariate { l, m },
    )?;
    if code.k == 0 {
        return Err(Error::TrivialCode);
    }
    Ok(code)
}

/// Generalized bicycle code from two circulants of order `l`.
pub fn make_gb_code(a: &[usize], b: &[usize], l: usize) -> Result<CssCode> {
    let pa = MonomialSum::univariate(l, a)?;
    let pb = MonomialSum::univariate(l, b)?;
    let (hx, hz) = bicycle_matrices(&pa, &pb)?;
    let code = CssCode::new(format!("gb_l{l}"), hx, hz, CodeFamily::GeneralizedBicycle { l })?;
    if code.k == 0 {
        return Err(Error::TrivialCode);
    }
    Ok(code)
}

/// Hypergraph product: `hx = [h1⊗I | I⊗h2ᵀ]`, `hz = [I⊗h2 | h1ᵀ⊗I]`.
pub fn make_hp_code(h1: &BinMatrix, h2: &BinMatrix) -> Result<CssCode> {
    let (m1, n1) = (h1.rows(), h1.cols());
    let (m2, n2) = (h2.rows(), h2.cols());
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("classical codes need at least one bit".into()));
    }
    let hx = h1
        .kron(&BinMatrix::identity(n2))
        .hstack(&BinMatrix::identity(m1).kron(&h2.transpose()))?;
    let hz = BinMatrix::identity(n1)
        .kron(h2)
        .hstack(&h1.transpose().kron(&BinMatrix::identity(m2)))?;
    CssCode::new(
        format!("hp_{}x{}", n1 * n2 + m1 * m2, n1 * n2),
        hx,
        hz,
        CodeFamily::HypergraphProduct,
    )
}

/// Circulant parity matrix of `Σ x^e` over `Z_size`.
pub fn circulant(size: usize, exponents: &[usize]) -> Result<BinMatrix> {
    Ok(MonomialSum::univariate(size, exponents)?.matrix())
}

/// Paired logical bases: `logical_x ⊂ ker(hz) \ row(hx)`,
/// `logical_z ⊂ ker(hx) \ row(hz)`, with `logical_z[i]·logical_x[j] = δ_ij`.
pub fn compute_logicals(hx: &BinMatrix, hz: &BinMatrix) -> Result<(Vec<BinVector>, Vec<BinVector>)> {
    if !commutes(hx, hz) {
        return Err(Error::Invariant("hz · hxᵀ ≠ 0".into()));
    }
    let n = hx.cols();
    let xs = coset_representatives(hz, hx);
    let zs = coset_representatives(hx, hz);
    if xs.len() != zs.len() {
        return Err(Error::Invariant("logical X/Z counts differ".into()));
    }
    let k = xs.len();
    // Pairing matrix P[i][j] = z_i · x_j; replacing Z by P⁻¹·Z makes it identity.
    let pairing: Vec<BitRow> = zs
        .iter()
        .map(|z| {
            let mut row = BitRow::zeros(k);
            for (j, x) in xs.iter().enumerate() {
                if z.dot(x) {
                    row.flip(j);
                }
            }
            row
        })
        .collect();
    let inverse = invert(pairing, k).ok_or_else(|| Error::Invariant("logical pairing is singular".into()))?;
    let zs_paired: Vec<BitRow> = inverse
        .iter()
        .map(|coeffs| {
            let mut acc = BitRow::zeros(n);
            for i in coeffs.ones() {
                acc.xor_assign(&zs[i]);
            }
            acc
        })
        .collect();
    Ok((
        xs.iter().map(|r| BinVector::from_bitrow(n, r)).collect(),
        zs_paired.iter().map(|r| BinVector::from_bitrow(n, r)).collect(),
    ))
}

/// Basis of `ker(checks)` modulo `row(stabilizers)`.
fn coset_representatives(checks: &BinMatrix, stabilizers: &BinMatrix) -> Vec<BitRow> {
    let n = checks.cols();
    let k = n - checks.rank() - stabilizers.rank();
    let order: Vec<usize> = (0..n).collect();
    let stab = eliminate(stabilizers, None, &order, true);
    // Independent representatives, fully reduced against one another.
    let mut chosen: Vec<(usize, BitRow)> = Vec::with_capacity(k);
    for v in checks.kernel_basis() {
        if chosen.len() == k {
            break;
        }
        let mut row = reduce_against(&stab, v.to_bitrow());
        for (p, r) in &chosen {
            if row.get(*p) {
                row.xor_assign(r);
            }
        }
        let lead = row.ones().next();
        if let Some(p) = lead {
            for (_, r) in chosen.iter_mut() {
                if r.get(p) {
                    r.xor_assign(&row);
                }
            }
            chosen.push((p, row));
        }
    }
    chosen.into_iter().map(|(_, r)| r).collect()
}

/// Inverse of a square GF(2) matrix given as rows, or `None` if singular.
fn invert(mut rows: Vec<BitRow>, k: usize) -> Option<Vec<BitRow>> {
    let mut inv: Vec<BitRow> = (0..k).map(|i| BitRow::from_support(k, &[i])).collect();
    for col in 0..k {
        let p = (col..k).find(|&r| rows[r].get(col))?;
        rows.swap(col, p);
        inv.swap(col, p);
        let (pivot, pivot_inv) = (rows[col].clone(), inv[col].clone());
        for r in 0..k {
            if r != col && rows[r].get(col) {
                rows[r].xor_assign(&pivot);
                inv[r].xor_assign(&pivot_inv);
            }
        }
    }
    Some(inv)
}

/// Exact distance by enumerating `ker(hz)` and `ker(hx)`; only for `n ≤ 24`.
pub fn min_distance_exhaustive(code: &CssCode, max_n: usize) -> Result<usize> {
    let limit = max_n.min(EXHAUSTIVE_DISTANCE_LIMIT);
    if code.n > limit {
        return Err(Error::TooLargeForExhaustive { n: code.n, limit });
    }
    if code.k == 0 {
        return Err(Error::InvalidArgument("code has no logical qubits".into()));
    }
    let dx = min_logical_weight(&code.hz, &code.logical_z);
    let dz = min_logical_weight(&code.hx, &code.logical_x);
    Ok(dx.min(dz))
}

/// Minimum weight of a vector in `ker(checks)` that anticommutes with some
/// detecting logical.
fn min_logical_weight(checks: &BinMatrix, detectors: &[BinVector]) -> usize {
    let mask = |v: &BinVector| v.support().iter().fold(0u32, |acc, &i| acc | (1 << i));
    let basis: Vec<u32> = checks.kernel_basis().iter().map(mask).collect();
    let detectors: Vec<u32> = detectors.iter().map(mask).collect();
    let mut best = usize::MAX;
    let mut word = 0u32;
    // Gray-code walk over all 2^dim kernel elements.
    for step in 1u64..(1u64 << basis.len()) {
        word ^= basis[step.trailing_zeros() as usize];
        let weight = word.count_ones() as usize;
        if weight < best && detectors.iter().any(|d| (d & word).count_ones() % 2 == 1) {
            best = weight;
        }
    }
    best
}
