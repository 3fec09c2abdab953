//! Vectors and linear maps over a prime field GF(q), written in a fixed
//! basis `[a, b, c, d1, ..., dk]` whose first three labels are the
//! distinguished vectors and whose tail is the set `A`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul};
use std::sync::Arc;

use thiserror::Error;

/// Largest supported basis dimension.
pub const MAX_DIM: usize = 16;

pub const A_INDEX: usize = 0;
pub const B_INDEX: usize = 1;
pub const C_INDEX: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinError {
    #[error("field order {0} must be a prime other than 2 and 3 (and below 256)")]
    BadField(u32),
    #[error("operands are written in different bases")]
    BasisMismatch,
    #[error("basis labels must be distinct; `{0}` repeats")]
    DuplicateLabel(String),
    #[error("dimension {0} exceeds the limit of {MAX_DIM}")]
    TooLarge(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// The prime field GF(q), q >= 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    q: u8,
}

impl Field {
    pub fn new(q: u32) -> Result<Field, LinError> {
        let prime = q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d));
        if !prime || q == 2 || q == 3 || q > 255 {
            return Err(LinError::BadField(q));
        }
        Ok(Field { q: q as u8 })
    }

    pub fn order(self) -> u32 {
        self.q as u32
    }

    pub fn add(self, x: u8, y: u8) -> u8 {
        ((x as u16 + y as u16) % self.q as u16) as u8
    }

    pub fn mul(self, x: u8, y: u8) -> u8 {
        ((x as u16 * y as u16) % self.q as u16) as u8
    }

    pub fn neg(self, x: u8) -> u8 {
        if x == 0 {
            0
        } else {
            self.q - x
        }
    }

    pub fn sub(self, x: u8, y: u8) -> u8 {
        self.add(x, self.neg(y))
    }
}

/// An element of GF(q) together with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Field,
    residue: u8,
}

impl FieldElement {
    pub fn new(field: Field, value: i64) -> FieldElement {
        let q = field.order() as i64;
        FieldElement {
            field,
            residue: value.rem_euclid(q) as u8,
        }
    }

    pub fn residue(self) -> u8 {
        self.residue
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement {
            field: self.field,
            residue: self.field.add(self.residue, rhs.residue),
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        FieldElement {
            field: self.field,
            residue: self.field.mul(self.residue, rhs.residue),
        }
    }
}

/// Basis labels `[a, b, c, d1, ...]` over a field. Labels at positions 0, 1
/// and 2 are the distinguished vectors; the rest form `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    field: Field,
    labels: Vec<String>,
}

impl Basis {
    /// `ground` lists the labels of `A` in order.
    pub fn new(field: Field, ground: &[String]) -> Result<Arc<Basis>, LinError> {
        let mut labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        labels.extend(ground.iter().cloned());
        if labels.len() > MAX_DIM {
            return Err(LinError::TooLarge(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LinError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Arc::new(Basis { field, labels }))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Basis position of the `i`-th element of `A`.
    pub fn a_position(&self, i: usize) -> usize {
        3 + i
    }

    pub fn a_len(&self) -> usize {
        self.labels.len() - 3
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn same_basis(x: &Arc<Basis>, y: &Arc<Basis>) -> bool {
    Arc::ptr_eq(x, y) || **x == **y
}

/// A vector given by its coordinates in the basis.
#[derive(Debug, Clone)]
pub struct Vector {
    basis: Arc<Basis>,
    coords: Vec<u8>,
}

impl Vector {
    pub fn zero(basis: &Arc<Basis>) -> Vector {
        Vector {
            basis: basis.clone(),
            coords: vec![0; basis.dim()],
        }
    }

    /// The basis vector at position `i`.
    pub fn unit(basis: &Arc<Basis>, i: usize) -> Vector {
        let mut v = Vector::zero(basis);
        v.coords[i] = 1;
        v
    }

    /// Coordinates are reduced mod q.
    pub fn from_coords(basis: &Arc<Basis>, coords: &[i64]) -> Vector {
        assert_eq!(coords.len(), basis.dim(), "coordinate count");
        let field = basis.field();
        Vector {
            basis: basis.clone(),
            coords: coords.iter().map(|&c| FieldElement::new(field, c).residue()).collect(),
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> FieldElement {
        FieldElement {
            field: self.basis.field(),
            residue: self.coords[i],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl PartialEq for Vector {
    fn eq(&self, other: &Vector) -> bool {
        same_basis(&self.basis, &other.basis) && self.coords == other.coords
    }
}

impl Eq for Vector {}

/// A linear map stored as a dense column-major matrix: column `j` is the
/// image of basis vector `j`.
#[derive(Clone)]
pub struct LinearMap {
    basis: Arc<Basis>,
    entries: Vec<u8>,
}

impl LinearMap {
    pub fn zero(basis: &Arc<Basis>) -> LinearMap {
        let n = basis.dim();
        LinearMap {
            basis: basis.clone(),
            entries: vec![0; n * n],
        }
    }

    pub fn identity(basis: &Arc<Basis>) -> LinearMap {
        let mut m = LinearMap::zero(basis);
        for i in 0..basis.dim() {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a map from the images of each basis vector.
    pub fn from_columns(basis: &Arc<Basis>, columns: &[Vector]) -> Result<LinearMap, LinError> {
        let n = basis.dim();
        assert_eq!(columns.len(), n, "one column per basis vector");
        let mut m = LinearMap::zero(basis);
        for (j, col) in columns.iter().enumerate() {
            if !same_basis(col.basis(), basis) {
                return Err(LinError::BasisMismatch);
            }
            m.entries[j * n..(j + 1) * n].copy_from_slice(&col.coords);
        }
        Ok(m)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    /// Entry in `row` of column `col`.
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[col * self.dim() + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        let n = self.dim();
        self.entries[col * n + row] = value % self.basis.field().q;
    }

    /// Image of the basis vector at position `col`.
    pub fn column(&self, col: usize) -> &[u8] {
        let n = self.dim();
        &self.entries[col * n..(col + 1) * n]
    }

    pub fn set_column(&mut self, col: usize, coords: &[u8]) {
        let n = self.dim();
        self.entries[col * n..(col + 1) * n].copy_from_slice(coords);
    }

    pub fn image_of(&self, col: usize) -> Vector {
        Vector {
            basis: self.basis.clone(),
            coords: self.column(col).to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector, LinError> {
        if !same_basis(&self.basis, v.basis()) {
            return Err(LinError::BasisMismatch);
        }
        let n = self.dim();
        let field = self.basis.field();
        let mut out = vec![0u8; n];
        for (j, &x) in v.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &e) in out.iter_mut().zip(self.column(j)) {
                *o = field.add(*o, field.mul(e, x));
            }
        }
        Ok(Vector {
            basis: self.basis.clone(),
            coords: out,
        })
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap, LinError> {
        if !same_basis(&self.basis, &inner.basis) {
            return Err(LinError::BasisMismatch);
        }
        Ok(self.compose_same(inner))
    }

    fn compose_same(&self, inner: &LinearMap) -> LinearMap {
        let n = self.dim();
        let q = self.basis.field().q as u32;
        let mut entries = vec![0u8; n * n];
        for j in 0..n {
            let col = inner.column(j);
            let out = &mut entries[j * n..(j + 1) * n];
            let mut acc = [0u32; MAX_DIM];
            for (k, &x) in col.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (a, &e) in acc.iter_mut().zip(self.column(k)) {
                    *a += e as u32 * x as u32;
                }
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o = (a % q) as u8;
            }
        }
        LinearMap {
            basis: self.basis.clone(),
            entries,
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &LinearMap) -> Result<LinearMap, LinError> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(LinError::BasisMismatch);
        }
        Ok(self.add_same(other))
    }

    fn add_same(&self, other: &LinearMap) -> LinearMap {
        let field = self.basis.field();
        LinearMap {
            basis: self.basis.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&x, &y)| field.add(x, y))
                .collect(),
        }
    }

    pub fn sub(&self, other: &LinearMap) -> Result<LinearMap, LinError> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(LinError::BasisMismatch);
        }
        let field = self.basis.field();
        Ok(LinearMap {
            basis: self.basis.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&x, &y)| field.sub(x, y))
                .collect(),
        })
    }

    pub fn scale(&self, k: u8) -> LinearMap {
        let field = self.basis.field();
        LinearMap {
            basis: self.basis.clone(),
            entries: self.entries.iter().map(|&x| field.mul(x, k)).collect(),
        }
    }

    /// The `A`-elements (as a mask over `A`) not sent to zero. Never reads
    /// the `a`, `b`, `c` columns.
    pub fn support(&self) -> u32 {
        let mut mask = 0;
        for i in 0..self.basis.a_len() {
            if self.column(self.basis.a_position(i)).iter().any(|&e| e != 0) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Whether every column lies in the span of the basis vectors whose
    /// positions are set in `rows` (a mask over basis positions).
    pub fn range_within(&self, rows: u32) -> bool {
        let n = self.dim();
        (0..n).all(|j| {
            self.column(j)
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || rows >> i & 1 == 1)
        })
    }

    /// Rank via Gaussian elimination over GF(q).
    pub fn rank(&self) -> usize {
        let n = self.dim();
        let field = self.basis.field();
        let mut rows: Vec<Vec<u8>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = inverse(field, rows[rank][col]);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let factor = field.mul(row[col], inv);
                    for (x, &p) in row.iter_mut().zip(&pivot_row) {
                        *x = field.sub(*x, field.mul(factor, p));
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Row-major text: a header line of basis labels, then one line per row.
    pub fn to_text(&self) -> String {
        let n = self.dim();
        let mut out = self.basis.labels().join(" ");
        for i in 0..n {
            out.push('\n');
            let row: Vec<String> = (0..n).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
        }
        out
    }

    pub fn parse(text: &str, basis: &Arc<Basis>) -> Result<LinearMap, LinError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(LinError::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let labels: Vec<&str> = header.split_whitespace().collect();
        if labels != basis.labels().iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(LinError::Parse {
                line: hline,
                message: "header does not match the basis".into(),
            });
        }
        let n = basis.dim();
        let mut m = LinearMap::zero(basis);
        let q = basis.field().order();
        let mut row = 0;
        for (line, l) in lines {
            if row == n {
                return Err(LinError::Parse {
                    line,
                    message: "too many rows".into(),
                });
            }
            let values: Vec<&str> = l.split_whitespace().collect();
            if values.len() != n {
                return Err(LinError::Parse {
                    line,
                    message: format!("expected {n} entries, found {}", values.len()),
                });
            }
            for (j, v) in values.iter().enumerate() {
                let x: u32 = v.parse().map_err(|_| LinError::Parse {
                    line,
                    message: format!("bad entry `{v}`"),
                })?;
                if x >= q {
                    return Err(LinError::Parse {
                        line,
                        message: format!("entry {x} is not reduced mod {q}"),
                    });
                }
                m.set(row, j, x as u8);
            }
            row += 1;
        }
        if row != n {
            return Err(LinError::Parse {
                line: hline + row + 1,
                message: format!("expected {n} rows, found {row}"),
            });
        }
        Ok(m)
    }
}

fn inverse(field: Field, x: u8) -> u8 {
    (1..field.q).find(|&y| field.mul(x, y) == 1).expect("nonzero element")
}

impl PartialEq for LinearMap {
    fn eq(&self, other: &LinearMap) -> bool {
        same_basis(&self.basis, &other.basis) && self.entries == other.entries
    }
}

impl Eq for LinearMap {}

impl Hash for LinearMap {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.entries.hash(state);
    }
}

impl PartialOrd for LinearMap {
    fn partial_cmp(&self, other: &LinearMap) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LinearMap {
    fn cmp(&self, other: &LinearMap) -> Ordering {
        self.entries.cmp(&other.entries)
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap[")?;
        let labels = self.basis.labels();
        let mut first = true;
        for j in 0..self.dim() {
            let col = self.column(j);
            if col.iter().all(|&e| e == 0) {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{} -> ", labels[j])?;
            let terms: Vec<String> = col
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        labels[i].clone()
                    } else {
                        format!("{e}{}", labels[i])
                    }
                })
                .collect();
            write!(f, "{}", terms.join("+"))?;
        }
        write!(f, "]")
    }
}

/// Panics on a basis mismatch; use [`LinearMap::compose`] for checked use.
impl Mul<&LinearMap> for &LinearMap {
    type Output = LinearMap;
    fn mul(self, inner: &LinearMap) -> LinearMap {
        assert!(same_basis(&self.basis, &inner.basis), "basis mismatch");
        self.compose_same(inner)
    }
}

/// Panics on a basis mismatch; use [`LinearMap::add`] for checked use.
impl Add<&LinearMap> for &LinearMap {
    type Output = LinearMap;
    fn add(self, other: &LinearMap) -> LinearMap {
        assert!(same_basis(&self.basis, &other.basis), "basis mismatch");
        self.add_same(other)
    }
}
