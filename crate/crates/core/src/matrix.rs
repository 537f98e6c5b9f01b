//! Dense matrices over any [`Ring`], with Frobenius-twisted products,
//! Newton inversion over the local rings and a Smith form over `W(k)`.

use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::witt::{Witt, WittScalar};

/// `p^{-denom_exp} * entries`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RingMatrix<E> {
    rows: usize,
    cols: usize,
    pub denom_exp: u32,
    entries: Vec<E>,
}

/// Outcome of the at-precision test for `prod_n twist^n(A) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<E> {
    /// The partial product `A twist(A) ... twist^n(A)` vanished at this `n`.
    ZeroAtPrecision(usize),
    /// The last partial product computed.
    NotZero(RingMatrix<E>),
}

impl<E> Verdict<E> {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::ZeroAtPrecision(_))
    }
}

impl<E: Clone> RingMatrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RingMatrix { rows, cols, denom_exp: 0, entries }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(RingMatrix { rows: r, cols: c, denom_exp: 0, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: E) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn map<F: Clone>(&self, f: impl FnMut(&E) -> F) -> RingMatrix<F> {
        RingMatrix {
            rows: self.rows,
            cols: self.cols,
            denom_exp: self.denom_exp,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<F: Clone>(&self, f: impl FnMut(&E) -> Result<F>) -> Result<RingMatrix<F>> {
        Ok(RingMatrix {
            rows: self.rows,
            cols: self.cols,
            denom_exp: self.denom_exp,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = RingMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone());
        t.denom_exp = self.denom_exp;
        t
    }

    pub fn from_columns(cols: &[Vec<E>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        RingMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    fn check_mul(&self, other: &Self) -> Result<()> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn scaled_entries<R: Ring<Elem = E>>(&self, ring: &R, target: u32) -> Vec<E> {
        let k = target - self.denom_exp;
        self.entries.iter().map(|x| ring.mul_p_pow(x, k)).collect()
    }
}

impl<E: Clone + PartialEq + std::fmt::Debug + Send + Sync> RingMatrix<E> {
    pub fn zeros<R: Ring<Elem = E>>(ring: &R, rows: usize, cols: usize) -> Self {
        RingMatrix::from_fn(rows, cols, |_, _| ring.zero())
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, d: usize) -> Self {
        RingMatrix::from_fn(d, d, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn diagonal<R: Ring<Elem = E>>(ring: &R, diag: &[E]) -> Self {
        let d = diag.len();
        RingMatrix::from_fn(d, d, |i, j| if i == j { diag[i].clone() } else { ring.zero() })
    }

    pub fn from_ints<R: Ring<Elem = E>>(ring: &R, rows: &[&[i64]]) -> Self {
        let c = rows.first().map_or(0, |r| r.len());
        RingMatrix::from_fn(rows.len(), c, |i, j| ring.from_int(rows[i][j]))
    }

    pub fn add<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape("sum of differently shaped matrices".into()));
        }
        let t = self.denom_exp.max(other.denom_exp);
        let (a, b) = (self.scaled_entries(ring, t), other.scaled_entries(ring, t));
        Ok(RingMatrix {
            rows: self.rows,
            cols: self.cols,
            denom_exp: t,
            entries: a.iter().zip(&b).map(|(x, y)| ring.add(x, y)).collect(),
        })
    }

    pub fn sub<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        self.add(ring, &other.neg(ring))
    }

    pub fn neg<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        self.map(|x| ring.neg(x))
    }

    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        self.check_mul(other)?;
        let mut out = RingMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = ring.zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = other.get(k, j);
                acc = ring.add(&acc, &ring.mul(a, b));
            }
            acc
        });
        out.denom_exp = self.denom_exp + other.denom_exp;
        Ok(out)
    }

    pub fn scale<R: Ring<Elem = E>>(&self, ring: &R, s: &E) -> Self {
        self.map(|x| ring.mul(s, x))
    }

    /// Applies `x -> y` to a column vector.
    pub fn apply<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Result<Vec<E>> {
        if v.len() != self.cols {
            return Err(Error::Shape("vector length".into()));
        }
        if self.denom_exp != 0 {
            return Err(Error::Shape("apply on a scaled matrix".into()));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(ring.zero(), |acc, k| ring.add(&acc, &ring.mul(self.get(i, k), &v[k]))))
            .collect())
    }

    pub fn frobenius<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        self.map(|x| ring.frobenius(x))
    }

    /// Clears the denominator, failing if some entry is not divisible.
    pub fn integral<R: Ring<Elem = E>>(&self, ring: &R) -> Result<Self> {
        if self.denom_exp == 0 {
            return Ok(self.clone());
        }
        let mut out = self.try_map(|x| ring.div_p_pow(x, self.denom_exp))?;
        out.denom_exp = 0;
        Ok(out)
    }

    /// Cancels as much of the denominator as the entries allow.
    pub fn normalize<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        let mut out = self.clone();
        while out.denom_exp > 0 && out.entries.iter().all(|x| ring.vanishes_to(x, 1)) {
            out = out.div_p_pow(ring, 1).expect("entries vanish mod p");
            out.denom_exp -= 1;
        }
        out
    }

    pub fn div_p_pow<R: Ring<Elem = E>>(&self, ring: &R, k: u32) -> Result<Self> {
        self.try_map(|x| ring.div_p_pow(x, k))
    }

    pub fn mul_p_pow<R: Ring<Elem = E>>(&self, ring: &R, k: u32) -> Self {
        self.map(|x| ring.mul_p_pow(x, k))
    }

    pub fn truncate<R: Ring<Elem = E>>(&self, ring: &R, prec: u32) -> Self {
        self.map(|x| ring.truncate(x, prec))
    }

    pub fn is_zero<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.entries.iter().all(|x| ring.is_zero(x))
    }

    pub fn vanishes_to<R: Ring<Elem = E>>(&self, ring: &R, n: u32) -> bool {
        self.entries.iter().all(|x| ring.vanishes_to(x, n))
    }

    /// Equality at the common precision, denominators taken into account.
    pub fn eq_at_prec<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> bool {
        self.sub(ring, other).is_ok_and(|d| d.is_zero(ring))
    }

    /// Equality modulo `p^n` (entries must be known that far).
    pub fn eq_mod<R: Ring<Elem = E>>(&self, ring: &R, other: &Self, n: u32) -> bool {
        self.sub(ring, other).is_ok_and(|d| d.vanishes_to(ring, n + d.denom_exp))
    }

    pub fn min_prec<R: Ring<Elem = E>>(&self, ring: &R) -> u32 {
        self.entries.iter().map(|x| ring.min_prec(x)).min().unwrap_or(ring.witt().work_prec())
    }

    pub fn residue<R: Ring<Elem = E>>(&self, ring: &R) -> RingMatrix<WittScalar> {
        self.map(|x| ring.residue(x))
    }

    /// Inverse by Newton's iteration `Z <- Z + Z (I - A Z)` started from the
    /// inverse of the residue matrix.
    pub fn invert<R: Ring<Elem = E>>(&self, ring: &R) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let w = ring.witt();
        let d = self.rows;
        let res_inv = residue_inverse(w, &self.residue(ring)).ok_or(Error::NotInvertible)?;
        let mut a = self.clone();
        a.denom_exp = 0;
        let mut z = res_inv.map(|s| ring.from_scalar(&w.lift(s)));
        let id = RingMatrix::identity(ring, d);
        let mut converged = false;
        for _ in 0..64 {
            let err = id.sub(ring, &a.mul(ring, &z)?)?;
            if err.is_zero(ring) {
                converged = true;
                break;
            }
            z = z.add(ring, &z.mul(ring, &err)?)?;
        }
        if !converged {
            return Err(Error::NotInvertible);
        }
        // (p^{-t} A)^{-1} = p^t A^{-1}
        Ok(z.mul_p_pow(ring, self.denom_exp))
    }

    pub fn is_invertible<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.is_square() && residue_inverse(ring.witt(), &self.residue(ring)).is_some()
    }

    /// `A twist(A) twist^2(A) ... twist^n(A)`.
    pub fn twisted_chain<R: Ring<Elem = E>>(&self, ring: &R, n: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("twisted chain of a non-square matrix".into()));
        }
        let mut prod = self.clone();
        let mut t = self.clone();
        for _ in 0..n {
            t = t.frobenius(ring);
            prod = prod.mul(ring, &t)?;
        }
        Ok(prod)
    }

    /// Searches for the first `n <= max_steps` with
    /// `A twist(A) ... twist^n(A) = 0 mod p^{n_p}`.
    pub fn converges_to_zero<R: Ring<Elem = E>>(&self, ring: &R, n_p: u32, max_steps: usize) -> Verdict<E> {
        let mut prod = self.clone();
        let mut t = self.clone();
        for n in 0..=max_steps {
            if n > 0 {
                t = t.frobenius(ring);
                prod = match prod.mul(ring, &t) {
                    Ok(m) => m,
                    Err(_) => return Verdict::NotZero(prod),
                };
            }
            if prod.vanishes_to(ring, n_p + prod.denom_exp) {
                return Verdict::ZeroAtPrecision(n);
            }
        }
        Verdict::NotZero(prod)
    }

    /// Determinant by cofactor expansion (ranks here are small).
    pub fn det<R: Ring<Elem = E>>(&self, ring: &R) -> Result<E> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.minor_det(ring, &idx, &idx))
    }

    fn minor_det<R: Ring<Elem = E>>(&self, ring: &R, rows: &[usize], cols: &[usize]) -> E {
        match rows.len() {
            0 => ring.one(),
            1 => self.get(rows[0], cols[0]).clone(),
            2 => ring.sub(
                &ring.mul(self.get(rows[0], cols[0]), self.get(rows[1], cols[1])),
                &ring.mul(self.get(rows[0], cols[1]), self.get(rows[1], cols[0])),
            ),
            _ => {
                let mut acc = ring.zero();
                for (k, &c) in cols.iter().enumerate() {
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = ring.mul(self.get(rows[0], c), &self.minor_det(ring, &rows[1..], &rest));
                    acc = if k % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
                }
                acc
            }
        }
    }

    /// Adjugate: `A adj(A) = det(A) I`.
    pub fn adjugate<R: Ring<Elem = E>>(&self, ring: &R) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("adjugate of a non-square matrix".into()));
        }
        let d = self.rows;
        if d == 1 {
            return Ok(RingMatrix::identity(ring, 1));
        }
        Ok(RingMatrix::from_fn(d, d, |i, j| {
            let rows: Vec<usize> = (0..d).filter(|&x| x != j).collect();
            let cols: Vec<usize> = (0..d).filter(|&x| x != i).collect();
            let m = self.minor_det(ring, &rows, &cols);
            if (i + j) % 2 == 0 {
                m
            } else {
                ring.neg(&m)
            }
        }))
    }
}

/// Inverse over the residue field (entries read modulo `p`), or `None`.
pub fn residue_inverse(w: &Witt, a: &RingMatrix<WittScalar>) -> Option<RingMatrix<WittScalar>> {
    let d = a.rows();
    let mut m: Vec<Vec<WittScalar>> = (0..d)
        .map(|i| {
            let mut row: Vec<WittScalar> = a.row(i).iter().map(|x| w.truncate(x, 1)).collect();
            row.extend((0..d).map(|j| w.truncate(&w.from_int((i == j) as i64), 1)));
            row
        })
        .collect();
    for k in 0..d {
        let piv = (k..d).find(|&i| w.is_unit(&m[i][k]))?;
        m.swap(k, piv);
        let inv = w.invert(&m[k][k]).ok()?;
        m[k] = m[k].iter().map(|x| w.mul(x, &inv)).collect();
        for i in 0..d {
            if i != k && !w.is_zero(&m[i][k]) {
                let q = m[i][k].clone();
                let pivot_row = m[k].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = w.sub(x, &w.mul(&q, y));
                }
            }
        }
    }
    Some(RingMatrix::from_fn(d, d, |i, j| m[i][d + j].clone()))
}

/// Incremental row echelon form over the residue field, used to extend a
/// partial basis by vectors that stay independent modulo `p`.
#[derive(Clone, Debug, Default)]
pub struct ResidueEchelon {
    rows: Vec<(usize, Vec<WittScalar>)>,
}

impl ResidueEchelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent mod `p` of the vectors seen so far.
    pub fn insert(&mut self, w: &Witt, v: &[WittScalar]) -> bool {
        let mut v: Vec<WittScalar> = v.iter().map(|x| w.truncate(x, 1)).collect();
        for (piv, row) in &self.rows {
            if !w.is_zero(&v[*piv]) {
                let q = v[*piv].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x = w.sub(x, &w.mul(&q, y));
                }
            }
        }
        match v.iter().position(|x| !w.is_zero(x)) {
            None => false,
            Some(piv) => {
                let inv = w.invert(&v[piv]).expect("nonzero residue");
                let v: Vec<WittScalar> = v.iter().map(|x| w.mul(x, &inv)).collect();
                self.rows.push((piv, v));
                true
            }
        }
    }
}

/// Smith form `U A V = diag(p^{e_1}, ..., p^{e_d})` over `W(k)`, with the
/// inverses of both transformations.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: RingMatrix<WittScalar>,
    pub u_inv: RingMatrix<WittScalar>,
    pub v: RingMatrix<WittScalar>,
    pub v_inv: RingMatrix<WittScalar>,
    /// `None` for a diagonal entry that vanishes at precision.
    pub exps: Vec<Option<u32>>,
}

pub fn smith_form(w: &Witt, a: &RingMatrix<WittScalar>) -> Result<Smith> {
    if !a.is_square() || a.denom_exp != 0 {
        return Err(Error::Shape("Smith form needs a square integral matrix".into()));
    }
    let d = a.rows();
    let mut m = a.to_rows();
    let id = RingMatrix::identity(w, d);
    let (mut u, mut u_inv, mut v, mut v_inv) = (id.to_rows(), id.to_rows(), id.to_rows(), id.to_rows());
    let mut exps = vec![None; d];
    for k in 0..d {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if !w.is_zero(x) {
                    let val = w.valuation(x);
                    if best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };
        m.swap(k, pi);
        u.swap(k, pi);
        swap_cols(&mut u_inv, k, pi);
        swap_cols(&mut m, k, pj);
        swap_cols(&mut v, k, pj);
        v_inv.swap(k, pj);
        // normalize the pivot to exactly p^val
        let unit = w.div_p_pow(&m[k][k], val)?;
        let unit_inv = w.invert(&unit)?;
        for x in m[k].iter_mut().chain(u[k].iter_mut()) {
            *x = w.mul(x, &unit_inv);
        }
        for row in u_inv.iter_mut() {
            row[k] = w.mul(&row[k], &unit);
        }
        for i in k + 1..d {
            if w.is_zero(&m[i][k]) {
                continue;
            }
            let q = w.div_p_pow(&m[i][k], val)?;
            let (mk, uk) = (m[k].clone(), u[k].clone());
            row_axpy(w, &mut m[i], &q, &mk);
            row_axpy(w, &mut u[i], &q, &uk);
            // U^{-1} <- U^{-1} L^{-1}: column k += q column i
            for row in u_inv.iter_mut() {
                row[k] = w.add(&row[k], &w.mul(&q, &row[i]));
            }
        }
        for j in k + 1..d {
            if w.is_zero(&m[k][j]) {
                continue;
            }
            let q = w.div_p_pow(&m[k][j], val)?;
            for row in m.iter_mut().chain(v.iter_mut()) {
                let t = w.mul(&q, &row[k]);
                row[j] = w.sub(&row[j], &t);
            }
            let vk = v_inv[j].clone();
            let qk: Vec<WittScalar> = vk.iter().map(|x| w.mul(&q, x)).collect();
            v_inv[k] = v_inv[k].iter().zip(&qk).map(|(x, y)| w.add(x, y)).collect();
        }
        exps[k] = Some(val);
    }
    let mk = |rows: Vec<Vec<WittScalar>>| RingMatrix::from_rows(rows).expect("square");
    Ok(Smith { u: mk(u), u_inv: mk(u_inv), v: mk(v), v_inv: mk(v_inv), exps })
}

fn swap_cols(m: &mut [Vec<WittScalar>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `x <- x - q y`.
fn row_axpy(w: &Witt, x: &mut [WittScalar], q: &WittScalar, y: &[WittScalar]) {
    for (a, b) in x.iter_mut().zip(y) {
        *a = w.sub(a, &w.mul(q, b));
    }
}

/// `p^r A^{-1}` for `A` over `W(k)` invertible after inverting `p`; fails when
/// some elementary divisor exceeds `p^r`.
pub fn scaled_inverse(w: &Witt, a: &RingMatrix<WittScalar>, r: u32) -> Result<RingMatrix<WittScalar>> {
    let s = smith_form(w, a)?;
    // A = U^{-1} D V^{-1}, so p^r A^{-1} = V p^r D^{-1} U
    let d = a.rows();
    let mut diag = Vec::with_capacity(d);
    for e in &s.exps {
        match e {
            Some(e) if *e <= r => diag.push(w.mul_p_pow(&w.one(), r - e)),
            _ => return Err(Error::A0NotScaledIntegral),
        }
    }
    RingMatrix::diagonal(w, &diag).mul(w, &s.u).and_then(|m| s.v.mul(w, &m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::AmbientParams;
    use crate::pd::Pd;
    use crate::sigma::Sigma;
    use proptest::prelude::*;

    fn rings() -> (Witt, Sigma, Pd) {
        let params = AmbientParams::new(3, 2, 6).unwrap();
        let w = Witt::new(&params).unwrap();
        let s = Sigma::new(&params, &w);
        let pd = Pd::new(&params, &w, &s);
        (w, s, pd)
    }

    #[test]
    fn invert_examples() {
        let (w, _, pd) = rings();
        let id = RingMatrix::identity(&pd, 2);
        assert_eq!(id.invert(&pd).unwrap(), id);
        let g1 = pd.gamma(1);
        let a = RingMatrix::from_rows(vec![vec![pd.one(), g1.clone()], vec![pd.zero(), pd.one()]]).unwrap();
        let expect = RingMatrix::from_rows(vec![vec![pd.one(), pd.neg(&g1)], vec![pd.zero(), pd.one()]]).unwrap();
        assert!(a.invert(&pd).unwrap().eq_at_prec(&pd, &expect));
        let swap = RingMatrix::from_ints(&w, &[&[0, 1], &[1, 0]]);
        assert_eq!(swap.invert(&w).unwrap(), swap);
        let sing = RingMatrix::from_ints(&w, &[&[3, 1], &[0, 3]]);
        assert_eq!(sing.invert(&w), Err(Error::NotInvertible));
    }

    #[test]
    fn chain_examples() {
        let (w, _, _) = rings();
        let a = RingMatrix::from_ints(&w, &[&[1, 2], &[3, 4]]);
        assert_eq!(a.twisted_chain(&w, 0).unwrap(), a);
        let cube = a.mul(&w, &a).unwrap().mul(&w, &a).unwrap();
        assert_eq!(a.twisted_chain(&w, 2).unwrap(), cube);
        let d = RingMatrix::from_ints(&w, &[&[3, 0], &[0, 1]]);
        assert_eq!(d.twisted_chain(&w, 1).unwrap(), RingMatrix::from_ints(&w, &[&[9, 0], &[0, 1]]));
    }

    #[test]
    fn zero_test_examples() {
        let (w, _, _) = rings();
        let p_id = RingMatrix::from_ints(&w, &[&[3, 0], &[0, 3]]);
        assert_eq!(p_id.converges_to_zero(&w, 6, 12), Verdict::ZeroAtPrecision(5));
        let id = RingMatrix::identity(&w, 2);
        assert!(!id.converges_to_zero(&w, 6, 12).is_zero());
        // [[0, p^r], [1, 0]]^2 = p^r I
        let swap = RingMatrix::from_ints(&w, &[&[0, 9], &[1, 0]]);
        assert_eq!(swap.twisted_chain(&w, 1).unwrap(), RingMatrix::from_ints(&w, &[&[9, 0], &[0, 9]]));
        assert_eq!(swap.converges_to_zero(&w, 6, 12), Verdict::ZeroAtPrecision(5));
    }

    #[test]
    fn smith_and_scaled_inverse() {
        let (w, _, _) = rings();
        let a = RingMatrix::from_ints(&w, &[&[3, 1], &[0, 9]]);
        let s = smith_form(&w, &a).unwrap();
        let diag = s.u.mul(&w, &a).unwrap().mul(&w, &s.v).unwrap();
        assert_eq!(s.exps.iter().map(|e| e.unwrap()).sum::<u32>(), 3);
        assert!(diag.eq_at_prec(&w, &RingMatrix::diagonal(&w, &[w.from_int(1), w.from_int(27)])));
        let id = RingMatrix::identity(&w, 2);
        assert!(s.u.mul(&w, &s.u_inv).unwrap().eq_at_prec(&w, &id));
        assert!(s.v.mul(&w, &s.v_inv).unwrap().eq_at_prec(&w, &id));
        let v = scaled_inverse(&w, &a, 3).unwrap();
        let p3 = RingMatrix::diagonal(&w, &[w.from_int(27), w.from_int(27)]);
        assert!(a.mul(&w, &v).unwrap().eq_at_prec(&w, &p3));
        assert_eq!(scaled_inverse(&w, &a, 1), Err(Error::A0NotScaledIntegral));
    }

    #[test]
    fn adjugate_identity() {
        let (_, s, _) = rings();
        let a = RingMatrix::from_rows(vec![
            vec![s.from_ints(&[1, 2]), s.from_ints(&[0, 0, 1]), s.from_ints(&[3])],
            vec![s.from_ints(&[2]), s.from_ints(&[-3, 1]), s.from_ints(&[0, 5])],
            vec![s.from_ints(&[0, 1]), s.from_ints(&[1]), s.from_ints(&[1, 1, 1])],
        ])
        .unwrap();
        let det = a.det(&s).unwrap();
        let lhs = a.mul(&s, &a.adjugate(&s).unwrap()).unwrap();
        assert!(lhs.eq_at_prec(&s, &RingMatrix::diagonal(&s, &[det.clone(), det.clone(), det])));
    }

    proptest! {
        #[test]
        fn newton_inverse_over_sigma(cs in proptest::collection::vec(-20i64..20, 12), d0 in 1i64..3) {
            let (_, s, _) = rings();
            let e = |k: usize| s.from_ints(&cs[3 * k..3 * k + 3]);
            let mut a = RingMatrix::from_fn(2, 2, |i, j| e(2 * i + j));
            let shift = |x: &crate::sigma::SigmaSeries| s.mul_p_pow(&s.mul(x, &s.u()), 0);
            for i in 0..2 {
                for j in 0..2 {
                    // residue matrix d0 I so the matrix is invertible
                    let base = if i == j { s.from_int(d0) } else { s.zero() };
                    a.set(i, j, s.add(&base, &shift(a.get(i, j))));
                }
            }
            let inv = a.invert(&s).unwrap();
            let id = RingMatrix::identity(&s, 2);
            prop_assert!(a.mul(&s, &inv).unwrap().eq_at_prec(&s, &id));
            prop_assert!(inv.mul(&s, &a).unwrap().eq_at_prec(&s, &id));
        }

        #[test]
        fn chain_splits(cs in proptest::collection::vec(-9i64..9, 4), m in 0usize..3, n in 0usize..3) {
            let params = AmbientParams::with_residue_degree(3, 2, 1, 6).unwrap();
            let w = Witt::new(&params).unwrap();
            let t = w.generator();
            let a = RingMatrix::from_fn(2, 2, |i, j| w.add(&w.from_int(cs[2 * i + j]), &w.mul_int(&t, (i + 2 * j) as i64)));
            let whole = a.twisted_chain(&w, m + n + 1).unwrap();
            let mut tail = a.twisted_chain(&w, n).unwrap();
            for _ in 0..=m {
                tail = tail.frobenius(&w);
            }
            let split = a.twisted_chain(&w, m).unwrap().mul(&w, &tail).unwrap();
            prop_assert!(whole.eq_at_prec(&w, &split));
        }
    }
}
