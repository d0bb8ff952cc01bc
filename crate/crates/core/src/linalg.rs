//! Exact elimination, rank, nullspace and proportionality fitting.

use serde::Serialize;

use crate::scalar::Field;

/// Max-modulus residual plus an exact zero flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    #[serde(skip)]
    pub exact_zero: bool,
}

impl Residual {
    pub fn of<F: Field>(entries: &[F]) -> Self {
        Residual {
            value: entries.iter().map(F::magnitude).fold(0.0, f64::max),
            exact_zero: entries.iter().all(F::is_structural_zero),
        }
    }

    pub fn zero() -> Self {
        Residual { value: 0.0, exact_zero: true }
    }

    pub fn max(self, o: Residual) -> Residual {
        Residual { value: self.value.max(o.value), exact_zero: self.exact_zero && o.exact_zero }
    }

    /// Exact zero in exact mode, at most `tol` in float mode.
    pub fn passes<F: Field>(&self, tol: f64) -> bool {
        if F::EXACT {
            self.exact_zero
        } else {
            self.value <= tol
        }
    }
}

/// Outcome of fitting lhs = c · rhs.
#[derive(Clone, Debug)]
pub enum Fit<F> {
    /// rhs is nonzero; c is read off at the largest rhs entry.
    Constant { c: F, residual: Residual },
    /// rhs vanishes; the residual is that of lhs alone.
    RhsZero { residual: Residual },
}

impl<F: Field> Fit<F> {
    pub fn residual(&self) -> Residual {
        match self {
            Fit::Constant { residual, .. } | Fit::RhsZero { residual } => *residual,
        }
    }

    pub fn constant(&self) -> Option<&F> {
        match self {
            Fit::Constant { c, .. } => Some(c),
            Fit::RhsZero { .. } => None,
        }
    }
}

/// Fits lhs = c · rhs entrywise.
pub fn fit<F: Field>(lhs: &[F], rhs: &[F]) -> Fit<F> {
    let pivot = rhs
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_structural_zero())
        .max_by(|a, b| a.1.magnitude().total_cmp(&b.1.magnitude()));
    match pivot {
        None => Fit::RhsZero { residual: Residual::of(lhs) },
        Some((k, r)) => {
            let c = lhs[k].div_ref(r).expect("pivot is nonzero");
            let diff: Vec<F> = lhs.iter().zip(rhs).map(|(l, r)| l.sub_ref(&c.mul_ref(r))).collect();
            Fit::Constant { residual: Residual::of(&diff), c }
        }
    }
}

/// A dense matrix as rows.
pub type Matrix<F> = Vec<Vec<F>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let candidate = if F::EXACT {
            (r..rows).find(|&k| !m[k][c].is_zero())
        } else {
            (r..rows)
                .max_by(|&a, &b| m[a][c].magnitude().total_cmp(&m[b][c].magnitude()))
                .filter(|&k| !m[k][c].is_zero())
        };
        let Some(k) = candidate else { continue };
        m.swap(r, k);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        for v in m[r].iter_mut() {
            *v = v.mul_ref(&inv);
        }
        let pivot_row = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k == r || row[c].is_structural_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_structural_zero() {
                    *v = v.sub_ref(&f.mul_ref(p));
                }
            }
            row[c] = F::zero();
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    rref(&mut m.clone()).len()
}

/// Basis of {x : M x = 0}, one vector per free column.
pub fn nullspace<F: Field>(m: &Matrix<F>, cols: usize) -> Vec<Vec<F>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = a[row][free].neg_ref();
        }
        out.push(v);
    }
    out
}

/// Inverse of a square matrix, if it exists.
pub fn invert<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    let n = m.len();
    let mut aug: Matrix<F> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(k, &p)| k != p) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Product of two dense matrices.
pub fn matmul<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(F::zero(), |acc, k| acc.add_ref(&row[k].mul_ref(&b[k][j]))))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn m(rows: &[&[&str]]) -> Matrix<Scalar> {
        rows.iter().map(|r| r.iter().map(|x| x.parse().unwrap()).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&["1", "2", "3"], &["2", "4", "6"], &["0", "1", "i"]]);
        assert_eq!(rank(&a), 2);
        let ker = nullspace(&a, 3);
        assert_eq!(ker.len(), 1);
        let prod = matmul(&a, &ker.iter().map(|v| vec![v[0].clone()]).collect::<Vec<_>>());
        assert_eq!(prod.len(), 3);
        for row in &a {
            let s = row.iter().zip(&ker[0]).fold(Scalar::zero(), |acc, (x, y)| acc + x * y);
            assert!(Field::is_zero(&s));
        }
    }

    #[test]
    fn inverse() {
        let a = m(&[&["1", "i"], &["r", "2"]]);
        let inv = invert(&a).unwrap();
        assert_eq!(matmul(&a, &inv), m(&[&["1", "0"], &["0", "1"]]));
        assert!(invert(&m(&[&["1", "2"], &["2", "4"]])).is_none());
    }

    #[test]
    fn fitting() {
        let rhs: Vec<Scalar> = ["1", "0", "2 i"].iter().map(|x| x.parse().unwrap()).collect();
        let lhs: Vec<Scalar> = rhs.iter().map(|x| x * &"1/2 r".parse().unwrap()).collect();
        let f = fit(&lhs, &rhs);
        assert_eq!(f.constant().unwrap().to_string(), "1/2 r");
        assert!(f.residual().exact_zero);
        let zero = vec![Scalar::zero(); 3];
        assert!(matches!(fit(&lhs, &zero), Fit::RhsZero { .. }));
    }
}
