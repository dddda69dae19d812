//! Small symbolic matrix algebra on expression trees.

use alloc::vec::Vec;

use crate::fieldexpr::ExprAst;

pub(crate) type AstMatrix = Vec<Vec<ExprAst>>;

fn minor(m: &AstMatrix, row: usize, col: usize) -> AstMatrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub(crate) fn det(m: &AstMatrix) -> ExprAst {
    match m.len() {
        0 => ExprAst::num(1.0),
        1 => m[0][0].clone(),
        2 => ExprAst::sub(
            ExprAst::mul(m[0][0].clone(), m[1][1].clone()),
            ExprAst::mul(m[0][1].clone(), m[1][0].clone()),
        ),
        n => {
            let mut acc = ExprAst::num(0.0);
            for j in 0..n {
                let term = ExprAst::mul(m[0][j].clone(), det(&minor(m, 0, j)));
                acc = if j % 2 == 0 { ExprAst::add(acc, term) } else { ExprAst::sub(acc, term) };
            }
            acc
        }
    }
}

/// `adj(m)`, so that `m⁻¹ = adj(m) / det(m)`.
pub(crate) fn adjugate(m: &AstMatrix) -> AstMatrix {
    let n = m.len();
    if n == 1 {
        return alloc::vec![alloc::vec![ExprAst::num(1.0)]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // adj_ij is the (j, i) cofactor
                    let c = det(&minor(m, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        ExprAst::neg(c)
                    }
                })
                .collect()
        })
        .collect()
}

/// `m v` for a column of trees.
pub(crate) fn mul_vec(m: &AstMatrix, v: &[ExprAst]) -> Vec<ExprAst> {
    m.iter()
        .map(|row| ExprAst::sum(row.iter().zip(v).map(|(a, b)| ExprAst::mul(a.clone(), b.clone()))))
        .collect()
}

pub(crate) fn dot(a: &[ExprAst], b: &[ExprAst]) -> ExprAst {
    ExprAst::sum(a.iter().zip(b).map(|(x, y)| ExprAst::mul(x.clone(), y.clone())))
}
