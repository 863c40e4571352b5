//! Qubit (`d = 2`) specializations: three-qubit Eggeling-Werner coordinates,
//! the LM/PT criteria, and the four-qubit block conditions.

use nalgebra::{DMatrix, Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use super::invariant::InvariantOperator;
use super::perm::Perm;

/// Tolerance used by [`check_lm_pt`].
pub const LM_PT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwParams {
    pub r_plus: f64,
    pub r_minus: f64,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

/// Reduced Eggeling-Werner coordinates of a real trace-one three-qubit
/// invariant state with `x12 = <(12)>`, `x13 = <(13)>`, `x23 = <(23)>`.
pub fn ew_params(x12: f64, x13: f64, x23: f64) -> EwParams {
    let r_plus = (x12 + x13 + x23) / 3.0;
    EwParams {
        r_plus,
        r_minus: 0.0,
        r0: 1.0 - r_plus,
        r1: (2.0 * x23 - x12 - x13) / 3.0,
        r2: (x12 - x13) / 3f64.sqrt(),
        r3: 0.0,
    }
}

/// Left-hand side of PT minus its bound: `<= 0` iff PT holds.
pub fn pt_excess(x: f64, y: f64, z: f64) -> f64 {
    (x * x + y * y + z * z) - 2.0 * (x * y + x * z + y * z) + 2.0 * (x + y + z) - 3.0
}

/// LM (`0 <= x + y + z <= 3`) and PT, each within [`LM_PT_TOL`].
pub fn check_lm_pt(x: f64, y: f64, z: f64) -> bool {
    let s = x + y + z;
    s >= -LM_PT_TOL && s <= 3.0 + LM_PT_TOL && pt_excess(x, y, z) <= LM_PT_TOL
}

/// Trace-one three-qubit invariant operator with the given transposition
/// expectations; 3-cycles follow from `id - (12) - (13) - (23) + (123) + (132) = 0`.
pub fn three_qubit_operator(x12: f64, x13: f64, x23: f64) -> InvariantOperator {
    let cyc = (x12 + x13 + x23 - 1.0) / 2.0;
    InvariantOperator::from_fn(3, 2, |p| match p.cycles().as_slice() {
        [] => 1.0,
        [c] if c.len() == 2 => match (c[0], c[1]) {
            (0, 1) => x12,
            (0, 2) => x13,
            _ => x23,
        },
        _ => cyc,
    })
    .expect("k = 3 is supported")
}

/// Pair order used for four-qubit inputs: `12, 13, 14, 23, 24, 34`.
pub const PAIRS4: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
/// Disjoint-pair products: `(12)(34), (13)(24), (14)(23)`.
pub const PRODUCTS4: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];

fn pair_slot(a: usize, b: usize) -> usize {
    let key = (a.min(b), a.max(b));
    PAIRS4.iter().position(|&p| p == key).unwrap()
}

fn product_slot(a: usize, b: usize) -> usize {
    let key = (a.min(b), a.max(b));
    PRODUCTS4.iter().position(|pp| pp.contains(&key)).unwrap()
}

/// Full `S_4` expectations of a trace-one real four-qubit invariant
/// operator from its six pair and three product expectations.
pub fn derive_full_s4(pairs: &[f64; 6], products: &[f64; 3]) -> InvariantOperator {
    InvariantOperator::from_fn(4, 2, |p| {
        let cs = p.cycles();
        match cs.as_slice() {
            [] => 1.0,
            [c] if c.len() == 2 => pairs[pair_slot(c[0], c[1])],
            [c, _] => products[product_slot(c[0], c[1])],
            [c] if c.len() == 3 => {
                let (i, j, k) = (c[0], c[1], c[2]);
                (pairs[pair_slot(i, j)] + pairs[pair_slot(i, k)] + pairs[pair_slot(j, k)] - 1.0) / 2.0
            }
            _ => {
                // 4-cycle a -> b -> c -> d -> a.
                let a = 0;
                let b = p.apply(a);
                let c = p.apply(b);
                let d = p.apply(c);
                0.5 * (-1.0 + pairs[pair_slot(a, c)] + pairs[pair_slot(b, d)] + products[product_slot(a, b)]
                    + products[product_slot(a, d)]
                    - products[product_slot(a, c)])
            }
        }
    })
    .expect("k = 4 is supported")
}

/// Affine form `constant + sum coef[v] * var[v]` over the nine four-qubit
/// variables (six pairs in [`PAIRS4`] order, then three products).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine9 {
    pub constant: f64,
    pub coef: [f64; 9],
}

impl Affine9 {
    const fn new(constant: f64, coef: [f64; 9]) -> Self {
        Self { constant, coef }
    }

    fn scaled(self, s: f64) -> Self {
        let mut coef = self.coef;
        for c in &mut coef {
            *c *= s;
        }
        Self::new(self.constant * s, coef)
    }

    fn add(self, o: Self, s: f64) -> Self {
        let mut coef = self.coef;
        for (c, d) in coef.iter_mut().zip(o.coef) {
            *c += s * d;
        }
        Self::new(self.constant + s * o.constant, coef)
    }

    pub fn eval(&self, pairs: &[f64; 6], products: &[f64; 3]) -> f64 {
        let vars = pairs.iter().chain(products);
        self.constant + self.coef.iter().zip(vars).map(|(c, v)| c * v).sum::<f64>()
    }
}

/// The three four-qubit block conditions as affine forms.
#[derive(Debug, Clone)]
pub struct FourQubitForms {
    /// Partition `[4]`: a scalar that must be nonnegative.
    pub sym: Affine9,
    /// Partition `[3,1]`: symmetric 3x3 block, `a[i][j]` for `i <= j`.
    pub a: [[Affine9; 3]; 3],
    /// Partition `[2,2]`: symmetric 2x2 block.
    pub b: [[Affine9; 2]; 2],
    /// `(b0, b1, b2)` with `B = [[b0 + b1, b2], [b2, b0 - b1]]`; `B >= 0`
    /// iff `b1^2 + b2^2 <= b0^2` and `b0 >= |b1|`.
    pub bloch: [Affine9; 3],
}

pub fn fourqubit_forms() -> FourQubitForms {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let sym = Affine9::new(-3.0, [2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 1.0, 1.0, 1.0]);
    //                       x12   x13   x14   x23   x24   x34   p1    p2    p3
    let a00 = Affine9::new(3.0, [2.0, 2.0, -2.0, 2.0, -2.0, -2.0, -1.0, -1.0, -1.0]).scaled(2.0 / 3.0);
    let a01 = Affine9::new(0.0, [-2.0, 1.0, -1.0, 1.0, -1.0, 2.0, 4.0, -2.0, -2.0]).scaled(s2 / 3.0);
    let a02 = Affine9::new(0.0, [0.0, -1.0, -1.0, 1.0, 1.0, 0.0, 0.0, 2.0, -2.0]).scaled(s6 / 3.0);
    let a11 = Affine9::new(3.0, [1.0, -2.0, 2.0, -2.0, 2.0, -1.0, 1.0, -2.0, -2.0]).scaled(2.0 / 3.0);
    let a12 = Affine9::new(0.0, [0.0, -1.0, -1.0, 1.0, 1.0, 0.0, 0.0, -1.0, 1.0]).scaled(2.0 / s3);
    let a22 = Affine9::new(1.0, [-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0]).scaled(2.0);
    let b00 = Affine9::new(3.0, [1.0, -2.0, -2.0, -2.0, -2.0, 1.0, -1.0, 2.0, 2.0]);
    let b01 = Affine9::new(0.0, [0.0, -1.0, 1.0, 1.0, -1.0, 0.0, 0.0, 1.0, -1.0]).scaled(s3);
    let b11 = Affine9::new(1.0, [-1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0]).scaled(3.0);
    let bloch = [b00.add(b11, 1.0).scaled(0.5), b00.add(b11, -1.0).scaled(0.5), b01];
    FourQubitForms {
        sym,
        a: [[a00, a01, a02], [a01, a11, a12], [a02, a12, a22]],
        b: [[b00, b01], [b01, b11]],
        bloch,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourQubitBlocks {
    pub sym: f64,
    pub a: Matrix3<f64>,
    pub b: Matrix2<f64>,
    pub bloch: [f64; 3],
}

impl FourQubitBlocks {
    /// All three conditions hold within `tol`.
    pub fn feasible(&self, tol: f64) -> bool {
        let [b0, b1, b2] = self.bloch;
        let a = DMatrix::from_iterator(3, 3, self.a.iter().copied());
        self.sym >= -tol
            && super::invariant::min_eigenvalue(&a) >= -tol
            && b0 + b1 >= -tol
            && b0 - b1 >= -tol
            && (b1 * b1 + b2 * b2).sqrt() <= b0 + tol
    }
}

pub fn fourqubit_blocks(pairs: &[f64; 6], products: &[f64; 3]) -> FourQubitBlocks {
    let f = fourqubit_forms();
    let e = |a: &Affine9| a.eval(pairs, products);
    FourQubitBlocks {
        sym: e(&f.sym),
        a: Matrix3::from_fn(|i, j| e(&f.a[i][j])),
        b: Matrix2::from_fn(|i, j| e(&f.b[i][j])),
        bloch: [e(&f.bloch[0]), e(&f.bloch[1]), e(&f.bloch[2])],
    }
}

/// Expectations `<(ij)>` and `<(ij)(kl)>` of an explicit 16x16 operator.
pub fn fourqubit_moments(a: &DMatrix<f64>) -> ([f64; 6], [f64; 3]) {
    let op = InvariantOperator::from_matrix(4, 2, a).expect("16x16 input");
    let pairs = PAIRS4.map(|(i, j)| op.get(&Perm::transposition(4, i, j)));
    let products = PRODUCTS4.map(|[(a, b), (c, d)]| {
        op.get(&Perm::from_cycles(4, &[&[a, b], &[c, d]]).unwrap())
    });
    (pairs, products)
}
