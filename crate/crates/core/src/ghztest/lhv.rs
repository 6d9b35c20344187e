use std::collections::BTreeSet;

use serde::Serialize;

use crate::hilbert::Sign;

/// Six pre-existing ±1 values, one per atom and axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LhvAssignment {
    pub m_x: [i8; 3],
    pub m_y: [i8; 3],
}

impl LhvAssignment {
    /// All 64 assignments.
    pub fn all() -> Vec<LhvAssignment> {
        (0u8..64)
            .map(|bits| {
                let v = |k: u8| if bits >> k & 1 == 0 { 1 } else { -1 };
                LhvAssignment {
                    m_x: [v(0), v(1), v(2)],
                    m_y: [v(3), v(4), v(5)],
                }
            })
            .collect()
    }

    pub fn a(&self) -> i8 {
        self.m_x[0] * self.m_y[1] * self.m_y[2]
    }

    pub fn b(&self) -> i8 {
        self.m_y[0] * self.m_x[1] * self.m_y[2]
    }

    pub fn c(&self) -> i8 {
        self.m_y[0] * self.m_y[1] * self.m_x[2]
    }

    pub fn d(&self) -> i8 {
        self.m_x[0] * self.m_x[1] * self.m_x[2]
    }
}

/// Outcome of checking every assignment against the GHZ constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LhvScan {
    pub sign: Sign,
    /// Assignments with `a = b = c` equal to the quantum `A`, `B`, `C` eigenvalue.
    pub consistent: usize,
    /// Values of `m_x¹ m_x² m_x³` among the consistent assignments.
    pub products: BTreeSet<i8>,
    /// Whether any consistent assignment reproduces the quantum `D` eigenvalue.
    pub reaches_qm: bool,
}

pub fn lhv_scan(sign: Sign) -> LhvScan {
    let abc = -qm_prediction(sign);
    let products: Vec<i8> = LhvAssignment::all()
        .into_iter()
        .filter(|m| m.a() == abc && m.b() == abc && m.c() == abc)
        .map(|m| m.d())
        .collect();
    LhvScan {
        sign,
        consistent: products.len(),
        reaches_qm: products.contains(&qm_prediction(sign)),
        products: products.into_iter().collect(),
    }
}

/// Eigenvalue of `D` on the GHZ state of this sign.
pub fn qm_prediction(sign: Sign) -> i8 {
    match sign {
        Sign::Plus => 1,
        Sign::Minus => -1,
    }
}

/// Product forced by local realism, `d = abc`.
pub fn lhv_prediction(sign: Sign) -> i8 {
    -qm_prediction(sign)
}
