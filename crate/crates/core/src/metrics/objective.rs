use num_complex::Complex64;

use crate::geometry::axis_phases;
use crate::ris::{Layout, RisModel};

/// `A(x) / M^4` with `x = (Delta_x, Delta_y, Delta~_x, Delta~_y)` and its
/// gradient.
///
/// With 1-based grid coordinates the phasor sum is
/// `S = sum_e exp(j pi (m x0 + n x1 + m' x2 + n' x3))`, so
/// `dS/dx_i = j pi sum_e coord_i(e) term_e` and
/// `d|S|^2/dx_i = 2 Re(conj(S) dS/dx_i)`.
pub(crate) struct OffsetObjective {
    layout: Layout,
    full: f64,
}

impl OffsetObjective {
    pub fn new(model: &RisModel) -> Self {
        Self { layout: Layout::new(model.perm()), full: model.full_gain() }
    }

    pub fn m_side(&self) -> usize {
        self.layout.m_side
    }

    fn tables(&self, x: &[f64; 4]) -> [Vec<Complex64>; 4] {
        let m = self.layout.m_side;
        [0, 1, 2, 3].map(|i| axis_phases(m, x[i]))
    }

    pub fn value(&self, x: &[f64; 4]) -> f64 {
        let t = self.tables(x);
        let s: Complex64 = self
            .layout
            .src
            .iter()
            .zip(&self.layout.dst)
            .map(|(&(r, c), &(tr, tc))| t[0][r] * t[1][c] * (t[2][tr] * t[3][tc]))
            .sum();
        s.norm_sqr() / self.full
    }

    /// Unnormalized `A` and its gradient.
    pub fn raw_value_grad(&self, x: &[f64; 4]) -> (f64, [f64; 4]) {
        let t = self.tables(x);
        let mut s = Complex64::new(0.0, 0.0);
        let mut d = [Complex64::new(0.0, 0.0); 4];
        for (&(r, c), &(tr, tc)) in self.layout.src.iter().zip(&self.layout.dst) {
            let term = t[0][r] * t[1][c] * (t[2][tr] * t[3][tc]);
            s += term;
            d[0] += term * (r + 1) as f64;
            d[1] += term * (c + 1) as f64;
            d[2] += term * (tr + 1) as f64;
            d[3] += term * (tc + 1) as f64;
        }
        // 2 Re(conj(S) j pi D) = -2 pi Im(conj(S) D)
        let grad = d.map(|di| -2.0 * std::f64::consts::PI * (s.conj() * di).im);
        (s.norm_sqr(), grad)
    }

    pub fn value_grad(&self, x: &[f64; 4]) -> (f64, [f64; 4]) {
        let (v, g) = self.raw_value_grad(x);
        (v / self.full, g.map(|gi| gi / self.full))
    }
}
