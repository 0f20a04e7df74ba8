//! Tabulated state-action values on uniform grids over `[−1, 1]`.

use std::io::Write;

use lqrlab_core::{LqrInstance, RiccatiSolution};

use crate::error::BaselineError;

/// `q_t(x, u)` for `t = 0..=T`, stored row-major by `(t, state bin, action bin)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    horizon: usize,
    n_s: usize,
    n_a: usize,
    values: Vec<f64>,
}

/// Bin index of `v` on `n` uniform bins over `[−1, 1]`, and whether `v` had
/// to be clamped into the grid.
pub fn bin_of(v: f64, n: usize) -> (usize, bool) {
    let outside = !(-1.0..=1.0).contains(&v);
    let pos = ((v.clamp(-1.0, 1.0) + 1.0) / 2.0 * n as f64).floor();
    ((pos as usize).min(n - 1), outside)
}

pub fn bin_center(i: usize, n: usize) -> f64 {
    -1.0 + (2.0 * i as f64 + 1.0) / n as f64
}

pub(crate) fn check_scalar(inst: &LqrInstance) -> Result<(), BaselineError> {
    let (d, k) = (inst.state_dim(), inst.control_dim());
    if d != 1 || k != 1 {
        return Err(BaselineError::NotScalar { d, k });
    }
    Ok(())
}

impl QTable {
    /// Zero stage layers and terminal layer `x²Q_T`.
    pub fn new(inst: &LqrInstance, n_s: usize, n_a: usize) -> Result<Self, BaselineError> {
        check_scalar(inst)?;
        if n_s == 0 || n_a == 0 {
            return Err(BaselineError::EmptyGrid);
        }
        let horizon = inst.horizon();
        let mut table = Self { horizon, n_s, n_a, values: vec![0.0; (horizon + 1) * n_s * n_a] };
        let qt = inst.q(horizon)[(0, 0)];
        for i in 0..n_s {
            let x = bin_center(i, n_s);
            for j in 0..n_a {
                *table.get_mut(horizon, i, j) = x * x * qt;
            }
        }
        Ok(table)
    }

    /// Exact optimal values `Q_t x² + R_t u² + P_{t+1}((ax+bu)² + W) + Σ_{s>t+1} W·P_s`
    /// sampled at bin centers.
    pub fn from_riccati(
        inst: &LqrInstance,
        sol: &RiccatiSolution,
        n_s: usize,
        n_a: usize,
    ) -> Result<Self, BaselineError> {
        let mut table = Self::new(inst, n_s, n_a)?;
        let (a, b, w) = (inst.a()[(0, 0)], inst.b()[(0, 0)], inst.w()[(0, 0)]);
        let p: Vec<f64> = sol.p_star.iter().map(|m| m[(0, 0)]).collect();
        for t in 0..table.horizon {
            let tail: f64 = p[t + 2..].iter().map(|ps| w * ps).sum();
            let (qt, rt) = (inst.q(t)[(0, 0)], inst.r(t)[(0, 0)]);
            for i in 0..n_s {
                let x = bin_center(i, n_s);
                for j in 0..n_a {
                    let u = bin_center(j, n_a);
                    let next = a * x + b * u;
                    *table.get_mut(t, i, j) = qt * x * x + rt * u * u + p[t + 1] * (next * next + w) + tail;
                }
            }
        }
        Ok(table)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn state_bins(&self) -> usize {
        self.n_s
    }

    pub fn action_bins(&self) -> usize {
        self.n_a
    }

    fn index(&self, t: usize, i: usize, j: usize) -> usize {
        (t * self.n_s + i) * self.n_a + j
    }

    pub fn get(&self, t: usize, i: usize, j: usize) -> f64 {
        self.values[self.index(t, i, j)]
    }

    pub(crate) fn get_mut(&mut self, t: usize, i: usize, j: usize) -> &mut f64 {
        let k = self.index(t, i, j);
        &mut self.values[k]
    }

    /// Action values of state bin `i` at step `t`.
    pub fn row(&self, t: usize, i: usize) -> &[f64] {
        let k = self.index(t, i, 0);
        &self.values[k..k + self.n_a]
    }

    /// `min_u q_t(x_i, u)` for every state bin.
    pub fn row_minima(&self, t: usize) -> Vec<f64> {
        (0..self.n_s).map(|i| self.row(t, i).iter().copied().fold(f64::INFINITY, f64::min)).collect()
    }

    /// Greedy action bin; ties go to the center of smallest magnitude.
    pub fn greedy_action(&self, t: usize, i: usize) -> usize {
        let row = self.row(t, i);
        let mut best = 0;
        for j in 1..self.n_a {
            let (v, b) = (row[j], row[best]);
            let smaller = bin_center(j, self.n_a).abs() < bin_center(best, self.n_a).abs();
            if v < b || (v == b && smaller) {
                best = j;
            }
        }
        best
    }

    /// CSV with header `t,x_bin_center,u_bin_center,value`, terminal layer included.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BaselineError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x_bin_center", "u_bin_center", "value"])?;
        for t in 0..=self.horizon {
            for i in 0..self.n_s {
                for j in 0..self.n_a {
                    w.write_record([
                        t.to_string(),
                        bin_center(i, self.n_s).to_string(),
                        bin_center(j, self.n_a).to_string(),
                        self.get(t, i, j).to_string(),
                    ])?;
                }
            }
        }
        w.flush().map_err(|e| BaselineError::Csv(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lqrlab_core::presets::scalar_five_step;

    #[test]
    fn bins_and_centers() {
        assert_eq!(bin_of(-1.0, 4), (0, false));
        assert_eq!(bin_of(1.0, 4), (3, false));
        assert_eq!(bin_of(0.1, 4), (2, false));
        assert_eq!(bin_of(-3.0, 4), (0, true));
        assert_eq!(bin_of(1.5, 4), (3, true));
        assert_eq!(bin_center(0, 4), -0.75);
        assert_eq!(bin_center(2, 5), 0.0);
        for i in 0..7 {
            assert_eq!(bin_of(bin_center(i, 7), 7).0, i);
        }
    }

    #[test]
    fn terminal_layer() {
        let inst = scalar_five_step();
        let q = QTable::new(&inst, 10, 3).unwrap();
        let x = bin_center(9, 10);
        assert_eq!(q.get(5, 9, 1), x * x * 0.4);
        assert_eq!(q.get(0, 9, 1), 0.0);
    }

    #[test]
    fn ties_prefer_small_actions() {
        let inst = scalar_five_step();
        let q = QTable::new(&inst, 2, 5).unwrap();
        assert_eq!(q.greedy_action(0, 0), 2);
        let q = QTable::new(&inst, 2, 4).unwrap();
        assert_eq!(bin_center(q.greedy_action(0, 0), 4).abs(), 0.25);
    }

    #[test]
    fn csv_layout() {
        let q = QTable::new(&scalar_five_step(), 2, 3).unwrap();
        let mut buf = Vec::new();
        q.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 6 * 2 * 3);
        assert_eq!(text.lines().next().unwrap(), "t,x_bin_center,u_bin_center,value");
    }
}
