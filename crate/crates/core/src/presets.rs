//! Reference instances used by tests, configs and the experiment runner.

use nalgebra::{DMatrix, DVector};

use crate::instance::{scalar, InitialStateModel, InstanceParts, LqrInstance, NoiseModel, StateCostCheck};
use crate::linalg::symmetrize;

/// `T=1`, `A=B=Q_0=Q_1=R_0=1`, deterministic `x_0 = 1`.
pub fn one_step_scalar() -> LqrInstance {
    LqrInstance::new(InstanceParts {
        a: scalar(1.0),
        b: scalar(1.0),
        q: vec![scalar(1.0), scalar(1.0)],
        r: vec![scalar(1.0)],
        noise: NoiseModel::zero(1),
        init: InitialStateModel::point_mass(DVector::from_element(1, 1.0)),
        state_cost: StateCostCheck::Definite,
    })
    .expect("valid preset")
}

/// Scalar benchmark: `T=5`, `A=1`, `B=0.2`, `Q_t=0.2`, `Q_T=0.4`,
/// `R_t=0.1(t+1)`, `w_t ~ N(0, 0.1)`, `x_0 ~ N(0, 0.1)`.
pub fn scalar_five_step() -> LqrInstance {
    let horizon = 5;
    let mut q = vec![scalar(0.2); horizon];
    q.push(scalar(0.4));
    let r = (0..horizon).map(|t| scalar(0.1 * (t as f64 + 1.0))).collect();
    let sd = 0.1f64.sqrt();
    LqrInstance::new(InstanceParts {
        a: scalar(1.0),
        b: scalar(0.2),
        q,
        r,
        noise: NoiseModel::gaussian(scalar(1.0), sd),
        init: InitialStateModel::gaussian(DVector::zeros(1), scalar(1.0), sd),
        state_cost: StateCostCheck::Definite,
    })
    .expect("valid preset")
}

/// Four-state, two-input benchmark with `T=10` and nonzero initial mean.
///
/// The published state-cost matrix is not symmetric in its (0,2)/(2,0)
/// entries; only the symmetric part enters `xᵀQx`, so that is what is used.
/// Second arguments of `N(μ, ·)` are read as variances.
pub fn four_dim() -> LqrInstance {
    let a = DMatrix::from_row_slice(
        4,
        4,
        &[0.5, 0.05, 0.1, 0.2, 0.0, 0.2, 0.3, 0.1, 0.06, 0.1, 0.2, 0.4, 0.05, 0.2, 0.15, 0.1],
    );
    let b = DMatrix::from_row_slice(4, 2, &[-0.05, -0.01, -0.005, -0.01, -1.0, -0.01, -0.01, -0.9]);
    let q_raw = DMatrix::from_row_slice(
        4,
        4,
        &[1.0, 0.2, -0.005, 0.015, 0.2, 1.1, 0.15, 0.0, -0.05, 0.15, 0.9, -0.08, 0.015, 0.0, -0.08, 0.88],
    );
    let q = symmetrize(&q_raw);
    let r = DMatrix::from_row_slice(2, 2, &[0.4, -0.25, -0.25, 0.7]);
    let w_sd = DVector::from_vec(vec![0.1f64.sqrt(), 0.5f64.sqrt(), 0.2f64.sqrt(), 0.3f64.sqrt()]);
    let x_sd = DVector::from_vec(vec![0.1f64.sqrt(), 0.3f64.sqrt(), 1.0, 0.5f64.sqrt()]);
    let horizon = 10;
    LqrInstance::new(InstanceParts {
        a,
        b,
        q: vec![q; horizon + 1],
        r: vec![r; horizon],
        noise: NoiseModel::gaussian(DMatrix::from_diagonal(&w_sd), 1.0),
        init: InitialStateModel::gaussian(
            DVector::from_vec(vec![5.0, 2.0, 8.0, 5.0]),
            DMatrix::from_diagonal(&x_sd),
            1.0,
        ),
        state_cost: StateCostCheck::Definite,
    })
    .expect("valid preset")
}

/// Looks a preset up by its config name.
pub fn by_name(name: &str) -> Option<LqrInstance> {
    match name {
        "one-step-scalar" => Some(one_step_scalar()),
        "scalar-five-step" => Some(scalar_five_step()),
        "four-dim" => Some(four_dim()),
        _ => None,
    }
}

pub const NAMES: [&str; 3] = ["one-step-scalar", "scalar-five-step", "four-dim"];
