use serde::{Deserialize, Serialize};

use super::DecompError;
use crate::matcore::{opnorm, MatC, C64, ZERO_FLOOR};

pub const DEFAULT_RADIUS: f64 = 1.5;
pub const START_NODES: usize = 64;
pub const MAX_NODES: usize = 4096;

/// Sylvester equation `d_left·b − b·d_right = rhs` where each `d` is a
/// contraction shifted by a real centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosenblumProblem {
    pub d_left: MatC,
    pub d_right: MatC,
    pub rhs: MatC,
    pub lambda_left: f64,
    pub lambda_right: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

fn default_radius() -> f64 {
    DEFAULT_RADIUS
}

fn default_nodes() -> usize {
    START_NODES
}

impl RosenblumProblem {
    pub fn new(d_left: MatC, d_right: MatC, rhs: MatC, lambda_left: f64, lambda_right: f64) -> Self {
        RosenblumProblem {
            d_left,
            d_right,
            rhs,
            lambda_left,
            lambda_right,
            radius: DEFAULT_RADIUS,
            nodes: START_NODES,
        }
    }

    pub fn validate(&self, tol: f64) -> Result<(), DecompError> {
        let m = self.rhs.dim();
        for d in [&self.d_left, &self.d_right, &self.rhs] {
            d.validate()?;
            d.ensure_dim(m)?;
        }
        if self.nodes == 0 || self.nodes > MAX_NODES || !(self.radius > 1.0) {
            return Err(DecompError::BadInput {
                detail: format!("need radius > 1 and 1 <= nodes <= {MAX_NODES}"),
            });
        }
        let id = MatC::identity(m);
        for (d, lam) in [(&self.d_left, self.lambda_left), (&self.d_right, self.lambda_right)] {
            let norm = opnorm(&(d - &id.scale_re(lam)));
            if norm > 1.0 + tol {
                return Err(DecompError::NotContraction { norm });
            }
        }
        let gap = (self.lambda_left - self.lambda_right).abs();
        if gap <= self.radius + 1.0 {
            return Err(DecompError::ContourSeparation {
                radius: self.radius,
                gap,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosenblumSolution {
    pub b: MatC,
    pub nodes_used: usize,
    /// Largest `‖(d_left − α)^{-1}‖` over the final quadrature nodes.
    pub max_resolvent_left: f64,
    pub max_resolvent_right: f64,
    /// Norm of the difference between the last two quadrature levels.
    pub last_change: f64,
}

/// Solves the Sylvester equation by the resolvent contour integral
/// `b = (1/2πi) ∮ (d_left − α)^{-1} rhs (d_right − α)^{-1} dα` over the
/// circle of the given radius around `lambda_left`.
///
/// Periodic trapezoid rule on the circle, doubling the node count from
/// `p.nodes` until successive values differ by less than `tol·‖rhs‖`.
pub fn rosenblum_solve(p: &RosenblumProblem, tol: f64) -> Result<RosenblumSolution, DecompError> {
    p.validate(tol)?;
    let m = p.rhs.dim();
    let rhs_norm = opnorm(&p.rhs);
    if rhs_norm <= ZERO_FLOOR {
        return Ok(RosenblumSolution {
            b: MatC::zeros(m),
            nodes_used: 0,
            max_resolvent_left: 0.0,
            max_resolvent_right: 0.0,
            last_change: 0.0,
        });
    }

    let id = MatC::identity(m);
    let mut max_left = 0.0f64;
    let mut max_right = 0.0f64;
    let node_sum = |theta: f64, max_left: &mut f64, max_right: &mut f64| -> Result<MatC, DecompError> {
        let e = C64::from_polar(1.0, theta);
        let alpha = C64::new(p.lambda_left, 0.0) + e * p.radius;
        let rl = (&p.d_left - &id.scale(alpha)).inverse()?;
        let rr = (&p.d_right - &id.scale(alpha)).inverse()?;
        *max_left = max_left.max(opnorm(&rl));
        *max_right = max_right.max(opnorm(&rr));
        Ok((&(&rl * &p.rhs) * &rr).scale(e))
    };

    // raw sum over nodes; the quadrature value is (radius / nodes) * sum
    let mut nodes = p.nodes;
    let mut sum = MatC::zeros(m);
    for k in 0..nodes {
        let theta = std::f64::consts::TAU * k as f64 / nodes as f64;
        sum += node_sum(theta, &mut max_left, &mut max_right)?;
    }
    let mut value = sum.scale_re(p.radius / nodes as f64);
    let mut change = f64::INFINITY;
    while nodes < MAX_NODES {
        // the doubled rule reuses every old node and adds the midpoints
        let fine = 2 * nodes;
        for k in 0..nodes {
            let theta = std::f64::consts::TAU * (2 * k + 1) as f64 / fine as f64;
            sum += node_sum(theta, &mut max_left, &mut max_right)?;
        }
        nodes = fine;
        let next = sum.scale_re(p.radius / nodes as f64);
        change = opnorm(&(&next - &value));
        value = next;
        if change < tol * rhs_norm {
            return Ok(RosenblumSolution {
                b: value,
                nodes_used: nodes,
                max_resolvent_left: max_left,
                max_resolvent_right: max_right,
                last_change: change,
            });
        }
    }
    Err(DecompError::QuadratureNonConvergence { nodes, change })
}
