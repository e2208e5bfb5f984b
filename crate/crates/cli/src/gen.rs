//! Seeded instance generators. Every instance is written in the input
//! format of the command that consumes it.

use cforge_core::commdecomp::{BoundCheck, FackTower};
use cforge_core::cucompare::{rank_vectors, TraceWeight};
use cforge_core::dhsdet::exp_product_path;
use cforge_core::matcore::{her_compress, opnorm, support_projection, AlgebraShape, MatC};
use cforge_core::random::InstanceRng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{to_value, Body, CliError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum GenKind {
    TraceZero,
    SquareZeroPair,
    UnitaryPath,
    FackTower,
    CuInstance,
}

pub(crate) fn generate(config: &RunConfig) -> Result<Body, CliError> {
    let mut rng = InstanceRng::new(config.seed);
    match config.kind.expect("validated") {
        GenKind::TraceZero => {
            let n = config.n.unwrap_or(4);
            if n == 0 {
                return Err(CliError::input("trace_zero needs n >= 1"));
            }
            let h = rng.trace_zero(n);
            let checks = vec![BoundCheck::upper("trace", 1e-14, h.trace().norm())];
            Ok(body(json!({ "h": to_value(&h) }), checks))
        }
        GenKind::SquareZeroPair => {
            let n = config.n.unwrap_or(4);
            if n < 2 {
                return Err(CliError::input("square_zero_pair needs n >= 2"));
            }
            let a = rng.square_zero(n);
            let b = rng.square_zero(n);
            let checks = vec![
                BoundCheck::upper("a squares to zero", 1e-12, opnorm(&(&a * &a))),
                BoundCheck::upper("b squares to zero", 1e-12, opnorm(&(&b * &b))),
            ];
            Ok(body(json!({ "a": to_value(&a), "b": to_value(&b) }), checks))
        }
        GenKind::UnitaryPath => {
            let n = config.n.unwrap_or(3);
            let m = config.big_n.unwrap_or(2);
            let samples = config.grid.unwrap_or(32);
            if n == 0 || m == 0 || samples == 0 {
                return Err(CliError::input("unitary_path needs n, N and grid >= 1"));
            }
            // spread the spectrum over a few turns so the path winds
            let h_list: Vec<MatC> = (0..m).map(|_| rng.hermitian(n).scale_re(4.0)).collect();
            let path = exp_product_path(&h_list, samples)?;
            Ok(body(
                json!({ "h_list": to_value(&h_list), "samples": samples, "path": to_value(&path) }),
                Vec::new(),
            ))
        }
        GenKind::FackTower => {
            let dim = config.n.unwrap_or(64);
            let depth = config.depth.unwrap_or(4);
            let l = config.l.unwrap_or(2);
            let tower = FackTower::build(dim, depth, l, &mut rng, 1e-9)?;
            let deviation = tower.verify(1e-9)?;
            let h = if tower.entry.is_some() {
                rng.trace_zero(dim)
            } else {
                let e = &tower.blocks[0];
                let c = her_compress(e, &rng.matrix(dim))?;
                let p = support_projection(e)?;
                &c - &p.scale(c.trace() / p.trace().re)
            };
            let checks = vec![BoundCheck::upper("orthogonality and witnesses", 1e-8, deviation)];
            Ok(body(json!({ "h": to_value(&h), "tower": to_value(&tower) }), checks))
        }
        GenKind::CuInstance => {
            let n = config.n.unwrap_or(3);
            let blocks = config.depth.unwrap_or(2);
            if n == 0 || blocks == 0 {
                return Err(CliError::input("cu_instance needs n and depth >= 1"));
            }
            let shape = AlgebraShape::new(vec![n; blocks], 1)?;
            let mut a_blocks = Vec::with_capacity(blocks);
            let mut b_blocks = Vec::with_capacity(blocks);
            for _ in 0..blocks {
                let rb = rng.index(n + 1);
                let ra = rb / 2;
                a_blocks.push(rng.psd_of_rank(n, ra));
                b_blocks.push(rng.psd_of_rank(n, rb));
            }
            Ok(body(
                json!({
                    "shape": to_value(&shape),
                    "traces": to_value(&TraceWeight::extreme_points(blocks)),
                    "a": to_value(&MatC::block_diag(&a_blocks)),
                    "b": to_value(&MatC::block_diag(&b_blocks)),
                    "vectors": to_value(&rank_vectors(&shape.blocks, true)),
                }),
                Vec::new(),
            ))
        }
    }
}

fn body(report: serde_json::Value, checks: Vec<BoundCheck>) -> Body {
    Body {
        report,
        checks,
        reconstruction_residual: None,
    }
}
