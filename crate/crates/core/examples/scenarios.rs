//! Every synthetic scenario, its key=value form and a few sample moments.

use k2st::datagen::{RngState, ScenarioKind, ScenarioSpec, Sizes, JOINT_EPS, JOINT_RHO};
use k2st::Points;

fn mean(p: &Points, c: usize) -> f64 {
    p.rows().map(|r| r[c]).sum::<f64>() / p.len() as f64
}

fn main() -> k2st::Result<()> {
    let mut kinds = vec![ScenarioKind::NullGaussian { d: 10 }, ScenarioKind::NullT { df: 5.0, d: 10 }];
    for k in 1..=4 {
        kinds.push(ScenarioKind::alt_scenario(k, 10)?);
    }
    kinds.push(ScenarioKind::JointNull { d: 10, rho: JOINT_RHO, eps: JOINT_EPS });
    kinds.push(ScenarioKind::JointAlt { d: 10, rho: JOINT_RHO, eps: JOINT_EPS });
    kinds.push(ScenarioKind::RhoSweepAlt { d: 10, rho: 0.4, eps: JOINT_EPS });

    let state = RngState::new(1);
    for kind in kinds {
        let spec = ScenarioSpec::new(kind, Sizes::balanced(2000, 10))?;
        let s = spec.generate(&mut state.stream(0))?;
        println!(
            "{:<48} X dim {:>2}, V dim {:>2}; mean X1 {:+.3} Y1 {:+.3}; mean V1 {:+.3} W1 {:+.3}",
            spec.label(),
            s.x.dim(),
            s.v.dim(),
            mean(&s.x, 0),
            mean(&s.y, 0),
            mean(&s.v, 0),
            mean(&s.w, 0)
        );
    }

    let spec = ScenarioSpec::new(ScenarioKind::alt_scenario(2, 4)?, Sizes::new(50, 60, 500, 600))?;
    let kv: Vec<String> = spec.to_key_values().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("\nkey=value form: {}", kv.join(" "));
    Ok(())
}
