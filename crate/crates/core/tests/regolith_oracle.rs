//! Force model checked against frozen high-precision reference values and an
//! independent log-space evaluation.

use bucketwheel::dynamics::WheelConfig;
use bucketwheel::regolith::{
    clay_force, sand_force, total_resistive_force, CutState, CuttingModel, SoilProperties,
};
use proptest::prelude::*;

include!("oracles/regolith_values.rs");

const REL_TOL: f64 = 1e-9;

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn table_soil() -> SoilProperties {
    SoilProperties::default()
}

fn table_cut() -> CutState {
    CutState {
        blade_width: 0.0631,
        tool_length: 0.05,
        cut_depth: 0.01,
        rake_angle: 10f64.to_radians(),
        cutting_speed: 0.12,
    }
}

fn point(p: &[f64; 10]) -> (SoilProperties, CutState) {
    let soil = SoilProperties {
        density: p[0],
        gravity: p[1],
        cohesion: p[2],
        ..Default::default()
    };
    let cut = CutState {
        blade_width: p[3],
        tool_length: p[4],
        cut_depth: p[5],
        rake_angle: p[6],
        cutting_speed: p[7],
    };
    (soil, cut)
}

#[test]
fn reference_soil_golden_values() {
    let f = total_resistive_force(&table_soil(), &table_cut()).unwrap();
    assert!(
        rel_err(f.f_sand, SAND_GOLDEN) < REL_TOL,
        "{} vs {SAND_GOLDEN}",
        f.f_sand
    );
    assert!(
        rel_err(f.f_clay, CLAY_GOLDEN) < REL_TOL,
        "{} vs {CLAY_GOLDEN}",
        f.f_clay
    );
    assert_eq!(f.f_total, f.f_sand + f.f_clay);
}

#[test]
fn random_points_match_reference() {
    assert!(RANDOM_POINTS.len() >= 20);
    for (i, p) in RANDOM_POINTS.iter().enumerate() {
        let (soil, cut) = point(p);
        let sand = sand_force(&soil, &cut).unwrap();
        let clay = clay_force(&soil, &cut).unwrap();
        assert!(
            rel_err(sand, p[8]) < REL_TOL,
            "point {i}: sand {sand} vs {}",
            p[8]
        );
        assert!(
            rel_err(clay, p[9]) < REL_TOL,
            "point {i}: clay {clay} vs {}",
            p[9]
        );
    }
}

#[test]
fn cutting_model_matches_reference() {
    for (i, p) in RANDOM_POINTS.iter().enumerate() {
        let (soil, cut) = point(p);
        let wheel = WheelConfig {
            blade_width: cut.blade_width,
            tool_length: cut.tool_length,
            rake_angle: cut.rake_angle,
            ..Default::default()
        };
        let f = CuttingModel::new(&soil, &wheel)
            .unwrap()
            .forces(cut.cut_depth, cut.cutting_speed);
        assert!(rel_err(f.f_sand, p[8]) < REL_TOL, "point {i}");
        assert!(rel_err(f.f_clay, p[9]) < REL_TOL, "point {i}");
    }
}

/// Same terms assembled as sums of logarithms.
fn log_space(soil: &SoilProperties, cut: &CutState) -> (f64, f64) {
    let (rho, g, c) = (soil.density, soil.gravity, soil.cohesion);
    let (w, l, d, v) = (
        cut.blade_width,
        cut.tool_length,
        cut.cut_depth,
        cut.cutting_speed,
    );
    let b = cut.rake_angle.abs();
    let ln_base = rho.ln() + g.ln() + w.ln() + 1.5 * l.ln() + 0.5 * d.ln();
    let ln_rel = d.ln() - l.ln() - b.sin().ln();
    let froude = v * v / (g * l);
    let sand = (ln_base + 1.73 * b.ln() + 0.77 * ln_rel).exp()
        * (1.05 * (1.11 * (d.ln() - w.ln())).exp() + 1.26 * froude + 3.91);
    let cohesive = if c == 0.0 || v == 0.0 {
        0.0
    } else {
        (1.21 * ((11.5 * c).ln() - rho.ln() - g.ln() - d.ln())
            + 0.121 * ((2.0 * v).ln() - (3.0 * w).ln()))
        .exp()
            * (0.055 * (0.78 * (d.ln() - w.ln())).exp() + 0.065)
    };
    let clay = (ln_base + 1.15 * b.ln() + 1.21 * ln_rel).exp() * (cohesive + 0.64 * froude);
    (sand, clay)
}

fn arb_case() -> impl Strategy<Value = (SoilProperties, CutState)> {
    (
        800.0..3000.0f64,
        1e-4..10.0f64,
        prop_oneof![Just(0.0), 0.0..2000.0f64],
        0.01..0.5f64,
        0.01..0.5f64,
        1e-4..0.2f64,
        prop_oneof![0.02..1.5f64, -1.5..-0.02f64],
        0.0..2.0f64,
    )
        .prop_map(|(rho, g, c, w, l, d, beta, v)| point(&[rho, g, c, w, l, d, beta, v, 0.0, 0.0]))
}

proptest! {
    #[test]
    fn agrees_with_log_space_evaluation((soil, cut) in arb_case()) {
        let (sand, clay) = log_space(&soil, &cut);
        prop_assert!(rel_err(sand_force(&soil, &cut).unwrap(), sand) < 1e-10);
        prop_assert!(rel_err(clay_force(&soil, &cut).unwrap(), clay) < 1e-10);
    }

    #[test]
    fn forces_are_non_negative((soil, cut) in arb_case()) {
        prop_assert!(sand_force(&soil, &cut).unwrap() >= 0.0);
        prop_assert!(clay_force(&soil, &cut).unwrap() >= 0.0);
    }

    #[test]
    fn sand_grows_with_depth((soil, cut) in arb_case(), scale in 1.01..3.0f64) {
        let deeper = CutState { cut_depth: cut.cut_depth * scale, ..cut };
        prop_assert!(sand_force(&soil, &deeper).unwrap() > sand_force(&soil, &cut).unwrap());
    }

    #[test]
    fn both_grow_with_speed((soil, cut) in arb_case(), dv in 0.01..1.0f64) {
        let faster = CutState { cutting_speed: cut.cutting_speed + dv, ..cut };
        prop_assert!(sand_force(&soil, &faster).unwrap() > sand_force(&soil, &cut).unwrap());
        prop_assert!(clay_force(&soil, &faster).unwrap() > clay_force(&soil, &cut).unwrap());
    }

    #[test]
    fn rake_sign_does_not_matter((soil, cut) in arb_case()) {
        let flipped = CutState { rake_angle: -cut.rake_angle, ..cut };
        prop_assert_eq!(sand_force(&soil, &cut).unwrap(), sand_force(&soil, &flipped).unwrap());
        prop_assert_eq!(clay_force(&soil, &cut).unwrap(), clay_force(&soil, &flipped).unwrap());
    }
}
