mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svwb_core::balance::{correct_image_svwb_with, correct_image_wb_with};
use svwb_core::color::{AdaptationModel, ModelKind};
use svwb_core::compare::compare_scene;
use svwb_core::estimation::{estimate_gray_world_with, region_mean};
use svwb_core::image::PixelCoord;
use svwb_core::synth::{
    field_gain, render_scene, render_scene_with, Chart, GainBlend, IlluminantField, Preset, SceneSpec, COOL_GAIN,
    WARM_GAIN,
};
use svwb_core::{Error, Execution};

fn two_source(blend: GainBlend, sources: [PixelCoord; 2]) -> IlluminantField {
    IlluminantField::TwoSourceBlend {
        gains: [WARM_GAIN, COOL_GAIN],
        sources,
        blend,
    }
}

#[test]
fn matches_naive_reference_on_random_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (i, kind) in ModelKind::ALL.into_iter().cycle().take(9).enumerate() {
        let img = common::random_image(&mut rng, 24, 20);
        let n = [1, 2, 5][i % 3];
        let anchors = common::random_anchors(&mut rng, n, 24, 20);
        let model = AdaptationModel::new(kind);
        let want = common::naive_svwb(&img, kind, &anchors);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let got = correct_image_svwb_with(&img, &model, &anchors, exec).unwrap();
            for (g, w) in got.pixels().iter().zip(&want) {
                assert!(common::max_abs_diff(g.to_array(), *w) <= 1e-12, "{kind} n={n}");
            }
        }
    }
}

#[test]
fn anchor_exactly_on_a_pixel_center_uses_its_own_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let img = common::random_image(&mut rng, 8, 8);
    let mut anchors = common::random_anchors(&mut rng, 3, 8, 8);
    anchors[1].coord = PixelCoord::pixel_center(2, 5);
    let got = correct_image_svwb_with(&img, &AdaptationModel::bradford(), &anchors, Execution::Sequential).unwrap();
    let want = common::naive_svwb(&img, ModelKind::Bradford, &anchors);
    let idx = 5 * 8 + 2;
    assert!(common::max_abs_diff(got.pixels()[idx].to_array(), want[idx]) <= 1e-12);
}

#[test]
fn execution_modes_agree_bitwise() {
    let scene = SceneSpec::preset(Preset::Mixed).build().unwrap();
    let model = AdaptationModel::bradford();
    let a = correct_image_svwb_with(&scene.observed, &model, &scene.true_anchors, Execution::Sequential).unwrap();
    let b = correct_image_svwb_with(&scene.observed, &model, &scene.true_anchors, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    let s = scene.true_anchors[0];
    let a = correct_image_wb_with(&scene.observed, &model, s.source, s.target, Execution::Sequential).unwrap();
    let b = correct_image_wb_with(&scene.observed, &model, s.source, s.target, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        estimate_gray_world_with(&scene.observed, Execution::Sequential).unwrap(),
        estimate_gray_world_with(&scene.observed, Execution::Parallel).unwrap()
    );
    let chart = Chart::default_chart(96, 64).unwrap();
    let field = two_source(GainBlend::Arithmetic, chart.default_white_coords().try_into().unwrap());
    let whites = chart.default_white_coords();
    let a = render_scene_with(&chart, &field, &whites, Execution::Sequential).unwrap();
    let b = render_scene_with(&chart, &field, &whites, Execution::Parallel).unwrap();
    assert_eq!(a.observed, b.observed);
}

#[test]
fn reciprocal_blend_is_recovered_exactly() {
    let scene = SceneSpec::preset(Preset::MixedExact).build().unwrap();
    let out = correct_image_svwb_with(
        &scene.observed,
        &AdaptationModel::xyz_scaling(),
        &scene.true_anchors,
        Execution::default(),
    )
    .unwrap();
    for (g, t) in out.pixels().iter().zip(scene.ground_truth.pixels()) {
        assert!(common::max_abs_diff(g.to_array(), t.to_array()) <= 1e-9);
    }
}

#[test]
fn white_coords_must_sit_on_white_patches() {
    let chart = Chart::default_chart(96, 64).unwrap();
    let field = IlluminantField::Uniform { gain: WARM_GAIN };
    let err = render_scene(&chart, &field, &[PixelCoord::new(1.0, 1.0)]).unwrap_err();
    assert!(matches!(err, Error::Config { ref field, .. } if field == "white_coords[0]"));
}

#[test]
fn scene_spec_rejects_unknown_fields() {
    let err = SceneSpec::from_json(r#"{"field": {"kind": "uniform", "gain": [1, 1, 1]}, "colour": 3}"#).unwrap_err();
    assert!(matches!(err, Error::Config { .. }));
    let err = SceneSpec::from_json(r#"{"field": {"kind": "uniform", "gain": [1, 0, 1]}}"#)
        .unwrap()
        .build()
        .unwrap_err();
    assert!(matches!(err, Error::InvalidField(_)));
    let spec = SceneSpec::from_json(r#"{"width": 96, "height": 64, "field": {"kind": "two-source-blend", "gains": [[1.1, 1, 0.8], [0.9, 1, 1.2]], "blend": "reciprocal"}}"#).unwrap();
    assert_eq!(spec.build().unwrap().true_anchors.len(), 2);
}

#[test]
fn svwb_ranks_first_on_the_mixed_preset() {
    let scene = SceneSpec::preset(Preset::Mixed).build().unwrap();
    let cmp = compare_scene(&scene, ModelKind::Bradford).unwrap();
    assert_eq!(cmp.ranking()[0], "svwb");
    assert!(cmp.multicolor.as_ref().unwrap().colors >= 3);
}

#[test]
fn true_anchor_sources_are_the_observed_white_means() {
    // With a uniform field the observed patch mean equals the anchor source.
    let spec = SceneSpec::preset(Preset::Single);
    let scene = spec.build().unwrap();
    for (a, p) in scene.true_anchors.iter().zip(scene.chart.white_patches()) {
        let mean = region_mean(&scene.observed, &p.roi).unwrap();
        assert!(common::max_abs_diff(mean.to_array(), a.source.to_array()) <= 1e-14);
    }
}

proptest! {
    #[test]
    fn field_gain_at_a_source_is_that_source_gain(
        x0 in 0.0..500.0f64, y0 in 0.0..500.0f64, x1 in 0.0..500.0f64, y1 in 0.0..500.0f64,
        reciprocal in any::<bool>(),
    ) {
        let sources = [PixelCoord::new(x0, y0), PixelCoord::new(x1, y1)];
        prop_assume!(sources[0] != sources[1]);
        let blend = if reciprocal { GainBlend::Reciprocal } else { GainBlend::Arithmetic };
        let field = two_source(blend, sources);
        prop_assert_eq!(field_gain(&field, sources[0]), WARM_GAIN);
        prop_assert_eq!(field_gain(&field, sources[1]), COOL_GAIN);
    }

    #[test]
    fn field_gain_stays_between_the_sources(px in 0.0..512.0f64, py in 0.0..512.0f64, reciprocal in any::<bool>()) {
        let blend = if reciprocal { GainBlend::Reciprocal } else { GainBlend::Arithmetic };
        let field = two_source(blend, [PixelCoord::new(400.0, 80.0), PixelCoord::new(90.0, 420.0)]);
        let g = field_gain(&field, PixelCoord::new(px, py));
        for c in 0..3 {
            let lo = WARM_GAIN[c].min(COOL_GAIN[c]);
            let hi = WARM_GAIN[c].max(COOL_GAIN[c]);
            prop_assert!(g[c] >= lo - 1e-15 && g[c] <= hi + 1e-15);
        }
    }
}
