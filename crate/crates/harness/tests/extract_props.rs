use arcbench_core::{render_grid_text, validate_grid, Grid, TemplateId};
use arcbench_harness::extract::{extract_grid, extract_grids};
use proptest::prelude::*;

fn arb_grid() -> impl Strategy<Value = Grid> {
    (1usize..=12, 1usize..=12).prop_flat_map(|(h, w)| {
        prop::collection::vec(prop::collection::vec(0i64..10, w), h).prop_map(|rows| validate_grid(&rows).unwrap())
    })
}

proptest! {
    #[test]
    fn rendered_grids_round_trip(g in arb_grid(), prose in "[a-zA-Z .,:]{0,40}") {
        let text = format!("{prose}\n{}\n{prose}", render_grid_text(&g));
        prop_assert_eq!(extract_grid(&text), Some(g.clone()));
        let compact = serde_json::to_string(&g.to_rows()).unwrap();
        prop_assert_eq!(extract_grid(&compact), Some(g));
    }

    #[test]
    fn last_grid_wins(a in arb_grid(), b in arb_grid()) {
        let text = format!("input:\n{}\nanswer:\n{}", render_grid_text(&a), render_grid_text(&b));
        prop_assert_eq!(extract_grid(&text), Some(b));
    }
}

#[test]
fn one_shot_example_output_is_found() {
    let data = TemplateId::CotOneShotData.body();
    let grids = extract_grids(data);
    let last = grids.last().expect("example data holds grids");
    assert_eq!(last.dims(), (6, 6));
    // Restated alone, the same matrix comes back.
    assert_eq!(extract_grid(&format!("The output is {}", render_grid_text(last))).as_ref(), Some(last));
}
