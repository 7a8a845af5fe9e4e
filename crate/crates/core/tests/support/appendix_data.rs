//! Grids printed in the DSL reference's worked example.

#![allow(dead_code)]

use arcbench_core::Grid;

/// Input grid of the worked example.
pub fn example_grid() -> Grid {
    Grid::from_rows(&[
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 5, 5, 0],
        [0, 5, 5, 0, 0, 0, 0, 5, 5, 0],
        [0, 0, 5, 5, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 5],
        [0, 0, 0, 0, 0, 5, 5, 0, 0, 5],
        [0, 5, 0, 0, 0, 0, 0, 0, 0, 5],
        [0, 5, 0, 0, 5, 0, 0, 0, 0, 0],
        [0, 0, 0, 5, 5, 0, 0, 0, 0, 0],
    ])
    .unwrap()
}

/// The same grid after `rotate_right_obj(state, object2)`.
pub fn rotated_grid() -> Grid {
    Grid::from_rows(&[
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 5, 0, 0, 0, 0, 5, 5, 0],
        [0, 5, 5, 0, 0, 0, 0, 5, 5, 0],
        [0, 5, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 5],
        [0, 0, 0, 0, 0, 5, 5, 0, 0, 5],
        [0, 5, 0, 0, 0, 0, 0, 0, 0, 5],
        [0, 5, 0, 0, 5, 0, 0, 0, 0, 0],
        [0, 0, 0, 5, 5, 0, 0, 0, 0, 0],
    ])
    .unwrap()
}

/// Object cells in scan order, as listed in the example's object section.
pub fn six_objects() -> Vec<Vec<(usize, usize)>> {
    vec![
        vec![(1, 7), (1, 8), (2, 7), (2, 8)],
        vec![(2, 1), (2, 2), (3, 2), (3, 3)],
        vec![(5, 9), (6, 9), (7, 9)],
        vec![(6, 5), (6, 6)],
        vec![(7, 1), (8, 1)],
        vec![(8, 4), (9, 3), (9, 4)],
    ]
}
