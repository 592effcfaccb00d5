//! The ten-vertex, four-triangle mesh used throughout the docs and tests.
//!
//! It holds two duplicated vertices (`C` at 2 and 5, `D` at 4 and 9) and two
//! vertices no triangle references (`X` at 3, `Y` at 8). Letters map to
//! coordinates whose bitwise order is `A < B < C < D < E < F`.

use crate::mesh::Mesh;

pub const A: [f32; 2] = [0.0, 0.0];
pub const B: [f32; 2] = [0.0, 1.0];
pub const C: [f32; 2] = [0.0, 2.0];
pub const D: [f32; 2] = [0.0, 3.0];
pub const E: [f32; 2] = [0.0, 4.0];
pub const F: [f32; 2] = [0.0, 5.0];
pub const X: [f32; 2] = [9.0, 9.0];
pub const Y: [f32; 2] = [8.0, 8.0];

/// `{A,B,C',X,D',C",E,F,Y,D"}`
pub const WORKED_VERTICES: [[f32; 2]; 10] = [A, B, C, X, D, C, E, F, Y, D];
/// `{(0,1,2)(0,2,4)(5,6,7)(5,7,9)}`
pub const WORKED_ELEMENTS: [[u32; 3]; 4] = [[0, 1, 2], [0, 2, 4], [5, 6, 7], [5, 7, 9]];

pub fn worked_mesh() -> Mesh {
    Mesh::from_arrays(&WORKED_VERTICES, &WORKED_ELEMENTS).expect("fixture is well-formed")
}
