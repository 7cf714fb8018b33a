//! The named example algebras: five two-dimensional, five four-dimensional,
//! and the reals.
//!
//! | name | dim | identity | degenerate components |
//! |------|-----|----------|-----------------------|
//! | R    | 1   | yes      | –                     |
//! | A    | 2   | no       | –                     |
//! | B    | 2   | no       | 1                     |
//! | C    | 2   | yes      | –                     |
//! | D    | 2   | yes      | 0                     |
//! | E    | 2   | yes      | –                     |
//! | F    | 4   | no       | –                     |
//! | G    | 4   | no       | 3                     |
//! | Q    | 4   | yes      | –                     |
//! | HQ   | 4   | yes      | –                     |
//! | DC   | 4   | yes      | 0, 1                  |

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::Algebra;
use crate::error::{Error, Result};

pub const CATALOG_NAMES: [&str; 11] = ["R", "A", "B", "C", "D", "E", "F", "G", "Q", "HQ", "DC"];

type M2 = [[f64; 2]; 2];
type M4 = [[f64; 4]; 4];

const I2: M2 = [[1.0, 0.0], [0.0, 1.0]];
const I4: M4 = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

// B_k matrices, outer index k.
const ALG_A: [M2; 2] = [I2, I2];
const ALG_B: [M2; 2] = [[[1.0, 0.0], [1.0, 1.0]], [[1.0, 1.0], [1.0, 1.0]]];
const ALG_C: [M2; 2] = [[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]]];
const ALG_D: [M2; 2] = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 1.0], [1.0, 0.0]]];
const ALG_E: [M2; 2] = [[[1.5, 0.5], [0.5, -0.5]], [[-0.5, 0.5], [0.5, 1.5]]];

const ALG_F: [M4; 4] = [I4, I4, I4, I4];
const ALG_G: [M4; 4] = [
    I4,
    [
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 1.0, 1.0, 0.0],
        [1.0, 1.0, 1.0, 1.0],
    ],
    [
        [1.0, 1.0, 1.0, 1.0],
        [0.0, 1.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 1.0],
    ],
    [[1.0; 4]; 4],
];

const Q_B1: M4 = [
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
];
const Q_B2: M4 = [
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
];
const Q_B3: M4 = [
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
];

const ALG_Q: [M4; 4] = [
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ],
    Q_B1,
    Q_B2,
    Q_B3,
];
const ALG_HQ: [M4; 4] = [I4, Q_B1, Q_B2, Q_B3];
const ALG_DC: [M4; 4] = [
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [0.0; 4],
        [0.0; 4],
    ],
    [
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0; 4],
        [0.0; 4],
    ],
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ],
    [
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ],
];

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn build<M: AsRef<[R]>, R: AsRef<[f64]>>(name: &str, matrices: &[M], basis: &[&str]) -> Algebra {
    Algebra::from_bilinear_matrices(matrices)
        .and_then(|a| a.with_labels(labels(basis)))
        .expect("catalog tables are well formed")
        .with_name(name)
}

/// Looks up a catalog algebra by name.
pub fn catalog(name: &str) -> Result<Algebra> {
    const GENERIC2: [&str; 2] = ["e0", "e1"];
    const GENERIC4: [&str; 4] = ["e0", "e1", "e2", "e3"];
    const QUAT: [&str; 4] = ["1", "i", "j", "k"];
    let alg = match name {
        "R" => build("R", &[[[1.0]]], &["1"]),
        "A" => build("A", &ALG_A, &GENERIC2),
        "B" => build("B", &ALG_B, &GENERIC2),
        "C" => build("C", &ALG_C, &["1", "i"]),
        "D" => build("D", &ALG_D, &["1", "i"]),
        "E" => build("E", &ALG_E, &GENERIC2),
        "F" => build("F", &ALG_F, &GENERIC4),
        "G" => build("G", &ALG_G, &GENERIC4),
        "Q" => build("Q", &ALG_Q, &QUAT),
        "HQ" => build("HQ", &ALG_HQ, &QUAT),
        "DC" => build("DC", &ALG_DC, &["1", "i", "eps", "i*eps"]),
        _ => {
            return Err(Error::UnknownAlgebra {
                name: name.to_string(),
                valid: CATALOG_NAMES.join(", "),
            })
        }
    };
    Ok(alg)
}
