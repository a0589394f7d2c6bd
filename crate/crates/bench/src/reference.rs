//! Published benchmark values the tables are compared against.

/// `(N, F_Q)` of the best Dicke pair under the linear generator.
pub const TABLE1: [(usize, f64); 6] = [
    (3, 8.46),
    (4, 16.0),
    (5, 23.48),
    (6, 34.0),
    (7, 44.49),
    (8, 58.0),
];

pub const TABLE1_TOLERANCE: f64 = 0.05;

/// Per `r = 1..4` at `N = 8`.
pub struct Table3Row {
    pub r: u8,
    pub separable: f64,
    pub probe: f64,
    pub nl_snl: f64,
    pub nl_hl: f64,
}

pub const TABLE3: [Table3Row; 4] = [
    Table3Row {
        r: 1,
        separable: 105.54,
        probe: 256.0,
        nl_snl: 0.097,
        nl_hl: 0.063,
    },
    Table3Row {
        r: 2,
        separable: 151.65,
        probe: 400.0,
        nl_snl: 0.081,
        nl_hl: 0.05,
    },
    Table3Row {
        r: 3,
        separable: 26.39,
        probe: 64.0,
        nl_snl: 0.195,
        nl_hl: 0.125,
    },
    Table3Row {
        r: 4,
        separable: 52.14,
        probe: 144.0,
        nl_snl: 0.138,
        nl_hl: 0.083,
    },
];

pub const TABLE3_SEPARABLE_REL: f64 = 0.005;
pub const TABLE3_SENSITIVITY_ABS: f64 = 0.002;

/// `(N, r, (l, l'), F_Q)`.
pub const TABLE4: [(usize, u8, (usize, usize), f64); 16] = [
    (5, 1, (0, 4), 33.67),
    (5, 2, (0, 2), 72.37),
    (5, 3, (0, 4), 8.41),
    (5, 4, (0, 2), 33.9),
    (6, 1, (1, 5), 79.75),
    (6, 2, (0, 2), 134.47),
    (6, 3, (1, 5), 19.95),
    (6, 4, (0, 2), 57.12),
    (7, 1, (0, 2), 133.93),
    (7, 2, (0, 2), 228.2),
    (7, 3, (0, 2), 33.5),
    (7, 4, (0, 2), 89.72),
    (8, 1, (0, 2), 226.41),
    (8, 2, (0, 2), 359.53),
    (8, 3, (0, 2), 56.69),
    (8, 4, (0, 4), 144.0),
];

pub const TABLE4_REL: f64 = 0.01;

/// Best odd-`N` pair value, `8.4641 + 3/4 (N-3)(N+5)`.
pub fn odd_closed_form(n: usize) -> f64 {
    let n = n as f64;
    8.4641 + 0.75 * (n - 3.0) * (n + 5.0)
}

/// Best even-`N` pair value, `4 + 3/4 (N-2)(N+4)`.
pub fn even_closed_form(n: usize) -> f64 {
    let n = n as f64;
    4.0 + 0.75 * (n - 2.0) * (n + 4.0)
}
