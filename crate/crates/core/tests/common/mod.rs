#![allow(dead_code)]

use spreadpot::srd::ScoreMatrix;

pub const COLUMNS: [&str; 8] = [
    "PR", "k-core", "LR", "Harm", "GDD005", "LTC07", "Degree", "spread",
];

/// Average centrality of 21 samples of 500 nodes and their mean LT spread (%).
pub const TABLE3: [[f64; 8]; 21] = [
    [3.623, 10.152, 3.631, 0.21970, 32.924, 22.522, 19.686, 3.271],
    [3.664, 10.532, 3.707, 0.22095, 33.660, 22.964, 20.132, 3.351],
    [3.620, 10.248, 3.601, 0.22047, 32.976, 22.362, 19.500, 3.275],
    [3.698, 10.078, 3.695, 0.21974, 32.947, 23.014, 20.058, 3.337],
    [3.663, 10.226, 3.627, 0.21987, 33.037, 22.570, 19.664, 3.294],
    [3.462, 10.100, 3.402, 0.21928, 32.580, 20.970, 18.300, 3.074],
    [3.790, 10.606, 3.846, 0.22122, 34.108, 23.932, 20.972, 3.461],
    [3.802, 10.838, 3.825, 0.22153, 35.055, 23.942, 20.848, 3.442],
    [3.525, 10.036, 3.510, 0.21949, 32.467, 21.768, 18.948, 3.162],
    [3.628, 10.560, 3.609, 0.22096, 33.875, 22.334, 19.538, 3.265],
    [3.594, 10.334, 3.598, 0.21963, 33.431, 22.254, 19.486, 3.239],
    [3.713, 10.498, 3.735, 0.22128, 33.744, 23.136, 20.284, 3.379],
    [3.737, 10.204, 3.710, 0.21952, 33.069, 23.148, 20.166, 3.355],
    [3.712, 10.058, 3.696, 0.21932, 33.288, 23.000, 20.076, 3.333],
    [3.723, 10.500, 3.728, 0.22154, 33.826, 23.184, 20.268, 3.367],
    [3.826, 10.786, 3.794, 0.22172, 34.869, 23.680, 20.658, 3.424],
    [3.782, 10.446, 3.813, 0.22065, 33.879, 23.678, 20.764, 3.455],
    [3.762, 10.602, 3.775, 0.22153, 34.239, 23.438, 20.544, 3.413],
    [3.635, 10.382, 3.628, 0.22006, 33.450, 22.472, 19.662, 3.281],
    [3.577, 9.964, 3.530, 0.21888, 32.822, 21.864, 19.072, 3.199],
    [3.652, 10.672, 3.665, 0.22120, 34.361, 22.836, 19.874, 3.293],
];

/// Published ranking matrix of [`TABLE3`]; last column is the reference.
pub const TABLE4: [[f64; 8]; 21] = [
    [6.0, 6.0, 9.0, 7.0, 4.0, 8.0, 9.0, 6.5],
    [11.0, 15.0, 13.0, 13.0, 12.0, 11.0, 13.0, 13.5],
    [5.0, 9.0, 5.0, 11.0, 6.0, 6.0, 5.0, 6.5],
    [12.0, 4.0, 11.0, 8.0, 5.0, 13.0, 11.0, 11.5],
    [10.0, 8.0, 7.0, 9.0, 7.0, 9.0, 8.0, 9.5],
    [1.0, 5.0, 1.0, 2.0, 2.0, 1.0, 1.0, 1.0],
    [19.0, 18.0, 21.0, 16.0, 17.0, 20.0, 21.0, 21.0],
    [20.0, 21.0, 20.0, 19.0, 21.0, 21.0, 20.0, 19.0],
    [2.0, 2.0, 2.0, 4.0, 1.0, 2.0, 2.0, 2.0],
    [7.0, 16.0, 6.0, 14.0, 15.0, 5.0, 6.0, 5.0],
    [4.0, 10.0, 4.0, 6.0, 10.0, 4.0, 4.0, 4.0],
    [14.0, 13.0, 16.0, 17.0, 13.0, 14.0, 16.0, 16.0],
    [16.0, 7.0, 14.0, 5.0, 8.0, 15.0, 14.0, 13.5],
    [13.0, 3.0, 12.0, 3.0, 9.0, 12.0, 12.0, 11.5],
    [15.0, 14.0, 15.0, 20.0, 14.0, 16.0, 15.0, 15.0],
    [21.0, 20.0, 18.0, 21.0, 20.0, 19.0, 18.0, 18.0],
    [18.0, 12.0, 19.0, 12.0, 16.0, 18.0, 19.0, 20.0],
    [17.0, 17.0, 17.0, 18.0, 18.0, 17.0, 17.0, 17.0],
    [8.0, 11.0, 8.0, 10.0, 11.0, 7.0, 7.0, 8.0],
    [3.0, 1.0, 3.0, 1.0, 3.0, 3.0, 3.0, 3.0],
    [9.0, 19.0, 10.0, 15.0, 19.0, 10.0, 10.0, 9.5],
];

pub const TABLE4_SRD: [f64; 7] = [22.0, 83.0, 12.0, 73.0, 69.0, 19.0, 12.0];

pub fn table3() -> ScoreMatrix {
    ScoreMatrix::new(
        (1..=21).map(|i| format!("S{i}")).collect(),
        COLUMNS.iter().map(|s| s.to_string()).collect(),
        TABLE3.iter().map(|r| r.to_vec()).collect(),
        7,
    )
    .unwrap()
}

pub fn table2() -> ScoreMatrix {
    ScoreMatrix::new(
        (1..=5).map(|i| format!("Prop{i}")).collect(),
        vec!["Solution 1".into(), "Solution 2".into(), "Ref".into()],
        vec![
            vec![0.37, 0.65, 0.49],
            vec![0.51, 0.14, 0.34],
            vec![0.82, 0.88, 1.0],
            vec![0.93, 0.65, 0.84],
            vec![0.88, 0.65, 0.84],
        ],
        2,
    )
    .unwrap()
}

/// Plain sum of absolute rank differences, independent of the library.
pub fn footrule(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Core numbers from the definition: the largest `k` for which the node
/// survives repeated deletion of nodes with fewer than `k` live neighbors.
pub fn kcore_brute(n: usize, adj: &[Vec<usize>]) -> Vec<f64> {
    let mut core = vec![0.0; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive[v] && adj[v].iter().filter(|&&u| alive[u]).count() < k {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k as f64;
            }
        }
    }
    core
}
