//! Reference computations written independently of the library: a plain
//! array build of the device matrix and permanent-based Fock amplitudes.
#![allow(dead_code)]

use num_complex::Complex64;

pub type Matrix4 = [[Complex64; 4]; 4];

fn identity() -> Matrix4 {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn mul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Column `i` holds the images of `a_i†`: `a_i† → t a_i† − r a_j†`,
/// `a_j† → r a_i† + t a_j†`.
fn splitter(i: usize, j: usize, transmittance: f64) -> Matrix4 {
    let t = transmittance.sqrt();
    let r = (1.0 - transmittance).sqrt();
    let mut m = identity();
    m[i][i] = Complex64::new(t, 0.0);
    m[j][j] = Complex64::new(t, 0.0);
    m[j][i] = Complex64::new(-r, 0.0);
    m[i][j] = Complex64::new(r, 0.0);
    m
}

fn shifter(mode: usize, phase: f64) -> Matrix4 {
    let mut m = identity();
    m[mode][mode] = Complex64::from_polar(1.0, phase);
    m
}

/// `P₆B₅P₅B₄P₄B₃P₃B₂P₂B₁P₁`.
pub fn device_matrix(t: [f64; 5], xi: [f64; 6]) -> Matrix4 {
    let pairs = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)];
    let shifter_modes = [0, 0, 1, 1, 2, 0];
    let mut s = shifter(shifter_modes[0], xi[0]);
    for k in 0..5 {
        s = mul(&splitter(pairs[k].0, pairs[k].1, t[k]), &s);
        s = mul(&shifter(shifter_modes[k + 1], xi[k + 1]), &s);
    }
    s
}

/// Ryser's formula.
pub fn permanent(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for subset in 1u32..(1 << n) {
        let mut prod = Complex64::new(1.0, 0.0);
        for row in m {
            let mut s = Complex64::new(0.0, 0.0);
            for (col, &v) in row.iter().enumerate() {
                if subset & (1 << col) != 0 {
                    s += v;
                }
            }
            prod *= s;
        }
        let sign = if (n - subset.count_ones() as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += prod * sign;
    }
    total
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn labels(counts: &[u32]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(mode, &n)| std::iter::repeat_n(mode, n as usize))
        .collect()
}

/// `⟨output| U |input⟩` for Fock states.
pub fn fock_amplitude(s: &Matrix4, input: &[u32; 4], output: &[u32; 4]) -> Complex64 {
    if input.iter().sum::<u32>() != output.iter().sum::<u32>() {
        return Complex64::new(0.0, 0.0);
    }
    let ins = labels(input);
    let outs = labels(output);
    let m: Vec<Vec<Complex64>> = outs.iter().map(|&o| ins.iter().map(|&i| s[o][i]).collect()).collect();
    let norm: f64 = input
        .iter()
        .chain(output)
        .map(|&n| factorial(n))
        .product::<f64>()
        .sqrt();
    permanent(&m) / norm
}

/// `c_n = ⟨n N₂N₃N₄| U |n₁n₂n₃ n⟩` for `n < len`.
pub fn conditional(t: [f64; 5], xi: [f64; 6], inputs: [u32; 3], counts: [u32; 3], len: usize) -> Vec<Complex64> {
    let s = device_matrix(t, xi);
    (0..len as u32)
        .map(|n| {
            fock_amplitude(
                &s,
                &[inputs[0], inputs[1], inputs[2], n],
                &[n, counts[0], counts[1], counts[2]],
            )
        })
        .collect()
}

pub fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
