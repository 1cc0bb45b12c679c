//! Built-in channels used by the CLI `reproduce` command, tests and docs.

use crate::channel::{uniform, AuxLaw, Kernel, StateChannel};

/// Hamming distortion on an alphabet of size `k`.
pub fn hamming(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|a| (0..k).map(|b| if a == b { 0.0 } else { 1.0 }).collect())
        .collect()
}

/// Binary channel with binary state and jammer: state prior `(0.9, 0.1)`,
/// Hamming distortion. Averaged over the state it becomes a BSC(0.1) under
/// the uniform jammer, and a BSC(0.2) when the jammer answers `x` with `1-x`.
pub fn binary_example() -> StateChannel {
    StateChannel::from_nested(
        &[
            vec![
                vec![vec![1.0, 0.0], vec![0.85, 0.15]],
                vec![vec![1.0, 0.0], vec![0.35, 0.65]],
            ],
            vec![
                vec![vec![0.15, 0.85], vec![0.0, 1.0]],
                vec![vec![0.65, 0.35], vec![0.0, 1.0]],
            ],
        ],
        vec![0.9, 0.1],
        hamming(2),
    )
    .expect("built-in channel is valid")
}

/// Deterministic adder `Y = X + S + J` with `X in {0,1,2}`, `S, J in
/// {0,1}`, uniform state and Hamming distortion.
pub fn adder_example() -> StateChannel {
    let mut w = vec![vec![vec![vec![0.0; 5]; 2]; 2]; 3];
    for (x, wx) in w.iter_mut().enumerate() {
        for (s, ws) in wx.iter_mut().enumerate() {
            for (j, row) in ws.iter_mut().enumerate() {
                row[x + s + j] = 1.0;
            }
        }
    }
    StateChannel::from_nested(&w, uniform(2), hamming(2)).expect("built-in channel is valid")
}

/// `U = X + S` on the adder example, as a strictly causal kernel
/// `Q_{U|XS}` with rows `x * 2 + s` over `U in {0..3}`.
pub fn adder_sum_aux() -> Kernel {
    Kernel::deterministic(6, 4, |r| r / 2 + r % 2)
}

/// State-revealing channel: output `y = 2 s + (x xor e)` with
/// `e ~ Bern(p_j)`, `p = (0.05, 0.15)`, state prior `(0.9, 0.1)`, Hamming
/// distortion. The output reveals the state exactly, so lossless state
/// communication costs no message rate beyond the state entropy.
pub fn state_revealing() -> StateChannel {
    let p = [0.05, 0.15];
    let mut w = vec![vec![vec![vec![0.0; 4]; 2]; 2]; 2];
    for (x, wx) in w.iter_mut().enumerate() {
        for (s, ws) in wx.iter_mut().enumerate() {
            for (j, row) in ws.iter_mut().enumerate() {
                row[2 * s + x] = 1.0 - p[j];
                row[2 * s + (1 - x)] = p[j];
            }
        }
    }
    StateChannel::from_nested(&w, vec![0.9, 0.1], hamming(2)).expect("built-in channel is valid")
}

/// Strictly causal `U = S` with input law `q_x`.
pub fn describe_state(ch: &StateChannel, q_x: Vec<f64>) -> AuxLaw {
    let ns = ch.ns();
    AuxLaw::StrictlyCausal {
        q_x,
        q_u_xs: Kernel::deterministic(ch.nx() * ns, ns, |r| r % ns),
    }
}

/// Noncausal `U = X` uniform and independent of the state.
pub fn state_blind_noncausal(ch: &StateChannel) -> AuxLaw {
    let (nx, ns) = (ch.nx(), ch.ns());
    AuxLaw::Noncausal {
        q_u_s: Kernel::constant(ns, &uniform(nx)),
        q_x_us: Kernel::deterministic(nx * ns, nx, |r| r / ns),
    }
}

/// Jammed erasure channel: `y = x` or the erasure symbol 2, erased with
/// probability `eps[s][j]`, `eps = [[0.05, 0.2], [0.3, 0.5]]`, state prior
/// `(0.8, 0.2)`, Hamming distortion. Unerased outputs pin the input, so
/// wrong codewords are ruled out by support alone.
pub fn jammed_erasure() -> StateChannel {
    let eps = [[0.05, 0.2], [0.3, 0.5]];
    let mut w = vec![vec![vec![vec![0.0; 3]; 2]; 2]; 2];
    for (x, wx) in w.iter_mut().enumerate() {
        for (s, ws) in wx.iter_mut().enumerate() {
            for (j, row) in ws.iter_mut().enumerate() {
                row[x] = 1.0 - eps[s][j];
                row[2] = eps[s][j];
            }
        }
    }
    StateChannel::from_nested(&w, vec![0.8, 0.2], hamming(2)).expect("built-in channel is valid")
}

/// Strictly causal constant `U`: no state description.
pub fn no_description(ch: &StateChannel, q_x: Vec<f64>) -> AuxLaw {
    AuxLaw::StrictlyCausal {
        q_x,
        q_u_xs: Kernel::constant(ch.nx() * ch.ns(), &[1.0]),
    }
}
