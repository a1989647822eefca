//! Reference implementations shared by the integration tests. Nothing in
//! here calls into the simulator it is checking.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;
use rand::Rng;

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![c(0.0, 0.0); m]; n];
    for i in 0..n {
        for j in 0..m {
            out[i][j] = (0..k).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    out
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn ry(a: f64) -> Matrix {
    let (s, co) = (a / 2.0).sin_cos();
    vec![vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]]
}

pub fn rz(a: f64) -> Matrix {
    vec![
        vec![Complex64::from_polar(1.0, -a / 2.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), Complex64::from_polar(1.0, a / 2.0)],
    ]
}

/// `gate` on `qubit` of an `n`-qubit register whose qubit 0 is the least
/// significant bit, i.e. the rightmost Kronecker factor.
pub fn embed(gate: &Matrix, qubit: usize, n: usize) -> Matrix {
    let mut out = identity(1);
    for q in (0..n).rev() {
        let factor = if q == qubit {
            gate.clone()
        } else {
            identity(2)
        };
        out = kron(&out, &factor);
    }
    out
}

pub fn cnot(control: usize, target: usize, n: usize) -> Matrix {
    let dim = 1 << n;
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for b in 0..dim {
        let image = if b >> control & 1 == 1 {
            b ^ (1 << target)
        } else {
            b
        };
        out[image][b] = c(1.0, 0.0);
    }
    out
}

/// The full circuit unitary: embedding, then `depth` rounds of per-qubit
/// `Rz(α)·Ry(β)·Rz(γ)` followed by the CNOT ring. `omega[(l*n + q)*3 + k]`
/// holds α, β, γ for k = 0, 1, 2.
pub fn circuit_unitary(theta: &[f64], omega: &[f64], depth: usize, entanglement: bool) -> Matrix {
    let n = theta.len();
    let dim = 1 << n;
    let mut u_emb = identity(dim);
    for (q, &t) in theta.iter().enumerate() {
        u_emb = matmul(&embed(&ry(t), q, n), &u_emb);
    }
    let mut ring = identity(dim);
    if entanglement {
        for q in 0..n - 1 {
            ring = matmul(&cnot(q, q + 1, n), &ring);
        }
        ring = matmul(&cnot(n - 1, 0, n), &ring);
    }
    let mut u = u_emb;
    for l in 0..depth {
        let mut u_rot = identity(1);
        for q in (0..n).rev() {
            let at = |k: usize| omega[(l * n + q) * 3 + k];
            let block = matmul(&rz(at(0)), &matmul(&ry(at(1)), &rz(at(2))));
            u_rot = kron(&u_rot, &block);
        }
        u = matmul(&ring, &matmul(&u_rot, &u));
    }
    u
}

pub fn dense_expectations(
    theta: &[f64],
    omega: &[f64],
    depth: usize,
    entanglement: bool,
) -> Vec<f64> {
    let n = theta.len();
    let u = circuit_unitary(theta, omega, depth, entanglement);
    // U|0…0⟩ is the first column.
    let probs: Vec<f64> = u.iter().map(|row| row[0].norm_sqr()).collect();
    (0..n)
        .map(|q| {
            probs
                .iter()
                .enumerate()
                .map(|(b, p)| if b >> q & 1 == 0 { *p } else { -*p })
                .sum()
        })
        .collect()
}

pub fn random_angles<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

/// Central difference of a scalar function along coordinate `i`.
pub fn central_diff(f: impl Fn(&[f64]) -> f64, x: &[f64], i: usize, step: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[i] += step;
    minus[i] -= step;
    (f(&plus) - f(&minus)) / (2.0 * step)
}

/// Relative error with a floor so gradients that are essentially zero are
/// compared absolutely.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-4)
}

use hqf_core::nn::ParamSet;

/// Worst relative error between `analytic` and central differences of `loss`
/// over every scalar of every tensor in `params`.
pub fn param_grad_error<P: ParamSet + Clone>(
    params: &P,
    analytic: &P,
    loss: impl Fn(&P) -> f64,
    step: f64,
) -> f64 {
    let shapes: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    let expected: Vec<Vec<f64>> = analytic
        .tensors()
        .iter()
        .map(|t| t.data().to_vec())
        .collect();
    let mut worst = 0.0f64;
    for (ti, &len) in shapes.iter().enumerate() {
        for k in 0..len {
            let mut plus = params.clone();
            plus.tensors_mut()[ti].data_mut()[k] += step;
            let mut minus = params.clone();
            minus.tensors_mut()[ti].data_mut()[k] -= step;
            let fd = (loss(&plus) - loss(&minus)) / (2.0 * step);
            worst = worst.max(rel_err(fd, expected[ti][k]));
        }
    }
    worst
}

use hqf_core::model::{backward, forward, HybridModelParams, ModelConfig, Variant};
use hqf_core::nn::{
    gru_backward, gru_forward, linear_backward, linear_forward, lstm_backward, lstm_forward,
    mse_loss, GruParams, LinearParams, LstmParams, Tensor,
};
use hqf_core::quantum::{circuit_gradients, run_circuit, CircuitParams, GradientMethod};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn random_tensor<R: Rng>(shape: &[usize], rng: &mut R) -> Tensor {
    let n = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Random circuit with `n ≤ 3` qubits and `depth ≤ 3`; returns the largest
/// expectation mismatch against the dense oracle.
pub fn oracle_mismatch(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let depth = rng.gen_range(0..=3);
    let entanglement = n >= 2 && rng.gen_bool(0.7);
    let theta = random_angles(n, &mut rng);
    let omega = random_angles(depth * n * 3, &mut rng);
    let params = CircuitParams::new(theta.clone(), omega.clone(), depth, entanglement).unwrap();
    let (_, q) = run_circuit(&params).unwrap();
    let expected = dense_expectations(&theta, &omega, depth, entanglement);
    q.expectations
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Parameter-shift Jacobian against central differences (step 1e-5) and
/// against the direct route, on a random circuit with `n ≤ 4`, `depth ≤ 3`.
/// Returns `(shift vs fd, shift vs direct)` as absolute errors.
pub fn circuit_gradient_errors(seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4);
    let depth = rng.gen_range(1..=3);
    let theta = random_angles(n, &mut rng);
    let omega = random_angles(depth * n * 3, &mut rng);
    let params = CircuitParams::new(theta.clone(), omega.clone(), depth, true).unwrap();
    let shift = circuit_gradients(&params, GradientMethod::ParameterShift).unwrap();
    let direct = circuit_gradients(&params, GradientMethod::Direct).unwrap();

    let eval = |t: &[f64], o: &[f64], i: usize| {
        let p = CircuitParams::new(t.to_vec(), o.to_vec(), depth, true).unwrap();
        run_circuit(&p).unwrap().1.expectations[i]
    };
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let fd = central_diff(|t| eval(t, &omega, i), &theta, j, 1e-5);
            worst = worst.max((fd - shift.d_theta(i, j)).abs());
        }
        for k in 0..omega.len() {
            let fd = central_diff(|o| eval(&theta, o, i), &omega, k, 1e-5);
            worst = worst.max((fd - shift.d_omega(i, k)).abs());
        }
    }
    (worst, shift.max_abs_diff(&direct))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// GRU with 3 steps, 2 inputs and 3 hidden units; loss `⟨g, h_L⟩`. Covers
/// both parameters and the input window.
pub fn gru_gradient_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = GruParams::init(2, 3, &mut rng);
    let window = random_tensor(&[3, 2], &mut rng);
    let g: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let loss_of = |p: &GruParams, x: &Tensor| dot(&gru_forward(p, x).unwrap().0, &g);

    let (_, cache) = gru_forward(&params, &window).unwrap();
    let mut grads = GruParams::zeros(2, 3);
    let gx = gru_backward(&params, &cache, &g, &mut grads).unwrap();
    let mut worst = param_grad_error(&params, &grads, |p| loss_of(p, &window), 1e-6);
    for k in 0..window.len() {
        let fd = central_diff(
            |x| loss_of(&params, &Tensor::from_vec(&[3, 2], x.to_vec()).unwrap()),
            window.data(),
            k,
            1e-6,
        );
        worst = worst.max(rel_err(fd, gx.data()[k]));
    }
    worst
}

pub fn lstm_gradient_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = LstmParams::init(2, 3, &mut rng);
    let window = random_tensor(&[3, 2], &mut rng);
    let g: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let loss_of = |p: &LstmParams, x: &Tensor| dot(&lstm_forward(p, x).unwrap().0, &g);

    let (_, cache) = lstm_forward(&params, &window).unwrap();
    let mut grads = LstmParams::zeros(2, 3);
    let gx = lstm_backward(&params, &cache, &g, &mut grads).unwrap();
    let mut worst = param_grad_error(&params, &grads, |p| loss_of(p, &window), 1e-6);
    for k in 0..window.len() {
        let fd = central_diff(
            |x| loss_of(&params, &Tensor::from_vec(&[3, 2], x.to_vec()).unwrap()),
            window.data(),
            k,
            1e-6,
        );
        worst = worst.max(rel_err(fd, gx.data()[k]));
    }
    worst
}

pub fn linear_gradient_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = LinearParams::init(4, 3, &mut rng);
    let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let g: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let loss_of = |p: &LinearParams, x: &[f64]| dot(&linear_forward(p, x).unwrap(), &g);

    let mut grads = LinearParams::zeros(4, 3);
    let gx = linear_backward(&params, &x, &g, &mut grads).unwrap();
    let mut worst = param_grad_error(&params, &grads, |p| loss_of(p, &x), 1e-6);
    for k in 0..x.len() {
        let fd = central_diff(|x| loss_of(&params, x), &x, k, 1e-6);
        worst = worst.max(rel_err(fd, gx[k]));
    }
    worst
}

/// Full model with L=5, d_z=3, n_q=2, D=1 on MSE loss.
pub fn model_gradient_error(variant: Variant, seed: u64) -> f64 {
    let config = ModelConfig {
        variant,
        window: 5,
        hidden_size: 3,
        n_qubits: 2,
        depth: 1,
        horizons: vec![15, 30, 60],
        seed,
        ..ModelConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = HybridModelParams::init(&config, &mut rng).unwrap();
    let window = random_tensor(&[5, 4], &mut rng);
    let target = random_tensor(&[3, 4], &mut rng);
    let (_, grads) = backward(&params, &window, &target).unwrap();
    param_grad_error(
        &params,
        &grads,
        |p| {
            mse_loss(forward(p, &window).unwrap().data(), target.data())
                .unwrap()
                .0
        },
        1e-6,
    )
}

use hqf_core::data::synthetic::synthetic_corpus;
use hqf_core::data::{build_windows, make_lopo_folds, prepare_fold, SubjectRecording};
use hqf_core::quantum::Statevector;

/// Applies `n_gates` random R_y / R_z / CNOT gates to a random basis state
/// and returns `|‖ψ‖ − 1|`.
pub fn norm_drift(n_qubits: usize, n_gates: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Statevector::basis(n_qubits, rng.gen_range(0..1 << n_qubits)).unwrap();
    for _ in 0..n_gates {
        let q = rng.gen_range(0..n_qubits);
        let a = rng.gen_range(-10.0..10.0);
        match rng.gen_range(0..3) {
            0 => s.apply_ry(q, a).unwrap(),
            1 => s.apply_rz(q, a).unwrap(),
            _ => {
                let t = (q + rng.gen_range(1..n_qubits)) % n_qubits;
                s.apply_cnot(q, t).unwrap()
            }
        }
    }
    (s.norm() - 1.0).abs()
}

/// Checks every LOPO fold of `corpus`. Returns a description of the first
/// violation found.
pub fn lopo_leakage_violation(
    corpus: &[SubjectRecording],
    window: usize,
    horizons: &[usize],
) -> Option<String> {
    let folds = make_lopo_folds(corpus).unwrap();
    if folds.len() != corpus.len() {
        return Some(format!(
            "{} folds for {} subjects",
            folds.len(),
            corpus.len()
        ));
    }
    for (k, fold) in folds.iter().enumerate() {
        if fold.train_subjects.contains(&fold.test_subject) {
            return Some(format!(
                "fold {}: test subject listed for training",
                fold.index
            ));
        }
        let data = prepare_fold(fold, corpus, window, horizons, 1, 0.1).unwrap();
        if data
            .train
            .iter()
            .chain(&data.val)
            .any(|w| w.subject_id == fold.test_subject)
        {
            return Some(format!(
                "fold {}: test windows leak into training",
                fold.index
            ));
        }
        if data.test.iter().any(|w| w.subject_id != fold.test_subject) {
            return Some(format!("fold {}: foreign window in test set", fold.index));
        }

        // Scramble the held-out subject; the fold's statistics must not move
        // by a single bit.
        let mut perturbed = corpus.to_vec();
        for v in perturbed[k].series.data_mut() {
            *v = *v * 3.7 + 1000.0;
        }
        let again = &make_lopo_folds(&perturbed).unwrap()[k];
        let bits = |xs: &[f64]| xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        if bits(&again.stats.mean) != bits(&fold.stats.mean)
            || bits(&again.stats.std) != bits(&fold.stats.std)
        {
            return Some(format!(
                "fold {}: statistics depend on the test subject",
                fold.index
            ));
        }
    }
    None
}

pub fn synthetic_subjects(n: usize, duration: usize) -> Vec<SubjectRecording> {
    synthetic_corpus(n, duration, 11)
}

/// Window count for T=480, L=240, h ∈ {15,30,60} plus an element-wise check
/// of inputs and targets against the source series.
pub fn window_arithmetic() -> (usize, Option<String>) {
    let rec = synthetic_corpus(1, 480, 5).remove(0);
    let horizons = [15, 30, 60];
    let windows = build_windows(&rec, 240, &horizons, 1);
    for (i, w) in windows.iter().enumerate() {
        if w.anchor != 239 + i {
            return (
                windows.len(),
                Some(format!("window {i} anchored at {}", w.anchor)),
            );
        }
        for r in 0..240 {
            if w.input.row(r) != rec.series.row(w.anchor + 1 - 240 + r) {
                return (
                    windows.len(),
                    Some(format!("window {i} input row {r} misaligned")),
                );
            }
        }
        for (k, h) in horizons.iter().enumerate() {
            if w.targets.row(k) != rec.series.row(w.anchor + h) {
                return (
                    windows.len(),
                    Some(format!("window {i} target h={h} misaligned")),
                );
            }
        }
    }
    (windows.len(), None)
}
