//! Numerical quadrature over the affine chart of CP^n: the oracle that
//! cross-validates the closed-form monomial L^2 inner products.
//!
//! Writing u_i = sqrt(t_i) e^{i phi_i}, the phases are integrated by the
//! trapezoid rule (exact for the finitely many harmonics e^{i(a-b)phi} that
//! occur) and the radial moduli t in R_+^n by the Dirichlet substitution
//! t_i = y_i / (1 - sigma), sigma = sum y_i, which maps the open unit simplex
//! onto the chart with
//!     (1 + sum t)^{-(k+n+1)} prod dt  =  (1 - sigma)^k prod dy.
//! A Duffy map y_i = v_i prod_{j<i}(1 - v_j) then carries the simplex to the
//! unit cube. Every radial integrand the phase average does not kill is a
//! polynomial in v, so tensor Gauss-Legendre is exact once the per-axis node
//! count exceeds k + n.

use num::complex::Complex64;

use crate::exec::{pairwise_reduce, Exec};

/// Nodes and weights on [-1, 1], by Newton iteration on the Legendre
/// recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "need at least one node");
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pd(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pd(n, x);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// P_n(x) and P_n'(x) via the three-term recurrence.
fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for m in 2..=n {
        let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn mat_add(a: &Vec<Vec<Complex64>>, b: &Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

/// Raw inner products <Z^a, Z^b> of degree-k monomial sections over CP^n,
/// relative to vol(CP^n): entry (a, b) approximates
/// (n!/pi^n) * integral of u^{a} ubar^{b} (1 + |u|^2)^{-(k+n+1)} dV_eucl
/// over the affine chart, where the rows/columns follow `affine_exps`
/// (exponents of the n affine coordinates; the homogeneous Z_0 power is
/// implied by the total degree k).
///
/// The rule is exact (up to roundoff) for radial_nodes > k + n. Cells of the
/// radial tensor grid are independent work units; their partial sums are
/// combined by a fixed pairwise tree, so results are bit-identical for
/// Exec::Seq and Exec::Par.
pub fn raw_inner_products(
    n: usize,
    k: u32,
    affine_exps: &[Vec<u32>],
    radial_nodes: usize,
    exec: Exec,
) -> Vec<Vec<Complex64>> {
    assert!(n >= 1);
    assert!(affine_exps.iter().all(|e| e.len() == n), "exponent arity");
    let d = affine_exps.len();
    // Gauss-Legendre on [0, 1] for each Duffy axis
    let gl01: Vec<(f64, f64)> = gauss_legendre(radial_nodes)
        .iter()
        .map(|&(x, w)| ((x + 1.0) / 2.0, w / 2.0))
        .collect();
    let m_phi = (2 * k + 4) as usize;
    let phis: Vec<f64> = (0..m_phi)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / m_phi as f64)
        .collect();
    let n_fact = (1..=n).map(|i| i as f64).product::<f64>();

    let cells = radial_nodes.pow(n as u32);

    let partials: Vec<Vec<Vec<Complex64>>> = exec.map_indexed(cells, |cell| {
        // decode the radial multi-index of this cell
        let mut idx = cell;
        let mut ri = vec![0usize; n];
        for r in ri.iter_mut() {
            *r = idx % radial_nodes;
            idx /= radial_nodes;
        }
        // Duffy map: y_i = v_i * prod_{j<i}(1 - v_j); 1 - sigma = prod(1 - v_j)
        let mut w_y = 1.0;
        let mut rest = 1.0; // prod of (1 - v_j) over axes handled so far
        let mut y = vec![0.0f64; n];
        for (yi, &r) in y.iter_mut().zip(&ri) {
            let (v, w) = gl01[r];
            *yi = v * rest;
            w_y *= w * rest; // GL weight times dy_i/dv_i
            rest *= 1.0 - v;
        }
        let moduli: Vec<f64> = y.iter().map(|yi| (yi / rest).sqrt()).collect();
        let cell_w = n_fact * rest.powi(k as i32) * w_y / (m_phi.pow(n as u32) as f64);

        let mut acc = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        let mut vals = vec![Complex64::new(0.0, 0.0); d];
        let phi_cells = m_phi.pow(n as u32);
        for pc in 0..phi_cells {
            let mut idx = pc;
            let mut u = vec![Complex64::new(0.0, 0.0); n];
            for (i, ui) in u.iter_mut().enumerate() {
                let phi = phis[idx % m_phi];
                idx /= m_phi;
                *ui = Complex64::from_polar(moduli[i], phi);
            }
            for (v, e) in vals.iter_mut().zip(affine_exps) {
                let mut p = Complex64::new(1.0, 0.0);
                for (ui, &ei) in u.iter().zip(e) {
                    p *= ui.powu(ei);
                }
                *v = p;
            }
            for a in 0..d {
                for b in 0..d {
                    acc[a][b] += vals[a] * vals[b].conj();
                }
            }
        }
        for row in acc.iter_mut() {
            for x in row.iter_mut() {
                *x *= cell_w;
            }
        }
        acc
    });

    pairwise_reduce(&partials, &mat_add)
        .unwrap_or_else(|| vec![vec![Complex64::new(0.0, 0.0); d]; d])
}
