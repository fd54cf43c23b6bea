//! Shared brute-force oracle for integration tests: explicit Kronecker
//! products, full-dimension matrices, plain matrix-vector products. Kept
//! deliberately independent of the library's gate-application path.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

use ecp_core::ProtocolResult;

pub type Mat = Vec<Vec<C64>>;

pub fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn kron_mat(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca) = (a.len(), a[0].len());
    let (rb, cb) = (b.len(), b[0].len());
    let mut out = vec![vec![zero(); ca * cb]; ra * rb];
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

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn matvec(m: &Mat, v: &[C64]) -> Vec<C64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn identity(dim: usize) -> Mat {
    let mut m = vec![vec![zero(); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = re(1.0);
    }
    m
}

pub fn hadamard2() -> Mat {
    let h = re(std::f64::consts::FRAC_1_SQRT_2);
    vec![vec![h, h], vec![h, -h]]
}

/// H on one position of an n-qubit register, as an explicit Kronecker chain.
pub fn h_on(n: usize, pos: usize) -> Mat {
    let mut m = identity(1);
    for k in 0..n {
        let factor = if k == pos { hadamard2() } else { identity(2) };
        m = kron_mat(&m, &factor);
    }
    m
}

/// Full-dimension diagonal of the conditional reflection: entry i picks up
/// e^{iφ} when the photon and atom bits agree, e^{iφ0} otherwise.
pub fn faraday_diag(n: usize, photon_pos: usize, atom_pos: usize, phi: f64, phi0: f64) -> Mat {
    let dim = 1usize << n;
    let mut m = vec![vec![zero(); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        let p = (i >> (n - 1 - photon_pos)) & 1;
        let a = (i >> (n - 1 - atom_pos)) & 1;
        let angle = if p == a { phi } else { phi0 };
        row[i] = C64::from_polar(1.0, angle);
    }
    m
}

/// Oracle branch: outcome bits over the measured positions, the Born
/// weight, and the raw (sub-normalized) residual amplitudes over the
/// remaining positions in register order.
pub struct OracleBranch {
    pub outcome: Vec<u8>,
    pub probability: f64,
    pub raw_residual: Vec<C64>,
}

pub fn oracle_branches(state: &[C64], n: usize, measured: &[usize]) -> Vec<OracleBranch> {
    let residual_pos: Vec<usize> = (0..n).filter(|p| !measured.contains(p)).collect();
    let rdim = 1usize << residual_pos.len();
    let odim = 1usize << measured.len();
    let mut acc: Vec<Vec<C64>> = vec![vec![zero(); rdim]; odim];
    for (i, amp) in state.iter().enumerate() {
        let mut okey = 0usize;
        for &p in measured {
            okey = (okey << 1) | ((i >> (n - 1 - p)) & 1);
        }
        let mut ridx = 0usize;
        for &p in &residual_pos {
            ridx = (ridx << 1) | ((i >> (n - 1 - p)) & 1);
        }
        acc[okey][ridx] += amp;
    }
    acc.into_iter()
        .enumerate()
        .filter_map(|(okey, raw)| {
            let p: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
            if p < 1e-20 {
                return None;
            }
            let outcome = (0..measured.len())
                .map(|k| ((okey >> (measured.len() - 1 - k)) & 1) as u8)
                .collect();
            Some(OracleBranch {
                outcome,
                probability: p,
                raw_residual: raw,
            })
        })
        .collect()
}

/// Run the atomic circuit entirely inside the oracle: explicit vectors,
/// explicit matrices, sequential matrix-vector products. Register order is
/// [atom1, atom2, atom3, atom4, photon].
pub fn oracle_atomic_state(a1: f64, b1: f64, a2: f64, b2: f64, phi: f64, phi0: f64) -> Vec<C64> {
    let pair1 = vec![zero(), re(a1), re(b1), zero()];
    let pair2 = vec![zero(), re(a2), re(b2), zero()];
    let plus = vec![re(std::f64::consts::FRAC_1_SQRT_2); 2];
    let mut v = kron_vec(&kron_vec(&pair1, &pair2), &plus);
    for m in [
        faraday_diag(5, 4, 1, phi, phi0),
        faraday_diag(5, 4, 2, phi, phi0),
        h_on(5, 1),
        h_on(5, 2),
        h_on(5, 4),
    ] {
        v = matvec(&m, &v);
    }
    v
}

/// Photonic circuit in the oracle; register [photon1..photon4, atom].
pub fn oracle_photonic_state(a1: f64, b1: f64, a2: f64, b2: f64, phi: f64, phi0: f64) -> Vec<C64> {
    let pair1 = vec![zero(), re(a1), re(b1), zero()];
    let pair2 = vec![zero(), re(a2), re(b2), zero()];
    let plus = vec![re(std::f64::consts::FRAC_1_SQRT_2); 2];
    let mut v = kron_vec(&kron_vec(&pair1, &pair2), &plus);
    for m in [
        faraday_diag(5, 1, 4, phi, phi0),
        faraday_diag(5, 2, 4, phi, phi0),
        h_on(5, 1),
        h_on(5, 2),
        h_on(5, 4),
    ] {
        v = matvec(&m, &v);
    }
    v
}

/// Compare a library run against an oracle state and branch table, entry by
/// entry at 1e-10, signs included.
pub fn assert_matches_oracle(
    result: &ProtocolResult,
    oracle_state: &[C64],
    n: usize,
    measured: &[usize],
) {
    assert_eq!(result.pre_measurement.dim(), oracle_state.len());
    for (i, (lib, orc)) in result
        .pre_measurement
        .amplitudes()
        .iter()
        .zip(oracle_state)
        .enumerate()
    {
        assert!(
            (lib - orc).norm() < 1e-10,
            "pre-measurement amplitude {i}: library {lib}, oracle {orc}"
        );
    }

    let oracle = oracle_branches(oracle_state, n, measured);
    assert_eq!(result.branches.len(), oracle.len());
    for ob in &oracle {
        let lib = result
            .branches
            .iter()
            .find(|b| {
                b.branch
                    .outcome
                    .iter()
                    .map(|(_, bit)| *bit)
                    .collect::<Vec<_>>()
                    == ob.outcome
            })
            .unwrap_or_else(|| panic!("library lacks oracle branch {:?}", ob.outcome));
        assert!(
            (lib.branch.probability - ob.probability).abs() < 1e-10,
            "branch {:?}: probability {} vs oracle {}",
            ob.outcome,
            lib.branch.probability,
            ob.probability
        );
        let scale = lib.branch.probability.sqrt();
        for (i, (r, o)) in lib
            .branch
            .residual
            .amplitudes()
            .iter()
            .zip(&ob.raw_residual)
            .enumerate()
        {
            assert!(
                (r * scale - o).norm() < 1e-10,
                "branch {:?} residual amplitude {i}: library {} vs oracle {}",
                ob.outcome,
                r * scale,
                o
            );
        }
    }
}
