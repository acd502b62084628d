use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{BandMatrix, ComplexMatrix, LinearOperator, C64, ZERO};
use crate::model::{self, ModelParams};

type Triplet = (usize, usize, C64);

/// The Lindbladian of the rotating-frame battery with loss rate `γ` into a
/// zero-temperature bath.
///
/// Products are evaluated in matrix form,
/// `𝓛X = −i H_eff X + i X H_eff† + γ b X b†` with `H_eff = H − (iγ/2) b†b`,
/// using only the nonzero entries of `H_eff` and `b`. The dense `N²×N²`
/// superoperator is materialised lazily on first request.
#[derive(Debug)]
pub struct Liouvillian {
    params: ModelParams,
    hamiltonian: ComplexMatrix,
    battery: ComplexMatrix,
    jump: ComplexMatrix,
    heff: Vec<Triplet>,
    jump_nz: Vec<Triplet>,
    triplets: Vec<Triplet>,
    norm1: f64,
    sup: OnceLock<ComplexMatrix>,
}

pub fn build_liouvillian(p: &ModelParams) -> Result<Liouvillian> {
    p.validate()?;
    let hamiltonian = model::rotating_hamiltonian(p)?;
    let battery = model::battery_hamiltonian(p)?;
    let jump = model::annihilation(p.dim)?;
    Liouvillian::from_operators(*p, hamiltonian, battery, jump)
}

impl Liouvillian {
    /// Assembles a Lindbladian from explicit operators; `params.gamma` is
    /// the loss rate attached to `jump`.
    pub fn from_operators(
        params: ModelParams,
        hamiltonian: ComplexMatrix,
        battery: ComplexMatrix,
        jump: ComplexMatrix,
    ) -> Result<Self> {
        let n = hamiltonian.dim();
        for m in [&battery, &jump] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
        }
        let gamma = params.gamma;
        let number = jump.adjoint().matmul(&jump);
        let heff_mat = &hamiltonian - &number.scale(C64::new(0.0, 0.5 * gamma));
        let heff = heff_mat.nonzeros();
        let jump_nz = if gamma > 0.0 {
            jump.nonzeros()
        } else {
            Vec::new()
        };
        let triplets = superoperator_triplets(n, &heff, &jump_nz, gamma);
        let mut colsum = vec![0.0; n * n];
        for &(_, c, v) in &triplets {
            colsum[c] += v.norm();
        }
        let norm1 = colsum.into_iter().fold(0.0, f64::max);
        Ok(Self {
            params,
            hamiltonian,
            battery,
            jump,
            heff,
            jump_nz,
            triplets,
            norm1,
            sup: OnceLock::new(),
        })
    }

    /// Fock truncation `N`.
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    /// Lab-frame `h_B` used for energies.
    pub fn battery_hamiltonian(&self) -> &ComplexMatrix {
        &self.battery
    }

    pub fn jump(&self) -> &ComplexMatrix {
        &self.jump
    }

    /// Dense `N²×N²` superoperator (column-stacking convention).
    pub fn superoperator(&self) -> &ComplexMatrix {
        self.sup.get_or_init(|| {
            let n2 = self.dim() * self.dim();
            let mut s = ComplexMatrix::zeros(n2);
            for &(r, c, v) in &self.triplets {
                s[(r, c)] += v;
            }
            s
        })
    }

    /// Nonzero superoperator entries, duplicates merged.
    pub fn superoperator_triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    /// The superoperator in banded storage. Under column stacking its
    /// couplings sit at offsets `0, ±1, ±N, N+1`.
    pub fn band_matrix(&self) -> BandMatrix {
        BandMatrix::from_triplets(self.dim() * self.dim(), &self.triplets)
    }

    /// `‖id_vec† 𝓛‖₂`: vanishes iff `tr(𝓛X) = 0` for every `X`.
    pub fn trace_preservation_error(&self) -> f64 {
        let n = self.dim();
        let mut row = vec![ZERO; n * n];
        for &(r, c, v) in &self.triplets {
            if r % (n + 1) == 0 {
                row[c] += v;
            }
        }
        row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `𝓛X` in matrix form.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.dim(),
            });
        }
        let mut out = vec![ZERO; n * n];
        self.apply_vec(x.as_slice(), &mut out);
        Ok(ComplexMatrix::from_col_major(n, out).expect("finite output"))
    }

    /// `𝓛X` through the dense superoperator; an independent path used to
    /// cross-check [`Liouvillian::apply_matrix`].
    pub fn apply_superoperator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.dim(),
            });
        }
        let y = self.superoperator().matvec(x.as_slice());
        ComplexMatrix::from_col_major(n, y)
    }

    /// `y ← 𝓛x` on column-stacked vectors.
    pub fn apply_vec(&self, x: &[C64], y: &mut [C64]) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n * n);
        debug_assert_eq!(y.len(), n * n);
        y.iter_mut().for_each(|z| *z = ZERO);
        let mi = C64::new(0.0, -1.0);

        // −i H_eff X, column by column.
        for j in 0..n {
            let xc = &x[j * n..(j + 1) * n];
            let yc = &mut y[j * n..(j + 1) * n];
            for &(r, c, v) in &self.heff {
                yc[r] += mi * v * xc[c];
            }
        }
        // +i X H_eff†: (H_eff†)_{c,r} = conj(v) feeds column r from column c.
        for &(r, c, v) in &self.heff {
            let w = C64::new(0.0, 1.0) * v.conj();
            let (src, dst) = (c * n, r * n);
            for i in 0..n {
                y[dst + i] += w * x[src + i];
            }
        }
        if self.jump_nz.is_empty() {
            return;
        }
        // γ b X b†
        let gamma = self.params.gamma;
        let mut t = vec![ZERO; n * n];
        for j in 0..n {
            let xc = &x[j * n..(j + 1) * n];
            let tc = &mut t[j * n..(j + 1) * n];
            for &(r, c, v) in &self.jump_nz {
                tc[r] += v * xc[c];
            }
        }
        for &(r, c, v) in &self.jump_nz {
            let w = gamma * v.conj();
            let (src, dst) = (c * n, r * n);
            for i in 0..n {
                y[dst + i] += w * t[src + i];
            }
        }
    }
}

impl LinearOperator for Liouvillian {
    fn dim(&self) -> usize {
        let n = Liouvillian::dim(self);
        n * n
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.apply_vec(x, y)
    }

    fn norm1(&self) -> f64 {
        self.norm1
    }
}

fn superoperator_triplets(
    n: usize,
    heff: &[Triplet],
    jump: &[Triplet],
    gamma: f64,
) -> Vec<Triplet> {
    let idx = |i: usize, j: usize| i + j * n;
    let mut out = Vec::with_capacity(2 * heff.len() * n + jump.len() * jump.len());
    for &(i, k, v) in heff {
        // −i H_eff X: (i, j) ← (k, j)
        for j in 0..n {
            out.push((idx(i, j), idx(k, j), C64::new(0.0, -1.0) * v));
        }
        // +i X H_eff†: (l, j=i) ← (l, k) with weight i·conj(H_eff[i,k])
        for l in 0..n {
            out.push((idx(l, i), idx(l, k), C64::new(0.0, 1.0) * v.conj()));
        }
    }
    for &(i, k, bv) in jump {
        for &(j, l, cv) in jump {
            out.push((idx(i, j), idx(k, l), gamma * bv * cv.conj()));
        }
    }
    out.sort_unstable_by_key(|&(r, c, _)| (c, r));
    let mut merged: Vec<Triplet> = Vec::with_capacity(out.len());
    for (r, c, v) in out {
        match merged.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => merged.push((r, c, v)),
        }
    }
    merged.retain(|t| t.2 != ZERO);
    merged
}
