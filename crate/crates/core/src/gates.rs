//! Linear optical gate unitaries.
//!
//! A gate maps input mode `l` to output modes with amplitudes `U[k][l]`
//! (column `l` is the image of an input photon in mode `l`). Mode indices are
//! zero-based here; [`Modes::one_based`] converts from the numbering used in
//! configuration files.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Unitarity tolerance for matrices built in code.
pub const UNITARITY_TOL: f64 = 1e-12;
/// Unitarity tolerance for matrices read from text, which carry rounded digits.
pub const IMPORT_UNITARITY_TOL: f64 = 1e-10;

/// Dual-rail layout of the six-mode CNOT circuit (zero-based).
pub mod cnot_modes {
    pub const VACUUM_CONTROL: usize = 0;
    pub const CONTROL_0: usize = 1;
    pub const CONTROL_1: usize = 2;
    pub const TARGET_0: usize = 3;
    pub const TARGET_1: usize = 4;
    pub const VACUUM_TARGET: usize = 5;
}

/// Square complex matrix acting on optical modes, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    elements: Vec<Complex64>,
}

impl GateMatrix {
    /// Builds a gate and checks unitarity to `tol`.
    pub fn new(dim: usize, elements: Vec<Complex64>, tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "gate dimension must be >= 1".into(),
            ));
        }
        if elements.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: elements.len(),
            });
        }
        if elements
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "gate elements must be finite".into(),
            ));
        }
        let gate = Self { dim, elements };
        let deviation = gate.unitarity_deviation();
        if deviation > tol {
            return Err(Error::NotUnitary { deviation, tol });
        }
        Ok(gate)
    }

    pub fn from_rows(rows: &[Vec<Complex64>], tol: f64) -> Result<Self> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
        }
        Self::new(dim, rows.iter().flatten().copied().collect(), tol)
    }

    pub fn identity(dim: usize) -> Self {
        let mut elements = vec![Complex64::new(0.0, 0.0); dim * dim];
        for d in 0..dim {
            elements[d * dim + d] = Complex64::new(1.0, 0.0);
        }
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Element `U[row][col]`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.elements.chunks(self.dim)
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut elements = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                elements.push(self.get(c, r).conj());
            }
        }
        Self { dim: n, elements }
    }

    /// Largest entry of `|U·U† − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..n {
                    acc += self.get(r, m) * self.get(c, m).conj();
                }
                if r == c {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Parses a JSON array of rows of `[re, im]` pairs and checks unitarity.
    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("gate JSON: {e}")))?;
        Self::from_pairs(&rows)
    }

    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::from_rows(&rows, IMPORT_UNITARITY_TOL)
    }

    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        self.rows()
            .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
            .collect()
    }
}

impl Serialize for GateMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GateMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Self::from_pairs(&rows).map_err(serde::de::Error::custom)
    }
}

/// Matrix product `a · b` (apply `b` first, then `a`).
pub fn compose(a: &GateMatrix, b: &GateMatrix) -> Result<GateMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    let n = a.dim;
    let mut elements = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for m in 0..n {
            let arm = a.get(r, m);
            if arm == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..n {
                elements[r * n + c] += arm * b.get(m, c);
            }
        }
    }
    Ok(GateMatrix { dim: n, elements })
}

/// Composes a sequence of gates given in the order the light meets them.
pub fn cascade(stages: &[&GateMatrix]) -> Result<GateMatrix> {
    let (first, rest) = stages
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("empty gate cascade".into()))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, g| compose(g, &acc))
}

/// Beam splitter `((√R, √T), (√T, −√R))`.
pub fn beam_splitter(reflectivity: f64, transmissivity: f64) -> Result<GateMatrix> {
    if !(0.0..=1.0).contains(&reflectivity) || !(0.0..=1.0).contains(&transmissivity) {
        return Err(Error::InvalidParameter(format!(
            "R = {reflectivity}, T = {transmissivity} must lie in [0, 1]"
        )));
    }
    if (reflectivity + transmissivity - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "R + T = {} must equal 1 for a lossless splitter",
            reflectivity + transmissivity
        )));
    }
    let r = reflectivity.sqrt();
    let t = transmissivity.sqrt();
    let c = |x: f64| Complex64::new(x, 0.0);
    Ok(GateMatrix {
        dim: 2,
        elements: vec![c(r), c(t), c(t), c(-r)],
    })
}

/// Diagonal phase shifter `diag(exp(iφ_m))`.
pub fn phase_shifter(phases: &[f64]) -> GateMatrix {
    let n = phases.len();
    let mut g = GateMatrix::identity(n);
    for (m, &phi) in phases.iter().enumerate() {
        g.elements[m * n + m] = Complex64::from_polar(1.0, phi);
    }
    g
}

/// Embeds `gate` on the listed modes of an `total`-mode identity.
/// `modes[a]` is the global index of the gate's local mode `a`.
pub fn embed(gate: &GateMatrix, modes: &[usize], total: usize) -> Result<GateMatrix> {
    if modes.len() != gate.dim {
        return Err(Error::DimensionMismatch {
            expected: gate.dim,
            found: modes.len(),
        });
    }
    for (a, &m) in modes.iter().enumerate() {
        if m >= total {
            return Err(Error::ModeIndex(format!(
                "mode {m} out of range for {total} modes"
            )));
        }
        if modes[..a].contains(&m) {
            return Err(Error::ModeIndex(format!("mode {m} listed twice")));
        }
    }
    let mut out = GateMatrix::identity(total);
    for (a, &ma) in modes.iter().enumerate() {
        for (b, &mb) in modes.iter().enumerate() {
            out.elements[ma * total + mb] = gate.get(a, b);
        }
    }
    Ok(out)
}

/// Post-selected linear-optical CNOT on six modes
/// `(vac, 0_C, 1_C, 0_T, 1_T, vac)`.
///
/// Target rails are bracketed by 50/50 splitters. Between them, `1_C` and
/// `0_T` meet on a 1/3 splitter while `0_C` and `1_T` each couple to a vacuum
/// mode through 1/3 splitters. Every two-photon path that keeps one photon in
/// each qubit survives with amplitude 1/3.
pub fn cnot_gate() -> GateMatrix {
    use cnot_modes::*;
    let third = beam_splitter(1.0 / 3.0, 2.0 / 3.0).expect("valid splitter");
    let half = beam_splitter(0.5, 0.5).expect("valid splitter");
    // Splitter orientation decides which rail carries −√R. Between the
    // Hadamards the surviving amplitudes are +1/3 except for |1_C 1_T⟩, which
    // gets −1/3: a controlled-Z.
    let control_loss = embed(&third, &[VACUUM_CONTROL, CONTROL_0], 6).expect("valid modes");
    let central = embed(&third, &[CONTROL_1, TARGET_0], 6).expect("valid modes");
    let target_loss = embed(&third, &[VACUUM_TARGET, TARGET_1], 6).expect("valid modes");
    let hadamard = embed(&half, &[TARGET_0, TARGET_1], 6).expect("valid modes");
    cascade(&[&hadamard, &control_loss, &central, &target_loss, &hadamard]).expect("equal dims")
}

/// Prepares the control photon: `|1⟩_C → (|0⟩_C + |1⟩_C)/√2`.
pub fn prep_gate() -> GateMatrix {
    use cnot_modes::*;
    let splitter = beam_splitter(0.5, 0.5).expect("valid splitter");
    let rotation = compose(&phase_shifter(&[0.0, std::f64::consts::PI]), &splitter).expect("2x2");
    embed(&rotation, &[CONTROL_0, CONTROL_1], 6).expect("valid modes")
}

/// Projective measurement bases used for the Bell-state fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TomographyBasis {
    HH,
    VV,
    DD,
    AA,
    RR,
    LL,
}

impl TomographyBasis {
    pub const ALL: [TomographyBasis; 6] =
        [Self::HH, Self::VV, Self::DD, Self::AA, Self::RR, Self::LL];

    /// Single-qubit state `(⟨0|X⟩, ⟨1|X⟩)` projected on by this basis.
    pub fn qubit_state(self) -> [Complex64; 2] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = Complex64::new;
        match self {
            Self::HH => [c(1.0, 0.0), c(0.0, 0.0)],
            Self::VV => [c(0.0, 0.0), c(1.0, 0.0)],
            Self::DD => [c(r, 0.0), c(r, 0.0)],
            Self::AA => [c(r, 0.0), c(-r, 0.0)],
            Self::RR => [c(r, 0.0), c(0.0, r)],
            Self::LL => [c(r, 0.0), c(0.0, -r)],
        }
    }

    /// Sign of the term in `F = (pHH + pVV + pDD + pAA − pRR − pLL)/2`.
    pub fn fidelity_sign(self) -> f64 {
        match self {
            Self::RR | Self::LL => -1.0,
            _ => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::HH => "HH",
            Self::VV => "VV",
            Self::DD => "DD",
            Self::AA => "AA",
            Self::RR => "RR",
            Self::LL => "LL",
        }
    }
}

impl fmt::Display for TomographyBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TomographyBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownBasis(s.to_string()))
    }
}

/// 2×2 rotation taking `|X⟩` to `|1⟩` and its orthogonal complement to `|0⟩`.
pub fn rail_rotation(basis: TomographyBasis) -> GateMatrix {
    let [x0, x1] = basis.qubit_state();
    GateMatrix {
        dim: 2,
        elements: vec![x1, -x0, x0.conj(), x1.conj()],
    }
}

/// Rotates both qubits so that `|X⟩_C|X⟩_T` lands on `|1⟩_C|1⟩_T`.
pub fn tomography_gate(basis: TomographyBasis) -> GateMatrix {
    use cnot_modes::*;
    let r = rail_rotation(basis);
    let control = embed(&r, &[CONTROL_0, CONTROL_1], 6).expect("valid modes");
    let target = embed(&r, &[TARGET_0, TARGET_1], 6).expect("valid modes");
    compose(&target, &control).expect("equal dims")
}

/// Full circuit `U_tom · U_CNOT · U_prep` for one tomography basis.
pub fn bell_circuit(basis: TomographyBasis) -> GateMatrix {
    cascade(&[&prep_gate(), &cnot_gate(), &tomography_gate(basis)]).expect("equal dims")
}

/// Input modes `i, j` and detected output modes `k, l` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modes {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl Modes {
    pub fn new(i: usize, j: usize, k: usize, l: usize) -> Self {
        Self { i, j, k, l }
    }

    /// From one-based mode numbers.
    pub fn one_based(i: usize, j: usize, k: usize, l: usize) -> Result<Self> {
        if [i, j, k, l].contains(&0) {
            return Err(Error::ModeIndex("one-based mode numbers start at 1".into()));
        }
        Ok(Self::new(i - 1, j - 1, k - 1, l - 1))
    }

    /// Inputs 1, 2 and outputs 1, 2 of a two-mode splitter.
    pub fn hom() -> Self {
        Self::new(0, 1, 0, 1)
    }

    /// Control `1_C` and target `0_T` in, coincidence on `1_C`/`1_T` out.
    pub fn bell() -> Self {
        use cnot_modes::*;
        Self::new(CONTROL_1, TARGET_0, CONTROL_1, TARGET_1)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.i == self.j {
            return Err(Error::ModeIndex(format!(
                "input modes coincide (i = j = {})",
                self.i
            )));
        }
        if self.k == self.l {
            return Err(Error::ModeIndex(format!(
                "output modes coincide (k = l = {})",
                self.k
            )));
        }
        for m in [self.i, self.j, self.k, self.l] {
            if m >= dim {
                return Err(Error::ModeIndex(format!(
                    "mode {m} out of range for {dim} modes"
                )));
            }
        }
        Ok(())
    }
}

/// The gate coefficients entering the two-photon coincidence formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateQuad {
    /// `|U_li U_kj U*_ki U*_lj|`
    pub magnitude: f64,
    /// `Φ_U = arg(U_li U_kj U*_ki U*_lj)`
    pub phase: f64,
    /// `(|U_li|²|U_kj|², |U_lj|²|U_ki|²)`
    pub p0_terms: (f64, f64),
}

impl GateQuad {
    /// Classical (distinguishable-photon) coincidence probability.
    pub fn p0(&self) -> f64 {
        self.p0_terms.0 + self.p0_terms.1
    }

    /// `|Q| cos Φ_U`, computed without going through the angle.
    pub fn interference_weight(&self) -> f64 {
        self.magnitude * self.phase.cos()
    }
}

pub fn gate_quad(u: &GateMatrix, modes: Modes) -> Result<GateQuad> {
    modes.validate(u.dim())?;
    let Modes { i, j, k, l } = modes;
    let direct = u.get(l, i) * u.get(k, j);
    let exchange = u.get(l, j) * u.get(k, i);
    let q = direct * exchange.conj();
    Ok(GateQuad {
        magnitude: q.norm(),
        phase: q.arg(),
        p0_terms: (direct.norm_sqr(), exchange.norm_sqr()),
    })
}
