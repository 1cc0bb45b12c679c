use serde::{Deserialize, Serialize};

use super::prob::{check_distribution, normalize, STOCHASTIC_TOL};
use crate::error::{Error, Result};

/// A discrete memoryless channel `W(y|x,s,j)` driven by an i.i.d. state with
/// prior `Q_S` and an adversarial jammer symbol `j`, together with the
/// distortion measure used for state reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct StateChannel {
    nx: usize,
    ns: usize,
    nj: usize,
    ny: usize,
    ns_hat: usize,
    w: Vec<f64>,
    q_s: Vec<f64>,
    distortion: Vec<Vec<f64>>,
}

impl StateChannel {
    /// Builds a channel from a flat `[x][s][j][y]` tensor, checking every
    /// invariant at the internal tolerance.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nx: usize,
        ns: usize,
        nj: usize,
        ny: usize,
        ns_hat: usize,
        w: Vec<f64>,
        q_s: Vec<f64>,
        distortion: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let ch = Self {
            nx,
            ns,
            nj,
            ny,
            ns_hat,
            w,
            q_s,
            distortion,
        };
        ch.check(STOCHASTIC_TOL)?;
        Ok(ch)
    }

    /// Builds a channel from nested `w[x][s][j][y]` rows.
    pub fn from_nested(
        w: &[Vec<Vec<Vec<f64>>>],
        q_s: Vec<f64>,
        distortion: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let raw = RawChannel::from_nested(w, q_s, distortion)?;
        raw.validate(STOCHASTIC_TOL)
    }

    fn check(&self, tol: f64) -> Result<()> {
        let (nx, ns, nj, ny) = (self.nx, self.ns, self.nj, self.ny);
        if nx == 0 || ns == 0 || nj == 0 || ny == 0 || self.ns_hat == 0 {
            return Err(Error::DimensionMismatch(
                "alphabet sizes must be positive".into(),
            ));
        }
        if self.w.len() != nx * ns * nj * ny {
            return Err(Error::DimensionMismatch(format!(
                "W has {} entries, expected {}x{}x{}x{}",
                self.w.len(),
                nx,
                ns,
                nj,
                ny
            )));
        }
        if self.q_s.len() != ns {
            return Err(Error::DimensionMismatch(format!(
                "Qs has {} entries, expected {}",
                self.q_s.len(),
                ns
            )));
        }
        if self.distortion.len() != ns || self.distortion.iter().any(|r| r.len() != self.ns_hat) {
            return Err(Error::DimensionMismatch(format!(
                "distortion must be {}x{}",
                ns, self.ns_hat
            )));
        }
        for x in 0..nx {
            for s in 0..ns {
                for j in 0..nj {
                    check_distribution(self.row(x, s, j), tol, &[x, s, j])?;
                }
            }
        }
        check_distribution(&self.q_s, tol, &[])?;
        for (s, row) in self.distortion.iter().enumerate() {
            for (t, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::NegativeEntry {
                        index: vec![s, t],
                        value: d,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ns(&self) -> usize {
        self.ns
    }
    pub fn nj(&self) -> usize {
        self.nj
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn ns_hat(&self) -> usize {
        self.ns_hat
    }
    pub fn q_s(&self) -> &[f64] {
        &self.q_s
    }
    pub fn distortion(&self) -> &[Vec<f64>] {
        &self.distortion
    }

    #[inline]
    pub fn row(&self, x: usize, s: usize, j: usize) -> &[f64] {
        let off = ((x * self.ns + s) * self.nj + j) * self.ny;
        &self.w[off..off + self.ny]
    }

    #[inline]
    pub fn w(&self, x: usize, s: usize, j: usize, y: usize) -> f64 {
        self.w[((x * self.ns + s) * self.nj + j) * self.ny + y]
    }

    /// Same channel with a different state prior.
    pub fn with_state_prior(&self, q_s: Vec<f64>) -> Result<Self> {
        let mut ch = self.clone();
        ch.q_s = q_s;
        ch.check(STOCHASTIC_TOL)?;
        Ok(ch)
    }

    pub fn to_raw(&self) -> RawChannel {
        let mut w = Vec::with_capacity(self.nx);
        for x in 0..self.nx {
            let mut ws = Vec::with_capacity(self.ns);
            for s in 0..self.ns {
                ws.push((0..self.nj).map(|j| self.row(x, s, j).to_vec()).collect());
            }
            w.push(ws);
        }
        RawChannel {
            nx: self.nx,
            ns: self.ns,
            nj: self.nj,
            ny: self.ny,
            ns_hat: self.ns_hat,
            w,
            q_s: self.q_s.clone(),
            distortion: self.distortion.clone(),
        }
    }
}

/// Unchecked channel data as it appears in a channel file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawChannel {
    pub nx: usize,
    pub ns: usize,
    pub nj: usize,
    pub ny: usize,
    pub ns_hat: usize,
    #[serde(rename = "W")]
    pub w: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(rename = "Qs")]
    pub q_s: Vec<f64>,
    pub distortion: Vec<Vec<f64>>,
}

impl RawChannel {
    pub fn from_nested(
        w: &[Vec<Vec<Vec<f64>>>],
        q_s: Vec<f64>,
        distortion: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let nx = w.len();
        let ns = w.first().map_or(0, |v| v.len());
        let nj = w.first().and_then(|v| v.first()).map_or(0, |v| v.len());
        let ny = w
            .first()
            .and_then(|v| v.first())
            .and_then(|v| v.first())
            .map_or(0, |v| v.len());
        let ns_hat = distortion.first().map_or(0, |r| r.len());
        Ok(Self {
            nx,
            ns,
            nj,
            ny,
            ns_hat,
            w: w.to_vec(),
            q_s,
            distortion,
        })
    }

    /// Checks shapes and invariants with row-sum tolerance `tol`, then
    /// renormalizes every row so the result meets the internal tolerance.
    pub fn validate(&self, tol: f64) -> Result<StateChannel> {
        let (nx, ns, nj, ny) = (self.nx, self.ns, self.nj, self.ny);
        if self.w.len() != nx {
            return Err(Error::DimensionMismatch(format!(
                "W has {} x-slices, nx = {}",
                self.w.len(),
                nx
            )));
        }
        let mut flat = Vec::with_capacity(nx * ns * nj * ny);
        for (x, wx) in self.w.iter().enumerate() {
            if wx.len() != ns {
                return Err(Error::DimensionMismatch(format!(
                    "W[{x}] has {} s-slices, ns = {ns}",
                    wx.len()
                )));
            }
            for (s, wxs) in wx.iter().enumerate() {
                if wxs.len() != nj {
                    return Err(Error::DimensionMismatch(format!(
                        "W[{x}][{s}] has {} j-rows, nj = {nj}",
                        wxs.len()
                    )));
                }
                for (j, row) in wxs.iter().enumerate() {
                    if row.len() != ny {
                        return Err(Error::DimensionMismatch(format!(
                            "W[{x}][{s}][{j}] has {} entries, ny = {ny}",
                            row.len()
                        )));
                    }
                    check_distribution(row, tol, &[x, s, j])?;
                    let mut r = row.clone();
                    normalize(&mut r);
                    flat.extend(r);
                }
            }
        }
        if self.q_s.len() != ns {
            return Err(Error::DimensionMismatch(format!(
                "Qs has {} entries, ns = {ns}",
                self.q_s.len()
            )));
        }
        check_distribution(&self.q_s, tol, &[])?;
        let mut q_s = self.q_s.clone();
        normalize(&mut q_s);
        StateChannel::new(
            nx,
            ns,
            nj,
            ny,
            self.ns_hat,
            flat,
            q_s,
            self.distortion.clone(),
        )
    }
}

/// Validates raw channel data at the ingest tolerance `1e-9`.
pub fn validate_channel(raw: &RawChannel) -> Result<StateChannel> {
    raw.validate(1e-9)
}

/// Composite input alphabet `(x, u)` flattened as `x * nu + u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Composite {
    pub nx: usize,
    pub nu: usize,
}

impl Composite {
    #[inline]
    pub fn index(&self, x: usize, u: usize) -> usize {
        x * self.nu + u
    }
    #[inline]
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.nu, i % self.nu)
    }
}

/// A stateless arbitrarily varying channel `q(y|in,j)`.
///
/// Inputs that carry no probability mass in the law that induced the channel
/// are kept as zero rows with `defined[in] == false`.
#[derive(Debug, Clone, PartialEq)]
pub struct AVChannel {
    n_in: usize,
    nj: usize,
    ny: usize,
    q: Vec<f64>,
    defined: Vec<bool>,
    composite: Option<Composite>,
}

impl AVChannel {
    /// Builds a fully defined AVC from nested rows `q[in][j][y]`.
    pub fn from_nested(q: &[Vec<Vec<f64>>]) -> Result<Self> {
        let n_in = q.len();
        let nj = q.first().map_or(0, |v| v.len());
        let ny = q.first().and_then(|v| v.first()).map_or(0, |v| v.len());
        if n_in == 0 || nj == 0 || ny == 0 {
            return Err(Error::DimensionMismatch("empty AVC".into()));
        }
        let mut flat = Vec::with_capacity(n_in * nj * ny);
        for (i, qi) in q.iter().enumerate() {
            if qi.len() != nj {
                return Err(Error::DimensionMismatch(format!(
                    "input {i} has {} jammer rows, expected {nj}",
                    qi.len()
                )));
            }
            for (j, row) in qi.iter().enumerate() {
                if row.len() != ny {
                    return Err(Error::DimensionMismatch(format!(
                        "row ({i},{j}) has {} entries, expected {ny}",
                        row.len()
                    )));
                }
                check_distribution(row, STOCHASTIC_TOL, &[i, j])?;
                flat.extend_from_slice(row);
            }
        }
        Ok(Self {
            n_in,
            nj,
            ny,
            q: flat,
            defined: vec![true; n_in],
            composite: None,
        })
    }

    /// Builds from a flat tensor with an explicit definedness mask.
    pub(crate) fn from_parts(
        n_in: usize,
        nj: usize,
        ny: usize,
        q: Vec<f64>,
        defined: Vec<bool>,
        composite: Option<Composite>,
    ) -> Self {
        debug_assert_eq!(q.len(), n_in * nj * ny);
        Self {
            n_in,
            nj,
            ny,
            q,
            defined,
            composite,
        }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }
    pub fn nj(&self) -> usize {
        self.nj
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn composite(&self) -> Option<Composite> {
        self.composite
    }
    pub fn is_defined(&self, i: usize) -> bool {
        self.defined[i]
    }
    pub fn defined_mask(&self) -> &[bool] {
        &self.defined
    }

    #[inline]
    pub fn row(&self, i: usize, j: usize) -> &[f64] {
        let off = (i * self.nj + j) * self.ny;
        &self.q[off..off + self.ny]
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize, y: usize) -> f64 {
        self.q[(i * self.nj + j) * self.ny + y]
    }

    /// Errors with `ZeroMassInput` if input `i` is undefined.
    pub fn require_defined(&self, i: usize) -> Result<()> {
        if i >= self.n_in {
            return Err(Error::IndexError(format!(
                "input {i} out of range (n_in = {})",
                self.n_in
            )));
        }
        if !self.defined[i] {
            let label = match self.composite {
                Some(c) => {
                    let (x, u) = c.split(i);
                    format!("(u={u}, x={x})")
                }
                None => format!("{i}"),
            };
            return Err(Error::ZeroMassInput(label));
        }
        Ok(())
    }

    /// Restriction to the inputs listed in `keep`, in that order.
    pub fn restrict_inputs(&self, keep: &[usize]) -> Self {
        let mut q = Vec::with_capacity(keep.len() * self.nj * self.ny);
        for &i in keep {
            for j in 0..self.nj {
                q.extend_from_slice(self.row(i, j));
            }
        }
        Self {
            n_in: keep.len(),
            nj: self.nj,
            ny: self.ny,
            q,
            defined: keep.iter().map(|&i| self.defined[i]).collect(),
            composite: None,
        }
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.n_in)
            .map(|i| (0..self.nj).map(|j| self.row(i, j).to_vec()).collect())
            .collect()
    }
}

/// A row-stochastic matrix `p(col|row)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    rows: usize,
    cols: usize,
    p: Vec<f64>,
}

impl Kernel {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch("empty kernel".into()));
        }
        let mut p = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "kernel row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            check_distribution(row, 1e-9, &[i])?;
            let mut row = row.clone();
            normalize(&mut row);
            p.extend(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            p,
        })
    }

    pub(crate) fn from_flat_unchecked(rows: usize, cols: usize, p: Vec<f64>) -> Self {
        debug_assert_eq!(p.len(), rows * cols);
        Self { rows, cols, p }
    }

    /// Deterministic kernel `row -> f(row)`.
    pub fn deterministic(rows: usize, cols: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut p = vec![0.0; rows * cols];
        for r in 0..rows {
            p[r * cols + f(r)] = 1.0;
        }
        Self { rows, cols, p }
    }

    /// Every row equal to `dist`.
    pub fn constant(rows: usize, dist: &[f64]) -> Self {
        let cols = dist.len();
        let mut p = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            p.extend_from_slice(dist);
        }
        Self { rows, cols, p }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.p[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.p[r * self.cols + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_example() -> Vec<Vec<Vec<Vec<f64>>>> {
        vec![
            vec![
                vec![vec![1.0, 0.0], vec![0.85, 0.15]],
                vec![vec![1.0, 0.0], vec![0.35, 0.65]],
            ],
            vec![
                vec![vec![0.15, 0.85], vec![0.0, 1.0]],
                vec![vec![0.65, 0.35], vec![0.0, 1.0]],
            ],
        ]
    }

    #[test]
    fn accepts_binary_example() {
        let ch = StateChannel::from_nested(
            &binary_example(),
            vec![0.9, 0.1],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap();
        assert_eq!((ch.nx(), ch.ns(), ch.nj(), ch.ny()), (2, 2, 2, 2));
        assert_eq!(ch.w(1, 0, 0, 1), 0.85);
    }

    #[test]
    fn rejects_short_row() {
        let mut w = binary_example();
        w[0][1][1] = vec![0.5, 0.4];
        let err = StateChannel::from_nested(&w, vec![0.9, 0.1], vec![vec![0.0; 2]; 2]);
        assert!(
            matches!(err, Err(Error::NonStochasticRow { ref index, .. }) if index == &vec![0, 1, 1])
        );
    }

    #[test]
    fn rejects_negative_distortion() {
        let err = StateChannel::from_nested(
            &binary_example(),
            vec![0.9, 0.1],
            vec![vec![0.0, -1.0], vec![1.0, 0.0]],
        );
        assert!(matches!(err, Err(Error::NegativeEntry { .. })));
    }

    #[test]
    fn rejects_ragged_tensor() {
        let mut w = binary_example();
        w[1].pop();
        let err = StateChannel::from_nested(&w, vec![0.9, 0.1], vec![vec![0.0; 2]; 2]);
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn ingest_renormalizes_within_tolerance() {
        let mut w = binary_example();
        w[0][0][0] = vec![1.0 + 5e-10, 0.0];
        let raw = RawChannel::from_nested(&w, vec![0.9, 0.1], vec![vec![0.0; 2]; 2]).unwrap();
        let ch = validate_channel(&raw).unwrap();
        assert_eq!(ch.row(0, 0, 0), &[1.0, 0.0]);
    }

    #[test]
    fn undefined_input_reports_zero_mass() {
        let avc = AVChannel::from_parts(
            2,
            1,
            1,
            vec![1.0, 0.0],
            vec![true, false],
            Some(Composite { nx: 1, nu: 2 }),
        );
        assert!(avc.require_defined(0).is_ok());
        assert_eq!(
            avc.require_defined(1),
            Err(Error::ZeroMassInput("(u=1, x=0)".into()))
        );
    }
}
