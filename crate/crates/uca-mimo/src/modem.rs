//! Modulation and detection for the square (N transmit, N receive) link.
//!
//! The transmitter spreads N information symbols across all antennas with
//! the unitary `+j` transform and applies the conjugate transmit
//! compensation phases: `x = conj(Gamma) * W * s`. No cyclic prefix is
//! added; the N symbols occupy one channel use, so the symbol rate is N.
//! The receiver undoes the receive phases and the spreading,
//! `y_t = W^H * conj(Delta) * y`, after which — exactly on the circulant
//! model channel — the samples decouple into `y_t[k] = g_k * s_k` with the
//! bin-ordered subchannel gains, and maximum-likelihood detection reduces to
//! N independent nearest-point decisions. The exhaustive joint search over
//! all K^N hypotheses is kept as the reference detector of the traditional
//! one-symbol-per-antenna system.

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::linalg::cis;
use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// Default ceiling on K^N for the exhaustive detector.
pub const DEFAULT_HYPOTHESIS_CAP: u128 = 1 << 24;

/// A unit-average-energy signal alphabet of power-of-two size with Gray bit
/// labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    bits_per_symbol: u32,
}

impl Constellation {
    /// BPSK: bit 0 maps to +1, bit 1 to -1.
    pub fn bpsk() -> Self {
        Self::gray_psk_with_offset("bpsk", 2, 0.0).unwrap()
    }

    /// Gray QPSK with the 00 point at (1 + j)/sqrt(2).
    pub fn qpsk() -> Self {
        Self::gray_psk_with_offset("qpsk", 4, std::f64::consts::FRAC_PI_4).unwrap()
    }

    /// Gray-labeled K-ary PSK starting at angle zero.
    pub fn gray_psk(k: usize) -> Result<Self> {
        Self::gray_psk_with_offset(&format!("psk{k}"), k, 0.0)
    }

    fn gray_psk_with_offset(name: &str, k: usize, offset: f64) -> Result<Self> {
        let points = (0..k)
            .map(|j| cis(offset + TAU * j as f64 / k as f64))
            .collect();
        Self::from_points(name, points)
    }

    /// Wrap an explicit alphabet. The size must be a power of two, the
    /// points distinct, and the average energy 1 within 1e-12. Point order
    /// is significant: index `j` carries the Gray label `j ^ (j >> 1)`, and
    /// detector ties break toward the lowest index.
    pub fn from_points(name: &str, points: Vec<Complex64>) -> Result<Self> {
        let k = points.len();
        if k < 2 || !k.is_power_of_two() {
            return Err(Error::InvalidConfig {
                field: "constellation",
                reason: format!("size must be a power of two >= 2, got {k}"),
            });
        }
        for (i, a) in points.iter().enumerate() {
            for b in points.iter().skip(i + 1) {
                if (a - b).norm() == 0.0 {
                    return Err(Error::InvalidConfig {
                        field: "constellation",
                        reason: "points must be distinct".into(),
                    });
                }
            }
        }
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / k as f64;
        if (energy - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig {
                field: "constellation",
                reason: format!("average energy must be 1, got {energy}"),
            });
        }
        Ok(Constellation {
            name: name.to_string(),
            points,
            bits_per_symbol: k.trailing_zeros(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    /// True for the canonical two-point real alphabet.
    pub fn is_bpsk(&self) -> bool {
        self.points.len() == 2
            && (self.points[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12
            && (self.points[1] + Complex64::new(1.0, 0.0)).norm() < 1e-12
    }

    /// Index of the closest point; ties break toward the lower index.
    pub fn nearest_index(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (j, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        best
    }

    fn point_for_bits(&self, bits: &[u8]) -> Result<Complex64> {
        let mut label = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidConfig {
                    field: "bits",
                    reason: format!("bit values must be 0 or 1, got {b}"),
                });
            }
            label = (label << 1) | b as usize;
        }
        Ok(self.points[gray_to_index(label)])
    }

    fn bits_for_index(&self, index: usize, out: &mut Vec<u8>) {
        let label = index ^ (index >> 1);
        for shift in (0..self.bits_per_symbol).rev() {
            out.push(((label >> shift) & 1) as u8);
        }
    }
}

fn gray_to_index(label: usize) -> usize {
    let mut idx = label;
    let mut shift = 1;
    while (idx >> shift) != 0 {
        idx ^= idx >> shift;
        shift <<= 1;
    }
    idx
}

/// Map a bit sequence onto `n` Gray-labeled symbols, most significant bit of
/// each symbol first.
pub fn map_bits(bits: &[u8], constellation: &Constellation, n: usize) -> Result<Vec<Complex64>> {
    let bps = constellation.bits_per_symbol() as usize;
    if bits.len() != n * bps {
        return Err(Error::DimensionMismatch(format!(
            "{} bits cannot fill {n} symbols of {bps} bits",
            bits.len()
        )));
    }
    bits.chunks(bps)
        .map(|chunk| constellation.point_for_bits(chunk))
        .collect()
}

/// Recover the bit sequence from detected symbols (nearest-point slicing, so
/// exact constellation points round-trip bit-exactly).
pub fn demap(symbols: &[Complex64], constellation: &Constellation) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * constellation.bits_per_symbol() as usize);
    for &s in symbols {
        let idx = constellation.nearest_index(s);
        constellation.bits_for_index(idx, &mut bits);
    }
    bits
}

/// Unitary spreading transform pair of a given size.
///
/// `forward` applies `W` with elements `(1/sqrt(N)) * exp(+j*2*pi*n*l/N)`
/// (0-based); `inverse` applies its conjugate transpose. Both preserve the
/// Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DftOperator {
    size: usize,
}

impl DftOperator {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyInput("transform size"));
        }
        Ok(DftOperator { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn check(&self, v: &[Complex64]) -> Result<()> {
        if v.len() != self.size {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} does not match transform size {}",
                v.len(),
                self.size
            )));
        }
        Ok(())
    }

    /// x = W s.
    pub fn forward(&self, s: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(s)?;
        Ok(self.apply(s, 1.0))
    }

    /// s = W^H x.
    pub fn inverse(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(x)?;
        Ok(self.apply(x, -1.0))
    }

    fn apply(&self, v: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = self.size;
        let root = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|k| {
                let acc: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(l, s)| s * cis(sign * TAU * (k * l) as f64 / n as f64))
                    .sum();
                acc * root
            })
            .collect()
    }
}

/// Transmit-side processing: `x = conj(Gamma) * W * s`. Each information
/// symbol rides on every antenna; the transform keeps `||x|| = ||s||`.
pub fn modulate(s: &[Complex64], gamma: &[Complex64]) -> Result<Vec<Complex64>> {
    if s.len() != gamma.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} symbols vs {} transmit phases",
            s.len(),
            gamma.len()
        )));
    }
    let spread = DftOperator::new(s.len())?.forward(s)?;
    Ok(spread
        .iter()
        .zip(gamma)
        .map(|(x, g)| x * g.conj())
        .collect())
}

/// Receive-side processing: `y_t = W^H * conj(Delta) * y`. The combined
/// transform is unitary, so white noise stays white.
pub fn receive_transform(y: &[Complex64], delta: &[Complex64]) -> Result<Vec<Complex64>> {
    if y.len() != delta.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} receive samples vs {} receive phases",
            y.len(),
            delta.len()
        )));
    }
    let compensated: Vec<Complex64> = y.iter().zip(delta).map(|(v, d)| v * d.conj()).collect();
    DftOperator::new(y.len())?.inverse(&compensated)
}

/// Symbol-wise ML detection on the diagonalized samples: independently per
/// subchannel `k`, pick the constellation point minimizing
/// `|y_t[k] - gains[k] * point|^2`. Pass the bin-ordered gains
/// ([`crate::channel::CirculantChannel::subchannel_gains`]). Ties break
/// toward the lowest constellation index, so a dead subchannel yields point
/// 0.
pub fn fast_ml_detect(
    y_t: &[Complex64],
    gains: &[Complex64],
    constellation: &Constellation,
) -> Result<Vec<Complex64>> {
    if y_t.len() != gains.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} transformed samples vs {} subchannel gains",
            y_t.len(),
            gains.len()
        )));
    }
    Ok(y_t
        .iter()
        .zip(gains)
        .map(|(&y, &g)| {
            let mut best = Complex64::new(0.0, 0.0);
            let mut best_d = f64::INFINITY;
            for &p in constellation.points() {
                let d = (y - g * p).norm_sqr();
                if d < best_d {
                    best_d = d;
                    best = p;
                }
            }
            best
        })
        .collect())
}

/// Exhaustive joint ML detector for the traditional one-symbol-per-antenna
/// system: `argmin over s in Omega^N of ||y - H s||^2`.
///
/// Walks all K^N hypotheses in lexicographic index order (last position
/// fastest), so ties break toward the lexicographically smallest index
/// tuple; small hypothesis sets are precomputed. Refuses to build when K^N
/// exceeds the cap.
#[derive(Debug, Clone)]
pub struct ExhaustiveDetector {
    /// columns[col * K + j] = column `col` of H scaled by point `j`.
    columns: Vec<Vec<Complex64>>,
    n_tx: usize,
    n_rx: usize,
    k: usize,
    points: Vec<Complex64>,
    /// Flattened count x n_rx hypothesis receive vectors, when small.
    table: Option<Vec<Complex64>>,
    count: u128,
}

const PRECOMPUTE_LIMIT: u128 = 1 << 16;

impl ExhaustiveDetector {
    pub fn new(
        h: &ChannelMatrix,
        constellation: &Constellation,
        cap: u128,
    ) -> Result<ExhaustiveDetector> {
        let cfg = h.config();
        if cfg.n_tx != cfg.n_rx {
            return Err(Error::NonSquareLink {
                n_tx: cfg.n_tx,
                n_rx: cfg.n_rx,
            });
        }
        let n = cfg.n_tx;
        let k = constellation.size();
        let count = (k as u128)
            .checked_pow(n as u32)
            .ok_or(Error::HypothesisCapExceeded {
                count: u128::MAX,
                cap,
            })?;
        if count > cap {
            return Err(Error::HypothesisCapExceeded { count, cap });
        }
        let mut columns = Vec::with_capacity(n * k);
        for col in 0..n {
            for &p in constellation.points() {
                columns.push(
                    (0..n)
                        .map(|row| h.entries().get(row, col) * p)
                        .collect::<Vec<_>>(),
                );
            }
        }
        let mut detector = ExhaustiveDetector {
            columns,
            n_tx: n,
            n_rx: n,
            k,
            points: constellation.points().to_vec(),
            table: None,
            count,
        };
        if count <= PRECOMPUTE_LIMIT {
            let mut table = Vec::with_capacity((count as usize) * n);
            let mut indices = vec![0usize; n];
            loop {
                let mut y_h = vec![Complex64::new(0.0, 0.0); n];
                for (col, &j) in indices.iter().enumerate() {
                    for (row, value) in detector.column(col, j).iter().enumerate() {
                        y_h[row] += value;
                    }
                }
                table.extend_from_slice(&y_h);
                if !advance(&mut indices, detector.k) {
                    break;
                }
            }
            detector.table = Some(table);
        }
        Ok(detector)
    }

    fn column(&self, col: usize, point_index: usize) -> &[Complex64] {
        &self.columns[col * self.k + point_index]
    }

    pub fn hypothesis_count(&self) -> u128 {
        self.count
    }

    /// Detect one receive vector; returns the N decided symbols.
    pub fn detect(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.n_rx {
            return Err(Error::DimensionMismatch(format!(
                "{} receive samples vs {} antennas",
                y.len(),
                self.n_rx
            )));
        }
        let mut best_indices = vec![0usize; self.n_tx];
        let mut best_d = f64::INFINITY;
        if let Some(table) = &self.table {
            for (h, y_h) in table.chunks(self.n_rx).enumerate() {
                let d: f64 = y.iter().zip(y_h).map(|(a, b)| (a - b).norm_sqr()).sum();
                if d < best_d {
                    best_d = d;
                    decode_flat(h, self.k, &mut best_indices);
                }
            }
        } else {
            let mut indices = vec![0usize; self.n_tx];
            let mut y_h = vec![Complex64::new(0.0, 0.0); self.n_rx];
            loop {
                for v in y_h.iter_mut() {
                    *v = Complex64::new(0.0, 0.0);
                }
                for (col, &j) in indices.iter().enumerate() {
                    for (row, value) in self.column(col, j).iter().enumerate() {
                        y_h[row] += value;
                    }
                }
                let d: f64 = y.iter().zip(&y_h).map(|(a, b)| (a - b).norm_sqr()).sum();
                if d < best_d {
                    best_d = d;
                    best_indices.copy_from_slice(&indices);
                }
                if !advance(&mut indices, self.k) {
                    break;
                }
            }
        }
        Ok(best_indices.iter().map(|&j| self.points[j]).collect())
    }
}

/// Odometer increment in lexicographic order, last digit fastest. Returns
/// false after the final tuple.
fn advance(indices: &mut [usize], k: usize) -> bool {
    for digit in indices.iter_mut().rev() {
        *digit += 1;
        if *digit < k {
            return true;
        }
        *digit = 0;
    }
    false
}

/// Flat hypothesis number back to the index tuple (same lexicographic order
/// `advance` walks).
fn decode_flat(mut h: usize, k: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = h % k;
        h /= k;
    }
}

/// One-shot exhaustive joint ML detection with the default hypothesis cap.
pub fn traditional_ml_detect(
    y: &[Complex64],
    h: &ChannelMatrix,
    constellation: &Constellation,
) -> Result<Vec<Complex64>> {
    ExhaustiveDetector::new(h, constellation, DEFAULT_HYPOTHESIS_CAP)?.detect(y)
}
