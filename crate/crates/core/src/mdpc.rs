//! Multidimensional parity-check codes MDPC(nD/mL).
//!
//! `K = m^n` data bits fill an n-cube of side `m`, which is extended to side
//! `m + 1` so that every axis-aligned line of the extended cube has even
//! parity. That adds `R = (m+1)^n − m^n` parity bits.
//!
//! Bit ordering on the wire: cube coordinates are row-major with axis 0 most
//! significant. The data bits come first, in row-major order over the `m^n`
//! data cells; the parity bits follow, in row-major order over the remaining
//! cells of the extended cube (those with some coordinate equal to `m`).
//!
//! The decoder is a hard-decision bit-flipping loop. In every iteration each
//! cell counts its violated incident lines; the cells with the highest count
//! flip, provided that count exceeds n/2. It stops once every line is even,
//! when no cell qualifies, or after the iteration budget.
//!
//! This corrects every pattern of up to `t = 2^(n−1) − 1` errors for n = 2
//! and n = 3. For n ≥ 4 only single errors are guaranteed; the 4-cube code
//! MDPC(4D/1L) already has uncorrected weight-4 patterns.

use alloc::vec;
use alloc::vec::Vec;

/// Default iteration budget for [`MdpcCode::decode`].
pub const DEFAULT_MAX_ITER: usize = 20;

/// Largest extended cube the codec builds, in cells.
const MAX_CELLS: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MdpcError {
    #[error("dimension {0} is below 2")]
    Dimension(u32),
    #[error("side length must be at least 1")]
    Side,
    #[error("({m}+1)^{n} cells exceeds the supported block size")]
    TooLarge { n: u32, m: usize },
    #[error("expected {expected} bits, got {got}")]
    Length { expected: usize, got: usize },
    #[error("value {value} at index {index} is not a bit")]
    Bit { index: usize, value: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdpcDecoded {
    /// The `K` data bits after decoding.
    pub data: Vec<u8>,
    /// Total bit flips applied.
    pub flips: usize,
    pub iterations: usize,
    /// Every line of the extended cube had even parity when decoding stopped.
    pub parity_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdpcCode {
    n: u32,
    m: usize,
    // Stride of each axis in the extended cube; axis 0 is the slowest.
    strides: Vec<usize>,
    // Wire index -> cell of the extended cube.
    order: Vec<usize>,
}

impl MdpcCode {
    pub fn new(n: u32, m: usize) -> Result<Self, MdpcError> {
        if n < 2 {
            return Err(MdpcError::Dimension(n));
        }
        if m < 1 {
            return Err(MdpcError::Side);
        }
        let side = m + 1;
        let cells =
            (side as u64).checked_pow(n).filter(|&c| c <= MAX_CELLS).ok_or(MdpcError::TooLarge { n, m })? as usize;

        let strides: Vec<usize> = (0..n).map(|a| side.pow(n - 1 - a)).collect();
        let data_cells = m.pow(n);
        let mut order = Vec::with_capacity(cells);
        let mut parity = Vec::with_capacity(cells - data_cells);
        for cell in 0..cells {
            if strides.iter().all(|&st| (cell / st) % side < m) {
                order.push(cell);
            } else {
                parity.push(cell);
            }
        }
        order.extend(parity);
        Ok(Self { n, m, strides, order })
    }

    pub fn dimensions(&self) -> u32 {
        self.n
    }

    pub fn side(&self) -> usize {
        self.m
    }

    /// Data bits per block, m^n.
    pub fn k(&self) -> usize {
        self.m.pow(self.n)
    }

    /// Parity bits per block, (m+1)^n − m^n.
    pub fn r(&self) -> usize {
        self.order.len() - self.k()
    }

    /// Bits per block on the wire, (m+1)^n.
    pub fn block_len(&self) -> usize {
        self.order.len()
    }

    pub fn min_distance(&self) -> usize {
        1 << self.n
    }

    /// Guaranteed correctable bit errors, 2^(n−1) − 1.
    pub fn t(&self) -> usize {
        (1 << (self.n - 1)) - 1
    }

    #[inline]
    fn coord(&self, cell: usize, axis: usize) -> usize {
        (cell / self.strides[axis]) % (self.m + 1)
    }

    fn check_bits(bits: &[u8], expected: usize) -> Result<(), MdpcError> {
        if bits.len() != expected {
            return Err(MdpcError::Length { expected, got: bits.len() });
        }
        match bits.iter().position(|&b| b > 1) {
            Some(index) => Err(MdpcError::Bit { index, value: bits[index] }),
            None => Ok(()),
        }
    }

    /// Parity bits for `data`, in wire order.
    pub fn encode(&self, data: &[u8]) -> Result<Vec<u8>, MdpcError> {
        Self::check_bits(data, self.k())?;
        let mut cube = vec![0u8; self.block_len()];
        for (&cell, &bit) in self.order.iter().zip(data) {
            cube[cell] = bit;
        }
        // Axis a fills the cells with coordinate m on a and < m on every later
        // axis; each reads only cells written by data or by earlier axes.
        let n = self.n as usize;
        for axis in 0..n {
            let stride = self.strides[axis];
            for cell in 0..cube.len() {
                if self.coord(cell, axis) != self.m || (axis + 1..n).any(|b| self.coord(cell, b) == self.m) {
                    continue;
                }
                let base = cell - self.m * stride;
                cube[cell] = (0..self.m).fold(0, |acc, v| acc ^ cube[base + v * stride]);
            }
        }
        Ok(self.order[self.k()..].iter().map(|&cell| cube[cell]).collect())
    }

    /// Data followed by parity, in wire order.
    pub fn encode_block(&self, data: &[u8]) -> Result<Vec<u8>, MdpcError> {
        let mut block = data.to_vec();
        block.extend(self.encode(data)?);
        Ok(block)
    }

    /// Places a wire-ordered block into the extended cube.
    pub fn to_cube(&self, block: &[u8]) -> Result<Vec<u8>, MdpcError> {
        Self::check_bits(block, self.block_len())?;
        let mut cube = vec![0u8; self.block_len()];
        for (&cell, &bit) in self.order.iter().zip(block) {
            cube[cell] = bit;
        }
        Ok(cube)
    }

    /// Parity of every line along `axis`, indexed by the line's cell with
    /// coordinate 0 on that axis (other entries are unused).
    fn line_parities(&self, cube: &[u8], axis: usize) -> Vec<u8> {
        let stride = self.strides[axis];
        let mut parity = vec![0u8; cube.len()];
        for (cell, &bit) in cube.iter().enumerate() {
            parity[cell - self.coord(cell, axis) * stride] ^= bit;
        }
        parity
    }

    /// Number of odd-parity lines in an extended cube.
    pub fn violated_lines(&self, cube: &[u8]) -> usize {
        (0..self.n as usize)
            .map(|axis| {
                let parity = self.line_parities(cube, axis);
                (0..cube.len()).filter(|&c| self.coord(c, axis) == 0 && parity[c] != 0).count()
            })
            .sum()
    }

    pub fn decode(&self, received: &[u8], max_iter: usize) -> Result<MdpcDecoded, MdpcError> {
        let mut cube = self.to_cube(received)?;
        let n = self.n as usize;
        let side = self.m + 1;
        let mut parities: Vec<Vec<u8>> = (0..n).map(|a| self.line_parities(&cube, a)).collect();
        // counts[cell]: odd lines through the cell, kept in step with `parities`.
        let mut counts = vec![0u8; cube.len()];
        let mut odd_lines = 0usize;
        for (axis, parity) in parities.iter().enumerate() {
            let stride = self.strides[axis];
            for base in 0..cube.len() {
                if parity[base] != 0 && self.coord(base, axis) == 0 {
                    odd_lines += 1;
                    (0..side).for_each(|v| counts[base + v * stride] += 1);
                }
            }
        }

        let mut flips = 0;
        let mut iterations = 0;
        let mut to_flip = Vec::new();
        while odd_lines > 0 {
            let worst = counts.iter().copied().max().unwrap_or(0) as usize;
            if 2 * worst <= n || iterations == max_iter {
                break;
            }
            to_flip.clear();
            to_flip.extend(counts.iter().enumerate().filter(|&(_, &k)| k as usize == worst).map(|(c, _)| c));
            for &cell in &to_flip {
                cube[cell] ^= 1;
                for (axis, parity) in parities.iter_mut().enumerate() {
                    let stride = self.strides[axis];
                    let base = cell - self.coord(cell, axis) * stride;
                    parity[base] ^= 1;
                    if parity[base] != 0 {
                        odd_lines += 1;
                        (0..side).for_each(|v| counts[base + v * stride] += 1);
                    } else {
                        odd_lines -= 1;
                        (0..side).for_each(|v| counts[base + v * stride] -= 1);
                    }
                }
            }
            flips += to_flip.len();
            iterations += 1;
        }

        let data = self.order[..self.k()].iter().map(|&cell| cube[cell]).collect();
        Ok(MdpcDecoded { data, flips, iterations, parity_ok: odd_lines == 0 })
    }
}
