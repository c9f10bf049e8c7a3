//! Tensor-product code construction and slice bookkeeping.
//!
//! An `l`-dimensional tensor code (`l` in 1..=3) stores `n^l` bits so that
//! every axis-aligned 1-D slice is a component codeword. Information bits
//! occupy the positions whose coordinates are all below `k`; encoding runs
//! one axis pass at a time in row/column/tube order, and linearity makes the
//! parity-of-parity regions consistent for every axis.

use std::io::Write;

use thiserror::Error;

use crate::component_code::{bits_to_mask, mask_to_bits, ComponentCode};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("tensor dimension count must be 1, 2 or 3, got {l}")]
    BadDims { l: usize },
    #[error("tensor shape {got:?} does not match expected {want:?}")]
    ShapeMismatch { got: Vec<usize>, want: Vec<usize> },
    #[error("axis {axis} out of range for {l} dimensions")]
    AxisOutOfRange { axis: usize, l: usize },
    #[error("data length {got} does not match shape product {want}")]
    DataLength { got: usize, want: usize },
}

/// A tensor-product code built from a single common component code.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorCode {
    component: ComponentCode,
    dims: usize,
}

impl TensorCode {
    pub fn new(component: ComponentCode, dims: usize) -> Result<Self, TensorError> {
        if !(1..=3).contains(&dims) {
            return Err(TensorError::BadDims { l: dims });
        }
        Ok(Self { component, dims })
    }

    pub fn component(&self) -> &ComponentCode {
        &self.component
    }

    /// Dimension count `l`.
    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Total coded bits `n^l`.
    pub fn total_bits(&self) -> usize {
        self.component.n().pow(self.dims as u32)
    }

    /// Total information bits `k^l`.
    pub fn info_bits(&self) -> usize {
        self.component.k().pow(self.dims as u32)
    }

    /// Overall rate `(k/n)^l`.
    pub fn rate(&self) -> f64 {
        self.info_bits() as f64 / self.total_bits() as f64
    }

    /// Coded tensor shape `[n; l]`.
    pub fn coded_shape(&self) -> Vec<usize> {
        vec![self.component.n(); self.dims]
    }

    /// Information tensor shape `[k; l]`.
    pub fn info_shape(&self) -> Vec<usize> {
        vec![self.component.k(); self.dims]
    }

    /// Human-readable label such as `eBCH [16,11]^3 [4096,1331]`.
    pub fn label(&self) -> String {
        format!(
            "{}^{} [{},{}]",
            self.component.label(),
            self.dims,
            self.total_bits(),
            self.info_bits()
        )
    }
}

/// Axis order of one full decoding/encoding cycle: rows vary the column
/// index (axis 1), columns vary the row index (axis 0), tubes vary axis 2.
pub fn pass_axes(l: usize) -> &'static [usize] {
    match l {
        1 => &[0],
        2 => &[1, 0],
        _ => &[1, 0, 2],
    }
}

/// Dense row-major `l`-dimensional array (`l` in 1..=3).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor<T> {
    dims: Vec<usize>,
    data: Vec<T>,
}

pub type BitTensor = Tensor<u8>;
pub type LlrTensor<F> = Tensor<F>;

impl<T: Clone + Default> Tensor<T> {
    pub fn zeros(dims: &[usize]) -> Result<Self, TensorError> {
        Self::filled(dims, T::default())
    }

    pub fn filled(dims: &[usize], value: T) -> Result<Self, TensorError> {
        if !(1..=3).contains(&dims.len()) {
            return Err(TensorError::BadDims { l: dims.len() });
        }
        let len = dims.iter().product();
        Ok(Self {
            dims: dims.to_vec(),
            data: vec![value; len],
        })
    }

    pub fn from_data(dims: &[usize], data: Vec<T>) -> Result<Self, TensorError> {
        if !(1..=3).contains(&dims.len()) {
            return Err(TensorError::BadDims { l: dims.len() });
        }
        let want: usize = dims.iter().product();
        if data.len() != want {
            return Err(TensorError::DataLength {
                got: data.len(),
                want,
            });
        }
        Ok(Self {
            dims: dims.to_vec(),
            data,
        })
    }
}

impl<T> Tensor<T> {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let l = self.dims.len();
        let mut strides = vec![1usize; l];
        for j in (0..l - 1).rev() {
            strides[j] = strides[j + 1] * self.dims[j + 1];
        }
        strides
    }

    /// Number of 1-D slices along the given axis (`n^(l-1)` for a cube).
    pub fn axis_slice_count(&self, axis: usize) -> Result<usize, TensorError> {
        self.check_axis(axis)?;
        Ok(self.len() / self.dims[axis])
    }

    /// Flat positions of one slice: `base + i * stride[axis]` for `i` in
    /// `0..dims[axis]`, with the remaining coordinates decoded from
    /// `slice_idx` in row-major order.
    pub fn slice_positions(
        &self,
        axis: usize,
        slice_idx: usize,
    ) -> Result<impl Iterator<Item = usize>, TensorError> {
        let (base, stride) = self.slice_base_stride(axis, slice_idx)?;
        let extent = self.dims[axis];
        Ok((0..extent).map(move |i| base + i * stride))
    }

    fn slice_base_stride(&self, axis: usize, slice_idx: usize) -> Result<(usize, usize), TensorError> {
        self.check_axis(axis)?;
        let strides = self.strides();
        let mut rem = slice_idx;
        let mut base = 0usize;
        for j in (0..self.dims.len()).rev() {
            if j == axis {
                continue;
            }
            base += (rem % self.dims[j]) * strides[j];
            rem /= self.dims[j];
        }
        Ok((base, strides[axis]))
    }

    fn check_axis(&self, axis: usize) -> Result<(), TensorError> {
        if axis >= self.dims.len() {
            return Err(TensorError::AxisOutOfRange {
                axis,
                l: self.dims.len(),
            });
        }
        Ok(())
    }
}

impl<T: Copy> Tensor<T> {
    /// Copy one axis slice into `out`.
    pub fn gather(&self, axis: usize, slice_idx: usize, out: &mut [T]) -> Result<(), TensorError> {
        let (base, stride) = self.slice_base_stride(axis, slice_idx)?;
        debug_assert_eq!(out.len(), self.dims[axis]);
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.data[base + i * stride];
        }
        Ok(())
    }

    /// Write one axis slice back from `values`.
    pub fn scatter(&mut self, axis: usize, slice_idx: usize, values: &[T]) -> Result<(), TensorError> {
        let (base, stride) = self.slice_base_stride(axis, slice_idx)?;
        debug_assert_eq!(values.len(), self.dims[axis]);
        for (i, &v) in values.iter().enumerate() {
            self.data[base + i * stride] = v;
        }
        Ok(())
    }

    /// Visit every slice along an axis as a mutable 1-D view; edits are
    /// written back to the tensor when the closure returns.
    pub fn map_slices_mut(
        &mut self,
        axis: usize,
        mut f: impl FnMut(usize, &mut [T]),
    ) -> Result<(), TensorError> {
        let count = self.axis_slice_count(axis)?;
        let mut buf = vec![self.data[0]; self.dims[axis]];
        for idx in 0..count {
            self.gather(axis, idx, &mut buf)?;
            f(idx, &mut buf);
            self.scatter(axis, idx, &buf)?;
        }
        Ok(())
    }
}

/// Encode an information tensor of shape `k^l` into a coded tensor of shape
/// `n^l`: place the information systematically, then component-encode every
/// slice one axis pass at a time (rows, columns, tubes).
pub fn encode_tensor(code: &TensorCode, info: &BitTensor) -> Result<BitTensor, TensorError> {
    encode_tensor_with_axes(code, info, pass_axes(code.dims()))
}

pub(crate) fn encode_tensor_with_axes(
    code: &TensorCode,
    info: &BitTensor,
    axes: &[usize],
) -> Result<BitTensor, TensorError> {
    let want = code.info_shape();
    if info.dims() != want.as_slice() {
        return Err(TensorError::ShapeMismatch {
            got: info.dims().to_vec(),
            want,
        });
    }
    let component = code.component();
    let n = component.n();
    let k = component.k();
    let mut out = BitTensor::zeros(&code.coded_shape())?;

    // Systematic placement: coordinate c of the info tensor maps unchanged.
    let info_strides = info.strides();
    let out_strides = out.strides();
    for (flat, &bit) in info.data().iter().enumerate() {
        let mut rem = flat;
        let mut pos = 0usize;
        for j in 0..info.dims().len() {
            let coord = rem / info_strides[j];
            rem %= info_strides[j];
            pos += coord * out_strides[j];
        }
        out.data_mut()[pos] = bit;
    }
    debug_assert!(k <= n);

    let mut buf = vec![0u8; n];
    for &axis in axes {
        let count = out.axis_slice_count(axis)?;
        for idx in 0..count {
            out.gather(axis, idx, &mut buf)?;
            let msg = bits_to_mask(&buf[..k]);
            let cw = component.encode_mask(msg);
            buf.copy_from_slice(&mask_to_bits(cw, n));
            out.scatter(axis, idx, &buf)?;
        }
    }
    Ok(out)
}

/// Binary multiplications needed to encode one block, by dimension count:
/// `k(n-k)` for a component, `(k+n)k(n-k)` for a square,
/// `(k^2+kn+n^2)k(n-k)` for a cube.
pub fn mult_count(l: usize, n: usize, k: usize) -> Result<u64, TensorError> {
    let (n, k) = (n as u64, k as u64);
    let per_slice = k * (n - k);
    match l {
        1 => Ok(per_slice),
        2 => Ok((k + n) * per_slice),
        3 => Ok((k * k + k * n + n * n) * per_slice),
        _ => Err(TensorError::BadDims { l }),
    }
}

/// One row of the design-space table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub l: usize,
    pub n: usize,
    pub k: usize,
    pub length: u64,
    pub rate: f64,
}

/// Enumerate every component/square/cubic construction with `n <= max_n` and
/// `1 <= n - k <= max_redundancy`.
pub fn design_space(max_redundancy: usize, max_n: usize) -> Vec<DesignPoint> {
    let mut table = Vec::new();
    for l in 1..=3usize {
        for n in 2..=max_n {
            let k_min = n.saturating_sub(max_redundancy).max(1);
            for k in k_min..n {
                table.push(DesignPoint {
                    l,
                    n,
                    k,
                    length: (n as u64).pow(l as u32),
                    rate: (k as f64 / n as f64).powi(l as i32),
                });
            }
        }
    }
    table
}

/// Length at which a maximum-redundancy component first reaches the target
/// rate: the boundary of the achievable region read along the rate contour.
/// Returns `(n, n^l)` of the smallest `n` with `((n-r)/n)^l >= target_rate`.
pub fn max_length_at_rate(l: usize, max_redundancy: usize, target_rate: f64) -> Option<(usize, u64)> {
    if !(1..=3).contains(&l) || max_redundancy == 0 || !(0.0..=1.0).contains(&target_rate) {
        return None;
    }
    let r = max_redundancy;
    (r + 1..).find_map(|n| {
        let rate = ((n - r) as f64 / n as f64).powi(l as i32);
        (rate >= target_rate).then(|| (n, (n as u64).pow(l as u32)))
    })
}

/// Dump the table as CSV with header `l,n,k,length,rate`.
pub fn write_design_space_csv<W: Write>(table: &[DesignPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "l,n,k,length,rate")?;
    for p in table {
        writeln!(out, "{},{},{},{},{:.10}", p.l, p.n, p.k, p.length, p.rate)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component_code::{crc_code, ebch_code, KoopmanPolynomial};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn crc_15_10() -> ComponentCode {
        crc_code(KoopmanPolynomial::new(0x15).unwrap(), 15).unwrap()
    }

    fn random_info(code: &TensorCode, rng: &mut StdRng) -> BitTensor {
        let bits: Vec<u8> = (0..code.info_bits()).map(|_| rng.random::<bool>() as u8).collect();
        BitTensor::from_data(&code.info_shape(), bits).unwrap()
    }

    fn all_slices_valid(code: &TensorCode, t: &BitTensor) -> bool {
        let component = code.component();
        let mut buf = vec![0u8; component.n()];
        for axis in 0..code.dims() {
            for idx in 0..t.axis_slice_count(axis).unwrap() {
                t.gather(axis, idx, &mut buf).unwrap();
                if !component.syndrome_ok(&buf).unwrap() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn code_arithmetic() {
        let cubic = TensorCode::new(crc_15_10(), 3).unwrap();
        assert_eq!(cubic.total_bits(), 3375);
        assert_eq!(cubic.info_bits(), 1000);
        assert!((cubic.rate() - 8.0 / 27.0).abs() < 1e-12);
        assert_eq!(cubic.coded_shape(), vec![15, 15, 15]);

        assert_eq!(TensorCode::new(crc_15_10(), 4), Err(TensorError::BadDims { l: 4 }));
    }

    #[test]
    fn zero_info_encodes_to_zero_tensor() {
        for l in 1..=3 {
            let code = TensorCode::new(ebch_code(8, 4).unwrap(), l).unwrap();
            let info = BitTensor::zeros(&code.info_shape()).unwrap();
            let out = encode_tensor(&code, &info).unwrap();
            assert!(out.data().iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn every_slice_is_a_codeword() {
        let mut rng = StdRng::seed_from_u64(3);
        for component in [crc_15_10(), ebch_code(16, 11).unwrap()] {
            for l in 2..=3 {
                let code = TensorCode::new(component.clone(), l).unwrap();
                for _ in 0..5 {
                    let info = random_info(&code, &mut rng);
                    let out = encode_tensor(&code, &info).unwrap();
                    assert!(all_slices_valid(&code, &out));
                }
            }
        }
    }

    #[test]
    fn systematic_positions_carry_the_info() {
        let mut rng = StdRng::seed_from_u64(5);
        for l in 1..=3 {
            let code = TensorCode::new(ebch_code(8, 4).unwrap(), l).unwrap();
            let info = random_info(&code, &mut rng);
            let out = encode_tensor(&code, &info).unwrap();
            let k = code.component().k();
            let out_strides = out.strides();
            for (flat, &bit) in info.data().iter().enumerate() {
                let strides = info.strides();
                let mut rem = flat;
                let mut pos = 0;
                for j in 0..l {
                    let c = rem / strides[j];
                    rem %= strides[j];
                    assert!(c < k);
                    pos += c * out_strides[j];
                }
                assert_eq!(out.data()[pos], bit);
            }
        }
    }

    #[test]
    fn axis_order_does_not_change_the_encoding() {
        let mut rng = StdRng::seed_from_u64(7);
        let code = TensorCode::new(ebch_code(8, 4).unwrap(), 2).unwrap();
        for _ in 0..50 {
            let info = random_info(&code, &mut rng);
            let a = encode_tensor_with_axes(&code, &info, &[0, 1]).unwrap();
            let b = encode_tensor_with_axes(&code, &info, &[1, 0]).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let code = TensorCode::new(ebch_code(8, 4).unwrap(), 2).unwrap();
        let wrong = BitTensor::zeros(&[4, 5]).unwrap();
        assert!(matches!(
            encode_tensor(&code, &wrong),
            Err(TensorError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn slice_counts_match() {
        let t = Tensor::<u8>::zeros(&[15, 15, 15]).unwrap();
        for axis in 0..3 {
            assert_eq!(t.axis_slice_count(axis).unwrap(), 225);
        }
        assert!(t.axis_slice_count(3).is_err());
    }

    #[test]
    fn slices_partition_all_positions() {
        let t = Tensor::<u8>::zeros(&[4, 5, 6]).unwrap();
        for axis in 0..3 {
            let mut seen = vec![0u32; t.len()];
            for idx in 0..t.axis_slice_count(axis).unwrap() {
                for pos in t.slice_positions(axis, idx).unwrap() {
                    seen[pos] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1), "axis {axis}");
        }
    }

    #[test]
    fn scatter_then_gather_round_trips() {
        let mut rng = StdRng::seed_from_u64(11);
        let mut t = Tensor::<f64>::zeros(&[5, 7, 3]).unwrap();
        for axis in 0..3 {
            let len = t.dims()[axis];
            for idx in 0..t.axis_slice_count(axis).unwrap() {
                let values: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
                t.scatter(axis, idx, &values).unwrap();
                let mut back = vec![0.0; len];
                t.gather(axis, idx, &mut back).unwrap();
                assert_eq!(back, values);
            }
        }
    }

    #[test]
    fn map_slices_writes_through() {
        let mut t = Tensor::<u8>::zeros(&[3, 3]).unwrap();
        t.map_slices_mut(1, |idx, slice| {
            for (i, v) in slice.iter_mut().enumerate() {
                *v = (idx * 10 + i) as u8;
            }
        })
        .unwrap();
        // Axis-1 slices are rows of the 3x3 matrix.
        assert_eq!(t.data(), &[0, 1, 2, 10, 11, 12, 20, 21, 22]);
    }

    #[test]
    fn mult_count_formulas() {
        assert_eq!(mult_count(1, 15, 10).unwrap(), 50);
        assert_eq!(mult_count(2, 15, 10).unwrap(), 1250);
        assert_eq!(mult_count(3, 15, 10).unwrap(), 23750);
        assert!(mult_count(4, 15, 10).is_err());
        assert!(mult_count(0, 15, 10).is_err());
    }

    #[test]
    fn design_space_boundary_lengths() {
        assert_eq!(max_length_at_rate(1, 25, 0.5), Some((50, 50)));
        assert_eq!(max_length_at_rate(2, 25, 0.5), Some((86, 7396)));
        assert_eq!(max_length_at_rate(3, 25, 0.5), Some((122, 1_815_848)));
    }

    #[test]
    fn design_space_contains_reference_codes() {
        let table = design_space(25, 464);
        let cubic_15_10 = table
            .iter()
            .find(|p| p.l == 3 && p.n == 15 && p.k == 10)
            .unwrap();
        assert_eq!(cubic_15_10.length, 3375);
        assert!((cubic_15_10.rate - 8.0 / 27.0).abs() < 1e-12);

        let cubic_16_11 = table
            .iter()
            .find(|p| p.l == 3 && p.n == 16 && p.k == 11)
            .unwrap();
        assert_eq!(cubic_16_11.length, 4096);
        assert!((cubic_16_11.rate - 1331.0 / 4096.0).abs() < 1e-12);
    }

    #[test]
    fn design_space_csv_has_one_row_per_point() {
        let table = design_space(3, 8);
        let mut buf = Vec::new();
        write_design_space_csv(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), table.len() + 1);
        assert!(text.starts_with("l,n,k,length,rate"));
    }
}
