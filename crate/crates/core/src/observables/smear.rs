use super::{Axis, Distribution, Lattice};
use crate::clocks::ClockModel;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// `R(o_i, s_j)` sampled on an output and an input lattice, stored row-major by output.
#[derive(Debug, Clone)]
pub struct ResponseKernel {
    input: Lattice,
    output: Lattice,
    axis: Axis,
    values: Vec<f64>,
}

impl ResponseKernel {
    pub fn from_fn(input: Lattice, output: Lattice, axis: Axis, r: impl Fn(f64, f64) -> f64) -> Self {
        let s = input.coordinates();
        let mut values = Vec::with_capacity(input.len * output.len);
        for o in output.coordinates() {
            values.extend(s.iter().map(|&si| r(o, si)));
        }
        Self { input, output, axis, values }
    }

    /// Discrete delta: reproduces the input exactly.
    pub fn identity(lattice: Lattice, axis: Axis) -> Self {
        let w = lattice.weights();
        let n = lattice.len;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0 / w[i];
        }
        Self { input: lattice, output: lattice, axis, values }
    }

    /// `|Phi(y, t)|^2`: pointer density for a clock that ran for time `t`.
    pub fn clock(clock: &ClockModel, lambda: f64, times: Lattice, mode: Execution) -> Self {
        let rows = clock.response_densities(lambda, &times.coordinates(), mode);
        let output = Lattice::from_grid(clock.grid());
        let mut values = vec![0.0; output.len * times.len];
        for (j, row) in rows.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                values[i * times.len + j] = *v;
            }
        }
        Self { input: times, output, axis: Axis::PointerY, values }
    }

    pub fn input(&self) -> &Lattice {
        &self.input
    }

    pub fn output(&self) -> &Lattice {
        &self.output
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.input.len + j]
    }

    /// `int R(o, s_j) do` for each input point.
    pub fn column_masses(&self) -> Vec<f64> {
        let w = self.output.weights();
        (0..self.input.len).map(|j| (0..self.output.len).map(|i| w[i] * self.value(i, j)).sum()).collect()
    }

    /// Rescale so that every column integrates to one over the output lattice.
    pub fn normalized(mut self) -> Result<Self> {
        let masses = self.column_masses();
        if masses.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::NoMass(masses.iter().cloned().fold(f64::INFINITY, f64::min)));
        }
        let n = self.input.len;
        for (k, v) in self.values.iter_mut().enumerate() {
            *v /= masses[k % n];
        }
        Ok(self)
    }
}

/// `Pi_C(o) = int R(o, s) Pi(s) ds` by trapezoid quadrature over the input lattice.
pub fn smear(ideal: &Distribution, kernel: &ResponseKernel) -> Result<Distribution> {
    if ideal.lattice() != kernel.input() {
        return Err(Error::GridMismatch("kernel input lattice differs from the distribution".into()));
    }
    let w = kernel.input.weights();
    let src: Vec<f64> = ideal.density().iter().zip(&w).map(|(d, w)| d * w).collect();
    let n = kernel.input.len;
    let density: Vec<f64> = kernel
        .values
        .chunks(n)
        .map(|row| row.iter().zip(&src).map(|(r, s)| r * s).sum())
        .collect();
    if ideal.is_quasi() || density.iter().any(|d| *d < 0.0) {
        Distribution::quasi(kernel.axis, kernel.output, density)
    } else {
        Distribution::new(kernel.axis, kernel.output, density)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ideal() -> Distribution {
        let l = Lattice::new(0.0, 0.05, 201).unwrap();
        let d = l.coordinates().iter().map(|t| t * t * (-t).exp()).collect();
        Distribution::new(Axis::TimeT, l, d).unwrap()
    }

    #[test]
    fn identity_kernel_is_exact() {
        let d = ideal();
        let out = smear(&d, &ResponseKernel::identity(*d.lattice(), Axis::TimeT)).unwrap();
        for (a, b) in out.density().iter().zip(d.density()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn normalized_kernel_preserves_mass() {
        let d = ideal();
        let out_l = Lattice::new(-5.0, 0.05, 401).unwrap();
        let k = ResponseKernel::from_fn(*d.lattice(), out_l, Axis::TimeT, |t, s| (-(t - s).powi(2) / 0.5).exp())
            .normalized()
            .unwrap();
        let out = smear(&d, &k).unwrap();
        assert_abs_diff_eq!(out.mass(), d.mass(), epsilon = 1e-10);
    }

    #[test]
    fn convolution_kernel_matches_direct_sum() {
        let d = ideal();
        let r = |u: f64| (-(u * u) / 0.3).exp() * (1.0 + 0.2 * u);
        let k = ResponseKernel::from_fn(*d.lattice(), *d.lattice(), Axis::TimeT, |t, s| r(t - s));
        let out = smear(&d, &k).unwrap();
        let l = d.lattice();
        let h = l.step;
        for i in [0usize, 50, 123, 200] {
            let ti = l.coordinate(i);
            let mut direct = 0.0;
            for j in 0..l.len {
                let w = if j == 0 || j == l.len - 1 { 0.5 * h } else { h };
                direct += w * r(ti - l.coordinate(j)) * d.density()[j];
            }
            assert_abs_diff_eq!(out.density()[i], direct, epsilon = 1e-12);
        }
    }
}
