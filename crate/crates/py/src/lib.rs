//! Python bindings for `qwick`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qwick::cmapkernel::{combinatorial_identity_check, permutation_cancellation, s_p_operator};
use qwick::combinatorics::{enumerate_sjn, twin_classes, Permutation};
use qwick::normlab::{haagerup_minimal_n, AmplifiedTensor, NormLab};
use qwick::qtensor::{parse_rational, LinMap, QPoly, QSpace, Scalar, Tensor};

fn err(e: qwick::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows<S: Scalar, T>(m: &LinMap<S>, f: impl Fn(&S) -> T) -> Vec<Vec<T>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| f(m.get(r, c))).collect()).collect()
}

/// Infer the number of legs from a flat coefficient list.
fn tensor(dim: usize, data: Vec<Complex64>) -> PyResult<Tensor<Complex64>> {
    let (mut legs, mut size) = (0, 1);
    while size < data.len() {
        size *= dim;
        legs += 1;
    }
    if size != data.len() || dim < 2 && data.len() != 1 {
        return Err(PyValueError::new_err(format!("length {} is not a power of {dim}", data.len())));
    }
    Tensor::from_vec(legs, dim, data).map_err(err)
}

fn permutation(image: Vec<usize>) -> PyResult<Permutation> {
    Permutation::new(image).map_err(err)
}

/// Number of inversions of a permutation given as its image `[π(1), …, π(n)]`.
#[pyfunction]
fn inversions(perm: Vec<usize>) -> PyResult<usize> {
    Ok(permutation(perm)?.inversions())
}

#[pyfunction]
fn sjn(n: usize, j: usize) -> PyResult<Vec<Vec<usize>>> {
    Ok(enumerate_sjn(n, j).map_err(err)?.into_iter().map(|p| p.image().to_vec()).collect())
}

#[pyfunction]
fn twins(perm: Vec<usize>, j: usize) -> PyResult<Vec<usize>> {
    twin_classes(&permutation(perm)?, j).map_err(err)
}

/// Whether the signed terms of `S_p` cancel in pairs.
#[pyfunction]
fn permutation_groups_cancel(p: usize) -> PyResult<bool> {
    Ok(permutation_cancellation(p).map_err(err)?.passed())
}

#[pyfunction]
#[pyo3(signature = (n, t, c_fit=1.0))]
fn haagerup_tail(n: usize, t: f64, c_fit: f64) -> PyResult<f64> {
    qwick::normlab::haagerup_tail(n, t, c_fit).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (epsilon, t, c_fit=1.0))]
fn minimal_n(epsilon: f64, t: f64, c_fit: f64) -> PyResult<usize> {
    haagerup_minimal_n(epsilon, t, c_fit).map_err(err)
}

#[pyfunction]
fn report_schema_version() -> &'static str {
    qwick::cli::report_schema_version()
}

/// Floating-point q-Fock space over `C^dim`.
#[pyclass(frozen)]
struct FloatSpace {
    lab: NormLab,
}

#[pymethods]
impl FloatSpace {
    #[new]
    fn new(dim: usize, q: f64) -> PyResult<Self> {
        Ok(FloatSpace { lab: NormLab::new(dim, q).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.lab.dim()
    }

    #[getter]
    fn q(&self) -> f64 {
        self.lab.q()
    }

    fn pqn(&self, n: usize) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&*self.lab.space().pqn(n).map_err(err)?, |z| *z))
    }

    fn rstar(&self, a: usize, b: usize) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&*self.lab.space().rstar(a, b).map_err(err)?, |z| *z))
    }

    /// q-inner product of two tensors given as flat coefficient lists.
    fn inner(&self, xi: Vec<Complex64>, eta: Vec<Complex64>) -> PyResult<Complex64> {
        let d = self.lab.dim();
        self.lab.space().q_inner(&tensor(d, xi)?, &tensor(d, eta)?).map_err(err)
    }

    /// `(‖R*_{n,k}‖, ‖R_{n,k}‖)` in the q-norms.
    fn rstar_norm(&self, n: usize, k: usize) -> PyResult<(f64, f64)> {
        let r = self.lab.rstar_norm(n, k).map_err(err)?;
        Ok((r.rstar, r.r))
    }

    /// Largest entry of `S_p`.
    fn s_p_residual(&self, p: usize) -> PyResult<f64> {
        let s = s_p_operator(self.lab.space(), p).map_err(err)?;
        let target = if p == 0 { LinMap::identity(0, self.lab.dim()) } else { LinMap::zeros(p, p, self.lab.dim()) };
        Ok(s.sub(&target).map_err(err)?.data().iter().fold(0.0, |m, z| m.max(z.norm())))
    }

    #[pyo3(signature = (n, k, seed=0))]
    fn combinatorial_residual(&self, py: Python<'_>, n: usize, k: usize, seed: u64) -> PyResult<f64> {
        let space = self.lab.space();
        py.detach(|| combinatorial_identity_check(space, n, k, seed)).map(|c| c.residual.max).map_err(err)
    }

    /// Truncation trace of the Wick operator norm; returns `(estimate, trace)`.
    #[pyo3(signature = (xi, max_truncation=30))]
    fn wick_norm(&self, py: Python<'_>, xi: Vec<Complex64>, max_truncation: usize) -> PyResult<(f64, Vec<f64>)> {
        let xi = AmplifiedTensor::from_tensor(tensor(self.lab.dim(), xi)?);
        let trace = py.detach(|| self.lab.wick_norm_estimate(&xi, max_truncation)).map_err(err)?;
        Ok((trace.estimate(), trace.values))
    }
}

/// Exact q-Fock space; `q` is symbolic unless a rational value is given.
#[pyclass(frozen)]
struct ExactSpace {
    space: QSpace<QPoly>,
}

#[pymethods]
impl ExactSpace {
    #[new]
    #[pyo3(signature = (dim, q=None))]
    fn new(dim: usize, q: Option<&str>) -> PyResult<Self> {
        let space = match q {
            None | Some("q") => QSpace::symbolic(dim),
            Some(s) => {
                let r = parse_rational(s).ok_or_else(|| PyValueError::new_err(format!("not a rational: {s}")))?;
                QSpace::at_rational(dim, r).map_err(err)?
            }
        };
        Ok(ExactSpace { space })
    }

    /// Entries of `P_q^n` as polynomial strings.
    fn pqn(&self, n: usize) -> PyResult<Vec<Vec<String>>> {
        Ok(rows(&*self.space.pqn(n).map_err(err)?, |p| p.to_string()))
    }

    fn rstar(&self, a: usize, b: usize) -> PyResult<Vec<Vec<String>>> {
        Ok(rows(&*self.space.rstar(a, b).map_err(err)?, |p| p.to_string()))
    }

    /// Whether `S_0 = Id` and `S_p = 0` for `p ≥ 1`, exactly.
    fn s_p_vanishes(&self, p: usize) -> PyResult<bool> {
        let s = s_p_operator(&self.space, p).map_err(err)?;
        Ok(if p == 0 { s == LinMap::identity(0, self.space.dim()) } else { s.is_zero() })
    }

    #[pyo3(signature = (n, k, seed=0))]
    fn combinatorial_identity_holds(&self, py: Python<'_>, n: usize, k: usize, seed: u64) -> PyResult<bool> {
        let space = &self.space;
        py.detach(|| combinatorial_identity_check(space, n, k, seed)).map(|c| c.residual.exact_zero).map_err(err)
    }

    /// Entries of `P_q^n` evaluated at a float `q`.
    fn pqn_at(&self, n: usize, q: f64) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&*self.space.pqn(n).map_err(err)?, |p| p.eval_f64(q)))
    }
}

#[pymodule]
fn qwick_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(inversions, m)?)?;
    m.add_function(wrap_pyfunction!(sjn, m)?)?;
    m.add_function(wrap_pyfunction!(twins, m)?)?;
    m.add_function(wrap_pyfunction!(permutation_groups_cancel, m)?)?;
    m.add_function(wrap_pyfunction!(haagerup_tail, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_n, m)?)?;
    m.add_function(wrap_pyfunction!(report_schema_version, m)?)?;
    m.add_class::<FloatSpace>()?;
    m.add_class::<ExactSpace>()?;
    Ok(())
}
