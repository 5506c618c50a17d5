//! Python module `ffpl`: lattices, block LU, enumeration, constants, experiments.

#![allow(non_snake_case)]

use num::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ffpl::blocklu::{block_lu as core_block_lu, correlated_pair, is_sharp, to_omega_rep, BlockLU};
use ffpl::enumerate::{enum_primitive, EnumSpec, Shard, DEFAULT_BUDGET};
use ffpl::grassmann::grass_cell;
use ffpl::harness::{det_class_of, run_counting, run_detclass, run_triple, ExperimentParams};
use ffpl::io::{block_lu_json, correlated_pair_json, lattice_json, matr_from_json};
use ffpl::latmod::{is_primitive, orthogonal_lattice, MatR, PartialLattice};
use ffpl::measures::{constants_bundle, rational_string};
use ffpl::scalars::text::{format_matrix, parse_matrix};
use ffpl::scalars::{Fq, IdealR, Poly};
use ffpl::shapes::{
    normalized_shape_mass as core_normalized_mass, shape_of_partial,
    stabilizer_order as core_stabilizer, ShapeClass,
};
use ffpl::Error;

create_exception!(ffpl, BudgetError, PyValueError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Budget { .. } => BudgetError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

// u32 so that coefficient lists reach Python as lists, not bytes
type Coeffs = Vec<Vec<Vec<u32>>>;

fn widen(v: &[u8]) -> Vec<u32> {
    v.iter().map(|&c| c as u32).collect()
}

fn coeffs(m: &MatR) -> Coeffs {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|p| widen(p.coeffs())).collect())
        .collect()
}

fn ideal_of(q: u32, gen: Option<Vec<u32>>) -> PyResult<IdealR> {
    let f = Fq::new(q).map_err(py_err)?;
    match gen {
        None => Ok(IdealR::unit(f)),
        Some(c) if c.iter().any(|&x| x >= q) => {
            Err(PyValueError::new_err("ideal coefficient out of range"))
        }
        Some(c) => {
            IdealR::new(Poly::new(f, c.into_iter().map(|x| x as u8).collect())).map_err(py_err)
        }
    }
}

/// Primitive partial lattice, stored by its canonical Hermite basis.
#[pyclass(name = "Lattice", module = "ffpl", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyLattice {
    inner: PartialLattice,
}

#[pymethods]
impl PyLattice {
    /// `basis` is a list of rows, each a list of little-endian coefficient lists.
    #[new]
    fn new(q: u32, basis: Coeffs) -> PyResult<Self> {
        let f = Fq::new(q).map_err(py_err)?;
        let v = serde_json::to_value(&basis).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let m = matr_from_json(f, &v).map_err(py_err)?;
        Ok(PyLattice {
            inner: PartialLattice::new(&m).map_err(py_err)?,
        })
    }
    #[getter]
    fn q(&self) -> u32 {
        self.inner.field().q()
    }
    #[getter]
    fn D(&self) -> usize {
        self.inner.ambient_dim()
    }
    #[getter]
    fn d(&self) -> usize {
        self.inner.rank()
    }
    #[getter]
    fn covol_exp(&self) -> i64 {
        self.inner.covol_exp()
    }
    #[getter]
    fn basis(&self) -> Coeffs {
        coeffs(self.inner.basis())
    }
    fn is_primitive(&self) -> bool {
        is_primitive(&self.inner)
    }
    fn is_sharp(&self) -> bool {
        is_sharp(&self.inner)
    }
    fn orthogonal(&self) -> PyResult<PyLattice> {
        Ok(PyLattice {
            inner: orthogonal_lattice(&self.inner).map_err(py_err)?,
        })
    }
    /// Splitting type `[a_1, ..., a_d]`.
    fn shape(&self) -> PyResult<Vec<i64>> {
        Ok(shape_of_partial(&self.inner)
            .map_err(py_err)?
            .parts()
            .to_vec())
    }
    /// Coefficient table of the jets of `beta alpha^{-1}` (sharp lattices only).
    fn grass_cell(&self, j: i64) -> PyResult<Vec<Vec<u32>>> {
        Ok(grass_cell(&self.inner, j)
            .map_err(py_err)?
            .table
            .iter()
            .map(|e| widen(e))
            .collect())
    }
    fn det_class(&self, j: i64) -> PyResult<Vec<u32>> {
        Ok(widen(&det_class_of(&self.inner, j).map_err(py_err)?))
    }
    /// Canonical `g` in `SL_D(R)` spanning the lattice, with its block LU.
    fn omega_rep(&self) -> PyResult<(Coeffs, PyBlockLU)> {
        let (g, lu) = to_omega_rep(&self.inner).map_err(py_err)?;
        Ok((coeffs(&g), PyBlockLU { inner: lu }))
    }
    #[pyo3(signature = (precision=8))]
    fn correlated_pair_json(&self, precision: i64) -> PyResult<String> {
        Ok(
            correlated_pair_json(&correlated_pair(&self.inner, precision).map_err(py_err)?)
                .to_string(),
        )
    }
    fn to_json(&self) -> String {
        lattice_json(&self.inner).to_string()
    }
    fn __repr__(&self) -> String {
        format!("Lattice({})", format_matrix(self.inner.basis()))
    }
}

#[pyclass(name = "BlockLU", module = "ffpl", frozen)]
struct PyBlockLU {
    inner: BlockLU,
}

#[pymethods]
impl PyBlockLU {
    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }
    #[getter]
    fn level(&self) -> i64 {
        self.inner.level
    }
    #[getter]
    fn ell(&self) -> usize {
        self.inner.ell
    }
    /// One factor as a matrix literal: `u_minus`, `g_bar`, `g_under`, `z` or `u_plus`.
    fn factor(&self, name: &str) -> PyResult<String> {
        let m = match name {
            "u_minus" => &self.inner.u_minus,
            "g_bar" => &self.inner.g_bar,
            "g_under" => &self.inner.g_under,
            "z" => &self.inner.z,
            "u_plus" => &self.inner.u_plus,
            _ => return Err(PyValueError::new_err(format!("no factor named {name}"))),
        };
        Ok(format_matrix(m))
    }
    fn reassemble(&self) -> String {
        format_matrix(&self.inner.reassemble())
    }
    fn to_json(&self) -> String {
        block_lu_json(&self.inner).to_string()
    }
}

/// Block LU of a determinant-1 matrix literal such as `q=2; [[[0,1],[1]],[[1],[]]]`.
#[pyfunction]
fn block_lu(matrix: &str, d: usize) -> PyResult<PyBlockLU> {
    let m = parse_matrix(matrix).map_err(py_err)?;
    Ok(PyBlockLU {
        inner: core_block_lu(&m, d).map_err(py_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (q, D, d, exp, ideal=None, shard=None, dualize=false, budget=None))]
fn enumerate_lattices(
    q: u32,
    D: usize,
    d: usize,
    exp: i64,
    ideal: Option<Vec<u32>>,
    shard: Option<&str>,
    dualize: bool,
    budget: Option<u128>,
) -> PyResult<Vec<PyLattice>> {
    let spec = EnumSpec {
        q,
        big_d: D,
        d,
        covol_exp: exp,
        ideal: ideal_of(q, ideal)?,
        dualize,
    };
    let shard = match shard {
        Some(s) => s.parse::<Shard>().map_err(py_err)?,
        None => Shard::ALL,
    };
    let ls = enum_primitive(&spec, shard, budget.unwrap_or(DEFAULT_BUDGET)).map_err(py_err)?;
    Ok(ls.into_iter().map(|inner| PyLattice { inner }).collect())
}

/// Constants bundle as a JSON object of exact fractions.
#[pyfunction]
#[pyo3(signature = (q, D, d, ideal=None))]
fn constants(q: u32, D: usize, d: usize, ideal: Option<Vec<u32>>) -> PyResult<String> {
    if d == 0 || d >= D {
        return Err(PyValueError::new_err("need 1 <= d < D"));
    }
    let b = constants_bundle(d as u32, (D - d) as u32, &ideal_of(q, ideal)?).map_err(py_err)?;
    Ok(b.to_json().to_string())
}

/// Run `counting`, `triple` or `detclass`; returns `(csv, json)`.
#[pyfunction]
#[pyo3(signature = (kind, q, D, d, imax, precision=2, shards=1, ideal=None, budget=None))]
fn run_experiment(
    py: Python<'_>,
    kind: &str,
    q: u32,
    D: usize,
    d: usize,
    imax: u32,
    precision: i64,
    shards: u64,
    ideal: Option<Vec<u32>>,
    budget: Option<u128>,
) -> PyResult<(String, String)> {
    let mut p = ExperimentParams::new(q, D, d, imax).map_err(py_err)?;
    p.ideal = ideal_of(q, ideal)?;
    p.precision = precision;
    p.shards = shards;
    p.budget = budget.unwrap_or(DEFAULT_BUDGET);
    let run = match kind {
        "counting" => run_counting,
        "triple" => run_triple,
        "detclass" => run_detclass,
        _ => return Err(PyValueError::new_err(format!("unknown experiment {kind}"))),
    };
    let r = py.detach(|| run(&p)).map_err(py_err)?;
    Ok((r.to_csv(), r.to_json().to_string()))
}

#[pyfunction]
fn stabilizer_order(parts: Vec<i64>, q: u32) -> PyResult<BigInt> {
    Ok(core_stabilizer(&ShapeClass::new(parts).map_err(py_err)?, q))
}

/// Normalized mass of a shape class as a fraction string (ranks 1 and 2).
#[pyfunction]
fn normalized_shape_mass(parts: Vec<i64>, q: u32) -> PyResult<Option<String>> {
    let c = ShapeClass::new(parts).map_err(py_err)?;
    Ok(core_normalized_mass(&c, q).map(|r| rational_string(&r)))
}

#[pymodule]
#[pyo3(name = "ffpl")]
fn ffpl_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyBlockLU>()?;
    m.add_function(wrap_pyfunction!(block_lu, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_lattices, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(stabilizer_order, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_shape_mass, m)?)?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    Ok(())
}
