//! Python bindings: the three valuation types, their operations, model
//! files with pipeline evaluation, and the law suites.

use pyo3::exceptions::{PyNotImplementedError, PyValueError};
use pyo3::prelude::*;

use sepval_core::belief::MassFunction;
use sepval_core::composition::{compose, DensityElement};
use sepval_core::conditional::conditional;
use sepval_core::gaussian::Gaussian;
use sepval_core::generators::{BeliefGen, GaussianGen, PotentialGen};
use sepval_core::harness::{self, Generator};
use sepval_core::lattice::Partition;
use sepval_core::linalg::Matrix;
use sepval_core::potential::Potential;
use sepval_core::report::LawReport;
use sepval_core::{pipeline, with_model, Error, Valuation, VarSet};

fn py_err(e: Error) -> PyErr {
    match e.root() {
        Error::Unsupported { .. } => PyNotImplementedError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn scope(vars: &[u32]) -> PyResult<VarSet> {
    if vars.windows(2).any(|w| w[0] >= w[1]) || vars.iter().any(|&v| v >= VarSet::MAX_VARS) {
        return Err(PyValueError::new_err("scope must list variable indices in strictly increasing order"));
    }
    Ok(vars.iter().copied().collect())
}

/// Composition of two members; the result must be a member again.
fn compose_members<V: Valuation>(a: &V, b: &V) -> PyResult<V> {
    let r = compose(&DensityElement::from(a.clone()), &DensityElement::from(b.clone())).map_err(py_err)?;
    match r.as_member() {
        Some(v) => Ok(v.clone()),
        None => r.as_quotient().reduce().map_err(py_err),
    }
}

fn conditional_member<V: Valuation>(phi: &V, of: &V::Domain, given: &V::Domain) -> PyResult<V> {
    conditional(phi, of, given).and_then(|c| c.body.reduce()).map_err(py_err)
}

/// Discrete potential on variables `scope` (increasing indices) with
/// the given cardinalities; `values` are row-major, last variable fastest.
#[pyclass(name = "Potential", module = "sepval", frozen)]
struct PyPotential(Potential);

#[pymethods]
impl PyPotential {
    #[new]
    fn new(scope_vars: Vec<u32>, cards: Vec<usize>, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self(Potential::new(scope(&scope_vars)?, cards, values).map_err(py_err)?))
    }

    #[getter]
    fn scope(&self) -> Vec<u32> {
        self.0.scope().iter().collect()
    }

    #[getter]
    fn cards(&self) -> Vec<usize> {
        self.0.cards().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn combine(&self, other: &Self) -> PyResult<Self> {
        self.0.combine(&other.0).map(Self).map_err(py_err)
    }

    fn project(&self, vars: Vec<u32>) -> PyResult<Self> {
        self.0.project(&scope(&vars)?).map(Self).map_err(py_err)
    }

    fn compose(&self, other: &Self) -> PyResult<Self> {
        compose_members(&self.0, &other.0).map(Self)
    }

    /// The conditional of `of` given `given`, as a potential on `of`.
    fn conditional(&self, of: Vec<u32>, given: Vec<u32>) -> PyResult<Self> {
        conditional_member(&self.0, &scope(&of)?, &scope(&given)?).map(Self)
    }

    #[pyo3(signature = (other, tol = 1e-9))]
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.0.approx_eq(&other.0, tol)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.combine(other)
    }

    fn __repr__(&self) -> String {
        format!("Potential(scope={:?}, cards={:?}, values={:?})", self.scope(), self.cards(), self.values())
    }
}

/// Gaussian potential in mean / concentration form.
#[pyclass(name = "Gaussian", module = "sepval", frozen)]
struct PyGaussian(Gaussian);

#[pymethods]
impl PyGaussian {
    #[new]
    fn new(scope_vars: Vec<u32>, mean: Vec<f64>, concentration: Vec<Vec<f64>>) -> PyResult<Self> {
        let k = Matrix::from_rows(&concentration).map_err(py_err)?;
        Ok(Self(Gaussian::new(scope(&scope_vars)?, mean, k).map_err(py_err)?))
    }

    #[getter]
    fn scope(&self) -> Vec<u32> {
        self.0.scope().iter().collect()
    }

    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.0.mean().to_vec()
    }

    #[getter]
    fn concentration(&self) -> Vec<Vec<f64>> {
        let k = self.0.concentration();
        let n = self.0.mean().len();
        (0..n).map(|i| (0..n).map(|j| k[(i, j)]).collect()).collect()
    }

    fn combine(&self, other: &Self) -> PyResult<Self> {
        self.0.combine(&other.0).map(Self).map_err(py_err)
    }

    fn project(&self, vars: Vec<u32>) -> PyResult<Self> {
        self.0.project(&scope(&vars)?).map(Self).map_err(py_err)
    }

    fn compose(&self, other: &Self) -> PyResult<Self> {
        compose_members(&self.0, &other.0).map(Self)
    }

    fn conditional(&self, of: Vec<u32>, given: Vec<u32>) -> PyResult<Self> {
        conditional_member(&self.0, &scope(&of)?, &scope(&given)?).map(Self)
    }

    #[pyo3(signature = (other, tol = 1e-8))]
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.0.approx_eq(&other.0, tol)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.combine(other)
    }

    fn __repr__(&self) -> String {
        format!("Gaussian(scope={:?}, mean={:?}, concentration={:?})", self.scope(), self.mean(), self.concentration())
    }
}

/// Dempster-Shafer mass function. Frames are lists of atom blocks; focal
/// sets are given as atom lists and must be unions of blocks.
#[pyclass(name = "MassFunction", module = "sepval", frozen)]
struct PyMass(MassFunction);

fn frame(blocks: &[Vec<u32>]) -> PyResult<Partition> {
    let n = blocks.iter().flatten().max().map_or(0, |&a| a + 1);
    Partition::new(n, blocks).map_err(py_err)
}

fn atoms_to_set(frame: &Partition, atoms: &[u32]) -> PyResult<u64> {
    let mut s = 0u64;
    let mut covered = 0u64;
    for &a in atoms {
        if a >= frame.n_atoms() {
            return Err(PyValueError::new_err(format!("atom {a} outside the frame")));
        }
        let b = frame.block_of_atom(a);
        s |= 1 << b;
        covered |= 1 << a;
    }
    let union: u64 =
        frame.blocks().iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).map(|(_, m)| m).fold(0, |x, m| x | m);
    if union != covered {
        return Err(PyValueError::new_err(format!("{atoms:?} is not a union of frame blocks")));
    }
    Ok(s)
}

fn set_to_atoms(frame: &Partition, s: u64) -> Vec<u32> {
    let mut atoms: Vec<u32> =
        frame.block_lists().into_iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).flat_map(|(_, b)| b).collect();
    atoms.sort_unstable();
    atoms
}

#[pymethods]
impl PyMass {
    #[new]
    fn new(blocks: Vec<Vec<u32>>, masses: Vec<(Vec<u32>, f64)>) -> PyResult<Self> {
        let f = frame(&blocks)?;
        let entries = masses.iter().map(|(a, m)| Ok((atoms_to_set(&f, a)?, *m))).collect::<PyResult<Vec<_>>>()?;
        Ok(Self(MassFunction::new(f, entries).map_err(py_err)?))
    }

    #[getter]
    fn frame(&self) -> Vec<Vec<u32>> {
        self.0.frame().block_lists()
    }

    /// Focal sets as `(atoms, mass)` pairs.
    #[getter]
    fn masses(&self) -> Vec<(Vec<u32>, f64)> {
        self.0.masses().iter().map(|(&s, &m)| (set_to_atoms(self.0.frame(), s), m)).collect()
    }

    fn combine(&self, other: &Self) -> PyResult<Self> {
        self.0.combine(&other.0).map(Self).map_err(py_err)
    }

    fn project(&self, blocks: Vec<Vec<u32>>) -> PyResult<Self> {
        self.0.project(&frame(&blocks)?).map(Self).map_err(py_err)
    }

    fn compose(&self, other: &Self) -> PyResult<Self> {
        compose_members(&self.0, &other.0).map(Self)
    }

    /// Fails with `ValueError` when the conditional is not a mass function.
    fn conditional(&self, of: Vec<Vec<u32>>, given: Vec<Vec<u32>>) -> PyResult<Self> {
        conditional_member(&self.0, &frame(&of)?, &frame(&given)?).map(Self)
    }

    #[pyo3(signature = (other, tol = 1e-12))]
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.0.approx_eq(&other.0, tol)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.combine(other)
    }

    fn __repr__(&self) -> String {
        format!("MassFunction(frame={:?}, masses={:?})", self.frame(), self.masses())
    }
}

/// A parsed model file.
#[pyclass(name = "Model", module = "sepval", frozen)]
struct PyModel(sepval_core::model::Model);

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        sepval_core::model::Model::parse(text).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| PyValueError::new_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    #[getter]
    fn instance(&self) -> &'static str {
        self.0.instance().name()
    }

    fn summary(&self) -> Vec<String> {
        self.0.summary()
    }

    /// Evaluates a pipeline such as `p > q @ {A,B}` and returns the result
    /// rendered as TOML.
    #[pyo3(signature = (expr, compact = false))]
    fn eval(&self, expr: &str, compact: bool) -> PyResult<String> {
        let e = pipeline::parse(expr).map_err(py_err)?;
        with_model!(&self.0, m => {
            let r = pipeline::eval(m, &e).map_err(py_err)?;
            Ok(m.render(&r, compact))
        })
    }
}

fn suite<G: Generator>(g: &G, name: &str, n: usize, seed: u64) -> Option<LawReport> {
    Some(match name {
        "axioms" => harness::check_axioms(g, n, seed),
        "separative" => harness::check_separative(g, n, seed),
        "conditionals" => harness::check_conditional_laws(g, n, seed),
        "composition-modular" => harness::check_composition_laws_modular(g, n, seed),
        "composition-distributive" => harness::check_composition_laws_distributive(g, n, seed),
        _ => return None,
    })
}

/// Runs a law suite on a built-in generator; returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (instance, suite_name, n = 200, seed = 7))]
fn run_laws(instance: &str, suite_name: &str, n: usize, seed: u64) -> PyResult<(bool, String)> {
    let report = match instance {
        "potential" => match suite_name {
            "regularity" => Some(harness::check_regularity(&PotentialGen::default(), n, seed)),
            s => suite(&PotentialGen::default(), s, n, seed),
        },
        "gaussian" => match suite_name {
            "cancellativity" => Some(harness::check_cancellativity(&GaussianGen::default(), n, seed)),
            s => suite(&GaussianGen::default(), s, n, seed),
        },
        "belief" => {
            let cards: &[usize] =
                if matches!(suite_name, "axioms" | "separative" | "transforms") { &[2, 2] } else { &[2, 2, 2] };
            let g = BeliefGen::multivariate(cards).map_err(py_err)?;
            match suite_name {
                "transforms" => Some(harness::check_belief_transforms(&g, n, seed)),
                "regularity-witness" => Some(harness::belief_regularity_witness()),
                s => suite(&g, s, n, seed),
            }
        }
        other => return Err(PyValueError::new_err(format!("unknown instance `{other}`"))),
    };
    let report = report.ok_or_else(|| PyValueError::new_err(format!("unknown suite `{suite_name}` for {instance}")))?;
    Ok((report.all_passed(), report.to_string()))
}

#[pymodule]
#[pyo3(name = "sepval")]
fn sepval_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_class::<PyGaussian>()?;
    m.add_class::<PyMass>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(run_laws, m)?)?;
    Ok(())
}
