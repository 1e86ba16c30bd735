use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module<R>(f: impl for<'py> FnOnce(&Bound<'py, PyModule>) -> R) -> R {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "pyderangements").unwrap();
        pyderangements::pyderangements(&m).unwrap();
        f(&m)
    })
}

fn eval<'py>(m: &Bound<'py, PyModule>, expr: &str) -> PyResult<Bound<'py, PyAny>> {
    let py = m.py();
    let globals = pyo3::types::PyDict::new(py);
    globals.set_item("d", m)?;
    let code = std::ffi::CString::new(expr).unwrap();
    py.eval(&code, Some(&globals), None)
}

#[test]
fn psi_through_python() {
    with_module(|m| {
        let out: String = eval(
            m,
            "d.psi(d.parse_cycles('(1,2,3,4)')).format('fixed-point-first')",
        )
        .unwrap()
        .extract()
        .unwrap();
        assert_eq!(out, "(2)(1,3,4)");
        let back: String = eval(m, "str(d.psi_inverse(d.parse_cycles('(1)(2,3,4,5)')))")
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(back, "(1,3)(2,4,5)");
        let case: (String, Option<usize>, Option<u32>) =
            eval(m, "d.classify_case(d.parse_cycles('(1,2)(3,4,5)'))")
                .unwrap()
                .extract()
                .unwrap();
        assert_eq!(case, ("i".to_string(), Some(1), Some(4)));
    });
}

#[test]
fn errors_become_exceptions() {
    with_module(|m| {
        let err = eval(m, "d.psi(d.parse_cycles('(1,2)(3,4)'))").unwrap_err();
        assert!(err.to_string().contains("ExcludedInput"), "{err}");
        let err = eval(m, "d.parse_cycles('(1,2)(4,5)')").unwrap_err();
        assert!(err.to_string().contains("MissingElement(3)"), "{err}");
        let err = eval(m, "d.verify_n(12)").unwrap_err();
        assert!(err.to_string().contains("BoundExceeded"), "{err}");
        let is_value_error: bool = eval(m, "issubclass(d.BijectionError, ValueError)")
            .unwrap()
            .extract()
            .unwrap();
        assert!(is_value_error);
    });
}

#[test]
fn counts_and_reports() {
    with_module(|m| {
        let big: String = eval(m, "str(d.count_d_rec1(30)[30])")
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(big, "97581073836835777732377428235481");
        let same: bool = eval(m, "d.count_d_rec1(25) == d.count_d_rec2(25)")
            .unwrap()
            .extract()
            .unwrap();
        assert!(same);
        let n: u64 = eval(m, "d.count_class_bruteforce(5, 'fstar')")
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(n, 44);
        let ok: bool = eval(
            m,
            "(lambda r: r['bijective'] and r['inverse_ok'] and r['image_size'] == 8)(d.verify_n(4, 2))",
        )
        .unwrap()
        .extract()
        .unwrap();
        assert!(ok);
        let rows: usize = eval(m, "len(d.golden_tables())")
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(rows, 16);
        let derangements: Vec<Vec<u32>> = eval(m, "[p.image for p in d.iter_class(3, 'd')]")
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(derangements, vec![vec![2, 3, 1], vec![3, 1, 2]]);
    });
}
