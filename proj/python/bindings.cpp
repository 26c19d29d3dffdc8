#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mflab/arith.hpp"
#include "mflab/error.hpp"
#include "mflab/gl2count.hpp"
#include "mflab/lab.hpp"
#include "mflab/qexp.hpp"
#include "mflab/report_io.hpp"
#include "mflab/richert.hpp"

namespace py = pybind11;
using namespace mflab;

namespace {

PyObject* g_error = nullptr;

py::int_ to_py(const mpz_class& z) {
  return py::reinterpret_steal<py::int_>(
      PyLong_FromString(z.get_str().c_str(), nullptr, 10));
}

mpz_class from_py(const py::int_& v) { return mpz_class(py::str(v).cast<std::string>()); }

py::object fraction(const mpq_class& q) {
  return py::module_::import("fractions").attr("Fraction")(to_py(q.get_num()), to_py(q.get_den()));
}

lab::LabOptions options(unsigned threads, double timeout_secs, std::uint64_t seed) {
  lab::LabOptions o;
  o.threads = threads;
  o.factor.timeout = std::chrono::milliseconds(static_cast<long>(timeout_secs * 1000));
  o.factor.seed = seed;
  return o;
}

richert::Family family(const std::string& name) {
  if (name == "main") return richert::Family::Main;
  if (name == "omega_variant") return richert::Family::OmegaVariant;
  throw invalid_input("family must be main or omega_variant, got " + name);
}

}  // namespace

PYBIND11_MODULE(_mflab, m) {
  m.doc() = "Exact experiments on pairs of level-one Hecke eigenforms.";
  m.attr("__version__") = MFLAB_VERSION;

  g_error = PyErr_NewException("mflab._mflab.Error", PyExc_RuntimeError, nullptr);
  m.attr("Error") = py::handle(g_error);
  py::register_local_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidInput) {
        PyErr_SetString(PyExc_ValueError, e.what());
        return;
      }
      py::object exc = py::reinterpret_borrow<py::object>(g_error)(e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(g_error, exc.ptr());
    }
  });

  m.def("supported_weights", [] { return std::vector<int>{12, 16, 18, 20, 22, 26}; });

  m.def(
      "coefficients",
      [](int k, std::size_t n_terms) {
        const auto f = qexp::eigenform(k, n_terms);
        py::list out;
        for (const auto& c : f.series().coeffs) out.append(to_py(c));
        return out;
      },
      py::arg("weight"), py::arg("n_terms"), "a(0), ..., a(n_terms - 1) of the normalized eigenform");

  m.def(
      "primality",
      [](const py::int_& n) {
        switch (arith::primality(from_py(n))) {
          case arith::Primality::Prime: return "prime";
          case arith::Primality::ProbablePrime: return "probable_prime";
          case arith::Primality::Composite: break;
        }
        return "composite";
      },
      py::arg("n"));

  m.def(
      "factorize",
      [](const py::int_& n, double timeout_secs) {
        arith::FactorOptions o;
        o.timeout = std::chrono::milliseconds(static_cast<long>(timeout_secs * 1000));
        const auto f = arith::factorize(from_py(n), o);
        py::list out;
        for (const auto& pp : f.factors) out.append(py::make_tuple(to_py(pp.prime), pp.exponent));
        return out;
      },
      py::arg("n"), py::arg("timeout_secs") = 10.0, "[(p, e), ...] for |n|, sorted by p");

  m.def("card_A", [](std::uint64_t ell, unsigned n, int k1, int k2) {
    return to_py(gl2::card_A(ell, n, k1, k2));
  });
  m.def("card_C", [](std::uint64_t ell, unsigned n, int k1, int k2) {
    return to_py(gl2::card_C(ell, n, k1, k2));
  });
  m.def("delta", [](std::uint64_t ell, unsigned n, int k1, int k2) {
    return fraction(gl2::delta_exact(ell, n, k1, k2));
  });
  m.def("delta_squarefree", [](std::uint64_t h, int k1, int k2) {
    return fraction(gl2::delta_squarefree(h, k1, k2));
  });

  m.def(
      "sieve_params",
      [](double k, const std::string& fam) {
        const auto p = richert::params_for(family(fam), k);
        py::dict d;
        d["alpha"] = p.alpha;
        d["u"] = p.u;
        d["v"] = p.v;
        d["lambda"] = p.lambda;
        d["F"] = richert::F_value(p);
        return d;
      },
      py::arg("k"), py::arg("family") = "main");
  m.def(
      "positivity_threshold",
      [](const std::string& fam) { return richert::positivity_threshold(family(fam)); },
      py::arg("family") = "main");
  m.def("bounds", [](int k) {
    const auto b = richert::bounds(k);
    py::dict d;
    d["b_omega"] = b.b_omega;
    d["b_big_omega"] = b.b_big_omega;
    d["b_omega_sqrtlog"] = b.b_omega_sqrtlog ? py::object(py::int_(*b.b_omega_sqrtlog)) : py::none();
    return d;
  });

  m.def(
      "diff_table_json",
      [](int k1, int k2, std::uint64_t X, const std::string& sign, unsigned threads,
         double timeout_secs) {
        const auto rows = lab::diff_table(k1, k2, X, lab::parse_sign_mode(sign),
                                          options(threads, timeout_secs, 0));
        report::json out = report::json::array();
        for (const auto& r : rows) out.push_back(report::to_json(r));
        return out.dump();
      },
      py::arg("k1"), py::arg("k2"), py::arg("X"), py::arg("sign") = "minus",
      py::arg("threads") = 0, py::arg("timeout_secs") = 10.0);

  m.def(
      "run_experiment_json",
      [](int k1, int k2, std::uint64_t X, const std::string& sign, unsigned threads,
         double timeout_secs) {
        lab::ExperimentConfig cfg;
        cfg.k1 = k1;
        cfg.k2 = k2;
        cfg.X = X;
        cfg.sign = lab::parse_sign_mode(sign);
        cfg.options = options(threads, timeout_secs, cfg.options.factor.seed);
        py::gil_scoped_release release;
        return report::to_json(lab::run_experiment(cfg)).dump();
      },
      py::arg("k1"), py::arg("k2"), py::arg("X"), py::arg("sign") = "minus",
      py::arg("threads") = 0, py::arg("timeout_secs") = 10.0);

  m.def(
      "congruence_json",
      [](int k1, int k2, std::uint64_t n_primes, std::uint64_t confirm) {
        return report::to_json(lab::congruence_search(k1, k2, n_primes, confirm)).dump();
      },
      py::arg("k1"), py::arg("k2"), py::arg("primes") = 100, py::arg("confirm") = 100);
}
