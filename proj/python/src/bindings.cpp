#include <cstdint>
#include <optional>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rbf/cpcp.hpp"
#include "rbf/data.hpp"
#include "rbf/errors.hpp"
#include "rbf/linalg.hpp"
#include "rbf/measurement.hpp"
#include "rbf/metrics.hpp"
#include "rbf/prox.hpp"
#include "rbf/rmc.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

rbf::DenseMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw rbf::DimensionError("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return rbf::DenseMatrix(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const rbf::DenseMatrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw rbf::DimensionError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

rbf::ObservationMask to_mask(const BoolArray& a) {
  if (a.ndim() != 2) throw rbf::DimensionError("mask must be a 2-D boolean array");
  std::vector<std::uint8_t> marker(a.data(), a.data() + a.size());
  return rbf::ObservationMask::from_marker(static_cast<std::size_t>(a.shape(0)),
                                           static_cast<std::size_t>(a.shape(1)), marker);
}

BoolArray to_bool_array(const rbf::ObservationMask& mask) {
  BoolArray out({mask.rows(), mask.cols()});
  bool* p = out.mutable_data();
  std::fill(p, p + out.size(), false);
  for (std::size_t k : mask.flat_indices()) p[k] = true;
  return out;
}

py::dict result_dict(const rbf::SolveResult& r) {
  py::dict out;
  out["u"] = to_array(r.u);
  out["v"] = to_array(r.v);
  out["s"] = to_array(r.s);
  out["low_rank"] = to_array(r.low_rank());
  out["y"] = r.y.empty() ? py::object(to_array(r.y_measurements)) : py::object(to_array(r.y));
  out["termination"] = rbf::to_string(r.termination);
  out["iterations"] = r.iterations();
  out["rank_adjusted_at"] = r.rank_adjusted_at;
  out["tau"] = r.tau;
  std::vector<double> residual, objective, alpha, ratio;
  std::vector<std::size_t> rank;
  for (const auto& t : r.trace) {
    residual.push_back(t.residual);
    objective.push_back(t.objective);
    alpha.push_back(t.alpha);
    ratio.push_back(t.ratio);
    rank.push_back(t.rank);
  }
  py::dict trace;
  trace["residual"] = to_array(residual);
  trace["objective"] = to_array(objective);
  trace["alpha"] = to_array(alpha);
  trace["ratio"] = to_array(ratio);
  trace["rank"] = rank;
  out["trace"] = trace;
  return out;
}

}  // namespace

PYBIND11_MODULE(_rbf, m) {
  m.doc() = "Robust bilinear factorization solvers (RMC, RPCA, matrix completion, CPCP)";

  py::register_exception<rbf::ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<rbf::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<rbf::SolverConfig>(m, "SolverConfig")
      .def(py::init([](std::optional<double> lambda, std::size_t rank, double rho,
                       std::optional<double> alpha0, double alpha_max, double tol,
                       std::optional<int> max_iter, bool adjust_rank, std::uint64_t seed) {
             return rbf::SolverConfig{lambda, rank, rho, alpha0, alpha_max, tol, max_iter, adjust_rank, seed};
           }),
           py::arg("lam") = py::none(), py::arg("rank") = 10, py::arg("rho") = 1.1,
           py::arg("alpha0") = py::none(), py::arg("alpha_max") = 1e10, py::arg("tol") = 1e-4,
           py::arg("max_iter") = py::none(), py::arg("adjust_rank") = false, py::arg("seed") = 0)
      .def_readwrite("lam", &rbf::SolverConfig::lambda)
      .def_readwrite("rank", &rbf::SolverConfig::rank)
      .def_readwrite("rho", &rbf::SolverConfig::rho)
      .def_readwrite("alpha0", &rbf::SolverConfig::alpha0)
      .def_readwrite("alpha_max", &rbf::SolverConfig::alpha_max)
      .def_readwrite("tol", &rbf::SolverConfig::tol)
      .def_readwrite("max_iter", &rbf::SolverConfig::max_iter)
      .def_readwrite("adjust_rank", &rbf::SolverConfig::adjust_rank)
      .def_readwrite("seed", &rbf::SolverConfig::seed)
      .def("validate", &rbf::SolverConfig::validate, "Raises ValueError; returns warnings.");

  py::class_<rbf::SubspaceOperator>(m, "SubspaceOperator")
      .def_property_readonly("rows", [](const rbf::SubspaceOperator& q) { return q.rows(); })
      .def_property_readonly("cols", [](const rbf::SubspaceOperator& q) { return q.cols(); })
      .def_property_readonly("measurement_count", [](const rbf::SubspaceOperator& q) { return q.measurement_count(); })
      .def("forward", [](const rbf::SubspaceOperator& q, const Array& a) {
        return to_array(q.forward(to_matrix(a)));
      })
      .def("adjoint", [](const rbf::SubspaceOperator& q, const Array& y) {
        return to_array(q.adjoint(to_vector(y)));
      });

  m.def("draw_random_subspace", &rbf::draw_random_subspace, py::arg("rows"), py::arg("cols"),
        py::arg("p"), py::arg("seed"));

  m.def("qr", [](const Array& a) {
    auto f = rbf::qr_thin(to_matrix(a));
    return py::make_tuple(to_array(f.q), to_array(f.r));
  }, "Thin Householder QR; returns (q, r).");
  m.def("svd", [](const Array& a) {
    auto f = rbf::svd_thin(to_matrix(a));
    return py::make_tuple(to_array(f.u), to_array(f.sigma), to_array(f.v));
  }, "Thin SVD truncated at the numerical rank; returns (u, sigma, v).");
  m.def("nuclear_norm", [](const Array& a) { return rbf::nuclear_norm(to_matrix(a)); });
  m.def("svt", [](const Array& a, double mu) { return to_array(rbf::svt(to_matrix(a), mu)); },
        py::arg("m"), py::arg("mu"));
  m.def("soft_threshold",
        [](const Array& a, double tau) { return to_array(rbf::soft_threshold(to_matrix(a), tau)); },
        py::arg("a"), py::arg("tau"));

  m.def("solve_rmc", [](const Array& d, const BoolArray& mask, const rbf::SolverConfig& cfg) {
    return result_dict(rbf::solve_rmc(to_matrix(d), to_mask(mask), cfg));
  }, py::arg("d"), py::arg("mask"), py::arg("config") = rbf::SolverConfig{});
  m.def("solve_rpca", [](const Array& d, const rbf::SolverConfig& cfg) {
    return result_dict(rbf::solve_rpca(to_matrix(d), cfg));
  }, py::arg("d"), py::arg("config") = rbf::SolverConfig{});
  m.def("solve_mc", [](const Array& d, const BoolArray& mask, const rbf::SolverConfig& cfg) {
    return result_dict(rbf::solve_mc(to_matrix(d), to_mask(mask), cfg));
  }, py::arg("d"), py::arg("mask"), py::arg("config") = rbf::SolverConfig{});
  m.def("solve_cpcp", [](const Array& y, const rbf::SubspaceOperator& q, const rbf::SolverConfig& cfg) {
    return result_dict(rbf::solve_cpcp(to_vector(y), q, cfg));
  }, py::arg("y"), py::arg("op"), py::arg("config") = rbf::SolverConfig{});

  m.def("generate_planted",
        [](std::size_t rows, std::size_t cols, std::size_t rank, double spike_frac, double obs_frac,
           std::uint64_t seed, double magnitude) {
          auto p = rbf::generate_planted({rows, cols, rank, spike_frac, magnitude, obs_frac, seed});
          py::dict out;
          out["l0"] = to_array(p.l0);
          out["s0"] = to_array(p.s0);
          out["mask"] = to_bool_array(p.mask);
          out["d_obs"] = to_array(p.d_obs);
          return out;
        },
        py::arg("rows"), py::arg("cols"), py::arg("rank"), py::arg("spike_frac") = 0.0,
        py::arg("obs_frac") = 1.0, py::arg("seed") = 0, py::arg("magnitude") = 1.0);

  m.def("relative_error", [](const Array& a, const Array& ref) {
    return rbf::relative_error(to_matrix(a), to_matrix(ref));
  });
  m.def("auc", [](const Array& scores, const BoolArray& labels) {
    if (labels.ndim() != 1) throw rbf::DimensionError("labels must be 1-D");
    std::vector<std::uint8_t> l(labels.data(), labels.data() + labels.size());
    return rbf::auc(to_vector(scores), l);
  }, py::arg("scores"), py::arg("labels"));
  m.def("rmse",
        [](const Array& predicted, const std::vector<std::size_t>& users,
           const std::vector<std::size_t>& items, const std::vector<double>& values) {
          if (users.size() != items.size() || users.size() != values.size())
            throw rbf::DimensionError("users, items and values differ in length");
          std::vector<rbf::Rating> truth;
          for (std::size_t k = 0; k < users.size(); ++k) truth.push_back({users[k], items[k], values[k]});
          return rbf::rmse(to_matrix(predicted), truth);
        },
        py::arg("predicted"), py::arg("users"), py::arg("items"), py::arg("values"));
}
