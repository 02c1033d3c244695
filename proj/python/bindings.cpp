#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kpz/checks.hpp"
#include "kpz/contour.hpp"
#include "kpz/dynamics.hpp"
#include "kpz/error.hpp"
#include "kpz/fredholm.hpp"
#include "kpz/harness.hpp"
#include "kpz/scaling.hpp"

namespace py = pybind11;
using namespace kpz;

namespace {

std::vector<SpaceTimePoint> to_points(const std::vector<std::pair<int, int>>& pts) {
  std::vector<SpaceTimePoint> out;
  for (const auto& [n, t] : pts) out.push_back({n, t});
  return out;
}

py::dict result_dict(const FredholmResult& r) {
  py::dict d;
  d["probability"] = r.probability;
  d["raw"] = r.raw;
  d["converged"] = r.window.converged;
  d["doublings"] = r.window.doublings;
  return d;
}

FredholmOptions options(double tol, int threads) {
  FredholmOptions o;
  o.stability_tol = tol;
  o.threads = threads;
  return o;
}

py::array_t<int> to_array(const std::vector<std::vector<int>>& rows) {
  const std::size_t m = rows.size(), n = m ? rows[0].size() : 0;
  py::array_t<int> a({m, n});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = rows[i][j];
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact formulas and simulations for discrete-time TASEP, PNG and the Airy1 process";
  static py::exception<Error> exc(m, "KpzError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc(e.what());
    }
  });

  m.def("bessel_j", [](int n, double x) { return bessel(BesselKind::J, n, x); });
  m.def("bessel_i", [](int n, double x) { return bessel(BesselKind::I, n, x); });
  m.def("airy_ai", &airy_ai);
  m.def("F", [](int n, int x, int t, double q) { return F(n, x, t, ModelParams{q}); }, py::arg("n"), py::arg("x"),
        py::arg("t"), py::arg("q"));
  m.def(
      "K_flat",
      [](std::pair<int, int> p1, std::pair<int, int> p2, int x1, int x2, double q) {
        return K_flat({p1.first, p1.second}, {p2.first, p2.second}, x1, x2, ModelParams{q});
      },
      py::arg("p1"), py::arg("p2"), py::arg("x1"), py::arg("x2"), py::arg("q"));
  m.def(
      "K_finite",
      [](std::pair<int, int> p1, std::pair<int, int> p2, int x1, int x2, double q, int N) {
        return K_finiteN({p1.first, p1.second}, {p2.first, p2.second}, x1, x2, ModelParams{q}, N);
      },
      py::arg("p1"), py::arg("p2"), py::arg("x1"), py::arg("x2"), py::arg("q"), py::arg("N"));
  m.def("K_png_fixed_time", &K_png_fixed_time, py::arg("t"), py::arg("x1"), py::arg("h1"), py::arg("x2"), py::arg("h2"));
  m.def(
      "K_png_spacelike",
      [](std::pair<double, double> p1, int h1, std::pair<double, double> p2, int h2) {
        return K_png_spacelike({p1.first, p1.second}, h1, {p2.first, p2.second}, h2);
      },
      py::arg("p1"), py::arg("h1"), py::arg("p2"), py::arg("h2"));
  m.def("K_airy1", &K_airy1, py::arg("tau1"), py::arg("xi1"), py::arg("tau2"), py::arg("xi2"));

  m.def(
      "joint_prob_tasep",
      [](const std::vector<std::pair<int, int>>& points, const std::vector<int>& cuts, double q, int N, double tol,
         int threads) {
        const auto kernel = N > 0 ? TasepKernel::finite(N) : TasepKernel::flat();
        return result_dict(joint_prob_tasep_detailed({to_points(points), cuts}, ModelParams{q}, kernel,
                                                     options(tol, threads)));
      },
      "P(x_{n_k}(t_k) >= a_k for all k); points are (n, t); N = 0 for the alternating infinite start",
      py::arg("points"), py::arg("cuts"), py::arg("q"), py::arg("N") = 0, py::arg("tol") = 1e-8, py::arg("threads") = 1);
  m.def(
      "joint_prob_growth",
      [](const std::vector<std::tuple<int, int, int>>& points, double q, double tol) {
        std::vector<GrowthPoint> g;
        for (const auto& [x, t, H] : points) g.push_back({x, t, H});
        return result_dict(joint_prob_growth_detailed(g, ModelParams{q}, options(tol, 1)));
      },
      "P(h_{t_k}(x_k) <= H_k for all k); points are (x, t, H)", py::arg("points"), py::arg("q"), py::arg("tol") = 1e-8);
  m.def(
      "joint_prob_png",
      [](const std::vector<std::pair<double, double>>& points, const std::vector<int>& cuts, double tol) {
        PNGObservation obs;
        for (const auto& [x, t] : points) obs.points.push_back({x, t});
        obs.cuts = cuts;
        return result_dict(joint_prob_png_detailed(obs, PNGKernel::spacelike(), options(tol, 1)));
      },
      "P(h(x_k, t_k) <= H_k for all k); points are (x, t)", py::arg("points"), py::arg("cuts"), py::arg("tol") = 1e-8);
  m.def(
      "joint_prob_airy1",
      [](const std::vector<double>& taus, const std::vector<double>& cuts, double tol) {
        AiryOptions o;
        o.stability_tol = tol;
        return result_dict(joint_prob_airy1_detailed({taus, cuts}, o));
      },
      py::arg("taus"), py::arg("cuts"), py::arg("tol") = 1e-8);

  m.def(
      "sample_tasep_points",
      [](const std::vector<std::pair<int, int>>& points, std::int64_t samples, double q, std::uint64_t seed,
         std::uint64_t stream, int threads) {
        std::vector<std::vector<int>> rows;
        {
          py::gil_scoped_release release;
          rows = sample_tasep_points(ModelParams{q}, to_points(points), samples, {seed, stream}, threads);
        }
        return to_array(rows);
      },
      "positions x_{n_k}(t_k), shape (points, samples), alternating start", py::arg("points"), py::arg("samples"),
      py::arg("q"), py::arg("seed") = 1, py::arg("stream") = 0, py::arg("threads") = 1);
  m.def(
      "sample_png_heights",
      [](double x, double t, std::int64_t samples, std::uint64_t seed, std::uint64_t stream, int threads) {
        std::vector<int> h;
        {
          py::gil_scoped_release release;
          h = sample_png_heights(x, t, samples, {seed, stream}, threads);
        }
        return py::array_t<int>(h.size(), h.data());
      },
      py::arg("x"), py::arg("t"), py::arg("samples"), py::arg("seed") = 1, py::arg("stream") = 0, py::arg("threads") = 1);
  m.def(
      "brute_force_law",
      [](const std::vector<int>& y, int t, double q) {
        py::dict d;
        for (const auto& [x, w] : brute_force_law(ParticleConfig{y, 0}, t, ModelParams{q})) d[py::tuple(py::cast(x))] = w;
        return d;
      },
      "exact law of the positions at time t from the finite start y", py::arg("y"), py::arg("t"), py::arg("q"));

  m.def(
      "scaling_coeffs",
      [](double q, const std::string& path, double alpha) {
        const auto spec =
            path == "tagged" ? SpaceLikePathSpec::tagged_particle(alpha) : SpaceLikePathSpec::fixed_time();
        const auto s = scaling_coeffs(spec, q);
        py::dict d;
        d["v"] = s.v;
        d["kappa_v"] = s.kappa_v;
        d["kappa_h"] = s.kappa_h;
        d["kappa1"] = s.kappa1;
        d["kappa2"] = s.kappa2;
        return d;
      },
      py::arg("q"), py::arg("path") = "fixed_time", py::arg("alpha") = 1.0);

  m.def(
      "run_command",
      [](const std::string& config_json) {
        const auto cfg = RunConfig::from_json(nlohmann::json::parse(config_json));
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = run_command(cfg);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["files"] = r.files;
        d["message"] = r.message;
        return d;
      },
      "run a harness command from a JSON configuration string", py::arg("config_json"));
  m.def(
      "selftest",
      [](int threads) {
        py::list out;
        for (const auto& r : run_selftest(threads)) {
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["worst"] = r.worst;
          d["tolerance"] = r.tolerance;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("threads") = 1);
}
