#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "xfree/behrend.hpp"
#include "xfree/cli.hpp"
#include "xfree/container.hpp"
#include "xfree/copies.hpp"
#include "xfree/error.hpp"
#include "xfree/extremal.hpp"
#include "xfree/supersat.hpp"

namespace py = pybind11;
using namespace xfree;

namespace {

py::object fraction(const Rational& q) { return py::module_::import("fractions").attr("Fraction")(to_string(q)); }

py::object big_int(const BigInt& v) { return py::module_::import("builtins").attr("int")(v.str()); }

GridSet make_set(const Pattern& p, std::int64_t n, const std::optional<std::vector<Point>>& members) {
  if (!members) return GridSet::full(n, p.dim());
  return GridSet::from_points(n, p.dim(), *members);
}

py::dict record_dict(const RNumberRecord& r) {
  py::dict d;
  d["n"] = r.n;
  d["lower"] = r.lower;
  d["upper"] = r.upper;
  d["exact"] = r.exact;
  d["provenance"] = to_string(r.provenance);
  if (r.witness) d["witness"] = r.witness->points();
  return d;
}

RNumberRecord solve(const Pattern& p, std::int64_t n, int workers, std::uint64_t budget) {
  SolverOptions so;
  so.workers = workers;
  if (budget) so.node_budget = budget;
  return solve_rx_exact(p, n, so);
}

}  // namespace

PYBIND11_MODULE(_xfree, m) {
  m.doc() = "Pattern-free subsets of the grid [n]^d.";

  static py::exception<BudgetError> budget_exc(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr ep) {
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const BudgetError& e) {
      py::set_error(budget_exc, e.what());
    } catch (const Error& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  py::class_<Pattern>(m, "Pattern")
      .def(py::init([](std::vector<Point> points) {
             if (points.empty()) throw PreconditionError("pattern needs points");
             const int d = static_cast<int>(points[0].size());
             return Pattern::from_points(d, std::move(points));
           }),
           py::arg("points"))
      .def_static("parse", [](const std::string& text) { return parse_pattern(text); })
      .def_static("progression", &arithmetic_progression, py::arg("k"))
      .def_static("corner", &corner, py::arg("d"))
      .def_property_readonly("dim", &Pattern::dim)
      .def_property_readonly("points", &Pattern::points)
      .def_property_readonly("primitive", &Pattern::primitive)
      .def("normalized", [](const Pattern& p) { return normalize(p); })
      .def("hash", [](const Pattern& p) { return pattern_hash(p); })
      .def("to_text", &Pattern::to_text)
      .def("__len__", &Pattern::size)
      .def("__eq__", [](const Pattern& a, const Pattern& b) { return a == b; })
      .def("__repr__", [](const Pattern& p) {
        std::ostringstream os;
        os << "Pattern(d=" << p.dim() << ", k=" << p.size() << ")";
        return os.str();
      });

  m.def("count_copies", [](const Pattern& p, std::int64_t n) { return count_copies_closed_form(normalize(p), n); },
        py::arg("pattern"), py::arg("n"));
  m.def(
      "enumerate_copies",
      [](const Pattern& p, std::int64_t n) {
        std::vector<std::pair<std::int64_t, Point>> out;
        for (const auto& c : enumerate_copies(normalize(p), n)) out.emplace_back(c.ratio, c.base);
        return out;
      },
      py::arg("pattern"), py::arg("n"));
  m.def(
      "gamma_count",
      [](const Pattern& p, std::int64_t n, const std::optional<std::vector<Point>>& members) {
        return gamma_count(make_set(p, n, members), normalize(p));
      },
      py::arg("pattern"), py::arg("n"), py::arg("members") = py::none());
  m.def(
      "codegree_stats",
      [](const Pattern& p, std::int64_t n) {
        const auto s = codegree_stats(normalize(p), n);
        py::dict d;
        d["edges"] = s.edge_count;
        d["vertices"] = s.vertex_count;
        d["avg_degree"] = static_cast<double>(s.avg_degree);
        std::vector<std::uint64_t> codeg(s.codegree.begin() + std::min<std::size_t>(2, s.codegree.size()),
                                         s.codegree.end());
        d["codegrees"] = codeg;
        return d;
      },
      py::arg("pattern"), py::arg("n"));

  m.def(
      "solve_rx",
      [](const Pattern& p, std::int64_t n, int workers, std::uint64_t budget) {
        py::gil_scoped_release release;
        auto rec = solve(normalize(p), n, workers, budget);
        py::gil_scoped_acquire acquire;
        return record_dict(rec);
      },
      py::arg("pattern"), py::arg("n"), py::arg("workers") = 1, py::arg("budget") = 0);
  m.def(
      "count_free",
      [](const Pattern& p, std::int64_t n) { return big_int(count_xfree_subsets(normalize(p), n).count); },
      py::arg("pattern"), py::arg("n"));

  m.def(
      "behrend_1d",
      [](py::object a, py::object b, py::object c, std::int64_t n) {
        auto q = [](py::object v) { return parse_rational(py::str(v).cast<std::string>()); };
        const auto cert = behrend_1d(RationalTriple(q(a), q(b), q(c)), n);
        py::dict d;
        d["N"] = cert.N;
        d["M"] = cert.M;
        d["set"] = cert.set;
        d["verified"] = cert.verified;
        d["fallback"] = cert.fallback;
        d["certificate"] = certificate_text(cert);
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("n"));
  m.def("compute_t", [](const Pattern& p) { return fraction(compute_t(p).t); }, py::arg("pattern"));
  m.def(
      "behrend_lift",
      [](const Pattern& p, std::int64_t n, bool all_triples) {
        LiftOptions lo;
        lo.all_triples = all_triples;
        const auto cert = behrend_lift(p, n, lo);
        py::dict d;
        d["size"] = cert.set.size();
        d["points"] = cert.set.points();
        d["verified"] = cert.verified;
        d["core_prefix_count"] = cert.core_prefix_count;
        d["core_size"] = cert.core_size;
        d["certificate"] = certificate_text(cert);
        return d;
      },
      py::arg("pattern"), py::arg("n"), py::arg("all_triples") = false);

  m.def("prime_pi", [](std::int64_t l) { return prime_pi(l); }, py::arg("l"));
  m.def(
      "verify_pnt_constant",
      [](std::int64_t l0, std::int64_t lmax) {
        const auto r = verify_pnt_constant(l0, lmax);
        return std::make_pair(r.holds, r.first_violation);
      },
      py::arg("l0"), py::arg("lmax"));
  m.def(
      "exact_expected_gamma",
      [](const Pattern& p, std::int64_t n, std::int64_t M, const std::optional<std::vector<Point>>& members,
         std::uint64_t r_budget) {
        const Pattern canon = normalize(p);
        const GridSet a = make_set(canon, n, members);
        const auto r = solve(canon, n, 1, r_budget);
        const auto e = exact_expected_gamma(a, canon, M, r);
        py::dict d;
        d["mean_gamma"] = fraction(e.mean_gamma);
        d["mean_size"] = fraction(e.mean_size);
        d["size_ok"] = e.size_ok;
        py::list primes;
        for (const auto& pa : e.per_prime) primes.append(pa.prime);
        d["primes"] = primes;
        return d;
      },
      py::arg("pattern"), py::arg("n"), py::arg("M"), py::arg("members") = py::none(), py::arg("r_budget") = 0);
  m.def(
      "container_params",
      [](const Pattern& p, std::int64_t n, std::uint64_t r_value, double gamma) {
        const Pattern canon = normalize(p);
        RProvider provider(canon);
        provider.set_override(n, r_value);
        auto c = epsilon_tau_schedule(canon, n, provider, Real(gamma));
        check_container_hypotheses(c);
        py::dict d;
        d["epsilon"] = static_cast<double>(c.epsilon);
        d["tau"] = static_cast<double>(c.tau);
        d["delta_ratio"] = static_cast<double>(c.delta_ratio);
        d["hyp_tau"] = c.hyp_tau;
        d["hyp_delta"] = c.hyp_delta;
        return d;
      },
      py::arg("pattern"), py::arg("n"), py::arg("r_value"), py::arg("gamma"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
