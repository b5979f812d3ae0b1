#ifndef PJM_TOOLS_COMMANDS_HPP
#define PJM_TOOLS_COMMANDS_HPP

#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "pjm/heights.hpp"
#include "pjm/inverse.hpp"
#include "pjm/io.hpp"
#include "pjm/jacobian.hpp"
#include "pjm/quasimomentum.hpp"
#include "pjm/spectrum.hpp"
#include "pjm/transfer.hpp"

namespace pjm::cli {

enum ExitCode : int { ok = 0, domain_error = 1, numerical_failure = 2, io_error = 3 };

struct Options {
  std::string input = "-";
  std::uint64_t seed = 0;
  double scale = 0.5;
  std::size_t n = 0; // 0: not given
  double tol = 1e-10;
  bool fd_jacobian = false;
  int grid = 0;
  bool inject_edge_error = false;
  std::string jacobian_csv;
};

inline Json estimates_json(const EstimateReport& r) {
  Json list = Json::array();
  for (const auto& q : r.inequalities) {
    list.push_back(Json{{"name", q.name}, {"lhs", q.lhs}, {"rhs", q.rhs}, {"slack", q.slack()},
                        {"holds", q.holds()}});
  }
  return Json{{"c", r.c},           {"c0", r.c0},         {"energy", r.energy},
              {"h_plus", r.h_plus}, {"all_hold", r.all_hold()}, {"all_strict", r.all_strict()},
              {"inequalities", list}};
}

inline Json bool_array(const std::vector<bool>& v) {
  Json arr = Json::array();
  for (bool e : v) arr.push_back(e);
  return arr;
}

inline int cmd_forward(const Options& opts, std::ostream& out) {
  const CoefficientPoint p = coefficients_from_json(parse_json(read_text(opts.input)));
  const SpectralData sd = spectral_data(p);
  const HeightVector h = height_map(p, sd);
  if (!opts.jacobian_csv.empty()) {
    const Matrix jac = opts.fd_jacobian ? fd_jacobian(p) : grad_heights(p, sd, h).matrix;
    std::ofstream csv(opts.jacobian_csv);
    if (!csv) throw IoError("cannot write '" + opts.jacobian_csv + "'");
    write_csv(csv, jac);
    if (!csv) throw IoError("cannot write '" + opts.jacobian_csv + "'");
  }
  Json doc{{"n", p.n},
           {"edges", to_json(sd.edges)},
           {"critical", to_json(sd.critical)},
           {"dirichlet", to_json(sd.dirichlet)},
           {"gap_closed", bool_array(sd.gap_closed)},
           {"h1", to_json(h.h1)},
           {"h2", to_json(h.h2)},
           {"habs", to_json(h.habs)},
           {"estimates", estimates_json(estimate_report(p, sd, h))}};
  write_json(out, doc);
  return ok;
}

inline Json trace_json(const SolveTrace& trace) {
  Json stages = Json::array();
  for (const auto& s : trace.stages) {
    stages.push_back(Json{{"t", s.t}, {"accepted", s.accepted}, {"iterations", s.iterations}});
  }
  return Json{{"newton_iterations", trace.newton_iterations},
              {"jacobian_evaluations", trace.jacobian_evaluations},
              {"final_residual", trace.final_residual},
              {"stages", stages}};
}

inline int cmd_inverse(const Options& opts, std::ostream& out) {
  const HeightVector target = heights_from_json(parse_json(read_text(opts.input)));
  const std::size_t n = opts.n != 0 ? opts.n : target.gaps() + 1;
  if (n < 2) throw DomainError("period N must be at least 2");
  if (target.gaps() != n - 1) {
    throw DomainError("height vector has dimension " + std::to_string(2 * target.gaps()) +
                      ", expected 2N-2 = " + std::to_string(2 * (n - 1)));
  }
  SolveOptions so;
  so.tol = opts.tol;
  so.fd_jacobian = opts.fd_jacobian;
  try {
    const SolveResult r = invert(target, n, so);
    Json doc = to_json(r.point);
    doc["trace"] = trace_json(r.trace);
    write_json(out, doc);
    return ok;
  } catch (const ContinuationStall& e) {
    write_json(out, Json{{"error", e.what()}, {"last_t", e.last_t()},
                         {"last_point", to_json(e.last_point())}, {"trace", trace_json(e.trace())}});
    return numerical_failure;
  } catch (const SingularJacobianError& e) {
    write_json(out, Json{{"error", e.what()}, {"gap", e.gap()}, {"point", to_json(e.point())}});
    return numerical_failure;
  }
}

struct CheckItem {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return std::isfinite(residual) && residual <= tolerance; }
};

/// Sample abscissae away from the band edges: band and open-gap midpoints
/// and two points outside the spectrum.
inline Vector probe_points(const SpectralData& sd) {
  Vector pts{sd.edges.front() - 0.5, sd.edges.back() + 0.5};
  for (std::size_t band = 1; band <= sd.n; ++band) {
    pts.push_back(0.5 * (sd.band_begin(band) + sd.band_end(band)));
  }
  for (std::size_t gap = 1; gap <= sd.gaps(); ++gap) {
    if (!sd.gap_closed[gap - 1]) pts.push_back(sd.critical[gap - 1]);
  }
  return pts;
}

inline std::vector<CheckItem> run_checks(const CoefficientPoint& p, SpectralData sd,
                                         const Options& opts) {
  const detail::Recurrence rec(p);
  const double n = static_cast<double>(p.n);
  const HeightVector h = height_map(p, sd);
  if (opts.inject_edge_error) sd.edges[1] += 1e-3 * sd.bound;
  std::vector<CheckItem> items;

  {
    double worst = 0.0;
    Vector pts = probe_points(sd);
    pts.insert(pts.end(), sd.edges.begin(), sd.edges.end());
    pts.insert(pts.end(), sd.dirichlet.begin(), sd.dirichlet.end());
    for (double lam : pts) {
      const SolutionFrame fr = rec.frame(lam, 0);
      const double scale = std::pow(1.0 + std::abs(lam), 2.0 * n);
      worst = std::max(worst, std::abs(fr.wronskian() - 1.0) / scale);
    }
    items.push_back({"wronskian", worst, 1e-12});
  }
  {
    const double slack = 1e-10 * sd.bound;
    double worst = 0.0;
    for (std::size_t k = 1; k < sd.edges.size(); ++k) {
      worst = std::max(worst, sd.edges[k - 1] - sd.edges[k]);
    }
    for (std::size_t gap = 1; gap <= sd.gaps(); ++gap) {
      for (double inner : {sd.critical[gap - 1], sd.dirichlet[gap - 1]}) {
        worst = std::max({worst, sd.lower(gap) - inner, inner - sd.upper(gap)});
      }
    }
    items.push_back({"interlacing", std::max(worst, 0.0) / sd.bound, slack / sd.bound});
  }
  {
    // Delta^2 - 4 = prod (lambda - edge) / prod a^2
    const double a_prod2 = std::exp(2.0 * std::accumulate(p.x.begin(), p.x.end(), 0.0));
    double worst = 0.0;
    for (double lam : probe_points(sd)) {
      const double lhs = rec.delta_minus(lam, 2.0) * rec.delta_minus(lam, -2.0);
      double rhs = 1.0 / a_prod2;
      for (double e : sd.edges) rhs *= lam - e;
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
    }
    items.push_back({"product_identity", worst, 1e-8});
  }
  {
    double wr = 0.0, cosh_res = 0.0;
    for (std::size_t gap = 1; gap <= sd.gaps(); ++gap) {
      const auto v = rec.values(sd.dirichlet[gap - 1]);
      wr = std::max(wr, std::abs(v[3] * v[0] - 1.0));
      const double lhs = sd.gap_sign(gap) * (v[0] + v[3]);
      const double rhs = 2.0 * std::cosh(h.h1[gap - 1]);
      cosh_res = std::max(cosh_res, std::abs(lhs - rhs) / rhs);
    }
    items.push_back({"dirichlet_norming", wr, 1e-9});
    items.push_back({"dirichlet_discriminant", cosh_res, 1e-9});
  }
  {
    double sq = 0.0, sum = 0.0;
    for (double e : sd.edges) {
      sq += e * e;
      sum += e;
    }
    const double two_h = 2.0 * trace_energy(p);
    items.push_back({"trace_energy", std::abs(two_h - sq) / two_h, 1e-8});
    items.push_back({"edge_sum", std::abs(sum) / sd.bound, 1e-9});
  }
  {
    const EstimateReport r = estimate_report(p, sd, h);
    double worst = 0.0;
    for (const auto& q : r.inequalities) worst = std::max(worst, -q.slack());
    items.push_back({"estimates", std::max(worst, 0.0), 1e-10});
  }
  {
    const HeightJacobian jac = grad_heights(p, sd, h);
    const Matrix fd = fd_jacobian(p);
    double diff = 0.0;
    for (std::size_t i = 0; i < fd.rows(); ++i) {
      for (std::size_t j = 0; j < fd.cols(); ++j) diff = std::max(diff, std::abs(fd(i, j) - jac.matrix(i, j)));
    }
    bool switch_zone = false;
    for (std::size_t k = 0; k < h.gaps(); ++k) {
      const double tau = switch_threshold(h.habs[k]);
      if (h.h2[k] != 0.0 && std::abs(h.h2[k]) <= 100.0 * tau) switch_zone = true;
    }
    items.push_back({"jacobian_fd", diff / std::max(jac.matrix.max_abs(), 1.0),
                     switch_zone ? 1e-4 : 1e-6});
  }
  return items;
}

inline int cmd_check(const Options& opts, std::ostream& out) {
  const CoefficientPoint p = coefficients_from_json(parse_json(read_text(opts.input)));
  const auto items = run_checks(p, spectral_data(p), opts);
  Json list = Json::array();
  bool all = true;
  for (const auto& item : items) {
    list.push_back(Json{{"name", item.name}, {"residual", item.residual},
                        {"tolerance", item.tolerance}, {"passed", item.passed()}});
    all = all && item.passed();
  }
  write_json(out, Json{{"n", p.n}, {"passed", all}, {"checks", list}});
  return all ? ok : numerical_failure;
}

inline int cmd_random(const Options& opts, std::ostream& out) {
  if (opts.n < 2) throw DomainError("--n must be at least 2");
  write_json(out, to_json(random_point(opts.n, opts.scale, opts.seed)));
  return ok;
}

/// `count` points across [lo, hi], ends included; the midpoint when count is 1.
inline Vector grid_points(double lo, double hi, int count) {
  if (count == 1) return {0.5 * (lo + hi)};
  Vector pts;
  for (int i = 0; i < count; ++i) {
    pts.push_back(i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  return pts;
}

/// CSV rows lambda,re_k,im_k over every band and the upper bank of every open gap.
inline int cmd_quasimomentum(const Options& opts, std::ostream& out) {
  if (opts.grid < 1) throw DomainError("--grid must be a positive integer");
  const CoefficientPoint p = coefficients_from_json(parse_json(read_text(opts.input)));
  const SpectralData sd = spectral_data(p);
  out << "lambda,re_k,im_k\n";
  auto row = [&](double lam, double re, double im) {
    out << format_number(lam) << ',' << format_number(re) << ',' << format_number(im) << '\n';
  };
  for (std::size_t band = 1; band <= sd.n; ++band) {
    for (double lam : grid_points(sd.band_begin(band), sd.band_end(band), opts.grid)) {
      row(lam, k_on_band(p, sd, lam), 0.0);
    }
    if (band < sd.n && !sd.gap_closed[band - 1]) {
      for (double lam : grid_points(sd.lower(band), sd.upper(band), opts.grid)) {
        const auto k = k_on_gap(p, sd, band, lam, Side::upper);
        row(lam, k.real(), k.imag());
      }
    }
  }
  return ok;
}

/// Maps library exceptions onto exit codes; the message goes to `err`.
inline int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return io_error;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return domain_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return numerical_failure;
  }
}

} // namespace pjm::cli

#endif // PJM_TOOLS_COMMANDS_HPP
