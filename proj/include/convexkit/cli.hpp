#pragma once

// Batch front end: one command per verification, JSON in, JSON report out.
//
// Exit status: 0 when no check fails, 1 on any FAIL, 2 on parse or schema
// errors (reported with line and column), 3 on resource-guard violations.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "convexkit/convexfn.hpp"
#include "convexkit/errors.hpp"
#include "convexkit/forms.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/io.hpp"
#include "convexkit/laplace.hpp"
#include "convexkit/mixedvol.hpp"
#include "convexkit/momentum.hpp"
#include "convexkit/report.hpp"

namespace ck::cli {

using io::json;
using io::Node;

struct Options {
  std::string command;
  std::string input;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::size_t workers = 1;
  std::string format = "json";
  std::string csv_path;

  double tol_or(double fallback) const { return tol.value_or(fallback); }
};

/// Output of a command besides its report: an optional CSV table.
struct Context {
  const Options& opt;
  VerificationReport& report;
  std::optional<std::string> table_csv;
  std::mt19937_64 rng;

  Vec uniform(std::size_t n, double spread) {
    std::uniform_real_distribution<double> u(-spread, spread);
    Vec x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
    return x;
  }
};

namespace detail {

inline Check tolerance_check(std::string name, double error, double tol, json details = json::object()) {
  details["error"] = error;
  details["tolerance"] = tol;
  const double margin = tol - error;
  return {std::move(name), margin >= 0 ? CheckStatus::Pass : CheckStatus::Fail, io::format_real(margin),
          std::move(details)};
}

inline json write_face(const FaceDescriptor& f) { return {{"dim", f.dim}, {"vertices", f.vertex_subset}}; }

inline std::string index_triple(const MidpointCheck& c) {
  return "y-=" + c.minus.str() + " y0=" + c.centre.str() + " y+=" + c.plus.str();
}

inline ProjectiveVector amps_or_ones(const Node& root, const TorusWeightSystem& W) {
  if (!root.has("amps")) return ProjectiveVector::ones(W.size());
  const ProjectiveVector v = io::read_vector(root["amps"]);
  if (v.size() != W.size()) root["amps"].fail("expected one amplitude per weight");
  return v;
}

inline QuadratureConfig read_quadrature(const Node& root, const Options& opt) {
  QuadratureConfig q;
  q.workers = opt.workers;
  if (auto n = root.optional("quadrature")) {
    n->object({"order", "panels", "radius", "adaptive", "max_doublings"});
    if (n->has("order")) q.order = static_cast<unsigned>((*n)["order"].count(1));
    if (n->has("panels")) q.panels = (*n)["panels"].count(1);
    if (n->has("radius")) q.radius = (*n)["radius"].real();
    if (n->has("adaptive")) q.adaptive = (*n)["adaptive"].boolean();
    if (n->has("max_doublings")) q.max_doublings = (*n)["max_doublings"].count(0);
    if (!(q.radius > 0)) (*n)["radius"].fail("radius must be positive");
  }
  return q;
}

inline json write_quadrature(const QuadratureReport& q) {
  json hist = json::array();
  for (const auto& s : q.history)
    hist.push_back({{"radius", s.radius}, {"panels", s.panels}, {"value", s.value}, {"increment", s.increment}});
  return {{"value", q.value}, {"radius", q.radius}, {"order", q.order}, {"panels", q.panels}, {"history", hist}};
}

}  // namespace detail

// ---- geometry and mixed volumes

inline void cmd_mixed_volumes(const Node& root, Context& ctx) {
  root.object({"bodies"});
  const auto bodies = io::read_bodies(root["bodies"]);
  const MixedVolumeTable table = mixed_volumes(bodies, ctx.opt.workers);
  auto& rep = ctx.report;
  rep.results()["table"] = io::write_table(table);
  for (std::size_t j = 0; j < bodies.size(); ++j) {
    const Rational diff = table.body_volume(j) - volume(bodies[j]);
    rep.add_margin("diagonal body " + std::to_string(j + 1), -abs(diff));
  }
  for (const auto& [I, v] : table.values()) rep.add_margin("nonnegative I=" + I.str(), v);
  Polytope sum = bodies.front();
  for (std::size_t j = 1; j < bodies.size(); ++j) sum = minkowski_sum(sum, bodies[j]);
  const Rational at_ones = table.polynomial(RVec(bodies.size(), Rational(1)));
  rep.add_margin("polynomial at (1,...,1) equals volume of the sum", -abs(at_ones - volume(sum)));
  ctx.table_csv = io::table_csv(table);
}

inline void cmd_bmi(const Node& root, Context& ctx) {
  root.object({"bodies"});
  const auto bodies = io::read_bodies(root["bodies"], 2);
  if (bodies.size() != 2) root["bodies"].fail("expected exactly two bodies");
  const double tol = ctx.opt.tol_or(1e-9);
  const BmiReport r = bmi_check(bodies[0], bodies[1], tol);
  auto& rep = ctx.report;
  rep.add_margin("binomial identity", -abs(r.binomial_sum - r.vol_sum),
                 {{"volume_of_sum", format_rational(r.vol_sum)}, {"binomial_sum", format_rational(r.binomial_sum)}});
  rep.add({"brunn-minkowski root form", r.holds ? CheckStatus::Pass : CheckStatus::Fail, io::format_real(r.margin),
           {{"lhs", r.lhs}, {"rhs", r.rhs}, {"tolerance", tol}}});
  if (r.homothetic) {
    rep.add({"homothety equality", r.equality ? CheckStatus::Pass : CheckStatus::Fail, io::format_real(r.margin),
             {{"tolerance", 1e-12}}});
  } else {
    rep.add_vacuous("homothety equality", {{"reason", "bodies are not positive homothets"}});
  }
  rep.results()["volumes"] = {format_rational(r.vol_first), format_rational(r.vol_second),
                              format_rational(r.vol_sum)};
}

inline void cmd_af_check(const Node& root, Context& ctx) {
  root.object({"table", "bodies"});
  if (root.has("table") == root.has("bodies")) root.fail("expected exactly one of \"table\" or \"bodies\"");
  const MixedVolumeTable table =
      root.has("table") ? io::read_table(root["table"]) : mixed_volumes(io::read_bodies(root["bodies"]), ctx.opt.workers);
  auto& rep = ctx.report;
  for (const auto& c : af_midpoint_checks(table)) {
    json d{{"vacuous", c.vacuous}};
    const Rational& lo = table.at(c.minus);
    const Rational& mid = table.at(c.centre);
    const Rational& hi = table.at(c.plus);
    if (sgn(lo) > 0 && sgn(mid) > 0 && sgn(hi) > 0)
      d["log_margin"] = std::log(mid.get_d()) - 0.5 * (std::log(lo.get_d()) + std::log(hi.get_d()));
    rep.add_margin("midpoint " + detail::index_triple(c), c.margin, std::move(d));
  }
  for (const auto& c : lower_bound_check(table)) rep.add_margin("lower bound I=" + c.index.str(), c.margin);
  rep.results()["table"] = io::write_table(table);
}

inline void cmd_logconcavity(const Node& root, Context& ctx) {
  root.object({"bodies", "steps"});
  const auto bodies = io::read_bodies(root["bodies"], 2);
  if (bodies.size() != 2) root["bodies"].fail("expected exactly two bodies");
  const std::size_t steps = root.has("steps") ? root["steps"].count(3) : 6;
  const LogConcavityReport r = minkowski_logconcavity(bodies[0], bodies[1], steps);
  for (const auto& c : r.checks)
    ctx.report.add_margin("t=" + c.s.get_str() + "," + c.mid.get_str() + "," + c.u.get_str(), c.margin);
  json rows = json::array();
  for (std::size_t i = 0; i < r.t.size(); ++i)
    rows.push_back({{"t", format_rational(r.t[i])}, {"volume", format_rational(r.volumes[i])}});
  ctx.report.results()["profile"] = rows;
}

// ---- momentum maps

inline void cmd_momentum_image(const Node& root, Context& ctx) {
  root.object({"weights", "amps", "samples", "spread"});
  const TorusWeightSystem W = io::read_weights(root["weights"]);
  const ProjectiveVector v = detail::amps_or_ones(root, W);
  const std::size_t samples = root.has("samples") ? root["samples"].count(1) : 500;
  const double spread = root.has("spread") ? root["spread"].real() : 3.0;
  const double tol = ctx.opt.tol_or(1e-9);
  const Polytope P = moment_polytope(W, v);
  const AtomicMeasure mu = orbit_measure(W, v);
  const Vec zero = Vec::Zero(static_cast<Eigen::Index>(W.rank()));

  double worst_margin = std::numeric_limits<double>::infinity(), worst_residual = 0, worst_cross = 0;
  std::size_t outside = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = ctx.uniform(W.rank(), spread);
    const Vec y = ctx.uniform(W.rank(), spread);
    const Vec m = momentum(W, orbit_point(W, v, x, y));
    const MembershipMargin mm = membership_margin(P, to_std(m));
    worst_margin = std::min(worst_margin, mm.within(tol));
    worst_residual = std::max(worst_residual, mm.affine_residual);
    if (!relative_interior_contains(P, to_std(m), tol)) ++outside;
    const Vec cross = momentum(W, orbit_point(W, v, zero, y)) - grad_log_laplace(mu, 2.0 * y);
    worst_cross = std::max(worst_cross, cross.lpNorm<Eigen::Infinity>());
  }
  auto& rep = ctx.report;
  rep.add({"orbit momenta in the relative interior of the moment polytope",
           outside == 0 ? CheckStatus::Pass : CheckStatus::Fail, io::format_real(worst_margin),
           {{"samples", samples},
            {"outside", outside},
            {"worst_affine_residual", worst_residual},
            {"margin_tolerance", tol}}});
  rep.add(detail::tolerance_check("momentum of the real orbit equals the log-Laplace gradient at 2y", worst_cross,
                                  1e-12, {{"samples", samples}}));
  rep.results()["moment_polytope"] = io::write_polytope(P);
}

inline void cmd_stratify(const Node& root, Context& ctx) {
  root.object({"weights", "amps"});
  const TorusWeightSystem W = io::read_weights(root["weights"]);
  const ProjectiveVector v = detail::amps_or_ones(root, W);
  const double tol = ctx.opt.tol_or(1e-9);
  const Polytope P = moment_polytope(W, v);
  const std::vector<Stratum> strata = stratify(W, v, tol);
  auto& rep = ctx.report;
  json list = json::array();
  for (const auto& s : strata) {
    const Polytope F = face_polytope(P, s.face);
    const MembershipMargin mm = membership_margin(F, to_std(s.momentum));
    const bool inside = relative_interior_contains(F, to_std(s.momentum), tol);
    std::string name = "stratum dim " + std::to_string(s.face.dim) + " vertices";
    for (auto i : s.face.vertex_subset) name += " " + std::to_string(i);
    rep.add({name, inside ? CheckStatus::Pass : CheckStatus::Fail, io::format_real(mm.within(tol)),
             {{"affine_residual", mm.affine_residual}, {"margin_tolerance", tol}}});
    list.push_back({{"face", detail::write_face(s.face)},
                    {"momentum", io::write_vec(s.momentum)},
                    {"representative", io::write_vector(s.representative)}});
  }
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < strata.size(); ++i)
    for (std::size_t j = i + 1; j < strata.size(); ++j)
      min_dist = std::min(min_dist, (strata[i].momentum - strata[j].momentum).norm());
  if (strata.size() < 2) {
    rep.add_vacuous("distinct faces have distinct momenta", {{"reason", "single stratum"}});
  } else {
    rep.add({"distinct faces have distinct momenta", min_dist > tol ? CheckStatus::Pass : CheckStatus::Fail,
             io::format_real(min_dist - tol), {{"min_distance", min_dist}}});
  }
  rep.results()["moment_polytope"] = io::write_polytope(P);
  rep.results()["strata"] = list;
}

inline void cmd_reach_target(const Node& root, Context& ctx) {
  root.object({"weights", "amps", "targets"});
  const TorusWeightSystem W = io::read_weights(root["weights"]);
  const ProjectiveVector v = detail::amps_or_ones(root, W);
  std::vector<Vec> targets;
  for (const auto& t : root["targets"].elements()) targets.push_back(t.real_vector(W.rank()));
  NewtonConfig cfg;
  cfg.residual_tol = ctx.opt.tol_or(1e-9);
  json out = json::array();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string name = "target " + std::to_string(i);
    try {
      const ReachResult r = reach_target(W, v, targets[i], cfg);
      ctx.report.add(detail::tolerance_check(name, r.residual, cfg.residual_tol));
      out.push_back({{"y", io::write_vec(r.y)}, {"residual", r.residual}});
    } catch (const SolverError& e) {
      ctx.report.add_failure(name, error_kind(e), e.what());
      out.push_back({{"error", error_kind(e)}});
    }
  }
  ctx.report.results()["solutions"] = out;
}

// ---- convex functions and Laplace transforms

inline void cmd_conjugate(const Node& root, Context& ctx) {
  root.object({"potential", "alphas", "probes", "spread"});
  const ConvexPotential f = io::read_potential(root["potential"]);
  const std::size_t n = f.dim();
  std::vector<Vec> alphas;
  if (auto a = root.optional("alphas"))
    for (const auto& e : a->elements()) alphas.push_back(e.real_vector(n));
  const std::size_t probes = root.has("probes") ? root["probes"].count(0) : (alphas.empty() ? 100 : 0);
  const double spread = root.has("spread") ? root["spread"].real() : 2.0;
  const double gap_tol = ctx.opt.tol_or(1e-8);
  const double inverse_tol = 1e-6;
  const Vec zero = Vec::Zero(static_cast<Eigen::Index>(n));
  auto& rep = ctx.report;

  json values = json::array();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const std::string name = "conjugate at alpha " + std::to_string(i);
    try {
      const ConjugateResult c = conjugate(f, alphas[i], zero);
      rep.add(detail::tolerance_check(name, c.gap_certificate, inverse_tol, {{"iterations", c.iterations}}));
      values.push_back({{"value", c.value}, {"argmax", io::write_vec(c.argmax)}});
    } catch (const SolverError& e) {
      rep.add_failure(name, error_kind(e), e.what());
      values.push_back({{"error", error_kind(e)}});
    }
  }
  rep.results()["conjugates"] = values;

  if (probes == 0) return;
  double worst_gap = 0, worst_inverse = 0;
  std::size_t failures = 0;
  for (std::size_t p = 0; p < probes; ++p) {
    const Vec x = ctx.uniform(n, spread);
    const Vec alpha = f.gradient(x);
    try {
      const ConjugateResult c = conjugate(f, alpha, zero);
      worst_gap = std::max(worst_gap, std::abs(f.value(x) + c.value - alpha.dot(x)));
      worst_inverse = std::max(worst_inverse, (c.argmax - x).norm());
    } catch (const SolverError&) {
      ++failures;
    }
  }
  rep.add(detail::tolerance_check("fenchel-young gap at grad f(x)", failures ? INFINITY : worst_gap, gap_tol,
                                  {{"probes", probes}, {"solver_failures", failures}}));
  rep.add(detail::tolerance_check("gradient inverse round trip", failures ? INFINITY : worst_inverse, inverse_tol,
                                  {{"probes", probes}, {"solver_failures", failures}}));
}

inline void cmd_moment_solve(const Node& root, Context& ctx) {
  root.object({"measure", "targets"});
  const AtomicMeasure mu = io::read_measure(root["measure"]);
  std::vector<Vec> targets;
  for (const auto& t : root["targets"].elements()) targets.push_back(t.real_vector(mu.dim()));
  NewtonConfig cfg;
  cfg.residual_tol = ctx.opt.tol_or(1e-9);
  json out = json::array();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string name = "target " + std::to_string(i);
    try {
      const MomentSolution s = solve_moment_any(mu, targets[i], cfg);
      ctx.report.add(detail::tolerance_check(name, s.residual, cfg.residual_tol, {{"iterations", s.iterations}}));
      out.push_back({{"x", io::write_vec(s.x)}, {"residual", s.residual}});
    } catch (const SolverError& e) {
      ctx.report.add_failure(name, error_kind(e), e.what());
      out.push_back({{"error", error_kind(e)}});
    }
  }
  ctx.report.results()["solutions"] = out;
}

// ---- forms

inline void cmd_integrate_form(const Node& root, Context& ctx) {
  root.object({"potential", "expected", "quadrature", "probes"});
  const ConvexPotential f = io::read_potential(root["potential"]);
  const QuadratureConfig q = detail::read_quadrature(root, ctx.opt);
  const std::size_t probes = root.has("probes") ? root["probes"].count(0) : 20;
  const double tol = ctx.opt.tol_or(1e-2);
  const std::size_t n = f.dim();
  auto& rep = ctx.report;

  const TorusFormField<> field(f);
  double worst_pf = 0, worst_pos = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < probes; ++p) {
    const Vec x = ctx.uniform(n, 2.0);
    const Tangent u{ctx.uniform(n, 1.0), ctx.uniform(n, 1.0)};
    worst_pos = std::min(worst_pos, positivity_probe(field, x, u));
    if (n <= kMaxPfaffianDim) {
      const double det = field.hessian(x).determinant();
      worst_pf = std::max(worst_pf, std::abs(top_power_density(field, x) - det) / std::max(std::abs(det), 1e-300));
    }
  }
  if (probes == 0) {
    rep.add_vacuous("form positivity", {{"reason", "no probes"}});
  } else {
    rep.add({"form positivity", worst_pos >= -1e-12 ? CheckStatus::Pass : CheckStatus::Fail,
             io::format_real(worst_pos + 1e-12), {{"min_value", worst_pos}, {"probes", probes}}});
    if (n <= kMaxPfaffianDim) {
      rep.add(detail::tolerance_check("top power density equals det hess", worst_pf, 1e-10, {{"probes", probes}}));
    } else {
      rep.add_vacuous("top power density equals det hess", {{"reason", "dimension above expansion guard"}});
    }
  }

  try {
    const Rational exact = root.has("expected") ? root["expected"].rational() : volume(gradient_image(f));
    const BridgeComparison c = compare_to_volume(f, exact, q);
    rep.add(detail::tolerance_check("det hess integral equals gradient image volume", c.rel_error, tol,
                                    {{"quadrature", c.quadrature}, {"expected", format_rational(exact)}}));
    rep.results()["quadrature"] = detail::write_quadrature(c.report);
  } catch (const UnboundedGradientImage& e) {
    rep.add_failure("det hess integral equals gradient image volume", error_kind(e), e.what());
  } catch (const NonConvergent& e) {
    rep.add_failure("det hess integral equals gradient image volume", error_kind(e), e.what());
  }
}

inline void cmd_bridge_check(const Node& root, Context& ctx) {
  root.object({"bodies", "s", "quadrature"});
  const auto bodies = io::read_bodies(root["bodies"], 2);
  if (bodies.size() != 2) root["bodies"].fail("expected exactly two bodies");
  const double s = root.has("s") ? root["s"].real() : 2.0;
  if (!(s > 0)) root["s"].fail("s must be positive");
  for (std::size_t j = 0; j < 2; ++j)
    if (!bodies[j].full_dimensional()) root["bodies"][j].fail("bridge bodies must be full-dimensional");
  const QuadratureConfig q = detail::read_quadrature(root, ctx.opt);
  const double single_tol = ctx.opt.tol_or(1e-2);
  const double sum_tol = ctx.opt.tol_or(2e-2);
  auto& rep = ctx.report;
  json quad = json::object();

  for (std::size_t j = 0; j < 2; ++j) {
    const BridgeComparison c = compare_to_volume(vertex_potential(bodies[j], s), volume(bodies[j]), q);
    const std::string name = "body " + std::to_string(j + 1) + " det hess integral equals volume";
    rep.add(detail::tolerance_check(name, c.rel_error, single_tol, {{"quadrature", c.quadrature}, {"exact", c.exact}}));
    quad["body " + std::to_string(j + 1)] = detail::write_quadrature(c.report);
  }
  const BridgeComparison add = additivity_bridge(bodies[0], bodies[1], s, q);
  rep.add(detail::tolerance_check("sum potential integral equals minkowski sum volume", add.rel_error, sum_tol,
                                  {{"quadrature", add.quadrature}, {"exact", add.exact}}));
  quad["sum"] = detail::write_quadrature(add.report);
  for (const auto& p : mixed_volume_bridge(bodies, s, q)) {
    rep.add(detail::tolerance_check("mixed volume polynomial at t=" + p.t.str(), p.comparison.rel_error, sum_tol,
                                    {{"quadrature", p.comparison.quadrature}, {"exact", p.comparison.exact}}));
  }
  rep.results()["quadrature"] = quad;
}

// ---- dispatch

using Handler = std::function<void(const Node&, Context&)>;

inline const std::map<std::string, Handler>& commands() {
  static const std::map<std::string, Handler> table{
      {"mixed-volumes", cmd_mixed_volumes}, {"bmi", cmd_bmi},
      {"af-check", cmd_af_check},           {"logconcavity", cmd_logconcavity},
      {"momentum-image", cmd_momentum_image}, {"stratify", cmd_stratify},
      {"reach-target", cmd_reach_target},   {"conjugate", cmd_conjugate},
      {"moment-solve", cmd_moment_solve},   {"integrate-form", cmd_integrate_form},
      {"bridge-check", cmd_bridge_check},
  };
  return table;
}

inline std::optional<std::string> read_input(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Runs one command and writes its report. Returns the exit status.
inline int execute(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto it = commands().find(opt.command);
  if (it == commands().end()) {
    err << "error: unknown command \"" << opt.command << "\"\n";
    return 2;
  }
  const auto text = read_input(opt.input);
  if (!text) {
    err << "error: " << opt.input << ": cannot read input file\n";
    return 2;
  }

  io::Document doc;
  try {
    doc = io::parse_document(*text);
  } catch (const io::InputError& e) {
    err << "error: " << opt.input << ":" << e.what() << "\n";
    return 2;
  }

  VerificationReport report(opt.command, inputs_digest(doc.value));
  Context ctx{opt, report, std::nullopt, std::mt19937_64(opt.seed)};
  try {
    it->second(Node(doc.value), ctx);
  } catch (const io::SchemaError& e) {
    err << "error: " << opt.input << ":" << doc.locate(e).what() << "\n";
    return 2;
  } catch (const ResourceGuard& e) {
    err << "error: resource guard: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    report.add_failure(opt.command, error_kind(e), e.what());
  }

  const std::string csv = ctx.table_csv.value_or(report.checks_csv());
  if (opt.format == "csv") {
    out << csv;
  } else {
    out << report.to_json().dump(2) << "\n";
  }
  if (!opt.csv_path.empty()) {
    std::ofstream side(opt.csv_path, std::ios::binary);
    if (!side) {
      err << "error: " << opt.csv_path << ": cannot write CSV sidecar\n";
      return 2;
    }
    side << csv;
  }
  return report.exit_status();
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and numerical verification of convex-geometric identities", "convexkit"};
  Options opt;
  std::vector<std::string> names;
  for (const auto& [name, _] : commands()) names.push_back(name);
  app.add_option("command", opt.command, "Verification to run")->required()->check(CLI::IsMember(names));
  app.add_option("input", opt.input, "JSON input file, or - for standard input")->required();
  app.add_option("--seed", opt.seed, "Seed for randomized probe suites");
  app.add_option("--tol", opt.tol, "Override the command's default tolerance")->check(CLI::PositiveNumber);
  app.add_option("--workers", opt.workers, "Worker threads for volume and quadrature jobs")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  app.add_option("--format", opt.format, "Standard output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--csv", opt.csv_path, "Also write the CSV table to this path");

  std::reverse(args.begin(), args.end());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  return execute(opt, out, err);
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace ck::cli
