#pragma once

// JSON schemas for the command-line front end.
//
// Every schema has a reader that reports failures with a line and column in
// the source text and a canonical writer whose output reads back to an equal
// value. Rationals travel as strings ("p/q", integers or decimals); reals as
// numbers or decimal strings.

#include <nlohmann/json.hpp>

#include <charconv>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "convexkit/convexfn.hpp"
#include "convexkit/errors.hpp"
#include "convexkit/geometry.hpp"
#include "convexkit/measure.hpp"
#include "convexkit/mixedvol.hpp"
#include "convexkit/momentum.hpp"
#include "convexkit/rational.hpp"

namespace ck::io {

using json = nlohmann::json;

/// Malformed or schema-violating input, located in the source text.
class InputError : public Error {
 public:
  InputError(std::size_t line, std::size_t column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Schema violation at a JSON path; converted to an InputError once the
/// source text is known.
class SchemaError : public Error {
 public:
  SchemaError(std::vector<std::string> path, const std::string& message) : Error(message), path_(std::move(path)) {}
  const std::vector<std::string>& path() const { return path_; }

 private:
  std::vector<std::string> path_;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Finds the source offset of a value addressed by object keys and array
// indices. Only used on text that already parsed successfully.
class Locator {
 public:
  explicit Locator(std::string_view text) : s_(text) {}

  /// Offset of the deepest prefix of `path` that exists.
  std::size_t find(const std::vector<std::string>& path) {
    i_ = 0;
    ws();
    std::size_t best = i_;
    for (const auto& token : path) {
      if (i_ >= s_.size()) break;
      if (s_[i_] == '{') {
        if (!enter_member(token)) break;
      } else if (s_[i_] == '[') {
        if (!enter_element(token)) break;
      } else {
        break;
      }
      best = i_;
    }
    return best;
  }

 private:
  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) ++i_;
  }

  std::size_t string_end(std::size_t p) const {
    for (++p; p < s_.size(); ++p) {
      if (s_[p] == '\\') {
        ++p;
      } else if (s_[p] == '"') {
        return p + 1;
      }
    }
    return s_.size();
  }

  void skip_value() {
    ws();
    if (i_ >= s_.size()) return;
    if (s_[i_] == '"') {
      i_ = string_end(i_);
      return;
    }
    if (s_[i_] == '{' || s_[i_] == '[') {
      int depth = 0;
      while (i_ < s_.size()) {
        const char c = s_[i_];
        if (c == '"') {
          i_ = string_end(i_);
          continue;
        }
        if (c == '{' || c == '[') ++depth;
        if (c == '}' || c == ']') --depth;
        ++i_;
        if (depth == 0) return;
      }
      return;
    }
    while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']') ++i_;
  }

  bool enter_member(const std::string& key) {
    const std::size_t start = i_;
    ++i_;
    for (;;) {
      ws();
      if (i_ >= s_.size() || s_[i_] != '"') break;
      const std::size_t end = string_end(i_);
      const std::string name = json::parse(s_.substr(i_, end - i_)).get<std::string>();
      i_ = end;
      ws();
      ++i_;  // ':'
      ws();
      if (name == key) return true;
      skip_value();
      ws();
      if (i_ < s_.size() && s_[i_] == ',') ++i_;
    }
    i_ = start;
    return false;
  }

  bool enter_element(const std::string& token) {
    const std::size_t start = i_;
    std::size_t target = 0;
    if (std::from_chars(token.data(), token.data() + token.size(), target).ec != std::errc{}) return false;
    ++i_;
    for (std::size_t idx = 0;; ++idx) {
      ws();
      if (i_ >= s_.size() || s_[i_] == ']') break;
      if (idx == target) return true;
      skip_value();
      ws();
      if (i_ < s_.size() && s_[i_] == ',') ++i_;
    }
    i_ = start;
    return false;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// A parsed input document together with its source text.
struct Document {
  std::string text;
  json value;

  InputError locate(const SchemaError& e) const {
    detail::Locator loc(text);
    const auto [line, col] = detail::line_column(text, loc.find(e.path()));
    std::string where;
    for (const auto& p : e.path()) where += "/" + p;
    return InputError(line, col, (where.empty() ? std::string("/") : where) + ": " + e.what());
  }
};

inline Document parse_document(std::string text) {
  try {
    json v = json::parse(text);
    return {std::move(text), std::move(v)};
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = detail::line_column(text, offset);
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw InputError(line, col, msg);
  }
}

/// Shortest decimal that reads back to the same double.
inline std::string format_real(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

/// A JSON value with its path, for schema checks.
class Node {
 public:
  explicit Node(const json& v, std::vector<std::string> path = {}) : v_(&v), path_(std::move(path)) {}

  const json& value() const { return *v_; }
  const std::vector<std::string>& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const { throw SchemaError(path_, message); }

  /// Rejects keys outside `allowed`.
  const Node& object(std::initializer_list<std::string_view> allowed) const {
    if (!v_->is_object()) fail("expected an object");
    for (const auto& [key, _] : v_->items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) child(key).fail("unknown key \"" + key + "\"");
    }
    return *this;
  }

  bool has(const std::string& key) const { return v_->is_object() && v_->contains(key); }

  Node operator[](const std::string& key) const {
    if (!v_->is_object()) fail("expected an object");
    if (!v_->contains(key)) fail("missing key \"" + key + "\"");
    return child(key);
  }

  std::optional<Node> optional(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return child(key);
  }

  std::size_t size() const {
    if (!v_->is_array()) fail("expected an array");
    return v_->size();
  }

  Node operator[](std::size_t i) const {
    if (!v_->is_array()) fail("expected an array");
    std::vector<std::string> p = path_;
    p.push_back(std::to_string(i));
    return Node(v_->at(i), std::move(p));
  }

  std::vector<Node> elements(bool nonempty = true) const {
    const std::size_t n = size();
    if (nonempty && n == 0) fail("expected a nonempty array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back((*this)[i]);
    return out;
  }

  std::string string() const {
    if (!v_->is_string()) fail("expected a string");
    return v_->get<std::string>();
  }

  long long integer() const {
    if (!v_->is_number_integer()) fail("expected an integer");
    return v_->get<long long>();
  }

  std::size_t count(std::size_t min = 0) const {
    const long long v = integer();
    if (v < static_cast<long long>(min)) fail("expected an integer >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  Rational rational() const {
    try {
      if (v_->is_number_integer()) return parse_rational(std::to_string(v_->get<long long>()));
      if (v_->is_string()) return parse_rational(v_->get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
    fail("expected a rational as a string such as \"3/4\" or an integer");
  }

  double real() const {
    if (v_->is_number()) return v_->get<double>();
    if (v_->is_string()) {
      const std::string s = v_->get<std::string>();
      double x = 0;
      const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
      if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) fail("malformed decimal \"" + s + "\"");
      return x;
    }
    fail("expected a number or decimal string");
  }

  bool boolean() const {
    if (!v_->is_boolean()) fail("expected true or false");
    return v_->get<bool>();
  }

  RVec rational_vector(std::optional<std::size_t> n = std::nullopt) const {
    RVec out;
    for (const auto& e : elements(!n || *n > 0)) out.push_back(e.rational());
    if (n && out.size() != *n) fail("expected " + std::to_string(*n) + " entries, got " + std::to_string(out.size()));
    return out;
  }

  Vec real_vector(std::optional<std::size_t> n = std::nullopt) const {
    const auto es = elements(!n || *n > 0);
    if (n && es.size() != *n) fail("expected " + std::to_string(*n) + " entries, got " + std::to_string(es.size()));
    Vec out(static_cast<Eigen::Index>(es.size()));
    for (std::size_t i = 0; i < es.size(); ++i) out[static_cast<Eigen::Index>(i)] = es[i].real();
    if (!out.allFinite()) fail("non-finite entry");
    return out;
  }

  /// Runs a constructor and reports its domain errors at this node.
  /// Resource guards pass through untouched.
  template <class Fn>
  auto build(Fn&& fn) const -> decltype(fn()) {
    try {
      return fn();
    } catch (const ResourceGuard&) {
      throw;
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

 private:
  Node child(const std::string& key) const {
    std::vector<std::string> p = path_;
    p.push_back(key);
    return Node(v_->at(key), std::move(p));
  }

  const json* v_;
  std::vector<std::string> path_;
};

// ---- Polytope: {"dim": n, "vertices": [["p/q", ...], ...]}

inline Polytope read_polytope(const Node& node) {
  node.object({"dim", "vertices"});
  const std::size_t n = node["dim"].count(1);
  std::vector<RVec> pts;
  for (const auto& v : node["vertices"].elements()) pts.push_back(v.rational_vector(n));
  return node.build([&] { return hull(pts, n); });
}

inline json write_rvec(const RVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(format_rational(x));
  return a;
}

inline json write_polytope(const Polytope& P) {
  json verts = json::array();
  for (const auto& v : P.vertices()) verts.push_back(write_rvec(v));
  return {{"dim", P.dim()}, {"vertices", verts}};
}

inline std::vector<Polytope> read_bodies(const Node& node, std::size_t min_count = 1) {
  std::vector<Polytope> out;
  for (const auto& b : node.elements()) out.push_back(read_polytope(b));
  if (out.size() < min_count) node.fail("expected at least " + std::to_string(min_count) + " bodies");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].dim() != out[0].dim()) node[i].fail("body dimension differs from the first body");
  return out;
}

// ---- Measure: {"dim": n, "atoms": [{"alpha": [...], "w": real}, ...]}

inline AtomicMeasure read_measure(const Node& node) {
  node.object({"dim", "atoms"});
  const std::size_t n = node["dim"].count(1);
  std::vector<Atom> atoms;
  for (const auto& a : node["atoms"].elements()) {
    a.object({"alpha", "w"});
    const double w = a.has("w") ? a["w"].real() : 1.0;
    if (!(w > 0) || !std::isfinite(w)) a["w"].fail("weight must be positive and finite");
    atoms.push_back({a["alpha"].rational_vector(n), w});
  }
  return node.build([&] { return AtomicMeasure(n, std::move(atoms)); });
}

inline json write_measure(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"alpha", write_rvec(a.alpha)}, {"w", format_real(a.weight)}});
  return {{"dim", mu.dim()}, {"atoms", atoms}};
}

// ---- Potential:
//   {"family": "pdquad", "A": [[r, ...], ...], "b": [r, ...]}
//   {"family": "lse", "measure": Measure, "s": real}
//   {"family": "lse", "polytope": Polytope, "s": real}      (unit weights on the vertices)
//   {"family": "combo", "terms": [{"c": real, "potential": Potential}, ...]}

inline ConvexPotential read_potential(const Node& node) {
  if (!node.value().is_object()) node.fail("expected an object");
  const std::string family = node["family"].string();
  if (family == "pdquad") {
    node.object({"family", "A", "b"});
    RMat A;
    const auto rows = node["A"].elements();
    for (const auto& r : rows) A.push_back(r.rational_vector(rows.size()));
    RVec b = node.has("b") ? node["b"].rational_vector(rows.size()) : RVec(rows.size(), Rational(0));
    return node.build([&] { return ConvexPotential::quadratic(std::move(A), std::move(b)); });
  }
  if (family == "lse") {
    node.object({"family", "measure", "polytope", "s"});
    const double s = node.has("s") ? node["s"].real() : 1.0;
    if (node.has("measure") == node.has("polytope")) node.fail("lse needs exactly one of \"measure\" or \"polytope\"");
    if (node.has("polytope")) {
      const Polytope P = read_polytope(node["polytope"]);
      return node.build([&] { return vertex_potential(P, s); });
    }
    AtomicMeasure mu = read_measure(node["measure"]);
    return node.build([&] { return ConvexPotential::log_sum_exp(std::move(mu), s); });
  }
  if (family == "combo") {
    node.object({"family", "terms"});
    std::vector<double> coefs;
    std::vector<ConvexPotential> terms;
    for (const auto& t : node["terms"].elements()) {
      t.object({"c", "potential"});
      coefs.push_back(t["c"].real());
      terms.push_back(read_potential(t["potential"]));
    }
    return node.build([&] { return ConvexPotential::combination(std::move(coefs), std::move(terms)); });
  }
  node["family"].fail("unknown family \"" + family + "\"; expected pdquad, lse or combo");
}

inline json write_potential(const ConvexPotential& f) {
  return std::visit(
      [](const auto& fam) -> json {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PDQuadratic>) {
          json A = json::array();
          for (const auto& r : fam.A) A.push_back(write_rvec(r));
          return {{"family", "pdquad"}, {"A", A}, {"b", write_rvec(fam.b)}};
        } else if constexpr (std::is_same_v<T, LogSumExp>) {
          return {{"family", "lse"}, {"measure", write_measure(fam.measure)}, {"s", format_real(fam.scale)}};
        } else {
          json terms = json::array();
          for (std::size_t i = 0; i < fam.terms.size(); ++i)
            terms.push_back({{"c", format_real(fam.coefficients[i])}, {"potential", write_potential(fam.terms[i])}});
          return {{"family", "combo"}, {"terms", terms}};
        }
      },
      f.family());
}

// ---- Weights: {"rank": n, "weights": [[int, ...], ...]}

inline TorusWeightSystem read_weights(const Node& node) {
  node.object({"rank", "weights"});
  const std::size_t n = node["rank"].count(1);
  std::vector<std::vector<long long>> ws;
  for (const auto& w : node["weights"].elements()) {
    std::vector<long long> row;
    for (const auto& c : w.elements()) row.push_back(c.integer());
    if (row.size() != n) w.fail("expected " + std::to_string(n) + " entries");
    ws.push_back(std::move(row));
  }
  return node.build([&] { return TorusWeightSystem(n, std::move(ws)); });
}

inline json write_weights(const TorusWeightSystem& W) { return {{"rank", W.rank()}, {"weights", W.weights()}}; }

// ---- Vector: {"amps": [[re, im], ...]}

inline ProjectiveVector read_vector(const Node& node) {
  node.object({"amps"});
  std::vector<Complex> amps;
  for (const auto& a : node["amps"].elements()) {
    if (a.size() != 2) a.fail("expected [re, im]");
    amps.emplace_back(a[0].real(), a[1].real());
  }
  return node.build([&] { return ProjectiveVector(std::move(amps)); });
}

inline json write_vector(const ProjectiveVector& v) {
  json amps = json::array();
  for (const auto& a : v.amplitudes()) amps.push_back({format_real(a.real()), format_real(a.imag())});
  return {{"amps", amps}};
}

// ---- Table: {"n": n, "k": k, "entries": [{"I": [...], "value": "p/q"}, ...]}

inline MixedVolumeTable read_table(const Node& node) {
  node.object({"n", "k", "entries"});
  const std::size_t n = node["n"].count(1);
  const std::size_t k = node["k"].count(1);
  std::map<MultiIndex, Rational> values;
  for (const auto& e : node["entries"].elements()) {
    e.object({"I", "value"});
    std::vector<unsigned> idx;
    for (const auto& c : e["I"].elements()) idx.push_back(static_cast<unsigned>(c.count(0)));
    if (idx.size() != k) e["I"].fail("expected " + std::to_string(k) + " entries");
    MultiIndex I(idx);
    if (I.degree() != n) e["I"].fail("entries must sum to n = " + std::to_string(n));
    const Rational v = e["value"].rational();
    if (sgn(v) < 0) e["value"].fail("mixed volumes are nonnegative");
    if (!values.emplace(I, v).second) e["I"].fail("duplicate index " + I.str());
  }
  return node.build([&] { return MixedVolumeTable(n, k, std::move(values)); });
}

inline json write_index(const MultiIndex& I) { return I.entries(); }

inline json write_table(const MixedVolumeTable& t) {
  json entries = json::array();
  for (const auto& I : simplex_indices(t.k(), static_cast<unsigned>(t.n())))
    entries.push_back({{"I", write_index(I)}, {"value", format_rational(t.at(I))}});
  return {{"n", t.n()}, {"k", t.k()}, {"entries", entries}};
}

inline std::string table_csv(const MixedVolumeTable& t) {
  std::string out;
  for (std::size_t j = 1; j <= t.k(); ++j) out += "i" + std::to_string(j) + ",";
  out += "value\n";
  for (const auto& I : simplex_indices(t.k(), static_cast<unsigned>(t.n()))) {
    for (auto e : I.entries()) out += std::to_string(e) + ",";
    out += format_rational(t.at(I)) + "\n";
  }
  return out;
}

inline json write_vec(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace ck::io
