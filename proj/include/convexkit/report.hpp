#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "convexkit/io.hpp"
#include "convexkit/rational.hpp"

namespace ck {

enum class CheckStatus { Pass, Fail, Vacuous };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Vacuous: return "VACUOUS";
  }
  return "FAIL";
}

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::Fail;
  std::string margin;  // decimal string; empty only for VACUOUS checks
  io::json details = io::json::object();
};

/// Decimal rendering of an exact rational with 17 significant digits;
/// integers print exactly.
inline std::string decimal_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return io::format_real(q.get_d());
}

/// Outcome of one command. exit_status is 0 iff no check failed.
class VerificationReport {
 public:
  VerificationReport(std::string command, std::string inputs_digest)
      : command_(std::move(command)), digest_(std::move(inputs_digest)) {}

  void add(Check c) { checks_.push_back(std::move(c)); }

  /// PASS when margin >= 0.
  void add_margin(std::string name, const Rational& margin, io::json details = io::json::object()) {
    details["margin_exact"] = format_rational(margin);
    add({std::move(name), sgn(margin) >= 0 ? CheckStatus::Pass : CheckStatus::Fail, decimal_string(margin),
         std::move(details)});
  }

  /// PASS when margin >= 0 (callers fold their tolerance into the margin).
  void add_margin(std::string name, double margin, io::json details = io::json::object()) {
    add({std::move(name), margin >= 0 ? CheckStatus::Pass : CheckStatus::Fail, io::format_real(margin),
         std::move(details)});
  }

  void add_vacuous(std::string name, io::json details = io::json::object()) {
    add({std::move(name), CheckStatus::Vacuous, "", std::move(details)});
  }

  void add_failure(std::string name, std::string error_kind, std::string message) {
    add({std::move(name), CheckStatus::Fail, "",
         io::json{{"error", std::move(error_kind)}, {"message", std::move(message)}}});
  }

  io::json& results() { return results_; }
  const std::vector<Check>& checks() const { return checks_; }

  int exit_status() const {
    for (const auto& c : checks_)
      if (c.status == CheckStatus::Fail) return 1;
    return 0;
  }

  io::json to_json() const {
    io::json checks = io::json::array();
    for (const auto& c : checks_) {
      io::json j{{"name", c.name}, {"status", to_string(c.status)}, {"details", c.details}};
      j["margin"] = c.status == CheckStatus::Vacuous && c.margin.empty() ? io::json("VACUOUS") : io::json(c.margin);
      checks.push_back(std::move(j));
    }
    return {{"command", command_},
            {"inputs_digest", digest_},
            {"checks", checks},
            {"results", results_},
            {"exit_status", exit_status()}};
  }

  /// name,status,margin rows.
  std::string checks_csv() const {
    std::string out = "name,status,margin\n";
    for (const auto& c : checks_) out += "\"" + c.name + "\"," + to_string(c.status) + "," + c.margin + "\n";
    return out;
  }

 private:
  std::string command_;
  std::string digest_;
  std::vector<Check> checks_;
  io::json results_ = io::json::object();
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest computation failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

/// Digest of the canonical (key-sorted, whitespace-free) form of the input.
inline std::string inputs_digest(const io::json& input) { return "sha256:" + sha256_hex(input.dump()); }

}  // namespace ck
