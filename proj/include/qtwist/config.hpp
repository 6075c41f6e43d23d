#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qtwist/eulerprod.hpp"
#include "qtwist/lfunctions.hpp"
#include "qtwist/special.hpp"

namespace qtwist {

enum class Subcommand { tau, gauss_verify, poisson_verify, lvalue, euler_verify, sweep, fit, report };

const char* subcommand_name(Subcommand s);
/// Throws UsageError for an unknown name.
Subcommand parse_subcommand(const std::string& s);

struct Tolerances {
  double gauss = 1e-9;
  double poisson = 1e-6;
  double afe = 1e-5;
  double euler = 1e-8;      // Z, local series and J identities
  double F = 1e-6;          // F(0; l)
  double moebius = 1e-9;
  double deligne = 1e-9;
  double multiplicative = 1e-12;
  double slope = 0.25;      // |A_fit / A_pred - 1|
  double twist = 0.15;      // deviation budget before the envelope term
};

struct RunConfig {
  Subcommand subcommand = Subcommand::tau;

  double X = 1000.0;
  std::int64_t l = 1;
  std::uint64_t P = 100000;
  std::vector<double> grid = {1000.0, 2000.0, 4000.0, 8000.0};
  std::vector<std::int64_t> l_list = {1, 3, 5, 7};
  unsigned shards = 1;
  std::size_t chunk = 64;
  double Z = 0.0;  // Moebius split parameter, 0 = X^{1/8} l^{-1/4}

  std::uint64_t N = 1000;             // tau table size
  std::uint64_t gauss_k_max = 315;
  std::int64_t gauss_m_max = 50;
  std::uint64_t gauss_pairs = 1000;
  std::uint64_t seed = 20240601;
  std::vector<std::uint64_t> poisson_n = {1, 3, 5, 15, 21, 45};
  double poisson_X = 50.0;
  std::uint64_t d_max = 500;
  std::uint64_t M = 10000;
  std::uint64_t a_max = 10000;
  double kappa_D = 2.0;

  Kernel kernel = Kernel::unit;
  AfeRoute route = AfeRoute::product;
  ConstantForm constant_form = ConstantForm::proof_form;

  std::filesystem::path out = "out";
  std::filesystem::path cache = "cache";

  Tolerances tol;

  /// Keys given in the file or on the command line.
  std::set<std::string> explicit_keys;
  bool is_explicit(const std::string& key) const { return explicit_keys.count(key) > 0; }
};

/// Recognised keys with a one-line description and default, for --help.
const std::vector<std::pair<std::string, std::string>>& config_key_help();

/// Flat `key = value` text; `#` starts a comment.  Throws UsageError with
/// the line number on a malformed line.
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin = "config");

/// Applies file values then flag overrides, then validates every key.
/// Throws UsageError naming the key on unknown keys or invalid values.
RunConfig parse_config(Subcommand sub, const std::optional<std::filesystem::path>& file,
                       const std::map<std::string, std::string>& overrides);

}  // namespace qtwist
