#include "qtwist/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "qtwist/errors.hpp"

namespace qtwist {

namespace {

constexpr std::pair<Subcommand, const char*> kSubcommands[] = {
    {Subcommand::tau, "tau"},
    {Subcommand::gauss_verify, "gauss-verify"},
    {Subcommand::poisson_verify, "poisson-verify"},
    {Subcommand::lvalue, "lvalue"},
    {Subcommand::euler_verify, "euler-verify"},
    {Subcommand::sweep, "sweep"},
    {Subcommand::fit, "fit"},
    {Subcommand::report, "report"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void invalid(const std::string& key, const std::string& value, const std::string& why) {
  throw UsageError("invalid value '" + value + "' for key '" + key + "': " + why);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    invalid(key, text, "not a number");
  return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
  if (out.empty()) invalid(key, text, "empty list");
  return out;
}

struct KeySpec {
  const char* help;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

void require(bool ok, const std::string& key, const std::string& value, const std::string& why) {
  if (!ok) invalid(key, value, why);
}

void set_tol(double& slot, const std::string& k, const std::string& v) {
  slot = parse_number<double>(k, v);
  require(slot > 0, k, v, "tolerance must be positive");
}

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = {
      {"X", {"family scale X >= 100 (default 1000)", [](RunConfig& c, auto& k, auto& v) {
         c.X = parse_number<double>(k, v);
         require(c.X >= 100, k, v, "X must be at least 100");
       }}},
      {"l", {"odd positive twist index (default 1)", [](RunConfig& c, auto& k, auto& v) {
         c.l = parse_number<std::int64_t>(k, v);
         require(c.l > 0 && c.l % 2 == 1, k, v, "l must be odd and positive");
       }}},
      {"l_list", {"twist indices for report (default 1,3,5,7)", [](RunConfig& c, auto& k, auto& v) {
         c.l_list = parse_list<std::int64_t>(k, v);
         for (auto l : c.l_list) require(l > 0 && l % 2 == 1, k, v, "every l must be odd and positive");
       }}},
      {"P", {"Euler product prime cutoff >= 100 (default 100000)", [](RunConfig& c, auto& k, auto& v) {
         c.P = parse_number<std::uint64_t>(k, v);
         require(c.P >= 100 && c.P <= 100000000, k, v, "P must lie in [100, 1e8]");
       }}},
      {"grid", {"fit grid of X values (default 1000,2000,4000,8000)", [](RunConfig& c, auto& k, auto& v) {
         c.grid = parse_list<double>(k, v);
         for (std::size_t i = 0; i < c.grid.size(); ++i) {
           require(c.grid[i] >= 100, k, v, "grid values must be at least 100");
           for (std::size_t j = 0; j < i; ++j)
             require(c.grid[i] != c.grid[j], k, v, "grid values must be distinct");
         }
       }}},
      {"shards", {"worker threads for the sweep (default 1)", [](RunConfig& c, auto& k, auto& v) {
         const auto s = parse_number<unsigned>(k, v);
         require(s >= 1 && s <= 256, k, v, "shards must lie in [1, 256]");
         c.shards = s;
       }}},
      {"chunk", {"d values per reduction leaf (default 64)", [](RunConfig& c, auto& k, auto& v) {
         c.chunk = parse_number<std::size_t>(k, v);
         require(c.chunk >= 1, k, v, "chunk must be positive");
       }}},
      {"Z", {"Moebius split parameter, 0 = X^{1/8} l^{-1/4} (default 0)", [](RunConfig& c, auto& k, auto& v) {
         c.Z = parse_number<double>(k, v);
         require(c.Z == 0 || c.Z >= 1, k, v, "Z must be 0 or at least 1");
       }}},
      {"N", {"tau table size (default 1000)", [](RunConfig& c, auto& k, auto& v) {
         c.N = parse_number<std::uint64_t>(k, v);
         require(c.N >= 1 && c.N <= 50000000, k, v, "N must lie in [1, 5e7]");
       }}},
      {"gauss_k_max", {"largest odd k for gauss-verify (default 315)", [](RunConfig& c, auto& k, auto& v) {
         c.gauss_k_max = parse_number<std::uint64_t>(k, v);
         require(c.gauss_k_max >= 1 && c.gauss_k_max <= kGaussBruteForceBound, k, v,
                 "gauss_k_max must lie in [1, 10000]");
       }}},
      {"gauss_m_max", {"largest |m| for gauss-verify (default 50)", [](RunConfig& c, auto& k, auto& v) {
         c.gauss_m_max = parse_number<std::int64_t>(k, v);
         require(c.gauss_m_max >= 0 && c.gauss_m_max <= 100000, k, v, "gauss_m_max must lie in [0, 1e5]");
       }}},
      {"gauss_pairs", {"random coprime pairs for multiplicativity (default 1000)", [](RunConfig& c, auto& k, auto& v) {
         c.gauss_pairs = parse_number<std::uint64_t>(k, v);
       }}},
      {"seed", {"random seed (default 20240601)", [](RunConfig& c, auto& k, auto& v) {
         c.seed = parse_number<std::uint64_t>(k, v);
       }}},
      {"poisson_n", {"odd n for poisson-verify (default 1,3,5,15,21,45)", [](RunConfig& c, auto& k, auto& v) {
         c.poisson_n = parse_list<std::uint64_t>(k, v);
         for (auto n : c.poisson_n) require(n % 2 == 1, k, v, "every n must be odd and positive");
       }}},
      {"poisson_X", {"window scale for poisson-verify (default 50)", [](RunConfig& c, auto& k, auto& v) {
         c.poisson_X = parse_number<double>(k, v);
         require(c.poisson_X > 0 && c.poisson_X <= 1e5, k, v, "poisson_X must lie in (0, 1e5]");
       }}},
      {"d_max", {"largest d for the AFE cross-check (default 500)", [](RunConfig& c, auto& k, auto& v) {
         c.d_max = parse_number<std::uint64_t>(k, v);
         require(c.d_max >= 1 && c.d_max <= 5000, k, v, "d_max must lie in [1, 5000]");
       }}},
      {"M", {"Dirichlet series length for the Z identity (default 10000)", [](RunConfig& c, auto& k, auto& v) {
         c.M = parse_number<std::uint64_t>(k, v);
         require(c.M >= 1 && c.M <= 10000000, k, v, "M must lie in [1, 1e7]");
       }}},
      {"a_max", {"a-sum truncation for F(0; l) (default 10000)", [](RunConfig& c, auto& k, auto& v) {
         c.a_max = parse_number<std::uint64_t>(k, v);
         require(c.a_max >= 1, k, v, "a_max must be positive");
       }}},
      {"kappa_D", {"envelope constant (default 2)", [](RunConfig& c, auto& k, auto& v) {
         c.kappa_D = parse_number<double>(k, v);
         require(c.kappa_D >= 0, k, v, "kappa_D must be non-negative");
       }}},
      {"kernel", {"cutoff kernel W: unit or gaussian (default unit)", [](RunConfig& c, auto& k, auto& v) {
         try {
           c.kernel = parse_kernel(trim(v));
         } catch (const Error& e) {
           invalid(k, v, e.what());
         }
       }}},
      {"route", {"per-d AFE route: product or joint (default product)", [](RunConfig& c, auto& k, auto& v) {
         try {
           c.route = parse_route(trim(v));
         } catch (const Error& e) {
           invalid(k, v, e.what());
         }
       }}},
      {"constant_form", {"theorem_form or proof_form (default proof_form)", [](RunConfig& c, auto& k, auto& v) {
         try {
           c.constant_form = parse_constant_form(trim(v));
         } catch (const Error& e) {
           invalid(k, v, e.what());
         }
       }}},
      {"out", {"output directory (default out)", [](RunConfig& c, auto& k, auto& v) {
         require(!trim(v).empty(), k, v, "path must not be empty");
         c.out = trim(v);
       }}},
      {"cache", {"sweep cache directory (default cache)", [](RunConfig& c, auto& k, auto& v) {
         require(!trim(v).empty(), k, v, "path must not be empty");
         c.cache = trim(v);
       }}},
      {"tol_gauss", {"Gauss sum tolerance (default 1e-9)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.gauss, k, v); }}},
      {"tol_poisson", {"Poisson residual tolerance (default 1e-6)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.poisson, k, v); }}},
      {"tol_afe", {"AFE cross-check tolerance (default 1e-5)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.afe, k, v); }}},
      {"tol_euler", {"Euler product identity tolerance (default 1e-8)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.euler, k, v); }}},
      {"tol_F", {"F(0; l) tolerance (default 1e-6)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.F, k, v); }}},
      {"tol_moebius", {"Moebius split tolerance (default 1e-9)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.moebius, k, v); }}},
      {"tol_deligne", {"Deligne bound slack (default 1e-9)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.deligne, k, v); }}},
      {"tol_multiplicative", {"multiplicativity tolerance (default 1e-12)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.multiplicative, k, v); }}},
      {"tol_slope", {"relative slope tolerance for fit (default 0.25)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.slope, k, v); }}},
      {"tol_twist", {"twisted deviation budget for report (default 0.15)", [](RunConfig& c, auto& k, auto& v) { set_tol(c.tol.twist, k, v); }}},
  };
  return table;
}

}  // namespace

const char* subcommand_name(Subcommand s) {
  for (const auto& [v, name] : kSubcommands)
    if (v == s) return name;
  return "?";
}

Subcommand parse_subcommand(const std::string& s) {
  for (const auto& [v, name] : kSubcommands)
    if (s == name) return v;
  throw UsageError("unknown subcommand '" + s + "'");
}

const std::vector<std::pair<std::string, std::string>>& config_key_help() {
  static const auto help = [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, spec] : key_table()) out.emplace_back(key, spec.help);
    return out;
  }();
  return help;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw UsageError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(where + ": missing key");
    if (value.empty()) throw UsageError(where + ": missing value for '" + key + "'");
    if (out.count(key)) throw UsageError(where + ": duplicate key '" + key + "'");
    out[key] = value;
  }
  return out;
}

RunConfig parse_config(Subcommand sub, const std::optional<std::filesystem::path>& file,
                       const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> values;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw UsageError("cannot read config file " + file->string());
    std::stringstream ss;
    ss << in.rdbuf();
    values = parse_config_text(ss.str(), file->string());
  }
  for (const auto& [k, v] : overrides) values[k] = v;

  RunConfig cfg;
  cfg.subcommand = sub;
  const auto& table = key_table();
  for (const auto& [k, v] : values) {
    const auto it = table.find(k);
    if (it == table.end()) throw UsageError("unknown configuration key '" + k + "'");
    it->second.set(cfg, k, v);
    cfg.explicit_keys.insert(k);
  }
  if (cfg.a_max > cfg.P)
    throw UsageError("invalid value for key 'a_max': must not exceed P (" + std::to_string(cfg.P) + ")");
  if ((sub == Subcommand::fit || sub == Subcommand::report) && cfg.grid.size() < 3)
    throw UsageError("invalid value for key 'grid': the fit needs at least three points");
  if ((sub == Subcommand::lvalue || sub == Subcommand::sweep || sub == Subcommand::fit || sub == Subcommand::report) &&
      cfg.kernel != Kernel::unit)
    throw UsageError("invalid value for key 'kernel': central values need kernel = unit "
                     "(the gaussian kernel is only used as a quadratic oracle)");
  return cfg;
}

}  // namespace qtwist
