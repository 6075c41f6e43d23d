#include "qtwist/moments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "qtwist/errors.hpp"
#include "qtwist/output.hpp"
#include "qtwist/special.hpp"

namespace qtwist {

double FamilyParams::z_split() const {
  if (Z_split > 0) return Z_split;
  return std::max(1.0, std::pow(X, 0.125) * std::pow(static_cast<double>(ti.l), -0.25));
}

void FamilyParams::validate() const {
  if (!(X >= 100)) throw DomainError("X must be at least 100");
  if (Z_split != 0.0 && !(Z_split >= 1)) throw DomainError("Z_split must be at least 1");
  if (chunk == 0) throw DomainError("chunk must be positive");
  if (shards == 0) throw DomainError("shards must be positive");
}

std::vector<std::uint64_t> family_members(double X) {
  const auto lo = static_cast<std::uint64_t>(std::ceil(X));
  const auto hi = static_cast<std::uint64_t>(std::floor(2.0 * X));
  const SieveTables sv = sieve_tables(hi);
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = lo | 1; d <= hi; d += 2)
    if (sv.squarefree[d]) out.push_back(d);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Fills records for the listed d; workers claim blocks of consecutive
// indices and write only their own slots.
std::vector<DRecord> compute_records(const std::vector<std::uint64_t>& ds,
                                     const AfeEngine& engine, unsigned shards,
                                     AfeRoute route) {
  std::vector<DRecord> out(ds.size());
  constexpr std::size_t kBlock = 8;
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::string error;
  std::uint64_t failed_d = 0;

  auto worker = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(kBlock);
      if (begin >= ds.size()) return;
      const std::size_t end = std::min(ds.size(), begin + kBlock);
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint64_t d = ds[i];
        try {
          const KroneckerTable chi(d);
          DRecord& r = out[i];
          r.d = d;
          r.L_chi = engine.l_quadratic(chi);
          r.L_fchi = engine.l_modular(chi);
          r.joint = route == AfeRoute::product ? r.L_chi * r.L_fchi : engine.joint(chi);
          r.terms = route_terms(d, engine, route);
        } catch (const std::exception& e) {
          std::lock_guard lock(err_mu);
          if (error.empty() || d < failed_d) {
            error = e.what();
            failed_d = d;
          }
          next.store(ds.size());
          return;
        }
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(shards, static_cast<unsigned>(ds.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  if (!error.empty())
    throw RangeError("sweep stopped at d=" + std::to_string(failed_d) + ": " + error);
  return out;
}

// Contribution vector over the full family, so sums with and without
// skipped d share one reduction shape.
double contribution_sum(const std::vector<std::uint64_t>& members,
                        const std::vector<DRecord>& records, const TwistIndex& ti, double X,
                        std::size_t chunk) {
  std::vector<double> c(members.size(), 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::uint64_t d = members[i];
    while (j < records.size() && records[j].d < d) ++j;
    if (j == records.size() || records[j].d != d) continue;
    const int x = chi8d(d, ti.l);
    if (x == 0) continue;
    c[i] = records[j].joint * x * phi(static_cast<double>(d) / X);
  }
  return tree_sum(c, chunk);
}

}  // namespace

double tree_sum(const std::vector<double>& values, std::size_t chunk) {
  if (chunk == 0) throw DomainError("chunk must be positive");
  std::vector<double> level;
  for (std::size_t i = 0; i < values.size(); i += chunk) {
    double s = 0.0;
    for (std::size_t k = i; k < std::min(values.size(), i + chunk); ++k) s += values[k];
    level.push_back(s);
  }
  if (level.empty()) return 0.0;
  while (level.size() > 1) {
    std::vector<double> up;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) up.push_back(level[i] + level[i + 1]);
    if (level.size() % 2 == 1) up.push_back(level.back());
    level.swap(up);
  }
  return level[0];
}

SweepData sweep_records(double X, const AfeEngine& engine, unsigned shards, AfeRoute route) {
  const auto t0 = Clock::now();
  SweepData data;
  data.X = X;
  data.records = compute_records(family_members(X), engine, shards, route);
  for (const auto& r : data.records) data.work += r.terms;
  data.seconds = seconds_since(t0);
  return data;
}

double twisted_sum(const SweepData& data, const TwistIndex& ti, std::size_t chunk) {
  return contribution_sum(family_members(data.X), data.records, ti, data.X, chunk);
}

MomentReport family_sweep(const FamilyParams& params, const AfeEngine& engine) {
  params.validate();
  const auto t0 = Clock::now();
  const auto members = family_members(params.X);
  std::vector<std::uint64_t> active;
  for (auto d : members)
    if (chi8d(d, params.ti.l) != 0) active.push_back(d);
  const auto records = compute_records(active, engine, params.shards, params.route);

  MomentReport rep;
  rep.X = params.X;
  rep.l = params.ti.l;
  rep.family_size = members.size();
  rep.S_emp = contribution_sum(members, records, params.ti, params.X, params.chunk);
  for (const auto& r : records) rep.work += r.terms;
  SweepData view{params.X, records, rep.work, 0.0};
  rep.nonvanishing_count = nonvanishing_count(view);
  rep.grid.push_back({params.X, rep.S_emp});
  rep.seconds = seconds_since(t0);
  return rep;
}

MoebiusSplit moebius_split_check(const FamilyParams& params, const AfeEngine& engine) {
  params.validate();
  if (params.X > 500) throw DomainError("moebius_split_check is limited to X <= 500");
  const double X = params.X;
  const auto lo = static_cast<std::uint64_t>(std::ceil(X));
  const auto hi = static_cast<std::uint64_t>(std::floor(2.0 * X));
  const SieveTables sv = sieve_tables(hi);

  // g(d) chi_8d(l) Phi(d/X) for every odd d in the window.
  std::vector<double> term(hi + 1, 0.0);
  for (std::uint64_t d = lo | 1; d <= hi; d += 2) {
    const KroneckerTable chi(d);
    const int x = chi(params.ti.l);
    if (x == 0) continue;
    term[d] = engine.l_quadratic(chi) * engine.l_modular(chi) * x *
              phi(static_cast<double>(d) / X);
  }

  MoebiusSplit out;
  for (std::uint64_t d = lo | 1; d <= hi; d += 2)
    if (sv.squarefree[d]) out.S_direct += term[d];

  const double Z = params.z_split();
  for (std::uint64_t a = 1; a * a <= hi; a += 2) {
    const int mu = sv.moebius[a];
    if (mu == 0) continue;
    const std::uint64_t a2 = a * a;
    double inner = 0.0;
    for (std::uint64_t dp = 1; a2 * dp <= hi; dp += 2)
      if (a2 * dp >= lo) inner += term[a2 * dp];
    (static_cast<double>(a) <= Z ? out.S1 : out.S2) += mu * inner;
  }
  out.residual = std::abs(out.S_direct - out.S1 - out.S2) / std::max(std::abs(out.S_direct), 1e-300);
  return out;
}

PoissonResult poisson_identity_check(std::uint64_t n, double X, std::int64_t k_cap) {
  if (n == 0 || n % 2 == 0) throw DomainError("poisson_identity_check: n must be odd");
  if (!(X > 0)) throw DomainError("poisson_identity_check: X must be positive");
  const auto nn = static_cast<std::int64_t>(n);
  PoissonResult out;

  double mass = 0.0;
  const auto hi = static_cast<std::uint64_t>(std::floor(2.0 * X));
  for (std::uint64_t d = 1; d <= hi; d += 2) {
    const double w = phi(static_cast<double>(d) / X);
    if (w == 0.0) continue;
    out.lhs += jacobi(static_cast<std::int64_t>(d), nn) * w;
    mass += w;
  }

  auto transform = [](double xi) { return cos_sin_transform(phi, xi); };
  const double step = X / (2.0 * static_cast<double>(n));
  double dual = gauss_sum_closed(0, n).numeric.real() * transform(0.0);
  // Stop after a run of k where Phi~ at +-kX/2n sits below 1e-14 of
  // Phi~(0), close to the quadrature noise floor.
  const double quiet_level = 1e-14 * std::abs(transform(0.0));
  constexpr int kQuietRun = 8;
  int quiet = 0;
  std::int64_t k = 1;
  for (; k <= k_cap; ++k) {
    const double xi = static_cast<double>(k) * step;
    const double fp = transform(xi), fm = transform(-xi);
    const double gp = gauss_sum_closed(k, n).numeric.real();
    const double gm = gauss_sum_closed(-k, n).numeric.real();
    dual += (k % 2 == 0 ? 1.0 : -1.0) * (gp * fp + gm * fm);
    quiet = std::max(std::abs(fp), std::abs(fm)) < quiet_level ? quiet + 1 : 0;
    if (quiet >= kQuietRun) break;
  }
  if (k > k_cap)
    throw RangeError("Poisson dual sum did not decay within |k| <= " + std::to_string(k_cap));
  out.K = k;
  out.rhs = step * jacobi(2, nn) * dual;
  // The character sum can cancel exactly (e.g. when the window is symmetric
  // under d -> 3X - d and (-1/n) = -1); the floor is a fraction of the
  // unsigned mass sum_d Phi(d/X).
  out.residual = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.lhs), kPoissonFloor * mass);
  return out;
}

FitResult fit_C(const std::vector<GridPoint>& grid) {
  if (grid.size() < 3) throw FitError("fit_C needs at least three grid points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i].X > 1)) throw FitError("grid points need X > 1");
    for (std::size_t j = 0; j < i; ++j)
      if (grid[i].X == grid[j].X) throw FitError("duplicate grid point X=" + format_double(grid[i].X));
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& g = grid[static_cast<std::size_t>(i)];
    A(i, 0) = std::log(g.X);
    A(i, 1) = 1.0;
    y(i) = g.S_emp / g.X;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 2) throw FitError("degenerate grid: design matrix is rank deficient");
  const Eigen::VectorXd c = qr.solve(y);
  FitResult f;
  f.A = c(0);
  f.B = c(1);
  if (f.A == 0.0) throw FitError("fitted slope is zero; C is undefined");
  f.C = f.B / f.A;
  f.fit_residual = std::sqrt((A * c - y).squaredNorm() / static_cast<double>(n));
  return f;
}

std::uint64_t nonvanishing_count(const SweepData& data) {
  if (data.records.empty()) return 0;
  std::vector<double> mag;
  mag.reserve(data.records.size());
  for (const auto& r : data.records) mag.push_back(std::abs(r.joint));
  auto mid = mag.begin() + static_cast<std::ptrdiff_t>(mag.size() / 2);
  std::nth_element(mag.begin(), mid, mag.end());
  const double threshold = 1e-6 * *mid;
  std::uint64_t count = 0;
  for (const auto& r : data.records) count += std::abs(r.joint) > threshold;
  return count;
}

MomentReport predict_vs_measure(const TwistIndex& ti, const SweepData& data, double C_fit,
                                ConstantForm form, const HeckeForm& hecke,
                                const MainTermConstants& k, double kappa_D) {
  MainTermInputs in{ti, data.X, C_fit, kappa_D, form};
  const MainTerm mt = main_term(in, hecke, k);
  MomentReport rep;
  rep.X = data.X;
  rep.l = ti.l;
  rep.S_emp = twisted_sum(data, ti);
  rep.grid.push_back({data.X, rep.S_emp});
  rep.C_fit = C_fit;
  rep.predicted = mt.predicted;
  rep.envelope = mt.envelope;
  rep.deviation = std::abs(rep.S_emp - mt.predicted) / std::abs(mt.predicted);
  rep.family_size = data.records.size();
  rep.nonvanishing_count = nonvanishing_count(data);
  rep.work = data.work;
  rep.seconds = data.seconds;
  return rep;
}

std::filesystem::path sweep_cache_path(const std::filesystem::path& dir, double X) {
  return dir / ("sweep_X" + format_double(X) + ".csv");
}

void write_sweep_cache(const std::filesystem::path& dir, const SweepData& data) {
  std::filesystem::create_directories(dir);
  CsvTable t({"d", "L_chi", "L_fchi", "joint", "terms"});
  t.add_comment("X=" + format_double(data.X));
  for (const auto& r : data.records)
    t.add_row({std::to_string(r.d), format_double(r.L_chi), format_double(r.L_fchi),
               format_double(r.joint), std::to_string(r.terms)});
  t.write(sweep_cache_path(dir, data.X));
}

SweepData read_sweep_cache(const std::filesystem::path& dir, double X) {
  const auto path = sweep_cache_path(dir, X);
  std::ifstream in(path);
  if (!in) throw Error("no sweep cache at " + path.string() + " (run the sweep first)");
  SweepData data;
  data.X = X;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "d,L_chi,L_fchi,joint,terms")
        throw Error(path.string() + ":" + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string f[5];
    for (auto& s : f)
      if (!std::getline(ss, s, ','))
        throw Error(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields");
    try {
      DRecord r{std::stoull(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]),
                std::stoull(f[4])};
      data.records.push_back(r);
      data.work += r.terms;
    } catch (const std::logic_error&) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  const auto members = family_members(X);
  bool match = members.size() == data.records.size();
  for (std::size_t i = 0; match && i < members.size(); ++i) match = members[i] == data.records[i].d;
  if (!match) throw Error(path.string() + ": records do not cover the family for X=" + format_double(X));
  return data;
}

}  // namespace qtwist
