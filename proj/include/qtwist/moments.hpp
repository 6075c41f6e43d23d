#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qtwist/characters.hpp"
#include "qtwist/eulerprod.hpp"
#include "qtwist/lfunctions.hpp"

namespace qtwist {

struct FamilyParams {
  double X = 1000.0;
  TwistIndex ti = twist_index(1);
  double Z_split = 0.0;        // 0 selects X^{1/8} l^{-1/4}, floored at 1
  std::size_t chunk = 64;      // d values per reduction leaf
  unsigned shards = 1;         // worker threads
  AfeRoute route = AfeRoute::product;

  double z_split() const;
  /// Throws DomainError on X < 100, Z_split in (0, 1), chunk = 0 or shards = 0.
  void validate() const;
};

/// Per-d central values of one sweep.
struct DRecord {
  std::uint64_t d = 0;
  double L_chi = 0.0;
  double L_fchi = 0.0;
  double joint = 0.0;
  std::uint64_t terms = 0;
};

struct SweepData {
  double X = 0.0;
  std::vector<DRecord> records;  // odd square-free d in [X, 2X], increasing
  std::uint64_t work = 0;        // total AFE terms
  double seconds = 0.0;
};

/// Odd square-free d with X <= d <= 2X.
std::vector<std::uint64_t> family_members(double X);

/// Per-d values for every family member, computed by `shards` workers.
/// Throws RangeError naming the d reached if the coefficient cache runs out.
SweepData sweep_records(double X, const AfeEngine& engine, unsigned shards = 1,
                        AfeRoute route = AfeRoute::product);

/// sum_d joint(d) chi_8d(l) Phi(d/X) over the records, leaves of `chunk`
/// consecutive d summed in order, leaves merged pairwise.
double twisted_sum(const SweepData& data, const TwistIndex& ti, std::size_t chunk = 64);

/// Fixed-shape reduction used by every sweep sum.
double tree_sum(const std::vector<double>& values, std::size_t chunk);

struct GridPoint {
  double X = 0.0;
  double S_emp = 0.0;
};

struct MomentReport {
  double X = 0.0;
  std::uint64_t l = 1;
  double S_emp = 0.0;
  std::vector<GridPoint> grid;
  double C_fit = 0.0;
  double A_fit = 0.0;
  double fit_residual = 0.0;
  double predicted = 0.0;
  double envelope = 0.0;
  double deviation = 0.0;
  std::uint64_t nonvanishing_count = 0;
  std::uint64_t family_size = 0;
  std::uint64_t work = 0;
  double seconds = 0.0;
};

/// S(l; X), skipping d with chi_8d(l) = 0.
MomentReport family_sweep(const FamilyParams& params, const AfeEngine& engine);

struct MoebiusSplit {
  double S_direct = 0.0;  // square-free indicator
  double S1 = 0.0;        // a <= Z
  double S2 = 0.0;        // a > Z
  double residual = 0.0;
};

/// Both sides use one per-d function g(d) over all odd d (square-free or
/// not), so the residual measures the reindexing alone.
MoebiusSplit moebius_split_check(const FamilyParams& params, const AfeEngine& engine);

struct PoissonResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  std::int64_t K = 0;  // |k| <= K on the dual side
};

inline constexpr double kPoissonFloor = 1e-6;

/// sum_{d odd} (d/n) Phi(d/X) against (X/2n)(2/n) sum_k (-1)^k G_k(n) Phi~(kX/2n).
/// The residual is relative to max(|lhs|, kPoissonFloor * sum_d Phi(d/X)).
/// Throws RangeError if the dual side has not decayed by |k| = k_cap.
PoissonResult poisson_identity_check(std::uint64_t n, double X, std::int64_t k_cap = 20000);

struct FitResult {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;             // B / A
  double fit_residual = 0.0;  // RMS of S/X - (A log X + B)
};

/// Least squares of S/X against A log X + B.  Throws FitError on fewer than
/// three points or a rank-deficient design.
FitResult fit_C(const std::vector<GridPoint>& grid);

/// #{d : |joint(d)| > 1e-6 median |joint|}.
std::uint64_t nonvanishing_count(const SweepData& data);

/// Prediction at (l, X) with C = C_fit against the cached sweep.
MomentReport predict_vs_measure(const TwistIndex& ti, const SweepData& data, double C_fit,
                                ConstantForm form, const HeckeForm& hecke,
                                const MainTermConstants& k, double kappa_D = 2.0);

/// Cache files: one CSV per X with shortest round-trip doubles.
std::filesystem::path sweep_cache_path(const std::filesystem::path& dir, double X);
void write_sweep_cache(const std::filesystem::path& dir, const SweepData& data);
/// Throws Error if the file is missing or malformed.
SweepData read_sweep_cache(const std::filesystem::path& dir, double X);

}  // namespace qtwist
