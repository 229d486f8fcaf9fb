#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wxdiag/climatology.hpp"
#include "wxdiag/grid.hpp"

namespace wxdiag {

/// Cold extremes reuse the warm-tail machinery on negated anomalies.
enum class Tail { warm, cold };

std::string_view to_string(Tail tail) noexcept;

struct Exceedance {
  Mask mask;
  /// Standardised exceedance at masked points, 0 elsewhere.
  std::vector<double> delta;
  std::size_t count = 0;
};

/// Points where the (signed) anomaly exceeds threshold_sigmas * sigma.
/// Points with sigma == 0 are skipped.
Exceedance exceedance_mask(const ScalarField& verify, const Climatology& clim, double threshold_sigmas = 2.0,
                           Tail tail = Tail::warm);

/// 1 - RMSE_cond / (3 RMSE_uncond), clamped to [0, 1]. Throws NoExtremes on
/// an empty mask and DegenerateErrors when the global RMSE is zero.
double ees(const ScalarField& forecast, const ScalarField& verify, const Climatology& clim,
           double threshold_sigmas = 2.0, Tail tail = Tail::warm);

struct TailOptions {
  double threshold_sigmas = 2.0;
  double bin_width = 0.25;
  double bin_lo = 2.0;
  double bin_hi = 6.0;
  double fit_lo = 2.0;
  double fit_hi = 5.0;
  Tail tail = Tail::warm;
};

struct TailCurve {
  std::vector<double> bin_center;
  std::vector<double> mean_bias;   ///< forecast - verify, sign-flipped for cold tails
  std::vector<double> mean_delta;  ///< mean exceedance of the points in the bin
  std::vector<std::size_t> count;
  double alpha = 0.0;  ///< minus the fitted slope of bias against delta
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Pools tail samples over several fields (e.g. init dates of one lead).
class TailAccumulator {
 public:
  explicit TailAccumulator(TailOptions options = {});

  /// Returns the number of points added.
  std::size_t add(const ScalarField& forecast, const ScalarField& verify, const Climatology& clim);
  /// Adds one (delta, bias) sample directly.
  void add_sample(double delta, double bias);

  std::size_t samples() const noexcept { return samples_; }

  /// Count-weighted line through populated bins inside [fit_lo, fit_hi].
  /// Throws NoExtremes when nothing was added, InsufficientTail with fewer
  /// than two populated fit bins.
  TailCurve curve() const;

 private:
  TailOptions options_;
  std::vector<double> sum_bias_;
  std::vector<double> sum_delta_;
  std::vector<std::size_t> count_;
  std::size_t samples_ = 0;
};

TailCurve tail_curve(const ScalarField& forecast, const ScalarField& verify, const Climatology& clim,
                     const TailOptions& options = {});

struct AlphaPoint {
  int lead_hours = 0;
  double alpha = 0.0;
  double r2 = 0.0;
};

struct AlphaEvolution {
  std::vector<AlphaPoint> points;
  /// Leads whose curve was absent (no extremes or too few bins).
  std::vector<int> flagged;
};

AlphaEvolution alpha_evolution(std::span<const int> lead_hours, std::span<const std::optional<TailCurve>> curves);

}  // namespace wxdiag
