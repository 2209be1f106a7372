#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tlp/embedding.hpp"

namespace tlp {

// Wide price table: strictly positive prices, strictly increasing dates,
// every instrument present across the whole history.
struct PriceSeries {
  std::vector<std::string> dates;    // length T
  std::vector<std::string> tickers;  // length n
  Matrix prices;                     // T x n

  void validate() const;
};

// R(t-1, i) = log(P(t, i) / P(t-1, i)), one row per return day 1..T-1.
Matrix log_returns(const PriceSeries& prices);

// f_MR = f_RR - beta * f_RR_market, broadcast over instruments.
Matrix market_excess(const Matrix& returns, const Vector& marketReturns, double beta = 1.0);

// Rows (instruments) standardized to zero mean / unit population variance.
Matrix standardize_window(const Matrix& window);

// 1 - Pearson correlation of the flattened standardized windows; in [0,2].
double cor_distance(const Matrix& si, const Matrix& sj);

// Sliding n x m windows of returns; window w ends at price day m + w.
struct WindowSet {
  int m = 20;
  std::vector<Matrix> windows;  // each n x m
  std::vector<int> priceDay;    // ending price day per window

  int count() const { return static_cast<int>(windows.size()); }
};

WindowSet build_windows(const Matrix& returns, int m);

enum class WindowMethod { COR, WP, LWP, LTLP };
enum class ReturnKind { RR, MR };

const char* to_string(WindowMethod m);
const char* to_string(ReturnKind k);

struct FinanceConfig {
  int m = 20;
  int k = 100;
  // Windows feeding the embedding reference; forecasts start after this
  // burn-in so nothing that feeds a forecast depends on later data.
  int burnin = 100;
  std::vector<int> horizons{1, 3, 5, 10};
  std::vector<ReturnKind> kinds{ReturnKind::RR, ReturnKind::MR};
  WindowMethod method = WindowMethod::COR;
  double p = 2.0;
  SolveOptions ot{};
  std::string spyTicker = "SPY";
};

// Full T x T window distance matrix for the given method. For LWP/LTLP the
// reference is built from the first refCount windows (refCount <= 0 uses all,
// which is only appropriate for descriptive figures, not forecasting).
DistanceMatrix window_distance_matrix(const WindowSet& windows, WindowMethod method,
                                      const SolveOptions& ot, double p, int refCount);

// log(P(t+h)/P(t)) per instrument; rows t = 0..T-1-h.
Matrix future_returns(const Matrix& prices, int h);

// Inverse-distance weighted mean of the k nearest eligible neighbors'
// future returns; neighbors are windows ending at or before day(w) - h.
// Exact matches (zero distance) split the weight equally among themselves.
Vector knn_forecast(const DistanceMatrix& D, const WindowSet& windows,
                    const Matrix& futByDay, int w, int k, int h);

// Per-day signed PnL restricted to the top (1-(qr-1)/5) fraction of
// |forecast|; qr = 1 is the whole book, qr = 5 the top 20%.
double pnl_day(const Vector& forecast, const Vector& realized, int qr);

// Instruments selected by the quintile mask (ceil of the fraction).
std::vector<int> quintile_mask(const Vector& forecast, int qr);

double sharpe(const std::vector<double>& pnl);
double ppt(const std::vector<double>& pnl, int portfolioSize);

struct QuintileStats {
  int qr = 1;
  double sr = 0.0;
  double pptValue = 0.0;
  int n = 0;
};

struct HorizonResult {
  int h = 1;
  ReturnKind kind = ReturnKind::RR;
  std::vector<int> days;            // evaluated price days
  std::vector<Vector> forecasts;    // per evaluated day
  std::array<std::vector<double>, 5> pnl;  // per quintile series
  std::vector<QuintileStats> stats;
};

struct FinanceResult {
  WindowSet windows;
  DistanceMatrix dist;
  std::vector<HorizonResult> horizons;
  int instrumentCount = 0;
  bool usedSpyProxy = false;  // true when no SPY column exists (market = mean)
};

FinanceResult run_finance(const PriceSeries& prices, const FinanceConfig& cfg);

// Deterministic geometric-random-walk price fixture (includes a SPY column).
PriceSeries gbm_prices(int days, int instruments, uint64_t seed);

}  // namespace tlp
