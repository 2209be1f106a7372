#include "tlp/finance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tlp/parallel.hpp"
#include "tlp/rng.hpp"
#include "tlp/synth.hpp"

namespace tlp {

namespace {

// time grid for window signals: m points on [0,1]
Matrix window_grid(int m) {
  Matrix g(m, 1);
  for (int i = 0; i < m; ++i) g(i, 0) = m > 1 ? static_cast<double>(i) / (m - 1) : 0.0;
  return g;
}

// positive shift per window, channel mean, unit mass (the Wp preprocessing)
DiscreteMeasure window_measure(const Matrix& window) {
  TLpSignal s;
  s.measure = make_uniform(window_grid(static_cast<int>(window.cols())));
  s.values = window.transpose();  // m x n: per-time-point channel vector
  return normalize_for_wp(s, default_chi(s));
}

TLpSignal window_signal(const Matrix& window) {
  TLpSignal s;
  s.measure = make_uniform(window_grid(static_cast<int>(window.cols())));
  s.values = standardize_window(window).transpose();  // m x n
  return s;
}

}  // namespace

void PriceSeries::validate() const {
  if (prices.rows() != static_cast<Eigen::Index>(dates.size()) ||
      prices.cols() != static_cast<Eigen::Index>(tickers.size()))
    throw Error(ErrorKind::ShapeMismatch, "price table shape mismatch");
  if ((prices.array() <= 0).any() || !prices.allFinite())
    throw Error(ErrorKind::InvalidPrice, "prices must be positive and finite");
  for (std::size_t t = 1; t < dates.size(); ++t)
    if (!(dates[t - 1] < dates[t]))
      throw Error(ErrorKind::InvalidInput, "dates must be strictly increasing");
}

Matrix log_returns(const PriceSeries& prices) {
  prices.validate();
  const Eigen::Index T = prices.prices.rows();
  if (T < 2) throw Error(ErrorKind::InvalidInput, "need at least two price days");
  Matrix R(T - 1, prices.prices.cols());
  for (Eigen::Index t = 1; t < T; ++t)
    R.row(t - 1) = (prices.prices.row(t).array() / prices.prices.row(t - 1).array()).log();
  return R;
}

Matrix market_excess(const Matrix& returns, const Vector& marketReturns, double beta) {
  if (returns.rows() != marketReturns.size())
    throw Error(ErrorKind::ShapeMismatch, "returns/market length mismatch");
  Matrix out = returns;
  out.colwise() -= beta * marketReturns;
  return out;
}

Matrix standardize_window(const Matrix& window) {
  Matrix out = window;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double mean = out.row(i).mean();
    out.row(i).array() -= mean;
    const double var = out.row(i).squaredNorm() / out.cols();
    if (!(var > 0))
      throw Error(ErrorKind::DegenerateWindow, "zero-variance instrument row in window");
    out.row(i) /= std::sqrt(var);
  }
  return out;
}

double cor_distance(const Matrix& si, const Matrix& sj) {
  if (si.rows() != sj.rows() || si.cols() != sj.cols())
    throw Error(ErrorKind::ShapeMismatch, "window shapes differ");
  const Eigen::Index len = si.size();
  Eigen::Map<const Vector> a(si.data(), len), b(sj.data(), len);
  const double ma = a.mean(), mb = b.mean();
  Vector ca = a.array() - ma, cb = b.array() - mb;
  const double na = ca.norm(), nb = cb.norm();
  if (!(na > 0) || !(nb > 0))
    throw Error(ErrorKind::DegenerateWindow, "zero-variance flattened window");
  return 1.0 - ca.dot(cb) / (na * nb);
}

WindowSet build_windows(const Matrix& returns, int m) {
  if (m < 2 || returns.rows() < m)
    throw Error(ErrorKind::InvalidParams, "window length exceeds available returns");
  WindowSet ws;
  ws.m = m;
  const int n = static_cast<int>(returns.cols());
  const int T = static_cast<int>(returns.rows());
  for (int last = m - 1; last < T; ++last) {
    // return row r covers price day r+1, so this window ends at price day last+1
    Matrix w(n, m);
    for (int c = 0; c < m; ++c) w.col(c) = returns.row(last - m + 1 + c).transpose();
    ws.windows.push_back(std::move(w));
    ws.priceDay.push_back(last + 1);
  }
  return ws;
}

const char* to_string(WindowMethod m) {
  switch (m) {
    case WindowMethod::COR: return "cor";
    case WindowMethod::WP: return "wp";
    case WindowMethod::LWP: return "lwp";
    case WindowMethod::LTLP: return "ltlp";
  }
  return "?";
}

const char* to_string(ReturnKind k) { return k == ReturnKind::RR ? "rr" : "mr"; }

DistanceMatrix window_distance_matrix(const WindowSet& windows, WindowMethod method,
                                      const SolveOptions& ot, double p, int refCount) {
  const int W = windows.count();
  DistanceMatrix D;
  D.entries = Matrix::Zero(W, W);

  if (method == WindowMethod::COR) {
    D.method = DistanceMethod::COR;
    std::vector<Matrix> std_(W);
    parallel_for(W, [&](std::size_t w) { std_[w] = standardize_window(windows.windows[w]); });
    parallel_for(W, [&](std::size_t i) {
      for (int j = static_cast<int>(i) + 1; j < W; ++j)
        D.entries(i, j) = cor_distance(std_[i], std_[j]);
    });
  } else if (method == WindowMethod::WP) {
    D.method = DistanceMethod::WP;
    std::vector<DiscreteMeasure> meas(W);
    parallel_for(W, [&](std::size_t w) { meas[w] = window_measure(windows.windows[w]); });
    parallel_for(W, [&](std::size_t i) {
      for (int j = static_cast<int>(i) + 1; j < W; ++j)
        D.entries(i, j) = wasserstein_distance(meas[i], meas[j], p, ot);
    });
  } else {
    const int refN = refCount > 0 ? std::min(refCount, W) : W;
    std::vector<EmbeddingVector> embs(W);
    if (method == WindowMethod::LWP) {
      D.method = DistanceMethod::LWP;
      std::vector<TLpSignal> refInputs;
      for (int w = 0; w < refN; ++w) {
        DiscreteMeasure mw = window_measure(windows.windows[w]);
        refInputs.push_back(TLpSignal{mw, Matrix(mw.size(), 0)});
      }
      ReferenceSignal ref = build_reference(refInputs, ReferenceKind::WP);
      parallel_for(W, [&](std::size_t w) {
        DiscreteMeasure mw = window_measure(windows.windows[w]);
        embs[w] = embed(TLpSignal{mw, Matrix(mw.size(), 0)}, ref, p, ot);
      });
    } else {
      D.method = DistanceMethod::LTLP;
      std::vector<TLpSignal> refInputs;
      for (int w = 0; w < refN; ++w) refInputs.push_back(window_signal(windows.windows[w]));
      ReferenceSignal ref = build_reference(refInputs, ReferenceKind::TLP);
      parallel_for(W, [&](std::size_t w) {
        embs[w] = embed(window_signal(windows.windows[w]), ref, p, ot);
      });
    }
    DistanceMatrix lin = pairwise_linear_distances(embs);
    D.entries = lin.entries;
  }

  // COR/WP branches fill the upper triangle only
  for (int i = 0; i < W; ++i)
    for (int j = i + 1; j < W; ++j) D.entries(j, i) = D.entries(i, j);
  for (int i = 0; i < W; ++i) D.entries(i, i) = 0.0;
  D.entries = D.entries.cwiseMax(0.0);
  return D;
}

Matrix future_returns(const Matrix& prices, int h) {
  if (h < 1 || prices.rows() <= h)
    throw Error(ErrorKind::InvalidParams, "horizon exceeds available history");
  Matrix out(prices.rows() - h, prices.cols());
  for (Eigen::Index t = 0; t + h < prices.rows(); ++t)
    out.row(t) = (prices.row(t + h).array() / prices.row(t).array()).log();
  return out;
}

Vector knn_forecast(const DistanceMatrix& D, const WindowSet& windows,
                    const Matrix& futByDay, int w, int k, int h) {
  const int W = windows.count();
  if (w < 0 || w >= W) throw Error(ErrorKind::OutOfRange, "window index out of range");
  const int day = windows.priceDay[w];
  std::vector<std::pair<double, int>> elig;  // (distance, window index)
  for (int j = 0; j < W; ++j)
    if (windows.priceDay[j] <= day - h) elig.push_back({D.entries(w, j), j});
  if (elig.empty())
    throw Error(ErrorKind::InvalidParams, "no eligible neighbor windows before t-h");
  const int kk = std::min<int>(k, elig.size());
  // distance ties break toward the earlier date (lower window index)
  std::partial_sort(elig.begin(), elig.begin() + kk, elig.end());

  const Eigen::Index n = futByDay.cols();
  Vector forecast = Vector::Zero(n);
  std::vector<int> exact;
  for (int i = 0; i < kk; ++i)
    if (elig[i].first == 0.0) exact.push_back(elig[i].second);
  if (!exact.empty()) {
    for (int j : exact) forecast += futByDay.row(windows.priceDay[j]).transpose();
    return forecast / static_cast<double>(exact.size());
  }
  double wsum = 0.0;
  for (int i = 0; i < kk; ++i) wsum += 1.0 / elig[i].first;
  for (int i = 0; i < kk; ++i)
    forecast += (1.0 / elig[i].first / wsum) * futByDay.row(windows.priceDay[elig[i].second]).transpose();
  return forecast;
}

std::vector<int> quintile_mask(const Vector& forecast, int qr) {
  if (qr < 1 || qr > 5) throw Error(ErrorKind::InvalidParams, "quintile rank must be 1..5");
  const int n = static_cast<int>(forecast.size());
  const double frac = 1.0 - (qr - 1) / 5.0;
  const int keep = std::min<int>(n, static_cast<int>(std::ceil(frac * n)));
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    double fa = std::abs(forecast[a]), fb = std::abs(forecast[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });
  idx.resize(keep);
  return idx;
}

double pnl_day(const Vector& forecast, const Vector& realized, int qr) {
  if (forecast.size() != realized.size())
    throw Error(ErrorKind::ShapeMismatch, "forecast/realized length mismatch");
  double s = 0.0;
  for (int i : quintile_mask(forecast, qr)) {
    const double a = forecast[i];
    if (a > 0) s += realized[i];
    else if (a < 0) s -= realized[i];
  }
  return s;
}

double sharpe(const std::vector<double>& pnl) {
  if (pnl.size() < 2) throw Error(ErrorKind::InvalidParams, "need at least two PnL days");
  double mean = std::accumulate(pnl.begin(), pnl.end(), 0.0) / pnl.size();
  double ss = 0.0;
  for (double x : pnl) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / (pnl.size() - 1));
  if (!(sd > 0)) throw Error(ErrorKind::Undefined, "zero PnL standard deviation");
  return mean / sd * std::sqrt(252.0);
}

double ppt(const std::vector<double>& pnl, int portfolioSize) {
  if (portfolioSize < 1) throw Error(ErrorKind::InvalidParams, "portfolio size must be >= 1");
  if (pnl.empty()) return 0.0;
  return std::accumulate(pnl.begin(), pnl.end(), 0.0) /
         (static_cast<double>(pnl.size()) * portfolioSize);
}

FinanceResult run_finance(const PriceSeries& prices, const FinanceConfig& cfg) {
  prices.validate();

  // split off the market column
  int spyCol = -1;
  for (std::size_t c = 0; c < prices.tickers.size(); ++c)
    if (prices.tickers[c] == cfg.spyTicker) spyCol = static_cast<int>(c);

  FinanceResult result;
  result.usedSpyProxy = spyCol < 0;
  const Eigen::Index T = prices.prices.rows();
  const int nAll = static_cast<int>(prices.prices.cols());
  const int n = spyCol >= 0 ? nAll - 1 : nAll;
  result.instrumentCount = n;

  Matrix instPrices(T, n);
  {
    int c2 = 0;
    for (int c = 0; c < nAll; ++c)
      if (c != spyCol) instPrices.col(c2++) = prices.prices.col(c);
  }

  PriceSeries inst;
  inst.dates = prices.dates;
  inst.tickers.clear();
  for (int c = 0; c < nAll; ++c)
    if (c != spyCol) inst.tickers.push_back(prices.tickers[c]);
  inst.prices = instPrices;

  Matrix R = log_returns(inst);
  result.windows = build_windows(R, cfg.m);
  result.dist = window_distance_matrix(result.windows, cfg.method, cfg.ot, cfg.p, cfg.burnin);

  const int W = result.windows.count();
  for (int h : cfg.horizons) {
    Matrix futRR = future_returns(instPrices, h);  // rows 0..T-1-h
    Vector spyFut;
    if (spyCol >= 0) {
      Matrix spyF = future_returns(prices.prices.col(spyCol), h);
      spyFut = spyF.col(0);
    } else {
      spyFut = futRR.rowwise().mean();
    }
    for (ReturnKind kind : cfg.kinds) {
      Matrix fut = kind == ReturnKind::RR ? futRR : market_excess(futRR, spyFut);
      HorizonResult hr;
      hr.h = h;
      hr.kind = kind;
      const int startDay = cfg.m + cfg.burnin + h;
      std::vector<int> windowsToEval;
      for (int w = 0; w < W; ++w) {
        const int day = result.windows.priceDay[w];
        if (day >= startDay && day < static_cast<int>(T) - h) windowsToEval.push_back(w);
      }
      hr.forecasts.resize(windowsToEval.size());
      hr.days.resize(windowsToEval.size());
      parallel_for(windowsToEval.size(), [&](std::size_t idx) {
        const int w = windowsToEval[idx];
        hr.days[idx] = result.windows.priceDay[w];
        hr.forecasts[idx] = knn_forecast(result.dist, result.windows, fut, w, cfg.k, h);
      });
      for (int qr = 1; qr <= 5; ++qr) {
        auto& series = hr.pnl[qr - 1];
        series.resize(windowsToEval.size());
        for (std::size_t idx = 0; idx < windowsToEval.size(); ++idx)
          series[idx] = pnl_day(hr.forecasts[idx], fut.row(hr.days[idx]).transpose(), qr);
        QuintileStats qs;
        qs.qr = qr;
        qs.n = static_cast<int>(quintile_mask(hr.forecasts.empty() ? Vector::Zero(n)
                                                                  : hr.forecasts[0],
                                              qr)
                                    .size());
        qs.sr = std::numeric_limits<double>::quiet_NaN();
        if (series.size() >= 2) {
          try {
            qs.sr = sharpe(series);
          } catch (const Error&) {
            // zero-variance PnL: Sharpe stays undefined
          }
        }
        qs.pptValue = ppt(series, std::max(1, qs.n));
        hr.stats.push_back(qs);
      }
      result.horizons.push_back(std::move(hr));
    }
  }
  return result;
}

PriceSeries gbm_prices(int days, int instruments, uint64_t seed) {
  PriceSeries ps;
  ps.tickers.push_back("SPY");
  for (int i = 1; i < instruments; ++i) ps.tickers.push_back("INST" + std::to_string(i));
  ps.prices.resize(days, instruments);
  const double dt = 1.0 / 252.0;
  for (int i = 0; i < instruments; ++i) {
    std::mt19937_64 rng = substream(seed, static_cast<uint64_t>(i));
    std::normal_distribution<double> z(0.0, 1.0);
    const double sigma = 0.15 + 0.1 * (i % 5) / 5.0;
    const double drift = 0.02 * ((i % 3) - 1);
    double logp = std::log(50.0 + i);
    for (int t = 0; t < days; ++t) {
      ps.prices(t, i) = std::exp(logp);
      logp += (drift - 0.5 * sigma * sigma) * dt + sigma * std::sqrt(dt) * z(rng);
    }
  }
  char buf[16];
  for (int t = 0; t < days; ++t) {
    std::snprintf(buf, sizeof buf, "d%05d", t);
    ps.dates.push_back(buf);
  }
  return ps;
}

}  // namespace tlp
