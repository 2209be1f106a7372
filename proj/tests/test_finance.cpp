#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tlp/finance.hpp"
#include "tlp/rng.hpp"

using namespace tlp;

TEST_CASE("log returns") {
  PriceSeries ps;
  ps.dates = {"d0", "d1"};
  ps.tickers = {"A"};
  ps.prices.resize(2, 1);
  ps.prices << 1.0, std::exp(1.0);
  Matrix R = log_returns(ps);
  CHECK(R(0, 0) == doctest::Approx(1.0));

  ps.prices << 3.0, 3.0;
  CHECK(log_returns(ps)(0, 0) == doctest::Approx(0.0));

  ps.prices << 2.0, 1.0;
  CHECK(log_returns(ps)(0, 0) == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("log returns rejects nonpositive prices") {
  PriceSeries ps;
  ps.dates = {"d0", "d1"};
  ps.tickers = {"A"};
  ps.prices.resize(2, 1);
  ps.prices << 1.0, -1.0;
  try {
    log_returns(ps);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidPrice);
  }
}

TEST_CASE("market excess") {
  Matrix r(2, 2);
  r << 0.02, 0.01, -0.01, 0.03;
  Vector spy(2);
  spy << 0.02, -0.01;

  // zero when returns equal the market
  Matrix same(2, 1);
  same << 0.02, -0.01;
  CHECK(market_excess(same, spy).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // zero market leaves returns untouched
  CHECK((market_excess(r, Vector::Zero(2)) - r).cwiseAbs().maxCoeff() == 0.0);

  // the 0.02 / 0.01 example
  Vector spy2(1);
  spy2 << 0.01;
  Matrix raw(1, 1);
  raw << 0.02;
  CHECK(market_excess(raw, spy2)(0, 0) == doctest::Approx(0.01));
}

TEST_CASE("cor distance") {
  std::mt19937_64 rng = substream(101, 0);
  Matrix w = oracle::random_points(3, 5, rng, -1, 1);
  Matrix sw = standardize_window(w);
  CHECK(cor_distance(sw, sw) == doctest::Approx(0.0));
  CHECK(cor_distance(sw, Matrix(-sw)) == doctest::Approx(2.0));

  // squared-distance identity on standardized windows
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = standardize_window(oracle::random_points(3, 3, rng, -1, 1));
    Matrix b = standardize_window(oracle::random_points(3, 3, rng, -1, 1));
    double viaCor = cor_distance(a, b);
    double viaNorm = 0.0;
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        viaNorm += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    viaNorm /= 2.0 * a.size();
    CHECK(std::abs(viaCor - viaNorm) < 1e-9);
  }
}

TEST_CASE("cor distance rejects flat windows") {
  Matrix flat = Matrix::Zero(2, 4);
  try {
    standardize_window(flat);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateWindow);
  }
}

TEST_CASE("windows use exactly the trailing m return days") {
  std::mt19937_64 rng = substream(102, 0);
  Matrix R = oracle::random_points(30, 4, rng, -0.1, 0.1);
  WindowSet ws = build_windows(R, 5);
  CHECK(ws.count() == 26);
  CHECK(ws.priceDay.front() == 5);
  CHECK(ws.priceDay.back() == 30);
  // window w holds return rows w .. w+4 transposed
  for (int w : {0, 7, 25}) {
    for (int c = 0; c < 5; ++c)
      CHECK((ws.windows[w].col(c) - R.row(w + c).transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("knn forecast weights and eligibility") {
  // three windows at days 5, 6, 7; forecast at the last one
  WindowSet ws;
  ws.m = 5;
  ws.windows.resize(3);
  ws.priceDay = {5, 6, 7};
  DistanceMatrix D;
  D.entries = Matrix::Zero(3, 3);
  D.entries(2, 0) = D.entries(0, 2) = 1.0;
  D.entries(2, 1) = D.entries(1, 2) = 3.0;
  Matrix fut = Matrix::Zero(10, 2);
  fut.row(5) << 1.0, 2.0;
  fut.row(6) << 5.0, 6.0;

  // h=1: both days 5 and 6 are eligible; weights 0.75 / 0.25
  Vector f1 = knn_forecast(D, ws, fut, 2, 2, 1);
  CHECK(f1[0] == doctest::Approx(0.75 * 1.0 + 0.25 * 5.0));
  CHECK(f1[1] == doctest::Approx(0.75 * 2.0 + 0.25 * 6.0));

  // k=1 returns the nearest neighbor's future outright
  Vector f2 = knn_forecast(D, ws, fut, 2, 1, 1);
  CHECK(f2[0] == doctest::Approx(1.0));

  // h=2 excludes day 6
  Vector f3 = knn_forecast(D, ws, fut, 2, 2, 2);
  CHECK(f3[0] == doctest::Approx(1.0));
  CHECK(f3[1] == doctest::Approx(2.0));

  // zero-distance exact matches take all the weight
  D.entries(2, 0) = D.entries(0, 2) = 0.0;
  Vector f4 = knn_forecast(D, ws, fut, 2, 2, 1);
  CHECK(f4[0] == doctest::Approx(1.0));
}

TEST_CASE("quintile masks and pnl") {
  Vector forecast(10);
  forecast << 0.9, -0.8, 0.7, -0.6, 0.5, -0.4, 0.3, -0.2, 0.1, 0.05;

  CHECK(quintile_mask(forecast, 1).size() == 10);
  CHECK(quintile_mask(forecast, 5).size() == 2);  // ceil(0.2 * 10)
  std::vector<int> top = quintile_mask(forecast, 5);
  CHECK(top[0] == 0);
  CHECK(top[1] == 1);

  // correct signs everywhere: PnL equals the sum of |realized|
  Vector realized = forecast * 0.5;
  double pnl = pnl_day(forecast, realized, 1);
  CHECK(pnl == doctest::Approx(realized.cwiseAbs().sum()));

  // zero forecasts produce zero PnL
  CHECK(pnl_day(Vector::Zero(10), realized, 1) == doctest::Approx(0.0));
}

TEST_CASE("sharpe") {
  CHECK(sharpe({1.0, -1.0, 1.0, -1.0}) == doctest::Approx(0.0));
  CHECK(sharpe({1.0, 2.0, 3.0}) == doctest::Approx(2.0 * std::sqrt(252.0)));
  // scale invariance
  CHECK(sharpe({0.5, 1.0, 1.5}) == doctest::Approx(2.0 * std::sqrt(252.0)));
  try {
    sharpe({1.0, 1.0, 1.0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Undefined);
  }
}

TEST_CASE("ppt") {
  std::vector<double> flat(10, 3.0);
  CHECK(ppt(flat, 3) == doctest::Approx(1.0));
  std::vector<double> total(252, 10.0 / 252);
  CHECK(ppt(total, 1) == doctest::Approx(10.0 / 252));
  // 4 bpts/day over a year is roughly a 10% annual return
  std::vector<double> year(252, 4e-4);
  double annual = 0.0;
  for (double x : year) annual += x;
  CHECK(ppt(year, 1) == doctest::Approx(4e-4));
  CHECK(annual == doctest::Approx(0.10).epsilon(0.02));
}

TEST_CASE("gbm fixture is reproducible and valid") {
  PriceSeries a = gbm_prices(60, 5, 7);
  PriceSeries b = gbm_prices(60, 5, 7);
  CHECK((a.prices - b.prices).cwiseAbs().maxCoeff() == 0.0);
  CHECK_NOTHROW(a.validate());
  CHECK(a.tickers[0] == "SPY");
}

TEST_CASE("no look-ahead on a small COR pipeline") {
  PriceSeries base = gbm_prices(120, 5, 11);
  FinanceConfig cfg;
  cfg.m = 10;
  cfg.k = 5;
  cfg.burnin = 10;
  cfg.horizons = {2};
  cfg.kinds = {ReturnKind::RR};
  cfg.method = WindowMethod::COR;
  FinanceResult ref = run_finance(base, cfg);
  REQUIRE(!ref.horizons.empty());
  const auto& hr = ref.horizons[0];
  REQUIRE(!hr.days.empty());

  std::mt19937_64 rng = substream(103, 0);
  // perturb everything after a few cutoff days; forecasts at the cutoff must
  // not move
  for (std::size_t pick : {std::size_t(0), hr.days.size() / 2, hr.days.size() - 1}) {
    const int cutoff = hr.days[pick];
    PriceSeries tainted = base;
    for (int t = cutoff + 1; t < static_cast<int>(tainted.prices.rows()); ++t)
      for (int c = 0; c < tainted.prices.cols(); ++c)
        tainted.prices(t, c) *= 1.0 + 0.25 * std::uniform_real_distribution<double>(0, 1)(rng);
    FinanceResult got = run_finance(tainted, cfg);
    // locate the same day in the tainted run
    bool found = false;
    for (std::size_t i = 0; i < got.horizons[0].days.size(); ++i) {
      if (got.horizons[0].days[i] == cutoff) {
        CHECK((got.horizons[0].forecasts[i] - hr.forecasts[pick]).cwiseAbs().maxCoeff() == 0.0);
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("ltlp window pipeline runs end to end") {
  PriceSeries base = gbm_prices(80, 4, 13);
  FinanceConfig cfg;
  cfg.m = 8;
  cfg.k = 4;
  cfg.burnin = 8;
  cfg.horizons = {1};
  cfg.kinds = {ReturnKind::RR, ReturnKind::MR};
  cfg.method = WindowMethod::LTLP;
  FinanceResult res = run_finance(base, cfg);
  CHECK(res.dist.method == DistanceMethod::LTLP);
  CHECK_NOTHROW(res.dist.validate(1e-9));
  CHECK(res.horizons.size() == 2);
  CHECK(res.instrumentCount == 3);  // SPY excluded
  for (const auto& hr : res.horizons) {
    CHECK(!hr.days.empty());
    CHECK(hr.stats.size() == 5);
  }
}
