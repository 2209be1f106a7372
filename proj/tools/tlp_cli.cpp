// Command-line entry point: dataset generation, embeddings, distance
// matrices, clustering/classification, interpolation sweeps, the flow
// solver, and the forecasting pipeline. Every run writes a manifest.json
// with the full argument list, seeds, solver settings, and phase timings;
// `tlp rerun <manifest>` replays it.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "tlp/analysis.hpp"
#include "tlp/embedding.hpp"
#include "tlp/finance.hpp"
#include "tlp/flow.hpp"
#include "tlp/interpolate.hpp"
#include "tlp/io.hpp"
#include "tlp/parallel.hpp"
#include "tlp/rng.hpp"
#include "tlp/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tlp;

namespace {

struct PhaseTimer {
  std::map<std::string, double> seconds;
  std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

  void lap(const std::string& phase) {
    auto now = std::chrono::steady_clock::now();
    seconds[phase] += std::chrono::duration<double>(now - mark).count();
    mark = now;
  }
};

json timings_json(const PhaseTimer& timer) {
  json j = json::object();
  for (const auto& [phase, secs] : timer.seconds) j[phase] = secs;
  return j;
}

void write_manifest(const std::string& dir, const std::vector<std::string>& argv,
                    const json& params, const PhaseTimer& timer) {
  json j;
  j["tool"] = "tlp";
  j["argv"] = argv;
  j["params"] = params;
  j["timings"] = timings_json(timer);
  j["threads"] = thread_cap();
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << j.dump(2) << "\n";
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_list(csv)) out.push_back(static_cast<int>(v));
  return out;
}

SolveOptions solve_options(const std::string& solver, double eps) {
  SolveOptions o;
  if (solver == "exact") o.solver = Solver::Exact;
  else if (solver == "sinkhorn") o.solver = Solver::Sinkhorn;
  else o.solver = Solver::Auto;
  o.sink.epsilon = eps;
  return o;
}

std::vector<std::string> labels_for(const EmbeddingFile& emb, const std::string& labelsFile) {
  if (!labelsFile.empty()) {
    std::ifstream in(labelsFile);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + labelsFile);
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, std::string> byId;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto comma = line.find(',');
      if (comma == std::string::npos)
        throw Error(ErrorKind::IoError, "bad labels row: " + line);
      byId[line.substr(0, comma)] = line.substr(comma + 1);
    }
    std::vector<std::string> out;
    for (const auto& id : emb.ids) {
      auto it = byId.find(id);
      if (it == byId.end()) throw Error(ErrorKind::IoError, "no label for id " + id);
      out.push_back(it->second);
    }
    return out;
  }
  if (emb.meta.labels.size() == emb.ids.size()) return emb.meta.labels;
  throw Error(ErrorKind::IoError, "no labels: pass --labels or embed with a labeled dataset");
}

std::vector<int> dense_labels(const std::vector<std::string>& names) {
  std::map<std::string, int> ids;
  for (const auto& n : names) ids.emplace(n, 0);
  int next = 0;
  for (auto& [name, id] : ids) id = next++;
  std::vector<int> out;
  for (const auto& n : names) out.push_back(ids[n]);
  return out;
}

// ---------------------------------------------------------------------------

int cmd_synth1d(const std::vector<std::string>& argv, const std::string& outDir,
                const Synth1dConfig& cfg) {
  PhaseTimer timer;
  LabeledSignals data = gen_dataset_1d(cfg);
  timer.lap("generate");
  std::vector<std::string> names;
  for (int l : data.labels)
    names.push_back(l == 0 ? "hump" : (l == 1 ? "chirp1" : "chirp2"));
  write_dataset(outDir, data.signals, names);
  timer.lap("write");
  json params{{"seed", cfg.seed}, {"l", cfg.l},           {"r", cfg.r},
              {"b", cfg.b},       {"gamma1", cfg.gamma1}, {"gamma2", cfg.gamma2},
              {"noise", cfg.noiseSigma}, {"grid", cfg.gridN}, {"nHump", cfg.nHump},
              {"nChirp", cfg.nChirp},    {"r1", cfg.r1}};
  write_manifest(outDir, argv, params, timer);
  return 0;
}

int cmd_synth2d(const std::vector<std::string>& argv, const std::string& outDir,
                const Synth2dConfig& cfg) {
  PhaseTimer timer;
  LabeledSignals data = gen_dataset_2d(cfg);
  timer.lap("generate");
  std::vector<std::string> names;
  for (int l : data.labels) names.push_back(l == 0 ? "M1" : "M2");
  write_dataset(outDir, data.signals, names);
  timer.lap("write");
  json params{{"seed", cfg.seed}, {"grid", cfg.nx}, {"perClass", cfg.nPerClass}};
  write_manifest(outDir, argv, params, timer);
  return 0;
}

struct EmbedArgs {
  std::string dataDir, method = "ltlp", solver = "auto", out;
  double p = 2.0, eps = 0.0, channelScale = 1.0, chi = -1.0;
};

// shared by `embed` and the lwp/ltlp branches of `distmat`
std::vector<EmbeddingVector> embed_dataset(const LabeledDataset& ds, const EmbedArgs& a,
                                           ReferenceSignal& refOut) {
  SolveOptions opts = solve_options(a.solver, a.eps);
  std::vector<EmbeddingVector> embs(ds.signals.size());
  if (a.method == "lwp") {
    std::vector<TLpSignal> measures(ds.signals.size());
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
      double chi = a.chi >= 0 ? a.chi : default_chi(ds.signals[i]);
      DiscreteMeasure m = normalize_for_wp(ds.signals[i], chi);
      measures[i] = TLpSignal{m, Matrix(m.size(), 0)};
    }
    refOut = build_reference(measures, ReferenceKind::WP);
    parallel_for(measures.size(), [&](std::size_t i) {
      embs[i] = embed(measures[i], refOut, a.p, opts);
    });
  } else {
    refOut = build_reference(ds.signals, ReferenceKind::TLP);
    parallel_for(ds.signals.size(), [&](std::size_t i) {
      embs[i] = embed(ds.signals[i], refOut, a.p, opts, a.channelScale);
    });
  }
  return embs;
}

int cmd_embed(const std::vector<std::string>& argv, const EmbedArgs& a) {
  PhaseTimer timer;
  LabeledDataset ds = read_dataset(a.dataDir);
  timer.lap("load");
  ReferenceSignal ref;
  std::vector<EmbeddingVector> embs = embed_dataset(ds, a, ref);
  timer.lap("solve");

  const fs::path outPath(a.out);
  const fs::path refPath = outPath.parent_path() / "reference.csv";
  write_signal_csv(refPath.string(), ref.asSignal());

  EmbeddingFileMeta meta;
  meta.n = ref.measure.size();
  meta.d = ref.measure.dim();
  meta.m = static_cast<int>(ref.values.cols());
  meta.p = a.p;
  meta.solver = a.solver;
  meta.eps = a.eps;
  meta.channelScale = a.channelScale;
  meta.kind = a.method;
  meta.referencePath = refPath.string();
  meta.labels = ds.labelNames;
  write_embeddings_csv(a.out, ds.ids, embs, meta);
  timer.lap("write");

  json params{{"data", a.dataDir}, {"method", a.method}, {"p", a.p},
              {"solver", a.solver}, {"eps", a.eps},      {"channelScale", a.channelScale}};
  write_manifest(outPath.parent_path().string(), argv, params, timer);
  std::cerr << "embedded " << embs.size() << " signals\n";
  return 0;
}

struct DistmatArgs {
  std::string dataDir, method = "tlp", solver = "auto", out;
  double p = 2.0, eps = 0.0, channelScale = 1.0, chi = -1.0;
};

int cmd_distmat(const std::vector<std::string>& argv, const DistmatArgs& a) {
  PhaseTimer timer;
  LabeledDataset ds = read_dataset(a.dataDir);
  timer.lap("load");
  const int N = static_cast<int>(ds.signals.size());
  SolveOptions opts = solve_options(a.solver, a.eps);
  DistanceMatrix D;
  D.entries = Matrix::Zero(N, N);

  if (a.method == "lwp" || a.method == "ltlp") {
    EmbedArgs ea;
    ea.method = a.method;
    ea.solver = a.solver;
    ea.p = a.p;
    ea.eps = a.eps;
    ea.channelScale = a.channelScale;
    ea.chi = a.chi;
    ReferenceSignal ref;
    std::vector<EmbeddingVector> embs = embed_dataset(ds, ea, ref);
    D = pairwise_linear_distances(embs);
  } else if (a.method == "lp") {
    D.method = DistanceMethod::LP;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        const TLpSignal& si = ds.signals[i];
        const TLpSignal& sj = ds.signals[j];
        if ((si.measure.points - sj.measure.points).cwiseAbs().maxCoeff() > 1e-12)
          throw Error(ErrorKind::GridMismatch, "lp distance needs a common grid");
        double acc = 0.0;
        for (int r = 0; r < si.measure.size(); ++r)
          for (int c = 0; c < si.channels(); ++c)
            acc += si.measure.weights[r] *
                   std::pow(std::abs(si.values(r, c) - sj.values(r, c)), a.p);
        D.entries(i, j) = D.entries(j, i) = std::pow(acc, 1.0 / a.p);
      }
  } else if (a.method == "cor") {
    D.method = DistanceMethod::COR;
    std::vector<Matrix> std_(N);
    parallel_for(N, [&](std::size_t i) {
      std_[i] = standardize_window(ds.signals[i].values.transpose());
    });
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j)
        D.entries(i, j) = D.entries(j, i) = cor_distance(std_[i], std_[j]);
  } else if (a.method == "wp") {
    D.method = DistanceMethod::WP;
    std::vector<DiscreteMeasure> meas(N);
    for (int i = 0; i < N; ++i) {
      double chi = a.chi >= 0 ? a.chi : default_chi(ds.signals[i]);
      meas[i] = normalize_for_wp(ds.signals[i], chi);
    }
    long total = static_cast<long>(N) * (N - 1) / 2, doneCount = 0;
    parallel_for(N, [&](std::size_t i) {
      for (int j = static_cast<int>(i) + 1; j < N; ++j)
        D.entries(i, j) = D.entries(j, i) = wasserstein_distance(meas[i], meas[j], a.p, opts);
    });
    std::cerr << "wp distances: " << total << " solves\n";
    (void)doneCount;
  } else if (a.method == "tlp") {
    D.method = DistanceMethod::TLP;
    long total = static_cast<long>(N) * (N - 1) / 2;
    std::atomic<long> done{0};
    parallel_for(N, [&](std::size_t i) {
      for (int j = static_cast<int>(i) + 1; j < N; ++j) {
        D.entries(i, j) = D.entries(j, i) =
            tlp_distance(ds.signals[i], ds.signals[j], a.p, opts, a.channelScale);
        long k = ++done;
        if (k % 200 == 0 || k == total)
          std::cerr << "tlp distances: " << k << "/" << total << " solves\n";
      }
    });
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown method " + a.method);
  }
  timer.lap("solve");

  write_distance_csv(a.out, D, ds.ids);
  timer.lap("write");
  json params{{"data", a.dataDir}, {"method", a.method}, {"p", a.p},
              {"solver", a.solver}, {"eps", a.eps}};
  write_manifest(fs::path(a.out).parent_path().string(), argv, params, timer);
  return 0;
}

int cmd_cluster(const std::vector<std::string>& argv, const std::string& embFile, int K,
                uint64_t seed, int repeats, const std::string& labelsFile,
                const std::string& out) {
  PhaseTimer timer;
  EmbeddingFile emb = read_embeddings_csv(embFile);
  std::vector<int> truth = dense_labels(labels_for(emb, labelsFile));
  timer.lap("load");

  std::vector<double> scores(repeats);
  std::vector<int> firstAssign;
  for (int r = 0; r < repeats; ++r) {
    std::mt19937_64 rng = substream(seed, static_cast<uint64_t>(r));
    std::vector<int> assign = kmeans(emb.rows, K, rng);
    if (r == 0) firstAssign = assign;
    scores[r] = adjusted_rand_index(assign, truth);
  }
  timer.lap("cluster");

  write_scores_csv(out, scores);
  write_assignments_csv((fs::path(out).parent_path() / "assignments.csv").string(),
                        emb.ids, firstAssign);
  timer.lap("write");
  json params{{"embeddings", embFile}, {"k", K}, {"seed", seed}, {"repeats", repeats}};
  write_manifest(fs::path(out).parent_path().string(), argv, params, timer);
  return 0;
}

int cmd_classify(const std::vector<std::string>& argv, const std::string& embFile,
                 const std::string& labelsFile, int folds, int repeats, uint64_t seed,
                 const std::string& out) {
  PhaseTimer timer;
  EmbeddingFile emb = read_embeddings_csv(embFile);
  std::vector<int> truth = dense_labels(labels_for(emb, labelsFile));
  timer.lap("load");
  CVResult res = cross_validate(emb.rows, truth, folds, repeats, seed);
  if (res.stratifyWarning)
    std::cerr << "warning: class smaller than fold count; folds are unstratified\n";
  timer.lap("evaluate");
  write_scores_csv(out, res.scores);
  timer.lap("write");
  json params{{"embeddings", embFile}, {"folds", folds}, {"repeats", repeats}, {"seed", seed}};
  write_manifest(fs::path(out).parent_path().string(), argv, params, timer);
  return 0;
}

int cmd_interp(const std::vector<std::string>& argv, const std::string& embFile,
               std::string refPath, int component, const std::string& stddevsCsv,
               const std::string& outDir) {
  PhaseTimer timer;
  EmbeddingFile emb = read_embeddings_csv(embFile);
  if (fs::is_directory(refPath)) refPath = (fs::path(refPath) / "reference.csv").string();
  TLpSignal refSig = read_signal_csv(refPath);
  ReferenceSignal ref{refSig.measure, refSig.values,
                      emb.meta.kind == "lwp" ? ReferenceKind::WP : ReferenceKind::TLP};
  timer.lap("load");

  const int n = ref.measure.size();
  const int d = ref.measure.dim();
  const int m = static_cast<int>(ref.values.cols());
  if (emb.rows.cols() != n * (d + m))
    throw Error(ErrorKind::ShapeMismatch, "embeddings do not match the reference shape");

  std::vector<EmbeddingVector> embs;
  for (Eigen::Index rIdx = 0; rIdx < emb.rows.rows(); ++rIdx) {
    EmbeddingVector v;
    v.exponent = emb.meta.p;
    v.weights = ref.measure.weights;
    v.spatial.resize(n, d);
    v.channel.resize(n, m);
    Eigen::Index pos = 0;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c) v.spatial(i, c) = emb.rows(rIdx, pos++);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < m; ++c) v.channel(i, c) = emb.rows(rIdx, pos++);
    embs.push_back(std::move(v));
  }
  std::vector<double> stddevs = parse_list(stddevsCsv);
  std::vector<TLpSignal> sweep =
      mode_sweep(embs, component, stddevs, ref, emb.meta.channelScale);
  timer.lap("sweep");

  fs::create_directories(outDir);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "mode%d_s%+.2f.csv", component, stddevs[i]);
    write_signal_csv((fs::path(outDir) / name).string(), sweep[i]);
  }
  timer.lap("write");
  json params{{"embeddings", embFile}, {"component", component}, {"stddevs", stddevs}};
  write_manifest(outDir, argv, params, timer);
  return 0;
}

int cmd_flowmin(const std::vector<std::string>& argv, const std::string& muFile,
                const std::string& nuFile, const std::vector<std::string>& fFiles,
                const std::vector<std::string>& gFiles, double tau, int maxSteps,
                double energyTol, const std::string& outPair) {
  PhaseTimer timer;
  auto comma = outPair.find(',');
  if (comma == std::string::npos)
    throw Error(ErrorKind::InvalidArgument, "--out expects map.csv,energy.csv");
  const std::string mapOut = outPair.substr(0, comma);
  const std::string energyOut = outPair.substr(comma + 1);

  GridField grid;
  Matrix muRaw = read_grid_csv(muFile);
  Matrix nuRaw = read_grid_csv(nuFile);
  grid.nx = static_cast<int>(muRaw.rows());
  grid.ny = static_cast<int>(muRaw.cols());
  grid.hx = 1.0 / (grid.nx - 1);
  grid.hy = 1.0 / (grid.ny - 1);
  const double floor = 1e-8 * muRaw.maxCoeff();
  grid.mu = normalize_density(muRaw.cwiseMax(floor), grid.hx, grid.hy);
  grid.nu = normalize_density(nuRaw.cwiseMax(1e-8 * nuRaw.maxCoeff()), grid.hx, grid.hy);
  if (fFiles.size() != gFiles.size())
    throw Error(ErrorKind::ChannelMismatch, "need matching --f and --g channel files");
  for (const auto& f : fFiles) grid.f.push_back(read_grid_csv(f));
  for (const auto& g : gFiles) grid.g.push_back(read_grid_csv(g));
  timer.lap("load");

  FlowResult res = flow_minimize(grid, tau, maxSteps, energyTol);
  timer.lap("solve");

  {
    std::ofstream out(mapOut);
    out << "x,y,tx,ty\n";
    for (int i = 0; i < grid.nx; ++i)
      for (int j = 0; j < grid.ny; ++j)
        out << format_double(i * grid.hx) << "," << format_double(j * grid.hy) << ","
            << format_double(res.tx(i, j)) << "," << format_double(res.ty(i, j)) << "\n";
  }
  {
    std::ofstream out(energyOut);
    out << "step,energy\n";
    for (std::size_t s = 0; s < res.energies.size(); ++s)
      out << s << "," << format_double(res.energies[s]) << "\n";
  }
  timer.lap("write");
  if (res.nonposJacobianCells > 0)
    std::cerr << "warning: " << res.nonposJacobianCells
              << " cells with nonpositive map Jacobian\n";
  json params{{"mu", muFile}, {"nu", nuFile},       {"tau", tau},
              {"maxSteps", maxSteps}, {"energyTol", energyTol},
              {"steps", res.steps},   {"finalTau", res.finalTau},
              {"nonposJacobianCells", res.nonposJacobianCells}};
  write_manifest(fs::path(mapOut).parent_path().string(), argv, params, timer);
  return 0;
}

int cmd_finance(const std::vector<std::string>& argv, const std::string& pricesFile,
                const FinanceConfig& cfg, const std::string& outDir, bool emitDist) {
  PhaseTimer timer;
  PriceSeries prices = read_prices_csv(pricesFile);
  timer.lap("load");
  FinanceResult res = run_finance(prices, cfg);
  timer.lap("solve");

  fs::create_directories(outDir);
  {
    std::ofstream out(fs::path(outDir) / "stats.csv");
    out << "method,horizon,returnKind,quintile,SR,PPT,N\n";
    for (const auto& hr : res.horizons)
      for (const auto& qs : hr.stats)
        out << to_string(cfg.method) << "," << hr.h << "," << to_string(hr.kind) << ","
            << qs.qr << "," << format_double(qs.sr) << "," << format_double(qs.pptValue)
            << "," << qs.n << "\n";
  }
  for (const auto& hr : res.horizons) {
    for (int qr = 1; qr <= 5; ++qr) {
      char name[64];
      std::snprintf(name, sizeof name, "pnl_%s_h%d_qr%d.csv", to_string(hr.kind), hr.h, qr);
      std::ofstream out(fs::path(outDir) / name);
      out << "date,pnl\n";
      for (std::size_t i = 0; i < hr.days.size(); ++i)
        out << prices.dates[hr.days[i]] << "," << format_double(hr.pnl[qr - 1][i]) << "\n";
    }
  }
  if (res.horizons.size() == 1) {
    // single combination: also emit the plain pnl.csv interface
    const auto& hr = res.horizons[0];
    std::ofstream out(fs::path(outDir) / "pnl.csv");
    out << "date,pnl\n";
    for (std::size_t i = 0; i < hr.days.size(); ++i)
      out << prices.dates[hr.days[i]] << "," << format_double(hr.pnl[0][i]) << "\n";
  }
  if (emitDist) {
    std::vector<std::string> ids;
    for (int day : res.windows.priceDay) ids.push_back(prices.dates[day]);
    write_distance_csv((fs::path(outDir) / "dist.csv").string(), res.dist, ids);
  }
  timer.lap("write");

  json params{{"prices", pricesFile},
              {"method", to_string(cfg.method)},
              {"k", cfg.k},
              {"m", cfg.m},
              {"burnin", cfg.burnin},
              {"horizons", cfg.horizons},
              {"spy", cfg.spyTicker},
              {"usedSpyProxy", res.usedSpyProxy},
              {"eps", cfg.ot.sink.epsilon}};
  write_manifest(outDir, argv, params, timer);
  return 0;
}

int dispatch(const std::vector<std::string>& argv);

int cmd_rerun(const std::string& manifestPath) {
  std::ifstream in(manifestPath);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + manifestPath);
  json j;
  in >> j;
  std::vector<std::string> argv = j.at("argv").get<std::vector<std::string>>();
  return dispatch(argv);
}

int dispatch(const std::vector<std::string>& argv) {
  CLI::App app{"transportation Lp distances, linear embeddings, and experiment runners"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker cap (0 = logical cores)");

  // synth1d
  auto* synth1d = app.add_subcommand("synth1d", "generate the 1D hump/chirp dataset");
  std::string outDir;
  Synth1dConfig s1;
  synth1d->add_option("--out", outDir, "output directory")->required();
  synth1d->add_option("--seed", s1.seed, "rng seed")->required();
  synth1d->add_option("--l", s1.l, "left offset");
  synth1d->add_option("--r", s1.r, "hump width");
  synth1d->add_option("--b", s1.b, "gap between humps");
  synth1d->add_option("--gamma1", s1.gamma1, "first chirp tooth period");
  synth1d->add_option("--gamma2", s1.gamma2, "second chirp tooth period");
  synth1d->add_option("--noise", s1.noiseSigma, "noise sigma");
  synth1d->add_option("--grid", s1.gridN, "grid length");
  synth1d->add_option("--r1", s1.r1, "probability of gamma1 per chirp");

  // synth2d
  auto* synth2d = app.add_subcommand("synth2d", "generate the 2D M1/M2 dataset");
  std::string outDir2;
  Synth2dConfig s2;
  synth2d->add_option("--out", outDir2, "output directory")->required();
  synth2d->add_option("--seed", s2.seed, "rng seed")->required();
  int grid2 = 32;
  synth2d->add_option("--grid", grid2, "grid side length");
  synth2d->add_option("--per-class", s2.nPerClass, "signals per class");

  // embed
  auto* embedCmd = app.add_subcommand("embed", "embed a dataset against its reference");
  EmbedArgs ea;
  embedCmd->add_option("--data", ea.dataDir, "dataset directory")->required();
  embedCmd->add_option("--method", ea.method, "lwp|ltlp")->required();
  embedCmd->add_option("--p", ea.p, "exponent");
  embedCmd->add_option("--solver", ea.solver, "auto|exact|sinkhorn");
  embedCmd->add_option("--eps", ea.eps, "sinkhorn epsilon (0 = 0.01*max cost)");
  embedCmd->add_option("--channel-scale", ea.channelScale, "channel scaling");
  embedCmd->add_option("--chi", ea.chi, "wp normalization shift (default |min f|+0.01)");
  embedCmd->add_option("--out", ea.out, "embeddings csv path")->required();

  // distmat
  auto* distmat = app.add_subcommand("distmat", "pairwise distance matrix");
  DistmatArgs da;
  distmat->add_option("--data", da.dataDir, "dataset directory")->required();
  distmat->add_option("--method", da.method, "lp|wp|tlp|lwp|ltlp|cor")->required();
  distmat->add_option("--p", da.p, "exponent");
  distmat->add_option("--solver", da.solver, "auto|exact|sinkhorn");
  distmat->add_option("--eps", da.eps, "sinkhorn epsilon");
  distmat->add_option("--channel-scale", da.channelScale, "channel scaling");
  distmat->add_option("--chi", da.chi, "wp normalization shift");
  distmat->add_option("--out", da.out, "matrix csv path")->required();

  // cluster
  auto* cluster = app.add_subcommand("cluster", "k-means + ARI over repeats");
  std::string embFile, labelsFile, clusterOut;
  int K = 3, repeats = 100;
  uint64_t seed = 0;
  cluster->add_option("--embeddings", embFile, "embeddings csv")->required();
  cluster->add_option("--k", K, "cluster count")->required();
  cluster->add_option("--seed", seed, "rng seed")->required();
  cluster->add_option("--repeats", repeats, "repeat count");
  cluster->add_option("--labels", labelsFile, "labels csv (path,label)");
  cluster->add_option("--out", clusterOut, "scores csv path")->required();

  // classify
  auto* classify = app.add_subcommand("classify", "1NN cross-validated macro-F1");
  std::string cEmb, cLabels, cOut;
  int folds = 5, cRepeats = 100;
  uint64_t cSeed = 0;
  classify->add_option("--embeddings", cEmb, "embeddings csv")->required();
  classify->add_option("--labels", cLabels, "labels csv (path,label)");
  classify->add_option("--folds", folds, "fold count");
  classify->add_option("--repeats", cRepeats, "repeat count");
  classify->add_option("--seed", cSeed, "rng seed")->required();
  classify->add_option("--out", cOut, "scores csv path")->required();

  // interp
  auto* interp = app.add_subcommand("interp", "principal-mode sweep via inversion");
  std::string iEmb, iRef, iOut, stddevs = "-2,-1,0,1,2";
  int component = 0;
  interp->add_option("--embeddings", iEmb, "embeddings csv")->required();
  interp->add_option("--ref", iRef, "reference signal csv or its directory")->required();
  interp->add_option("--component", component, "principal component index");
  interp->add_option("--stddevs", stddevs, "comma-separated sweep positions");
  interp->add_option("--out", iOut, "output directory")->required();

  // flowmin
  auto* flowmin = app.add_subcommand("flowmin", "flow-minimization transport solver");
  std::string muFile, nuFile, flowOut;
  std::vector<std::string> fFiles, gFiles;
  double tau = 1e-4, energyTol = 1e-9;
  int maxSteps = 500;
  flowmin->add_option("--mu", muFile, "source density grid csv")->required();
  flowmin->add_option("--nu", nuFile, "target density grid csv")->required();
  flowmin->add_option("--f", fFiles, "source channel grid csv (repeatable)");
  flowmin->add_option("--g", gFiles, "target channel grid csv (repeatable)");
  flowmin->add_option("--tau", tau, "step size")->required();
  flowmin->add_option("--max-steps", maxSteps, "iteration cap");
  flowmin->add_option("--energy-tol", energyTol, "stop when the decrease drops below");
  flowmin->add_option("--out", flowOut, "map.csv,energy.csv")->required();

  // finance
  auto* finance = app.add_subcommand("finance", "sliding-window kNN forecasting");
  std::string pricesFile, finOut, method = "cor", horizons = "1,3,5,10", kinds = "rr,mr";
  FinanceConfig fc;
  bool emitDist = false;
  std::string finSolver = "auto";
  double finEps = 0.0;
  finance->add_option("--prices", pricesFile, "wide price csv")->required();
  finance->add_option("--method", method, "cor|wp|lwp|ltlp")->required();
  finance->add_option("--k", fc.k, "neighbor count");
  finance->add_option("--m", fc.m, "window length");
  finance->add_option("--burnin", fc.burnin, "reference burn-in windows");
  finance->add_option("--horizons", horizons, "comma-separated horizons");
  finance->add_option("--returns", kinds, "rr,mr subset");
  finance->add_option("--spy", fc.spyTicker, "market proxy ticker");
  finance->add_option("--solver", finSolver, "auto|exact|sinkhorn");
  finance->add_option("--eps", finEps, "sinkhorn epsilon");
  finance->add_flag("--emit-dist", emitDist, "also write dist.csv");
  finance->add_option("--out", finOut, "output directory")->required();

  // rerun
  auto* rerun = app.add_subcommand("rerun", "replay a run from its manifest");
  std::string manifestPath;
  rerun->add_option("manifest", manifestPath, "manifest.json path")->required();

  std::vector<std::string> cliArgs(argv.begin() + 1, argv.end());
  std::reverse(cliArgs.begin(), cliArgs.end());
  try {
    app.parse(cliArgs);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  }
  set_thread_cap(threads);

  if (*synth1d) return cmd_synth1d(argv, outDir, s1);
  if (*synth2d) {
    s2.nx = s2.ny = grid2;
    return cmd_synth2d(argv, outDir2, s2);
  }
  if (*embedCmd) return cmd_embed(argv, ea);
  if (*distmat) return cmd_distmat(argv, da);
  if (*cluster) return cmd_cluster(argv, embFile, K, seed, repeats, labelsFile, clusterOut);
  if (*classify) return cmd_classify(argv, cEmb, cLabels, folds, cRepeats, cSeed, cOut);
  if (*interp) return cmd_interp(argv, iEmb, iRef, component, stddevs, iOut);
  if (*flowmin)
    return cmd_flowmin(argv, muFile, nuFile, fFiles, gFiles, tau, maxSteps, energyTol, flowOut);
  if (*finance) {
    fc.horizons = parse_int_list(horizons);
    fc.kinds.clear();
    std::stringstream ss(kinds);
    std::string kindTok;
    while (std::getline(ss, kindTok, ',')) {
      if (kindTok == "rr") fc.kinds.push_back(ReturnKind::RR);
      else if (kindTok == "mr") fc.kinds.push_back(ReturnKind::MR);
      else throw Error(ErrorKind::InvalidArgument, "unknown return kind " + kindTok);
    }
    if (method == "cor") fc.method = WindowMethod::COR;
    else if (method == "wp") fc.method = WindowMethod::WP;
    else if (method == "lwp") fc.method = WindowMethod::LWP;
    else if (method == "ltlp") fc.method = WindowMethod::LTLP;
    else throw Error(ErrorKind::InvalidArgument, "unknown method " + method);
    fc.ot = solve_options(finSolver, finEps);
    return cmd_finance(argv, pricesFile, fc, finOut, emitDist);
  }
  if (*rerun) return cmd_rerun(manifestPath);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    return dispatch(args);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << "run `tlp --help` for the command list\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
