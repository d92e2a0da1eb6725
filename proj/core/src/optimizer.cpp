#include "ktb/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "ktb/acquisition.hpp"
#include "ktb/errors.hpp"
#include "ktb/pareto.hpp"
#include "ktb/scalar_gp.hpp"
#include "ktb/sobol.hpp"

namespace ktb {
namespace {

// Stream tags; each (seed, tag, counter) triple feeds exactly one consumer.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kEvalStream = 2;
constexpr std::uint64_t kEiStream = 3;
constexpr std::uint64_t kCandidateStream = 0x100;
constexpr std::uint64_t kSampleStream = 0x200;
constexpr std::uint64_t kFitStream = 0x300;
constexpr std::uint64_t kRestartStream = 0x400;

constexpr double kRelativeImprovement = 1e-7;
constexpr double kHvImprovement = 1e-9;

using Clock = std::chrono::steady_clock;

struct Observation {
  Vector x;
  Tensor output;
  Vector f;
};

// Evaluations in order, with failed ones recorded in the trace only.
class History {
 public:
  History(const CompositeProblem& problem, const OptimizerConfig& config, RunTrace& trace)
      : problem_(problem), config_(config), trace_(trace), start_(Clock::now()) {}

  Index evaluations() const { return next_eval_; }
  Index remaining() const { return config_.budget - next_eval_; }
  const std::vector<Observation>& observations() const { return obs_; }

  // Evaluates x and appends a trace row; returns the observation index or
  // -1 on failure. `score` fills incumbent_or_hv after the archive update.
  template <class Score>
  Index evaluate(const Vector& x, Index step, Score&& score) {
    TraceRow row;
    row.step = step;
    row.eval_index = next_eval_;
    row.x = x;
    Rng rng = Rng::stream(config_.seed, kEvalStream, static_cast<std::uint64_t>(next_eval_));
    ++next_eval_;
    Index id = -1;
    try {
      Tensor out = problem_.simulate(x, rng);
      Vector f = problem_.metrics(out);
      if (f.size() != problem_.n_objectives || !f.allFinite() || !out.all_finite()) {
        throw Error("non-finite or malformed evaluation");
      }
      row.objectives = f;
      obs_.push_back({x, std::move(out), std::move(f)});
      id = static_cast<Index>(obs_.size()) - 1;
    } catch (const Error&) {
      row.failed = true;
    }
    row.incumbent_or_hv = score(id);
    row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    trace_.rows.push_back(std::move(row));
    return id;
  }

 private:
  const CompositeProblem& problem_;
  const OptimizerConfig& config_;
  RunTrace& trace_;
  Clock::time_point start_;
  Index next_eval_ = 0;
  std::vector<Observation> obs_;
};

Matrix initial_design(const CompositeProblem& problem, const OptimizerConfig& config, Index n) {
  Rng rng = Rng::stream(config.seed, kInitStream);
  return scrambled_sobol(n, problem.dim, rng);
}

void check_problem(const CompositeProblem& problem, Index n_objectives, const char* who) {
  if (problem.dim < 1) throw ConfigError(std::string(who) + ": problem has no inputs");
  if (!problem.simulate || !problem.metrics) throw ConfigError(std::string(who) + ": incomplete problem");
  if (n_objectives > 0 && problem.n_objectives != n_objectives) {
    throw ConfigError(std::string(who) + ": wrong number of objectives for this method");
  }
}

// Observations inside the box of half-width L/2 around the center; when
// fewer than `floor`, the `floor` nearest in ∞-norm (ties by index).
std::vector<Index> local_indices(const std::vector<Observation>& obs, const TrustRegionState& tr, Index floor) {
  const Index n = static_cast<Index>(obs.size());
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<Index> inside;
  for (Index i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] = (obs[static_cast<std::size_t>(i)].x - tr.center).cwiseAbs().maxCoeff();
    if (dist[static_cast<std::size_t>(i)] <= tr.length / 2.0) inside.push_back(i);
  }
  if (static_cast<Index>(inside.size()) >= floor || n <= static_cast<Index>(inside.size())) return inside;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(std::min(floor, n)));
  std::sort(order.begin(), order.end());
  return order;
}

// Thompson draws of every objective at the candidates, from a surrogate
// fitted on the local data: result[s] is candidates × objectives.
class LocalSurrogate {
 public:
  LocalSurrogate(const CompositeProblem& problem, ModelKind kind, const OptimizerConfig& config)
      : problem_(problem), kind_(kind), config_(config) {}

  std::vector<Matrix> draw(const std::vector<Observation>& obs, const std::vector<Index>& idx,
                           const Matrix& candidates, Index n_draws, std::uint64_t fit_seed,
                           std::uint64_t sample_seed) {
    const Index n = static_cast<Index>(idx.size());
    Matrix x(n, problem_.dim);
    for (Index i = 0; i < n; ++i) x.row(i) = obs[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].x;

    FitConfig fit = config_.fit;
    fit.seed = fit_seed;
    SampleRequest req;
    req.x_test = candidates;
    req.n_samples = n_draws;
    req.batch_size = config_.sample_batch_size;
    req.precision = config_.precision;
    req.seed = sample_seed;

    const Index m = candidates.rows();
    const Index o = problem_.n_objectives;
    std::vector<Matrix> out(static_cast<std::size_t>(n_draws), Matrix(m, o));

    if (kind_ == ModelKind::hogp) {
      std::vector<Tensor> parts;
      parts.reserve(static_cast<std::size_t>(n));
      for (Index i : idx) parts.push_back(obs[static_cast<std::size_t>(i)].output);
      const Tensor y = stack(parts);
      const HogpModel model = fit_hogp(x, y, fit, warm(0, x.cols()));
      remember(0, hogp_parameters(model, fit.latent_dim));
      const PosteriorSamples samples = batched_matheron_sample(model, req);
      for (Index s = 0; s < n_draws; ++s) {
        for (Index i = 0; i < m; ++i) out[static_cast<std::size_t>(s)].row(i) = problem_.metrics(samples.at(s, i));
      }
      return out;
    }

    for (Index k = 0; k < o; ++k) {
      Vector y(n);
      for (Index i = 0; i < n; ++i) y[i] = obs[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].f[k];
      fit.seed = fit_seed + static_cast<std::uint64_t>(k);
      const ScalarGpModel model = fit_scalar_gp(x, y, fit, warm(k, x.cols()));
      remember(k, hogp_parameters(model.hogp(), fit.latent_dim));
      req.seed = mix64(sample_seed + static_cast<std::uint64_t>(k));
      const PosteriorSamples samples = batched_matheron_sample(model.hogp(), req);
      for (Index s = 0; s < n_draws; ++s) {
        for (Index i = 0; i < m; ++i) out[static_cast<std::size_t>(s)](i, k) = samples.values.data()[s * m + i];
      }
    }
    return out;
  }

  void forget() { warm_.clear(); }

 private:
  std::optional<Vector> warm(Index slot, Index dim) const {
    if (!config_.warm_start || slot >= static_cast<Index>(warm_.size())) return std::nullopt;
    const Vector& w = warm_[static_cast<std::size_t>(slot)];
    if (w.size() == 0 || w.size() < dim + 2) return std::nullopt;
    return w;
  }

  void remember(Index slot, Vector theta) {
    if (static_cast<Index>(warm_.size()) <= slot) warm_.resize(static_cast<std::size_t>(slot) + 1);
    warm_[static_cast<std::size_t>(slot)] = std::move(theta);
  }

  const CompositeProblem& problem_;
  ModelKind kind_;
  const OptimizerConfig& config_;
  std::vector<Vector> warm_;
};

Vector default_ref_point(const std::vector<Observation>& obs, Index o) {
  if (obs.empty()) throw Error("cannot derive a reference point: every initial evaluation failed");
  Vector lo = Vector::Constant(o, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (const auto& ob : obs) {
    lo = lo.cwiseMin(ob.f);
    hi = hi.cwiseMax(ob.f);
  }
  Vector ref(o);
  for (Index k = 0; k < o; ++k) {
    const double range = hi[k] - lo[k];
    ref[k] = hi[k] + (range > 0.0 ? 0.1 * range : 0.1 * std::max(std::abs(hi[k]), 1e-12));
  }
  return ref;
}

// Running single-objective incumbent for the trace column.
struct BestSoFar {
  const std::vector<Observation>* obs = nullptr;
  double best = std::numeric_limits<double>::infinity();
  double operator()(Index id) {
    if (id >= 0) best = std::min(best, (*obs)[static_cast<std::size_t>(id)].f[0]);
    return best;
  }
};

}  // namespace

void OptimizerConfig::validate() const {
  if (n_init < 1) throw ConfigError("n_init must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (budget < n_init) throw ConfigError("budget must be >= n_init");
  if (n_candidates < 0) throw ConfigError("n_candidates must be >= 0");
  if (n_trust_regions < 1) throw ConfigError("n_trust_regions must be >= 1");
  if (sample_batch_size < 1) throw ConfigError("sample_batch_size must be >= 1");
  if (min_local_points < 2) throw ConfigError("min_local_points must be >= 2");
}

Index OptimizerConfig::candidates_for(Index dim) const {
  if (n_candidates > 0) return n_candidates;
  return std::min<Index>(100 * dim, 5000);
}

RunTrace run_trbo(const CompositeProblem& problem, ModelKind kind, const OptimizerConfig& config) {
  check_problem(problem, 1, "run_trbo");
  config.validate();
  RunTrace trace;
  trace.n_objectives = 1;
  History history(problem, config, trace);
  BestSoFar best{&history.observations()};

  const Matrix init = initial_design(problem, config, config.n_init);
  for (Index i = 0; i < config.n_init; ++i) history.evaluate(init.row(i).transpose(), 0, best);

  const auto& obs = history.observations();
  const TrustRegionConstants constants =
      config.tr_constants.value_or(TrustRegionConstants::for_problem(problem.dim, config.batch_size));
  // Observations collected since the last restart; the center is their best.
  std::vector<Index> epoch(obs.size());
  std::iota(epoch.begin(), epoch.end(), Index{0});
  auto epoch_best = [&]() -> Index {
    Index b = -1;
    for (Index i : epoch) {
      if (b < 0 || obs[static_cast<std::size_t>(i)].f[0] < obs[static_cast<std::size_t>(b)].f[0]) b = i;
    }
    return b;
  };
  Index b0 = epoch_best();
  TrustRegionState tr = TrustRegionState::initial(
      b0 >= 0 ? obs[static_cast<std::size_t>(b0)].x : Vector::Constant(problem.dim, 0.5), constants);
  LocalSurrogate surrogate(problem, kind, config);
  const Index n_cand = config.candidates_for(problem.dim);

  for (Index step = 1; history.remaining() > 0; ++step) {
    const auto s = static_cast<std::uint64_t>(step);
    const Index q = std::min(config.batch_size, history.remaining());
    const Index eb = epoch_best();
    const double incumbent =
        eb >= 0 ? obs[static_cast<std::size_t>(eb)].f[0] : std::numeric_limits<double>::infinity();
    if (eb >= 0) tr.center = obs[static_cast<std::size_t>(eb)].x;

    Rng cand_rng = Rng::stream(config.seed, kCandidateStream, s);
    const Matrix candidates = generate_candidates(tr, std::max(n_cand, q), cand_rng);
    std::vector<Index> picks;
    const std::vector<Index> local = local_indices(obs, tr, config.min_local_points);
    if (static_cast<Index>(local.size()) >= 2) {
      const std::vector<Matrix> draws = surrogate.draw(obs, local, candidates, q, mix64(config.seed ^ (kFitStream + s)),
                                                       mix64(config.seed ^ (kSampleStream + s)));
      Matrix utilities(q, candidates.rows());
      for (Index j = 0; j < q; ++j) utilities.row(j) = -draws[static_cast<std::size_t>(j)].col(0).transpose();
      picks = thompson_select(utilities, q);
    } else {
      for (Index j = 0; j < q; ++j) picks.push_back(j);
    }

    bool improved = false;
    for (Index c : picks) {
      const Index id = history.evaluate(candidates.row(c).transpose(), step, best);
      if (id < 0) continue;
      epoch.push_back(id);
      const double f = obs[static_cast<std::size_t>(id)].f[0];
      if (f < incumbent - kRelativeImprovement * std::abs(incumbent)) improved = true;
    }

    tr = tr_update(tr, improved);
    if (tr.restart) {
      Rng rr = Rng::stream(config.seed, kRestartStream, s);
      tr.center = scrambled_sobol(1, problem.dim, rr).row(0).transpose();
      epoch.clear();
      for (Index i : local_indices(obs, tr, 0)) epoch.push_back(i);
      surrogate.forget();
    }
  }
  return trace;
}

RunTrace run_morbo(const CompositeProblem& problem, ModelKind kind, const OptimizerConfig& config) {
  check_problem(problem, 2, "run_morbo");
  config.validate();
  RunTrace trace;
  trace.n_objectives = 2;
  History history(problem, config, trace);
  const auto& obs = history.observations();

  ParetoArchive archive(2);
  std::size_t archived = 0;
  auto score = [&](Index) {
    for (; archived < obs.size(); ++archived) archive.add(obs[archived].x, obs[archived].f);
    return archive.has_ref_point() ? archive.hypervolume() : 0.0;
  };

  const Matrix init = initial_design(problem, config, config.n_init);
  for (Index i = 0; i < config.n_init; ++i) history.evaluate(init.row(i).transpose(), 0, score);
  archive.set_ref_point(problem.ref_point.value_or(default_ref_point(obs, 2)));
  trace.ref_point = archive.ref_point();
  // Initial rows carry the hypervolume of the points seen so far.
  {
    ParetoArchive replay(2);
    replay.set_ref_point(archive.ref_point());
    std::size_t k = 0;
    for (auto& row : trace.rows) {
      if (!row.failed) {
        replay.add(obs[k].x, obs[k].f);
        ++k;
      }
      row.incumbent_or_hv = replay.hypervolume();
    }
  }

  const TrustRegionConstants constants =
      config.tr_constants.value_or(TrustRegionConstants::for_problem(problem.dim, config.batch_size));
  const Index n_regions = config.n_trust_regions;
  std::vector<TrustRegionState> regions(static_cast<std::size_t>(n_regions),
                                        TrustRegionState::initial(Vector::Constant(problem.dim, 0.5), constants));
  std::vector<LocalSurrogate> surrogates;
  surrogates.reserve(static_cast<std::size_t>(n_regions));
  for (Index r = 0; r < n_regions; ++r) surrogates.emplace_back(problem, kind, config);
  const Index n_cand = config.candidates_for(problem.dim);

  // Centers: Pareto points by decreasing hypervolume contribution, ties to
  // the most recent, assigned to regions cyclically.
  auto assign_centers = [&]() {
    const std::vector<Index> pareto = archive.pareto_indices();
    if (pareto.empty()) return;
    Matrix front(static_cast<Index>(pareto.size()), 2);
    for (std::size_t i = 0; i < pareto.size(); ++i) front.row(static_cast<Index>(i)) = archive.fs()[pareto[i]].transpose();
    const Vector contrib = hv_contributions(front, archive.ref_point());
    std::vector<std::size_t> order(pareto.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (contrib[static_cast<Index>(a)] != contrib[static_cast<Index>(b)]) {
        return contrib[static_cast<Index>(a)] > contrib[static_cast<Index>(b)];
      }
      return pareto[a] > pareto[b];
    });
    for (Index r = 0; r < n_regions; ++r) {
      regions[static_cast<std::size_t>(r)].center =
          archive.xs()[static_cast<std::size_t>(pareto[order[static_cast<std::size_t>(r) % order.size()]])];
    }
  };

  for (Index step = 1; history.remaining() > 0; ++step) {
    const auto s = static_cast<std::uint64_t>(step);
    const Index q = std::min(config.batch_size, history.remaining());
    assign_centers();

    std::vector<Matrix> pooled_x;
    std::vector<std::vector<Matrix>> region_draws;
    std::vector<Index> owner;
    for (Index r = 0; r < n_regions; ++r) {
      const auto ur = static_cast<std::uint64_t>(r);
      const auto& tr = regions[static_cast<std::size_t>(r)];
      Rng cand_rng = Rng::stream(config.seed, kCandidateStream + 1 + ur, s);
      Matrix candidates = generate_candidates(tr, n_cand, cand_rng);
      const std::vector<Index> local = local_indices(obs, tr, config.min_local_points);
      if (static_cast<Index>(local.size()) < 2) continue;
      region_draws.push_back(surrogates[static_cast<std::size_t>(r)].draw(
          obs, local, candidates, q, mix64(config.seed ^ (kFitStream + 1 + ur) ^ (s << 20)),
          mix64(config.seed ^ (kSampleStream + 1 + ur) ^ (s << 20))));
      owner.insert(owner.end(), static_cast<std::size_t>(candidates.rows()), r);
      pooled_x.push_back(std::move(candidates));
    }

    Matrix all_x(static_cast<Index>(owner.size()), problem.dim);
    std::vector<Index> picks;
    {
      Index offset = 0;
      for (const auto& c : pooled_x) {
        all_x.middleRows(offset, c.rows()) = c;
        offset += c.rows();
      }
    }
    if (all_x.rows() >= q && !region_draws.empty()) {
      std::vector<Matrix> draws(static_cast<std::size_t>(q), Matrix(all_x.rows(), 2));
      for (Index j = 0; j < q; ++j) {
        Index offset = 0;
        for (const auto& rd : region_draws) {
          const Matrix& d = rd[static_cast<std::size_t>(j)];
          draws[static_cast<std::size_t>(j)].middleRows(offset, d.rows()) = d;
          offset += d.rows();
        }
      }
      picks = thompson_select_hvi(draws, archive.pareto_front(), archive.ref_point(), q);
    } else {
      Rng rr = Rng::stream(config.seed, kRestartStream, s);
      all_x = scrambled_sobol(q, problem.dim, rr);
      owner.assign(static_cast<std::size_t>(q), -1);
      for (Index j = 0; j < q; ++j) picks.push_back(j);
    }

    std::vector<double> gain(static_cast<std::size_t>(n_regions), 0.0);
    for (Index c : picks) {
      const double before = archive.hypervolume();
      history.evaluate(all_x.row(c).transpose(), step, score);
      const Index r = owner[static_cast<std::size_t>(c)];
      if (r < 0) continue;
      gain[static_cast<std::size_t>(r)] += archive.hypervolume() - before;
    }
    for (Index r = 0; r < n_regions; ++r) {
      auto& tr = regions[static_cast<std::size_t>(r)];
      tr = tr_update(tr, gain[static_cast<std::size_t>(r)] >= kHvImprovement);
      if (tr.restart) surrogates[static_cast<std::size_t>(r)].forget();
    }
  }
  return trace;
}

RunTrace run_random(const CompositeProblem& problem, const OptimizerConfig& config) {
  check_problem(problem, 0, "run_random");
  config.validate();
  RunTrace trace;
  trace.n_objectives = problem.n_objectives;
  History history(problem, config, trace);
  const Matrix x = initial_design(problem, config, config.budget);
  const auto& obs = history.observations();
  // Batches of q after the initial design, matching the model-based methods.
  auto step_of = [&](Index i) { return i < config.n_init ? 0 : (i - config.n_init) / config.batch_size + 1; };

  if (problem.n_objectives == 1) {
    BestSoFar best{&obs};
    for (Index i = 0; i < config.budget; ++i) history.evaluate(x.row(i).transpose(), step_of(i), best);
    return trace;
  }

  ParetoArchive archive(problem.n_objectives);
  std::size_t archived = 0;
  for (Index i = 0; i < config.budget; ++i) {
    const Index step = step_of(i);
    history.evaluate(x.row(i).transpose(), step, [&](Index) {
      for (; archived < obs.size(); ++archived) archive.add(obs[archived].x, obs[archived].f);
      return archive.has_ref_point() ? archive.hypervolume() : 0.0;
    });
    if (i + 1 == config.n_init) {
      archive.set_ref_point(problem.ref_point.value_or(default_ref_point(obs, problem.n_objectives)));
      trace.ref_point = archive.ref_point();
      ParetoArchive replay(problem.n_objectives);
      replay.set_ref_point(archive.ref_point());
      std::size_t k = 0;
      for (auto& row : trace.rows) {
        if (!row.failed) replay.add(obs[k].x, obs[k].f), ++k;
        row.incumbent_or_hv = replay.hypervolume();
      }
    }
  }
  return trace;
}

RunTrace run_ei(const CompositeProblem& problem, const OptimizerConfig& config) {
  check_problem(problem, 1, "run_ei");
  config.validate();
  RunTrace trace;
  trace.n_objectives = 1;
  History history(problem, config, trace);
  const auto& obs = history.observations();
  BestSoFar best{&obs};

  const Matrix init = initial_design(problem, config, config.n_init);
  for (Index i = 0; i < config.n_init; ++i) history.evaluate(init.row(i).transpose(), 0, best);
  const Index n_cand = config.candidates_for(problem.dim);
  std::optional<Vector> warm;

  for (Index step = 1; history.remaining() > 0; ++step) {
    const auto s = static_cast<std::uint64_t>(step);
    const Index q = std::min(config.batch_size, history.remaining());
    Rng rng = Rng::stream(config.seed, kEiStream, s);
    const Matrix candidates = scrambled_sobol(std::max(n_cand, q), problem.dim, rng);
    std::vector<Index> order(static_cast<std::size_t>(candidates.rows()));
    std::iota(order.begin(), order.end(), Index{0});

    if (obs.size() >= 2) {
      const auto n = static_cast<Index>(obs.size());
      Matrix x(n, problem.dim);
      Vector y(n);
      for (Index i = 0; i < n; ++i) {
        x.row(i) = obs[static_cast<std::size_t>(i)].x;
        y[i] = obs[static_cast<std::size_t>(i)].f[0];
      }
      FitConfig fit = config.fit;
      fit.seed = mix64(config.seed ^ (kFitStream + s));
      const ScalarGpModel model = fit_scalar_gp(x, y, fit, config.warm_start ? warm : std::nullopt);
      warm = hogp_parameters(model.hogp(), fit.latent_dim);
      const Vector mean = model.posterior_mean(candidates);
      const Vector var = model.posterior_variance(candidates);
      const double incumbent = y.minCoeff();
      Vector ei(candidates.rows());
      for (Index i = 0; i < ei.size(); ++i) ei[i] = analytic_ei(mean[i], var[i], incumbent);
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return ei[a] > ei[b]; });
    }
    for (Index j = 0; j < q; ++j) history.evaluate(candidates.row(order[static_cast<std::size_t>(j)]).transpose(), step, best);
  }
  return trace;
}

}  // namespace ktb
