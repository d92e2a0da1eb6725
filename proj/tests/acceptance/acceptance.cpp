// Acceptance suite. `ktb_acceptance N` runs criterion N (1..11), `ktb_acceptance`
// runs all of them; each prints one PASS/FAIL line. Exit status is nonzero if
// any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "ktb/harness/config.hpp"
#include "ktb/harness/fit_report.hpp"
#include "ktb/harness/runner.hpp"
#include "ktb/harness/stats.hpp"
#include "ktb/linalg.hpp"
#include "ktb/memory.hpp"
#include "ktb/pareto.hpp"
#include "ktb/problems/metrics.hpp"
#include "ktb/problems/optics.hpp"
#include "ktb/problems/registry.hpp"
#include "ktb/sampling.hpp"
#include "oracles.hpp"

using namespace ktb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ktb_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

// ---------------------------------------------------------------- 1

Outcome kronecker_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240101);
  double worst_mvm = 0, worst_solve = 0, worst_logdet = 0;
  Index largest = 0;
  for (int op = 0; op < 50; ++op) {
    std::vector<Index> sizes;
    if (op == 0) {
      sizes = {16, 16, 16};  // the 4096 upper end
    } else {
      do {
        sizes.assign(1 + rng.below(3), 0);
        for (auto& s : sizes) s = 2 + static_cast<Index>(rng.below(15));
      } while (std::accumulate(sizes.begin(), sizes.end(), Index{1}, std::multiplies<>()) > 4096);
    }
    std::vector<Matrix> fs;
    std::vector<SymMatrix> syms;
    std::vector<Vector> eig_values;
    std::vector<EigenPair> eigs;
    for (Index n : sizes) {
      fs.push_back(oracle::random_spd(n, rng, 0.5));
      syms.emplace_back(fs.back());
      eigs.push_back(sym_eig(syms.back()));
      eig_values.push_back(eigs.back().lambda);
    }
    const KronOperator k(syms);
    const Index n = k.total_dim();
    largest = std::max(largest, n);
    const double sigma2 = 0.05 + rng.uniform();
    Matrix dense = oracle::kron_all(fs);
    const Vector v = rng.normal_vector(n);

    const Vector mvm = dense * v;
    worst_mvm = std::max(worst_mvm, oracle::max_rel_err(kron_mvm(k, v), mvm));

    dense.diagonal().array() += sigma2;
    const Eigen::LLT<Matrix> llt(dense);
    worst_solve = std::max(worst_solve, oracle::max_rel_err(kron_eig_solve(eigs, sigma2, v), llt.solve(v)));
    const double logdet = 2 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    worst_logdet = std::max(worst_logdet, std::abs(kron_logdet(eig_values, sigma2) - logdet));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_mvm <= 1e-10 && worst_solve <= 1e-8 && worst_logdet <= 1e-8 && secs < 60;
  return {ok, fmt("50 operators up to dim %lld: mvm rel %.2e, solve rel %.2e, logdet abs %.2e, %.1f s",
                  static_cast<long long>(largest), worst_mvm, worst_solve, worst_logdet, secs)};
}

// ---------------------------------------------------------------- 2, 3

HogpModel sampling_model(Index n, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix x = (oracle::random_matrix(n, 2, rng).array() * 0.25 + 0.5).matrix();
  const Tensor y(Shape{n, 3, 4}, rng.normal_vector(n * 12));
  LatentFeatures lat{{oracle::random_matrix(3, 2, rng), oracle::random_matrix(4, 2, rng)}};
  return HogpModel(x, y, {Vector::Constant(2, 0.5), 1.0}, lat, 0.05, OutputScaling{0.3, 1.5});
}

Matrix sampling_points(Index m, std::uint64_t seed) {
  Rng rng(seed);
  return (oracle::random_matrix(m, 2, rng).array() * 0.25 + 0.5).matrix();
}

struct Moments {
  Vector mean, var;
};

Moments moments(const PosteriorSamples& s) {
  const Index k = s.num_samples();
  const Matrix d = s.values.data().reshaped<Eigen::RowMajor>(k, s.values.size() / k);
  Moments m;
  m.mean = d.colwise().mean().transpose();
  m.var = ((d.rowwise() - m.mean.transpose()).array().square().colwise().sum() / double(k - 1)).transpose();
  return m;
}

// Largest |Δmean|/SE and largest relative variance error over entries with variance >= 0.01.
struct MomentCheck {
  double z = 0, var_rel = 0;
  bool ok() const { return z <= 3 && var_rel <= 0.1; }
};

MomentCheck compare(const Moments& got, const Vector& mean, const Vector& var, const Vector& se) {
  MomentCheck c;
  for (Index e = 0; e < mean.size(); ++e) {
    c.z = std::max(c.z, std::abs(got.mean[e] - mean[e]) / std::max(se[e], 1e-300));
    if (var[e] >= 0.01) c.var_rel = std::max(c.var_rel, std::abs(got.var[e] / var[e] - 1));
  }
  return c;
}

Outcome matheron_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  const HogpModel model = sampling_model(8, 11);
  const Matrix xt = sampling_points(4, 12);
  const Index k = 20000;
  const Moments got = moments(matheron_sample(model, {xt, k, 64, Precision::full64, 13}));
  const auto dense = oracle::hogp_posterior(model, xt);
  const Vector var = dense.cov.diagonal();
  const MomentCheck c = compare(got, dense.mean, var, (var / double(k)).cwiseSqrt());
  const double secs = seconds_since(t0);
  return {c.ok() && secs < 120, fmt("n=8, 3x4 outputs, m=4, 2e4 draws: max |mean z| %.2f (<= 3), max var rel %.3f "
                                    "(<= 0.1), %.1f s",
                                    c.z, c.var_rel, secs)};
}

Outcome batching_fidelity() {
  const HogpModel model = sampling_model(8, 21);
  const Matrix xt = sampling_points(8, 22);
  const Index k = 20000;
  const Moments batched = moments(batched_matheron_sample(model, {xt, k, 2, Precision::full64, 23}));
  const Moments whole = moments(matheron_sample(model, {xt, k, 64, Precision::full64, 24}));
  const Vector se = ((batched.var + whole.var) / double(k)).cwiseSqrt();
  const MomentCheck c = compare(batched, whole.mean, whole.var, se);
  bool identical = true;
  for (Index nb : {8, 9, 64}) {
    const SampleRequest req{xt, 5, nb, Precision::mixed16, 25};
    identical = identical && batched_matheron_sample(model, req).values.data() == matheron_sample(model, req).values.data();
  }
  return {c.ok() && identical, fmt("n'=2 vs unbatched, m=8: max |mean z| %.2f, max var rel %.3f; n'>=m bitwise "
                                   "identical: %s",
                                   c.z, c.var_rel, identical ? "yes" : "no")};
}

// ---------------------------------------------------------------- 4

double condition(const Matrix& a) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

Outcome mixed_precision() {
  // Well-conditioned model: spread-out inputs and latents.
  Rng rng(31);
  const Index n = 12;
  Matrix x(n, 2);
  for (Index i = 0; i < n; ++i) x.row(i) << rng.uniform(), rng.uniform();
  const Tensor y(Shape{n, 4, 6}, rng.normal_vector(n * 24));
  LatentFeatures lat{{2.0 * oracle::random_matrix(4, 2, rng), 2.0 * oracle::random_matrix(6, 2, rng)}};
  const HogpModel model(x, y, {Vector::Constant(2, 0.3), 1.0}, lat, 0.01);
  double worst_cond = 0;
  for (const Matrix& f : model.factors()) worst_cond = std::max(worst_cond, condition(f));

  const Matrix xt = sampling_points(32, 32);
  SampleRequest req{xt, 10, 64, Precision::full64, 33};
  const Vector full = matheron_sample(model, req).values.data();
  req.precision = Precision::mixed16;
  const Vector mixed = matheron_sample(model, req).values.data();
  const double rel = oracle::max_rel_err(mixed, full);

  const HogpModel big = sampling_model(10, 34);
  const Matrix many = sampling_points(512, 35);
  memory::reset_peak();
  const std::size_t base = memory::current_bytes();
  (void)matheron_sample(big, {many, 2, 512, Precision::mixed16, 36});
  const double whole = double(memory::peak_bytes() - base);
  memory::reset_peak();
  (void)batched_matheron_sample(big, {many, 2, 32, Precision::mixed16, 36});
  const double batched = double(memory::peak_bytes() - base);
  const double reduction = whole / batched;

  return {worst_cond <= 1e4 && rel <= 1e-2 && reduction >= 8,
          fmt("factor cond %.0f, mixed16 vs full64 rel %.2e (<= 1e-2); peak bytes m=512 %.0f vs n'=32 %.0f, "
              "%.1fx reduction (>= 8x)",
              worst_cond, rel, whole, batched, reduction)};
}

// ---------------------------------------------------------------- 5

double per_sample_seconds(Shape out) {
  Rng rng(41);
  const Index n = 24;
  Matrix x(n, 3);
  for (Index i = 0; i < n; ++i) x.row(i) << rng.uniform(), rng.uniform(), rng.uniform();
  Shape joint{n};
  joint.insert(joint.end(), out.begin(), out.end());
  LatentFeatures lat;
  for (Index d : out) lat.modes.push_back(oracle::random_matrix(d, 2, rng));
  const HogpModel model(x, Tensor(joint, rng.normal_vector(shape_size(joint))), {Vector::Constant(3, 0.4), 1.0}, lat,
                        0.01);
  Matrix xt(64, 3);
  for (Index i = 0; i < 64; ++i) xt.row(i) << rng.uniform(), rng.uniform(), rng.uniform();
  const SampleRequest req{xt, 8, 64, Precision::mixed16, 43};
  double best = INFINITY;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    (void)matheron_sample(model, req);
    best = std::min(best, seconds_since(t0) / double(req.n_samples));
  }
  return best;
}

Outcome additive_complexity() {
  const double base = per_sample_seconds({11, 16, 16});
  const double doubled = per_sample_seconds({11, 16, 32});
  const double ratio = doubled / base;
  return {ratio < 4, fmt("per-sample time 11x16x16 %.2f ms, 11x16x32 %.2f ms, ratio %.2f (< 4)", base * 1e3,
                         doubled * 1e3, ratio)};
}

// ---------------------------------------------------------------- 6, 7, 11

harness::BenchConfig bench(const std::string& problem, harness::Method method, Index trials, const fs::path& out) {
  harness::BenchConfig c;
  c.problem = problem;
  c.method = method;
  c.n_trials = trials;
  c.optimizer = harness::preset_for(problem);
  c.out_dir = out;
  return c;
}

std::vector<double> final_values(const harness::BenchResult& r) {
  std::vector<double> v;
  for (const auto& t : r.trials) v.push_back(t.ok ? t.trace.rows.back().incumbent_or_hv : NAN);
  return v;
}

bool monotone(const harness::BenchResult& r, bool increasing) {
  for (const auto& t : r.trials) {
    for (std::size_t i = 1; i < t.trace.rows.size(); ++i) {
      const double a = t.trace.rows[i - 1].incumbent_or_hv, b = t.trace.rows[i].incumbent_or_hv;
      if (increasing ? b < a : b > a) return false;
    }
  }
  return true;
}

Outcome environmental_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto hogp = harness::run_benchmark(bench("env34", harness::Method::hogp_trbo, 20, scratch("env_hogp")));
  const auto gp = harness::run_benchmark(bench("env34", harness::Method::gp_trbo, 20, scratch("env_gp")));
  const auto rnd = harness::run_benchmark(bench("env34", harness::Method::random, 20, scratch("env_random")));
  const auto h = final_values(hogp), g = final_values(gp), r = final_values(rnd);
  int wins = 0;
  for (std::size_t i = 0; i < h.size(); ++i) wins += h[i] < r[i] ? 1 : 0;
  const double mh = harness::median(h), mg = harness::median(g), mr = harness::median(r);
  const double secs = seconds_since(t0);
  const bool ok = hogp.all_ok() && gp.all_ok() && rnd.all_ok() && wins >= 15 && mh <= 2 * mg && secs < 1200;
  return {ok, fmt("median final MSE hogp %.3g, gp %.3g, random %.3g; hogp < random in %d/20 seeds (>= 15); "
                  "hogp <= 2x gp: %s; %.0f s",
                  mh, mg, mr, wins, mh <= 2 * mg ? "yes" : "no", secs)};
}

Outcome optics_desk_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = [](harness::Method m, const char* dir) {
    harness::BenchConfig c = bench("optics_desk", m, 10, scratch(dir));
    c.optimizer.budget = 300;
    return c;
  };
  const auto hogp = harness::run_benchmark(cfg(harness::Method::hogp_morbo, "optics_hogp"));
  const auto rnd = harness::run_benchmark(cfg(harness::Method::random, "optics_random"));
  const auto h = final_values(hogp), r = final_values(rnd);
  const double se_h = harness::stddev(h) / std::sqrt(double(h.size()));
  const double se_r = harness::stddev(r) / std::sqrt(double(r.size()));
  const double pooled = std::sqrt(se_h * se_h + se_r * se_r);
  const double gap = harness::mean(h) - harness::mean(r);
  const bool mono = monotone(hogp, true) && monotone(rnd, true);
  const double secs = seconds_since(t0);
  const bool ok = hogp.all_ok() && rnd.all_ok() && gap > 2 * pooled && mono && secs < 2700;
  return {ok, fmt("mean final HV hogp_morbo %.4g vs random %.4g, gap %.2f pooled SE (> 2); monotone: %s; %.0f s",
                  harness::mean(h), harness::mean(r), gap / pooled, mono ? "yes" : "no", secs)};
}

Outcome determinism() {
  struct Case {
    const char* problem;
    harness::Method method;
    Index budget;
  };
  const std::vector<Case> cases{{"env34", harness::Method::random, 40},     {"env34", harness::Method::ei, 22},
                                {"env510", harness::Method::hogp_trbo, 25}, {"coverage", harness::Method::gp_trbo, 30},
                                {"optics_desk", harness::Method::gp_morbo, 80},
                                {"optics_desk", harness::Method::hogp_morbo, 80}};
  int same = 0;
  std::string bad;
  for (const auto& c : cases) {
    std::vector<std::string> runs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = scratch(std::string("det_") + c.problem + "_" + harness::method_name(c.method) +
                                   std::to_string(rep));
      harness::BenchConfig cfg = bench(c.problem, c.method, 2, dir);
      cfg.optimizer.budget = c.budget;
      cfg.jobs = rep == 0 ? 1 : 2;
      harness::run_benchmark(cfg);
      runs.push_back(testcsv::slurp((dir / "trial_000.csv").string()) +
                     testcsv::slurp((dir / "trial_001.csv").string()));
    }
    if (runs[0] == runs[1] && !runs[0].empty()) {
      ++same;
    } else {
      bad += std::string(" ") + c.problem + "/" + harness::method_name(c.method);
    }
  }
  return {same == static_cast<int>(cases.size()),
          fmt("%d/%zu configs produced bitwise-identical trace CSVs on rerun (jobs 1 vs 2)%s", same, cases.size(),
              bad.empty() ? "" : (", differing:" + bad).c_str())};
}

// ---------------------------------------------------------------- 8

double grid_mc_hypervolume(const Matrix& pts, Index g, Rng& rng) {
  // Jittered grid: one uniform draw per cell. Unbiased, and its variance is
  // at most the iid binomial one, so the binomial SE is a safe yardstick.
  long inside = 0;
  for (Index a = 0; a < g; ++a) {
    for (Index b = 0; b < g; ++b) {
      const double x = (a + rng.uniform()) / double(g);
      const double y = (b + rng.uniform()) / double(g);
      bool dominated = false;
      for (Index i = 0; i < pts.rows() && !dominated; ++i) dominated = pts(i, 0) <= x && pts(i, 1) <= y;
      inside += dominated;
    }
  }
  return double(inside) / double(g * g);
}

Outcome hypervolume_exactness() {
  Rng rng(81);
  const Vector ref = Vector::Ones(2);
  const Index g = 1000;
  double worst_z = 0;
  bool loo_exact = true;
  for (int f = 0; f < 20; ++f) {
    Matrix pts(5 + static_cast<Index>(rng.below(30)), 2);
    for (Index i = 0; i < pts.rows(); ++i) pts.row(i) << rng.uniform(), rng.uniform();
    const double hv = hypervolume2d(pts, ref);
    const double mc = grid_mc_hypervolume(pts, g, rng);
    const double se = std::sqrt(std::max(mc * (1 - mc), 1e-12) / double(g * g));
    worst_z = std::max(worst_z, std::abs(hv - mc) / se);

    const auto mask = pareto_filter(pts);
    Matrix front(std::count(mask.begin(), mask.end(), true), 2);
    for (Index i = 0, k = 0; i < pts.rows(); ++i) {
      if (mask[static_cast<std::size_t>(i)]) front.row(k++) = pts.row(i);
    }
    const Vector contrib = hv_contributions(front, ref);
    const double all = hypervolume2d(front, ref);
    for (Index i = 0; i < front.rows(); ++i) {
      Matrix rest(front.rows() - 1, 2);
      rest << front.topRows(i), front.bottomRows(front.rows() - i - 1);
      loo_exact = loo_exact && contrib[i] == all - hypervolume2d(rest, ref);
    }
  }
  return {worst_z <= 3 && loo_exact, fmt("20 fronts vs 10^6-cell jittered grid MC: max |z| %.2f (<= 3); contributions equal "
                                         "leave-one-out exactly: %s",
                                         worst_z, loo_exact ? "yes" : "no")};
}

// ---------------------------------------------------------------- 9

Outcome metric_suite() {
  using namespace problems;
  Rng rng(91);
  // uniformity of constant images: every per-image ratio is 1
  bool unit_ratio = true;
  for (double c : {1e-6, 0.004, 0.0099}) {
    Tensor img(Shape{1, 16, 16});
    img.data().setConstant(c);
    unit_ratio = unit_ratio && uniformity(img) == 1.0;
  }
  Tensor stack(Shape{11, 16, 16});
  stack.data().setConstant(0.003);
  unit_ratio = unit_ratio && std::abs(uniformity(stack) - (1 + std::log(11.0))) < 1e-14;

  // efficiency strictly decreases as any pixel brightens
  bool monotone = true;
  const OpticsWorld world(OpticsShape::full(), 7);
  Vector x(177);
  for (Index j = 0; j < 177; ++j) x[j] = rng.uniform();
  Tensor img = synth_optics(x, world);
  const Matrix w = Matrix::Ones(16, 16);
  double prev = efficiency(img, w);
  for (int t = 0; t < 200; ++t) {
    img.data()[static_cast<Index>(rng.below(static_cast<std::uint64_t>(img.size())))] += 1e-5;
    const double now = efficiency(img, w);
    monotone = monotone && now < prev;
    prev = now;
  }

  // binomial_noise unbiased at 20 random pixels over 10^5 replicates
  const Tensor clean = synth_optics(x, world);
  double worst_z = 0;
  for (int p = 0; p < 20; ++p) {
    Tensor one(Shape{1, 1, 1});
    one.data()[0] = clean.data()[static_cast<Index>(rng.below(static_cast<std::uint64_t>(clean.size())))];
    const double prob = 100 * one.data()[0];
    double sum = 0;
    const int reps = 100000;
    for (int r = 0; r < reps; ++r) sum += binomial_noise(one, 5000, rng).data()[0];
    const double sd = std::sqrt(prob * (1 - prob) / 5000) / 100;
    worst_z = std::max(worst_z, std::abs(sum / reps - one.data()[0]) / (sd / std::sqrt(double(reps))));
  }

  // lse_aggregate against long-double evaluation
  double worst_lse = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(11);
    long double s = 0;
    for (double& e : v) {
      e = 10 * rng.normal();
      s += std::exp(static_cast<long double>(e));
    }
    worst_lse = std::max(worst_lse, std::abs(lse_aggregate(v) - static_cast<double>(std::log(s))));
  }
  const bool ok = unit_ratio && monotone && worst_z <= 4 && worst_lse <= 1e-6;
  return {ok, fmt("uniformity of constant images = 1: %s; efficiency strictly monotone: %s; binomial max |z| %.2f "
                  "(<= 4); lse max err %.1e (<= 1e-6)",
                  unit_ratio ? "yes" : "no", monotone ? "yes" : "no", worst_z, worst_lse)};
}

// ---------------------------------------------------------------- 10

Outcome fit_diagnostics() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto problem = problems::make_problem("optics_desk");
  const std::vector<ModelKind> models{ModelKind::hogp, ModelKind::scalar_gp};
  int hogp_better = 0;
  std::string ratios;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = harness::fit_report(problem, models, 200, 100, seed, FitConfig{});
    const double h = r.rmse(0, 1), g = r.rmse(1, 1);  // uniformity column
    hogp_better += h <= g ? 1 : 0;
    ratios += fmt("%s%.2f", seed ? " " : "", h / g);
  }
  return {hogp_better >= 7, fmt("HOGP uniformity RMSE <= GP's in %d/10 seeds (>= 7); hogp/gp ratios [%s]; %.0f s",
                                hogp_better, ratios.c_str(), seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Kronecker oracle suite", kronecker_oracles},
      {"Matheron correctness", matheron_correctness},
      {"batching fidelity", batching_fidelity},
      {"mixed precision and memory", mixed_precision},
      {"additive complexity", additive_complexity},
      {"environmental benchmark", environmental_benchmark},
      {"optics desk benchmark", optics_desk_benchmark},
      {"hypervolume exactness", hypervolume_exactness},
      {"metric suite", metric_suite},
      {"fit diagnostics", fit_diagnostics},
      {"determinism", determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: ktb_acceptance [criterion 1..11 ...]\n";
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  bool all = true;
  for (int n : selected) {
    const auto& [name, run] = criteria[static_cast<std::size_t>(n - 1)];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << n << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")"
              << std::endl;
  }
  return all ? 0 : 1;
}
