#include "ktb/harness/fit_report.hpp"

#include <cmath>
#include <filesystem>

#include "ktb/errors.hpp"
#include "ktb/harness/runner.hpp"
#include "ktb/scalar_gp.hpp"
#include "ktb/sobol.hpp"

namespace ktb::harness {

std::string model_name(ModelKind kind) { return kind == ModelKind::hogp ? "hogp" : "gp"; }

FitReport fit_report(const CompositeProblem& problem, std::span<const ModelKind> models, Index n_train, Index n_test,
                     std::uint64_t seed, const FitConfig& fit) {
  if (n_train < 2 || n_test < 2) throw InvalidInputError("fit_report: n_train and n_test must be >= 2");
  if (models.empty()) throw InvalidInputError("fit_report: no models");
  const Index o = problem.n_objectives;
  Rng design_rng = Rng::stream(seed, 1);
  const Matrix x = scrambled_sobol(n_train + n_test, problem.dim, design_rng);

  std::vector<Tensor> outputs;
  Matrix f(n_train + n_test, o);
  for (Index i = 0; i < x.rows(); ++i) {
    Rng rng = Rng::stream(seed, 2, static_cast<std::uint64_t>(i));
    outputs.push_back(problem.simulate(x.row(i).transpose(), rng));
    f.row(i) = problem.metrics(outputs.back()).transpose();
  }
  const Matrix x_train = x.topRows(n_train);
  const Matrix x_test = x.bottomRows(n_test);

  FitReport report;
  report.models.assign(models.begin(), models.end());
  report.actual = f.bottomRows(n_test);
  report.rmse.resize(static_cast<Index>(models.size()), o);
  FitConfig cfg = fit;
  cfg.seed = mix64(seed ^ 0x66697452ull);

  for (std::size_t k = 0; k < models.size(); ++k) {
    Matrix pred(n_test, o);
    if (models[k] == ModelKind::hogp) {
      const Tensor y = stack(std::span<const Tensor>(outputs.data(), static_cast<std::size_t>(n_train)));
      const HogpModel model = fit_hogp(x_train, y, cfg);
      const Tensor mean = hogp_posterior_mean(model, x_test);
      for (Index i = 0; i < n_test; ++i) pred.row(i) = problem.metrics(mean.slice(i)).transpose();
    } else {
      for (Index j = 0; j < o; ++j) {
        const ScalarGpModel model = fit_scalar_gp(x_train, f.col(j).head(n_train), cfg);
        pred.col(j) = model.posterior_mean(x_test);
      }
    }
    for (Index j = 0; j < o; ++j) {
      report.rmse(static_cast<Index>(k), j) = std::sqrt((pred.col(j) - report.actual.col(j)).squaredNorm() /
                                                        static_cast<double>(n_test));
    }
    report.predicted.push_back(std::move(pred));
  }
  return report;
}

void write_fit_report(const FitReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  char buf[160];
  std::string pred = "model,point,metric,predicted,actual\n";
  std::string rmse = "model,metric,rmse\n";
  for (std::size_t k = 0; k < report.models.size(); ++k) {
    const std::string name = model_name(report.models[k]);
    const Matrix& p = report.predicted[k];
    for (Index i = 0; i < p.rows(); ++i) {
      for (Index j = 0; j < p.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%s,%lld,%lld,%.17g,%.17g\n", name.c_str(), static_cast<long long>(i),
                      static_cast<long long>(j + 1), p(i, j), report.actual(i, j));
        pred += buf;
      }
    }
    for (Index j = 0; j < p.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%s,%lld,%.17g\n", name.c_str(), static_cast<long long>(j + 1),
                    report.rmse(static_cast<Index>(k), j));
      rmse += buf;
    }
  }
  write_atomic(dir / "fit_predictions.csv", pred);
  write_atomic(dir / "fit_rmse.csv", rmse);
}

}  // namespace ktb::harness
