#include "ktb/scalar_gp.hpp"

#include "ktb/errors.hpp"

namespace ktb {

ScalarGpModel::ScalarGpModel(Matrix train_x, Vector train_y, InputKernelHyper hyper, double noise_sigma2,
                             OutputScaling scaling)
    : model_([&] {
        const Index n = train_y.size();
        return HogpModel(std::move(train_x), Tensor(Shape{n}, std::move(train_y)), std::move(hyper), {},
                         noise_sigma2, scaling);
      }()) {}

ScalarGpModel::ScalarGpModel(HogpModel model) : model_(std::move(model)) {
  if (model_.joint_shape().size() != 1) throw DimensionError("ScalarGpModel: model has output modes");
}

Vector ScalarGpModel::posterior_mean(const Matrix& x_test) const { return hogp_posterior_mean(model_, x_test).data(); }

Vector ScalarGpModel::posterior_variance(const Matrix& x_test) const {
  const EigenPair& e = model_.eigs().front();
  const Matrix u = e.q.transpose() * model_.cross_kernel(x_test).transpose();  // n × m
  Vector inv = Vector(e.lambda.size());
  for (Index i = 0; i < inv.size(); ++i) {
    const double lam = e.lambda[i] < kEigClamp ? 0.0 : e.lambda[i];
    const double den = lam + model_.noise_sigma2();
    if (!(den > 0.0)) throw SingularityError("ScalarGpModel: singular covariance");
    inv[i] = 1.0 / den;
  }
  const Vector reduction = (u.cwiseAbs2().transpose() * inv);
  const double s2 = model_.scaling().scale * model_.scaling().scale;
  return ((model_.hyper().outputscale - reduction.array()).max(0.0) * s2).matrix();
}

ScalarGpModel fit_scalar_gp(const Matrix& train_x, const Vector& train_y, const FitConfig& config,
                            const std::optional<Vector>& warm_start) {
  return ScalarGpModel(fit_hogp(train_x, Tensor(Shape{train_y.size()}, train_y), config, warm_start));
}

}  // namespace ktb
