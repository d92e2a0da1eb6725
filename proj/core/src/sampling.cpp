#include "ktb/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "ktb/errors.hpp"
#include "ktb/kernels.hpp"
#include "ktb/linalg.hpp"
#include "ktb/memory.hpp"

namespace ktb {
namespace {

std::size_t bytes_of(Index doubles) { return static_cast<std::size_t>(doubles) * sizeof(double); }

Vector apply(std::span<const Matrix> factors, const Vector& v, Precision precision) {
  return precision == Precision::mixed16 ? reduced_precision_apply(factors, v) : kron_apply(factors, v);
}

// A Kronecker operator applied many times at one precision; the half
// quantization happens once.
class Operator {
 public:
  Operator(std::vector<Matrix> factors, Precision precision) : factors_(std::move(factors)), precision_(precision) {
    if (precision_ == Precision::mixed16) half_ = quantize_factors(factors_);
  }
  Vector operator()(const Vector& v) const {
    return precision_ == Precision::mixed16 ? reduced_precision_apply(half_, v) : kron_apply(factors_, v);
  }
  Index input_size() const {
    Index n = 1;
    for (const auto& f : factors_) n *= f.cols();
    return n;
  }

 private:
  std::vector<Matrix> factors_;
  Precision precision_;
  HalfKronFactors half_;
};

void validate(const HogpModel& model, const SampleRequest& req) {
  if (req.x_test.rows() < 1) throw InvalidInputError("sampling: no test points");
  if (req.x_test.cols() != model.input_dim()) throw DimensionError("sampling: test input dimension mismatch");
  if (!req.x_test.allFinite()) throw InvalidInputError("sampling: non-finite test inputs");
  if (req.n_samples < 1) throw InvalidInputError("sampling: n_samples must be >= 1");
  if (req.batch_size < 1) throw InvalidInputError("sampling: batch_size must be >= 1");
}

// Roots of the joint input kernel over [x_test; X] and of every latent
// factor, plus the cross-covariance operator in the training eigenbasis,
// K_{*X}Q_1 ⊗ Q_2Λ_2 ⊗ …, which maps diag(1/(λ+σ²))(⊗Q)ᵀr straight to the
// update. Applying K_{*X} ⊗ K_2 ⊗ … to the solved vector instead cancels
// large terms and loses most of the half-precision accuracy.
struct JointFactors {
  std::vector<Matrix> roots;
  std::vector<Matrix> cross;
};

double clamp_eig(double lambda) { return lambda < kEigClamp ? 0.0 : lambda; }

JointFactors joint_factors(const HogpModel& model, const Matrix& x_test) {
  const Index m = x_test.rows();
  const Index n = model.num_train();
  Matrix stacked(m + n, model.input_dim());
  stacked << x_test, model.train_x();

  const Index joint = m + n;
  memory::ScopedBytes tracked(bytes_of(3 * joint * joint));  // Gram, eigenvectors, root
  const Matrix k_joint = matern52_gram(stacked, model.hyper());

  JointFactors out;
  out.roots.reserve(model.factors().size());
  out.roots.push_back(matrix_root(sym_eig(SymMatrix(k_joint))));
  for (std::size_t j = 1; j < model.eigs().size(); ++j) out.roots.push_back(matrix_root(model.eigs()[j]));

  out.cross.push_back(k_joint.topRightCorner(m, n) * model.eigs().front().q);
  for (std::size_t j = 1; j < model.eigs().size(); ++j) {
    const EigenPair& e = model.eigs()[j];
    out.cross.push_back(e.q * e.lambda.unaryExpr(&clamp_eig).asDiagonal());
  }
  return out;
}

JointPriorDraw draw_prior(const Operator& root, Index m, Index p, Rng& rng) {
  const Index len = root.input_size();
  memory::ScopedBytes tracked(bytes_of(len));
  const Vector f = root(rng.normal_vector(len));
  JointPriorDraw out;
  out.f_test = f.head(m * p);
  out.f_train = f.tail(f.size() - m * p);
  return out;
}

// Writes k samples for the test block into rows [offset, offset+m) of the
// output tensor.
void sample_block(const HogpModel& model, const Matrix& x_block, const SampleRequest& req, std::uint64_t batch_index,
                  Index offset, Index total_points, Vector& out) {
  const Index m = x_block.rows();
  const Index n = model.num_train();
  const Index p = model.output_size();
  JointFactors jf = joint_factors(model, x_block);
  const Operator root(std::move(jf.roots), req.precision);
  const Operator cross(std::move(jf.cross), req.precision);
  const double noise_sd = std::sqrt(model.noise_sigma2());
  const double scale = model.scaling().scale;
  const double mean = model.scaling().mean;

  std::vector<Matrix> to_eigenbasis;
  std::vector<Vector> lams;
  for (const auto& e : model.eigs()) {
    to_eigenbasis.push_back(e.q.transpose());
    lams.push_back(e.lambda);
  }
  Vector inv_den = kron_joint_eigenvalues(lams).array() + model.noise_sigma2();
  if (!(inv_den.array() > 0.0).all()) throw SingularityError("sampling: singular training covariance");
  inv_den = inv_den.cwiseInverse();

  for (Index s = 0; s < req.n_samples; ++s) {
    Rng rng = Rng::stream(req.seed, batch_index, static_cast<std::uint64_t>(s));
    memory::ScopedBytes tracked(bytes_of((m + n) * p + 3 * n * p + m * p));
    const JointPriorDraw prior = draw_prior(root, m, p, rng);
    Vector residual = model.standardized_y() - prior.f_train;
    for (Index i = 0; i < residual.size(); ++i) residual[i] -= noise_sd * rng.normal();
    const Vector gamma = kron_apply(to_eigenbasis, residual).cwiseProduct(inv_den);
    const Vector update = cross(gamma);
    const Index base = (s * total_points + offset) * p;
    out.segment(base, m * p) = ((prior.f_test + update).array() * scale + mean).matrix();
  }
}

Shape sample_shape(const HogpModel& model, Index k, Index m) {
  Shape shape{k, m};
  const Shape modes = model.output_shape();
  shape.insert(shape.end(), modes.begin(), modes.end());
  return shape;
}

}  // namespace

Tensor PosteriorSamples::at(Index s, Index i) const {
  const Shape& full = values.shape();
  Shape shape(full.begin() + 2, full.end());
  if (shape.empty()) shape = {1};
  const Index len = shape_size(shape);
  const Index offset = (s * num_points() + i) * len;
  return Tensor(std::move(shape), values.data().segment(offset, len));
}

Vector kron_root_sample(std::span<const Matrix> roots, Rng& rng, Precision precision) {
  Index len = 1;
  for (const auto& r : roots) len *= r.cols();
  memory::ScopedBytes tracked(bytes_of(len));
  const Vector z = rng.normal_vector(len);
  return apply(roots, z, precision);
}

JointPriorDraw joint_prior_sample(const HogpModel& model, const Matrix& x_test, Rng& rng, Precision precision) {
  if (x_test.rows() < 1) throw InvalidInputError("joint_prior_sample: no test points");
  if (x_test.cols() != model.input_dim()) throw DimensionError("joint_prior_sample: dimension mismatch");
  JointFactors jf = joint_factors(model, x_test);
  return draw_prior(Operator(std::move(jf.roots), precision), x_test.rows(), model.output_size(), rng);
}

PosteriorSamples matheron_sample(const HogpModel& model, const SampleRequest& request) {
  validate(model, request);
  const Index m = request.x_test.rows();
  Vector out(request.n_samples * m * model.output_size());
  sample_block(model, request.x_test, request, 0, 0, m, out);
  return PosteriorSamples{Tensor(sample_shape(model, request.n_samples, m), std::move(out))};
}

PosteriorSamples batched_matheron_sample(const HogpModel& model, const SampleRequest& request) {
  validate(model, request);
  const Index m = request.x_test.rows();
  const Index nb = request.batch_size;
  Vector out(request.n_samples * m * model.output_size());
  std::uint64_t batch = 0;
  for (Index begin = 0; begin < m; begin += nb, ++batch) {
    const Index count = std::min(nb, m - begin);
    sample_block(model, request.x_test.middleRows(begin, count), request, batch, begin, m, out);
  }
  return PosteriorSamples{Tensor(sample_shape(model, request.n_samples, m), std::move(out))};
}

}  // namespace ktb
