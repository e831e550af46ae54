#include "pinngen/diff_engine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace pinngen {
namespace {

using Matrix = Eigen::MatrixXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMajorMatrix>;
using ConstBias = Eigen::Map<const Eigen::VectorXd>;

// Jets of order K for a batch of M input points, laid out as matrices of
// shape (units, (K+1)*M): columns [k*M, (k+1)*M) hold the k-th derivative
// slot of every point.
template <int K>
class JetProgram {
 public:
  explicit JetProgram(const MlpArchitecture& arch) : arch_(&arch) {
    const std::size_t n_layers = arch.layers().size();
    inputs_.resize(n_layers);
    pre_.resize(n_layers);
  }

  std::size_t points() const { return points_; }
  const Matrix& output() const { return pre_.back(); }

  // Parameters and gradients go through owned, Eigen-aligned copies:
  // vectorized kernels peel differently depending on the address, and the
  // result must not depend on where the caller's buffer happens to live.
  void forward(std::span<const double> params_in, std::span<const double> xs) {
    params_ = Eigen::Map<const Eigen::VectorXd>(params_in.data(),
                                                static_cast<Eigen::Index>(params_in.size()));
    const std::span<const double> params(params_.data(), params_in.size());
    points_ = xs.size();
    const Eigen::Index m = static_cast<Eigen::Index>(points_);
    const Eigen::Index cols = (K + 1) * m;

    Matrix& seed = inputs_[0];
    seed.setZero(1, cols);
    for (Eigen::Index i = 0; i < m; ++i) seed(0, i) = xs[static_cast<std::size_t>(i)];
    if constexpr (K >= 1) seed.block(0, m, 1, m).setOnes();

    const auto& layers = arch_->layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const LayerShape& shape = layers[l];
      const ConstWeights w(params.data() + shape.offset, static_cast<Eigen::Index>(shape.fan_out),
                           static_cast<Eigen::Index>(shape.fan_in));
      const ConstBias b(params.data() + shape.bias_offset(),
                        static_cast<Eigen::Index>(shape.fan_out));
      pre_[l].noalias() = w * inputs_[l];
      pre_[l].leftCols(m).colwise() += b;
      if (l + 1 < layers.size()) tanh_forward(pre_[l], inputs_[l + 1]);
    }
  }

  // Reverse sweep. `d_out` is the adjoint of output() (1 x (K+1)M); the full
  // parameter gradient is written (not accumulated) into `grad`.
  void backward(const Matrix& d_out, std::span<double> grad_out) {
    const std::span<const double> params(params_.data(), static_cast<std::size_t>(params_.size()));
    grad_.resize(params_.size());
    const std::span<double> grad(grad_.data(), static_cast<std::size_t>(grad_.size()));
    const Eigen::Index m = static_cast<Eigen::Index>(points_);
    const auto& layers = arch_->layers();
    d_pre_ = d_out;
    for (std::size_t l = layers.size(); l-- > 0;) {
      const LayerShape& shape = layers[l];
      const auto fan_out = static_cast<Eigen::Index>(shape.fan_out);
      const auto fan_in = static_cast<Eigen::Index>(shape.fan_in);
      Eigen::Map<RowMajorMatrix> grad_w(grad.data() + shape.offset, fan_out, fan_in);
      Eigen::Map<Eigen::VectorXd> grad_b(grad.data() + shape.bias_offset(), fan_out);
      grad_w.noalias() = d_pre_ * inputs_[l].transpose();
      grad_b = d_pre_.leftCols(m).rowwise().sum();
      if (l == 0) break;
      const ConstWeights w(params.data() + shape.offset, fan_out, fan_in);
      d_in_.noalias() = w.transpose() * d_pre_;
      tanh_backward(pre_[l - 1], inputs_[l], d_in_, d_pre_);
    }
    std::copy(grad.begin(), grad.end(), grad_out.begin());
  }

 private:
  void tanh_forward(const Matrix& z, Matrix& a) const {
    const Eigen::Index rows = z.rows();
    const Eigen::Index m = static_cast<Eigen::Index>(points_);
    a.resize(rows, z.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
      const double* g[K + 1];
      double* h[K + 1];
      for (int k = 0; k <= K; ++k) {
        g[k] = z.col(k * m + i).data();
        h[k] = a.col(k * m + i).data();
      }
      for (Eigen::Index j = 0; j < rows; ++j) {
        const double t = std::tanh(g[0][j]);
        h[0][j] = t;
        if constexpr (K >= 1) {
          const double t2 = t * t;
          const double s1 = 1.0 - t2;
          const double g1 = g[1][j];
          h[1][j] = s1 * g1;
          if constexpr (K >= 2) {
            const double s2 = -2.0 * t * s1;
            const double g2 = g[2][j];
            const double g1sq = g1 * g1;
            h[2][j] = s1 * g2 + s2 * g1sq;
            if constexpr (K >= 3) {
              const double s3 = s1 * (6.0 * t2 - 2.0);
              const double g3 = g[3][j];
              h[3][j] = s1 * g3 + 3.0 * s2 * g1 * g2 + s3 * g1sq * g1;
              if constexpr (K >= 4) {
                const double s4 = s1 * (16.0 * t - 24.0 * t2 * t);
                const double g4 = g[4][j];
                h[4][j] = s1 * g4 + s2 * (4.0 * g1 * g3 + 3.0 * g2 * g2) +
                          6.0 * s3 * g1sq * g2 + s4 * g1sq * g1sq;
              }
            }
          }
        }
      }
    }
  }

  // Adjoint of tanh_forward: given adjoints `dh` of the activation jets,
  // produce adjoints `dg` of the pre-activation jets `z`. `a` holds t in
  // its value block.
  void tanh_backward(const Matrix& z, const Matrix& a, const Matrix& dh, Matrix& dg) const {
    const Eigen::Index rows = z.rows();
    const Eigen::Index m = static_cast<Eigen::Index>(points_);
    dg.resize(rows, z.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
      const double* g[K + 1];
      const double* hb[K + 1];
      double* gb[K + 1];
      for (int k = 0; k <= K; ++k) {
        g[k] = z.col(k * m + i).data();
        hb[k] = dh.col(k * m + i).data();
        gb[k] = dg.col(k * m + i).data();
      }
      const double* tcol = a.col(i).data();
      for (Eigen::Index j = 0; j < rows; ++j) {
        const double t = tcol[j];
        const double t2 = t * t;
        const double s1 = 1.0 - t2;
        const double s2 = -2.0 * t * s1;
        const double H0 = hb[0][j];
        if constexpr (K == 0) {
          gb[0][j] = H0 * s1;
        } else {
          const double g1 = g[1][j];
          const double H1 = hb[1][j];
          double G0 = H0 * s1 + H1 * s2 * g1;
          double G1 = H1 * s1;
          if constexpr (K >= 2) {
            const double s3 = s1 * (6.0 * t2 - 2.0);
            const double g2 = g[2][j];
            const double H2 = hb[2][j];
            const double g1sq = g1 * g1;
            G0 += H2 * (s2 * g2 + s3 * g1sq);
            G1 += H2 * 2.0 * s2 * g1;
            double G2 = H2 * s1;
            if constexpr (K >= 3) {
              const double s4 = s1 * (16.0 * t - 24.0 * t2 * t);
              const double g3 = g[3][j];
              const double H3 = hb[3][j];
              G0 += H3 * (s2 * g3 + 3.0 * s3 * g1 * g2 + s4 * g1sq * g1);
              G1 += H3 * (3.0 * s2 * g2 + 3.0 * s3 * g1sq);
              G2 += H3 * 3.0 * s2 * g1;
              double G3 = H3 * s1;
              if constexpr (K >= 4) {
                const double s5 = s1 * (16.0 - 120.0 * t2 + 120.0 * t2 * t2);
                const double g4 = g[4][j];
                const double H4 = hb[4][j];
                G0 += H4 * (s2 * g4 + s3 * (4.0 * g1 * g3 + 3.0 * g2 * g2) +
                            6.0 * s4 * g1sq * g2 + s5 * g1sq * g1sq);
                G1 += H4 * (4.0 * s2 * g3 + 12.0 * s3 * g1 * g2 + 4.0 * s4 * g1sq * g1);
                G2 += H4 * (6.0 * s2 * g2 + 6.0 * s3 * g1sq);
                G3 += H4 * 4.0 * s2 * g1;
                gb[4][j] = H4 * s1;
              }
              gb[3][j] = G3;
            }
            gb[2][j] = G2;
          }
          gb[0][j] = G0;
          gb[1][j] = G1;
        }
      }
    }
  }

  const MlpArchitecture* arch_;
  std::size_t points_ = 0;
  std::vector<Matrix> inputs_;  // inputs_[l]: jets entering layer l
  std::vector<Matrix> pre_;     // pre_[l]: affine output of layer l
  Matrix d_pre_;
  Matrix d_in_;
  Eigen::VectorXd params_;
  Eigen::VectorXd grad_;
};

constexpr std::size_t kBatchChunk = 512;

}  // namespace

struct PinnLossEvaluator::Impl {
  MlpArchitecture arch;
  std::vector<double> xs;      // collocation points, then boundary points
  std::vector<double> source;  // f at each collocation point
  std::vector<BoundaryPoint> boundary;
  std::size_t n_colloc = 0;
  LossOptions options;
  JetProgram<2> program;
  Matrix d_out;

  Impl(MlpArchitecture a, std::vector<double> colloc, std::vector<BoundaryPoint> bnd,
       LossOptions opts)
      : arch(std::move(a)), boundary(std::move(bnd)), n_colloc(colloc.size()), options(opts),
        program(arch) {
    if (colloc.empty()) throw ConfigError("PINN loss needs at least one collocation point");
    if (boundary.empty()) throw ConfigError("PINN loss needs at least one boundary point");
    xs = std::move(colloc);
    refresh_source();
    for (const BoundaryPoint& b : boundary) xs.push_back(b.x);
  }

  void refresh_source() {
    source.resize(n_colloc);
    for (std::size_t i = 0; i < n_colloc; ++i) source[i] = source_f(xs[i], options.n_modes);
  }

  double residual_scale() const {
    return options.reduction == LossReduction::mean ? 1.0 / static_cast<double>(n_colloc) : 1.0;
  }
  double boundary_scale() const {
    return options.reduction == LossReduction::mean ? 1.0 / static_cast<double>(boundary.size())
                                                    : 1.0;
  }

  // Runs the forward program and returns the loss.
  double forward(std::span<const double> params) {
    require_matching_params(arch, params.size());
    program.forward(params, xs);
    const Matrix& out = program.output();
    const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
    double residual_sum = 0.0;
    for (std::size_t i = 0; i < n_colloc; ++i) {
      const double r = out(0, 2 * m + static_cast<Eigen::Index>(i)) + source[i];
      residual_sum += r * r;
    }
    double boundary_sum = 0.0;
    for (std::size_t j = 0; j < boundary.size(); ++j) {
      const double e = out(0, static_cast<Eigen::Index>(n_colloc + j)) - boundary[j].u_b;
      boundary_sum += e * e;
    }
    return residual_scale() * residual_sum + boundary_scale() * boundary_sum;
  }

  double loss_and_grad(std::span<const double> params, std::span<double> grad) {
    if (grad.size() != arch.param_count()) {
      throw ContractViolation("gradient buffer length does not match the architecture");
    }
    const double loss = forward(params);
    const Matrix& out = program.output();
    const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
    d_out.setZero(1, out.cols());
    const double rs = 2.0 * residual_scale();
    for (std::size_t i = 0; i < n_colloc; ++i) {
      const Eigen::Index c = 2 * m + static_cast<Eigen::Index>(i);
      d_out(0, c) = rs * (out(0, c) + source[i]);
    }
    const double bs = 2.0 * boundary_scale();
    for (std::size_t j = 0; j < boundary.size(); ++j) {
      const Eigen::Index c = static_cast<Eigen::Index>(n_colloc + j);
      d_out(0, c) = bs * (out(0, c) - boundary[j].u_b);
    }
    program.backward(d_out, grad);
    return loss;
  }
};

PinnLossEvaluator::PinnLossEvaluator(MlpArchitecture arch, std::vector<double> collocation,
                                     std::vector<BoundaryPoint> boundary, LossOptions options)
    : impl_(std::make_unique<Impl>(std::move(arch), std::move(collocation), std::move(boundary),
                                   options)) {}

PinnLossEvaluator::~PinnLossEvaluator() = default;
PinnLossEvaluator::PinnLossEvaluator(PinnLossEvaluator&&) noexcept = default;
PinnLossEvaluator& PinnLossEvaluator::operator=(PinnLossEvaluator&&) noexcept = default;

const MlpArchitecture& PinnLossEvaluator::architecture() const { return impl_->arch; }

void PinnLossEvaluator::set_collocation(std::span<const double> points) {
  if (points.size() != impl_->n_colloc) {
    throw ContractViolation("set_collocation: point count changed");
  }
  std::copy(points.begin(), points.end(), impl_->xs.begin());
  impl_->refresh_source();
}

double PinnLossEvaluator::loss(std::span<const double> params) { return impl_->forward(params); }

double PinnLossEvaluator::loss_and_grad(std::span<const double> params, std::span<double> grad) {
  return impl_->loss_and_grad(params, grad);
}

LossAndGrad grad_pinn_loss(const MlpArchitecture& arch, const ParamVector& params,
                           const CollocationSet& colloc, std::span<const BoundaryPoint> boundary,
                           const LossOptions& options) {
  PinnLossEvaluator eval(arch, colloc.points, {boundary.begin(), boundary.end()}, options);
  LossAndGrad out;
  out.grad.resize(arch.param_count());
  out.loss = eval.loss_and_grad(params.span(), out.grad);
  return out;
}

double pinn_loss(const MlpArchitecture& arch, const ParamVector& params,
                 const CollocationSet& colloc, std::span<const BoundaryPoint> boundary,
                 const LossOptions& options) {
  PinnLossEvaluator eval(arch, colloc.points, {boundary.begin(), boundary.end()}, options);
  return eval.loss(params.span());
}

std::vector<double> mlp_forward_batch(const MlpArchitecture& arch, std::span<const double> params,
                                      std::span<const double> xs) {
  require_matching_params(arch, params.size());
  JetProgram<0> program(arch);
  std::vector<double> out;
  out.reserve(xs.size());
  for (std::size_t start = 0; start < xs.size(); start += kBatchChunk) {
    const auto chunk = xs.subspan(start, std::min(kBatchChunk, xs.size() - start));
    program.forward(params, chunk);
    const Matrix& o = program.output();
    for (Eigen::Index i = 0; i < o.cols(); ++i) out.push_back(o(0, i));
  }
  return out;
}

std::vector<Jet4> mlp_forward_jet_batch(const MlpArchitecture& arch,
                                        std::span<const double> params,
                                        std::span<const double> xs) {
  require_matching_params(arch, params.size());
  JetProgram<4> program(arch);
  std::vector<Jet4> out;
  out.reserve(xs.size());
  for (std::size_t start = 0; start < xs.size(); start += kBatchChunk) {
    const auto chunk = xs.subspan(start, std::min(kBatchChunk, xs.size() - start));
    program.forward(params, chunk);
    const Matrix& o = program.output();
    const Eigen::Index m = static_cast<Eigen::Index>(chunk.size());
    for (Eigen::Index i = 0; i < m; ++i) {
      out.push_back(Jet4{o(0, i), o(0, m + i), o(0, 2 * m + i), o(0, 3 * m + i), o(0, 4 * m + i)});
    }
  }
  return out;
}

}  // namespace pinngen
