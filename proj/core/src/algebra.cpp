#include "gem/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "gem/error.hpp"
#include "gem/numeric.hpp"
#include "gem/random.hpp"

namespace gem {

ReprType::ReprType(std::initializer_list<int> orders) : ReprType(std::vector<int>(orders)) {}

ReprType::ReprType(std::vector<int> orders) : orders_(std::move(orders)) {
  offsets_.reserve(orders_.size());
  for (int o : orders_) {
    if (o < 0) throw InvalidArgument("irrep order must be non-negative, got " + std::to_string(o));
    offsets_.push_back(dim_);
    dim_ += irrep_dim(o);
  }
}

ReprType ReprType::regular(int copies, int band_limit) {
  if (copies < 0 || band_limit < 0) throw InvalidArgument("regular type needs non-negative copies and band limit");
  std::vector<int> orders;
  for (int c = 0; c < copies; ++c)
    for (int k = 0; k <= band_limit; ++k) orders.push_back(k);
  return ReprType(std::move(orders));
}

bool ReprType::all_scalar() const {
  return std::all_of(orders_.begin(), orders_.end(), [](int o) { return o == 0; });
}

std::string ReprType::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < orders_.size(); ++i) s += (i ? "," : "") + std::to_string(orders_[i]);
  return s + "]";
}

Matrix irrep(int order, double angle) {
  if (order < 0) throw InvalidArgument("irrep order must be non-negative");
  if (order == 0) return Matrix::Ones(1, 1);
  const double c = std::cos(order * angle), s = std::sin(order * angle);
  Matrix r(2, 2);
  r << c, -s, s, c;
  return r;
}

Matrix rep(const ReprType& type, double angle) {
  Matrix out = Matrix::Zero(type.dim(), type.dim());
  for (std::size_t i = 0; i < type.size(); ++i) {
    const int d = irrep_dim(type.order(i));
    out.block(type.offset(i), type.offset(i), d, d) = irrep(type.order(i), angle);
  }
  return out;
}

void apply_rep(const ReprType& type, double angle, Eigen::Ref<Vector> x) {
  for (std::size_t i = 0; i < type.size(); ++i) {
    const int n = type.order(i);
    if (n == 0) continue;
    const int o = type.offset(i);
    const double c = std::cos(n * angle), s = std::sin(n * angle);
    const double a = x[o], b = x[o + 1];
    x[o] = c * a - s * b;
    x[o + 1] = s * a + c * b;
  }
}

int neigh_basis_count(int n, int m) {
  if (n == 0 && m == 0) return 1;
  if (n == 0 || m == 0) return 2;
  return 4;
}

int self_basis_count(int n, int m) {
  if (n != m) return 0;
  return n == 0 ? 1 : 2;
}

Matrix NeighborBasisElement::operator()(double theta) const {
  const int n = in_order, m = out_order;
  if (n == 0 && m == 0) return Matrix::Ones(1, 1);
  if (m == 0) {
    const double c = std::cos(n * theta), s = std::sin(n * theta);
    Matrix k(1, 2);
    if (index == 0) k << c, s;
    else k << s, -c;
    return k;
  }
  if (n == 0) {
    const double c = std::cos(m * theta), s = std::sin(m * theta);
    Matrix k(2, 1);
    if (index == 0) k << c, s;
    else k << s, -c;
    return k;
  }
  Matrix k(2, 2);
  if (index < 2) {
    const double c = std::cos((m - n) * theta), s = std::sin((m - n) * theta);
    if (index == 0) k << c, -s, s, c;
    else k << s, c, -c, s;
  } else {
    const double c = std::cos((m + n) * theta), s = std::sin((m + n) * theta);
    if (index == 2) k << c, s, s, -c;
    else k << -s, c, c, s;
  }
  return k;
}

std::vector<NeighborBasisElement> basis_neigh(int in_order, int out_order) {
  if (in_order < 0 || out_order < 0) throw InvalidArgument("irrep order must be non-negative");
  std::vector<NeighborBasisElement> out;
  for (int i = 0; i < neigh_basis_count(in_order, out_order); ++i) out.push_back({in_order, out_order, i});
  return out;
}

std::vector<Matrix> basis_self(int in_order, int out_order) {
  if (in_order < 0 || out_order < 0) throw InvalidArgument("irrep order must be non-negative");
  std::vector<Matrix> out;
  if (in_order != out_order) return out;
  if (in_order == 0) {
    out.push_back(Matrix::Ones(1, 1));
    return out;
  }
  out.push_back(Matrix::Identity(2, 2));
  Matrix j(2, 2);
  j << 0, 1, -1, 0;
  out.push_back(j);
  return out;
}

namespace {

// Ansatz term t: 1, cos(theta), sin(theta), cos(2 theta), ...
double ansatz_term(int t, double theta) {
  if (t == 0) return 1.0;
  const int k = (t + 1) / 2;
  return (t % 2 == 1) ? std::cos(k * theta) : std::sin(k * theta);
}

// Low-discrepancy (theta, g) pairs; `phase` separates the fitting set from
// the check set.
std::pair<double, double> sample_pair(int s, double phase) {
  constexpr double a1 = 0.7548776662466927;  // 1/plastic number
  constexpr double a2 = 0.5698402909980532;  // 1/plastic number^2
  const double u = std::fmod(phase + a1 * (s + 1), 1.0);
  const double v = std::fmod(0.5 * phase + a2 * (s + 1), 1.0);
  return {kTwoPi * u, kTwoPi * v};
}

Matrix ansatz_eval(const Vector& coeffs, int dm, int dn, int terms, double theta) {
  Matrix k = Matrix::Zero(dm, dn);
  for (int t = 0; t < terms; ++t)
    k += ansatz_term(t, theta) * Eigen::Map<const Matrix>(coeffs.data() + t * dm * dn, dm, dn);
  return k;
}

}  // namespace

Matrix NumericKernelBasis::evaluate(std::size_t index, double theta) const {
  return ansatz_eval(coefficients.at(index), irrep_dim(out_order), irrep_dim(in_order), 2 * max_frequency + 1,
                     theta);
}

NumericKernelBasis numeric_kernel_basis(int n, int m, int samples) {
  if (n < 0 || m < 0) throw InvalidArgument("irrep order must be non-negative");
  if (samples < 8) throw InvalidArgument("numeric_kernel_basis: at least 8 samples required");
  const int dm = irrep_dim(m), dn = irrep_dim(n);
  const int freq = n + m;
  const int terms = 2 * freq + 1;
  const int block = dm * dn;
  const int unknowns = terms * block;

  Matrix system = Matrix::Zero(static_cast<Eigen::Index>(samples) * block, unknowns);
  for (int s = 0; s < samples; ++s) {
    const auto [theta, g] = sample_pair(s, 0.0);
    const Matrix left = irrep(m, -g);
    const Matrix right = irrep(n, g);
    for (int r = 0; r < dm; ++r)
      for (int c = 0; c < dn; ++c) {
        const Eigen::Index row = static_cast<Eigen::Index>(s) * block + c * dm + r;
        for (int t = 0; t < terms; ++t) {
          const double shifted = ansatz_term(t, theta - g);
          const double plain = ansatz_term(t, theta);
          system(row, t * block + c * dm + r) += shifted;
          for (int a = 0; a < dm; ++a)
            for (int b = 0; b < dn; ++b) system(row, t * block + b * dm + a) -= plain * left(r, a) * right(b, c);
        }
      }
  }

  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol::kNullSpace * std::max(1.0, sv.size() ? sv[0] : 1.0);
  NumericKernelBasis basis{n, m, freq, {}};
  for (int col = 0; col < unknowns; ++col) {
    const bool null = col >= sv.size() || sv[col] <= cutoff;
    if (null) basis.coefficients.push_back(svd.matrixV().col(col));
  }

  // Every recovered function must satisfy the constraint away from the
  // fitting samples; otherwise the sampling did not pin down the space.
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (int s = 0; s < 32; ++s) {
      const auto [theta, g] = sample_pair(s, 0.37);
      const Matrix lhs = basis.evaluate(i, theta - g);
      const Matrix rhs = irrep(m, -g) * basis.evaluate(i, theta) * irrep(n, g);
      if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-8)
        throw InvalidArgument("numeric_kernel_basis: sampling is rank deficient for (" + std::to_string(n) + ", " +
                              std::to_string(m) + "); increase samples");
    }
  return basis;
}

double span_residual(const std::vector<NeighborBasisElement>& analytic, const NumericKernelBasis& numeric,
                     int grid) {
  if (analytic.empty() && numeric.size() == 0) return 0.0;
  if (analytic.empty() || numeric.size() == 0) return 1.0;
  const int dm = irrep_dim(numeric.out_order), dn = irrep_dim(numeric.in_order);
  const Eigen::Index len = static_cast<Eigen::Index>(grid) * dm * dn;
  auto sample = [&](auto&& fn, std::size_t count) {
    Matrix cols(len, static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i)
      for (int k = 0; k < grid; ++k) {
        const double theta = kTwoPi * k / grid + 0.1234;
        const Matrix v = fn(i, theta);
        cols.block(static_cast<Eigen::Index>(k) * dm * dn, static_cast<Eigen::Index>(i), dm * dn, 1) =
            Eigen::Map<const Vector>(v.data(), dm * dn);
      }
    return cols;
  };
  const Matrix a = sample([&](std::size_t i, double t) { return analytic[i](t); }, analytic.size());
  const Matrix b = sample([&](std::size_t i, double t) { return numeric.evaluate(i, t); }, numeric.size());

  auto orthonormal = [](const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-10 * sv[0]) ++rank;
    return Matrix(svd.matrixU().leftCols(rank));
  };
  const Matrix qa = orthonormal(a);
  const Matrix qb = orthonormal(b);
  auto residual = [](const Matrix& q, const Matrix& cols) {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
      const Vector v = cols.col(c).normalized();
      worst = std::max(worst, (v - q * (q.transpose() * v)).norm());
    }
    return worst;
  };
  return std::max(residual(qa, b), residual(qb, a));
}

ParamCount param_count(const ReprType& type_in, const ReprType& type_out) {
  ParamCount count;
  for (int m : type_out.orders())
    for (int n : type_in.orders()) {
      count.n_self += self_basis_count(n, m);
      count.n_neigh += neigh_basis_count(n, m);
    }
  return count;
}

void LayerWeights::check() const {
  const ParamCount expected = param_count(type_in, type_out);
  if (w_self.size() != expected.n_self || w_neigh.size() != expected.n_neigh)
    throw InvalidArgument("layer weights " + type_in.to_string() + "->" + type_out.to_string() + ": expected (" +
                          std::to_string(expected.n_self) + ", " + std::to_string(expected.n_neigh) +
                          ") weights, got (" + std::to_string(w_self.size()) + ", " +
                          std::to_string(w_neigh.size()) + ")");
}

LayerWeights init_weights(const ReprType& type_in, const ReprType& type_out, std::uint64_t seed) {
  const ParamCount count = param_count(type_in, type_out);
  LayerWeights w{type_in, type_out, Vector(count.n_self), Vector(count.n_neigh)};
  Rng rng(seed);
  auto fill = [&](Vector& target, bool self) {
    Eigen::Index k = 0;
    for (int m : type_out.orders()) {
      int fan_in = 0;
      for (int n : type_in.orders()) fan_in += self_basis_count(n, m) + neigh_basis_count(n, m);
      const double s = 1.0 / std::sqrt(static_cast<double>(std::max(1, fan_in)));
      for (int n : type_in.orders()) {
        const int c = self ? self_basis_count(n, m) : neigh_basis_count(n, m);
        for (int b = 0; b < c; ++b) target[k++] = rng.uniform(-s, s);
      }
    }
  };
  fill(w.w_self, true);
  fill(w.w_neigh, false);
  return w;
}

KernelPair assemble_kernels(const LayerWeights& weights, double theta) {
  weights.check();
  const ReprType& in = weights.type_in;
  const ReprType& out = weights.type_out;
  KernelPair k{Matrix::Zero(out.dim(), in.dim()), Matrix::Zero(out.dim(), in.dim())};
  Eigen::Index ws = 0, wn = 0;
  for (std::size_t j = 0; j < out.size(); ++j)
    for (std::size_t i = 0; i < in.size(); ++i) {
      const int n = in.order(i), m = out.order(j);
      auto self_block = k.self.block(out.offset(j), in.offset(i), irrep_dim(m), irrep_dim(n));
      for (const Matrix& b : basis_self(n, m)) self_block += weights.w_self[ws++] * b;
      auto neigh_block = k.neigh.block(out.offset(j), in.offset(i), irrep_dim(m), irrep_dim(n));
      for (const auto& b : basis_neigh(n, m)) neigh_block += weights.w_neigh[wn++] * b(theta);
    }
  return k;
}

}  // namespace gem
