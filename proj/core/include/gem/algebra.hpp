#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ordered list of SO(2) irrep orders; each entry is one irrep copy and the
/// coefficient layout is the concatenation of the blocks in list order.
class ReprType {
 public:
  ReprType() = default;
  ReprType(std::initializer_list<int> orders);
  explicit ReprType(std::vector<int> orders);

  /// `copies` repetitions of the orders 0..band_limit.
  static ReprType regular(int copies, int band_limit);
  /// `copies` scalar channels.
  static ReprType scalars(int copies) { return regular(copies, 0); }

  const std::vector<int>& orders() const { return orders_; }
  std::size_t size() const { return orders_.size(); }
  int order(std::size_t i) const { return orders_[i]; }
  /// Offset of entry i in the coefficient vector.
  int offset(std::size_t i) const { return offsets_[i]; }
  int dim() const { return dim_; }
  bool all_scalar() const;

  bool operator==(const ReprType& other) const { return orders_ == other.orders_; }
  std::string to_string() const;

 private:
  std::vector<int> orders_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

inline int irrep_dim(int order) { return order == 0 ? 1 : 2; }

/// rho_n(g): [1] for n = 0, rotation by n*g otherwise.
Matrix irrep(int order, double angle);

/// Block-diagonal direct sum of irreps in layout order.
Matrix rep(const ReprType& type, double angle);

/// In-place x <- rep(type, angle) x, without forming the matrix.
void apply_rep(const ReprType& type, double angle, Eigen::Ref<Vector> x);

/// One analytic solution of the neighbour-kernel constraint for input order
/// n and output order m, numbered left to right as in the solution table.
struct NeighborBasisElement {
  int in_order;
  int out_order;
  int index;
  Matrix operator()(double theta) const;
};

std::vector<NeighborBasisElement> basis_neigh(int in_order, int out_order);

/// Constant self-interaction solutions: {[1]} for (0,0),
/// {I, [[0,1],[-1,0]]} for (n,n), n > 0, and none otherwise.
std::vector<Matrix> basis_self(int in_order, int out_order);

int neigh_basis_count(int in_order, int out_order);
int self_basis_count(int in_order, int out_order);

/// Kernel space found numerically: solutions of the sampled constraint on a
/// truncated Fourier ansatz K(theta) = A_0 + sum_k A_k cos(k theta) + B_k sin(k theta),
/// k <= max_frequency. Each basis vector holds the coefficient matrices
/// [A_0, A_1, B_1, ...] flattened column-major.
struct NumericKernelBasis {
  int in_order = 0;
  int out_order = 0;
  int max_frequency = 0;
  std::vector<Vector> coefficients;

  std::size_t size() const { return coefficients.size(); }
  Matrix evaluate(std::size_t index, double theta) const;
};

/// Null space of the constraint K(theta - g) = rho_m(-g) K(theta) rho_n(g)
/// sampled at `samples` (theta, g) pairs, singular-value cutoff relative
/// 1e-10. Throws InvalidArgument when samples < 8 or when the recovered
/// functions fail the constraint at independent check points.
NumericKernelBasis numeric_kernel_basis(int in_order, int out_order, int samples);

/// Largest residual of projecting each set onto the span of the other,
/// with both sets of matrix-valued functions sampled on `grid` angles.
double span_residual(const std::vector<NeighborBasisElement>& analytic, const NumericKernelBasis& numeric,
                     int grid = 64);

struct ParamCount {
  int n_self = 0;
  int n_neigh = 0;
  int total() const { return n_self + n_neigh; }
  bool operator==(const ParamCount&) const = default;
};

ParamCount param_count(const ReprType& type_in, const ReprType& type_out);

struct LayerWeights {
  ReprType type_in;
  ReprType type_out;
  Vector w_self;
  Vector w_neigh;

  /// Throws InvalidArgument unless the lengths match param_count.
  void check() const;
};

/// Uniform on [-s, s] with s = 1 / sqrt(fan-in), where fan-in counts the
/// basis kernels (self + neighbour) feeding the output irrep a weight
/// belongs to.
LayerWeights init_weights(const ReprType& type_in, const ReprType& type_out, std::uint64_t seed);

/// Dense K_self and K_neigh(theta), dim(out) x dim(in). Weights are consumed
/// in lexicographic (output entry, input entry, basis index) order.
struct KernelPair {
  Matrix self;
  Matrix neigh;
};

KernelPair assemble_kernels(const LayerWeights& weights, double theta);

}  // namespace gem
