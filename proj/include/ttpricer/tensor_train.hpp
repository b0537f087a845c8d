#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ttpricer/errors.hpp"

namespace ttp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using IndexVec = std::vector<std::int64_t>;

// One 3-way core (left bond, physical, right bond), kept as one left x right
// matrix per physical index.
using Core = std::vector<Matrix>;

// One 4-way operator core: slices[j][k] is the left x right matrix for the
// physical pair (j, k).
using OpCore = std::vector<std::vector<Matrix>>;

struct DenseTensor {
  std::vector<Eigen::Index> dims;
  std::vector<Complex> data;  // row-major, last index fastest

  std::size_t size() const { return data.size(); }
  std::size_t flat_index(const IndexVec& index) const;
  Complex at(const IndexVec& index) const { return data[flat_index(index)]; }
};

// Chain of 3-way complex cores with matching bond dimensions and boundary
// bonds of size 1. Immutable after construction; cheap to copy around by
// value (Eigen matrices own their storage).
class TensorTrain {
public:
  TensorTrain() = default;
  explicit TensorTrain(std::vector<Core> cores);

  bool empty() const { return cores_.empty(); }
  int size() const { return static_cast<int>(cores_.size()); }
  const Core& core(int site) const { return cores_[site]; }
  const Matrix& slice(int site, Eigen::Index x) const { return cores_[site][x]; }

  Eigen::Index local_dim(int site) const {
    return static_cast<Eigen::Index>(cores_[site].size());
  }
  std::vector<Eigen::Index> local_dims() const;

  // bond b sits between sites b-1 and b; bond 0 and bond size() are the
  // trivial boundary bonds.
  Eigen::Index bond_dim(int bond) const;
  // Interior bonds chi_1..chi_{d-1}.
  std::vector<Eigen::Index> bond_dims() const;
  Eigen::Index max_bond_dim() const;

  std::size_t dense_size() const;

private:
  std::vector<Core> cores_;
};

// Chain of 4-way cores (two physical legs per site).
class TensorTrainOperator {
public:
  TensorTrainOperator() = default;
  explicit TensorTrainOperator(std::vector<OpCore> cores);

  bool empty() const { return cores_.empty(); }
  int size() const { return static_cast<int>(cores_.size()); }
  const OpCore& core(int site) const { return cores_[site]; }

  Eigen::Index dim_j(int site) const {
    return static_cast<Eigen::Index>(cores_[site].size());
  }
  Eigen::Index dim_k(int site) const {
    return static_cast<Eigen::Index>(cores_[site][0].size());
  }
  Eigen::Index bond_dim(int bond) const;
  std::vector<Eigen::Index> bond_dims() const;
  Eigen::Index max_bond_dim() const;

private:
  std::vector<OpCore> cores_;
};

struct EvalResult {
  Complex value;
  std::uint64_t mult_count;  // scalar multiplications in the chain product
};

struct TruncationReport {
  std::vector<Eigen::Index> kept_ranks;   // per interior bond
  std::vector<double> discarded_weight;   // per interior bond, sum of cut sigma^2
  double norm2 = 0.0;                     // squared Frobenius norm of the input
  double achieved_rel_error = 0.0;        // sum(discarded) / norm2
};

struct CanonicalizeReport {
  int pivoted_qr_count = 0;  // bonds where the column-pivoted fallback kicked in
};

enum class Direction { Left, Right };

// Chain product of the selected core slices, starting from the scalar unit.
// mult_count meters the scalar multiplications actually performed, i.e.
// sum over sites of chi_{i-1} * chi_i.
EvalResult evaluate(const TensorTrain& tt, const IndexVec& index);

// Full expansion; refuses above entry_cap entries. Test oracle, not for
// production grids.
DenseTensor to_dense(const TensorTrain& tt, std::size_t entry_cap = 10'000'000);

// Expansion of an operator over legs ordered (j_1, k_1, ..., j_d, k_d), the
// same ordering pair_merge consumes.
DenseTensor to_dense(const TensorTrainOperator& tto, std::size_t entry_cap = 10'000'000);

// QR sweep making every core but the last in sweep direction an isometry.
// Direction::Left gives left-isometries sweeping towards the last site.
TensorTrain canonicalize(const TensorTrain& tt, Direction direction,
                         CanonicalizeReport* report = nullptr);

// SVD compression with a global relative squared-Frobenius tolerance,
// budgeted evenly across the d-1 interior bonds. The input is
// right-canonicalized internally so the per-bond cuts are orthogonal and the
// reported discarded weight is exact.
std::pair<TensorTrain, TruncationReport> truncate_svd(const TensorTrain& tt,
                                                      double tolerance);

// Contracts adjacent core pairs (2m, 2m+1) of a 2d-core train into a d-core
// operator. pairing must list exactly those pairs, in order.
TensorTrainOperator pair_merge(const TensorTrain& tt,
                               const std::vector<std::pair<int, int>>& pairing);
TensorTrainOperator pair_merge_adjacent(const TensorTrain& tt);

// result[k] = sum_j tto[j, k] * tt[j]. Bond dimensions multiply; callers
// usually follow with truncate_svd.
TensorTrain contract_operator(const TensorTrainOperator& tto, const TensorTrain& tt);

// Bilinear contraction sum_x a[x] * b[x] (no conjugation).
Complex dot(const TensorTrain& a, const TensorTrain& b);

// Squared Frobenius norm sum_x |a[x]|^2.
double norm2(const TensorTrain& tt);

}  // namespace ttp
