#include "ttpricer/tensor_train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace ttp {

namespace {

void validate_cores(const std::vector<Core>& cores) {
  for (std::size_t i = 0; i < cores.size(); ++i) {
    const Core& c = cores[i];
    if (c.empty())
      throw StructureError("core " + std::to_string(i) + " has local dimension 0");
    const Eigen::Index rows = c[0].rows();
    const Eigen::Index cols = c[0].cols();
    if (rows < 1 || cols < 1)
      throw StructureError("core " + std::to_string(i) + " has an empty bond");
    for (const Matrix& m : c)
      if (m.rows() != rows || m.cols() != cols)
        throw StructureError("core " + std::to_string(i) +
                             " has inconsistent slice shapes");
  }
  if (cores.empty()) return;
  if (cores.front()[0].rows() != 1)
    throw StructureError("left boundary bond must have dimension 1");
  if (cores.back()[0].cols() != 1)
    throw StructureError("right boundary bond must have dimension 1");
  for (std::size_t i = 0; i + 1 < cores.size(); ++i)
    if (cores[i][0].cols() != cores[i + 1][0].rows())
      throw StructureError("bond mismatch between cores " + std::to_string(i) +
                           " and " + std::to_string(i + 1));
}

void validate_op_cores(const std::vector<OpCore>& cores) {
  for (std::size_t i = 0; i < cores.size(); ++i) {
    const OpCore& c = cores[i];
    if (c.empty() || c[0].empty())
      throw StructureError("operator core " + std::to_string(i) +
                           " has an empty physical leg");
    const Eigen::Index rows = c[0][0].rows();
    const Eigen::Index cols = c[0][0].cols();
    const std::size_t dim_k = c[0].size();
    for (const auto& row : c) {
      if (row.size() != dim_k)
        throw StructureError("operator core " + std::to_string(i) +
                             " has ragged physical legs");
      for (const Matrix& m : row)
        if (m.rows() != rows || m.cols() != cols)
          throw StructureError("operator core " + std::to_string(i) +
                               " has inconsistent slice shapes");
    }
  }
  if (cores.empty()) return;
  if (cores.front()[0][0].rows() != 1)
    throw StructureError("left boundary bond must have dimension 1");
  if (cores.back()[0][0].cols() != 1)
    throw StructureError("right boundary bond must have dimension 1");
  for (std::size_t i = 0; i + 1 < cores.size(); ++i)
    if (cores[i][0][0].cols() != cores[i + 1][0][0].rows())
      throw StructureError("bond mismatch between operator cores " +
                           std::to_string(i) + " and " + std::to_string(i + 1));
}

void require_nonempty(const TensorTrain& tt) {
  if (tt.empty()) throw StructureError("empty tensor train");
}

// Stack slices vertically: row (x * rows + l), i.e. reshape to
// (chi_l * N) x chi_r with the physical index slow within rows.
Matrix right_matricization(const Core& core) {
  const Eigen::Index rows = core[0].rows();
  const Eigen::Index cols = core[0].cols();
  Matrix out(rows * static_cast<Eigen::Index>(core.size()), cols);
  for (std::size_t x = 0; x < core.size(); ++x)
    out.middleRows(static_cast<Eigen::Index>(x) * rows, rows) = core[x];
  return out;
}

// Concatenate slices horizontally: col (x * cols + r).
Matrix left_matricization(const Core& core) {
  const Eigen::Index rows = core[0].rows();
  const Eigen::Index cols = core[0].cols();
  Matrix out(rows, cols * static_cast<Eigen::Index>(core.size()));
  for (std::size_t x = 0; x < core.size(); ++x)
    out.middleCols(static_cast<Eigen::Index>(x) * cols, cols) = core[x];
  return out;
}

Core split_rows(const Matrix& m, std::size_t phys) {
  const Eigen::Index rows = m.rows() / static_cast<Eigen::Index>(phys);
  Core core(phys);
  for (std::size_t x = 0; x < phys; ++x)
    core[x] = m.middleRows(static_cast<Eigen::Index>(x) * rows, rows);
  return core;
}

Core split_cols(const Matrix& m, std::size_t phys) {
  const Eigen::Index cols = m.cols() / static_cast<Eigen::Index>(phys);
  Core core(phys);
  for (std::size_t x = 0; x < phys; ++x)
    core[x] = m.middleCols(static_cast<Eigen::Index>(x) * cols, cols);
  return core;
}

// Thin QR with a column-pivoted retry when the plain R looks near-singular.
// Returns {Q (m x k), R (k x n)} with A = Q * R.
std::pair<Matrix, Matrix> thin_qr(const Matrix& a, CanonicalizeReport* report) {
  const Eigen::Index k = std::min(a.rows(), a.cols());
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < k; ++i) {
    const double d = std::abs(r(i, i));
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  if (dmin > 0.0 && dmax / dmin <= 1e12) {
    Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), k);
    return {std::move(q), std::move(r)};
  }
  if (report) ++report->pivoted_qr_count;
  Eigen::ColPivHouseholderQR<Matrix> pqr(a);
  Matrix q = pqr.householderQ() * Matrix::Identity(a.rows(), k);
  Matrix rp = pqr.matrixR().topRows(k).triangularView<Eigen::Upper>();
  Matrix rperm = rp * pqr.colsPermutation().inverse();
  return {std::move(q), std::move(rperm)};
}

}  // namespace

std::size_t DenseTensor::flat_index(const IndexVec& index) const {
  if (index.size() != dims.size())
    throw BoundsError("index length does not match tensor order");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (index[i] < 0 || index[i] >= dims[i])
      throw BoundsError("index " + std::to_string(index[i]) +
                        " out of range for leg " + std::to_string(i));
    flat = flat * static_cast<std::size_t>(dims[i]) + static_cast<std::size_t>(index[i]);
  }
  return flat;
}

TensorTrain::TensorTrain(std::vector<Core> cores) : cores_(std::move(cores)) {
  validate_cores(cores_);
}

std::vector<Eigen::Index> TensorTrain::local_dims() const {
  std::vector<Eigen::Index> dims(cores_.size());
  for (std::size_t i = 0; i < cores_.size(); ++i)
    dims[i] = static_cast<Eigen::Index>(cores_[i].size());
  return dims;
}

Eigen::Index TensorTrain::bond_dim(int bond) const {
  if (bond <= 0) return cores_.empty() ? 1 : cores_.front()[0].rows();
  if (bond >= size()) return cores_.empty() ? 1 : cores_.back()[0].cols();
  return cores_[bond - 1][0].cols();
}

std::vector<Eigen::Index> TensorTrain::bond_dims() const {
  std::vector<Eigen::Index> dims;
  for (int b = 1; b < size(); ++b) dims.push_back(bond_dim(b));
  return dims;
}

Eigen::Index TensorTrain::max_bond_dim() const {
  Eigen::Index m = 1;
  for (int b = 0; b <= size(); ++b) m = std::max(m, bond_dim(b));
  return m;
}

std::size_t TensorTrain::dense_size() const {
  std::size_t total = 1;
  for (const Core& c : cores_) {
    const std::size_t n = c.size();
    if (total > std::numeric_limits<std::size_t>::max() / n)
      return std::numeric_limits<std::size_t>::max();
    total *= n;
  }
  return cores_.empty() ? 0 : total;
}

TensorTrainOperator::TensorTrainOperator(std::vector<OpCore> cores)
    : cores_(std::move(cores)) {
  validate_op_cores(cores_);
}

Eigen::Index TensorTrainOperator::bond_dim(int bond) const {
  if (bond <= 0) return cores_.empty() ? 1 : cores_.front()[0][0].rows();
  if (bond >= size()) return cores_.empty() ? 1 : cores_.back()[0][0].cols();
  return cores_[bond - 1][0][0].cols();
}

std::vector<Eigen::Index> TensorTrainOperator::bond_dims() const {
  std::vector<Eigen::Index> dims;
  for (int b = 1; b < size(); ++b) dims.push_back(bond_dim(b));
  return dims;
}

Eigen::Index TensorTrainOperator::max_bond_dim() const {
  Eigen::Index m = 1;
  for (int b = 0; b <= size(); ++b) m = std::max(m, bond_dim(b));
  return m;
}

EvalResult evaluate(const TensorTrain& tt, const IndexVec& index) {
  require_nonempty(tt);
  if (static_cast<int>(index.size()) != tt.size())
    throw BoundsError("index length " + std::to_string(index.size()) +
                      " does not match core count " + std::to_string(tt.size()));
  for (int i = 0; i < tt.size(); ++i)
    if (index[i] < 0 || index[i] >= tt.local_dim(i))
      throw BoundsError("index " + std::to_string(index[i]) +
                        " out of range at site " + std::to_string(i));

  Matrix acc = Matrix::Ones(1, 1);
  std::uint64_t mults = 0;
  for (int i = 0; i < tt.size(); ++i) {
    const Matrix& m = tt.slice(i, index[i]);
    mults += static_cast<std::uint64_t>(m.rows()) * static_cast<std::uint64_t>(m.cols());
    acc = acc * m;
  }
  return {acc(0, 0), mults};
}

DenseTensor to_dense(const TensorTrain& tt, std::size_t entry_cap) {
  require_nonempty(tt);
  const std::size_t total = tt.dense_size();
  if (total > entry_cap)
    throw SizeError("dense expansion of " + std::to_string(total) +
                    " entries exceeds cap " + std::to_string(entry_cap));

  // Fold cores left to right; acc holds all prefix amplitudes.
  Matrix acc = Matrix::Ones(1, 1);
  for (int i = 0; i < tt.size(); ++i) {
    const Eigen::Index n = tt.local_dim(i);
    const Eigen::Index chi = tt.slice(i, 0).cols();
    Matrix next(acc.rows() * n, chi);
    for (Eigen::Index p = 0; p < acc.rows(); ++p)
      for (Eigen::Index x = 0; x < n; ++x)
        next.row(p * n + x) = acc.row(p) * tt.slice(i, x);
    acc = std::move(next);
  }

  DenseTensor out;
  out.dims = tt.local_dims();
  out.data.resize(static_cast<std::size_t>(acc.rows()));
  for (Eigen::Index p = 0; p < acc.rows(); ++p) out.data[p] = acc(p, 0);
  return out;
}

DenseTensor to_dense(const TensorTrainOperator& tto, std::size_t entry_cap) {
  if (tto.empty()) throw StructureError("empty tensor train operator");
  std::size_t total = 1;
  for (int i = 0; i < tto.size(); ++i) {
    total *= static_cast<std::size_t>(tto.dim_j(i));
    total *= static_cast<std::size_t>(tto.dim_k(i));
    if (total > entry_cap)
      throw SizeError("dense expansion exceeds cap " + std::to_string(entry_cap));
  }

  Matrix acc = Matrix::Ones(1, 1);
  for (int i = 0; i < tto.size(); ++i) {
    const Eigen::Index nj = tto.dim_j(i);
    const Eigen::Index nk = tto.dim_k(i);
    const Eigen::Index chi = tto.core(i)[0][0].cols();
    Matrix next(acc.rows() * nj * nk, chi);
    for (Eigen::Index p = 0; p < acc.rows(); ++p)
      for (Eigen::Index j = 0; j < nj; ++j)
        for (Eigen::Index k = 0; k < nk; ++k)
          next.row((p * nj + j) * nk + k) = acc.row(p) * tto.core(i)[j][k];
    acc = std::move(next);
  }

  DenseTensor out;
  for (int i = 0; i < tto.size(); ++i) {
    out.dims.push_back(tto.dim_j(i));
    out.dims.push_back(tto.dim_k(i));
  }
  out.data.resize(static_cast<std::size_t>(acc.rows()));
  for (Eigen::Index p = 0; p < acc.rows(); ++p) out.data[p] = acc(p, 0);
  return out;
}

TensorTrain canonicalize(const TensorTrain& tt, Direction direction,
                         CanonicalizeReport* report) {
  require_nonempty(tt);
  const int d = tt.size();
  std::vector<Core> cores(d);
  for (int i = 0; i < d; ++i) cores[i] = tt.core(i);

  if (direction == Direction::Left) {
    for (int i = 0; i + 1 < d; ++i) {
      auto [q, r] = thin_qr(right_matricization(cores[i]), report);
      cores[i] = split_rows(q, cores[i].size());
      for (Matrix& m : cores[i + 1]) m = r * m;
    }
  } else {
    for (int i = d - 1; i > 0; --i) {
      // LQ via QR of the adjoint: A = L Q with Q row-orthonormal.
      auto [qt, rt] = thin_qr(left_matricization(cores[i]).adjoint(), report);
      Matrix l = rt.adjoint();       // chi_l x k
      Core qcore = split_cols(qt.adjoint(), cores[i].size());
      cores[i] = std::move(qcore);
      for (Matrix& m : cores[i - 1]) m = m * l;
    }
  }
  return TensorTrain(std::move(cores));
}

std::pair<TensorTrain, TruncationReport> truncate_svd(const TensorTrain& tt,
                                                      double tolerance) {
  require_nonempty(tt);
  if (!(tolerance > 0.0) || !(tolerance < 1.0))
    throw ParameterError("SVD tolerance must lie in (0, 1), got " +
                         std::to_string(tolerance));

  TruncationReport report;
  report.norm2 = norm2(tt);
  const int d = tt.size();
  if (d == 1) {
    return {tt, report};
  }

  TensorTrain canon = canonicalize(tt, Direction::Right);
  std::vector<Core> cores(d);
  for (int i = 0; i < d; ++i) cores[i] = canon.core(i);

  const double budget = tolerance * report.norm2 / static_cast<double>(d - 1);
  double discarded_total = 0.0;

  for (int b = 0; b + 1 < d; ++b) {
    Matrix a = right_matricization(cores[b]);
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const Eigen::Index full = sv.size();

    Eigen::Index keep = full;
    double cut = 0.0;
    while (keep > 1) {
      const double s2 = sv(keep - 1) * sv(keep - 1);
      if (cut + s2 > budget) break;
      cut += s2;
      --keep;
    }
    report.kept_ranks.push_back(keep);
    report.discarded_weight.push_back(cut);
    discarded_total += cut;

    Matrix u = svd.matrixU().leftCols(keep);
    Matrix carry = sv.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    cores[b] = split_rows(u, cores[b].size());
    for (Matrix& m : cores[b + 1]) m = carry * m;
  }

  report.achieved_rel_error = report.norm2 > 0.0 ? discarded_total / report.norm2 : 0.0;
  return {TensorTrain(std::move(cores)), report};
}

TensorTrainOperator pair_merge(const TensorTrain& tt,
                               const std::vector<std::pair<int, int>>& pairing) {
  require_nonempty(tt);
  if (tt.size() % 2 != 0)
    throw StructureError("pair_merge needs an even core count, got " +
                         std::to_string(tt.size()));
  const int d = tt.size() / 2;
  if (static_cast<int>(pairing.size()) != d)
    throw StructureError("pairing must list " + std::to_string(d) + " pairs");
  for (int m = 0; m < d; ++m)
    if (pairing[m].first != 2 * m || pairing[m].second != 2 * m + 1)
      throw StructureError("pairing must group adjacent cores (2m, 2m+1)");

  std::vector<OpCore> cores(d);
  for (int m = 0; m < d; ++m) {
    const Core& cj = tt.core(2 * m);
    const Core& ck = tt.core(2 * m + 1);
    OpCore oc(cj.size(), std::vector<Matrix>(ck.size()));
    for (std::size_t j = 0; j < cj.size(); ++j)
      for (std::size_t k = 0; k < ck.size(); ++k)
        oc[j][k] = cj[j] * ck[k];
    cores[m] = std::move(oc);
  }
  return TensorTrainOperator(std::move(cores));
}

TensorTrainOperator pair_merge_adjacent(const TensorTrain& tt) {
  std::vector<std::pair<int, int>> pairing;
  for (int m = 0; 2 * m + 1 < tt.size(); ++m) pairing.emplace_back(2 * m, 2 * m + 1);
  return pair_merge(tt, pairing);
}

TensorTrain contract_operator(const TensorTrainOperator& tto, const TensorTrain& tt) {
  if (tto.empty() || tt.empty())
    throw StructureError("contract_operator on empty operands");
  if (tto.size() != tt.size())
    throw StructureError("operator has " + std::to_string(tto.size()) +
                         " cores but train has " + std::to_string(tt.size()));
  const int d = tt.size();
  for (int i = 0; i < d; ++i)
    if (tto.dim_j(i) != tt.local_dim(i))
      throw StructureError("physical dimension mismatch at site " + std::to_string(i));

  std::vector<Core> cores(d);
  for (int i = 0; i < d; ++i) {
    const OpCore& oc = tto.core(i);
    const Core& tc = tt.core(i);
    const Eigen::Index ol = oc[0][0].rows(), orr = oc[0][0].cols();
    const Eigen::Index tl = tc[0].rows(), tr = tc[0].cols();
    const Eigen::Index nk = tto.dim_k(i);

    Core rc(nk);
    for (Eigen::Index k = 0; k < nk; ++k) {
      Matrix acc = Matrix::Zero(ol * tl, orr * tr);
      for (Eigen::Index j = 0; j < tt.local_dim(i); ++j) {
        const Matrix& o = oc[j][k];
        const Matrix& t = tc[j];
        for (Eigen::Index a = 0; a < ol; ++a)
          for (Eigen::Index ap = 0; ap < orr; ++ap)
            acc.block(a * tl, ap * tr, tl, tr) += o(a, ap) * t;
      }
      rc[k] = std::move(acc);
    }
    cores[i] = std::move(rc);
  }
  return TensorTrain(std::move(cores));
}

Complex dot(const TensorTrain& a, const TensorTrain& b) {
  if (a.empty() || b.empty()) throw StructureError("dot on empty tensor train");
  if (a.size() != b.size())
    throw StructureError("dot needs equal core counts");
  Matrix env = Matrix::Ones(1, 1);
  for (int i = 0; i < a.size(); ++i) {
    if (a.local_dim(i) != b.local_dim(i))
      throw StructureError("local dimension mismatch at site " + std::to_string(i));
    Matrix next = Matrix::Zero(a.slice(i, 0).cols(), b.slice(i, 0).cols());
    for (Eigen::Index x = 0; x < a.local_dim(i); ++x)
      next += a.slice(i, x).transpose() * env * b.slice(i, x);
    env = std::move(next);
  }
  return env(0, 0);
}

double norm2(const TensorTrain& tt) {
  require_nonempty(tt);
  Matrix env = Matrix::Ones(1, 1);
  for (int i = 0; i < tt.size(); ++i) {
    Matrix next = Matrix::Zero(tt.slice(i, 0).cols(), tt.slice(i, 0).cols());
    for (Eigen::Index x = 0; x < tt.local_dim(i); ++x)
      next += tt.slice(i, x).adjoint() * env * tt.slice(i, x);
    env = std::move(next);
  }
  return env(0, 0).real();
}

}  // namespace ttp
