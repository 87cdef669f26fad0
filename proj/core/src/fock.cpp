#include "ifm/fock.hpp"

#include "ifm/errors.hpp"
#include "ifm/expm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ifm::fock {

namespace {

void require_square(const FockSpace& space, const OperatorMatrix& m, const char* what) {
  const auto dim = static_cast<Eigen::Index>(space.dim());
  if (m.rows() != dim || m.cols() != dim) {
    throw ShapeError(fmt::format("{}: operator is {}x{}, space dimension is {}", what,
                                 m.rows(), m.cols(), dim));
  }
}

void require_pair(const FockSpace& space, const ModePair& pair) {
  space.mode_index(pair.mode);
  space.mode_index(pair.partner);
  if (pair.mode == pair.partner) {
    throw DegenerateError(
        fmt::format("mode pair is degenerate: both entries are '{}'", pair.mode));
  }
}

}  // namespace

FockSpace::FockSpace(std::vector<ModeId> modes, int n_max, std::size_t dim_cap)
    : modes_(std::move(modes)), n_max_(n_max), dim_(1) {
  if (modes_.empty()) throw ValidationError("a Fock space needs at least one mode");
  if (n_max_ < 1) {
    throw ValidationError(fmt::format("n_max must be at least 1, got {}", n_max_));
  }
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    for (std::size_t j = i + 1; j < modes_.size(); ++j) {
      if (modes_[i] == modes_[j]) {
        throw ValidationError(fmt::format("mode '{}' listed twice", modes_[i]));
      }
    }
  }

  const auto levels = static_cast<std::size_t>(n_max_) + 1;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (dim_ > dim_cap / levels) {
      throw SizingError(fmt::format(
          "Fock space dimension {}^{} exceeds the cap of {} basis states", levels,
          modes_.size(), dim_cap));
    }
    dim_ *= levels;
  }

  strides_.assign(modes_.size(), 1);
  for (std::size_t k = modes_.size() - 1; k > 0; --k) {
    strides_[k - 1] = strides_[k] * levels;
  }
}

std::size_t FockSpace::mode_index(const ModeId& mode) const {
  const auto it = std::find(modes_.begin(), modes_.end(), mode);
  if (it == modes_.end()) {
    throw LookupError(fmt::format("unknown mode '{}'", mode));
  }
  return static_cast<std::size_t>(it - modes_.begin());
}

int FockSpace::occupation(std::size_t basis_index, std::size_t mode_position) const {
  const auto levels = static_cast<std::size_t>(n_max_) + 1;
  return static_cast<int>((basis_index / strides_[mode_position]) % levels);
}

std::vector<int> FockSpace::occupations(std::size_t basis_index) const {
  std::vector<int> occ(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) occ[k] = occupation(basis_index, k);
  return occ;
}

std::size_t FockSpace::index_of(std::span<const int> occupations) const {
  if (occupations.size() != modes_.size()) {
    throw ShapeError(fmt::format("expected {} occupations, got {}", modes_.size(),
                                 occupations.size()));
  }
  std::size_t index = 0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (occupations[k] < 0 || occupations[k] > n_max_) {
      throw DomainError(fmt::format("occupation {} of mode '{}' is outside [0, {}]",
                                    occupations[k], modes_[k], n_max_));
    }
    index += static_cast<std::size_t>(occupations[k]) * strides_[k];
  }
  return index;
}

FockSpace build_space(std::vector<ModeId> modes, int n_max, std::size_t dim_cap) {
  return FockSpace(std::move(modes), n_max, dim_cap);
}

StateVector basis_state(const FockSpace& space, std::span<const int> occupations) {
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(space.dim()));
  v(static_cast<Eigen::Index>(space.index_of(occupations))) = 1.0;
  return v;
}

OperatorMatrix ladder(const FockSpace& space, const ModeId& mode, LadderKind kind) {
  const std::size_t k = space.mode_index(mode);
  const auto dim = static_cast<Eigen::Index>(space.dim());
  OperatorMatrix m = OperatorMatrix::Zero(dim, dim);
  for (std::size_t col = 0; col < space.dim(); ++col) {
    const int n = space.occupation(col, k);
    std::vector<int> occ = space.occupations(col);
    if (kind == LadderKind::lowering) {
      if (n == 0) continue;
      occ[k] = n - 1;
      m(static_cast<Eigen::Index>(space.index_of(occ)), static_cast<Eigen::Index>(col)) =
          std::sqrt(static_cast<double>(n));
    } else {
      if (n == space.n_max()) continue;
      occ[k] = n + 1;
      m(static_cast<Eigen::Index>(space.index_of(occ)), static_cast<Eigen::Index>(col)) =
          std::sqrt(static_cast<double>(n + 1));
    }
  }
  return m;
}

OperatorMatrix number_operator(const FockSpace& space) {
  const auto dim = static_cast<Eigen::Index>(space.dim());
  OperatorMatrix m = OperatorMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < space.dim(); ++i) {
    int total = 0;
    for (int n : space.occupations(i)) total += n;
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = total;
  }
  return m;
}

OperatorMatrix commutator(const OperatorMatrix& x, const OperatorMatrix& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows()) {
    throw ShapeError(fmt::format("commutator of {}x{} and {}x{} operators", x.rows(),
                                 x.cols(), y.rows(), y.cols()));
  }
  return x * y - y * x;
}

OperatorMatrix pair_generator(const FockSpace& space, const ModePair& pair) {
  require_pair(space, pair);
  const OperatorMatrix a = ladder(space, pair.mode, LadderKind::lowering);
  const OperatorMatrix b = ladder(space, pair.partner, LadderKind::lowering);
  return a.adjoint() * b - b.adjoint() * a;
}

OperatorMatrix v_unitary(const FockSpace& space, const ModePair& pair, double alpha) {
  return linalg::expm(alpha * pair_generator(space, pair));
}

OperatorMatrix conjugate(const OperatorMatrix& v, const OperatorMatrix& x) {
  if (v.rows() != x.rows() || v.cols() != x.cols()) {
    throw ShapeError("conjugation operands differ in shape");
  }
  return v.adjoint() * x * v;
}

double pair_distance(const FockSpace& space, const ModePair& pair,
                     const OperatorMatrix& a, const OperatorMatrix& b,
                     Subspace subspace) {
  require_square(space, a, "pair_distance");
  require_square(space, b, "pair_distance");
  if (subspace == Subspace::full) return (a - b).norm();

  const std::size_t p = space.mode_index(pair.mode);
  const std::size_t q = space.mode_index(pair.partner);
  double sum = 0.0;
  for (std::size_t col = 0; col < space.dim(); ++col) {
    if (space.occupation(col, p) + space.occupation(col, q) >= space.n_max()) continue;
    const auto c = static_cast<Eigen::Index>(col);
    sum += (a.col(c) - b.col(c)).squaredNorm();
  }
  return std::sqrt(sum);
}

double rotation_check(const FockSpace& space, const ModePair& pair, double alpha,
                      Subspace subspace) {
  const OperatorMatrix v = v_unitary(space, pair, alpha);
  const OperatorMatrix a = ladder(space, pair.mode, LadderKind::lowering);
  const OperatorMatrix b = ladder(space, pair.partner, LadderKind::lowering);
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);

  const double forward = pair_distance(space, pair, conjugate(v, a), c * a + s * b, subspace);
  const double partner = pair_distance(space, pair, conjugate(v, b), c * b - s * a, subspace);
  return std::max(forward, partner);
}

double commutator_preservation_check(const FockSpace& space, const ModePair& pair,
                                     double alpha, const OperatorMatrix& x,
                                     const OperatorMatrix& y) {
  require_square(space, x, "commutator_preservation_check");
  require_square(space, y, "commutator_preservation_check");
  const OperatorMatrix v = v_unitary(space, pair, alpha);
  return linalg::max_norm(commutator(conjugate(v, x), conjugate(v, y)) -
                          conjugate(v, commutator(x, y)));
}

double commutator_preservation_check(const FockSpace& space, const ModePair& pair,
                                     double alpha) {
  const OperatorMatrix v = v_unitary(space, pair, alpha);
  const OperatorMatrix a = ladder(space, pair.mode, LadderKind::lowering);
  const OperatorMatrix b = ladder(space, pair.partner, LadderKind::lowering);
  const std::vector<OperatorMatrix> canonical = {a, a.adjoint(), b, b.adjoint()};

  std::vector<OperatorMatrix> conjugated;
  conjugated.reserve(canonical.size());
  for (const auto& op : canonical) conjugated.push_back(conjugate(v, op));

  double worst = 0.0;
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    for (std::size_t j = i; j < canonical.size(); ++j) {
      const OperatorMatrix lhs = commutator(conjugated[i], conjugated[j]);
      const OperatorMatrix rhs = conjugate(v, commutator(canonical[i], canonical[j]));
      worst = std::max(worst, linalg::max_norm(lhs - rhs));
    }
  }
  return worst;
}

}  // namespace ifm::fock
