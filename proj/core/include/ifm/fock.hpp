#pragma once

// Truncated multimode bosonic Fock space. Used as a brute-force oracle for the
// operator identities behind the optical element model: mode rotation under
// the two-mode unitary, and preservation of canonical commutators.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ifm::fock {

using ModeId = std::string;
using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr std::size_t kDefaultDimensionCap = 100'000;
inline constexpr int kDefaultMaxOccupation = 6;

/// Occupation-number basis over an ordered list of modes, each truncated at
/// n_max quanta. Basis states are ordered lexicographically with the first
/// mode most significant, so the vacuum sits at index 0.
class FockSpace {
 public:
  FockSpace(std::vector<ModeId> modes, int n_max,
            std::size_t dim_cap = kDefaultDimensionCap);

  const std::vector<ModeId>& modes() const { return modes_; }
  int n_max() const { return n_max_; }
  std::size_t dim() const { return dim_; }
  std::size_t vacuum() const { return 0; }

  /// Position of `mode` in modes(); throws LookupError for unknown ids.
  std::size_t mode_index(const ModeId& mode) const;

  std::vector<int> occupations(std::size_t basis_index) const;
  int occupation(std::size_t basis_index, std::size_t mode_position) const;
  std::size_t index_of(std::span<const int> occupations) const;

  friend bool operator==(const FockSpace&, const FockSpace&) = default;

 private:
  std::vector<ModeId> modes_;
  int n_max_;
  std::size_t dim_;
  std::vector<std::size_t> strides_;
};

enum class LadderKind { raising, lowering };

/// Two distinct modes mixed by one optical element: the incoming mode and its
/// Householder-reflected partner.
struct ModePair {
  ModeId mode;
  ModeId partner;
};

/// Where a residual is measured. `below_cap` keeps only input basis states
/// whose combined occupation of the pair is below n_max; there the truncated
/// matrices agree with the untruncated algebra.
enum class Subspace { below_cap, full };

FockSpace build_space(std::vector<ModeId> modes, int n_max,
                      std::size_t dim_cap = kDefaultDimensionCap);

StateVector basis_state(const FockSpace& space, std::span<const int> occupations);

/// a or a† for one mode, acting as identity on the others.
OperatorMatrix ladder(const FockSpace& space, const ModeId& mode, LadderKind kind);

/// Total photon number, summed over all modes.
OperatorMatrix number_operator(const FockSpace& space);

OperatorMatrix commutator(const OperatorMatrix& x, const OperatorMatrix& y);

/// Anti-hermitian generator a†_mode a_partner − a†_partner a_mode.
OperatorMatrix pair_generator(const FockSpace& space, const ModePair& pair);

/// exp(alpha * pair_generator). Conjugation by this unitary maps
/// a_mode to cos(alpha) a_mode + sin(alpha) a_partner and
/// a_partner to cos(alpha) a_partner − sin(alpha) a_mode.
OperatorMatrix v_unitary(const FockSpace& space, const ModePair& pair, double alpha);

/// V† X V.
OperatorMatrix conjugate(const OperatorMatrix& v, const OperatorMatrix& x);

/// Frobenius norm of (a − b) restricted to the columns selected by `subspace`.
double pair_distance(const FockSpace& space, const ModePair& pair,
                     const OperatorMatrix& a, const OperatorMatrix& b,
                     Subspace subspace);

/// Larger of the two Frobenius distances between the conjugated lowering
/// operators and their expected cos/sin combinations.
double rotation_check(const FockSpace& space, const ModePair& pair, double alpha,
                      Subspace subspace = Subspace::below_cap);

/// Max-norm of [V†XV, V†YV] − V†[X,Y]V, maximized over all pairs drawn from
/// {a, a†} of both modes.
double commutator_preservation_check(const FockSpace& space, const ModePair& pair,
                                     double alpha);

/// Same residual for one explicit operator pair.
double commutator_preservation_check(const FockSpace& space, const ModePair& pair,
                                     double alpha, const OperatorMatrix& x,
                                     const OperatorMatrix& y);

}  // namespace ifm::fock
