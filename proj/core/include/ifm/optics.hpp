#pragma once

// Geometry and element algebra for ideal point-like optics. Natural units
// (hbar = c = 1): a photon's energy equals the magnitude of its momentum.

#include <Eigen/Dense>

#include <string>

namespace ifm::optics {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using PortMatrix = Eigen::Matrix2d;

/// Photon momentum; its magnitude is the photon energy.
class Momentum3 {
 public:
  Momentum3() : components_(Vec3::Zero()) {}
  explicit Momentum3(const Vec3& components) : components_(components) {}
  Momentum3(double x, double y, double z) : components_(x, y, z) {}

  const Vec3& components() const { return components_; }
  double energy() const { return components_.norm(); }
  Vec3 direction() const { return components_.normalized(); }

  friend bool operator==(const Momentum3&, const Momentum3&) = default;

 private:
  Vec3 components_;
};

/// Plane-wave label (p, epsilon). Always propagating and transverse.
class PhotonMode {
 public:
  /// Throws ValidationError unless |p| > 0, |epsilon| = 1 and epsilon . p = 0,
  /// each to a relative tolerance of 1e-9.
  PhotonMode(Momentum3 momentum, Vec3 polarization);

  const Momentum3& momentum() const { return momentum_; }
  const Vec3& polarization() const { return polarization_; }

  friend bool operator==(const PhotonMode&, const PhotonMode&) = default;

 private:
  Momentum3 momentum_;
  Vec3 polarization_;
};

/// Spatial reflection R = 1 - 2 n n^T through the plane normal to n, with its
/// space-time extension diag(1, R) that leaves the time component alone.
class HouseholderReflection {
 public:
  /// `normal` is normalized; a zero vector throws DegenerateError.
  explicit HouseholderReflection(const Vec3& normal);

  const Vec3& normal() const { return normal_; }
  const Mat3& spatial() const { return spatial_; }
  Mat4 spacetime() const;

  Vec3 apply(const Vec3& v) const { return v - 2.0 * normal_.dot(v) * normal_; }

  friend bool operator==(const HouseholderReflection&,
                         const HouseholderReflection&) = default;

 private:
  Vec3 normal_;
  Mat3 spatial_;
};

HouseholderReflection householder(const Vec3& normal);

/// p' = R p and epsilon' = R epsilon. Energy and transversality survive exactly
/// up to rounding.
PhotonMode reflect_mode(const HouseholderReflection& reflection, const PhotonMode& mode);

enum class ElementKind { mirror, beamsplitter };

/// pi/2 for a mirror, pi/4 for a beamsplitter.
double mixing_angle(ElementKind kind);

std::string to_string(ElementKind kind);

/// Ideal lossless point-like element at one interferometer vertex.
struct OpticalElement {
  ElementKind kind;
  double alpha;
  HouseholderReflection reflection;
  std::string vertex;

  friend bool operator==(const OpticalElement&, const OpticalElement&) = default;
};

OpticalElement make_element(ElementKind kind, const Vec3& normal, std::string vertex);

/// [[cos a, sin a], [-sin a, cos a]] acting on (unprimed, primed) port
/// amplitudes.
PortMatrix rotation_matrix(double alpha);

/// Port matrix with exact entries for the two supported kinds: a mirror gives
/// [[0, 1], [-1, 0]] and a beamsplitter (1/sqrt 2)[[1, 1], [-1, 1]].
PortMatrix port_matrix(const OpticalElement& element);

/// Gaussian wave packet used to certify that split branches no longer overlap.
struct GaussianPacket {
  Vec3 center;
  double width;
  PhotonMode carrier;
};

/// exp(-|c1 - c2|^2 / (4 sigma^2)) for equal-width packets.
/// Unequal widths throw ConfigurationError.
double packet_overlap(const GaussianPacket& first, const GaussianPacket& second);

/// True when the packets are far enough apart to be treated as independent
/// fields, i.e. packet_overlap < tolerance. Tolerance must lie in (0, 1).
bool locality_check(const GaussianPacket& first, const GaussianPacket& second,
                    double tolerance);

}  // namespace ifm::optics
