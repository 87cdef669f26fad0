#include "ifm/optics.hpp"

#include "ifm/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace ifm::optics {

namespace {

constexpr double kModeTolerance = 1e-9;

}  // namespace

PhotonMode::PhotonMode(Momentum3 momentum, Vec3 polarization)
    : momentum_(std::move(momentum)), polarization_(std::move(polarization)) {
  const double energy = momentum_.energy();
  if (!(energy > 0.0) || !std::isfinite(energy)) {
    throw ValidationError("photon momentum must be finite and nonzero");
  }
  if (std::abs(polarization_.norm() - 1.0) > kModeTolerance) {
    throw ValidationError(
        fmt::format("polarization must be a unit vector, |eps| = {}", polarization_.norm()));
  }
  if (std::abs(polarization_.dot(momentum_.components())) > kModeTolerance * energy) {
    throw ValidationError("polarization is not transverse to the momentum");
  }
}

HouseholderReflection::HouseholderReflection(const Vec3& normal) {
  const double length = normal.norm();
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DegenerateError("reflection normal must be a finite nonzero vector");
  }
  // Already-unit normals are kept bit for bit so that text round trips are exact.
  normal_ = std::abs(length - 1.0) > 1e-14 ? Vec3(normal / length) : normal;
  spatial_ = Mat3::Identity() - 2.0 * normal_ * normal_.transpose();
}

Mat4 HouseholderReflection::spacetime() const {
  Mat4 block = Mat4::Zero();
  block(0, 0) = 1.0;
  block.bottomRightCorner<3, 3>() = spatial_;
  return block;
}

HouseholderReflection householder(const Vec3& normal) {
  return HouseholderReflection(normal);
}

PhotonMode reflect_mode(const HouseholderReflection& reflection, const PhotonMode& mode) {
  return PhotonMode(Momentum3(reflection.apply(mode.momentum().components())),
                    reflection.apply(mode.polarization()));
}

double mixing_angle(ElementKind kind) {
  switch (kind) {
    case ElementKind::mirror:
      return std::numbers::pi / 2.0;
    case ElementKind::beamsplitter:
      return std::numbers::pi / 4.0;
  }
  return 0.0;
}

std::string to_string(ElementKind kind) {
  return kind == ElementKind::mirror ? "mirror" : "beamsplitter";
}

OpticalElement make_element(ElementKind kind, const Vec3& normal, std::string vertex) {
  return OpticalElement{kind, mixing_angle(kind), HouseholderReflection(normal),
                        std::move(vertex)};
}

PortMatrix rotation_matrix(double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  PortMatrix m;
  m << c, s, -s, c;
  return m;
}

PortMatrix port_matrix(const OpticalElement& element) {
  PortMatrix m;
  switch (element.kind) {
    case ElementKind::mirror:
      m << 0.0, 1.0, -1.0, 0.0;
      break;
    case ElementKind::beamsplitter: {
      constexpr double h = std::numbers::sqrt2 / 2.0;
      m << h, h, -h, h;
      break;
    }
  }
  return m;
}

double packet_overlap(const GaussianPacket& first, const GaussianPacket& second) {
  if (!(first.width > 0.0) || !(second.width > 0.0)) {
    throw DomainError("packet width must be positive");
  }
  if (first.width != second.width) {
    throw ConfigurationError(fmt::format(
        "packet overlap needs equal widths, got {} and {}", first.width, second.width));
  }
  const double separation2 = (first.center - second.center).squaredNorm();
  return std::exp(-separation2 / (4.0 * first.width * first.width));
}

bool locality_check(const GaussianPacket& first, const GaussianPacket& second,
                    double tolerance) {
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw DomainError(fmt::format("locality tolerance {} is outside (0, 1)", tolerance));
  }
  return packet_overlap(first, second) < tolerance;
}

}  // namespace ifm::optics
