#pragma once

// Mach-Zehnder layout and single-photon branch propagation. A source photon is
// split at L11, each branch is reflected at one mirror (L12 or L21), and the
// branches recombine at L22 where two detectors watch the output ports. An
// optional absorber on one arm plays the role of the bomb.

#include "ifm/optics.hpp"

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ifm::mzi {

enum class Vertex { L11, L12, L21, L22 };
enum class Port { a, b };
enum class Detector { D1, D2 };

std::string to_string(Vertex v);
std::string to_string(Port p);
std::string to_string(Detector d);
std::optional<Vertex> parse_vertex(std::string_view text);

struct ArmId {
  Vertex from;
  Vertex to;

  friend auto operator<=>(const ArmId&, const ArmId&) = default;
};

std::string to_string(const ArmId& arm);

/// The four arms every layout must define.
inline constexpr ArmId kArms[] = {{Vertex::L11, Vertex::L12},
                                  {Vertex::L11, Vertex::L21},
                                  {Vertex::L12, Vertex::L22},
                                  {Vertex::L21, Vertex::L22}};

struct Arm {
  ArmId id;
  double length;
  std::string label;  // empty when unlabeled

  friend bool operator==(const Arm&, const Arm&) = default;
};

struct Obstruction {
  ArmId arm;
  double efficiency = 1.0;

  friend bool operator==(const Obstruction&, const Obstruction&) = default;
};

struct Source {
  optics::PhotonMode mode;
  double width;

  friend bool operator==(const Source&, const Source&) = default;
};

struct Layout {
  std::map<Vertex, optics::Vec3> vertices;
  std::map<Vertex, optics::OpticalElement> elements;
  std::map<ArmId, Arm> arms;
  Source source;
  std::optional<Obstruction> obstruction;
  std::map<Detector, Port> detectors;

  friend bool operator==(const Layout&, const Layout&) = default;
};

/// Throws ValidationError when the layout breaks an invariant: beamsplitters at
/// L11 and L22, mirrors at L12 and L21, all four arms present with positive
/// length, distinct detector ports, efficiency in [0, 1], positive packet width.
void validate_layout(const Layout& layout);

/// Square interferometer with unit arms: L11 at the origin, L21 along +x,
/// L12 along -y, all element normals (1, 1, 0)/sqrt 2, source momentum (1, 0, 0)
/// polarized along z. Arm L11->L12 is labelled "lower", L11->L21 "upper".
Layout square_layout(double packet_width = 0.05);

/// Looks an arm up by its label; throws LookupError.
ArmId arm_by_label(const Layout& layout, std::string_view label);

/// Copy of `layout` with the absorber placed on `arm`. Efficiency must lie in
/// [0, 1]; the arm must be one of the four layout arms.
Layout with_obstruction(const Layout& layout, const ArmId& arm, double efficiency = 1.0);
Layout with_obstruction(const Layout& layout, std::string_view arm_label,
                        double efficiency = 1.0);

/// One localized component of the split photon field.
struct Branch {
  std::complex<double> amplitude;
  optics::PhotonMode mode;
  Vertex vertex;
  Port port;
  double path_length = 0.0;
  std::vector<Vertex> reflections;  // vertices where this branch was reflected
};

struct InteractionEvent {
  ArmId arm;
  optics::Vec3 position;
  double absorbed_weight;
};

struct DetectionReport {
  double p_d1 = 0.0;
  double p_d2 = 0.0;
  double p_absorbed = 0.0;
  optics::Momentum3 momentum_d1;
  optics::Momentum3 momentum_d2;
  std::complex<double> amplitude_d1;
  std::complex<double> amplitude_d2;
  std::optional<InteractionEvent> interaction;
};

/// Branch set after each propagation step, for conservation diagnostics.
struct PropagationStage {
  std::string name;
  std::vector<Branch> branches;
  double absorbed_weight = 0.0;

  /// Branch weight plus absorbed weight; one when probability is conserved.
  double total_probability() const;
};

struct PropagationOptions {
  /// Packet overlap below which the two arms count as independent.
  double locality_tolerance = 1e-6;
};

/// exp(i |p| L). Length must be >= 0 and |p| > 0; otherwise DomainError.
std::complex<double> propagation_phase(double length, double p_magnitude);

/// Runs the branch chain and returns every intermediate stage.
std::vector<PropagationStage> propagate_stages(const Layout& layout,
                                               const PropagationOptions& options = {});

/// Detector probabilities, output momenta and amplitudes. Output amplitudes are
/// quoted relative to the mean optical path of the two arms, so an equal-arm
/// interferometer reports a real amplitude at D1.
DetectionReport propagate_analytic(const Layout& layout,
                                   const PropagationOptions& options = {});

struct ShotCounts {
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
  std::uint64_t absorbed = 0;

  std::uint64_t total() const { return d1 + d2 + absorbed; }
  ShotCounts& operator+=(const ShotCounts& other);
  friend bool operator==(const ShotCounts&, const ShotCounts&) = default;
};

/// Counter-based uniform variate in [0, 1) for shot `index` under `seed`.
double shot_uniform(std::uint64_t seed, std::uint64_t index);

/// Samples the outcome distribution of `report` for shots [first, first + count).
ShotCounts sample_shots(const DetectionReport& report, std::uint64_t first,
                        std::uint64_t count, std::uint64_t seed);

/// Monte Carlo detector clicks. Each shot draws from its own counter-based
/// stream, so results depend only on (seed, n_shots), never on `parallelism`
/// (0 picks the hardware concurrency).
ShotCounts run_shots(const Layout& layout, std::uint64_t n_shots, std::uint64_t seed,
                     unsigned parallelism = 0);

/// Same shots as run_shots, tallied per consecutive batch of `batch_size`.
std::vector<ShotCounts> run_shot_batches(const Layout& layout, std::uint64_t n_shots,
                                         std::uint64_t seed, std::uint64_t batch_size,
                                         unsigned parallelism = 0);

struct FringePoint {
  double delta_l;
  double p_d1;
  double p_d2;
};

/// Lengthens arm L11->L21 by delta_l over `steps` evenly spaced values in
/// [min, max]. Requires an unobstructed layout.
std::vector<FringePoint> fringe_scan(const Layout& layout, double min_delta,
                                     double max_delta, int steps);

}  // namespace ifm::mzi
