#include "ifm/interferometer.hpp"

#include "ifm/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace ifm::mzi {

namespace {

using optics::Vec3;

constexpr double kAlignmentTolerance = 1e-9;
constexpr int kMaxHops = 4;

std::size_t port_index(Port p) { return p == Port::a ? 0 : 1; }
Port other(Port p) { return p == Port::a ? Port::b : Port::a; }

const Vec3& position(const Layout& layout, Vertex v) {
  const auto it = layout.vertices.find(v);
  if (it == layout.vertices.end()) {
    throw ValidationError(fmt::format("vertex {} has no position", to_string(v)));
  }
  return it->second;
}

// Arm leaving `from` whose geometric direction matches the branch momentum.
const Arm* route(const Layout& layout, Vertex from, const Vec3& direction) {
  for (const auto& [id, arm] : layout.arms) {
    if (id.from != from) continue;
    const Vec3 leg = position(layout, id.to) - position(layout, id.from);
    if (leg.norm() == 0.0) continue;
    if (leg.normalized().dot(direction) > 1.0 - kAlignmentTolerance) return &arm;
  }
  return nullptr;
}

// Applies the element at the branch's vertex. The output in the input port is
// transmitted with unchanged momentum; the other port carries the reflected mode.
std::vector<Branch> scatter(const optics::OpticalElement& element, const Branch& in) {
  const optics::PortMatrix m = optics::port_matrix(element);
  const std::size_t col = port_index(in.port);
  std::vector<Branch> out;
  for (Port port : {Port::a, Port::b}) {
    const double coefficient = m(static_cast<Eigen::Index>(port_index(port)),
                                 static_cast<Eigen::Index>(col));
    if (coefficient == 0.0) continue;
    Branch b = in;
    b.amplitude = in.amplitude * coefficient;
    b.port = port;
    if (port != in.port) {
      b.mode = optics::reflect_mode(element.reflection, in.mode);
      b.reflections.push_back(in.vertex);
    }
    out.push_back(std::move(b));
  }
  return out;
}

Vec3 point_along(const Layout& layout, std::initializer_list<Vertex> path, double fraction) {
  std::vector<Vec3> points;
  for (Vertex v : path) points.push_back(position(layout, v));
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += (points[i] - points[i - 1]).norm();
  double remaining = fraction * total;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double leg = (points[i] - points[i - 1]).norm();
    if (remaining <= leg && leg > 0.0) {
      return points[i - 1] + (remaining / leg) * (points[i] - points[i - 1]);
    }
    remaining -= leg;
  }
  return points.back();
}

void certify_locality(const Layout& layout, double tolerance) {
  const optics::GaussianPacket via_l12{
      point_along(layout, {Vertex::L11, Vertex::L12, Vertex::L22}, 0.5),
      layout.source.width, layout.source.mode};
  const optics::GaussianPacket via_l21{
      point_along(layout, {Vertex::L11, Vertex::L21, Vertex::L22}, 0.5),
      layout.source.width, layout.source.mode};
  if (!optics::locality_check(via_l12, via_l21, tolerance)) {
    throw ConfigurationError(fmt::format(
        "interferometer arms are not independent: packet overlap {:.3g} at mid-propagation "
        "is not below {:.3g}; increase the arm separation or reduce the packet width",
        optics::packet_overlap(via_l12, via_l21), tolerance));
  }
}

double reference_path(const Layout& layout) {
  const auto len = [&](Vertex a, Vertex b) { return layout.arms.at(ArmId{a, b}).length; };
  return 0.5 * (len(Vertex::L11, Vertex::L12) + len(Vertex::L12, Vertex::L22) +
                len(Vertex::L11, Vertex::L21) + len(Vertex::L21, Vertex::L22));
}

}  // namespace

std::string to_string(Vertex v) {
  switch (v) {
    case Vertex::L11: return "L11";
    case Vertex::L12: return "L12";
    case Vertex::L21: return "L21";
    case Vertex::L22: return "L22";
  }
  return "?";
}

std::string to_string(Port p) { return p == Port::a ? "a" : "b"; }
std::string to_string(Detector d) { return d == Detector::D1 ? "D1" : "D2"; }

std::optional<Vertex> parse_vertex(std::string_view text) {
  for (Vertex v : {Vertex::L11, Vertex::L12, Vertex::L21, Vertex::L22}) {
    if (text == to_string(v)) return v;
  }
  return std::nullopt;
}

std::string to_string(const ArmId& arm) {
  return to_string(arm.from) + "->" + to_string(arm.to);
}

void validate_layout(const Layout& layout) {
  using optics::ElementKind;
  const std::pair<Vertex, ElementKind> expected[] = {
      {Vertex::L11, ElementKind::beamsplitter},
      {Vertex::L12, ElementKind::mirror},
      {Vertex::L21, ElementKind::mirror},
      {Vertex::L22, ElementKind::beamsplitter}};
  for (const auto& [vertex, kind] : expected) {
    position(layout, vertex);
    const auto it = layout.elements.find(vertex);
    if (it == layout.elements.end()) {
      throw ValidationError(fmt::format("no element at {}", to_string(vertex)));
    }
    if (it->second.kind != kind) {
      throw ValidationError(fmt::format("{} must hold a {}, found a {}", to_string(vertex),
                                        optics::to_string(kind),
                                        optics::to_string(it->second.kind)));
    }
    if (it->second.alpha != optics::mixing_angle(kind)) {
      throw ValidationError(fmt::format("element at {} has a mixing angle that does not "
                                        "match its kind",
                                        to_string(vertex)));
    }
  }
  for (const ArmId& id : kArms) {
    const auto it = layout.arms.find(id);
    if (it == layout.arms.end()) {
      throw ValidationError(fmt::format("arm {} is missing", to_string(id)));
    }
    if (!(it->second.length > 0.0) || !std::isfinite(it->second.length)) {
      throw ValidationError(fmt::format("arm {} must have a positive length", to_string(id)));
    }
  }
  if (layout.arms.size() != std::size(kArms)) {
    throw ValidationError("layout defines arms outside the interferometer topology");
  }
  if (!(layout.source.width > 0.0)) {
    throw ValidationError("source packet width must be positive");
  }
  if (layout.obstruction) {
    if (!layout.arms.contains(layout.obstruction->arm)) {
      throw ValidationError("obstruction sits on an unknown arm");
    }
    const double e = layout.obstruction->efficiency;
    if (!(e >= 0.0 && e <= 1.0)) {
      throw ValidationError(fmt::format("trigger efficiency {} is outside [0, 1]", e));
    }
  }
  if (layout.detectors.size() != 2 ||
      layout.detectors.at(Detector::D1) == layout.detectors.at(Detector::D2)) {
    throw ValidationError("detectors D1 and D2 must watch distinct output ports");
  }
}

Layout square_layout(double packet_width) {
  using optics::ElementKind;
  const Vec3 normal = Vec3(1.0, 1.0, 0.0) / std::numbers::sqrt2;
  Layout layout{
      .vertices = {{Vertex::L11, Vec3(0, 0, 0)},
                   {Vertex::L12, Vec3(0, -1, 0)},
                   {Vertex::L21, Vec3(1, 0, 0)},
                   {Vertex::L22, Vec3(1, -1, 0)}},
      .elements = {},
      .arms = {},
      .source = {optics::PhotonMode(optics::Momentum3(1, 0, 0), Vec3(0, 0, 1)),
                 packet_width},
      .obstruction = std::nullopt,
      .detectors = {{Detector::D1, Port::a}, {Detector::D2, Port::b}},
  };
  layout.elements.emplace(Vertex::L11,
                          optics::make_element(ElementKind::beamsplitter, normal, "L11"));
  layout.elements.emplace(Vertex::L12, optics::make_element(ElementKind::mirror, normal, "L12"));
  layout.elements.emplace(Vertex::L21, optics::make_element(ElementKind::mirror, normal, "L21"));
  layout.elements.emplace(Vertex::L22,
                          optics::make_element(ElementKind::beamsplitter, normal, "L22"));
  for (const ArmId& id : kArms) {
    std::string label;
    if (id == ArmId{Vertex::L11, Vertex::L12}) label = "lower";
    if (id == ArmId{Vertex::L11, Vertex::L21}) label = "upper";
    layout.arms.emplace(id, Arm{id, 1.0, label});
  }
  return layout;
}

ArmId arm_by_label(const Layout& layout, std::string_view label) {
  for (const auto& [id, arm] : layout.arms) {
    if (!arm.label.empty() && arm.label == label) return id;
  }
  throw LookupError(fmt::format("no arm labelled '{}'", label));
}

Layout with_obstruction(const Layout& layout, const ArmId& arm, double efficiency) {
  if (!layout.arms.contains(arm)) {
    throw LookupError(fmt::format("layout has no arm {}", to_string(arm)));
  }
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw DomainError(fmt::format("trigger efficiency {} is outside [0, 1]", efficiency));
  }
  Layout copy = layout;
  copy.obstruction = Obstruction{arm, efficiency};
  return copy;
}

Layout with_obstruction(const Layout& layout, std::string_view arm_label,
                        double efficiency) {
  return with_obstruction(layout, arm_by_label(layout, arm_label), efficiency);
}

double PropagationStage::total_probability() const {
  double total = absorbed_weight;
  for (const Branch& b : branches) total += std::norm(b.amplitude);
  return total;
}

std::complex<double> propagation_phase(double length, double p_magnitude) {
  if (!(length >= 0.0) || !std::isfinite(length)) {
    throw DomainError(fmt::format("propagation length {} must be nonnegative", length));
  }
  if (!(p_magnitude > 0.0) || !std::isfinite(p_magnitude)) {
    throw DomainError(fmt::format("momentum magnitude {} must be positive", p_magnitude));
  }
  return std::polar(1.0, p_magnitude * length);
}

std::vector<PropagationStage> propagate_stages(const Layout& layout,
                                               const PropagationOptions& options) {
  validate_layout(layout);
  certify_locality(layout, options.locality_tolerance);

  const double energy = layout.source.mode.momentum().energy();
  std::vector<PropagationStage> stages;
  double absorbed = 0.0;

  std::vector<Branch> current = {
      Branch{1.0, layout.source.mode, Vertex::L11, Port::a, 0.0, {}}};
  stages.push_back({"source", current, absorbed});

  for (int hop = 0; !current.empty(); ++hop) {
    if (hop > kMaxHops) {
      throw ConfigurationError("branches never reach L22; check the layout geometry");
    }
    std::size_t at_output = 0;
    for (const Branch& b : current) at_output += b.vertex == Vertex::L22 ? 1 : 0;
    if (at_output != 0 && at_output != current.size()) {
      throw ConfigurationError("branches reach L22 after different numbers of elements");
    }

    std::vector<Branch> scattered;
    for (const Branch& b : current) {
      for (Branch& s : scatter(layout.elements.at(b.vertex), b)) {
        scattered.push_back(std::move(s));
      }
    }
    stages.push_back({fmt::format("elements, hop {}", hop), scattered, absorbed});
    if (at_output == current.size()) {
      current = std::move(scattered);
      break;
    }

    std::vector<Branch> moved;
    for (Branch b : scattered) {
      const Arm* arm = route(layout, b.vertex, b.mode.momentum().direction());
      if (arm == nullptr) {
        const Vec3& p = b.mode.momentum().components();
        throw ConfigurationError(fmt::format(
            "a branch leaving {} along ({:.6g}, {:.6g}, {:.6g}) matches no arm; check "
            "element normals and vertex positions",
            to_string(b.vertex), p.x(), p.y(), p.z()));
      }
      b.amplitude *= propagation_phase(arm->length, energy);
      b.path_length += arm->length;
      b.vertex = arm->id.to;
      if (layout.obstruction && layout.obstruction->arm == arm->id) {
        const double efficiency = layout.obstruction->efficiency;
        absorbed += std::norm(b.amplitude) * efficiency;
        b.amplitude *= std::sqrt(1.0 - efficiency);
        if (b.amplitude == 0.0) continue;
      }
      moved.push_back(std::move(b));
    }
    stages.push_back({fmt::format("propagation, hop {}", hop), moved, absorbed});
    current = std::move(moved);
  }
  stages.push_back({"output", current, absorbed});
  return stages;
}

DetectionReport propagate_analytic(const Layout& layout, const PropagationOptions& options) {
  const std::vector<PropagationStage> stages = propagate_stages(layout, options);
  const PropagationStage& out = stages.back();

  DetectionReport report;
  report.p_absorbed = out.absorbed_weight;

  const double energy = layout.source.mode.momentum().energy();
  const std::complex<double> reference =
      std::conj(propagation_phase(reference_path(layout), energy));

  std::map<Port, std::complex<double>> amplitude{{Port::a, 0.0}, {Port::b, 0.0}};
  std::map<Port, std::optional<optics::Momentum3>> momentum;
  for (const Branch& b : out.branches) {
    amplitude[b.port] += b.amplitude;
    auto& slot = momentum[b.port];
    if (!slot) {
      slot = b.mode.momentum();
    } else if ((slot->components() - b.mode.momentum().components()).norm() >
               kAlignmentTolerance * energy) {
      throw ConfigurationError(fmt::format(
          "branches meet at output port {} with different momenta; the interferometer is "
          "misaligned",
          to_string(b.port)));
    }
  }

  // A port fed by no branch still has a well-defined outgoing direction.
  for (Port port : {Port::a, Port::b}) {
    if (!momentum[port] && momentum[other(port)]) {
      momentum[port] = optics::Momentum3(
          layout.elements.at(Vertex::L22).reflection.apply(momentum[other(port)]->components()));
    }
  }

  const Port d1 = layout.detectors.at(Detector::D1);
  const Port d2 = layout.detectors.at(Detector::D2);
  report.amplitude_d1 = amplitude[d1] * reference;
  report.amplitude_d2 = amplitude[d2] * reference;
  report.p_d1 = std::norm(amplitude[d1]);
  report.p_d2 = std::norm(amplitude[d2]);
  if (momentum[d1]) report.momentum_d1 = *momentum[d1];
  if (momentum[d2]) report.momentum_d2 = *momentum[d2];

  if (layout.obstruction) {
    const ArmId& id = layout.obstruction->arm;
    const Vec3 midpoint = 0.5 * (position(layout, id.from) + position(layout, id.to));
    report.interaction = InteractionEvent{id, midpoint, out.absorbed_weight};
  }
  return report;
}

std::vector<FringePoint> fringe_scan(const Layout& layout, double min_delta,
                                     double max_delta, int steps) {
  if (steps < 2) throw DomainError(fmt::format("fringe scan needs at least 2 steps, got {}", steps));
  if (layout.obstruction) {
    throw ConfigurationError(
        "fringe scans need an unobstructed interferometer; remove the bomb line");
  }
  const ArmId scanned{Vertex::L11, Vertex::L21};
  const double base = layout.arms.at(scanned).length;

  std::vector<FringePoint> table;
  table.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
    const double delta = i == steps - 1 ? max_delta : min_delta + t * (max_delta - min_delta);
    if (!(base + delta > 0.0)) {
      throw DomainError(fmt::format(
          "delta_l = {} makes arm {} non-positive (base length {})", delta,
          to_string(scanned), base));
    }
    Layout shifted = layout;
    shifted.arms.at(scanned).length = base + delta;
    const DetectionReport r = propagate_analytic(shifted);
    table.push_back({delta, r.p_d1, r.p_d2});
  }
  return table;
}

}  // namespace ifm::mzi
