#include "ifm/layout_dsl.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

using namespace ifm::dsl;
using ifm::mzi::Layout;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> golden_layouts() {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(IFM_LAYOUT_DIR)) {
    if (entry.path().extension() == ".ifm") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

const std::string kMinimal = R"(vertex L11 0 0 0
vertex L12 0 -1 0
vertex L21 1 0 0
vertex L22 1 -1 0
beamsplitter L11 normal 1 1 0
mirror L12 normal 1 1 0
mirror L21 normal 1 1 0
beamsplitter L22 normal 1 1 0
arm L11 L12 length 1 label lower
arm L11 L21 length 1 label upper
arm L12 L22 length 1
arm L21 L22 length 1
source momentum 1 0 0 polarization 0 0 1 width 0.05
)";

TEST(Golden, AllLayoutsParseAndRoundTrip) {
  const auto files = golden_layouts();
  ASSERT_GE(files.size(), 3u);
  for (const auto& f : files) {
    const LayoutDocument doc = parse_layout(slurp(f));
    ASSERT_TRUE(doc.ok()) << f << ": " << doc.diagnostics.front().message;
    EXPECT_TRUE(doc.warnings.empty()) << f;
    const std::string text = serialize_layout(*doc.layout);
    const LayoutDocument again = parse_layout(text);
    ASSERT_TRUE(again.ok()) << text;
    EXPECT_EQ(*again.layout, *doc.layout) << f;
    EXPECT_EQ(serialize_layout(*again.layout), text) << f;
  }
}

TEST(Golden, SquareLayoutFileMatchesBuilder) {
  const LayoutDocument doc = parse_layout(slurp(std::filesystem::path(IFM_LAYOUT_DIR) / "mzi.ifm"));
  ASSERT_TRUE(doc.ok());
  const Layout built = ifm::mzi::square_layout();
  EXPECT_EQ(doc.layout->arms, built.arms);
  EXPECT_EQ(doc.layout->vertices, built.vertices);
  EXPECT_EQ(doc.layout->detectors, built.detectors);
  const auto r = ifm::mzi::propagate_analytic(*doc.layout);
  EXPECT_NEAR(r.p_d1, 1.0, 1e-12);
}

TEST(Golden, BuilderLayoutsRoundTrip) {
  for (const Layout& l : {ifm::mzi::square_layout(),
                          ifm::mzi::with_obstruction(ifm::mzi::square_layout(0.01), "upper", 0.3)}) {
    const LayoutDocument doc = parse_layout(serialize_layout(l));
    ASSERT_TRUE(doc.ok());
    EXPECT_EQ(*doc.layout, l);
  }
}

TEST(Parse, DetectorsDefaultAndNonUnitNormalsWarn) {
  const LayoutDocument doc = parse_layout(kMinimal);
  ASSERT_TRUE(doc.ok());
  EXPECT_EQ(doc.layout->detectors.at(ifm::mzi::Detector::D1), ifm::mzi::Port::a);
  EXPECT_EQ(doc.layout->detectors.at(ifm::mzi::Detector::D2), ifm::mzi::Port::b);
  ASSERT_EQ(doc.warnings.size(), 4u);
  EXPECT_EQ(doc.warnings[0].line, 5);
  EXPECT_EQ(doc.warnings[0].severity, Severity::warning);
  EXPECT_NEAR(doc.layout->elements.at(ifm::mzi::Vertex::L11).reflection.normal().norm(), 1.0,
              1e-15);
}

TEST(Parse, CommentsBlankLinesAndAnyOrder) {
  const std::string text = "# header\n\nsource momentum 1 0 0 polarization 0 0 1 width 0.05\n" +
                           kMinimal.substr(0, kMinimal.find("source")) +
                           "  # trailing comment line\n";
  EXPECT_TRUE(parse_layout(text).ok());
}

TEST(Parse, BombByLabelAndByArm) {
  const LayoutDocument a = parse_layout(kMinimal + "bomb arm lower\n");
  const LayoutDocument b = parse_layout(kMinimal + "bomb arm L11->L12 efficiency 1\n");
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(a.layout->obstruction, b.layout->obstruction);
  EXPECT_EQ(a.layout->obstruction->efficiency, 1.0);
}

TEST(Diagnostics, DegenerateNormalIsPositioned) {
  const LayoutDocument doc =
      parse_layout(slurp(std::filesystem::path(IFM_TEST_DATA_DIR) / "degenerate_normal.ifm"));
  EXPECT_FALSE(doc.ok());
  ASSERT_EQ(doc.diagnostics.size(), 1u);
  const Diagnostic& d = doc.diagnostics[0];
  EXPECT_EQ(d.line, 9);
  EXPECT_EQ(d.column, 19);
  EXPECT_NE(d.message.find("degenerate"), std::string::npos);
  EXPECT_EQ(format_diagnostic("x.ifm", d).rfind("x.ifm:9:19: error: degenerate", 0), 0u);
}

TEST(Diagnostics, CollectsSeveralErrors) {
  std::string text = kMinimal;
  text += "frobnicate 1 2\n";               // line 14
  text += "vertex L99 0 0 0\n";             // line 15
  text += "arm L11 L12 length 1\n";         // line 16, duplicate
  text += "detector D3 port a\n";           // line 17
  text += "beamsplitter L11 normal 1 x 0\n";  // line 18
  const LayoutDocument doc = parse_layout(text);
  EXPECT_FALSE(doc.ok());
  EXPECT_FALSE(doc.layout.has_value());
  ASSERT_GE(doc.diagnostics.size(), 5u);
  std::vector<int> lines;
  for (const auto& d : doc.diagnostics) lines.push_back(d.line);
  for (int l : {14, 15, 16, 17, 18}) {
    EXPECT_NE(std::find(lines.begin(), lines.end(), l), lines.end()) << l;
  }
  EXPECT_EQ(doc.diagnostics[0].column, 1);
  EXPECT_NE(doc.diagnostics[0].message.find("frobnicate"), std::string::npos);
}

TEST(Diagnostics, MissingPieces) {
  const std::string no_l22 = R"(vertex L11 0 0 0
vertex L12 0 -1 0
vertex L21 1 0 0
)";
  const LayoutDocument doc = parse_layout(no_l22);
  EXPECT_FALSE(doc.ok());
  bool saw_vertex = false;
  for (const auto& d : doc.diagnostics) {
    if (d.message.find("missing mandatory vertex L22") != std::string::npos) saw_vertex = true;
  }
  EXPECT_TRUE(saw_vertex);
}

TEST(Diagnostics, TrailingTokensAndBadValues) {
  EXPECT_FALSE(parse_layout(kMinimal + "detector D1 port a extra\n").ok());
  EXPECT_FALSE(parse_layout(kMinimal + "bomb arm lower efficiency 2\n").ok());
  EXPECT_FALSE(parse_layout(kMinimal + "bomb arm sideways\n").ok());
  std::string bad_len = kMinimal;
  bad_len.replace(bad_len.find("arm L12 L22 length 1"), 20, "arm L12 L22 length -1");
  EXPECT_FALSE(parse_layout(bad_len).ok());
  EXPECT_FALSE(parse_layout(kMinimal + "detector D1 port a\ndetector D2 port a\n").ok());
  // A lone detector line leaves the other detector on the remaining port.
  const LayoutDocument swapped = parse_layout(kMinimal + "detector D2 port a\n");
  ASSERT_TRUE(swapped.ok());
  EXPECT_EQ(swapped.layout->detectors.at(ifm::mzi::Detector::D1), ifm::mzi::Port::b);
}

TEST(Diagnostics, EmptyInput) {
  const LayoutDocument doc = parse_layout("");
  EXPECT_FALSE(doc.ok());
  EXPECT_FALSE(doc.diagnostics.empty());
}

}  // namespace
